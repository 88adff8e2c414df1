//! Dense-matrix checks of the operator identities behind the simulator:
//! the transform is self-inverse, and the generalized diffusion equals
//! both its explicit circuit and the rank-one projector form.

use num_complex::Complex64;
use std::f64::consts::PI;

use grover_core::gates::{
    diffusion, generalized_diffusion, generalized_diffusion_explicit, grover_step, walsh_hadamard,
    SearchParams,
};
use grover_core::StateVector;

const TOL: f64 = 1e-12;

/// Materializes an operator column by column from basis states.
fn matrix_of(n: usize, mut op: impl FnMut(&mut StateVector)) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|k| {
            let mut state = StateVector::basis(n, k).unwrap();
            op(&mut state);
            state.amplitudes().to_vec()
        })
        .collect()
}

fn assert_matrices_equal(a: &[Vec<Complex64>], b: &[Vec<Complex64>], context: &str) {
    for (col_a, col_b) in a.iter().zip(b) {
        for (x, y) in col_a.iter().zip(col_b) {
            assert!((x - y).norm() < TOL, "{context}: {x} != {y}");
        }
    }
}

#[test]
fn transform_squared_is_the_identity() {
    for n in [4, 8, 16] {
        let m = matrix_of(n, |s| {
            walsh_hadamard(s).unwrap();
            walsh_hadamard(s).unwrap();
        });
        for (k, col) in m.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                let expected = if i == k { 1.0 } else { 0.0 };
                assert!((x - expected).norm() < TOL, "n = {n}");
            }
        }
    }
}

#[test]
fn conjugated_inversion_is_the_mean_reflection() {
    // Transform, flip item 0, transform back, negate: equals the plain
    // inversion about the mean, whose matrix is 2/n - delta.
    for n in [4, 8, 16] {
        let circuit = matrix_of(n, |s| generalized_diffusion_explicit(s, PI).unwrap());
        let direct = matrix_of(n, diffusion);
        assert_matrices_equal(&circuit, &direct, "circuit vs direct");
        for (k, col) in circuit.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                let expected = 2.0 / n as f64 - if i == k { 1.0 } else { 0.0 };
                assert!((x - Complex64::new(expected, 0.0)).norm() < TOL, "n = {n}");
            }
        }
    }
}

#[test]
fn generalized_diffusion_matches_its_explicit_circuit() {
    for n in [4, 8, 16] {
        for phi in [0.5, PI / 2.0, PI, 4.0] {
            let projector = matrix_of(n, |s| generalized_diffusion(s, phi).unwrap());
            let circuit = matrix_of(n, |s| generalized_diffusion_explicit(s, phi).unwrap());
            assert_matrices_equal(&projector, &circuit, &format!("n = {n}, phi = {phi}"));
        }
    }
}

#[test]
fn generalized_diffusion_is_a_rank_one_update_of_minus_identity() {
    for n in [4, 8, 16] {
        for phi in [0.5, PI / 2.0, PI, 4.0] {
            let m = matrix_of(n, |s| generalized_diffusion(s, phi).unwrap());
            let shift = (Complex64::new(1.0, 0.0) - Complex64::cis(phi)) / n as f64;
            for (k, col) in m.iter().enumerate() {
                for (i, x) in col.iter().enumerate() {
                    let expected = shift
                        - if i == k {
                            Complex64::new(1.0, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                    assert!((x - expected).norm() < TOL, "n = {n}, phi = {phi}");
                }
            }
        }
    }
}

#[test]
fn search_step_is_unitary() {
    for (n, phi) in [(8, 2.5), (16, 4.0), (4, PI)] {
        let params = SearchParams::new(n, n - 1, phi, 1).unwrap();
        let m = matrix_of(n, |s| grover_step(s, &params).unwrap());
        // columns must be orthonormal
        for a in 0..n {
            for b in 0..n {
                let dot: Complex64 = (0..n).map(|i| m[a][i].conj() * m[b][i]).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expected).norm() < TOL, "n = {n}, phi = {phi}");
            }
        }
    }
}
