use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statevector::StateVector;

/// Configuration for one search run: space size, marked item, phases,
/// and iteration count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    n: usize,
    marked: usize,
    phi: f64,
    theta: f64,
    iterations: u32,
}

impl SearchParams {
    /// Phase-matched parameters: the oracle angle `theta` defaults to `phi`.
    pub fn new(n: usize, marked: usize, phi: f64, iterations: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        if marked >= n {
            return Err(Error::IndexOutOfRange { index: marked, n });
        }
        check_phase(phi)?;
        Ok(Self {
            n,
            marked,
            phi,
            theta: phi,
            iterations,
        })
    }

    /// Overrides the oracle angle, breaking phase matching on purpose.
    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        check_phase(theta)?;
        self.theta = theta;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn marked(&self) -> usize {
        self.marked
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn iterations(&self) -> u32 {
        self.iterations
    }

    /// True when the oracle and diffusion angles coincide.
    pub fn phase_matched(&self) -> bool {
        self.theta == self.phi
    }
}

pub(crate) fn check_phase(angle: f64) -> Result<()> {
    if !angle.is_finite() || angle <= 0.0 || angle >= 2.0 * std::f64::consts::PI {
        return Err(Error::PhaseOutOfRange(angle));
    }
    Ok(())
}

/// Marked-item probability after each iteration, plus the final state.
#[derive(Debug, Clone)]
pub struct SearchTrace {
    probabilities: Vec<f64>,
    final_state: StateVector,
}

impl SearchTrace {
    /// Marked-item probability indexed by iteration (entry 0 is the start).
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// (iteration, probability) pairs in order.
    pub fn steps(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(j, &p)| (j as u32, p))
    }

    pub fn final_probability(&self) -> f64 {
        *self
            .probabilities
            .last()
            .expect("trace has the start entry")
    }

    pub fn final_state(&self) -> &StateVector {
        &self.final_state
    }

    pub fn iterations(&self) -> u32 {
        (self.probabilities.len() - 1) as u32
    }
}

/// Membership test for the marked item: 1 exactly at `i == marked`.
pub fn oracle(n: usize, marked: usize, i: usize) -> Result<bool> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if marked >= n {
        return Err(Error::IndexOutOfRange { index: marked, n });
    }
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    Ok(i == marked)
}

/// Flips the sign of amplitude `k`, leaving the rest untouched.
pub fn selective_phase_inversion(state: &mut StateVector, k: usize) -> Result<()> {
    let n = state.dimension();
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    state.amps_mut()[k] = -state.amps_mut()[k];
    Ok(())
}

/// Multiplies amplitude `k` by e^(i*angle); `angle = pi` reduces to the
/// plain sign flip.
pub fn selective_phase_rotation(state: &mut StateVector, k: usize, angle: f64) -> Result<()> {
    let n = state.dimension();
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    if !angle.is_finite() {
        return Err(Error::PhaseOutOfRange(angle));
    }
    state.amps_mut()[k] *= Complex64::cis(angle);
    Ok(())
}

/// In-place normalized Walsh-Hadamard transform (butterfly, O(n log n)).
/// Self-inverse; maps |0> to the uniform state. Needs `n = 2^k`.
pub fn walsh_hadamard(state: &mut StateVector) -> Result<()> {
    let n = state.dimension();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let amps = state.amps_mut();
    let mut half = 1;
    while half < n {
        for block in (0..n).step_by(half * 2) {
            for i in block..block + half {
                let a = amps[i];
                let b = amps[i + half];
                amps[i] = a + b;
                amps[i + half] = a - b;
            }
        }
        half *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    for a in amps.iter_mut() {
        *a *= scale;
    }
    Ok(())
}

/// Inversion about the mean: psi_i -> 2*mean - psi_i. Works for any n.
pub fn diffusion(state: &mut StateVector) {
    let n = state.dimension();
    let mean: Complex64 = state.amplitudes().iter().sum::<Complex64>() / n as f64;
    for a in state.amps_mut() {
        *a = 2.0 * mean - *a;
    }
}

/// Phase-generalized inversion about the mean:
/// psi -> -psi + (1 - e^(i*phi)) * mean * ones. At `phi = pi` this is
/// exactly [`diffusion`]; unlike the explicit circuit it works for any n.
pub fn generalized_diffusion(state: &mut StateVector, phi: f64) -> Result<()> {
    if !phi.is_finite() {
        return Err(Error::PhaseOutOfRange(phi));
    }
    let n = state.dimension();
    let mean: Complex64 = state.amplitudes().iter().sum::<Complex64>() / n as f64;
    let shift = (Complex64::new(1.0, 0.0) - Complex64::cis(phi)) * mean;
    for a in state.amps_mut() {
        *a = shift - *a;
    }
    Ok(())
}

/// The same operator built gate by gate: transform, rotate the phase of
/// item 0 by `phi`, transform back, negate. Only defined for `n = 2^k`;
/// kept for cross-checking against [`generalized_diffusion`].
pub fn generalized_diffusion_explicit(state: &mut StateVector, phi: f64) -> Result<()> {
    walsh_hadamard(state)?;
    selective_phase_rotation(state, 0, phi)?;
    walsh_hadamard(state)?;
    for a in state.amps_mut() {
        *a = -*a;
    }
    Ok(())
}

/// One search iteration: oracle phase rotation on the marked item,
/// then the generalized diffusion.
pub fn grover_step(state: &mut StateVector, params: &SearchParams) -> Result<()> {
    check_dimension(state, params)?;
    selective_phase_rotation(state, params.marked(), params.theta())?;
    generalized_diffusion(state, params.phi())
}

/// One search iteration using the explicit circuit for the diffusion.
pub fn grover_step_explicit(state: &mut StateVector, params: &SearchParams) -> Result<()> {
    check_dimension(state, params)?;
    selective_phase_rotation(state, params.marked(), params.theta())?;
    generalized_diffusion_explicit(state, params.phi())
}

fn check_dimension(state: &StateVector, params: &SearchParams) -> Result<()> {
    if state.dimension() != params.n() {
        return Err(Error::DimensionMismatch {
            actual: state.dimension(),
            expected: params.n(),
        });
    }
    Ok(())
}

/// Full run from the uniform state, recording the marked-item probability
/// after every iteration.
pub fn run_search(params: &SearchParams) -> Result<SearchTrace> {
    run_with(params, grover_step)
}

/// Same as [`run_search`] but through the explicit circuit; errors unless
/// `n` is a power of two.
pub fn run_search_explicit(params: &SearchParams) -> Result<SearchTrace> {
    run_with(params, grover_step_explicit)
}

fn run_with(
    params: &SearchParams,
    step: fn(&mut StateVector, &SearchParams) -> Result<()>,
) -> Result<SearchTrace> {
    let mut state = StateVector::uniform(params.n())?;
    let mut probabilities = Vec::with_capacity(params.iterations() as usize + 1);
    probabilities.push(state.probability(params.marked())?);
    for _ in 0..params.iterations() {
        step(&mut state, params)?;
        probabilities.push(state.probability(params.marked())?);
    }
    Ok(SearchTrace {
        probabilities,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const TOL: f64 = 1e-12;

    fn assert_close(a: Complex64, b: Complex64) {
        assert!((a - b).norm() < TOL, "{a} != {b}");
    }

    /// Deterministic non-trivial state for equivalence checks.
    fn ramp_state(n: usize) -> StateVector {
        let raw: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new(1.0 + k as f64, 0.5 - 0.1 * k as f64))
            .collect();
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        StateVector::from_amplitudes(raw.into_iter().map(|a| a / norm).collect()).unwrap()
    }

    #[test]
    fn oracle_hits_only_the_marked_item() {
        assert!(oracle(80, 17, 17).unwrap());
        assert!(!oracle(80, 17, 3).unwrap());
        assert!(oracle(80, 80, 0).is_err());
        assert!(oracle(80, 0, 80).is_err());
    }

    #[test]
    fn inversion_flips_one_sign() {
        let mut s = StateVector::uniform(4).unwrap();
        selective_phase_inversion(&mut s, 3).unwrap();
        let a = s.amplitudes();
        assert_close(a[0], Complex64::new(0.5, 0.0));
        assert_close(a[3], Complex64::new(-0.5, 0.0));
        assert!(selective_phase_inversion(&mut s, 4).is_err());
    }

    #[test]
    fn inversion_twice_is_identity() {
        let mut s = ramp_state(8);
        let before = s.clone();
        selective_phase_inversion(&mut s, 5).unwrap();
        selective_phase_inversion(&mut s, 5).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert_close(*a, *b);
        }
    }

    #[test]
    fn rotation_by_pi_matches_inversion() {
        let mut a = ramp_state(8);
        let mut b = a.clone();
        selective_phase_rotation(&mut a, 2, PI).unwrap();
        selective_phase_inversion(&mut b, 2).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert_close(*x, *y);
        }
    }

    #[test]
    fn rotation_by_zero_is_identity() {
        let mut s = ramp_state(4);
        let before = s.clone();
        selective_phase_rotation(&mut s, 1, 0.0).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert_close(*a, *b);
        }
    }

    #[test]
    fn rotation_by_half_pi_turns_amplitude_imaginary() {
        let mut s = StateVector::uniform(4).unwrap();
        selective_phase_rotation(&mut s, 3, PI / 2.0).unwrap();
        assert_close(s.amplitudes()[3], Complex64::new(0.0, 0.5));
        assert_close(s.amplitudes()[0], Complex64::new(0.5, 0.0));
    }

    #[test]
    fn walsh_hadamard_maps_zero_to_uniform() {
        let mut s = StateVector::basis(4, 0).unwrap();
        walsh_hadamard(&mut s).unwrap();
        for a in s.amplitudes() {
            assert_close(*a, Complex64::new(0.5, 0.0));
        }
    }

    #[test]
    fn walsh_hadamard_on_two_items() {
        let mut s = StateVector::basis(2, 1).unwrap();
        walsh_hadamard(&mut s).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_close(s.amplitudes()[0], Complex64::new(r, 0.0));
        assert_close(s.amplitudes()[1], Complex64::new(-r, 0.0));
    }

    #[test]
    fn walsh_hadamard_is_self_inverse() {
        let mut s = ramp_state(16);
        let before = s.clone();
        walsh_hadamard(&mut s).unwrap();
        walsh_hadamard(&mut s).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert_close(*a, *b);
        }
    }

    #[test]
    fn walsh_hadamard_rejects_non_power_of_two() {
        let mut s = StateVector::uniform(6).unwrap();
        assert_eq!(walsh_hadamard(&mut s), Err(Error::NotPowerOfTwo(6)));
        let mut s = StateVector::uniform(80).unwrap();
        assert_eq!(walsh_hadamard(&mut s), Err(Error::NotPowerOfTwo(80)));
    }

    #[test]
    fn diffusion_completes_the_four_item_walkthrough() {
        let mut s = StateVector::uniform(4).unwrap();
        selective_phase_inversion(&mut s, 3).unwrap();
        diffusion(&mut s);
        let a = s.amplitudes();
        for unmarked in &a[..3] {
            assert_close(*unmarked, Complex64::new(0.0, 0.0));
        }
        assert_close(a[3], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn diffusion_fixes_the_uniform_state() {
        let mut s = StateVector::uniform(5).unwrap();
        let before = s.clone();
        diffusion(&mut s);
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert_close(*a, *b);
        }
    }

    #[test]
    fn diffusion_is_an_involution() {
        let mut s = ramp_state(8);
        let before = s.clone();
        diffusion(&mut s);
        diffusion(&mut s);
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert_close(*a, *b);
        }
    }

    #[test]
    fn generalized_diffusion_at_pi_equals_plain_diffusion() {
        let mut a = ramp_state(10);
        let mut b = a.clone();
        generalized_diffusion(&mut a, PI).unwrap();
        diffusion(&mut b);
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert_close(*x, *y);
        }
    }

    #[test]
    fn generalized_diffusion_at_half_pi_on_uniform() {
        let mut s = StateVector::uniform(4).unwrap();
        generalized_diffusion(&mut s, PI / 2.0).unwrap();
        for a in s.amplitudes() {
            assert_close(*a, Complex64::new(0.0, -0.5));
        }
    }

    #[test]
    fn explicit_circuit_matches_projector_form() {
        for phi in [0.5, PI / 2.0, PI, 4.0] {
            let mut a = ramp_state(8);
            let mut b = a.clone();
            generalized_diffusion(&mut a, phi).unwrap();
            generalized_diffusion_explicit(&mut b, phi).unwrap();
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                assert_close(*x, *y);
            }
        }
    }

    #[test]
    fn explicit_circuit_requires_power_of_two() {
        let mut s = StateVector::uniform(80).unwrap();
        assert_eq!(
            generalized_diffusion_explicit(&mut s, PI),
            Err(Error::NotPowerOfTwo(80))
        );
    }

    #[test]
    fn params_validate_their_inputs() {
        assert!(SearchParams::new(1, 0, PI, 1).is_err());
        assert!(SearchParams::new(4, 4, PI, 1).is_err());
        assert!(SearchParams::new(4, 0, 0.0, 1).is_err());
        assert!(SearchParams::new(4, 0, 2.0 * PI, 1).is_err());
        assert!(SearchParams::new(4, 0, -1.0, 1).is_err());
        let p = SearchParams::new(4, 0, PI, 1).unwrap();
        assert!(p.phase_matched());
        assert_eq!(p.theta(), PI);
        let p = p.with_theta(2.5).unwrap();
        assert!(!p.phase_matched());
        assert!(p.with_theta(7.0).is_err());
    }

    #[test]
    fn one_step_on_four_items_lands_exactly_on_the_marked_item() {
        let params = SearchParams::new(4, 3, PI, 1).unwrap();
        let mut s = StateVector::uniform(4).unwrap();
        grover_step(&mut s, &params).unwrap();
        let a = s.amplitudes();
        for unmarked in &a[..3] {
            assert_close(*unmarked, Complex64::new(0.0, 0.0));
        }
        assert_close(a[3], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn step_rejects_mismatched_state() {
        let params = SearchParams::new(4, 3, PI, 1).unwrap();
        let mut s = StateVector::uniform(8).unwrap();
        assert_eq!(
            grover_step(&mut s, &params),
            Err(Error::DimensionMismatch {
                actual: 8,
                expected: 4
            })
        );
    }

    #[test]
    fn trace_records_every_iteration() {
        let params = SearchParams::new(4, 3, PI, 1).unwrap();
        let trace = run_search(&params).unwrap();
        let steps: Vec<(u32, f64)> = trace.steps().collect();
        assert_eq!(steps.len(), 2);
        assert!((steps[0].1 - 0.25).abs() < TOL);
        assert!((steps[1].1 - 1.0).abs() < TOL);
        assert_eq!(trace.iterations(), 1);
    }

    #[test]
    fn zero_iterations_returns_the_initial_probability() {
        let params = SearchParams::new(80, 5, PI, 0).unwrap();
        let trace = run_search(&params).unwrap();
        assert_eq!(trace.probabilities().len(), 1);
        assert!((trace.final_probability() - 0.0125).abs() < TOL);
    }

    #[test]
    fn sixteen_items_three_steps_hits_the_known_peak() {
        let params = SearchParams::new(16, 11, PI, 3).unwrap();
        let trace = run_search(&params).unwrap();
        assert!((trace.final_probability() - 0.9613189697265625).abs() < 1e-12);
    }

    #[test]
    fn overshooting_past_the_peak_loses_probability() {
        // 4 items: one step is perfect, the second step folds back to 1/4.
        let params = SearchParams::new(4, 2, PI, 2).unwrap();
        let trace = run_search(&params).unwrap();
        assert!((trace.final_probability() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn large_space_reaches_the_closed_form_peak() {
        let params = SearchParams::new(1024, 77, PI, 25).unwrap();
        let trace = run_search(&params).unwrap();
        assert!((trace.final_probability() - 0.9994612447444079).abs() < 1e-9);
    }

    #[test]
    fn explicit_run_agrees_with_projector_run() {
        let params = SearchParams::new(16, 9, 2.5, 4).unwrap();
        let a = run_search(&params).unwrap();
        let b = run_search_explicit(&params).unwrap();
        for (x, y) in a.probabilities().iter().zip(b.probabilities()) {
            assert!((x - y).abs() < TOL);
        }
    }

    #[test]
    fn explicit_run_rejects_eighty_items() {
        let params = SearchParams::new(80, 0, PI, 3).unwrap();
        match run_search_explicit(&params) {
            Err(Error::NotPowerOfTwo(80)) => {}
            other => panic!("expected power-of-two rejection, got {other:?}"),
        }
        assert!(run_search(&params).is_ok());
    }

    #[test]
    fn search_preserves_the_norm() {
        let params = SearchParams::new(80, 41, 2.5, 12).unwrap();
        let trace = run_search(&params).unwrap();
        trace.final_state().validate().unwrap();
    }
}
