use std::f64::consts::{FRAC_PI_2, PI};

use crate::analytic::{beta, success_probability};
use crate::error::{Error, Result};

/// Forward-model error every returned branch must stay within.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

/// Minimum margin for the strict phase-ordering comparisons.
pub const ORDERING_MARGIN: f64 = 1e-6;

/// All phases in (0, 2*pi) that reproduce one observed probability.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFit {
    pub target_p: f64,
    pub n: usize,
    pub j: u32,
    /// Candidate phases, strictly ascending.
    pub branches: Vec<f64>,
    /// |model(branch) - target| per branch, same order.
    pub residuals: Vec<f64>,
}

/// Highest probability reachable with `j` iterations over any phase:
/// 1 once the swept angle can reach pi/2, otherwise the phi = pi value
/// sin^2((2j + 1) beta).
pub fn feasible_max_probability(n: usize, j: u32) -> Result<f64> {
    let b = beta(n)?;
    let reach = (2.0 * f64::from(j) + 1.0) * b;
    if reach >= FRAC_PI_2 {
        Ok(1.0)
    } else {
        Ok(reach.sin().powi(2))
    }
}

/// Inverts the closed-form success probability: finds every phase whose
/// model value equals `target_p`. Targets at or below the starting value
/// 1/n, or above [`feasible_max_probability`], are rejected.
///
/// Roots come from arcsin plus the reflection/periodicity family of
/// sin^2, then each candidate is tightened by bisection on the forward
/// model down to a 1e-12 bracket.
pub fn fit_phase(target_p: f64, n: usize, j: u32) -> Result<PhaseFit> {
    if j == 0 {
        return Err(Error::ZeroIterations);
    }
    let b = beta(n)?;
    let initial = 1.0 / n as f64;
    if target_p.is_nan() || target_p <= initial {
        return Err(Error::BelowInitial {
            target: target_p,
            initial,
        });
    }
    let ceiling = feasible_max_probability(n, j)?;
    if target_p > ceiling {
        return Err(Error::InfeasibleTarget {
            target: target_p,
            ceiling,
            n,
            j,
        });
    }

    // Solve sin^2(x) = target on the swept segment x in (b, x_max],
    // where x = (2 j sin(phi/2) + 1) b.
    let x_max = (2.0 * f64::from(j) + 1.0) * b;
    let base_angle = target_p.sqrt().asin();
    let mut arguments = Vec::new();
    let mut k = 0u32;
    loop {
        let offset = f64::from(k) * PI;
        let candidates = [offset + base_angle, offset + PI - base_angle];
        if candidates[0] > x_max + 1e-12 {
            break;
        }
        for x in candidates {
            if x > b + 1e-15 && x <= x_max + 1e-12 {
                arguments.push(x.min(x_max));
            }
        }
        k += 1;
    }
    arguments.sort_by(f64::total_cmp);
    arguments.dedup_by(|a, c| (*a - *c).abs() < 1e-10);

    let mut branches = Vec::new();
    for x in arguments {
        let fraction = ((x / b - 1.0) / (2.0 * f64::from(j))).min(1.0);
        if fraction <= 0.0 {
            continue;
        }
        let low = 2.0 * fraction.asin();
        for phi in [low, 2.0 * PI - low] {
            branches.push(refine(n, j, target_p, phi));
        }
    }
    branches.sort_by(f64::total_cmp);
    branches.dedup_by(|a, c| (*a - *c).abs() < 1e-10);

    let residuals = branches
        .iter()
        .map(|&phi| (success_probability(n, j, phi).expect("phase in range") - target_p).abs())
        .collect();
    Ok(PhaseFit {
        target_p,
        n,
        j,
        branches,
        residuals,
    })
}

/// Bisection polish around an arcsin-derived candidate. Falls back to the
/// candidate itself when no sign change exists nearby (tangent roots).
fn refine(n: usize, j: u32, target: f64, phi_hat: f64) -> f64 {
    let upper_limit = 2.0 * PI * (1.0 - f64::EPSILON);
    let g = |phi: f64| success_probability(n, j, phi).expect("phase in range") - target;
    let mut half_width = 1e-9;
    let mut bracket = None;
    while half_width <= 1e-3 {
        let lo = (phi_hat - half_width).max(phi_hat / 2.0);
        let hi = (phi_hat + half_width).min(upper_limit);
        if g(lo) * g(hi) < 0.0 {
            bracket = Some((lo, hi));
            break;
        }
        half_width *= 10.0;
    }
    let Some((mut lo, mut hi)) = bracket else {
        return phi_hat;
    };
    let mut g_lo = g(lo);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_lo * g_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            g_lo = g_mid;
        }
    }
    0.5 * (lo + hi)
}

/// Outcome of the strict two-chain ordering check.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingReport {
    pub ok: bool,
    /// One human-readable line per violated comparison.
    pub violations: Vec<String>,
}

/// Checks that each three-phase chain decreases strictly:
/// chain[0] > chain[1] > chain[2], every gap above [`ORDERING_MARGIN`].
pub fn validate_ordering(low: &[f64; 3], high: &[f64; 3]) -> OrderingReport {
    let mut violations = Vec::new();
    for (name, chain) in [("low", low), ("high", high)] {
        for i in 0..2 {
            if chain[i] - chain[i + 1] <= ORDERING_MARGIN {
                violations.push(format!(
                    "{name} chain: position {} ({:.6}) does not exceed position {} ({:.6})",
                    i + 1,
                    chain[i],
                    i + 2,
                    chain[i + 1],
                ));
            }
        }
    }
    OrderingReport {
        ok: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasibility_ceiling_known_values() {
        let c = feasible_max_probability(80, 3).unwrap();
        assert!((c - 0.49886533613281253).abs() < 1e-12);
        assert!((0.498..=0.500).contains(&c));
        assert_eq!(feasible_max_probability(4, 1).unwrap(), 1.0);
        assert!((feasible_max_probability(80, 0).unwrap() - 0.0125).abs() < 1e-12);
    }

    #[test]
    fn feasibility_ceiling_never_decreases_with_more_iterations() {
        let mut last = 0.0;
        for j in 0..40 {
            let c = feasible_max_probability(80, j).unwrap();
            assert!(c >= last);
            last = c;
        }
        assert_eq!(last, 1.0);
    }

    #[test]
    fn fit_recovers_both_branches_for_each_observed_rate() {
        let cases = [
            (0.35, 1.7736145389589546, 4.509570768220632),
            (0.37, 1.8749037620580544, 4.408281545121532),
            (0.40, 2.0392755022346627, 4.2439098049449235),
            (0.43, 2.226834870748891, 4.056350436430695),
            (0.48, 2.666583148350864, 3.616602158828722),
        ];
        for (p, low, high) in cases {
            let fit = fit_phase(p, 80, 3).unwrap();
            assert_eq!(fit.branches.len(), 2, "p = {p}");
            assert!((fit.branches[0] - low).abs() < 1e-9, "p = {p}");
            assert!((fit.branches[1] - high).abs() < 1e-9, "p = {p}");
        }
    }

    #[test]
    fn every_branch_reproduces_the_target_through_the_model() {
        for p in [0.0126, 0.05, 0.2, 0.35, 0.43, 0.49, 0.498] {
            let fit = fit_phase(p, 80, 3).unwrap();
            assert!(!fit.branches.is_empty(), "p = {p}");
            for (phi, residual) in fit.branches.iter().zip(&fit.residuals) {
                let forward = success_probability(80, 3, *phi).unwrap();
                assert!(
                    (forward - p).abs() <= RESIDUAL_TOLERANCE,
                    "p = {p}, phi = {phi}"
                );
                assert!(*residual <= RESIDUAL_TOLERANCE);
            }
        }
    }

    #[test]
    fn branches_mirror_around_pi() {
        let fit = fit_phase(0.43, 80, 3).unwrap();
        let sum = fit.branches[0] + fit.branches[1];
        assert!((sum - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn target_at_the_ceiling_collapses_to_a_single_phase() {
        let ceiling = feasible_max_probability(80, 3).unwrap();
        let fit = fit_phase(ceiling, 80, 3).unwrap();
        assert_eq!(fit.branches.len(), 1);
        assert!((fit.branches[0] - PI).abs() < 1e-9);
    }

    #[test]
    fn small_spaces_can_have_more_than_two_branches() {
        // 4 items, 3 iterations: the swept angle covers more than one
        // half-period, so 0.5 is hit four times.
        let fit = fit_phase(0.5, 4, 3).unwrap();
        assert_eq!(fit.branches.len(), 4);
        for w in fit.branches.windows(2) {
            assert!(w[0] < w[1]);
        }
        for residual in &fit.residuals {
            assert!(*residual <= RESIDUAL_TOLERANCE);
        }
    }

    #[test]
    fn saturated_probability_is_a_tangent_root() {
        let fit = fit_phase(1.0, 4, 3).unwrap();
        assert_eq!(fit.branches.len(), 2);
        for residual in &fit.residuals {
            assert!(*residual <= RESIDUAL_TOLERANCE);
        }
    }

    #[test]
    fn infeasible_targets_name_the_ceiling() {
        match fit_phase(0.60, 80, 3) {
            Err(Error::InfeasibleTarget {
                target,
                ceiling,
                n,
                j,
            }) => {
                assert_eq!(target, 0.60);
                assert!((ceiling - 0.49886533613281253).abs() < 1e-12);
                assert_eq!((n, j), (80, 3));
            }
            other => panic!("expected infeasible-target error, got {other:?}"),
        }
    }

    #[test]
    fn targets_at_or_below_the_start_are_rejected() {
        assert!(matches!(
            fit_phase(0.0125, 80, 3),
            Err(Error::BelowInitial { .. })
        ));
        assert!(matches!(
            fit_phase(0.005, 80, 3),
            Err(Error::BelowInitial { .. })
        ));
        assert!(matches!(
            fit_phase(-0.1, 80, 3),
            Err(Error::BelowInitial { .. })
        ));
    }

    #[test]
    fn zero_iterations_cannot_be_fitted() {
        assert_eq!(fit_phase(0.43, 80, 0), Err(Error::ZeroIterations));
    }

    #[test]
    fn ordering_accepts_strictly_decreasing_chains() {
        let report = validate_ordering(
            &[2.226835, 2.039276, 1.773615],
            &[4.408282, 3.616602, 2.039276],
        );
        assert!(report.ok);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn ordering_rejects_swapped_and_tied_phases() {
        let report = validate_ordering(
            &[2.039276, 2.226835, 1.773615],
            &[4.408282, 4.408282, 2.039276],
        );
        assert!(!report.ok);
        assert_eq!(report.violations.len(), 2);
        assert!(report.violations[0].contains("low chain"));
        assert!(report.violations[1].contains("high chain"));
    }

    #[test]
    fn ordering_margin_is_strict() {
        let report = validate_ordering(&[2.0 + 5e-7, 2.0, 1.0], &[3.0, 2.0, 1.0]);
        assert!(!report.ok);
        assert_eq!(report.violations.len(), 1);
    }
}
