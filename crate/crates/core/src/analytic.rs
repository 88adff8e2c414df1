use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gates::check_phase;

/// Angle between the uniform state and the unmarked subspace:
/// beta = arcsin(1/sqrt(n)).
pub fn beta(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    Ok((1.0 / (n as f64).sqrt()).asin())
}

/// Closed-form success probability of the phase-matched search:
/// sin^2((2 j sin(phi/2) + 1) beta). Exact at `phi = pi`, an
/// approximation elsewhere; always returns 1/n at `j = 0`.
pub fn success_probability(n: usize, j: u32, phi: f64) -> Result<f64> {
    check_phase(phi)?;
    let b = beta(n)?;
    let x = (2.0 * f64::from(j) * (phi / 2.0).sin() + 1.0) * b;
    Ok(x.sin().powi(2))
}

/// Alternative closed form sin^2((2 j + 1) sin(theta/2) beta), which
/// scales the whole rotation count instead of only the per-step angle.
/// Coincides with [`success_probability`] at `theta = pi` but misses the
/// `j = 0` starting value 1/n for any other angle.
pub fn success_probability_rotation(n: usize, j: u32, theta: f64) -> Result<f64> {
    check_phase(theta)?;
    let b = beta(n)?;
    let x = (2.0 * f64::from(j) + 1.0) * (theta / 2.0).sin() * b;
    Ok(x.sin().powi(2))
}

/// Large-n estimate of the best iteration count:
/// (pi sqrt(n) / 4 - 1/2) / sin(phi/2).
pub fn j_opt_approx(n: usize, phi: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let s = singular_checked_sin_half(phi)?;
    Ok((PI * (n as f64).sqrt() / 4.0 - 0.5) / s)
}

/// Exact real-valued optimum of the closed form:
/// (pi / (2 beta) - 1) / (2 sin(phi/2)).
pub fn j_opt_exact(n: usize, phi: f64) -> Result<f64> {
    let b = beta(n)?;
    let s = singular_checked_sin_half(phi)?;
    Ok((PI / (2.0 * b) - 1.0) / (2.0 * s))
}

fn singular_checked_sin_half(phi: f64) -> Result<f64> {
    check_phase(phi).map_err(|_| Error::SingularPhase(phi))?;
    Ok((phi / 2.0).sin())
}

/// Where an iteration count sits relative to the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CookingStatus {
    /// Fewer iterations than the optimum: probability still climbing.
    Undercooked,
    /// The best integer iteration count (or tied for it).
    Optimal,
    /// Past the optimum: probability already folding back down.
    Overcooked,
}

impl CookingStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CookingStatus::Undercooked => "undercooked",
            CookingStatus::Optimal => "optimal",
            CookingStatus::Overcooked => "overcooked",
        }
    }
}

/// Classifies `j` against the continuous optimum. The two integers
/// bracketing the optimum are compared and whichever reaches the higher
/// probability (or both, on a tie) counts as optimal.
pub fn classify_cooking(n: usize, j: u32, phi: f64) -> Result<CookingStatus> {
    let j_star = j_opt_exact(n, phi)?;
    let lower = j_star.floor() as u32;
    let upper = j_star.ceil() as u32;
    let p_here = success_probability(n, j, phi)?;
    let best = success_probability(n, lower, phi)?.max(success_probability(n, upper, phi)?);
    if (j == lower || j == upper) && p_here >= best - 1e-12 {
        Ok(CookingStatus::Optimal)
    } else if f64::from(j) < j_star {
        Ok(CookingStatus::Undercooked)
    } else {
        Ok(CookingStatus::Overcooked)
    }
}

/// The search restricted to the plane spanned by the marked item and the
/// uniform mixture of the rest. Real amplitudes suffice in this picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDState {
    /// Amplitude on the marked item.
    pub marked: f64,
    /// Amplitude on the normalized sum of unmarked items.
    pub rest: f64,
}

impl TwoDState {
    /// The uniform state in plane coordinates: (sin beta, cos beta).
    pub fn initial(n: usize) -> Result<Self> {
        let b = beta(n)?;
        Ok(Self {
            marked: b.sin(),
            rest: b.cos(),
        })
    }

    /// Applies a 2x2 matrix acting on the column (marked, rest).
    pub fn apply(&self, m: &[[f64; 2]; 2]) -> Self {
        Self {
            marked: m[0][0] * self.marked + m[0][1] * self.rest,
            rest: m[1][0] * self.marked + m[1][1] * self.rest,
        }
    }

    pub fn marked_probability(&self) -> f64 {
        self.marked * self.marked
    }

    pub fn norm_sqr(&self) -> f64 {
        self.marked * self.marked + self.rest * self.rest
    }
}

/// Plane rotation by `angle`, acting on (marked, rest) columns.
fn plane_rotation(angle: f64) -> [[f64; 2]; 2] {
    let (s, c) = angle.sin_cos();
    [[c, s], [-s, c]]
}

/// One standard iteration in the plane: a rotation by 2 beta toward the
/// marked axis.
pub fn step_rotation(n: usize) -> Result<[[f64; 2]; 2]> {
    let b = beta(n)?;
    Ok(plane_rotation(2.0 * b))
}

/// All `j` generalized iterations folded into a single rotation by
/// 2 j sin(theta/2) beta. Propagating [`TwoDState::initial`] through this
/// matrix reproduces [`success_probability`].
pub fn total_rotation(n: usize, j: u32, theta: f64) -> Result<[[f64; 2]; 2]> {
    check_phase(theta)?;
    let b = beta(n)?;
    Ok(plane_rotation(2.0 * f64::from(j) * (theta / 2.0).sin() * b))
}
