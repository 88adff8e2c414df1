use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// How far a squared norm may drift from 1 before a state is rejected.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// A pure state over `n` basis items, stored as dense complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Equal-weight superposition: every amplitude is 1/sqrt(n).
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        Ok(Self { amps: vec![a; n] })
    }

    /// Basis state |k>: amplitude 1 at `k`, 0 elsewhere.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, n });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// Builds a state from raw amplitudes, rejecting wrong dimensions and
    /// vectors whose squared norm is off by more than [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidDimension(amps.len()));
        }
        let state = Self { amps };
        state.validate()?;
        Ok(state)
    }

    /// Number of basis items.
    pub fn dimension(&self) -> usize {
        self.amps.len()
    }

    /// Read-only view of the amplitudes.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// |<k|psi>|^2, the chance of observing item `k`.
    pub fn probability(&self, k: usize) -> Result<f64> {
        self.amps
            .get(k)
            .map(|a| a.norm_sqr())
            .ok_or(Error::IndexOutOfRange {
                index: k,
                n: self.amps.len(),
            })
    }

    /// Squared norm; 1 for any valid state.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Checks the squared norm against [`NORM_TOLERANCE`].
    pub fn validate(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(())
    }

    /// Draws one measurement outcome using a fixed-seed generator,
    /// so the same seed always yields the same item.
    pub fn sample(&self, seed: u64) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng)
    }

    /// Draws one measurement outcome from the Born distribution |psi_k|^2.
    pub fn sample_with<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut cumulative = 0.0;
        for (k, a) in self.amps.iter().enumerate() {
            cumulative += a.norm_sqr();
            if u < cumulative {
                return k;
            }
        }
        self.amps.len() - 1
    }
}
