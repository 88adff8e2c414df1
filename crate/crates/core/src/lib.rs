//! Simulator and model-fitting toolkit for generalized amplitude-
//! amplification search.
//!
//! The crate has three layers:
//!
//! * [`statevector`] and [`gates`] — a dense state-vector simulator with
//!   the oracle rotation, Walsh-Hadamard transform, and a phase-
//!   generalized diffusion that works for any dimension;
//! * [`analytic`] — closed-form success probabilities, optimal iteration
//!   counts, and the two-dimensional rotation picture;
//! * [`phasefit`] and [`memorymodel`] — inversion of the closed form to
//!   recover phases from observed recall rates, and reproduction of a
//!   six-condition recognition experiment under ordering constraints.

pub mod analytic;
pub mod error;
pub mod gates;
pub mod memorymodel;
pub mod phasefit;
pub mod statevector;

pub use analytic::{CookingStatus, TwoDState};
pub use error::{Error, Result};
pub use gates::{SearchParams, SearchTrace};
pub use memorymodel::{
    Condition, EmotionLevel, ExperimentTable, Strategy, SyntheticExperiment, TableReport,
};
pub use num_complex::Complex64;
pub use phasefit::PhaseFit;
pub use statevector::StateVector;
