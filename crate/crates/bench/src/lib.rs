//! Criterion benchmarks for the search simulator and the phase-fitting
//! routines live under `benches/`; this crate exports nothing.
