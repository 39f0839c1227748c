//! Generalized coined quantum walks on an `N`-cycle.
//!
//! The walk moves a two-level coin and a position on `Z_N`; every shift out
//! of site `n` picks up a phase `phi(n)`. The crate provides exact
//! state-vector evolution ([`walk`]), the quasi-energy spectrum of the
//! one-step unitary for harmonic phases ([`spectral`]), closed-form
//! predictions for recurrences and spreading ([`analytics`]), and the
//! coupled-mode continuum limit ([`bloch`]).

pub mod analytics;
pub mod bessel;
pub mod bloch;
pub mod coin;
pub mod error;
pub mod observables;
pub mod phase;
pub mod series;
pub mod spectral;
pub mod walk;

pub use coin::{build_coin, CoinSpec, CoinVariant};
pub use error::{Result, WalkError};
pub use num_complex::Complex64;
pub use observables::{position_distribution, return_probability, sigma, PositionDistribution};
pub use phase::PhaseProfile;
pub use series::TimeSeries;
pub use walk::{auto_cycle_length, evolve, step, InitialState, Observations, Observers, WalkConfig, WalkState};
