//! disslab: a pseudo-spectral simulation and spectral-analysis laboratory
//! for anomalous-dissipation experiments on periodic boxes.
//!
//! The crate is organised around five groups of machinery:
//!
//! * spectral substrate: [`grid`], [`field`], [`norms`] (periodic grids,
//!   Fourier-space fields, differential operators, quadrature norms,
//!   dealiasing);
//! * analysis: [`lp`] (shell multipliers, Besov-scale norms, shell fluxes,
//!   the commutator decomposition) and [`weights`];
//! * dynamics: [`solver`] (transport / advection-diffusion integration with
//!   an energy-budget ledger and a weak-solution residual tester);
//! * experiments: [`mixing`], [`schedule`], [`construction1`] (the 2.5-D
//!   vanishing-viscosity family) and [`modes`], [`construction2`] (the fully
//!   3-D block construction);
//! * orchestration: [`config`], [`report`], [`storage`], [`accept`].

pub mod bump;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod lp;
pub mod mixing;
pub mod norms;
pub mod quad;
pub mod solver;
pub mod tolerances;
pub mod weights;

pub use error::{Error, Result};
