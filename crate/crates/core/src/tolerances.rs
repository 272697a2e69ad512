//! Central tolerance constants used by the library and the acceptance suite.
//!
//! Values are pinned here once; tests and runtime checks reference these
//! constants rather than scattering magic numbers.

/// FFT round trip and Parseval identity (max relative error).
pub const FFT_ROUNDTRIP: f64 = 1e-13;

/// Spectral vs quadrature inner products, heat-multiplier decay checks.
pub const DUAL_PATH: f64 = 1e-12;

/// Partition-of-unity deviation on the integer lattice.
pub const PARTITION_OF_UNITY: f64 = 1e-14;

/// Littlewood-Paley reconstruction of band-limited fields.
pub const LP_RECONSTRUCTION: f64 = 1e-12;

/// Commutator decomposition identity residual (relative to |v|_2 |rho|_inf).
pub const COMMUTATOR_IDENTITY: f64 = 1e-11;

/// Single-mode closed-form norm checks.
pub const CLOSED_FORM_NORM: f64 = 1e-10;

/// Energy-budget residual, relative to E(0).
pub const BUDGET_RESIDUAL: f64 = 1e-6;

/// Heat-equation energy decay vs exact exponential (relative).
pub const HEAT_EXACT: f64 = 1e-10;

/// Manufactured-solution max error at the reference resolution.
pub const MMS_MAX_ERROR: f64 = 1e-6;

/// L2 drift of a transport run over one mixing stage (relative).
pub const TRANSPORT_L2_DRIFT: f64 = 1e-4;

/// Divergence-free requirement on drifts and blocks.
pub const DIVERGENCE_FREE: f64 = 1e-10;

/// Spectral divergence of construction-2 blocks.
pub const BLOCK_DIVERGENCE: f64 = 1e-12;

/// Block L2 normalisation slack.
pub const BLOCK_L2: f64 = 1e-10;

/// Cross-shell flux of a block for |q - n| >= 2.
pub const CROSS_SHELL_FLUX: f64 = 1e-12;

/// Normalized flux window around the target value 2.
pub const FLUX_WINDOW: (f64, f64) = (1.8, 2.2);

/// Cutoff partition sum_n chi_n^2 deviation from 1 on [0, T).
pub const CUTOFF_PARTITION: f64 = 1e-12;

/// Viscosity normalisation residual |2 nu_m int |grad u^m|^2 - 1|.
pub const NU_NORMALISATION: f64 = 1e-8;

/// Zero-work residual for the truncated NSE pairs.
pub const ZERO_WORK: f64 = 1e-6;

/// Weak-solution residual per test field at reference quadrature.
pub const WEAK_RESIDUAL: f64 = 1e-8;

/// |Pi_q(T,h) - 1/2| at the top computed shell.
pub const PI_HALF_WINDOW: f64 = 0.1;

/// Anomalous work Phi_q at the top shell.
pub const PHI_TOP: f64 = 0.05;

/// Mix-norm contraction factor required per mixing stage.
pub const MIXING_CONTRACTION: f64 = 0.5;

/// Monitored sup-norm ceiling for transported densities.
pub const DENSITY_LINF_CEILING: f64 = 10.0;

/// Fraction of total energy allowed in the top retained octave.
pub const TAIL_ENERGY_FRACTION: f64 = 1e-6;

/// Exact algebraic identity nu_m Lambda_m^2 tau_m = m.
pub const SCHEDULE_IDENTITY: f64 = 1e-12;

/// Lemma-type inequality slack factor (LHS <= RHS * (1 + this)).
pub const INEQUALITY_SLACK: f64 = 1e-3;
