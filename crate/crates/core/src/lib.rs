//! Topological, induced and nonlinear pressure of locally constant
//! potentials on one-sided subshifts of finite type.
//!
//! Every numeric type is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`, which is what the command line tool uses.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod error;
pub mod fixtures;
pub mod freezing;
pub mod induced;
pub mod linalg;
pub mod markov;
pub mod nonlinear;
pub mod optimize;
pub mod potential;
pub mod recode;
pub mod report;
pub mod scalar;
pub mod sft;
pub mod verify;
mod walk;

pub use classical::{
    cylinder_pressure_estimate, rpf_equilibrium, spectral_pressure, topological_pressure, Diagnostics, Method,
    PressureResult,
};
pub use error::{Error, Result};
pub use freezing::{
    beta_sweep, detect_freezing, differentiability_check, h_infinity, max_cycle_ratio, max_cycle_ratio_brute_force,
    zero_temperature_limit, BetaSweep, CycleRatioResult, FreezingVerdict, ZeroTemperatureReport,
};
pub use induced::{
    bowen_root, bowen_root_bisection, direct_induced_estimate, directional_derivatives, induced_equilibrium,
    induced_pressure, induced_property_suite, tangent_check, variational_ratio, DirectionalDerivatives,
    InducedProblem, TangentReport,
};
pub use linalg::SquareMatrix;
pub use markov::{cycle_measure, stationary_distribution, MarkovMeasure};
pub use nonlinear::{
    conjugacy_invariance_check, g_beta_pressure, nonlinear_direct, nonlinear_induced_direct, nonlinear_induced_root,
    nonlinear_variational, r_threshold_scan, GBetaMethod, NonlinearFunctional, NonlinearOptions, PotentialVector,
    ThresholdScan,
};
pub use optimize::{optimize_markov, LogitChart, OptimizeOptions, OptimizeResult};
pub use potential::LocallyConstantPotential;
pub use recode::{higher_block_recode, permute_symbols, to_range_one, Recoded};
pub use report::{Check, Report};
pub use scalar::{log_sum_exp, Scalar};
pub use verify::{verify_all, Tolerances, VerifyOptions};
pub use sft::{enumeration_cap, format_word, parse_word, set_enumeration_cap, Cycle, Sft, Word};

pub type Potential = LocallyConstantPotential<f64>;
pub type Measure = MarkovMeasure<f64>;
pub type Matrix = SquareMatrix<f64>;
pub type Pressure = PressureResult<f64>;
pub type Problem = InducedProblem<f64>;
pub type Functional = NonlinearFunctional<f64>;
pub type Vector = PotentialVector<f64>;
