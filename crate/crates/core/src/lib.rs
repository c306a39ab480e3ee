//! Entropic value-at-risk (utility convention) for discrete laws of bounded
//! random variables.
//!
//! For a level `0 < alpha < 1`,
//!
//! ```text
//! e_alpha(xi) = sup_{z > 0} -(1/z) log( E[exp(-z xi)] / alpha )
//!             = min { E_Q[xi] : H(Q | P) <= -log(alpha) }
//! ```
//!
//! Both sides are computed by independent solvers ([`evar_primal`] and
//! [`evar_dual`]). On top of these the crate builds the indicator curve
//! `Lambda(a) = e_alpha(1_A)` for `P[A] = a` ([`LambdaCurve`]), comonotone
//! (Choquet) utilities for convex distortions ([`choquet_utility`]), the
//! ordering `CVaR_alpha >= e_alpha >= u_Lambda` ([`sandwich`]) and the
//! Kusuoka representation of `e_alpha` as a mixture of CVaR utilities
//! ([`kusuoka`]).
//!
//! ```
//! use evar::{evar_dual, evar_primal, DiscreteDistribution, RiskLevel};
//!
//! let d = DiscreteDistribution::from_weighted(&[(0.0, 0.1), (1.0, 0.9)]).unwrap();
//! let level = RiskLevel::new((-1.0f64).exp()).unwrap();
//! let dual = evar_dual(&d, level).unwrap();
//! let primal = evar_primal(&d, level).unwrap();
//! assert!((dual.value - 0.310_782_773_455_041_8).abs() < 1e-9);
//! assert!((primal.value - dual.value).abs() < 1e-9);
//! ```

pub mod cli;
pub mod dist;
pub mod distortion;
pub mod dual;
mod error;
pub mod kusuoka;
pub mod lambda;
mod numeric;
pub mod primal;

pub use dist::{DiscreteDistribution, QuantileFunction, RiskLevel};

pub use distortion::{
    choquet_utility, comonotone_scenario, cvar, cvar_tail_average, in_scenario_set,
    noncomonotone_witness, sandwich, sandwich_with, scenario_set_margin, u_lambda,
    DistortionFunction, SandwichReport, WitnessReport,
};
pub use dual::{
    entropy_profile, evar_dual, evar_dual_with, gibbs_tilt, relative_entropy, DualConfig,
    DualSolution, ScenarioDensity, Tilt,
};
pub use error::{Error, Result};
pub use kusuoka::{
    cvar_mixture, decreasing_rearrangement, density_entropy, density_to_measure, kusuoka_check,
    measure_to_density, DecreasingDensity, KusuokaCheck, KusuokaMeasure,
};
pub use lambda::{f_partials, indicator_entropy, FPartials, IndicatorPoint, LambdaCurve};
pub use primal::{evar_primal, evar_primal_with, primal_objective, PrimalConfig, PrimalOptimum, PrimalSolution};
