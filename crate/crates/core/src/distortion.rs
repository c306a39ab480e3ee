//! Comonotone (Choquet) utilities of convex distortions and their relation
//! to `e_alpha`.
//!
//! A convex `f: [0, 1] -> [0, 1]` with `f(0) = 0`, `f(1) = 1` defines the
//! scenario set `S_f = { Q : Q[A] >= f(P[A]) for all A }` and the utility
//! `u_f(xi) = inf { E_Q[xi] : Q in S_f }`. For a discrete law with atoms
//! `v_1 < ... < v_n` and tails `T_i = P[xi >= v_i]` the infimum is attained by
//! the scenario `q_i = f(T_i) - f(T_{i+1})`, giving the exact step sum
//! `u_f(xi) = sum_i v_i (f(T_i) - f(T_{i+1}))`, the discrete form of
//! `int_0^1 q_{1-a} f'(a) da`.
//!
//! The entropy ball sits between two such sets, `S_c ⊂ S ⊂ S_Lambda`, hence
//! `CVaR_alpha >= e_alpha >= u_Lambda`.

use serde::Serialize;

use crate::dist::{DiscreteDistribution, RiskLevel};
use crate::dual::{evar_dual, evar_dual_with, DualConfig, ScenarioDensity};
use crate::error::{Error, Result};
use crate::lambda::LambdaCurve;

/// Slack on `Q[A] >= f(P[A])` in [`in_scenario_set`].
pub const MEMBERSHIP_SLACK: f64 = 1e-12;
/// Largest support for exhaustive event enumeration.
pub const MAX_ENUMERATED_ATOMS: usize = 20;
/// Slack on the ordering checked by [`sandwich`].
pub const SANDWICH_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum DistortionFunction {
    Identity,
    /// `c(x) = max(0, (x - 1 + alpha) / alpha)`, with `alpha` in `(0, 1]`.
    Cvar { alpha: f64 },
    Lambda(LambdaCurve),
    /// Piecewise linear through the knots, first knot `(0, 0)`, last `(1, 1)`.
    Tabulated(Vec<(f64, f64)>),
}

impl DistortionFunction {
    pub fn cvar(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::OutOfDomain {
                name: "alpha",
                value: alpha,
                domain: "(0, 1]",
            });
        }
        Ok(Self::Cvar { alpha })
    }

    pub fn lambda(level: RiskLevel) -> Self {
        Self::Lambda(LambdaCurve::new(level))
    }

    /// Validates the knots: `x` strictly increasing from 0 to 1, `f(0) = 0`,
    /// `f(1) = 1`, values in `[0, 1]` and nondecreasing slopes (convexity).
    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDistortion(msg));
        if knots.len() < 2 {
            return bad("need at least two knots".into());
        }
        if knots[0] != (0.0, 0.0) || knots[knots.len() - 1] != (1.0, 1.0) {
            return bad("knots must start at (0, 0) and end at (1, 1)".into());
        }
        if let Some(&(x, y)) = knots
            .iter()
            .find(|(x, y)| !(x.is_finite() && (0.0..=1.0).contains(y)))
        {
            return bad(format!("knot ({x}, {y}) outside [0, 1]"));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return bad("knot abscissae must be strictly increasing".into());
        }
        let slopes: Vec<f64> = knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        if let Some(i) = slopes.windows(2).position(|s| s[1] < s[0] - 1e-12) {
            return bad(format!("not convex at knot {}", i + 1));
        }
        Ok(Self::Tabulated(knots))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain {
                name: "x",
                value: x,
                domain: "[0, 1]",
            });
        }
        Ok(match self {
            Self::Identity => x,
            Self::Cvar { alpha } => ((x - 1.0 + alpha) / alpha).max(0.0),
            Self::Lambda(curve) => curve.lambda_of(x)?,
            Self::Tabulated(knots) => {
                let i = knots.partition_point(|k| k.0 < x).clamp(1, knots.len() - 1);
                let (x0, y0) = knots[i - 1];
                let (x1, y1) = knots[i];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        })
    }
}

/// Minimizing scenario of `S_f` for `d`: `q_i = f(T_i) - f(T_{i+1})`.
pub fn comonotone_scenario(d: &DiscreteDistribution, f: &DistortionFunction) -> Result<ScenarioDensity> {
    let tails = d.tail_probs();
    let mut distorted = tails
        .iter()
        .map(|&t| f.eval(t))
        .collect::<Result<Vec<_>>>()?;
    distorted.push(0.0);
    let probs = distorted.windows(2).map(|w| (w[0] - w[1]).max(0.0)).collect();
    ScenarioDensity::new(probs)
}

/// `u_f(xi)` by the exact step sum over tail probabilities.
pub fn choquet_utility(d: &DiscreteDistribution, f: &DistortionFunction) -> Result<f64> {
    let tails = d.tail_probs();
    let mut total = 0.0;
    let mut upper = f.eval(tails[0])?;
    for (i, &v) in d.values().iter().enumerate() {
        let lower = match tails.get(i + 1) {
            Some(&t) => f.eval(t)?,
            None => 0.0,
        };
        total += v * (upper - lower);
        upper = lower;
    }
    Ok(total)
}

/// `CVaR_alpha(xi)`, the average of the worst `alpha`-tail, for `alpha` in `(0, 1]`.
pub fn cvar(d: &DiscreteDistribution, alpha: f64) -> Result<f64> {
    let value = choquet_utility(d, &DistortionFunction::cvar(alpha)?)?;
    debug_assert!((value - cvar_tail_average(d, alpha)?).abs() <= 1e-12 * d.range().max(1.0));
    Ok(value)
}

/// `(1/alpha) int_0^alpha q(u) du` as an exact step integral.
pub fn cvar_tail_average(d: &DiscreteDistribution, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::OutOfDomain {
            name: "alpha",
            value: alpha,
            domain: "(0, 1]",
        });
    }
    Ok(d.quantile_fn().integral(0.0, alpha) / alpha)
}

/// `u_Lambda(xi)`. Only values of `Lambda` at tail probabilities enter; no
/// derivative of `Lambda` is evaluated.
pub fn u_lambda(d: &DiscreteDistribution, level: RiskLevel) -> Result<f64> {
    choquet_utility(d, &DistortionFunction::lambda(level))
}

/// `min_A (Q[A] - f(P[A]))` over all events of the atoms of `p`.
pub fn scenario_set_margin(
    q: &ScenarioDensity,
    p: &DiscreteDistribution,
    f: &DistortionFunction,
) -> Result<f64> {
    let n = p.len();
    if q.len() != n {
        return Err(Error::Misaligned {
            expected: n,
            got: q.len(),
        });
    }
    if n > MAX_ENUMERATED_ATOMS {
        return Err(Error::TooManyAtoms {
            max: MAX_ENUMERATED_ATOMS,
            got: n,
        });
    }
    let size = 1usize << n;
    let mut p_mass = vec![0.0; size];
    let mut q_mass = vec![0.0; size];
    let mut margin = f64::INFINITY;
    for mask in 1..size {
        let bit = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        p_mass[mask] = p_mass[rest] + p.probs()[bit];
        q_mass[mask] = q_mass[rest] + q.probs()[bit];
        let m = q_mass[mask] - f.eval(p_mass[mask].min(1.0))?;
        margin = margin.min(m);
    }
    Ok(margin.min(0.0 - f.eval(0.0)?))
}

/// Whether `Q[A] >= f(P[A]) - 1e-12` for every event `A`.
/// Exhaustive over `2^n` events, so limited to [`MAX_ENUMERATED_ATOMS`] atoms.
pub fn in_scenario_set(
    q: &ScenarioDensity,
    p: &DiscreteDistribution,
    f: &DistortionFunction,
) -> Result<bool> {
    Ok(scenario_set_margin(q, p, f)? >= -MEMBERSHIP_SLACK)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    pub cvar_value: f64,
    pub evar_value: f64,
    pub ulambda_value: f64,
    /// `cvar - evar`.
    pub gap_cvar_evar: f64,
    /// `evar - u_lambda`.
    pub gap_evar_ulambda: f64,
}

/// `CVaR_alpha >= e_alpha >= u_Lambda`, with `e_alpha` from the dual solver.
/// An ordering violation beyond [`SANDWICH_SLACK`] is returned as an error.
pub fn sandwich(d: &DiscreteDistribution, level: RiskLevel) -> Result<SandwichReport> {
    sandwich_with(d, &LambdaCurve::new(level), &DualConfig::default())
}

pub fn sandwich_with(
    d: &DiscreteDistribution,
    curve: &LambdaCurve,
    config: &DualConfig,
) -> Result<SandwichReport> {
    let level = curve.level();
    let cvar_value = cvar(d, level.alpha())?;
    let evar_value = evar_dual_with(d, level, config)?.value;
    let ulambda_value = choquet_utility(d, &DistortionFunction::Lambda(curve.clone()))?;
    SandwichReport::checked(cvar_value, evar_value, ulambda_value)
}

impl SandwichReport {
    /// Builds the report, rejecting an ordering violation beyond [`SANDWICH_SLACK`].
    pub fn checked(cvar_value: f64, evar_value: f64, ulambda_value: f64) -> Result<Self> {
        let report = Self {
            cvar_value,
            evar_value,
            ulambda_value,
            gap_cvar_evar: cvar_value - evar_value,
            gap_evar_ulambda: evar_value - ulambda_value,
        };
        if report.gap_cvar_evar < -SANDWICH_SLACK || report.gap_evar_ulambda < -SANDWICH_SLACK {
            return Err(Error::OrderingViolation {
                cvar: cvar_value,
                evar: evar_value,
                u_lambda: ulambda_value,
            });
        }
        Ok(report)
    }
}

/// Evidence that `e_alpha` is not comonotone, built on `xi = 1_A + 1_B`
/// with `A ⊂ B`, `P[A] = a`, `P[B] = b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessReport {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub evar: f64,
    /// `Lambda(a) + Lambda(b)`.
    pub u_lambda: f64,
    /// `u_Lambda(xi)` by the Choquet step sum; must equal `u_lambda`.
    pub u_lambda_choquet: f64,
    /// `evar - u_lambda`; strictly positive.
    pub gap: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    /// Density of the indicator minimizer for `A` on `A`: `Lambda(a)/a`.
    pub ratio_a: f64,
    /// Density of the indicator minimizer for `B` on `B`: `Lambda(b)/b`.
    pub ratio_b: f64,
    /// Density of the indicator minimizer for `A` off `A`: `(1-Lambda(a))/(1-a)`.
    pub ratio_a_complement: f64,
}

impl WitnessReport {
    /// A common minimizer for both indicators would need `ratio_a == ratio_b`.
    pub fn inner_mismatch(&self) -> f64 {
        (self.ratio_a - self.ratio_b).abs()
    }

    /// ... and `ratio_b == ratio_a_complement` on `B \ A`.
    pub fn outer_mismatch(&self) -> f64 {
        (self.ratio_b - self.ratio_a_complement).abs()
    }

    pub fn passes(&self) -> bool {
        self.gap > 1e-9
            && (self.u_lambda - self.u_lambda_choquet).abs() <= 1e-10
            && self.inner_mismatch() > 1e-9
            && self.lambda_a < self.a
    }
}

pub fn noncomonotone_witness(level: RiskLevel, a: f64, b: f64) -> Result<WitnessReport> {
    let alpha = level.alpha();
    if !(a > 1.0 - alpha && a < b && b < 1.0) {
        return Err(Error::OutOfDomain {
            name: "(a, b)",
            value: a,
            domain: "1 - alpha < a < b < 1",
        });
    }
    let d = DiscreteDistribution::from_weighted(&[(0.0, 1.0 - b), (1.0, b - a), (2.0, a)])?;
    let curve = LambdaCurve::new(level);
    let lambda_a = curve.lambda_of(a)?;
    let lambda_b = curve.lambda_of(b)?;
    let evar = evar_dual(&d, level)?.value;
    let u_lambda_choquet = choquet_utility(&d, &DistortionFunction::Lambda(curve))?;
    let u_lambda = lambda_a + lambda_b;
    Ok(WitnessReport {
        alpha,
        a,
        b,
        evar,
        u_lambda,
        u_lambda_choquet,
        gap: evar - u_lambda,
        lambda_a,
        lambda_b,
        ratio_a: lambda_a / a,
        ratio_b: lambda_b / b,
        ratio_a_complement: (1.0 - lambda_a) / (1.0 - a),
    })
}
