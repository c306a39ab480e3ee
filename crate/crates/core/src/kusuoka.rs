//! Kusuoka representation of `e_alpha` as a mixture of CVaR utilities.
//!
//! A decreasing probability density `eta` on `[0, 1]` with
//! `int eta log eta <= -log(alpha)` corresponds to a probability `nu` on
//! `(0, 1]` through `eta(x) = int_(x,1] (1/a) nu(da)`, and
//! `int CVaR_x(xi) nu(dx) = int_0^1 q(u) eta(u) du`. Rearranging the dual
//! optimizer `dQ/dP` decreasingly against the quantile function therefore
//! reproduces `e_alpha(xi)` as a CVaR mixture.
//!
//! All objects here are step functions or atomic measures, so every integral
//! is an exact finite sum.

use serde::Serialize;

use crate::dist::{DiscreteDistribution, RiskLevel};
use crate::distortion::cvar;
use crate::dual::{evar_dual_with, DualConfig, ScenarioDensity};
use crate::error::{Error, Result};
use crate::numeric::xlogx;

const NORMALIZATION_TOL: f64 = 1e-12;

/// Nonincreasing step density on `[0, 1]`: height `eta_j` on
/// `[x_{j-1}, x_j)` with `x_0 = 0` and last endpoint `1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecreasingDensity {
    steps: Vec<(f64, f64)>,
}

impl DecreasingDensity {
    /// Validates `(right endpoint, height)` steps.
    pub fn new(steps: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDensity(msg));
        let Some(&(last, _)) = steps.last() else {
            return bad("no steps".into());
        };
        if last != 1.0 {
            return bad(format!("last endpoint is {last}, expected 1"));
        }
        let mut left = 0.0;
        for &(x, h) in &steps {
            if x.is_nan() || x <= left {
                return bad(format!("endpoint {x} does not increase past {left}"));
            }
            if !(h.is_finite() && h >= 0.0) {
                return bad(format!("height {h} must be finite and >= 0"));
            }
            left = x;
        }
        if steps.windows(2).any(|w| w[1].1 > w[0].1) {
            return bad("heights must be nonincreasing".into());
        }
        let density = Self { steps };
        let total = density.total_mass();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return bad(format!("integrates to {total}, expected 1"));
        }
        Ok(density)
    }

    /// The uniform density.
    pub fn uniform() -> Self {
        Self {
            steps: vec![(1.0, 1.0)],
        }
    }

    /// `1/alpha` on `[0, alpha)`, the density of `CVaR_alpha`.
    pub fn cvar(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::OutOfDomain {
                name: "alpha",
                value: alpha,
                domain: "(0, 1]",
            });
        }
        let mut steps = vec![(alpha, 1.0 / alpha)];
        if alpha < 1.0 {
            steps.push((1.0, 0.0));
        }
        Ok(Self { steps })
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    /// `(left, right, height)` for each step.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let mut left = 0.0;
        self.steps.iter().map(move |&(right, h)| {
            let out = (left, right, h);
            left = right;
            out
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.intervals().map(|(l, r, h)| h * (r - l)).sum()
    }

    /// `eta(x)`, right-continuous; `eta(1) = 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain {
                name: "x",
                value: x,
                domain: "[0, 1]",
            });
        }
        Ok(self
            .steps
            .iter()
            .find(|&&(right, _)| right > x)
            .map_or(0.0, |&(_, h)| h))
    }

    /// `int_0^1 q(u) eta(u) du` for the quantile function of `d`.
    pub fn quantile_integral(&self, d: &DiscreteDistribution) -> f64 {
        let q = d.quantile_fn();
        self.intervals()
            .filter(|&(_, _, h)| h > 0.0)
            .map(|(l, r, h)| h * q.integral(l, r))
            .sum()
    }
}

/// Probability on `(0, 1]` with finitely many atoms, sorted by location.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KusuokaMeasure {
    atoms: Vec<(f64, f64)>,
}

impl KusuokaMeasure {
    /// Validates `(location, mass)` atoms; equal locations are merged.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDensity(msg));
        if atoms.is_empty() {
            return bad("no atoms".into());
        }
        for &(x, m) in &atoms {
            if !(x > 0.0 && x <= 1.0) {
                return bad(format!("atom location {x} outside (0, 1]"));
            }
            if !(m.is_finite() && m > 0.0) {
                return bad(format!("atom mass {m} must be finite and positive"));
            }
        }
        let mut sorted = atoms;
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (x, m) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += m,
                _ => merged.push((x, m)),
            }
        }
        let total: f64 = merged.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return bad(format!("masses sum to {total}, expected 1"));
        }
        Ok(Self { atoms: merged })
    }

    /// Point mass at `x`.
    pub fn dirac(x: f64) -> Result<Self> {
        Self::new(vec![(x, 1.0)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }
}

/// Decreasing rearrangement of `dQ/dP`: the ratios `q_i / p_i` sorted in
/// nonincreasing order, each on an interval of length `p_i`.
pub fn decreasing_rearrangement(
    q: &ScenarioDensity,
    p: &DiscreteDistribution,
) -> Result<DecreasingDensity> {
    if q.len() != p.len() {
        return Err(Error::Misaligned {
            expected: p.len(),
            got: q.len(),
        });
    }
    let mut pieces: Vec<(f64, f64)> = q
        .probs()
        .iter()
        .zip(p.probs())
        .map(|(qi, pi)| (qi / pi, *pi))
        .collect();
    pieces.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut right = 0.0;
    let mut steps: Vec<(f64, f64)> = pieces
        .into_iter()
        .map(|(h, len)| {
            right += len;
            (right, h)
        })
        .collect();
    steps.last_mut().unwrap().0 = 1.0;
    Ok(DecreasingDensity { steps })
}

/// `int eta log eta` with `0 log 0 = 0`.
pub fn density_entropy(eta: &DecreasingDensity) -> f64 {
    eta.intervals().map(|(l, r, h)| xlogx(h) * (r - l)).sum()
}

/// `nu` with `eta(x) = int_(x,1] (1/a) nu(da)`: mass `x_j (eta_j - eta_{j+1})`
/// at each drop `x_j` of the step function, `eta` being zero past 1.
pub fn density_to_measure(eta: &DecreasingDensity) -> KusuokaMeasure {
    let steps = eta.steps();
    let atoms = steps
        .iter()
        .enumerate()
        .filter_map(|(j, &(x, h))| {
            let next = steps.get(j + 1).map_or(0.0, |s| s.1);
            let mass = x * (h - next);
            (mass > 0.0).then_some((x, mass))
        })
        .collect();
    KusuokaMeasure { atoms }
}

/// `eta(x) = sum_{x_j > x} m_j / x_j`, a step function dropping at each atom.
pub fn measure_to_density(nu: &KusuokaMeasure) -> DecreasingDensity {
    let mut steps = vec![(0.0, 0.0); nu.atoms.len()];
    let mut acc = 0.0;
    for (j, &(x, m)) in nu.atoms.iter().enumerate().rev() {
        acc += m / x;
        steps[j] = (x, acc);
    }
    if steps.last().map(|s| s.0) != Some(1.0) {
        steps.push((1.0, 0.0));
    }
    DecreasingDensity { steps }
}

/// `int CVaR_x(xi) nu(dx)`.
pub fn cvar_mixture(d: &DiscreteDistribution, nu: &KusuokaMeasure) -> Result<f64> {
    nu.atoms
        .iter()
        .map(|&(x, m)| Ok(m * cvar(d, x)?))
        .sum()
}

/// The dual optimizer of `e_alpha(d)` written as a CVaR mixture.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KusuokaCheck {
    pub measure: KusuokaMeasure,
    pub density_entropy: f64,
    pub mixture: f64,
    pub evar: f64,
    /// `mixture - evar`.
    pub residual: f64,
    pub degenerate: bool,
}

pub fn kusuoka_check(
    d: &DiscreteDistribution,
    level: RiskLevel,
    config: &DualConfig,
) -> Result<KusuokaCheck> {
    let sol = evar_dual_with(d, level, config)?;
    let eta = decreasing_rearrangement(&sol.scenario, d)?;
    let measure = density_to_measure(&eta);
    let mixture = cvar_mixture(d, &measure)?;
    Ok(KusuokaCheck {
        density_entropy: density_entropy(&eta),
        residual: mixture - sol.value,
        evar: sol.value,
        degenerate: sol.is_degenerate(),
        measure,
        mixture,
    })
}
