//! Dual side of the entropic value-at-risk:
//! `e_alpha(xi) = min { E_Q[xi] : H(Q | P) <= -log(alpha) }`.
//!
//! The minimizer lies in the exponential family `q_i ∝ p_i exp(-z v_i)`.
//! `H` is nondecreasing in the tilt `z`, so the binding tilt is located by
//! bracketing and bisection on the entropy, with no derivative information.

use serde::Serialize;

use crate::dist::{DiscreteDistribution, RiskLevel};
use crate::error::{Error, Result};
use crate::numeric::log_sum_exp;

/// Relative slack on `alpha <= P[xi = ess inf]` when detecting the degenerate
/// regime. At `alpha = min_mass` exactly the binding tilt is infinite, and
/// rounding in `1 - a` would otherwise send the bracket search to overflow.
pub const DEGENERACY_SLACK: f64 = 1e-12;

const MAX_DOUBLINGS: usize = 2000;

/// Probability `Q` on the atoms of a [`DiscreteDistribution`], i.e. `dQ/dP`
/// times `P`. Zero entries are allowed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioDensity {
    probs: Vec<f64>,
}

impl ScenarioDensity {
    /// Accepts nonnegative entries whose sum is within `1e-9` of one and
    /// renormalizes them.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidScenario("no entries".into()));
        }
        if let Some(i) = probs.iter().position(|q| !(q.is_finite() && *q >= 0.0)) {
            return Err(Error::InvalidScenario(format!(
                "entry {i} is {} (must be finite and >= 0)",
                probs[i]
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidScenario(format!("entries sum to {total}")));
        }
        Ok(Self {
            probs: probs.into_iter().map(|q| q / total).collect(),
        })
    }

    /// The reference law itself (`dQ/dP = 1`).
    pub fn reference(p: &DiscreteDistribution) -> Self {
        Self {
            probs: p.probs().to_vec(),
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `E_Q[xi]`.
    pub fn expectation(&self, p: &DiscreteDistribution) -> Result<f64> {
        check_aligned(self, p)?;
        Ok(self.probs.iter().zip(p.values()).map(|(q, v)| q * v).sum())
    }
}

fn check_aligned(q: &ScenarioDensity, p: &DiscreteDistribution) -> Result<()> {
    if q.len() != p.len() {
        return Err(Error::Misaligned {
            expected: p.len(),
            got: q.len(),
        });
    }
    Ok(())
}

/// `H(Q | P) = sum_i q_i log(q_i / p_i)` with `0 log 0 = 0`.
pub fn relative_entropy(q: &ScenarioDensity, p: &DiscreteDistribution) -> Result<f64> {
    check_aligned(q, p)?;
    let h: f64 = q
        .probs
        .iter()
        .zip(p.probs())
        .filter(|(qi, _)| **qi > 0.0)
        .map(|(qi, pi)| qi * (qi / pi).ln())
        .sum();
    Ok(h.max(0.0))
}

/// Exponential tilt `q_i ∝ p_i exp(-z v_i)`.
pub fn gibbs_tilt(p: &DiscreteDistribution, z: f64) -> Result<ScenarioDensity> {
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::OutOfDomain {
            name: "z",
            value: z,
            domain: "[0, inf)",
        });
    }
    Ok(TiltState::at(p, z).scenario)
}

/// Tilted law at a fixed `z` together with its entropy and mean.
struct TiltState {
    scenario: ScenarioDensity,
    entropy: f64,
    value: f64,
}

impl TiltState {
    fn at(p: &DiscreteDistribution, z: f64) -> Self {
        let floor = p.ess_inf();
        // log(q_i / p_i) = -z w_i - log_norm, with w_i = v_i - ess inf >= 0.
        let log_terms: Vec<f64> = p
            .atoms()
            .map(|(v, pi)| pi.ln() - z * (v - floor))
            .collect();
        let log_norm = log_sum_exp(&log_terms);
        let probs: Vec<f64> = log_terms.iter().map(|t| (t - log_norm).exp()).collect();
        let excess: f64 = probs
            .iter()
            .zip(p.values())
            .map(|(q, v)| q * (v - floor))
            .sum();
        let entropy = (-z * excess - log_norm).max(0.0);
        Self {
            scenario: ScenarioDensity { probs },
            entropy,
            value: floor + excess,
        }
    }
}

/// `(z, H(tilt_z | P))` for each point of a nonnegative increasing grid.
pub fn entropy_profile(d: &DiscreteDistribution, z_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mut prev = f64::NEG_INFINITY;
    for &z in z_grid {
        if !(z.is_finite() && z >= 0.0 && z > prev) {
            return Err(Error::OutOfDomain {
                name: "z",
                value: z,
                domain: "nonnegative increasing grid",
            });
        }
        prev = z;
    }
    Ok(z_grid
        .iter()
        .map(|&z| (z, TiltState::at(d, z).entropy))
        .collect())
}

/// Location of the optimal tilt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "z", rename_all = "snake_case")]
pub enum Tilt {
    /// Entropy constraint binds at this finite `z`.
    Interior(f64),
    /// `alpha <= P[xi = ess inf]`: the constraint is slack and the optimum is
    /// the conditional law on the minimum atom.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualSolution {
    /// Attained `E_Q[xi]`.
    pub value: f64,
    pub scenario: ScenarioDensity,
    pub tilt: Tilt,
    /// `H(Q | P)` at the optimum.
    pub entropy: f64,
    pub iterations: usize,
}

impl DualSolution {
    pub fn z_star(&self) -> Option<f64> {
        match self.tilt {
            Tilt::Interior(z) => Some(z),
            Tilt::Degenerate => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.tilt == Tilt::Degenerate
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualConfig {
    /// Absolute tolerance on `|H - beta|`.
    pub entropy_tol: f64,
    pub max_iter: usize,
}

impl Default for DualConfig {
    fn default() -> Self {
        Self {
            entropy_tol: 1e-12,
            max_iter: 200,
        }
    }
}

pub fn evar_dual(d: &DiscreteDistribution, level: RiskLevel) -> Result<DualSolution> {
    evar_dual_with(d, level, &DualConfig::default())
}

pub fn evar_dual_with(
    d: &DiscreteDistribution,
    level: RiskLevel,
    config: &DualConfig,
) -> Result<DualSolution> {
    let beta = level.beta();

    // Putting all mass on the minimum atom costs H = -log P[xi = ess inf].
    // When that fits in the budget nothing lower is reachable, the same
    // feasibility argument that gives Lambda(a) = 0 for a <= 1 - alpha.
    if level.alpha() <= d.min_mass() * (1.0 + DEGENERACY_SLACK) {
        let mut probs = vec![0.0; d.len()];
        probs[0] = 1.0;
        return Ok(DualSolution {
            value: d.ess_inf(),
            scenario: ScenarioDensity { probs },
            tilt: Tilt::Degenerate,
            entropy: -d.min_mass().ln(),
            iterations: 0,
        });
    }

    let mut lo = 0.0;
    let mut hi = 1.0 / d.range();
    let mut doublings = 0;
    loop {
        let h = TiltState::at(d, hi).entropy;
        if h > beta {
            break;
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::NoConvergence {
                solver: "dual bracket search",
                iterations: doublings,
                last: lo,
                residual: beta - h,
            });
        }
    }

    let mut iterations = 0;
    let mut best = TiltState::at(d, lo);
    let mut z_best = lo;
    while iterations < config.max_iter {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Bracket exhausted at machine precision; keep the feasible end.
            break;
        }
        let state = TiltState::at(d, mid);
        let residual = state.entropy - beta;
        if residual.abs() <= config.entropy_tol {
            best = state;
            z_best = mid;
            return Ok(finish(best, z_best, iterations));
        }
        if residual < 0.0 {
            lo = mid;
            best = state;
            z_best = mid;
        } else {
            hi = mid;
        }
    }
    if iterations >= config.max_iter && (best.entropy - beta).abs() > config.entropy_tol {
        return Err(Error::NoConvergence {
            solver: "dual entropy bisection",
            iterations,
            last: z_best,
            residual: best.entropy - beta,
        });
    }
    Ok(finish(best, z_best, iterations))
}

fn finish(state: TiltState, z: f64, iterations: usize) -> DualSolution {
    DualSolution {
        value: state.value,
        scenario: state.scenario,
        tilt: Tilt::Interior(z),
        entropy: state.entropy,
        iterations,
    }
}
