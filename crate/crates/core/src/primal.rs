//! Primal side of the entropic value-at-risk:
//! `e_alpha(xi) = sup_{z > 0} -(1/z) log( E[exp(-z xi)] / alpha )`.
//!
//! The supremum is located by golden-section search on `log z`. Writing
//! `g(z)` for the objective, `z^2 g'(z) = beta - H(z)` where `H(z)` is the
//! entropy of the tilted law; `H` is nondecreasing, so `g` increases then
//! decreases and the search never stalls at a spurious local maximum.
//! This solver shares no code with [`crate::dual`] and serves as its
//! cross-check.

use serde::Serialize;

use crate::dist::{DiscreteDistribution, RiskLevel};
use crate::dual::DEGENERACY_SLACK;
use crate::error::{Error, Result};
use crate::numeric::log_sum_exp;

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_EXPANSIONS: usize = 200;

/// `-(1/z) log(E[exp(-z xi)]) + (1/z) log(alpha)` for `z > 0`.
pub fn primal_objective(d: &DiscreteDistribution, level: RiskLevel, z: f64) -> Result<f64> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::OutOfDomain {
            name: "z",
            value: z,
            domain: "(0, inf)",
        });
    }
    Ok(objective(d, level.beta(), z))
}

fn objective(d: &DiscreteDistribution, beta: f64, z: f64) -> f64 {
    let floor = d.ess_inf();
    let terms: Vec<f64> = d.atoms().map(|(v, p)| p.ln() - z * (v - floor)).collect();
    floor - (log_sum_exp(&terms) + beta) / z
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "z", rename_all = "snake_case")]
pub enum PrimalOptimum {
    Interior(f64),
    /// Supremum approached as `z -> inf` and not attained; the value is the
    /// analytic limit.
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimalSolution {
    pub value: f64,
    pub optimum: PrimalOptimum,
    /// Objective evaluations `(z, g(z))` in evaluation order, when requested.
    pub objective_trace: Option<Vec<(f64, f64)>>,
    pub evaluations: usize,
}

impl PrimalSolution {
    pub fn z_star(&self) -> Option<f64> {
        match self.optimum {
            PrimalOptimum::Interior(z) => Some(z),
            PrimalOptimum::Boundary => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimalConfig {
    /// Stop when the `log z` bracket is narrower than this.
    pub log_z_tol: f64,
    pub max_iter: usize,
    pub record_trace: bool,
}

impl Default for PrimalConfig {
    fn default() -> Self {
        Self {
            log_z_tol: 1e-10,
            max_iter: 200,
            record_trace: false,
        }
    }
}

pub fn evar_primal(d: &DiscreteDistribution, level: RiskLevel) -> Result<PrimalSolution> {
    evar_primal_with(d, level, &PrimalConfig::default())
}

struct Search<'a> {
    d: &'a DiscreteDistribution,
    beta: f64,
    trace: Option<Vec<(f64, f64)>>,
    evaluations: usize,
    best: (f64, f64),
}

impl Search<'_> {
    fn eval(&mut self, t: f64) -> f64 {
        let z = t.exp();
        let g = objective(self.d, self.beta, z);
        self.evaluations += 1;
        if let Some(trace) = self.trace.as_mut() {
            trace.push((z, g));
        }
        if g > self.best.1 {
            self.best = (t, g);
        }
        g
    }
}

pub fn evar_primal_with(
    d: &DiscreteDistribution,
    level: RiskLevel,
    config: &PrimalConfig,
) -> Result<PrimalSolution> {
    if level.alpha() <= d.min_mass() * (1.0 + DEGENERACY_SLACK) {
        return Ok(PrimalSolution {
            value: d.ess_inf(),
            optimum: PrimalOptimum::Boundary,
            objective_trace: config.record_trace.then(Vec::new),
            evaluations: 0,
        });
    }

    let mut s = Search {
        d,
        beta: level.beta(),
        trace: config.record_trace.then(Vec::new),
        evaluations: 0,
        best: (f64::NAN, f64::NEG_INFINITY),
    };

    // Bracket (a, b, c) in log z with g(b) >= g(a), g(b) >= g(c).
    let start = (1.0 / d.range()).ln();
    let (mut a, mut b, mut c) = (start - 1.0, start, start + 1.0);
    let (mut ga, mut gb, mut gc) = (s.eval(a), s.eval(b), s.eval(c));
    let mut step = 2.0;
    let mut expansions = 0;
    while gc > gb {
        (a, ga) = (b, gb);
        (b, gb) = (c, gc);
        c = b + step;
        gc = s.eval(c);
        step *= 2.0;
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err(bracket_fault(expansions, c, gc));
        }
    }
    while ga > gb {
        (c, gc) = (b, gb);
        (b, gb) = (a, ga);
        a = b - step;
        ga = s.eval(a);
        step *= 2.0;
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err(bracket_fault(expansions, a, ga));
        }
    }
    let _ = (ga, gc);

    let mut lo = a;
    let mut hi = c;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut g1 = s.eval(x1);
    let mut g2 = s.eval(x2);
    let mut iter = 0;
    while hi - lo > config.log_z_tol * b.abs().max(1.0) {
        if iter >= config.max_iter {
            return Err(Error::NoConvergence {
                solver: "primal golden-section search",
                iterations: iter,
                last: s.best.0.exp(),
                residual: hi - lo,
            });
        }
        iter += 1;
        if g1 >= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = s.eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = s.eval(x2);
        }
    }

    let (t_best, g_best) = s.best;
    Ok(PrimalSolution {
        value: g_best,
        optimum: PrimalOptimum::Interior(t_best.exp()),
        objective_trace: s.trace,
        evaluations: s.evaluations,
    })
}

fn bracket_fault(expansions: usize, t: f64, g: f64) -> Error {
    Error::NoConvergence {
        solver: "primal bracket search",
        iterations: expansions,
        last: t.exp(),
        residual: g,
    }
}
