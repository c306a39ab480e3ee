//! Discrete laws of bounded random variables.
//!
//! Every measure in this crate is law invariant, so a [`DiscreteDistribution`]
//! stands in for a random variable on an atomless space.

use serde::Serialize;

use crate::error::{Error, Result};

/// Values closer than this are merged into one atom.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Sorted atoms with strictly positive probabilities summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// Empirical law of `samples`, each sample carrying weight `1/n`.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty);
        }
        let pairs: Vec<(f64, f64)> = samples.iter().map(|&v| (v, 1.0)).collect();
        Self::from_weighted(&pairs)
    }

    /// Law with atoms `value` carrying mass proportional to `weight`.
    pub fn from_weighted(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &(value, weight)) in pairs.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteValue { index, value });
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidWeight { index, weight });
            }
        }
        let mut sorted = pairs.to_vec();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));

        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut weights: Vec<f64> = Vec::with_capacity(sorted.len());
        for (value, weight) in sorted {
            match values.last() {
                Some(&last) if (value - last).abs() <= MERGE_TOLERANCE => {
                    *weights.last_mut().unwrap() += weight;
                }
                _ => {
                    values.push(value);
                    weights.push(weight);
                }
            }
        }
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidTotal(total));
        }
        let probs = weights.iter().map(|w| w / total).collect();
        Ok(Self { values, probs })
    }

    /// Point mass at `value`.
    pub fn constant(value: f64) -> Result<Self> {
        Self::from_weighted(&[(value, 1.0)])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.values.len() == 1
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(v, p)| v * p).sum()
    }

    pub fn ess_inf(&self) -> f64 {
        self.values[0]
    }

    pub fn ess_sup(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `P[xi = ess inf xi]`.
    pub fn min_mass(&self) -> f64 {
        self.probs[0]
    }

    pub fn range(&self) -> f64 {
        self.ess_sup() - self.ess_inf()
    }

    /// Cumulative probabilities `F_i = P[xi <= v_i]`; the last entry is exactly 1.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        *out.last_mut().unwrap() = 1.0;
        out
    }

    /// Tail probabilities `T_i = P[xi >= v_i]`, summed from the top so that
    /// small tails keep full relative precision. `T_0` is exactly 1.
    pub fn tail_probs(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.probs.len()];
        let mut acc = 0.0;
        for i in (0..self.probs.len()).rev() {
            acc += self.probs[i];
            out[i] = acc;
        }
        out[0] = 1.0;
        out
    }

    /// Left-continuous quantile: the smallest atom `v` with `P[xi <= v] >= u`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        self.quantile_fn().eval(u)
    }

    pub fn quantile_fn(&self) -> QuantileFunction<'_> {
        QuantileFunction {
            dist: self,
            cdf: self.cdf(),
        }
    }

    /// Law of `xi + shift`.
    pub fn shifted(&self, shift: f64) -> Result<Self> {
        self.map_values(|v| v + shift)
    }

    /// Law of `factor * xi`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.map_values(|v| v * factor)
    }

    /// Law of `g(xi)`; atoms are re-canonicalized.
    pub fn map_values(&self, g: impl Fn(f64) -> f64) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = self.atoms().map(|(v, p)| (g(v), p)).collect();
        Self::from_weighted(&pairs)
    }

    /// Law of `xi + eta` for independent `xi ~ self`, `eta ~ other`.
    pub fn independent_sum(&self, other: &Self) -> Result<Self> {
        let mut pairs = Vec::with_capacity(self.len() * other.len());
        for (v, p) in self.atoms() {
            for (w, r) in other.atoms() {
                pairs.push((v + w, p * r));
            }
        }
        Self::from_weighted(&pairs)
    }
}

/// Left-continuous quantile function of a [`DiscreteDistribution`]: a step
/// function equal to `v_i` on `(F_{i-1}, F_i]`.
#[derive(Debug, Clone)]
pub struct QuantileFunction<'a> {
    dist: &'a DiscreteDistribution,
    cdf: Vec<f64>,
}

impl QuantileFunction<'_> {
    pub fn eval(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::OutOfDomain {
                name: "u",
                value: u,
                domain: "(0, 1]",
            });
        }
        let idx = self.cdf.partition_point(|&c| c < u);
        let idx = idx.min(self.cdf.len() - 1);
        Ok(self.dist.values[idx])
    }

    /// Right endpoints `F_i` of the steps; the last one is 1.
    pub fn breakpoints(&self) -> &[f64] {
        &self.cdf
    }

    /// Exact `int_lo^hi q(u) du` for `0 <= lo <= hi <= 1`.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let mut total = 0.0;
        let mut left = 0.0_f64;
        for (i, &right) in self.cdf.iter().enumerate() {
            let a = left.max(lo);
            let b = right.min(hi);
            if b > a {
                total += self.dist.values[i] * (b - a);
            }
            if right >= hi {
                break;
            }
            left = right;
        }
        total
    }
}

/// Risk level `alpha` in `(0, 1)` together with the entropy budget
/// `beta = -log(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskLevel {
    alpha: f64,
    beta: f64,
}

impl RiskLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(Self {
            alpha,
            beta: -alpha.ln(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}
