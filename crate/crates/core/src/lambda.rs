//! The value of `e_alpha` on indicators.
//!
//! For `xi = 1_A` with `a = P[A]` the dual optimum has density
//! `lambda 1_A / a + (1 - lambda) 1_{A^c} / (1 - a)`, whose relative entropy
//! is the two-point function
//!
//! ```text
//! F(lambda, a) = lambda log lambda + (1-lambda) log(1-lambda)
//!                - lambda log a - (1-lambda) log(1-a).
//! ```
//!
//! `Lambda(a) = e_alpha(1_A)` is `0` on `[0, 1 - alpha]` and otherwise the
//! root of `F(lambda, a) = -log(alpha)` below `a`. It is convex, increasing
//! on `(1 - alpha, 1)` with `Lambda(1) = 1`, and its slope blows up at `a = 1`.

use crate::dist::RiskLevel;
use crate::error::{Error, Result};
use crate::numeric::xlogx;

/// Points in the optional interpolation table.
pub const TABLE_POINTS: usize = 4096;

const MAX_BISECTIONS: usize = 200;

/// `F(lambda, a)` for `lambda` in `[0, 1]` and `a` in `(0, 1)`.
pub fn indicator_entropy(lam: f64, a: f64) -> Result<f64> {
    check_open("a", a)?;
    if !(0.0..=1.0).contains(&lam) {
        return Err(Error::OutOfDomain {
            name: "lambda",
            value: lam,
            domain: "[0, 1]",
        });
    }
    Ok(entropy(lam, a))
}

fn entropy(lam: f64, a: f64) -> f64 {
    xlogx(lam) + xlogx(1.0 - lam) - lam * a.ln() - (1.0 - lam) * (1.0 - a).ln()
}

fn check_open(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            name,
            value: x,
            domain: "(0, 1)",
        })
    }
}

/// First and second partial derivatives of `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FPartials {
    pub d_lam: f64,
    pub d_a: f64,
    /// `[[F_ll, F_la], [F_la, F_aa]]`.
    pub hessian: [[f64; 2]; 2],
}

impl FPartials {
    pub fn hessian_determinant(&self) -> f64 {
        let h = self.hessian;
        h[0][0] * h[1][1] - h[0][1] * h[1][0]
    }

    /// `v^T H v` for `v = (d_lam, d_a)`.
    pub fn quadratic_form(&self, d_lam: f64, d_a: f64) -> f64 {
        let h = self.hessian;
        h[0][0] * d_lam * d_lam + 2.0 * h[0][1] * d_lam * d_a + h[1][1] * d_a * d_a
    }
}

/// Partials of `F` at an interior point.
pub fn f_partials(lam: f64, a: f64) -> Result<FPartials> {
    check_open("lambda", lam)?;
    check_open("a", a)?;
    Ok(partials(lam, a))
}

fn partials(lam: f64, a: f64) -> FPartials {
    let d_lam = (lam / (1.0 - lam)).ln() - (a / (1.0 - a)).ln();
    let d_a = (a - lam) / (a * (1.0 - a));
    let f_ll = 1.0 / lam + 1.0 / (1.0 - lam);
    let f_la = -1.0 / a - 1.0 / (1.0 - a);
    let f_aa = lam / (a * a) + (1.0 - lam) / ((1.0 - a) * (1.0 - a));
    FPartials {
        d_lam,
        d_a,
        hessian: [[f_ll, f_la], [f_la, f_aa]],
    }
}

/// A mass `a = P[A]` together with the optimal dual weight
/// `lambda = Q[A] = e_alpha(1_A)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorPoint {
    a: f64,
    lam: f64,
}

impl IndicatorPoint {
    pub fn new(a: f64, lam: f64) -> Result<Self> {
        check_open("a", a)?;
        if !(lam >= 0.0 && lam < a) {
            return Err(Error::OutOfDomain {
                name: "lambda",
                value: lam,
                domain: "[0, a)",
            });
        }
        Ok(Self { a, lam })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    /// Optimal scenario for `1_A`: `(Q[A^c], Q[A])`.
    pub fn scenario(&self) -> (f64, f64) {
        (1.0 - self.lam, self.lam)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Table {
    start: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

/// `Lambda(a) = e_alpha(1_A)` at a fixed level.
///
/// Every evaluation solves `F(lambda, a) = beta` directly. A curve built with
/// [`LambdaCurve::tabulated`] additionally carries a monotone cubic table on
/// `[1 - alpha, 1]` for fast approximate lookups via [`LambdaCurve::interpolate`].
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaCurve {
    level: RiskLevel,
    root_tol: f64,
    table: Option<Table>,
}

impl LambdaCurve {
    pub fn new(level: RiskLevel) -> Self {
        Self {
            level,
            root_tol: 1e-12,
            table: None,
        }
    }

    /// Absolute tolerance on `|F - beta|` for the root solve.
    pub fn with_root_tol(mut self, tol: f64) -> Self {
        self.root_tol = tol;
        self
    }

    /// Curve carrying a [`TABLE_POINTS`]-point interpolation table, built here.
    pub fn tabulated(level: RiskLevel) -> Result<Self> {
        let mut curve = Self::new(level);
        let start = 1.0 - level.alpha();
        let step = level.alpha() / (TABLE_POINTS - 1) as f64;
        let xs: Vec<f64> = (0..TABLE_POINTS)
            .map(|i| {
                if i == TABLE_POINTS - 1 {
                    1.0
                } else {
                    start + step * i as f64
                }
            })
            .collect();
        let values = xs
            .iter()
            .map(|&a| curve.lambda_of(a))
            .collect::<Result<Vec<_>>>()?;
        let slopes = monotone_slopes(step, &values);
        curve.table = Some(Table {
            start,
            step,
            values,
            slopes,
        });
        Ok(curve)
    }

    pub fn level(&self) -> RiskLevel {
        self.level
    }

    pub fn is_tabulated(&self) -> bool {
        self.table.is_some()
    }

    /// `Lambda(a)` for `a` in `[0, 1]`.
    pub fn lambda_of(&self, a: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::OutOfDomain {
                name: "a",
                value: a,
                domain: "[0, 1]",
            });
        }
        let beta = self.level.beta();
        if a == 1.0 {
            return Ok(1.0);
        }
        // F(0, a) = -log(1 - a) <= beta: the constraint admits lambda = 0.
        if a <= 1.0 - self.level.alpha() || -(1.0 - a).ln() <= beta {
            return Ok(0.0);
        }
        self.root(a)
    }

    /// The optimal indicator weight at `a` in `(0, 1)`.
    pub fn point(&self, a: f64) -> Result<IndicatorPoint> {
        check_open("a", a)?;
        IndicatorPoint::new(a, self.lambda_of(a)?)
    }

    fn root(&self, a: f64) -> Result<f64> {
        let beta = self.level.beta();
        let g = |lam: f64| entropy(lam, a) - beta;
        // g is decreasing on [0, a] with g(0) > 0 > g(a) = -beta.
        let (mut lo, mut hi) = (0.0, a);
        let mut root = None;
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                root = Some(if g(lo).abs() <= g(hi).abs() { lo } else { hi });
                break;
            }
            let r = g(mid);
            if r.abs() <= self.root_tol {
                root = Some(mid);
                break;
            }
            if r > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let Some(mut lam) = root else {
            return Err(Error::NoConvergence {
                solver: "Lambda root bisection",
                iterations: MAX_BISECTIONS,
                last: 0.5 * (lo + hi),
                residual: g(0.5 * (lo + hi)),
            });
        };
        if lam > 1e-6 {
            for _ in 0..2 {
                let d = partials(lam, a).d_lam;
                let next = lam - g(lam) / d;
                if next > 0.0 && next < a && g(next).abs() < g(lam).abs() {
                    lam = next;
                }
            }
        }
        Ok(lam)
    }

    /// `dLambda/da = -F_a / F_lambda` at `(a, Lambda(a))`, for `a` in `(1 - alpha, 1)`.
    pub fn lambda_derivative(&self, a: f64) -> Result<f64> {
        self.check_active(a)?;
        let lam = self.lambda_of(a)?;
        if lam <= 0.0 {
            return Ok(0.0);
        }
        let p = partials(lam, a);
        Ok(-p.d_a / p.d_lam)
    }

    /// `d^2 Lambda/da^2` from differentiating `F_a + F_lambda Lambda' = 0` once more:
    /// `(F_aa + 2 F_la Lambda' + F_ll Lambda'^2) / (-F_lambda)`.
    pub fn lambda_second_derivative(&self, a: f64) -> Result<f64> {
        self.check_active(a)?;
        let lam = self.lambda_of(a)?;
        if lam <= 0.0 {
            return Ok(0.0);
        }
        let p = partials(lam, a);
        let slope = -p.d_a / p.d_lam;
        Ok(p.quadratic_form(slope, 1.0) / -p.d_lam)
    }

    fn check_active(&self, a: f64) -> Result<()> {
        if a > 1.0 - self.level.alpha() && a < 1.0 {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                name: "a",
                value: a,
                domain: "(1 - alpha, 1)",
            })
        }
    }

    /// Table lookup when the curve is tabulated, direct solve otherwise.
    pub fn interpolate(&self, a: f64) -> Result<f64> {
        let Some(t) = &self.table else {
            return self.lambda_of(a);
        };
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::OutOfDomain {
                name: "a",
                value: a,
                domain: "[0, 1]",
            });
        }
        if a <= t.start {
            return Ok(0.0);
        }
        let n = t.values.len();
        let pos = (a - t.start) / t.step;
        let i = (pos.floor() as usize).min(n - 2);
        let x0 = t.start + t.step * i as f64;
        let x1 = if i + 1 == n - 1 {
            1.0
        } else {
            t.start + t.step * (i + 1) as f64
        };
        let h = x1 - x0;
        let s = ((a - x0) / h).clamp(0.0, 1.0);
        let (y0, y1, m0, m1) = (t.values[i], t.values[i + 1], t.slopes[i], t.slopes[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        Ok((2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * m1)
    }
}

/// Fritsch-Carlson slopes for a monotone cubic Hermite interpolant.
fn monotone_slopes(step: f64, ys: &[f64]) -> Vec<f64> {
    let n = ys.len();
    let secants: Vec<f64> = ys.windows(2).map(|w| (w[1] - w[0]) / step).collect();
    let mut m = vec![0.0; n];
    m[0] = secants[0];
    m[n - 1] = secants[n - 2];
    for i in 1..n - 1 {
        m[i] = if secants[i - 1] * secants[i] <= 0.0 {
            0.0
        } else {
            0.5 * (secants[i - 1] + secants[i])
        };
    }
    for (i, &d) in secants.iter().enumerate() {
        if d == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let a = m[i] / d;
        let b = m[i + 1] / d;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[i] = tau * a * d;
            m[i + 1] = tau * b * d;
        }
    }
    m
}
