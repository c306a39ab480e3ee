//! Test-only oracles and generators. Nothing here calls into the solvers it
//! is used to check.
#![allow(dead_code)]

use evar::DiscreteDistribution;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Up to `max_atoms` atoms with values in `[lo, hi]` and weights in `[0.05, 1]`.
pub fn random_law(rng: &mut StdRng, min_atoms: usize, max_atoms: usize, lo: f64, hi: f64) -> DiscreteDistribution {
    loop {
        let n = rng.random_range(min_atoms..=max_atoms);
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random_range(lo..=hi), rng.random_range(0.05..=1.0)))
            .collect();
        let d = DiscreteDistribution::from_weighted(&pairs).unwrap();
        if d.len() >= min_atoms {
            return d;
        }
    }
}

pub fn two_point(a: f64) -> DiscreteDistribution {
    DiscreteDistribution::from_weighted(&[(0.0, 1.0 - a), (1.0, a)]).unwrap()
}

/// `sum q log(q/p)` written out independently.
pub fn kl(q: &[f64], p: &[f64]) -> f64 {
    q.iter()
        .zip(p)
        .filter(|(qi, _)| **qi > 0.0)
        .map(|(qi, pi)| qi * (qi / pi).ln())
        .sum()
}

/// Minimum of `E_Q[xi]` over a simplex grid with spacing `step`, restricted to
/// `H(Q|P) <= beta`. Supports two or three atoms.
pub fn simplex_grid_min(d: &DiscreteDistribution, beta: f64, step: f64) -> f64 {
    let v = d.values();
    let p = d.probs();
    let m = (1.0 / step).round() as usize;
    let mut best = f64::INFINITY;
    match v.len() {
        1 => return v[0],
        2 => {
            for i in 0..=m {
                let q0 = i as f64 / m as f64;
                let q = [q0, 1.0 - q0];
                if kl(&q, p) <= beta {
                    best = best.min(q[0] * v[0] + q[1] * v[1]);
                }
            }
        }
        3 => {
            for i in 0..=m {
                for j in 0..=(m - i) {
                    let q0 = i as f64 / m as f64;
                    let q1 = j as f64 / m as f64;
                    let q = [q0, q1, (1.0 - q0 - q1).max(0.0)];
                    if kl(&q, p) <= beta {
                        best = best.min(q[0] * v[0] + q[1] * v[1] + q[2] * v[2]);
                    }
                }
            }
        }
        n => panic!("grid oracle supports at most 3 atoms, got {n}"),
    }
    best
}

/// Average of the worst `alpha` of the mass, taken atom by atom from the bottom.
pub fn tail_average(d: &DiscreteDistribution, alpha: f64) -> f64 {
    let mut remaining = alpha;
    let mut acc = 0.0;
    for (v, p) in d.atoms() {
        let take = p.min(remaining);
        acc += take * v;
        remaining -= take;
        if remaining <= 0.0 {
            break;
        }
    }
    acc / alpha
}

/// `F(lambda, a)` written out independently.
pub fn two_point_entropy(lam: f64, a: f64) -> f64 {
    let xl = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    xl(lam) + xl(1.0 - lam) - lam * a.ln() - (1.0 - lam) * (1.0 - a).ln()
}

/// Root of `F(lambda, a) = beta` on `(0, a)` by plain bisection.
pub fn lambda_oracle(alpha: f64, a: f64) -> f64 {
    let beta = -alpha.ln();
    if two_point_entropy(0.0, a) <= beta {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, a);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if two_point_entropy(mid, a) > beta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `int_0^1 q(u) w(u) du` for a piecewise-constant weight `w` given by
/// `(right endpoint, height)` steps, by merging both sets of breakpoints and
/// evaluating the quantile at each segment midpoint.
pub fn weighted_quantile_integral(d: &DiscreteDistribution, steps: &[(f64, f64)]) -> f64 {
    let mut cuts: Vec<f64> = vec![0.0];
    let mut acc = 0.0;
    for p in d.probs() {
        acc += p;
        cuts.push(acc.min(1.0));
    }
    cuts.extend(steps.iter().map(|s| s.0));
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (l, r) = (w[0], w[1]);
        if r <= l {
            continue;
        }
        let mid = 0.5 * (l + r);
        let height = steps.iter().find(|s| s.0 > mid).map_or(0.0, |s| s.1);
        let q = quantile_by_scan(d, mid);
        total += q * height * (r - l);
    }
    total
}

fn quantile_by_scan(d: &DiscreteDistribution, u: f64) -> f64 {
    let mut acc = 0.0;
    for (v, p) in d.atoms() {
        acc += p;
        if acc >= u {
            return v;
        }
    }
    d.ess_sup()
}

/// CLI invocations whose stdout is pinned under `tests/golden/`. Paths are
/// relative to the crate root.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("eval_two_point.txt", &["eval", "--alpha", "0.5", "--input", "tests/fixtures/two_point.csv"]),
    (
        "eval_four_atoms.jsonl",
        &["eval", "--alpha", "0.1,0.5,0.9", "--input", "tests/fixtures/four_atoms.csv", "--weighted", "--json"],
    ),
    (
        "kusuoka_indicator.json",
        &["kusuoka", "--alpha", "0.36787944117144233", "--input", "tests/fixtures/indicator.csv", "--weighted"],
    ),
    ("kusuoka_constant.json", &["kusuoka", "--alpha", "0.5", "--input", "tests/fixtures/constant.csv", "--weighted"]),
    (
        "verify_four_atoms.txt",
        &["verify", "--alpha", "0.5", "--input", "tests/fixtures/four_atoms.csv", "--weighted", "--witness", "0.6,0.8"],
    ),
    ("lambda_curve.csv", &["lambda-curve", "--alpha", "0.5", "--points", "11"]),
];

pub fn crate_dir() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Runs the `evar` binary from the crate root; returns (exit code, stdout, stderr).
pub fn run_cli(bin: &str, args: &[&str]) -> (i32, String, String) {
    let out = std::process::Command::new(bin)
        .args(args)
        .current_dir(crate_dir())
        .env("NO_COLOR", "1")
        .output()
        .expect("failed to spawn evar");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}
