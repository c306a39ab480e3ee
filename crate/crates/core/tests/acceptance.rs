//! Acceptance suite: one line per criterion, nonzero exit if any fails.
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use evar::*;
use rand::Rng;

const INV_E: f64 = 0.36787944117144233;
const BIN: &str = env!("CARGO_BIN_EXE_evar");

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn indicator_identity() -> Outcome {
    let mut worst = 0.0_f64;
    for alpha in [0.1, INV_E, 0.5, 0.9] {
        let level = RiskLevel::new(alpha).unwrap();
        let curve = LambdaCurve::new(level);
        for k in 1..=50 {
            let a = 1.0 - alpha + alpha * k as f64 / 51.0;
            let dual = evar_dual(&two_point(a), level).map_err(|e| e.to_string())?.value;
            let lam = curve.lambda_of(a).map_err(|e| e.to_string())?;
            worst = worst.max((dual - lam).abs());
        }
    }
    ensure(worst <= 1e-8, || format!("max |dual - Lambda| = {worst:e}"))?;
    Ok(format!("max |dual - Lambda| = {worst:.2e} over 200 points"))
}

fn zero_region() -> Outcome {
    let mut worst = 0.0_f64;
    let mut cases = 0;
    for alpha in [0.1, INV_E, 0.5, 0.9] {
        let level = RiskLevel::new(alpha).unwrap();
        let mut grid: Vec<f64> = (1..=20).map(|k| (1.0 - alpha) * k as f64 / 20.0).collect();
        grid.push(1.0 - alpha);
        for a in grid {
            let d = two_point(a);
            let p = evar_primal(&d, level).map_err(|e| e.to_string())?.value;
            let q = evar_dual(&d, level).map_err(|e| e.to_string())?.value;
            let u = u_lambda(&d, level).map_err(|e| e.to_string())?;
            worst = worst.max(p.abs()).max(q.abs()).max(u.abs());
            cases += 1;
        }
    }
    ensure(worst <= 1e-12, || format!("max |value| = {worst:e}"))?;
    Ok(format!("max |value| = {worst:.2e} over {cases} laws"))
}

fn primal_dual_agreement() -> Outcome {
    let mut rng = rng(301);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let d = random_law(&mut rng, 1, 50, -10.0, 10.0);
        for alpha in [0.05, 0.5, 0.95] {
            let level = RiskLevel::new(alpha).unwrap();
            let p = evar_primal(&d, level).map_err(|e| e.to_string())?.value;
            let q = evar_dual(&d, level).map_err(|e| e.to_string())?.value;
            worst = worst.max((p - q).abs());
        }
    }
    ensure(worst <= 1e-7, || format!("max |primal - dual| = {worst:e}"))?;
    Ok(format!("max |primal - dual| = {worst:.2e} over 300 cases"))
}

fn brute_force_dual() -> Outcome {
    let mut rng = rng(302);
    let mut worst = 0.0_f64;
    for _ in 0..25 {
        // The grid misses the optimum by roughly step * range, so the absolute
        // 2e-3 band is only meaningful for values on a unit scale.
        let d = random_law(&mut rng, 3, 3, -1.0, 1.0);
        let alpha = rng.random_range(0.05..0.95);
        let level = RiskLevel::new(alpha).unwrap();
        let grid = simplex_grid_min(&d, level.beta(), 1e-3);
        let dual = evar_dual(&d, level).map_err(|e| e.to_string())?.value;
        ensure(grid >= dual - 1e-12, || format!("grid point {grid} below dual {dual}"))?;
        worst = worst.max(grid - dual);
    }
    ensure(worst <= 2e-3, || format!("max grid - dual = {worst:e}"))?;
    Ok(format!("max grid - dual = {worst:.2e} over 25 three-atom laws"))
}

fn sandwich_ordering() -> Outcome {
    let mut rng = rng(303);
    let mut lowest = f64::INFINITY;
    for _ in 0..200 {
        let d = random_law(&mut rng, 1, 30, -10.0, 10.0);
        for alpha in [0.1, 0.5, 0.9] {
            let r = sandwich(&d, RiskLevel::new(alpha).unwrap()).map_err(|e| e.to_string())?;
            lowest = lowest.min(r.gap_cvar_evar).min(r.gap_evar_ulambda);
        }
    }
    ensure(lowest >= -1e-9, || format!("ordering violated by {lowest:e}"))?;

    let w = noncomonotone_witness(RiskLevel::new(0.5).unwrap(), 0.6, 0.8).map_err(|e| e.to_string())?;
    ensure(w.gap > 1e-6, || format!("witness gap {:e}", w.gap))?;

    // Strictness needs a binding entropy constraint: when alpha <= P[xi = ess inf]
    // both sides collapse to ess inf, so the sampled laws keep alpha above that mass.
    let mut smallest_gap = f64::INFINITY;
    let mut drawn = 0;
    while drawn < 50 {
        let d = random_law(&mut rng, 3, 8, -10.0, 10.0);
        let alpha = rng.random_range(0.05..0.95);
        if alpha <= d.min_mass() {
            continue;
        }
        let level = RiskLevel::new(alpha).unwrap();
        let evar = evar_dual(&d, level).map_err(|e| e.to_string())?.value;
        let u = u_lambda(&d, level).map_err(|e| e.to_string())?;
        smallest_gap = smallest_gap.min(evar - u);
        drawn += 1;
    }
    ensure(smallest_gap > 1e-6, || format!("smallest random gap {smallest_gap:e}"))?;
    Ok(format!(
        "min ordering slack {lowest:.2e}; witness gap {:.6}; min gap on 50 random laws {smallest_gap:.3e}",
        w.gap
    ))
}

fn non_comonotonicity() -> Outcome {
    let triples = [
        (0.5, 0.6, 0.8),
        (0.5, 0.55, 0.95),
        (0.1, 0.92, 0.97),
        (0.2, 0.85, 0.9),
        (INV_E, 0.7, 0.9),
        (0.9, 0.2, 0.5),
        (0.9, 0.5, 0.99),
        (0.3, 0.75, 0.8),
        (0.7, 0.4, 0.6),
        (0.05, 0.96, 0.99),
    ];
    let mut min_gap = f64::INFINITY;
    for (alpha, a, b) in triples {
        let w = noncomonotone_witness(RiskLevel::new(alpha).unwrap(), a, b).map_err(|e| e.to_string())?;
        ensure(w.passes(), || format!("witness ({alpha}, {a}, {b}) failed: {w:?}"))?;
        ensure(w.inner_mismatch() > 1e-9 && w.outer_mismatch() > 1e-9, || {
            format!("ratio tests collapsed at ({alpha}, {a}, {b})")
        })?;
        min_gap = min_gap.min(w.gap);
    }
    Ok(format!("10 triples, smallest gap {min_gap:.3e}"))
}

fn lambda_structure() -> Outcome {
    let mut residual = 0.0_f64;
    let mut fd_err = 0.0_f64;
    let mut min_second = f64::INFINITY;
    for alpha in [0.05, 0.1, INV_E, 0.5, 0.9] {
        let level = RiskLevel::new(alpha).unwrap();
        let curve = LambdaCurve::new(level);
        let n = 200;
        let grid: Vec<f64> = (1..n).map(|k| 1.0 - alpha + alpha * k as f64 / n as f64).collect();
        let vals: Vec<f64> = grid.iter().map(|&a| curve.lambda_of(a).unwrap()).collect();
        for (&a, &lam) in grid.iter().zip(&vals) {
            residual = residual.max((indicator_entropy(lam, a).unwrap() - level.beta()).abs());
        }
        for w in vals.windows(3) {
            min_second = min_second.min(w[2] - 2.0 * w[1] + w[0]);
        }
        for k in 1..20 {
            let a = 1.0 - alpha + alpha * k as f64 / 20.0;
            let h = 1e-6 * alpha;
            let fd = (curve.lambda_of(a + h).unwrap() - curve.lambda_of(a - h).unwrap()) / (2.0 * h);
            fd_err = fd_err.max((fd - curve.lambda_derivative(a).unwrap()).abs());
        }
    }
    ensure(residual <= 1e-10, || format!("root residual {residual:e}"))?;
    ensure(min_second > 0.0, || format!("second divided difference {min_second:e}"))?;
    ensure(fd_err <= 1e-5, || format!("derivative vs central difference {fd_err:e}"))?;
    let curve = LambdaCurve::new(RiskLevel::new(0.5).unwrap());
    let steep = curve.lambda_derivative(1.0 - 1e-6).map_err(|e| e.to_string())?;
    ensure(steep > 1e3, || format!("derivative near 1 only {steep}"))?;
    Ok(format!(
        "residual {residual:.1e}; min second difference {min_second:.1e}; derivative error {fd_err:.1e}; Lambda'(1-1e-6) = {steep:.3e}"
    ))
}

fn kusuoka_identity() -> Outcome {
    let mut rng = rng(308);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let d = random_law(&mut rng, 1, 30, -10.0, 10.0);
        for alpha in [0.2, 0.7] {
            let check = kusuoka_check(&d, RiskLevel::new(alpha).unwrap(), &DualConfig::default())
                .map_err(|e| e.to_string())?;
            worst = worst.max(check.residual.abs());
        }
    }
    ensure(worst <= 1e-6, || format!("mixture residual {worst:e}"))?;

    let mut round_trip = 0.0_f64;
    for _ in 0..100 {
        let n = rng.random_range(1..8);
        let mut xs: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.01..0.99)).collect();
        xs.push(1.0);
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut hs: Vec<f64> = xs.iter().map(|_| rng.random_range(0.0..3.0)).collect();
        hs.sort_by(|a, b| b.total_cmp(a));
        hs[0] += 0.1;
        let mut left = 0.0;
        let mass: f64 = xs
            .iter()
            .zip(&hs)
            .map(|(&x, &h)| {
                let m = h * (x - left);
                left = x;
                m
            })
            .sum();
        let eta = DecreasingDensity::new(xs.iter().zip(&hs).map(|(&x, &h)| (x, h / mass)).collect())
            .map_err(|e| e.to_string())?;
        let back = measure_to_density(&density_to_measure(&eta));
        for (l, r, _) in eta.intervals().chain(back.intervals()) {
            let u = 0.5 * (l + r);
            round_trip = round_trip.max((eta.eval(u).unwrap() - back.eval(u).unwrap()).abs());
        }
    }
    ensure(round_trip <= 1e-12, || format!("round trip error {round_trip:e}"))?;

    let mut entropy_err = 0.0_f64;
    for alpha in [0.01, 0.1, INV_E, 0.5, 0.9, 1.0] {
        let eta = DecreasingDensity::cvar(alpha).map_err(|e| e.to_string())?;
        entropy_err = entropy_err.max((density_entropy(&eta) + f64::ln(alpha)).abs());
    }
    ensure(entropy_err <= 1e-12, || format!("CVaR density entropy error {entropy_err:e}"))?;
    Ok(format!(
        "mixture residual {worst:.1e}; round trip {round_trip:.1e}; CVaR entropy {entropy_err:.1e}"
    ))
}

fn coherence_axioms() -> Outcome {
    let mut rng = rng(309);
    let e = |d: &DiscreteDistribution, alpha: f64| evar_dual(d, RiskLevel::new(alpha).unwrap()).map(|s| s.value);
    let (mut trans, mut homog, mut mono, mut sup) = (0.0_f64, 0.0_f64, f64::INFINITY, f64::INFINITY);
    for _ in 0..100 {
        let d = random_law(&mut rng, 1, 20, -10.0, 10.0);
        let alpha = rng.random_range(0.02..0.98);
        let base = e(&d, alpha).map_err(|e| e.to_string())?;

        let c = rng.random_range(-20.0..20.0);
        let shifted = e(&d.shifted(c).unwrap(), alpha).map_err(|e| e.to_string())?;
        trans = trans.max((shifted - base - c).abs());

        let k = rng.random_range(0.05..20.0);
        let scaled = e(&d.scaled(k).unwrap(), alpha).map_err(|e| e.to_string())?;
        homog = homog.max((scaled - k * base).abs());

        // y >= x pointwise on the coupling v -> v + g(v) with g >= 0
        let bump = rng.random_range(0.0..2.0);
        let tilt = rng.random_range(-1.0..1.0);
        let y = d.map_values(|v| v + bump * (1.0 + tilt * (v / 10.0))).unwrap();
        mono = mono.min(e(&y, alpha).map_err(|e| e.to_string())? - base);

        let other = random_law(&mut rng, 1, 12, -10.0, 10.0);
        let sum = d.independent_sum(&other).unwrap();
        let gap = e(&sum, alpha).map_err(|e| e.to_string())?
            - base
            - e(&other, alpha).map_err(|e| e.to_string())?;
        sup = sup.min(gap);
    }
    ensure(trans <= 1e-9, || format!("translation error {trans:e}"))?;
    ensure(homog <= 1e-9, || format!("homogeneity error {homog:e}"))?;
    ensure(mono >= -1e-9, || format!("monotonicity violated by {mono:e}"))?;
    ensure(sup >= -1e-9, || format!("superadditivity violated by {sup:e}"))?;
    Ok(format!(
        "translation {trans:.1e}; homogeneity {homog:.1e}; min monotone gap {mono:.1e}; min superadditive gap {sup:.1e}"
    ))
}

fn limits() -> Outcome {
    let mut rng = rng(310);
    let (mut near_one, mut near_zero, mut monotone) = (0.0_f64, 0.0_f64, f64::INFINITY);
    for _ in 0..50 {
        // Near alpha = 1 the deviation from the mean is about sqrt(2 beta) times
        // the standard deviation, so the 1e-3 band needs values on a unit scale.
        let d = random_law(&mut rng, 1, 20, 0.0, 1.0);
        let top = evar_dual(&d, RiskLevel::new(1.0 - 1e-6).unwrap()).map_err(|e| e.to_string())?.value;
        near_one = near_one.max((top - d.mean()).abs());

        let wide = random_law(&mut rng, 1, 20, -10.0, 10.0);
        let bottom = evar_dual(&wide, RiskLevel::new(1e-8).unwrap()).map_err(|e| e.to_string())?.value;
        near_zero = near_zero.max((bottom - wide.ess_inf()).abs() / wide.range().max(f64::MIN_POSITIVE));

        let mut prev = f64::NEG_INFINITY;
        for k in 1..=20 {
            let alpha = k as f64 / 20.0 - 0.025;
            let v = evar_dual(&wide, RiskLevel::new(alpha).unwrap()).map_err(|e| e.to_string())?.value;
            monotone = monotone.min(v - prev);
            prev = v;
        }
    }
    ensure(near_one <= 1e-3, || format!("|evar - mean| = {near_one:e} at alpha = 1 - 1e-6"))?;
    ensure(near_zero <= 1e-3, || format!("|evar - ess inf| / range = {near_zero:e} at alpha = 1e-8"))?;
    ensure(monotone >= 0.0, || format!("evar decreased by {:e} along the alpha grid", -monotone))?;
    Ok(format!(
        "|evar - mean| {near_one:.2e}; |evar - ess inf|/range {near_zero:.1e}; min step {monotone:.2e}"
    ))
}

fn cli_contract() -> Outcome {
    let mut checked = 0;
    for (name, args) in GOLDEN_CASES {
        let (code, stdout, stderr) = run_cli(BIN, args);
        ensure(code == 0, || format!("{name}: exit {code}: {stderr}"))?;
        let expected = std::fs::read_to_string(crate_dir().join("tests/golden").join(name))
            .map_err(|e| format!("{name}: {e}"))?;
        ensure(stdout == expected, || format!("{name} differs from its golden file"))?;
        ensure(run_cli(BIN, args).1 == stdout, || format!("{name} is not deterministic"))?;
        checked += 1;
    }
    for fixture in ["two_point.csv", "constant.csv", "four_atoms.csv", "indicator.csv"] {
        let path = format!("tests/fixtures/{fixture}");
        let mut args = vec!["verify", "--alpha", "0.5", "--input", path.as_str(), "--witness", "0.6,0.8"];
        if fixture != "two_point.csv" {
            args.push("--weighted");
        }
        let (code, stdout, _) = run_cli(BIN, &args);
        ensure(code == 0, || format!("verify on {fixture} exited {code}:\n{stdout}"))?;
    }
    let (code, stdout, _) = run_cli(
        BIN,
        &["--tol-entropy", "0.5", "verify", "--alpha", "0.5", "--input", "tests/fixtures/four_atoms.csv", "--weighted"],
    );
    ensure(code == 2, || format!("corrupted tolerance exited {code}:\n{stdout}"))?;
    ensure(stdout.contains("FAIL  primal_dual_agreement"), || "disagreement not reported".into())?;
    Ok(format!("{checked} golden files match; verify exits 0 on 4 fixtures and 2 when corrupted"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("indicator identity", indicator_identity),
        ("zero region", zero_region),
        ("primal/dual agreement", primal_dual_agreement),
        ("brute-force dual oracle", brute_force_dual),
        ("sandwich", sandwich_ordering),
        ("non-comonotonicity", non_comonotonicity),
        ("Lambda structure", lambda_structure),
        ("Kusuoka identity", kusuoka_identity),
        ("coherence axioms", coherence_axioms),
        ("limits", limits),
        ("CLI determinism and exit codes", cli_contract),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {:>2}. {name:<32} {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {:>2}. {name:<32} {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
