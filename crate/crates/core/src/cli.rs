//! Command-line front end: reads a distribution from CSV, runs the solvers
//! and writes reports.
//!
//! Exit codes: `0` success, `1` usage or input error, `2` internal
//! inconsistency (solver disagreement, failed property).

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::dist::{DiscreteDistribution, RiskLevel};
use crate::distortion::{
    choquet_utility, cvar, noncomonotone_witness, scenario_set_margin, DistortionFunction,
    SandwichReport,
};
use crate::dual::{evar_dual_with, DualConfig};
use crate::error::Error;
use crate::kusuoka::kusuoka_check;
use crate::lambda::LambdaCurve;
use crate::primal::evar_primal;

pub const SCHEMA_VERSION: u32 = 1;
/// `eval` and `verify` fail when primal and dual differ by more than this.
pub const PRIMAL_DUAL_TOL: f64 = 1e-6;
/// `kusuoka` and `verify` fail when the mixture misses `e_alpha` by more than this.
pub const KUSUOKA_TOL: f64 = 1e-5;
const AXIOM_TOL: f64 = 1e-9;
const MEMBERSHIP_MAX_ATOMS: usize = 12;
const PRODUCT_MAX_ATOMS: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "evar", version, about = "Entropic value-at-risk of discrete distributions")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Tolerance on |H - beta| for the dual entropy solve.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol_entropy: f64,

    /// Tolerance on |F - beta| for the Lambda root solve.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol_root: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate EVaR (primal and dual), CVaR and u_Lambda; comma-separated alphas run as a batch.
    Eval {
        #[arg(long, required = true, value_delimiter = ',')]
        alpha: Vec<f64>,
        #[command(flatten)]
        input: InputArgs,
        /// Emit JSON lines instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Emit (a, Lambda(a), dLambda/da) on a uniform grid of [0, 1] as CSV.
    LambdaCurve {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Write the dual optimizer as a mixture of CVaR utilities (JSON).
    Kusuoka {
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Run the property checks on an input distribution.
    Verify {
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        input: InputArgs,
        /// Also check the non-comonotonicity witness for 1_A + 1_B with P[A]=a, P[B]=b.
        #[arg(long, value_name = "A,B", value_parser = parse_pair)]
        witness: Option<(f64, f64)>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// CSV file: one value per line, or `value,weight` rows with --weighted.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    weighted: bool,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| format!("`{t}`: {e}"))
    };
    Ok((parse(a)?, parse(b)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Samples,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub entropy: f64,
    pub root: f64,
}

/// Validated settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub levels: Vec<RiskLevel>,
    pub input: Option<PathBuf>,
    pub input_format: InputFormat,
    pub output: OutputFormat,
    pub tolerances: Tolerances,
    pub points: usize,
    pub witness: Option<(f64, f64)>,
    pub color: bool,
}

impl RunConfig {
    fn dual(&self) -> DualConfig {
        DualConfig {
            entropy_tol: self.tolerances.entropy,
            ..DualConfig::default()
        }
    }

    fn curve(&self, level: RiskLevel) -> LambdaCurve {
        LambdaCurve::new(level).with_root_tol(self.tolerances.root)
    }

    fn level(&self) -> RiskLevel {
        self.levels[0]
    }

    fn load(&self) -> Result<DiscreteDistribution, CliError> {
        let path = self
            .input
            .as_deref()
            .ok_or_else(|| CliError::Usage("--input is required".into()))?;
        load_distribution(path, self.input_format)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 1,
            CliError::Inconsistent(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Inconsistent(e.to_string())
    }
}

/// Parses a distribution file. Blank lines and lines starting with `#` are
/// skipped; errors carry the 1-based line number.
pub fn load_distribution(path: &Path, format: InputFormat) -> Result<DiscreteDistribution, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_distribution(&text, format).map_err(|e| match e {
        CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_distribution(text: &str, format: InputFormat) -> Result<DiscreteDistribution, CliError> {
    let expected = match format {
        InputFormat::Samples => 1,
        InputFormat::Weighted => 2,
    };
    let mut pairs = Vec::new();
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim();
        if row.is_empty() || row.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != expected {
            return Err(CliError::Input(format!(
                "line {line}: expected {expected} field(s), found {}",
                fields.len()
            )));
        }
        let num = |field: &str| -> Result<f64, CliError> {
            field
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("line {line}: cannot parse `{field}` as a number")))
        };
        let value = num(fields[0])?;
        let weight = if expected == 2 { num(fields[1])? } else { 1.0 };
        pairs.push((value, weight));
        lines.push(line);
    }
    DiscreteDistribution::from_weighted(&pairs).map_err(|e| {
        let at = |i: usize| lines.get(i).copied().unwrap_or(0);
        CliError::Input(match e {
            Error::Empty => "no data rows".to_string(),
            Error::NonFiniteValue { index, value } => {
                format!("line {}: value {value} is not finite", at(index))
            }
            Error::InvalidWeight { index, weight } => {
                format!("line {}: weight {weight} must be positive", at(index))
            }
            other => other.to_string(),
        })
    })
}

/// Rounds to 15 significant digits; `-0` becomes `0`.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{x:.14e}").parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let r = round15(x);
        if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e15) {
            format!("{r:e}")
        } else {
            format!("{r}")
        }
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(round15(x))
    } else {
        Value::Null
    }
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// Builds a validated [`RunConfig`] from parsed arguments.
fn config_from(cli: &Cli) -> Result<RunConfig, CliError> {
    let tol = |name: &str, t: f64| {
        if t.is_finite() && t > 0.0 {
            Ok(t)
        } else {
            Err(CliError::Usage(format!("--{name} must be positive, got {t}")))
        }
    };
    let tolerances = Tolerances {
        entropy: tol("tol-entropy", cli.tol_entropy)?,
        root: tol("tol-root", cli.tol_root)?,
    };
    let levels = |alphas: &[f64]| -> Result<Vec<RiskLevel>, CliError> {
        let mut levels = alphas
            .iter()
            .map(|&a| RiskLevel::new(a).map_err(|e| CliError::Usage(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        levels.sort_by(|x, y| x.alpha().total_cmp(&y.alpha()));
        levels.dedup();
        Ok(levels)
    };
    let mut config = RunConfig {
        levels: Vec::new(),
        input: None,
        input_format: InputFormat::Samples,
        output: OutputFormat::Table,
        tolerances,
        points: 0,
        witness: None,
        color: false,
    };
    let set_input = |config: &mut RunConfig, input: &InputArgs| {
        config.input = Some(input.input.clone());
        config.input_format = if input.weighted {
            InputFormat::Weighted
        } else {
            InputFormat::Samples
        };
    };
    match &cli.command {
        Command::Eval { alpha, input, json } => {
            config.levels = levels(alpha)?;
            set_input(&mut config, input);
            config.output = if *json { OutputFormat::Json } else { OutputFormat::Table };
        }
        Command::LambdaCurve { alpha, points } => {
            config.levels = levels(&[*alpha])?;
            if *points < 2 {
                return Err(CliError::Usage(format!("--points must be at least 2, got {points}")));
            }
            config.points = *points;
            config.output = OutputFormat::Csv;
        }
        Command::Kusuoka { alpha, input } => {
            config.levels = levels(&[*alpha])?;
            set_input(&mut config, input);
            config.output = OutputFormat::Json;
        }
        Command::Verify {
            alpha,
            input,
            witness,
            json,
        } => {
            config.levels = levels(&[*alpha])?;
            set_input(&mut config, input);
            config.witness = *witness;
            config.output = if *json { OutputFormat::Json } else { OutputFormat::Table };
        }
    }
    Ok(config)
}

/// Parses `args` (including the program name) and runs the command, writing
/// the report to `out`. Help and version requests are written to `out` too.
pub fn run<I, T>(args: I, out: &mut dyn Write, color: bool) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    write_out(out, &e.to_string())
                }
                _ => Err(CliError::Usage(e.to_string())),
            };
        }
    };
    let mut config = config_from(&cli)?;
    config.color = color;
    let (text, result) = match &cli.command {
        Command::Eval { .. } => cmd_eval(&config)?,
        Command::LambdaCurve { .. } => (cmd_lambda_curve(&config)?, Ok(())),
        Command::Kusuoka { .. } => cmd_kusuoka(&config)?,
        Command::Verify { .. } => cmd_verify(&config)?,
    };
    write_out(out, &text)?;
    result
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Input(format!("writing output: {e}")))
}

/// Report text plus the verdict; the text is written even on failure.
pub type Outcome = (String, Result<(), CliError>);

fn eval_level(
    d: &DiscreteDistribution,
    level: RiskLevel,
    config: &RunConfig,
) -> Result<(Map<String, Value>, Option<String>), Error> {
    let primal = evar_primal(d, level)?;
    let dual = evar_dual_with(d, level, &config.dual())?;
    let cvar_value = cvar(d, level.alpha())?;
    let ulambda = choquet_utility(
        d,
        &DistortionFunction::Lambda(config.curve(level)),
    )?;
    let mut problem = None;
    let diff = (primal.value - dual.value).abs();
    if diff.is_nan() || diff > PRIMAL_DUAL_TOL {
        problem = Some(format!(
            "alpha {}: primal {} and dual {} differ by {diff:e}",
            level.alpha(),
            primal.value,
            dual.value
        ));
    } else if let Err(e) = SandwichReport::checked(cvar_value, dual.value, ulambda) {
        problem = Some(format!("alpha {}: {e}", level.alpha()));
    }
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!("eval"));
    m.insert("alpha".into(), num(level.alpha()));
    m.insert("atoms".into(), json!(d.len()));
    m.insert("mean".into(), num(d.mean()));
    m.insert("ess_inf".into(), num(d.ess_inf()));
    m.insert("evar_primal".into(), num(primal.value));
    m.insert("evar_dual".into(), num(dual.value));
    m.insert("cvar".into(), num(cvar_value));
    m.insert("u_lambda".into(), num(ulambda));
    m.insert("gap_cvar_evar".into(), num(cvar_value - dual.value));
    m.insert("gap_evar_ulambda".into(), num(dual.value - ulambda));
    m.insert("degenerate".into(), json!(dual.is_degenerate()));
    m.insert("z_star".into(), opt_num(dual.z_star()));
    m.insert("primal_z_star".into(), opt_num(primal.z_star()));
    m.insert("entropy".into(), num(dual.entropy));
    m.insert("iterations".into(), json!(dual.iterations));
    Ok((m, problem))
}

/// `eval`: all measures for each requested level. Levels are evaluated on
/// separate threads and reported in increasing `alpha`.
pub fn cmd_eval(config: &RunConfig) -> Result<Outcome, CliError> {
    let d = config.load()?;
    let results: Vec<Result<_, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .levels
            .iter()
            .map(|&level| {
                let d = &d;
                scope.spawn(move || eval_level(d, level, config))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("evaluation thread panicked"))
            .collect()
    });
    let mut text = String::new();
    let mut problems = Vec::new();
    for (i, result) in results.into_iter().enumerate() {
        let (report, problem) = result?;
        problems.extend(problem);
        match config.output {
            OutputFormat::Json => {
                text.push_str(&Value::Object(report).to_string());
                text.push('\n');
            }
            _ => {
                if i > 0 {
                    text.push('\n');
                }
                for (k, v) in &report {
                    if k == "schema_version" || k == "command" {
                        continue;
                    }
                    let shown = match v {
                        Value::Null => "-".to_string(),
                        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), fmt_num),
                        other => other.to_string(),
                    };
                    let _ = writeln!(text, "{k:<18}{shown}");
                }
            }
        }
    }
    let verdict = if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Inconsistent(problems.join("; ")))
    };
    Ok((text, verdict))
}

/// `lambda-curve`: CSV rows `a,lambda,dlambda_da` on `points` uniform
/// abscissae of `[0, 1]`; the derivative is blank outside `(1 - alpha, 1)`.
pub fn cmd_lambda_curve(config: &RunConfig) -> Result<String, CliError> {
    let level = config.level();
    let curve = config.curve(level);
    let n = config.points;
    let mut text = String::from("a,lambda,dlambda_da\n");
    for k in 0..n {
        let a = if k == n - 1 {
            1.0
        } else {
            k as f64 / (n - 1) as f64
        };
        let lam = curve.lambda_of(a)?;
        let slope = if a > 1.0 - level.alpha() && a < 1.0 {
            fmt_num(curve.lambda_derivative(a)?)
        } else {
            String::new()
        };
        let _ = writeln!(text, "{},{},{}", fmt_num(a), fmt_num(lam), slope);
    }
    Ok(text)
}

/// `kusuoka`: the dual optimizer rearranged into a CVaR mixture, with the
/// residual against `e_alpha`.
pub fn cmd_kusuoka(config: &RunConfig) -> Result<Outcome, CliError> {
    let d = config.load()?;
    let level = config.level();
    let k = kusuoka_check(&d, level, &config.dual())?;
    let nu: Vec<Value> = k
        .measure
        .atoms()
        .iter()
        .map(|&(x, m)| json!({"x": num(x), "mass": num(m)}))
        .collect();
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!("kusuoka"));
    m.insert("alpha".into(), num(level.alpha()));
    m.insert("degenerate".into(), json!(k.degenerate));
    m.insert("nu".into(), Value::Array(nu));
    m.insert("density_entropy".into(), num(k.density_entropy));
    m.insert("mixture".into(), num(k.mixture));
    m.insert("evar".into(), num(k.evar));
    m.insert("difference".into(), num(k.residual));
    if k.degenerate {
        m.insert(
            "note".into(),
            json!("alpha <= P[xi = ess inf]: entropy constraint slack, value is ess inf"),
        );
    }
    let text = serde_json::to_string_pretty(&Value::Object(m)).expect("json") + "\n";
    let verdict = if k.residual.abs() <= KUSUOKA_TOL {
        Ok(())
    } else {
        Err(CliError::Inconsistent(format!(
            "CVaR mixture misses EVaR by {:e}",
            k.residual
        )))
    };
    Ok((text, verdict))
}

struct Check {
    name: &'static str,
    pass: Option<bool>,
    detail: String,
}

impl Check {
    fn new(name: &'static str, pass: bool, detail: String) -> Self {
        Self {
            name,
            pass: Some(pass),
            detail,
        }
    }

    fn skipped(name: &'static str, detail: String) -> Self {
        Self {
            name,
            pass: None,
            detail,
        }
    }

    fn failed(name: &'static str, e: impl std::fmt::Display) -> Self {
        Self::new(name, false, format!("error: {e}"))
    }
}

fn check_with<T>(
    name: &'static str,
    value: Result<T, Error>,
    judge: impl FnOnce(T) -> (bool, String),
) -> Check {
    match value {
        Ok(v) => {
            let (pass, detail) = judge(v);
            Check::new(name, pass, detail)
        }
        Err(e) => Check::failed(name, e),
    }
}

/// `verify`: property checks on the input. Fails (exit 2) if any check fails.
pub fn cmd_verify(config: &RunConfig) -> Result<Outcome, CliError> {
    let d = config.load()?;
    let level = config.level();
    if let Some((a, b)) = config.witness {
        if !(a > 1.0 - level.alpha() && a < b && b < 1.0) {
            return Err(CliError::Usage(format!(
                "--witness requires 1 - alpha < a < b < 1, got a = {a}, b = {b}"
            )));
        }
    }
    let dual_cfg = config.dual();
    let evar = |d: &DiscreteDistribution| evar_dual_with(d, level, &dual_cfg).map(|s| s.value);
    let mut checks = Vec::new();

    let primal = evar_primal(&d, level);
    let dual = evar_dual_with(&d, level, &dual_cfg);
    match (&primal, &dual) {
        (Ok(p), Ok(q)) => {
            let diff = (p.value - q.value).abs();
            checks.push(Check::new(
                "primal_dual_agreement",
                diff <= PRIMAL_DUAL_TOL,
                format!("|primal - dual| = {}", fmt_num(diff)),
            ));
            checks.push(Check::new(
                "dual_feasibility",
                q.entropy <= level.beta() + 1e-9,
                format!("H = {}, beta = {}", fmt_num(q.entropy), fmt_num(level.beta())),
            ));
            checks.push(Check::new(
                "evar_bounds",
                q.value >= d.ess_inf() - 1e-12 && q.value <= d.mean() + 1e-12,
                format!(
                    "ess_inf = {} <= evar = {} <= mean = {}",
                    fmt_num(d.ess_inf()),
                    fmt_num(q.value),
                    fmt_num(d.mean())
                ),
            ));
        }
        (Err(e), _) | (_, Err(e)) => checks.push(Check::failed("primal_dual_agreement", e)),
    }

    let curve = config.curve(level);
    let lambda_f = DistortionFunction::Lambda(curve.clone());
    let sandwich = (|| {
        let c = cvar(&d, level.alpha())?;
        let e = evar(&d)?;
        let u = choquet_utility(&d, &lambda_f)?;
        SandwichReport::checked(c, e, u)
    })();
    checks.push(check_with("sandwich_ordering", sandwich, |r| {
        (
            true,
            format!(
                "cvar - evar = {}, evar - u_lambda = {}",
                fmt_num(r.gap_cvar_evar),
                fmt_num(r.gap_evar_ulambda)
            ),
        )
    }));

    if d.len() <= MEMBERSHIP_MAX_ATOMS {
        let margin = dual
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|s| scenario_set_margin(&s.scenario, &d, &lambda_f));
        checks.push(check_with("dual_optimizer_in_s_lambda", margin, |m| {
            (m >= -1e-9, format!("min_A Q[A] - Lambda(P[A]) = {}", fmt_num(m)))
        }));
    } else {
        checks.push(Check::skipped(
            "dual_optimizer_in_s_lambda",
            format!("{} atoms > {MEMBERSHIP_MAX_ATOMS}", d.len()),
        ));
    }

    checks.push(check_with(
        "kusuoka_identity",
        kusuoka_check(&d, level, &dual_cfg),
        |k| {
            (
                k.residual.abs() <= KUSUOKA_TOL,
                format!("mixture - evar = {}", fmt_num(k.residual)),
            )
        },
    ));

    let base = evar(&d);
    let shift = 1.5;
    let translated = base.clone().and_then(|e| Ok((evar(&d.shifted(shift)?)?, e)));
    checks.push(check_with("translation", translated, |(t, e)| {
        let err = t - e - shift;
        (err.abs() <= AXIOM_TOL * (1.0 + e.abs()), format!("e(x+c) - e(x) - c = {}", fmt_num(err)))
    }));
    let factor = 2.5;
    let scaled = base.clone().and_then(|e| Ok((evar(&d.scaled(factor)?)?, e)));
    checks.push(check_with("positive_homogeneity", scaled, |(s, e)| {
        let err = s - factor * e;
        (err.abs() <= AXIOM_TOL * (1.0 + e.abs()), format!("e(kx) - k e(x) = {}", fmt_num(err)))
    }));
    let n = d.len() as f64;
    let bumped = base.clone().and_then(|e| {
        let pairs: Vec<(f64, f64)> = d
            .atoms()
            .enumerate()
            .map(|(i, (v, p))| (v + 0.1 * (i as f64 + 1.0) / n, p))
            .collect();
        Ok((evar(&DiscreteDistribution::from_weighted(&pairs)?)?, e))
    });
    checks.push(check_with("monotonicity", bumped, |(b, e)| {
        (b - e >= -AXIOM_TOL, format!("e(y) - e(x) = {} for y >= x", fmt_num(b - e)))
    }));
    if d.len() <= PRODUCT_MAX_ATOMS {
        let summed = base.clone().and_then(|e| Ok((evar(&d.independent_sum(&d)?)?, e)));
        checks.push(check_with("superadditivity", summed, |(s, e)| {
            (s - 2.0 * e >= -AXIOM_TOL, format!("e(x+y) - e(x) - e(y) = {}", fmt_num(s - 2.0 * e)))
        }));
    } else {
        checks.push(Check::skipped(
            "superadditivity",
            format!("{} atoms > {PRODUCT_MAX_ATOMS}", d.len()),
        ));
    }

    if let Some((a, b)) = config.witness {
        checks.push(check_with(
            "noncomonotone_witness",
            noncomonotone_witness(level, a, b),
            |w| {
                (
                    w.passes(),
                    format!(
                        "gap = {}, |L(a)/a - L(b)/b| = {}, |L(b)/b - (1-L(a))/(1-a)| = {}",
                        fmt_num(w.gap),
                        fmt_num(w.inner_mismatch()),
                        fmt_num(w.outer_mismatch())
                    ),
                )
            },
        ));
    }

    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| c.pass == Some(false))
        .map(|c| c.name)
        .collect();
    let text = match config.output {
        OutputFormat::Json => {
            let items: Vec<Value> = checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "status": status(c.pass),
                        "detail": c.detail,
                    })
                })
                .collect();
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "verify",
                "alpha": num(level.alpha()),
                "passed": failed.is_empty(),
                "checks": items,
            });
            serde_json::to_string_pretty(&report).expect("json") + "\n"
        }
        _ => {
            let mut text = String::new();
            for c in &checks {
                let tag = status(c.pass).to_uppercase();
                let tag = if config.color {
                    let code = match c.pass {
                        Some(true) => "32",
                        Some(false) => "31",
                        None => "33",
                    };
                    format!("\x1b[{code}m{tag:<4}\x1b[0m")
                } else {
                    format!("{tag:<4}")
                };
                let _ = writeln!(text, "{tag}  {:<28}{}", c.name, c.detail);
            }
            text
        }
    };
    let verdict = if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Inconsistent(format!("failed checks: {}", failed.join(", "))))
    };
    Ok((text, verdict))
}

fn status(pass: Option<bool>) -> &'static str {
    match pass {
        Some(true) => "pass",
        Some(false) => "fail",
        None => "skip",
    }
}
