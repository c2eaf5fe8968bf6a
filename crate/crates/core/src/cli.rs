//! JSON system configurations and the commands of the `nadim` binary.
//!
//! A configuration looks like
//!
//! ```json
//! {
//!   "field": { "kind": "padic", "p": 3 },
//!   "n": 1,
//!   "maps": [
//!     { "T": [["3"]], "b": ["0"] },
//!     { "T": [["3"]], "b": ["1"] }
//!   ],
//!   "budgets": { "k_max": 8, "node_cap": 2000000, "tolerance": 1e-9 },
//!   "seed": 0
//! }
//! ```
//!
//! Entry literals are decimal integers, rationals `a/b`, or explicit digit
//! expansions `pi^v*(d0,d1,...)`.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::attractor::{
    potential_integral_mc, random_translation_experiment, trial_rng, Aifs, BoxOptions, ExperimentOptions,
};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldKind, FieldSpec, DEFAULT_PRECISION};
use crate::linalg::Matrix;
use crate::pressure::{critical_exponent_with, PressureOptions, WordSpace, DEFAULT_NODE_CAP};
use crate::svd::{singular_valuations_by_minors, svd};
use crate::svf::{phi, s_grid, submultiplicativity_report};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    field: RawField,
    n: usize,
    maps: Vec<RawMap>,
    #[serde(default)]
    budgets: RawBudgets,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    kind: FieldKind,
    p: u64,
    precision: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    #[serde(rename = "T")]
    t: Vec<Vec<String>>,
    b: Vec<String>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBudgets {
    k_max: Option<usize>,
    node_cap: Option<u64>,
    precision: Option<usize>,
    tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Budgets {
    pub k_max: Option<usize>,
    pub node_cap: u64,
    pub tolerance: f64,
}

/// A parsed configuration. The maps are non-singular; whether they are
/// contractive is decided by [`SystemConfig::aifs`].
#[derive(Clone, Debug)]
pub struct SystemConfig {
    pub spec: FieldSpec,
    pub n: usize,
    pub maps: Vec<Matrix>,
    pub translations: Vec<Vec<FieldElement>>,
    pub budgets: Budgets,
    pub seed: u64,
}

impl SystemConfig {
    /// Parse without requiring contractive maps, as needed by commands that
    /// only look at the matrices one at a time.
    pub fn from_json_unchecked(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
        })?;
        let precision = match (raw.field.precision, raw.budgets.precision) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::parse(
                    "budgets.precision",
                    format!("conflicts with field.precision ({b} vs {a})"),
                ))
            }
            (a, b) => a.or(b).unwrap_or(DEFAULT_PRECISION),
        };
        let spec = FieldSpec::new(raw.field.kind, raw.field.p, precision)?;
        let n = raw.n;
        if n == 0 {
            return Err(Error::parse("n", "dimension must be at least 1"));
        }
        if raw.maps.is_empty() {
            return Err(Error::parse("maps", "at least one map is required"));
        }
        let literal = |location: String, text: &str| {
            FieldElement::parse(spec, text).map_err(|e| match e {
                Error::Parse { message, .. } => Error::parse(location, message),
                Error::DivisionByZero => Error::parse(location, format!("{text:?} divides by zero")),
                other => other,
            })
        };
        let mut maps = Vec::with_capacity(raw.maps.len());
        let mut translations = Vec::with_capacity(raw.maps.len());
        for (i, m) in raw.maps.iter().enumerate() {
            if m.t.len() != n || m.t.iter().any(|row| row.len() != n) {
                return Err(Error::parse(format!("maps[{i}].T"), format!("expected a {n}x{n} array")));
            }
            if m.b.len() != n {
                return Err(Error::parse(format!("maps[{i}].b"), format!("expected {n} entries")));
            }
            let mut rows = Vec::with_capacity(n);
            for (r, row) in m.t.iter().enumerate() {
                let parsed = row
                    .iter()
                    .enumerate()
                    .map(|(c, x)| literal(format!("maps[{i}].T[{r}][{c}]"), x))
                    .collect::<Result<Vec<_>>>()?;
                rows.push(parsed);
            }
            let t = Matrix::from_rows(spec, rows)?;
            if t.det()?.is_zero() {
                return Err(Error::SingularMap { map: i });
            }
            maps.push(t);
            let b = m
                .b
                .iter()
                .enumerate()
                .map(|(c, x)| literal(format!("maps[{i}].b[{c}]"), x))
                .collect::<Result<Vec<_>>>()?;
            translations.push(b);
        }
        let tolerance = raw.budgets.tolerance.unwrap_or(1e-9);
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(Error::parse("budgets.tolerance", "must be positive"));
        }
        if raw.budgets.k_max == Some(0) {
            return Err(Error::parse("budgets.k_max", "must be at least 1"));
        }
        let budgets = Budgets {
            k_max: raw.budgets.k_max,
            node_cap: raw.budgets.node_cap.unwrap_or(DEFAULT_NODE_CAP),
            tolerance,
        };
        Ok(SystemConfig { spec, n, maps, translations, budgets, seed: raw.seed })
    }

    /// Parse and check that the maps form a contractive affine system.
    pub fn from_json(text: &str) -> Result<Self> {
        let config = Self::from_json_unchecked(text)?;
        config.aifs()?;
        Ok(config)
    }

    pub fn word_space(&self) -> Result<WordSpace> {
        WordSpace::new(self.maps.clone())
    }

    pub fn aifs(&self) -> Result<Aifs> {
        Aifs::new(self.word_space()?, self.translations.clone())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

/// Load and fully validate a configuration file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<SystemConfig> {
    SystemConfig::from_json(&read(path.as_ref())?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Svd,
    Phi,
    Dim,
    Boxdim,
    Experiment,
    Mcintegral,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "nadim", version, about = "Dimension theory of self-affine sets over local fields")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub kmax: Option<usize>,
    #[arg(long)]
    pub tmin: Option<i64>,
    #[arg(long)]
    pub tmax: Option<i64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

/// What the binary prints, and its exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome { output: pretty(&value), exit_code: 0 }
    }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

fn render_norm(q: u64, v: i64) -> String {
    format!("{q}^{}", -v)
}

fn render_matrix(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_string()).collect()).collect()
}

fn field_json(spec: FieldSpec) -> Value {
    json!({ "kind": spec.kind(), "p": spec.p(), "precision": spec.precision() })
}

/// Run one command against a configuration given as JSON text.
pub fn run_with_text(cli: &Cli, text: &str) -> Result<Outcome> {
    if cli.workers == 0 {
        return Err(Error::InvalidArgument("--workers must be at least 1".into()));
    }
    if cli.format == Format::Csv && cli.command != Command::Boxdim {
        return Err(Error::InvalidArgument("csv output is only available for boxdim".into()));
    }
    match cli.command {
        Command::Svd => cmd_svd(&SystemConfig::from_json_unchecked(text)?),
        Command::Phi => cmd_phi(&SystemConfig::from_json_unchecked(text)?, cli),
        Command::Mcintegral => cmd_mcintegral(&SystemConfig::from_json_unchecked(text)?, cli),
        Command::Dim => cmd_dim(&SystemConfig::from_json(text)?, cli),
        Command::Boxdim => cmd_boxdim(&SystemConfig::from_json(text)?, cli),
        Command::Experiment => cmd_experiment(&SystemConfig::from_json(text)?, cli),
        Command::Verify => cmd_verify(&SystemConfig::from_json(text)?, cli),
    }
}

/// Run one command, reading the configuration named by `--config`.
pub fn run(cli: &Cli) -> Result<Outcome> {
    run_with_text(cli, &read(&cli.config)?)
}

fn cmd_svd(config: &SystemConfig) -> Result<Outcome> {
    let q = config.spec.q();
    let mut maps = Vec::new();
    for (i, t) in config.maps.iter().enumerate() {
        let d = svd(t)?;
        maps.push(json!({
            "index": i,
            "valuations": d.valuations,
            "singular_values": d.valuations.iter().map(|&v| render_norm(q, v)).collect::<Vec<_>>(),
            "P": render_matrix(&d.p),
            "D": render_matrix(&d.d),
            "Q": render_matrix(&d.q),
        }));
    }
    Ok(Outcome::ok(json!({ "command": "svd", "field": field_json(config.spec), "maps": maps })))
}

fn required_s(cli: &Cli) -> Result<f64> {
    let s = cli.s.ok_or_else(|| Error::InvalidArgument("--s is required".into()))?;
    if s < 0.0 || s.is_nan() {
        return Err(Error::NegativeExponent(s));
    }
    Ok(s)
}

fn cmd_phi(config: &SystemConfig, cli: &Cli) -> Result<Outcome> {
    let s = required_s(cli)?;
    let mut maps = Vec::new();
    for (i, t) in config.maps.iter().enumerate() {
        let v = phi(t, s)?;
        maps.push(json!({ "index": i, "log_q_phi": v.log_q_value, "phi": v.value() }));
    }
    Ok(Outcome::ok(json!({ "command": "phi", "s": s, "q": config.spec.q(), "maps": maps })))
}

fn pressure_options(config: &SystemConfig, cli: &Cli) -> PressureOptions {
    PressureOptions {
        k_max: cli.kmax.or(config.budgets.k_max),
        tol: config.budgets.tolerance,
        workers: cli.workers,
        node_cap: config.budgets.node_cap,
    }
}

fn box_options(config: &SystemConfig, cli: &Cli) -> BoxOptions {
    BoxOptions { node_cap: config.budgets.node_cap, workers: cli.workers }
}

fn cmd_dim(config: &SystemConfig, cli: &Cli) -> Result<Outcome> {
    let ws = config.word_space()?;
    let bracket = critical_exponent_with(&ws, &pressure_options(config, cli))?;
    Ok(Outcome::ok(json!({ "command": "dim", "q": config.spec.q(), "n": config.n, "bracket": bracket })))
}

fn t_range(cli: &Cli, default: (i64, i64)) -> Result<(i64, i64)> {
    let t_min = cli.tmin.unwrap_or(default.0);
    let t_max = cli.tmax.unwrap_or(default.1);
    if t_min >= t_max {
        return Err(Error::InvalidArgument(format!("--tmin {t_min} must be below --tmax {t_max}")));
    }
    Ok((t_min, t_max))
}

fn cmd_boxdim(config: &SystemConfig, cli: &Cli) -> Result<Outcome> {
    let aifs = config.aifs()?;
    let (t_min, t_max) = t_range(cli, (1, 8))?;
    let table = aifs.box_count_table(t_min, t_max, &box_options(config, cli))?;
    if cli.format == Format::Csv {
        return Ok(Outcome { output: table.to_csv(), exit_code: 0 });
    }
    Ok(Outcome::ok(json!({
        "command": "boxdim",
        "invariant_radius_exponent": aifs.invariant_radius(),
        "table": table,
        "slope": table.slope(),
    })))
}

fn experiment_options(config: &SystemConfig, cli: &Cli, default_trials: usize) -> Result<ExperimentOptions> {
    let (t_min, t_max) = t_range(cli, (4, 12))?;
    Ok(ExperimentOptions {
        trials: cli.trials.unwrap_or(default_trials),
        seed: cli.seed.unwrap_or(config.seed),
        t_min,
        t_max,
        pressure: pressure_options(config, cli),
        boxes: box_options(config, cli),
        ..Default::default()
    })
}

fn cmd_experiment(config: &SystemConfig, cli: &Cli) -> Result<Outcome> {
    let opts = experiment_options(config, cli, 20)?;
    let report = random_translation_experiment(&config.word_space()?, &opts)?;
    Ok(Outcome::ok(json!({
        "command": "experiment",
        "seed": opts.seed,
        "t_min": opts.t_min,
        "t_max": opts.t_max,
        "report": report,
    })))
}

fn cmd_mcintegral(config: &SystemConfig, cli: &Cli) -> Result<Outcome> {
    let s = required_s(cli)?;
    let samples = cli.samples.unwrap_or(10_000);
    let seed = cli.seed.unwrap_or(config.seed);
    let mut maps = Vec::new();
    for (i, t) in config.maps.iter().enumerate() {
        let mut rng = trial_rng(seed, i as u64);
        let estimate = potential_integral_mc(t, s, samples, &mut rng)?;
        maps.push(json!({ "index": i, "estimate": estimate }));
    }
    Ok(Outcome::ok(json!({ "command": "mcintegral", "s": s, "seed": seed, "maps": maps })))
}

#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: Value,
}

struct Suite(Vec<Check>);

impl Suite {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: Value) {
        self.0.push(Check { name: name.into(), passed, detail });
    }
}

fn cmd_verify(config: &SystemConfig, cli: &Cli) -> Result<Outcome> {
    let mut suite = Suite(Vec::new());
    let n = config.n;

    for (i, t) in config.maps.iter().enumerate() {
        let d = svd(t)?;
        let reconstructs = d.reconstruct()?.eq_at_precision(t);
        let isometries = d.p.is_isometry()? && d.q.is_isometry()?;
        suite.push(format!("svd[{i}].reconstruction"), reconstructs, json!(null));
        suite.push(format!("svd[{i}].isometric_factors"), isometries, json!(null));
        let minors = singular_valuations_by_minors(t)?;
        suite.push(
            format!("svd[{i}].minor_oracle"),
            minors == d.valuations,
            json!({ "elimination": d.valuations, "minors": minors }),
        );
    }

    let grid = s_grid(0.25, 2.0 * n as f64);
    let mut pairs = 0;
    let mut failures = Vec::new();
    let mut equality_above_n = true;
    for (i, t) in config.maps.iter().enumerate() {
        for (j, u) in config.maps.iter().enumerate() {
            for c in submultiplicativity_report(t, u, &grid)? {
                pairs += 1;
                if !c.holds {
                    failures.push(json!({ "left": i, "right": j, "s": c.s }));
                }
                if c.s > n as f64 && !c.equality {
                    equality_above_n = false;
                }
            }
        }
    }
    suite.push("phi.submultiplicative", failures.is_empty(), json!({ "comparisons": pairs, "failures": failures }));
    suite.push("phi.determinant_branch_equality", equality_above_n, json!(null));

    let ws = config.word_space()?;
    let popts = pressure_options(config, cli);
    let bracket = critical_exponent_with(&ws, &popts)?;
    let tol = config.budgets.tolerance;
    suite.push(
        "pressure.bracket_ordered",
        bracket.s_lower <= bracket.s_upper,
        json!({ "s_lower": bracket.s_lower, "s_upper": bracket.s_upper, "k": bracket.k }),
    );
    let multiples_ok = (1..=bracket.k)
        .flat_map(|k| (2..=bracket.k / k).map(move |m| (k, m * k)))
        .all(|(k, mk)| bracket.roots[mk - 1] <= bracket.roots[k - 1] + tol);
    suite.push("pressure.roots_decrease_along_multiples", multiples_ok, json!({ "roots": bracket.roots }));
    let decreasing = bracket
        .probes
        .iter()
        .zip(bracket.probes.iter().skip(1))
        .filter(|(a, b)| a.s < b.s)
        .all(|(a, b)| b.f < a.f);
    suite.push("pressure.decreasing_in_s", decreasing, json!(null));

    let aifs = config.aifs()?;
    let bopts = box_options(config, cli);
    let (t_min, t_max) = t_range(cli, (0, 6))?;
    let table = aifs.box_count_table(t_min, t_max, &bopts)?;
    let qn = config.spec.q().saturating_pow(n as u32);
    let monotone = table.rows.windows(2).all(|w| w[0].count <= w[1].count && w[1].count <= qn * w[0].count);
    suite.push("boxes.monotone_refinement", monotone, json!({ "table": table }));
    let mut nested = true;
    let mut coarse = aifs.box_count_keys(t_min, &bopts)?;
    for t in t_min + 1..=t_max {
        let fine = aifs.box_count_keys(t, &bopts)?;
        let width = (t - aifs.invariant_radius()) as usize;
        for key in &fine {
            let truncated: Vec<u32> = key.0.chunks(width).flat_map(|c| c[..width - 1].iter().copied()).collect();
            if coarse.binary_search(&crate::field::PrefixKey(truncated)).is_err() {
                nested = false;
            }
        }
        coarse = fine;
    }
    suite.push("boxes.cover_consistency", nested, json!(null));

    let eopts = ExperimentOptions { t_min, t_max, ..experiment_options(config, cli, 5)? };
    let report = random_translation_experiment(&ws, &eopts)?;
    let slack = 0.02;
    suite.push(
        "experiment.upper_bound",
        report.max_estimate <= report.s_upper + slack,
        json!({ "seed": eopts.seed, "max_estimate": report.max_estimate, "s_upper": report.s_upper }),
    );

    let passed = suite.0.iter().all(|c| c.passed);
    let failed: Vec<&str> = suite.0.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let out = json!({
        "command": "verify",
        "field": field_json(config.spec),
        "n": n,
        "passed": passed,
        "failed": failed,
        "checks": suite.0,
    });
    Ok(Outcome { output: pretty(&out), exit_code: if passed { 0 } else { 5 } })
}
