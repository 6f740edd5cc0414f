//! Run configuration: strict JSON parsing and default resolution.

use std::path::PathBuf;

use martinwalk::composition::{Composition, SimplexPoint};
use martinwalk::ProbValue;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::CliError;

/// Largest exact enumeration level accepted from a config.
pub const MAX_EXACT_BUDGET: usize = 12;
/// Cap on `Σ_{n ≤ budget} |level n|` for the exact suites.
pub const MAX_EXACT_STATES: u128 = 2_000;
/// Cap on `horizon × replicates` for the Monte Carlo commands.
pub const MAX_SAMPLE_STEPS: u128 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    Kernel,
    Simulate,
    Estimate,
    Lift,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Kernel => "kernel",
            Command::Simulate => "simulate",
            Command::Estimate => "estimate",
            Command::Lift => "lift",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Mixture,
    Polya,
    Markov,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    kind: SourceKind,
    atoms: Option<Vec<Vec<Value>>>,
    weights: Option<Vec<Value>>,
    counts: Option<Vec<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Option<Command>,
    mode: Option<Mode>,
    d: Option<usize>,
    budget: Option<usize>,
    alpha: Option<Vec<Value>>,
    alphas: Option<Vec<Vec<Value>>>,
    source: Option<RawSource>,
    horizon: Option<usize>,
    replicates: Option<usize>,
    seed: Option<u64>,
    workers: Option<usize>,
    probes: Option<Vec<Vec<u32>>>,
    levels: Option<Vec<u32>>,
    depth: Option<usize>,
    digits: Option<usize>,
    grid: Option<usize>,
    k: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

/// A sequence source named by a config.
#[derive(Clone, Debug, PartialEq)]
pub enum SourceSpec {
    Mixture { atoms: Vec<SimplexPoint>, weights: Vec<ProbValue> },
    Polya { counts: Vec<u64> },
    /// The sticky binary chain used as the non-exchangeable control.
    Markov,
}

impl SourceSpec {
    pub fn d(&self) -> usize {
        match self {
            SourceSpec::Mixture { atoms, .. } => atoms[0].d(),
            SourceSpec::Polya { counts } => counts.len(),
            SourceSpec::Markov => 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SourceSpec::Mixture { .. } => "mixture",
            SourceSpec::Polya { .. } => "polya",
            SourceSpec::Markov => "markov",
        }
    }

    fn echo(&self) -> Value {
        match self {
            SourceSpec::Mixture { atoms, weights } => json!({
                "kind": "mixture",
                "atoms": atoms.iter().map(point_echo).collect::<Vec<_>>(),
                "weights": weights.iter().map(value_echo).collect::<Vec<_>>(),
            }),
            SourceSpec::Polya { counts } => json!({ "kind": "polya", "counts": counts }),
            SourceSpec::Markov => json!({ "kind": "markov" }),
        }
    }
}

/// A fully resolved configuration: every default is filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub mode: Mode,
    pub dims: Vec<usize>,
    pub budget: usize,
    pub alphas: Vec<SimplexPoint>,
    pub sources: Vec<SourceSpec>,
    pub horizon: usize,
    pub replicates: usize,
    pub seed: u64,
    /// Worker threads for Monte Carlo; 0 picks the default pool. Not echoed.
    pub workers: usize,
    pub probes: Option<Vec<Composition>>,
    pub levels: Vec<u32>,
    pub depth: usize,
    pub digits: usize,
    pub grid: usize,
    pub k: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Settings given on the command line; they override the document.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
    resolve(raw, overrides)
}

fn parse_value(v: &Value, mode: Mode) -> Result<ProbValue, CliError> {
    let exact = match v {
        Value::String(s) => ProbValue::parse_exact(s).map_err(|e| config_err(e.to_string()))?,
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                ProbValue::ratio(i, 1)
            } else if mode == Mode::Float {
                return Ok(ProbValue::float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                return Err(config_err(format!(
                    "number {n} needs \"mode\": \"float\"; give exact values as \"p/q\" strings"
                )));
            }
        }
        other => return Err(config_err(format!("expected a number or \"p/q\" string, got {other}"))),
    };
    Ok(match mode {
        Mode::Exact => exact,
        Mode::Float => ProbValue::float(exact.to_f64()),
    })
}

fn parse_point(values: &[Value], mode: Mode) -> Result<SimplexPoint, CliError> {
    let coords = values.iter().map(|v| parse_value(v, mode)).collect::<Result<Vec<_>, _>>()?;
    SimplexPoint::new(coords).map_err(|e| config_err(e.to_string()))
}

fn parse_source(raw: RawSource, mode: Mode) -> Result<SourceSpec, CliError> {
    match raw.kind {
        SourceKind::Mixture => {
            if raw.counts.is_some() {
                return Err(config_err("mixture source takes atoms and weights, not counts"));
            }
            let atoms = raw.atoms.ok_or_else(|| config_err("mixture source needs atoms"))?;
            let atoms = atoms.iter().map(|a| parse_point(a, mode)).collect::<Result<Vec<_>, _>>()?;
            let weights = match raw.weights {
                Some(w) => w.iter().map(|v| parse_value(v, mode)).collect::<Result<Vec<_>, _>>()?,
                None => vec![ProbValue::ratio(1, atoms.len().max(1) as i64); atoms.len()],
            };
            martinwalk::definetti::ExchangeableSource::mixture(atoms.clone(), weights.clone())
                .map_err(|e| config_err(e.to_string()))?;
            Ok(SourceSpec::Mixture { atoms, weights })
        }
        SourceKind::Polya => {
            if raw.atoms.is_some() || raw.weights.is_some() {
                return Err(config_err("polya source takes counts only"));
            }
            let counts = raw.counts.ok_or_else(|| config_err("polya source needs counts"))?;
            martinwalk::definetti::ExchangeableSource::polya(counts.clone()).map_err(|e| config_err(e.to_string()))?;
            Ok(SourceSpec::Polya { counts })
        }
        SourceKind::Markov => {
            if raw.atoms.is_some() || raw.weights.is_some() || raw.counts.is_some() {
                return Err(config_err("markov source takes no parameters"));
            }
            Ok(SourceSpec::Markov)
        }
    }
}

fn exact_point(coords: &[&str]) -> SimplexPoint {
    SimplexPoint::parse(coords).expect("valid default")
}

fn to_mode(p: SimplexPoint, mode: Mode) -> SimplexPoint {
    match mode {
        Mode::Exact => p,
        Mode::Float => SimplexPoint::from_f64s(&p.to_f64s()).expect("valid default"),
    }
}

/// Rational grid used by `verify` when no α is configured.
pub fn default_verify_alphas(d: usize) -> Vec<SimplexPoint> {
    match d {
        2 => vec![exact_point(&["7/10", "3/10"]), exact_point(&["1/3", "2/3"]), exact_point(&["1", "0"])],
        3 => vec![
            exact_point(&["1/2", "1/3", "1/6"]),
            exact_point(&["1/5", "1/5", "3/5"]),
            exact_point(&["0", "2/5", "3/5"]),
        ],
        _ => vec![SimplexPoint::uniform(d)],
    }
}

/// Five-point grid with every coordinate at least 1/10, used by `kernel`.
pub fn default_kernel_alphas(d: usize) -> Vec<SimplexPoint> {
    match d {
        2 => ["1/2", "7/10", "1/10", "3/10", "9/10"]
            .iter()
            .map(|a| {
                let p = ProbValue::parse_exact(a).expect("valid");
                SimplexPoint::new(vec![p.clone(), ProbValue::one() - p]).expect("valid")
            })
            .collect(),
        3 => vec![
            SimplexPoint::uniform(3),
            exact_point(&["1/2", "3/10", "1/5"]),
            exact_point(&["1/10", "1/10", "4/5"]),
            exact_point(&["3/5", "1/10", "3/10"]),
            exact_point(&["1/4", "1/2", "1/4"]),
        ],
        _ => vec![SimplexPoint::uniform(d)],
    }
}

/// Sources exercised by `verify` and `estimate` when none is configured.
pub fn default_sources(d: usize) -> Vec<SourceSpec> {
    let mixture = match d {
        2 => SourceSpec::Mixture {
            atoms: vec![exact_point(&["1/5", "4/5"]), exact_point(&["3/5", "2/5"])],
            weights: vec![ProbValue::ratio(1, 2), ProbValue::ratio(1, 2)],
        },
        3 => SourceSpec::Mixture {
            atoms: vec![exact_point(&["1/2", "1/4", "1/4"]), exact_point(&["0", "1/3", "2/3"])],
            weights: vec![ProbValue::ratio(1, 3), ProbValue::ratio(2, 3)],
        },
        _ => SourceSpec::Mixture { atoms: vec![SimplexPoint::uniform(d)], weights: vec![ProbValue::one()] },
    };
    let mut out = vec![mixture, SourceSpec::Polya { counts: vec![1; d] }];
    if d == 2 {
        out.push(SourceSpec::Markov);
    }
    out
}

fn source_to_mode(s: SourceSpec, mode: Mode) -> SourceSpec {
    match s {
        SourceSpec::Mixture { atoms, weights } if mode == Mode::Float => SourceSpec::Mixture {
            atoms: atoms.into_iter().map(|a| to_mode(a, mode)).collect(),
            weights: weights.iter().map(|w| ProbValue::float(w.to_f64())).collect(),
        },
        other => other,
    }
}

fn resolve(raw: RawConfig, ov: &Overrides) -> Result<RunConfig, CliError> {
    let command = match (raw.command, ov.command) {
        (Some(a), Some(b)) if a != b => {
            return Err(config_err(format!("config names command {} but {} was requested", a.as_str(), b.as_str())))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(config_err("no command given")),
    };
    let mode = raw.mode.unwrap_or_default();
    if raw.alpha.is_some() && raw.alphas.is_some() {
        return Err(config_err("give either alpha or alphas, not both"));
    }
    let explicit_alphas = match (raw.alpha, raw.alphas) {
        (Some(a), _) => Some(vec![parse_point(&a, mode)?]),
        (_, Some(list)) => Some(list.iter().map(|a| parse_point(a, mode)).collect::<Result<Vec<_>, _>>()?),
        _ => None,
    };
    let source = raw.source.map(|s| parse_source(s, mode)).transpose()?;

    let dims = match (raw.d, &explicit_alphas, &source) {
        (Some(0), _, _) => return Err(config_err("d must be at least 1")),
        (Some(d), _, _) => vec![d],
        (None, Some(a), _) => {
            let mut ds: Vec<usize> = a.iter().map(SimplexPoint::d).collect();
            ds.sort_unstable();
            ds.dedup();
            ds
        }
        (None, None, Some(s)) => vec![s.d()],
        (None, None, None) => match command {
            Command::Verify | Command::Kernel => vec![2, 3],
            _ => vec![2],
        },
    };
    if let Some(a) = explicit_alphas.iter().flatten().find(|a| !dims.contains(&a.d())) {
        return Err(config_err(format!("alpha {a} does not have d = {dims:?} coordinates")));
    }
    if let Some(s) = &source {
        if !dims.contains(&s.d()) {
            return Err(config_err(format!("source has {} symbols but d = {dims:?}", s.d())));
        }
    }

    let alphas = match explicit_alphas {
        Some(a) => a,
        None => dims
            .iter()
            .flat_map(|&d| match command {
                Command::Kernel => default_kernel_alphas(d),
                Command::Simulate => vec![SimplexPoint::uniform(d)],
                _ => default_verify_alphas(d),
            })
            .map(|a| to_mode(a, mode))
            .collect(),
    };
    if command == Command::Simulate && alphas.len() != 1 {
        return Err(config_err("simulate takes a single alpha"));
    }
    let sources = match source {
        Some(s) => vec![s],
        None => match command {
            Command::Estimate => vec![default_sources(dims[0]).remove(0)],
            _ => dims.iter().flat_map(|&d| default_sources(d)).collect(),
        },
    };
    let sources = sources.into_iter().map(|s| source_to_mode(s, mode)).collect();

    let probes = raw
        .probes
        .map(|ps| {
            ps.into_iter()
                .map(|p| {
                    if dims.contains(&p.len()) {
                        Ok(Composition::new(p))
                    } else {
                        Err(config_err(format!("probe {p:?} does not have d = {dims:?} parts")))
                    }
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;

    let (default_horizon, default_replicates) = match command {
        Command::Simulate => (10, 1),
        Command::Estimate => (10_000, 2_000),
        _ => (0, 0),
    };
    let config = RunConfig {
        command,
        mode,
        dims,
        budget: raw.budget.unwrap_or(6),
        alphas,
        sources,
        horizon: raw.horizon.unwrap_or(default_horizon),
        replicates: raw.replicates.unwrap_or(default_replicates),
        seed: ov.seed.or(raw.seed).unwrap_or(0),
        workers: ov.workers.or(raw.workers).unwrap_or(0),
        probes,
        levels: raw.levels.unwrap_or_else(|| vec![1_000, 10_000, 100_000]),
        depth: raw.depth.unwrap_or(2),
        digits: raw.digits.unwrap_or(30),
        grid: raw.grid.unwrap_or(10_000),
        k: raw.k.unwrap_or(2),
        out: ov.out.clone().or(raw.out),
        format: ov.format.or(raw.format).unwrap_or_default(),
    };
    validate(&config)?;
    Ok(config)
}

fn validate(c: &RunConfig) -> Result<(), CliError> {
    if c.levels.windows(2).any(|w| w[0] >= w[1]) || c.levels.first() == Some(&0) {
        return Err(config_err("levels must be positive and strictly increasing"));
    }
    if c.digits == 0 || c.digits > 52 {
        return Err(config_err("digits must lie in 1..=52"));
    }
    if matches!(c.command, Command::Estimate) && c.horizon == 0 {
        return Err(config_err("estimate needs a positive horizon"));
    }
    let exact_level = match c.command {
        Command::Verify | Command::Kernel => Some(c.budget),
        Command::Lift => Some(c.depth.max(c.k) + 1),
        _ => None,
    };
    if let Some(level) = exact_level {
        if level > MAX_EXACT_BUDGET {
            return Err(CliError::Budget(format!("exact level {level} exceeds the limit {MAX_EXACT_BUDGET}")));
        }
        for &d in &c.dims {
            let states: u128 = (0..=c.budget).map(|n| Composition::count(d, n)).sum();
            if states > MAX_EXACT_STATES {
                return Err(CliError::Budget(format!(
                    "d = {d} at budget {} enumerates {states} states, limit {MAX_EXACT_STATES}",
                    c.budget
                )));
            }
        }
    }
    let steps = c.horizon as u128 * c.replicates.max(1) as u128;
    if steps > MAX_SAMPLE_STEPS {
        return Err(CliError::Budget(format!("{steps} sampled steps exceed the limit {MAX_SAMPLE_STEPS}")));
    }
    Ok(())
}

fn value_echo(v: &ProbValue) -> Value {
    match v {
        ProbValue::Exact(_) => Value::String(v.to_string()),
        ProbValue::Float(x) => json!(x),
    }
}

fn point_echo(p: &SimplexPoint) -> Value {
    Value::Array(p.coords().iter().map(value_echo).collect())
}

impl RunConfig {
    /// Every parameter that influences the output, defaults included.
    /// The worker count and output path are left out on purpose: they never change results.
    pub fn echo(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command.as_str()));
        m.insert("mode".into(), json!(if self.mode == Mode::Exact { "exact" } else { "float" }));
        m.insert("seed".into(), json!(self.seed));
        match self.command {
            Command::Verify => {
                m.insert("d".into(), json!(self.dims));
                m.insert("budget".into(), json!(self.budget));
                m.insert("alphas".into(), Value::Array(self.alphas.iter().map(point_echo).collect()));
                m.insert("sources".into(), Value::Array(self.sources.iter().map(SourceSpec::echo).collect()));
            }
            Command::Kernel => {
                m.insert("d".into(), json!(self.dims));
                m.insert("budget".into(), json!(self.budget));
                m.insert("alphas".into(), Value::Array(self.alphas.iter().map(point_echo).collect()));
                m.insert("levels".into(), json!(self.levels));
                m.insert("tolerance".into(), json!(crate::suites::KERNEL_LIMIT_TOL));
                let probes = match &self.probes {
                    Some(p) => json!(p.iter().map(|x| x.parts().to_vec()).collect::<Vec<_>>()),
                    None => json!("all states of level at most 3"),
                };
                m.insert("probes".into(), probes);
            }
            Command::Simulate => {
                m.insert("alpha".into(), point_echo(&self.alphas[0]));
                m.insert("horizon".into(), json!(self.horizon));
                m.insert("replicates".into(), json!(self.replicates));
            }
            Command::Estimate => {
                m.insert("source".into(), self.sources[0].echo());
                m.insert("horizon".into(), json!(self.horizon));
                m.insert("replicates".into(), json!(self.replicates));
                m.insert("k".into(), json!(self.k));
                m.insert(
                    "thresholds".into(),
                    json!({
                        "cluster_distance": crate::suites::CLUSTER_TOL,
                        "cluster_fraction": crate::suites::CLUSTER_FRACTION,
                        "weight": crate::suites::WEIGHT_TOL,
                        "ks": crate::suites::KS_LIMIT,
                    }),
                );
            }
            Command::Lift => {
                m.insert("depth".into(), json!(self.depth));
                m.insert("digits".into(), json!(self.digits));
                m.insert("grid".into(), json!(self.grid));
                m.insert("k".into(), json!(self.k));
            }
        }
        m.insert("format".into(), json!(if self.format == Format::Json { "json" } else { "csv" }));
        Value::Object(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_verify_config() {
        let c = parse_config(r#"{"command":"verify","d":2,"budget":6,"seed":0}"#).unwrap();
        assert_eq!(c.command, Command::Verify);
        assert_eq!(c.dims, vec![2]);
        assert_eq!(c.budget, 6);
        assert_eq!(c.alphas, default_verify_alphas(2));
        assert_eq!(c.echo()["seed"], json!(0));
    }

    #[test]
    fn seed_is_written_out_when_omitted() {
        let c = parse_config(r#"{"command":"lift"}"#).unwrap();
        assert_eq!(c.echo()["seed"], json!(0));
    }

    #[test]
    fn rational_alpha_stays_exact() {
        let c = parse_config(r#"{"command":"simulate","alpha":["7/10","3/10"]}"#).unwrap();
        assert!(c.alphas[0].is_exact());
        assert_eq!(c.alphas[0].coord(0), &ProbValue::ratio(7, 10));
        assert_eq!(c.echo()["alpha"], json!(["7/10", "3/10"]));
    }

    #[test]
    fn rejections() {
        let bad = [
            (r#"{"command":"verify","colour":1}"#, "unknown field"),
            (r#"{"command":"simulate","alpha":["7/0","3/10"]}"#, "malformed rational"),
            (r#"{"command":"simulate","alpha":["x","3/10"]}"#, "malformed rational"),
            (r#"{"command":"simulate","mode":"float","alpha":[0.7,0.4]}"#, "sum"),
            (r#"{"command":"simulate","alpha":["7/10","2/5"]}"#, "sum"),
            (r#"{"command":"simulate","alpha":[0.7,0.3]}"#, "mode"),
            (r#"{"command":"estimate","source":{"kind":"polya","counts":[1,1],"extra":2}}"#, "unknown field"),
            (r#"{"command":"estimate","source":{"kind":"mixture"}}"#, "atoms"),
            (r#"{"d":2}"#, "no command"),
            (r#"{"command":"kernel","levels":[10,5]}"#, "increasing"),
        ];
        for (text, needle) in bad {
            match parse_config(text) {
                Err(CliError::Config(msg)) => assert!(msg.contains(needle), "{text}: {msg}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn float_mode_accepts_numbers() {
        let c = parse_config(r#"{"command":"simulate","mode":"float","alpha":[0.25,0.75]}"#).unwrap();
        assert!(!c.alphas[0].is_exact());
        assert_eq!(c.echo()["alpha"], json!([0.25, 0.75]));
    }

    #[test]
    fn budgets_are_capped() {
        assert!(matches!(parse_config(r#"{"command":"verify","budget":13}"#), Err(CliError::Budget(_))));
        assert!(matches!(parse_config(r#"{"command":"verify","d":6,"budget":10}"#), Err(CliError::Budget(_))));
        assert!(matches!(
            parse_config(r#"{"command":"estimate","horizon":1000000,"replicates":100000}"#),
            Err(CliError::Budget(_))
        ));
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides { seed: Some(9), workers: Some(3), format: Some(Format::Csv), ..Default::default() };
        let c = parse_config_with(r#"{"command":"lift","seed":1,"format":"json"}"#, &ov).unwrap();
        assert_eq!((c.seed, c.workers, c.format), (9, 3, Format::Csv));
        let ov = Overrides { command: Some(Command::Kernel), ..Default::default() };
        assert!(parse_config_with(r#"{"command":"lift"}"#, &ov).is_err());
        assert_eq!(parse_config_with(r#"{}"#, &ov).unwrap().command, Command::Kernel);
    }

    #[test]
    fn workers_are_not_echoed() {
        let a = parse_config(r#"{"command":"lift","workers":1}"#).unwrap();
        let b = parse_config(r#"{"command":"lift","workers":8}"#).unwrap();
        assert_eq!(a.echo(), b.echo());
    }
}
