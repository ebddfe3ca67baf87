//! Run configuration: JSON file plus command-line overrides.

use std::fmt;
use std::path::PathBuf;

use editwalk_core::hostgraph::HostSpec;
use serde::Deserialize;
use serde_json::Value;

/// A validation failure, located at a line of the config file when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Double,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Rational => "rational",
            Mode::Double => "double",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Record {
    Hex,
    Edges,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Simple,
    Moran,
    Intersection,
    Custom,
}

/// A number given either as a JSON number or as a string such as `"1/4"`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Number(f64),
    Text(String),
}

impl Num {
    /// Decimal text that parses exactly in rational mode.
    pub fn text(&self) -> String {
        match self {
            Num::Number(x) => format!("{x}"),
            Num::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(Num),
    Many(Vec<Num>),
}

/// An edge set: `"empty"`, `"full"`, a `0x` hex mask, or a list of edge indices.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Indices(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimpleParams {
    pub p: Option<OneOrMany>,
    /// Expected degrees for a Chung-Lu law.
    pub degrees: Option<Vec<Num>>,
    /// Two-block law: block membership of each vertex and within/between probabilities.
    pub blocks: Option<BlockParams>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockParams {
    pub first: Vec<bool>,
    pub p: Num,
    pub q: Num,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntersectionParams {
    pub n: usize,
    #[serde(rename = "N")]
    pub attributes: usize,
    pub mu: Vec<Num>,
    #[serde(default)]
    pub lazy: bool,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomEdit {
    pub edit: String,
    pub weight: Num,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomParams {
    pub edits: Vec<CustomEdit>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Simple(SimpleParams),
    Moran,
    Intersection(IntersectionParams),
    Custom(CustomParams),
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Simple(_) => ModelKind::Simple,
            ModelSpec::Moran => ModelKind::Moran,
            ModelSpec::Intersection(_) => ModelKind::Intersection,
            ModelSpec::Custom(_) => ModelKind::Custom,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    host: Option<HostSpec>,
    model: Option<ModelKind>,
    #[serde(default)]
    params: Value,
    #[serde(rename = "T")]
    steps: Option<u64>,
    seed: Option<u64>,
    thin: Option<u64>,
    chains: Option<u64>,
    initial: Option<StateSpec>,
    c: Option<OneOrMany>,
    t_max: Option<usize>,
    pairs: Option<Vec<[StateSpec; 2]>>,
    record: Option<Record>,
    mode: Option<Mode>,
    out: Option<PathBuf>,
    cap_states: Option<usize>,
    format: Option<Format>,
}

/// Flags that override config values.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub mode: Option<Mode>,
    pub cap_states: Option<usize>,
    pub format: Option<Format>,
    pub override_caps: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub host: Option<HostSpec>,
    pub model: ModelSpec,
    pub steps: u64,
    pub seed: u64,
    pub thin: u64,
    pub chains: u64,
    pub initial: Option<StateSpec>,
    pub cs: Vec<f64>,
    pub t_max: Option<usize>,
    pub pairs: Vec<[StateSpec; 2]>,
    pub record: Record,
    pub mode: Mode,
    pub out: PathBuf,
    pub cap: usize,
    pub format: Option<Format>,
}

/// Line of the top-level key `key` in the source text.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let mut depth = 0usize;
    let mut line = 1;
    let mut chars = text.chars().peekable();
    while let Some(ch) = chars.next() {
        match ch {
            '\n' => line += 1,
            '{' | '[' => depth += 1,
            '}' | ']' => depth = depth.saturating_sub(1),
            '"' => {
                let start = line;
                let mut s = String::new();
                while let Some(c) = chars.next() {
                    match c {
                        '\\' => {
                            chars.next();
                        }
                        '"' => break,
                        '\n' => line += 1,
                        c => s.push(c),
                    }
                }
                if depth == 1 && s == key {
                    while chars.peek().is_some_and(|c| c.is_whitespace() && *c != '\n') {
                        chars.next();
                    }
                    if chars.peek() == Some(&':') {
                        return Some(start);
                    }
                }
            }
            _ => {}
        }
    }
    None
}

fn at(text: &str, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { line: line_of(text, key), message: message.into() }
}

impl RunConfig {
    pub fn parse(text: &str, flags: &Overrides) -> Result<Self, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError {
            line: Some(e.line()),
            message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
        })?;

        let kind = raw.model.ok_or_else(|| ConfigError { line: None, message: "missing field `model`".into() })?;
        let params = if raw.params.is_null() { Value::Object(Default::default()) } else { raw.params };
        let bad_params = |e: serde_json::Error| at(text, "params", format!("params for {kind:?} model: {e}"));
        let model = match kind {
            ModelKind::Simple => {
                let p: SimpleParams = serde_json::from_value(params).map_err(bad_params)?;
                let given = [p.p.is_some(), p.degrees.is_some(), p.blocks.is_some()].iter().filter(|&&b| b).count();
                if given != 1 {
                    return Err(at(text, "params", "simple model needs exactly one of `p`, `degrees`, `blocks`"));
                }
                ModelSpec::Simple(p)
            }
            ModelKind::Moran => {
                if params.as_object().is_some_and(|o| !o.is_empty()) {
                    return Err(at(text, "params", "moran model takes no params"));
                }
                ModelSpec::Moran
            }
            ModelKind::Intersection => ModelSpec::Intersection(serde_json::from_value(params).map_err(bad_params)?),
            ModelKind::Custom => ModelSpec::Custom(serde_json::from_value(params).map_err(bad_params)?),
        };
        match (&model, &raw.host) {
            (ModelSpec::Intersection(_), Some(_)) => {
                return Err(at(text, "host", "the intersection model builds its own host K_{n,N}; remove `host`"));
            }
            (ModelSpec::Intersection(_), None) => {}
            (_, None) => return Err(ConfigError { line: None, message: "missing field `host`".into() }),
            _ => {}
        }

        let thin = raw.thin.unwrap_or(1);
        if thin == 0 {
            return Err(at(text, "thin", "`thin` must be at least 1"));
        }
        let chains = raw.chains.unwrap_or(1);
        if chains == 0 {
            return Err(at(text, "chains", "`chains` must be at least 1"));
        }
        let cs: Vec<f64> = match raw.c {
            None => vec![1.0],
            Some(OneOrMany::One(c)) => vec![parse_f64(&c).map_err(|m| at(text, "c", m))?],
            Some(OneOrMany::Many(cs)) => cs.iter().map(parse_f64).collect::<Result<_, _>>().map_err(|m| at(text, "c", m))?,
        };
        if cs.is_empty() || cs.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(at(text, "c", "`c` values must be positive"));
        }

        let default_cap = editwalk_core::spectral::DEFAULT_STATE_CAP;
        let cap = flags.cap_states.or(raw.cap_states).unwrap_or(default_cap);
        if cap == 0 {
            return Err(ConfigError { line: line_of(text, "cap_states"), message: "cap must be positive".into() });
        }
        if cap > default_cap && !flags.override_caps {
            return Err(ConfigError {
                line: if flags.cap_states.is_some() { None } else { line_of(text, "cap_states") },
                message: format!("cap {cap} is above the default {default_cap}; pass --override-caps to allow it"),
            });
        }

        Ok(RunConfig {
            host: raw.host,
            model,
            steps: raw.steps.unwrap_or(0),
            seed: flags.seed.or(raw.seed).unwrap_or(0),
            thin,
            chains,
            initial: raw.initial,
            cs,
            t_max: raw.t_max,
            pairs: raw.pairs.unwrap_or_default(),
            record: raw.record.unwrap_or(Record::Hex),
            mode: flags.mode.or(raw.mode).unwrap_or(Mode::Double),
            out: flags.out.clone().or(raw.out).unwrap_or_else(|| PathBuf::from(".")),
            cap,
            format: flags.format.or(raw.format),
        })
    }
}

fn parse_f64(n: &Num) -> Result<f64, String> {
    use editwalk_core::Scalar;
    f64::parse(&n.text()).map_err(|e| e.to_string())
}
