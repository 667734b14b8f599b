//! JSON run configurations.
//!
//! ```json
//! {
//!   "system": { "alphabet_size": 2, "adjacency": [[1, 1], [1, 0]] },
//!   "potentials": {
//!     "phi": { "range": 1, "values": { "0": 1.0, "1": 0.0 } },
//!     "psi": { "range": 1, "constant": 1.0 }
//!   },
//!   "functional": { "kind": "quadratic", "q": [[1.0]], "c": [0.0] },
//!   "command": "induced",
//!   "parameters": { "phi": "phi", "psi": "psi", "T": 20, "q": 1 },
//!   "output": { "csv_path": "out.csv" }
//! }
//! ```

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thermoform::{parse_word, Functional, Matrix, Potential, Sft, Tolerances};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Pressure,
    Induced,
    Nonlinear,
    NonlinearInduced,
    FreezeSweep,
    ZeroTemp,
    MaxRatio,
    Estimate,
    Verify,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Pressure => "pressure",
            Command::Induced => "induced",
            Command::Nonlinear => "nonlinear",
            Command::NonlinearInduced => "nonlinear-induced",
            Command::FreezeSweep => "freeze-sweep",
            Command::ZeroTemp => "zero-temp",
            Command::MaxRatio => "max-ratio",
            Command::Estimate => "estimate",
            Command::Verify => "verify",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    #[serde(default)]
    pub potentials: BTreeMap<String, PotentialConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<FunctionalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub alphabet_size: usize,
    pub adjacency: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    #[serde(default = "one")]
    pub range: usize,
    /// Value of every admissible `range`-word, keyed by the word.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionalConfig {
    Zero {
        dimension: usize,
    },
    Linear {
        c: Vec<f64>,
    },
    /// `F(x) = x^T q x + c . x`
    Quadratic {
        q: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<Vec<f64>>,
        /// Declared convexity; checked against the eigenvalues of `q`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        convex: Option<bool>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![*x],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl BetaGrid {
    /// Grid points; a range includes `stop` when it lands on the grid.
    pub fn points(&self) -> Vec<f64> {
        match self {
            BetaGrid::List(v) => v.clone(),
            BetaGrid::Range { start, stop, step } => {
                if !(*step > 0.0) || !(stop >= start) {
                    return Vec::new();
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| start + step * i as f64).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recoding: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freezing: Option<f64>,
    /// Replaces every tolerance at once, before the specific overrides.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all: Option<f64>,
}

impl ToleranceOverrides {
    pub fn resolve(&self) -> Tolerances {
        let mut t = self.all.map_or_else(Tolerances::default, Tolerances::uniform);
        if let Some(v) = self.identity {
            t.suite.identity = v;
        }
        if let Some(v) = self.slack {
            t.suite.slack = v;
        }
        if let Some(v) = self.permutation {
            t.conjugacy.permutation = v;
        }
        if let Some(v) = self.recoding {
            t.conjugacy.recoding = v;
        }
        if let Some(v) = self.cycle_ratio {
            t.cycle_ratio = v;
        }
        if let Some(v) = self.freezing {
            t.freezing = v;
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    /// Name of the potential in the `phi` role.
    #[serde(default = "default_phi")]
    pub phi: String,
    /// Name of the positive scaling potential.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    /// Potentials forming the vector `Phi` of the nonlinear commands;
    /// defaults to `[phi]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<String>>,
    /// `spectral` or `cylinder` for `pressure`; `direct` or `variational`
    /// for `nonlinear`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<OneOrMany>,
    #[serde(default = "one")]
    pub q: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_grid: Option<BetaGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub heuristic: bool,
    #[serde(default = "default_draws")]
    pub draws: usize,
    #[serde(default = "default_cycle_pairs")]
    pub cycle_pairs: usize,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
}

impl Default for Parameters {
    fn default() -> Self {
        serde_json::from_str("{}").expect("every parameter has a default")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg_path: Option<String>,
}

fn one() -> usize {
    1
}

fn default_phi() -> String {
    "phi".into()
}

fn default_depth() -> usize {
    2
}

fn default_restarts() -> usize {
    20
}

fn default_draws() -> usize {
    20
}

fn default_cycle_pairs() -> usize {
    50
}

/// The shift, potentials and functional a configuration describes.
#[derive(Debug, Clone)]
pub struct Model {
    pub sft: Sft,
    pub potentials: BTreeMap<String, Potential>,
    pub functional: Option<Functional>,
}

impl Model {
    pub fn potential(&self, name: &str, path: &str) -> Result<&Potential, CliError> {
        self.potentials.get(name).ok_or_else(|| CliError::Validation(format!("{path}: no potential named {name:?}")))
    }

    /// The potential in the `psi` role; `psi > 0` is checked at parse time.
    pub fn psi(&self, params: &Parameters) -> Result<&Potential, CliError> {
        let name = params.psi.as_deref().ok_or_else(|| schema("parameters.psi", "this command needs a psi potential"))?;
        self.potential(name, "parameters.psi")
    }
}

pub(crate) fn schema(path: &str, reason: impl Into<String>) -> CliError {
    CliError::Schema { path: path.to_string(), reason: reason.into() }
}

/// Parses and validates a configuration, filling defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(&path, e.into_inner().to_string())
    })?;
    build_model(&config)?;
    Ok(config)
}

/// Pretty JSON that [`parse_config`] reads back to an equal configuration.
pub fn render_config(config: &RunConfig) -> String {
    serde_json::to_string_pretty(config).expect("configurations serialize")
}

pub fn build_model(config: &RunConfig) -> Result<Model, CliError> {
    let sys = &config.system;
    let k = sys.alphabet_size;
    if k == 0 {
        return Err(schema("system.alphabet_size", "must be at least 1"));
    }
    if sys.adjacency.len() != k {
        return Err(schema("system.adjacency", format!("expected {k} rows, got {}", sys.adjacency.len())));
    }
    for (i, row) in sys.adjacency.iter().enumerate() {
        if row.len() != k {
            return Err(schema(&format!("system.adjacency[{i}]"), format!("expected {k} entries, got {}", row.len())));
        }
        if row.iter().any(|&a| a > 1) {
            return Err(schema(&format!("system.adjacency[{i}]"), "entries must be 0 or 1"));
        }
    }
    let sft = Sft::new(k, &sys.adjacency).map_err(|e| CliError::Validation(format!("system: {e}")))?;

    let mut potentials = BTreeMap::new();
    for (name, p) in &config.potentials {
        let path = format!("potentials.{name}");
        let pot = match (&p.values, p.constant) {
            (Some(values), None) => {
                let mut entries = Vec::with_capacity(values.len());
                for (key, &v) in values {
                    let word = parse_word(key, k).map_err(|e| schema(&format!("{path}.values.{key}"), e.to_string()))?;
                    entries.push((word, v));
                }
                Potential::from_table(&sft, p.range, name.clone(), entries)
            }
            (None, Some(c)) => Potential::constant(&sft, c, name.clone()).extend_range(&sft, p.range.max(1)),
            _ => return Err(schema(&path, "give exactly one of \"values\" and \"constant\"")),
        }
        .map_err(|e| CliError::Validation(format!("{path}: {e}")))?;
        potentials.insert(name.clone(), pot);
    }

    let params = &config.parameters;
    let referenced = std::iter::once(("parameters.phi", &params.phi))
        .chain(params.psi.iter().map(|p| ("parameters.psi", p)))
        .chain(params.components.iter().flatten().map(|c| ("parameters.components", c)));
    for (path, name) in referenced {
        let needed = path != "parameters.phi" || command_uses_phi(config.command);
        if needed && !potentials.contains_key(name) {
            return Err(CliError::Validation(format!("{path}: no potential named {name:?}")));
        }
    }
    if let Some(name) = &params.psi {
        let min = potentials[name].min_value();
        if !(min > 0.0) {
            return Err(CliError::Validation(format!(
                "parameters.psi: potential {name:?} must satisfy ψ > 0, found minimum {min}"
            )));
        }
    }

    let functional = config.functional.as_ref().map(build_functional).transpose()?;
    Ok(Model { sft, potentials, functional })
}

fn command_uses_phi(command: Option<Command>) -> bool {
    !matches!(command, Some(Command::Verify))
}

fn build_functional(f: &FunctionalConfig) -> Result<Functional, CliError> {
    let invalid = |e: thermoform::Error| CliError::Validation(format!("functional: {e}"));
    match f {
        FunctionalConfig::Zero { dimension } => Functional::zero(*dimension).map_err(invalid),
        FunctionalConfig::Linear { c } => Functional::linear(c.clone()).map_err(invalid),
        FunctionalConfig::Quadratic { q, c, convex } => {
            let m = Matrix::from_rows(q).map_err(|e| schema("functional.q", e.to_string()))?;
            let c = c.clone().unwrap_or_else(|| vec![0.0; q.len()]);
            let f = Functional::quadratic(m, c).map_err(invalid)?;
            if *convex == Some(true) && !f.is_convex() {
                return Err(CliError::Validation("functional: declared convex but q is not positive semidefinite".into()));
            }
            Ok(f)
        }
    }
}
