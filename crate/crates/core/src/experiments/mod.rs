//! End-to-end experiments producing JSON reports.
//!
//! A run is fully described by an [`ExperimentConfig`]; replaying the same
//! config reproduces the report byte for byte. Every report carries a list
//! of [`Claim`]s. Hard claims are exact invariants, soft claims are
//! probabilistic or trend statements.

mod basis;
mod deloc;
mod lift;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{
    cayley_graph, complete_graph, cycle_graph, parse_group_table, path_graph, read_edge_list, star_graph, Graph,
    GroupTable, ProductRule,
};
use crate::rng::DelocRng;
use crate::sampling::{calibrated_constants, gaussian_symmetric, CalibratedConstants};
use crate::spectral::WindowSelector;

pub use basis::{cmd_gaussian, cmd_product, cmd_qe, cmd_transitive};
pub use deloc::{cmd_deloc, cmd_spectrum};
pub use lift::{cmd_lift, covering_defects};

/// Where the matrix of an experiment comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GraphSource {
    Cycle(usize),
    Path(usize),
    Complete(usize),
    Star(usize),
    /// Cayley graph of `(Z/2)^k` with the standard generators.
    Hypercube(usize),
    /// Cayley graph of a group table CSV, weighted by its weight row.
    Cayley(PathBuf),
    /// Edge-list file.
    File(PathBuf),
    /// Symmetric Gaussian matrix of the given order; not a graph.
    Gaussian(usize),
}

impl GraphSource {
    pub fn is_graph(&self) -> bool {
        !matches!(self, GraphSource::Gaussian(_))
    }

    pub fn graph(&self) -> Result<Graph> {
        match self {
            GraphSource::Cycle(n) => cycle_graph(*n),
            GraphSource::Path(n) => path_graph(*n),
            GraphSource::Complete(n) => complete_graph(*n),
            GraphSource::Star(k) => star_graph(*k),
            GraphSource::Hypercube(k) => {
                let gens: Vec<usize> = (0..*k).map(|i| 1 << i).collect();
                cayley_graph(&GroupTable::elementary_abelian_2(*k)?.with_generators(&gens)?)
            }
            GraphSource::Cayley(path) => cayley_graph(&parse_group_table(&std::fs::read_to_string(path)?)?),
            GraphSource::File(path) => read_edge_list(path),
            GraphSource::Gaussian(_) => Err(invalid("gaussian source is a matrix, not a graph")),
        }
    }

    /// Adjacency matrix, or a fresh Gaussian draw.
    pub fn matrix(&self, rng: &mut DelocRng) -> Result<Mat<f64>> {
        match self {
            GraphSource::Gaussian(n) => Ok(gaussian_symmetric(*n, rng)),
            _ => Ok(self.graph()?.adjacency_matrix()),
        }
    }
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSource::Cycle(n) => write!(f, "cycle:{n}"),
            GraphSource::Path(n) => write!(f, "path:{n}"),
            GraphSource::Complete(n) => write!(f, "complete:{n}"),
            GraphSource::Star(k) => write!(f, "star:{k}"),
            GraphSource::Hypercube(k) => write!(f, "hypercube:{k}"),
            GraphSource::Cayley(p) => write!(f, "cayley:{}", p.display()),
            GraphSource::File(p) => write!(f, "file:{}", p.display()),
            GraphSource::Gaussian(n) => write!(f, "gaussian:{n}"),
        }
    }
}

impl FromStr for GraphSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').ok_or_else(|| invalid(format!("graph source {s:?} is not kind:arg")))?;
        let num = || arg.parse::<usize>().map_err(|_| invalid(format!("bad size in {s:?}")));
        Ok(match kind {
            "cycle" => GraphSource::Cycle(num()?),
            "path" => GraphSource::Path(num()?),
            "complete" => GraphSource::Complete(num()?),
            "star" => GraphSource::Star(num()?),
            "hypercube" => GraphSource::Hypercube(num()?),
            "cayley" => GraphSource::Cayley(arg.into()),
            "file" => GraphSource::File(arg.into()),
            "gaussian" => GraphSource::Gaussian(num()?),
            _ => return Err(invalid(format!("unknown graph kind {kind:?}"))),
        })
    }
}

impl TryFrom<String> for GraphSource {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GraphSource> for String {
    fn from(g: GraphSource) -> String {
        g.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Transitive,
    Product,
    Gaussian,
    Qe,
    Deloc,
    Lift,
    Spectrum,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

/// Full description of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub graph: Option<GraphSource>,
    /// Base graph of lifts, or the second factor of a product.
    pub base: Option<GraphSource>,
    /// Lift orders, or matrix orders for the Gaussian trend.
    pub n: Vec<usize>,
    pub window: Option<WindowSelector>,
    pub q: f64,
    pub lambda: f64,
    pub trials: usize,
    pub seed: u64,
    /// Product rule: `cartesian`, `tensor`, `strong`, `lexicographic` or `bits:K`.
    pub rule: Option<String>,
    /// Deviation parameter of the quantum-ergodicity bound.
    pub t: f64,
    /// Number of partition blocks used as observables.
    pub observables: usize,
    /// Independent lifts (or Gaussian matrices) per size.
    pub repeats: usize,
    /// Not part of the serialized config, so reports do not depend on where
    /// they are written.
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            graph: None,
            base: None,
            n: Vec::new(),
            window: None,
            q: 4.0,
            lambda: 2.0,
            trials: 1000,
            seed: 0,
            rule: None,
            t: 4.0,
            observables: 2,
            repeats: 3,
            out: None,
        }
    }

    pub fn with_graph(mut self, g: GraphSource) -> Self {
        self.graph = Some(g);
        self
    }

    pub fn with_base(mut self, g: GraphSource) -> Self {
        self.base = Some(g);
        self
    }

    pub fn graph_source(&self) -> Result<&GraphSource> {
        self.graph.as_ref().ok_or_else(|| invalid(format!("{} needs --graph", self.command)))
    }

    pub fn product_rule(&self) -> Result<ProductRule> {
        parse_rule(self.rule.as_deref().unwrap_or("cartesian"))
    }

    /// Reads a config, or the config embedded in a report.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("config") {
            Some(cfg) => Ok(serde_json::from_value(cfg.clone())?),
            None => Ok(serde_json::from_value(value)?),
        }
    }
}

pub fn parse_rule(s: &str) -> Result<ProductRule> {
    Ok(match s {
        "cartesian" => ProductRule::cartesian(),
        "tensor" => ProductRule::tensor(),
        "strong" => ProductRule::strong(),
        "lexicographic" => ProductRule::lexicographic(),
        other => match other.strip_prefix("bits:").and_then(|b| b.parse::<u8>().ok()) {
            Some(bits) => ProductRule::from_bits(bits),
            None => return Err(invalid(format!("unknown product rule {other:?}"))),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// Exact invariant rather than a probabilistic or trend statement.
    pub hard: bool,
}

impl Claim {
    /// `lhs <= rhs`.
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64, hard: bool) -> Self {
        Claim { name: name.into(), lhs, rhs, pass: lhs <= rhs, hard }
    }
}

/// A CSV or JSON file written next to the report.
#[derive(Clone, Debug, PartialEq)]
pub struct Sidecar {
    pub suffix: String,
    pub contents: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Command,
    pub version: String,
    pub config: ExperimentConfig,
    pub constants: CalibratedConstants,
    pub seeds: Vec<u64>,
    pub claims: Vec<Claim>,
    pub warnings: Vec<String>,
    pub results: serde_json::Value,
    #[serde(skip)]
    pub sidecars: Vec<Sidecar>,
}

impl Report {
    fn new(cfg: &ExperimentConfig) -> Self {
        Report {
            command: cfg.command,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg.clone(),
            constants: calibrated_constants(),
            seeds: vec![cfg.seed],
            claims: Vec::new(),
            warnings: Vec::new(),
            results: serde_json::Value::Null,
            sidecars: Vec::new(),
        }
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }

    pub fn hard_failures(&self) -> Vec<&Claim> {
        self.claims.iter().filter(|c| c.hard && !c.pass).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Path of a sidecar: `report.json` with suffix `density.csv` becomes
    /// `report.density.csv`.
    pub fn sidecar_path(out: &Path, suffix: &str) -> PathBuf {
        let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
        out.with_file_name(format!("{stem}.{suffix}"))
    }

    /// Writes the report and its sidecars.
    pub fn write(&self, out: &Path) -> Result<()> {
        std::fs::write(out, self.to_json()? + "\n")?;
        for s in &self.sidecars {
            std::fs::write(Self::sidecar_path(out, &s.suffix), &s.contents)?;
        }
        Ok(())
    }
}

pub(crate) fn csv_string<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| invalid(e.to_string()))
}

/// Runs the experiment named by `cfg.command`.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    if cfg.trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    match cfg.command {
        Command::Transitive => cmd_transitive(cfg),
        Command::Product => cmd_product(cfg),
        Command::Gaussian => cmd_gaussian(cfg),
        Command::Qe => cmd_qe(cfg),
        Command::Deloc => cmd_deloc(cfg),
        Command::Lift => cmd_lift(cfg),
        Command::Spectrum => cmd_spectrum(cfg),
    }
}
