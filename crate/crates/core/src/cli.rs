//! The `cs-higgs` command line tool.
//!
//! Exit codes: 0 on success, 1 when the library reports a domain error (its
//! variant name goes to standard error), 2 for unreadable files, malformed
//! input and missing arguments.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::degree::{degree_by_enumeration, degree_reduced};
use crate::error::Error;
use crate::graph::{Graph, VertexFunction};
use crate::io::{bifurcation_csv, format_g, to_json, GraphFile, IoError};
use crate::model::{apriori_certificate, map_certificate, AprioriCertificate, GEpsilonParams, ModelParams, SystemMap};
use crate::solver::{multi_start_solve, MultiStartConfig, SolutionSet};
use crate::spectral::spectrum;
use crate::threshold::{lambda_star_bisect, sweep_lambda};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Enumerate solutions inside the a-priori box (JSON).
    Solve,
    /// Signed solution count against the closed-form degree (JSON).
    Degree,
    /// Bracket the critical coupling (CSV of probes, bracket on stderr).
    Threshold,
    /// Solutions over a grid of couplings (CSV).
    Sweep,
    /// The a-priori solution box (JSON).
    Bounds,
    /// Eigenvalues of −Δ (JSON).
    Spectrum,
}

/// Where the source f comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum SourceSpec {
    /// A function stored in the graph file.
    Named(String),
    /// The constant function.
    Constant(f64),
    /// `4π Σ δ_p` over the listed vertices.
    Vortex(Vec<String>),
}

impl FromStr for SourceSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(x) = s.strip_prefix("const:") {
            x.parse().map(SourceSpec::Constant).map_err(|e| format!("bad constant {x:?}: {e}"))
        } else if let Some(list) = s.strip_prefix("vortex:") {
            let ids: Vec<String> = list.split(',').map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect();
            if ids.is_empty() {
                Err("vortex list is empty".into())
            } else {
                Ok(SourceSpec::Vortex(ids))
            }
        } else if s.is_empty() {
            Err("empty source name".into())
        } else {
            Ok(SourceSpec::Named(s.into()))
        }
    }
}

/// One experiment, as given on the command line.
#[derive(Clone, Debug, PartialEq, Parser)]
#[command(name = "cs-higgs", version, about = "Chern-Simons Higgs equation on weighted finite graphs")]
pub struct ExperimentConfig {
    /// Graph file (JSON).
    #[arg(long = "graph")]
    pub graph_path: PathBuf,
    #[arg(long = "cmd", value_enum)]
    pub command: Command,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub p: u32,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Solve the reduced equation G_ε(·, 0) with this ε instead (solve, degree).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// NAME, const:X or vortex:a,b,...
    #[arg(long = "f", allow_hyphen_values = true)]
    pub f_source: Option<SourceSpec>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda_grid: Vec<f64>,
    #[arg(long, default_value_t = 256)]
    pub n_starts: usize,
    /// Bracket width for `threshold`.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Domain(Error),
    Input(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Domain(e) => write!(f, "{}: {e}", e.name()),
            Failure::Input(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Domain(d) => Failure::Domain(d),
            other => Failure::Input(other.to_string()),
        }
    }
}

#[derive(Serialize)]
struct SolveReport<'a> {
    certificate: &'a AprioriCertificate<f64>,
    #[serde(flatten)]
    solutions: &'a SolutionSet<f64>,
}

struct Output {
    body: String,
    note: Option<String>,
}

impl ExperimentConfig {
    fn require_lambda(&self) -> Result<f64, Failure> {
        self.lambda.ok_or_else(|| Failure::Input(format!("--lambda is required for {:?}", self.command)))
    }

    fn source(&self, file: &GraphFile<f64>) -> Result<VertexFunction<f64>, Failure> {
        let g = &file.graph;
        match &self.f_source {
            None => Err(Failure::Input(format!("--f is required for {:?}", self.command))),
            Some(SourceSpec::Constant(c)) => Ok(g.function(vec![*c; g.m()])?),
            Some(SourceSpec::Vortex(ids)) => Ok(g.vortex_source(ids)?),
            Some(SourceSpec::Named(name)) => file
                .functions
                .get(name)
                .cloned()
                .ok_or_else(|| Failure::Input(format!("graph file has no function named {name:?}"))),
        }
    }

    fn multi_start(&self) -> MultiStartConfig<f64> {
        MultiStartConfig {
            n_starts: self.n_starts,
            seed: self.seed,
            ..MultiStartConfig::default()
        }
    }

    fn params(&self, file: &GraphFile<f64>) -> Result<ModelParams<f64>, Failure> {
        Ok(ModelParams::with_sigma(self.require_lambda()?, self.p, self.sigma, self.source(file)?)?)
    }

    fn check(&self) -> Result<(), Failure> {
        if !(0.0..=1.0).contains(&self.sigma) {
            return Err(Failure::Input(format!("--sigma {} is outside [0, 1]", self.sigma)));
        }
        if self.command == Command::Sweep && self.lambda_grid.is_empty() {
            return Err(Failure::Input("--lambda-grid is required for sweep".into()));
        }
        Ok(())
    }

    fn execute(&self) -> Result<Output, Failure> {
        self.check()?;
        let file = GraphFile::<f64>::read(&self.graph_path)?;
        let g: &Graph<f64> = &file.graph;
        let json = |body: String| Output { body: body + "\n", note: None };
        Ok(match self.command {
            Command::Spectrum => json(to_json(&spectrum(g)?)),
            Command::Bounds => json(to_json(&apriori_certificate(g, &self.params(&file)?, None)?)),
            Command::Solve => {
                let map = self.map(&file)?;
                let cert = map_certificate(g, &map)?;
                let set = multi_start_solve(g, &map, &cert, &self.multi_start())?;
                json(to_json(&SolveReport {
                    certificate: &cert,
                    solutions: &set,
                }))
            }
            Command::Degree => {
                let report = match self.map(&file)? {
                    SystemMap::Reduced(gp) => degree_reduced(g, &gp, &self.multi_start())?,
                    SystemMap::Higgs(params) => degree_by_enumeration(g, &params, &self.multi_start())?,
                };
                json(to_json(&report))
            }
            Command::Sweep => {
                let points = sweep_lambda(g, &self.source(&file)?, self.p, &self.lambda_grid, &self.multi_start())?;
                Output {
                    body: bifurcation_csv(&points),
                    note: None,
                }
            }
            Command::Threshold => {
                let f = self.source(&file)?;
                let r = lambda_star_bisect(g, &f, self.p, self.lambda, self.tol, &self.multi_start())?;
                Output {
                    body: bifurcation_csv(&r.probes),
                    note: Some(format!(
                        "bracket [{}, {}] lower_bound {} n_starts {}",
                        format_g(r.bracket_lo, 17),
                        format_g(r.bracket_hi, 17),
                        format_g(r.lower_bound, 17),
                        r.n_starts_used
                    )),
                }
            }
        })
    }

    fn map(&self, file: &GraphFile<f64>) -> Result<SystemMap<f64>, Failure> {
        let params = self.params(file)?;
        Ok(match self.epsilon {
            Some(eps) => SystemMap::Reduced(GEpsilonParams::new(params, eps, 0.0)?),
            None => SystemMap::Higgs(params),
        })
    }
}

/// Runs the experiment, writing the artifact to `--out` or `stdout` and
/// diagnostics to `stderr`. Returns the exit code.
pub fn run_with(cfg: &ExperimentConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let out = match cfg.execute() {
        Ok(out) => out,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return match e {
                Failure::Domain(_) => 1,
                Failure::Input(_) => 2,
            };
        }
    };
    if let Some(note) = &out.note {
        let _ = writeln!(stderr, "{note}");
    }
    let written = match &cfg.output {
        Some(path) => std::fs::write(path, &out.body).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(out.body.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => 0,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
    }
}

/// [`run_with`] on the process streams.
pub fn run(cfg: &ExperimentConfig) -> i32 {
    run_with(cfg, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
