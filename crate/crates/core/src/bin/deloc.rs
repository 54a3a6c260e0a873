use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use deloc::experiments::{run, Command, ExperimentConfig, GraphSource};
use deloc::WindowSelector;

#[derive(Parser)]
#[command(name = "deloc", version, about = "Delocalization experiments on graph eigenvectors")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Random eigenbases of a vertex-transitive graph
    Transitive(Flags),
    /// Random eigenbases of a product graph (--graph x --base)
    Product(Flags),
    /// Gaussian statistics of eigenvector entries
    Gaussian(Flags),
    /// Quantum-ergodicity deviations
    Qe(Flags),
    /// Lq exceedance of random approximate eigenvectors
    Deloc(Flags),
    /// Random lifts: local weak limit, local law, projector estimate
    Lift(Flags),
    /// Eigenvalues and projector diagonal of one window
    Spectrum(Flags),
    /// Re-runs the config stored in a config or report JSON file
    Replay {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Flags {
    /// cycle:N, path:N, complete:N, star:K, hypercube:K, cayley:PATH, file:PATH or gaussian:N
    #[arg(long)]
    graph: Option<GraphSource>,
    #[arg(long)]
    base: Option<GraphSource>,
    /// Comma-separated sizes
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// a:b, idx:k, idx:i..j or idx:i,j,...
    #[arg(long)]
    window: Option<WindowSelector>,
    #[arg(long, default_value_t = 4.0)]
    q: f64,
    #[arg(long, default_value_t = 2.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// cartesian, tensor, strong, lexicographic or bits:K
    #[arg(long)]
    rule: Option<String>,
    #[arg(long, default_value_t = 4.0)]
    t: f64,
    #[arg(long, default_value_t = 2)]
    observables: usize,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Flags {
    fn config(self, command: Command) -> ExperimentConfig {
        ExperimentConfig {
            command,
            graph: self.graph,
            base: self.base,
            n: self.n,
            window: self.window,
            q: self.q,
            lambda: self.lambda,
            trials: self.trials,
            seed: self.seed,
            rule: self.rule,
            t: self.t,
            observables: self.observables,
            repeats: self.repeats,
            out: self.out,
        }
    }
}

fn main() -> ExitCode {
    deloc::rng::configure_workers();
    let cli = Cli::parse();
    let cfg = match cli.command {
        Cmd::Transitive(f) => f.config(Command::Transitive),
        Cmd::Product(f) => f.config(Command::Product),
        Cmd::Gaussian(f) => f.config(Command::Gaussian),
        Cmd::Qe(f) => f.config(Command::Qe),
        Cmd::Deloc(f) => f.config(Command::Deloc),
        Cmd::Lift(f) => f.config(Command::Lift),
        Cmd::Spectrum(f) => f.config(Command::Spectrum),
        Cmd::Replay { file, out } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            match ExperimentConfig::from_json(&text) {
                Ok(mut cfg) => {
                    if out.is_some() {
                        cfg.out = out;
                    }
                    cfg
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let written = match &cfg.out {
        Some(path) => report.write(path),
        None => report.to_json().map(|s| println!("{s}")),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    for c in &report.claims {
        eprintln!("{} {}: {} vs {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.lhs, c.rhs);
    }
    if report.hard_failures().is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
