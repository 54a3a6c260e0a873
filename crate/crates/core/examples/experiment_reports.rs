//! Running an experiment programmatically and reading its claims.
//!
//! Reports are the JSON written by the `deloc` binary; pass a directory as
//! the first argument to write the report and its CSV sidecars there.

use deloc::experiments::{run as run_experiment, Command, ExperimentConfig, GraphSource};

pub fn run() -> deloc::Result<()> {
    let mut cfg = ExperimentConfig::new(Command::Deloc).with_graph(GraphSource::Gaussian(60));
    cfg.trials = 200;
    cfg.repeats = 2;
    cfg.window = Some("idx:20..40".parse()?);
    let report = run_experiment(&cfg)?;
    for c in &report.claims {
        println!("{:<28} {:>10.4} vs {:>10.4} {}", c.name, c.lhs, c.rhs, if c.pass { "ok" } else { "FAILED" });
    }
    if let Some(dir) = std::env::args().nth(1) {
        report.write(&std::path::Path::new(&dir).join("deloc.json"))?;
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> deloc::Result<()> {
    run()
}
