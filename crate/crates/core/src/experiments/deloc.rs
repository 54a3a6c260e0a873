use serde::Serialize;
use serde_json::json;

use super::{csv_string, Claim, ExperimentConfig, GraphSource, Report, Sidecar};
use crate::error::Result;
use crate::rng::{derive_seed, stream_rng};
use crate::sampling::{lq_exceedance_mc, median_and_concentration, wilson_interval, Z99};
use crate::spectral::{decompose, projector_diagonal, projector_norm, SpectralSummary, WindowSelector};

#[derive(Clone, Debug, Serialize)]
struct ExceedanceRow {
    count: usize,
    q: f64,
    lambda: f64,
    threshold: f64,
    exceed: usize,
    trials: usize,
    frequency: f64,
    wilson_lo: f64,
    wilson_hi: f64,
    bound: f64,
}

#[derive(Clone, Debug, Serialize)]
struct DeviationRow {
    count: usize,
    q: f64,
    r: f64,
    median: f64,
    median_bound: f64,
    frequency: f64,
    wilson_lo: f64,
    bound: f64,
}

/// Centred index windows of sizes 10, 50 and 200 (those that fit).
fn default_windows(n: usize) -> Vec<WindowSelector> {
    [10usize, 50, 200]
        .into_iter()
        .filter(|&c| c <= n)
        .map(|c| {
            let lo = (n - c) / 2;
            WindowSelector::Indices((lo..lo + c).collect())
        })
        .collect()
}

/// Exceedance of `||u||_q >= C Lambda sqrt q N^{1/q - 1/2}` for `u` uniform in
/// a spectral window, against `4 exp(-C^2 Lambda^2 q N^{2/q} / 8)`, over
/// Gaussian matrices (`--graph gaussian:N`) or a fixed graph. Also reports
/// the median and the concentration frequencies of `||u||_q`.
pub fn cmd_deloc(cfg: &ExperimentConfig) -> Result<Report> {
    let source = cfg.graph_source()?;
    let matrices = if matches!(source, GraphSource::Gaussian(_)) { cfg.repeats.max(1) } else { 1 };
    let mut report = Report::new(cfg);
    if cfg.lambda < 1.0 {
        report.warnings.push("the exceedance bound is stated for Lambda >= 1".into());
    }
    let mut qs = vec![2.0, cfg.q];
    qs.dedup();
    let per_matrix = cfg.trials.div_ceil(matrices);
    let mut rows: Vec<ExceedanceRow> = Vec::new();
    let mut deviations: Vec<DeviationRow> = Vec::new();
    let mut interp = f64::NEG_INFINITY;
    let mut mass = 0.0f64;
    for i in 0..matrices {
        let seed = derive_seed(cfg.seed, i as u64);
        report.seeds.push(seed);
        let a = source.matrix(&mut stream_rng(seed, 0))?;
        let d = decompose(&a, None)?;
        let windows = match &cfg.window {
            Some(w) => vec![w.clone()],
            None => default_windows(d.dim()),
        };
        for (wi, w) in windows.iter().enumerate() {
            let sw = projector_diagonal(&d, w)?;
            let count = sw.count();
            mass = mass.max((sw.proj_diag.iter().sum::<f64>() - count as f64).abs());
            for (qi, &q) in qs.iter().enumerate() {
                interp = interp.max(projector_norm(&sw, q)? / (count as f64).powf(2.0 / q) - 1.0);
                let stream = derive_seed(seed, 1 + (wi * qs.len() + qi) as u64);
                let e = lq_exceedance_mc(&d, &sw, q, cfg.lambda, per_matrix, stream)?;
                match rows.iter_mut().find(|r| r.count == count && r.q == q) {
                    Some(r) => {
                        r.exceed += e.exceed;
                        r.trials += e.trials;
                    }
                    None => rows.push(ExceedanceRow {
                        count,
                        q,
                        lambda: cfg.lambda,
                        threshold: e.threshold,
                        exceed: e.exceed,
                        trials: e.trials,
                        frequency: 0.0,
                        wilson_lo: 0.0,
                        wilson_hi: 0.0,
                        bound: e.bound,
                    }),
                }
                if i == 0 && q > 2.0 {
                    let conc = median_and_concentration(&d, &sw, q, &[0.05, 0.1, 0.2], per_matrix, derive_seed(stream, 7))?;
                    for r in conc.rows {
                        deviations.push(DeviationRow {
                            count,
                            q,
                            r: r.r,
                            median: conc.median,
                            median_bound: conc.median_bound,
                            frequency: r.frequency,
                            wilson_lo: r.wilson_lo,
                            bound: r.bound,
                        });
                    }
                }
            }
        }
    }
    for r in &mut rows {
        r.frequency = r.exceed as f64 / r.trials as f64;
        (r.wilson_lo, r.wilson_hi) = wilson_interval(r.exceed, r.trials, Z99);
        report.claims.push(Claim::le(format!("exceedance[N={},q={}]", r.count, r.q), r.wilson_lo, r.bound, false));
    }
    for r in &deviations {
        report.claims.push(Claim::le(format!("concentration[N={},q={},r={}]", r.count, r.q, r.r), r.wilson_lo, r.bound, false));
        report.claims.push(Claim::le(format!("median[N={},q={},r={}]", r.count, r.q, r.r), r.median, r.median_bound, false));
    }
    report.claims.push(Claim::le("interpolation_bound", interp, 1e-9, true));
    report.claims.push(Claim::le("projector_trace", mass, 1e-9, true));
    report.sidecars.push(Sidecar { suffix: "exceedance.csv".into(), contents: csv_string(&rows)? });
    report.sidecars.push(Sidecar { suffix: "concentration.csv".into(), contents: csv_string(&deviations)? });
    report.results = json!({ "matrices": matrices, "exceedance": rows, "concentration": deviations });
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
struct EigenRow {
    index: usize,
    value: f64,
    group: usize,
}

/// Eigenvalues with multiplicities, and the projector diagonal of the
/// window if one is given.
pub fn cmd_spectrum(cfg: &ExperimentConfig) -> Result<Report> {
    let source = cfg.graph_source()?;
    let a = source.matrix(&mut stream_rng(cfg.seed, 0))?;
    let d = decompose(&a, None)?;
    let mut report = Report::new(cfg);
    let rows: Vec<EigenRow> = (0..d.dim())
        .map(|k| EigenRow { index: k, value: d.values()[k], group: d.group_of(k).expect("index in range") })
        .collect();
    report.sidecars.push(Sidecar { suffix: "eigenvalues.csv".into(), contents: csv_string(&rows)? });
    let sel = cfg.window.clone().unwrap_or(WindowSelector::Indices((0..d.dim()).collect()));
    let sw = projector_diagonal(&d, &sel)?;
    let mass = (sw.proj_diag.iter().sum::<f64>() - sw.count() as f64).abs();
    report.claims.push(Claim::le("projector_trace", mass, 1e-9, true));
    let cap = sw.proj_diag.iter().fold(f64::NEG_INFINITY, |m, &p| m.max(p - 1.0));
    report.claims.push(Claim::le("projector_diagonal_at_most_one", cap, 1e-9, true));
    let summary = SpectralSummary::new(&d, &sw);
    report.results = json!({
        "n": d.dim(),
        "spectral_radius": d.spectral_radius(),
        "tau": d.tau(),
        "summary": summary,
    });
    Ok(report)
}
