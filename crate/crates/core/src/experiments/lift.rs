use serde::Serialize;
use serde_json::json;

use super::{csv_string, Claim, ExperimentConfig, GraphSource, Report, Sidecar};
use crate::error::{Error, Result};
use crate::graph::{random_lift, Graph, LiftSpec};
use crate::green::{
    green_regularity_region, limit_measure, limit_spectral_measure, local_km_check, projector_estimate_check,
    window_bound_check, write_density_csv, ConeTypeSystem,
};
use crate::local_weak::{ball_distribution, bst_profile, lift_depth, lift_limit_distribution, tv_distance};
use crate::rng::{derive_seed, run_trials};
use crate::sampling::{median, wilson_interval, WindowBasis, Z99};
use crate::spectral::{decompose_graph, lq_norm, projector_diagonal, WindowSelector};

/// Number of lifted vertices whose half-edges do not map bijectively onto
/// the half-edges of the base vertex below, respecting targets.
pub fn covering_defects(lift: &Graph, spec: &LiftSpec) -> usize {
    let base = &spec.base;
    (0..lift.vertex_count())
        .filter(|&v| {
            let u = spec.project(v);
            let mut images: Vec<usize> = lift.half_edges_at(v).iter().map(|&e| e / spec.n).collect();
            images.sort_unstable();
            let mut want = base.half_edges_at(u).to_vec();
            want.sort_unstable();
            images != want
                || lift
                    .half_edges_at(v)
                    .iter()
                    .any(|&e| spec.project(lift.target(e)) != base.target(e / spec.n))
        })
        .count()
}

fn check_base(base: &Graph) -> Result<()> {
    if !base.is_connected() || base.min_degree() < 2 {
        return Err(Error::InvalidGraph("lift base must be connected with minimum degree at least 2".into()));
    }
    if base.max_degree() == 2 {
        return Err(Error::InvalidGraph("lift base must not be a cycle".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
struct LiftRow {
    n: usize,
    lift: usize,
    seed: u64,
    depth: usize,
    tv: f64,
    tv_bound: f64,
    bst: f64,
    km_median: f64,
    window_count: usize,
    projector_lhs: f64,
    c_prime: f64,
    chain_ratio: f64,
    linf_threshold: f64,
    linf_exceed: usize,
    linf_trials: usize,
    linf_bound: f64,
}

/// Random `n`-lifts of a base graph (default `K_4`): local weak convergence
/// at depth `floor(log n / (8 log(D - 1)))`, the local Kesten–McKay law on
/// ten bulk intervals of length 0.3, the projector estimate on `--window`
/// (default `[-0.15, 0.15]`), and the sup-norm exceedance
/// `P(||u||_inf >= Lambda (log n)^2 n^{-1/2}) <= Lambda^{-log n / (2 log log n)}`
/// on a centred window of length `log log n / log n`.
pub fn cmd_lift(cfg: &ExperimentConfig) -> Result<Report> {
    let base = cfg.base.clone().unwrap_or(GraphSource::Complete(4)).graph()?;
    check_base(&base)?;
    let ns = if cfg.n.is_empty() { vec![100] } else { cfg.n.clone() };
    let cs = ConeTypeSystem::new(&base)?;
    let mut report = Report::new(cfg);
    let dmax = base.max_degree();
    let eta = 1e-6;

    let reach = dmax as f64 + 0.5;
    let grid: Vec<f64> = (0..=((2.0 * reach) / 0.02).round() as usize).map(|i| -reach + 0.02 * i as f64).collect();
    let density = limit_spectral_measure(&cs, &grid, eta)?;
    let mut csv = Vec::new();
    write_density_csv(&density, &mut csv)?;
    report.sidecars.push(Sidecar { suffix: "density.csv".into(), contents: String::from_utf8(csv).expect("utf8") });
    let region = green_regularity_region(&cs, 0.01, 100.0, &grid, eta)?;
    report.sidecars.push(Sidecar { suffix: "region.json".into(), contents: region.to_json()? });

    let km_windows: Vec<(f64, f64)> = (0..10).map(|k| (-1.5 + 0.3 * k as f64, -1.2 + 0.3 * k as f64)).collect();
    let km_limit: Vec<f64> = km_windows.iter().map(|&(a, b)| limit_measure(&cs, a, b, eta)).collect::<Result<_>>()?;
    let proj_window = match &cfg.window {
        Some(WindowSelector::Interval { lo, hi }) => (*lo, *hi),
        Some(_) => return Err(Error::NotAnInterval),
        None => (-0.15, 0.15),
    };
    for &(a, b) in km_windows.iter().chain(std::iter::once(&proj_window)) {
        if !region.contains(a, b) {
            report.warnings.push(format!("window [{a}, {b}] is not inside the certified bulk region"));
        }
    }

    let mut rows = Vec::new();
    let mut defects = 0usize;
    let mut chain = f64::NEG_INFINITY;
    let mut slack = f64::INFINITY;
    let mut km_refusal = None;
    for (ni, &n) in ns.iter().enumerate() {
        let h = lift_depth(n, dmax)?;
        let limit = lift_limit_distribution(&base, h)?;
        for s in 0..cfg.repeats.max(1) {
            let seed = derive_seed(cfg.seed, (ni * 1000 + s) as u64);
            report.seeds.push(seed);
            let (g, spec) = random_lift(&base, n, seed)?;
            defects += covering_defects(&g, &spec);
            let balls = ball_distribution(&g, h)?;
            let tv = tv_distance(&balls, &limit)?;
            if ni == 0 && s == 0 {
                report.sidecars.push(Sidecar { suffix: "balls.json".into(), contents: balls.to_json()? });
            }
            let d = decompose_graph(&g)?;
            let ev = d.values();
            let vn = ev.len() as f64;
            let km: Vec<f64> = km_windows
                .iter()
                .zip(&km_limit)
                .map(|(&(a, b), mu_bar)| {
                    let mu_n = ev.iter().filter(|&&l| a <= l && l <= b).count() as f64 / vn;
                    (mu_n - mu_bar).abs() / (b - a)
                })
                .collect();
            if km_refusal.is_none() {
                km_refusal = Some(match local_km_check(&g, ev, &cs, km_windows[0], h.max(1), eta) {
                    Ok(r) => json!({ "accepted": true, "result": r }),
                    Err(e) => json!({ "accepted": false, "reason": e.to_string() }),
                });
            }
            let est = projector_estimate_check(&d, proj_window, cfg.q, h.max(1), 1.0)?;
            chain = chain.max(est.chain_lhs / est.chain_rhs - 1.0);
            let mid = 0.5 * (proj_window.0 + proj_window.1);
            slack = slack.min(window_bound_check(&d, mid, 0.5 * (proj_window.1 - proj_window.0))?.worst_slack);

            let ln = (n as f64).ln();
            let half = 0.5 * ln.ln() / ln;
            let sw = projector_diagonal(&d, &WindowSelector::interval(-half, half))?;
            let basis = WindowBasis::new(&d, &sw)?;
            let threshold = cfg.lambda * ln * ln / (g.vertex_count() as f64).sqrt();
            let hits = run_trials(derive_seed(seed, 1), cfg.trials, |_, rng| lq_norm(&basis.sample(rng).u, f64::INFINITY) >= threshold)
                .into_iter()
                .filter(|&x| x)
                .count();
            rows.push(LiftRow {
                n,
                lift: s,
                seed,
                depth: h,
                tv,
                tv_bound: 2.0 / (n as f64).sqrt(),
                bst: bst_profile(&g, h.max(1)),
                km_median: median(&km),
                window_count: est.count,
                projector_lhs: est.lhs,
                c_prime: est.c_prime,
                chain_ratio: est.chain_lhs / est.chain_rhs,
                linf_threshold: threshold,
                linf_exceed: hits,
                linf_trials: cfg.trials,
                linf_bound: cfg.lambda.powf(-ln / (2.0 * ln.ln())).min(1.0),
            });
        }
    }

    report.claims.push(Claim::le("covering_map", defects as f64, 0.0, true));
    report.claims.push(Claim::le("resolvent_chain", chain, 1e-9, true));
    report.claims.push(Claim::le("window_bound", -slack, 1e-9, true));
    let mut tv_medians = Vec::new();
    let mut c_medians = Vec::new();
    for &n in &ns {
        let sub: Vec<&LiftRow> = rows.iter().filter(|r| r.n == n).collect();
        let ok = sub.iter().filter(|r| r.tv <= r.tv_bound).count() as f64 / sub.len() as f64;
        report.claims.push(Claim { name: format!("tv_bound[n={n}]"), lhs: ok, rhs: 0.8, pass: ok >= 0.8, hard: false });
        let tvs: Vec<f64> = sub.iter().map(|r| r.tv).collect();
        tv_medians.push(median(&tvs));
        let kms: Vec<f64> = sub.iter().map(|r| r.km_median).collect();
        report.claims.push(Claim::le(format!("local_km[n={n}]"), median(&kms), 0.05, false));
        let cps: Vec<f64> = sub.iter().map(|r| r.c_prime).collect();
        c_medians.push(median(&cps));
        let (hits, trials) = sub.iter().fold((0, 0), |(h, t), r| (h + r.linf_exceed, t + r.linf_trials));
        let (lo, _) = wilson_interval(hits, trials, Z99);
        report.claims.push(Claim::le(format!("linf_exceedance[n={n}]"), lo, sub[0].linf_bound, false));
    }
    if ns.len() >= 2 {
        let decreasing = tv_medians.windows(2).all(|w| w[1] < w[0]);
        report.claims.push(Claim {
            name: "tv_median_decreasing".into(),
            lhs: *tv_medians.last().expect("nonempty"),
            rhs: tv_medians[0],
            pass: decreasing,
            hard: false,
        });
        let (lo, hi) = c_medians.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &c| (a.min(c), b.max(c)));
        report.claims.push(Claim::le("c_prime_stable", hi / lo, 2.0, false));
    }
    report.sidecars.push(Sidecar { suffix: "lifts.csv".into(), contents: csv_string(&rows)? });
    report.results = json!({
        "base_vertices": base.vertex_count(),
        "max_degree": dmax,
        "certified": region.certified,
        "km_windows": km_windows,
        "km_limit": km_limit,
        "local_km_check": km_refusal,
        "tv_medians": tv_medians,
        "c_prime_medians": c_medians,
        "lifts": rows,
    });
    Ok(report)
}
