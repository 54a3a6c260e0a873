use serde::Serialize;
use serde_json::json;

use super::{csv_string, Claim, ExperimentConfig, Report, Sidecar};
use crate::ergodic::{dbl_lower_bound, default_grid, empirical_measure, gaussian_stat_bound, qe_deviation, qe_threshold, w1_to_gaussian};
use crate::error::{invalid, Result};
use crate::graph::{complete_graph, product_graph, Graph};
use crate::rng::run_trials;
use crate::sampling::{calibrated_constants, median, random_eigenbasis, wilson_interval, WindowBasis, Z99};
use crate::spectral::{decompose_graph, lq_norm, projector_diagonal, EigenDecomposition, WindowSelector};

/// Projector diagonal of every eigenspace, in group order.
fn group_diagonals(d: &EigenDecomposition) -> Result<Vec<Vec<f64>>> {
    d.groups()
        .iter()
        .map(|g| Ok(projector_diagonal(d, &WindowSelector::Group(g.start))?.proj_diag))
        .collect()
}

/// `max_x |Pi_E(x) - m_E / n|` over eigenspaces `E`.
fn constancy_defect(d: &EigenDecomposition, diags: &[Vec<f64>]) -> f64 {
    let n = d.dim() as f64;
    d.groups()
        .iter()
        .zip(diags)
        .flat_map(|(g, p)| p.iter().map(move |x| (x - g.len() as f64 / n).abs()))
        .fold(0.0, f64::max)
}

struct BasisStats {
    linf: f64,
    lq: f64,
    /// `max_{u, x} u(x)^2 - Pi_E(x)`, nonpositive in exact arithmetic.
    cap_violation: f64,
}

fn basis_trials(d: &EigenDecomposition, diags: &[Vec<f64>], q: f64, trials: usize, seed: u64) -> Result<Vec<BasisStats>> {
    run_trials(seed, trials, |_, rng| {
        let b = random_eigenbasis(d, rng)?;
        let mut stats = BasisStats { linf: 0.0, lq: 0.0, cap_violation: f64::NEG_INFINITY };
        for (g, diag) in d.groups().iter().zip(diags) {
            for k in g.clone() {
                let u = b.basis.vector(k);
                stats.linf = stats.linf.max(lq_norm(u, f64::INFINITY));
                stats.lq = stats.lq.max(lq_norm(u, q));
                for (x, p) in u.iter().zip(diag) {
                    stats.cap_violation = stats.cap_violation.max(x * x - p);
                }
            }
        }
        Ok(stats)
    })
    .into_iter()
    .collect()
}

fn frequency_claim(name: &str, hits: usize, trials: usize, bound: f64) -> (Claim, serde_json::Value) {
    let (lo, hi) = wilson_interval(hits, trials, Z99);
    let bound = bound.min(1.0);
    (
        Claim::le(name, lo, bound, false),
        json!({ "exceed": hits, "trials": trials, "frequency": hits as f64 / trials as f64, "wilson_lo": lo, "wilson_hi": hi, "bound": bound }),
    )
}

/// Random-eigenbasis experiment shared by the transitive and product
/// commands. `ell` is the number of vertices of the transitive factor.
fn eigenbasis_experiment(
    cfg: &ExperimentConfig,
    report: &mut Report,
    g: &Graph,
    ell: usize,
    linf_bound: f64,
    lq_bound: f64,
) -> Result<()> {
    let d = decompose_graph(g)?;
    let n = d.dim();
    let diags = group_diagonals(&d)?;
    let defect = constancy_defect(&d, &diags);
    let c = calibrated_constants().c;
    let (lambda, q) = (cfg.lambda, cfg.q);
    let l = ell as f64;
    let linf_threshold = c * lambda * (l.ln() / l).sqrt();
    let lq_threshold = c * lambda * q.sqrt() * l.powf(1.0 / q - 0.5);
    let stats = basis_trials(&d, &diags, q, cfg.trials, cfg.seed)?;
    let linf: Vec<f64> = stats.iter().map(|s| s.linf).collect();
    let lq: Vec<f64> = stats.iter().map(|s| s.lq).collect();
    let cap = stats.iter().map(|s| s.cap_violation).fold(f64::NEG_INFINITY, f64::max);

    // the fibre argument: Pi_E(x) / m_E <= 1 / ell and
    // N^{-q/2} ||Pi_E||_{q/2}^{q/2} <= ell^{1 - q/2}
    let mut fibre = 0.0f64;
    let mut norm_ratio = 0.0f64;
    for (grp, diag) in d.groups().iter().zip(&diags) {
        let m = grp.len() as f64;
        fibre = fibre.max(diag.iter().fold(0.0f64, |a, &p| a.max(p / m)) * l);
        let s: f64 = diag.iter().map(|p| (p / m).max(0.0).powf(q / 2.0)).sum();
        norm_ratio = norm_ratio.max(s / l.powf(1.0 - q / 2.0));
    }

    let linf_hits = linf.iter().filter(|&&x| x > linf_threshold).count();
    let lq_hits = lq.iter().filter(|&&x| x > lq_threshold).count();
    let (c_inf, r_inf) = frequency_claim("linf_exceedance", linf_hits, cfg.trials, linf_bound);
    let (c_q, r_q) = frequency_claim("lq_exceedance", lq_hits, cfg.trials, lq_bound);
    report.claims.push(Claim::le("pointwise_cap", cap, 1e-9, true));
    report.claims.push(Claim::le("fibre_bound", fibre, 1.0 + 1e-9, true));
    report.claims.push(Claim::le("fibre_norm_bound", norm_ratio, 1.0 + 1e-9, true));
    report.claims.push(c_inf);
    report.claims.push(c_q);
    if ell == n && defect > 1e-8 {
        report.warnings.push(format!(
            "projector diagonal is not constant (defect {defect:e}); the graph is probably not vertex-transitive"
        ));
    }
    report.results = json!({
        "n": n,
        "ell": ell,
        "multiplicities": d.multiplicities(),
        "constancy_defect": defect,
        "linf_threshold": linf_threshold,
        "lq_threshold": lq_threshold,
        "max_linf": linf.iter().copied().fold(0.0, f64::max),
        "median_linf": median(&linf),
        "max_lq": lq.iter().copied().fold(0.0, f64::max),
        "median_lq": median(&lq),
        "linf": r_inf,
        "lq": r_q,
    });
    Ok(())
}

/// Random eigenbases of a vertex-transitive graph against
/// `||u||_inf <= C Lambda (log n / n)^{1/2}` (failure `n^{2 - log Lambda}`) and
/// `||u||_q <= C Lambda sqrt q n^{1/q - 1/2}` (failure `n Lambda^{-q}`).
pub fn cmd_transitive(cfg: &ExperimentConfig) -> Result<Report> {
    let g = cfg.graph_source()?.graph()?;
    let n = g.vertex_count() as f64;
    let mut report = Report::new(cfg);
    eigenbasis_experiment(cfg, &mut report, &g, g.vertex_count(), n.powf(2.0 - cfg.lambda.ln()), n * cfg.lambda.powf(-cfg.q))?;
    Ok(report)
}

/// Same experiment on `G x H` with bounds in terms of `ell = |V(G)|`:
/// failure `n ell^{1 - log Lambda}` and `n Lambda^{-q}`.
pub fn cmd_product(cfg: &ExperimentConfig) -> Result<Report> {
    let g = cfg.graph_source()?.graph()?;
    let h = cfg.base.as_ref().ok_or_else(|| invalid("product needs --base for the second factor"))?.graph()?;
    let p = product_graph(&g, &h, cfg.product_rule()?)?;
    let (ell, n) = (g.vertex_count() as f64, p.vertex_count() as f64);
    let mut report = Report::new(cfg);
    eigenbasis_experiment(cfg, &mut report, &p, g.vertex_count(), n * ell.powf(1.0 - cfg.lambda.ln()), n * cfg.lambda.powf(-cfg.q))?;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
struct GaussianRow {
    n: usize,
    m: usize,
    mean_w1: f64,
    mean_dbl: f64,
    max_dbl: f64,
    eps_min: f64,
    bound_at_eps1: Option<f64>,
}

fn gaussian_row(g: &Graph, window: Option<&WindowSelector>, trials: usize, seed: u64) -> Result<(GaussianRow, f64)> {
    let d = decompose_graph(g)?;
    let n = d.dim();
    let sel = match window {
        Some(w) => w.clone(),
        None => {
            let big = d.groups().iter().max_by_key(|r| (r.len(), std::cmp::Reverse(r.start))).expect("nonempty spectrum");
            WindowSelector::Group(big.start)
        }
    };
    let basis = WindowBasis::new(&d, &projector_diagonal(&d, &sel)?)?;
    let m = basis.count();
    let grid = default_grid();
    let scale = (n as f64).sqrt();
    let samples = run_trials(seed, trials, |_, rng| {
        let u: Vec<f64> = basis.sample(rng).u.iter().map(|x| x * scale).collect();
        let mu = empirical_measure(&u)?;
        Ok((w1_to_gaussian(&mu), dbl_lower_bound(&mu, &grid)?))
    })
    .into_iter()
    .collect::<Result<Vec<(f64, f64)>>>()?;
    let t = samples.len() as f64;
    let gap = samples.iter().map(|(w, b)| b - w).fold(f64::NEG_INFINITY, f64::max);
    let mm = (m.max(2) - 1) as f64;
    Ok((
        GaussianRow {
            n,
            m,
            mean_w1: samples.iter().map(|s| s.0).sum::<f64>() / t,
            mean_dbl: samples.iter().map(|s| s.1).sum::<f64>() / t,
            max_dbl: samples.iter().map(|s| s.1).fold(0.0, f64::max),
            eps_min: (192.0 * std::f64::consts::PI / mm.sqrt()).powf(0.4).max(4.0 / mm),
            bound_at_eps1: gaussian_stat_bound(m, 1.0),
        },
        gap,
    ))
}

/// Entry statistics of random vectors in one eigenspace: the empirical
/// measure of `sqrt(n) u(x)` against the standard Gaussian. Without
/// `--graph`, runs the complete graphs `K_n` for `n` in `--n` (default
/// 10, 50, 200), whose nontrivial eigenspace has dimension `n - 1`.
pub fn cmd_gaussian(cfg: &ExperimentConfig) -> Result<Report> {
    let mut report = Report::new(cfg);
    let graphs: Vec<Graph> = match &cfg.graph {
        Some(src) => vec![src.graph()?],
        None => {
            let ns = if cfg.n.is_empty() { vec![10, 50, 200] } else { cfg.n.clone() };
            ns.iter().map(|&n| complete_graph(n)).collect::<Result<_>>()?
        }
    };
    let mut rows = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        let seed = crate::rng::derive_seed(cfg.seed, i as u64);
        report.seeds.push(seed);
        let (row, gap) = gaussian_row(g, cfg.window.as_ref(), cfg.trials, seed)?;
        report.claims.push(Claim::le(format!("dbl_below_w1[m={}]", row.m), gap, 1e-12, true));
        rows.push(row);
    }
    if rows.len() >= 2 {
        let decreasing = rows.windows(2).all(|w| w[1].mean_w1 < w[0].mean_w1);
        let (first, last) = (rows[0].mean_w1, rows[rows.len() - 1].mean_w1);
        report.claims.push(Claim { name: "w1_trend_decreasing".into(), lhs: last, rhs: first, pass: decreasing, hard: false });
        report.claims.push(Claim::le("w1_at_largest_m", last, 0.1, false));
    }
    report.sidecars.push(Sidecar { suffix: "gaussian.csv".into(), contents: csv_string(&rows)? });
    report.results = json!({ "rows": rows });
    Ok(report)
}

/// Centred indicators `1_A - |A|/n` of `blocks` consecutive vertex blocks.
pub fn partition_observables(n: usize, blocks: usize) -> Result<Vec<Vec<f64>>> {
    if blocks == 0 || blocks > n {
        return Err(invalid("need 1 <= blocks <= n"));
    }
    Ok((0..blocks)
        .map(|b| {
            let (lo, hi) = (b * n / blocks, (b + 1) * n / blocks);
            let frac = (hi - lo) as f64 / n as f64;
            (0..n).map(|x| f64::from(u8::from((lo..hi).contains(&x))) - frac).collect()
        })
        .collect())
}

/// Quantum-ergodicity deviations `|sum_x f u^2 - mean f|` of random
/// eigenbases against `t ||f||_2 / sqrt n`, for partition observables.
pub fn cmd_qe(cfg: &ExperimentConfig) -> Result<Report> {
    let g = cfg.graph_source()?.graph()?;
    let d = decompose_graph(&g)?;
    let n = d.dim();
    let fs = partition_observables(n, cfg.observables)?;
    let t = cfg.t;
    let thresholds: Vec<f64> = fs.iter().map(|f| qe_threshold(f, t)).collect();
    let groups = d.groups().to_vec();
    let trivial = if g.is_connected() { groups.len() - 1 } else { usize::MAX };
    let mults: Vec<usize> = groups.iter().enumerate().filter(|&(i, _)| i != trivial).map(|(_, r)| r.len()).collect();
    let (big, big_m) = groups
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != trivial)
        .map(|(i, r)| (i, r.len()))
        .max_by_key(|&(i, m)| (m, std::cmp::Reverse(i)))
        .ok_or_else(|| invalid("no nontrivial eigenspace"))?;
    let diags = group_diagonals(&d)?;

    struct Trial {
        worst: f64,
        first: f64,
        parseval: f64,
    }
    let trials = run_trials(cfg.seed, cfg.trials, |_, rng| {
        let b = random_eigenbasis(&d, rng)?;
        let mut out = Trial { worst: 0.0, first: 0.0, parseval: 0.0 };
        for (gi, (r, diag)) in groups.iter().zip(&diags).enumerate() {
            for (f, thr) in fs.iter().zip(&thresholds) {
                let mut total = 0.0;
                for k in r.clone() {
                    let u = b.basis.vector(k);
                    let ratio = qe_deviation(u, f)? / thr;
                    out.worst = out.worst.max(ratio);
                    if gi == big && k == r.start {
                        out.first = out.first.max(ratio);
                    }
                    total += u.iter().zip(f).map(|(x, y)| y * x * x).sum::<f64>();
                }
                let exact: f64 = diag.iter().zip(f).map(|(p, y)| p * y).sum();
                out.parseval = out.parseval.max((total - exact).abs());
            }
        }
        Ok(out)
    })
    .into_iter()
    .collect::<Result<Vec<Trial>>>()?;

    let basis_bound = fs.len() as f64 * mults.iter().map(|&m| m as f64 * crate::ergodic::qe_vector_bound(m, t)).sum::<f64>();
    let vector_bound = fs.len() as f64 * crate::ergodic::qe_vector_bound(big_m, t);
    let basis_fail = trials.iter().filter(|x| x.worst > 1.0).count();
    let vector_fail = trials.iter().filter(|x| x.first > 1.0).count();
    let mut report = Report::new(cfg);
    let (c1, r1) = frequency_claim("basis_failure", basis_fail, cfg.trials, basis_bound);
    let (c2, r2) = frequency_claim("vector_failure", vector_fail, cfg.trials, vector_bound);
    let parseval = trials.iter().map(|x| x.parseval).fold(0.0, f64::max);
    report.claims.push(Claim::le("projector_identity", parseval, 1e-9, true));
    report.claims.push(c1);
    report.claims.push(c2);
    report.results = json!({
        "n": n,
        "t": t,
        "observables": fs.len(),
        "multiplicities": mults,
        "largest_eigenspace": big_m,
        "max_ratio": trials.iter().map(|x| x.worst).fold(0.0, f64::max),
        "basis": r1,
        "vector": r2,
    });
    Ok(report)
}
