use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cover::{cover_green_root, limit_measure, ConeTypeSystem};
use super::finite::{finite_resolvent_diag, resolvent_entry};
use super::ZETA;
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::local_weak::{
    ball_distribution, canonical_code_capped, cover_ball, lift_limit_distribution, rooted_ball, tv_distance,
    DEFAULT_SIZE_CAP,
};
use crate::spectral::{projector_norm, projector_diagonal, EigenDecomposition, WindowSelector};

/// Smallest admissible `Im z = zeta b ceil(log 2h) / (2h)` for the proximity bound.
pub fn admissible_eta(b: f64, h: usize) -> Result<f64> {
    if h == 0 || !(b > 0.0) {
        return Err(invalid("need h >= 1 and b > 0"));
    }
    let h = h as f64;
    Ok(ZETA * b * (2.0 * h).ln().ceil() / (2.0 * h))
}

/// `1 / (zeta b h)`.
pub fn proximity_bound(b: f64, h: usize) -> Result<f64> {
    if h == 0 || !(b > 0.0) {
        return Err(invalid("need h >= 1 and b > 0"));
    }
    Ok(1.0 / (ZETA * b * h as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proximity {
    pub z: (f64, f64),
    pub r1: (f64, f64),
    pub r2: (f64, f64),
    pub difference: f64,
    pub bound: f64,
    pub holds: bool,
}

fn proximity(z: Complex64, r1: Complex64, r2: Complex64, b: f64, h: usize) -> Result<Proximity> {
    let difference = (r1 - r2).norm();
    let bound = proximity_bound(b, h)?;
    Ok(Proximity {
        z: (z.re, z.im),
        r1: (r1.re, r1.im),
        r2: (r2.re, r2.im),
        difference,
        bound,
        holds: difference <= bound,
    })
}

fn check_degree_bound(g: &Graph, b: f64) -> Result<()> {
    if g.max_weighted_degree() > b * (1.0 + 1e-12) {
        return Err(invalid(format!("degree bound b = {b} is below the weighted degree of the graph")));
    }
    Ok(())
}

fn check_at(z: Complex64, b: f64, h: usize) -> Result<()> {
    let eta = admissible_eta(b, h)?;
    if z.im < eta {
        return Err(invalid(format!("Im z = {} is below the admissible {eta}", z.im)));
    }
    Ok(())
}

/// Compares `R_{x1 x1}` and `R_{x2 x2}` at `z = i * admissible_eta(b, h)`
/// once the depth-`h` balls are verified isomorphic.
pub fn resolvent_proximity_check(g1: &Graph, x1: usize, g2: &Graph, x2: usize, h: usize, b: f64) -> Result<Proximity> {
    resolvent_proximity_check_at(g1, x1, g2, x2, h, b, Complex64::new(0.0, admissible_eta(b, h)?))
}

pub fn resolvent_proximity_check_at(
    g1: &Graph,
    x1: usize,
    g2: &Graph,
    x2: usize,
    h: usize,
    b: f64,
    z: Complex64,
) -> Result<Proximity> {
    check_at(z, b, h)?;
    check_degree_bound(g1, b)?;
    check_degree_bound(g2, b)?;
    let c1 = canonical_code_capped(&rooted_ball(g1, x1, h)?, DEFAULT_SIZE_CAP)?;
    let c2 = canonical_code_capped(&rooted_ball(g2, x2, h)?, DEFAULT_SIZE_CAP)?;
    if c1 != c2 {
        return Err(Error::NotIsomorphic);
    }
    proximity(z, resolvent_entry(g1, x1, z)?, resolvent_entry(g2, x2, z)?, b, h)
}

/// Same comparison between a finite graph and the universal cover of a base
/// graph, rooted over `v`.
pub fn cover_proximity_check(
    g: &Graph,
    x: usize,
    cs: &ConeTypeSystem,
    v: usize,
    h: usize,
    b: f64,
    z: Complex64,
) -> Result<Proximity> {
    check_at(z, b, h)?;
    check_degree_bound(g, b)?;
    check_degree_bound(cs.base(), b)?;
    let c1 = canonical_code_capped(&rooted_ball(g, x, h)?, DEFAULT_SIZE_CAP)?;
    let c2 = canonical_code_capped(&cover_ball(cs.base(), v, h, DEFAULT_SIZE_CAP)?, DEFAULT_SIZE_CAP)?;
    if c1 != c2 {
        return Err(Error::NotIsomorphic);
    }
    proximity(z, resolvent_entry(g, x, z)?, cover_green_root(cs, v, z)?, b, h)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalKm {
    pub interval: (f64, f64),
    /// `#{k : lambda_k in I} / n`.
    pub mu_n: f64,
    pub mu_bar: f64,
    /// `|mu_n(I) - mu_bar(I)| / |I|`.
    pub lhs: f64,
    pub d_tv: Option<f64>,
    pub delta: Option<f64>,
    pub required_length: Option<f64>,
    /// `lhs / delta`, the measured constant.
    pub ratio: Option<f64>,
}

/// Both sides of the local law without the window-length precondition.
pub fn local_km_discrepancy(eigenvalues: &[f64], cs: &ConeTypeSystem, interval: (f64, f64), eta: f64) -> Result<LocalKm> {
    let (a, b) = interval;
    if !(a < b) || eigenvalues.is_empty() {
        return Err(invalid("need a nonempty spectrum and a < b"));
    }
    let mu_n = eigenvalues.iter().filter(|&&l| a <= l && l <= b).count() as f64 / eigenvalues.len() as f64;
    let mu_bar = limit_measure(cs, a, b, eta)?;
    Ok(LocalKm {
        interval,
        mu_n,
        mu_bar,
        lhs: (mu_n - mu_bar).abs() / (b - a),
        d_tv: None,
        delta: None,
        required_length: None,
        ratio: None,
    })
}

/// Local law for a lift `g` of `cs.base()` at depth `h`.
///
/// `delta = max(h d_TV, 1/h)` is measured from the depth-`h` ball
/// distributions. Refuses when `delta >= 1` or when
/// `|I| < 20 D log(2h) / h * (1/delta) log(1/delta)`.
pub fn local_km_check(
    g: &Graph,
    eigenvalues: &[f64],
    cs: &ConeTypeSystem,
    interval: (f64, f64),
    h: usize,
    eta: f64,
) -> Result<LocalKm> {
    if h == 0 {
        return Err(invalid("depth must be at least 1"));
    }
    let d_tv = tv_distance(&ball_distribution(g, h)?, &lift_limit_distribution(cs.base(), h)?)?;
    let hf = h as f64;
    let delta = (hf * d_tv).max(1.0 / hf);
    if delta >= 1.0 {
        return Err(invalid(format!("delta = {delta} must be below 1 (depth {h}, d_TV = {d_tv})")));
    }
    let required = 20.0 * g.max_degree() as f64 * (2.0 * hf).ln() / hf * (1.0 / delta) * (1.0 / delta).ln();
    let length = interval.1 - interval.0;
    if length < required {
        return Err(Error::WindowTooSmall { length, required });
    }
    let mut out = local_km_discrepancy(eigenvalues, cs, interval, eta)?;
    out.d_tv = Some(d_tv);
    out.delta = Some(delta);
    out.required_length = Some(required);
    out.ratio = Some(out.lhs / delta);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorEstimate {
    pub n: usize,
    pub count: usize,
    pub interval: (f64, f64),
    pub q: f64,
    /// `||Pi_I||_{L^{q/2}} / N(I)`.
    pub lhs: f64,
    /// `lhs / n^{2/q - 1}`.
    pub c_prime: f64,
    /// `Im z` of the resolvent bound, `|I| / 2`, with `Re z` the centre of `I`.
    pub chain_z: (f64, f64),
    /// `||Pi_I||_{L^{q/2}}`.
    pub chain_lhs: f64,
    /// `|I| (sum_x (Im R_xx(z))^{q/2})^{2/q}`.
    pub chain_rhs: f64,
    pub chain_holds: bool,
    pub floor: f64,
}

/// Projector estimate on the window `I` together with the resolvent chain
/// `||Pi_I||_{q/2}^{q/2} <= |I|^{q/2} sum_x (Im R_xx(z))^{q/2}`.
/// Windows shorter than `floor_const * log(h) / h` are refused.
pub fn projector_estimate_check(
    d: &EigenDecomposition,
    interval: (f64, f64),
    q: f64,
    h: usize,
    floor_const: f64,
) -> Result<ProjectorEstimate> {
    let (a, b) = interval;
    if !(a < b) || h == 0 {
        return Err(invalid("need a < b and h >= 1"));
    }
    let floor = floor_const * (h as f64).ln() / h as f64;
    if b - a < floor {
        return Err(Error::WindowTooSmall { length: b - a, required: floor });
    }
    let sw = projector_diagonal(d, &WindowSelector::interval(a, b))?;
    if sw.count() == 0 {
        return Err(Error::EmptyWindow);
    }
    let norm = projector_norm(&sw, q)?;
    let n = d.dim();
    let lhs = norm / sw.count() as f64;
    let z = Complex64::new(0.5 * (a + b), 0.5 * (b - a));
    let r = finite_resolvent_diag(d, z)?;
    let chain_rhs = (b - a) * r.values.iter().map(|v| v.im.powf(q / 2.0)).sum::<f64>().powf(2.0 / q);
    Ok(ProjectorEstimate {
        n,
        count: sw.count(),
        interval,
        q,
        lhs,
        c_prime: lhs / (n as f64).powf(2.0 / q - 1.0),
        chain_z: (z.re, z.im),
        chain_lhs: norm,
        chain_rhs,
        chain_holds: norm <= chain_rhs * (1.0 + 1e-12),
        floor,
    })
}
