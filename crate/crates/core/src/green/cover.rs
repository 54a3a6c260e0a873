use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::finite::check_upper;
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::sampling::integrate;

/// Acceptance tolerance for the sup-norm fixed-point residual.
pub const ZETA_TOL: f64 = 1e-12;

/// Smallest imaginary part used for boundary values `lambda + i0`.
pub const ETA_FLOOR: f64 = 1e-6;

const DAMPED_CAP: usize = 100_000;
const NEWTON_CAP: usize = 60;
// multiple of the tolerance or round-off floor accepted when Newton stalls
const STALL_FACTOR: f64 = 16.0;

/// Non-backtracking recursion data of the universal cover of a base graph.
///
/// For a half-edge `e` of the base, `zeta_e(z)` is the root Green function of
/// the branch of the cover entered through `e`:
/// `zeta_e = -1 / (z + sum_{f in succ(e)} w_f^2 zeta_f)` where `succ(e)` holds
/// the half-edges leaving `t(e)` other than the reverse of `e`.
pub struct ConeTypeSystem {
    base: Graph,
    successors: Vec<Vec<usize>>,
    weight2: Vec<f64>,
    cache: Mutex<HashMap<(u64, u64, u64), Arc<Vec<Complex64>>>>,
}

impl std::fmt::Debug for ConeTypeSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConeTypeSystem")
            .field("vertices", &self.base.vertex_count())
            .field("directed_edges", &self.successors.len())
            .finish()
    }
}

impl ConeTypeSystem {
    pub fn new(base: &Graph) -> Result<Self> {
        if base.vertex_count() == 0 {
            return Err(invalid("base graph is empty"));
        }
        let successors = (0..base.half_edge_count())
            .map(|e| {
                let back = base.involution(e);
                base.half_edges_at(base.target(e)).iter().copied().filter(|&f| f != back).collect()
            })
            .collect();
        let weight2 = (0..base.half_edge_count()).map(|e| base.half_edge_weight(e).powi(2)).collect();
        Ok(ConeTypeSystem { base: base.clone(), successors, weight2, cache: Mutex::new(HashMap::new()) })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn directed_edges(&self) -> std::ops::Range<usize> {
        0..self.successors.len()
    }

    pub fn successors(&self, e: usize) -> &[usize] {
        &self.successors[e]
    }

    /// `max_e sum_{f in succ(e)} w_f^2`.
    fn branching(&self) -> f64 {
        self.successors
            .iter()
            .map(|s| s.iter().map(|&f| self.weight2[f]).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn sums(&self, zeta: &[Complex64]) -> Vec<Complex64> {
        self.successors.iter().map(|s| s.iter().map(|&f| self.weight2[f] * zeta[f]).sum()).collect()
    }

    fn map(&self, z: Complex64, zeta: &[Complex64]) -> Vec<Complex64> {
        self.sums(zeta).into_iter().map(|s| -(z + s).inv()).collect()
    }

    /// Sup-norm residual `max_e |zeta_e + 1/(z + S_e)|`.
    pub fn residual(&self, z: Complex64, zeta: &[Complex64]) -> f64 {
        self.map(z, zeta).iter().zip(zeta).map(|(t, x)| (t - x).norm()).fold(0.0, f64::max)
    }

    /// Residual relative to `max(1, max_e |zeta_e|)`; near atoms of the
    /// spectral measure `zeta` grows like `1 / Im z`.
    fn scaled_residual(&self, z: Complex64, zeta: &[Complex64]) -> f64 {
        self.residual(z, zeta) / zeta.iter().fold(1.0f64, |m, x| m.max(x.norm()))
    }

    /// Round-off floor of the scaled residual: evaluating `-1/(z + S_e)`
    /// loses `eps (|z| + sum |w_f^2 zeta_f|) |zeta_e|^2`.
    fn roundoff(&self, z: Complex64, zeta: &[Complex64]) -> f64 {
        let scale = zeta.iter().fold(1.0f64, |m, x| m.max(x.norm()));
        let worst = self
            .successors
            .iter()
            .zip(zeta)
            .map(|(s, x)| (z.norm() + s.iter().map(|&f| self.weight2[f] * zeta[f].norm()).sum::<f64>()) * x.norm_sqr())
            .fold(0.0, f64::max);
        f64::EPSILON * worst / scale
    }

    fn damped(&self, z: Complex64, mut zeta: Vec<Complex64>, tol: f64) -> (Vec<Complex64>, f64) {
        let mut res = f64::INFINITY;
        for _ in 0..DAMPED_CAP {
            let t = self.map(z, &zeta);
            let scale = t.iter().fold(1.0f64, |m, x| m.max(x.norm()));
            res = t.iter().zip(&zeta).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
            if res < tol {
                let r = self.scaled_residual(z, &t);
                return (t, r);
            }
            zeta.iter_mut().zip(&t).for_each(|(x, y)| *x = 0.5 * *x + 0.5 * y);
        }
        (zeta, res)
    }

    fn newton(&self, z: Complex64, mut zeta: Vec<Complex64>, tol: f64) -> Option<Vec<Complex64>> {
        let m = zeta.len();
        let mut res = self.scaled_residual(z, &zeta);
        for _ in 0..NEWTON_CAP {
            if res < tol {
                return Some(zeta);
            }
            let sums = self.sums(&zeta);
            let mut jac = Mat::<Complex64>::zeros(m, m);
            let mut rhs = Mat::<Complex64>::zeros(m, 1);
            for e in 0..m {
                let d = (z + sums[e]).inv();
                jac[(e, e)] += Complex64::new(1.0, 0.0);
                for &f in &self.successors[e] {
                    jac[(e, f)] -= d * d * self.weight2[f];
                }
                rhs[(e, 0)] = -(zeta[e] + d);
            }
            let step = jac.partial_piv_lu().solve(&rhs);
            let mut alpha = 1.0;
            loop {
                let trial: Vec<Complex64> = (0..m).map(|e| zeta[e] + alpha * step[(e, 0)]).collect();
                let r = self.scaled_residual(z, &trial);
                if r.is_finite() && r < res {
                    zeta = trial;
                    res = r;
                    break;
                }
                alpha *= 0.5;
                if alpha < 1e-8 {
                    return (res < STALL_FACTOR * tol.max(self.roundoff(z, &zeta))).then_some(zeta);
                }
            }
        }
        (res < tol).then_some(zeta)
    }

    fn solve(&self, z: Complex64, tol: f64) -> Result<Vec<Complex64>> {
        let m = self.successors.len();
        let eta0 = z.im.max(2.0 * self.branching().sqrt() + 1.0);
        let start = Complex64::new(z.re, eta0);
        let (mut zeta, res) = self.damped(start, vec![-start.inv(); m], tol);
        if !(res < tol) {
            return Err(Error::FixedPoint { re: start.re, im: start.im, residual: res });
        }
        let mut eta = eta0;
        let mut prev: Option<(f64, Vec<Complex64>)> = None;
        let mut ratio = 0.5;
        while eta > z.im {
            let next_eta = (ratio * eta).max(z.im);
            let zk = Complex64::new(z.re, next_eta);
            // power-law predictor in log eta
            let guess = match &prev {
                Some((pe, pz)) => {
                    let p = (next_eta / eta).ln() / (eta / pe).ln();
                    let g: Vec<Complex64> = zeta.iter().zip(pz).map(|(x, y)| x * (x / y).powf(p)).collect();
                    if herglotz(&g) { g } else { zeta.clone() }
                }
                None => zeta.clone(),
            };
            match self.newton(zk, guess, tol) {
                Some(next) if herglotz(&next) => {
                    prev = Some((eta, std::mem::replace(&mut zeta, next)));
                    eta = next_eta;
                    ratio = (ratio * ratio).max(0.5);
                }
                _ if ratio < 0.99 => ratio = ratio.sqrt(),
                _ => {
                    let (next, res) = self.damped(zk, zeta, tol);
                    if !(res < STALL_FACTOR * tol.max(self.roundoff(zk, &next))) || !herglotz(&next) {
                        return Err(Error::FixedPoint { re: zk.re, im: zk.im, residual: res });
                    }
                    prev = None;
                    zeta = next;
                    eta = next_eta;
                }
            }
        }
        Ok(zeta)
    }

    /// Cached `zeta_e(z)` for every half-edge, at tolerance [`ZETA_TOL`].
    pub fn zeta(&self, z: Complex64) -> Result<Arc<Vec<Complex64>>> {
        cover_zeta_shared(self, z, ZETA_TOL)
    }
}

fn herglotz(zeta: &[Complex64]) -> bool {
    zeta.iter().all(|x| x.im > 0.0 && x.re.is_finite())
}

fn cover_zeta_shared(cs: &ConeTypeSystem, z: Complex64, tol: f64) -> Result<Arc<Vec<Complex64>>> {
    check_upper(z)?;
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let key = (z.re.to_bits(), z.im.to_bits(), tol.to_bits());
    if let Some(hit) = cs.cache.lock().expect("cache lock").get(&key) {
        return Ok(Arc::clone(hit));
    }
    let value = Arc::new(cs.solve(z, tol)?);
    cs.cache.lock().expect("cache lock").insert(key, Arc::clone(&value));
    Ok(value)
}

/// Solves the non-backtracking fixed point at `z`.
///
/// The solution is continued from a large imaginary part, where the map is a
/// contraction, down to `Im z` in geometric steps that shrink when Newton
/// fails, with a power-law predictor for the starting point of each step.
pub fn cover_zeta(cs: &ConeTypeSystem, z: Complex64, tol: f64) -> Result<Vec<Complex64>> {
    Ok(cover_zeta_shared(cs, z, tol)?.as_ref().clone())
}

/// `R_oo(z) = -1 / (z + sum_{o(e) = v} w_e^2 zeta_e(z))` at a lift `o` of `v`.
pub fn cover_green_root(cs: &ConeTypeSystem, v: usize, z: Complex64) -> Result<Complex64> {
    if v >= cs.base.vertex_count() {
        return Err(invalid(format!("vertex {v} out of range")));
    }
    let zeta = cs.zeta(z)?;
    Ok(root_value(cs, &zeta, v, z))
}

fn root_value(cs: &ConeTypeSystem, zeta: &[Complex64], v: usize, z: Complex64) -> Complex64 {
    let s: Complex64 = cs.base.half_edges_at(v).iter().map(|&e| cs.weight2[e] * zeta[e]).sum();
    -(z + s).inv()
}

/// `R_oo(z)` for every base vertex.
pub fn cover_green_roots(cs: &ConeTypeSystem, z: Complex64) -> Result<Vec<Complex64>> {
    let zeta = cs.zeta(z)?;
    Ok((0..cs.base.vertex_count()).map(|v| root_value(cs, &zeta, v, z)).collect())
}

/// Averaged limit density `(1 / (pi |V|)) sum_v Im R_oo(lambda + i eta)`.
pub fn limit_density(cs: &ConeTypeSystem, lambda: f64, eta: f64) -> Result<f64> {
    let roots = cover_green_roots(cs, Complex64::new(lambda, eta.max(ETA_FLOOR)))?;
    Ok(roots.iter().map(|r| r.im).sum::<f64>() / (std::f64::consts::PI * roots.len() as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub lambda: f64,
    pub density: f64,
    pub eta: f64,
    /// The requested `eta` was below [`ETA_FLOOR`] and was raised to it.
    pub floored: bool,
}

pub fn limit_spectral_measure(cs: &ConeTypeSystem, grid: &[f64], eta: f64) -> Result<Vec<DensityPoint>> {
    if !(eta > 0.0) {
        return Err(Error::NotUpperHalfPlane(eta));
    }
    let used = eta.max(ETA_FLOOR);
    grid.iter()
        .map(|&lambda| {
            Ok(DensityPoint { lambda, density: limit_density(cs, lambda, used)?, eta: used, floored: eta < ETA_FLOOR })
        })
        .collect()
}

/// Writes density samples as CSV with header `lambda,density,eta`.
pub fn write_density_csv<W: std::io::Write>(points: &[DensityPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lambda", "density", "eta"])?;
    for p in points {
        w.write_record([p.lambda.to_string(), p.density.to_string(), p.eta.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `mu_bar([a, b])` by quadrature of the smoothed density at `eta`.
pub fn limit_measure(cs: &ConeTypeSystem, a: f64, b: f64, eta: f64) -> Result<f64> {
    if !(a <= b) {
        return Err(invalid("interval endpoints out of order"));
    }
    // evaluate once up front so that solver failures surface as errors
    limit_density(cs, 0.5 * (a + b), eta)?;
    let failed = std::cell::Cell::new(None);
    let value = integrate(
        |x| match limit_density(cs, x, eta) {
            Ok(v) => v,
            Err(e) => {
                failed.set(Some(e.to_string()));
                0.0
            }
        },
        a,
        b,
        1e-7,
    );
    match failed.into_inner() {
        Some(msg) => Err(invalid(msg)),
        None => Ok(value),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenEstimate {
    /// `max` over the grid of the base average of `(Im R)^{q/2} + |R|^2`.
    pub sup: f64,
    pub argmax: (f64, f64),
    /// Points where the value at the two smallest `eta` differs by more than
    /// 25%; the estimate there is still widening and is not trusted.
    pub widening: Vec<f64>,
}

pub fn green_assumption_estimate(
    cs: &ConeTypeSystem,
    interval: (f64, f64),
    q: f64,
    lambdas: &[f64],
    etas: &[f64],
) -> Result<GreenEstimate> {
    if lambdas.is_empty() || etas.is_empty() {
        return Err(invalid("grids must be nonempty"));
    }
    let mut etas = etas.to_vec();
    if etas.iter().any(|&e| !(e > 0.0)) {
        return Err(invalid("eta grid must be positive"));
    }
    etas.sort_by(|a, b| b.total_cmp(a));
    let mut sup = f64::NEG_INFINITY;
    let mut argmax = (f64::NAN, f64::NAN);
    let mut widening = Vec::new();
    for &lambda in lambdas.iter().filter(|&&l| l >= interval.0 && l <= interval.1) {
        let mut column = Vec::with_capacity(etas.len());
        for &eta in &etas {
            let roots = cover_green_roots(cs, Complex64::new(lambda, eta))?;
            let v = roots.iter().map(|r| r.im.powf(q / 2.0) + r.norm_sqr()).sum::<f64>() / roots.len() as f64;
            if v > sup {
                sup = v;
                argmax = (lambda, eta);
            }
            column.push(v);
        }
        if let [.., a, b] = column[..] {
            if (b - a).abs() > 0.25 * a.abs() {
                widening.push(lambda);
            }
        }
    }
    if !sup.is_finite() {
        return Err(invalid("no grid point inside the interval"));
    }
    Ok(GreenEstimate { sup, argmax, widening })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityRegion {
    pub c1: f64,
    pub c2: f64,
    pub eta: f64,
    /// Maximal runs of grid points where every `c1 <= |Im zeta_e| <= c2`.
    pub certified: Vec<(f64, f64)>,
    /// Maximal runs of grid points where the condition fails.
    pub excluded: Vec<(f64, f64)>,
}

impl RegularityRegion {
    pub fn contains(&self, a: f64, b: f64) -> bool {
        self.certified.iter().any(|&(lo, hi)| lo <= a && b <= hi)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn green_regularity_region(cs: &ConeTypeSystem, c1: f64, c2: f64, lambdas: &[f64], eta: f64) -> Result<RegularityRegion> {
    if !(c1 <= c2) {
        return Err(invalid("need c1 <= c2"));
    }
    let eta = eta.max(ETA_FLOOR);
    let mut flags = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let zeta = cs.zeta(Complex64::new(lambda, eta))?;
        flags.push(zeta.iter().all(|x| (c1..=c2).contains(&x.im.abs())));
    }
    let (mut certified, mut excluded) = (Vec::new(), Vec::new());
    let mut i = 0;
    while i < lambdas.len() {
        let mut j = i;
        while j + 1 < lambdas.len() && flags[j + 1] == flags[i] {
            j += 1;
        }
        if flags[i] { &mut certified } else { &mut excluded }.push((lambdas[i], lambdas[j]));
        i = j + 1;
    }
    Ok(RegularityRegion { c1, c2, eta, certified, excluded })
}
