//! Uniform vectors on spheres and window subspaces, Haar eigenbases, and
//! the exact marginal and moment formulas they obey.

use std::sync::OnceLock;

use faer::Mat;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::rng::run_trials;
use crate::spectral::{lq_norm, EigenDecomposition, SpectralWindow};

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Default number of Monte Carlo trials.
pub const DEFAULT_TRIALS: usize = 10_000;

fn gaussian_vec(d: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// Uniform point on the unit sphere of `R^d` (a normalized Gaussian vector).
pub fn sample_sphere(d: usize, rng: &mut impl Rng) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(invalid("sphere dimension must be at least 1"));
    }
    loop {
        let mut x = gaussian_vec(d, rng);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            x.iter_mut().for_each(|v| *v /= norm);
            return Ok(x);
        }
    }
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adaptive(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64, whole: f64, m: f64, fm: f64, eps: f64, depth: u32) -> f64 {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, fa, m, fm, left, lm, flm, eps / 2.0, depth - 1) + adaptive(f, m, fm, b, fb, right, rm, frm, eps / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    adaptive(&f, a, fa, b, fb, whole, m, fm, eps, 50)
}

/// `ln C_d` with `C_d = 2 Gamma(d/2) / (Gamma((d-1)/2) Gamma(1/2))`.
fn ln_sphere_constant(d: usize) -> f64 {
    let d = d as f64;
    std::f64::consts::LN_2 + ln_gamma(d / 2.0) - ln_gamma((d - 1.0) / 2.0) - ln_gamma(0.5)
}

/// `P(|x_1| > t)` for `x` uniform on the unit sphere of `R^d`, evaluated as
/// `C_d * int_0^theta sin^{d-2}` with `cos theta = t`.
pub fn marginal_tail_exact(d: usize, t: f64) -> Result<f64> {
    if d < 2 {
        return Err(invalid("marginal tail needs d >= 2"));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid(format!("threshold {t} outside [0, 1]")));
    }
    let theta = t.acos();
    let k = (d - 2) as i32;
    let c = ln_sphere_constant(d).exp();
    let val = c * integrate(|phi: f64| phi.sin().powi(k), 0.0, theta, 1e-13);
    Ok(val.clamp(0.0, 1.0))
}

/// `P(|u(x)| > t)` for `u` uniform on a window with `N(I) = n_i` and
/// projector diagonal value `p` at `x`.
pub fn window_tail_exact(n_i: usize, p: f64, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Ok(1.0);
    }
    let s = p.max(0.0).sqrt();
    if t >= s {
        return Ok(0.0);
    }
    if n_i == 1 {
        return Ok(1.0);
    }
    marginal_tail_exact(n_i, t / s)
}

/// `E|u(x)|^q = Gamma((q+1)/2) Gamma(N/2) / (Gamma((q+N)/2) Gamma(1/2)) * p^{q/2}`,
/// evaluated in log space.
pub fn moment_exact(q: f64, n_i: usize, p: f64) -> Result<f64> {
    if n_i == 0 {
        return Err(invalid("N must be at least 1"));
    }
    if !(q >= 1.0) {
        return Err(invalid(format!("q must be at least 1, got {q}")));
    }
    if !(0.0..=1.0 + 1e-12).contains(&p) {
        return Err(invalid(format!("projector value {p} outside [0, 1]")));
    }
    if p <= 0.0 {
        return Ok(0.0);
    }
    let n = n_i as f64;
    let ln = ln_gamma((q + 1.0) / 2.0) + ln_gamma(n / 2.0) - ln_gamma((q + n) / 2.0) - ln_gamma(0.5);
    Ok((ln + q / 2.0 * p.ln()).exp())
}

/// The columns of the window eigenvectors, stored contiguously.
#[derive(Clone, Debug)]
pub struct WindowBasis {
    n: usize,
    cols: Vec<f64>,
    proj_diag: Vec<f64>,
}

/// `u = sum_k z_k psi_k` with `z` uniform on the unit sphere of `R^{N(I)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomUnitVector {
    pub coeffs: Vec<f64>,
    pub u: Vec<f64>,
}

impl WindowBasis {
    pub fn new(d: &EigenDecomposition, sw: &SpectralWindow) -> Result<Self> {
        if sw.count() == 0 {
            return Err(Error::EmptyWindow);
        }
        let mut cols = Vec::with_capacity(d.dim() * sw.count());
        for &k in &sw.indices {
            cols.extend_from_slice(d.vector(k));
        }
        Ok(WindowBasis { n: d.dim(), cols, proj_diag: sw.proj_diag.clone() })
    }

    pub fn count(&self) -> usize {
        self.cols.len() / self.n
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn proj_diag(&self) -> &[f64] {
        &self.proj_diag
    }

    pub fn assemble(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.n];
        for (z, col) in coeffs.iter().zip(self.cols.chunks_exact(self.n)) {
            for (ui, c) in u.iter_mut().zip(col) {
                *ui += z * c;
            }
        }
        u
    }

    pub fn sample(&self, rng: &mut impl Rng) -> RandomUnitVector {
        let coeffs = sample_sphere(self.count(), rng).expect("window is nonempty");
        let u = self.assemble(&coeffs);
        RandomUnitVector { coeffs, u }
    }
}

/// One draw of `u` uniform on the unit sphere of the window subspace.
pub fn sample_window_vector(d: &EigenDecomposition, sw: &SpectralWindow, rng: &mut impl Rng) -> Result<RandomUnitVector> {
    Ok(WindowBasis::new(d, sw)?.sample(rng))
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// columns of `Q` multiplied by the signs of `diag(R)`.
pub fn haar_orthogonal(m: usize, rng: &mut impl Rng) -> Result<Mat<f64>> {
    if m == 0 {
        return Err(invalid("matrix order must be at least 1"));
    }
    let g = Mat::<f64>::from_fn(m, m, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.R();
    let mut q = qr.compute_Q();
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            for i in 0..m {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}

/// Eigenbasis with every eigenspace rotated by an independent Haar
/// orthogonal matrix.
#[derive(Clone, Debug)]
pub struct RandomEigenbasis {
    pub rotations: Vec<Mat<f64>>,
    pub basis: EigenDecomposition,
}

pub fn random_eigenbasis(d: &EigenDecomposition, rng: &mut impl Rng) -> Result<RandomEigenbasis> {
    let n = d.dim();
    let mut vectors = d.vectors().clone();
    let mut rotations = Vec::with_capacity(d.groups().len());
    for g in d.groups() {
        let m = g.len();
        let q = haar_orthogonal(m, rng)?;
        if m == 1 {
            if q[(0, 0)] < 0.0 {
                for i in 0..n {
                    vectors[(i, g.start)] = -vectors[(i, g.start)];
                }
            }
        } else {
            let rotated = d.vectors().subcols(g.start, m) * &q;
            vectors.subcols_mut(g.start, m).copy_from(&rotated);
        }
        rotations.push(q);
    }
    Ok(RandomEigenbasis { rotations, basis: d.with_vectors(vectors)? })
}

/// Symmetric Gaussian matrix `(G + G^T) / sqrt 2` with i.i.d. standard
/// normal `G`.
pub fn gaussian_symmetric(n: usize, rng: &mut impl Rng) -> Mat<f64> {
    let g = Mat::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Mat::from_fn(n, n, |i, j| (g[(i, j)] + g[(j, i)]) * s)
}

/// Explicit constants of the Stirling chain.
///
/// * `c_a = sup_{q >= 2} (Gamma((q+1)/2) / Gamma(1/2))^{1/q} / sqrt q`
/// * `c_b = sup_{q >= 2, N >= 1} (Gamma(N/2) / Gamma((q+N)/2))^{1/q} sqrt N`
/// * `c_stir = c_a c_b`, so `E(||u||_p^q)^{1/q} <= c_stir sqrt q (||Pi||_{p/2} / N)^{1/2}`
/// * `c1 = 2 c_stir` bounds the median: `M <= c1 sqrt q N^{1/q - 1/2}`
/// * `c = 2 c1` is the constant of the exceedance bound.
///
/// The suprema are evaluated on a grid; `q = 2` attains both.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibratedConstants {
    pub c_a: f64,
    pub c_b: f64,
    pub c_stir: f64,
    pub c1: f64,
    pub c: f64,
}

fn ln_ratio_a(q: f64) -> f64 {
    ln_gamma((q + 1.0) / 2.0) - ln_gamma(0.5)
}

fn ln_ratio_b(q: f64, n: f64) -> f64 {
    ln_gamma(n / 2.0) - ln_gamma((q + n) / 2.0)
}

pub fn calibrated_constants() -> CalibratedConstants {
    static CELL: OnceLock<CalibratedConstants> = OnceLock::new();
    *CELL.get_or_init(|| {
        let qs: Vec<f64> = (0..=800).map(|k| 2.0 + 0.25 * k as f64).collect();
        let mut ns: Vec<f64> = (1..=64).map(f64::from).collect();
        while *ns.last().unwrap() < 1e6 {
            let next = (ns.last().unwrap() * 1.25).round();
            ns.push(next);
        }
        let c_a = qs.iter().map(|&q| (ln_ratio_a(q) / q).exp() / q.sqrt()).fold(0.0, f64::max);
        let c_b = qs
            .iter()
            .flat_map(|&q| ns.iter().map(move |&n| (ln_ratio_b(q, n) / q).exp() * n.sqrt()))
            .fold(0.0, f64::max);
        let c_stir = c_a * c_b;
        CalibratedConstants { c_a, c_b, c_stir, c1: 2.0 * c_stir, c: 4.0 * c_stir }
    })
}

/// `C Lambda sqrt q N^{1/q - 1/2}`.
pub fn exceedance_threshold(c: f64, lambda: f64, q: f64, n_i: usize) -> f64 {
    c * lambda * q.sqrt() * (n_i as f64).powf(1.0 / q - 0.5)
}

/// `4 exp(-C^2 Lambda^2 q N^{2/q} / 8)`.
pub fn exceedance_bound(c: f64, lambda: f64, q: f64, n_i: usize) -> f64 {
    4.0 * (-(c * c * lambda * lambda * q * (n_i as f64).powf(2.0 / q)) / 8.0).exp()
}

/// `4 exp(-N r^2 / 2)`.
pub fn concentration_bound(n_i: usize, r: f64) -> f64 {
    4.0 * (-(n_i as f64) * r * r / 2.0).exp()
}

/// Median bound `c1 sqrt q N^{1/q - 1/2}`.
pub fn median_bound(q: f64, n_i: usize) -> f64 {
    exceedance_threshold(calibrated_constants().c1, 1.0, q, n_i)
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Median by order statistics; the midpoint of the two central values for
/// an even sample.
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exceedance {
    pub q: f64,
    pub lambda: f64,
    pub count: usize,
    pub constant: f64,
    pub threshold: f64,
    pub exceed: usize,
    pub trials: usize,
    pub frequency: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub bound: f64,
}

impl Exceedance {
    /// Frequency at most `bound` up to the 99% Wilson slack.
    pub fn consistent(&self) -> bool {
        self.wilson_lo <= self.bound
    }
}

/// Monte Carlo frequency of `||u||_q >= C Lambda sqrt q N^{1/q-1/2}` with the
/// calibrated `C`.
pub fn lq_exceedance_mc(
    d: &EigenDecomposition,
    sw: &SpectralWindow,
    q: f64,
    lambda: f64,
    trials: usize,
    seed: u64,
) -> Result<Exceedance> {
    if trials == 0 {
        return Err(invalid("at least one trial is needed"));
    }
    let basis = WindowBasis::new(d, sw)?;
    let n_i = basis.count();
    let c = calibrated_constants().c;
    let threshold = exceedance_threshold(c, lambda, q, n_i);
    let hits = run_trials(seed, trials, |_, rng| lq_norm(&basis.sample(rng).u, q) >= threshold);
    let exceed = hits.iter().filter(|&&h| h).count();
    let (wilson_lo, wilson_hi) = wilson_interval(exceed, trials, Z99);
    Ok(Exceedance {
        q,
        lambda,
        count: n_i,
        constant: c,
        threshold,
        exceed,
        trials,
        frequency: exceed as f64 / trials as f64,
        wilson_lo,
        wilson_hi,
        bound: exceedance_bound(c, lambda, q, n_i),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    pub r: f64,
    pub frequency: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Concentration {
    pub q: f64,
    pub count: usize,
    pub trials: usize,
    pub median: f64,
    pub median_bound: f64,
    pub rows: Vec<DeviationRow>,
}

/// Empirical median of `||u||_q` and the deviation frequencies
/// `P(| ||u||_q - median | > r)` against `4 exp(-N r^2 / 2)`.
pub fn median_and_concentration(
    d: &EigenDecomposition,
    sw: &SpectralWindow,
    q: f64,
    r_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Concentration> {
    if trials == 0 {
        return Err(invalid("at least one trial is needed"));
    }
    let basis = WindowBasis::new(d, sw)?;
    let n_i = basis.count();
    let norms = run_trials(seed, trials, |_, rng| lq_norm(&basis.sample(rng).u, q));
    let med = median(&norms);
    let rows = r_grid
        .iter()
        .map(|&r| {
            let k = norms.iter().filter(|&&x| (x - med).abs() > r).count();
            let (lo, hi) = wilson_interval(k, trials, Z99);
            DeviationRow { r, frequency: k as f64 / trials as f64, wilson_lo: lo, wilson_hi: hi, bound: concentration_bound(n_i, r) }
        })
        .collect();
    Ok(Concentration { q, count: n_i, trials, median: med, median_bound: median_bound(q, n_i), rows })
}
