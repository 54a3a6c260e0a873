//! Gaussian statistics of eigenvector entries and quantum-ergodic deviations.
//!
//! The bounded-Lipschitz distance to `N(0, 1)` is bracketed from both
//! sides: [`dbl_lower_bound`] takes a maximum over a finite family of
//! bounded 1-Lipschitz test functions, and [`w1_to_gaussian`] is the
//! Wasserstein-1 distance, an upper bound for the class
//! `{f : ||f||_Lip <= 1, ||f||_inf <= 1}`.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::error::{invalid, Result};

/// Standard normal CDF.
pub fn normal_cdf(t: f64) -> f64 {
    0.5 * erfc(-t / std::f64::consts::SQRT_2)
}

pub fn normal_pdf(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// `int_{-inf}^t Phi = t Phi(t) + phi(t)`.
fn cdf_antiderivative(t: f64) -> f64 {
    if t == f64::NEG_INFINITY {
        return 0.0;
    }
    t * normal_cdf(t) + normal_pdf(t)
}

/// `int_t^inf (1 - Phi) = phi(t) - t (1 - Phi(t))`.
fn upper_tail_integral(t: f64) -> f64 {
    normal_pdf(t) - t * normal_cdf(-t)
}

/// Uniform measure on the atoms `sqrt(n) u_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(atoms: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.iter().any(|a| !a.is_finite()) {
            return Err(invalid("empirical measure needs finite atoms"));
        }
        Ok(EmpiricalMeasure { atoms })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().sum::<f64>() / self.len() as f64
    }

    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|a| a * a).sum::<f64>() / self.len() as f64
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&a| f(a)).sum::<f64>() / self.len() as f64
    }

    fn sorted(&self) -> Vec<f64> {
        let mut v = self.atoms.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// `mu = n^{-1} sum_i delta_{sqrt(n) u_i}`.
pub fn empirical_measure(u: &[f64]) -> Result<EmpiricalMeasure> {
    let s = (u.len() as f64).sqrt();
    EmpiricalMeasure::new(u.iter().map(|x| s * x).collect())
}

/// `int |F_mu - Phi|` with exact Gaussian antiderivatives on every step of
/// the empirical CDF.
pub fn w1_to_gaussian(m: &EmpiricalMeasure) -> f64 {
    let x = m.sorted();
    let n = x.len();
    let mut total = cdf_antiderivative(x[0]);
    for k in 1..n {
        let (a, b) = (x[k - 1], x[k]);
        if b <= a {
            continue;
        }
        let c = k as f64 / n as f64;
        let s = normal_quantile(c).clamp(a, b);
        // c - Phi is positive left of s and negative right of s
        let left = c * (s - a) - (cdf_antiderivative(s) - cdf_antiderivative(a));
        let right = (cdf_antiderivative(b) - cdf_antiderivative(s)) - c * (b - s);
        total += left.max(0.0) + right.max(0.0);
    }
    total + upper_tail_integral(x[n - 1])
}

/// Test functions of the lower-bound family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TestFunction {
    /// `clamp(t - c, -1, 1)`
    Ramp(f64),
    /// `max(0, 1 - |t - c|)`
    Hat(f64),
}

impl TestFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            TestFunction::Ramp(c) => (t - c).clamp(-1.0, 1.0),
            TestFunction::Hat(c) => (1.0 - (t - c).abs()).max(0.0),
        }
    }

    /// Exact expectation under `N(0, 1)`.
    pub fn gaussian_mean(&self) -> f64 {
        let (phi, cdf) = (normal_pdf, normal_cdf);
        match *self {
            TestFunction::Ramp(c) => {
                let (a, b) = (c - 1.0, c + 1.0);
                -cdf(a) + (phi(a) - phi(b)) - c * (cdf(b) - cdf(a)) + cdf(-b)
            }
            TestFunction::Hat(c) => {
                let (a, b) = (c - 1.0, c + 1.0);
                (1.0 - c) * (cdf(c) - cdf(a)) + (phi(a) - phi(c)) + (1.0 + c) * (cdf(b) - cdf(c)) - (phi(c) - phi(b))
            }
        }
    }
}

/// Default grid: 41 equally spaced centres on `[-4, 4]`.
pub fn default_grid() -> Vec<f64> {
    grid(41)
}

/// `points` equally spaced centres on `[-4, 4]`.
pub fn grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|k| -4.0 + 8.0 * k as f64 / (points - 1) as f64).collect(),
    }
}

/// `max_f |int f dmu - E f(Z)|` over ramps and hats centred on `grid`;
/// a lower bound for the bounded-Lipschitz distance.
pub fn dbl_lower_bound(m: &EmpiricalMeasure, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(invalid("test-function grid is empty"));
    }
    Ok(grid
        .iter()
        .flat_map(|&c| [TestFunction::Ramp(c), TestFunction::Hat(c)])
        .map(|f| (m.integrate(|t| f.eval(t)) - f.gaussian_mean()).abs())
        .fold(0.0, f64::max))
}

/// Probability bound for the Gaussian-statistics estimate,
/// `48 sqrt(pi) eps^{-3/2} exp(-c (m-1) eps^5)` with `c = 3^{-2} 2^{-16}`.
/// `None` when `eps` lies outside the admissible range.
pub fn gaussian_stat_bound(m: usize, eps: f64) -> Option<f64> {
    if m < 2 || eps > 1.0 {
        return None;
    }
    let mm = (m - 1) as f64;
    let eps_min = (192.0 * std::f64::consts::PI / mm.sqrt()).powf(0.4).max(4.0 / mm);
    if eps < eps_min {
        return None;
    }
    let c = 1.0 / (9.0 * 65536.0);
    Some(48.0 * std::f64::consts::PI.sqrt() / eps.powf(1.5) * (-c * mm * eps.powi(5)).exp())
}

/// `|sum_x f(x) u(x)^2 - mean(f)|`.
pub fn qe_deviation(u: &[f64], f: &[f64]) -> Result<f64> {
    if u.len() != f.len() || u.is_empty() {
        return Err(invalid("vector and observable dimensions differ"));
    }
    let mean = f.iter().sum::<f64>() / f.len() as f64;
    Ok((u.iter().zip(f).map(|(x, g)| g * x * x).sum::<f64>() - mean).abs())
}

/// Deviation threshold `t ||f||_2 / sqrt(n)`.
pub fn qe_threshold(f: &[f64], t: f64) -> f64 {
    t * f.iter().map(|x| x * x).sum::<f64>().sqrt() / (f.len() as f64).sqrt()
}

/// Failure probability for one vector of an eigenspace of dimension `m`:
/// `3 exp(-t sqrt(m) / 8) + exp(-m / 12)`.
pub fn qe_vector_bound(m: usize, t: f64) -> f64 {
    let m = m as f64;
    3.0 * (-t * m.sqrt() / 8.0).exp() + (-m / 12.0).exp()
}

/// `1 - M sum_k m_k (3 exp(-t sqrt(m_k) / 8) + exp(-m_k / 12))`.
pub fn qe_bound(t: f64, observables: usize, mults: &[usize]) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid("t must be positive"));
    }
    Ok(1.0 - observables as f64 * mults.iter().map(|&m| m as f64 * qe_vector_bound(m, t)).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::integrate;

    #[test]
    fn w1_of_point_mass_is_mean_abs_gaussian() {
        let m = EmpiricalMeasure::new(vec![0.0]).unwrap();
        assert!((w1_to_gaussian(&m) - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn w1_matches_direct_quadrature() {
        let atoms = vec![-1.3, -0.2, -0.2, 0.4, 0.9, 2.5];
        let m = EmpiricalMeasure::new(atoms.clone()).unwrap();
        let ecdf = |t: f64| atoms.iter().filter(|&&a| a <= t).count() as f64 / atoms.len() as f64;
        let mut knots = vec![-12.0];
        knots.extend(&atoms);
        knots.push(12.0);
        knots.dedup();
        let oracle: f64 = knots.windows(2).map(|w| integrate(|t| (ecdf(t) - normal_cdf(t)).abs(), w[0], w[1], 1e-13)).sum();
        assert!((w1_to_gaussian(&m) - oracle).abs() < 1e-9);
    }

    #[test]
    fn quantile_atoms_are_close() {
        let n = 1000;
        let atoms = (1..=n).map(|i| normal_quantile((i as f64 - 0.5) / n as f64)).collect();
        let m = EmpiricalMeasure::new(atoms).unwrap();
        let w = w1_to_gaussian(&m);
        assert!(w < 0.01);
        assert!(dbl_lower_bound(&m, &default_grid()).unwrap() <= w);
        let shifted = EmpiricalMeasure::new(m.atoms.iter().map(|a| a + 0.7).collect()).unwrap();
        assert!(w1_to_gaussian(&shifted) >= 0.7 - w);
    }

    #[test]
    fn test_function_means_match_quadrature() {
        for c in [-3.0, -0.4, 0.0, 1.0, 2.2] {
            for f in [TestFunction::Ramp(c), TestFunction::Hat(c)] {
                let knots = [-12.0, c - 1.0, c, c + 1.0, 12.0];
                let oracle: f64 = knots.windows(2).map(|w| integrate(|t| f.eval(t) * normal_pdf(t), w[0], w[1], 1e-13)).sum();
                assert!((f.gaussian_mean() - oracle).abs() < 1e-10, "{f:?}");
            }
        }
    }

    #[test]
    fn point_mass_lower_bound() {
        let m = EmpiricalMeasure::new(vec![0.0]).unwrap();
        let lb = dbl_lower_bound(&m, &default_grid()).unwrap();
        assert!(lb >= 0.3);
        assert!(lb <= w1_to_gaussian(&m));
        assert!(dbl_lower_bound(&m, &[]).is_err());
    }

    #[test]
    fn unit_vectors_have_unit_second_moment() {
        let n = 16;
        let u = vec![1.0 / (n as f64).sqrt(); n];
        let m = empirical_measure(&u).unwrap();
        assert!(m.atoms.iter().all(|a| (a - 1.0).abs() < 1e-15));
        let signs: Vec<f64> = (0..n).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 } / (n as f64).sqrt()).collect();
        let m = empirical_measure(&signs).unwrap();
        assert!(m.atoms.iter().all(|a| (a.abs() - 1.0).abs() < 1e-15));
        assert!((m.second_moment() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn qe_examples() {
        let u = [0.6, 0.0, 0.8, 0.0];
        assert!(qe_deviation(&u, &[2.0; 4]).unwrap() < 1e-15);
        let support = [1.0, 0.0, 1.0, 0.0];
        assert!((qe_deviation(&u, &support).unwrap() - 0.5).abs() < 1e-15);
        assert!(qe_deviation(&u, &[1.0]).is_err());
        let f = [1.0, -1.0, 3.0, 0.5];
        let shifted: Vec<f64> = f.iter().map(|x| x + 10.0).collect();
        assert!((qe_deviation(&u, &f).unwrap() - qe_deviation(&u, &shifted).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn qe_bound_arithmetic() {
        let b = qe_bound(8.0, 1, &[144]).unwrap();
        assert!((b - (1.0 - 144.0 * 4.0 * (-12.0f64).exp())).abs() < 1e-15);
        assert!(qe_bound(1e-12, 2, &[3, 5]).unwrap() < 1.0 - 3.0 * 2.0 * 8.0 + 1e-6);
        assert!(qe_bound(1e6, 1, &[100_000]).unwrap() > 1.0 - 1e-12);
        assert!(qe_bound(0.0, 1, &[4]).is_err());
    }

    #[test]
    fn gaussian_bound_evaluator() {
        assert!(gaussian_stat_bound(199, 0.5).is_none());
        let m = 1_000_000_000_000usize;
        let b = gaussian_stat_bound(m, 1.0).unwrap();
        let want = 48.0 * std::f64::consts::PI.sqrt() * (-((m - 1) as f64) / 589_824.0).exp();
        assert!((b - want).abs() <= 1e-12 * want.max(1e-300));
    }
}
