use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{projector_diagonal, EigenDecomposition, WindowSelector};

pub(crate) fn check_upper(z: Complex64) -> Result<()> {
    if !(z.im > 0.0) {
        return Err(Error::NotUpperHalfPlane(z.im));
    }
    Ok(())
}

/// Diagonal of the resolvent `(A - z)^{-1}` at one spectral parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolventDiagonal {
    pub z: Complex64,
    pub values: Vec<Complex64>,
}

impl ResolventDiagonal {
    /// Normalized trace, the Stieltjes transform of the spectral measure.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }
}

/// `R_xx(z) = sum_k psi_k(x)^2 / (lambda_k - z)`.
pub fn finite_resolvent_diag(d: &EigenDecomposition, z: Complex64) -> Result<ResolventDiagonal> {
    check_upper(z)?;
    let n = d.dim();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (k, &lambda) in d.values().iter().enumerate() {
        let w = (Complex64::new(lambda, 0.0) - z).inv();
        for (r, &v) in values.iter_mut().zip(d.vector(k)) {
            *r += w * (v * v);
        }
    }
    Ok(ResolventDiagonal { z, values })
}

/// `n^{-1} sum_k 1 / (lambda_k - z)`.
pub fn stieltjes(eigenvalues: &[f64], z: Complex64) -> Complex64 {
    eigenvalues.iter().map(|&l| (Complex64::new(l, 0.0) - z).inv()).sum::<Complex64>() / eigenvalues.len() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowBoundCheck {
    pub lambda: f64,
    pub t: f64,
    /// `min_x (2 t Im R_xx(lambda + i t) - Pi_I(x))`
    pub worst_slack: f64,
    pub holds: bool,
}

/// Checks `sum_{lambda_k in I} psi_k(x)^2 <= 2 t Im R_xx(lambda + i t)` for
/// `I = [lambda - t, lambda + t]` at every vertex.
pub fn window_bound_check(d: &EigenDecomposition, lambda: f64, t: f64) -> Result<WindowBoundCheck> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("half-width t must be positive".into()));
    }
    let r = finite_resolvent_diag(d, Complex64::new(lambda, t))?;
    let sw = projector_diagonal(d, &WindowSelector::interval(lambda - t, lambda + t))?;
    let worst_slack = r
        .values
        .iter()
        .zip(&sw.proj_diag)
        .map(|(rx, p)| 2.0 * t * rx.im - p)
        .fold(f64::INFINITY, f64::min);
    Ok(WindowBoundCheck { lambda, t, worst_slack, holds: worst_slack >= -1e-9 })
}

/// Single diagonal entry `R_xx(z)`: a Neumann series when `|z|` exceeds the
/// largest weighted degree, a dense complex solve otherwise.
pub fn resolvent_entry(g: &Graph, x: usize, z: Complex64) -> Result<Complex64> {
    check_upper(z)?;
    let n = g.vertex_count();
    if x >= n {
        return Err(Error::InvalidParameter(format!("vertex {x} out of range")));
    }
    let b = g.max_weighted_degree();
    if z.norm() > 1.5 * b {
        // (A - z)^{-1} = -sum_k A^k / z^{k+1}
        let mut v = vec![0.0; n];
        v[x] = 1.0;
        let mut zpow = -z.inv();
        let mut sum = zpow * v[x];
        let ratio = b / z.norm();
        let mut bound = zpow.norm();
        for _ in 0..10_000 {
            let mut next = vec![0.0; n];
            for (u, nu) in next.iter_mut().enumerate() {
                *nu = g.half_edges_at(u).iter().map(|&e| g.half_edge_weight(e) * v[g.target(e)]).sum();
            }
            v = next;
            zpow /= z;
            sum += zpow * v[x];
            bound *= ratio;
            if bound < 1e-17 {
                break;
            }
        }
        return Ok(sum);
    }
    let a = g.adjacency_matrix();
    let m = Mat::<Complex64>::from_fn(n, n, |i, j| Complex64::new(a[(i, j)], 0.0) - if i == j { z } else { Complex64::new(0.0, 0.0) });
    let mut rhs = Mat::<Complex64>::zeros(n, 1);
    rhs[(x, 0)] = Complex64::new(1.0, 0.0);
    let sol = m.partial_piv_lu().solve(&rhs);
    Ok(sol[(x, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph};
    use crate::spectral::{decompose, decompose_graph};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_by_one() {
        let d = decompose(&Mat::<f64>::zeros(1, 1), None).unwrap();
        let r = finite_resolvent_diag(&d, c(0.0, 1.0)).unwrap();
        assert!((r.values[0] - c(0.0, 1.0)).norm() < 1e-15);
        assert!(finite_resolvent_diag(&d, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn k2_against_explicit_inverse() {
        // (A - z)^{-1} for A = [[0,1],[1,0]] has diagonal -z / (z^2 - 1)
        let g = complete_graph(2).unwrap();
        let d = decompose_graph(&g).unwrap();
        let z = c(0.0, 1.0);
        let want = -z / (z * z - 1.0);
        let r = finite_resolvent_diag(&d, z).unwrap();
        assert!(r.values.iter().all(|v| (v - want).norm() < 1e-14));
        assert!((resolvent_entry(&g, 0, z).unwrap() - want).norm() < 1e-14);
        assert!((resolvent_entry(&g, 1, c(0.3, 5.0)).unwrap() - (-c(0.3, 5.0) / (c(0.3, 5.0).powi(2) - 1.0))).norm() < 1e-14);
    }

    #[test]
    fn trace_identity_and_herglotz() {
        let d = decompose_graph(&cycle_graph(9).unwrap()).unwrap();
        for z in [c(0.1, 0.05), c(-1.7, 1.0), c(3.0, 0.2)] {
            let r = finite_resolvent_diag(&d, z).unwrap();
            assert!((r.mean() - stieltjes(d.values(), z)).norm() < 1e-13);
            for v in &r.values {
                assert!(v.im > 0.0 && v.norm() <= 1.0 / z.im + 1e-12);
            }
        }
    }

    #[test]
    fn window_bound_on_c10() {
        let d = decompose_graph(&cycle_graph(10).unwrap()).unwrap();
        let chk = window_bound_check(&d, 0.0, 0.5).unwrap();
        assert!(chk.holds);
        let chk = window_bound_check(&d, 2.0 * (2.0 * std::f64::consts::PI / 10.0).cos(), 0.01).unwrap();
        // centred on a double eigenvalue: 2 t Im R ~ 2 Pi = 0.4, so slack ~ 0.2
        assert!(chk.holds && (chk.worst_slack - 0.2).abs() < 0.01);
    }

    #[test]
    fn neumann_and_dense_agree() {
        let g = cycle_graph(7).unwrap();
        let d = decompose_graph(&g).unwrap();
        for z in [c(0.5, 0.5), c(1.0, 4.0), c(-6.0, 0.1)] {
            let full = finite_resolvent_diag(&d, z).unwrap();
            assert!((resolvent_entry(&g, 3, z).unwrap() - full.values[3]).norm() < 1e-12);
        }
    }
}
