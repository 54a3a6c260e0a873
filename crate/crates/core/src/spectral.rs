//! Dense eigendecompositions, spectral windows and delocalization measures.
//!
//! L^q norms on `[n]` are plain counting-measure sums
//! `||u||_q = (sum_i |u_i|^q)^{1/q}`.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;

/// Asymmetry tolerated by [`decompose`], relative to `max(1, max |a_ij|)`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Relative grouping tolerance: eigenvalues closer than
/// `GROUP_TOL * spectral_radius` are treated as one eigenspace.
pub const GROUP_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    vectors: Mat<f64>,
    groups: Vec<Range<usize>>,
    tau: f64,
}

fn check_symmetric(a: &Mat<f64>) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(invalid(format!("matrix is {}x{}, not square", n, a.ncols())));
    }
    let mut scale = 1.0f64;
    let mut asym = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            scale = scale.max(a[(i, j)].abs());
            if i > j {
                asym = asym.max((a[(i, j)] - a[(j, i)]).abs());
            }
        }
    }
    if !asym.is_finite() || asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

fn group_runs(values: &[f64], tau: f64) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > tau {
            groups.push(start..k);
            start = k;
        }
    }
    groups
}

fn default_tau(values: &[f64]) -> f64 {
    GROUP_TOL * values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Eigendecomposition of a symmetric matrix; `tau` defaults to
/// `1e-8 * spectral radius`.
pub fn decompose(a: &Mat<f64>, tau: Option<f64>) -> Result<EigenDecomposition> {
    check_symmetric(a)?;
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
    let values: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NoConvergence);
    }
    let vectors = evd.U().to_owned();
    EigenDecomposition::from_parts(values, vectors, tau)
}

/// Eigendecomposition of the adjacency matrix of `g`.
pub fn decompose_graph(g: &Graph) -> Result<EigenDecomposition> {
    decompose(&g.adjacency_matrix(), None)
}

/// Ascending eigenvalues only; cheaper than [`decompose`] for large inputs.
pub fn eigenvalues(a: &Mat<f64>) -> Result<Vec<f64>> {
    check_symmetric(a)?;
    let mut v = a.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::NoConvergence)?;
    v.sort_by(f64::total_cmp);
    Ok(v)
}

impl EigenDecomposition {
    /// Assembles a decomposition from ascending `values` and matching
    /// eigenvector columns.
    pub fn from_parts(values: Vec<f64>, vectors: Mat<f64>, tau: Option<f64>) -> Result<Self> {
        let n = values.len();
        if vectors.nrows() != n || vectors.ncols() != n {
            return Err(invalid("eigenvector matrix shape differs from eigenvalue count"));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("eigenvalues must be ascending"));
        }
        let tau = tau.unwrap_or_else(|| default_tau(&values));
        if !(tau >= 0.0) {
            return Err(invalid("grouping tolerance must be nonnegative"));
        }
        let groups = group_runs(&values, tau);
        Ok(EigenDecomposition { values, vectors, groups, tau })
    }

    /// Same eigenvalues and grouping with a new eigenbasis.
    pub fn with_vectors(&self, vectors: Mat<f64>) -> Result<Self> {
        if vectors.nrows() != self.dim() || vectors.ncols() != self.dim() {
            return Err(invalid("eigenvector matrix shape differs from eigenvalue count"));
        }
        Ok(EigenDecomposition { values: self.values.clone(), vectors, groups: self.groups.clone(), tau: self.tau })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &Mat<f64> {
        &self.vectors
    }

    /// Eigenvector `psi_k` as a slice.
    pub fn vector(&self, k: usize) -> &[f64] {
        self.vectors.col_as_slice(k)
    }

    /// Index ranges of the eigenspaces, in ascending eigenvalue order.
    pub fn groups(&self) -> &[Range<usize>] {
        &self.groups
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.len()).collect()
    }

    /// Largest eigenspace dimension `M_n`.
    pub fn max_multiplicity(&self) -> usize {
        self.groups.iter().map(|g| g.len()).max().unwrap_or(0)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn group_of(&self, k: usize) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&k))
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// A set `I` of eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum WindowSelector {
    /// Closed interval `[lo, hi]`, widened by the grouping tolerance.
    Interval { lo: f64, hi: f64 },
    /// Explicit eigenvalue indices.
    Indices(Vec<usize>),
    /// The whole eigenspace containing eigenvalue index `k`.
    Group(usize),
}

impl WindowSelector {
    pub fn interval(lo: f64, hi: f64) -> Self {
        WindowSelector::Interval { lo, hi }
    }

    /// Selected indices, ascending.
    pub fn resolve(&self, d: &EigenDecomposition) -> Result<Vec<usize>> {
        match self {
            WindowSelector::Interval { lo, hi } => {
                if !(lo <= hi) {
                    return Err(invalid(format!("empty interval [{lo}, {hi}]")));
                }
                let (a, b) = (lo - d.tau, hi + d.tau);
                Ok((0..d.dim()).filter(|&k| d.values[k] >= a && d.values[k] <= b).collect())
            }
            WindowSelector::Indices(idx) => {
                let mut idx = idx.clone();
                idx.sort_unstable();
                idx.dedup();
                if let Some(&k) = idx.iter().find(|&&k| k >= d.dim()) {
                    return Err(invalid(format!("eigenvalue index {k} out of range")));
                }
                Ok(idx)
            }
            WindowSelector::Group(k) => {
                let g = d.group_of(*k).ok_or_else(|| invalid(format!("eigenvalue index {k} out of range")))?;
                Ok(d.groups[g].clone().collect())
            }
        }
    }
}

impl fmt::Display for WindowSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSelector::Interval { lo, hi } => write!(f, "{lo}:{hi}"),
            WindowSelector::Group(k) => write!(f, "idx:{k}"),
            WindowSelector::Indices(idx) => {
                let contiguous = idx.windows(2).all(|w| w[1] == w[0] + 1);
                match (contiguous, idx.first(), idx.last()) {
                    (true, Some(a), Some(b)) => write!(f, "idx:{a}..{}", b + 1),
                    _ => {
                        let parts: Vec<String> = idx.iter().map(|k| k.to_string()).collect();
                        write!(f, "idx:{}", parts.join(","))
                    }
                }
            }
        }
    }
}

/// Parses `a:b` (closed interval), `idx:k` (eigenspace of index `k`),
/// `idx:i..j` (indices `i..j`) or `idx:i,j,k`.
impl FromStr for WindowSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || invalid(format!("unrecognised window {s:?}"));
        if let Some(rest) = s.strip_prefix("idx:") {
            if let Some((a, b)) = rest.split_once("..") {
                let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                if a >= b {
                    return Err(bad());
                }
                return Ok(WindowSelector::Indices((a..b).collect()));
            }
            if rest.contains(',') {
                let idx = rest.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
                return Ok(WindowSelector::Indices(idx));
            }
            return Ok(WindowSelector::Group(rest.parse().map_err(|_| bad())?));
        }
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let (lo, hi): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if !(lo <= hi) {
            return Err(bad());
        }
        Ok(WindowSelector::Interval { lo, hi })
    }
}

/// Eigenvalues selected by a window together with the projector diagonal
/// `Pi_I(x) = sum_{k in I} psi_k(x)^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralWindow {
    pub selector: WindowSelector,
    pub indices: Vec<usize>,
    pub proj_diag: Vec<f64>,
    /// Set when the window contains part, but not all, of an eigenspace.
    /// The diagonal then depends on the stored basis.
    pub splits_eigenspace: bool,
}

impl SpectralWindow {
    /// `N(I)`.
    pub fn count(&self) -> usize {
        self.indices.len()
    }

    pub fn dim(&self) -> usize {
        self.proj_diag.len()
    }
}

pub fn projector_diagonal(d: &EigenDecomposition, selector: &WindowSelector) -> Result<SpectralWindow> {
    let indices = selector.resolve(d)?;
    let n = d.dim();
    let mut proj_diag = vec![0.0; n];
    for &k in &indices {
        for (p, &v) in proj_diag.iter_mut().zip(d.vector(k)) {
            *p += v * v;
        }
    }
    let mut selected = vec![false; n];
    indices.iter().for_each(|&k| selected[k] = true);
    let splits_eigenspace = d.groups.iter().any(|g| {
        let hit = g.clone().filter(|&k| selected[k]).count();
        hit > 0 && hit < g.len()
    });
    Ok(SpectralWindow { selector: selector.clone(), indices, proj_diag, splits_eigenspace })
}

/// `(sum_i |u_i|^q)^{1/q}`; `q = inf` gives the max norm.
pub fn lq_norm(u: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        return u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    }
    u.iter().map(|x| x.abs().powf(q)).sum::<f64>().powf(1.0 / q)
}

/// `sum_x Pi_I(x)^{q/2}`.
pub fn deloc_measure(sw: &SpectralWindow, q: f64) -> Result<f64> {
    if !(q >= 2.0) {
        return Err(invalid(format!("q must be at least 2, got {q}")));
    }
    Ok(sw.proj_diag.iter().map(|p| p.max(0.0).powf(q / 2.0)).sum())
}

/// `||Pi_I||_{L^{q/2}} = deloc_measure^{2/q}`.
pub fn projector_norm(sw: &SpectralWindow, q: f64) -> Result<f64> {
    Ok(deloc_measure(sw, q)?.powf(2.0 / q))
}

/// Averaged participation ratio of the stored basis:
/// `N(I)^{-1} sum_{k in I} sum_i |psi_k(i)|^q`.
pub fn apr(d: &EigenDecomposition, selector: &WindowSelector, q: f64) -> Result<f64> {
    let indices = selector.resolve(d)?;
    if indices.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let total: f64 = indices.iter().map(|&k| d.vector(k).iter().map(|x| x.abs().powf(q)).sum::<f64>()).sum();
    Ok(total / indices.len() as f64)
}

/// `sup(I) - inf(I)` for interval windows.
pub fn sup_inf_residual_bound(sw: &SpectralWindow) -> Result<f64> {
    match sw.selector {
        WindowSelector::Interval { lo, hi } => Ok(hi - lo),
        _ => Err(Error::NotAnInterval),
    }
}

/// `||(A - lambda) u||_2`.
pub fn residual(a: &Mat<f64>, u: &[f64], lambda: f64) -> f64 {
    let n = u.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut s = -lambda * u[i];
        for (j, &uj) in u.iter().enumerate() {
            s += a[(i, j)] * uj;
        }
        acc += s * s;
    }
    acc.sqrt()
}

/// JSON view of a decomposition and one window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub values: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub window: String,
    pub count: usize,
    pub splits_eigenspace: bool,
    pub proj_diag: Vec<f64>,
}

impl SpectralSummary {
    pub fn new(d: &EigenDecomposition, sw: &SpectralWindow) -> Self {
        SpectralSummary {
            values: d.values.clone(),
            multiplicities: d.multiplicities(),
            window: sw.selector.to_string(),
            count: sw.count(),
            splits_eigenspace: sw.splits_eigenspace,
            proj_diag: sw.proj_diag.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn small_spectra() {
        let k4 = decompose_graph(&complete_graph(4).unwrap()).unwrap();
        assert!(close(k4.values(), &[-1.0, -1.0, -1.0, 3.0], 1e-12));
        assert_eq!(k4.multiplicities(), vec![3, 1]);
        let c4 = decompose_graph(&cycle_graph(4).unwrap()).unwrap();
        assert!(close(c4.values(), &[-2.0, 0.0, 0.0, 2.0], 1e-12));
        let c3 = decompose_graph(&cycle_graph(3).unwrap()).unwrap();
        assert!(close(c3.values(), &[-1.0, -1.0, 2.0], 1e-12));
        let c6 = decompose_graph(&cycle_graph(6).unwrap()).unwrap();
        assert_eq!(c6.max_multiplicity(), 2);
        let mut one = Mat::<f64>::zeros(1, 1);
        one[(0, 0)] = 2.5;
        let d = decompose(&one, None).unwrap();
        assert_eq!(d.values(), &[2.5]);
        assert!((d.vector(0)[0].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric() {
        let mut a = Mat::<f64>::zeros(2, 2);
        a[(0, 1)] = 1.0;
        assert!(matches!(decompose(&a, None), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn projector_examples() {
        let k4 = decompose_graph(&complete_graph(4).unwrap()).unwrap();
        let sw = projector_diagonal(&k4, &WindowSelector::interval(-1.0, -1.0)).unwrap();
        assert_eq!(sw.count(), 3);
        assert!(sw.proj_diag.iter().all(|p| (p - 0.75).abs() < 1e-12));
        assert!(!sw.splits_eigenspace);
        let all = projector_diagonal(&k4, &WindowSelector::interval(-10.0, 10.0)).unwrap();
        assert!(all.proj_diag.iter().all(|p| (p - 1.0).abs() < 1e-12));
        let c6 = decompose_graph(&cycle_graph(6).unwrap()).unwrap();
        let top = projector_diagonal(&c6, &WindowSelector::Indices(vec![5])).unwrap();
        assert!(top.proj_diag.iter().all(|p| (p - 1.0 / 6.0).abs() < 1e-12));
        let half = projector_diagonal(&c6, &WindowSelector::Indices(vec![3])).unwrap();
        assert!(half.splits_eigenspace);
        let group = projector_diagonal(&c6, &WindowSelector::Group(3)).unwrap();
        assert_eq!(group.count(), 2);
    }

    #[test]
    fn measures_on_small_graphs() {
        let c4 = decompose_graph(&cycle_graph(4).unwrap()).unwrap();
        let top = WindowSelector::Indices(vec![3]);
        assert!((apr(&c4, &top, 4.0).unwrap() - 0.25).abs() < 1e-12);
        assert!((apr(&c4, &top, 2.0).unwrap() - 1.0).abs() < 1e-12);
        let sw = projector_diagonal(&c4, &WindowSelector::interval(-0.5, 0.5)).unwrap();
        assert!((deloc_measure(&sw, 2.0).unwrap() - 2.0).abs() < 1e-12);
        // vertex-transitive: n (N/n)^{q/2}
        assert!((deloc_measure(&sw, 6.0).unwrap() - 4.0 * 0.5f64.powi(3)).abs() < 1e-12);
        assert!(deloc_measure(&sw, 1.0).is_err());
        assert!(matches!(apr(&c4, &WindowSelector::interval(5.0, 6.0), 2.0), Err(Error::EmptyWindow)));
    }

    #[test]
    fn residual_bound_requires_interval() {
        let c4 = decompose_graph(&cycle_graph(4).unwrap()).unwrap();
        let sw = projector_diagonal(&c4, &WindowSelector::interval(0.0, 1.0)).unwrap();
        assert_eq!(sup_inf_residual_bound(&sw).unwrap(), 1.0);
        let pt = projector_diagonal(&c4, &WindowSelector::interval(2.0, 2.0)).unwrap();
        assert_eq!(sup_inf_residual_bound(&pt).unwrap(), 0.0);
        let idx = projector_diagonal(&c4, &WindowSelector::Group(0)).unwrap();
        assert!(matches!(sup_inf_residual_bound(&idx), Err(Error::NotAnInterval)));
    }

    #[test]
    fn selector_parsing() {
        assert_eq!("-0.5:0.25".parse::<WindowSelector>().unwrap(), WindowSelector::interval(-0.5, 0.25));
        assert_eq!("idx:4".parse::<WindowSelector>().unwrap(), WindowSelector::Group(4));
        assert_eq!("idx:2..5".parse::<WindowSelector>().unwrap(), WindowSelector::Indices(vec![2, 3, 4]));
        assert_eq!("idx:1,7".parse::<WindowSelector>().unwrap(), WindowSelector::Indices(vec![1, 7]));
        assert!("1:0".parse::<WindowSelector>().is_err());
        assert!("idx:x".parse::<WindowSelector>().is_err());
        for s in ["0:1", "idx:3", "idx:2..5"] {
            assert_eq!(s.parse::<WindowSelector>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn summary_serializes() {
        let c4 = decompose_graph(&cycle_graph(4).unwrap()).unwrap();
        let sw = projector_diagonal(&c4, &WindowSelector::Group(1)).unwrap();
        let json = serde_json::to_string(&SpectralSummary::new(&c4, &sw)).unwrap();
        let back: SpectralSummary = serde_json::from_str(&json).unwrap();
        assert_eq!(back.multiplicities, vec![1, 2, 1]);
        assert_eq!(back.count, 2);
    }
}
