use rand::seq::SliceRandom;

use super::Graph;
use crate::error::{invalid, Error, Result};
use crate::rng::rng_from_seed;

/// Permutation data of an `n`-lift: `permutations[e]` is `sigma_e` for
/// every base half-edge `e`, with `sigma_{iota(e)} = sigma_e^{-1}`.
///
/// Lifted vertex `(u, i)` has index `u * n + i` and lifted half-edge
/// `(e, i)` has id `e * n + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftSpec {
    pub base: Graph,
    pub n: usize,
    pub permutations: Vec<Vec<usize>>,
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n && p.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
}

fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// The half-edge carrying the sampled permutation of each edge class, in
/// the sampling order `(min vertex, max vertex, edge index)`.
fn oriented_half_edges(base: &Graph) -> Vec<usize> {
    let mut keyed: Vec<(usize, usize, usize, usize)> = (0..base.edge_count())
        .map(|k| {
            let e = base.edge_representative(k);
            let (u, v) = (base.origin(e), base.target(e));
            let oriented = if u <= v { e } else { base.involution(e) };
            (u.min(v), u.max(v), k, oriented)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(.., e)| e).collect()
}

impl LiftSpec {
    /// Completes permutations given on one half-edge per class into a
    /// spec; `oriented[k]` lists `(half-edge, sigma)` pairs.
    pub fn from_oriented(base: Graph, n: usize, oriented: Vec<(usize, Vec<usize>)>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("lift order n must be at least 1"));
        }
        let mut permutations = vec![Vec::new(); base.half_edge_count()];
        for (e, sigma) in oriented {
            if e >= base.half_edge_count() || !is_permutation(&sigma, n) {
                return Err(Error::InvalidParameter(format!("bad permutation for half-edge {e}")));
            }
            permutations[base.involution(e)] = inverse(&sigma);
            permutations[e] = sigma;
        }
        let spec = LiftSpec { base, n, permutations };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.permutations.len() != self.base.half_edge_count() {
            return Err(invalid("one permutation per base half-edge expected"));
        }
        for (e, sigma) in self.permutations.iter().enumerate() {
            if !is_permutation(sigma, self.n) {
                return Err(Error::InvalidParameter(format!("half-edge {e} has no valid permutation")));
            }
            let tau = &self.permutations[self.base.involution(e)];
            if (0..self.n).any(|i| tau[sigma[i]] != i) {
                return Err(Error::InvalidParameter(format!("permutations on half-edge {e} are not mutually inverse")));
            }
        }
        Ok(())
    }

    /// Builds the lifted graph on `V x [n]`.
    pub fn graph(&self) -> Result<Graph> {
        let (b, n) = (&self.base, self.n);
        let m = b.half_edge_count();
        let mut origin = Vec::with_capacity(m * n);
        let mut involution = Vec::with_capacity(m * n);
        let mut weights = Vec::with_capacity(m * n);
        for e in 0..m {
            let ie = b.involution(e);
            for i in 0..n {
                origin.push(b.origin(e) * n + i);
                involution.push(ie * n + self.permutations[e][i]);
                weights.push(b.half_edge_weight(e));
            }
        }
        Graph::from_half_edges(b.vertex_count() * n, origin, involution, b.is_weighted().then_some(weights))
    }

    /// Base vertex under lifted vertex `v`.
    pub fn project(&self, v: usize) -> usize {
        v / self.n
    }
}

/// Random labeled `n`-lift: independent uniform permutations, one per
/// base edge, drawn by Fisher–Yates in a fixed edge order.
pub fn random_lift(base: &Graph, n: usize, seed: u64) -> Result<(Graph, LiftSpec)> {
    if n == 0 {
        return Err(invalid("lift order n must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let oriented = oriented_half_edges(base)
        .into_iter()
        .map(|e| {
            let mut sigma: Vec<usize> = (0..n).collect();
            sigma.shuffle(&mut rng);
            (e, sigma)
        })
        .collect();
    let spec = LiftSpec::from_oriented(base.clone(), n, oriented)?;
    Ok((spec.graph()?, spec))
}
