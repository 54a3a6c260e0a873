use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use super::ball::{cover_ball, rooted_ball, DEFAULT_SIZE_CAP};
use super::canon::{canonical_code, canonical_code_capped, CanonicalCode};
use crate::error::{invalid, Error, Result};
use crate::graph::{injectivity_radius_capped, Graph};

/// First 128 bits of the SHA-256 of a canonical code, as 32 hex digits.
pub fn code_digest(code: &CanonicalCode) -> String {
    let hash = Sha256::digest(code.0.as_bytes());
    hash[..16].iter().map(|b| format!("{b:02x}")).collect()
}

/// Distribution of depth-`h` rooted balls, keyed by code digest.
///
/// One witness code is kept per digest so that two distinct codes sharing a
/// digest are detected instead of being merged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallDistribution {
    pub depth: usize,
    pub distribution: BTreeMap<String, f64>,
    #[serde(skip)]
    witnesses: BTreeMap<String, CanonicalCode>,
}

impl BallDistribution {
    /// Normalizes `(code, weight)` pairs into a distribution.
    pub fn from_weighted_codes(depth: usize, items: impl IntoIterator<Item = (CanonicalCode, f64)>) -> Result<Self> {
        let mut distribution = BTreeMap::new();
        let mut witnesses: BTreeMap<String, CanonicalCode> = BTreeMap::new();
        let mut total = 0.0;
        for (code, w) in items {
            if !(w >= 0.0) {
                return Err(invalid("weights must be nonnegative"));
            }
            let key = code_digest(&code);
            match witnesses.get(&key) {
                Some(seen) if *seen != code => return Err(Error::DigestCollision),
                Some(_) => {}
                None => {
                    witnesses.insert(key.clone(), code);
                }
            }
            *distribution.entry(key).or_insert(0.0) += w;
            total += w;
        }
        if !(total > 0.0) {
            return Err(invalid("distribution has no mass"));
        }
        distribution.values_mut().for_each(|p| *p /= total);
        Ok(BallDistribution { depth, distribution, witnesses })
    }

    pub fn probability(&self, code: &CanonicalCode) -> f64 {
        self.distribution.get(&code_digest(code)).copied().unwrap_or(0.0)
    }

    pub fn support_size(&self) -> usize {
        self.distribution.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.distribution.values().sum()
    }

    pub fn witness(&self, digest: &str) -> Option<&CanonicalCode> {
        self.witnesses.get(digest)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Empirical distribution of the depth-`h` balls of `g` over all vertices.
pub fn ball_distribution(g: &Graph, h: usize) -> Result<BallDistribution> {
    let codes = ball_codes(g, h)?;
    BallDistribution::from_weighted_codes(h, codes.into_iter().map(|c| (c, 1.0)))
}

/// Canonical code of the depth-`h` ball around every vertex.
pub fn ball_codes(g: &Graph, h: usize) -> Result<Vec<CanonicalCode>> {
    (0..g.vertex_count())
        .into_par_iter()
        .map(|x| canonical_code(&rooted_ball(g, x, h)?))
        .collect()
}

/// Total variation `sup_A |p(A) - q(A)| = (1/2) sum |p - q|`.
pub fn tv_distance(p: &BallDistribution, q: &BallDistribution) -> Result<f64> {
    if p.depth != q.depth {
        return Err(Error::DepthMismatch(p.depth, q.depth));
    }
    for (key, code) in &p.witnesses {
        if q.witnesses.get(key).is_some_and(|other| other != code) {
            return Err(Error::DigestCollision);
        }
    }
    let mut sum = 0.0;
    for (key, &a) in &p.distribution {
        sum += (a - q.distribution.get(key).copied().unwrap_or(0.0)).abs();
    }
    for (key, &b) in &q.distribution {
        if !p.distribution.contains_key(key) {
            sum += b;
        }
    }
    Ok((0.5 * sum).min(1.0))
}

/// Depth-`h` distribution of the universal cover of `base` rooted at a
/// uniform base vertex; the local weak limit of random lifts of `base`.
pub fn lift_limit_distribution(base: &Graph, h: usize) -> Result<BallDistribution> {
    if !base.is_connected() {
        return Err(invalid("base graph must be connected"));
    }
    if base.min_degree() == 0 {
        return Err(invalid("base graph must have minimum degree at least 1"));
    }
    let codes = (0..base.vertex_count())
        .map(|v| canonical_code_capped(&cover_ball(base, v, h, DEFAULT_SIZE_CAP)?, DEFAULT_SIZE_CAP))
        .collect::<Result<Vec<_>>>()?;
    BallDistribution::from_weighted_codes(h, codes.into_iter().map(|c| (c, 1.0)))
}

/// Fraction of vertices with injectivity radius below `r`.
pub fn bst_profile(g: &Graph, r: usize) -> f64 {
    let n = g.vertex_count();
    let short = (0..n).into_par_iter().filter(|&x| injectivity_radius_capped(g, x, r) < r).count();
    short as f64 / n as f64
}

/// Fraction of vertices whose depth-`h` ball contains a cycle.
pub fn non_tree_fraction(g: &Graph, h: usize) -> Result<f64> {
    let n = g.vertex_count();
    let count = (0..n)
        .into_par_iter()
        .map(|x| rooted_ball(g, x, h).map(|b| usize::from(!b.is_tree())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(count as f64 / n as f64)
}

/// Depth `floor(log n / (8 log(d - 1)))` for lifts of order `n`
/// of a base graph with maximum degree `d >= 3`.
pub fn lift_depth(n: usize, max_degree: usize) -> Result<usize> {
    if max_degree < 3 {
        return Err(invalid("depth rule needs maximum degree at least 3"));
    }
    Ok(((n as f64).ln() / (8.0 * ((max_degree - 1) as f64).ln())).floor() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, path_graph, LiftSpec};

    #[test]
    fn transitive_graphs_have_one_atom() {
        let c8 = cycle_graph(8).unwrap();
        let d = ball_distribution(&c8, 2).unwrap();
        assert_eq!(d.support_size(), 1);
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
        let union = Graph::disjoint_union(&[&cycle_graph(6).unwrap(), &c8]).unwrap();
        assert_eq!(ball_distribution(&union, 2).unwrap().support_size(), 1);
        assert_eq!(ball_distribution(&union, 3).unwrap().support_size(), 2);
    }

    #[test]
    fn tv_examples() {
        let path = path_graph(4).unwrap();
        let star = crate::graph::star_graph(3).unwrap();
        let p = ball_distribution(&path, 1).unwrap();
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        let codes: Vec<CanonicalCode> = ball_codes(&star, 3).unwrap();
        let (a, b) = (codes[0].clone(), codes[1].clone());
        let p = BallDistribution::from_weighted_codes(3, [(a.clone(), 0.7), (b.clone(), 0.3)]).unwrap();
        let q = BallDistribution::from_weighted_codes(3, [(a.clone(), 0.5), (b, 0.5)]).unwrap();
        assert!((tv_distance(&p, &q).unwrap() - 0.2).abs() < 1e-12);
        let k3 = ball_distribution(&complete_graph(3).unwrap(), 3).unwrap();
        let only_a = BallDistribution::from_weighted_codes(3, [(a, 1.0)]).unwrap();
        assert!((tv_distance(&k3, &only_a).unwrap() - 1.0).abs() < 1e-12);
        let shallow = ball_distribution(&path, 1).unwrap();
        assert!(matches!(tv_distance(&shallow, &p), Err(Error::DepthMismatch(1, 3))));
    }

    #[test]
    fn limit_distribution_examples() {
        let bouquet = Graph::from_edges(1, &[(0, 0)]).unwrap();
        let line = lift_limit_distribution(&bouquet, 3).unwrap();
        let z = ball_distribution(&cycle_graph(20).unwrap(), 3).unwrap();
        assert_eq!(tv_distance(&line, &z).unwrap(), 0.0);
        let k4 = lift_limit_distribution(&complete_graph(4).unwrap(), 2).unwrap();
        assert_eq!(k4.support_size(), 1);
        // degrees {2, 3}: theta graph with two degree-3 and two degree-2 vertices
        let theta = Graph::from_edges(4, &[(0, 1), (0, 2), (2, 1), (0, 3), (3, 1)]).unwrap();
        let d = lift_limit_distribution(&theta, 1).unwrap();
        assert_eq!(d.support_size(), 2);
        let probs: Vec<f64> = d.distribution.values().copied().collect();
        assert!(probs.iter().all(|p| (p - 0.5).abs() < 1e-12));
        assert!(lift_limit_distribution(&Graph::disjoint_union(&[&bouquet, &bouquet]).unwrap(), 1).is_err());
    }

    #[test]
    fn k4_two_lift_by_hand() {
        // sigma = swap on edges 01 and 23, identity elsewhere: the lift is the
        // cube graph Q_3, whose 1-balls are all stars K_{1,3}
        let k4 = complete_graph(4).unwrap();
        let swap = vec![1, 0];
        let id = vec![0, 1];
        let mut oriented = Vec::new();
        for k in 0..k4.edge_count() {
            let e = k4.edge_representative(k);
            let (u, v) = (k4.origin(e), k4.target(e));
            let sigma = if (u, v) == (0, 1) || (u, v) == (2, 3) { swap.clone() } else { id.clone() };
            oriented.push((e, sigma));
        }
        let lift = LiftSpec::from_oriented(k4.clone(), 2, oriented).unwrap().graph().unwrap();
        let d = ball_distribution(&lift, 1).unwrap();
        // triangles survive through base triangles that avoid both swapped edges: none,
        // since every triangle of K_4 uses exactly one of 01, 23
        assert_eq!(d.support_size(), 1);
        let limit = lift_limit_distribution(&k4, 1).unwrap();
        assert_eq!(tv_distance(&d, &limit).unwrap(), 0.0);
        // at depth 2 every vertex of Q_3 sees 4-cycles
        let d2 = ball_distribution(&lift, 2).unwrap();
        assert_eq!(tv_distance(&d2, &lift_limit_distribution(&k4, 2).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn bst_examples() {
        let tree = path_graph(9).unwrap();
        assert_eq!(bst_profile(&tree, 5), 0.0);
        assert_eq!(bst_profile(&cycle_graph(6).unwrap(), 3), 1.0);
        assert_eq!(bst_profile(&cycle_graph(6).unwrap(), 2), 0.0);
        assert_eq!(lift_depth(100, 3).unwrap(), 0);
        assert_eq!(lift_depth(400, 3).unwrap(), 1);
        assert!(lift_depth(400, 2).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = ball_distribution(&path_graph(5).unwrap(), 1).unwrap();
        let back = BallDistribution::from_json(&d.to_json().unwrap()).unwrap();
        assert_eq!(back.depth, 1);
        assert_eq!(back.distribution, d.distribution);
    }
}
