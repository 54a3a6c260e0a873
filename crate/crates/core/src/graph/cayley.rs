use super::Graph;
use crate::error::{Error, Result};

/// A finite group given by its multiplication table, together with a
/// real weight function `alpha` on its elements.
///
/// `mult[i][j]` is the index of `g_i g_j`. The weight is symmetric
/// under inversion whenever it describes an undirected Cayley graph.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupTable {
    mult: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    weight: Vec<f64>,
}

impl GroupTable {
    /// Validates `mult` (Latin square with a two-sided identity) and stores
    /// the weight. Associativity is assumed rather than checked.
    pub fn new(mult: Vec<Vec<usize>>, weight: Vec<f64>) -> Result<Self> {
        let m = mult.len();
        if m == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        for row in &mult {
            if row.len() != m {
                return Err(Error::InvalidGroup("table is not square".into()));
            }
        }
        for i in 0..m {
            let mut row_seen = vec![false; m];
            let mut col_seen = vec![false; m];
            for j in 0..m {
                let (r, c) = (mult[i][j], mult[j][i]);
                if r >= m || c >= m || row_seen[r] || col_seen[c] {
                    return Err(Error::InvalidGroup(format!("not a Latin square at index {i}")));
                }
                row_seen[r] = true;
                col_seen[c] = true;
            }
        }
        let identity = (0..m)
            .find(|&e| (0..m).all(|j| mult[e][j] == j && mult[j][e] == j))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let inverse: Vec<usize> = (0..m)
            .map(|i| (0..m).find(|&j| mult[i][j] == identity).expect("Latin square row contains identity"))
            .collect();
        if weight.len() != m {
            return Err(Error::InvalidGroup(format!("{} weights for a group of order {m}", weight.len())));
        }
        Ok(GroupTable { mult, identity, inverse, weight })
    }

    /// Cyclic group `Z_n` with zero weight.
    pub fn cyclic(n: usize) -> Result<Self> {
        let mult = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::new(mult, vec![0.0; n])
    }

    /// Direct product; element `(a, b)` has index `a * |B| + b`, and the
    /// weight is reset to zero.
    pub fn direct_product(a: &GroupTable, b: &GroupTable) -> Result<Self> {
        let (ma, mb) = (a.order(), b.order());
        let mult = (0..ma * mb)
            .map(|i| {
                (0..ma * mb)
                    .map(|j| a.mult[i / mb][j / mb] * mb + b.mult[i % mb][j % mb])
                    .collect()
            })
            .collect();
        Self::new(mult, vec![0.0; ma * mb])
    }

    /// `(Z_2)^k` as a k-fold direct product.
    pub fn elementary_abelian_2(k: usize) -> Result<Self> {
        let mut g = Self::cyclic(1)?;
        let z2 = Self::cyclic(2)?;
        for _ in 0..k {
            g = Self::direct_product(&g, &z2)?;
        }
        Ok(g)
    }

    /// Replaces the weight by the indicator of `gens` closed under inversion.
    pub fn with_generators(mut self, gens: &[usize]) -> Result<Self> {
        let mut w = vec![0.0; self.order()];
        for &s in gens {
            if s >= self.order() {
                return Err(Error::InvalidGroup(format!("generator {s} out of range")));
            }
            w[s] = 1.0;
            w[self.inverse[s]] = 1.0;
        }
        self.weight = w;
        Ok(self)
    }

    pub fn with_weights(mut self, weight: Vec<f64>) -> Result<Self> {
        if weight.len() != self.order() {
            return Err(Error::InvalidGroup("weight length differs from group order".into()));
        }
        self.weight = weight;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mult[i][j]
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mult
    }

    pub fn is_weight_symmetric(&self) -> bool {
        (0..self.order()).all(|g| self.weight[g] == self.weight[self.inverse[g]])
    }
}

/// Cayley graph with weighted adjacency `A[i][j] = alpha(g_j g_i^{-1})`.
///
/// A nonzero `alpha(identity)` becomes one loop per vertex of weight
/// `alpha(identity) / 2`, so the diagonal matches the loop convention.
/// The result is unweighted when every nonzero weight equals 1 and the
/// identity has weight 0.
pub fn cayley_graph(g: &GroupTable) -> Result<Graph> {
    if !g.is_weight_symmetric() {
        return Err(Error::InvalidGroup("weight is not symmetric under inversion".into()));
    }
    let m = g.order();
    let mut edges = Vec::new();
    for i in 0..m {
        let inv_i = g.inverse(i);
        for j in i..m {
            let a = g.weight[g.mul(j, inv_i)];
            if a != 0.0 {
                edges.push((i, j, if i == j { a / 2.0 } else { a }));
            }
        }
    }
    let plain = g.weight[g.identity] == 0.0 && g.weight.iter().all(|&w| w == 0.0 || w == 1.0);
    if plain {
        let pairs: Vec<_> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
        Graph::from_edges(m, &pairs)
    } else {
        Graph::from_weighted_edges(m, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph};

    fn same_adjacency(a: &Graph, b: &Graph) -> bool {
        let (x, y) = (a.adjacency_matrix(), b.adjacency_matrix());
        x.nrows() == y.nrows()
            && (0..x.nrows()).all(|i| (0..x.ncols()).all(|j| (x[(i, j)] - y[(i, j)]).abs() < 1e-15))
    }

    #[test]
    fn cyclic_group_gives_cycle() {
        for n in 3..9 {
            let g = GroupTable::cyclic(n).unwrap().with_generators(&[1]).unwrap();
            assert!(same_adjacency(&cayley_graph(&g).unwrap(), &cycle_graph(n).unwrap()));
        }
    }

    #[test]
    fn klein_four_gives_k4() {
        let g = GroupTable::elementary_abelian_2(2).unwrap().with_generators(&[1, 2, 3]).unwrap();
        assert!(same_adjacency(&cayley_graph(&g).unwrap(), &complete_graph(4).unwrap()));
    }

    #[test]
    fn rejects_invalid_tables() {
        assert!(GroupTable::new(vec![vec![0, 1], vec![0, 1]], vec![0.0; 2]).is_err());
        assert!(GroupTable::new(vec![vec![1, 0], vec![0, 1]], vec![0.0; 2]).is_ok());
        assert!(GroupTable::new(vec![vec![1, 2], vec![2, 1]], vec![0.0; 2]).is_err());
        let z3 = GroupTable::cyclic(3).unwrap().with_weights(vec![0.0, 1.0, 0.5]).unwrap();
        assert!(cayley_graph(&z3).is_err());
    }

    #[test]
    fn weighted_rows_are_constant() {
        let z6 = GroupTable::cyclic(6).unwrap().with_weights(vec![0.3, 1.0, 0.25, 2.0, 0.25, 1.0]).unwrap();
        let a = cayley_graph(&z6).unwrap().adjacency_matrix();
        let sums: Vec<f64> = (0..6).map(|i| (0..6).map(|j| a[(i, j)]).sum()).collect();
        for s in &sums {
            assert!((s - 4.8).abs() < 1e-12);
        }
        assert!((a[(2, 2)] - 0.3).abs() < 1e-15);
    }
}
