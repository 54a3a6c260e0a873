//! Finite graphs in the half-edge representation.
//!
//! A graph is a quadruple `(V, E, iota, o)`: `V = 0..n`, `E` a set of
//! half-edges, `o(e)` the origin vertex of `e` and `iota` a fixed-point-free
//! involution pairing the two halves of every edge. The end vertex of `e` is
//! `t(e) = o(iota(e))`. Loops are edges whose two halves share an origin; they
//! contribute 2 to the adjacency diagonal. Multi-edges are allowed.

mod cayley;
mod families;
mod io;
mod lift;
mod product;

use std::collections::VecDeque;

use faer::Mat;

use crate::error::{Error, Result};

pub use cayley::{cayley_graph, GroupTable};
pub use families::{complete_graph, cycle_graph, empty_graph, path_graph, star_graph};
pub use io::{parse_edge_list, parse_group_table, read_edge_list, write_edge_list, write_group_table};
pub use lift::{random_lift, LiftSpec};
pub use product::{product_graph, ProductRule, Relation};

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    vertex_count: usize,
    origin: Vec<usize>,
    involution: Vec<usize>,
    edge_of: Vec<usize>,
    edge_rep: Vec<usize>,
    weights: Option<Vec<f64>>,
    offsets: Vec<usize>,
    incident: Vec<usize>,
}

impl Graph {
    /// Builds a graph from its half-edge data.
    ///
    /// `weights`, when present, is indexed by half-edge and must agree on the
    /// two halves of every edge.
    pub fn from_half_edges(
        vertex_count: usize,
        origin: Vec<usize>,
        involution: Vec<usize>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        let m = origin.len();
        if involution.len() != m {
            return Err(Error::InvalidGraph(format!(
                "{} origins but {} involution entries",
                m,
                involution.len()
            )));
        }
        for (e, (&o, &i)) in origin.iter().zip(&involution).enumerate() {
            if o >= vertex_count {
                return Err(Error::InvalidGraph(format!("half-edge {e} has origin {o} >= {vertex_count}")));
            }
            if i >= m || involution[i] != e {
                return Err(Error::InvalidGraph(format!("involution is not an involution at half-edge {e}")));
            }
            if i == e {
                return Err(Error::InvalidGraph(format!("half-edge {e} is paired with itself")));
            }
        }
        if let Some(w) = &weights {
            if w.len() != m {
                return Err(Error::InvalidGraph("one weight per half-edge expected".into()));
            }
            for e in 0..m {
                if w[e] != w[involution[e]] || !w[e].is_finite() {
                    return Err(Error::InvalidGraph(format!("inconsistent weight on half-edge {e}")));
                }
            }
        }

        let mut edge_of = vec![usize::MAX; m];
        let mut edge_rep = Vec::with_capacity(m / 2);
        for e in 0..m {
            if e < involution[e] {
                edge_of[e] = edge_rep.len();
                edge_of[involution[e]] = edge_rep.len();
                edge_rep.push(e);
            }
        }
        let weights = weights.map(|w| edge_rep.iter().map(|&e| w[e]).collect());

        let mut offsets = vec![0usize; vertex_count + 1];
        for &o in &origin {
            offsets[o + 1] += 1;
        }
        for v in 0..vertex_count {
            offsets[v + 1] += offsets[v];
        }
        let mut fill = offsets.clone();
        let mut incident = vec![0usize; m];
        for (e, &o) in origin.iter().enumerate() {
            incident[fill[o]] = e;
            fill[o] += 1;
        }

        Ok(Graph { vertex_count, origin, involution, edge_of, edge_rep, weights, offsets, incident })
    }

    /// Unweighted graph from an edge list; edge `k` owns half-edges `2k`
    /// (at `u`) and `2k + 1` (at `v`).
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut origin = Vec::with_capacity(2 * edges.len());
        let mut involution = Vec::with_capacity(2 * edges.len());
        for (k, &(u, v)) in edges.iter().enumerate() {
            origin.push(u);
            origin.push(v);
            involution.push(2 * k + 1);
            involution.push(2 * k);
        }
        Self::from_half_edges(vertex_count, origin, involution, None)
    }

    pub fn from_weighted_edges(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
        let g = Self::from_edges(vertex_count, &pairs)?;
        let w: Vec<f64> = edges.iter().flat_map(|&(_, _, w)| [w, w]).collect();
        Self::from_half_edges(vertex_count, g.origin, g.involution, Some(w))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn half_edge_count(&self) -> usize {
        self.origin.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_rep.len()
    }

    pub fn origin(&self, e: usize) -> usize {
        self.origin[e]
    }

    pub fn involution(&self, e: usize) -> usize {
        self.involution[e]
    }

    pub fn target(&self, e: usize) -> usize {
        self.origin[self.involution[e]]
    }

    /// Edge class of half-edge `e`.
    pub fn edge_of(&self, e: usize) -> usize {
        self.edge_of[e]
    }

    /// Smaller half-edge id of edge class `k`.
    pub fn edge_representative(&self, k: usize) -> usize {
        self.edge_rep[k]
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn edge_weight(&self, k: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[k])
    }

    pub fn half_edge_weight(&self, e: usize) -> f64 {
        self.edge_weight(self.edge_of[e])
    }

    /// Half-edges whose origin is `v`.
    pub fn half_edges_at(&self, v: usize) -> &[usize] {
        &self.incident[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.vertex_count).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Endpoints of the half-edges at `v`, with multiplicity (a loop shows `v` twice).
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.half_edges_at(v).iter().map(move |&e| self.target(e))
    }

    /// Edge classes as `(o(rep), t(rep), weight)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edge_rep
            .iter()
            .enumerate()
            .map(move |(k, &e)| (self.origin[e], self.target(e), self.edge_weight(k)))
    }

    pub fn has_loops(&self) -> bool {
        self.edge_rep.iter().any(|&e| self.origin[e] == self.target(e))
    }

    /// No loops and no parallel edges.
    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.edge_count());
        for (u, v, _) in self.edges() {
            if u == v || !seen.insert((u.min(v), u.max(v))) {
                return false;
            }
        }
        true
    }

    /// Largest weighted row sum; an upper bound on the operator norm of the
    /// adjacency matrix.
    pub fn max_weighted_degree(&self) -> f64 {
        (0..self.vertex_count)
            .map(|v| self.half_edges_at(v).iter().map(|&e| self.half_edge_weight(e).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Dense adjacency matrix: entry `(i, j)` sums the weights of the
    /// half-edges from `i` to `j`.
    pub fn adjacency_matrix(&self) -> Mat<f64> {
        let n = self.vertex_count;
        let mut a = Mat::<f64>::zeros(n, n);
        for e in 0..self.half_edge_count() {
            a[(self.origin[e], self.target(e))] += self.half_edge_weight(e);
        }
        a
    }

    /// Breadth-first distances from `x`; `None` outside the component of `x`.
    pub fn bfs_distances(&self, x: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count];
        let mut queue = VecDeque::new();
        dist[x] = Some(0);
        queue.push_back(x);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for w in self.neighbors(v) {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count == 0 || self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// Disjoint union; vertices of later graphs are shifted past earlier ones.
    pub fn disjoint_union(graphs: &[&Graph]) -> Result<Graph> {
        let mut origin = Vec::new();
        let mut involution = Vec::new();
        let mut weights = Vec::new();
        let any_weighted = graphs.iter().any(|g| g.is_weighted());
        let mut shift_v = 0;
        for g in graphs {
            let shift_e = origin.len();
            for e in 0..g.half_edge_count() {
                origin.push(g.origin[e] + shift_v);
                involution.push(g.involution[e] + shift_e);
                weights.push(g.half_edge_weight(e));
            }
            shift_v += g.vertex_count;
        }
        Graph::from_half_edges(shift_v, origin, involution, any_weighted.then_some(weights))
    }

    fn check_vertex(&self, x: usize) -> Result<()> {
        if x >= self.vertex_count {
            return Err(Error::InvalidParameter(format!("vertex {x} out of range 0..{}", self.vertex_count)));
        }
        Ok(())
    }
}

/// BFS from `x` up to depth `cap`, returning distances and the edge class
/// through which each vertex was discovered.
fn bfs_tree(g: &Graph, x: usize, cap: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    const UNSEEN: usize = usize::MAX;
    let mut dist = vec![UNSEEN; g.vertex_count()];
    let mut parent_edge = vec![UNSEEN; g.vertex_count()];
    let mut order = vec![x];
    dist[x] = 0;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        if dist[v] >= cap {
            continue;
        }
        for &e in g.half_edges_at(v) {
            let w = g.target(e);
            if dist[w] == UNSEEN {
                dist[w] = dist[v] + 1;
                parent_edge[w] = g.edge_of(e);
                order.push(w);
            }
        }
    }
    (dist, parent_edge, order)
}

/// Largest radius `rho` such that the ball `B(x, rho)` spanned by paths of
/// length at most `rho` from `x` is a tree.
///
/// Acyclic components return the graph order `n`, which no finite radius in
/// the graph reaches.
pub fn injectivity_radius(g: &Graph, x: usize) -> Result<usize> {
    g.check_vertex(x)?;
    Ok(injectivity_radius_capped(g, x, g.vertex_count()))
}

/// `min(injectivity_radius(g, x), cap)`, exploring only the ball of radius `cap`.
pub fn injectivity_radius_capped(g: &Graph, x: usize, cap: usize) -> usize {
    let (dist, parent_edge, order) = bfs_tree(g, x, cap);
    let mut best = cap;
    for &v in &order {
        for &e in g.half_edges_at(v) {
            let w = g.target(e);
            let k = g.edge_of(e);
            if dist[w] == usize::MAX || parent_edge[w] == k || parent_edge[v] == k {
                continue;
            }
            best = best.min(dist[v].min(dist[w]));
        }
    }
    best
}

/// Length of the shortest cycle through `x` (loops have length 1, parallel
/// edges length 2), or `None` if `x` lies on no cycle.
pub fn shortest_cycle_through(g: &Graph, x: usize) -> Result<Option<usize>> {
    g.check_vertex(x)?;
    let (dist, parent_edge, order) = bfs_tree(g, x, usize::MAX);
    // branch[v]: the edge class leaving x on the tree path to v
    let mut branch = vec![usize::MAX; g.vertex_count()];
    for &v in order.iter().skip(1) {
        let k = parent_edge[v];
        let e = g.edge_representative(k);
        let p = if g.target(e) == v { g.origin(e) } else { g.target(e) };
        branch[v] = if p == x { k } else { branch[p] };
    }
    let mut best: Option<usize> = None;
    for &v in &order {
        for &e in g.half_edges_at(v) {
            let w = g.target(e);
            let k = g.edge_of(e);
            if parent_edge[w] == k || parent_edge[v] == k {
                continue;
            }
            let len = if v == x && w == x {
                Some(1)
            } else if v == x {
                Some(dist[w] + 1)
            } else if w == x {
                Some(dist[v] + 1)
            } else if branch[v] != branch[w] {
                Some(dist[v] + dist[w] + 1)
            } else {
                None
            };
            if let Some(l) = len {
                best = Some(best.map_or(l, |b: usize| b.min(l)));
            }
        }
    }
    Ok(best)
}

/// Number of vertices lying on a cycle of length at most `max_len`.
pub fn count_on_short_cycles(g: &Graph, max_len: usize) -> usize {
    (0..g.vertex_count())
        .filter(|&x| matches!(shortest_cycle_through(g, x), Ok(Some(l)) if l <= max_len))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn involution_round_trip_and_targets() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 2)]).unwrap();
        for e in 0..g.half_edge_count() {
            assert_eq!(g.involution(g.involution(e)), e);
            assert_ne!(g.involution(e), e);
        }
        assert_eq!(g.degree(2), 3);
        assert!(g.has_loops());
        assert!(!g.is_simple());
    }

    #[test]
    fn rejects_bad_half_edge_data() {
        assert!(Graph::from_half_edges(2, vec![0, 1], vec![0, 1], None).is_err());
        assert!(Graph::from_half_edges(2, vec![0, 2], vec![1, 0], None).is_err());
        assert!(Graph::from_half_edges(2, vec![0, 1, 1], vec![1, 2, 0], None).is_err());
        assert!(Graph::from_half_edges(2, vec![0, 1], vec![1, 0], Some(vec![1.0, 2.0])).is_err());
    }

    #[test]
    fn adjacency_conventions() {
        let k3 = complete_graph(3).unwrap();
        let a = k3.adjacency_matrix();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a[(i, j)], if i == j { 0.0 } else { 1.0 });
            }
        }
        let loop_graph = Graph::from_edges(1, &[(0, 0)]).unwrap();
        assert_eq!(loop_graph.adjacency_matrix()[(0, 0)], 2.0);
        let empty = empty_graph(4);
        let a = empty.adjacency_matrix();
        assert!((0..4).all(|i| (0..4).all(|j| a[(i, j)] == 0.0)));
        let multi = Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(multi.adjacency_matrix()[(0, 1)], 2.0);
        let weighted = Graph::from_weighted_edges(2, &[(0, 1, 0.5)]).unwrap();
        assert_eq!(weighted.adjacency_matrix()[(1, 0)], 0.5);
    }

    #[test]
    fn injectivity_radius_examples() {
        let c6 = cycle_graph(6).unwrap();
        for x in 0..6 {
            assert_eq!(injectivity_radius(&c6, x).unwrap(), 2);
        }
        let k4 = complete_graph(4).unwrap();
        for x in 0..4 {
            assert_eq!(injectivity_radius(&k4, x).unwrap(), 1);
        }
        let tree = Graph::from_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        for x in 0..5 {
            assert_eq!(injectivity_radius(&tree, x).unwrap(), 5);
        }
        let c5 = cycle_graph(5).unwrap();
        assert_eq!(injectivity_radius(&c5, 0).unwrap(), 2);
        let looped = Graph::from_edges(2, &[(0, 1), (1, 1)]).unwrap();
        assert_eq!(injectivity_radius(&looped, 0).unwrap(), 1);
        assert_eq!(injectivity_radius(&looped, 1).unwrap(), 0);
        assert_eq!(injectivity_radius_capped(&c6, 0, 1), 1);
    }

    #[test]
    fn shortest_cycles() {
        let c6 = cycle_graph(6).unwrap();
        assert_eq!(shortest_cycle_through(&c6, 3).unwrap(), Some(6));
        let k4 = complete_graph(4).unwrap();
        assert_eq!(shortest_cycle_through(&k4, 0).unwrap(), Some(3));
        let path = path_graph(4).unwrap();
        assert_eq!(shortest_cycle_through(&path, 1).unwrap(), None);
        // triangle with a pendant path: the pendant vertex lies on no cycle
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]).unwrap();
        assert_eq!(shortest_cycle_through(&g, 4).unwrap(), None);
        assert_eq!(shortest_cycle_through(&g, 1).unwrap(), Some(3));
        let multi = Graph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(shortest_cycle_through(&multi, 0).unwrap(), Some(2));
        assert_eq!(count_on_short_cycles(&g, 3), 3);
        assert_eq!(count_on_short_cycles(&c6, 5), 0);
    }

    #[test]
    fn disjoint_union_shifts() {
        let c3 = cycle_graph(3).unwrap();
        let c4 = cycle_graph(4).unwrap();
        let u = Graph::disjoint_union(&[&c3, &c4]).unwrap();
        assert_eq!(u.vertex_count(), 7);
        assert_eq!(u.edge_count(), 7);
        assert!(!u.is_connected());
        assert_eq!(u.neighbors(3).collect::<Vec<_>>().len(), 2);
    }
}
