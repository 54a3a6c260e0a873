use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default cap on the number of vertices of a ball.
pub const DEFAULT_SIZE_CAP: usize = 5000;

/// A depth-`h` neighbourhood relabelled in BFS order, so the root is vertex 0.
///
/// `source[v]` is the vertex of the host graph that `v` came from (for
/// universal-cover balls, the base vertex it projects to).
#[derive(Clone, Debug, PartialEq)]
pub struct RootedBall {
    pub graph: Graph,
    pub depth: usize,
    pub dist: Vec<usize>,
    pub source: Vec<usize>,
}

impl RootedBall {
    pub fn root(&self) -> usize {
        0
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn is_tree(&self) -> bool {
        self.graph.edge_count() + 1 == self.graph.vertex_count()
    }
}

/// Ball of radius `h` around `x`: every vertex within distance `h` and every
/// edge of `g` joining two of them, including edges between two vertices at
/// distance exactly `h`.
pub fn rooted_ball(g: &Graph, x: usize, h: usize) -> Result<RootedBall> {
    if x >= g.vertex_count() {
        return Err(Error::InvalidParameter(format!("vertex {x} out of range")));
    }
    let mut index = vec![usize::MAX; g.vertex_count()];
    let mut order = vec![x];
    let mut dist = vec![0];
    index[x] = 0;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        let d = dist[head];
        head += 1;
        if d == h {
            continue;
        }
        for w in g.neighbors(v) {
            if index[w] == usize::MAX {
                index[w] = order.len();
                order.push(w);
                dist.push(d + 1);
            }
        }
    }
    let mut edges = Vec::new();
    for &v in &order {
        for &e in g.half_edges_at(v) {
            let w = g.target(e);
            if index[w] != usize::MAX && e < g.involution(e) {
                edges.push((index[v], index[w], g.half_edge_weight(e)));
            }
        }
    }
    let graph = if g.is_weighted() {
        Graph::from_weighted_edges(order.len(), &edges)?
    } else {
        let pairs: Vec<_> = edges.iter().map(|&(a, b, _)| (a, b)).collect();
        Graph::from_edges(order.len(), &pairs)?
    };
    Ok(RootedBall { graph, depth: h, dist, source: order })
}

/// Depth-`h` ball of the universal cover of `base` around a lift of `v`,
/// built by unfolding non-backtracking walks.
pub fn cover_ball(base: &Graph, v: usize, h: usize, cap: usize) -> Result<RootedBall> {
    if v >= base.vertex_count() {
        return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
    }
    // (base vertex, half-edge used to arrive)
    let mut nodes: Vec<(usize, Option<usize>)> = vec![(v, None)];
    let mut dist = vec![0];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if dist[i] == h {
            continue;
        }
        let (u, arrived) = nodes[i];
        for &f in base.half_edges_at(u) {
            if arrived.is_some_and(|e| base.involution(e) == f) {
                continue;
            }
            let j = nodes.len();
            if j >= cap {
                return Err(Error::SizeCap { size: j + 1, cap });
            }
            nodes.push((base.target(f), Some(f)));
            dist.push(dist[i] + 1);
            edges.push((i, j, base.half_edge_weight(f)));
            queue.push_back(j);
        }
    }
    let graph = if base.is_weighted() {
        Graph::from_weighted_edges(nodes.len(), &edges)?
    } else {
        let pairs: Vec<_> = edges.iter().map(|&(a, b, _)| (a, b)).collect();
        Graph::from_edges(nodes.len(), &pairs)?
    };
    Ok(RootedBall { graph, depth: h, dist, source: nodes.into_iter().map(|(u, _)| u).collect() })
}
