//! Canonical codes of rooted graphs.
//!
//! Trees are encoded level by level in the style of Aho–Hopcroft–Ullman.
//! Other rooted multigraphs go through colour refinement seeded with the
//! distance to the root, then individualization with automorphism pruning;
//! the code is the lexicographically smallest relabelled edge list over all
//! leaves of the search tree. Edge weights are not part of the code.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ball::{RootedBall, DEFAULT_SIZE_CAP};
use crate::error::{Error, Result};

/// Isomorphism-complete code of a rooted graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalCode(pub String);

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn canonical_code(b: &RootedBall) -> Result<CanonicalCode> {
    canonical_code_capped(b, DEFAULT_SIZE_CAP)
}

pub fn canonical_code_capped(b: &RootedBall, cap: usize) -> Result<CanonicalCode> {
    let n = b.vertex_count();
    if n > cap {
        return Err(Error::SizeCap { size: n, cap });
    }
    let adj = Adjacency::new(b);
    if b.is_tree() {
        Ok(tree_code(&adj, &b.dist))
    } else {
        Ok(graph_code(&adj, &b.dist))
    }
}

/// Aggregated adjacency: neighbour lists with edge multiplicities and a
/// loop count per vertex.
struct Adjacency {
    nbrs: Vec<Vec<(usize, u32)>>,
    loops: Vec<u32>,
}

impl Adjacency {
    fn new(b: &RootedBall) -> Self {
        let g = &b.graph;
        let n = g.vertex_count();
        let mut nbrs = vec![Vec::new(); n];
        let mut loops = vec![0u32; n];
        for (u, w, _) in g.edges() {
            if u == w {
                loops[u] += 1;
            } else {
                nbrs[u].push(w);
                nbrs[w].push(u);
            }
        }
        let nbrs = nbrs
            .into_iter()
            .map(|mut list: Vec<usize>| {
                list.sort_unstable();
                let mut agg: Vec<(usize, u32)> = Vec::with_capacity(list.len());
                for w in list {
                    match agg.last_mut() {
                        Some((x, m)) if *x == w => *m += 1,
                        _ => agg.push((w, 1)),
                    }
                }
                agg
            })
            .collect();
        Adjacency { nbrs, loops }
    }

    fn len(&self) -> usize {
        self.loops.len()
    }
}

fn tree_code(adj: &Adjacency, dist: &[usize]) -> CanonicalCode {
    let n = adj.len();
    let height = dist.iter().copied().max().unwrap_or(0);
    let mut levels: Vec<Vec<usize>> = vec![Vec::new(); height + 1];
    for v in 0..n {
        levels[dist[v]].push(v);
    }
    let mut class = vec![0usize; n];
    let mut code = format!("T{n}");
    for level in levels.iter().rev() {
        let sigs: Vec<Vec<usize>> = level
            .iter()
            .map(|&v| {
                let mut s: Vec<usize> = adj.nbrs[v]
                    .iter()
                    .filter(|&&(w, _)| dist[w] == dist[v] + 1)
                    .map(|&(w, _)| class[w])
                    .collect();
                s.sort_unstable();
                s
            })
            .collect();
        let mut table: BTreeMap<&Vec<usize>, usize> = BTreeMap::new();
        for s in &sigs {
            *table.entry(s).or_insert(0) += 1;
        }
        let rank: BTreeMap<&Vec<usize>, usize> = table.keys().enumerate().map(|(i, &s)| (s, i)).collect();
        for (&v, s) in level.iter().zip(&sigs) {
            class[v] = rank[s];
        }
        code.push('|');
        for (s, mult) in &table {
            let body: Vec<String> = s.iter().map(|c| c.to_string()).collect();
            code.push_str(&format!("{mult}[{}]", body.join(",")));
        }
    }
    CanonicalCode(code)
}

/// Replaces colours by their ranks among the distinct values.
fn compress<T: Ord + Clone>(keys: &[T]) -> (Vec<usize>, usize) {
    let mut distinct: Vec<T> = keys.to_vec();
    distinct.sort();
    distinct.dedup();
    let colors = keys.iter().map(|k| distinct.binary_search(k).unwrap()).collect();
    (colors, distinct.len())
}

/// Equitable refinement; the new colour of `v` is the rank of
/// `(colour, loops, sorted (neighbour colour, multiplicity))`.
fn refine(adj: &Adjacency, colors: &mut Vec<usize>) {
    let mut count = {
        let mut c = colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    loop {
        let keys: Vec<(usize, u32, Vec<(usize, u32)>)> = (0..adj.len())
            .map(|v| {
                let mut nb: Vec<(usize, u32)> = adj.nbrs[v].iter().map(|&(w, m)| (colors[w], m)).collect();
                nb.sort_unstable();
                (colors[v], adj.loops[v], nb)
            })
            .collect();
        let (next, k) = compress(&keys);
        *colors = next;
        if k == count {
            return;
        }
        count = k;
    }
}

fn encode(adj: &Adjacency, label: &[usize]) -> Vec<u64> {
    let mut triples: Vec<(usize, usize, u32)> = Vec::new();
    for v in 0..adj.len() {
        if adj.loops[v] > 0 {
            triples.push((label[v], label[v], adj.loops[v]));
        }
        for &(w, m) in &adj.nbrs[v] {
            if label[v] < label[w] {
                triples.push((label[v], label[w], m));
            }
        }
    }
    triples.sort_unstable();
    triples.into_iter().flat_map(|(a, b, m)| [a as u64, b as u64, u64::from(m)]).collect()
}

struct Search<'a> {
    adj: &'a Adjacency,
    best: Option<(Vec<u64>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl Search<'_> {
    fn orbit_roots(&self, prefix: &[usize]) -> Vec<usize> {
        let n = self.adj.len();
        let mut parent: Vec<usize> = (0..n).collect();
        for gamma in &self.automorphisms {
            if prefix.iter().all(|&p| gamma[p] == p) {
                for v in 0..n {
                    let (a, b) = (find(&mut parent, v), find(&mut parent, gamma[v]));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        (0..n).map(|v| find(&mut parent, v)).collect()
    }

    fn leaf(&mut self, label: Vec<usize>) {
        let enc = encode(self.adj, &label);
        match &self.best {
            None => self.best = Some((enc, label)),
            Some((best, best_label)) => match enc.cmp(best) {
                Ordering::Less => self.best = Some((enc, label)),
                Ordering::Equal => {
                    let mut inv = vec![0; label.len()];
                    for (v, &l) in best_label.iter().enumerate() {
                        inv[l] = v;
                    }
                    let gamma: Vec<usize> = label.iter().map(|&l| inv[l]).collect();
                    if gamma.iter().enumerate().any(|(v, &g)| v != g) {
                        self.automorphisms.push(gamma);
                    }
                }
                Ordering::Greater => {}
            },
        }
    }

    fn run(&mut self, mut colors: Vec<usize>, prefix: &mut Vec<usize>) {
        refine(self.adj, &mut colors);
        let n = colors.len();
        let mut size = vec![0usize; n];
        colors.iter().for_each(|&c| size[c] += 1);
        let Some(target) = (0..n).find(|&c| size[c] > 1) else {
            self.leaf(colors);
            return;
        };
        let cell: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &w in &cell {
            if !explored.is_empty() {
                let roots = self.orbit_roots(prefix);
                if explored.iter().any(|&e| roots[e] == roots[w]) {
                    continue;
                }
            }
            let keys: Vec<usize> = (0..n)
                .map(|u| 2 * colors[u] + usize::from(colors[u] == target && u != w))
                .collect();
            let (child, _) = compress(&keys);
            prefix.push(w);
            self.run(child, prefix);
            prefix.pop();
            explored.push(w);
        }
    }
}

fn graph_code(adj: &Adjacency, dist: &[usize]) -> CanonicalCode {
    let mut search = Search { adj, best: None, automorphisms: Vec::new() };
    let (colors, _) = compress(dist);
    search.run(colors, &mut Vec::new());
    let (enc, _) = search.best.expect("search visits at least one leaf");
    let body: Vec<String> = enc.iter().map(|x| x.to_string()).collect();
    CanonicalCode(format!("G{}:{}", adj.len(), body.join(",")))
}
