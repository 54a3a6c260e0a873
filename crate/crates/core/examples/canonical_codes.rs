//! Canonical codes and digests of rooted neighbourhoods.

use deloc::graph::{cycle_graph, Graph};
use deloc::local_weak::{canonical_code, code_digest, rooted_ball};

pub fn run() -> deloc::Result<()> {
    let c6 = cycle_graph(6)?;
    let relabelled = Graph::from_edges(6, &[(0, 3), (3, 1), (1, 4), (4, 2), (2, 5), (5, 0)])?;
    for h in 1..=3 {
        let a = canonical_code(&rooted_ball(&c6, 0, h)?)?;
        let b = canonical_code(&rooted_ball(&relabelled, 4, h)?)?;
        println!("depth {h}: {a} (digest {}) equal after relabelling: {}", code_digest(&a), a == b);
    }
    let paw = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (2, 3)])?;
    for root in 0..4 {
        println!("paw rooted at {root}: {}", canonical_code(&rooted_ball(&paw, root, 2)?)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> deloc::Result<()> {
    run()
}
