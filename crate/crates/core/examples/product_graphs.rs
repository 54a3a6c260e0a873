//! Products of a vertex-transitive graph with an arbitrary graph.
//!
//! Each of the 256 adjacency rules gives a product in which the projector
//! diagonal is constant along the fibres of the transitive factor.

use deloc::graph::{cycle_graph, path_graph, product_graph, ProductRule};
use deloc::spectral::{decompose_graph, projector_diagonal, WindowSelector};

pub fn run() -> deloc::Result<()> {
    let g = cycle_graph(12)?;
    let h = path_graph(3)?;
    println!("rules available: {}", ProductRule::all().count());
    let named = [
        ("cartesian", ProductRule::cartesian()),
        ("tensor", ProductRule::tensor()),
        ("strong", ProductRule::strong()),
        ("lexicographic", ProductRule::lexicographic()),
    ];
    let ell = g.vertex_count() as f64;
    for (name, rule) in named {
        let p = product_graph(&g, &h, rule)?;
        let d = decompose_graph(&p)?;
        // Pi_E(x) / dim E <= 1 / ell on every eigenspace
        let mut worst = 0.0f64;
        for grp in d.groups() {
            let sw = projector_diagonal(&d, &WindowSelector::Group(grp.start))?;
            let m = grp.len() as f64;
            worst = worst.max(sw.proj_diag.iter().fold(0.0f64, |a, p| a.max(p / m)) * ell);
        }
        println!("{name:>13}: {} edges, max ell * Pi_E(x) / dim E = {worst:.6}", p.edge_count());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> deloc::Result<()> {
    run()
}
