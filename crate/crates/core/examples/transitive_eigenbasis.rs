//! Random eigenbases of vertex-transitive graphs.
//!
//! The projector diagonal of every eigenspace is constant on a
//! vertex-transitive graph, which forces random eigenbases to be spread out.

use deloc::graph::{cayley_graph, cycle_graph, GroupTable};
use deloc::rng::rng_from_seed;
use deloc::sampling::{calibrated_constants, random_eigenbasis};
use deloc::spectral::{decompose_graph, lq_norm, projector_diagonal, WindowSelector};

pub fn run() -> deloc::Result<()> {
    let cube = GroupTable::elementary_abelian_2(5)?.with_generators(&[1, 2, 4, 8, 16])?;
    let graphs = [("C_60", cycle_graph(60)?), ("Q_5", cayley_graph(&cube)?)];
    let c = calibrated_constants().c;
    for (name, g) in graphs {
        let d = decompose_graph(&g)?;
        let n = d.dim() as f64;
        let mut defect = 0.0f64;
        for grp in d.groups() {
            let sw = projector_diagonal(&d, &WindowSelector::Group(grp.start))?;
            let want = grp.len() as f64 / n;
            defect = defect.max(sw.proj_diag.iter().map(|p| (p - want).abs()).fold(0.0, f64::max));
        }
        let mut rng = rng_from_seed(7);
        let basis = random_eigenbasis(&d, &mut rng)?;
        let worst = (0..d.dim()).map(|k| lq_norm(basis.basis.vector(k), f64::INFINITY)).fold(0.0, f64::max);
        let threshold = c * 2.0 * (n.ln() / n).sqrt();
        println!(
            "{name}: multiplicities {:?}, projector defect {defect:.1e}, max |u|_inf {worst:.4} (threshold at Lambda = 2: {threshold:.4})",
            d.multiplicities()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> deloc::Result<()> {
    run()
}
