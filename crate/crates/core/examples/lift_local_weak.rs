//! Random lifts of K_4 converge locally to the 3-regular tree.

use deloc::graph::{complete_graph, count_on_short_cycles, random_lift};
use deloc::local_weak::{ball_distribution, bst_profile, lift_depth, lift_limit_distribution, tv_distance};

pub fn run() -> deloc::Result<()> {
    let base = complete_graph(4)?;
    for n in [50usize, 200, 800] {
        let (g, _) = random_lift(&base, n, n as u64)?;
        let h = lift_depth(n, 3)?.max(1);
        let tv = tv_distance(&ball_distribution(&g, h)?, &lift_limit_distribution(&base, h)?)?;
        println!(
            "n = {n:>3}: {} vertices, depth {h}, d_TV {tv:.4}, vertices on cycles of length <= 4: {}, BST(3) = {:.3}",
            g.vertex_count(),
            count_on_short_cycles(&g, 4),
            bst_profile(&g, 3)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> deloc::Result<()> {
    run()
}
