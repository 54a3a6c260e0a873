//! Entries of random eigenvectors in large eigenspaces look Gaussian.
//!
//! `K_n` has an eigenspace of dimension `n - 1`; the empirical measure of
//! `sqrt(n) u(x)` approaches the standard normal as `n` grows.

use deloc::ergodic::{dbl_lower_bound, default_grid, empirical_measure, gaussian_stat_bound, w1_to_gaussian};
use deloc::graph::complete_graph;
use deloc::rng::rng_from_seed;
use deloc::sampling::WindowBasis;
use deloc::spectral::{decompose_graph, projector_diagonal, WindowSelector};

pub fn run() -> deloc::Result<()> {
    let mut rng = rng_from_seed(2);
    for n in [10usize, 50, 200] {
        let d = decompose_graph(&complete_graph(n)?)?;
        let basis = WindowBasis::new(&d, &projector_diagonal(&d, &WindowSelector::Group(0))?)?;
        let (mut w1, mut dbl) = (0.0, 0.0);
        let reps = 20;
        for _ in 0..reps {
            let mu = empirical_measure(&basis.sample(&mut rng).u)?;
            w1 += w1_to_gaussian(&mu) / reps as f64;
            dbl += dbl_lower_bound(&mu, &default_grid())? / reps as f64;
        }
        println!(
            "m = {:>3}: mean W1 {w1:.3}, mean d_BL lower bound {dbl:.3}, bound at eps = 1: {}",
            basis.count(),
            gaussian_stat_bound(basis.count(), 1.0).map_or("vacuous".to_string(), |b| format!("{b:.3}"))
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> deloc::Result<()> {
    run()
}
