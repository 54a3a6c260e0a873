//! Equidistribution of `u(x)^2` against observables for random eigenbases.

use deloc::ergodic::{qe_bound, qe_deviation, qe_threshold};
use deloc::graph::complete_graph;
use deloc::rng::rng_from_seed;
use deloc::sampling::random_eigenbasis;
use deloc::spectral::decompose_graph;

pub fn run() -> deloc::Result<()> {
    let n = 60;
    let d = decompose_graph(&complete_graph(n)?)?;
    // centred indicator of the first half of the vertices
    let f: Vec<f64> = (0..n).map(|x| if x < n / 2 { 0.5 } else { -0.5 }).collect();
    let t = 20.0;
    let thr = qe_threshold(&f, t);
    let mut rng = rng_from_seed(9);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let b = random_eigenbasis(&d, &mut rng)?;
        for k in 0..n {
            worst = worst.max(qe_deviation(b.basis.vector(k), &f)?);
        }
    }
    let mults: Vec<usize> = d.multiplicities().into_iter().filter(|&m| m > 1).collect();
    println!("largest deviation {worst:.4}, threshold {thr:.4}");
    println!("probability lower bound: {:.4}", qe_bound(t, 1, &mults)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> deloc::Result<()> {
    run()
}
