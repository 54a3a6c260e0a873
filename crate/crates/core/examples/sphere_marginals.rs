//! Coordinates of uniform points on spheres against the exact formulas.

use deloc::rng::rng_from_seed;
use deloc::sampling::{marginal_tail_exact, moment_exact, sample_sphere};

pub fn run() -> deloc::Result<()> {
    let mut rng = rng_from_seed(5);
    let samples = 20_000;
    for d in [2usize, 3, 10] {
        let xs: Vec<f64> = (0..samples).map(|_| sample_sphere(d, &mut rng).map(|x| x[0])).collect::<Result<_, _>>()?;
        let mut worst = 0.0f64;
        for k in 1..10 {
            let t = k as f64 / 10.0;
            let emp = xs.iter().filter(|x| x.abs() > t).count() as f64 / samples as f64;
            worst = worst.max((emp - marginal_tail_exact(d, t)?).abs());
        }
        let m4 = xs.iter().map(|x| x.powi(4)).sum::<f64>() / samples as f64;
        println!("d = {d:>2}: tail error {worst:.4}, E x^4 = {m4:.4} (exact {:.4})", moment_exact(4.0, d, 1.0)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> deloc::Result<()> {
    run()
}
