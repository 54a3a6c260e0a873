//! Random approximate eigenvectors of a symmetric Gaussian matrix.

use deloc::rng::rng_from_seed;
use deloc::sampling::{gaussian_symmetric, lq_exceedance_mc, sample_window_vector};
use deloc::spectral::{decompose, deloc_measure, projector_diagonal, residual, sup_inf_residual_bound, WindowSelector};

pub fn run() -> deloc::Result<()> {
    let mut rng = rng_from_seed(11);
    let a = gaussian_symmetric(120, &mut rng);
    let d = decompose(&a, None)?;
    let sw = projector_diagonal(&d, &WindowSelector::interval(-2.0, 2.0))?;
    let width = sup_inf_residual_bound(&sw)?;
    let u = sample_window_vector(&d, &sw, &mut rng)?;
    println!("N(I) = {}, ||(A - 0) u|| = {:.3} <= {width}", sw.count(), residual(&a, &u.u, 0.0));
    for q in [2.0, 4.0, 8.0] {
        let m = deloc_measure(&sw, q)?;
        println!("q = {q}: ||Pi_I||_(q/2) = {:.4} <= N(I)^(2/q) = {:.4}", m.powf(2.0 / q), (sw.count() as f64).powf(2.0 / q));
    }
    let e = lq_exceedance_mc(&d, &sw, 4.0, 1.0, 2000, 3)?;
    println!(
        "P(||u||_4 >= {:.3}) ~ {} (Wilson 99% [{:.4}, {:.4}]), bound {:.2e}",
        e.threshold, e.frequency, e.wilson_lo, e.wilson_hi, e.bound
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> deloc::Result<()> {
    run()
}
