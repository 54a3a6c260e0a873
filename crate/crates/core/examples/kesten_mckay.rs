//! Green function of the universal cover and the limit spectral density.
//!
//! For `K_4` the cover is the 3-regular tree and the density is the
//! Kesten–McKay law `3 sqrt(8 - x^2) / (2 pi (9 - x^2))`.

use deloc::graph::{complete_graph, Graph};
use deloc::green::{cover_green_root, green_regularity_region, limit_density, limit_measure, ConeTypeSystem};
use num_complex::Complex64;

pub fn run() -> deloc::Result<()> {
    let cs = ConeTypeSystem::new(&complete_graph(4)?)?;
    println!("R_oo(2i) = {}", cover_green_root(&cs, 0, Complex64::new(0.0, 2.0))?);
    for x in [0.0, 1.0, 2.0, 2.8] {
        let km = 3.0 * (8.0f64 - x * x).sqrt() / (2.0 * std::f64::consts::PI * (9.0 - x * x));
        println!("rho({x}) = {:.6}, closed form {km:.6}", limit_density(&cs, x, 1e-6)?);
    }
    println!("mass of [-3, 3]: {:.4}", limit_measure(&cs, -3.0, 3.0, 1e-6)?);

    // a base with degrees 2 and 3 has a less explicit cover
    let theta = Graph::from_edges(4, &[(0, 1), (0, 2), (2, 1), (0, 3), (3, 1)])?;
    let cs = ConeTypeSystem::new(&theta)?;
    let grid: Vec<f64> = (0..=60).map(|i| -3.0 + 0.1 * i as f64).collect();
    let region = green_regularity_region(&cs, 0.01, 100.0, &grid, 1e-6)?;
    println!("theta graph: certified {:?}", region.certified);
    Ok(())
}

#[allow(dead_code)]
fn main() -> deloc::Result<()> {
    run()
}
