//! Builds each benchmark register, derives its unit-disk graph from the
//! blockade radius and prints the brute-force maximum independent sets.

use rydberg_qaoa::dynamics::DriveParams;
use rydberg_qaoa::graph::{blockade_radius, brute_force_mis, classical_cost, edges_from_register, CostParams};
use rydberg_qaoa::runner::{benchmark_register, BENCHMARK_SIZES, BENCHMARK_SPACING_UM};

fn main() -> rydberg_qaoa::Result<()> {
    let drive = DriveParams::from_mhz(1.0, 1.5)?;
    let r_b = blockade_radius(drive.c6_over_hbar, drive.omega)?;
    println!("blockade radius at Ω/2π = 1 MHz: {r_b:.3} μm, lattice spacing {BENCHMARK_SPACING_UM} μm");
    let cost = CostParams::new(2.0)?;
    for n in BENCHMARK_SIZES {
        let graph = edges_from_register(&benchmark_register(n, BENCHMARK_SPACING_UM)?, r_b)?;
        let mis = brute_force_mis(&graph)?;
        println!("N = {n:>2}: {:>2} edges, |S*| = {}", graph.edge_count(), mis.size);
        for s in &mis.solutions {
            println!("    {s}  cost {}", classical_cost(s, &graph, &cost)?);
        }
    }
    Ok(())
}
