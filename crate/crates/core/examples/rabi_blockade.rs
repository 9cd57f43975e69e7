//! Single-atom Rabi oscillation and the collectively enhanced √2·Ω
//! oscillation of a blockaded pair.

use rydberg_qaoa::dynamics::{build_interactions, evolve, hamiltonian_mixing, DriveParams, QuantumState, TWO_PI};
use rydberg_qaoa::graph::Register;

fn main() -> rydberg_qaoa::Result<()> {
    let drive = DriveParams::from_mhz(1.0, 1.5)?;
    let single = Register::new(vec![[0.0, 0.0]])?;
    let pair = Register::new(vec![[0.0, 0.0], [5.0, 0.0]])?;
    let h1 = hamiltonian_mixing(&build_interactions(&single, &drive)?, drive.omega)?;
    let h2 = hamiltonian_mixing(&build_interactions(&pair, &drive)?, drive.omega)?;
    println!("{:>6}  {:>8}  {:>10}  {:>8}  {:>10}", "t (μs)", "P1", "sin²(Ωt/2)", "P(01+10)", "P(11)");
    for k in 0..=20 {
        let t = 0.05 * k as f64;
        let p1 = evolve(&QuantumState::ground(1), &h1, t)?.probabilities()[1];
        let p2 = evolve(&QuantumState::ground(2), &h2, t)?.probabilities();
        println!(
            "{t:>6.2}  {p1:>8.5}  {:>10.5}  {:>8.5}  {:>10.2e}",
            (drive.omega * t / 2.0).sin().powi(2),
            p2[1] + p2[2],
            p2[3]
        );
    }
    println!("pair π-pulse at π/(√2Ω) = {:.4} μs (single atom {:.4} μs)", 0.5 / 2f64.sqrt(), TWO_PI / drive.omega / 2.0);
    Ok(())
}
