//! Both Riccati solvers on the same lifted system.
//!
//! cargo run --example riccati_solvers

use fracreg::lift::{build_lifted, CostWeights};
use fracreg::order::OddRationalOrder;
use fracreg::riccati::{are_residual, solve_are_sign, solve_are_spectral};

fn main() -> fracreg::error::Result<()> {
    let sys = build_lifted(3.0, 1.0, OddRationalOrder::new(1, 3)?, CostWeights::new(1.0, 1.0)?)?;
    let (spectral, dec) = solve_are_spectral(&sys)?;
    let sign = solve_are_sign(&sys)?;

    println!("stable Hamiltonian eigenvalues:");
    for z in &dec.stable_eigenvalues {
        println!("  {:+.6} {:+.6}i", z.re, z.im);
    }
    println!("spectral residual {:.2e}, sign residual {:.2e}", spectral.residual, are_residual(&sign.s, &sys)?);
    println!("|S_spectral - S_sign| = {:.2e}", (&spectral.s - &sign.s).norm());
    println!("S is positive semidefinite: {}", spectral.is_positive_semidefinite());
    Ok(())
}
