//! D^{1/2} y = y + u with cost weights (3, 1), through its 3/7 approximation.
//!
//! cargo run --example scalar_first_order

use fracreg::lift::{build_first_order, CostWeights};
use fracreg::order::{make_order, odd_approximate};
use fracreg::riccati::solve_are_spectral;
use fracreg::synth::{close_loop, regulator_gains};

fn main() -> fracreg::error::Result<()> {
    let requested = make_order(1, 2)?;
    if let Err(e) = requested.to_odd() {
        println!("{requested} used directly: {e}");
    }
    let order = odd_approximate(requested, 0.08)?;
    let sys = build_first_order(1.0, order, CostWeights::new(3.0, 1.0)?)?;
    let (sol, dec) = solve_are_spectral(&sys)?;
    let law = regulator_gains(&sol, &sys)?;
    let cl = close_loop(&sys, &law)?;
    println!("order {order}: Hamiltonian stable eigenvalue {}", dec.stable_eigenvalues[0]);
    println!("S = {}, u = -{} y, closed loop D^{{{order}}} y = {} y", sol.s[(0, 0)], law.gains[0], cl.f_cl[(0, 0)]);
    Ok(())
}
