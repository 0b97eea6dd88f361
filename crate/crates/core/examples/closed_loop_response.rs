//! Closed-loop trajectory of the unit-weight oscillator after a velocity kick.
//!
//! cargo run --release --example closed_loop_response

use fracreg::fracsol::ic_coefficients;
use fracreg::lift::{build_lifted, CostWeights, InitialConditions};
use fracreg::modal::{char_poly, poly_roots};
use fracreg::order::OddRationalOrder;
use fracreg::response::{cost, decay_metric, respond, Grid};
use fracreg::riccati::solve_are_spectral;
use fracreg::synth::{close_loop, regulator_gains};

fn main() -> fracreg::error::Result<()> {
    let w = CostWeights::new(1.0, 1.0)?;
    let sys = build_lifted(3.0, 1.0, OddRationalOrder::new(1, 3)?, w)?;
    let (sol, _) = solve_are_spectral(&sys)?;
    let law = regulator_gains(&sol, &sys)?;
    let cl = close_loop(&sys, &law)?;
    let modes = poly_roots(&char_poly(&cl), 3)?;

    let rep = ic_coefficients(&modes, &InitialConditions::velocity_kick(3, 0.1, 1.0))?;
    let traj = respond(&cl, &rep, &law, &Grid::new(0.1, 20.0, 200)?)?;
    for s in traj.samples.iter().step_by(20) {
        println!("x = {:6.2}  y = {:+.6e}  u = {:+.6e}", s.x, s.y, s.u);
    }
    let c = cost(&traj, &w);
    let d = decay_metric(&traj)?;
    println!("cost over window {:.6} (window too short: {})", c.value, c.tail_warning);
    println!("peak {:.4e}, last-quarter max {:.4e}, shrinking envelope {}", d.peak, d.sup_tail, d.monotone_envelope);
    Ok(())
}
