//! Regulator for y'' + 3 D^{1/3} y + y = u with unit weights.
//!
//! cargo run --example paper_oscillator

use fracreg::lift::{build_lifted, CostWeights};
use fracreg::modal::{char_poly, classify_stability, poly_roots};
use fracreg::order::OddRationalOrder;
use fracreg::riccati::solve_are_spectral;
use fracreg::synth::{close_loop, regulator_gains};

fn main() -> fracreg::error::Result<()> {
    let sys = build_lifted(3.0, 1.0, OddRationalOrder::new(1, 3)?, CostWeights::new(1.0, 1.0)?)?;
    let (sol, _) = solve_are_spectral(&sys)?;
    let law = regulator_gains(&sol, &sys)?;
    let cl = close_loop(&sys, &law)?;

    let k: Vec<String> = law.gains.iter().map(|k| format!("{k:.4}")).collect();
    println!("u = -[{}] . z", k.join(", "));
    let poly = char_poly(&cl);
    println!("closed loop: {:?}", poly.iter().map(|c| format!("{c:.4}")).collect::<Vec<_>>());

    let modes = poly_roots(&poly, cl.denominator())?;
    for m in &modes.modes {
        println!(
            "  lambda = {:+.5} {:+.5}i   Re<0: {:5}   Re lambda^3<0: {}",
            m.lambda.re, m.lambda.im, m.re_negative, m.decays
        );
    }
    println!("{:?}", classify_stability(&modes));
    Ok(())
}
