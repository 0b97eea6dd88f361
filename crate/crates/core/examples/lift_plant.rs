//! Companion lifting of a plate in a viscous fluid.
//!
//! cargo run --example lift_plant

use fracreg::lift::{build_lifted, open_loop_charpoly, plant_coeffs, CostWeights, PlantParams};
use fracreg::order::OddRationalOrder;

fn main() -> fracreg::error::Result<()> {
    let plate = PlantParams::Physical { m: 2.0, s: 0.5, rho: 1000.0, mu: 0.001, k: 4.0 };
    let (a, b) = plant_coeffs(&plate)?;
    println!("a = {a:.6}, b = {b:.6}");

    let order = OddRationalOrder::new(3, 5)?;
    let sys = build_lifted(a, b, order, CostWeights::new(1.0, 0.5)?)?;
    println!("order {order}, state dimension {}", sys.dim());
    println!("F =\n{:.3}", sys.f);
    println!("open-loop polynomial (highest power first): {:?}", open_loop_charpoly(&sys));
    Ok(())
}
