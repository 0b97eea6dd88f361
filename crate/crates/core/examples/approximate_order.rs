//! Odd/odd approximations of orders with an even numerator or denominator.
//!
//! cargo run --example approximate_order

use fracreg::order::{even_denominator_refinement, even_numerator_refinement, make_order, odd_approximate};

fn main() -> fracreg::error::Result<()> {
    let half = make_order(1, 2)?;
    for tol in [0.1, 0.08, 0.03, 1e-3] {
        let odd = odd_approximate(half, tol)?;
        println!("1/2 within {tol:<6} -> {odd}  (error {:.2e})", (odd.value() - 0.5).abs());
    }
    for k in 1..=4 {
        let odd = even_denominator_refinement(half, k)?;
        println!("k = {k}: {odd}");
    }
    let two_thirds = make_order(2, 3)?;
    println!("2/3 refined once: {}", even_numerator_refinement(two_thirds, 1)?);
    println!("3/5 is kept: {}", odd_approximate(make_order(3, 5)?, 1e-9)?);
    Ok(())
}
