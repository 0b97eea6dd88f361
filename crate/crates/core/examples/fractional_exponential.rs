//! Series and closed-form evaluation of the fractional exponential.
//!
//! cargo run --example fractional_exponential

use fracreg::fracsol::{frac_exp_closed, frac_exp_series, weak_singular_integral};
use num_complex::Complex64;

fn main() -> fracreg::error::Result<()> {
    let lambdas = [Complex64::new(-1.0, 0.0), Complex64::new(-1.0, 1.0), Complex64::new(0.6, 0.8)];
    println!("{:>18} {:>5} {:>6} {:>24} {:>10}", "lambda", "q", "x", "closed form", "|diff|");
    for l in lambdas {
        for q in [1, 3, 5] {
            for x in [0.5, 2.0, 8.0] {
                let s = frac_exp_series(l, x, q, 1e-16)?;
                let c = frac_exp_closed(l, x, q)?;
                println!("{:>18} {q:>5} {x:>6} {:>24} {:>10.1e}", format!("{l}"), format!("{c:.6e}"), (s - c).norm());
            }
        }
    }
    let j = weak_singular_integral(Complex64::new(-1.0, 0.0), 2.0, -2.0 / 3.0)?;
    println!("int_0^2 e^-t (2-t)^(-2/3) dt / Gamma(1/3) = {:.12}", j.re);
    Ok(())
}
