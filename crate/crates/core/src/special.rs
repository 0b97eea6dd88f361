//! Real gamma function helpers.

/// `1/Γ(x)`, exactly zero at the poles `x = 0, −1, −2, …`.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    1.0 / libm::tgamma(x)
}
