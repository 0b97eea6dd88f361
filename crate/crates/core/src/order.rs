//! Rational fractional orders and their odd/odd refinement.
//!
//! The synthesis only holds for orders `p/q` with both `p` and `q` odd. Any
//! other admissible rational order is replaced by a nearby odd/odd fraction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A reduced rational order `p/q` with `0 < p/q < 2` and `p/q != 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalOrder {
    p: u64,
    q: u64,
}

impl RationalOrder {
    pub fn numerator(&self) -> u64 {
        self.p
    }

    pub fn denominator(&self) -> u64 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn is_odd_odd(&self) -> bool {
        self.p % 2 == 1 && self.q % 2 == 1
    }

    /// Narrow to the odd/odd class, failing with [`Error::EvenOrder`].
    pub fn to_odd(self) -> Result<OddRationalOrder> {
        if self.is_odd_odd() {
            Ok(OddRationalOrder(self))
        } else {
            Err(Error::EvenOrder { num: self.p, den: self.q })
        }
    }
}

impl fmt::Display for RationalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Validate and reduce `num/den` into a [`RationalOrder`].
pub fn make_order(num: i64, den: i64) -> Result<RationalOrder> {
    let invalid = |reason: &str| Error::InvalidOrder { num, den, reason: reason.to_string() };
    if den <= 0 {
        return Err(invalid("denominator must be positive"));
    }
    if num <= 0 {
        return Err(invalid("order must be positive"));
    }
    let (n, d) = (num as u64, den as u64);
    if n >= 2 * d {
        return Err(invalid("order must be below 2"));
    }
    if n == d {
        return Err(invalid("order 1 is the classical viscous case"));
    }
    let g = gcd(n, d);
    Ok(RationalOrder { p: n / g, q: d / g })
}

/// A [`RationalOrder`] whose numerator and denominator are both odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RationalOrder", into = "RationalOrder")]
pub struct OddRationalOrder(RationalOrder);

impl OddRationalOrder {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        let num = i64::try_from(p).map_err(|_| Error::InvalidInput("numerator overflow".into()))?;
        let den = i64::try_from(q).map_err(|_| Error::InvalidInput("denominator overflow".into()))?;
        let order = make_order(num, den)?;
        if order.p != p || order.q != q {
            return Err(Error::InvalidOrder {
                num,
                den,
                reason: "fraction is not in lowest terms".into(),
            });
        }
        order.to_odd()
    }

    /// The integer order `1/1`. Outside the plant range, but its lifting is
    /// the classical viscous oscillator, which is the `q = 1` member of every
    /// companion family.
    pub fn classical() -> Self {
        OddRationalOrder(RationalOrder { p: 1, q: 1 })
    }

    pub fn numerator(&self) -> u64 {
        self.0.p
    }

    pub fn denominator(&self) -> u64 {
        self.0.q
    }

    pub fn value(&self) -> f64 {
        self.0.value()
    }

    pub fn as_rational(&self) -> RationalOrder {
        self.0
    }
}

impl TryFrom<RationalOrder> for OddRationalOrder {
    type Error = Error;

    fn try_from(order: RationalOrder) -> Result<Self> {
        order.to_odd()
    }
}

impl From<OddRationalOrder> for RationalOrder {
    fn from(order: OddRationalOrder) -> Self {
        order.0
    }
}

impl fmt::Display for OddRationalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Distance `|a/b - c/d|` computed from integer cross products.
fn distance(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let cross = (a as i128 * d as i128 - c as i128 * b as i128).unsigned_abs();
    cross as f64 / (b as f64 * d as f64)
}

/// Approximate `order` by an odd/odd fraction within `tol`.
///
/// Odd denominators are scanned in increasing order. For each one the
/// admissible odd numerator nearest the target is taken (the smaller one on a
/// tie) and the scan stops at the first fraction within `tol`. Orders that are
/// already odd/odd are returned unchanged.
pub fn odd_approximate(order: RationalOrder, tol: f64) -> Result<OddRationalOrder> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if order.is_odd_odd() {
        return Ok(OddRationalOrder(order));
    }
    let (p, q) = (order.p, order.q);
    let mut den: u64 = 1;
    loop {
        let target = den as f64 * order.value();
        // odd numerators straddling the target, clamped to 1 <= n < 2*den, n != den
        let below = {
            let f = target.floor() as u64;
            if f % 2 == 1 {
                f
            } else {
                f.saturating_sub(1)
            }
        };
        let mut best: Option<(u64, f64)> = None;
        for cand in [below.saturating_sub(2), below, below + 2, below + 4] {
            if cand % 2 == 0 || cand == 0 || cand >= 2 * den || cand == den {
                continue;
            }
            let d = distance(cand, den, p, q);
            match best {
                Some((_, bd)) if d >= bd => {}
                _ => best = Some((cand, d)),
            }
        }
        if let Some((num, d)) = best {
            if d <= tol {
                let g = gcd(num, den);
                return Ok(OddRationalOrder(RationalOrder { p: num / g, q: den / g }));
            }
        }
        den = den
            .checked_add(2)
            .ok_or_else(|| Error::InvalidInput("odd approximation overflowed".into()))?;
    }
}

/// Refinement `(2k(2l+1)+1) / ((2m+1)(2l+1))` of an even-numerator order `2k/(2m+1)`.
pub fn even_numerator_refinement(order: RationalOrder, l: u64) -> Result<OddRationalOrder> {
    if order.p % 2 != 0 || order.q % 2 != 1 {
        return Err(Error::InvalidInput(format!("{order} does not have an even numerator")));
    }
    let scale = 2 * l + 1;
    let num = order.p * scale + 1;
    let den = order.q * scale;
    let g = gcd(num, den);
    OddRationalOrder::new(num / g, den / g)
}

/// Refinement `p(2k+1) / (q(2k+1)+1)` of an even-denominator order `p/q`.
///
/// For `1/2` this is the family `(2k+1)/(4k+3)`.
pub fn even_denominator_refinement(order: RationalOrder, k: u64) -> Result<OddRationalOrder> {
    if order.q % 2 != 0 {
        return Err(Error::InvalidInput(format!("{order} does not have an even denominator")));
    }
    let scale = 2 * k + 1;
    let num = order.p * scale;
    let den = order.q * scale + 1;
    let g = gcd(num, den);
    OddRationalOrder::new(num / g, den / g)
}
