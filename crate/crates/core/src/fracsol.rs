//! Fractional exponentials `y(x, λ)` with `D^{1/q} y = λ y`, and closed-loop
//! solutions assembled from them.
//!
//! `y(x, λ) = Σ_{k ≥ −(q−1)} λ^{k+q−1} x^{k/q} / Γ(k/q + 1)`
//!
//! The series is summed in multiprecision because its terms grow like
//! `e^{|λ^q| x}` before they decay. The closed form splits off the power
//! terms, the exponential `e^{λ^q x}` and weakly singular integrals that are
//! evaluated in double precision by quadrature.

use std::cell::RefCell;
use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::lift::InitialConditions;
use crate::modal::{ModeSet, ROOT_GAP_TOL};
use crate::quad::{gauss_jacobi_unit, integrate};
use crate::special::rgamma;

/// Terms summed before the series gives up.
pub const SERIES_MAX_TERMS: usize = 100_000;
/// Mode values at `x0` at or below this magnitude make the IC system singular.
pub const VANISHING_MODE_TOL: f64 = 1e-12;
/// Allowed `|Im y| / max(1, |y|)` for a real solution.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-8;

const JACOBI_NODES: usize = 24;
const QUAD_ABS_TOL: f64 = 1e-17;
const QUAD_REL_TOL: f64 = 1e-13;
const TAIL_CUTOFF: f64 = 60.0;

fn check_q(q: u32) -> Result<()> {
    if q == 0 || q % 2 == 0 {
        return Err(Error::InvalidInput(format!("denominator must be odd and positive, got {q}")));
    }
    Ok(())
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidInput(format!("evaluation point must be positive and finite, got {x}")));
    }
    Ok(())
}

#[derive(Clone)]
struct MpComplex {
    re: Float,
    im: Float,
}

impl MpComplex {
    fn new(prec: u32, z: Complex64) -> Self {
        MpComplex { re: Float::with_val(prec, z.re), im: Float::with_val(prec, z.im) }
    }

    fn mul(&self, other: &MpComplex) -> MpComplex {
        let prec = self.re.prec();
        let re = Float::with_val(prec, &self.re * &other.re) - Float::with_val(prec, &self.im * &other.im);
        let im = Float::with_val(prec, &self.re * &other.im) + Float::with_val(prec, &self.im * &other.re);
        MpComplex { re, im }
    }

    fn scale(&self, s: &Float) -> MpComplex {
        let prec = self.re.prec();
        MpComplex { re: Float::with_val(prec, &self.re * s), im: Float::with_val(prec, &self.im * s) }
    }

    fn add_assign(&mut self, other: &MpComplex) {
        self.re += &other.re;
        self.im += &other.im;
    }

    fn norm(&self) -> Float {
        Float::with_val(self.re.prec(), self.re.hypot_ref(&self.im))
    }

    fn powu(&self, n: u32) -> MpComplex {
        let prec = self.re.prec();
        let mut out = MpComplex { re: Float::with_val(prec, 1), im: Float::new(prec) };
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// Partial sums of the defining series until the terms past the peak stay
/// below `tol·|sum|` for `q` consecutive indices.
pub fn frac_exp_series(lambda: Complex64, x: f64, q: u32, tol: f64) -> Result<Complex64> {
    check_q(q)?;
    check_x(x)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::InvalidInput("lambda must be finite".into()));
    }
    let mu_x = lambda.norm().powi(q as i32) * x;
    // room for the largest term, for cancellation down to the result, and
    // for the requested relative accuracy
    let lam_bits = (q as f64 - 1.0) * lambda.norm().max(1.0).log2();
    let tol_bits = -tol.log2().min(0.0);
    let prec = (96.0 + 3.0 * mu_x + lam_bits + x.log2().abs() + tol_bits).ceil() as u32;

    let lam = MpComplex::new(prec, lambda);
    let mu = lam.powu(q);
    let xf = Float::with_val(prec, x);
    let step = mu.scale(&Float::with_val(prec, &xf * q));
    let qf = q as i64;

    // current term of each residue class, indexed by k mod q
    let mut ring: Vec<MpComplex> = Vec::with_capacity(q as usize);
    let mut sum = MpComplex::new(prec, Complex64::new(0.0, 0.0));
    for r in -(qf - 1)..=0 {
        let e = Float::with_val(prec, r) / qf;
        let xp = Float::with_val(prec, (&xf).pow(&e));
        let g = Float::with_val(prec, &e + 1u32).gamma();
        let scale = xp / g;
        let t = lam.powu((r + qf - 1) as u32).scale(&scale);
        sum.add_assign(&t);
        ring.push(t);
    }
    let tol_f = Float::with_val(prec, tol);
    let peak = mu_x + 1.0;
    let mut quiet = 0u32;
    let mut k: i64 = 1;
    loop {
        if (k + qf) as usize > SERIES_MAX_TERMS {
            return Err(Error::NoConvergence { what: "fractional exponential series", iterations: SERIES_MAX_TERMS });
        }
        let slot = ((k + qf - 1) % qf) as usize;
        let factor = Float::with_val(prec, 1) / k;
        let next = ring[slot].mul(&step).scale(&factor);
        sum.add_assign(&next);
        let small = next.norm() <= Float::with_val(prec, &tol_f * sum.norm());
        ring[slot] = next;
        if (k as f64) / (q as f64) > peak && small {
            quiet += 1;
            if quiet >= q {
                break;
            }
        } else {
            quiet = 0;
        }
        k += 1;
    }
    Ok(sum.to_c64())
}

type Rule = (Vec<f64>, Vec<f64>);

thread_local! {
    static JACOBI_CACHE: RefCell<HashMap<u64, Rule>> = RefCell::new(HashMap::new());
}

fn jacobi_rule(gamma: f64) -> Result<Rule> {
    let key = gamma.to_bits();
    if let Some(rule) = JACOBI_CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return Ok(rule);
    }
    let rule = gauss_jacobi_unit(JACOBI_NODES, gamma)?;
    JACOBI_CACHE.with(|c| c.borrow_mut().insert(key, rule.clone()));
    Ok(rule)
}

/// `∫₀ˣ e^{μt} (x−t)^γ / Γ(γ+1) dt` for `γ > −1`.
///
/// With `s = x − t` the singular factor becomes `s^γ`; the piece of length
/// `min(x, 1/|μ|)` next to `s = 0` is done by Gauss–Jacobi and the rest by
/// adaptive Gauss–Kronrod.
pub fn weak_singular_integral(mu: Complex64, x: f64, gamma: f64) -> Result<Complex64> {
    check_x(x)?;
    if !(gamma > -1.0) || !gamma.is_finite() {
        return Err(Error::InvalidInput(format!("exponent must exceed -1, got {gamma}")));
    }
    let h = x.min(1.0 / mu.norm().max(1.0));
    let (nodes, weights) = jacobi_rule(gamma)?;
    let near: Complex64 = nodes
        .iter()
        .zip(&weights)
        .map(|(&t, &w)| (mu * (x - h * t)).exp() * w)
        .sum::<Complex64>()
        * h.powf(gamma + 1.0);
    let far = if h < x {
        integrate(|s| (mu * (x - s)).exp() * s.powf(gamma), h, x, QUAD_ABS_TOL, QUAD_REL_TOL)?
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok((near + far) * rgamma(gamma + 1.0))
}

/// `(1/Γ(γ+1)) ∫₀^∞ e^{−v} (x + v/μ)^γ dv`, the part of `μ·J` beyond `x`
/// rotated onto the ray where `e^{−μs}` is real and decaying.
fn rotated_tail(mu: Complex64, x: f64, gamma: f64) -> Result<Complex64> {
    let inv = mu.inv();
    let v = integrate(|v| (Complex64::new(x, 0.0) + inv * v).powf(gamma) * (-v).exp(), 0.0, TAIL_CUTOFF, QUAD_ABS_TOL, QUAD_REL_TOL)?;
    Ok(v * rgamma(gamma + 1.0))
}

/// Closed form of `y(x, λ)`:
/// `Σ_{s=0}^{q−2} λ^s [x^γ/Γ(γ+1) + λ^q J(λ^q, x, γ)] + λ^{q−1} e^{λ^q x}`,
/// `γ = (s+1−q)/q`.
pub fn frac_exp_closed(lambda: Complex64, x: f64, q: u32) -> Result<Complex64> {
    check_q(q)?;
    check_x(x)?;
    if q == 1 {
        return Ok((lambda * x).exp());
    }
    let mu = lambda.powu(q);
    let qf = q as f64;
    let mut total = Complex64::new(0.0, 0.0);
    if mu.re <= 0.0 {
        for s in 0..q - 1 {
            let gamma = (s as f64 + 1.0 - qf) / qf;
            let power = x.powf(gamma) * rgamma(gamma + 1.0);
            let bracket = mu * weak_singular_integral(mu, x, gamma)? + power;
            total += lambda.powu(s) * bracket;
        }
        total += lambda.powu(q - 1) * (mu * x).exp();
    } else {
        // e^{μx} terms cancel across s except on the principal branch
        for s in 0..q - 1 {
            let gamma = (s as f64 + 1.0 - qf) / qf;
            let power = x.powf(gamma) * rgamma(gamma + 1.0);
            total += lambda.powu(s) * (power - rotated_tail(mu, x, gamma)?);
        }
        let omega = mu.powf(1.0 / qf) / lambda;
        if (omega - 1.0).norm() < 1e-6 {
            total += lambda.powu(q - 1) * (mu * x).exp() * qf;
        }
    }
    Ok(total)
}

/// Mode coefficients `c` with `y(x) = Σ c_l y(x, λ_l)` matching the
/// initial data `D^{m/q} y(x0) = values[m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRepresentation {
    pub modes: ModeSet,
    pub c: Vec<Complex64>,
    pub x0: f64,
    pub q: u32,
}

impl SolutionRepresentation {
    /// The identically zero solution on the given modes.
    pub fn zero(modes: ModeSet, x0: f64) -> Self {
        let q = modes.q;
        let c = vec![Complex64::new(0.0, 0.0); modes.len()];
        SolutionRepresentation { modes, c, x0, q }
    }
}

fn ic_matrix(modes: &ModeSet, x0: f64) -> Result<DMatrix<Complex64>> {
    let n = modes.len();
    let values = modes
        .modes
        .iter()
        .enumerate()
        .map(|(index, m)| {
            let y = frac_exp_closed(m.lambda, x0, modes.q)?;
            if y.norm() <= VANISHING_MODE_TOL {
                return Err(Error::VanishingModeValue { index, value: y.norm() });
            }
            Ok(y)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(n, n, |m, l| modes.modes[l].lambda.powu(m as u32) * values[l]))
}

pub fn ic_coefficients(modes: &ModeSet, ics: &InitialConditions) -> Result<SolutionRepresentation> {
    check_x(ics.x0)?;
    let n = modes.len();
    if ics.values.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: ics.values.len() });
    }
    if ics.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("initial values must be finite".into()));
    }
    let gap = modes.min_gap();
    if gap < ROOT_GAP_TOL {
        return Err(Error::DegenerateRoots { gap });
    }
    let m = ic_matrix(modes, ics.x0)?;
    let rhs = DVector::from_iterator(n, ics.values.iter().map(|&v| Complex64::new(v, 0.0)));
    let c = m.lu().solve(&rhs).ok_or(Error::DegenerateRoots { gap })?;
    Ok(SolutionRepresentation { modes: modes.clone(), c: c.iter().copied().collect(), x0: ics.x0, q: modes.q })
}

/// `‖M c − v‖₂` for the initial-condition system.
pub fn ic_residual(rep: &SolutionRepresentation, ics: &InitialConditions) -> Result<f64> {
    let m = ic_matrix(&rep.modes, ics.x0)?;
    let c = DVector::from_column_slice(&rep.c);
    let v = DVector::from_iterator(ics.values.len(), ics.values.iter().map(|&v| Complex64::new(v, 0.0)));
    Ok((m * c - v).norm())
}

/// `c_l · y(x, λ_l)` for every mode.
pub fn weighted_modes(rep: &SolutionRepresentation, x: f64) -> Result<Vec<Complex64>> {
    rep.modes
        .modes
        .iter()
        .zip(&rep.c)
        .map(|(m, &c)| {
            if c == Complex64::new(0.0, 0.0) {
                Ok(c)
            } else {
                Ok(c * frac_exp_closed(m.lambda, x, rep.q)?)
            }
        })
        .collect()
}

pub fn eval_solution_complex(rep: &SolutionRepresentation, x: f64) -> Result<Complex64> {
    check_x(x)?;
    Ok(weighted_modes(rep, x)?.into_iter().sum())
}

pub(crate) fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAGINARY_RESIDUE_TOL * z.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidue { re: z.re, im: z.im });
    }
    Ok(z.re)
}

/// `y(x) = Re Σ c_l y(x, λ_l)`.
pub fn eval_solution(rep: &SolutionRepresentation, x: f64) -> Result<f64> {
    real_part(eval_solution_complex(rep, x)?)
}
