//! Quadrature rules: Gauss–Jacobi for `t^γ`-weighted integrals and an
//! adaptive complex Gauss–Kronrod (7/15) integrator.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights for `∫₀¹ t^γ f(t) dt ≈ Σ w_i f(t_i)`, `γ > −1`.
///
/// Golub–Welsch on the Jacobi matrix with `α = 0, β = γ`, mapped from
/// `[−1, 1]` to `[0, 1]`.
pub fn gauss_jacobi_unit(n: usize, gamma: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(gamma > -1.0) || !gamma.is_finite() {
        return Err(Error::InvalidInput(format!("Jacobi exponent must exceed -1, got {gamma}")));
    }
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let (a, b) = (0.0f64, gamma);
    let ab = a + b;
    let mut jac = DMatrix::zeros(n, n);
    for i in 0..n {
        let k = i as f64;
        jac[(i, i)] = if i == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
        };
        if i + 1 < n {
            let m = k + 1.0;
            let s = 2.0 * m + ab;
            let off = (4.0 * m * (m + a) * (m + b) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
            jac[(i, i + 1)] = off;
            jac[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    // total mass of t^γ on [0, 1]
    let mu0 = 1.0 / (gamma + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (x + 1.0), mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|l, r| l.0.total_cmp(&r.0));
    Ok(pairs.into_iter().unzip())
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// Adaptive `∫ₐᵇ f` for a complex-valued integrand. Stops when the
/// estimated error is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Complex64> {
    const MAX_INTERVALS: usize = 2000;
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (v, e) = gk15(&f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    for _ in 0..MAX_INTERVALS {
        let total: Complex64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::NoConvergence { what: "quadrature", iterations: pieces.len() });
        }
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(total);
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval cannot be split further in f64
            return Ok(total);
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
    Err(Error::NoConvergence { what: "quadrature", iterations: MAX_INTERVALS })
}
