//! Dense eigen-helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

const SCHUR_MAX_ITER: usize = 10_000;

/// All eigenvalues of a real square matrix.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::EigenSolverFailure { n })?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Right eigenvector of `m` for the (approximate) eigenvalue `lambda`,
/// by shifted inverse iteration in complex arithmetic. Normalized to unit
/// 2-norm with its largest component real and positive.
pub fn eigenvector(m: &DMatrix<f64>, lambda: Complex64) -> Result<DVector<Complex64>> {
    let n = m.nrows();
    let scale = m.norm().max(1.0);
    // a tiny real offset keeps the LU factors finite at an exact eigenvalue
    let shift = lambda + Complex64::new(1e-11 * scale, 0.0);
    let mut a: DMatrix<Complex64> = m.map(|v| Complex64::new(v, 0.0));
    for i in 0..n {
        a[(i, i)] -= shift;
    }
    let lu = a.lu();
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.1 * i as f64, 0.05 * (i % 3) as f64));
    for _ in 0..4 {
        let w = lu.solve(&v).ok_or(Error::EigenSolverFailure { n })?;
        let norm = w.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::EigenSolverFailure { n });
        }
        v = w / Complex64::new(norm, 0.0);
    }
    let (imax, _) = v
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc });
    let phase = v[imax] / v[imax].norm();
    Ok(v / phase)
}

/// Coefficients (highest power first) of `Π (λ − r)`.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        coeffs = next;
    }
    coeffs
}

/// Evaluate a real-coefficient polynomial (highest power first) at `z`.
pub fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Lexicographic order on (re, im), used for deterministic spectra.
pub fn cmp_complex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}
