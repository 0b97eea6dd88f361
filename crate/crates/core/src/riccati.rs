//! Stabilizing solutions of `S F + Fᵀ S − S G R⁻¹ Gᵀ S + Q = 0`.
//!
//! Two independent routes are provided. The spectral route spans the stable
//! invariant subspace of the Hamiltonian with eigenvectors, stacks the basis
//! as `[T1; T3]` and returns `S = T3 T1⁻¹`. The sign route runs the Newton
//! iteration `Z ← (Z + Z⁻¹)/2` on the Hamiltonian and reads `S` off the
//! resulting stable projector.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lift::LiftedSystem;
use crate::linalg::{cmp_complex, eigenvalues, eigenvector};

/// Eigenvalues with `|Re μ|` at or below this are treated as imaginary.
pub const SPECTRAL_GAP_TOL: f64 = 1e-9;
/// Largest acceptable condition number of `T1`.
const T1_MAX_CONDITION: f64 = 1e13;

const SIGN_TOL: f64 = 1e-12;
const SIGN_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Spectral,
    Sign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution {
    pub s: DMatrix<f64>,
    /// Frobenius norm of the Riccati left-hand side at `s`.
    pub residual: f64,
    pub solver: SolverKind,
}

impl RiccatiSolution {
    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.s.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Positive semidefinite up to `1e-8 ‖S‖`.
    pub fn is_positive_semidefinite(&self) -> bool {
        self.min_eigenvalue() >= -1e-8 * self.s.norm().max(1.0)
    }
}

/// Spectral data behind a [`RiccatiSolution`] from [`solve_are_spectral`].
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianDecomposition {
    pub h: DMatrix<f64>,
    /// Stable half of the spectrum, sorted by (re, im).
    pub stable_eigenvalues: Vec<Complex64>,
    pub t1: DMatrix<f64>,
    pub t3: DMatrix<f64>,
}

/// `H = [[F, −(1/R) G Gᵀ], [−Q, −Fᵀ]]`.
pub fn build_hamiltonian(sys: &LiftedSystem) -> DMatrix<f64> {
    let n = sys.dim();
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    let ggt = &sys.g * sys.g.transpose() / sys.control_weight;
    h.view_mut((0, 0), (n, n)).copy_from(&sys.f);
    h.view_mut((0, n), (n, n)).copy_from(&(-ggt));
    h.view_mut((n, 0), (n, n)).copy_from(&(-&sys.state_weight));
    h.view_mut((n, n), (n, n)).copy_from(&(-sys.f.transpose()));
    h
}

/// Frobenius norm of `S F + Fᵀ S − S G R⁻¹ Gᵀ S + Q`.
pub fn are_residual(s: &DMatrix<f64>, sys: &LiftedSystem) -> Result<f64> {
    let n = sys.dim();
    if s.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: s.nrows() });
    }
    let sg = s * &sys.g;
    let lhs = s * &sys.f + sys.f.transpose() * s - &sg * sg.transpose() / sys.control_weight
        + &sys.state_weight;
    Ok(lhs.norm())
}

fn symmetrize(s: &DMatrix<f64>) -> DMatrix<f64> {
    (s + s.transpose()) * 0.5
}

fn finish(s: DMatrix<f64>, sys: &LiftedSystem, solver: SolverKind) -> Result<RiccatiSolution> {
    let s = symmetrize(&s);
    let residual = are_residual(&s, sys)?;
    Ok(RiccatiSolution { s, residual, solver })
}

fn nearest_imaginary(eig: &[Complex64]) -> Option<Complex64> {
    eig.iter().copied().min_by(|a, b| a.re.abs().total_cmp(&b.re.abs()))
}

/// Stabilizing solution through the stable eigenvectors of the Hamiltonian.
pub fn solve_are_spectral(sys: &LiftedSystem) -> Result<(RiccatiSolution, HamiltonianDecomposition)> {
    let n = sys.dim();
    let h = build_hamiltonian(sys);
    let eig = eigenvalues(&h)?;
    if let Some(z) = eig.iter().find(|z| z.re.abs() <= SPECTRAL_GAP_TOL) {
        return Err(Error::ImaginaryAxisEigenvalue { re: z.re, im: z.im });
    }
    let mut stable: Vec<Complex64> = eig.into_iter().filter(|z| z.re < -SPECTRAL_GAP_TOL).collect();
    stable.sort_by(cmp_complex);
    if stable.len() != n {
        return Err(Error::EigenSolverFailure { n: 2 * n });
    }

    // real basis: one column per real eigenvalue, (Re v, Im v) per conjugate pair
    let mut basis = DMatrix::<f64>::zeros(2 * n, n);
    let mut col = 0;
    for &mu in &stable {
        if mu.im < 0.0 {
            continue;
        }
        let v = eigenvector(&h, mu)?;
        if mu.im == 0.0 {
            basis.set_column(col, &v.map(|z| z.re));
            col += 1;
        } else {
            if col + 2 > n {
                return Err(Error::EigenSolverFailure { n: 2 * n });
            }
            basis.set_column(col, &v.map(|z| z.re));
            basis.set_column(col + 1, &v.map(|z| z.im));
            col += 2;
        }
    }
    if col != n {
        return Err(Error::EigenSolverFailure { n: 2 * n });
    }
    let t1 = basis.rows(0, n).into_owned();
    let t3 = basis.rows(n, n).into_owned();

    let sv = t1.clone().singular_values();
    let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= T1_MAX_CONDITION) {
        return Err(Error::SingularT1 { condition });
    }
    // S = T3 T1⁻¹  <=>  T1ᵀ Sᵀ = T3ᵀ
    let st = t1
        .transpose()
        .lu()
        .solve(&t3.transpose())
        .ok_or(Error::SingularT1 { condition })?;
    let solution = finish(st.transpose(), sys, SolverKind::Spectral)?;
    Ok((solution, HamiltonianDecomposition { h, stable_eigenvalues: stable, t1, t3 }))
}

/// Stabilizing solution through the matrix sign function of the Hamiltonian.
pub fn solve_are_sign(sys: &LiftedSystem) -> Result<RiccatiSolution> {
    let n = sys.dim();
    let h = build_hamiltonian(sys);
    let dim = 2 * n;
    let mut z = h.clone();
    let mut scaled = true;
    let mut converged = false;
    for _ in 0..SIGN_MAX_ITER {
        let lu = z.clone().lu();
        let zinv = match lu.try_inverse() {
            Some(inv) if inv.iter().all(|v| v.is_finite()) => inv,
            _ => return Err(stall_error(&h)),
        };
        let c = if scaled {
            // |det Z|^{-1/N} from the LU diagonal, computed in log space
            let u = z.clone().lu().u();
            let log_det: f64 = u.diagonal().iter().map(|d| d.abs().ln()).sum();
            (-log_det / dim as f64).exp()
        } else {
            1.0
        };
        let next = (&z * c + zinv / c) * 0.5;
        let diff = (&next - &z).norm();
        let size = z.norm();
        z = next;
        if diff <= SIGN_TOL * size {
            converged = true;
            break;
        }
        if diff < 1e-2 * size {
            scaled = false;
        }
    }
    if !converged {
        let involution = (&z * &z - DMatrix::<f64>::identity(dim, dim)).norm();
        if involution > 1e-6 * z.norm_squared().max(1.0) {
            return Err(stall_error(&h));
        }
        return Err(Error::NoConvergence { what: "matrix sign iteration", iterations: SIGN_MAX_ITER });
    }

    // W [I; S] = −[I; S]  =>  [W12; W22 + I] S = −[W11 + I; W21]
    let eye = DMatrix::<f64>::identity(n, n);
    let mut lhs = DMatrix::zeros(dim, n);
    lhs.view_mut((0, 0), (n, n)).copy_from(&z.view((0, n), (n, n)));
    lhs.view_mut((n, 0), (n, n)).copy_from(&(z.view((n, n), (n, n)) + &eye));
    let mut rhs = DMatrix::zeros(dim, n);
    rhs.view_mut((0, 0), (n, n)).copy_from(&(-(z.view((0, 0), (n, n)) + &eye)));
    rhs.view_mut((n, 0), (n, n)).copy_from(&(-z.view((n, 0), (n, n))));
    let s = lhs
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|_| Error::SingularT1 { condition: f64::INFINITY })?;
    finish(s, sys, SolverKind::Sign)
}

fn stall_error(h: &DMatrix<f64>) -> Error {
    match eigenvalues(h).ok().as_deref().and_then(nearest_imaginary) {
        Some(z) => Error::ImaginaryAxisEigenvalue { re: z.re, im: z.im },
        None => Error::EigenSolverFailure { n: h.nrows() },
    }
}
