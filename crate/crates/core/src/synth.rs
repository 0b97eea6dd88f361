//! Regulator gains and the closed loop they produce.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lift::{LiftedSystem, PlantKind};
use crate::order::OddRationalOrder;
use crate::riccati::RiccatiSolution;

/// State feedback `u = −K · z` over the lifted states `z_j = D^{j/q} y`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegulatorLaw {
    pub gains: DVector<f64>,
    pub rw: f64,
}

impl RegulatorLaw {
    pub fn control(&self, z: &DVector<f64>) -> f64 {
        -self.gains.dot(z)
    }
}

/// `K = (1/R) Gᵀ S`, which for a companion lifting is the last row of `S`.
pub fn regulator_gains(sol: &RiccatiSolution, sys: &LiftedSystem) -> Result<RegulatorLaw> {
    let n = sys.dim();
    if sol.s.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: sol.s.nrows() });
    }
    let gains = (sys.g.transpose() * &sol.s).transpose() / sys.control_weight;
    Ok(RegulatorLaw { gains, rw: sys.control_weight })
}

/// Closed loop `D^{step} z = F_cl z` together with its scalar equation
/// `(D^{1/q})^d y + c_{d−1} (D^{1/q})^{d−1} y + … + c_0 y = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoop {
    pub kind: PlantKind,
    pub order: OddRationalOrder,
    pub f_cl: DMatrix<f64>,
    /// `c_0 … c_{d−1}`, lowest power first.
    pub coeffs: Vec<f64>,
}

impl ClosedLoop {
    pub fn denominator(&self) -> u32 {
        self.order.denominator() as u32
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn state_exponents(&self) -> Vec<u32> {
        crate::lift::state_exponents(&self.kind, self.f_cl.nrows())
    }
}

/// Apply `law` to `sys`: `F_cl = F − G Kᵀ`.
pub fn close_loop(sys: &LiftedSystem, law: &RegulatorLaw) -> Result<ClosedLoop> {
    let n = sys.dim();
    if law.gains.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: law.gains.len() });
    }
    let f_cl = &sys.f - &sys.g * law.gains.transpose();
    let coeffs = match sys.kind {
        // F_cl stays a companion matrix; its last row is −[c_0 … c_{2q−1}]
        PlantKind::Oscillatory { .. } => f_cl.row(n - 1).iter().map(|v| -v).collect(),
        // D^{p/q} y = F_cl y  <=>  λ^p − F_cl = 0
        PlantKind::FirstOrder { .. } => {
            let mut c = vec![0.0; sys.modal_degree()];
            c[0] = -f_cl[(0, 0)];
            c
        }
        PlantKind::General => {
            let poly = crate::modal::matrix_charpoly(&f_cl);
            poly[1..].iter().rev().copied().collect()
        }
    };
    Ok(ClosedLoop { kind: sys.kind, order: sys.order, f_cl, coeffs })
}
