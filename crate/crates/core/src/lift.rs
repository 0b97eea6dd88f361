//! Companion-form normal systems in the `D^{1/q}` step.
//!
//! The oscillator `y'' + a D^{p/q} y + b y = u` becomes a `2q`-dimensional
//! system `D^{1/q} z = F z + G u` with `z_j = D^{j/q} y`. First-order plants
//! `D^{p/q} y = beta y + u` stay scalar in their own `D^{p/q}` step.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::OddRationalOrder;

/// Plant description, either from physical constants or direct coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlantParams {
    /// Rigid plate of mass `m` and area `s` in a fluid of density `rho`
    /// and viscosity `mu`, held by a spring of stiffness `k`.
    Physical { m: f64, s: f64, rho: f64, mu: f64, k: f64 },
    Direct { a: f64, b: f64 },
}

/// Weights of the quadratic cost `1/2 ∫ (qw y² + rw u²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub qw: f64,
    pub rw: f64,
}

impl CostWeights {
    pub fn new(qw: f64, rw: f64) -> Result<Self> {
        let w = CostWeights { qw, rw };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.qw > 0.0 && self.qw.is_finite()) || !(self.rw > 0.0 && self.rw.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "cost weights must be positive and finite (qw = {}, rw = {})",
                self.qw, self.rw
            )));
        }
        Ok(())
    }
}

/// Damping and stiffness coefficients `(a, b)` of the oscillator.
pub fn plant_coeffs(params: &PlantParams) -> Result<(f64, f64)> {
    let (a, b) = match *params {
        PlantParams::Physical { m, s, rho, mu, k } => {
            if !(m > 0.0) {
                return Err(Error::InvalidInput(format!("mass must be positive, got {m}")));
            }
            let mu_rho = mu * rho;
            if mu_rho < 0.0 {
                return Err(Error::InvalidInput(format!("mu * rho must be nonnegative, got {mu_rho}")));
            }
            if s < 0.0 || k < 0.0 {
                return Err(Error::InvalidInput("area and spring constant must be nonnegative".into()));
            }
            (2.0 * s * mu_rho.sqrt() / m, k / m)
        }
        PlantParams::Direct { a, b } => (a, b),
    };
    if !(a >= 0.0 && a.is_finite()) || !(b >= 0.0 && b.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "plant coefficients must be finite and nonnegative (a = {a}, b = {b})"
        )));
    }
    Ok((a, b))
}

/// Which scalar equation a [`LiftedSystem`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PlantKind {
    /// `y'' + a D^{p/q} y + b y = u`, lifted with step `1/q`.
    Oscillatory { a: f64, b: f64 },
    /// `D^{p/q} y = beta y + u`, kept as a scalar system in step `p/q`.
    FirstOrder { beta: f64 },
    /// Matrices supplied directly, state `j` read as `D^{j/q} y`.
    General,
}

/// Normal system `D^{step} z = F z + G u` with cost weights `Q`, `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedSystem {
    pub kind: PlantKind,
    pub order: OddRationalOrder,
    pub f: DMatrix<f64>,
    pub g: DVector<f64>,
    pub state_weight: DMatrix<f64>,
    pub control_weight: f64,
}

impl LiftedSystem {
    pub fn dim(&self) -> usize {
        self.f.nrows()
    }

    /// Denominator `q` of the eigenvariable step `D^{1/q}`.
    pub fn denominator(&self) -> u32 {
        self.order.denominator() as u32
    }

    /// Degree of the characteristic polynomial in the `D^{1/q}` eigenvariable.
    pub fn modal_degree(&self) -> usize {
        match self.kind {
            PlantKind::Oscillatory { .. } | PlantKind::General => self.dim(),
            PlantKind::FirstOrder { .. } => self.order.numerator() as usize,
        }
    }

    /// Power of the `D^{1/q}` eigenvalue carried by state component `j`.
    pub fn state_exponents(&self) -> Vec<u32> {
        state_exponents(&self.kind, self.dim())
    }

    /// Wrap raw matrices as a [`PlantKind::General`] system.
    pub fn from_matrices(
        f: DMatrix<f64>,
        g: DVector<f64>,
        state_weight: DMatrix<f64>,
        control_weight: f64,
        order: OddRationalOrder,
    ) -> Result<Self> {
        let n = f.nrows();
        if f.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.ncols() });
        }
        if g.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.len() });
        }
        if state_weight.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: state_weight.nrows() });
        }
        if !(control_weight > 0.0) {
            return Err(Error::InvalidInput("control weight must be positive".into()));
        }
        Ok(LiftedSystem {
            kind: PlantKind::General,
            order,
            f,
            g,
            state_weight,
            control_weight,
        })
    }
}

pub(crate) fn state_exponents(kind: &PlantKind, dim: usize) -> Vec<u32> {
    match kind {
        PlantKind::Oscillatory { .. } | PlantKind::General => (0..dim as u32).collect(),
        PlantKind::FirstOrder { .. } => vec![0; dim],
    }
}

/// Companion lifting of the oscillator with step `1/q`.
pub fn build_lifted(a: f64, b: f64, order: OddRationalOrder, w: CostWeights) -> Result<LiftedSystem> {
    w.validate()?;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput("plant coefficients must be finite".into()));
    }
    let q = order.denominator() as usize;
    let p = order.numerator() as usize;
    let n = 2 * q;
    let mut f = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        f[(i, i + 1)] = 1.0;
    }
    f[(n - 1, 0)] -= b;
    f[(n - 1, p)] -= a;
    let mut g = DVector::zeros(n);
    g[n - 1] = 1.0;
    let mut state_weight = DMatrix::zeros(n, n);
    state_weight[(0, 0)] = w.qw;
    Ok(LiftedSystem {
        kind: PlantKind::Oscillatory { a, b },
        order,
        f,
        g,
        state_weight,
        control_weight: w.rw,
    })
}

/// Scalar normal system for `D^{p/q} y = beta y + u`.
pub fn build_first_order(beta: f64, order: OddRationalOrder, w: CostWeights) -> Result<LiftedSystem> {
    w.validate()?;
    if !beta.is_finite() {
        return Err(Error::InvalidInput("beta must be finite".into()));
    }
    Ok(LiftedSystem {
        kind: PlantKind::FirstOrder { beta },
        order,
        f: DMatrix::from_element(1, 1, beta),
        g: DVector::from_element(1, 1.0),
        state_weight: DMatrix::from_element(1, 1, w.qw),
        control_weight: w.rw,
    })
}

/// Open-loop characteristic polynomial in the `D^{1/q}` eigenvariable,
/// monic, coefficients from the highest power down.
pub fn open_loop_charpoly(sys: &LiftedSystem) -> Vec<f64> {
    let degree = sys.modal_degree();
    let mut coeffs = vec![0.0; degree + 1];
    coeffs[0] = 1.0;
    match sys.kind {
        PlantKind::Oscillatory { a, b } => {
            let p = sys.order.numerator() as usize;
            coeffs[degree - p] += a;
            coeffs[degree] += b;
        }
        PlantKind::FirstOrder { beta } => coeffs[degree] -= beta,
        PlantKind::General => return crate::modal::matrix_charpoly(&sys.f),
    }
    coeffs
}

/// Initial data `D^{m/q} y(x0)` for `m = 0..degree`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialConditions {
    pub x0: f64,
    pub values: Vec<f64>,
}

impl InitialConditions {
    /// The oscillator pattern: every fractional derivative vanishes at `x0`
    /// except `y'(x0) = y1`.
    pub fn velocity_kick(q: u32, x0: f64, y1: f64) -> Self {
        let mut values = vec![0.0; 2 * q as usize];
        values[q as usize] = y1;
        InitialConditions { x0, values }
    }

    /// `y(x0) = y0` with all lower fractional derivatives zero.
    pub fn displacement(degree: usize, x0: f64, y0: f64) -> Self {
        let mut values = vec![0.0; degree];
        values[0] = y0;
        InitialConditions { x0, values }
    }
}
