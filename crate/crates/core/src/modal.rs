//! Closed-loop characteristic polynomial in the `D^{1/q}` eigenvariable,
//! its roots and the two stability readings.
//!
//! Substituting `D^{m/q} y = λ^m y` into the scalar closed-loop equation gives
//! a polynomial in `λ`. The fractional exponential behind each root carries a
//! factor `e^{λ^q x}`, so besides the usual `Re λ < 0` test the report also
//! states whether every `Re λ^q < 0`. The two can disagree for complex roots.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{cmp_complex, eigenvalues, horner, poly_from_roots};
use crate::synth::ClosedLoop;

/// Roots closer than this are rejected as degenerate.
pub const ROOT_GAP_TOL: f64 = 1e-7;
/// Real parts within `±MARGINAL_TOL` are reported as marginal.
pub const MARGINAL_TOL: f64 = 1e-9;

/// Characteristic polynomial of a real square matrix, highest power first.
pub fn matrix_charpoly(m: &DMatrix<f64>) -> Vec<f64> {
    let eig = eigenvalues(m).unwrap_or_default();
    poly_from_roots(&eig).iter().map(|c| c.re).collect()
}

/// `[1, c_{d−1}, …, c_1, c_0]`.
pub fn char_poly(cl: &ClosedLoop) -> Vec<f64> {
    std::iter::once(1.0).chain(cl.coeffs.iter().rev().copied()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    #[serde(serialize_with = "ser_complex")]
    pub lambda: Complex64,
    /// `Re λ < 0`
    pub re_negative: bool,
    /// `Re λ^q < 0`
    pub decays: bool,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSet {
    pub modes: Vec<Mode>,
    pub q: u32,
}

impl ModeSet {
    /// Wrap roots (sorted by real, then imaginary part) with their flags.
    pub fn from_roots(mut roots: Vec<Complex64>, q: u32) -> Self {
        roots.sort_by(cmp_complex);
        let modes = roots
            .into_iter()
            .map(|lambda| Mode {
                lambda,
                re_negative: lambda.re < 0.0,
                decays: lambda.powu(q).re < 0.0,
            })
            .collect();
        ModeSet { modes, q }
    }

    pub fn roots(&self) -> Vec<Complex64> {
        self.modes.iter().map(|m| m.lambda).collect()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Smallest pairwise distance between roots.
    pub fn min_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for (i, a) in self.modes.iter().enumerate() {
            for b in &self.modes[i + 1..] {
                gap = gap.min((a.lambda - b.lambda).norm());
            }
        }
        gap
    }
}

fn polish(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    let deriv: Vec<f64> = {
        let d = coeffs.len() - 1;
        coeffs[..d].iter().enumerate().map(|(i, &c)| c * (d - i) as f64).collect()
    };
    let mut best = horner(coeffs, z).norm();
    for _ in 0..4 {
        let dp = horner(&deriv, z);
        if dp.norm() == 0.0 {
            break;
        }
        let next = z - horner(coeffs, z) / dp;
        let r = horner(coeffs, next).norm();
        if r < best {
            best = r;
            z = next;
        } else {
            break;
        }
    }
    z
}

/// Roots of a monic real polynomial (highest power first) via companion
/// eigenvalues, Newton-polished, with exact conjugate pairing.
pub fn poly_roots(coeffs: &[f64], q: u32) -> Result<ModeSet> {
    if coeffs.len() < 2 {
        return Err(Error::InvalidInput("polynomial must have degree at least 1".into()));
    }
    if coeffs[0] != 1.0 {
        return Err(Error::InvalidInput(format!("polynomial must be monic, leading {}", coeffs[0])));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput("polynomial coefficients must be finite".into()));
    }
    let d = coeffs.len() - 1;
    let mut companion = DMatrix::zeros(d, d);
    for i in 0..d - 1 {
        companion[(i, i + 1)] = 1.0;
    }
    for j in 0..d {
        companion[(d - 1, j)] = -coeffs[d - j];
    }
    let raw = eigenvalues(&companion)?;

    let is_real = |z: &Complex64| z.im.abs() <= 1e-10 * z.norm().max(1.0);
    let upper = raw.iter().filter(|z| !is_real(z) && z.im > 0.0).count();
    let lower = raw.iter().filter(|z| !is_real(z) && z.im < 0.0).count();
    let roots: Vec<Complex64> = if upper == lower {
        let mut out = Vec::with_capacity(d);
        for z in &raw {
            if is_real(z) {
                let r = polish(coeffs, Complex64::new(z.re, 0.0));
                out.push(Complex64::new(r.re, 0.0));
            } else if z.im > 0.0 {
                let r = polish(coeffs, *z);
                out.push(r);
                out.push(r.conj());
            }
        }
        out
    } else {
        raw.iter().map(|&z| polish(coeffs, z)).collect()
    };

    let modes = ModeSet::from_roots(roots, q);
    let gap = modes.min_gap();
    if gap < ROOT_GAP_TOL {
        return Err(Error::DegenerateRoots { gap });
    }
    Ok(modes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Marginal,
    Unstable,
}

impl Verdict {
    fn from_parts(parts: impl Iterator<Item = f64>) -> Self {
        let mut verdict = Verdict::Stable;
        for re in parts {
            if re > MARGINAL_TOL {
                return Verdict::Unstable;
            }
            if re >= -MARGINAL_TOL {
                verdict = Verdict::Marginal;
            }
        }
        verdict
    }

    pub fn is_stable(self) -> bool {
        self == Verdict::Stable
    }
}

/// Both stability readings, never merged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    /// All `Re λ < 0`.
    pub paper_criterion: Verdict,
    /// All `Re λ^q < 0`.
    pub mode_decay: Verdict,
}

pub fn classify_stability(modes: &ModeSet) -> StabilityReport {
    StabilityReport {
        paper_criterion: Verdict::from_parts(modes.modes.iter().map(|m| m.lambda.re)),
        mode_decay: Verdict::from_parts(modes.modes.iter().map(|m| m.lambda.powu(modes.q).re)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::{build_lifted, CostWeights};
    use crate::order::OddRationalOrder;
    use crate::riccati::solve_are_spectral;
    use crate::synth::{close_loop, regulator_gains};
    use proptest::prelude::*;

    const PUBLISHED: [f64; 7] = [1.0, 4.3809, 9.5964, 13.2864, 12.162, 6.5878, 1.4142];

    fn example_loop() -> ClosedLoop {
        let sys = build_lifted(3.0, 1.0, OddRationalOrder::new(1, 3).unwrap(), CostWeights::new(1.0, 1.0).unwrap())
            .unwrap();
        let (sol, _) = solve_are_spectral(&sys).unwrap();
        close_loop(&sys, &regulator_gains(&sol, &sys).unwrap()).unwrap()
    }

    #[test]
    fn example_char_poly() {
        let poly = char_poly(&example_loop());
        for (c, p) in poly.iter().zip(PUBLISHED) {
            assert!((c - p).abs() < 1e-3);
        }
    }

    #[test]
    fn zero_loop_char_poly_is_pure_power() {
        let cl = ClosedLoop {
            kind: crate::lift::PlantKind::Oscillatory { a: 0.0, b: 0.0 },
            order: OddRationalOrder::new(1, 3).unwrap(),
            f_cl: DMatrix::zeros(6, 6),
            coeffs: vec![0.0; 6],
        };
        assert_eq!(char_poly(&cl), vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn quadratic_roots() {
        let m = poly_roots(&[1.0, 0.0, -4.0], 1).unwrap();
        let r = m.roots();
        assert!((r[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cube_roots_of_minus_two() {
        let m = poly_roots(&[1.0, 0.0, 0.0, 2.0], 7).unwrap();
        let c = 2f64.cbrt();
        let expect = [
            Complex64::new(-c, 0.0),
            Complex64::from_polar(c, -std::f64::consts::FRAC_PI_3),
            Complex64::from_polar(c, std::f64::consts::FRAC_PI_3),
        ];
        for (r, e) in m.roots().iter().zip(expect) {
            assert!((r - e).norm() < 1e-13, "{r} vs {e}");
        }
        assert_eq!(m.modes[1].lambda, m.modes[2].lambda.conj());
    }

    #[test]
    fn example_roots_are_left_half_plane() {
        let modes = poly_roots(&PUBLISHED, 3).unwrap();
        assert_eq!(modes.len(), 6);
        for m in &modes.modes {
            let z = m.lambda;
            assert!(horner(&PUBLISHED, z).norm() <= 1e-6 * (1.0 + z.norm().powi(6)));
            assert!(m.re_negative);
        }
        let report = classify_stability(&modes);
        assert_eq!(report.paper_criterion, Verdict::Stable);
    }

    #[test]
    fn roots_match_closed_loop_eigenvalues() {
        let cl = example_loop();
        let modes = poly_roots(&char_poly(&cl), 3).unwrap();
        let mut eig = eigenvalues(&cl.f_cl).unwrap();
        eig.sort_by(cmp_complex);
        for (a, b) in modes.roots().iter().zip(&eig) {
            assert!((a - b).norm() < 1e-6);
        }
    }

    #[test]
    fn classify_simple_cases() {
        let neg = ModeSet::from_roots(vec![Complex64::new(-1.0, 0.0)], 3);
        let r = classify_stability(&neg);
        assert!(r.paper_criterion.is_stable() && r.mode_decay.is_stable());

        let z = Complex64::from_polar(2f64.cbrt(), std::f64::consts::FRAC_PI_3);
        let r = classify_stability(&ModeSet::from_roots(vec![z], 3));
        assert_eq!(r.paper_criterion, Verdict::Unstable);
        assert_eq!(r.mode_decay, Verdict::Stable);

        let r = classify_stability(&ModeSet::from_roots(vec![Complex64::new(0.0, 1.0)], 1));
        assert_eq!(r.paper_criterion, Verdict::Marginal);
    }

    #[test]
    fn repeated_roots_rejected() {
        // (λ + 1)²
        assert!(matches!(poly_roots(&[1.0, 2.0, 1.0], 1), Err(Error::DegenerateRoots { .. })));
    }

    #[test]
    fn rejects_non_monic() {
        assert!(poly_roots(&[2.0, 1.0], 1).is_err());
        assert!(poly_roots(&[1.0], 1).is_err());
    }

    proptest! {
        #[test]
        fn coefficients_reconstruct(coeffs in proptest::collection::vec(-5.0f64..5.0, 1..9)) {
            let mut poly = vec![1.0];
            poly.extend(coeffs);
            if let Ok(modes) = poly_roots(&poly, 3) {
                let back = poly_from_roots(&modes.roots());
                let scale = poly.iter().map(|c| c.abs()).fold(1.0, f64::max);
                for (b, c) in back.iter().zip(&poly) {
                    prop_assert!((b.re - c).abs() <= 1e-6 * scale, "{} vs {}", b.re, c);
                    prop_assert!(b.im.abs() <= 1e-6 * scale);
                }
            }
        }
    }
}
