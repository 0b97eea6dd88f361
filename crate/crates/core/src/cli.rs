//! Job configuration and the pipelines behind the `fracreg` binary.
//!
//! Every command reads a JSON [`JobConfig`], runs part of the pipeline
//! order → lift → riccati → synth → modal → fracsol → response and returns
//! a serializable report. Writing files and mapping errors to exit codes is
//! left to the binary.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracsol::{ic_coefficients, ic_residual};
use crate::lift::{build_first_order, build_lifted, plant_coeffs, CostWeights, InitialConditions, LiftedSystem, PlantParams};
use crate::modal::{char_poly, classify_stability, poly_roots, Mode, StabilityReport, Verdict};
use crate::order::{make_order, odd_approximate, OddRationalOrder, RationalOrder};
use crate::response::{cost, decay_metric, respond, CostEstimate, DecayMetric, Grid, Trajectory};
use crate::riccati::{solve_are_sign, solve_are_spectral, SolverKind};
use crate::synth::{close_loop, regulator_gains};

/// Exit status for bad configuration.
pub const EXIT_INVALID: i32 = 2;
/// Exit status for numerical failure.
pub const EXIT_NUMERICAL: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    if err.is_validation() {
        EXIT_INVALID
    } else {
        EXIT_NUMERICAL
    }
}

fn default_odd_tol() -> f64 {
    1e-3
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaSpec {
    pub num: i64,
    pub den: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlantKindSpec {
    #[default]
    Oscillatory,
    FirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlantSpec {
    Oscillator(PlantParams),
    FirstOrder { beta: f64 },
}

/// `x0` and the kick `y1`. Oscillators get `y'(x0) = y1` with every other
/// fractional derivative zero; first-order plants get `y(x0) = y1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcSpec {
    pub x0: f64,
    pub y1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    A,
    B,
    Qw,
    Rw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub alpha: AlphaSpec,
    #[serde(default)]
    pub plant_kind: PlantKindSpec,
    pub plant: PlantSpec,
    pub weights: CostWeights,
    pub ics: IcSpec,
    #[serde(default = "default_odd_tol")]
    pub odd_tol: f64,
    /// Replace an order that is not odd/odd by its odd/odd approximation.
    #[serde(default = "default_true")]
    pub approximate: bool,
    #[serde(default)]
    pub grid: Option<Grid>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: JobConfig = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        make_order(self.alpha.num, self.alpha.den)?;
        self.weights.validate()?;
        match (self.plant_kind, &self.plant) {
            (PlantKindSpec::Oscillatory, PlantSpec::Oscillator(p)) => {
                plant_coeffs(p)?;
            }
            (PlantKindSpec::FirstOrder, PlantSpec::FirstOrder { beta }) => {
                if !beta.is_finite() {
                    return Err(Error::InvalidInput(format!("beta must be finite, got {beta}")));
                }
            }
            (kind, _) => {
                return Err(Error::InvalidInput(format!("plant fields do not match plant_kind {kind:?}")));
            }
        }
        if !(self.odd_tol > 0.0) {
            return Err(Error::InvalidInput(format!("odd_tol must be positive, got {}", self.odd_tol)));
        }
        if !(self.ics.x0 > 0.0 && self.ics.x0.is_finite()) {
            return Err(Error::InvalidInput(format!("ics.x0 must be positive, got {}", self.ics.x0)));
        }
        if !self.ics.y1.is_finite() {
            return Err(Error::InvalidInput("ics.y1 must be finite".into()));
        }
        if let Some(g) = &self.grid {
            g.validate()?;
            if g.x_start < self.ics.x0 {
                return Err(Error::InvalidInput("grid.x_start must not precede ics.x0".into()));
            }
        }
        if let Some(s) = &self.sweep {
            if s.n < 1 || !s.from.is_finite() || !s.to.is_finite() {
                return Err(Error::InvalidInput("sweep needs finite bounds and n >= 1".into()));
            }
            if matches!(s.param, SweepParam::A | SweepParam::B) && self.plant_kind == PlantKindSpec::FirstOrder {
                return Err(Error::InvalidInput("a and b sweeps apply to oscillatory plants only".into()));
            }
        }
        Ok(())
    }

    /// Requested order and the odd/odd order actually used.
    pub fn orders(&self) -> Result<(RationalOrder, OddRationalOrder)> {
        let requested = make_order(self.alpha.num, self.alpha.den)?;
        let effective = if requested.is_odd_odd() || !self.approximate {
            requested.to_odd()?
        } else {
            odd_approximate(requested, self.odd_tol)?
        };
        Ok((requested, effective))
    }

    pub fn lifted(&self) -> Result<LiftedSystem> {
        let (_, order) = self.orders()?;
        match self.plant {
            PlantSpec::Oscillator(p) => {
                let (a, b) = plant_coeffs(&p)?;
                build_lifted(a, b, order, self.weights)
            }
            PlantSpec::FirstOrder { beta } => build_first_order(beta, order, self.weights),
        }
    }

    pub fn initial_conditions(&self, degree: usize, q: u32) -> InitialConditions {
        match self.plant_kind {
            PlantKindSpec::Oscillatory => InitialConditions::velocity_kick(q, self.ics.x0, self.ics.y1),
            PlantKindSpec::FirstOrder => InitialConditions::displacement(degree, self.ics.x0, self.ics.y1),
        }
    }

    pub fn grid_or_default(&self) -> Grid {
        self.grid.unwrap_or(Grid { x_start: self.ics.x0, x_end: self.ics.x0 + 20.0, n: 401 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cplx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cplx {
    fn from(z: Complex64) -> Self {
        Cplx { re: z.re, im: z.im }
    }
}

/// Root list with both stability readings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModesReport {
    pub q: u32,
    pub char_poly: Vec<f64>,
    pub roots: Vec<Mode>,
    pub stability: StabilityReport,
}

pub fn modes_report(char_poly: &[f64], q: u32) -> Result<ModesReport> {
    let set = poly_roots(char_poly, q)?;
    Ok(ModesReport { q, char_poly: char_poly.to_vec(), stability: classify_stability(&set), roots: set.modes })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthReport {
    pub requested_order: String,
    pub effective_order: String,
    pub plant_kind: PlantKindSpec,
    pub plant: PlantSpec,
    pub weights: CostWeights,
    pub solver: SolverKind,
    pub gains: Vec<f64>,
    /// `c_0 … c_{d−1}`
    pub closed_loop_coeffs: Vec<f64>,
    pub are_residual: f64,
    pub hamiltonian_stable_eigenvalues: Vec<Cplx>,
    /// Stable under the `Re λ < 0` reading.
    pub stable: bool,
    #[serde(flatten)]
    pub modes: ModesReport,
}

/// Just the fields `modes` needs from a synth document.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SynthDocument {
    pub q: u32,
    pub char_poly: Vec<f64>,
}

struct Synthesis {
    report: SynthReport,
    law: crate::synth::RegulatorLaw,
    cl: crate::synth::ClosedLoop,
}

fn synthesize(cfg: &JobConfig) -> Result<Synthesis> {
    let (requested, effective) = cfg.orders()?;
    let sys = cfg.lifted()?;
    let (sol, stable_eigenvalues) = match solve_are_spectral(&sys) {
        Ok((sol, dec)) => (sol, dec.stable_eigenvalues),
        Err(Error::SingularT1 { .. }) => {
            let sol = solve_are_sign(&sys)?;
            let fcl = &sys.f - &sys.g * (sys.g.transpose() * &sol.s) / sys.control_weight;
            let mut eig = crate::linalg::eigenvalues(&fcl)?;
            eig.sort_by(crate::linalg::cmp_complex);
            (sol, eig)
        }
        Err(e) => return Err(e),
    };
    let law = regulator_gains(&sol, &sys)?;
    let cl = close_loop(&sys, &law)?;
    let modes = modes_report(&char_poly(&cl), cl.denominator())?;
    let report = SynthReport {
        requested_order: requested.to_string(),
        effective_order: effective.to_string(),
        plant_kind: cfg.plant_kind,
        plant: cfg.plant,
        weights: cfg.weights,
        solver: sol.solver,
        gains: law.gains.iter().copied().collect(),
        closed_loop_coeffs: cl.coeffs.clone(),
        are_residual: sol.residual,
        hamiltonian_stable_eigenvalues: stable_eigenvalues.into_iter().map(Cplx::from).collect(),
        stable: modes.stability.paper_criterion == Verdict::Stable,
        modes,
    };
    Ok(Synthesis { report, law, cl })
}

pub fn run_synth(cfg: &JobConfig) -> Result<SynthReport> {
    Ok(synthesize(cfg)?.report)
}

pub fn run_modes(cfg: &JobConfig) -> Result<ModesReport> {
    Ok(synthesize(cfg)?.report.modes)
}

pub fn run_modes_from_synth(doc_json: &str) -> Result<ModesReport> {
    let doc: SynthDocument =
        serde_json::from_str(doc_json).map_err(|e| Error::InvalidInput(format!("synth document: {e}")))?;
    modes_report(&doc.char_poly, doc.q)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RespondSummary {
    pub requested_order: String,
    pub effective_order: String,
    pub grid: Grid,
    pub ic_residual: f64,
    pub cost: CostEstimate,
    pub decay: DecayMetric,
}

pub fn run_respond(cfg: &JobConfig) -> Result<(Trajectory, RespondSummary)> {
    let syn = synthesize(cfg)?;
    let q = syn.cl.denominator();
    let set = poly_roots(&syn.report.modes.char_poly, q)?;
    let ics = cfg.initial_conditions(set.len(), q);
    let rep = ic_coefficients(&set, &ics)?;
    let grid = cfg.grid_or_default();
    let traj = respond(&syn.cl, &rep, &syn.law, &grid)?;
    let summary = RespondSummary {
        requested_order: syn.report.requested_order,
        effective_order: syn.report.effective_order,
        grid,
        ic_residual: ic_residual(&rep, &ics)?,
        cost: cost(&traj, &cfg.weights),
        decay: decay_metric(&traj)?,
    };
    Ok((traj, summary))
}

/// `p/q` approximation of `num/den` as printed by `approx-order`.
pub fn run_approx_order(num: i64, den: i64, tol: f64) -> Result<String> {
    Ok(odd_approximate(make_order(num, den)?, tol)?.to_string())
}

/// One `synth` per grid value of the swept parameter, as CSV rows in grid
/// order. Points that fail numerically keep their row with the error name
/// in the `status` column.
pub fn run_sweep(cfg: &JobConfig, spec: &SweepSpec) -> Result<String> {
    let values: Vec<f64> = if spec.n == 1 {
        vec![spec.from]
    } else {
        (0..spec.n).map(|i| spec.from + (spec.to - spec.from) * i as f64 / (spec.n - 1) as f64).collect()
    };
    let dim = cfg.lifted()?.dim();
    let jobs = values
        .iter()
        .map(|&v| {
            let mut c = cfg.clone();
            match spec.param {
                SweepParam::Qw => c.weights.qw = v,
                SweepParam::Rw => c.weights.rw = v,
                SweepParam::A | SweepParam::B => {
                    let PlantSpec::Oscillator(p) = c.plant else {
                        return Err(Error::InvalidInput("a and b sweeps apply to oscillatory plants only".into()));
                    };
                    let (a, b) = plant_coeffs(&p)?;
                    let (a, b) = if spec.param == SweepParam::A { (v, b) } else { (a, v) };
                    c.plant = PlantSpec::Oscillator(PlantParams::Direct { a, b });
                }
            }
            c.sweep = None;
            c.validate()?;
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<std::result::Result<SynthReport, Error>> = jobs.par_iter().map(run_synth).collect();

    let mut out = String::from("value,status,paper_criterion,mode_decay");
    for j in 0..dim {
        let _ = write!(out, ",k{j}");
    }
    out.push('\n');
    for (v, row) in values.iter().zip(rows) {
        match row {
            Ok(r) => {
                let _ = write!(
                    out,
                    "{},ok,{},{}",
                    format_number(*v),
                    verdict_name(r.modes.stability.paper_criterion),
                    verdict_name(r.modes.stability.mode_decay)
                );
                for k in &r.gains {
                    let _ = write!(out, ",{}", format_number(*k));
                }
            }
            Err(e) => {
                let _ = write!(out, "{},{},,", format_number(*v), e.name());
                out.push_str(&",".repeat(dim));
            }
        }
        out.push('\n');
    }
    Ok(out)
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Stable => "stable",
        Verdict::Marginal => "marginal",
        Verdict::Unstable => "unstable",
    }
}

/// Positional decimal with 15 significant digits.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (14 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding can carry into a new leading digit
    let digits = s.chars().filter(|c| c.is_ascii_digit()).skip_while(|&c| c == '0').count();
    if digits > 15 && decimals > 0 {
        format!("{:.*}", decimals - 1, v)
    } else {
        s
    }
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("x,y,u\n");
    for s in &traj.samples {
        let _ = writeln!(out, "{},{},{}", format_number(s.x), format_number(s.y), format_number(s.u));
    }
    out
}

/// Pretty JSON with shortest round-trip floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAPER: &str = r#"{
        "alpha": {"num": 1, "den": 3},
        "plant": {"a": 3.0, "b": 1.0},
        "weights": {"qw": 1.0, "rw": 1.0},
        "ics": {"x0": 0.1, "y1": 1.0}
    }"#;

    const SCALAR: &str = r#"{
        "alpha": {"num": 1, "den": 2},
        "plant_kind": "first_order",
        "plant": {"beta": 1.0},
        "weights": {"qw": 3.0, "rw": 1.0},
        "ics": {"x0": 0.1, "y1": 1.0},
        "odd_tol": 0.08
    }"#;

    #[test]
    fn parses_defaults() {
        let cfg = JobConfig::from_json(PAPER).unwrap();
        assert_eq!(cfg.odd_tol, 1e-3);
        assert!(cfg.approximate);
        assert_eq!(cfg.plant_kind, PlantKindSpec::Oscillatory);
    }

    #[test]
    fn rejects_bad_configs() {
        let wrong_kind = PAPER.replace("\"plant\"", "\"plant_kind\": \"first_order\", \"plant\"");
        assert!(JobConfig::from_json(&wrong_kind).unwrap_err().is_validation());
        assert!(JobConfig::from_json(&PAPER.replace("\"qw\": 1.0", "\"qw\": -1.0")).is_err());
        assert!(JobConfig::from_json(&PAPER.replace("\"den\": 3", "\"den\": 1")).is_err());
        assert!(JobConfig::from_json(&PAPER.replace("\"x0\": 0.1", "\"x0\": 0.0")).is_err());
        assert!(JobConfig::from_json("{").is_err());
        assert!(JobConfig::from_json(&PAPER.replace("\"ics\"", "\"extra\": 1, \"ics\"")).is_err());
    }

    #[test]
    fn paper_synthesis() {
        let r = run_synth(&JobConfig::from_json(PAPER).unwrap()).unwrap();
        let published = [0.4142, 3.5878, 12.162, 13.2864, 9.5964, 4.3809];
        for (k, p) in r.gains.iter().zip(published) {
            assert!((k - p).abs() < 1e-3);
        }
        assert!(r.stable);
        assert_eq!(r.effective_order, "1/3");
        assert_eq!(r.modes.roots.len(), 6);
    }

    #[test]
    fn scalar_synthesis_with_approximation() {
        let r = run_synth(&JobConfig::from_json(SCALAR).unwrap()).unwrap();
        assert_eq!(r.requested_order, "1/2");
        assert_eq!(r.effective_order, "3/7");
        assert!((r.gains[0] - 3.0).abs() < 1e-12);
        assert!((r.closed_loop_coeffs[0] - 2.0).abs() < 1e-12);
        let exact = SCALAR.replace("\"odd_tol\": 0.08", "\"approximate\": false");
        let err = run_synth(&JobConfig::from_json(&exact).unwrap()).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_NUMERICAL);
        assert_eq!(err.name(), "EvenOrder");
    }

    #[test]
    fn modes_round_trip_is_exact() {
        let r = run_synth(&JobConfig::from_json(PAPER).unwrap()).unwrap();
        let doc = to_json(&r);
        let m = run_modes_from_synth(&doc).unwrap();
        assert_eq!(m.roots, r.modes.roots);
        assert_eq!(to_json(&m), to_json(&r.modes));
    }

    #[test]
    fn approx_order_text() {
        assert_eq!(run_approx_order(1, 2, 0.08).unwrap(), "3/7");
        assert!(run_approx_order(3, 2, 0.0).is_err());
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.0), "1.00000000000000");
        assert_eq!(format_number(-0.5), "-0.500000000000000");
        assert_eq!(format_number(12345.678), "12345.6780000000");
        assert_eq!(format_number(9.999999999999999), "10.0000000000000");
        assert_eq!(format_number(1e20), "100000000000000000000");
    }

    #[test]
    fn sweep_rows_in_grid_order() {
        let mut cfg = JobConfig::from_json(PAPER).unwrap();
        let spec = SweepSpec { param: SweepParam::Qw, from: 1.0, to: 3.0, n: 3 };
        cfg.sweep = Some(spec);
        let csv = run_sweep(&cfg, &spec).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "value,status,paper_criterion,mode_decay,k0,k1,k2,k3,k4,k5");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1.00000000000000,ok,stable"));
        assert!(lines[3].starts_with("3.00000000000000,ok"));
    }

    #[test]
    fn respond_pipeline() {
        let mut cfg = JobConfig::from_json(SCALAR).unwrap();
        cfg.grid = Some(Grid { x_start: 0.1, x_end: 5.1, n: 51 });
        let (traj, summary) = run_respond(&cfg).unwrap();
        assert_eq!(traj.samples.len(), 51);
        assert!((traj.samples[0].y - 1.0).abs() < 1e-9);
        assert!(summary.ic_residual < 1e-10);
        assert!(summary.decay.monotone_envelope);
        let csv = trajectory_csv(&traj);
        assert!(csv.starts_with("x,y,u\n0.100000000000000,"));
    }
}
