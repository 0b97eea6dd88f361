//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fracreg::fracsol::{eval_solution, frac_exp_closed, frac_exp_series, ic_coefficients, weak_singular_integral};
use fracreg::lift::{build_first_order, build_lifted, CostWeights, InitialConditions};
use fracreg::linalg::{eigenvalues, horner};
use fracreg::modal::{char_poly, poly_roots, ModeSet};
use fracreg::order::{make_order, odd_approximate, OddRationalOrder};
use fracreg::response::{decay_metric, respond, tail_log_slope, Grid};
use fracreg::riccati::{are_residual, build_hamiltonian, solve_are_sign, solve_are_spectral};
use fracreg::special::rgamma;
use fracreg::synth::{close_loop, regulator_gains, ClosedLoop, RegulatorLaw};

const GAINS: [f64; 6] = [0.4142, 3.5878, 12.162, 13.2864, 9.5964, 4.3809];
const COEFFS: [f64; 6] = [1.4142, 6.5878, 12.162, 13.2864, 9.5964, 4.3809];
const POLY: [f64; 7] = [1.0, 4.3809, 9.5964, 13.2864, 12.162, 6.5878, 1.4142];

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("[{}] {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn odd(p: u64, q: u64) -> OddRationalOrder {
    if q == 1 {
        OddRationalOrder::classical()
    } else {
        OddRationalOrder::new(p, q).unwrap()
    }
}

fn example_loop() -> (ClosedLoop, RegulatorLaw) {
    let sys = build_lifted(3.0, 1.0, odd(1, 3), CostWeights::new(1.0, 1.0).unwrap()).unwrap();
    let (sol, _) = solve_are_spectral(&sys).unwrap();
    let law = regulator_gains(&sol, &sys).unwrap();
    (close_loop(&sys, &law).unwrap(), law)
}

fn gains(r: &mut Report) {
    let t = Instant::now();
    let (_, law) = example_loop();
    let secs = t.elapsed().as_secs_f64();
    let err = law.gains.iter().zip(GAINS).map(|(k, p)| (k - p).abs()).fold(0.0, f64::max);
    r.line(
        "1 gain reproduction",
        err <= 1e-3 && secs < 1.0,
        format!("max |K - published| = {err:.2e} (tol 1e-3), {secs:.3} s (limit 1 s)"),
    );
}

fn closed_loop_poly(r: &mut Report) {
    let (cl, law) = example_loop();
    let err = cl.coeffs.iter().zip(COEFFS).map(|(c, p)| (c - p).abs()).fold(0.0, f64::max);
    let s0 = (cl.coeffs[0] - law.gains[0] - 1.0).abs();
    let s1 = (cl.coeffs[1] - law.gains[1] - 3.0).abs();
    r.line(
        "2 closed-loop polynomial",
        err <= 1e-3 && s0 <= 1e-9 && s1 <= 1e-9,
        format!("max coeff error {err:.2e} (tol 1e-3), |c0-K1-1| = {s0:.1e}, |c1-K2-3| = {s1:.1e} (tol 1e-9)"),
    );
}

fn stability(r: &mut Report) {
    let modes = poly_roots(&POLY, 3).unwrap();
    let worst = modes.modes.iter().map(|m| m.lambda.re).fold(f64::NEG_INFINITY, f64::max);
    r.line(
        "3 stability of published polynomial",
        modes.len() == 6 && worst < -1e-9,
        format!("{} roots, max Re = {worst:.6}", modes.len()),
    );
}

fn scalar_example(r: &mut Report) {
    let order = odd_approximate(make_order(1, 2).unwrap(), 0.08).unwrap();
    let sys = build_first_order(1.0, order, CostWeights::new(3.0, 1.0).unwrap()).unwrap();
    let (sol, dec) = solve_are_spectral(&sys).unwrap();
    let law = regulator_gains(&sol, &sys).unwrap();
    let cl = close_loop(&sys, &law).unwrap();
    let eig = (dec.stable_eigenvalues[0] - Complex64::new(-2.0, 0.0)).norm();
    let s = (sol.s[(0, 0)] - 3.0).abs();
    let k = (law.gains[0] - 3.0).abs();
    let f = (cl.f_cl[(0, 0)] + 2.0).abs();
    r.line(
        "4 scalar example",
        order.to_string() == "3/7" && eig <= 1e-9 && s <= 1e-9 && k <= 1e-9 && f <= 1e-9,
        format!("order {order}, |mu+2| = {eig:.1e}, |S-3| = {s:.1e}, |K-3| = {k:.1e}, |F_cl+2| = {f:.1e}"),
    );
}

fn solver_cross_validation(r: &mut Report) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut compared = 0;
    let mut worst_diff = 0.0f64;
    let mut worst_res = 0.0f64;
    let mut ok = true;
    for _ in 0..50 {
        let q = [1u64, 3, 5, 7][rng.gen_range(0..4)];
        let p = if q == 1 {
            1
        } else {
            let choices: Vec<u64> = (1..2 * q).step_by(2).filter(|&p| p != q && gcd(p, q) == 1).collect();
            choices[rng.gen_range(0..choices.len())]
        };
        let a = rng.gen_range(0.0..10.0);
        let b = rng.gen_range(0.0..10.0);
        let w = CostWeights::new(rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0)).unwrap();
        let sys = build_lifted(a, b, odd(p, q), w).unwrap();
        let (Ok((spec, _)), Ok(sign)) = (solve_are_spectral(&sys), solve_are_sign(&sys)) else {
            continue;
        };
        compared += 1;
        let scale = spec.s.norm().max(1.0);
        let diff = (&spec.s - &sign.s).norm() / scale;
        let res = are_residual(&spec.s, &sys).unwrap().max(are_residual(&sign.s, &sys).unwrap()) / (scale * scale);
        worst_diff = worst_diff.max(diff);
        worst_res = worst_res.max(res);
        ok &= diff <= 1e-6 && res <= 1e-6;
    }
    let secs = t.elapsed().as_secs_f64();
    r.line(
        "5 Riccati solver cross-validation",
        ok && compared > 0 && secs < 10.0,
        format!(
            "{compared}/50 compared, max diff/max(1,|S|) = {worst_diff:.1e}, max residual/max(1,|S|^2) = {worst_res:.1e}, {secs:.2} s"
        ),
    );
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn dual_evaluation(r: &mut Report) {
    let lambdas = [
        Complex64::new(-0.5, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(-2.0, 0.0),
        Complex64::new(-1.0, 1.0),
        Complex64::new(-1.0, -1.0),
    ];
    let xs: Vec<f64> = (0..20).map(|i| 0.1 + 9.9 * i as f64 / 19.0).collect();
    let mut worst = 0.0f64;
    let mut worst_exp = 0.0f64;
    for &q in &[1u32, 3, 5] {
        for &l in &lambdas {
            for &x in &xs {
                let s = frac_exp_series(l, x, q, 1e-17).unwrap();
                let c = frac_exp_closed(l, x, q).unwrap();
                worst = worst.max((s - c).norm() / s.norm());
                if q == 1 {
                    let e = (l * x).exp();
                    worst_exp = worst_exp.max((s - e).norm() / e.norm()).max((c - e).norm() / e.norm());
                }
            }
        }
    }
    r.line(
        "6 series vs closed form",
        worst <= 1e-7 && worst_exp <= 1e-10,
        format!("max relative difference {worst:.1e} (tol 1e-7), q=1 vs exp {worst_exp:.1e} (tol 1e-10)"),
    );
}

fn weak_singular_identity(r: &mut Report) {
    let h = 1e-4;
    let mut worst = 0.0f64;
    for &g in &[-2.0 / 3.0, -1.0 / 3.0] {
        for &mu in &[-1.0, -2.0] {
            let mu = Complex64::new(mu, 0.0);
            for &x in &[0.5f64, 1.0, 2.0, 5.0] {
                let fd = (weak_singular_integral(mu, x + h, g).unwrap() - weak_singular_integral(mu, x - h, g).unwrap())
                    / (2.0 * h);
                let rhs = x.powf(g) * rgamma(g + 1.0) + mu * weak_singular_integral(mu, x, g).unwrap();
                worst = worst.max((fd - rhs).norm());
            }
        }
    }
    r.line("7 weak-singularity identity", worst <= 1e-5, format!("max |FD - identity| = {worst:.1e} (tol 1e-5)"));
}

fn decay(r: &mut Report) {
    let (cl, law) = example_loop();
    let modes = poly_roots(&char_poly(&cl), 3).unwrap();
    let rep = ic_coefficients(&modes, &InitialConditions::velocity_kick(3, 0.1, 1.0)).unwrap();
    let traj = respond(&cl, &rep, &law, &Grid::new(0.1, 20.0, 400).unwrap()).unwrap();
    let m = decay_metric(&traj).unwrap();
    let tail = traj.samples.iter().filter(|s| s.x >= 15.0).map(|s| s.y.abs()).fold(0.0, f64::max);
    let ratio = tail / m.peak;
    let first_ok = m.monotone_envelope && ratio < 1e-2;

    let order = odd_approximate(make_order(1, 2).unwrap(), 0.08).unwrap();
    let sys = build_first_order(1.0, order, CostWeights::new(3.0, 1.0).unwrap()).unwrap();
    let (sol, _) = solve_are_spectral(&sys).unwrap();
    let law2 = regulator_gains(&sol, &sys).unwrap();
    let cl2 = close_loop(&sys, &law2).unwrap();
    let modes2 = poly_roots(&char_poly(&cl2), order.denominator() as u32).unwrap();
    let t0 = 0.1;
    let rep2 = ic_coefficients(&modes2, &InitialConditions::displacement(modes2.len(), t0, 1.0)).unwrap();
    let traj2 = respond(&cl2, &rep2, &law2, &Grid::new(t0, t0 + 10.0, 201).unwrap()).unwrap();
    let m2 = decay_metric(&traj2).unwrap();
    let slope = tail_log_slope(&traj2, t0 + 5.0).unwrap_or(f64::NAN);
    let slope_ok = (slope - (-4.0)).abs() <= 0.3 * 4.0;
    let second_ok = m2.monotone_envelope && slope_ok;
    r.line(
        "8 closed-loop decay",
        first_ok && second_ok,
        format!(
            "oscillator: monotone={}, sup[15,20]/peak = {ratio:.3} (need < 1e-2); scalar 3/7: monotone={}, tail log-slope {slope:.3} vs reference -4 (±30%)",
            m.monotone_envelope, m2.monotone_envelope
        ),
    );
    let y20 = eval_solution(&rep, 20.0).unwrap();
    println!("       oscillator y(20) = {y20:.4e}, peak {:.4e}", m.peak);
}

fn property_suites(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let mut results = Vec::new();

    // companion characteristic polynomial vs closed-loop eigenvalues
    let t = Instant::now();
    let mut ok = true;
    for _ in 0..40 {
        let q = [3u64, 5][rng.gen_range(0..2)];
        let p = if q == 3 { [1u64, 5][rng.gen_range(0..2)] } else { [1u64, 3, 7, 9][rng.gen_range(0..4)] };
        let sys = build_lifted(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0), odd(p, q), CostWeights::new(1.0, 1.0).unwrap())
            .unwrap();
        let Ok((sol, _)) = solve_are_spectral(&sys) else { continue };
        let law = regulator_gains(&sol, &sys).unwrap();
        let cl = close_loop(&sys, &law).unwrap();
        let poly = char_poly(&cl);
        let scale = poly.iter().map(|c| c.abs()).fold(1.0, f64::max);
        for z in eigenvalues(&cl.f_cl).unwrap() {
            ok &= horner(&poly, z).norm() <= 1e-7 * scale * (1.0 + z.norm()).powi(poly.len() as i32 - 1);
        }
    }
    results.push(("companion charpoly", ok, t.elapsed().as_secs_f64()));

    // Hamiltonian mirror spectrum
    let t = Instant::now();
    let mut ok = true;
    for _ in 0..40 {
        let q = [1u64, 3, 5, 7][rng.gen_range(0..4)];
        let p = if q == 1 { 1 } else { q - 2 };
        let w = CostWeights::new(rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0)).unwrap();
        let sys = build_lifted(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0), odd(p, q), w).unwrap();
        let eig = eigenvalues(&build_hamiltonian(&sys)).unwrap();
        for mu in &eig {
            let partner = eig.iter().map(|nu| (nu + mu).norm()).fold(f64::INFINITY, f64::min);
            ok &= partner <= 1e-8 * (1.0 + mu.norm()).powi(2);
        }
    }
    results.push(("Hamiltonian mirror", ok, t.elapsed().as_secs_f64()));

    // Cramer's rule vs linear solve
    let t = Instant::now();
    let mut ok = true;
    for _ in 0..30 {
        let q = [1u32, 3][rng.gen_range(0..2)];
        let n = if q == 1 { 2 } else { rng.gen_range(2..=6) };
        let roots: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.gen_range(-2.0..-0.2), rng.gen_range(-1.5..1.5))).collect();
        let modes = ModeSet::from_roots(roots, q);
        if modes.min_gap() < 0.05 {
            continue;
        }
        let x0 = rng.gen_range(0.2..1.5);
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ics = InitialConditions { x0, values: values.clone() };
        let rep = ic_coefficients(&modes, &ics).unwrap();
        let ys: Vec<Complex64> = modes.modes.iter().map(|m| frac_exp_closed(m.lambda, x0, q).unwrap()).collect();
        let m = DMatrix::from_fn(n, n, |i, l| modes.modes[l].lambda.powu(i as u32) * ys[l]);
        let delta = m.determinant();
        let v = DVector::from_iterator(n, values.iter().map(|&v| Complex64::new(v, 0.0)));
        for s in 0..n {
            let mut ms = m.clone();
            ms.set_column(s, &v);
            let c = ms.determinant() / delta;
            ok &= (c - rep.c[s]).norm() <= 1e-8 * (1.0 + c.norm());
        }
    }
    results.push(("Cramer equivalence", ok, t.elapsed().as_secs_f64()));

    // gains invariant under (Q, R) scaling
    let t = Instant::now();
    let mut ok = true;
    for _ in 0..40 {
        let (a, b, c) = (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0), rng.gen_range(0.1..10.0));
        let base = build_lifted(a, b, odd(1, 3), CostWeights::new(1.0, 2.0).unwrap()).unwrap();
        let scaled = build_lifted(a, b, odd(1, 3), CostWeights::new(c, 2.0 * c).unwrap()).unwrap();
        let (s1, _) = solve_are_spectral(&base).unwrap();
        let (s2, _) = solve_are_spectral(&scaled).unwrap();
        let k1 = regulator_gains(&s1, &base).unwrap().gains;
        let k2 = regulator_gains(&s2, &scaled).unwrap().gains;
        ok &= (k1 - k2).norm() <= 1e-8 * s1.s.norm().max(1.0);
    }
    results.push(("gain scaling invariance", ok, t.elapsed().as_secs_f64()));

    let all = results.iter().all(|&(_, ok, secs)| ok && secs < 5.0);
    let detail = results
        .iter()
        .map(|(name, ok, secs)| format!("{name}: {} {secs:.2} s", if *ok { "ok" } else { "failed" }))
        .collect::<Vec<_>>()
        .join("; ");
    r.line("9 property suites", all, detail);
}

fn main() {
    let mut r = Report { failed: 0 };
    gains(&mut r);
    closed_loop_poly(&mut r);
    stability(&mut r);
    scalar_example(&mut r);
    solver_cross_validation(&mut r);
    dual_evaluation(&mut r);
    weak_singular_identity(&mut r);
    decay(&mut r);
    property_suites(&mut r);
    println!("{} criteria failed", r.failed);
    if r.failed > 0 {
        std::process::exit(1);
    }
}
