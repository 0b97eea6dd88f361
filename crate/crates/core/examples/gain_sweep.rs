//! Gains as the control weight grows, through the configuration layer.
//!
//! cargo run --example gain_sweep

use fracreg::cli::{run_sweep, JobConfig, SweepParam, SweepSpec};

fn main() -> fracreg::error::Result<()> {
    let cfg = JobConfig::from_json(
        r#"{
            "alpha": {"num": 1, "den": 3},
            "plant": {"a": 3.0, "b": 1.0},
            "weights": {"qw": 1.0, "rw": 1.0},
            "ics": {"x0": 0.1, "y1": 1.0}
        }"#,
    )?;
    let spec = SweepSpec { param: SweepParam::Rw, from: 0.25, to: 4.0, n: 6 };
    print!("{}", run_sweep(&cfg, &spec)?);
    Ok(())
}
