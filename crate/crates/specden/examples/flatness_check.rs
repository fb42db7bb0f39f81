//! Flatness test on a driven transmon: is the environment memoryless?
//!
//! The profile f(ω) = (1 − R − T)/R of a weakly probed two-level system is
//! frequency-independent exactly when its environment has no structure on
//! the probed window. An undriven transmon with flat intrinsic loss passes;
//! switching on a pump tone adds a Lorentzian bump that the test flags.
//! The profile is computed twice, from a closed form and from the simulated
//! spectrum, and the two must agree.
//!
//! Run with `cargo run --example flatness_check [out_dir]`.

use std::path::PathBuf;

use specden::io::write_flatness_csv;
use specden::{
    flatness_function, markovianity_verdict, transmon_flatness, transmon_spectrum,
    FrequencyGrid, MeasuredSpectrum, TransmonParams, DEFAULT_R_FLOOR, DEFAULT_VERDICT_REL_TOL,
};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/example-out"));
    std::fs::create_dir_all(&dir).expect("create output directory");

    let base = TransmonParams {
        frequency: 5.0,
        waveguide_rate: 1.0,
        loss_rate: 0.12,
        dephasing_rate: 0.05,
        drive: 0.0,
    };
    let gamma = base.total_linewidth();
    let grid = FrequencyGrid::linspace(5.0 - 3.0 * gamma, 5.0 + 3.0 * gamma, 101)
        .expect("valid grid");

    for (label, drive) in [("undriven", 0.0), ("driven", 0.35)] {
        let p = TransmonParams { drive, ..base };

        // Route 1: closed-form profile.
        let f_closed = transmon_flatness(&p, &grid).expect("valid parameters");
        let v_closed =
            markovianity_verdict(&f_closed, DEFAULT_VERDICT_REL_TOL).expect("enough points");

        // Route 2: the generic profile computed from the spectrum itself.
        let spectrum = transmon_spectrum(&p, &grid).expect("valid parameters");
        let measured = MeasuredSpectrum::from_scattering(&spectrum);
        let f_spec = flatness_function(&measured, DEFAULT_R_FLOOR).expect("well-formed input");
        let v_spec = markovianity_verdict(&f_spec, DEFAULT_VERDICT_REL_TOL).expect("enough points");

        let agree = f_closed
            .iter()
            .zip(&f_spec)
            .filter(|(_, s)| s.is_finite())
            .map(|(c, s)| (c - s).abs() / c.abs().max(1e-30))
            .fold(0.0f64, f64::max);

        println!("{label} (drive = {drive}):");
        println!("  closed-form verdict: {v_closed}");
        println!("  spectrum verdict:    {v_spec}");
        println!("  route disagreement:  {agree:.3e}");

        let path = dir.join(format!("flatness_{label}.csv"));
        write_flatness_csv(&path, &grid, &f_spec).expect("write CSV");
        println!("  profile written to {}", path.display());
        println!();
    }
}
