//! Three independent solvers for the same emission problem.
//!
//! Vacuum Rabi oscillations of an emitter strongly coupled to a Lorentzian
//! reservoir, computed three ways that share no code: spectral inversion of
//! the frequency-domain amplitude, the equivalent damped pseudomode (exact
//! for the untruncated line shape), and brute-force integration of a
//! discretized bath. The first and third work on the truncated support and
//! agree tightly; the pseudomode differs by the weight the truncation
//! removes, which bounds the systematic error of truncating at all.
//!
//! Run with `cargo run --example bath_oracle [out_dir]`.

use std::path::PathBuf;

use specden::io::write_oracle_csv;
use specden::{
    discrete_bath_oracle, emission_dynamics, pseudomode_emission, LorentzianParams,
    SpectralDensity,
};

fn main() {
    let params = LorentzianParams::new(1.0, 0.25, 5.0).expect("valid parameters");
    let support = (0.0, 10.0);
    let sd = SpectralDensity::lorentzian_with_support(
        params.coupling,
        params.half_width,
        params.center,
        support,
    )
    .expect("valid density");

    let omega0 = 5.0;
    let (t_max, n_t) = (6.0, 301);

    println!("coupling / half-width = {:.1} (deep strong coupling)", params.coupling / params.half_width);

    let inversion = emission_dynamics(&sd, omega0, t_max, n_t).expect("solver converges");
    let pseudomode = pseudomode_emission(&params, omega0, t_max, n_t).expect("valid parameters");
    let discrete = discrete_bath_oracle(&sd, omega0, 1200, t_max, n_t).expect("stepper converges");

    println!(
        "max |Δ|ε|| inversion vs discrete bath: {:.3e}",
        inversion.max_modulus_deviation(&discrete)
    );
    println!(
        "max |Δ|ε|| inversion vs pseudomode:    {:.3e}  (support truncation)",
        inversion.max_modulus_deviation(&pseudomode)
    );

    println!();
    println!("{:>6} {:>12} {:>12} {:>12}", "t", "inversion", "pseudomode", "discrete");
    for i in (0..inversion.len()).step_by(25) {
        println!(
            "{:6.2} {:12.6} {:12.6} {:12.6}",
            inversion.times()[i],
            inversion.modulus(i),
            pseudomode.modulus(i),
            discrete.modulus(i)
        );
    }

    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/example-out"));
    std::fs::create_dir_all(&dir).expect("create output directory");
    let path = dir.join("bath_oracle.csv");
    write_oracle_csv(&path, &inversion, &pseudomode, &discrete).expect("write CSV");
    println!("\nside-by-side moduli written to {}", path.display());
}
