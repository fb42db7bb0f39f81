//! Spontaneous emission into a flat band versus the golden rule.
//!
//! An emitter at the center of a flat band decays almost exponentially at
//! the golden-rule rate 2πJ(ω₀). Almost: the band edges repel the dressed
//! pole, which renormalizes the decay rate upward by roughly 2J₀/Δ for a
//! band of half-width Δ, and the sharp cutoffs add a weak non-exponential
//! tail. Both effects show up when the fitted rate is compared to 2πJ(ω₀).
//!
//! Run with `cargo run --example emission_decay [out_dir]`.

use std::path::PathBuf;

use specden::io::write_history_csv;
use specden::scattering::fgr_rate;
use specden::{emission_dynamics, fitted_decay_rate, SpectralDensity};

fn main() {
    // Band of half-width 5 centered on the emitter; J₀ chosen to put the
    // golden-rule rate at 0.1, small against the half-width so the
    // renormalization stays at the percent level.
    let half_span = 5.0;
    let height = 0.05 / std::f64::consts::PI;
    let sd = SpectralDensity::flat(height, (-half_span, half_span)).expect("valid density");
    let omega0 = 0.0;

    let golden = fgr_rate(&sd, omega0);
    println!("golden-rule rate 2πJ(ω₀) = {golden:.6}");

    let history = emission_dynamics(&sd, omega0, 12.0, 241).expect("solver converges");
    let fitted = fitted_decay_rate(&history);
    println!("fitted decay rate        = {fitted:.6}");
    println!(
        "relative deviation       = {:+.2}%  (level repulsion by the band edges)",
        100.0 * (fitted - golden) / golden
    );

    println!();
    println!("{:>6} {:>12}", "t", "|ε(t)|²");
    for i in (0..history.len()).step_by(30) {
        println!("{:6.2} {:12.3e}", history.times()[i], history.population(i));
    }

    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/example-out"));
    std::fs::create_dir_all(&dir).expect("create output directory");
    let path = dir.join("emission_decay.csv");
    write_history_csv(&path, &history).expect("write CSV");
    println!("\nfull history written to {}", path.display());
}
