//! Scattering spectrum of an emitter dressed by a Lorentzian reservoir.
//!
//! The emitter hybridizes with the reservoir mode into two polaritons; each
//! shows up as a reflection peak of the single-photon probe. Writes the
//! complex amplitudes and the derived R, T, A columns to CSV.
//!
//! Run with `cargo run --example forward_spectrum [out_dir]`.

use std::path::PathBuf;

use specden::io::write_spectrum_csv;
use specden::{forward_spectrum, FrequencyGrid, ProbeConfig, SpectralDensity};

fn main() {
    // Reservoir mode at ω₁ = 5.3, half-width Γ₁ = 0.4, coupled at g = 1.1.
    let sd = SpectralDensity::lorentzian(1.1, 0.4, 5.3).expect("valid density");

    // Emitter at ω₀ = 5.0 probed through a line with V = 0.9, υ = 1.2.
    let grid = FrequencyGrid::linspace(3.0, 7.5, 181).expect("valid grid");
    let cfg = ProbeConfig::new(5.0, 0.9, 1.2, grid).expect("valid probe");
    println!("waveguide rate V²/υ = {:.4}", cfg.waveguide_rate());

    let spectrum = forward_spectrum(&sd, &cfg).expect("quadrature converges");

    // The reflectance maxima locate the dressed lines.
    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for i in 1..spectrum.len() - 1 {
        let r = spectrum.reflectance(i);
        if r > spectrum.reflectance(i - 1) && r > spectrum.reflectance(i + 1) {
            peaks.push((cfg.grid.values()[i], r));
        }
    }
    println!("reflection peaks (dressed resonances):");
    for (omega, r) in &peaks {
        println!("  ω = {omega:7.4}   R = {r:.4}");
    }

    println!();
    println!("{:>8} {:>9} {:>9} {:>9}", "ω", "R", "T", "A");
    for i in (0..spectrum.len()).step_by(20) {
        println!(
            "{:8.3} {:9.5} {:9.5} {:9.5}",
            cfg.grid.values()[i],
            spectrum.reflectance(i),
            spectrum.transmittance(i),
            spectrum.absorbance(i)
        );
    }

    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/example-out"));
    std::fs::create_dir_all(&dir).expect("create output directory");
    let path = dir.join("forward_spectrum.csv");
    write_spectrum_csv(&path, &spectrum).expect("write CSV");
    println!("\nfull spectrum written to {}", path.display());
}
