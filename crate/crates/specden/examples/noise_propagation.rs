//! Does the linear error bar on J match a Monte Carlo experiment?
//!
//! The inversion propagates measurement noise to first order,
//! σ_J² = (∂J/∂R)²σ_R² + (∂J/∂T)²σ_T². This example draws thousands of
//! noisy copies of a cavity-qubit spectrum, reconstructs each one, and
//! compares the empirical scatter of J against that formula, point by
//! point. Agreement holds wherever the reflectance is not so small that
//! the inversion turns nonlinear over a few σ.
//!
//! Run with `cargo run --example noise_propagation`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use specden::{
    cavity_qubit_spectrum, propagate_noise, reconstruct_sd, CavityQubitParams, FrequencyGrid,
    MeasuredSpectrum, PointFlag, DEFAULT_R_FLOOR,
};

const SIGMA: f64 = 1e-2;
const REPLICAS: usize = 4000;

fn main() {
    let p = CavityQubitParams {
        cavity_frequency: 5.0,
        qubit_frequency: 5.4,
        qubit_linewidth: 0.7,
        coupling: 0.8,
        probe_coupling: 0.8,
        velocity: 1.0,
    };
    let grid = FrequencyGrid::linspace(3.5, 7.0, 29).expect("valid grid");
    let spectrum = cavity_qubit_spectrum(&p, &grid).expect("valid parameters");
    let r0 = spectrum.reflectances();
    let t0 = spectrum.transmittances();
    let n = grid.len();

    // Linear route.
    let stated = MeasuredSpectrum::with_uncertainty(
        grid.clone(),
        r0.clone(),
        t0.clone(),
        vec![SIGMA; n],
        vec![SIGMA; n],
    )
    .expect("well-formed input");
    let linear = propagate_noise(&stated, p.probe_coupling, p.velocity).expect("valid probe");
    let sigma_lin = linear.sigma_j().unwrap();

    // Monte Carlo route: reconstruct each noisy replica, track the scatter.
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let noise = Normal::new(0.0, SIGMA).unwrap();
    let mut mean = vec![0.0f64; n];
    let mut m2 = vec![0.0f64; n];
    let mut count = vec![0u64; n];
    for _ in 0..REPLICAS {
        let r: Vec<f64> = r0
            .iter()
            .map(|&v| (v + noise.sample(&mut rng)).clamp(0.0, 1.0))
            .collect();
        let t: Vec<f64> = t0
            .iter()
            .map(|&v| (v + noise.sample(&mut rng)).clamp(0.0, 1.0))
            .collect();
        let ms = MeasuredSpectrum::new(grid.clone(), r, t).expect("well-formed input");
        let rec = reconstruct_sd(&ms, p.probe_coupling, p.velocity, DEFAULT_R_FLOOR)
            .expect("well-formed input");
        for i in 0..n {
            if rec.flags()[i] == PointFlag::LowReflectance {
                continue;
            }
            let j = rec.j_values()[i];
            count[i] += 1;
            let delta = j - mean[i];
            mean[i] += delta / count[i] as f64;
            m2[i] += delta * (j - mean[i]);
        }
    }

    println!(
        "{REPLICAS} replicas at σ_R = σ_T = {SIGMA}; comparing where R ≥ 0.1"
    );
    println!();
    println!("{:>8} {:>8} {:>12} {:>12} {:>8}", "ω", "R", "σ_J linear", "σ_J MC", "ratio");
    let mut worst = 0.0f64;
    for i in 0..n {
        if r0[i] < 0.1 || count[i] < 2 {
            continue;
        }
        let emp = (m2[i] / (count[i] - 1) as f64).sqrt();
        let ratio = emp / sigma_lin[i];
        worst = worst.max((ratio - 1.0).abs());
        println!(
            "{:8.3} {:8.4} {:12.6} {:12.6} {:8.4}",
            grid.values()[i],
            r0[i],
            sigma_lin[i],
            emp,
            ratio
        );
    }
    println!();
    println!("worst |ratio − 1| = {:.3}%", 100.0 * worst);
}
