//! Acceptance suite: the checks this library is signed off against, one test
//! per criterion, each printing a PASS/FAIL line with the measured figure.
//! Run `cargo test --test acceptance -- --nocapture` to see every line.
//!
//! Tolerances are pinned next to the checks they guard; loosening one is an
//! interface change, not a test tweak.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specden::scattering::{
    absorbance_from_potential, effective_potential, fgr_rate, forward_from_self_energy,
};
use specden::selfenergy::emission_amplitude;
use specden::{
    cavity_qubit_spectrum, discrete_bath_oracle, emission_dynamics, fitted_decay_rate,
    flatness_function, forward_spectrum, markovianity_verdict, nonmarkovianity_ratio,
    propagate_noise, pseudomode_emission, reconstruct_sd, self_energy, transmon_flatness,
    transmon_spectrum, CavityQubitParams, FrequencyGrid, LorentzianParams, MeasuredSpectrum,
    ProbeConfig, SpectralDensity, TransmonParams, DEFAULT_R_FLOOR, DEFAULT_VERDICT_REL_TOL,
};
use std::time::Instant;

const PI: f64 = std::f64::consts::PI;

fn report(number: u32, name: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("acceptance {number} ({name}): PASS ({detail})"),
        Err(detail) => {
            println!("acceptance {number} ({name}): FAIL ({detail})");
            panic!("acceptance {number} ({name}): {detail}");
        }
    }
}

fn err<T: std::fmt::Display>(e: T) -> String {
    e.to_string()
}

#[test]
fn acceptance_01_lorentzian_self_energy_matches_closed_form() {
    report(1, "lorentzian self-energy vs closed form", run_01());
}

fn run_01() -> Result<String, String> {
    const REL_TOL: f64 = 1e-8;
    const TIME_BUDGET: f64 = 5.0;
    let (g, half_width, center) = (0.8, 0.35, 4.0);
    let params = LorentzianParams::new(g, half_width, center).map_err(err)?;
    let sd = SpectralDensity::lorentzian(g, half_width, center).map_err(err)?;
    let grid = FrequencyGrid::linspace(
        center - 20.0 * half_width,
        center + 20.0 * half_width,
        512,
    )
    .map_err(err)?;
    let start = Instant::now();
    let se = self_energy(&sd, &grid).map_err(err)?;
    let mut worst = 0.0f64;
    for (i, &w) in grid.iter().enumerate() {
        let exact = params.closed_form_self_energy(w);
        worst = worst.max((se.sigma(i) - exact).norm() / exact.norm());
    }
    let elapsed = start.elapsed().as_secs_f64();
    if worst > REL_TOL {
        return Err(format!(
            "max relative deviation {worst:.3e} exceeds {REL_TOL:.0e}"
        ));
    }
    if elapsed > TIME_BUDGET {
        return Err(format!("runtime {elapsed:.2} s exceeds {TIME_BUDGET} s"));
    }
    Ok(format!(
        "512 points, max relative deviation {worst:.3e}, {elapsed:.2} s"
    ))
}

#[test]
fn acceptance_02_forward_pipeline_matches_dressed_cavity_model() {
    report(2, "forward pipeline vs dressed-cavity closed form", run_02());
}

fn run_02() -> Result<String, String> {
    const TOL: f64 = 1e-8;
    const SETS: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut worst = 0.0f64;
    for _ in 0..SETS {
        let half_width = rng.gen_range(0.5..2.0);
        let g = rng.gen_range(0.1..20.0) * half_width;
        let center = rng.gen_range(-2.0..8.0);
        let omega0: f64 = center + rng.gen_range(-5.0..5.0);
        let coupling = rng.gen_range(0.6..1.5);
        let velocity = rng.gen_range(0.7..1.4);
        let lo = omega0.min(center) - 3.0 * half_width;
        let hi = omega0.max(center) + 3.0 * half_width;
        let grid = FrequencyGrid::linspace(lo, hi, 7).map_err(err)?;
        let sd = SpectralDensity::lorentzian(g, half_width, center).map_err(err)?;
        let cfg = ProbeConfig::new(omega0, coupling, velocity, grid.clone()).map_err(err)?;
        let numeric = forward_spectrum(&sd, &cfg).map_err(err)?;
        let p = CavityQubitParams {
            cavity_frequency: omega0,
            qubit_frequency: center,
            qubit_linewidth: half_width,
            coupling: g,
            probe_coupling: coupling,
            velocity,
        };
        let closed = cavity_qubit_spectrum(&p, &grid).map_err(err)?;
        for i in 0..grid.len() {
            worst = worst.max((numeric.reflection()[i] - closed.reflection()[i]).norm());
        }
    }
    if worst > TOL {
        return Err(format!(
            "max |Δr| {worst:.3e} over {SETS} parameter sets exceeds {TOL:.0e}"
        ));
    }
    Ok(format!("{SETS} random parameter sets, max |Δr| = {worst:.3e}"))
}

#[test]
fn acceptance_03_dressed_cavity_spectra_invert_to_lorentzian() {
    report(3, "dressed-cavity spectra invert to a lorentzian", run_03());
}

fn run_03() -> Result<String, String> {
    const REL_TOL: f64 = 1e-8;
    let p = CavityQubitParams {
        cavity_frequency: 5.0,
        qubit_frequency: 5.3,
        qubit_linewidth: 0.4,
        coupling: 1.1,
        probe_coupling: 0.9,
        velocity: 1.2,
    };
    let grid = FrequencyGrid::linspace(
        p.qubit_frequency - 4.0 * p.qubit_linewidth,
        p.qubit_frequency + 4.0 * p.qubit_linewidth,
        161,
    )
    .map_err(err)?;
    let spec = cavity_qubit_spectrum(&p, &grid).map_err(err)?;
    let ms = MeasuredSpectrum::from_scattering(&spec);
    let rec = reconstruct_sd(&ms, p.probe_coupling, p.velocity, DEFAULT_R_FLOOR).map_err(err)?;
    let mut worst = 0.0f64;
    let mut kept = 0usize;
    for i in rec.unflagged_indices() {
        let d = grid.values()[i] - p.qubit_frequency;
        let truth = (p.coupling * p.coupling / PI) * p.qubit_linewidth
            / (p.qubit_linewidth * p.qubit_linewidth + d * d);
        worst = worst.max(((rec.j_values()[i] - truth) / truth).abs());
        kept += 1;
    }
    if kept < 120 {
        return Err(format!("only {kept} of {} points unflagged", grid.len()));
    }
    if worst > REL_TOL {
        return Err(format!(
            "max relative deviation {worst:.3e} exceeds {REL_TOL:.0e}"
        ));
    }
    Ok(format!(
        "{kept}/{} unflagged points, max relative deviation {worst:.3e}",
        grid.len()
    ))
}

#[test]
fn acceptance_04_round_trip_recovers_all_four_families() {
    report(4, "round trip over the four density families", run_04());
}

fn run_04() -> Result<String, String> {
    const REL_TOL: f64 = 1e-6;
    const GAP_ABS_TOL: f64 = 1e-9;
    let coupling = 1.1;
    let velocity = 0.9;
    let flat = SpectralDensity::flat(0.1, (0.0, 10.0)).map_err(err)?;
    let lorentzian = SpectralDensity::lorentzian(0.8, 0.5, 5.0).map_err(err)?;
    let ohmic = SpectralDensity::ohmic(0.3, 2.0).map_err(err)?;
    let band_gap = SpectralDensity::band_gap(0.5, 1.0, 9.0).map_err(err)?;
    let cases = [
        ("flat", &flat, 5.0, (0.5, 9.5)),
        ("lorentzian", &lorentzian, 5.6, (3.0, 7.0)),
        ("ohmic", &ohmic, 2.5, (0.25, 8.0)),
        ("band-gap", &band_gap, 5.0, (1.5, 8.5)),
    ];
    let mut details = Vec::new();
    for (label, sd, omega0, window) in cases {
        let grid = FrequencyGrid::linspace(window.0, window.1, 81).map_err(err)?;
        let cfg = ProbeConfig::new(omega0, coupling, velocity, grid.clone()).map_err(err)?;
        let spec = forward_spectrum(sd, &cfg).map_err(err)?;
        let ms = MeasuredSpectrum::from_scattering(&spec);
        let rec = reconstruct_sd(&ms, coupling, velocity, DEFAULT_R_FLOOR).map_err(err)?;
        let mut worst = 0.0f64;
        let mut kept = 0usize;
        for i in rec.unflagged_indices() {
            let truth = sd.evaluate(grid.values()[i]);
            worst = worst.max(((rec.j_values()[i] - truth) / truth).abs());
            kept += 1;
        }
        if kept * 4 < grid.len() * 3 {
            return Err(format!(
                "{label}: only {kept} of {} points unflagged",
                grid.len()
            ));
        }
        if worst > REL_TOL {
            return Err(format!(
                "{label}: max relative deviation {worst:.3e} exceeds {REL_TOL:.0e}"
            ));
        }
        details.push(format!("{label} {worst:.1e}"));
    }

    // Inside the gap the true density vanishes; the inversion must return
    // zero, not a residue of the elastic scattering there.
    let gap_grid = FrequencyGrid::linspace(0.05, 0.95, 19).map_err(err)?;
    let cfg = ProbeConfig::new(5.0, coupling, velocity, gap_grid.clone()).map_err(err)?;
    let spec = forward_spectrum(&band_gap, &cfg).map_err(err)?;
    let ms = MeasuredSpectrum::from_scattering(&spec);
    let rec = reconstruct_sd(&ms, coupling, velocity, DEFAULT_R_FLOOR).map_err(err)?;
    let mut worst_gap = 0.0f64;
    for (i, &j) in rec.j_values().iter().enumerate() {
        if j.is_nan() {
            return Err(format!("gap point {i} fell below the reflectance floor"));
        }
        worst_gap = worst_gap.max(j.abs());
    }
    if worst_gap > GAP_ABS_TOL {
        return Err(format!(
            "gap interior |J| {worst_gap:.3e} exceeds {GAP_ABS_TOL:.0e}"
        ));
    }
    Ok(format!(
        "max relative deviations {}; gap interior |J| ≤ {worst_gap:.1e}",
        details.join(", ")
    ))
}

#[test]
fn acceptance_05_flatness_separates_driven_from_undriven_transmon() {
    report(5, "flatness verdicts for the transmon", run_05());
}

fn run_05() -> Result<String, String> {
    const CONSTANCY_TOL: f64 = 1e-8;
    let undriven = TransmonParams {
        frequency: 5.0,
        waveguide_rate: 1.0,
        loss_rate: 0.12,
        dephasing_rate: 0.05,
        drive: 0.0,
    };
    let gamma = undriven.total_linewidth();
    let grid = FrequencyGrid::linspace(5.0 - 3.0 * gamma, 5.0 + 3.0 * gamma, 64).map_err(err)?;

    let f0 = transmon_flatness(&undriven, &grid).map_err(err)?;
    let lo = f0.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = f0.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    if spread > CONSTANCY_TOL * 0.5 * (lo + hi).abs() {
        return Err(format!(
            "undriven flatness varies by {spread:.3e} across the band"
        ));
    }
    let spec = transmon_spectrum(&undriven, &grid).map_err(err)?;
    let f_meas =
        flatness_function(&MeasuredSpectrum::from_scattering(&spec), DEFAULT_R_FLOOR).map_err(err)?;
    let v0 = markovianity_verdict(&f_meas, DEFAULT_VERDICT_REL_TOL).map_err(err)?;
    if !v0.is_flat() {
        return Err("undriven spectrum judged structured".into());
    }

    let driven = TransmonParams {
        drive: 0.4,
        ..undriven
    };
    let f1 = transmon_flatness(&driven, &grid).map_err(err)?;
    let v1 = markovianity_verdict(&f1, DEFAULT_VERDICT_REL_TOL).map_err(err)?;
    let spec = transmon_spectrum(&driven, &grid).map_err(err)?;
    let f1_meas =
        flatness_function(&MeasuredSpectrum::from_scattering(&spec), DEFAULT_R_FLOOR).map_err(err)?;
    let v1_meas = markovianity_verdict(&f1_meas, DEFAULT_VERDICT_REL_TOL).map_err(err)?;
    if v1.is_flat() || v1_meas.is_flat() {
        return Err("driven spectrum judged flat".into());
    }
    Ok(format!(
        "undriven spread {spread:.1e} and verdict flat; driven verdict structured on both routes"
    ))
}

#[test]
fn acceptance_06_nonmarkovianity_ratio_of_reference_device() {
    report(6, "nonmarkovianity ratio of the reference device", run_06());
}

fn run_06() -> Result<String, String> {
    const EXPECTED: f64 = 274.6;
    const ABS_TOL: f64 = 0.5;
    let p = CavityQubitParams {
        cavity_frequency: 2.0 * PI * 4.8,
        qubit_frequency: 2.0 * PI * 4.4,
        qubit_linewidth: 2.0 * PI * 0.7,
        coupling: 2.0 * PI * 5.8,
        probe_coupling: 1.0,
        velocity: 1.0,
    };
    let ratio = nonmarkovianity_ratio(&p).map_err(err)?;
    if (ratio - EXPECTED).abs() > ABS_TOL {
        return Err(format!("ratio {ratio:.4} outside {EXPECTED} ± {ABS_TOL}"));
    }
    Ok(format!("ratio = {ratio:.4}"))
}

#[test]
fn acceptance_07_decay_dynamics_agree_across_methods() {
    report(7, "decay dynamics across independent methods", run_07());
}

fn run_07() -> Result<String, String> {
    const RATE_REL_TOL: f64 = 0.05;
    const THREE_WAY_TOL: f64 = 1e-3;
    const TIME_BUDGET: f64 = 60.0;
    let start = Instant::now();

    // Weak flat band: the fitted decay must sit on the golden-rule rate.
    // The height makes the rate a tenth of the band half-width; the true
    // resonance rate then exceeds the golden-rule value by the dispersive
    // correction 2J₀/Δ ≈ 3.2%, which the tolerance must absorb.
    let half_span = 5.0;
    let height = 0.1 * half_span / (2.0 * PI);
    let sd = SpectralDensity::flat(height, (-half_span, half_span)).map_err(err)?;
    let fgr = fgr_rate(&sd, 0.0);
    let hist = emission_dynamics(&sd, 0.0, 12.0, 241).map_err(err)?;
    let fitted = fitted_decay_rate(&hist);
    let rate_dev = ((fitted - fgr) / fgr).abs();
    if !(rate_dev <= RATE_REL_TOL) {
        return Err(format!(
            "fitted rate {fitted:.4} vs golden rule {fgr:.4} ({:.1}% off)",
            rate_dev * 100.0
        ));
    }

    // Strongly coupled lorentzian: spectral inversion, the equivalent damped
    // mode, and a brute-force discretized reservoir must tell one story.
    let g = 2.0 * PI * 5.8;
    let half_width = 2.0 * PI * 0.7;
    let reach = 100.0 * half_width;
    let sd = SpectralDensity::lorentzian_with_support(g, half_width, 0.0, (-reach, reach))
        .map_err(err)?;
    let inversion = emission_dynamics(&sd, 0.0, 0.5, 401).map_err(err)?;
    let params = LorentzianParams::new(g, half_width, 0.0).map_err(err)?;
    let pseudo = pseudomode_emission(&params, 0.0, 0.5, 401).map_err(err)?;
    let discrete = discrete_bath_oracle(&sd, 0.0, 4000, 0.5, 401).map_err(err)?;
    let worst = inversion
        .max_modulus_deviation(&pseudo)
        .max(inversion.max_modulus_deviation(&discrete))
        .max(pseudo.max_modulus_deviation(&discrete));
    if worst > THREE_WAY_TOL {
        return Err(format!(
            "three-way |ε| deviation {worst:.3e} exceeds {THREE_WAY_TOL:.0e}"
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed > TIME_BUDGET {
        return Err(format!("runtime {elapsed:.1} s exceeds {TIME_BUDGET} s"));
    }
    Ok(format!(
        "fitted rate within {:.2}% of golden rule; three-way |ε| deviation ≤ {worst:.2e}; {elapsed:.1} s",
        rate_dev * 100.0
    ))
}

#[test]
fn acceptance_08_scattering_invariants_over_randomized_cases() {
    report(8, "scattering invariants over randomized cases", run_08());
}

fn run_08() -> Result<String, String> {
    const CASES: usize = 10_000;
    const FLUX_TOL: f64 = 1e-12;
    const CLOSURE_TOL: f64 = 1e-9;
    const INVARIANCE_TOL: f64 = 1e-6;
    // Reconstructed magnitudes below this are roundoff residue of exact
    // zeros (gap interiors, vanishing densities); a relative comparison
    // between two such residues would measure nothing but noise.
    const ZERO_FLOOR: f64 = 1e-9;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut max_flux = f64::NEG_INFINITY;
    let mut min_wi = f64::INFINITY;
    let mut max_closure = 0.0f64;
    let mut max_invariance = 0.0f64;
    let mut points = 0usize;

    for case in 0..CASES {
        let (sd, window) = match case % 6 {
            0 => {
                let a = rng.gen_range(-4.0..4.0);
                let w = rng.gen_range(2.0..12.0);
                let sd = SpectralDensity::flat(rng.gen_range(0.01..0.5), (a, a + w));
                (sd.map_err(err)?, (a - 0.5, a + w + 0.5))
            }
            1 => {
                let hw = rng.gen_range(0.05..1.0);
                let c = rng.gen_range(-2.0..8.0);
                let sd = SpectralDensity::lorentzian(rng.gen_range(0.2..1.5), hw, c);
                (sd.map_err(err)?, (c - 5.0 * hw, c + 5.0 * hw))
            }
            2 => {
                let cut = rng.gen_range(0.5..3.0);
                let sd = SpectralDensity::ohmic(rng.gen_range(0.05..0.5), cut);
                (sd.map_err(err)?, (0.0, 6.0 * cut))
            }
            3 => {
                let edge = rng.gen_range(-1.0..3.0);
                let w = rng.gen_range(1.0..8.0);
                let sd = SpectralDensity::band_gap(rng.gen_range(0.05..0.8), edge, edge + w);
                (sd.map_err(err)?, (edge - 1.0, edge + w + 0.5))
            }
            4 => {
                let mut w = rng.gen_range(-3.0..3.0);
                let omegas: Vec<f64> = (0..5)
                    .map(|_| {
                        w += rng.gen_range(0.2..1.5);
                        w
                    })
                    .collect();
                let values: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..0.6)).collect();
                let span = (omegas[0] - 0.5, omegas[4] + 0.5);
                (SpectralDensity::tabulated(omegas, values).map_err(err)?, span)
            }
            _ => {
                let c = rng.gen_range(-3.0..3.0);
                (SpectralDensity::zero(), (c - 2.0, c + 2.0))
            }
        };
        let grid = FrequencyGrid::linspace(window.0, window.1, 8).map_err(err)?;
        // For a vanishing density, park the emitter exactly on a grid point
        // so the perfect-mirror pole is exercised, not dodged.
        let omega0 = if case % 6 == 5 {
            grid.values()[rng.gen_range(0..grid.len())]
        } else {
            rng.gen_range(window.0..window.1)
        };
        let v1 = rng.gen_range(0.5..1.5);
        let u1 = rng.gen_range(0.7..1.4);
        let v2 = v1 * rng.gen_range(1.3..2.0);
        let u2 = u1 * rng.gen_range(0.8..1.25);

        let se = self_energy(&sd, &grid).map_err(err)?;
        let cfg1 = ProbeConfig::new(omega0, v1, u1, grid.clone()).map_err(err)?;
        let cfg2 = ProbeConfig::new(omega0, v2, u2, grid.clone()).map_err(err)?;
        let s1 = forward_from_self_energy(&se, &cfg1);
        let s2 = forward_from_self_energy(&se, &cfg2);
        let wp = effective_potential(se.grid(), &emission_amplitude(&se, omega0), v1);
        let rec1 = reconstruct_sd(&MeasuredSpectrum::from_scattering(&s1), v1, u1, DEFAULT_R_FLOOR)
            .map_err(err)?;
        let rec2 = reconstruct_sd(&MeasuredSpectrum::from_scattering(&s2), v2, u2, DEFAULT_R_FLOOR)
            .map_err(err)?;

        for i in 0..grid.len() {
            points += 1;
            let r = s1.reflection()[i];
            let t = s1.transmission()[i];
            let sum = Complex64::new(1.0, 0.0) + r;
            if t.re.to_bits() != sum.re.to_bits() || t.im.to_bits() != sum.im.to_bits() {
                return Err(format!("case {case}, point {i}: t deviates from 1 + r"));
            }
            max_flux = max_flux.max(s1.reflectance(i) + s1.transmittance(i) - 1.0);
            min_wi = min_wi.min(wp.w_i(i));
            let closure =
                (s1.absorbance(i) - absorbance_from_potential(wp.values()[i], u1)).abs();
            max_closure = max_closure.max(closure);
            let (j1, j2) = (rec1.j_values()[i], rec2.j_values()[i]);
            if j1.is_nan() || j2.is_nan() {
                continue; // below the reflectance floor for one of the probes
            }
            let scale = j1.abs().max(j2.abs());
            if scale > ZERO_FLOOR {
                max_invariance = max_invariance.max((j1 - j2).abs() / scale);
            }
        }
    }
    if max_flux > FLUX_TOL {
        return Err(format!("max R+T−1 = {max_flux:.3e} exceeds {FLUX_TOL:.0e}"));
    }
    if min_wi < 0.0 {
        return Err(format!("negative dissipative part W_I = {min_wi:.3e}"));
    }
    if max_closure > CLOSURE_TOL {
        return Err(format!(
            "absorbance closure defect {max_closure:.3e} exceeds {CLOSURE_TOL:.0e}"
        ));
    }
    if max_invariance > INVARIANCE_TOL {
        return Err(format!(
            "probe-invariance defect {max_invariance:.3e} exceeds {INVARIANCE_TOL:.0e}"
        ));
    }
    Ok(format!(
        "{CASES} cases / {points} points: max R+T−1 = {max_flux:.1e}, min W_I = {min_wi:.1e}, \
         closure ≤ {max_closure:.1e}, probe invariance ≤ {max_invariance:.1e}"
    ))
}

#[test]
fn acceptance_09_monte_carlo_noise_matches_propagated_sigma() {
    report(9, "monte-carlo noise vs propagated sigma", run_09());
}

fn run_09() -> Result<String, String> {
    const SIGMA: f64 = 1e-2;
    const MATCH_TOL: f64 = 0.10;
    const REPLICAS: usize = 10_000;
    let p = CavityQubitParams {
        cavity_frequency: 5.0,
        qubit_frequency: 5.4,
        qubit_linewidth: 0.7,
        coupling: 0.8,
        probe_coupling: 0.8,
        velocity: 1.0,
    };
    let grid = FrequencyGrid::linspace(3.5, 7.0, 29).map_err(err)?;
    let spec = cavity_qubit_spectrum(&p, &grid).map_err(err)?;
    let base = MeasuredSpectrum::from_scattering(&spec);
    let n = grid.len();
    let with_sigma = MeasuredSpectrum::with_uncertainty(
        grid.clone(),
        base.reflectances().to_vec(),
        base.transmittances().to_vec(),
        vec![SIGMA; n],
        vec![SIGMA; n],
    )
    .map_err(err)?;
    let predicted = propagate_noise(&with_sigma, p.probe_coupling, p.velocity).map_err(err)?;
    let sigma_pred = predicted.sigma_j().ok_or("no propagated sigma")?;

    let checked: Vec<usize> = (0..n).filter(|&i| base.reflectances()[i] >= 0.1).collect();
    if checked.len() < 8 {
        return Err(format!("only {} points with R ≥ 0.1", checked.len()));
    }
    // The comparison is against the linear propagation law, so the setup must
    // keep every checked point far from the [0, 1] clamp; folding a Gaussian
    // at the boundary would shrink the empirical sigma for reasons that have
    // nothing to do with the law being tested.
    for &i in &checked {
        let (r, t) = (base.reflectances()[i], base.transmittances()[i]);
        if !(0.05..=0.95).contains(&r) || !(0.05..=0.95).contains(&t) {
            return Err(format!(
                "setup leaves point {i} too close to the clamp (R = {r:.3}, T = {t:.3})"
            ));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let normal = rand_distr::Normal::new(0.0, SIGMA).map_err(err)?;
    let mut count = vec![0u64; n];
    let mut mean = vec![0.0f64; n];
    let mut m2 = vec![0.0f64; n];
    for _ in 0..REPLICAS {
        let rs: Vec<f64> = base
            .reflectances()
            .iter()
            .map(|&r| (r + rng.sample(normal)).clamp(0.0, 1.0))
            .collect();
        let ts: Vec<f64> = base
            .transmittances()
            .iter()
            .map(|&t| (t + rng.sample(normal)).clamp(0.0, 1.0))
            .collect();
        let ms = MeasuredSpectrum::new(grid.clone(), rs, ts).map_err(err)?;
        let rec = reconstruct_sd(&ms, p.probe_coupling, p.velocity, DEFAULT_R_FLOOR).map_err(err)?;
        for i in 0..n {
            let x = rec.j_values()[i];
            if x.is_nan() {
                continue;
            }
            count[i] += 1;
            let delta = x - mean[i];
            mean[i] += delta / count[i] as f64;
            m2[i] += delta * (x - mean[i]);
        }
    }
    let mut worst = 0.0f64;
    for &i in &checked {
        if count[i] < REPLICAS as u64 {
            return Err(format!("point {i} lost {} replicas", REPLICAS as u64 - count[i]));
        }
        let sigma_emp = (m2[i] / (count[i] - 1) as f64).sqrt();
        worst = worst.max((sigma_emp / sigma_pred[i] - 1.0).abs());
    }
    if worst > MATCH_TOL {
        return Err(format!(
            "worst σ mismatch {:.1}% exceeds {:.0}%",
            worst * 100.0,
            MATCH_TOL * 100.0
        ));
    }
    Ok(format!(
        "{} points, {REPLICAS} replicas, worst σ mismatch {:.2}%",
        checked.len(),
        worst * 100.0
    ))
}
