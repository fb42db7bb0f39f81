//! Reading a qubit's spectral density off a cavity it never touches.
//!
//! A waveguide-coupled cavity hybridized with a dissipative qubit responds
//! exactly like an emitter dressed by a Lorentzian reservoir centered on
//! the qubit line. Probing the cavity and inverting the spectrum therefore
//! measures the qubit's density without any direct qubit drive. The
//! recovered curve is checked against the Lorentzian the circuit implies,
//! and the memory ratio 4g²/Γ₁² says whether a flat-reservoir description
//! could ever have fit.
//!
//! Run with `cargo run --example cavity_reconstruction`.

use specden::{
    cavity_qubit_spectrum, nonmarkovianity_ratio, reconstruct_sd, CavityQubitParams,
    FrequencyGrid, MeasuredSpectrum, DEFAULT_R_FLOOR,
};

fn main() {
    let p = CavityQubitParams {
        cavity_frequency: 5.0,
        qubit_frequency: 5.3,
        qubit_linewidth: 0.4,
        coupling: 1.1,
        probe_coupling: 0.9,
        velocity: 1.2,
    };

    let ratio = nonmarkovianity_ratio(&p).expect("valid parameters");
    println!("memory ratio 4g²/Γ₁² = {ratio:.1} (structured reservoir for > 1)");

    let grid = FrequencyGrid::linspace(
        p.qubit_frequency - 4.0 * p.qubit_linewidth,
        p.qubit_frequency + 4.0 * p.qubit_linewidth,
        161,
    )
    .expect("valid grid");
    let spectrum = cavity_qubit_spectrum(&p, &grid).expect("valid parameters");
    let measured = MeasuredSpectrum::from_scattering(&spectrum);
    let rec = reconstruct_sd(&measured, p.probe_coupling, p.velocity, DEFAULT_R_FLOOR)
        .expect("well-formed input");

    let truth = p.equivalent_density().expect("valid parameters");
    let mut worst = 0.0f64;
    let mut kept = 0usize;
    for i in rec.unflagged_indices() {
        let omega = rec.grid().values()[i];
        let expect = truth.evaluate(omega);
        worst = worst.max((rec.j_values()[i] - expect).abs() / expect);
        kept += 1;
    }
    println!("unflagged points:    {kept} of {}", rec.len());
    println!("worst rel deviation: {worst:.3e}");

    println!();
    println!("{:>8} {:>12} {:>12}", "ω", "J recovered", "J Lorentzian");
    for i in (0..rec.len()).step_by(16) {
        let omega = rec.grid().values()[i];
        println!(
            "{:8.3} {:12.6} {:12.6}",
            omega,
            rec.j_values()[i],
            truth.evaluate(omega)
        );
    }
}
