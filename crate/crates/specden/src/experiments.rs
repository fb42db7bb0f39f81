//! Closed-form scattering models for two waveguide platforms: a driven
//! transmon coupled directly to the line, and a cavity dressed by a lossy
//! qubit. They provide independent end-to-end checks of the forward and
//! inverse numerics, plus the threshold ratio that decides whether the
//! dressed system is beyond the Markovian regime.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::grid::FrequencyGrid;
use crate::scattering::ScatteringSpectrum;
use crate::sd::SpectralDensity;

fn positive(name: &'static str, value: f64) -> Result<(), ConfigError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(ConfigError::NonPositive { name, value });
    }
    Ok(())
}

fn non_negative(name: &'static str, value: f64) -> Result<(), ConfigError> {
    if !value.is_finite() || value < 0.0 {
        return Err(ConfigError::Negative { name, value });
    }
    Ok(())
}

fn finite(name: &'static str, value: f64) -> Result<(), ConfigError> {
    if !value.is_finite() {
        return Err(ConfigError::NonFinite { name, value });
    }
    Ok(())
}

/// Transmon coupled to an open line, optionally under a coherent drive.
///
/// Rates: `waveguide_rate` is relaxation into the line, `loss_rate` covers
/// every other decay channel, `dephasing_rate` is pure dephasing, and
/// `drive` is the Rabi frequency of the pump tone. Units are whatever the
/// frequency axis uses; angular-frequency inputs (2 pi times a value in Hz)
/// work unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    pub frequency: f64,
    pub waveguide_rate: f64,
    #[serde(default)]
    pub loss_rate: f64,
    #[serde(default)]
    pub dephasing_rate: f64,
    #[serde(default)]
    pub drive: f64,
}

impl TransmonParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        finite("frequency", self.frequency)?;
        positive("waveguide_rate", self.waveguide_rate)?;
        non_negative("loss_rate", self.loss_rate)?;
        non_negative("dephasing_rate", self.dephasing_rate)?;
        non_negative("drive", self.drive)
    }

    /// Half-width gamma of the response line: half the total relaxation
    /// plus the full dephasing rate.
    pub fn total_linewidth(&self) -> f64 {
        0.5 * self.waveguide_rate + self.dephasing_rate + 0.5 * self.loss_rate
    }
}

/// Reflection of a weak probe off the transmon,
///
///   r = -(G_eg / 2 gamma) (1 - i dw / gamma)
///       / (1 + (dw / gamma)^2 + W^2 / ((G_eg + G_l) gamma)),
///
/// with dw the detuning from the transmon line and t = 1 + r.
pub fn transmon_spectrum(
    p: &TransmonParams,
    grid: &FrequencyGrid,
) -> Result<ScatteringSpectrum, ConfigError> {
    p.validate()?;
    let gamma = p.total_linewidth();
    let amplitude = 0.5 * p.waveguide_rate / gamma;
    let saturation = p.drive * p.drive / ((p.waveguide_rate + p.loss_rate) * gamma);
    let reflection = grid
        .iter()
        .map(|&omega| {
            let x = (omega - p.frequency) / gamma;
            let denom = 1.0 + x * x + saturation;
            Complex64::new(-amplitude / denom, amplitude * x / denom)
        })
        .collect();
    Ok(ScatteringSpectrum::from_reflection(grid.clone(), reflection))
}

/// Flatness profile of the transmon response in closed form:
///
///   f(dw) = 2 (G_l + 2 G_phi) / G_eg
///         + 4 (2 gamma)^2 W^2 / (G_eg (G_eg + G_l) ((2 gamma)^2 + 4 dw^2)),
///
/// using 2 gamma = G_eg + G_l + 2 G_phi. Undriven, only the constant first
/// term survives, which is what makes the flatness test a drive-free
/// Markovianity check. Must agree with the generic profile computed from
/// the spectrum itself; the two routes share no code.
pub fn transmon_flatness(
    p: &TransmonParams,
    grid: &FrequencyGrid,
) -> Result<Vec<f64>, ConfigError> {
    p.validate()?;
    let two_gamma = p.waveguide_rate + p.loss_rate + 2.0 * p.dephasing_rate;
    let constant = 2.0 * (p.loss_rate + 2.0 * p.dephasing_rate) / p.waveguide_rate;
    let numerator = 4.0 * two_gamma * two_gamma * p.drive * p.drive
        / (p.waveguide_rate * (p.waveguide_rate + p.loss_rate));
    Ok(grid
        .iter()
        .map(|&omega| {
            let dw = omega - p.frequency;
            constant + numerator / (two_gamma * two_gamma + 4.0 * dw * dw)
        })
        .collect())
}

/// Waveguide-coupled cavity hybridized with a dissipative qubit. The
/// waveguide sees the cavity; the qubit acts as a lossy mode dressing it,
/// so the cavity responds exactly as an emitter coupled to a Lorentzian
/// reservoir centered on the qubit line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityQubitParams {
    pub cavity_frequency: f64,
    pub qubit_frequency: f64,
    pub qubit_linewidth: f64,
    pub coupling: f64,
    pub probe_coupling: f64,
    pub velocity: f64,
}

impl CavityQubitParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        finite("cavity_frequency", self.cavity_frequency)?;
        finite("qubit_frequency", self.qubit_frequency)?;
        positive("qubit_linewidth", self.qubit_linewidth)?;
        non_negative("coupling", self.coupling)?;
        positive("probe_coupling", self.probe_coupling)?;
        positive("velocity", self.velocity)
    }

    /// Cavity decay rate into the line, V^2 / v.
    pub fn waveguide_rate(&self) -> f64 {
        self.probe_coupling * self.probe_coupling / self.velocity
    }

    /// The reservoir the qubit presents to the cavity: a Lorentzian of
    /// integrated weight g^2, half-width Gamma_1, centered on the qubit.
    pub fn equivalent_density(&self) -> Result<SpectralDensity, crate::error::SdError> {
        SpectralDensity::lorentzian(self.coupling, self.qubit_linewidth, self.qubit_frequency)
    }
}

/// Reflection off the dressed cavity,
///
///   r = -i (V^2 / v) (w - w1 + i G1)
///       / ((w - w1 + i G1)(w - w0 + i V^2 / v) - g^2),
///
/// with t = 1 + r. Identical to the forward pipeline fed the equivalent
/// Lorentzian density; kept as an independent closed form precisely so
/// that identity can be tested.
pub fn cavity_qubit_spectrum(
    p: &CavityQubitParams,
    grid: &FrequencyGrid,
) -> Result<ScatteringSpectrum, ConfigError> {
    p.validate()?;
    let rate = p.waveguide_rate();
    let g2 = p.coupling * p.coupling;
    let reflection = grid
        .iter()
        .map(|&omega| {
            let qubit = Complex64::new(omega - p.qubit_frequency, p.qubit_linewidth);
            let cavity = Complex64::new(omega - p.cavity_frequency, rate);
            Complex64::new(0.0, -rate) * qubit / (qubit * cavity - g2)
        })
        .collect();
    Ok(ScatteringSpectrum::from_reflection(grid.clone(), reflection))
}

/// 4 g^2 / Gamma_1^2. Above 1 the resonant cavity-qubit system retains
/// memory that no flat-reservoir description can reproduce; the caller
/// compares against that threshold.
pub fn nonmarkovianity_ratio(p: &CavityQubitParams) -> Result<f64, ConfigError> {
    p.validate()?;
    let ratio = 2.0 * p.coupling / p.qubit_linewidth;
    Ok(ratio * ratio)
}
