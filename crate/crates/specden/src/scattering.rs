//! Single-photon scattering off the dressed emitter: the chain
//! ε̃(ω) → W(ω) = V²ε̃(ω) → (r, t) and the derived spectra.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, QuadratureFailure};
use crate::grid::FrequencyGrid;
use crate::selfenergy::{self, SelfEnergy};
use crate::sd::SpectralDensity;

/// Probe and emitter parameters for one scattering run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Emitter transition frequency ω₀.
    pub omega0: f64,
    /// Emitter–waveguide coupling amplitude V.
    pub coupling: f64,
    /// Waveguide group velocity υ.
    pub velocity: f64,
    /// Probe frequencies.
    pub grid: FrequencyGrid,
}

impl ProbeConfig {
    pub fn new(
        omega0: f64,
        coupling: f64,
        velocity: f64,
        grid: FrequencyGrid,
    ) -> Result<Self, ConfigError> {
        let cfg = Self {
            omega0,
            coupling,
            velocity,
            grid,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.omega0.is_finite() {
            return Err(ConfigError::NonFinite {
                name: "omega0",
                value: self.omega0,
            });
        }
        for (name, value) in [("coupling", self.coupling), ("velocity", self.velocity)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ConfigError::NonPositive { name, value });
            }
        }
        Ok(())
    }

    /// Spontaneous emission rate into the waveguide, Γ_wg = V²/υ. In these
    /// units it acts as the magnification knob of the whole measurement.
    pub fn waveguide_rate(&self) -> f64 {
        self.coupling * self.coupling / self.velocity
    }
}

/// W(ω) = V²ε̃(ω) sampled on a grid, decomposed as W = W_R − i·W_I.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivePotential {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl EffectivePotential {
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn w_r(&self, i: usize) -> f64 {
        self.values[i].re
    }

    /// W_I = −Im W; non-negative for every physical density.
    pub fn w_i(&self, i: usize) -> f64 {
        -self.values[i].im
    }
}

/// Complex reflection/transmission amplitudes with derived intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSpectrum {
    grid: FrequencyGrid,
    r: Vec<Complex64>,
    t: Vec<Complex64>,
}

impl ScatteringSpectrum {
    /// Builds a spectrum from reflection amplitudes alone; each transmission
    /// is the t = 1 + r that flux continuity at a point scatterer dictates.
    pub fn from_reflection(grid: FrequencyGrid, reflection: Vec<Complex64>) -> Self {
        assert_eq!(
            grid.len(),
            reflection.len(),
            "grid/amplitude length mismatch"
        );
        let t = reflection
            .iter()
            .map(|&r| Complex64::new(1.0, 0.0) + r)
            .collect();
        Self {
            grid,
            r: reflection,
            t,
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn reflection(&self) -> &[Complex64] {
        &self.r
    }

    pub fn transmission(&self) -> &[Complex64] {
        &self.t
    }

    pub fn reflectance(&self, i: usize) -> f64 {
        self.r[i].norm_sqr()
    }

    pub fn transmittance(&self, i: usize) -> f64 {
        self.t[i].norm_sqr()
    }

    /// A = 1 − R − T: the probability flux lost to the reservoir.
    pub fn absorbance(&self, i: usize) -> f64 {
        1.0 - self.reflectance(i) - self.transmittance(i)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn reflectances(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.reflectance(i)).collect()
    }

    pub fn transmittances(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.transmittance(i)).collect()
    }
}

/// W(ω) = V²·ε̃(ω). Divergence markers in ε̃ propagate.
pub fn effective_potential(
    grid: &FrequencyGrid,
    amplitudes: &[Complex64],
    coupling: f64,
) -> EffectivePotential {
    assert_eq!(grid.len(), amplitudes.len(), "grid/amplitude length mismatch");
    let v2 = coupling * coupling;
    EffectivePotential {
        grid: grid.clone(),
        values: amplitudes.iter().map(|&e| v2 * e).collect(),
    }
}

/// Scattering amplitudes of a point scatterer of strength W:
/// r = −i(W/υ)/(1 + i(W/υ)) and t = 1 + r. An infinite W (emitter pole in a
/// transparent region) scatters perfectly: r = −1, t = 0.
pub fn reflection_transmission(wp: &EffectivePotential, velocity: f64) -> ScatteringSpectrum {
    let mut r = Vec::with_capacity(wp.values.len());
    let mut t = Vec::with_capacity(wp.values.len());
    for &w in &wp.values {
        let amp = if w.re.is_finite() && w.im.is_finite() {
            let iw = Complex64::new(-w.im / velocity, w.re / velocity);
            -iw / (Complex64::new(1.0, 0.0) + iw)
        } else {
            Complex64::new(-1.0, 0.0)
        };
        r.push(amp);
        t.push(Complex64::new(1.0, 0.0) + amp);
    }
    ScatteringSpectrum {
        grid: wp.grid.clone(),
        r,
        t,
    }
}

/// Absorbance computed from the potential alone:
/// A = 2(W_I/υ) / [(W_R/υ)² + (1 + W_I/υ)²].
///
/// Algebraically identical to 1 − R − T; kept as an independent route so the
/// two can be cross-checked.
pub fn absorbance_from_potential(w: Complex64, velocity: f64) -> f64 {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return 0.0;
    }
    let wr = w.re / velocity;
    let wi = -w.im / velocity;
    2.0 * wi / (wr * wr + (1.0 + wi) * (1.0 + wi))
}

/// Full pipeline J → Σ → ε̃ → W → (r, t) on the probe grid.
pub fn forward_spectrum(
    sd: &SpectralDensity,
    cfg: &ProbeConfig,
) -> Result<ScatteringSpectrum, QuadratureFailure> {
    let se = selfenergy::self_energy(sd, &cfg.grid)?;
    Ok(forward_from_self_energy(&se, cfg))
}

/// Same pipeline starting from a precomputed self-energy (lets several probes
/// share one quadrature pass).
pub fn forward_from_self_energy(se: &SelfEnergy, cfg: &ProbeConfig) -> ScatteringSpectrum {
    let eps = selfenergy::emission_amplitude(se, cfg.omega0);
    let wp = effective_potential(se.grid(), &eps, cfg.coupling);
    reflection_transmission(&wp, cfg.velocity)
}

/// Markovian (golden-rule) decay rate 2π·J(ω₀) of the bare emitter.
pub fn fgr_rate(sd: &SpectralDensity, omega0: f64) -> f64 {
    2.0 * std::f64::consts::PI * sd.evaluate(omega0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn potential_of(values: Vec<Complex64>) -> EffectivePotential {
        let grid = FrequencyGrid::linspace(0.0, 1.0, values.len().max(2)).unwrap();
        let values = if values.len() == 1 {
            vec![values[0], values[0]]
        } else {
            values
        };
        EffectivePotential { grid, values }
    }

    #[test]
    fn no_potential_means_no_scattering() {
        let wp = potential_of(vec![Complex64::new(0.0, 0.0)]);
        let s = reflection_transmission(&wp, 1.0);
        assert_eq!(s.reflection()[0], Complex64::new(0.0, 0.0));
        assert_eq!(s.transmission()[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.absorbance(0), 0.0);
    }

    #[test]
    fn divergent_potential_reflects_perfectly() {
        let wp = potential_of(vec![Complex64::new(f64::INFINITY, 0.0)]);
        let s = reflection_transmission(&wp, 1.0);
        assert_eq!(s.reflection()[0], Complex64::new(-1.0, 0.0));
        assert_eq!(s.transmission()[0], Complex64::new(0.0, 0.0));
        assert_eq!(s.absorbance(0), 0.0);
    }

    #[test]
    fn purely_absorptive_potential_half_point() {
        // W = −iυ: r = −1/2, t = 1/2, R = T = 1/4, A = 1/2.
        let velocity = 1.7;
        let w = Complex64::new(0.0, -velocity);
        let wp = potential_of(vec![w]);
        let s = reflection_transmission(&wp, velocity);
        assert_relative_eq!(s.reflection()[0].re, -0.5, max_relative = 1e-15);
        assert_abs_diff_eq!(s.reflection()[0].im, 0.0);
        assert_relative_eq!(s.reflectance(0), 0.25, max_relative = 1e-15);
        assert_relative_eq!(s.transmittance(0), 0.25, max_relative = 1e-15);
        assert_relative_eq!(s.absorbance(0), 0.5, max_relative = 1e-12);
        assert_relative_eq!(
            absorbance_from_potential(w, velocity),
            0.5,
            max_relative = 1e-15
        );
    }

    #[test]
    fn bare_emitter_line_shape() {
        // Zero density: R(ω) = Γ²/(Γ² + (ω−ω₀)²) with Γ = V²/υ, R(ω₀) = 1.
        let sd = SpectralDensity::zero();
        let grid = FrequencyGrid::new(vec![4.0, 5.0, 6.0]).unwrap();
        let cfg = ProbeConfig::new(5.0, 1.0, 1.0, grid).unwrap();
        assert_eq!(cfg.waveguide_rate(), 1.0);
        let s = forward_spectrum(&sd, &cfg).unwrap();
        assert_eq!(s.reflectance(1), 1.0);
        assert_eq!(s.transmittance(1), 0.0);
        // At detuning Γ_wg: r = −i/(1+i) = −1/2 − i/2.
        assert_relative_eq!(s.reflection()[2].re, -0.5, max_relative = 1e-15);
        assert_relative_eq!(s.reflection()[2].im, -0.5, max_relative = 1e-15);
        assert_relative_eq!(s.reflectance(2), 0.5, max_relative = 1e-14);
        assert_abs_diff_eq!(s.absorbance(0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn amplitudes_keep_exact_sum_rule_and_flux_bound() {
        let sd = SpectralDensity::lorentzian(1.2, 0.4, 3.0).unwrap();
        let grid = FrequencyGrid::linspace(0.0, 6.0, 101).unwrap();
        let cfg = ProbeConfig::new(3.0, 0.9, 1.3, grid).unwrap();
        let s = forward_spectrum(&sd, &cfg).unwrap();
        for i in 0..s.len() {
            assert_eq!(
                s.transmission()[i],
                Complex64::new(1.0, 0.0) + s.reflection()[i],
                "t must be exactly 1 + r"
            );
            assert!(s.reflectance(i) + s.transmittance(i) <= 1.0 + 1e-12);
            assert!(s.absorbance(i) >= -1e-12);
        }
    }

    #[test]
    fn golden_rule_rate_cases() {
        let flat = SpectralDensity::flat(0.1, (0.0, 10.0)).unwrap();
        assert_relative_eq!(
            fgr_rate(&flat, 5.0),
            0.2 * std::f64::consts::PI,
            max_relative = 1e-15
        );
        let gap = SpectralDensity::band_gap(0.5, 1.0, 9.0).unwrap();
        assert_eq!(fgr_rate(&gap, 0.3), 0.0);
        let lor = SpectralDensity::lorentzian(1.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(fgr_rate(&lor, 2.0), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn probe_config_validation() {
        let grid = FrequencyGrid::linspace(0.0, 1.0, 3).unwrap();
        assert!(ProbeConfig::new(0.0, 0.0, 1.0, grid.clone()).is_err());
        assert!(ProbeConfig::new(0.0, 1.0, -2.0, grid.clone()).is_err());
        assert!(ProbeConfig::new(f64::NAN, 1.0, 1.0, grid).is_err());
    }
}
