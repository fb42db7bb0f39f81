//! Dressed-emitter self-energy Σ(ω) = P(ω) − iπJ(ω) and the emission
//! amplitude ε̃(ω) built from it.
//!
//! P is the Cauchy principal value of ∫ J(ω′)/(ω − ω′) dω′ over the density's
//! support; the imaginary part is the on-shell value −πJ(ω) exactly. Each
//! grid point is computed independently, so results do not depend on
//! evaluation order.

use num_complex::Complex64;

use crate::error::QuadratureFailure;
use crate::grid::FrequencyGrid;
use crate::quad;
use crate::sd::SpectralDensity;

/// Level shift P and on-shell density J sampled on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfEnergy {
    grid: FrequencyGrid,
    level_shift: Vec<f64>,
    density: Vec<f64>,
}

impl SelfEnergy {
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    /// P(ω) per grid point.
    pub fn level_shift(&self) -> &[f64] {
        &self.level_shift
    }

    /// J(ω) per grid point; non-negative.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Σ(ω_i) = P(ω_i) − iπJ(ω_i).
    pub fn sigma(&self, i: usize) -> Complex64 {
        Complex64::new(
            self.level_shift[i],
            -std::f64::consts::PI * self.density[i],
        )
    }

    pub fn sigma_values(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.sigma(i)).collect()
    }
}

/// Absolute-tolerance scale for the level-shift quadrature: tiny compared to
/// any feature of a density whose peak is `max_value`.
fn level_shift_eps_abs(sd: &SpectralDensity) -> f64 {
    1e-12 * (1.0 + sd.max_value())
}

/// P(ω) at a single frequency, by singularity-subtracted principal-value
/// quadrature. Zero when the density vanishes identically; a proper integral
/// when ω lies outside the support.
pub fn level_shift_at(sd: &SpectralDensity, omega: f64) -> Result<f64, QuadratureFailure> {
    if sd.is_vanishing() {
        return Ok(0.0);
    }
    let support = sd.support();
    let q = quad::principal_value(
        |w| sd.evaluate(w),
        support.min,
        support.max,
        omega,
        &sd.breakpoints(),
        level_shift_eps_abs(sd),
        quad::DEFAULT_REL_TOL,
        8000,
    )?;
    Ok(q)
}

/// Sample Σ(ω) = P(ω) − iπJ(ω) on a grid.
pub fn self_energy(
    sd: &SpectralDensity,
    grid: &FrequencyGrid,
) -> Result<SelfEnergy, QuadratureFailure> {
    let mut level_shift = Vec::with_capacity(grid.len());
    let mut density = Vec::with_capacity(grid.len());
    for &omega in grid.values() {
        level_shift.push(level_shift_at(sd, omega)?);
        density.push(sd.evaluate(omega));
    }
    Ok(SelfEnergy {
        grid: grid.clone(),
        level_shift,
        density,
    })
}

/// ε̃(ω) = 1/(ω − ω₀ − Σ(ω)) per grid point.
///
/// Where J(ω) = 0 and ω − ω₀ − P(ω) = 0 the amplitude is a genuine pole;
/// the value is reported as an infinite marker, which downstream scattering
/// maps to perfect reflection (r = −1, t = 0).
pub fn emission_amplitude(se: &SelfEnergy, omega0: f64) -> Vec<Complex64> {
    se.grid
        .values()
        .iter()
        .enumerate()
        .map(|(i, &omega)| {
            let denom = Complex64::new(
                omega - omega0 - se.level_shift[i],
                std::f64::consts::PI * se.density[i],
            );
            if denom.re == 0.0 && denom.im == 0.0 {
                Complex64::new(f64::INFINITY, 0.0)
            } else {
                denom.finv()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sd::LorentzianParams;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn lorentzian_quadrature_matches_closed_form() {
        let params = LorentzianParams::new(1.3, 0.7, 2.0).unwrap();
        let sd = SpectralDensity::lorentzian(1.3, 0.7, 2.0).unwrap();
        let grid = FrequencyGrid::linspace(2.0 - 14.0, 2.0 + 14.0, 64).unwrap();
        let se = self_energy(&sd, &grid).unwrap();
        for (i, &omega) in grid.values().iter().enumerate() {
            let exact = params.closed_form_self_energy(omega);
            let got = se.sigma(i);
            assert_relative_eq!(got.re, exact.re, max_relative = 1e-9, epsilon = 1e-12);
            assert_relative_eq!(got.im, exact.im, max_relative = 1e-9);
        }
    }

    #[test]
    fn lorentzian_center_values() {
        // At the line center: P = 0, Im Σ = −g²/Γ₁.
        let sd = SpectralDensity::lorentzian(1.5, 0.5, -1.0).unwrap();
        let grid = FrequencyGrid::new(vec![-1.0, 0.0]).unwrap();
        let se = self_energy(&sd, &grid).unwrap();
        assert_abs_diff_eq!(se.level_shift()[0], 0.0, epsilon = 1e-10);
        assert_relative_eq!(se.sigma(0).im, -(1.5 * 1.5) / 0.5, max_relative = 1e-12);
    }

    #[test]
    fn zero_density_has_zero_sigma() {
        let sd = SpectralDensity::zero();
        let grid = FrequencyGrid::linspace(-3.0, 3.0, 7).unwrap();
        let se = self_energy(&sd, &grid).unwrap();
        assert!(se.level_shift().iter().all(|&p| p == 0.0));
        assert!(se.density().iter().all(|&j| j == 0.0));
    }

    #[test]
    fn flat_density_at_midpoint_is_purely_imaginary() {
        let sd = SpectralDensity::flat(0.1, (2.0, 8.0)).unwrap();
        let grid = FrequencyGrid::new(vec![5.0, 9.0]).unwrap();
        let se = self_energy(&sd, &grid).unwrap();
        assert_abs_diff_eq!(se.level_shift()[0], 0.0, epsilon = 1e-11);
        assert_relative_eq!(
            se.sigma(0).im,
            -std::f64::consts::PI * 0.1,
            max_relative = 1e-15
        );
        // Outside the support the transform is a proper integral:
        // ∫_2^8 0.1/(9−ω′) dω′ = 0.1·ln(7/1).
        assert_relative_eq!(
            se.level_shift()[1],
            0.1 * 7.0_f64.ln(),
            max_relative = 1e-9
        );
        assert_eq!(se.density()[1], 0.0);
    }

    #[test]
    fn emission_amplitude_free_case_and_marker() {
        let sd = SpectralDensity::zero();
        let grid = FrequencyGrid::new(vec![4.0, 5.0, 6.0]).unwrap();
        let se = self_energy(&sd, &grid).unwrap();
        let eps = emission_amplitude(&se, 5.0);
        assert!(eps[1].re.is_infinite());
        assert_eq!(eps[2], Complex64::new(1.0, 0.0));
        assert_eq!(eps[0], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn flat_density_on_resonance_amplitude() {
        let sd = SpectralDensity::flat(0.2, (-4.0, 4.0)).unwrap();
        let grid = FrequencyGrid::new(vec![0.0, 1.0]).unwrap();
        let se = self_energy(&sd, &grid).unwrap();
        let eps = emission_amplitude(&se, 0.0);
        // 1/(iπJ₀) = −i/(πJ₀).
        let expected = -1.0 / (std::f64::consts::PI * 0.2);
        assert_abs_diff_eq!(eps[0].re, 0.0, epsilon = 1e-10);
        assert_relative_eq!(eps[0].im, expected, max_relative = 1e-9);
    }

    #[test]
    fn band_edge_points_stay_finite() {
        let sd = SpectralDensity::band_gap(0.5, 1.0, 9.0).unwrap();
        let grid = FrequencyGrid::new(vec![0.5, 1.0, 5.0, 9.0, 12.0]).unwrap();
        let se = self_energy(&sd, &grid).unwrap();
        assert!(se.level_shift().iter().all(|p| p.is_finite()));
        // Below the band every pole term 1/(ω−ω′) is negative.
        assert!(se.level_shift()[0] < 0.0);
        // Above the band the proper integral is positive.
        assert!(se.level_shift()[4] > 0.0);
    }
}
