//! Inverse path: measured reflectance/transmittance back to the spectral
//! density, plus the flatness test that decides whether a Markovian
//! description of the reservoir would have been adequate.

use serde::{Deserialize, Serialize};

use crate::error::ReconstructError;
use crate::grid::FrequencyGrid;
use crate::scattering::{EffectivePotential, ScatteringSpectrum};

/// Reflectance below this carries no usable density information: the
/// inversion divides by R, so the point is dropped rather than amplified.
pub const DEFAULT_R_FLOOR: f64 = 1e-6;

/// Relative spread above which a flatness profile counts as structured.
pub const DEFAULT_VERDICT_REL_TOL: f64 = 1e-2;

/// A verdict over fewer points than this is not worth reporting.
const MIN_VERDICT_POINTS: usize = 8;

/// Allowed flux deficit for spectra without stated uncertainties; covers
/// roundoff in R + T computed from double-precision amplitudes.
const FLUX_ABS_TOL: f64 = 1e-12;

/// Per-point quality marker attached to every reconstructed value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointFlag {
    /// Point usable as-is.
    Ok,
    /// R below the floor; the reconstructed value is meaningless and is
    /// reported as NaN.
    LowReflectance,
    /// R + T exceeds 1 beyond the stated noise; the raw (negative) value is
    /// kept so the violation stays visible.
    FluxViolation,
    /// Slightly negative value compatible with the stated noise; kept raw.
    NonphysicalNegative,
}

impl PointFlag {
    pub fn as_token(self) -> &'static str {
        match self {
            PointFlag::Ok => "ok",
            PointFlag::LowReflectance => "low_reflectance",
            PointFlag::FluxViolation => "flux_violation",
            PointFlag::NonphysicalNegative => "nonphysical_negative",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        match token {
            "ok" => Some(PointFlag::Ok),
            "low_reflectance" => Some(PointFlag::LowReflectance),
            "flux_violation" => Some(PointFlag::FluxViolation),
            "nonphysical_negative" => Some(PointFlag::NonphysicalNegative),
            _ => None,
        }
    }

    pub fn is_ok(self) -> bool {
        self == PointFlag::Ok
    }
}

/// Reflectance and transmittance samples, optionally with per-point
/// standard deviations from the measurement.
///
/// Individual values must sit in [0, 1]; the sum R + T is allowed to exceed
/// 1 here because deciding whether that is noise or a real problem is the
/// reconstruction's job, not the container's.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredSpectrum {
    grid: FrequencyGrid,
    reflectances: Vec<f64>,
    transmittances: Vec<f64>,
    sigma_r: Option<Vec<f64>>,
    sigma_t: Option<Vec<f64>>,
}

impl MeasuredSpectrum {
    pub fn new(
        grid: FrequencyGrid,
        reflectances: Vec<f64>,
        transmittances: Vec<f64>,
    ) -> Result<Self, ReconstructError> {
        Self::build(grid, reflectances, transmittances, None, None)
    }

    pub fn with_uncertainty(
        grid: FrequencyGrid,
        reflectances: Vec<f64>,
        transmittances: Vec<f64>,
        sigma_r: Vec<f64>,
        sigma_t: Vec<f64>,
    ) -> Result<Self, ReconstructError> {
        Self::build(
            grid,
            reflectances,
            transmittances,
            Some(sigma_r),
            Some(sigma_t),
        )
    }

    fn build(
        grid: FrequencyGrid,
        reflectances: Vec<f64>,
        transmittances: Vec<f64>,
        sigma_r: Option<Vec<f64>>,
        sigma_t: Option<Vec<f64>>,
    ) -> Result<Self, ReconstructError> {
        let n = grid.len();
        for len in [reflectances.len(), transmittances.len()]
            .into_iter()
            .chain(sigma_r.iter().map(Vec::len))
            .chain(sigma_t.iter().map(Vec::len))
        {
            if len != n {
                return Err(ReconstructError::GridMismatch {
                    expected: n,
                    got: len,
                });
            }
        }
        for (index, &value) in reflectances.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(ReconstructError::BadReflectance { index, value });
            }
        }
        for (index, &value) in transmittances.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(ReconstructError::BadTransmittance { index, value });
            }
        }
        for sigmas in sigma_r.iter().chain(sigma_t.iter()) {
            for (index, &value) in sigmas.iter().enumerate() {
                if !value.is_finite() || value < 0.0 {
                    return Err(ReconstructError::BadSigma { index, value });
                }
            }
        }
        Ok(Self {
            grid,
            reflectances,
            transmittances,
            sigma_r,
            sigma_t,
        })
    }

    /// Reads a simulated spectrum as if it had been measured. Moduli of
    /// double-precision amplitudes can overshoot 1 by a few ulp, so values
    /// are clipped to [0, 1] here; nothing physical is lost at that scale.
    pub fn from_scattering(spectrum: &ScatteringSpectrum) -> Self {
        let clip = |v: f64| v.clamp(0.0, 1.0);
        Self {
            grid: spectrum.grid().clone(),
            reflectances: spectrum.reflectances().into_iter().map(clip).collect(),
            transmittances: spectrum.transmittances().into_iter().map(clip).collect(),
            sigma_r: None,
            sigma_t: None,
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn reflectances(&self) -> &[f64] {
        &self.reflectances
    }

    pub fn transmittances(&self) -> &[f64] {
        &self.transmittances
    }

    pub fn sigma_r(&self) -> Option<&[f64]> {
        self.sigma_r.as_deref()
    }

    pub fn sigma_t(&self) -> Option<&[f64]> {
        self.sigma_t.as_deref()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True when both uncertainty arrays are present.
    pub fn has_uncertainty(&self) -> bool {
        self.sigma_r.is_some() && self.sigma_t.is_some()
    }

    /// Flux deficit 1 - R - T must not be more negative than this at point
    /// i: three combined standard deviations when stated, else roundoff.
    fn flux_tolerance(&self, i: usize) -> f64 {
        match (&self.sigma_r, &self.sigma_t) {
            (Some(sr), Some(st)) => 3.0 * (sr[i] * sr[i] + st[i] * st[i]).sqrt(),
            _ => FLUX_ABS_TOL,
        }
    }
}

/// Reconstructed density samples with per-point flags and, when the input
/// carried uncertainties, propagated standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    grid: FrequencyGrid,
    j_values: Vec<f64>,
    flags: Vec<PointFlag>,
    sigma_j: Option<Vec<f64>>,
}

impl ReconstructionResult {
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn j_values(&self) -> &[f64] {
        &self.j_values
    }

    pub fn flags(&self) -> &[PointFlag] {
        &self.flags
    }

    pub fn sigma_j(&self) -> Option<&[f64]> {
        self.sigma_j.as_deref()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Indices whose flag is `ok`.
    pub fn unflagged_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, f)| f.is_ok())
            .map(|(i, _)| i)
    }
}

/// Classifies one point and produces its value. `deficit` is 1 - R - T.
fn classify(r: f64, deficit: f64, prefactor: f64, r_floor: f64, tol: f64) -> (f64, PointFlag) {
    if r < r_floor {
        return (f64::NAN, PointFlag::LowReflectance);
    }
    let j = prefactor * deficit / r;
    if deficit < -tol {
        (j, PointFlag::FluxViolation)
    } else if j < 0.0 {
        (j, PointFlag::NonphysicalNegative)
    } else {
        (j, PointFlag::Ok)
    }
}

/// Inverts a spectrum to the spectral density,
/// J(omega) = (V^2 / 2 pi v) (1 - R - T) / R,
/// flagging points that cannot be trusted. Negative values are never
/// clamped: hiding them would bias the flatness statistics downstream.
pub fn reconstruct_sd(
    ms: &MeasuredSpectrum,
    coupling: f64,
    velocity: f64,
    r_floor: f64,
) -> Result<ReconstructionResult, ReconstructError> {
    check_probe(coupling, velocity)?;
    if !r_floor.is_finite() || r_floor <= 0.0 || r_floor >= 1.0 {
        return Err(ReconstructError::BadFloor(r_floor));
    }
    let prefactor = coupling * coupling / (2.0 * std::f64::consts::PI * velocity);
    let mut j_values = Vec::with_capacity(ms.len());
    let mut flags = Vec::with_capacity(ms.len());
    for i in 0..ms.len() {
        let r = ms.reflectances[i];
        let deficit = 1.0 - r - ms.transmittances[i];
        let (j, flag) = classify(r, deficit, prefactor, r_floor, ms.flux_tolerance(i));
        j_values.push(j);
        flags.push(flag);
    }
    Ok(ReconstructionResult {
        grid: ms.grid.clone(),
        j_values,
        flags,
        sigma_j: None,
    })
}

/// Same inversion with first-order uncertainty propagation,
/// sigma_J^2 = (dJ/dR)^2 sigma_R^2 + (dJ/dT)^2 sigma_T^2.
/// Requires both uncertainty arrays; uses the default reflectance floor.
pub fn propagate_noise(
    ms: &MeasuredSpectrum,
    coupling: f64,
    velocity: f64,
) -> Result<ReconstructionResult, ReconstructError> {
    let (sigma_r, sigma_t) = match (&ms.sigma_r, &ms.sigma_t) {
        (Some(sr), Some(st)) => (sr, st),
        _ => return Err(ReconstructError::MissingUncertainty),
    };
    let mut result = reconstruct_sd(ms, coupling, velocity, DEFAULT_R_FLOOR)?;
    let prefactor = coupling * coupling / (2.0 * std::f64::consts::PI * velocity);
    let mut sigma_j = Vec::with_capacity(ms.len());
    for i in 0..ms.len() {
        if result.flags[i] == PointFlag::LowReflectance {
            sigma_j.push(f64::NAN);
            continue;
        }
        let r = ms.reflectances[i];
        let t = ms.transmittances[i];
        let dj_dr = -prefactor * (1.0 - t) / (r * r);
        let dj_dt = -prefactor / r;
        sigma_j.push((dj_dr * dj_dr * sigma_r[i] * sigma_r[i]
            + dj_dt * dj_dt * sigma_t[i] * sigma_t[i])
            .sqrt());
    }
    result.sigma_j = Some(sigma_j);
    Ok(result)
}

/// Flags each point exactly as the inversion would. The flags depend only
/// on R, T and the stated noise, never on the probe calibration, so the
/// flatness test can use them without knowing V or v.
pub fn point_flags(ms: &MeasuredSpectrum, r_floor: f64) -> Result<Vec<PointFlag>, ReconstructError> {
    if !r_floor.is_finite() || r_floor <= 0.0 || r_floor >= 1.0 {
        return Err(ReconstructError::BadFloor(r_floor));
    }
    Ok((0..ms.len())
        .map(|i| {
            let r = ms.reflectances[i];
            let deficit = 1.0 - r - ms.transmittances[i];
            classify(r, deficit, 1.0, r_floor, ms.flux_tolerance(i)).1
        })
        .collect())
}

/// Flatness profile f(omega) = (1 - R - T) / R. A frequency-independent f
/// is the signature of a memoryless reservoir; any structure means the
/// density varies across the probed window. Points below the reflectance
/// floor come back as NaN, everything else raw.
pub fn flatness_function(ms: &MeasuredSpectrum, r_floor: f64) -> Result<Vec<f64>, ReconstructError> {
    if !r_floor.is_finite() || r_floor <= 0.0 || r_floor >= 1.0 {
        return Err(ReconstructError::BadFloor(r_floor));
    }
    Ok((0..ms.len())
        .map(|i| {
            let r = ms.reflectances[i];
            if r < r_floor {
                f64::NAN
            } else {
                (1.0 - r - ms.transmittances[i]) / r
            }
        })
        .collect())
}

/// Outcome of the flatness test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Flat,
    Structured,
}

impl Verdict {
    pub fn is_flat(self) -> bool {
        self == Verdict::Flat
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Flat => "flat",
            Verdict::Structured => "structured",
        })
    }
}

/// Decides flat vs structured from a flatness profile: flat iff
/// (max - min) / median <= rel_tol over the finite entries. The median
/// normalization keeps single outliers from dominating the spread ratio.
pub fn markovianity_verdict(f_values: &[f64], rel_tol: f64) -> Result<Verdict, ReconstructError> {
    if !rel_tol.is_finite() || rel_tol <= 0.0 {
        return Err(ReconstructError::NonPositive {
            name: "rel_tol",
            value: rel_tol,
        });
    }
    let mut usable: Vec<f64> = f_values.iter().copied().filter(|v| v.is_finite()).collect();
    if usable.len() < MIN_VERDICT_POINTS {
        return Err(ReconstructError::InsufficientData {
            needed: MIN_VERDICT_POINTS,
            got: usable.len(),
        });
    }
    usable.sort_by(f64::total_cmp);
    let min = usable[0];
    let max = usable[usable.len() - 1];
    let median = {
        let mid = usable.len() / 2;
        if usable.len() % 2 == 0 {
            0.5 * (usable[mid - 1] + usable[mid])
        } else {
            usable[mid]
        }
    };
    if (max - min).abs() <= rel_tol * median.abs() {
        Ok(Verdict::Flat)
    } else {
        Ok(Verdict::Structured)
    }
}

/// Second route to the same density, straight from the effective potential:
/// J = (V^2 / pi) W_I / |W|^2. Algebraically identical to the R/T inversion
/// for noiseless data; kept separate so the two derivations can be checked
/// against each other. Divergent-potential points map to 0.
pub fn sd_from_potential(potential: &EffectivePotential, coupling: f64) -> Vec<f64> {
    let scale = coupling * coupling / std::f64::consts::PI;
    potential
        .values()
        .iter()
        .map(|w| {
            if !w.re.is_finite() || !w.im.is_finite() {
                0.0
            } else {
                let norm = w.norm_sqr();
                if norm == 0.0 {
                    0.0
                } else {
                    scale * (-w.im) / norm
                }
            }
        })
        .collect()
}

fn check_probe(coupling: f64, velocity: f64) -> Result<(), ReconstructError> {
    for (name, value) in [("coupling", coupling), ("velocity", velocity)] {
        if !value.is_finite() || value <= 0.0 {
            return Err(ReconstructError::NonPositive { name, value });
        }
    }
    Ok(())
}
