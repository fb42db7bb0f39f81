//! Spectral-density families.
//!
//! A spectral density J(ω) bundles the reservoir's density of states and its
//! coupling to the emitter; it is the one function the whole toolkit revolves
//! around. Every family carries an explicit finite support outside which
//! J ≡ 0, so quadrature domains are always finite. Parametric kinds default
//! to a truncation where the tail has dropped below 10⁻¹² of the peak.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QuadratureFailure, SdError};
use crate::quad;

/// Fraction of the peak below which a parametric tail is truncated.
pub const TAIL_FRACTION: f64 = 1e-12;

/// Closed frequency interval outside which a density vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub min: f64,
    pub max: f64,
}

impl Support {
    pub fn new(min: f64, max: f64) -> Result<Self, SdError> {
        if !min.is_finite() {
            return Err(SdError::NonFinite {
                name: "support min",
                value: min,
            });
        }
        if !max.is_finite() {
            return Err(SdError::NonFinite {
                name: "support max",
                value: max,
            });
        }
        if min >= max {
            return Err(SdError::EmptySupport { min, max });
        }
        Ok(Self { min, max })
    }

    /// Degenerate support of the identically-zero density.
    pub(crate) const EMPTY: Support = Support { min: 0.0, max: 0.0 };

    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.min && omega <= self.max
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }
}

/// Lorentzian line-shape parameters: J(ω) = (g²/π)·Γ₁/(Γ₁² + (ω−ω₁)²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianParams {
    /// Emitter–mode coupling rate g.
    pub coupling: f64,
    /// Half-width Γ₁ (the mode's dissipation rate).
    pub half_width: f64,
    /// Center frequency ω₁.
    pub center: f64,
}

impl LorentzianParams {
    pub fn new(coupling: f64, half_width: f64, center: f64) -> Result<Self, SdError> {
        for (name, value) in [
            ("coupling", coupling),
            ("half_width", half_width),
            ("center", center),
        ] {
            if !value.is_finite() {
                return Err(SdError::NonFinite { name, value });
            }
        }
        if coupling <= 0.0 {
            return Err(SdError::NonPositive {
                name: "coupling",
                value: coupling,
            });
        }
        if half_width <= 0.0 {
            return Err(SdError::NonPositive {
                name: "half_width",
                value: half_width,
            });
        }
        Ok(Self {
            coupling,
            half_width,
            center,
        })
    }

    pub fn evaluate(&self, omega: f64) -> f64 {
        let d = omega - self.center;
        (self.coupling * self.coupling / std::f64::consts::PI) * self.half_width
            / (self.half_width * self.half_width + d * d)
    }

    /// Full-line analytic self-energy Σ(ω) = g²/(ω − ω₁ + iΓ₁).
    ///
    /// This is the closed form the quadrature path is validated against;
    /// the forward engine itself never calls it.
    pub fn closed_form_self_energy(&self, omega: f64) -> Complex64 {
        self.coupling * self.coupling
            / Complex64::new(omega - self.center, self.half_width)
    }

    /// Support where the tail still exceeds `TAIL_FRACTION` of the peak.
    pub fn default_support(&self) -> Support {
        let reach = self.half_width * (1.0 / TAIL_FRACTION - 1.0).sqrt();
        Support {
            min: self.center - reach,
            max: self.center + reach,
        }
    }
}

/// Piecewise-linear density given by samples on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSd {
    omegas: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedSd {
    pub fn new(omegas: Vec<f64>, values: Vec<f64>) -> Result<Self, SdError> {
        if omegas.len() != values.len() {
            return Err(SdError::LengthMismatch {
                omegas: omegas.len(),
                values: values.len(),
            });
        }
        if omegas.len() < 2 {
            return Err(SdError::TooFewSamples(omegas.len()));
        }
        for (i, (&w, &j)) in omegas.iter().zip(&values).enumerate() {
            if !w.is_finite() || !j.is_finite() {
                return Err(SdError::NonFiniteSample(i));
            }
            if i > 0 && w <= omegas[i - 1] {
                return Err(SdError::NotIncreasing(i));
            }
            if j < 0.0 {
                return Err(SdError::NegativeSample { index: i, value: j });
            }
        }
        Ok(Self { omegas, values })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn evaluate(&self, omega: f64) -> f64 {
        let first = self.omegas[0];
        let last = *self.omegas.last().unwrap();
        if omega < first || omega > last {
            return 0.0;
        }
        match self.omegas.binary_search_by(|x| x.total_cmp(&omega)) {
            Ok(i) => self.values[i],
            Err(i) => {
                let (w0, w1) = (self.omegas[i - 1], self.omegas[i]);
                let frac = (omega - w0) / (w1 - w0);
                self.values[i - 1] + frac * (self.values[i] - self.values[i - 1])
            }
        }
    }
}

/// A reservoir spectral density: one of the parametric families, a tabulated
/// curve, or the identically-zero density of a closed system.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralDensity {
    /// J ≡ 0: no reservoir at all.
    Zero,
    /// Constant J₀ on the support (the Markovian reference).
    Flat { height: f64, support: Support },
    /// Lorentzian line, truncated at the declared support.
    Lorentzian {
        params: LorentzianParams,
        support: Support,
    },
    /// J(ω) = α·ω·e^(−ω/ω_c) for ω ≥ 0, the canonical structured density.
    Ohmic {
        strength: f64,
        cutoff: f64,
        support: Support,
    },
    /// Square-root band edge: J(ω) = C·√(ω − ω_e) above the edge ω_e, zero at
    /// and below it, with a hard upper cutoff. This edge profile is the
    /// standard choice for an isotropic photonic band edge; it is a modelling
    /// convention of this crate, not a form fixed by any particular source.
    BandGap {
        amplitude: f64,
        edge: f64,
        cutoff: f64,
    },
    /// Piecewise-linear interpolation of measured or reconstructed samples.
    Tabulated(TabulatedSd),
}

impl SpectralDensity {
    pub fn zero() -> Self {
        SpectralDensity::Zero
    }

    pub fn flat(height: f64, support: (f64, f64)) -> Result<Self, SdError> {
        if !height.is_finite() {
            return Err(SdError::NonFinite {
                name: "height",
                value: height,
            });
        }
        if height < 0.0 {
            return Err(SdError::Negative {
                name: "height",
                value: height,
            });
        }
        Ok(SpectralDensity::Flat {
            height,
            support: Support::new(support.0, support.1)?,
        })
    }

    pub fn lorentzian(coupling: f64, half_width: f64, center: f64) -> Result<Self, SdError> {
        let params = LorentzianParams::new(coupling, half_width, center)?;
        let support = params.default_support();
        Ok(SpectralDensity::Lorentzian { params, support })
    }

    pub fn lorentzian_with_support(
        coupling: f64,
        half_width: f64,
        center: f64,
        support: (f64, f64),
    ) -> Result<Self, SdError> {
        Ok(SpectralDensity::Lorentzian {
            params: LorentzianParams::new(coupling, half_width, center)?,
            support: Support::new(support.0, support.1)?,
        })
    }

    pub fn ohmic(strength: f64, cutoff: f64) -> Result<Self, SdError> {
        let support = Support {
            min: 0.0,
            max: ohmic_tail_reach() * cutoff,
        };
        Self::ohmic_raw(strength, cutoff, support)
    }

    pub fn ohmic_with_support(
        strength: f64,
        cutoff: f64,
        support: (f64, f64),
    ) -> Result<Self, SdError> {
        let support = Support::new(support.0, support.1)?;
        if support.min < 0.0 {
            return Err(SdError::Negative {
                name: "ohmic support min",
                value: support.min,
            });
        }
        Self::ohmic_raw(strength, cutoff, support)
    }

    fn ohmic_raw(strength: f64, cutoff: f64, support: Support) -> Result<Self, SdError> {
        if !strength.is_finite() {
            return Err(SdError::NonFinite {
                name: "strength",
                value: strength,
            });
        }
        if strength < 0.0 {
            return Err(SdError::Negative {
                name: "strength",
                value: strength,
            });
        }
        if !cutoff.is_finite() || cutoff <= 0.0 {
            return Err(SdError::NonPositive {
                name: "cutoff",
                value: cutoff,
            });
        }
        Ok(SpectralDensity::Ohmic {
            strength,
            cutoff,
            support,
        })
    }

    pub fn band_gap(amplitude: f64, edge: f64, cutoff: f64) -> Result<Self, SdError> {
        if !amplitude.is_finite() {
            return Err(SdError::NonFinite {
                name: "amplitude",
                value: amplitude,
            });
        }
        if amplitude < 0.0 {
            return Err(SdError::Negative {
                name: "amplitude",
                value: amplitude,
            });
        }
        if !edge.is_finite() {
            return Err(SdError::NonFinite {
                name: "edge",
                value: edge,
            });
        }
        if !cutoff.is_finite() || cutoff <= edge {
            return Err(SdError::EmptySupport {
                min: edge,
                max: cutoff,
            });
        }
        Ok(SpectralDensity::BandGap {
            amplitude,
            edge,
            cutoff,
        })
    }

    pub fn tabulated(omegas: Vec<f64>, values: Vec<f64>) -> Result<Self, SdError> {
        Ok(SpectralDensity::Tabulated(TabulatedSd::new(omegas, values)?))
    }

    /// J(ω): non-negative, exactly zero outside the support.
    pub fn evaluate(&self, omega: f64) -> f64 {
        match self {
            SpectralDensity::Zero => 0.0,
            SpectralDensity::Flat { height, support } => {
                if support.contains(omega) {
                    *height
                } else {
                    0.0
                }
            }
            SpectralDensity::Lorentzian { params, support } => {
                if support.contains(omega) {
                    params.evaluate(omega)
                } else {
                    0.0
                }
            }
            SpectralDensity::Ohmic {
                strength,
                cutoff,
                support,
            } => {
                if support.contains(omega) {
                    strength * omega * (-omega / cutoff).exp()
                } else {
                    0.0
                }
            }
            SpectralDensity::BandGap {
                amplitude,
                edge,
                cutoff,
            } => {
                if omega > *edge && omega <= *cutoff {
                    amplitude * (omega - edge).sqrt()
                } else {
                    0.0
                }
            }
            SpectralDensity::Tabulated(t) => t.evaluate(omega),
        }
    }

    pub fn support(&self) -> Support {
        match self {
            SpectralDensity::Zero => Support::EMPTY,
            SpectralDensity::Flat { support, .. }
            | SpectralDensity::Lorentzian { support, .. }
            | SpectralDensity::Ohmic { support, .. } => *support,
            SpectralDensity::BandGap { edge, cutoff, .. } => Support {
                min: *edge,
                max: *cutoff,
            },
            SpectralDensity::Tabulated(t) => Support {
                min: t.omegas[0],
                max: *t.omegas.last().unwrap(),
            },
        }
    }

    /// Largest value J attains on its support.
    pub fn max_value(&self) -> f64 {
        match self {
            SpectralDensity::Zero => 0.0,
            SpectralDensity::Flat { height, .. } => *height,
            SpectralDensity::Lorentzian { params, support } => {
                if support.contains(params.center) {
                    params.evaluate(params.center)
                } else {
                    params.evaluate(support.min).max(params.evaluate(support.max))
                }
            }
            SpectralDensity::Ohmic {
                strength,
                cutoff,
                support,
            } => {
                if support.contains(*cutoff) {
                    strength * cutoff * (-1.0_f64).exp()
                } else {
                    self.evaluate(support.min).max(self.evaluate(support.max))
                }
            }
            SpectralDensity::BandGap {
                amplitude,
                edge,
                cutoff,
            } => amplitude * (cutoff - edge).sqrt(),
            SpectralDensity::Tabulated(t) => t.values.iter().copied().fold(0.0, f64::max),
        }
    }

    /// True when J ≡ 0 everywhere (closed-system limit).
    pub fn is_vanishing(&self) -> bool {
        self.max_value() == 0.0
    }

    /// Interior points every quadrature over the support should split at:
    /// peak ladders for the parametric kinds, sample nodes for tabulated
    /// data. Without these, panels many decades wider than a feature would
    /// pass right over it.
    pub fn breakpoints(&self) -> Vec<f64> {
        let support = self.support();
        let mut pts = Vec::new();
        match self {
            SpectralDensity::Zero | SpectralDensity::Flat { .. } => {}
            SpectralDensity::Lorentzian { params, .. } => {
                pts.push(params.center);
                let mut reach = params.half_width;
                while params.center - reach > support.min
                    || params.center + reach < support.max
                {
                    pts.push(params.center - reach);
                    pts.push(params.center + reach);
                    reach *= 10.0;
                }
            }
            SpectralDensity::Ohmic { cutoff, .. } => {
                for k in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
                    pts.push(k * cutoff);
                }
            }
            SpectralDensity::BandGap { edge, cutoff, .. } => {
                // Resolve the square-root shoulder just above the edge.
                let width = cutoff - edge;
                let mut off = width * 1e-6;
                while off < width {
                    pts.push(edge + off);
                    off *= 10.0;
                }
            }
            SpectralDensity::Tabulated(t) => {
                let n = t.omegas.len();
                let stride = (n / 256).max(1);
                pts.extend(t.omegas.iter().copied().step_by(stride));
            }
        }
        pts.retain(|w| *w > support.min && *w < support.max);
        pts
    }

    /// ∫ J(ω) dω over the support, by adaptive quadrature.
    pub fn integral(&self) -> Result<f64, QuadratureFailure> {
        if self.is_vanishing() {
            return Ok(0.0);
        }
        let support = self.support();
        let mut edges = vec![support.min, support.max];
        edges.extend(self.breakpoints());
        let q = quad::integrate_segmented(
            |w| self.evaluate(w),
            &edges,
            0.0,
            quad::DEFAULT_REL_TOL,
            8000,
        )?;
        Ok(q.value)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SpectralDensity::Zero => "zero",
            SpectralDensity::Flat { .. } => "flat",
            SpectralDensity::Lorentzian { .. } => "lorentzian",
            SpectralDensity::Ohmic { .. } => "ohmic",
            SpectralDensity::BandGap { .. } => "band_gap",
            SpectralDensity::Tabulated(_) => "tabulated",
        }
    }
}

/// Solves x·e^(1−x) = TAIL_FRACTION: the Ohmic tail in units of the cutoff.
fn ohmic_tail_reach() -> f64 {
    let target = 1.0 + (1.0 / TAIL_FRACTION).ln();
    let mut x = target;
    for _ in 0..64 {
        x = target + x.ln();
    }
    x
}

// --- JSON form: {"kind": ..., "params": {...}, "support": [min, max]} ---

#[derive(Serialize, Deserialize)]
struct SdSpec {
    kind: String,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    params: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support: Option<[f64; 2]>,
}

fn param_f64(
    kind: &'static str,
    params: &serde_json::Map<String, serde_json::Value>,
    key: &str,
) -> Result<f64, SdError> {
    params
        .get(key)
        .and_then(serde_json::Value::as_f64)
        .ok_or_else(|| SdError::BadParams {
            kind,
            detail: format!("missing or non-numeric {key:?}"),
        })
}

fn param_array(
    kind: &'static str,
    params: &serde_json::Map<String, serde_json::Value>,
    key: &str,
) -> Result<Vec<f64>, SdError> {
    let items = params
        .get(key)
        .and_then(serde_json::Value::as_array)
        .ok_or_else(|| SdError::BadParams {
            kind,
            detail: format!("missing or non-array {key:?}"),
        })?;
    items
        .iter()
        .map(|v| {
            v.as_f64().ok_or_else(|| SdError::BadParams {
                kind,
                detail: format!("non-numeric entry in {key:?}"),
            })
        })
        .collect()
}

fn number(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v)
        .map(serde_json::Value::Number)
        .expect("finite parameter")
}

impl SpectralDensity {
    fn to_spec(&self) -> SdSpec {
        let mut params = serde_json::Map::new();
        let (kind, support) = match self {
            SpectralDensity::Zero => ("zero", None),
            SpectralDensity::Flat { height, support } => {
                params.insert("height".into(), number(*height));
                ("flat", Some([support.min, support.max]))
            }
            SpectralDensity::Lorentzian { params: p, support } => {
                params.insert("coupling".into(), number(p.coupling));
                params.insert("half_width".into(), number(p.half_width));
                params.insert("center".into(), number(p.center));
                ("lorentzian", Some([support.min, support.max]))
            }
            SpectralDensity::Ohmic {
                strength,
                cutoff,
                support,
            } => {
                params.insert("strength".into(), number(*strength));
                params.insert("cutoff".into(), number(*cutoff));
                ("ohmic", Some([support.min, support.max]))
            }
            SpectralDensity::BandGap {
                amplitude,
                edge,
                cutoff,
            } => {
                params.insert("amplitude".into(), number(*amplitude));
                params.insert("edge".into(), number(*edge));
                params.insert("cutoff".into(), number(*cutoff));
                ("band_gap", Some([*edge, *cutoff]))
            }
            SpectralDensity::Tabulated(t) => {
                params.insert(
                    "omega".into(),
                    serde_json::Value::Array(t.omegas.iter().map(|&w| number(w)).collect()),
                );
                params.insert(
                    "j".into(),
                    serde_json::Value::Array(t.values.iter().map(|&j| number(j)).collect()),
                );
                ("tabulated", Some([t.omegas[0], *t.omegas.last().unwrap()]))
            }
        };
        SdSpec {
            kind: kind.to_owned(),
            params,
            support,
        }
    }

    fn from_spec(spec: SdSpec) -> Result<Self, SdError> {
        let SdSpec {
            kind,
            params,
            support,
        } = spec;
        let declared = support.map(|[min, max]| (min, max));
        let sd = match kind.as_str() {
            "zero" => SpectralDensity::Zero,
            "flat" => {
                let height = param_f64("flat", &params, "height")?;
                let (min, max) = declared.ok_or(SdError::BadParams {
                    kind: "flat",
                    detail: "flat density requires an explicit support".into(),
                })?;
                Self::flat(height, (min, max))?
            }
            "lorentzian" => {
                let coupling = param_f64("lorentzian", &params, "coupling")?;
                let half_width = param_f64("lorentzian", &params, "half_width")?;
                let center = param_f64("lorentzian", &params, "center")?;
                match declared {
                    Some(s) => Self::lorentzian_with_support(coupling, half_width, center, s)?,
                    None => Self::lorentzian(coupling, half_width, center)?,
                }
            }
            "ohmic" => {
                let strength = param_f64("ohmic", &params, "strength")?;
                let cutoff = param_f64("ohmic", &params, "cutoff")?;
                match declared {
                    Some(s) => Self::ohmic_with_support(strength, cutoff, s)?,
                    None => Self::ohmic(strength, cutoff)?,
                }
            }
            "band_gap" => {
                let amplitude = param_f64("band_gap", &params, "amplitude")?;
                let edge = param_f64("band_gap", &params, "edge")?;
                let cutoff = param_f64("band_gap", &params, "cutoff")?;
                let sd = Self::band_gap(amplitude, edge, cutoff)?;
                if let Some((min, max)) = declared {
                    if min != edge || max != cutoff {
                        return Err(SdError::SupportMismatch { min, max });
                    }
                }
                sd
            }
            "tabulated" => {
                let omegas = param_array("tabulated", &params, "omega")?;
                let values = param_array("tabulated", &params, "j")?;
                let sd = Self::tabulated(omegas, values)?;
                if let Some((min, max)) = declared {
                    let s = sd.support();
                    if min != s.min || max != s.max {
                        return Err(SdError::SupportMismatch { min, max });
                    }
                }
                sd
            }
            other => return Err(SdError::UnknownKind(other.to_owned())),
        };
        Ok(sd)
    }
}

impl Serialize for SpectralDensity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_spec().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpectralDensity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let spec = SdSpec::deserialize(deserializer)?;
        SpectralDensity::from_spec(spec).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn lorentzian_peak_value() {
        let sd = SpectralDensity::lorentzian(1.0, 1.0, 5.0).unwrap();
        assert_relative_eq!(
            sd.evaluate(5.0),
            1.0 / std::f64::consts::PI,
            max_relative = 1e-15
        );
    }

    #[test]
    fn flat_is_constant_with_rectangle_area() {
        let sd = SpectralDensity::flat(0.1, (0.0, 10.0)).unwrap();
        assert_eq!(sd.evaluate(3.0), 0.1);
        assert_eq!(sd.evaluate(-0.01), 0.0);
        assert_eq!(sd.evaluate(10.01), 0.0);
        assert_relative_eq!(sd.integral().unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn lorentzian_integral_approaches_g_squared() {
        let sd = SpectralDensity::lorentzian(2.0, 0.5, 0.0).unwrap();
        let integral = sd.integral().unwrap();
        assert_relative_eq!(integral, 4.0, max_relative = 1e-3);
        // Against the analytic value of the truncated integral.
        let reach = (1.0 / TAIL_FRACTION - 1.0_f64).sqrt();
        let exact = 4.0 * (2.0 / std::f64::consts::PI) * reach.atan();
        assert_relative_eq!(integral, exact, max_relative = 1e-9);
    }

    #[test]
    fn ohmic_integral_matches_gamma_function_value() {
        // ∫_0^∞ α ω e^(−ω/ω_c) dω = α ω_c²; the truncated tail is ~4e−13 of it.
        let sd = SpectralDensity::ohmic(0.3, 2.0).unwrap();
        assert_relative_eq!(sd.integral().unwrap(), 0.3 * 4.0, max_relative = 1e-8);
    }

    #[test]
    fn band_gap_integral_and_edges() {
        let sd = SpectralDensity::band_gap(0.5, 1.0, 9.0).unwrap();
        assert_eq!(sd.evaluate(0.2), 0.0);
        assert_eq!(sd.evaluate(1.0), 0.0); // exactly zero at the edge
        assert_eq!(sd.evaluate(9.5), 0.0);
        assert_relative_eq!(sd.evaluate(5.0), 0.5 * 2.0, max_relative = 1e-15);
        let exact = 2.0 / 3.0 * 0.5 * 8.0_f64.powf(1.5);
        assert_relative_eq!(sd.integral().unwrap(), exact, max_relative = 1e-9);
    }

    #[test]
    fn zero_density_vanishes() {
        let sd = SpectralDensity::zero();
        assert_eq!(sd.evaluate(0.0), 0.0);
        assert_eq!(sd.integral().unwrap(), 0.0);
        assert!(sd.is_vanishing());
    }

    #[test]
    fn tabulated_reproduces_nodes_and_interpolates() {
        let sd = SpectralDensity::tabulated(vec![0.0, 1.0, 3.0], vec![0.5, 1.5, 0.0]).unwrap();
        assert_eq!(sd.evaluate(0.0), 0.5);
        assert_eq!(sd.evaluate(1.0), 1.5);
        assert_eq!(sd.evaluate(3.0), 0.0);
        assert_relative_eq!(sd.evaluate(0.5), 1.0, max_relative = 1e-15);
        assert_relative_eq!(sd.evaluate(2.0), 0.75, max_relative = 1e-15);
        assert_eq!(sd.evaluate(-0.1), 0.0);
        assert_eq!(sd.evaluate(3.1), 0.0);
    }

    #[test]
    fn default_lorentzian_support_hits_tail_fraction() {
        let sd = SpectralDensity::lorentzian(1.0, 2.0, 0.0).unwrap();
        let s = sd.support();
        let edge_ratio = sd.evaluate(s.max * (1.0 - 1e-9)) / sd.max_value();
        assert_abs_diff_eq!(edge_ratio, TAIL_FRACTION, epsilon = 1e-14);
    }

    #[test]
    fn ohmic_default_support_hits_tail_fraction() {
        let sd = SpectralDensity::ohmic(1.0, 3.0).unwrap();
        let s = sd.support();
        let ratio = sd.evaluate(s.max * (1.0 - 1e-12)) / sd.max_value();
        assert_relative_eq!(ratio, TAIL_FRACTION, max_relative = 1e-6);
    }

    #[test]
    fn constructor_validation() {
        assert!(SpectralDensity::lorentzian(0.0, 1.0, 0.0).is_err());
        assert!(SpectralDensity::lorentzian(1.0, -1.0, 0.0).is_err());
        assert!(SpectralDensity::flat(-0.1, (0.0, 1.0)).is_err());
        assert!(SpectralDensity::flat(0.1, (1.0, 1.0)).is_err());
        assert!(SpectralDensity::ohmic(0.1, 0.0).is_err());
        assert!(SpectralDensity::ohmic_with_support(0.1, 1.0, (-1.0, 1.0)).is_err());
        assert!(SpectralDensity::band_gap(1.0, 2.0, 2.0).is_err());
        assert!(SpectralDensity::tabulated(vec![0.0, 1.0], vec![0.1]).is_err());
        assert!(SpectralDensity::tabulated(vec![0.0, 0.0], vec![0.1, 0.1]).is_err());
        assert!(SpectralDensity::tabulated(vec![0.0, 1.0], vec![0.1, -0.1]).is_err());
    }

    #[test]
    fn json_round_trip_every_kind() {
        let sds = [
            SpectralDensity::zero(),
            SpectralDensity::flat(0.25, (-1.0, 4.0)).unwrap(),
            SpectralDensity::lorentzian(1.5, 0.5, 2.0).unwrap(),
            SpectralDensity::lorentzian_with_support(1.5, 0.5, 2.0, (-40.0, 44.0)).unwrap(),
            SpectralDensity::ohmic(0.3, 2.0).unwrap(),
            SpectralDensity::band_gap(0.5, 1.0, 9.0).unwrap(),
            SpectralDensity::tabulated(vec![0.0, 1.0, 2.0], vec![0.1, 0.2, 0.0]).unwrap(),
        ];
        for sd in &sds {
            let json = serde_json::to_string(sd).unwrap();
            let back: SpectralDensity = serde_json::from_str(&json).unwrap();
            assert_eq!(&back, sd, "round trip failed for {json}");
        }
    }

    #[test]
    fn json_shape_is_kind_params_support() {
        let sd = SpectralDensity::lorentzian(1.0, 1.0, 5.0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&serde_json::to_string(&sd).unwrap()).unwrap();
        assert_eq!(v["kind"], "lorentzian");
        assert_eq!(v["params"]["coupling"], 1.0);
        assert!(v["support"].is_array());
    }

    #[test]
    fn json_rejects_unknown_kind_and_bad_params() {
        assert!(serde_json::from_str::<SpectralDensity>(r#"{"kind":"cubic"}"#).is_err());
        assert!(serde_json::from_str::<SpectralDensity>(
            r#"{"kind":"flat","params":{"height":0.1}}"#
        )
        .is_err());
        assert!(serde_json::from_str::<SpectralDensity>(
            r#"{"kind":"lorentzian","params":{"coupling":1.0}}"#
        )
        .is_err());
    }

    fn arbitrary_sd() -> impl Strategy<Value = SpectralDensity> {
        prop_oneof![
            Just(SpectralDensity::zero()),
            (0.0..2.0, -5.0..0.0, 0.1..8.0).prop_map(|(h, lo, w)| {
                SpectralDensity::flat(h, (lo, lo + w)).unwrap()
            }),
            (0.05..3.0, 0.05..2.0, -4.0..4.0).prop_map(|(g, hw, c)| {
                SpectralDensity::lorentzian(g, hw, c).unwrap()
            }),
            (0.0..1.0, 0.2..3.0).prop_map(|(a, wc)| SpectralDensity::ohmic(a, wc).unwrap()),
            (0.0..2.0, -2.0..2.0, 0.1..6.0).prop_map(|(amp, e, w)| {
                SpectralDensity::band_gap(amp, e, e + w).unwrap()
            }),
            proptest::collection::vec(0.0..1.5, 2..40).prop_map(|vals| {
                let omegas: Vec<f64> = (0..vals.len()).map(|i| i as f64 * 0.3 - 1.0).collect();
                SpectralDensity::tabulated(omegas, vals).unwrap()
            }),
        ]
    }

    proptest! {
        #[test]
        fn eval_non_negative_and_support_compliant(sd in arbitrary_sd(), omega in -50.0..50.0_f64) {
            let j = sd.evaluate(omega);
            prop_assert!(j >= 0.0);
            prop_assert!(j.is_finite());
            if !sd.support().contains(omega) {
                prop_assert_eq!(j, 0.0);
            }
        }
    }
}
