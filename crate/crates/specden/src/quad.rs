//! Adaptive Gauss–Kronrod quadrature and Cauchy principal values.
//!
//! The 21-point Kronrod rule with the embedded 10-point Gauss rule supplies
//! the per-panel value and error estimate; an error-ordered worklist splits
//! the worst panel until the global tolerance is met. Principal values are
//! reduced to ordinary integrals by subtracting the singular numerator and
//! adding the analytic logarithm of the remaining simple pole.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::QuadratureFailure;

/// Default relative tolerance used throughout the crate.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Evaluation points may not sit closer to a panel endpoint than this
/// fraction of the panel width; principal-value poles are clamped away from
/// the integration endpoints by the same fraction of the full interval.
pub const ENDPOINT_CLAMP: f64 = 1e-12;

// 21-point Kronrod abscissae on [0, 1] (symmetric about the centre).
// Odd-indexed entries are the embedded 10-point Gauss abscissae.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One converged sub-interval of an adaptive run.
#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub lower: f64,
    pub upper: f64,
    pub value: f64,
    pub error: f64,
}

/// Result of an adaptive integration.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    /// Final panel decomposition, sorted by lower edge. Callers that reuse
    /// the integrand (e.g. to attach oscillatory factors) can start from it.
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lower: f64,
    upper: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap by error; ties broken by position so pops are deterministic.
        self.error
            .total_cmp(&other.error)
            .then(self.lower.total_cmp(&other.lower))
            .then(self.upper.total_cmp(&other.upper))
    }
}

/// The 21 Kronrod abscissae and weights mapped onto [lower, upper];
/// Σ w·f(x) over the pairs reproduces the panel value of `gk21`. Used to
/// freeze a fixed-node representation of an integrand (e.g. before attaching
/// per-time oscillatory factors).
pub fn kronrod_nodes(lower: f64, upper: f64) -> [(f64, f64); 21] {
    let centre = 0.5 * (lower + upper);
    let half = 0.5 * (upper - lower);
    let mut out = [(0.0, 0.0); 21];
    out[0] = (centre, WGK[10] * half);
    for j in 0..10 {
        let dx = half * XGK[j];
        out[2 * j + 1] = (centre - dx, WGK[j] * half);
        out[2 * j + 2] = (centre + dx, WGK[j] * half);
    }
    out
}

/// 21-point Kronrod rule on [lower, upper]: (value, error estimate).
fn gk21<F: Fn(f64) -> f64>(f: &F, lower: f64, upper: f64) -> (f64, f64) {
    let centre = 0.5 * (lower + upper);
    let half = 0.5 * (upper - lower);

    let fc = f(centre);
    let mut resk = WGK[10] * fc;
    let mut resabs = WGK[10] * fc.abs();
    let mut resg = 0.0;
    let mut fv = [0.0_f64; 21]; // [pairs..., centre] for the asc pass

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    fv[20] = fc;

    let reskh = resk * 0.5;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv[2 * j] - reskh).abs() + (fv[2 * j + 1] - reskh).abs());
    }

    let value = resk * half;
    let err = rescale_error(
        (resk - resg) * half,
        resabs * half.abs(),
        resasc * half.abs(),
    );
    (value, err)
}

fn rescale_error(err: f64, result_abs: f64, result_asc: f64) -> f64 {
    let mut err = err.abs();
    if result_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / result_asc).powf(1.5);
        err = if scale < 1.0 { result_asc * scale } else { result_asc };
    }
    if result_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * result_abs;
        if min_err > err {
            err = min_err;
        }
    }
    err
}

/// Adaptive integration of `f` over `[lower, upper]`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    upper: f64,
    eps_abs: f64,
    eps_rel: f64,
    max_panels: usize,
) -> Result<Quadrature, QuadratureFailure> {
    integrate_segmented(f, &[lower, upper], eps_abs, eps_rel, max_panels)
}

/// Adaptive integration seeded with explicit panel boundaries.
///
/// `breakpoints` must contain at least two finite values; they are sorted and
/// deduplicated. Seeding panels at known feature locations (peaks, kinks,
/// support edges) is what lets narrow structures survive inside intervals
/// many orders of magnitude wider.
pub fn integrate_segmented<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    eps_abs: f64,
    eps_rel: f64,
    max_panels: usize,
) -> Result<Quadrature, QuadratureFailure> {
    let mut edges: Vec<f64> = breakpoints.iter().copied().filter(|x| x.is_finite()).collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    assert!(edges.len() >= 2, "need at least two distinct breakpoints");
    let lower = edges[0];
    let upper = *edges.last().unwrap();

    let mut active: BinaryHeap<Panel> = BinaryHeap::new();
    let mut finished: Vec<Panel> = Vec::new(); // too narrow to split further
    let mut panels = 0usize;
    // A non-finite sample can never be refined away, and letting it through
    // would poison the running sums while every comparison against them goes
    // quiet, so it fails the whole integral immediately.
    let non_finite = |panels: usize| QuadratureFailure {
        lower,
        upper,
        error: f64::INFINITY,
        tolerance: eps_abs,
        panels,
    };
    for pair in edges.windows(2) {
        let (value, error) = gk21(&f, pair[0], pair[1]);
        if !value.is_finite() || !error.is_finite() {
            return Err(non_finite(panels));
        }
        active.push(Panel {
            lower: pair[0],
            upper: pair[1],
            value,
            error,
        });
        panels += 1;
    }

    // Splits that neither move the value nor shrink the error estimate mean
    // the integrand is evaluated at roundoff-limited resolution; after a few
    // such strikes further refinement is pointless and the achieved error is
    // reported instead (the caller reads it from `Quadrature::error`).
    const ROUNDOFF_STRIKE_LIMIT: usize = 10;
    let mut roundoff_strikes = 0usize;

    loop {
        let value: f64 = active.iter().chain(finished.iter()).map(|p| p.value).sum();
        let error: f64 = active.iter().chain(finished.iter()).map(|p| p.error).sum();
        let tolerance = eps_abs.max(eps_rel * value.abs());
        if error <= tolerance || roundoff_strikes >= ROUNDOFF_STRIKE_LIMIT {
            let mut segments: Vec<Segment> = active
                .iter()
                .chain(finished.iter())
                .map(|p| Segment {
                    lower: p.lower,
                    upper: p.upper,
                    value: p.value,
                    error: p.error,
                })
                .collect();
            segments.sort_by(|s, t| s.lower.total_cmp(&t.lower));
            return Ok(Quadrature {
                value,
                error,
                segments,
            });
        }

        let worst = match active.pop() {
            Some(p) => p,
            None => {
                return Err(QuadratureFailure {
                    lower,
                    upper,
                    error,
                    tolerance,
                    panels,
                })
            }
        };
        let width_floor =
            100.0 * f64::EPSILON * (worst.lower.abs() + worst.upper.abs()) + f64::MIN_POSITIVE;
        if worst.upper - worst.lower <= width_floor || panels >= max_panels {
            if panels >= max_panels {
                return Err(QuadratureFailure {
                    lower,
                    upper,
                    error,
                    tolerance,
                    panels,
                });
            }
            finished.push(worst);
            continue;
        }

        let mid = 0.5 * (worst.lower + worst.upper);
        let (v1, e1) = gk21(&f, worst.lower, mid);
        let (v2, e2) = gk21(&f, mid, worst.upper);
        if !(v1 + v2).is_finite() || !(e1 + e2).is_finite() {
            return Err(non_finite(panels));
        }
        if (v1 + v2 - worst.value).abs() <= 1e-5 * (v1 + v2).abs()
            && e1 + e2 >= 0.99 * worst.error
        {
            roundoff_strikes += 1;
        }
        active.push(Panel {
            lower: worst.lower,
            upper: mid,
            value: v1,
            error: e1,
        });
        active.push(Panel {
            lower: mid,
            upper: worst.upper,
            value: v2,
            error: e2,
        });
        panels += 1;
    }
}

/// Cauchy principal value of `∫ f(x) / (pole - x) dx` over `[lower, upper]`.
///
/// With the pole strictly inside, the singularity is subtracted:
///
/// ```text
/// PV ∫ f(x)/(p-x) dx = ∫ [f(x) - f(p)]/(p-x) dx + f(p) · ln|(p-a)/(b-p)|
/// ```
///
/// The remaining integrand is a divided difference, continuous wherever `f`
/// is differentiable. A pole outside the interval leaves a proper integral
/// (the subtraction constant is taken as zero there, matching integrands
/// that vanish outside `[lower, upper]`). Poles within `ENDPOINT_CLAMP`
/// of an endpoint, inside or outside, are clamped to that distance so the
/// logarithm stays representable; a pole exactly on an endpoint is treated
/// as inside.
pub fn principal_value<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    upper: f64,
    pole: f64,
    extra_breakpoints: &[f64],
    eps_abs: f64,
    eps_rel: f64,
    max_panels: usize,
) -> Result<f64, QuadratureFailure> {
    assert!(lower < upper, "empty interval");
    let delta = ENDPOINT_CLAMP * (upper - lower);
    let pole = clamp_pole(pole, lower, upper, delta);

    let mut edges: Vec<f64> = vec![lower, upper];
    edges.extend(
        extra_breakpoints
            .iter()
            .copied()
            .filter(|x| *x > lower && *x < upper),
    );

    if pole > lower && pole < upper {
        let f_at = f(pole);
        edges.push(pole);
        // The pole is a panel edge, so interior nodes stay clear of it except
        // on panels a few hundred ulps wide, where a node can round exactly
        // onto it. The removable-singularity sample there is worth at most
        // |f'| times the panel width, so zero stands in safely.
        let quad = integrate_segmented(
            |x| {
                if x == pole {
                    0.0
                } else {
                    (f(x) - f_at) / (pole - x)
                }
            },
            &edges,
            eps_abs,
            eps_rel,
            max_panels,
        )?;
        Ok(quad.value + f_at * ((pole - lower) / (upper - pole)).ln())
    } else {
        // Proper integral, but when the pole hugs an endpoint the integrand
        // has a boundary layer of that thickness; a geometric ladder of
        // panels growing away from the near endpoint resolves it in
        // O(log(width/distance)) panels instead of thousands of bisections.
        let (near, inward) = if pole <= lower {
            (lower, 1.0)
        } else {
            (upper, -1.0)
        };
        let width = upper - lower;
        let mut off = (pole - near).abs().max(delta);
        while off < width {
            let candidate = near + inward * off;
            if candidate > lower && candidate < upper {
                edges.push(candidate);
            }
            off *= 4.0;
        }
        // Same ulp-rounding hazard when the clamped pole sits on an endpoint.
        let quad = integrate_segmented(
            |x| if x == pole { 0.0 } else { f(x) / (pole - x) },
            &edges,
            eps_abs,
            eps_rel,
            max_panels,
        )?;
        Ok(quad.value)
    }
}

fn clamp_pole(pole: f64, lower: f64, upper: f64, delta: f64) -> f64 {
    if (pole - lower).abs() < delta {
        if pole < lower {
            lower - delta
        } else {
            lower + delta
        }
    } else if (upper - pole).abs() < delta {
        if pole > upper {
            upper + delta
        } else {
            upper - delta
        }
    } else {
        pole
    }
}
