//! Plain CSV readers and writers for every on-disk format the pipeline
//! touches. Numbers are written with the shortest round-trip formatting,
//! so save/load cycles are lossless and identical inputs give byte-for-byte
//! identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dynamics::EmissionHistory;
use crate::error::FormatError;
use crate::grid::FrequencyGrid;
use crate::reconstruct::{MeasuredSpectrum, PointFlag, ReconstructionResult};
use crate::scattering::ScatteringSpectrum;

pub const SPECTRUM_HEADER: &str = "omega,re_r,im_r,re_t,im_t,R,T,A";
pub const MEASURED_HEADER: &str = "omega,R,T";
pub const MEASURED_SIGMA_HEADER: &str = "omega,R,T,sigma_R,sigma_T";
pub const RECONSTRUCTION_HEADER: &str = "omega,J,flag";
pub const RECONSTRUCTION_SIGMA_HEADER: &str = "omega,J,flag,sigma_J";
pub const FLATNESS_HEADER: &str = "omega,f";
pub const HISTORY_HEADER: &str = "t,re_eps,im_eps,abs2";
pub const ORACLE_HEADER: &str = "t,abs_inversion,abs_pseudomode,abs_discrete";
pub const TABULATED_HEADER: &str = "omega,J";

fn io_err(path: &Path, source: std::io::Error) -> FormatError {
    FormatError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), FormatError> {
    fs::write(path, content).map_err(|e| io_err(path, e))
}

/// Full scattering output: complex amplitudes plus the derived intensities.
pub fn write_spectrum_csv(path: &Path, s: &ScatteringSpectrum) -> Result<(), FormatError> {
    let mut out = String::from(SPECTRUM_HEADER);
    out.push('\n');
    for i in 0..s.len() {
        let (r, t) = (s.reflection()[i], s.transmission()[i]);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.grid().values()[i],
            r.re,
            r.im,
            t.re,
            t.im,
            s.reflectance(i),
            s.transmittance(i),
            s.absorbance(i)
        )
        .unwrap();
    }
    write_file(path, &out)
}

/// Intensity-only spectrum, with uncertainty columns when present.
pub fn write_measured_csv(path: &Path, ms: &MeasuredSpectrum) -> Result<(), FormatError> {
    let sigmas = ms.sigma_r().zip(ms.sigma_t());
    let mut out = String::from(if sigmas.is_some() {
        MEASURED_SIGMA_HEADER
    } else {
        MEASURED_HEADER
    });
    out.push('\n');
    for i in 0..ms.len() {
        match sigmas {
            Some((sr, st)) => writeln!(
                out,
                "{},{},{},{},{}",
                ms.grid().values()[i],
                ms.reflectances()[i],
                ms.transmittances()[i],
                sr[i],
                st[i]
            )
            .unwrap(),
            None => writeln!(
                out,
                "{},{},{}",
                ms.grid().values()[i],
                ms.reflectances()[i],
                ms.transmittances()[i]
            )
            .unwrap(),
        }
    }
    write_file(path, &out)
}

/// Splits a data line, tolerating a trailing carriage return.
fn fields(line: &str) -> Vec<&str> {
    line.strip_suffix('\r').unwrap_or(line).split(',').collect()
}

fn parse_number(
    path: &Path,
    line_no: usize,
    field: &str,
) -> Result<f64, FormatError> {
    field.trim().parse().map_err(|_| FormatError::BadNumber {
        path: path.display().to_string(),
        line: line_no,
        field: field.to_string(),
    })
}

/// Reads intensities from any of the three spectrum layouts: bare
/// `omega,R,T`, the same with uncertainty columns, or the full amplitude
/// format that the forward pass writes. The last case means a simulated
/// spectrum feeds the inverse path with no conversion step.
pub fn read_measured_csv(path: &Path) -> Result<MeasuredSpectrum, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    let header = match lines.next() {
        Some((_, h)) => h.strip_suffix('\r').unwrap_or(h),
        None => {
            return Err(FormatError::Empty {
                path: path.display().to_string(),
            })
        }
    };
    enum Layout {
        Bare,
        Sigma,
        Amplitudes,
    }
    let (layout, expected) = match header {
        MEASURED_HEADER => (Layout::Bare, 3),
        MEASURED_SIGMA_HEADER => (Layout::Sigma, 5),
        SPECTRUM_HEADER => (Layout::Amplitudes, 8),
        other => {
            return Err(FormatError::Header {
                path: path.display().to_string(),
                found: other.to_string(),
            })
        }
    };
    let mut omegas = Vec::new();
    let mut r_values = Vec::new();
    let mut t_values = Vec::new();
    let mut sigma_r = Vec::new();
    let mut sigma_t = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let cols = fields(line);
        if cols.len() != expected {
            return Err(FormatError::FieldCount {
                path: path.display().to_string(),
                line: line_no,
                expected,
                found: cols.len(),
            });
        }
        omegas.push(parse_number(path, line_no, cols[0])?);
        match layout {
            Layout::Bare => {
                r_values.push(parse_number(path, line_no, cols[1])?);
                t_values.push(parse_number(path, line_no, cols[2])?);
            }
            Layout::Sigma => {
                r_values.push(parse_number(path, line_no, cols[1])?);
                t_values.push(parse_number(path, line_no, cols[2])?);
                sigma_r.push(parse_number(path, line_no, cols[3])?);
                sigma_t.push(parse_number(path, line_no, cols[4])?);
            }
            Layout::Amplitudes => {
                r_values.push(parse_number(path, line_no, cols[5])?);
                t_values.push(parse_number(path, line_no, cols[6])?);
            }
        }
    }
    if omegas.is_empty() {
        return Err(FormatError::Empty {
            path: path.display().to_string(),
        });
    }
    let grid = FrequencyGrid::new(omegas).map_err(|source| FormatError::Grid {
        path: path.display().to_string(),
        source,
    })?;
    let built = if matches!(layout, Layout::Sigma) {
        MeasuredSpectrum::with_uncertainty(grid, r_values, t_values, sigma_r, sigma_t)
    } else {
        MeasuredSpectrum::new(grid, r_values, t_values)
    };
    built.map_err(|source| FormatError::Spectrum {
        path: path.display().to_string(),
        source,
    })
}

/// Reconstructed density with per-point flags, uncertainties when known.
pub fn write_reconstruction_csv(
    path: &Path,
    rec: &ReconstructionResult,
) -> Result<(), FormatError> {
    let mut out = String::from(if rec.sigma_j().is_some() {
        RECONSTRUCTION_SIGMA_HEADER
    } else {
        RECONSTRUCTION_HEADER
    });
    out.push('\n');
    for i in 0..rec.len() {
        match rec.sigma_j() {
            Some(sj) => writeln!(
                out,
                "{},{},{},{}",
                rec.grid().values()[i],
                rec.j_values()[i],
                rec.flags()[i].as_token(),
                sj[i]
            )
            .unwrap(),
            None => writeln!(
                out,
                "{},{},{}",
                rec.grid().values()[i],
                rec.j_values()[i],
                rec.flags()[i].as_token()
            )
            .unwrap(),
        }
    }
    write_file(path, &out)
}

/// Reads a reconstruction back, mostly so round-trip tests and downstream
/// fitting scripts do not have to reparse by hand.
pub fn read_reconstruction_csv(
    path: &Path,
) -> Result<(FrequencyGrid, Vec<f64>, Vec<PointFlag>, Option<Vec<f64>>), FormatError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    let header = match lines.next() {
        Some((_, h)) => h.strip_suffix('\r').unwrap_or(h),
        None => {
            return Err(FormatError::Empty {
                path: path.display().to_string(),
            })
        }
    };
    let (with_sigma, expected) = match header {
        RECONSTRUCTION_HEADER => (false, 3),
        RECONSTRUCTION_SIGMA_HEADER => (true, 4),
        other => {
            return Err(FormatError::Header {
                path: path.display().to_string(),
                found: other.to_string(),
            })
        }
    };
    let mut omegas = Vec::new();
    let mut j_values = Vec::new();
    let mut flags = Vec::new();
    let mut sigma_j = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let cols = fields(line);
        if cols.len() != expected {
            return Err(FormatError::FieldCount {
                path: path.display().to_string(),
                line: line_no,
                expected,
                found: cols.len(),
            });
        }
        omegas.push(parse_number(path, line_no, cols[0])?);
        j_values.push(parse_number(path, line_no, cols[1])?);
        flags.push(PointFlag::from_token(cols[2].trim()).ok_or_else(|| {
            FormatError::BadFlag {
                path: path.display().to_string(),
                line: line_no,
                token: cols[2].to_string(),
            }
        })?);
        if with_sigma {
            sigma_j.push(parse_number(path, line_no, cols[3])?);
        }
    }
    if omegas.is_empty() {
        return Err(FormatError::Empty {
            path: path.display().to_string(),
        });
    }
    let grid = FrequencyGrid::new(omegas).map_err(|source| FormatError::Grid {
        path: path.display().to_string(),
        source,
    })?;
    Ok((grid, j_values, flags, with_sigma.then_some(sigma_j)))
}

/// Flatness profile; NaN marks points below the reflectance floor.
pub fn write_flatness_csv(
    path: &Path,
    grid: &FrequencyGrid,
    f_values: &[f64],
) -> Result<(), FormatError> {
    assert_eq!(grid.len(), f_values.len(), "grid/profile length mismatch");
    let mut out = String::from(FLATNESS_HEADER);
    out.push('\n');
    for (omega, f) in grid.iter().zip(f_values) {
        writeln!(out, "{},{}", omega, f).unwrap();
    }
    write_file(path, &out)
}

/// Emission amplitude over time with the population as a derived column.
pub fn write_history_csv(path: &Path, h: &EmissionHistory) -> Result<(), FormatError> {
    let mut out = String::from(HISTORY_HEADER);
    out.push('\n');
    for i in 0..h.len() {
        let a = h.amplitudes()[i];
        writeln!(out, "{},{},{},{}", h.times()[i], a.re, a.im, a.norm_sqr()).unwrap();
    }
    write_file(path, &out)
}

/// Side-by-side moduli of the three independent emission solvers.
pub fn write_oracle_csv(
    path: &Path,
    inversion: &EmissionHistory,
    pseudomode: &EmissionHistory,
    discrete: &EmissionHistory,
) -> Result<(), FormatError> {
    assert_eq!(inversion.len(), pseudomode.len(), "history length mismatch");
    assert_eq!(inversion.len(), discrete.len(), "history length mismatch");
    let mut out = String::from(ORACLE_HEADER);
    out.push('\n');
    for i in 0..inversion.len() {
        writeln!(
            out,
            "{},{},{},{}",
            inversion.times()[i],
            inversion.modulus(i),
            pseudomode.modulus(i),
            discrete.modulus(i)
        )
        .unwrap();
    }
    write_file(path, &out)
}

/// Sampled density table, the input format for tabulated reservoirs.
pub fn write_tabulated_csv(
    path: &Path,
    omegas: &[f64],
    values: &[f64],
) -> Result<(), FormatError> {
    assert_eq!(omegas.len(), values.len(), "column length mismatch");
    let mut out = String::from(TABULATED_HEADER);
    out.push('\n');
    for (omega, j) in omegas.iter().zip(values) {
        writeln!(out, "{},{}", omega, j).unwrap();
    }
    write_file(path, &out)
}

/// Reads a sampled density table.
pub fn read_tabulated_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), FormatError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    let header = match lines.next() {
        Some((_, h)) => h.strip_suffix('\r').unwrap_or(h),
        None => {
            return Err(FormatError::Empty {
                path: path.display().to_string(),
            })
        }
    };
    if header != TABULATED_HEADER {
        return Err(FormatError::Header {
            path: path.display().to_string(),
            found: header.to_string(),
        });
    }
    let mut omegas = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let cols = fields(line);
        if cols.len() != 2 {
            return Err(FormatError::FieldCount {
                path: path.display().to_string(),
                line: line_no,
                expected: 2,
                found: cols.len(),
            });
        }
        omegas.push(parse_number(path, line_no, cols[0])?);
        values.push(parse_number(path, line_no, cols[1])?);
    }
    if omegas.is_empty() {
        return Err(FormatError::Empty {
            path: path.display().to_string(),
        });
    }
    Ok((omegas, values))
}
