//! Probe-frequency grids.

use serde::{Deserialize, Serialize};

use crate::error::GridError;

/// Strictly increasing list of probe frequencies, at least two of them.
///
/// Every spectrum-like object in the crate (self-energies, scattering spectra,
/// measured data, reconstructions) is sampled on one of these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FrequencyGrid {
    values: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() < 2 {
            return Err(GridError::TooFewPoints(values.len()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(GridError::NonFinite(i));
            }
            if i > 0 && v <= values[i - 1] {
                return Err(GridError::NotIncreasing(i));
            }
        }
        Ok(Self { values })
    }

    /// `count` evenly spaced points from `min` to `max` inclusive.
    pub fn linspace(min: f64, max: f64, count: usize) -> Result<Self, GridError> {
        if count < 2 {
            return Err(GridError::TooFewPoints(count));
        }
        let step = (max - min) / (count - 1) as f64;
        let mut values: Vec<f64> = (0..count).map(|i| min + step * i as f64).collect();
        // Land exactly on the endpoint regardless of rounding in the sweep.
        values[count - 1] = max;
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // len >= 2 by construction
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.values.iter()
    }
}

impl TryFrom<Vec<f64>> for FrequencyGrid {
    type Error = GridError;
    fn try_from(values: Vec<f64>) -> Result<Self, GridError> {
        Self::new(values)
    }
}

impl From<FrequencyGrid> for Vec<f64> {
    fn from(grid: FrequencyGrid) -> Vec<f64> {
        grid.values
    }
}
