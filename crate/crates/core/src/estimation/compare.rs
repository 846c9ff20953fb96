use serde::{Deserialize, Serialize};

use crate::analytic::{AcDensity, Peak, SpectralMeasure};
use crate::error::{Error, Result};

use super::periodogram::{DiffractionEstimate, Normalization};

/// Relative position tolerance when matching grid points to peaks.
pub const PEAK_MATCH_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `Σ|e − r| / Σ|r|`.
    L1Rel,
    /// `max |e − r| / |r|`.
    MaxRel,
}

/// `[lo, hi]` minus closed exclusion intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub exclusions: Vec<(f64, f64)>,
}

impl Region {
    pub fn new(lo: f64, hi: f64) -> Self {
        Region {
            lo,
            hi,
            exclusions: Vec::new(),
        }
    }

    pub fn excluding(mut self, lo: f64, hi: f64) -> Self {
        self.exclusions.push((lo, hi));
        self
    }

    pub fn contains(&self, k: f64) -> bool {
        k >= self.lo && k <= self.hi && !self.exclusions.iter().any(|&(a, b)| k >= a && k <= b)
    }
}

/// Scalar distance between an estimate and the matching component of a
/// reference: Bragg estimates against `pp` at peak positions only,
/// density estimates against cell means of `ac`.
pub fn compare(
    estimate: &DiffractionEstimate,
    reference: &SpectralMeasure,
    region: &Region,
    metric: Metric,
) -> Result<f64> {
    let centers = estimate.grid.centers();
    let cells: Vec<usize> = (0..centers.len()).filter(|&i| region.contains(centers[i])).collect();
    let pairs: Vec<(f64, f64)> = match estimate.normalization {
        Normalization::VolumeSquared => {
            let mut peaks: Vec<&Peak> = reference.pp.iter().filter(|p| p.k.len() == 1).collect();
            peaks.sort_by(|a, b| a.k[0].total_cmp(&b.k[0]));
            cells
                .iter()
                .filter_map(|&i| {
                    let k = centers[i];
                    let tol = PEAK_MATCH_TOLERANCE * k.abs().max(1.0);
                    let j = peaks.partition_point(|p| p.k[0] < k - tol);
                    peaks
                        .get(j)
                        .filter(|p| p.k[0] <= k + tol)
                        .map(|p| (estimate.values[i], p.intensity))
                })
                .collect()
        }
        Normalization::Volume => {
            let ac = reference.ac.as_ref().ok_or_else(|| {
                Error::invalid("reference", "density estimates need an absolutely continuous part")
            })?;
            let sub = estimate.grid.subset(&cells);
            let reference = ac.sample(&sub)?;
            cells.iter().map(|&i| estimate.values[i]).zip(reference).collect()
        }
    };
    if pairs.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    let value = match metric {
        Metric::L1Rel => {
            let num: f64 = pairs.iter().map(|(e, r)| (e - r).abs()).sum();
            let den: f64 = pairs.iter().map(|(_, r)| r.abs()).sum();
            num / den
        }
        Metric::MaxRel => pairs
            .iter()
            .map(|(e, r)| (e - r).abs() / r.abs())
            .fold(0.0, f64::max),
    };
    if value.is_nan() {
        return Err(Error::invalid("reference", "vanishes on the compared region"));
    }
    Ok(value)
}

/// An estimate viewed as a reference measure: Bragg estimates become
/// peaks, density estimates a tabulated density.
pub fn estimate_as_reference(estimate: &DiffractionEstimate) -> SpectralMeasure {
    let k = estimate.grid.centers();
    match estimate.normalization {
        Normalization::VolumeSquared => SpectralMeasure::pure_point(
            k.iter()
                .zip(&estimate.values)
                .map(|(&k, &v)| Peak::new_1d(k, v))
                .collect(),
        ),
        Normalization::Volume => SpectralMeasure {
            pp: Vec::new(),
            ac: Some(AcDensity::Sampled {
                k: k.to_vec(),
                values: estimate.values.clone(),
            }),
            sc: None,
        },
    }
}
