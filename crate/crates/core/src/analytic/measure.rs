use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::goldenring::GoldenInt;
use crate::grid::Grid;

use super::random::random_fibonacci_density;

/// A Bragg peak. `exact` holds `x` when the position is `x/√5`, `x ∈ ℤ[τ]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub k: Vec<f64>,
    pub intensity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<GoldenInt>,
}

impl Peak {
    pub fn new_1d(k: f64, intensity: f64) -> Self {
        Peak {
            k: vec![k],
            intensity,
            exact: None,
        }
    }

    /// First coordinate; the position itself in one dimension.
    pub fn position(&self) -> f64 {
        self.k[0]
    }

    pub fn norm(&self) -> f64 {
        self.k.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Absolutely continuous part, given by its density with respect to
/// Lebesgue measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AcDensity {
    Constant { value: f64 },
    /// The random Fibonacci tiling density `h`.
    RandomFibonacci,
    /// Tabulated knots, linearly interpolated between them.
    Sampled { k: Vec<f64>, values: Vec<f64> },
}

impl AcDensity {
    pub fn density(&self, k: f64) -> Result<f64> {
        match self {
            AcDensity::Constant { value } => Ok(*value),
            AcDensity::RandomFibonacci => random_fibonacci_density(k),
            AcDensity::Sampled { k: knots, values } => interpolate(knots, values, k),
        }
    }

    /// Cell means over `grid`. Tabulated densities are read off directly
    /// where a knot coincides with a cell centre.
    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        if let AcDensity::Sampled { k: knots, values } = self {
            let m = grid.oversample() as f64;
            return grid
                .centers()
                .iter()
                .map(|&c| match knots.binary_search_by(|x| x.total_cmp(&c)) {
                    Ok(i) => Ok(values[i]),
                    Err(_) => {
                        let mut s = 0.0;
                        for j in 0..grid.oversample() {
                            let k = c + ((j as f64 + 0.5) / m - 0.5) * grid.cell_width();
                            s += interpolate(knots, values, k)?;
                        }
                        Ok(s / m)
                    }
                })
                .collect();
        }
        grid.sample(|k| self.density(k))
    }
}

fn interpolate(knots: &[f64], values: &[f64], k: f64) -> Result<f64> {
    let outside = || Error::invalid("k", format!("{k} outside the tabulated range"));
    let (first, last) = (*knots.first().ok_or_else(outside)?, *knots.last().ok_or_else(outside)?);
    if k < first || k > last {
        return Err(outside());
    }
    let i = knots.partition_point(|&x| x <= k);
    if i == 0 || i == knots.len() {
        let j = if i == 0 { 0 } else { knots.len() - 1 };
        return Ok(values[j]);
    }
    let (x0, x1) = (knots[i - 1], knots[i]);
    let t = (k - x0) / (x1 - x0);
    Ok(values[i - 1] + t * (values[i] - values[i - 1]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionMethod {
    /// Trapezoidal integration of the depth-`depth` partial Riesz product
    /// over `intervals` equal subintervals of `[0, 1]`.
    Trapezoid { depth: u32, intervals: usize },
    /// Truncated Fourier series with `terms` coefficients estimated from a
    /// word of length `2^word_exponent`.
    FourierSeries { terms: usize, word_exponent: u32 },
}

/// Samples of `F(k) = γ̂([0, k])` on `[0, 1]`.
///
/// `increments[j]` is the mass of `[k_j, k_{j+1}]` as computed, so growth
/// far below the resolution of `values` (cells next to dyadic points can
/// carry masses of order 1e-25) stays visible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionFn {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub increments: Vec<f64>,
    pub method: DistributionMethod,
}

impl DistributionFn {
    /// Builds `F` from the masses of consecutive grid cells.
    pub fn from_cell_masses(grid: Vec<f64>, masses: &[f64], method: DistributionMethod) -> Self {
        assert_eq!(grid.len(), masses.len() + 1);
        let mut values = Vec::with_capacity(grid.len());
        let mut acc = 0.0;
        values.push(0.0);
        for m in masses {
            acc += m;
            values.push(acc);
        }
        DistributionFn {
            grid,
            values,
            increments: masses.to_vec(),
            method,
        }
    }

    /// `F(k)` by linear interpolation.
    pub fn eval(&self, k: f64) -> Result<f64> {
        interpolate(&self.grid, &self.values, k)
    }

    /// Every cell carries positive mass and the sampled values never drop.
    pub fn is_strictly_increasing(&self) -> bool {
        self.increments.iter().all(|&m| m > 0.0) && self.is_nondecreasing()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn max_discrepancy(&self, other: &DistributionFn) -> f64 {
        assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Decomposition of a diffraction measure into pure point, absolutely
/// continuous and singular continuous parts.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub pp: Vec<Peak>,
    pub ac: Option<AcDensity>,
    pub sc: Option<DistributionFn>,
}

impl SpectralMeasure {
    pub fn pure_point(pp: Vec<Peak>) -> Self {
        SpectralMeasure {
            pp,
            ..Default::default()
        }
    }

    pub fn max_intensity(&self) -> f64 {
        self.pp.iter().map(|p| p.intensity).fold(0.0, f64::max)
    }

    pub fn total_intensity(&self) -> f64 {
        self.pp.iter().map(|p| p.intensity).sum()
    }
}

/// Peaks with intensity at least `threshold`, sorted by position.
pub fn threshold_peaks(spectrum: &SpectralMeasure, threshold: f64) -> Result<Vec<Peak>> {
    if !(threshold > 0.0) {
        return Err(Error::invalid("threshold", "must be positive"));
    }
    let mut peaks: Vec<Peak> = spectrum
        .pp
        .iter()
        .filter(|p| p.intensity >= threshold)
        .cloned()
        .collect();
    peaks.sort_by(|p, q| p.k.partial_cmp(&q.k).expect("finite positions"));
    Ok(peaks)
}
