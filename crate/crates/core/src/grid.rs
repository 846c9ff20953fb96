//! Wavenumber grids.
//!
//! A grid is a list of strictly increasing centres. A cell grid additionally
//! averages every quantity over `oversample` equally spaced midpoint
//! sub-points across each cell, so noisy estimators and spiky densities
//! are compared as cell masses rather than point values.
//!
//! The midpoint rule only integrates lags below `oversample / cell_width`
//! exactly. For substitution sequences over base 2 keep the sub-points off
//! the dyadic rationals (an odd `oversample`), or their strong
//! correlations at lags `2^j` alias into every cell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    centers: Vec<f64>,
    /// Zero for point grids.
    cell_width: f64,
    oversample: usize,
}

impl Grid {
    /// Point evaluation at the given wavenumbers.
    pub fn points(centers: Vec<f64>) -> Result<Self> {
        check_increasing(&centers)?;
        Ok(Grid {
            centers,
            cell_width: 0.0,
            oversample: 1,
        })
    }

    /// `n ≥ 2` equally spaced points from `lo` to `hi` inclusive.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid("grid", "need n ≥ 2 and finite lo < hi"));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let mut centers: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
        centers[n - 1] = hi;
        Grid::points(centers)
    }

    /// `n` cells partitioning `[lo, hi]`, each averaged over `oversample`
    /// sub-points.
    pub fn cells(lo: f64, hi: f64, n: usize, oversample: usize) -> Result<Self> {
        if n == 0 || oversample == 0 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(
                "grid",
                "need n ≥ 1 cells, oversample ≥ 1 and finite lo < hi",
            ));
        }
        let width = (hi - lo) / n as f64;
        let centers = (0..n).map(|i| lo + (i as f64 + 0.5) * width).collect();
        let grid = Grid {
            centers,
            cell_width: width,
            oversample,
        };
        check_increasing(&grid.centers)?;
        Ok(grid)
    }

    /// The cells with the given (increasing) indices.
    pub fn subset(&self, indices: &[usize]) -> Grid {
        Grid {
            centers: indices.iter().map(|&i| self.centers[i]).collect(),
            cell_width: self.cell_width,
            oversample: self.oversample,
        }
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn cell_width(&self) -> f64 {
        self.cell_width
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// All evaluation points, cell by cell.
    pub fn sample_points(&self) -> Vec<f64> {
        if self.oversample == 1 {
            return self.centers.clone();
        }
        let m = self.oversample as f64;
        self.centers
            .iter()
            .flat_map(|&c| {
                (0..self.oversample)
                    .map(move |j| c + ((j as f64 + 0.5) / m - 0.5) * self.cell_width)
            })
            .collect()
    }

    /// Collapses values at [`Grid::sample_points`] into cell means.
    pub fn average(&self, samples: &[f64]) -> Vec<f64> {
        assert_eq!(samples.len(), self.centers.len() * self.oversample);
        samples
            .chunks(self.oversample)
            .map(|c| c.iter().sum::<f64>() / self.oversample as f64)
            .collect()
    }

    /// Evaluates `f` at every sub-point and averages per cell.
    pub fn sample<F>(&self, f: F) -> Result<Vec<f64>>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let values = self
            .sample_points()
            .into_iter()
            .map(f)
            .collect::<Result<Vec<_>>>()?;
        Ok(self.average(&values))
    }
}

fn check_increasing(ks: &[f64]) -> Result<()> {
    if ks.iter().any(|k| !k.is_finite()) {
        return Err(Error::invalid("grid", "wavenumbers must be finite"));
    }
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("grid", "wavenumbers must be strictly increasing"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_cover_interval() {
        let g = Grid::cells(0.0, 1.0, 4, 2).unwrap();
        assert_eq!(g.centers(), &[0.125, 0.375, 0.625, 0.875]);
        assert_eq!(
            g.sample_points(),
            vec![0.0625, 0.1875, 0.3125, 0.4375, 0.5625, 0.6875, 0.8125, 0.9375]
        );
        let avg = g.sample(|k| Ok(k)).unwrap();
        for (a, c) in avg.iter().zip(g.centers()) {
            assert!((a - c).abs() < 1e-15);
        }
    }

    #[test]
    fn linspace_endpoints() {
        let g = Grid::linspace(-1.0, 2.0, 4).unwrap();
        assert_eq!(g.centers(), &[-1.0, 0.0, 1.0, 2.0]);
        assert_eq!(g.sample_points(), g.centers());
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::points(vec![0.0, 0.0]).is_err());
        assert!(Grid::points(vec![0.0, f64::NAN]).is_err());
        assert!(Grid::cells(1.0, 0.0, 3, 1).is_err());
        assert!(Grid::cells(0.0, 1.0, 3, 0).is_err());
        assert!(Grid::linspace(0.0, 1.0, 1).is_err());
    }
}
