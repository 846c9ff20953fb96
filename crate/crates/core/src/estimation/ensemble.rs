use serde::{Deserialize, Serialize};

use crate::comb::WeightedComb;
use crate::error::{Error, Result};
use crate::generators::{
    gen_bernoulli, gen_random_fibonacci_tiling, gen_rs_bernoulli, gen_rudin_shapiro, RandomSpec,
};
use crate::grid::Grid;
use crate::seeding::{derive_seed, splitmix64};

use super::periodogram::{periodogram_samples, DiffractionEstimate, Normalization};

/// Rudin–Shapiro windows start at a seed-dependent offset in
/// `[−2^39, 2^39)`, so deterministic sequences also form an ensemble.
const OFFSET_BITS: u32 = 40;

/// A family of random (or randomly placed) combs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "kebab-case")]
pub enum EnsembleSpec {
    /// i.i.d. ±1 weights on `0..len`.
    Bernoulli { p: f64, len: usize },
    /// A window of `len` consecutive Rudin–Shapiro weights.
    RudinShapiro { len: usize },
    /// Rudin–Shapiro weights times i.i.d. signs on a random window.
    RsBernoulli { p: f64, len: usize },
    /// `count` tiles of a random Fibonacci tiling.
    RandomFibonacci { p: f64, count: usize },
}

fn window_offset(seed: u64) -> i64 {
    (splitmix64(seed) >> (64 - OFFSET_BITS)) as i64 - (1i64 << (OFFSET_BITS - 1))
}

fn window(start: i64, len: usize) -> Result<(i64, i64)> {
    if len == 0 {
        return Err(Error::invalid("len", "need at least one point"));
    }
    let end = i64::try_from(len - 1)
        .ok()
        .and_then(|l| start.checked_add(l))
        .ok_or(Error::Overflow("window"))?;
    Ok((start, end))
}

impl EnsembleSpec {
    /// The realization drawn with `seed`.
    pub fn realize(&self, seed: u64) -> Result<WeightedComb> {
        match *self {
            EnsembleSpec::Bernoulli { p, len } => gen_bernoulli(&RandomSpec::new(seed, p)?, window(0, len)?),
            EnsembleSpec::RudinShapiro { len } => gen_rudin_shapiro(window(window_offset(seed), len)?),
            EnsembleSpec::RsBernoulli { p, len } => {
                gen_rs_bernoulli(&RandomSpec::new(seed, p)?, window(window_offset(seed), len)?)
            }
            EnsembleSpec::RandomFibonacci { p, count } => {
                gen_random_fibonacci_tiling(&RandomSpec::new(seed, p)?, count)
            }
        }
    }
}

/// Mean over `realizations` periodograms; realization `i` uses
/// `derive_seed(master_seed, i)`. Sums run in realization order.
pub fn ensemble_periodogram(
    spec: &EnsembleSpec,
    master_seed: u64,
    grid: &Grid,
    realizations: usize,
    normalization: Normalization,
) -> Result<DiffractionEstimate> {
    if realizations == 0 {
        return Err(Error::invalid("realizations", "need at least one"));
    }
    let mut acc = vec![0.0; grid.len() * grid.oversample()];
    let mut volume = 0.0;
    for i in 0..realizations {
        let comb = spec.realize(derive_seed(master_seed, i as u64))?;
        volume += comb.volume();
        for (a, v) in acc.iter_mut().zip(periodogram_samples(&comb, grid, normalization)?) {
            *a += v;
        }
    }
    let r = realizations as f64;
    let mean: Vec<f64> = acc.iter().map(|a| a / r).collect();
    Ok(DiffractionEstimate {
        grid: grid.clone(),
        values: grid.average(&mean),
        normalization,
        volume: volume / r,
        realizations,
        master_seed: Some(master_seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::periodogram::periodogram;

    #[test]
    fn single_realization_is_a_periodogram() {
        let spec = EnsembleSpec::RsBernoulli { p: 0.25, len: 512 };
        let grid = Grid::cells(0.0, 1.0, 8, 4).unwrap();
        let e = ensemble_periodogram(&spec, 99, &grid, 1, Normalization::Volume).unwrap();
        let comb = spec.realize(derive_seed(99, 0)).unwrap();
        let p = periodogram(&comb, &grid, Normalization::Volume).unwrap();
        assert_eq!(e.values, p.values);
        assert_eq!(e.realizations, 1);
    }

    #[test]
    fn bernoulli_ensemble_is_flat() {
        let spec = EnsembleSpec::Bernoulli { p: 0.5, len: 1 << 12 };
        let grid = Grid::cells(0.0, 1.0, 4, 32).unwrap();
        let e = ensemble_periodogram(&spec, 5, &grid, 20, Normalization::Volume).unwrap();
        let mean = e.values.iter().sum::<f64>() / e.values.len() as f64;
        assert!((mean - 1.0).abs() < 0.05, "{mean}");
    }

    #[test]
    fn realizations_are_reproducible() {
        for spec in [
            EnsembleSpec::Bernoulli { p: 0.5, len: 100 },
            EnsembleSpec::RudinShapiro { len: 100 },
            EnsembleSpec::RsBernoulli { p: 0.3, len: 100 },
            EnsembleSpec::RandomFibonacci { p: 0.6, count: 100 },
        ] {
            assert_eq!(spec.realize(17).unwrap(), spec.realize(17).unwrap());
            assert_ne!(spec.realize(17).unwrap(), spec.realize(18).unwrap());
        }
        assert!(EnsembleSpec::Bernoulli { p: 0.5, len: 0 }.realize(1).is_err());
        let grid = Grid::points(vec![0.1]).unwrap();
        let spec = EnsembleSpec::RudinShapiro { len: 8 };
        assert!(ensemble_periodogram(&spec, 1, &grid, 0, Normalization::Volume).is_err());
    }
}
