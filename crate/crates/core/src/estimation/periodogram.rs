//! Direct summation of `S(k) = Σ_x w(x) e^{−2πikx}`.
//!
//! Points are visited in order and the phase vector over a block of
//! wavenumbers is advanced by multiplication with `e^{−2πikΔ}` for the gap
//! `Δ` to the previous point. Step vectors are cached per exact gap; every
//! `ANCHOR` points, and whenever the cache is full, phases are recomputed
//! from the position itself.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::comb::{Positions, WeightedComb};
use crate::error::{Error, Result};
use crate::goldenring::GoldenInt;
use crate::grid::Grid;
use crate::numeric::{cis_turns, reduce_turns, turns};

const ANCHOR: usize = 256;
const BLOCK: usize = 512;
const CACHE: usize = 8;

/// How `|S(k)|²` is scaled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `|S|²/vol`, estimating a density.
    Volume,
    /// `(|S|/vol)²`, estimating Bragg intensities.
    VolumeSquared,
}

impl Normalization {
    pub fn apply(self, s: Complex64, vol: f64) -> f64 {
        match self {
            Normalization::Volume => s.norm_sqr() / vol,
            Normalization::VolumeSquared => {
                let a = s.norm() / vol;
                a * a
            }
        }
    }
}

/// Periodogram values on a grid, one per cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffractionEstimate {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub normalization: Normalization,
    /// Patch volume; the mean volume for ensembles.
    pub volume: f64,
    pub realizations: usize,
    pub master_seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq)]
enum Gap {
    Int(i64),
    Golden(GoldenInt),
    Real(u64),
}

struct Walker<'a> {
    positions: &'a Positions,
}

impl Walker<'_> {
    fn phase(&self, i: usize, k: f64) -> f64 {
        match self.positions {
            Positions::Integer(v) => turns(k, v[i] as f64),
            Positions::Golden(v) => {
                let (hi, lo) = v[i].embed_dd();
                reduce_turns(turns(k, hi) + k * lo)
            }
            Positions::Real { coords, .. } => turns(k, coords[i]),
        }
    }

    fn gap(&self, i: usize) -> (Gap, f64) {
        match self.positions {
            Positions::Integer(v) => {
                let d = v[i].wrapping_sub(v[i - 1]);
                (Gap::Int(d), d as f64)
            }
            Positions::Golden(v) => {
                let d = GoldenInt::new(v[i].a.wrapping_sub(v[i - 1].a), v[i].b.wrapping_sub(v[i - 1].b));
                (Gap::Golden(d), d.embed())
            }
            Positions::Real { coords, .. } => {
                let d = coords[i] - coords[i - 1];
                (Gap::Real(d.to_bits()), d)
            }
        }
    }
}

/// `S(k)` at each wavenumber for a one-dimensional comb.
pub fn structure_factors(comb: &WeightedComb, ks: &[f64]) -> Result<Vec<Complex64>> {
    if comb.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: comb.dim(),
        });
    }
    if ks.iter().any(|k| !k.is_finite()) {
        return Err(Error::invalid("k", "wavenumbers must be finite"));
    }
    let walker = Walker {
        positions: comb.positions(),
    };
    let weights = comb.weights();
    let out: Vec<Vec<Complex64>> = ks
        .par_chunks(BLOCK)
        .map(|block| sum_block(&walker, weights, block))
        .collect();
    Ok(out.into_iter().flatten().collect())
}

fn sum_block(walker: &Walker<'_>, weights: &[Complex64], ks: &[f64]) -> Vec<Complex64> {
    let n = ks.len();
    let (mut pr, mut pi) = (vec![0.0; n], vec![0.0; n]);
    let (mut sr, mut si) = (vec![0.0; n], vec![0.0; n]);
    let mut cache: Vec<(Gap, Vec<f64>, Vec<f64>)> = Vec::with_capacity(CACHE);

    let anchor = |i: usize, pr: &mut [f64], pi: &mut [f64]| {
        for (j, &k) in ks.iter().enumerate() {
            let z = cis_turns(-walker.phase(i, k));
            pr[j] = z.re;
            pi[j] = z.im;
        }
    };

    for (i, w) in weights.iter().enumerate() {
        if i % ANCHOR == 0 {
            anchor(i, &mut pr, &mut pi);
        } else {
            let (gap, delta) = walker.gap(i);
            let slot = match cache.iter().position(|c| c.0 == gap) {
                Some(s) => Some(s),
                None if cache.len() < CACHE => {
                    let (zr, zi) = ks
                        .iter()
                        .map(|&k| {
                            let z = cis_turns(-turns(k, delta));
                            (z.re, z.im)
                        })
                        .unzip();
                    cache.push((gap, zr, zi));
                    Some(cache.len() - 1)
                }
                None => None,
            };
            match slot {
                Some(s) => {
                    let (_, zr, zi) = &cache[s];
                    let (wr, wi) = (w.re, w.im);
                    let lanes = pr
                        .iter_mut()
                        .zip(pi.iter_mut())
                        .zip(zr.iter().zip(zi))
                        .zip(sr.iter_mut().zip(si.iter_mut()));
                    for (((pr, pi), (zr, zi)), (sr, si)) in lanes {
                        let (a, b) = (*pr, *pi);
                        *pr = a * zr - b * zi;
                        *pi = a * zi + b * zr;
                        *sr += wr * *pr - wi * *pi;
                        *si += wr * *pi + wi * *pr;
                    }
                    continue;
                }
                None => anchor(i, &mut pr, &mut pi),
            }
        }
        let (wr, wi) = (w.re, w.im);
        let lanes = pr.iter().zip(&pi).zip(sr.iter_mut().zip(si.iter_mut()));
        for ((pr, pi), (sr, si)) in lanes {
            *sr += wr * pr - wi * pi;
            *si += wr * pi + wi * pr;
        }
    }
    sr.into_iter()
        .zip(si)
        .map(|(re, im)| Complex64::new(re, im))
        .collect()
}

/// `S(k)` for a comb of any dimension, by direct phase evaluation.
pub fn structure_factor(comb: &WeightedComb, k: &[f64]) -> Result<Complex64> {
    if k.len() != comb.dim() {
        return Err(Error::DimensionMismatch {
            expected: comb.dim(),
            got: k.len(),
        });
    }
    let positions = comb.positions();
    Ok(comb
        .weights()
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let x = positions.point(i);
            let t: f64 = k.iter().zip(&x).map(|(&kc, &xc)| turns(kc, xc)).sum();
            w * cis_turns(-t)
        })
        .sum())
}

/// Raw normalized values at every sub-point of `grid`.
pub(crate) fn periodogram_samples(
    comb: &WeightedComb,
    grid: &Grid,
    normalization: Normalization,
) -> Result<Vec<f64>> {
    let vol = comb.volume();
    Ok(structure_factors(comb, &grid.sample_points())?
        .into_iter()
        .map(|s| normalization.apply(s, vol))
        .collect())
}

/// `|S(k)|²/vol` or `(|S(k)|/vol)²` averaged over the cells of `grid`.
pub fn periodogram(
    comb: &WeightedComb,
    grid: &Grid,
    normalization: Normalization,
) -> Result<DiffractionEstimate> {
    let samples = periodogram_samples(comb, grid, normalization)?;
    Ok(DiffractionEstimate {
        grid: grid.clone(),
        values: grid.average(&samples),
        normalization,
        volume: comb.volume(),
        realizations: 1,
        master_seed: None,
    })
}
