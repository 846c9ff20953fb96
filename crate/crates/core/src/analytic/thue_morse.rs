//! Thue–Morse diffraction: exponential sums, partial Riesz products and
//! the distribution function of the singular continuous measure.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::MAX_THUE_MORSE_ORDER;
use crate::numeric::cis_turns;

use super::measure::{DistributionFn, DistributionMethod};

/// Largest Riesz depth accepted by [`tm_distribution`]; quadrature cost
/// grows as `2^{N+4}`.
pub const MAX_RIESZ_DEPTH: u32 = 20;

/// `frac(2ⁿ k)` for `n = 0, 1, …`, reduced to `[-0.5, 0.5)`. Doubling and
/// integer subtraction are exact in binary floating point.
fn dyadic_phases(k: f64, count: u32) -> impl Iterator<Item = f64> {
    let mut t = k - k.round();
    (0..count).map(move |_| {
        let cur = t;
        t = 2.0 * t;
        t -= t.round();
        cur
    })
}

/// `Π_{n<N} (1 − cos(2^{n+1}πk))`, each factor as `2 sin²(π frac(2ⁿk))`.
pub fn tm_riesz_partial(k: f64, depth: u32) -> f64 {
    dyadic_phases(k, depth)
        .map(|t| {
            let s = (std::f64::consts::PI * t).sin();
            2.0 * s * s
        })
        .product()
}

/// `g_n(k) = Σ_{ℓ<2ⁿ} v_ℓ e^{−2πikℓ}` by `g_{m+1} = (1 − e^{−2πik2^m}) g_m`.
pub fn tm_exponential_sum(k: f64, n: u32) -> Result<Complex64> {
    if n > MAX_THUE_MORSE_ORDER {
        return Err(Error::invalid(
            "n",
            format!("{n} exceeds {MAX_THUE_MORSE_ORDER}"),
        ));
    }
    Ok(dyadic_phases(k, n).fold(Complex64::new(1.0, 0.0), |g, t| {
        g * (1.0 - cis_turns(-t))
    }))
}

/// Truncation parameters of [`tm_distribution_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TmDistributionConfig {
    /// Riesz product depth `N`.
    pub depth: u32,
    /// Fourier cutoff `M`.
    pub fourier_terms: usize,
    /// Correlations are averaged over a word of length `2^word_exponent`.
    pub word_exponent: u32,
    /// Required uniform agreement of the two constructions.
    pub tolerance: f64,
}

impl Default for TmDistributionConfig {
    fn default() -> Self {
        TmDistributionConfig {
            depth: 16,
            fourier_terms: 1 << 14,
            word_exponent: 20,
            tolerance: 1e-3,
        }
    }
}

/// Both constructions of `F` on the same grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TmDistribution {
    pub trapezoid: DistributionFn,
    pub fourier: DistributionFn,
    pub max_discrepancy: f64,
}

/// Trapezoidal `F` at depth `depth` on `gridsize` equally spaced points of
/// `[0, 1]`, cross-checked against the Fourier series with default cutoffs.
pub fn tm_distribution(depth: u32, gridsize: usize) -> Result<DistributionFn> {
    let config = TmDistributionConfig {
        depth,
        ..Default::default()
    };
    Ok(tm_distribution_with(&config, gridsize)?.trapezoid)
}

/// Computes both constructions and fails with both curves attached when
/// they differ by more than `config.tolerance` anywhere on the grid.
pub fn tm_distribution_with(
    config: &TmDistributionConfig,
    gridsize: usize,
) -> Result<TmDistribution> {
    if config.depth == 0 || config.depth > MAX_RIESZ_DEPTH {
        return Err(Error::invalid(
            "N",
            format!("depth must be in 1..={MAX_RIESZ_DEPTH}"),
        ));
    }
    if gridsize < 2 {
        return Err(Error::invalid("gridsize", "need at least 2 points"));
    }
    if config.fourier_terms == 0 || config.word_exponent > 26 {
        return Err(Error::invalid(
            "fourier",
            "need at least one term and a word exponent ≤ 26",
        ));
    }
    let cells = gridsize - 1;
    let grid: Vec<f64> = (0..gridsize).map(|j| j as f64 / cells as f64).collect();

    let trapezoid = trapezoid_distribution(config.depth, &grid);
    let eta = tm_correlations(config.fourier_terms, config.word_exponent);
    let fourier = fourier_distribution(&eta, config.word_exponent, &grid);
    let max_discrepancy = trapezoid.max_discrepancy(&fourier);
    if !(max_discrepancy <= config.tolerance) {
        return Err(Error::DistributionMismatch {
            max_discrepancy,
            tolerance: config.tolerance,
            trapezoid: Box::new(trapezoid),
            fourier: Box::new(fourier),
        });
    }
    Ok(TmDistribution {
        trapezoid,
        fourier,
        max_discrepancy,
    })
}

fn trapezoid_distribution(depth: u32, grid: &[f64]) -> DistributionFn {
    let cells = grid.len() - 1;
    let min_intervals = 1usize << (depth + 4);
    let per_cell = min_intervals.div_ceil(cells);
    let intervals = per_cell * cells;
    let h = 1.0 / intervals as f64;
    let masses: Vec<f64> = (0..cells)
        .into_par_iter()
        .map(|c| {
            let f = |j: usize| tm_riesz_partial(j as f64 * h, depth);
            let start = c * per_cell;
            let mut s = 0.5 * (f(start) + f(start + per_cell));
            for j in start + 1..start + per_cell {
                s += f(j);
            }
            s * h
        })
        .collect();
    DistributionFn::from_cell_masses(
        grid.to_vec(),
        &masses,
        DistributionMethod::Trapezoid { depth, intervals },
    )
}

/// `η(m) = 2^{-n} Σ_{ℓ<2ⁿ} v_ℓ v_{ℓ+m}` for `m = 0..=terms`, counted exactly
/// on a bit-packed word (`v_ℓ = (−1)^{popcount ℓ}`).
pub fn tm_correlations(terms: usize, word_exponent: u32) -> Vec<f64> {
    let len = 1usize << word_exponent;
    let total = len + terms + 128;
    let words: Vec<u64> = (0..total.div_ceil(64))
        .map(|w| {
            (0..64).fold(0u64, |acc, bit| {
                let l = (w * 64 + bit) as u64;
                acc | (((l.count_ones() & 1) as u64) << bit)
            })
        })
        .collect();
    let blocks = len / 64;
    let tail_bits = len % 64;
    (0..=terms)
        .into_par_iter()
        .map(|m| {
            let (q, r) = (m / 64, m % 64);
            let shifted = |i: usize| {
                if r == 0 {
                    words[i + q]
                } else {
                    (words[i + q] >> r) | (words[i + q + 1] << (64 - r))
                }
            };
            let mut differ: u64 = (0..blocks)
                .map(|i| (words[i] ^ shifted(i)).count_ones() as u64)
                .sum();
            if tail_bits > 0 {
                let mask = (1u64 << tail_bits) - 1;
                differ += ((words[blocks] ^ shifted(blocks)) & mask).count_ones() as u64;
            }
            (len as f64 - 2.0 * differ as f64) / len as f64
        })
        .collect()
}

/// `F(k) = k + Σ_{m=1}^{M} η(m) sin(2πmk)/(πm)`.
fn fourier_distribution(eta: &[f64], word_exponent: u32, grid: &[f64]) -> DistributionFn {
    const ANCHOR: usize = 256;
    let terms = eta.len() - 1;
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&k| {
            let step = cis_turns(k);
            let mut z = step;
            let mut s = 0.0;
            for (m, e) in eta.iter().enumerate().skip(1) {
                if m % ANCHOR == 0 {
                    z = cis_turns(crate::numeric::turns(k, m as f64));
                }
                s += e * z.im / m as f64;
                z *= step;
            }
            k + s / std::f64::consts::PI
        })
        .collect();
    let masses: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let mut f = DistributionFn::from_cell_masses(
        grid.to_vec(),
        &masses,
        DistributionMethod::FourierSeries {
            terms,
            word_exponent,
        },
    );
    f.values = values;
    f
}
