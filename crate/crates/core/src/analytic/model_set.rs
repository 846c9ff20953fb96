//! Bragg spectrum of one-dimensional model sets over ℤ[τ].
//!
//! The dual of the embedding lattice is computed as the inverse transpose
//! of the embedding basis. A dual point `y = (k, k⋆)` carries the amplitude
//! `(dens/vol W)·1̂_W(−k⋆)`, whose modulus is `dens·|sinc(π vol(W) k⋆)|`.
//! For the Fibonacci lattice the dual is `ℤ[τ]/√5` with
//! `k = x/√5` and `k⋆ = −x⋆/√5`; each dual point is matched to its exact
//! `x` so that extinctions come out as exact zeros.

use crate::error::{Error, Result};
use crate::generators::{CpsSpec, WindowBound};
use crate::goldenring::GoldenInt;
use crate::lattice::candidates_in_rect;
use crate::numeric::{sinc_pi, SQRT5, TAU};

use super::measure::{Peak, SpectralMeasure};

/// Largest internal-space coordinate `|k⋆|` ever scanned. Peaks beyond it
/// carry less than `(dens/(π·vol·cutoff))²`, about 2e-8 for Fibonacci.
/// Capping every threshold at the same cutoff keeps the emitted set
/// monotone in the threshold.
pub const DEFAULT_INTERNAL_CUTOFF: f64 = 1000.0;

/// Peaks with `|k| ≤ kmax` and intensity at least `threshold`, sorted by
/// position. Extinct positions are omitted.
pub fn model_set_spectrum(cps: &CpsSpec, kmax: f64, threshold: f64) -> Result<SpectralMeasure> {
    if !(kmax > 0.0) || !kmax.is_finite() {
        return Err(Error::invalid("kmax", "must be positive and finite"));
    }
    if !(threshold >= 0.0) || !threshold.is_finite() {
        return Err(Error::invalid("threshold", "must be finite and non-negative"));
    }
    let dens = cps.density();
    let vol = cps.window().length();
    // sinc²(πv u) ≤ (πv u)⁻², so intensities ≥ threshold need |u| below this.
    let kstar_max = if threshold > 0.0 {
        (dens / (std::f64::consts::PI * vol * threshold.sqrt()))
            .max(1.0 / vol)
            .min(DEFAULT_INTERNAL_CUTOFF)
    } else {
        DEFAULT_INTERNAL_CUTOFF
    };

    let basis = cps.embedding_basis();
    let det = basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0];
    // Rows of the inverse transpose.
    let dual = [
        [basis[1][1] / det, -basis[1][0] / det],
        [-basis[0][1] / det, basis[0][0] / det],
    ];
    let exact_window = exact_window_length(cps);
    let golden_dual = spans_golden_ring(cps)?;

    let mut peaks = Vec::new();
    for (p, q) in candidates_in_rect(dual, (-kmax, kmax), (-kstar_max, kstar_max))? {
        let k = p as f64 * dual[0][0] + q as f64 * dual[1][0];
        let kstar = p as f64 * dual[0][1] + q as f64 * dual[1][1];
        if k.abs() > kmax || kstar.abs() > kstar_max {
            continue;
        }
        let exact = if golden_dual { Some(recover_exact(k, kstar)?) } else { None };
        let intensity = match (exact, exact_window) {
            (Some(x), Some(w)) => exact_intensity(dens, w, x)?,
            _ => dens * dens * sinc_pi(vol * kstar).powi(2),
        };
        if intensity > 0.0 && intensity >= threshold {
            let k = exact.map_or(k, |x| x.embed() / SQRT5);
            peaks.push(Peak {
                k: vec![k],
                intensity,
                exact,
            });
        }
    }
    peaks.sort_by(|a, b| a.k[0].total_cmp(&b.k[0]));
    Ok(SpectralMeasure::pure_point(peaks))
}

/// Fibonacci intensity at `k = x/√5`: `(τ/√5 · sinc(πτk⋆))²`, exactly zero
/// where `τk⋆` is a nonzero integer.
pub fn fibonacci_intensity(x: GoldenInt) -> Result<f64> {
    exact_intensity(TAU / SQRT5, GoldenInt::TAU, x)
}

/// `dens²·sinc²(π w k⋆)` with `k⋆ = −x⋆/√5` and exact window length `w`.
fn exact_intensity(dens: f64, w: GoldenInt, x: GoldenInt) -> Result<f64> {
    let y = w.try_mul(x.try_star()?)?;
    // y = m√5 = (−m, 2m) makes w·k⋆ = −m an integer.
    let t = if y.b % 2 == 0 && y.a == -(y.b / 2) {
        -(y.b / 2) as f64
    } else {
        -y.embed() / SQRT5
    };
    Ok(dens * dens * sinc_pi(t).powi(2))
}

/// Window length as an element of ℤ[τ], when both bounds are.
fn exact_window_length(cps: &CpsSpec) -> Option<GoldenInt> {
    match (cps.window().lo(), cps.window().hi()) {
        (WindowBound::Exact { num: lo, den: 1 }, WindowBound::Exact { num: hi, den: 1 }) => {
            hi.try_sub(lo).ok()
        }
        _ => None,
    }
}

/// The generators span all of ℤ[τ] iff `det = ±√5` exactly.
fn spans_golden_ring(cps: &CpsSpec) -> Result<bool> {
    let [g1, g2] = cps.generators();
    let det = g1
        .try_mul(g2.try_star()?)?
        .try_sub(g2.try_mul(g1.try_star()?)?)?;
    Ok(det == GoldenInt::SQRT5 || det == -GoldenInt::SQRT5)
}

/// `x` with `x/√5 = k` and `−x⋆/√5 = k⋆`: `b = k + k⋆`, `a = √5 k − bτ`.
fn recover_exact(k: f64, kstar: f64) -> Result<GoldenInt> {
    let b = (k + kstar).round();
    let a = (SQRT5 * k - b * TAU).round();
    if !(a.abs() < 9.0e15 && b.abs() < 9.0e15) {
        return Err(Error::Overflow("dual lattice point"));
    }
    Ok(GoldenInt::new(a as i64, b as i64))
}
