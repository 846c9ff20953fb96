use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::generators::CrystalSpec;
use crate::numeric::cis_turns;

use super::measure::{Peak, SpectralMeasure};

/// Relative level below which a structure factor counts as extinct.
const EXTINCTION_LEVEL: f64 = 1e-24;

/// Bragg peaks on the dual lattice `Γ* = B^{-T} ℤ^d` within `|k| ≤ kmax`.
///
/// For `k = B^{-T} h` and a motif point `x = B f`, `⟨k|x⟩ = h·f`, so phases
/// are formed from integer indices and fractional coordinates only.
pub fn crystal_diffraction(spec: &CrystalSpec, kmax: f64) -> Result<SpectralMeasure> {
    if !(kmax > 0.0) || !kmax.is_finite() {
        return Err(Error::invalid("kmax", "must be positive and finite"));
    }
    let d = spec.dim();
    let basis = spec.basis();
    let dual = basis
        .clone()
        .try_inverse()
        .ok_or(Error::SingularBasis(basis.determinant()))?
        .transpose();
    let dens = spec.lattice_density();
    let weight_sum: f64 = spec.motif().iter().map(|s| s.weight.norm()).sum();
    let floor = EXTINCTION_LEVEL * (dens * weight_sum).powi(2);

    // h_i = (column i of B)·k, hence |h_i| ≤ |B e_i| kmax.
    let bounds: Vec<i64> = (0..d)
        .map(|i| (basis.column(i).norm() * kmax).floor() as i64 + 1)
        .collect();
    let kmax2 = kmax * kmax * (1.0 + 1e-12);

    let mut peaks = Vec::new();
    let mut h: Vec<i64> = bounds.iter().map(|b| -b).collect();
    'outer: loop {
        let k: Vec<f64> = (0..d)
            .map(|r| (0..d).map(|c| dual[(r, c)] * h[c] as f64).sum())
            .collect();
        if k.iter().map(|v| v * v).sum::<f64>() <= kmax2 {
            let amp: Complex64 = spec
                .motif()
                .iter()
                .map(|s| {
                    let t: f64 = h.iter().zip(&s.frac).map(|(&hi, f)| hi as f64 * f).sum();
                    s.weight * cis_turns(-t)
                })
                .sum();
            let intensity = dens * dens * amp.norm_sqr();
            if intensity > floor {
                peaks.push(Peak {
                    k,
                    intensity,
                    exact: None,
                });
            }
        }
        for axis in 0..d {
            if h[axis] < bounds[axis] {
                h[axis] += 1;
                continue 'outer;
            }
            h[axis] = -bounds[axis];
        }
        break;
    }
    peaks.sort_by(|p, q| p.k.partial_cmp(&q.k).expect("finite"));
    Ok(SpectralMeasure::pure_point(peaks))
}

/// `|1 + α e^{−2πi(k₁a + k₂b)}|²`.
pub fn two_atom_intensity(k1: f64, k2: f64, alpha: Complex64, a: f64, b: f64) -> f64 {
    (1.0 + alpha * cis_turns(-(k1 * a + k2 * b))).norm_sqr()
}
