//! Finite patches of weighted Dirac combs `Σ w(x) δ_x`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::goldenring::GoldenInt;

/// Point positions of a comb. Exact variants keep the arithmetic structure
/// needed for exact distance sets.
#[derive(Clone, Debug, PartialEq)]
pub enum Positions {
    Integer(Vec<i64>),
    Golden(Vec<GoldenInt>),
    /// Row-major coordinates, `dim` per point.
    Real { dim: usize, coords: Vec<f64> },
}

impl Positions {
    pub fn len(&self) -> usize {
        match self {
            Positions::Integer(v) => v.len(),
            Positions::Golden(v) => v.len(),
            Positions::Real { dim, coords } => coords.len() / dim,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            Positions::Real { dim, .. } => *dim,
            _ => 1,
        }
    }

    /// Position `i` as a real vector.
    pub fn point(&self, i: usize) -> Vec<f64> {
        match self {
            Positions::Integer(v) => vec![v[i] as f64],
            Positions::Golden(v) => vec![v[i].embed()],
            Positions::Real { dim, coords } => coords[i * dim..(i + 1) * dim].to_vec(),
        }
    }

    /// Real coordinate of point `i` for one-dimensional combs.
    pub fn coordinate(&self, i: usize) -> f64 {
        match self {
            Positions::Integer(v) => v[i] as f64,
            Positions::Golden(v) => v[i].embed(),
            Positions::Real { coords, .. } => coords[i],
        }
    }
}

/// Region a patch was cut from. Its volume normalizes autocorrelations
/// and periodograms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Patch {
    /// Axis-aligned box `[lo, hi)`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Closed ball of the given radius about the origin.
    Ball { dim: usize, radius: f64 },
}

impl Patch {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Patch::Box {
            lo: vec![lo],
            hi: vec![hi],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Patch::Box { lo, .. } => lo.len(),
            Patch::Ball { dim, .. } => *dim,
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Patch::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| h - l).product(),
            Patch::Ball { dim, radius } => match dim {
                1 => 2.0 * radius,
                2 => PI * radius * radius,
                3 => 4.0 / 3.0 * PI * radius.powi(3),
                _ => unreachable!("patch dimension is at most 3"),
            },
        }
    }

    /// Largest coordinate extent, the scale against which correlation
    /// distances are capped.
    pub fn extent(&self) -> f64 {
        match self {
            Patch::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| h - l)
                .fold(0.0, f64::max),
            Patch::Ball { radius, .. } => 2.0 * radius,
        }
    }

    /// Membership with a relative slack of `1e-12` on the boundary.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Patch::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *v >= *l - 1e-12 * l.abs() && *v <= *h + 1e-12 * h.abs()),
            Patch::Ball { radius, .. } => {
                x.iter().map(|v| v * v).sum::<f64>().sqrt() <= radius * (1.0 + 1e-12)
            }
        }
    }
}

/// A finite weighted Dirac comb.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedComb {
    positions: Positions,
    weights: Vec<Complex64>,
    patch: Patch,
}

impl WeightedComb {
    /// Builds a comb, checking one weight per point, finite weights, a
    /// positive patch volume, positions inside the patch, and strict
    /// (lexicographic for `d > 1`) ordering.
    pub fn new(positions: Positions, weights: Vec<Complex64>, patch: Patch) -> Result<Self> {
        if positions.len() != weights.len() {
            return Err(Error::invalid(
                "weights",
                format!("{} weights for {} points", weights.len(), positions.len()),
            ));
        }
        if positions.dim() != patch.dim() {
            return Err(Error::DimensionMismatch {
                expected: patch.dim(),
                got: positions.dim(),
            });
        }
        if !(patch.volume() > 0.0) {
            return Err(Error::invalid("patch", "volume must be positive"));
        }
        if weights.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(Error::invalid("weights", "weights must be finite"));
        }
        let ordered = match &positions {
            Positions::Integer(v) => v.windows(2).all(|w| w[0] < w[1]),
            Positions::Golden(v) => v.windows(2).all(|w| w[0] < w[1]),
            Positions::Real { dim, coords } => coords
                .chunks(*dim)
                .zip(coords.chunks(*dim).skip(1))
                .all(|(p, q)| lex_less(p, q)),
        };
        if !ordered {
            return Err(Error::invalid(
                "positions",
                "positions must be strictly increasing without duplicates",
            ));
        }
        if let Some(i) = (0..positions.len()).find(|&i| !patch.contains(&positions.point(i))) {
            return Err(Error::invalid(
                "positions",
                format!("point {:?} lies outside the patch", positions.point(i)),
            ));
        }
        Ok(WeightedComb {
            positions,
            weights,
            patch,
        })
    }

    pub fn positions(&self) -> &Positions {
        &self.positions
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn volume(&self) -> f64 {
        self.patch.volume()
    }

    pub fn dim(&self) -> usize {
        self.positions.dim()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Points per unit volume.
    pub fn density(&self) -> f64 {
        self.len() as f64 / self.volume()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().map(|w| w.norm()).fold(0.0, f64::max)
    }

    /// Multiplies every weight by `exp(iφ)`.
    pub fn rotate_phase(&self, phi: f64) -> Self {
        let z = Complex64::from_polar(1.0, phi);
        WeightedComb {
            positions: self.positions.clone(),
            weights: self.weights.iter().map(|w| w * z).collect(),
            patch: self.patch.clone(),
        }
    }
}

pub(crate) fn lex_less(p: &[f64], q: &[f64]) -> bool {
    for (a, b) in p.iter().zip(q) {
        if a < b {
            return true;
        }
        if a > b {
            return false;
        }
    }
    false
}
