//! Finite-volume autocorrelation `γ_R = ω|_R ∗ (ω|_R)~ / vol(B_R)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::comb::{lex_less, Positions, WeightedComb};
use crate::error::{Error, Result};
use crate::goldenring::GoldenInt;
use crate::numeric::{cis_turns, turns};

/// Real difference vectors closer than this are merged.
pub const CLUSTER_TOLERANCE: f64 = 1e-9;
/// Default `maxdist` as a fraction of the patch extent.
pub const DEFAULT_MAXDIST_FRACTION: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    Integer(i64),
    Golden(GoldenInt),
    Real(Vec<f64>),
}

impl Distance {
    pub fn as_real(&self) -> Vec<f64> {
        match self {
            Distance::Integer(m) => vec![*m as f64],
            Distance::Golden(x) => vec![x.embed()],
            Distance::Real(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutocorrelationEntry {
    pub distance: Distance,
    pub coefficient: Complex64,
}

/// Coefficients `Σ_{x−y=z} w(x) conj(w(y)) / vol`, sorted by distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutocorrelationTable {
    pub entries: Vec<AutocorrelationEntry>,
    pub volume: f64,
    pub maxdist: f64,
}

impl AutocorrelationTable {
    pub fn get(&self, distance: &Distance) -> Option<Complex64> {
        self.entries
            .iter()
            .find(|e| &e.distance == distance)
            .map(|e| e.coefficient)
    }

    /// `Σ_z γ(z) e^{−2πi⟨k|z⟩}` over the tabulated distances.
    pub fn fourier(&self, k: &[f64]) -> Complex64 {
        self.entries
            .iter()
            .map(|e| {
                let z = e.distance.as_real();
                let t: f64 = k.iter().zip(&z).map(|(&kc, &zc)| turns(kc, zc)).sum();
                e.coefficient * cis_turns(-t)
            })
            .sum()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// All differences with `|z| ≤ maxdist` (default: 10% of the patch extent).
pub fn autocorrelation(comb: &WeightedComb, maxdist: Option<f64>) -> Result<AutocorrelationTable> {
    let extent = comb.patch().extent();
    let maxdist = maxdist.unwrap_or(DEFAULT_MAXDIST_FRACTION * extent);
    if !(maxdist >= 0.0) {
        return Err(Error::invalid("maxdist", "must be non-negative"));
    }
    if maxdist > extent {
        return Err(Error::MaxDistExceedsPatch { maxdist, extent });
    }
    let vol = comb.volume();
    let w = comb.weights();
    let mut entries = match comb.positions() {
        Positions::Integer(xs) => {
            exact_1d(xs, w, |d| (d as f64).abs() <= maxdist, |a, b| b - a, Distance::Integer, vol)
        }
        Positions::Golden(xs) => exact_1d(
            xs,
            w,
            |d: GoldenInt| d.embed().abs() <= maxdist,
            |a, b| b - a,
            Distance::Golden,
            vol,
        ),
        Positions::Real { dim, coords } => real_nd(*dim, coords, w, maxdist, vol),
    };
    if entries.is_empty() {
        entries.push(AutocorrelationEntry {
            distance: match comb.positions() {
                Positions::Integer(_) => Distance::Integer(0),
                Positions::Golden(_) => Distance::Golden(GoldenInt::ZERO),
                Positions::Real { dim, .. } => Distance::Real(vec![0.0; *dim]),
            },
            coefficient: Complex64::new(0.0, 0.0),
        });
    }
    Ok(AutocorrelationTable {
        entries,
        volume: vol,
        maxdist,
    })
}

/// Sorted positions: scan forward from each point, group exactly, then
/// mirror the positive side by conjugation.
fn exact_1d<T, D, F>(
    xs: &[T],
    w: &[Complex64],
    within: D,
    diff: F,
    wrap: fn(T) -> Distance,
    vol: f64,
) -> Vec<AutocorrelationEntry>
where
    T: Copy + Ord + Default,
    D: Fn(T) -> bool,
    F: Fn(T, T) -> T,
{
    let mut positive: BTreeMap<T, Complex64> = BTreeMap::new();
    let zero: f64 = w.iter().map(|v| v.norm_sqr()).sum();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let d = diff(xs[i], xs[j]);
            if !within(d) {
                break;
            }
            *positive.entry(d).or_default() += w[j] * w[i].conj();
        }
    }
    let neg = |t: T| diff(t, T::default());
    let mut out: Vec<AutocorrelationEntry> = positive
        .iter()
        .rev()
        .map(|(&d, &c)| AutocorrelationEntry {
            distance: wrap(neg(d)),
            coefficient: c.conj() / vol,
        })
        .collect();
    if !xs.is_empty() {
        out.push(AutocorrelationEntry {
            distance: wrap(T::default()),
            coefficient: Complex64::new(zero / vol, 0.0),
        });
    }
    out.extend(positive.into_iter().map(|(d, c)| AutocorrelationEntry {
        distance: wrap(d),
        coefficient: c / vol,
    }));
    out
}

fn real_nd(
    dim: usize,
    coords: &[f64],
    w: &[Complex64],
    maxdist: f64,
    vol: f64,
) -> Vec<AutocorrelationEntry> {
    let n = w.len();
    let mut pairs: Vec<(Vec<f64>, Complex64)> = Vec::new();
    for i in 0..n {
        let y = &coords[i * dim..(i + 1) * dim];
        for j in 0..n {
            let x = &coords[j * dim..(j + 1) * dim];
            let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            if norm(&z) <= maxdist {
                pairs.push((z, w[j] * w[i].conj()));
            }
        }
    }
    pairs.sort_by(|a, b| {
        if lex_less(&a.0, &b.0) {
            std::cmp::Ordering::Less
        } else if lex_less(&b.0, &a.0) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    // Merge runs whose consecutive members are within tolerance.
    let mut out: Vec<AutocorrelationEntry> = Vec::new();
    let mut members = 0usize;
    let mut prev: Option<Vec<f64>> = None;
    for (z, c) in pairs {
        let close = prev.as_ref().is_some_and(|p| {
            p.iter().zip(&z).all(|(a, b)| (a - b).abs() <= CLUSTER_TOLERANCE)
        });
        if close {
            let e = out.last_mut().expect("open cluster");
            e.coefficient += c / vol;
            if let Distance::Real(centre) = &mut e.distance {
                members += 1;
                for (m, v) in centre.iter_mut().zip(&z) {
                    *m += (v - *m) / members as f64;
                }
            }
        } else {
            members = 1;
            out.push(AutocorrelationEntry {
                distance: Distance::Real(z.clone()),
                coefficient: c / vol,
            });
        }
        prev = Some(z);
    }
    out
}
