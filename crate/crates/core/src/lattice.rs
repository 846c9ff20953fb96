//! Enumeration of planar lattice points inside axis-aligned rectangles.
//! Shared by model-set generation (embedding lattice) and the model-set
//! spectrum (its dual).

use crate::error::{Error, Result};

/// Largest integer coordinate we are willing to enumerate.
const COORD_LIMIT: f64 = (1u64 << 50) as f64;

/// Integer pairs `(m, n)` whose image `m·rows[0] + n·rows[1]` may lie in
/// `[x0, x1] × [y0, y1]`. The result is a superset with one unit of slack
/// per side; callers apply the exact membership test.
pub(crate) fn candidates_in_rect(
    rows: [[f64; 2]; 2],
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
) -> Result<Vec<(i64, i64)>> {
    let det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0];
    if det == 0.0 || !det.is_finite() {
        return Err(Error::SingularBasis(det));
    }
    // (m, n) = (x, y)·rows⁻¹, rows⁻¹ = [[r11, -r01], [-r10, r00]] / det.
    let m_of = |x: f64, y: f64| (x * rows[1][1] - y * rows[1][0]) / det;
    let corners = [(x0, y0), (x0, y1), (x1, y0), (x1, y1)];
    let ms: Vec<f64> = corners.iter().map(|&(x, y)| m_of(x, y)).collect();
    let m_lo = ms.iter().cloned().fold(f64::INFINITY, f64::min).floor() - 1.0;
    let m_hi = ms.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil() + 1.0;
    if !(m_lo.abs() < COORD_LIMIT && m_hi.abs() < COORD_LIMIT) {
        return Err(Error::Overflow("lattice enumeration range"));
    }

    let mut out = Vec::new();
    for m in (m_lo as i64)..=(m_hi as i64) {
        let mf = m as f64;
        let mut n_lo = f64::NEG_INFINITY;
        let mut n_hi = f64::INFINITY;
        let mut feasible = true;
        for (axis, (lo, hi)) in [(x0, x1), (y0, y1)].into_iter().enumerate() {
            let c = rows[1][axis];
            let off = mf * rows[0][axis];
            if c == 0.0 {
                let slack = rows[0][axis].abs();
                if off < lo - slack || off > hi + slack {
                    feasible = false;
                }
                continue;
            }
            let (a, b) = ((lo - off) / c, (hi - off) / c);
            n_lo = n_lo.max(a.min(b));
            n_hi = n_hi.min(a.max(b));
        }
        if !feasible || n_lo > n_hi + 2.0 {
            continue;
        }
        let (lo, hi) = (n_lo.floor() - 1.0, n_hi.ceil() + 1.0);
        if !(lo.abs() < COORD_LIMIT && hi.abs() < COORD_LIMIT) {
            return Err(Error::Overflow("lattice enumeration range"));
        }
        for n in (lo as i64)..=(hi as i64) {
            out.push((m, n));
        }
    }
    Ok(out)
}
