//! Brute-force spectral estimators on finite patches.

mod autocorrelation;
mod compare;
mod ensemble;
mod periodogram;

pub use autocorrelation::{
    autocorrelation, AutocorrelationEntry, AutocorrelationTable, Distance, CLUSTER_TOLERANCE,
    DEFAULT_MAXDIST_FRACTION,
};
pub use compare::{compare, estimate_as_reference, Metric, Region, PEAK_MATCH_TOLERANCE};
pub use ensemble::{ensemble_periodogram, EnsembleSpec};
pub use periodogram::{
    periodogram, structure_factor, structure_factors, DiffractionEstimate, Normalization,
};

use crate::comb::WeightedComb;
use crate::error::{Error, Result};

/// Fewest patch sizes accepted by [`scaling_exponent`].
pub const MIN_SIZES: usize = 4;

/// Least-squares slope of `ln |S_L(k)|²` against `ln vol`.
///
/// About 2 at a Bragg peak, about 1 on an absolutely continuous
/// background, in between for singular continuous local scaling.
pub fn scaling_exponent(family: &[WeightedComb], k: f64) -> Result<f64> {
    if family.len() < MIN_SIZES {
        return Err(Error::TooFewSizes {
            needed: MIN_SIZES,
            got: family.len(),
        });
    }
    if family.windows(2).any(|w| w[1].volume() <= w[0].volume()) {
        return Err(Error::invalid("family", "volumes must be strictly increasing"));
    }
    let mut pts = Vec::with_capacity(family.len());
    for comb in family {
        let s = structure_factors(comb, &[k])?[0];
        let y = s.norm_sqr().ln();
        if !y.is_finite() {
            return Err(Error::NonFinite { k });
        }
        pts.push((comb.volume().ln(), y));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}
