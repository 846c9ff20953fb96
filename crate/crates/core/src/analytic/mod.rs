//! Closed-form diffraction measures.

mod crystal;
mod measure;
mod model_set;
mod random;
mod thue_morse;

pub use crystal::{crystal_diffraction, two_atom_intensity};
pub use measure::{
    threshold_peaks, AcDensity, DistributionFn, DistributionMethod, Peak, SpectralMeasure,
};
pub use model_set::{fibonacci_intensity, model_set_spectrum, DEFAULT_INTERNAL_CUTOFF};
pub use random::{random_fibonacci_density, random_fibonacci_spectrum, rs_diffraction};
pub use thue_morse::{
    tm_correlations, tm_distribution, tm_distribution_with, tm_exponential_sum, tm_riesz_partial,
    TmDistribution, TmDistributionConfig, MAX_RIESZ_DEPTH,
};
