//! Point sets with aperiodic order and their diffraction.
//!
//! * [`generators`] builds finite patches of weighted Dirac combs: lattice
//!   crystals, the Fibonacci model set, Thue–Morse, Rudin–Shapiro, random
//!   sign sequences and random Fibonacci tilings.
//! * [`analytic`] evaluates the closed-form diffraction measures.
//! * [`estimation`] computes autocorrelations and periodograms of patches
//!   and compares them with the closed forms.
//!
//! Positions in ℤ[τ] are kept exact ([`GoldenInt`]), and every random
//! generator is reproducible from a 64-bit seed ([`seeding`]).

pub mod analytic;
pub mod comb;
pub mod error;
pub mod estimation;
pub mod generators;
pub mod goldenring;
pub mod grid;
pub mod io;
mod lattice;
pub mod numeric;
pub mod seeding;

pub use comb::{Patch, Positions, WeightedComb};
pub use error::{Error, Result};
pub use goldenring::GoldenInt;
pub use grid::Grid;
