use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::TAU;

use super::measure::{AcDensity, Peak, SpectralMeasure};

/// Offset of the symmetric evaluation at removable singularities.
const REMOVABLE_OFFSET: f64 = 1e-6;
const VANISHING: f64 = 1e-14;

/// Lebesgue measure: no peaks, density 1.
pub fn rs_diffraction() -> SpectralMeasure {
    SpectralMeasure {
        pp: Vec::new(),
        ac: Some(AcDensity::Constant { value: 1.0 }),
        sc: None,
    }
}

/// Almost-sure diffraction of the random Fibonacci tiling with long-tile
/// probability `1/τ`: the central peak `((τ+2)/5)² δ₀` plus density `h`.
pub fn random_fibonacci_spectrum() -> SpectralMeasure {
    let c = (TAU + 2.0) / 5.0;
    SpectralMeasure {
        pp: vec![Peak::new_1d(0.0, c * c)],
        ac: Some(AcDensity::RandomFibonacci),
        sc: None,
    }
}

fn h_parts(k: f64) -> (f64, f64) {
    let s = |x: f64| {
        let v = (PI * x).sin();
        v * v
    };
    let num = (TAU + 2.0) / 5.0 * s(k / TAU);
    let den = TAU * TAU * s(k * TAU) + TAU * s(k) - s(k / TAU);
    (num, den)
}

/// `h(k) = ((τ+2)/5) sin²(πk/τ) / (τ² sin²(πkτ) + τ sin²(πk) − sin²(πk/τ))`.
///
/// Where numerator and denominator both vanish the mean of `h(k ± 1e-6)`
/// is returned. `k = 0` carries the Bragg peak and is rejected.
pub fn random_fibonacci_density(k: f64) -> Result<f64> {
    if !k.is_finite() {
        return Err(Error::NonFinite { k });
    }
    if k == 0.0 {
        return Err(Error::invalid("k", "the density is not defined at k = 0"));
    }
    let (num, den) = h_parts(k);
    let value = if num.abs() < VANISHING && den.abs() < VANISHING {
        let (n1, d1) = h_parts(k - REMOVABLE_OFFSET);
        let (n2, d2) = h_parts(k + REMOVABLE_OFFSET);
        0.5 * (n1 / d1 + n2 / d2)
    } else {
        num / den
    };
    if !value.is_finite() || value < 0.0 {
        return Err(Error::NonFinite { k });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::{rng_from_seed, uniform};

    #[test]
    fn flat_spectrum() {
        let s = rs_diffraction();
        assert!(s.pp.is_empty());
        let ac = s.ac.unwrap();
        assert_eq!(ac.density(0.25).unwrap(), 1.0);
        assert_eq!(ac.density(17.3).unwrap(), 1.0);
    }

    #[test]
    fn central_peak() {
        let s = random_fibonacci_spectrum();
        assert!((s.pp[0].intensity - 0.523_606_797_749_979).abs() < 1e-15);
    }

    #[test]
    fn positive_and_even() {
        let mut rng = rng_from_seed(11);
        for _ in 0..100 {
            let k = 0.1 + 19.9 * uniform(&mut rng);
            let h = random_fibonacci_density(k).unwrap();
            assert!(h > 0.0, "h({k}) = {h}");
            assert_eq!(h, random_fibonacci_density(-k).unwrap());
        }
        assert!(random_fibonacci_density(0.0).is_err());
        assert!(random_fibonacci_density(f64::NAN).is_err());
    }

    #[test]
    fn removable_limit_near_zero() {
        // Both parts vanish quadratically at 0; the ratio stays finite.
        let a = random_fibonacci_density(1e-9).unwrap();
        let b = random_fibonacci_density(1e-3).unwrap();
        assert!(a.is_finite() && b.is_finite());
        assert!((a - b).abs() < 1e-3 * b.max(1.0));
    }

    #[test]
    fn finite_mass_on_an_interval() {
        let n = 20_000;
        let mass: f64 = (0..n)
            .map(|i| random_fibonacci_density(0.1 + (i as f64 + 0.5) * 10.0 / n as f64).unwrap())
            .sum::<f64>()
            * 10.0
            / n as f64;
        assert!(mass.is_finite() && mass > 0.0);
    }
}
