//! Floating-point helpers shared by the evaluators: error-free transforms,
//! phase reduction in units of full turns, and `sinc`.

use std::f64::consts::PI;

use num_complex::Complex64;

/// τ = (1+√5)/2 rounded to the nearest double.
pub const TAU: f64 = 1.618_033_988_749_895;
/// τ − `TAU`, the rounding residue of the double above.
pub const TAU_LO: f64 = -5.432_115_203_682_506e-17;
/// √5 rounded to the nearest double.
pub const SQRT5: f64 = 2.236_067_977_499_79;

/// Knuth's two-sum: `s + e == a + b` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `p + e == a * b` exactly (barring over/underflow).
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Splits an integer into a double-double pair without rounding loss.
#[inline]
pub fn int_dd(n: i64) -> (f64, f64) {
    let hi = n as f64;
    let lo = (n as i128 - hi as i128) as f64;
    (hi, lo)
}

/// Fractional part of `k * x`, reduced to `[-0.5, 0.5]`, keeping the
/// rounding error of the product.
#[inline]
pub fn turns(k: f64, x: f64) -> f64 {
    let (p, e) = two_prod(k, x);
    (p - p.round()) + e
}

/// Reduces a phase given as a sum of parts (in turns) to `[-0.5, 0.5]`.
#[inline]
pub fn reduce_turns(t: f64) -> f64 {
    t - t.round()
}

/// `exp(2πi t)`, exact at multiples of a quarter turn.
pub fn cis_turns(t: f64) -> Complex64 {
    let r = reduce_turns(t);
    let q = 4.0 * r;
    if q == q.round() {
        return match q as i64 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            -1 => Complex64::new(0.0, -1.0),
            _ => Complex64::new(-1.0, 0.0),
        };
    }
    let (s, c) = (2.0 * PI * r).sin_cos();
    Complex64::new(c, s)
}

/// `sin(x)/x` with `sinc(0) = 1`; a short series below `|x| < 1e-4`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `sinc(π t)`, exactly zero at nonzero integer `t`.
pub fn sinc_pi(t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let n = t.round();
    if t == n {
        return 0.0;
    }
    if t.abs() < 1e-4 / PI {
        return sinc(PI * t);
    }
    // sin(πt) = (-1)^n sin(π(t-n)) keeps the argument small.
    let s = (PI * (t - n)).sin();
    let sign = if (n as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * s / (PI * t)
}

/// Neumaier-compensated sum in the given order.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}
