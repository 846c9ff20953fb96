//! Exact arithmetic in ℤ[τ], τ = (1+√5)/2.
//!
//! An element `a + bτ` is stored as an integer pair. Multiplication uses
//! τ² = τ + 1, and the Galois conjugation τ ↦ 1 − τ (the star map of the
//! Fibonacci cut-and-project scheme) sends `(a, b)` to `(a + b, −b)`.
//!
//! Ordering is exact: the sign of `a + bτ` is decided from the integers
//! `2a + b` and `b` (since `2(a + bτ) = (2a + b) + b√5`) with 256-bit
//! intermediate squares, so no pair of distinct elements ever compares equal.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{int_dd, two_prod, two_sum, TAU, TAU_LO};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct GoldenInt {
    /// Rational part.
    pub a: i64,
    /// Coefficient of τ.
    pub b: i64,
}

impl GoldenInt {
    pub const ZERO: GoldenInt = GoldenInt { a: 0, b: 0 };
    pub const ONE: GoldenInt = GoldenInt { a: 1, b: 0 };
    pub const TAU: GoldenInt = GoldenInt { a: 0, b: 1 };
    /// √5 = 2τ − 1.
    pub const SQRT5: GoldenInt = GoldenInt { a: -1, b: 2 };

    pub const fn new(a: i64, b: i64) -> Self {
        GoldenInt { a, b }
    }

    pub const fn from_int(a: i64) -> Self {
        GoldenInt { a, b: 0 }
    }

    /// `a + bτ` as a double.
    pub fn embed(self) -> f64 {
        let (hi, lo) = self.embed_dd();
        hi + lo
    }

    /// `a + bτ` as an unevaluated double-double sum `hi + lo`.
    pub fn embed_dd(self) -> (f64, f64) {
        let (a_hi, a_lo) = int_dd(self.a);
        let (b_hi, b_lo) = int_dd(self.b);
        let (p, p_err) = two_prod(b_hi, TAU);
        let tail = p_err + b_hi * TAU_LO + b_lo * TAU;
        let (s, s_err) = two_sum(a_hi, p);
        let lo = s_err + a_lo + tail;
        two_sum(s, lo)
    }

    /// Galois conjugate `a + b(1 − τ)`; panics on overflow.
    pub fn star(self) -> Self {
        self.try_star().expect("GoldenInt::star overflow")
    }

    pub fn try_star(self) -> Result<Self> {
        let a = self.a.checked_add(self.b).ok_or(Error::Overflow("star"))?;
        let b = self.b.checked_neg().ok_or(Error::Overflow("star"))?;
        Ok(GoldenInt { a, b })
    }

    pub fn try_add(self, rhs: Self) -> Result<Self> {
        Ok(GoldenInt {
            a: self.a.checked_add(rhs.a).ok_or(Error::Overflow("add"))?,
            b: self.b.checked_add(rhs.b).ok_or(Error::Overflow("add"))?,
        })
    }

    pub fn try_sub(self, rhs: Self) -> Result<Self> {
        Ok(GoldenInt {
            a: self.a.checked_sub(rhs.a).ok_or(Error::Overflow("sub"))?,
            b: self.b.checked_sub(rhs.b).ok_or(Error::Overflow("sub"))?,
        })
    }

    /// `(a, b)·(c, d) = (ac + bd, ad + bc + bd)`, checked.
    pub fn try_mul(self, rhs: Self) -> Result<Self> {
        let (a, b, c, d) = (
            self.a as i128,
            self.b as i128,
            rhs.a as i128,
            rhs.b as i128,
        );
        // Each product fits in i128; only the final narrowing can overflow.
        let bd = b * d;
        let re = a * c + bd;
        let im = a * d + b * c + bd;
        let narrow = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("mul"));
        Ok(GoldenInt {
            a: narrow(re)?,
            b: narrow(im)?,
        })
    }

    pub fn try_scale(self, k: i64) -> Result<Self> {
        self.try_mul(GoldenInt::from_int(k))
    }

    /// τⁿ for `n ≥ 0`.
    pub fn tau_pow(n: u32) -> Result<Self> {
        let mut acc = GoldenInt::ONE;
        for _ in 0..n {
            acc = acc.try_mul(GoldenInt::TAU)?;
        }
        Ok(acc)
    }

    /// Exact sign of the embedded value.
    pub fn signum(self) -> i32 {
        sign_of(2 * self.a as i128 + self.b as i128, self.b as i128)
    }

    /// Exact comparison with a real number.
    pub fn cmp_real(self, r: f64) -> Ordering {
        if r.is_nan() {
            panic!("comparison of GoldenInt with NaN");
        }
        if r == f64::INFINITY {
            return Ordering::Less;
        }
        if r == f64::NEG_INFINITY {
            return Ordering::Greater;
        }
        if self.b == 0 {
            // Integer against real, exactly.
            let fl = r.floor();
            if fl >= i64::MAX as f64 {
                return Ordering::Less;
            }
            if fl < i64::MIN as f64 {
                return Ordering::Greater;
            }
            return match self.a.cmp(&(fl as i64)) {
                Ordering::Equal if r > fl => Ordering::Less,
                o => o,
            };
        }
        // Irrational, so never equal to a double; the double-double
        // residual is far below any representable gap.
        let (hi, lo) = self.embed_dd();
        let (d, e) = two_sum(hi, -r);
        let diff = d + (e + lo);
        if diff > 0.0 {
            Ordering::Greater
        } else if diff < 0.0 {
            Ordering::Less
        } else if lo > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

/// Sign of `s + t√5` for integers `s`, `t`.
fn sign_of(s: i128, t: i128) -> i32 {
    let sg = |v: i128| v.signum() as i32;
    match (sg(s), sg(t)) {
        (0, x) | (x, 0) => x,
        (1, 1) => 1,
        (-1, -1) => -1,
        (ss, _) => {
            // Opposite signs: compare s² with 5t².
            let s2 = mul_wide(s.unsigned_abs(), s.unsigned_abs());
            let ta = t.unsigned_abs();
            let t2 = mul_wide(ta, 5 * ta);
            match s2.cmp(&t2) {
                Ordering::Greater => ss,
                Ordering::Less => -ss,
                Ordering::Equal => unreachable!("√5 is irrational"),
            }
        }
    }
}

/// 128×128 → 256-bit product as `(hi, lo)`.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const M: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & M);
    let (b1, b0) = (b >> 64, b & M);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & M) + (p10 & M);
    let lo = (p00 & M) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

impl Ord for GoldenInt {
    fn cmp(&self, other: &Self) -> Ordering {
        let da = self.a as i128 - other.a as i128;
        let db = self.b as i128 - other.b as i128;
        sign_of(2 * da + db, db).cmp(&0)
    }
}

impl PartialOrd for GoldenInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for GoldenInt {
    fn from(a: i64) -> Self {
        GoldenInt::from_int(a)
    }
}

impl Add for GoldenInt {
    type Output = GoldenInt;
    fn add(self, rhs: Self) -> Self {
        self.try_add(rhs).expect("GoldenInt addition overflow")
    }
}

impl Sub for GoldenInt {
    type Output = GoldenInt;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(rhs).expect("GoldenInt subtraction overflow")
    }
}

impl Mul for GoldenInt {
    type Output = GoldenInt;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(rhs).expect("GoldenInt multiplication overflow")
    }
}

impl Neg for GoldenInt {
    type Output = GoldenInt;
    fn neg(self) -> Self {
        GoldenInt {
            a: self.a.checked_neg().expect("GoldenInt negation overflow"),
            b: self.b.checked_neg().expect("GoldenInt negation overflow"),
        }
    }
}

impl fmt::Display for GoldenInt {
    /// Renders as `a+b*tau` or `a-b*tau`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b < 0 {
            write!(f, "{}-{}*tau", self.a, self.b.unsigned_abs())
        } else {
            write!(f, "{}+{}*tau", self.a, self.b)
        }
    }
}

impl FromStr for GoldenInt {
    type Err = Error;

    /// Accepts `a+b*tau`, `a-b*tau`, `a+-b*tau`, or a bare integer `a`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a GoldenInt: {s:?}"));
        let s = s.trim();
        let Some(body) = s.strip_suffix("*tau") else {
            let a = s.parse::<i64>().map_err(|_| bad())?;
            return Ok(GoldenInt::from_int(a));
        };
        let split = body
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .ok_or_else(bad)?;
        let a = body[..split].parse::<i64>().map_err(|_| bad())?;
        let rest = &body[split..];
        let b_text = rest.strip_prefix('+').unwrap_or(rest);
        if b_text.starts_with('+') {
            return Err(bad());
        }
        let b = b_text.parse::<i128>().map_err(|_| bad())?;
        let b = i64::try_from(b).map_err(|_| bad())?;
        Ok(GoldenInt { a, b })
    }
}

impl Serialize for GoldenInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GoldenInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
