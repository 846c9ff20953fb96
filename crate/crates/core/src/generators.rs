//! Finite patches of the archetypal point sets: lattice crystals, the
//! Fibonacci model set, Thue–Morse, Rudin–Shapiro, Bernoulli chains, the
//! random-sign Rudin–Shapiro family, and random Fibonacci tilings.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::comb::{lex_less, Patch, Positions, WeightedComb};
use crate::error::{Error, Result};
use crate::goldenring::GoldenInt;
use crate::lattice::candidates_in_rect;
use crate::seeding::{rng_from_seed, uniform};

/// Largest Thue–Morse order accepted.
pub const MAX_THUE_MORSE_ORDER: u32 = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotifSite {
    /// Fractional coordinates in `[0, 1)^d`.
    pub frac: Vec<f64>,
    pub weight: Complex64,
}

/// Lattice Γ (columns of `basis`) decorated with a finite motif.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrystalSpec {
    dim: usize,
    /// Row-major `dim × dim`; column `j` is the `j`-th generator of Γ.
    basis: Vec<f64>,
    motif: Vec<MotifSite>,
}

impl CrystalSpec {
    /// `rows` is the basis matrix given row by row.
    pub fn new(rows: Vec<Vec<f64>>, motif: Vec<MotifSite>) -> Result<Self> {
        let dim = rows.len();
        if !(1..=3).contains(&dim) || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("basis", "must be a square matrix of size 1, 2 or 3"));
        }
        let basis: Vec<f64> = rows.into_iter().flatten().collect();
        if basis.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("basis", "entries must be finite"));
        }
        let det = DMatrix::from_row_slice(dim, dim, &basis).determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularBasis(det));
        }
        if motif.is_empty() {
            return Err(Error::invalid("motif", "must contain at least one site"));
        }
        for site in &motif {
            if site.frac.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: site.frac.len(),
                });
            }
            if site.frac.iter().any(|f| !(0.0..1.0).contains(f)) {
                return Err(Error::invalid(
                    "motif",
                    format!("fractional coordinates {:?} outside [0, 1)", site.frac),
                ));
            }
        }
        Ok(CrystalSpec { dim, basis, motif })
    }

    /// ℤ^d with the given motif.
    pub fn cubic(dim: usize, motif: Vec<MotifSite>) -> Result<Self> {
        let rows = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        CrystalSpec::new(rows, motif)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn motif(&self) -> &[MotifSite] {
        &self.motif
    }

    pub fn basis(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.basis)
    }

    /// dens Γ = 1/|det basis|.
    pub fn lattice_density(&self) -> f64 {
        1.0 / self.basis().determinant().abs()
    }
}

/// Endpoint of an interval window in internal space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowBound {
    /// `num / den` with `num ∈ ℤ[τ]`, `den > 0`; compared exactly.
    Exact { num: GoldenInt, den: i64 },
    Real(f64),
}

impl WindowBound {
    pub fn golden(x: GoldenInt) -> Self {
        WindowBound::Exact { num: x, den: 1 }
    }

    pub fn value(&self) -> f64 {
        match *self {
            WindowBound::Exact { num, den } => num.embed() / den as f64,
            WindowBound::Real(r) => r,
        }
    }

    /// Position of `x` relative to this bound.
    pub fn locate(&self, x: GoldenInt) -> Result<Ordering> {
        Ok(match *self {
            WindowBound::Exact { num, den } => x.try_scale(den)?.cmp(&num),
            WindowBound::Real(r) => x.cmp_real(r),
        })
    }
}

/// Half-open window `(lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalWindow {
    lo: WindowBound,
    hi: WindowBound,
}

impl IntervalWindow {
    pub fn new(lo: WindowBound, hi: WindowBound) -> Result<Self> {
        for b in [lo, hi] {
            match b {
                WindowBound::Exact { den, .. } if den <= 0 => {
                    return Err(Error::invalid("window", "denominator must be positive"))
                }
                WindowBound::Real(r) if !r.is_finite() => {
                    return Err(Error::invalid("window", "bounds must be finite"))
                }
                _ => {}
            }
        }
        let ordered = match (lo, hi) {
            (
                WindowBound::Exact { num: n1, den: d1 },
                WindowBound::Exact { num: n2, den: d2 },
            ) => n1.try_scale(d2)? < n2.try_scale(d1)?,
            _ => lo.value() < hi.value(),
        };
        if !ordered {
            return Err(Error::invalid("window", "need lo < hi"));
        }
        Ok(IntervalWindow { lo, hi })
    }

    pub fn lo(&self) -> WindowBound {
        self.lo
    }

    pub fn hi(&self) -> WindowBound {
        self.hi
    }

    /// vol(W) = hi − lo.
    pub fn length(&self) -> f64 {
        self.hi.value() - self.lo.value()
    }

    /// Exact test `lo < y ≤ hi`.
    pub fn contains(&self, y: GoldenInt) -> Result<bool> {
        Ok(self.lo.locate(y)? == Ordering::Greater && self.hi.locate(y)? != Ordering::Greater)
    }
}

/// Cut-and-project scheme over ℤ[τ]: the embedding lattice is spanned by
/// `(g, g⋆)` for the two generators, and `window` lives in internal space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpsSpec {
    generators: [GoldenInt; 2],
    window: IntervalWindow,
}

impl CpsSpec {
    pub fn new(generators: [GoldenInt; 2], window: IntervalWindow) -> Result<Self> {
        let [g1, g2] = generators;
        let det = g1
            .try_mul(g2.try_star()?)?
            .try_sub(g2.try_mul(g1.try_star()?)?)?;
        if det == GoldenInt::ZERO {
            return Err(Error::SingularBasis(0.0));
        }
        Ok(CpsSpec { generators, window })
    }

    /// Generators `1, τ` and window `(−1, τ − 1]`.
    pub fn fibonacci() -> Self {
        let window = IntervalWindow::new(
            WindowBound::golden(GoldenInt::from_int(-1)),
            WindowBound::golden(GoldenInt::new(-1, 1)),
        )
        .expect("valid window");
        CpsSpec::new([GoldenInt::ONE, GoldenInt::TAU], window).expect("valid scheme")
    }

    pub fn with_window(self, window: IntervalWindow) -> Self {
        CpsSpec { window, ..self }
    }

    pub fn generators(&self) -> [GoldenInt; 2] {
        self.generators
    }

    pub fn window(&self) -> &IntervalWindow {
        &self.window
    }

    /// Rows `(g, g⋆)` for each generator.
    pub fn embedding_basis(&self) -> [[f64; 2]; 2] {
        self.generators.map(|g| [g.embed(), g.star().embed()])
    }

    pub fn determinant(&self) -> f64 {
        let [g1, g2] = self.generators;
        (g1 * g2.star() - g2 * g1.star()).embed()
    }

    /// dens Λ = vol(W) / |det 𝓛|.
    pub fn density(&self) -> f64 {
        self.window.length() / self.determinant().abs()
    }
}

/// Seed and Bernoulli parameter of a random generator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub seed: u64,
    /// Probability of `+1` (signs) or of a long tile (tilings).
    pub p: f64,
}

impl RandomSpec {
    pub fn new(seed: u64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("p", format!("{p} is not in [0, 1]")));
        }
        Ok(RandomSpec { seed, p })
    }
}

/// Lattice translates of the motif inside the closed ball of `radius`.
/// An empty comb is returned (not an error) when nothing fits.
pub fn gen_crystal_patch(spec: &CrystalSpec, radius: f64) -> Result<WeightedComb> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::invalid("radius", "must be positive and finite"));
    }
    let d = spec.dim();
    let basis = spec.basis();
    let inv = basis
        .clone()
        .try_inverse()
        .ok_or(Error::SingularBasis(basis.determinant()))?;
    let reach: Vec<f64> = (0..d).map(|i| inv.row(i).norm() * radius).collect();
    let r2 = radius * radius * (1.0 + 1e-12);

    let mut points: Vec<(Vec<f64>, Complex64)> = Vec::new();
    for site in spec.motif() {
        let ranges: Vec<(i64, i64)> = (0..d)
            .map(|i| {
                let lo = (-site.frac[i] - reach[i]).ceil() as i64 - 1;
                let hi = (-site.frac[i] + reach[i]).floor() as i64 + 1;
                (lo, hi)
            })
            .collect();
        let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'outer: loop {
            let x: Vec<f64> = (0..d)
                .map(|row| {
                    (0..d)
                        .map(|col| basis[(row, col)] * (idx[col] as f64 + site.frac[col]))
                        .sum()
                })
                .collect();
            if x.iter().map(|v| v * v).sum::<f64>() <= r2 {
                points.push((x, site.weight));
            }
            for axis in 0..d {
                if idx[axis] < ranges[axis].1 {
                    idx[axis] += 1;
                    continue 'outer;
                }
                idx[axis] = ranges[axis].0;
            }
            break;
        }
    }
    points.sort_by(|p, q| {
        if lex_less(&p.0, &q.0) {
            Ordering::Less
        } else if lex_less(&q.0, &p.0) {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    });
    points.dedup_by(|p, q| p.0 == q.0);

    let weights = points.iter().map(|p| p.1).collect();
    let coords = points.into_iter().flat_map(|p| p.0).collect();
    WeightedComb::new(
        Positions::Real { dim: d, coords },
        weights,
        Patch::Ball { dim: d, radius },
    )
}

/// Model set `{x ∈ L : x ∈ [lo, hi], x⋆ ∈ W}` with unit weights. Both
/// conditions are decided in exact arithmetic.
pub fn gen_fibonacci_model_set(cps: &CpsSpec, (lo, hi): (f64, f64)) -> Result<WeightedComb> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::invalid("range", "need finite lo < hi"));
    }
    let window = cps.window();
    let (w_lo, w_hi) = (window.lo().value(), window.hi().value());
    let [g1, g2] = cps.generators();
    let candidates = candidates_in_rect(cps.embedding_basis(), (lo, hi), (w_lo, w_hi))?;

    let mut points = Vec::new();
    for (m, n) in candidates {
        let x = g1.try_scale(m)?.try_add(g2.try_scale(n)?)?;
        if x.cmp_real(lo) == Ordering::Less || x.cmp_real(hi) == Ordering::Greater {
            continue;
        }
        if window.contains(x.try_star()?)? {
            points.push(x);
        }
    }
    points.sort();
    points.dedup();
    let weights = vec![Complex64::new(1.0, 0.0); points.len()];
    WeightedComb::new(Positions::Golden(points), weights, Patch::interval(lo, hi))
}

/// Thue–Morse word `v⁽ⁿ⁾` of length `2ⁿ` as ±1, built by
/// `v⁽ⁿ⁺¹⁾ = v⁽ⁿ⁾ v̄⁽ⁿ⁾` from `v⁽⁰⁾ = 1`.
pub fn thue_morse_word(n: u32) -> Result<Vec<i8>> {
    if n > MAX_THUE_MORSE_ORDER {
        return Err(Error::invalid(
            "n",
            format!("{n} exceeds {MAX_THUE_MORSE_ORDER}"),
        ));
    }
    let mut word = Vec::with_capacity(1 << n);
    word.push(1i8);
    for _ in 0..n {
        let flipped: Vec<i8> = word.iter().map(|v| -v).collect();
        word.extend(flipped);
    }
    Ok(word)
}

pub fn gen_thue_morse(n: u32) -> Result<WeightedComb> {
    let word = thue_morse_word(n)?;
    let len = word.len() as i64;
    WeightedComb::new(
        Positions::Integer((0..len).collect()),
        word.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect(),
        Patch::interval(0.0, len as f64),
    )
}

/// Two-sided Rudin–Shapiro weight: `w(0) = 1`, `w(−1) = −1`, and for
/// `m = 4n + ℓ`, `w(m) = w(n)` if `ℓ ∈ {0, 1}`, else `(−1)^{n+ℓ} w(n)`.
pub fn rudin_shapiro(mut m: i64) -> i8 {
    let mut sign = 1i8;
    while m != 0 && m != -1 {
        let n = m.div_euclid(4);
        let l = m.rem_euclid(4);
        if l >= 2 && (n + l).rem_euclid(2) == 1 {
            sign = -sign;
        }
        m = n;
    }
    if m == 0 {
        sign
    } else {
        -sign
    }
}

fn integer_range(lo: i64, hi: i64) -> Result<Patch> {
    if hi < lo {
        return Err(Error::invalid("range", "need lo ≤ hi"));
    }
    let end = hi.checked_add(1).ok_or(Error::Overflow("range"))?;
    Ok(Patch::interval(lo as f64, end as f64))
}

/// Rudin–Shapiro weights on the integers `lo..=hi`.
pub fn gen_rudin_shapiro((lo, hi): (i64, i64)) -> Result<WeightedComb> {
    let patch = integer_range(lo, hi)?;
    WeightedComb::new(
        Positions::Integer((lo..=hi).collect()),
        (lo..=hi)
            .map(|m| Complex64::new(rudin_shapiro(m) as f64, 0.0))
            .collect(),
        patch,
    )
}

/// i.i.d. signs on `lo..=hi`: `+1` with probability `p`, drawn in index order.
pub fn gen_bernoulli(spec: &RandomSpec, (lo, hi): (i64, i64)) -> Result<WeightedComb> {
    let spec = RandomSpec::new(spec.seed, spec.p)?;
    let patch = integer_range(lo, hi)?;
    let mut rng = rng_from_seed(spec.seed);
    let weights = (lo..=hi)
        .map(|_| {
            let x = if uniform(&mut rng) < spec.p { 1.0 } else { -1.0 };
            Complex64::new(x, 0.0)
        })
        .collect();
    WeightedComb::new(Positions::Integer((lo..=hi).collect()), weights, patch)
}

/// `w(n)·X(n)` with Rudin–Shapiro `w` and the signs `X` of
/// [`gen_bernoulli`] for the same spec and range.
pub fn gen_rs_bernoulli(spec: &RandomSpec, range: (i64, i64)) -> Result<WeightedComb> {
    let signs = gen_bernoulli(spec, range)?;
    let weights = (range.0..=range.1)
        .zip(signs.weights())
        .map(|(m, x)| x * rudin_shapiro(m) as f64)
        .collect();
    WeightedComb::new(signs.positions().clone(), weights, signs.patch().clone())
}

/// Left endpoints of `count` consecutive tiles starting at 0; each tile is
/// long (τ) with probability `p`, else short (1). Endpoint `a + bτ` counts
/// `a` short and `b` long tiles laid so far.
pub fn gen_random_fibonacci_tiling(spec: &RandomSpec, count: usize) -> Result<WeightedComb> {
    let spec = RandomSpec::new(spec.seed, spec.p)?;
    if count == 0 {
        return Err(Error::invalid("count", "need at least one tile"));
    }
    let mut rng = rng_from_seed(spec.seed);
    let mut end = GoldenInt::ZERO;
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        points.push(end);
        let step = if uniform(&mut rng) < spec.p {
            GoldenInt::TAU
        } else {
            GoldenInt::ONE
        };
        end = end.try_add(step)?;
    }
    WeightedComb::new(
        Positions::Golden(points),
        vec![Complex64::new(1.0, 0.0); count],
        Patch::interval(0.0, end.embed()),
    )
}
