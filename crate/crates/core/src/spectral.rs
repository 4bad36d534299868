//! Numerical substrate: the circle grid standing in for the dual group of the
//! integers, periodic functions sampled on it, Fourier-side spectra on the
//! line, and the bracket products that tie the two together.
//!
//! Fourier transforms are normalized as `f̂(ξ) = ∫ f(x) e^{-2πixξ} dx`, so
//! integer translation acts on spectra by the character `e^{-2πiξ}` and the
//! dual of the integers is identified with `[0, 1)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Default number of grid points on `[0, 1)`.
pub const DEFAULT_GRID: usize = 1024;
/// Default truncation of integer shifts: sums over `l` run over `[-L, L)`.
pub const DEFAULT_PERIODS: usize = 64;

/// Imaginary parts below this (relative to the real part, floor 1) are treated
/// as rounding noise when a real-valued function is expected.
const REAL_TOL: f64 = 1e-12;

/// `e^{-2πiξ}`.
#[inline]
pub fn character(xi: f64) -> Complex {
    Complex::cis(-2.0 * PI * xi)
}

/// Fractional part in `[0, 1)`. Exact for dyadic rationals.
#[inline]
pub fn frac(xi: f64) -> f64 {
    let r = xi - xi.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Uniform grid `ξ_k = k / n` on `[0, 1)` with normalized Haar measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CircleGrid {
    n: usize,
}

impl CircleGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        k as f64 / self.n as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.point(k))
    }

    /// Weight of one grid cell under the normalized measure.
    pub fn cell_measure(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Index of the cell `[k/n, (k+1)/n)` containing `ξ mod 1`.
    #[inline]
    pub fn cell(&self, xi: f64) -> usize {
        let k = (frac(xi) * self.n as f64).floor() as usize;
        k.min(self.n - 1)
    }

    /// The grid with `factor` times as many points (factor a power of two).
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.n * factor)
    }
}

impl Default for CircleGrid {
    fn default() -> Self {
        Self { n: DEFAULT_GRID }
    }
}

/// A finitely supported complex sequence `k ↦ c_k`, stored as an offset and a
/// contiguous block of values.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Sequence {
    offset: i64,
    values: Vec<Complex>,
}

impl Sequence {
    pub fn new(offset: i64, values: Vec<Complex>) -> Self {
        Self { offset, values }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn delta(k: i64) -> Self {
        Self::new(k, vec![Complex::new(1.0, 0.0)])
    }

    /// Builds a sequence from `(index, value)` pairs; repeated indices add.
    pub fn from_pairs<I: IntoIterator<Item = (i64, Complex)>>(pairs: I) -> Self {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let Some(lo) = pairs.iter().map(|p| p.0).min() else {
            return Self::zero();
        };
        let hi = pairs.iter().map(|p| p.0).max().unwrap();
        let mut values = vec![Complex::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (k, v) in pairs {
            values[(k - lo) as usize] += v;
        }
        Self::new(lo, values)
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// One past the last stored index.
    pub fn end(&self) -> i64 {
        self.offset + self.values.len() as i64
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, k: i64) -> Complex {
        if k < self.offset || k >= self.end() {
            Complex::new(0.0, 0.0)
        } else {
            self.values[(k - self.offset) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(j, v)| (self.offset + j as i64, *v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Complex::new(0.0, 0.0))
    }

    /// Drops leading and trailing entries with modulus at most `tol`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let first = self.values.iter().position(|v| v.norm() > tol);
        let Some(first) = first else {
            return Self::zero();
        };
        let last = self.values.iter().rposition(|v| v.norm() > tol).unwrap();
        Self::new(
            self.offset + first as i64,
            self.values[first..=last].to_vec(),
        )
    }

    pub fn scaled(&self, c: Complex) -> Self {
        Self::new(self.offset, self.values.iter().map(|v| v * c).collect())
    }

    /// The same values re-indexed by `k ↦ k + by`.
    pub fn shifted(&self, by: i64) -> Self {
        Self::new(self.offset + by, self.values.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &Self, op: impl Fn(Complex, Complex) -> Complex) -> Self {
        if self.is_empty() && other.is_empty() {
            return Self::zero();
        }
        let lo = match (self.is_empty(), other.is_empty()) {
            (true, _) => other.offset,
            (_, true) => self.offset,
            _ => self.offset.min(other.offset),
        };
        let hi = self.end().max(other.end());
        let values = (lo..hi).map(|k| op(self.get(k), other.get(k))).collect();
        Self::new(lo, values)
    }

    /// `Σ_k c_k conj(d_k)`.
    pub fn dot(&self, other: &Self) -> Complex {
        self.iter().map(|(k, v)| v * other.get(k).conj()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let lo = self.offset.min(other.offset);
        let hi = self.end().max(other.end());
        (lo..hi)
            .map(|k| (self.get(k) - other.get(k)).norm())
            .fold(0.0, f64::max)
    }

    /// The Fourier series `Σ_k c_k e^{-2πikξ}` at `ξ`.
    pub fn fourier(&self, xi: f64) -> Complex {
        if self.is_empty() {
            return Complex::new(0.0, 0.0);
        }
        let z = character(xi);
        let mut acc = Complex::new(0.0, 0.0);
        for v in self.values.iter().rev() {
            acc = acc * z + v;
        }
        acc * z.powi(self.offset as i32)
    }
}

/// A 1-periodic function sampled at the points of a [`CircleGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicFn {
    grid: CircleGrid,
    values: Vec<Complex>,
}

impl PeriodicFn {
    pub fn new(grid: CircleGrid, values: Vec<Complex>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "{} values for a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { xi: grid.point(k) });
        }
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: CircleGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| Complex::new(v, 0.0)).collect())
    }

    pub fn from_fn(grid: CircleGrid, f: impl Fn(f64) -> Complex) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn constant(grid: CircleGrid, c: Complex) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn value(&self, k: usize) -> Complex {
        self.values[k]
    }

    /// Value on the grid cell containing `ξ mod 1`.
    pub fn at(&self, xi: f64) -> Complex {
        self.values[self.grid.cell(xi)]
    }

    /// Real parts, failing if any imaginary part is more than rounding noise.
    pub fn real_values(&self) -> Result<Vec<f64>> {
        self.values
            .iter()
            .enumerate()
            .map(|(index, v)| {
                if v.im.abs() > REAL_TOL * v.re.abs().max(1.0) {
                    Err(Error::NotReal { index, imag: v.im })
                } else {
                    Ok(v.re)
                }
            })
            .collect()
    }

    pub fn map(&self, f: impl Fn(Complex) -> Complex) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|v| f(*v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex, Complex) -> Complex) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Mismatch("periodic functions on different grids".into()));
        }
        Self::new(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max_k |p(ξ_k) - c|`.
    pub fn max_deviation_from(&self, c: f64) -> f64 {
        self.values
            .iter()
            .map(|v| (v - c).norm())
            .fold(0.0, f64::max)
    }

    /// Essential infimum of the real part, realized as the grid minimum.
    pub fn min_re(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min)
    }

    /// Essential supremum of the real part, realized as the grid maximum.
    pub fn max_re(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Riemann mean over `[0, 1)`.
    pub fn mean(&self) -> Complex {
        self.values.iter().sum::<Complex>() * self.grid.cell_measure()
    }
}

type Evaluator = dyn Fn(f64) -> Complex + Send + Sync;

/// A Fourier transform `f̂` on the line, backed by an evaluator. Values outside
/// `[-L, L)` are treated as negligible by every sum over integer shifts.
#[derive(Clone)]
pub struct LineSpectrum {
    eval: Arc<Evaluator>,
    periods: usize,
}

impl fmt::Debug for LineSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineSpectrum")
            .field("periods", &self.periods)
            .finish_non_exhaustive()
    }
}

/// A constant value on the half-open interval `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub value: Complex,
}

impl LineSpectrum {
    pub fn new<F>(periods: usize, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex + Send + Sync + 'static,
    {
        if periods == 0 {
            return Err(Error::InvalidPeriods);
        }
        Ok(Self {
            eval: Arc::new(eval),
            periods,
        })
    }

    pub fn zero(periods: usize) -> Result<Self> {
        Self::new(periods, |_| Complex::new(0.0, 0.0))
    }

    /// `χ_[a, b)`.
    pub fn indicator(a: f64, b: f64, periods: usize) -> Result<Self> {
        Self::piecewise(
            vec![Piece {
                start: a,
                end: b,
                value: Complex::new(1.0, 0.0),
            }],
            periods,
        )
    }

    /// Sum of constants on half-open intervals.
    pub fn piecewise(pieces: Vec<Piece>, periods: usize) -> Result<Self> {
        Self::new(periods, move |xi| {
            pieces
                .iter()
                .filter(|p| p.start <= xi && xi < p.end)
                .map(|p| p.value)
                .sum()
        })
    }

    #[inline]
    pub fn eval(&self, xi: f64) -> Complex {
        (self.eval)(xi)
    }

    pub fn try_eval(&self, xi: f64) -> Result<Complex> {
        let v = self.eval(xi);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { xi })
        }
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn scaled(&self, c: Complex) -> Self {
        let inner = self.clone();
        Self {
            eval: Arc::new(move |xi| c * inner.eval(xi)),
            periods: self.periods,
        }
    }

    /// Multiplication by `e^{-2πikξ}`, i.e. translation by `k` in time.
    pub fn modulated(&self, k: i64) -> Self {
        let inner = self.clone();
        Self {
            eval: Arc::new(move |xi| character(k as f64 * xi) * inner.eval(xi)),
            periods: self.periods,
        }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.periods != other.periods {
            return Err(Error::Mismatch("spectra with different periods".into()));
        }
        let (a, b) = (self.clone(), other.clone());
        Self::new(self.periods, move |xi| a.eval(xi) + b.eval(xi))
    }

    /// The same evaluator with a different truncation.
    pub fn with_periods(&self, periods: usize) -> Result<Self> {
        if periods == 0 {
            return Err(Error::InvalidPeriods);
        }
        Ok(Self {
            eval: Arc::clone(&self.eval),
            periods,
        })
    }

    /// Samples at `ξ_k + l` for `l ∈ [-L, L)`, ordered by `ξ`.
    pub fn sample_line(&self, grid: CircleGrid) -> Result<Vec<(f64, Complex)>> {
        let l = self.periods as i64;
        let mut out = Vec::with_capacity(2 * self.periods * grid.len());
        for shift in -l..l {
            for xi in grid.points() {
                let x = xi + shift as f64;
                out.push((x, self.try_eval(x)?));
            }
        }
        Ok(out)
    }
}

fn shifts(periods: usize) -> std::ops::Range<i64> {
    -(periods as i64)..periods as i64
}

fn check_periods(s: &LineSpectrum, t: &LineSpectrum) -> Result<()> {
    if s.periods != t.periods {
        return Err(Error::Mismatch(format!(
            "support periods {} and {}",
            s.periods, t.periods
        )));
    }
    Ok(())
}

/// `Σ_{l ∈ [-L, L)} |s(ξ + l)|²` at a single point.
pub fn periodize_at(s: &LineSpectrum, xi: f64) -> Result<f64> {
    let mut acc = 0.0;
    for l in shifts(s.periods) {
        acc += s.try_eval(xi + l as f64)?.norm_sqr();
    }
    Ok(acc)
}

/// The periodization `ξ ↦ Σ_l |s(ξ + l)|²` on the grid.
pub fn periodize(s: &LineSpectrum, grid: CircleGrid) -> Result<PeriodicFn> {
    let values = grid
        .points()
        .map(|xi| periodize_at(s, xi).map(|v| Complex::new(v, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    PeriodicFn::new(grid, values)
}

/// `Σ_{l ∈ [-L, L)} s(ξ + l) conj(t(ξ + l))` at a single point.
pub fn bracket_at(s: &LineSpectrum, t: &LineSpectrum, xi: f64) -> Result<Complex> {
    let mut acc = Complex::new(0.0, 0.0);
    for l in shifts(s.periods) {
        let x = xi + l as f64;
        acc += s.try_eval(x)? * t.try_eval(x)?.conj();
    }
    Ok(acc)
}

/// The bracket product `[s, t]` on the grid.
pub fn bracket(s: &LineSpectrum, t: &LineSpectrum, grid: CircleGrid) -> Result<PeriodicFn> {
    check_periods(s, t)?;
    let values = grid
        .points()
        .map(|xi| bracket_at(s, t, xi))
        .collect::<Result<Vec<_>>>()?;
    PeriodicFn::new(grid, values)
}

/// `∫ s conj(t)` over `[-L, L)`, by the left-point rule on the cells of the
/// grid translated to every period. Exact for piecewise constants whose
/// breakpoints lie on the grid.
pub fn inner_product(s: &LineSpectrum, t: &LineSpectrum, grid: CircleGrid) -> Result<Complex> {
    Ok(bracket(s, t, grid)?.mean())
}

/// Materializes `Σ_k c_k e^{-2πikξ}` on the grid.
pub fn trig_poly(coeffs: &Sequence, grid: CircleGrid) -> PeriodicFn {
    PeriodicFn {
        grid,
        values: grid.points().map(|xi| coeffs.fourier(xi)).collect(),
    }
}

/// Membership flags on the grid points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    grid: CircleGrid,
    member: Vec<bool>,
}

impl SupportSet {
    pub fn new(grid: CircleGrid, member: Vec<bool>) -> Result<Self> {
        if member.len() != grid.len() {
            return Err(Error::Mismatch("support set length".into()));
        }
        Ok(Self { grid, member })
    }

    pub fn full(grid: CircleGrid) -> Self {
        Self {
            grid,
            member: vec![true; grid.len()],
        }
    }

    pub fn empty(grid: CircleGrid) -> Self {
        Self {
            grid,
            member: vec![false; grid.len()],
        }
    }

    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    pub fn contains(&self, k: usize) -> bool {
        self.member[k]
    }

    pub fn members(&self) -> &[bool] {
        &self.member
    }

    pub fn count(&self) -> usize {
        self.member.iter().filter(|m| **m).count()
    }

    pub fn measure(&self) -> f64 {
        self.count() as f64 / self.grid.len() as f64
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a && b)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a || b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a && !b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.member.iter().zip(&other.member).all(|(a, b)| !a || *b)
    }

    /// `χ` of the set as a periodic function.
    pub fn indicator(&self) -> PeriodicFn {
        PeriodicFn {
            grid: self.grid,
            values: self
                .member
                .iter()
                .map(|m| Complex::new(if *m { 1.0 } else { 0.0 }, 0.0))
                .collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        Self {
            grid: self.grid,
            member: self
                .member
                .iter()
                .zip(&other.member)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

/// `{ξ : p(ξ) ≥ threshold}`, or `>` when `strict`.
pub fn support_set(p: &PeriodicFn, threshold: f64, strict: bool) -> Result<SupportSet> {
    let values = p.real_values()?;
    let member = values
        .iter()
        .map(|v| if strict { *v > threshold } else { *v >= threshold })
        .collect();
    SupportSet::new(p.grid(), member)
}
