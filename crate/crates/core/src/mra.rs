//! Multiresolution analyses: scaling filters, the cascade realization of the
//! scaling function's spectrum, exact arithmetic on coordinates in `V₁`, and
//! the detail generators `φ₀ = P_{W₀} Dφ`, `φ₁ = P_{W₀} DTφ`.
//!
//! With `Df(x) = √2 f(2x)` and `Tf(x) = f(x - 1)`, a vector with `V₁`
//! coordinates `c` (meaning `f = Σ_k c_k D T^k φ`) has spectrum
//! `f̂(ξ) = 2^{-1/2} ĉ(ξ/2) φ̂(ξ/2)` where `ĉ(η) = Σ_k c_k e^{-2πikη}`.
//! The refinement relation reads `T^l φ = Σ_n h_n D T^{n+2l} φ`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{character, Complex, LineSpectrum, Sequence};

/// Default number of factors in the cascade product.
pub const DEFAULT_DEPTH: usize = 40;

/// Residual threshold for [`ScalingFilter::validate`].
pub const FILTER_TOL: f64 = 1e-10;

/// Finite low-pass filter `h_n` of an orthonormal scaling function.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFilter {
    name: Option<String>,
    coeffs: Sequence,
}

/// Residuals of the two conditions checked by [`ScalingFilter::validate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterValidation {
    /// `|Σ_n h_n - √2|`.
    pub sum_residual: f64,
    /// `max_k |Σ_n h_n conj(h_{n+2k}) - δ_{k0}|`.
    pub orthogonality_residual: f64,
    pub passed: bool,
}

impl ScalingFilter {
    pub fn new(name: Option<String>, offset: i64, coeffs: Vec<Complex>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyFilter);
        }
        if let Some(v) = coeffs.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("non-finite filter coefficient {v}")));
        }
        Ok(Self {
            name,
            coeffs: Sequence::new(offset, coeffs),
        })
    }

    fn real(name: &str, coeffs: &[f64]) -> Self {
        Self {
            name: Some(name.to_string()),
            coeffs: Sequence::new(0, coeffs.iter().map(|v| Complex::new(*v, 0.0)).collect()),
        }
    }

    pub fn haar() -> Self {
        Self::real("haar", &[FRAC_1_SQRT_2, FRAC_1_SQRT_2])
    }

    /// Daubechies filter with two vanishing moments (4 taps).
    pub fn db2() -> Self {
        let s3 = 3f64.sqrt();
        let d = 4.0 * SQRT_2;
        Self::real(
            "db2",
            &[(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d],
        )
    }

    /// Daubechies filter with four vanishing moments (8 taps).
    pub fn db4() -> Self {
        Self::real(
            "db4",
            &[
                0.230_377_813_308_896_4,
                0.714_846_570_552_915_4,
                0.630_880_767_929_858_7,
                -0.027_983_769_416_859_85,
                -0.187_034_811_719_093_1,
                0.030_841_381_835_560_76,
                0.032_883_011_666_885_19,
                -0.010_597_401_785_069_032,
            ],
        )
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn coeffs(&self) -> &Sequence {
        &self.coeffs
    }

    pub fn validate(&self) -> FilterValidation {
        let sum: Complex = self.coeffs.values().iter().sum();
        let sum_residual = (sum - SQRT_2).norm();
        let span = self.coeffs.len() as i64;
        let mut orthogonality_residual: f64 = 0.0;
        for k in 0..=span / 2 {
            let mut acc = Complex::new(0.0, 0.0);
            for (n, h) in self.coeffs.iter() {
                acc += h * self.coeffs.get(n + 2 * k).conj();
            }
            let target = if k == 0 { 1.0 } else { 0.0 };
            orthogonality_residual = orthogonality_residual.max((acc - target).norm());
        }
        FilterValidation {
            sum_residual,
            orthogonality_residual,
            passed: sum_residual <= FILTER_TOL && orthogonality_residual <= FILTER_TOL,
        }
    }

    /// Low-pass symbol `m₀(η) = 2^{-1/2} Σ_n h_n e^{-2πinη}`.
    #[inline]
    pub fn symbol(&self, eta: f64) -> Complex {
        self.coeffs.fourier(eta) * FRAC_1_SQRT_2
    }

    /// `⟨D T^m φ, T^l φ⟩ = conj(h_{m-2l})`.
    #[inline]
    fn refinement_pairing(&self, m: i64, l: i64) -> Complex {
        self.coeffs.get(m - 2 * l).conj()
    }
}

/// Coordinates of a vector of `V₁` in the orthonormal basis `{D T^k φ}`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct V1Coefficients(pub Sequence);

impl V1Coefficients {
    pub fn new(offset: i64, values: Vec<Complex>) -> Self {
        Self(Sequence::new(offset, values))
    }

    pub fn zero() -> Self {
        Self(Sequence::zero())
    }

    /// `D T^k φ`.
    pub fn basis(k: i64) -> Self {
        Self(Sequence::delta(k))
    }

    pub fn sequence(&self) -> &Sequence {
        &self.0
    }

    pub fn inner(&self, other: &Self) -> Complex {
        self.0.dot(&other.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.sub(&other.0))
    }

    pub fn scaled(&self, c: Complex) -> Self {
        Self(self.0.scaled(c))
    }

    /// Coordinates of `T^k f`: since `T D = D T²`, indices move by `2k`.
    pub fn translated(&self, k: i64) -> Self {
        Self(self.0.shifted(2 * k))
    }

    /// `ĉ(η)`.
    pub fn symbol(&self, eta: f64) -> Complex {
        self.0.fourier(eta)
    }
}

/// Coordinates of `T^l φ` in `V₁`: `c_{n+2l} = h_n`.
pub fn translate_in_v1(l: i64, h: &ScalingFilter) -> V1Coefficients {
    V1Coefficients(h.coeffs.shifted(2 * l))
}

/// `l ↦ ⟨f, T^l φ⟩`, computed from the filter alone.
pub fn scaling_pairings(f: &V1Coefficients, h: &ScalingFilter) -> Sequence {
    let c = &f.0;
    if c.is_empty() {
        return Sequence::zero();
    }
    // m - 2l must fall inside the filter support.
    let lo = (c.offset() - h.coeffs.end()).div_euclid(2);
    let hi = (c.end() - h.coeffs.offset()).div_euclid(2) + 1;
    let values = (lo..=hi)
        .map(|l| {
            c.iter()
                .map(|(m, v)| v * h.refinement_pairing(m, l))
                .sum::<Complex>()
        })
        .collect();
    Sequence::new(lo, values)
}

/// Orthogonal projection onto `W₀ = V₁ ⊖ V₀`:
/// `f - Σ_l ⟨f, T^l φ⟩ T^l φ`.
pub fn project_w0(f: &V1Coefficients, h: &ScalingFilter) -> V1Coefficients {
    let mut v0_part = V1Coefficients::zero();
    for (l, a) in scaling_pairings(f, h).iter() {
        if a != Complex::new(0.0, 0.0) {
            v0_part = v0_part.add(&translate_in_v1(l, h).scaled(a));
        }
    }
    f.sub(&v0_part)
}

/// `(φ₀, φ₁) = (P_{W₀} Dφ, P_{W₀} DTφ)`.
pub fn detail_generators(h: &ScalingFilter) -> (V1Coefficients, V1Coefficients) {
    (
        project_w0(&V1Coefficients::basis(0), h),
        project_w0(&V1Coefficients::basis(1), h),
    )
}

/// `k ↦ ⟨f, T^k g⟩ = Σ_n c_n conj(d_{n-2k})`.
///
/// Feeding the result to [`crate::spectral::trig_poly`] gives the bracket
/// `[f̂, ĝ]` exactly.
pub fn autocorrelation(f: &V1Coefficients, g: &V1Coefficients) -> Sequence {
    let (c, d) = (&f.0, &g.0);
    if c.is_empty() || d.is_empty() {
        return Sequence::zero();
    }
    // n - 2k ∈ [d.offset, d.end) for some n ∈ [c.offset, c.end).
    let lo = (c.offset() - d.end()).div_euclid(2);
    let hi = (c.end() - d.offset()).div_euclid(2) + 1;
    let values = (lo..=hi)
        .map(|k| {
            c.iter()
                .map(|(n, v)| v * d.get(n - 2 * k).conj())
                .sum::<Complex>()
        })
        .collect();
    Sequence::new(lo, values)
}

/// Cascade product `φ̂(ξ) = Π_{j=1..J} m₀(2^{-j} ξ)`.
pub fn cascade(h: &ScalingFilter, depth: usize, xi: f64) -> Complex {
    let mut acc = Complex::new(1.0, 0.0);
    let mut x = xi;
    for _ in 0..depth {
        x *= 0.5;
        acc *= h.symbol(x);
    }
    acc
}

pub fn scaling_spectrum(h: &ScalingFilter, depth: usize, periods: usize) -> Result<LineSpectrum> {
    let h = h.clone();
    LineSpectrum::new(periods, move |xi| cascade(&h, depth, xi))
}

/// `f̂(ξ) = 2^{-1/2} ĉ(ξ/2) φ̂(ξ/2)`.
pub fn coords_to_spectrum(
    f: &V1Coefficients,
    h: &ScalingFilter,
    depth: usize,
    periods: usize,
) -> Result<LineSpectrum> {
    let (f, h) = (f.clone(), h.clone());
    LineSpectrum::new(periods, move |xi| {
        let eta = 0.5 * xi;
        f.symbol(eta) * cascade(&h, depth, eta) * FRAC_1_SQRT_2
    })
}

/// Closed form of the Haar scaling spectrum, `e^{-πiξ} sin(πξ)/(πξ)`.
pub fn haar_scaling_closed_form(periods: usize) -> Result<LineSpectrum> {
    LineSpectrum::new(periods, |xi| {
        if xi == 0.0 {
            Complex::new(1.0, 0.0)
        } else {
            Complex::cis(-PI * xi) * ((PI * xi).sin() / (PI * xi))
        }
    })
}

/// Closed form of the spectrum of `χ_[0,1/2) - χ_[1/2,1)`,
/// `(1 - e^{-πiξ})² / (2πiξ)`.
pub fn haar_wavelet_closed_form(periods: usize) -> Result<LineSpectrum> {
    LineSpectrum::new(periods, |xi| {
        if xi == 0.0 {
            Complex::new(0.0, 0.0)
        } else {
            let w = Complex::new(1.0, 0.0) - Complex::cis(-PI * xi);
            w * w / Complex::new(0.0, 2.0 * PI * xi)
        }
    })
}

/// Values of `φ` on the dyadic grid `a + j 2^{-level}` over its support
/// `[a, b]`, from the integer values (the fixed point of the refinement
/// matrix, reached by iterating from `δ` at the left end) refined by
/// `φ(x) = √2 Σ_n h_n φ(2x - n)`.
#[derive(Clone, Debug)]
pub struct DyadicSamples {
    pub start: i64,
    pub level: u32,
    pub values: Vec<Complex>,
}

impl DyadicSamples {
    /// Value at `start + j 2^{-level}`; zero outside the support.
    pub fn at_index(&self, j: i64) -> Complex {
        if j < 0 || j as usize >= self.values.len() {
            Complex::new(0.0, 0.0)
        } else {
            self.values[j as usize]
        }
    }
}

pub fn scaling_function_samples(h: &ScalingFilter, level: u32) -> DyadicSamples {
    let a = h.coeffs.offset();
    let b = h.coeffs.end() - 1;
    let count = (b - a + 1) as usize;
    let refine = |phi_int: &dyn Fn(i64) -> Complex, i: i64| -> Complex {
        h.coeffs
            .iter()
            .map(|(n, hn)| hn * phi_int(2 * i - n))
            .sum::<Complex>()
            * SQRT_2
    };

    let mut ints = vec![Complex::new(0.0, 0.0); count];
    ints[0] = Complex::new(1.0, 0.0);
    for _ in 0..10_000 {
        let prev = ints.clone();
        let lookup = |k: i64| -> Complex {
            if k < a || k > b {
                Complex::new(0.0, 0.0)
            } else {
                prev[(k - a) as usize]
            }
        };
        for (idx, v) in ints.iter_mut().enumerate() {
            *v = refine(&lookup, a + idx as i64);
        }
        let change = ints
            .iter()
            .zip(&prev)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        if change < 1e-16 {
            break;
        }
    }

    let mut values = ints;
    for r in 1..=level {
        let len = (b - a) as usize * (1usize << r) + 1;
        let prev = values;
        let half = 1i64 << (r - 1);
        values = (0..len as i64)
            .map(|j| {
                // x = a + j/2^r, so 2x - n = a + ((a - n) 2^{r-1} + j) / 2^{r-1}.
                h.coeffs
                    .iter()
                    .map(|(n, hn)| {
                        let idx = (a - n) * half + j;
                        if idx < 0 || idx as usize >= prev.len() {
                            Complex::new(0.0, 0.0)
                        } else {
                            hn * prev[idx as usize]
                        }
                    })
                    .sum::<Complex>()
                    * SQRT_2
            })
            .collect();
    }
    DyadicSamples {
        start: a,
        level,
        values,
    }
}

type SymbolFn = dyn Fn(f64) -> Complex + Send + Sync;

/// A vector of `V₁` described by its 1-periodic coordinate symbol `C(η)`, so
/// that `f̂(ξ) = 2^{-1/2} C(ξ/2) φ̂(ξ/2)`. Covers band-limited analyses whose
/// vectors have no finite coordinate sequence.
#[derive(Clone)]
pub struct V1Symbol(Arc<SymbolFn>);

impl fmt::Debug for V1Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("V1Symbol")
    }
}

impl V1Symbol {
    pub fn new<F: Fn(f64) -> Complex + Send + Sync + 'static>(f: F) -> Self {
        Self(Arc::new(f))
    }

    pub fn from_coefficients(c: &V1Coefficients) -> Self {
        let c = c.clone();
        Self::new(move |eta| c.symbol(eta))
    }

    #[inline]
    pub fn eval(&self, eta: f64) -> Complex {
        (self.0)(eta)
    }
}

/// The two ways a multiresolution analysis enters the pipeline: through a
/// finite filter (coefficient path) or as the band-limited Shannon analysis
/// with `φ̂ = χ_[-1/2, 1/2)` (spectral path).
#[derive(Clone, Debug)]
pub enum Mra {
    Filter { filter: ScalingFilter, depth: usize },
    Shannon,
}

impl Mra {
    pub fn builtin(name: &str, depth: usize) -> Option<Self> {
        let filter = match name {
            "haar" => ScalingFilter::haar(),
            "db2" => ScalingFilter::db2(),
            "db4" => ScalingFilter::db4(),
            "shannon" => return Some(Mra::Shannon),
            _ => return None,
        };
        Some(Mra::Filter { filter, depth })
    }

    pub fn name(&self) -> String {
        match self {
            Mra::Filter { filter, .. } => filter.name().unwrap_or("custom").to_string(),
            Mra::Shannon => "shannon".to_string(),
        }
    }

    pub fn filter(&self) -> Option<&ScalingFilter> {
        match self {
            Mra::Filter { filter, .. } => Some(filter),
            Mra::Shannon => None,
        }
    }

    /// `m₀(η)`.
    pub fn low_pass(&self, eta: f64) -> Complex {
        match self {
            Mra::Filter { filter, .. } => filter.symbol(eta),
            Mra::Shannon => {
                let r = eta - (eta + 0.5).floor();
                if (-0.25..0.25).contains(&r) {
                    Complex::new(1.0, 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                }
            }
        }
    }

    pub fn phi_hat_at(&self, xi: f64) -> Complex {
        match self {
            Mra::Filter { filter, depth } => cascade(filter, *depth, xi),
            Mra::Shannon => {
                if (-0.5..0.5).contains(&xi) {
                    Complex::new(1.0, 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                }
            }
        }
    }

    pub fn phi_hat(&self, periods: usize) -> Result<LineSpectrum> {
        let mra = self.clone();
        LineSpectrum::new(periods, move |xi| mra.phi_hat_at(xi))
    }

    pub fn spectrum_of(&self, symbol: &V1Symbol, periods: usize) -> Result<LineSpectrum> {
        let (mra, symbol) = (self.clone(), symbol.clone());
        LineSpectrum::new(periods, move |xi| {
            let eta = 0.5 * xi;
            symbol.eval(eta) * mra.phi_hat_at(eta) * FRAC_1_SQRT_2
        })
    }

    /// `P_{W₀}` on symbols:
    /// `C(η) - m₀(η) [C(η) conj m₀(η) + C(η+½) conj m₀(η+½)]`.
    pub fn project_w0_symbol(&self, symbol: &V1Symbol) -> V1Symbol {
        let (mra, c) = (self.clone(), symbol.clone());
        V1Symbol::new(move |eta| {
            let m = mra.low_pass(eta);
            let m_half = mra.low_pass(eta + 0.5);
            c.eval(eta) - m * (c.eval(eta) * m.conj() + c.eval(eta + 0.5) * m_half.conj())
        })
    }

    /// Symbols of `φ₀` and `φ₁`. Exact trigonometric polynomials on the
    /// coefficient path.
    pub fn detail_symbols(&self) -> (V1Symbol, V1Symbol) {
        match self {
            Mra::Filter { filter, .. } => {
                let (a, b) = detail_generators(filter);
                (V1Symbol::from_coefficients(&a), V1Symbol::from_coefficients(&b))
            }
            Mra::Shannon => (
                self.project_w0_symbol(&V1Symbol::new(|_| Complex::new(1.0, 0.0))),
                self.project_w0_symbol(&V1Symbol::new(character)),
            ),
        }
    }
}
