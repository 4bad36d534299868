//! Orthonormal wavelets from a multiresolution analysis by multiplier fusion.
//!
//! With `p₀ = [φ̂₀, φ̂₀]` and `p₁ = [φ̂₁, φ̂₁]` the periodizations of the two
//! detail generators, `p₀ + p₁ = 1` and the sets
//! `E = {p₀ ≥ ½}`, `F = {p₁ > ½}` partition the circle. The wavelet is
//! `ψ̂ = f φ̂₀ + g φ̂₁` with `f = χ_E / √p₀` and `g = χ_F / √p₁`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::sync::Arc;

use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{diagnose, FrameDiagnostics, FrameOperatorSymbol};
use crate::mra::{
    autocorrelation, detail_generators, scaling_function_samples, scaling_pairings, Mra,
    ScalingFilter, V1Coefficients, V1Symbol,
};
use crate::spectral::{frac, trig_poly, CircleGrid, Complex, LineSpectrum, PeriodicFn, Sequence, SupportSet};

/// Comparisons against `½` treat values within this distance as equal to `½`.
/// Exact-arithmetic ties (Haar has `p₀ ≡ ½`) land a few ulps either side.
pub const TIE_TOL: f64 = 1e-10;

/// Translates `k` with `|k| ≤ GRAM_RANGE` enter the translate Gram check.
pub const GRAM_RANGE: i64 = 8;

/// Minimum number of time samples produced for a compactly supported wavelet.
pub const MIN_TIME_SAMPLES: usize = 4096;

/// Half-width of the time window used when the wavelet has no compact support.
pub const TIME_WINDOW: f64 = 8.0;

/// Tolerances for the three error regimes: exact coefficient algebra,
/// truncated grid sums, and quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub coef: f64,
    pub grid: f64,
    pub quad: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            coef: 1e-10,
            grid: 1e-6,
            quad: 1e-4,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        if [self.coef, self.grid, self.quad]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0)
        {
            Ok(())
        } else {
            Err(Error::Parse("tolerances must be positive and finite".into()))
        }
    }
}

/// Pointwise `E` membership, shared by the grid sets and the `ψ̂` evaluator.
#[inline]
pub fn in_e(p0: f64) -> bool {
    p0 >= 0.5 - TIE_TOL
}

#[inline]
pub fn in_f(p1: f64) -> bool {
    p1 > 0.5 + TIE_TOL
}

#[derive(Clone, Debug)]
enum Periodizer {
    /// Autocorrelations `⟨φ_a, T^k φ_b⟩` of the finite coordinate sequences.
    Exact {
        a00: Sequence,
        a11: Sequence,
        a10: Sequence,
    },
    /// `[f̂, ĝ](ξ) = ½ (C_f(η) conj C_g(η) + C_f(η+½) conj C_g(η+½))`, `η = ξ/2`.
    Symbol,
}

/// The detail generators of an analysis together with exact evaluators of
/// their periodizations.
#[derive(Clone, Debug)]
pub struct DetailPair {
    mra: Mra,
    phi0: V1Symbol,
    phi1: V1Symbol,
    coeffs: Option<(V1Coefficients, V1Coefficients)>,
    periodizer: Periodizer,
}

/// Bracket of two `V₁` vectors from their coordinate symbols, valid for an
/// orthonormal scaling function.
pub fn symbol_bracket(cf: &V1Symbol, cg: &V1Symbol, xi: f64) -> Complex {
    let eta = 0.5 * xi;
    0.5 * (cf.eval(eta) * cg.eval(eta).conj() + cf.eval(eta + 0.5) * cg.eval(eta + 0.5).conj())
}

impl DetailPair {
    pub fn new(mra: &Mra) -> Self {
        let (phi0, phi1) = mra.detail_symbols();
        let (coeffs, periodizer) = match mra.filter() {
            Some(h) => {
                let (a, b) = detail_generators(h);
                let p = Periodizer::Exact {
                    a00: autocorrelation(&a, &a),
                    a11: autocorrelation(&b, &b),
                    a10: autocorrelation(&b, &a),
                };
                (Some((a, b)), p)
            }
            None => (None, Periodizer::Symbol),
        };
        Self {
            mra: mra.clone(),
            phi0,
            phi1,
            coeffs,
            periodizer,
        }
    }

    pub fn mra(&self) -> &Mra {
        &self.mra
    }

    pub fn symbols(&self) -> (&V1Symbol, &V1Symbol) {
        (&self.phi0, &self.phi1)
    }

    /// Coordinates of `φ₀`, `φ₁` on the coefficient path.
    pub fn coefficients(&self) -> Option<&(V1Coefficients, V1Coefficients)> {
        self.coeffs.as_ref()
    }

    pub fn spectra(&self, periods: usize) -> Result<(LineSpectrum, LineSpectrum)> {
        Ok((
            self.mra.spectrum_of(&self.phi0, periods)?,
            self.mra.spectrum_of(&self.phi1, periods)?,
        ))
    }

    /// `p₀(ξ)`; depends on `ξ` only through `frac(ξ)`.
    pub fn p0_at(&self, xi: f64) -> f64 {
        let x = frac(xi);
        match &self.periodizer {
            Periodizer::Exact { a00, .. } => a00.fourier(x).re,
            Periodizer::Symbol => symbol_bracket(&self.phi0, &self.phi0, x).re,
        }
    }

    pub fn p1_at(&self, xi: f64) -> f64 {
        let x = frac(xi);
        match &self.periodizer {
            Periodizer::Exact { a11, .. } => a11.fourier(x).re,
            Periodizer::Symbol => symbol_bracket(&self.phi1, &self.phi1, x).re,
        }
    }

    /// `[φ̂₁, φ̂₀](ξ)`.
    pub fn cross_at(&self, xi: f64) -> Complex {
        let x = frac(xi);
        match &self.periodizer {
            Periodizer::Exact { a10, .. } => a10.fourier(x),
            Periodizer::Symbol => symbol_bracket(&self.phi1, &self.phi0, x),
        }
    }

    pub fn periodizations(&self, grid: CircleGrid) -> Result<(PeriodicFn, PeriodicFn)> {
        match &self.periodizer {
            Periodizer::Exact { a00, a11, .. } => Ok((
                PeriodicFn::from_real(grid, trig_poly(a00, grid).real_values()?)?,
                PeriodicFn::from_real(grid, trig_poly(a11, grid).real_values()?)?,
            )),
            Periodizer::Symbol => Ok((
                PeriodicFn::from_real(grid, grid.points().map(|x| self.p0_at(x)).collect())?,
                PeriodicFn::from_real(grid, grid.points().map(|x| self.p1_at(x)).collect())?,
            )),
        }
    }

    /// Frame diagnostics of `{φ₀, φ₁}` from their exact bracket matrix.
    pub fn diagnostics(&self, grid: CircleGrid, tol: f64) -> Result<FrameDiagnostics> {
        let (p0, p1) = self.periodizations(grid)?;
        let cross = PeriodicFn::from_fn(grid, |x| self.cross_at(x))?;
        let cross_t = cross.map(|v| v.conj())?;
        // entries[i][j] = [φ̂_j, φ̂_i]
        diagnose(
            &FrameOperatorSymbol::from_brackets(&[vec![p0, cross], vec![cross_t, p1]])?,
            tol,
        )
    }
}

/// `max_k |p₀ + p₁ - 1|`.
pub fn premise_residual(p0: &PeriodicFn, p1: &PeriodicFn) -> Result<f64> {
    let a = p0.real_values()?;
    let b = p1.real_values()?;
    if a.len() != b.len() {
        return Err(Error::Mismatch("periodizations on different grids".into()));
    }
    Ok(a.iter().zip(&b).map(|(x, y)| (x + y - 1.0).abs()).fold(0.0, f64::max))
}

/// `E = {p₀ ≥ ½}` and `F = {p₁ > ½}`, after checking `p₀ + p₁ ≡ 1` within `tol`.
pub fn ef_sets(p0: &PeriodicFn, p1: &PeriodicFn, tol: f64) -> Result<(SupportSet, SupportSet)> {
    let residual = premise_residual(p0, p1)?;
    if residual > tol {
        return Err(Error::Premise(format!(
            "periodizations of the detail generators do not sum to one: max residual {residual:e}"
        )));
    }
    let e = p0.real_values()?.into_iter().map(in_e).collect();
    let f = p1.real_values()?.into_iter().map(in_f).collect();
    Ok((SupportSet::new(p0.grid(), e)?, SupportSet::new(p1.grid(), f)?))
}

/// `f = χ_E / √p₀`, `g = χ_F / √p₁`.
pub fn multipliers(
    e: &SupportSet,
    f_set: &SupportSet,
    p0: &PeriodicFn,
    p1: &PeriodicFn,
    tol: f64,
) -> Result<(PeriodicFn, PeriodicFn)> {
    let grid = e.grid();
    if f_set.grid() != grid || p0.grid() != grid || p1.grid() != grid {
        return Err(Error::Mismatch("multiplier inputs on different grids".into()));
    }
    let build = |set: &SupportSet, p: &PeriodicFn, name: &str| -> Result<PeriodicFn> {
        let values = p.real_values()?;
        let mut out = Vec::with_capacity(values.len());
        for (k, v) in values.into_iter().enumerate() {
            if set.contains(k) {
                if v < 0.5 - tol {
                    return Err(Error::Premise(format!(
                        "{name} periodization {v} below 1/2 inside its set at grid index {k}"
                    )));
                }
                out.push(1.0 / v.sqrt());
            } else {
                out.push(0.0);
            }
        }
        PeriodicFn::from_real(grid, out)
    };
    Ok((build(e, p0, "first")?, build(f_set, p1, "second")?))
}

/// The consequence `p₀ ≡ p₁ ≡ ½` of `V₀` reducing the half-translation,
/// which makes `√2 φ₀` an orthonormal wavelet.
pub fn check_half_shift_reduction(p0: &PeriodicFn, p1: &PeriodicFn, tol: f64) -> bool {
    p0.max_deviation_from(0.5) <= tol && p1.max_deviation_from(0.5) <= tol
}

/// Residuals of an orthonormal-wavelet candidate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WaveletReport {
    /// `max |[ψ̂, ψ̂] - 1|`.
    pub periodization_residual: f64,
    /// `max |[ψ̂, φ̂]|`.
    pub v0_orthogonality_residual: f64,
    /// Largest distance of a dilated fiber of `ψ̂` from the `V₁` fiber line.
    pub v1_membership_residual: f64,
    /// `max_{|k| ≤ 8} |⟨ψ, T^k ψ⟩ - δ_{k0}|`.
    pub translate_gram_residual: f64,
}

impl WaveletReport {
    pub fn within(&self, tol: &Tolerances) -> bool {
        self.periodization_residual <= tol.grid
            && self.v0_orthogonality_residual <= tol.grid
            && self.v1_membership_residual <= tol.grid
            && self.translate_gram_residual <= tol.quad
    }

    pub fn within_exact(&self, tol: f64) -> bool {
        self.periodization_residual <= tol
            && self.v0_orthogonality_residual <= tol
            && self.v1_membership_residual <= tol
            && self.translate_gram_residual <= tol
    }
}

/// Recovers the coordinate symbol of a spectrum on the grid `η_j = j / (2n)`
/// by projecting the fiber `(ŝ(2(η + m)))_m` onto the `V₁` fiber line
/// `(φ̂(η + m))_m`. Returns the symbol samples and the largest residual.
fn fiber_symbol(
    s: &LineSpectrum,
    mra: &Mra,
    grid: CircleGrid,
    periods: usize,
) -> Result<(Vec<Complex>, f64)> {
    let fine = 2 * grid.len();
    let l = periods as i64;
    let mut symbol = Vec::with_capacity(fine);
    let mut worst: f64 = 0.0;
    let mut u = Vec::with_capacity(2 * periods);
    let mut v = Vec::with_capacity(2 * periods);
    for j in 0..fine {
        let eta = j as f64 / fine as f64;
        u.clear();
        v.clear();
        for m in -l..l {
            let x = eta + m as f64;
            u.push(s.try_eval(2.0 * x)?);
            v.push(mra.phi_hat_at(x));
        }
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let uv: Complex = u.iter().zip(&v).map(|(a, b)| a * b.conj()).sum();
        let alpha = if vv > 0.0 { uv / vv } else { Complex::new(0.0, 0.0) };
        let res: f64 = u
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - alpha * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(res);
        symbol.push(alpha * SQRT_2);
    }
    Ok((symbol, worst))
}

/// Checks a wavelet candidate in the Fourier domain.
///
/// The candidate's `V₁` coordinate symbol is recovered fiber by fiber (see
/// the membership residual), after which the periodization, the bracket with
/// `φ̂` and the translate Gram all follow from the symbol without truncation
/// of sums over the line.
pub fn verify_wavelet(psi: &LineSpectrum, mra: &Mra, grid: CircleGrid) -> Result<WaveletReport> {
    let periods = psi.periods();
    let n = grid.len();
    let (c_psi, membership) = fiber_symbol(psi, mra, grid, periods)?;
    let phi = mra.phi_hat(periods)?;
    let (c_phi, _) = fiber_symbol(&phi, mra, grid, periods)?;

    let mut per: f64 = 0.0;
    let mut orth: f64 = 0.0;
    let mut p = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b) = (c_psi[k], c_psi[k + n]);
        let pk = 0.5 * (a.norm_sqr() + b.norm_sqr());
        per = per.max((pk - 1.0).abs());
        let cross = 0.5 * (a * c_phi[k].conj() + b * c_phi[k + n].conj());
        orth = orth.max(cross.norm());
        p.push(pk);
    }
    let mut gram: f64 = 0.0;
    for k in -GRAM_RANGE..=GRAM_RANGE {
        let g: Complex = p
            .iter()
            .enumerate()
            .map(|(j, v)| *v * Complex::cis(2.0 * std::f64::consts::PI * (k * j as i64) as f64 / n as f64))
            .sum::<Complex>()
            / n as f64;
        let target = if k == 0 { 1.0 } else { 0.0 };
        gram = gram.max((g - target).norm());
    }
    Ok(WaveletReport {
        periodization_residual: per,
        v0_orthogonality_residual: orth,
        v1_membership_residual: membership,
        translate_gram_residual: gram,
    })
}

/// Exact checks of a wavelet given by finite `V₁` coordinates.
pub fn verify_wavelet_coefficients(
    psi: &V1Coefficients,
    h: &ScalingFilter,
    grid: CircleGrid,
) -> Result<WaveletReport> {
    let auto = autocorrelation(psi, psi);
    let p = trig_poly(&auto, grid);
    let pairings = scaling_pairings(psi, h);
    let gram = (-GRAM_RANGE..=GRAM_RANGE)
        .map(|k| (auto.get(k) - if k == 0 { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max);
    Ok(WaveletReport {
        periodization_residual: p.max_deviation_from(1.0),
        v0_orthogonality_residual: trig_poly(&pairings, grid).max_abs(),
        v1_membership_residual: 0.0,
        translate_gram_residual: gram,
    })
}

/// Build configuration.
#[derive(Clone, Copy, Debug)]
pub struct BuildParams {
    pub grid: CircleGrid,
    pub periods: usize,
    pub tolerances: Tolerances,
    pub time_samples: bool,
}

impl Default for BuildParams {
    fn default() -> Self {
        Self {
            grid: CircleGrid::default(),
            periods: crate::spectral::DEFAULT_PERIODS,
            tolerances: Tolerances::default(),
            time_samples: false,
        }
    }
}

/// Samples `ψ(x_j)` at increasing points `x_j`.
#[derive(Clone, Debug)]
pub struct TimeSamples {
    pub x: Vec<f64>,
    pub values: Vec<Complex>,
}

#[derive(Clone, Debug)]
pub struct WaveletBuildResult {
    pub name: String,
    pub psi_spectrum: LineSpectrum,
    /// Finite `V₁` coordinates of `ψ`, available when the half-shift shortcut
    /// applies on the coefficient path.
    pub psi_coefficients: Option<V1Coefficients>,
    pub psi_samples: Option<TimeSamples>,
    pub e: SupportSet,
    pub f_set: SupportSet,
    pub f: PeriodicFn,
    pub g: PeriodicFn,
    pub p0: PeriodicFn,
    pub p1: PeriodicFn,
    /// `max |p₀ + p₁ - 1|`.
    pub premise_residual: f64,
    /// Grid points with `|p₀ - ½| ≤ TIE_TOL`; these land in `E` only.
    pub tie_count: usize,
    pub used_half_shift_shortcut: bool,
    /// `max |√2 φ̂₀ - ψ̂|` over the sampled line, when the shortcut applies.
    pub shortcut_discrepancy: Option<f64>,
    pub verification: WaveletReport,
    /// Exact report from the coordinates, when they exist.
    pub coefficient_verification: Option<WaveletReport>,
    pub psi_diagnostics: FrameDiagnostics,
    pub detail_diagnostics: FrameDiagnostics,
}

impl WaveletBuildResult {
    pub fn passed(&self, tol: &Tolerances) -> bool {
        self.verification.within(tol)
            && self
                .coefficient_verification
                .is_none_or(|r| r.within_exact(tol.coef))
            && self.shortcut_discrepancy.is_none_or(|d| d <= tol.grid)
    }
}

/// `ψ̂ = f φ̂₀ + g φ̂₁` with the multipliers evaluated pointwise by the same
/// rule as on the grid.
fn pipeline_spectrum(pair: &DetailPair, periods: usize) -> Result<LineSpectrum> {
    let pair = Arc::new(pair.clone());
    LineSpectrum::new(periods, move |xi| {
        let p0 = pair.p0_at(xi);
        let p1 = pair.p1_at(xi);
        let f = if in_e(p0) { 1.0 / p0.sqrt() } else { 0.0 };
        let g = if in_f(p1) { 1.0 / p1.sqrt() } else { 0.0 };
        let eta = 0.5 * xi;
        let phi = pair.mra.phi_hat_at(eta);
        let a = pair.phi0.eval(eta) * phi * FRAC_1_SQRT_2;
        let b = pair.phi1.eval(eta) * phi * FRAC_1_SQRT_2;
        a * f + b * g
    })
}

pub fn build_wavelet(mra: &Mra, params: &BuildParams) -> Result<WaveletBuildResult> {
    params.tolerances.validate()?;
    let grid = params.grid;
    let tol = params.tolerances;
    let pair = DetailPair::new(mra);
    let (p0, p1) = pair.periodizations(grid)?;
    let premise = premise_residual(&p0, &p1)?;
    let (e, f_set) = ef_sets(&p0, &p1, tol.grid)?;
    let tie_count = p0
        .real_values()?
        .iter()
        .filter(|v| (**v - 0.5).abs() <= TIE_TOL)
        .count();
    let (f, g) = multipliers(&e, &f_set, &p0, &p1, tol.grid)?;
    let psi = pipeline_spectrum(&pair, params.periods)?;

    let shortcut = check_half_shift_reduction(&p0, &p1, tol.coef);
    let (phi0_hat, _) = pair.spectra(params.periods)?;
    let shortcut_discrepancy = if shortcut {
        let mut worst: f64 = 0.0;
        for (x, v) in psi.sample_line(grid)? {
            worst = worst.max((phi0_hat.eval(x) * SQRT_2 - v).norm());
        }
        Some(worst)
    } else {
        None
    };

    let psi_coefficients = match (shortcut, pair.coefficients()) {
        (true, Some((a, _))) => Some(a.scaled(Complex::new(SQRT_2, 0.0))),
        _ => None,
    };
    let coefficient_verification = match (&psi_coefficients, mra.filter()) {
        (Some(c), Some(h)) => Some(verify_wavelet_coefficients(c, h, grid)?),
        _ => None,
    };

    let verification = verify_wavelet(&psi, mra, grid)?;
    // [ψ̂, ψ̂] = f² p₀ + g² p₁ on the grid.
    let p_psi = PeriodicFn::from_real(
        grid,
        (0..grid.len())
            .map(|k| {
                let (fk, gk) = (f.value(k).re, g.value(k).re);
                fk * fk * p0.value(k).re + gk * gk * p1.value(k).re
            })
            .collect(),
    )?;
    let psi_diagnostics = diagnose(&FrameOperatorSymbol::from_brackets(&[vec![p_psi]])?, tol.grid)?;
    let detail_diagnostics = pair.diagnostics(grid, tol.grid)?;

    let psi_samples = if params.time_samples {
        Some(match (mra, &psi_coefficients) {
            (Mra::Filter { filter, .. }, Some(c)) => fir_samples_compact(c, filter),
            (Mra::Filter { filter, .. }, None) => {
                let symbol = sample_symbol(&pair, grid);
                fir_samples_window(&symbol, filter)
            }
            (Mra::Shannon, _) => spectral_samples(&psi, grid)?,
        })
    } else {
        None
    };

    Ok(WaveletBuildResult {
        name: mra.name(),
        psi_spectrum: psi,
        psi_coefficients,
        psi_samples,
        e,
        f_set,
        f,
        g,
        p0,
        p1,
        premise_residual: premise,
        tie_count,
        used_half_shift_shortcut: shortcut,
        shortcut_discrepancy,
        verification,
        coefficient_verification,
        psi_diagnostics,
        detail_diagnostics,
    })
}

/// `C_ψ(η) = f(2η) C₀(η) + g(2η) C₁(η)` on `η_j = j / (2n)`.
fn sample_symbol(pair: &DetailPair, grid: CircleGrid) -> Vec<Complex> {
    let fine = 2 * grid.len();
    (0..fine)
        .map(|j| {
            let eta = j as f64 / fine as f64;
            let p0 = pair.p0_at(2.0 * eta);
            let p1 = pair.p1_at(2.0 * eta);
            let f = if in_e(p0) { 1.0 / p0.sqrt() } else { 0.0 };
            let g = if in_f(p1) { 1.0 / p1.sqrt() } else { 0.0 };
            pair.phi0.eval(eta) * f + pair.phi1.eval(eta) * g
        })
        .collect()
}

/// `ψ(x) = √2 Σ_k c_k φ(2x - k)` at `x = s/2 + j 2^{-level}` for
/// `j ∈ [0, count)`, with `φ` sampled at `level - 1`.
fn synthesize(
    c: &Sequence,
    h: &ScalingFilter,
    s: i64,
    level: u32,
    count: usize,
) -> TimeSamples {
    let phi = scaling_function_samples(h, level - 1);
    let (a, b) = (h.coeffs().offset(), h.coeffs().end() - 1);
    let half = 1i64 << (level - 1);
    let step = 1.0 / (1u64 << level) as f64;
    let mut x = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    for j in 0..count as i64 {
        let xj = s as f64 / 2.0 + j as f64 * step;
        // 2x - k ∈ [a, b]  ⇔  k ∈ [2x - b, 2x - a]
        let two_x = 2.0 * xj;
        let k_lo = ((two_x - b as f64).ceil() as i64).max(c.offset());
        let k_hi = ((two_x - a as f64).floor() as i64).min(c.end() - 1);
        let mut acc = Complex::new(0.0, 0.0);
        for k in k_lo..=k_hi {
            acc += c.get(k) * phi.at_index((s - k - a) * half + j);
        }
        x.push(xj);
        values.push(acc * SQRT_2);
    }
    TimeSamples { x, values }
}

/// Samples over the whole support `[(a + c₀)/2, (b + c₁)/2)` at the first
/// dyadic level giving at least [`MIN_TIME_SAMPLES`] points.
fn fir_samples_compact(c: &V1Coefficients, h: &ScalingFilter) -> TimeSamples {
    let seq = &c.0;
    let (a, b) = (h.coeffs().offset(), h.coeffs().end() - 1);
    let s = a + seq.offset();
    let span = (b + seq.end() - 1) - s; // support length times two
    let mut level = 1u32;
    while (span as usize) << (level - 1) < MIN_TIME_SAMPLES {
        level += 1;
    }
    synthesize(seq, h, s, level, (span as usize) << (level - 1))
}

/// Coordinates from a sampled symbol by inverse DFT, then synthesis over
/// `[-8, 8)`.
fn fir_samples_window(symbol: &[Complex], h: &ScalingFilter) -> TimeSamples {
    let m = symbol.len();
    let mut buf = symbol.to_vec();
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let half = (m / 2) as i64;
    let values = (-half..half)
        .map(|k| buf[k.rem_euclid(m as i64) as usize] / m as f64)
        .collect();
    let c = Sequence::new(-half, values);
    let window = (2.0 * TIME_WINDOW) as usize;
    let mut level = 1u32;
    while window << level < MIN_TIME_SAMPLES {
        level += 1;
    }
    synthesize(&c, h, -(2.0 * TIME_WINDOW) as i64, level, window << level)
}

/// `ψ(x) = ∫ ψ̂(ξ) e^{2πixξ} dξ` by inverse FFT of `ψ̂` sampled at spacing
/// `1/n` over `[-L, L)`, giving `x` at spacing `1/(2L)`, restricted to
/// `|x| ≤ 8`.
fn spectral_samples(psi: &LineSpectrum, grid: CircleGrid) -> Result<TimeSamples> {
    let n = grid.len();
    let l = psi.periods();
    let total = 2 * l * n;
    let mut buf = (0..total)
        .map(|j| psi.try_eval(-(l as f64) + j as f64 / n as f64))
        .collect::<Result<Vec<_>>>()?;
    FftPlanner::new().plan_fft_inverse(total).process(&mut buf);
    let reach = (TIME_WINDOW * 2.0 * l as f64) as i64;
    let mut x = Vec::new();
    let mut values = Vec::new();
    for m in -reach..=reach {
        let v = buf[m.rem_euclid(total as i64) as usize] / n as f64;
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        x.push(m as f64 / (2 * l) as f64);
        values.push(v * sign);
    }
    Ok(TimeSamples { x, values })
}
