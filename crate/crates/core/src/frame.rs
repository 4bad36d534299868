//! Frames of integer translates, computed fiber by fiber.
//!
//! A shift-invariant subspace of `L²(ℝ)` is identified with vector-valued
//! functions on `[0, 1)` through `f ↦ (f̂(ξ + l))_l`. Translation by `k` becomes
//! multiplication by the scalar `e^{-2πikξ}`, so the frame operator of the
//! translates of a generator set acts at each `ξ` as the finite matrix
//! `Σ_i w_i(ξ) w_i(ξ)^*`. Bounds, multiplicity, tightening, complements and
//! fusion all reduce to small dense linear algebra on these fibers.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spectral::{CircleGrid, Complex, LineSpectrum, PeriodicFn, SupportSet};

/// Singular values below this fraction of the largest one in the same fiber
/// do not count towards the rank.
pub const RANK_EPS: f64 = 1e-8;

/// A fiber whose largest singular value is below this fraction of the largest
/// over all fibers is treated as zero.
pub const ZERO_FIBER_EPS: f64 = 1e-12;

/// Eigenvalues of a Gramian built from brackets (no fibers available) carry
/// absolute rounding of order `1e-16 λ_max`; ranks are cut here instead of at
/// `RANK_EPS²`.
pub const GRAM_EPS: f64 = 1e-12;

const JACOBI_SWEEPS: usize = 64;
const JACOBI_EPS: f64 = 1e-15;

/// Frames with lower bound at or below this cannot be tightened.
pub const ILL_CONDITIONED_EPS: f64 = 1e-10;

/// Number of grid points (in units of one cell) on which an almost-everywhere
/// condition may fail.
pub const AE_SLACK_CELLS: usize = 2;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// An ordered list of spectra sharing a grid and a truncation.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    grid: CircleGrid,
    periods: usize,
    generators: Vec<LineSpectrum>,
}

impl GeneratorSet {
    pub fn new(grid: CircleGrid, periods: usize, generators: Vec<LineSpectrum>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Mismatch("generator set must be nonempty".into()));
        }
        let set = Self {
            grid,
            periods,
            generators,
        };
        set.check_periods()?;
        Ok(set)
    }

    /// The empty collection, used for a trivial subspace.
    pub fn empty(grid: CircleGrid, periods: usize) -> Self {
        Self {
            grid,
            periods,
            generators: Vec::new(),
        }
    }

    fn check_periods(&self) -> Result<()> {
        if self.periods == 0 {
            return Err(Error::InvalidPeriods);
        }
        if let Some(g) = self.generators.iter().find(|g| g.periods() != self.periods) {
            return Err(Error::Mismatch(format!(
                "generator with {} periods in a set with {}",
                g.periods(),
                self.periods
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[LineSpectrum] {
        &self.generators
    }

    pub fn get(&self, i: usize) -> Result<&LineSpectrum> {
        self.generators.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.len(),
        })
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.periods != other.periods {
            return Err(Error::Mismatch(
                "generator sets on different grids or truncations".into(),
            ));
        }
        Ok(())
    }
}

/// Samples `(f̂_i(ξ_k + l))_{l ∈ [-L, L)}` for every generator and grid point.
#[derive(Clone, Debug)]
pub struct Fiberization {
    grid: CircleGrid,
    periods: usize,
    count: usize,
    data: Vec<Complex>,
}

impl Fiberization {
    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    /// Number of generators.
    pub fn count(&self) -> usize {
        self.count
    }

    /// Length of one fiber, `2L`.
    pub fn width(&self) -> usize {
        2 * self.periods
    }

    pub fn fiber(&self, generator: usize, k: usize) -> &[Complex] {
        let w = self.width();
        let start = (generator * self.grid.len() + k) * w;
        &self.data[start..start + w]
    }

    /// The `2L × r` matrix whose columns are the generator fibers at `ξ_k`.
    pub fn matrix(&self, k: usize) -> DMatrix<Complex> {
        self.columns(k, 0..self.count)
    }

    fn columns(&self, k: usize, gens: impl Iterator<Item = usize> + Clone) -> DMatrix<Complex> {
        let cols: Vec<usize> = gens.collect();
        DMatrix::from_fn(self.width(), cols.len(), |l, c| self.fiber(cols[c], k)[l])
    }

    /// `mean_k ‖f_i(ξ_k)‖²`, which approximates `‖f_i‖²`.
    pub fn mean_energy(&self, generator: usize) -> f64 {
        (0..self.grid.len())
            .map(|k| self.fiber(generator, k).iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            * self.grid.cell_measure()
    }
}

pub fn fiberize(gens: &GeneratorSet) -> Result<Fiberization> {
    gens.check_periods()?;
    let grid = gens.grid;
    let l = gens.periods as i64;
    let mut data = Vec::with_capacity(gens.len() * grid.len() * 2 * gens.periods);
    for g in &gens.generators {
        for xi in grid.points() {
            for shift in -l..l {
                data.push(g.try_eval(xi + shift as f64)?);
            }
        }
    }
    Ok(Fiberization {
        grid,
        periods: gens.periods,
        count: gens.len(),
        data,
    })
}

/// Thin SVD of one fiber matrix, truncated to its numerical rank.
struct FiberSvd {
    /// `width × rank`, orthonormal columns spanning the fiber subspace.
    u: DMatrix<Complex>,
    sigma: Vec<f64>,
    /// `count × rank`.
    v: DMatrix<Complex>,
    sigma_max: f64,
}

impl FiberSvd {
    fn rank(&self) -> usize {
        self.sigma.len()
    }
}

/// One-sided Jacobi: rotates pairs of columns of `m` until they are mutually
/// orthogonal, accumulating the rotations in `V`. The final column norms are
/// the singular values and `m V = U Σ`.
fn jacobi_svd(mut m: DMatrix<Complex>) -> (DMatrix<Complex>, DMatrix<Complex>) {
    let n = m.ncols();
    let mut v = DMatrix::<Complex>::identity(n, n);
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = m.column(p).norm_squared();
                let beta = m.column(q).norm_squared();
                let gamma = m.column(p).dotc(&m.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= JACOBI_EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut m, &mut v] {
                    for r in 0..mat.nrows() {
                        let a = mat[(r, p)];
                        let b = mat[(r, q)] * phase.conj();
                        mat[(r, p)] = a * c - b * s;
                        mat[(r, q)] = a * s + b * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (m, v)
}

fn fiber_svd(m: DMatrix<Complex>, zero_floor: f64) -> FiberSvd {
    let rows = m.nrows();
    if m.ncols() == 0 {
        return FiberSvd {
            u: DMatrix::zeros(rows, 0),
            sigma: vec![],
            v: DMatrix::zeros(0, 0),
            sigma_max: 0.0,
        };
    }
    let (us, v_full) = jacobi_svd(m);
    let norms: Vec<f64> = us.column_iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..norms.len()).collect();
    order.sort_by(|a, b| norms[*b].total_cmp(&norms[*a]));
    let sigma_max = norms[order[0]];
    let cutoff = (RANK_EPS * sigma_max).max(zero_floor);
    let keep: Vec<usize> = order
        .into_iter()
        .filter(|i| norms[*i] > cutoff && norms[*i] > 0.0)
        .collect();
    let u = DMatrix::from_fn(rows, keep.len(), |r, c| us[(r, keep[c])] / norms[keep[c]]);
    let v = DMatrix::from_fn(v_full.nrows(), keep.len(), |r, c| v_full[(r, keep[c])]);
    let sigma = keep.iter().map(|i| norms[*i]).collect();
    FiberSvd {
        u,
        sigma,
        v,
        sigma_max,
    }
}

fn global_floor(fib: &Fiberization) -> f64 {
    let max = fib.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
    // The largest entry is within a factor √(2L r) of the largest singular value.
    ZERO_FIBER_EPS * max
}

fn fiber_svds(fib: &Fiberization, gens: &[usize]) -> Vec<FiberSvd> {
    let floor = global_floor(fib);
    (0..fib.grid.len())
        .map(|k| fiber_svd(fib.columns(k, gens.iter().copied()), floor))
        .collect()
}

/// Per-frequency frame operator data: the Gramian `G(ξ)` of the generator
/// fibers and the nonzero eigenvalues of the frame operator at `ξ`, which are
/// the nonzero eigenvalues of `G(ξ)`.
#[derive(Clone, Debug)]
pub struct FrameOperatorSymbol {
    grid: CircleGrid,
    gram: Vec<DMatrix<Complex>>,
    eigenvalues: Vec<Vec<f64>>,
}

impl FrameOperatorSymbol {
    pub fn from_fiberization(fib: &Fiberization) -> Self {
        let all: Vec<usize> = (0..fib.count).collect();
        let svds = fiber_svds(fib, &all);
        let gram = (0..fib.grid.len())
            .map(|k| {
                let m = fib.matrix(k);
                m.adjoint() * m
            })
            .collect();
        let eigenvalues = svds
            .iter()
            .map(|s| s.sigma.iter().map(|v| v * v).collect())
            .collect();
        Self {
            grid: fib.grid,
            gram,
            eigenvalues,
        }
    }

    /// From bracket products: `entries[i][j] = [ŵ_j, ŵ_i]`, i.e. the Gramian
    /// `G_{ij}(ξ) = ⟨w_j(ξ), w_i(ξ)⟩` in fiber coordinates.
    pub fn from_brackets(entries: &[Vec<PeriodicFn>]) -> Result<Self> {
        let r = entries.len();
        if r == 0 || entries.iter().any(|row| row.len() != r) {
            return Err(Error::Mismatch("bracket matrix must be square and nonempty".into()));
        }
        let grid = entries[0][0].grid();
        if entries.iter().flatten().any(|p| p.grid() != grid) {
            return Err(Error::Mismatch("bracket entries on different grids".into()));
        }
        let gram: Vec<DMatrix<Complex>> = (0..grid.len())
            .map(|k| {
                let m = DMatrix::from_fn(r, r, |i, j| entries[i][j].value(k));
                // Symmetrize away rounding so the Hermitian solver sees a Hermitian matrix.
                (&m + m.adjoint()) * Complex::new(0.5, 0.0)
            })
            .collect();
        let global = gram
            .iter()
            .map(|g| (0..r).map(|i| g[(i, i)].re).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let eigenvalues = gram
            .iter()
            .map(|g| {
                let mut ev: Vec<f64> = g.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
                ev.sort_by(|a, b| b.total_cmp(a));
                let top = ev.first().copied().unwrap_or(0.0);
                let cutoff = (GRAM_EPS * top).max(ZERO_FIBER_EPS * ZERO_FIBER_EPS * global);
                ev.into_iter().filter(|v| *v > cutoff && *v > 0.0).collect()
            })
            .collect();
        Ok(Self {
            grid,
            gram,
            eigenvalues,
        })
    }

    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    pub fn gram(&self, k: usize) -> &DMatrix<Complex> {
        &self.gram[k]
    }

    /// Nonzero eigenvalues at `ξ_k`, largest first.
    pub fn eigenvalues(&self, k: usize) -> &[f64] {
        &self.eigenvalues[k]
    }

    pub fn rank(&self, k: usize) -> usize {
        self.eigenvalues[k].len()
    }
}

/// Frame bounds and spectral multiplicity of a generator set.
#[derive(Clone, Debug)]
pub struct FrameDiagnostics {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub is_tight: bool,
    pub is_normalized_tight: bool,
    /// Integer-valued fiber rank.
    pub multiplicity: PeriodicFn,
    /// Set when some fiber has rank above one: the bounds then come from the
    /// fiber Gramian eigenvalues rather than the single-fiber formula.
    pub fiberized_extension: bool,
}

impl FrameDiagnostics {
    pub fn multiplicity_at(&self, k: usize) -> usize {
        self.multiplicity.value(k).re as usize
    }

    /// Multiplicity value ↦ number of grid points attaining it.
    pub fn multiplicity_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for k in 0..self.multiplicity.grid().len() {
            *hist.entry(self.multiplicity_at(k)).or_insert(0) += 1;
        }
        hist
    }
}

/// Ranks of the generator fibers at every grid point.
pub fn multiplicity(fib: &Fiberization) -> PeriodicFn {
    let all: Vec<usize> = (0..fib.count).collect();
    let ranks = fiber_svds(fib, &all)
        .iter()
        .map(|s| Complex::new(s.rank() as f64, 0.0))
        .collect();
    PeriodicFn::new(fib.grid, ranks).expect("ranks are finite")
}

/// Bounds from a precomputed operator symbol. `tol` decides tightness.
pub fn diagnose(symbol: &FrameOperatorSymbol, tol: f64) -> Result<FrameDiagnostics> {
    let grid = symbol.grid;
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    let mut extension = false;
    for k in 0..grid.len() {
        let ev = symbol.eigenvalues(k);
        if let (Some(max), Some(min)) = (ev.first(), ev.last()) {
            upper = upper.max(*max);
            lower = lower.min(*min);
            extension |= ev.len() > 1;
        }
    }
    if !lower.is_finite() {
        return Err(Error::EmptySpan);
    }
    let multiplicity = PeriodicFn::from_real(
        grid,
        (0..grid.len()).map(|k| symbol.rank(k) as f64).collect(),
    )?;
    Ok(FrameDiagnostics {
        lower_bound: lower,
        upper_bound: upper,
        is_tight: upper - lower <= tol,
        is_normalized_tight: (lower - 1.0).abs() <= tol && (upper - 1.0).abs() <= tol,
        multiplicity,
        fiberized_extension: extension,
    })
}

/// `A = ess inf`, `B = ess sup` of the nonzero frame-operator eigenvalues over
/// the frequencies where the generators do not all vanish. For generators whose
/// fibers are all parallel this is `Σ_i |ŵ_i|²` in the cyclic picture.
pub fn frame_bounds(gens: &GeneratorSet, tol: f64) -> Result<FrameDiagnostics> {
    if gens.is_empty() {
        return Err(Error::EmptySpan);
    }
    let fib = fiberize(gens)?;
    diagnose(&FrameOperatorSymbol::from_fiberization(&fib), tol)
}

/// A spectrum formed at each frequency as a combination of base spectra with
/// 1-periodic weights held constant on grid cells.
fn combination(
    grid: CircleGrid,
    periods: usize,
    bases: Vec<LineSpectrum>,
    weights: Vec<Vec<Complex>>,
) -> Result<LineSpectrum> {
    debug_assert_eq!(bases.len(), weights.len());
    LineSpectrum::new(periods, move |xi| {
        let k = grid.cell(xi);
        let mut acc = ZERO;
        for (b, w) in bases.iter().zip(&weights) {
            if w[k] != ZERO {
                acc += w[k] * b.eval(xi);
            }
        }
        acc
    })
}

/// A spectrum given directly by its fibers on grid cells.
fn fiber_table(grid: CircleGrid, periods: usize, table: Vec<Complex>) -> Result<LineSpectrum> {
    let width = 2 * periods;
    let l_max = periods as i64;
    LineSpectrum::new(periods, move |xi| {
        let l = xi.floor() as i64;
        if l < -l_max || l >= l_max {
            return ZERO;
        }
        table[grid.cell(xi) * width + (l + l_max) as usize]
    })
}

/// Applies `S^{-1/2}` fiber by fiber: `w'_j = Σ_i w_i M_{ij}` with
/// `M = V Σ^{-1} V^*` from the thin SVD `W = U Σ V^*` of the fiber matrix, so
/// that `W' = U V^*` has orthonormal singular structure on the fiber span.
pub fn canonical_tight(gens: &GeneratorSet) -> Result<GeneratorSet> {
    let diag = frame_bounds(gens, 0.0)?;
    if diag.lower_bound <= ILL_CONDITIONED_EPS {
        return Err(Error::IllConditioned {
            lower: diag.lower_bound,
            eps: ILL_CONDITIONED_EPS,
        });
    }
    let fib = fiberize(gens)?;
    let all: Vec<usize> = (0..fib.count).collect();
    let svds = fiber_svds(&fib, &all);
    let r = gens.len();
    // weights[j][i][k] = M_{ij}(ξ_k)
    let mut weights = vec![vec![vec![ZERO; gens.grid.len()]; r]; r];
    for (k, s) in svds.iter().enumerate() {
        let inv = DMatrix::from_fn(s.rank(), s.rank(), |a, b| {
            if a == b {
                Complex::new(1.0 / s.sigma[a], 0.0)
            } else {
                ZERO
            }
        });
        let m = &s.v * inv * s.v.adjoint();
        for (j, wj) in weights.iter_mut().enumerate() {
            for (i, wji) in wj.iter_mut().enumerate() {
                wji[k] = m[(i, j)];
            }
        }
    }
    let generators = weights
        .into_iter()
        .map(|w| combination(gens.grid, gens.periods, gens.generators.clone(), w))
        .collect::<Result<Vec<_>>>()?;
    GeneratorSet::new(gens.grid, gens.periods, generators)
}

/// Output of [`complement_by_projection`].
#[derive(Clone, Debug)]
pub struct Complement {
    pub generators: GeneratorSet,
    /// Measure of the frequencies where `Y`'s fibers leave the span of `W`'s.
    pub inconsistent_measure: f64,
}

/// `x_i = P w_i` with `P` the projection onto the orthogonal complement of the
/// subspace generated by `Y`, computed per fiber.
pub fn complement_by_projection(w: &GeneratorSet, y: &GeneratorSet) -> Result<Complement> {
    w.compatible(y)?;
    if w.is_empty() {
        return Err(Error::EmptySpan);
    }
    let grid = w.grid;
    let fw = fiberize(w)?;
    let w_idx: Vec<usize> = (0..w.len()).collect();
    let w_svds = fiber_svds(&fw, &w_idx);

    if y.is_empty() {
        return Ok(Complement {
            generators: w.clone(),
            inconsistent_measure: 0.0,
        });
    }
    let fy = fiberize(y)?;
    let y_idx: Vec<usize> = (0..y.len()).collect();
    let y_svds = fiber_svds(&fy, &y_idx);

    let mut inconsistent = 0usize;
    // weights[i] holds, for output i, a weight per base in [w_i, y_0, ..].
    let mut weights = vec![vec![vec![ZERO; grid.len()]; y.len() + 1]; w.len()];
    for k in 0..grid.len() {
        let ys = &y_svds[k];
        let wm = fw.matrix(k);
        for (i, wi) in weights.iter_mut().enumerate() {
            wi[0][k] = ONE;
            if ys.rank() == 0 {
                continue;
            }
            // a = Y^+ w_i = V Σ^{-1} U^* w_i
            let uw = ys.u.adjoint() * wm.column(i);
            let scaled = DMatrix::from_fn(ys.rank(), 1, |a, _| uw[a] / ys.sigma[a]);
            let coeffs = &ys.v * scaled;
            for j in 0..y.len() {
                wi[j + 1][k] = -coeffs[(j, 0)];
            }
        }
        if ys.rank() > 0 {
            let wu = &w_svds[k].u;
            let ym = fy.matrix(k);
            let outside = &ym - wu * (wu.adjoint() * &ym);
            if outside.norm() > RANK_EPS * ys.sigma_max.max(f64::MIN_POSITIVE) {
                inconsistent += 1;
            }
        }
    }
    let generators = weights
        .into_iter()
        .enumerate()
        .map(|(i, wt)| {
            let mut bases = vec![w.generators[i].clone()];
            bases.extend(y.generators.iter().cloned());
            combination(grid, w.periods, bases, wt)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Complement {
        generators: GeneratorSet::new(grid, w.periods, generators)?,
        inconsistent_measure: inconsistent as f64 / grid.len() as f64,
    })
}

/// Output of [`minimal_complement`].
#[derive(Clone, Debug)]
pub struct MinimalComplement {
    /// Exactly `k` generators; empty when `Y` is already complete.
    pub generators: GeneratorSet,
    /// `max_ξ` of the complement fiber dimension.
    pub k: usize,
    /// `E_j = {ξ : complement dimension ≥ j}`, nested decreasingly.
    pub supports: Vec<SupportSet>,
    /// Complement fiber dimension per grid point.
    pub complement_rank: Vec<usize>,
}

/// A normalized tight complementary collection of the least possible size.
///
/// At each frequency the complement of `Y`'s fiber span inside `W`'s fiber
/// span receives an orthonormal basis by pivoted Gram–Schmidt over the
/// standard fiber basis: candidates `e_l` are projected onto the complement,
/// the one with the largest residual (lowest `l` on ties) is normalized and
/// removed from the rest, and so on. Generator `j` takes the `j`-th basis
/// vector where it exists and vanishes elsewhere.
pub fn minimal_complement(w: &GeneratorSet, y: &GeneratorSet) -> Result<MinimalComplement> {
    w.compatible(y)?;
    if w.is_empty() {
        return Err(Error::EmptySpan);
    }
    let grid = w.grid;
    let width = 2 * w.periods;
    let fw = fiberize(w)?;
    let w_idx: Vec<usize> = (0..w.len()).collect();
    let w_svds = fiber_svds(&fw, &w_idx);
    let y_svds = if y.is_empty() {
        None
    } else {
        let fy = fiberize(y)?;
        let y_idx: Vec<usize> = (0..y.len()).collect();
        Some(fiber_svds(&fy, &y_idx))
    };

    let mut bases: Vec<Vec<Vec<Complex>>> = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let uw = &w_svds[k].u;
        let uy = y_svds.as_ref().map(|s| &s[k].u);
        bases.push(pivoted_complement_basis(uw, uy, width));
    }

    let complement_rank: Vec<usize> = bases.iter().map(|b| b.len()).collect();
    let k_max = complement_rank.iter().copied().max().unwrap_or(0);
    let mut generators = Vec::with_capacity(k_max);
    let mut supports = Vec::with_capacity(k_max);
    for j in 0..k_max {
        let mut table = vec![ZERO; grid.len() * width];
        let mut member = vec![false; grid.len()];
        for (k, basis) in bases.iter().enumerate() {
            if let Some(v) = basis.get(j) {
                table[k * width..(k + 1) * width].copy_from_slice(v);
                member[k] = true;
            }
        }
        generators.push(fiber_table(grid, w.periods, table)?);
        supports.push(SupportSet::new(grid, member)?);
    }
    let generators = if generators.is_empty() {
        GeneratorSet::empty(grid, w.periods)
    } else {
        GeneratorSet::new(grid, w.periods, generators)?
    };
    Ok(MinimalComplement {
        generators,
        k: k_max,
        supports,
        complement_rank,
    })
}

fn pivoted_complement_basis(
    uw: &DMatrix<Complex>,
    uy: Option<&DMatrix<Complex>>,
    width: usize,
) -> Vec<Vec<Complex>> {
    if uw.ncols() == 0 {
        return vec![];
    }
    // Candidates r_l = (I - P_Y) P_W e_l, one per column.
    let mut cand: DMatrix<Complex> = uw * uw.adjoint();
    if let Some(uy) = uy.filter(|u| u.ncols() > 0) {
        cand = &cand - uy * (uy.adjoint() * &cand);
    }
    let mut chosen: Vec<Vec<Complex>> = Vec::new();
    let limit = uw.ncols();
    while chosen.len() < limit {
        let norms: Vec<f64> = (0..width).map(|l| cand.column(l).norm()).collect();
        let best = norms.iter().copied().fold(0.0, f64::max);
        if best <= RANK_EPS {
            break;
        }
        let pivot = norms
            .iter()
            .position(|n| *n >= best * (1.0 - 1e-12))
            .expect("maximum exists");
        let q = cand.column(pivot) / Complex::new(norms[pivot], 0.0);
        let proj = q.adjoint() * &cand;
        cand -= &q * proj;
        chosen.push(q.iter().copied().collect());
    }
    chosen
}

/// Outcome of [`fusable`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fusability {
    pub fusable: bool,
    /// Measure of the frequencies where the two fibers are independent.
    pub violating_measure: f64,
}

/// Two generators are fusable when they lie in a common cyclic subspace:
/// their fibers are linearly dependent at almost every frequency.
pub fn fusable(gens: &GeneratorSet, i: usize, j: usize) -> Result<Fusability> {
    gens.get(i)?;
    gens.get(j)?;
    let fib = fiberize(gens)?;
    let floor = global_floor(&fib);
    let bad = (0..gens.grid.len())
        .filter(|k| fiber_svd(fib.columns(*k, [i, j].into_iter()), floor).rank() > 1)
        .count();
    Ok(Fusability {
        fusable: bad <= AE_SLACK_CELLS,
        violating_measure: bad as f64 / gens.grid.len() as f64,
    })
}

/// Output of [`fuse`].
#[derive(Clone, Debug)]
pub struct Fusion {
    pub generators: GeneratorSet,
    /// Position of the fused generator in `generators`.
    pub fused_index: usize,
    /// `F₁ = {‖w_i(ξ)‖ ≥ ‖w_j(ξ)‖}`; the fused generator follows `w_i` there
    /// and `w_j` on the rest.
    pub first_set: SupportSet,
}

/// Replaces the fusable pair `(i, j)` by `x = w_i χ_{F₁} + w_j χ_{F₂}`, where
/// `F₁` is where `w_i` has the larger fiber norm (ties to `w_i`) and `F₂` is
/// the rest. The fused generator takes the place of `w_i`.
pub fn fuse(gens: &GeneratorSet, i: usize, j: usize) -> Result<Fusion> {
    if i == j {
        return Err(Error::Premise("cannot fuse a generator with itself".into()));
    }
    let f = fusable(gens, i, j)?;
    if !f.fusable {
        return Err(Error::NotFusable {
            i,
            j,
            measure: f.violating_measure,
        });
    }
    let fib = fiberize(gens)?;
    let grid = gens.grid;
    let norm = |g: usize, k: usize| fib.fiber(g, k).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let member: Vec<bool> = (0..grid.len()).map(|k| norm(i, k) >= norm(j, k)).collect();
    let first_set = SupportSet::new(grid, member)?;
    let chi1: Vec<Complex> = first_set.indicator().values().to_vec();
    let chi2: Vec<Complex> = chi1.iter().map(|v| ONE - v).collect();
    let fused = combination(
        grid,
        gens.periods,
        vec![gens.generators[i].clone(), gens.generators[j].clone()],
        vec![chi1, chi2],
    )?;
    let mut generators = Vec::with_capacity(gens.len() - 1);
    let mut fused_index = 0;
    for (idx, g) in gens.generators.iter().enumerate() {
        if idx == i {
            fused_index = generators.len();
            generators.push(fused.clone());
        } else if idx != j {
            generators.push(g.clone());
        }
    }
    Ok(Fusion {
        generators: GeneratorSet::new(grid, gens.periods, generators)?,
        fused_index,
        first_set,
    })
}
