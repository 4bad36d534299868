//! Acceptance criteria 1 to 8. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::time::{Duration, Instant};

use common::{c, random_complex, random_multiplier, rank, set_of, Table, CELLS};
use fusewave::frame::{
    canonical_tight, complement_by_projection, fiberize, frame_bounds, fusable, fuse,
    minimal_complement, multiplicity,
};
use fusewave::mra::{haar_wavelet_closed_form, ScalingFilter, DEFAULT_DEPTH};
use fusewave::spectral::{CircleGrid, Complex, LineSpectrum};
use fusewave::wavelet::{
    build_wavelet, check_half_shift_reduction, ef_sets, premise_residual, BuildParams, DetailPair,
};
use fusewave::{GeneratorSet, Mra};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome, Duration);

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn default_grid() -> CircleGrid {
    CircleGrid::new(1024).unwrap()
}

fn criterion_1() -> Outcome {
    let mra = Mra::builtin("haar", DEFAULT_DEPTH).unwrap();
    let params = BuildParams {
        time_samples: true,
        ..BuildParams::default()
    };
    let r = build_wavelet(&mra, &params).map_err(|e| e.to_string())?;
    let samples = r.psi_samples.as_ref().ok_or("no time samples")?;
    ensure(samples.values.len() == 4096, format!("{} samples", samples.values.len()))?;
    let reference = |x: f64| if (0.0..0.5).contains(&x) { 1.0 } else if (0.5..1.0).contains(&x) { -1.0 } else { 0.0 };
    let err_for = |sign: f64| {
        samples
            .x
            .iter()
            .zip(&samples.values)
            .map(|(x, v)| (v - sign * reference(*x)).norm())
            .fold(0.0, f64::max)
    };
    let sample_err = err_for(1.0).min(err_for(-1.0));
    ensure(sample_err <= 1e-3, format!("time-sample error {sample_err:e}"))?;

    let coeffs = r.psi_coefficients.as_ref().ok_or("no V1 coefficients")?;
    let seq = &coeffs.0;
    let expected = [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)];
    let coef_err = |sign: f64| {
        let body = (0..2).map(|k| (seq.get(k) - expected[k as usize] * sign).norm()).fold(0.0, f64::max);
        let outside = seq.iter().filter(|(k, _)| !(0..2).contains(k)).map(|(_, v)| v.norm()).fold(0.0, f64::max);
        body.max(outside)
    };
    let coef = coef_err(1.0).min(coef_err(-1.0));
    ensure(coef <= 1e-12, format!("coefficient error {coef:e}"))?;

    let closed = haar_wavelet_closed_form(params.periods).unwrap();
    let spec_err = r
        .psi_spectrum
        .sample_line(params.grid)
        .unwrap()
        .iter()
        .map(|(x, v)| (v - closed.eval(*x)).norm())
        .fold(0.0, f64::max);
    ensure(spec_err <= 1e-9, format!("spectrum vs closed form {spec_err:e}"))?;
    Ok(format!(
        "time-sample error {sample_err:.1e} on 4096 samples, coefficient error {coef:.1e}, spectrum vs closed form {spec_err:.1e}"
    ))
}

fn criterion_2() -> Outcome {
    let mra = Mra::Shannon;
    let grid = default_grid();
    let pair = DetailPair::new(&mra);
    let (p0, p1) = pair.periodizations(grid).map_err(|e| e.to_string())?;
    ensure(check_half_shift_reduction(&p0, &p1, 1e-10), "half-shift check returned false".into())?;
    let r = build_wavelet(&mra, &BuildParams::default()).map_err(|e| e.to_string())?;
    ensure(r.used_half_shift_shortcut, "shortcut not used".into())?;
    let band = |x: f64| if (-1.0..-0.5).contains(&x) || (0.5..1.0).contains(&x) { 1.0 } else { 0.0 };
    let modulus_err = r
        .psi_spectrum
        .sample_line(grid)
        .unwrap()
        .iter()
        .map(|(x, v)| (v.norm() - band(*x)).abs())
        .fold(0.0, f64::max);
    ensure(modulus_err <= 1e-8, format!("|psi_hat| error {modulus_err:e}"))?;
    let agree = r.shortcut_discrepancy.ok_or("no shortcut comparison")?;
    ensure(agree <= 1e-8, format!("shortcut vs pipeline {agree:e}"))?;
    Ok(format!("|psi_hat| band error {modulus_err:.1e}, shortcut vs pipeline {agree:.1e}"))
}

/// Classical high-pass construction: `ψ̂_ref(ξ) = m₁(ξ/2) φ̂(ξ/2)` with
/// `m₁(η) = e^{-2πiη} conj(m₀(η + ½))`, computed from the raw filter taps.
struct Reference {
    taps: Vec<(i64, Complex)>,
}

impl Reference {
    fn m0(&self, eta: f64) -> Complex {
        self.taps
            .iter()
            .map(|(n, h)| h * Complex::cis(-2.0 * PI * *n as f64 * eta))
            .sum::<Complex>()
            * FRAC_1_SQRT_2
    }

    fn m1(&self, eta: f64) -> Complex {
        Complex::cis(-2.0 * PI * eta) * self.m0(eta + 0.5).conj()
    }

    fn phi_hat(&self, xi: f64) -> Complex {
        (1..=DEFAULT_DEPTH).map(|j| self.m0(xi / f64::powi(2.0, j as i32))).product()
    }

    fn psi_hat(&self, xi: f64) -> Complex {
        self.m1(xi / 2.0) * self.phi_hat(xi / 2.0)
    }
}

fn criterion_3() -> Outcome {
    let mra = Mra::builtin("db2", DEFAULT_DEPTH).unwrap();
    let params = BuildParams::default();
    let r = build_wavelet(&mra, &params).map_err(|e| e.to_string())?;
    let v = r.verification;
    let worst = v
        .periodization_residual
        .max(v.v0_orthogonality_residual)
        .max(v.v1_membership_residual)
        .max(v.translate_gram_residual);
    ensure(worst <= 1e-6, format!("report residual {worst:e}: {v:?}"))?;

    let reference = Reference {
        taps: ScalingFilter::db2().coeffs().iter().collect(),
    };
    let psi = &r.psi_spectrum;
    let grid = params.grid;
    let l = params.periods as i64;
    // Symbol of ψ in V₁ coordinates, by least squares on the dilated fiber.
    let symbol = |eta: f64| -> Complex {
        let (mut uv, mut vv) = (c(0.0, 0.0), 0.0);
        for m in -l..l {
            let x = eta + m as f64;
            let u = psi.eval(2.0 * x);
            let w = reference.phi_hat(x);
            uv += u * w.conj();
            vv += w.norm_sqr();
        }
        uv / vv * SQRT_2
    };
    let mut symbol_dev: f64 = 0.0;
    for k in 0..grid.len() {
        let eta = grid.point(k) / 2.0;
        let b = 0.5
            * (symbol(eta) * (reference.m1(eta) * SQRT_2).conj()
                + symbol(eta + 0.5) * (reference.m1(eta + 0.5) * SQRT_2).conj());
        symbol_dev = symbol_dev.max((b.norm() - 1.0).abs());
    }
    ensure(symbol_dev <= 1e-4, format!("| [psi, psi_ref] | - 1 = {symbol_dev:e} (symbol form)"))?;

    // Direct bracket sum with a long truncation on a coarse subgrid.
    let mut direct_dev: f64 = 0.0;
    for k in (0..grid.len()).step_by(16) {
        let xi = grid.point(k);
        let b: Complex = (-2048i64..2048)
            .map(|l| psi.eval(xi + l as f64) * reference.psi_hat(xi + l as f64).conj())
            .sum();
        direct_dev = direct_dev.max((b.norm() - 1.0).abs());
    }
    ensure(direct_dev <= 1e-4, format!("| [psi, psi_ref] | - 1 = {direct_dev:e} (direct sum)"))?;
    Ok(format!(
        "max report residual {worst:.1e}, | |[psi, psi_ref]| - 1 | = {symbol_dev:.1e} (symbol), {direct_dev:.1e} (direct, L = 2048)"
    ))
}

fn criterion_4() -> Outcome {
    let grid = default_grid();
    let slack = 2.0 / 1024.0;
    let mut lines = Vec::new();
    for name in ["haar", "db2", "db4", "shannon"] {
        let mra = Mra::builtin(name, DEFAULT_DEPTH).unwrap();
        let (p0, p1) = DetailPair::new(&mra).periodizations(grid).map_err(|e| e.to_string())?;
        let residual = premise_residual(&p0, &p1).map_err(|e| e.to_string())?;
        ensure(residual <= 1e-6, format!("{name}: |p0 + p1 - 1| = {residual:e}"))?;
        let (e, f) = ef_sets(&p0, &p1, 1e-6).map_err(|e| e.to_string())?;
        let meet = e.intersection(&f).measure();
        let join = e.union(&f).measure();
        ensure(meet <= slack, format!("{name}: measure(E ∩ F) = {meet}"))?;
        ensure(join >= 1.0 - slack, format!("{name}: measure(E ∪ F) = {join}"))?;
        lines.push(format!("{name} |E|={} |F|={} res={residual:.0e}", e.count(), f.count()));
    }
    Ok(lines.join("; "))
}

/// Frame sum `Σ_i Σ_k |⟨x, T^k w_i⟩|²` for spectra constant on the `n` cells
/// of one unit interval, by explicit evaluation of every translate coefficient
/// `⟨x, T^k w⟩ = ∫ x̂ conj(ŵ) e^{2πikξ} dξ`. For cell-constant integrands the
/// `n` coefficients on `ℤ_n` carry exactly the energy of all of `ℤ`.
fn brute_frame_sum(x: &[Complex], gens: &[Vec<Complex>], twiddle: &[Complex]) -> f64 {
    let n = x.len();
    let mut total = 0.0;
    for w in gens {
        let h: Vec<Complex> = x.iter().zip(w).map(|(a, b)| a * b.conj()).collect();
        for k in 0..n {
            let coef: Complex = h.iter().enumerate().map(|(j, v)| v * twiddle[(k * j) % n]).sum::<Complex>() / n as f64;
            total += coef.norm_sqr();
        }
    }
    total
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 128usize;
    let refine = n / CELLS;
    let twiddle: Vec<Complex> = (0..n).map(|j| Complex::cis(2.0 * PI * j as f64 / n as f64)).collect();
    let (mut worst_low, mut worst_high): (f64, f64) = (0.0, 0.0);
    let mut sets = 0;
    while sets < 20 {
        let slot = rng.gen_range(-1..=1);
        let count = rng.gen_range(1..=3);
        let tables: Vec<Table> = (0..count).map(|_| Table::random(&mut rng, slot, 1, 0.25)).collect();
        let gens = set_of(&tables, default_grid(), 2);
        let diag = match frame_bounds(&gens, 1e-9) {
            Ok(d) => d,
            Err(_) => continue,
        };
        sets += 1;
        let (a, b) = (diag.lower_bound, diag.upper_bound);
        let fine: Vec<Vec<Complex>> = tables
            .iter()
            .map(|t| (0..n).map(|j| t.at(0, j / refine)).collect())
            .collect();
        let support: Vec<usize> = (0..n)
            .filter(|j| fine.iter().any(|w| w[*j] != c(0.0, 0.0)))
            .collect();
        let (mut qmin, mut qmax) = (f64::INFINITY, 0.0f64);
        for t in 0..500 {
            let mut x = vec![c(0.0, 0.0); n];
            if t % 2 == 0 {
                for j in &support {
                    x[*j] = random_complex(&mut rng);
                }
            } else {
                let start = support[rng.gen_range(0..support.len())];
                let width = rng.gen_range(1..=4);
                for (j, slot) in x.iter_mut().enumerate().take((start + width).min(n)).skip(start) {
                    if support.contains(&j) {
                        *slot = random_complex(&mut rng);
                    }
                }
            }
            let norm: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
            if norm == 0.0 {
                continue;
            }
            let q = brute_frame_sum(&x, &fine, &twiddle) / norm;
            ensure(
                q >= a - 1e-6 && q <= b + 1e-6,
                format!("set {sets}: quotient {q} outside [{a}, {b}]"),
            )?;
            qmin = qmin.min(q);
            qmax = qmax.max(q);
        }
        ensure(qmin <= 1.05 * a, format!("set {sets}: min quotient {qmin} vs A = {a}"))?;
        ensure(qmax >= 0.95 * b, format!("set {sets}: max quotient {qmax} vs B = {b}"))?;
        worst_low = worst_low.max(qmin / a - 1.0);
        worst_high = worst_high.max(1.0 - qmax / b);
    }
    Ok(format!(
        "20 sets x 500 vectors inside [A, B]; extremes within {:.2}% of A and {:.2}% of B",
        100.0 * worst_low,
        100.0 * worst_high
    ))
}

fn criterion_6() -> Outcome {
    let grid = default_grid();
    let ind = |a: f64, b: f64| LineSpectrum::indicator(a, b, 2).unwrap();
    let worked = GeneratorSet::new(grid, 2, vec![ind(0.0, 0.75), ind(0.25, 1.0)]).unwrap();
    let before = frame_bounds(&worked, 1e-12).map_err(|e| e.to_string())?;
    let fused = fuse(&worked, 0, 1).map_err(|e| e.to_string())?;
    let after = frame_bounds(&fused.generators, 1e-12).map_err(|e| e.to_string())?;
    ensure(
        after.lower_bound == 1.0 && after.upper_bound == 1.0,
        format!("worked example fused bounds ({}, {})", after.lower_bound, after.upper_bound),
    )?;
    ensure(
        before.lower_bound / 2.0 <= 1.0 && 1.0 <= 2.0 * before.upper_bound,
        "worked example outside sandwich".into(),
    )?;
    ensure(
        (before.lower_bound / 2.0 - 0.5).abs() <= 1e-12 && (2.0 * before.upper_bound - 4.0).abs() <= 1e-12,
        format!("sandwich [{}, {}]", before.lower_bound / 2.0, 2.0 * before.upper_bound),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    let mut done = 0;
    while done < 20 {
        let w = Table::random(&mut rng, 0, 2, 0.2);
        let partner = w.times(&random_multiplier(&mut rng, 0.2));
        let mut tables = vec![w, partner];
        if rng.gen_bool(0.5) {
            tables.push(Table::random(&mut rng, 0, 2, 0.2));
        }
        let (i, j) = if rng.gen_bool(0.5) { (0, 1) } else { (1, 0) };
        let gens = set_of(&tables, grid, 2);
        let Ok(before) = frame_bounds(&gens, 1e-12) else { continue };
        if !fusable(&gens, i, j).map_err(|e| e.to_string())?.fusable {
            return Err(format!("random pair {done} reported not fusable"));
        }
        let fused = fuse(&gens, i, j).map_err(|e| e.to_string())?;
        let after = frame_bounds(&fused.generators, 1e-12).map_err(|e| e.to_string())?;
        let tol = 1e-12 * before.upper_bound;
        if after.lower_bound < before.lower_bound / 2.0 - tol || after.upper_bound > 2.0 * before.upper_bound + tol {
            violations += 1;
        }
        done += 1;
    }
    ensure(violations == 0, format!("{violations} sandwich violations"))?;
    Ok("worked example fused bounds (1, 1) inside [0.5, 4]; 20 random pairs, 0 violations".into())
}

fn fiber_at(s: &LineSpectrum, xi: f64, periods: usize) -> Vec<Complex> {
    let l = periods as i64;
    (-l..l).map(|m| s.eval(xi + m as f64)).collect()
}

fn check_complements(w: &GeneratorSet, y: &GeneratorSet) -> Result<(f64, f64), String> {
    let grid = w.grid();
    let periods = w.periods();
    let proj = complement_by_projection(w, y).map_err(|e| e.to_string())?;
    let mut orth: f64 = 0.0;
    for k in 0..grid.len() {
        let xi = grid.point(k);
        for x in proj.generators.generators() {
            let fx = fiber_at(x, xi, periods);
            for yg in y.generators() {
                let fy = fiber_at(yg, xi, periods);
                let ip: Complex = fx.iter().zip(&fy).map(|(a, b)| a * b.conj()).sum();
                orth = orth.max(ip.norm());
            }
        }
    }
    ensure(orth <= 1e-10, format!("projection complement not orthogonal to Y: {orth:e}"))?;

    let minimal = minimal_complement(w, y).map_err(|e| e.to_string())?;
    ensure(minimal.k == 1, format!("minimal complement size {}", minimal.k))?;
    ensure(minimal.generators.len() == 1, "generator count differs from k".into())?;
    let d = frame_bounds(&minimal.generators, 1e-8).map_err(|e| e.to_string())?;
    let dev = (d.lower_bound - 1.0).abs().max((d.upper_bound - 1.0).abs());
    ensure(dev <= 1e-8, format!("minimal complement bounds ({}, {})", d.lower_bound, d.upper_bound))?;

    // Per-fiber ranks: W against Y (a complement of size 0 needs equality
    // everywhere) and W against Y ∪ X (the complement must complete Y).
    let mut gap = 0usize;
    for k in 0..grid.len() {
        let xi = grid.point(k);
        let fib = |s: &GeneratorSet| -> Vec<Vec<Complex>> { s.generators().iter().map(|g| fiber_at(g, xi, periods)).collect() };
        let rw = rank(&fib(w));
        let ry = rank(&fib(y));
        let mut yx = fib(y);
        yx.extend(fib(&minimal.generators));
        ensure(rank(&yx) == rw, format!("Y ∪ X does not span W at grid point {k}"))?;
        gap = gap.max(rw - ry);
    }
    ensure(gap == 1, format!("max rank gap {gap}, expected 1"))?;
    Ok((orth, dev))
}

fn criterion_7() -> Outcome {
    let grid = default_grid();
    let ind = |a: f64, b: f64| LineSpectrum::indicator(a, b, 2).unwrap();
    let w = GeneratorSet::new(grid, 2, vec![ind(0.0, 1.0), ind(1.0, 2.0)]).unwrap();
    let y = GeneratorSet::new(grid, 2, vec![ind(0.0, 1.0)]).unwrap();
    let (mut orth, mut dev) = check_complements(&w, &y)?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let w1 = Table::random(&mut rng, 0, 2, 0.0);
        let w2 = Table::random(&mut rng, 0, 2, 0.0);
        let mut tables = vec![w1.clone(), w2.clone()];
        if rng.gen_bool(0.5) {
            tables.push(w1.times(&random_multiplier(&mut rng, 0.3)).plus(&w2.times(&random_multiplier(&mut rng, 0.3))));
        }
        let y1 = w1.times(&random_multiplier(&mut rng, 0.0)).plus(&w2.times(&random_multiplier(&mut rng, 0.0)));
        let w = set_of(&tables, grid, 2);
        let y = set_of(&[y1], grid, 2);
        let (o, d) = check_complements(&w, &y)?;
        orth = orth.max(o);
        dev = dev.max(d);
    }
    Ok(format!(
        "11 fiber-dim-2 spaces: orthogonality residual {orth:.1e}, k = 1, tight deviation {dev:.1e}, no size-0 complement"
    ))
}

fn criterion_8() -> Outcome {
    let grid = default_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut done = 0;
    let mut worst: f64 = 0.0;
    while done < 20 {
        let count = rng.gen_range(1..=3);
        let tables: Vec<Table> = (0..count).map(|_| Table::random(&mut rng, 0, 2, 0.15)).collect();
        let gens = set_of(&tables, grid, 2);
        match frame_bounds(&gens, 1e-9) {
            Ok(d) if d.lower_bound > 0.1 => {}
            _ => continue,
        }
        let tight = canonical_tight(&gens).map_err(|e| e.to_string())?;
        let d = frame_bounds(&tight, 1e-8).map_err(|e| e.to_string())?;
        let dev = (d.lower_bound - 1.0).abs().max((d.upper_bound - 1.0).abs());
        ensure(dev <= 1e-8, format!("set {done}: tightened bounds ({}, {})", d.lower_bound, d.upper_bound))?;
        let before = multiplicity(&fiberize(&gens).unwrap());
        let after = multiplicity(&fiberize(&tight).unwrap());
        ensure(before == after, format!("set {done}: multiplicity changed"))?;
        worst = worst.max(dev);
        done += 1;
    }
    Ok(format!("20 sets with A > 0.1: max |bound - 1| = {worst:.1e}, multiplicity unchanged"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "Haar reproduction", criterion_1, Duration::from_secs(5)),
        (2, "Shannon reduction", criterion_2, Duration::from_secs(5)),
        (3, "db2 construction", criterion_3, Duration::from_secs(30)),
        (4, "E/F lemma on the built-ins", criterion_4, Duration::from_secs(60)),
        (5, "frame bound oracle equivalence", criterion_5, Duration::from_secs(60)),
        (6, "fusion bounds", criterion_6, Duration::from_secs(60)),
        (7, "complementary collections", criterion_7, Duration::from_secs(60)),
        (8, "canonical tightening", criterion_8, Duration::from_secs(60)),
    ];
    let mut failures = 0;
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; runtime {elapsed:.2?} exceeds {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {id} PASS  {name}: {detail} ({elapsed:.2?})"),
            Err(detail) => {
                failures += 1;
                println!("criterion {id} FAIL  {name}: {detail} ({elapsed:.2?})");
            }
        }
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
