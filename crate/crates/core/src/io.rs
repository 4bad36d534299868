//! File formats: filter JSON, generator JSON and CSV outputs.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::GeneratorSet;
use crate::mra::{coords_to_spectrum, Mra, ScalingFilter, V1Coefficients, FILTER_TOL};
use crate::spectral::{CircleGrid, Complex, LineSpectrum, Piece};
use crate::wavelet::{TimeSamples, WaveletBuildResult};

/// `{"name": ..., "offset": ..., "coeffs": [[re, im], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FilterFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub offset: i64,
    pub coeffs: Vec<[f64; 2]>,
}

impl FilterFile {
    pub fn into_filter(self) -> Result<ScalingFilter> {
        let coeffs = self.coeffs.iter().map(|[re, im]| Complex::new(*re, *im)).collect();
        ScalingFilter::new(self.name, self.offset, coeffs)
    }
}

/// Resolves `haar`, `db2`, `db4`, `shannon` or `file:PATH`. A filter read from
/// a file must pass validation.
pub fn load_mra(source: &str, depth: usize) -> Result<Mra> {
    if let Some(path) = source.strip_prefix("file:") {
        let text = fs::read_to_string(path)?;
        let filter = serde_json::from_str::<FilterFile>(&text)?.into_filter()?;
        let v = filter.validate();
        if !v.passed {
            return Err(Error::Premise(format!(
                "filter fails validation: sum residual {:e}, orthogonality residual {:e} (threshold {FILTER_TOL:e})",
                v.sum_residual, v.orthogonality_residual
            )));
        }
        return Ok(Mra::Filter { filter, depth });
    }
    Mra::builtin(source, depth).ok_or_else(|| Error::Parse(format!("unknown filter '{source}'")))
}

/// One entry of a generator file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorSpec {
    /// Constant `re + i im` on `[a, b)`, summed over pieces.
    Pieces { pieces: Vec<[f64; 4]> },
    /// Coordinates in `V₁` of the analysis chosen with `--filter`.
    Coefficients { offset: i64, coeffs: Vec<[f64; 2]> },
}

impl GeneratorSpec {
    pub fn lower(&self, mra: &Mra, periods: usize) -> Result<LineSpectrum> {
        match self {
            GeneratorSpec::Pieces { pieces } => {
                let pieces = pieces
                    .iter()
                    .map(|[a, b, re, im]| {
                        if [a, b, re, im].iter().all(|v| v.is_finite()) {
                            Ok(Piece {
                                start: *a,
                                end: *b,
                                value: Complex::new(*re, *im),
                            })
                        } else {
                            Err(Error::Parse("non-finite number in piece".into()))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                LineSpectrum::piecewise(pieces, periods)
            }
            GeneratorSpec::Coefficients { offset, coeffs } => {
                let c = V1Coefficients::new(
                    *offset,
                    coeffs.iter().map(|[re, im]| Complex::new(*re, *im)).collect(),
                );
                match mra {
                    Mra::Filter { filter, depth } => coords_to_spectrum(&c, filter, *depth, periods),
                    Mra::Shannon => {
                        let symbol = crate::mra::V1Symbol::from_coefficients(&c);
                        mra.spectrum_of(&symbol, periods)
                    }
                }
            }
        }
    }
}

pub fn parse_generators(text: &str) -> Result<Vec<GeneratorSpec>> {
    let specs: Vec<GeneratorSpec> = serde_json::from_str(text)?;
    Ok(specs)
}

pub fn load_generators(
    path: &Path,
    mra: &Mra,
    grid: CircleGrid,
    periods: usize,
) -> Result<GeneratorSet> {
    let specs = parse_generators(&fs::read_to_string(path)?)?;
    if specs.is_empty() {
        return Err(Error::Parse("generator file lists no generators".into()));
    }
    let gens = specs
        .iter()
        .map(|s| s.lower(mra, periods))
        .collect::<Result<Vec<_>>>()?;
    GeneratorSet::new(grid, periods, gens)
}

/// Piecewise-constant description of a spectrum sampled at the left end of
/// every grid cell in `[-L, L)`, with equal neighbours merged and zeros
/// dropped. Exact for spectra constant on grid cells.
pub fn to_pieces(s: &LineSpectrum, grid: CircleGrid) -> Result<GeneratorSpec> {
    let mut pieces: Vec<[f64; 4]> = Vec::new();
    let l = s.periods() as i64;
    let n = grid.len() as i64;
    let mut open: Option<(i64, Complex)> = None;
    let flush = |pieces: &mut Vec<[f64; 4]>, start: i64, end: i64, v: Complex| {
        if v != Complex::new(0.0, 0.0) {
            pieces.push([start as f64 / n as f64, end as f64 / n as f64, v.re, v.im]);
        }
    };
    for idx in -l * n..l * n {
        let v = s.try_eval(idx as f64 / n as f64)?;
        match open {
            Some((_, w)) if w == v => {}
            Some((start, w)) => {
                flush(&mut pieces, start, idx, w);
                open = Some((idx, v));
            }
            None => open = Some((idx, v)),
        }
    }
    if let Some((start, w)) = open {
        flush(&mut pieces, start, l * n, w);
    }
    Ok(GeneratorSpec::Pieces { pieces })
}

pub fn generators_to_json(gens: &GeneratorSet) -> Result<String> {
    let specs = gens
        .generators()
        .iter()
        .map(|g| to_pieces(g, gens.grid()))
        .collect::<Result<Vec<_>>>()?;
    let mut text = serde_json::to_string_pretty(&specs)?;
    text.push('\n');
    Ok(text)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// `xi,re_psi_hat,im_psi_hat` at `ξ_k + l`, `l ∈ [-L, L)`.
pub fn spectrum_csv(result: &WaveletBuildResult, grid: CircleGrid) -> Result<String> {
    let mut out = String::from("xi,re_psi_hat,im_psi_hat\n");
    for (x, v) in result.psi_spectrum.sample_line(grid)? {
        out.push_str(&format!("{},{},{}\n", num(x), num(v.re), num(v.im)));
    }
    Ok(out)
}

/// `xi,in_E,in_F,f,g` on the grid.
pub fn sets_csv(result: &WaveletBuildResult) -> String {
    let grid = result.e.grid();
    let mut out = String::from("xi,in_E,in_F,f,g\n");
    for k in 0..grid.len() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            num(grid.point(k)),
            u8::from(result.e.contains(k)),
            u8::from(result.f_set.contains(k)),
            num(result.f.value(k).re),
            num(result.g.value(k).re)
        ));
    }
    out
}

pub fn time_samples_csv(samples: &TimeSamples) -> String {
    let mut out = String::from("x,re_psi,im_psi\n");
    for (x, v) in samples.x.iter().zip(&samples.values) {
        out.push_str(&format!("{},{},{}\n", num(*x), num(v.re), num(v.im)));
    }
    out
}

pub fn write_csv(path: &Path, text: &str) -> Result<()> {
    write_text(path, text)
}
