#![allow(dead_code)]

use fusewave::spectral::{CircleGrid, Complex, LineSpectrum, Piece};
use fusewave::GeneratorSet;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Breakpoints of random piecewise generators sit on multiples of `1/CELLS`.
pub const CELLS: usize = 8;

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Piecewise-constant values per `(slot, cell)`, `slot` counting from `slot0`.
#[derive(Clone, Debug)]
pub struct Table {
    pub slot0: i64,
    pub values: Vec<Vec<Complex>>,
}

impl Table {
    pub fn random(rng: &mut ChaCha8Rng, slot0: i64, slots: usize, zero_prob: f64) -> Self {
        let values = (0..slots)
            .map(|_| {
                (0..CELLS)
                    .map(|_| {
                        if rng.gen_bool(zero_prob) {
                            c(0.0, 0.0)
                        } else {
                            random_complex(rng)
                        }
                    })
                    .collect()
            })
            .collect();
        Self { slot0, values }
    }

    pub fn at(&self, slot: usize, cell: usize) -> Complex {
        self.values[slot][cell]
    }

    pub fn pieces(&self) -> Vec<Piece> {
        let mut out = Vec::new();
        for (s, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if *v != c(0.0, 0.0) {
                    let l = (self.slot0 + s as i64) as f64;
                    out.push(Piece {
                        start: l + j as f64 / CELLS as f64,
                        end: l + (j + 1) as f64 / CELLS as f64,
                        value: *v,
                    });
                }
            }
        }
        out
    }

    pub fn spectrum(&self, periods: usize) -> LineSpectrum {
        LineSpectrum::piecewise(self.pieces(), periods).unwrap()
    }

    /// `a(ξ) · self` for a 1-periodic multiplier constant on cells.
    pub fn times(&self, a: &[Complex]) -> Self {
        Self {
            slot0: self.slot0,
            values: self
                .values
                .iter()
                .map(|row| row.iter().zip(a).map(|(v, m)| v * m).collect())
                .collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.slot0, other.slot0);
        Self {
            slot0: self.slot0,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a + b).collect())
                .collect(),
        }
    }
}

pub fn set_of(tables: &[Table], grid: CircleGrid, periods: usize) -> GeneratorSet {
    GeneratorSet::new(grid, periods, tables.iter().map(|t| t.spectrum(periods)).collect()).unwrap()
}

pub fn random_multiplier(rng: &mut ChaCha8Rng, zero_prob: f64) -> Vec<Complex> {
    (0..CELLS)
        .map(|_| {
            if rng.gen_bool(zero_prob) {
                c(0.0, 0.0)
            } else {
                random_complex(rng)
            }
        })
        .collect()
}

/// Rank of the `rows × cols` matrix given by columns, by Gaussian elimination
/// with partial pivoting and a relative threshold.
pub fn rank(columns: &[Vec<Complex>]) -> usize {
    if columns.is_empty() {
        return 0;
    }
    let rows = columns[0].len();
    let mut m: Vec<Vec<Complex>> = (0..rows).map(|r| columns.iter().map(|col| col[r]).collect()).collect();
    let scale = m.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let cols = columns.len();
    let mut r = 0;
    for col in 0..cols {
        let (pivot, best) = (r..rows)
            .map(|i| (i, m[i][col].norm()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if r >= rows || best <= 1e-9 * scale {
            continue;
        }
        m.swap(r, pivot);
        for i in r + 1..rows {
            let f = m[i][col] / m[r][col];
            let (top, rest) = m.split_at_mut(i);
            for (dst, src) in rest[0][col..].iter_mut().zip(&top[r][col..]) {
                *dst -= f * src;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}
