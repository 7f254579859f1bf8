//! XOR games and Bell expressions `Σ_{x,y} G(x,y) ⟨A_x B_y⟩`.
//!
//! A game is a real matrix of signed weights. The *bias* of a strategy is the
//! value of the expression with `±1` outcomes, and when `Σ|G| = 1` the
//! success probability is `½(1 + bias)`. This module brackets the quantum
//! bias from both sides:
//!
//! ```text
//! hadamard_bias ≤ classical_bias ≤ quantum bias ≤ norm_bound_bias
//!                                  ≥ seesaw_quantum_bias
//! ```
//!
//! When the outer two coincide the game admits no quantum advantage.

mod bell;
mod seesaw;
mod spectral;

use serde::Serialize;

use crate::bitcore::{sign, walsh_hadamard, BooleanFunction, PriorDistribution};
use crate::error::{Error, Result};

pub use bell::{bell_inequality, BellInequality};
pub use seesaw::{seesaw_quantum_bias, SeesawOptions, SeesawResult, VectorStrategy};
pub use spectral::{norm_bound_bias, top_singular_value, DEFAULT_SVD_TOL};

/// Largest side enumerated by [`classical_bias`] (`2^16` sign patterns).
pub const CLASSICAL_MAX_SIDE: usize = 16;

/// Default tolerance of [`no_advantage_certificate`].
pub const DEFAULT_CERTIFICATE_TOL: f64 = 1e-7;

const TIE_TOL: f64 = 1e-12;

/// Dense row-major game matrix `G(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GameMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl GameMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(
                "game matrix must be non-empty".into(),
            ));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "game matrix entries must be finite".into(),
            ));
        }
        Ok(GameMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::InvalidArgument(format!(
                "ragged game matrix: row of length {} among rows of length {cols}",
                r.len()
            )));
        }
        GameMatrix::new(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        GameMatrix::new(rows, cols, vec![0.0; rows * cols])
    }

    /// `G(x, y) = ¼ (−1)^{x·y}` on single bits.
    pub fn chsh() -> Self {
        GameMatrix {
            rows: 2,
            cols: 2,
            entries: vec![0.25, 0.25, 0.25, -0.25],
        }
    }

    /// Rank-one `G(x,y) = scale · (−1)^{u·x + v·y} / (|X||Y|)`.
    pub fn hadamard_rank_one(nx: usize, ny: usize, u: u32, v: u32, scale: f64) -> Result<Self> {
        let (rows, cols) = (1usize << nx, 1usize << ny);
        let norm = scale / (rows * cols) as f64;
        let entries = (0..rows)
            .flat_map(|x| {
                (0..cols).map(move |y| {
                    let e = (u & x as u32).count_ones() + (v & y as u32).count_ones();
                    norm * sign(e % 2 == 1)
                })
            })
            .collect();
        GameMatrix::new(rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.entries[x * self.cols + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.entries[x * self.cols..(x + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.cols)
            .map(<[f64]>::to_vec)
            .collect()
    }

    pub fn transpose(&self) -> GameMatrix {
        let entries = (0..self.cols)
            .flat_map(|y| (0..self.rows).map(move |x| self.get(x, y)))
            .collect();
        GameMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn scaled(&self, factor: f64) -> GameMatrix {
        GameMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| v * factor).collect(),
        }
    }

    /// `Σ_{x,y} |G(x,y)|`, the largest bias any box can reach.
    pub fn abs_sum(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_power_of_two_shape(&self) -> bool {
        self.rows.is_power_of_two() && self.cols.is_power_of_two()
    }

    /// `Σ_{x,y} G(x,y) a_x b_y` for `±1` (or any real) assignments.
    pub fn bias_of(&self, a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(a.len(), self.rows);
        assert_eq!(b.len(), self.cols);
        a.iter()
            .enumerate()
            .map(|(x, ax)| ax * self.row(x).iter().zip(b).map(|(g, by)| g * by).sum::<f64>())
            .sum()
    }

    /// `G v`.
    pub(crate) fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.entries
            .chunks(self.cols)
            .map(|row| row.iter().zip(v).map(|(g, x)| g * x).sum())
            .collect()
    }

    /// `Gᵀ w`.
    pub(crate) fn apply_transpose(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (row, wx) in self.entries.chunks(self.cols).zip(w) {
            for (o, g) in out.iter_mut().zip(row) {
                *o += g * wx;
            }
        }
        out
    }

    /// Rows of comma-separated reals; a first line that does not parse as
    /// numbers is treated as a header.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(format!("game CSV: {e}")))?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if line == 0 => continue,
                Err(e) => {
                    return Err(Error::Parse(format!("game CSV line {}: {e}", line + 1)));
                }
            }
        }
        if rows.is_empty() {
            return Err(Error::Parse("game CSV has no rows".into()));
        }
        GameMatrix::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_csv_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        GameMatrix::from_csv_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for row in self.entries.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(f64::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// `G(x,y) = 2^{−n} (−1)^{f(x⊕y)} P̃(x⊕y)`, normalized so that the task's
/// success probability is `½(1 + bias)`.
pub fn game_from_nlc(f: &BooleanFunction, prior: &PriorDistribution) -> Result<GameMatrix> {
    Error::check_width(f.width(), prior.width())?;
    let len = 1usize << f.width();
    let scale = 1.0 / len as f64;
    let entries = (0..len)
        .flat_map(|x| {
            (0..len).map(move |y| {
                let z = (x ^ y) as u32;
                scale * sign(f.eval(z)) * prior.prob(z)
            })
        })
        .collect();
    GameMatrix::new(len, len, entries)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalBias {
    pub bias: f64,
    pub a: Vec<i8>,
    pub b: Vec<i8>,
}

impl ClassicalBias {
    pub fn value(&self) -> f64 {
        0.5 * (1.0 + self.bias)
    }
}

/// Exact classical bias `max_{a,b ∈ ±1} Σ G(x,y) a_x b_y`.
///
/// The smaller side is enumerated (Gray-code order, first sign fixed by
/// symmetry); the other side's best reply is the sign of its column sum.
pub fn classical_bias(g: &GameMatrix) -> Result<ClassicalBias> {
    if g.rows > g.cols {
        let t = classical_bias(&g.transpose())?;
        return Ok(ClassicalBias {
            bias: t.bias,
            a: t.b,
            b: t.a,
        });
    }
    let k = g.rows;
    if k > CLASSICAL_MAX_SIDE {
        return Err(Error::guard(
            format!(
                "classical bias enumeration over {k} rows and {} columns",
                g.cols
            ),
            format!("min(|X|, |Y|) ≤ {CLASSICAL_MAX_SIDE}"),
        ));
    }
    let mut a = vec![1.0f64; k];
    let mut sums: Vec<f64> = g.apply_transpose(&a);
    let score = |s: &[f64]| s.iter().map(|v| v.abs()).sum::<f64>();
    let mut best_score = score(&sums);
    let mut best_a = a.clone();
    for step in 1u64..1 << (k - 1) {
        let x = step.trailing_zeros() as usize + 1;
        let flip = -2.0 * a[x];
        for (s, gv) in sums.iter_mut().zip(g.row(x)) {
            *s += flip * gv;
        }
        a[x] = -a[x];
        let current = score(&sums);
        if current > best_score + TIE_TOL {
            best_score = current;
            best_a.copy_from_slice(&a);
        }
    }
    // recompute from scratch to shed accumulated rounding
    let sums = g.apply_transpose(&best_a);
    let b: Vec<f64> = sums
        .iter()
        .map(|&s| if s < 0.0 { -1.0 } else { 1.0 })
        .collect();
    let bias = g.bias_of(&best_a, &b);
    Ok(ClassicalBias {
        bias,
        a: best_a.iter().map(|&v| v as i8).collect(),
        b: b.iter().map(|&v| v as i8).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HadamardBias {
    pub bias: f64,
    pub u: u32,
    pub v: u32,
}

/// `max_{u,v} |Σ_{x,y} (−1)^{u·x + v·y} G(x,y)|` via a two-sided fast
/// Walsh–Hadamard transform, smallest `(u, v)` on ties.
pub fn hadamard_bias(g: &GameMatrix) -> Result<HadamardBias> {
    let transformed = hadamard_transform_2d(g)?;
    let mut best = 0usize;
    for (i, h) in transformed.iter().enumerate().skip(1) {
        if h.abs() > transformed[best].abs() + TIE_TOL {
            best = i;
        }
    }
    Ok(HadamardBias {
        bias: transformed[best].abs(),
        u: (best / g.cols) as u32,
        v: (best % g.cols) as u32,
    })
}

/// `H(u, v) = Σ_{x,y} (−1)^{u·x + v·y} G(x,y)`, row-major.
pub fn hadamard_transform_2d(g: &GameMatrix) -> Result<Vec<f64>> {
    if !g.is_power_of_two_shape() {
        return Err(Error::InvalidArgument(format!(
            "Hadamard analysis needs power-of-two sides, got {}x{}",
            g.rows, g.cols
        )));
    }
    let mut data = g.entries.clone();
    for row in data.chunks_mut(g.cols) {
        walsh_hadamard(row);
    }
    let mut column = vec![0.0; g.rows];
    for y in 0..g.cols {
        for (x, c) in column.iter_mut().enumerate() {
            *c = data[x * g.cols + y];
        }
        walsh_hadamard(&mut column);
        for (x, c) in column.iter().enumerate() {
            data[x * g.cols + y] = *c;
        }
    }
    Ok(data)
}

/// Outcome of [`no_advantage_certificate`].
///
/// `passes` means a Hadamard sign pair already attains the operator-norm
/// bound, so classical and quantum biases coincide.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateReport {
    pub hadamard_bias: f64,
    pub norm_bound_bias: f64,
    /// `None` when the game is too large to enumerate.
    pub classical_bias: Option<f64>,
    pub passes: bool,
    pub witness_u: u32,
    pub witness_v: u32,
    pub tol: f64,
}

/// Compares the best Hadamard bias with the operator-norm bound.
///
/// Scalars are compared rather than singular vectors, so a degenerate top
/// singular subspace does not matter.
pub fn no_advantage_certificate(g: &GameMatrix, tol: f64) -> Result<CertificateReport> {
    let h = hadamard_bias(g)?;
    let bound = norm_bound_bias(g)?;
    let classical = match classical_bias(g) {
        Ok(c) => Some(c.bias),
        Err(Error::Guard { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(CertificateReport {
        hadamard_bias: h.bias,
        norm_bound_bias: bound,
        classical_bias: classical,
        passes: h.bias >= bound - tol,
        witness_u: h.u,
        witness_v: h.v,
        tol,
    })
}
