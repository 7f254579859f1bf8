//! Correlation boxes `P(a, b | x, y)`: local, noisy and non-signalling
//! resources, their validity checks, and exact and sampled success
//! probabilities on XOR tasks.

mod protocol;
mod simulate;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitcore::{BooleanFunction, PriorDistribution};
use crate::error::{Error, Result};
use crate::xorgame::GameMatrix;

pub use protocol::{
    and_protocol_from_two_boxes, protocol_success_exact, protocol_task_success, BoxProtocol,
    WiredBox, PROTOCOL_MAX_TERMS,
};
pub use simulate::{monte_carlo_success, MonteCarloEstimate, Resource};

/// Tolerance on `Σ_{a,b} P(a,b|x,y) = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Default tolerance of [`is_nonsignalling`] and [`marginals_uniform`].
pub const DEFAULT_BOX_TOL: f64 = 1e-9;
/// Largest input width per party.
pub const MAX_BOX_WIDTH: usize = 10;

/// Dense table indexed `(x, y, a, b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoxFile", into = "BoxFile")]
pub struct CorrelationBox {
    nx: usize,
    ny: usize,
    table: Vec<f64>,
}

/// On-disk form: `{nx, ny, table}` with `table[x][y][a][b]`.
#[derive(Serialize, Deserialize)]
struct BoxFile {
    nx: usize,
    ny: usize,
    table: Vec<Vec<[[f64; 2]; 2]>>,
}

impl TryFrom<BoxFile> for CorrelationBox {
    type Error = Error;

    fn try_from(file: BoxFile) -> Result<Self> {
        check_box_widths(file.nx, file.ny)?;
        if file.table.len() != 1 << file.nx || file.table.iter().any(|r| r.len() != 1 << file.ny) {
            return Err(Error::Parse(format!(
                "box table must be {}x{}x2x2",
                1usize << file.nx,
                1usize << file.ny
            )));
        }
        let table = file
            .table
            .iter()
            .flatten()
            .flat_map(|ab| ab.iter().flatten().copied())
            .collect();
        CorrelationBox::new(file.nx, file.ny, table)
    }
}

impl From<CorrelationBox> for BoxFile {
    fn from(b: CorrelationBox) -> Self {
        let cols = 1usize << b.ny;
        let table = b
            .table
            .chunks(4 * cols)
            .map(|row| {
                row.chunks(4)
                    .map(|c| [[c[0], c[1]], [c[2], c[3]]])
                    .collect()
            })
            .collect();
        BoxFile {
            nx: b.nx,
            ny: b.ny,
            table,
        }
    }
}

fn check_box_widths(nx: usize, ny: usize) -> Result<()> {
    if !(1..=MAX_BOX_WIDTH).contains(&nx) || !(1..=MAX_BOX_WIDTH).contains(&ny) {
        return Err(Error::InvalidArgument(format!(
            "box input widths ({nx}, {ny}) outside 1..={MAX_BOX_WIDTH}"
        )));
    }
    Ok(())
}

#[inline]
fn slot(ny: usize, x: u32, y: u32, a: bool, b: bool) -> usize {
    ((((x as usize) << ny | y as usize) * 2 + a as usize) * 2) + b as usize
}

impl CorrelationBox {
    /// Validates nonnegativity and per-input normalization.
    pub fn new(nx: usize, ny: usize, table: Vec<f64>) -> Result<Self> {
        check_box_widths(nx, ny)?;
        let expected = 4usize << (nx + ny);
        if table.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "box table has {} entries, expected {expected}",
                table.len()
            )));
        }
        if let Some(v) = table.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "box entry {v} is not a probability"
            )));
        }
        for (i, cell) in table.chunks(4).enumerate() {
            let s: f64 = cell.iter().sum();
            if (s - 1.0).abs() > NORMALIZATION_TOL {
                let (x, y) = (i >> ny, i & ((1 << ny) - 1));
                return Err(Error::InvalidArgument(format!(
                    "P(·,·|x={x},y={y}) sums to {s}"
                )));
            }
        }
        Ok(CorrelationBox { nx, ny, table })
    }

    pub fn from_fn(nx: usize, ny: usize, p: impl Fn(u32, u32, bool, bool) -> f64) -> Result<Self> {
        check_box_widths(nx, ny)?;
        let mut table = Vec::with_capacity(4usize << (nx + ny));
        for x in 0..1u32 << nx {
            for y in 0..1u32 << ny {
                for a in [false, true] {
                    for b in [false, true] {
                        table.push(p(x, y, a, b));
                    }
                }
            }
        }
        CorrelationBox::new(nx, ny, table)
    }

    /// Local deterministic box `a = alice(x)`, `b = bob(y)`.
    pub fn deterministic(
        nx: usize,
        ny: usize,
        alice: impl Fn(u32) -> bool,
        bob: impl Fn(u32) -> bool,
    ) -> Result<Self> {
        CorrelationBox::from_fn(nx, ny, |x, y, a, b| {
            (a == alice(x) && b == bob(y)) as u8 as f64
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn prob(&self, x: u32, y: u32, a: bool, b: bool) -> f64 {
        self.table[slot(self.ny, x, y, a, b)]
    }

    /// `[P(00), P(01), P(10), P(11)]` for inputs `(x, y)`.
    pub fn outcomes(&self, x: u32, y: u32) -> &[f64] {
        let i = slot(self.ny, x, y, false, false);
        &self.table[i..i + 4]
    }

    /// `P(a ⊕ b = 0 | x, y)`.
    pub fn agreement(&self, x: u32, y: u32) -> f64 {
        let o = self.outcomes(x, y);
        o[0] + o[3]
    }

    pub fn alice_marginal(&self, x: u32, y: u32, a: bool) -> f64 {
        self.prob(x, y, a, false) + self.prob(x, y, a, true)
    }

    pub fn bob_marginal(&self, x: u32, y: u32, b: bool) -> f64 {
        self.prob(x, y, false, b) + self.prob(x, y, true, b)
    }

    /// `w · self + (1 − w) · other`.
    pub fn mix(&self, other: &CorrelationBox, w: f64) -> Result<CorrelationBox> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidArgument(format!(
                "mixing weight {w} outside [0, 1]"
            )));
        }
        Error::check_width(self.nx, other.nx)?;
        Error::check_width(self.ny, other.ny)?;
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(p, q)| w * p + (1.0 - w) * q)
            .collect();
        CorrelationBox::new(self.nx, self.ny, table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite floats serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("box JSON: {e}")))
    }
}

/// `P(a,b|x,y) = ½` when `a ⊕ b = x·y`.
pub fn pr_box() -> CorrelationBox {
    noisy_pr_box(1.0).expect("p = 1 is valid")
}

/// `p · PR + (1 − p) · anti-PR`, where the anti-PR box has `a ⊕ b = x·y ⊕ 1`.
/// Marginals stay uniform for every `p`.
pub fn noisy_pr_box(p: f64) -> Result<CorrelationBox> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "noise parameter {p} outside [0, 1]"
        )));
    }
    CorrelationBox::from_fn(1, 1, |x, y, a, b| {
        if a ^ b == (x & y == 1) {
            0.5 * p
        } else {
            0.5 * (1.0 - p)
        }
    })
}

/// `P(a,b|x,y) = ½` when `a ⊕ b = f(x ⊕ y)`: both valid output pairs, each
/// with probability one half.
pub fn perfect_nlc_box(f: &BooleanFunction) -> Result<CorrelationBox> {
    let n = f.width();
    CorrelationBox::from_fn(
        n,
        n,
        |x, y, a, b| {
            if a ^ b == f.eval(x ^ y) {
                0.5
            } else {
                0.0
            }
        },
    )
}

/// Each party's output distribution is independent of the other's input.
pub fn is_nonsignalling(b: &CorrelationBox, tol: f64) -> bool {
    let (xs, ys) = (1u32 << b.nx, 1u32 << b.ny);
    for out in [false, true] {
        for x in 0..xs {
            let reference = b.alice_marginal(x, 0, out);
            if (1..ys).any(|y| (b.alice_marginal(x, y, out) - reference).abs() > tol) {
                return false;
            }
        }
        for y in 0..ys {
            let reference = b.bob_marginal(0, y, out);
            if (1..xs).any(|x| (b.bob_marginal(x, y, out) - reference).abs() > tol) {
                return false;
            }
        }
    }
    true
}

/// Both single-party marginals equal `½` on every input pair.
pub fn marginals_uniform(b: &CorrelationBox, tol: f64) -> bool {
    (0..1u32 << b.nx).all(|x| {
        (0..1u32 << b.ny).all(|y| {
            (b.alice_marginal(x, y, false) - 0.5).abs() <= tol
                && (b.bob_marginal(x, y, false) - 0.5).abs() <= tol
        })
    })
}

/// An XOR task: inputs `(x, y)` arrive with probability `weight(x, y)` and
/// the parties win when `a ⊕ b = target(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct XorTask {
    nx: usize,
    ny: usize,
    weights: Vec<f64>,
    target: Vec<bool>,
}

impl XorTask {
    pub fn new(nx: usize, ny: usize, weights: Vec<f64>, target: Vec<bool>) -> Result<Self> {
        check_box_widths(nx, ny)?;
        let len = 1usize << (nx + ny);
        if weights.len() != len || target.len() != len {
            return Err(Error::InvalidArgument(format!(
                "task tables must have {len} entries"
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0)
            || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::InvalidArgument(
                "task weights must form a distribution".into(),
            ));
        }
        Ok(XorTask {
            nx,
            ny,
            weights,
            target,
        })
    }

    /// Nonlocal computation of `f`: `weight = 2^{−n} P̃(x⊕y)`, `target = f(x⊕y)`.
    pub fn nonlocal(f: &BooleanFunction, prior: &PriorDistribution) -> Result<Self> {
        Error::check_width(f.width(), prior.width())?;
        let n = f.width();
        let len = 1u32 << n;
        let scale = 1.0 / len as f64;
        let mut weights = Vec::with_capacity(1 << (2 * n));
        let mut target = Vec::with_capacity(1 << (2 * n));
        for x in 0..len {
            for y in 0..len {
                weights.push(scale * prior.prob(x ^ y));
                target.push(f.eval(x ^ y));
            }
        }
        XorTask::new(n, n, weights, target)
    }

    /// Uniform single-bit inputs, target `x·y`.
    pub fn chsh() -> Self {
        XorTask {
            nx: 1,
            ny: 1,
            weights: vec![0.25; 4],
            target: vec![false, false, false, true],
        }
    }

    /// Weights `|G|/Σ|G|`, target set where `G < 0`.
    pub fn from_game(g: &GameMatrix) -> Result<Self> {
        if !g.is_power_of_two_shape() {
            return Err(Error::InvalidArgument(
                "task needs power-of-two sides".into(),
            ));
        }
        let total = g.abs_sum();
        if total == 0.0 {
            return Err(Error::InvalidArgument("zero game has no task form".into()));
        }
        XorTask::new(
            g.rows().trailing_zeros() as usize,
            g.cols().trailing_zeros() as usize,
            g.entries().iter().map(|v| v.abs() / total).collect(),
            g.entries().iter().map(|&v| v < 0.0).collect(),
        )
    }

    /// `G(x,y) = weight(x,y) (−1)^{target(x,y)}`.
    pub fn to_game(&self) -> GameMatrix {
        GameMatrix::new(
            1 << self.nx,
            1 << self.ny,
            self.weights
                .iter()
                .zip(&self.target)
                .map(|(w, &t)| if t { -w } else { *w })
                .collect(),
        )
        .expect("shape fixed by construction")
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn weight(&self, x: u32, y: u32) -> f64 {
        self.weights[(x as usize) << self.ny | y as usize]
    }

    pub fn target(&self, x: u32, y: u32) -> bool {
        self.target[(x as usize) << self.ny | y as usize]
    }
}

/// Exact success probability of a box on an XOR task.
pub fn task_success_exact(b: &CorrelationBox, task: &XorTask) -> Result<f64> {
    Error::check_width(task.nx, b.nx)?;
    Error::check_width(task.ny, b.ny)?;
    let mut total = 0.0;
    for x in 0..1u32 << b.nx {
        for y in 0..1u32 << b.ny {
            let agree = b.agreement(x, y);
            let win = if task.target(x, y) {
                1.0 - agree
            } else {
                agree
            };
            total += task.weight(x, y) * win;
        }
    }
    Ok(total)
}

/// `Σ_{x,y} 2^{−n} P̃(x⊕y) Σ_{a⊕b = f(x⊕y)} P(a,b|x,y)`.
pub fn box_success_exact(
    b: &CorrelationBox,
    f: &BooleanFunction,
    prior: &PriorDistribution,
) -> Result<f64> {
    Error::check_width(f.width(), b.nx)?;
    Error::check_width(f.width(), b.ny)?;
    task_success_exact(b, &XorTask::nonlocal(f, prior)?)
}

/// Draws `(a, b)` from `P(·,·|x,y)`.
pub fn sample_box<R: Rng + ?Sized>(
    b: &CorrelationBox,
    x: u32,
    y: u32,
    rng: &mut R,
) -> (bool, bool) {
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    let outcomes = b.outcomes(x, y);
    for (i, p) in outcomes.iter().enumerate() {
        acc += p;
        if r < acc {
            return (i & 2 != 0, i & 1 != 0);
        }
    }
    // r landed in the rounding gap above the cumulative sum
    let last = outcomes.iter().rposition(|&p| p > 0.0).unwrap_or(3);
    (last & 2 != 0, last & 1 != 0)
}

pub(crate) fn product_input(x: u32, masks: &[u32]) -> u32 {
    masks
        .iter()
        .fold(0, |acc, &m| acc << 1 | (x & m == m) as u32)
}
