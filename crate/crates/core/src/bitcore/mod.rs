//! Bit strings, Boolean functions, input priors and the prior-weighted
//! Walsh–Hadamard spectrum.
//!
//! Index convention: the first bit `z_1` of a string `z_1 z_2 … z_n` is the
//! most significant bit of the integer index. Every table in this crate
//! (truth tables, priors, strategy tables, box tables) is indexed this way.

mod parse;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use parse::{parse_function, parse_prior, parse_prior_with};

/// Largest supported input width.
pub const MAX_WIDTH: usize = 20;

/// Strict tolerance on `Σ p(z) = 1`.
pub const PRIOR_SUM_TOL: f64 = 1e-12;

/// Tolerance accepted when the caller asks for renormalization.
pub const PRIOR_RENORMALIZE_TOL: f64 = 1e-6;

pub(crate) fn check_width_cap(n: usize) -> Result<()> {
    if n == 0 || n > MAX_WIDTH {
        return Err(Error::InvalidArgument(format!(
            "input width {n} outside 1..={MAX_WIDTH}"
        )));
    }
    Ok(())
}

#[inline]
pub(crate) fn parity(v: u32) -> bool {
    v.count_ones() & 1 == 1
}

#[inline]
pub(crate) fn sign(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

/// An `n`-bit string stored as an integer index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitString {
    value: u32,
    n: usize,
}

impl BitString {
    pub fn new(value: u32, n: usize) -> Result<Self> {
        check_width_cap(n)?;
        if (value as u64) >> n != 0 {
            return Err(Error::InvalidArgument(format!(
                "value {value} does not fit in {n} bits"
            )));
        }
        Ok(BitString { value, n })
    }

    pub fn zero(n: usize) -> Result<Self> {
        BitString::new(0, n)
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn index(&self) -> usize {
        self.value as usize
    }

    /// The bit `z_i`, with `i` counted from 1 as in `z_1 z_2 … z_n`.
    pub fn bit(&self, i: usize) -> bool {
        assert!((1..=self.n).contains(&i), "bit position {i} out of range");
        (self.value >> (self.n - i)) & 1 == 1
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        Error::check_width(self.n, other.n)?;
        Ok(BitString {
            value: self.value ^ other.value,
            n: self.n,
        })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.n)
    }
}

/// Inner product modulo 2 of two strings of equal width.
///
/// ```
/// use nonlocal::bitcore::{dot_mod2, BitString};
/// let u = BitString::new(0b10, 2).unwrap();
/// let x = BitString::new(0b11, 2).unwrap();
/// assert!(dot_mod2(&u, &x).unwrap());
/// ```
pub fn dot_mod2(u: &BitString, x: &BitString) -> Result<bool> {
    Error::check_width(u.n, x.n)?;
    Ok(parity(u.value & x.value))
}

/// Truth table of `f : {0,1}^n → {0,1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanFunction {
    n: usize,
    table: Vec<bool>,
}

impl BooleanFunction {
    pub fn new(n: usize, table: Vec<bool>) -> Result<Self> {
        check_width_cap(n)?;
        if table.len() != 1 << n {
            return Err(Error::InvalidArgument(format!(
                "truth table has {} entries, expected {}",
                table.len(),
                1usize << n
            )));
        }
        Ok(BooleanFunction { n, table })
    }

    pub fn from_fn(n: usize, f: impl Fn(u32) -> bool) -> Result<Self> {
        check_width_cap(n)?;
        BooleanFunction::new(n, (0..1u32 << n).map(f).collect())
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        BooleanFunction::from_fn(n, |_| value)
    }

    /// `f(z) = u·z ⊕ c`.
    pub fn affine(u: &BitString, c: bool) -> Result<Self> {
        let mask = u.value();
        BooleanFunction::from_fn(u.width(), |z| parity(mask & z) ^ c)
    }

    pub fn and() -> Self {
        BooleanFunction::from_fn(2, |z| z == 0b11).expect("fixed width")
    }

    pub fn or() -> Self {
        BooleanFunction::from_fn(2, |z| z != 0).expect("fixed width")
    }

    pub fn xor() -> Self {
        BooleanFunction::from_fn(2, parity).expect("fixed width")
    }

    pub fn not() -> Self {
        BooleanFunction::from_fn(1, |z| z == 0).expect("fixed width")
    }

    pub fn majority3() -> Self {
        BooleanFunction::from_fn(3, |z| z.count_ones() >= 2).expect("fixed width")
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn eval(&self, z: u32) -> bool {
        self.table[z as usize]
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn is_constant(&self) -> bool {
        self.table.iter().all(|&b| b == self.table[0])
    }

    /// True iff `f(z) = u·z ⊕ c` for some `u`, `c`.
    pub fn is_affine(&self) -> bool {
        // the candidate is fixed by f(0) and the values on unit vectors
        let c = self.table[0];
        let mut u = 0u32;
        for i in 0..self.n {
            if self.table[1 << i] ^ c {
                u |= 1 << i;
            }
        }
        self.table
            .iter()
            .enumerate()
            .all(|(z, &v)| v == parity(u & z as u32) ^ c)
    }

    /// Hex encoding where bit `z` of the number is `f(z)`.
    pub fn to_hex(&self) -> String {
        let digits = self.table.len().div_ceil(4);
        (0..digits)
            .rev()
            .map(|d| {
                let nibble = (0..4)
                    .filter(|&b| self.table.get(4 * d + b).copied().unwrap_or(false))
                    .fold(0u32, |acc, b| acc | (1 << b));
                char::from_digit(nibble, 16).expect("nibble")
            })
            .collect()
    }

    /// The `tt:n=<k>:hex=<H>` spec accepted by [`parse_function`].
    pub fn to_spec(&self) -> String {
        format!("tt:n={}:hex={}", self.n, self.to_hex())
    }
}

/// Prior `P̃(z)` over the `2^n` global inputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PriorDistribution {
    n: usize,
    p: Vec<f64>,
}

impl PriorDistribution {
    /// Validates nonnegativity, length and `|Σ p − 1| ≤ 1e-12`.
    pub fn new(n: usize, p: Vec<f64>) -> Result<Self> {
        PriorDistribution::build(n, p, false)
    }

    /// Like [`PriorDistribution::new`] but accepts sums within `1e-6` of one
    /// and rescales them.
    pub fn renormalized(n: usize, p: Vec<f64>) -> Result<Self> {
        PriorDistribution::build(n, p, true)
    }

    fn build(n: usize, mut p: Vec<f64>, renormalize: bool) -> Result<Self> {
        check_width_cap(n)?;
        if p.len() != 1 << n {
            return Err(Error::InvalidArgument(format!(
                "prior has {} entries, expected {}",
                p.len(),
                1usize << n
            )));
        }
        if let Some((z, v)) = p
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidArgument(format!(
                "prior entry {z} is {v}, must be a nonnegative real"
            )));
        }
        let sum: f64 = p.iter().sum();
        let tol = if renormalize {
            PRIOR_RENORMALIZE_TOL
        } else {
            PRIOR_SUM_TOL
        };
        if (sum - 1.0).abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "prior sums to {sum}, not 1 (tolerance {tol:e})"
            )));
        }
        if renormalize {
            p.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(PriorDistribution { n, p })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_width_cap(n)?;
        let len = 1usize << n;
        Ok(PriorDistribution {
            n,
            p: vec![1.0 / len as f64; len],
        })
    }

    pub fn point(z: &BitString) -> Self {
        let mut p = vec![0.0; 1 << z.width()];
        p[z.index()] = 1.0;
        PriorDistribution { n: z.width(), p }
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn prob(&self, z: u32) -> f64 {
        self.p[z as usize]
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn has_full_support(&self) -> bool {
        self.p.iter().all(|&v| v > 0.0)
    }

    /// `Σ_z P̃(z)²`.
    pub fn collision_probability(&self) -> f64 {
        self.p.iter().map(|v| v * v).sum()
    }
}

/// In-place unnormalized Walsh–Hadamard transform,
/// `data[u] ← Σ_x (−1)^{u·x} data[x]`.
///
/// Applying it twice multiplies the input by `data.len()`.
///
/// # Panics
/// If the length is not a power of two.
pub fn walsh_hadamard(data: &mut [f64]) {
    let len = data.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    let mut h = 1;
    while h < len {
        for block in data.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*a + *b, *a - *b);
                *a = s;
                *b = d;
            }
        }
        h *= 2;
    }
}

/// `coeff(u) = Σ_z (−1)^{f(z) + u·z} P̃(z)` for every `u`.
///
/// These are the eigenvalues of the task operator in the Hadamard basis; the
/// largest modulus fixes both the classical optimum and the quantum bound.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSpectrum {
    n: usize,
    coeff: Vec<f64>,
}

/// Moduli within this distance count as tied; the smaller index wins.
pub(crate) const ARGMAX_TIE_TOL: f64 = 1e-12;

impl FourierSpectrum {
    pub fn width(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, u: u32) -> f64 {
        self.coeff[u as usize]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeff
    }

    /// Index of the largest `|coeff(u)|`, smallest `u` on ties.
    pub fn argmax_abs(&self) -> BitString {
        let mut best = 0usize;
        for (u, c) in self.coeff.iter().enumerate().skip(1) {
            if c.abs() > self.coeff[best].abs() + ARGMAX_TIE_TOL {
                best = u;
            }
        }
        BitString {
            value: best as u32,
            n: self.n,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeff(self.argmax_abs().value()).abs()
    }

    /// `Σ_u coeff(u)²`, which equals `2^n Σ_z P̃(z)²`.
    pub fn energy(&self) -> f64 {
        self.coeff.iter().map(|c| c * c).sum()
    }
}

/// Prior-weighted spectrum of `f` via the fast transform of
/// `g(z) = (−1)^{f(z)} P̃(z)`, `O(n 2^n)`.
pub fn fourier_spectrum(f: &BooleanFunction, prior: &PriorDistribution) -> Result<FourierSpectrum> {
    Error::check_width(f.width(), prior.width())?;
    let mut coeff: Vec<f64> = f
        .table()
        .iter()
        .zip(prior.probs())
        .map(|(&bit, &p)| sign(bit) * p)
        .collect();
    walsh_hadamard(&mut coeff);
    Ok(FourierSpectrum {
        n: f.width(),
        coeff,
    })
}

/// A single coefficient by direct `O(2^n)` summation.
pub fn fourier_coefficient(
    f: &BooleanFunction,
    prior: &PriorDistribution,
    u: &BitString,
) -> Result<f64> {
    Error::check_width(f.width(), prior.width())?;
    Error::check_width(f.width(), u.width())?;
    Ok((0..1u32 << f.width())
        .map(|z| sign(f.eval(z) ^ parity(u.value() & z)) * prior.prob(z))
        .sum())
}
