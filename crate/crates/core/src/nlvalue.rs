//! Values and optimal strategies for nonlocal computation.
//!
//! Alice receives `x`, Bob receives `y`, and the global input is
//! `z = x ⊕ y` drawn from a prior `P̃`; each share on its own is uniformly
//! random. They win when `a ⊕ b = f(z)`. The best classical strategy and the
//! best quantum strategy both reach `½(1 + max_u |coeff(u)|)`, attained by
//! the affine strategy `a_x = u·x ⊕ δ`, `b_y = u·y`.

use rand::Rng;
use serde::Serialize;

use crate::bitcore::{
    fourier_coefficient, fourier_spectrum, parity, BitString, BooleanFunction, PriorDistribution,
};
use crate::error::{Error, Result};

/// Width cap for the `O(4^n)` exact strategy evaluation.
pub const EXACT_MAX_WIDTH: usize = 10;
/// Width cap for the exhaustive strategy search.
pub const BRUTE_FORCE_MAX_WIDTH: usize = 3;
/// Party cap for the exact m-party evaluation.
pub const MULTIPARTY_MAX_PARTIES: usize = 4;
/// Width cap for the exact m-party evaluation.
pub const MULTIPARTY_MAX_WIDTH: usize = 3;

/// `a_x = u·x ⊕ δ`, `b_y = u·y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AffineStrategy {
    pub u: BitString,
    pub delta: bool,
}

impl AffineStrategy {
    pub fn new(u: BitString, delta: bool) -> Self {
        AffineStrategy { u, delta }
    }

    pub fn alice(&self, x: u32) -> bool {
        parity(self.u.value() & x) ^ self.delta
    }

    pub fn bob(&self, y: u32) -> bool {
        parity(self.u.value() & y)
    }

    pub fn to_pair(&self) -> StrategyPair {
        let len = 1u32 << self.u.width();
        StrategyPair {
            a: (0..len).map(|x| self.alice(x)).collect(),
            b: (0..len).map(|y| self.bob(y)).collect(),
        }
    }
}

/// Deterministic output tables `a_x` and `b_y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrategyPair {
    a: Vec<bool>,
    b: Vec<bool>,
}

impl StrategyPair {
    pub fn new(a: Vec<bool>, b: Vec<bool>) -> Result<Self> {
        if a.len() != b.len() || !a.len().is_power_of_two() || a.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "strategy tables must share a power-of-two length ≥ 2, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        Ok(StrategyPair { a, b })
    }

    pub fn width(&self) -> usize {
        self.a.len().trailing_zeros() as usize
    }

    pub fn alice(&self) -> &[bool] {
        &self.a
    }

    pub fn bob(&self) -> &[bool] {
        &self.b
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskValueReport {
    pub value: f64,
    pub strategy: AffineStrategy,
    pub spectrum_argmax: BitString,
    /// Signed `coeff(spectrum_argmax)`.
    pub coefficient: f64,
}

/// Best classical success probability and an affine strategy achieving it.
///
/// `u` is the argmax of `|coeff(u)|` (smallest on ties) and `δ = 1` exactly
/// when `coeff(u) < 0`.
pub fn classical_optimum(
    f: &BooleanFunction,
    prior: &PriorDistribution,
) -> Result<TaskValueReport> {
    let spectrum = fourier_spectrum(f, prior)?;
    let u = spectrum.argmax_abs();
    let coefficient = spectrum.coeff(u.value());
    Ok(TaskValueReport {
        value: 0.5 * (1.0 + coefficient.abs()),
        strategy: AffineStrategy::new(u, coefficient < 0.0),
        spectrum_argmax: u,
        coefficient,
    })
}

/// Upper bound on the quantum success probability, `½(1 + max_u |coeff(u)|)`.
///
/// Always equal to `classical_optimum(f, prior).value`: entanglement gives no
/// advantage for nonlocal computation.
pub fn quantum_bound(f: &BooleanFunction, prior: &PriorDistribution) -> Result<f64> {
    let spectrum = fourier_spectrum(f, prior)?;
    Ok(0.5 * (1.0 + spectrum.max_abs()))
}

/// Success probability of an affine strategy, `½(1 + (−1)^δ coeff(u))`, in
/// `O(2^n)`.
pub fn affine_strategy_value(
    s: &AffineStrategy,
    f: &BooleanFunction,
    prior: &PriorDistribution,
) -> Result<f64> {
    let c = fourier_coefficient(f, prior, &s.u)?;
    Ok(0.5 * (1.0 + if s.delta { -c } else { c }))
}

/// `2^{−n} Σ_{x,y} P̃(x⊕y) [a_x ⊕ b_y = f(x⊕y)]` by the full double loop.
pub fn strategy_value_exact(
    s: &StrategyPair,
    f: &BooleanFunction,
    prior: &PriorDistribution,
) -> Result<f64> {
    Error::check_width(f.width(), prior.width())?;
    Error::check_width(f.width(), s.width())?;
    let n = f.width();
    if n > EXACT_MAX_WIDTH {
        return Err(Error::guard(
            format!("exact strategy evaluation at n={n}"),
            format!("n ≤ {EXACT_MAX_WIDTH}"),
        ));
    }
    let len = 1u32 << n;
    let mut total = 0.0;
    for x in 0..len {
        let ax = s.a[x as usize];
        for y in 0..len {
            let z = x ^ y;
            if ax ^ s.b[y as usize] == f.eval(z) {
                total += prior.prob(z);
            }
        }
    }
    Ok(total / len as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteForceReport {
    pub value: f64,
    pub best: StrategyPair,
}

/// Exhaustive maximum over all deterministic table pairs (`n ≤ 3`).
///
/// Alice's `2^{2^n}` tables are enumerated; for each, Bob's best reply is
/// chosen per `y`. Ties keep the first table found and `b_y = 0`.
pub fn brute_force_optimum(
    f: &BooleanFunction,
    prior: &PriorDistribution,
) -> Result<BruteForceReport> {
    Error::check_width(f.width(), prior.width())?;
    let n = f.width();
    if n > BRUTE_FORCE_MAX_WIDTH {
        return Err(Error::guard(
            format!("brute-force search at n={n}"),
            format!("n ≤ {BRUTE_FORCE_MAX_WIDTH}"),
        ));
    }
    let len = 1usize << n;
    let mut best_value = f64::NEG_INFINITY;
    let mut best = None;
    let mut b = vec![false; len];
    for a_index in 0u64..1 << len {
        let a = |x: usize| a_index >> x & 1 == 1;
        let mut total = 0.0;
        for (y, by) in b.iter_mut().enumerate() {
            // weight won by b_y = 0 and by b_y = 1
            let (mut w0, mut w1) = (0.0, 0.0);
            for x in 0..len {
                let z = (x ^ y) as u32;
                if a(x) == f.eval(z) {
                    w0 += prior.prob(z);
                } else {
                    w1 += prior.prob(z);
                }
            }
            *by = w1 > w0;
            total += w0.max(w1);
        }
        let value = total / len as f64;
        if value > best_value {
            best_value = value;
            best = Some(StrategyPair {
                a: (0..len).map(a).collect(),
                b: b.clone(),
            });
        }
    }
    Ok(BruteForceReport {
        value: best_value,
        best: best.expect("at least one table"),
    })
}

/// Output tables for `m` parties: party 0 outputs `u·x_0 ⊕ δ`, the others
/// `u·x_i`.
pub fn multiparty_strategy(m: usize, u: &BitString, delta: bool) -> Result<Vec<Vec<bool>>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 parties, got {m}"
        )));
    }
    let s = AffineStrategy::new(*u, delta);
    let len = 1u32 << u.width();
    Ok((0..m)
        .map(|i| {
            (0..len)
                .map(|x| if i == 0 { s.alice(x) } else { s.bob(x) })
                .collect()
        })
        .collect())
}

/// Exact m-party success probability: every split `x_0 ⊕ … ⊕ x_{m−1} = z`
/// is equally likely given `z`.
pub fn multiparty_value_exact(
    tables: &[Vec<bool>],
    f: &BooleanFunction,
    prior: &PriorDistribution,
) -> Result<f64> {
    Error::check_width(f.width(), prior.width())?;
    let m = tables.len();
    let n = f.width();
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 parties, got {m}"
        )));
    }
    if m > MULTIPARTY_MAX_PARTIES || n > MULTIPARTY_MAX_WIDTH {
        return Err(Error::guard(
            format!("exact {m}-party evaluation at n={n}"),
            format!("m ≤ {MULTIPARTY_MAX_PARTIES}, n ≤ {MULTIPARTY_MAX_WIDTH}"),
        ));
    }
    let len = 1usize << n;
    if let Some(t) = tables.iter().find(|t| t.len() != len) {
        return Err(Error::WidthMismatch {
            expected: len,
            found: t.len(),
        });
    }
    // free shares x_0..x_{m-2} packed n bits each; x_{m-1} is fixed by z
    let free = m - 1;
    let splits = 1usize << (n * free);
    let mask = len - 1;
    let mut total = 0.0;
    for z in 0..len {
        let p = prior.prob(z as u32);
        if p == 0.0 {
            continue;
        }
        let target = f.eval(z as u32);
        let mut wins = 0usize;
        for packed in 0..splits {
            let mut last = z;
            let mut out = false;
            for (i, table) in tables.iter().enumerate().take(free) {
                let xi = (packed >> (n * i)) & mask;
                last ^= xi;
                out ^= table[xi];
            }
            out ^= tables[free][last];
            wins += (out == target) as usize;
        }
        total += p * wins as f64 / splits as f64;
    }
    Ok(total)
}

/// `m` shares, uniform subject to XOR-ing to `z`.
pub fn split_input<R: Rng + ?Sized>(
    z: &BitString,
    m: usize,
    rng: &mut R,
) -> Result<Vec<BitString>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 parties, got {m}"
        )));
    }
    let n = z.width();
    let mut last = z.value();
    let mut shares = Vec::with_capacity(m);
    for _ in 0..m - 1 {
        let x = rng.gen_range(0..1u32 << n);
        last ^= x;
        shares.push(BitString::new(x, n)?);
    }
    shares.push(BitString::new(last, n)?);
    Ok(shares)
}
