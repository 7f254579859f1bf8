use serde::{Deserialize, Serialize};

use super::{game_from_nlc, GameMatrix};
use crate::bitcore::{BooleanFunction, PriorDistribution};
use crate::error::{Error, Result};
use crate::nlvalue::{classical_optimum, AffineStrategy};

/// `Σ_{x,y} C(x,y) ⟨A_x B_y⟩ ≤ K` with `C(x,y) = (−1)^{f(x⊕y)} P̃(x⊕y)` and
/// `K = 2^n (2 P_C^max − 1)`.
///
/// The same coefficients and bound also hold for quantum correlations.
#[derive(Clone, Debug, PartialEq)]
pub struct BellInequality {
    pub n: usize,
    pub coefficients: GameMatrix,
    pub bound: f64,
    /// Affine strategy that attains the bound.
    pub saturating: AffineStrategy,
}

#[derive(Serialize, Deserialize)]
struct BellFile {
    n: usize,
    #[serde(rename = "C")]
    c: Vec<Vec<f64>>,
    #[serde(rename = "K")]
    k: f64,
}

impl BellInequality {
    /// Left-hand side for `±1` assignments `a_x`, `b_y`.
    pub fn evaluate(&self, a: &[i8], b: &[i8]) -> f64 {
        let a: Vec<f64> = a.iter().map(|&v| v as f64).collect();
        let b: Vec<f64> = b.iter().map(|&v| v as f64).collect();
        self.coefficients.bias_of(&a, &b)
    }

    /// Left-hand side for deterministic output bits (`A_x = (−1)^{a_x}`).
    pub fn evaluate_bits(&self, a: &[bool], b: &[bool]) -> f64 {
        let signs = |t: &[bool]| {
            t.iter()
                .map(|&bit| if bit { -1 } else { 1 })
                .collect::<Vec<i8>>()
        };
        self.evaluate(&signs(a), &signs(b))
    }

    /// `{"n": .., "C": [[..]], "K": ..}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&BellFile {
            n: self.n,
            c: self.coefficients.to_rows(),
            k: self.bound,
        })
        .expect("finite floats serialize")
    }

    /// Reads the coefficients and bound back; the saturating strategy is
    /// recomputed from the coefficients.
    pub fn coefficients_from_json(text: &str) -> Result<(usize, GameMatrix, f64)> {
        let file: BellFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("Bell JSON: {e}")))?;
        let c = GameMatrix::from_rows(&file.c).map_err(|e| Error::Parse(e.to_string()))?;
        Ok((file.n, c, file.k))
    }
}

/// Bell inequality induced by `(f, P̃)`. Fails with a numerical error if the
/// optimal affine strategy does not saturate the computed bound.
pub fn bell_inequality(f: &BooleanFunction, prior: &PriorDistribution) -> Result<BellInequality> {
    let n = f.width();
    let scale = (1u64 << n) as f64;
    let coefficients = game_from_nlc(f, prior)?.scaled(scale);
    let report = classical_optimum(f, prior)?;
    let bound = scale * (2.0 * report.value - 1.0);
    let ineq = BellInequality {
        n,
        coefficients,
        bound,
        saturating: report.strategy,
    };
    let pair = report.strategy.to_pair();
    let achieved = ineq.evaluate_bits(pair.alice(), pair.bob());
    if (achieved - bound).abs() > 1e-9 * bound.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "optimal affine strategy gives {achieved}, bound is {bound}"
        )));
    }
    Ok(ineq)
}
