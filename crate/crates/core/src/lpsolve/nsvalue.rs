use serde::Serialize;

use super::{solve_lp, LinearProgram, LpOutcome, Relation, Sense};
use crate::bitcore::{BooleanFunction, PriorDistribution};
use crate::boxes::CorrelationBox;
use crate::error::{Error, Result};
use crate::xorgame::{game_from_nlc, GameMatrix};

/// Cap on the number of box variables `4|X||Y|`.
pub const NS_MAX_VARIABLES: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NsValue {
    /// Success probability `½(1 + bias / Σ|G|)` of the best non-signalling box.
    pub value: f64,
    /// `max Σ G(x,y) ⟨A_x B_y⟩` over non-signalling boxes.
    pub bias: f64,
    /// Optimal `P(a,b|x,y)`, indexed `((x·|Y| + y)·2 + a)·2 + b`.
    pub probabilities: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl NsValue {
    /// The optimal box, when both sides are powers of two.
    pub fn as_box(&self) -> Result<CorrelationBox> {
        if !self.rows.is_power_of_two() || !self.cols.is_power_of_two() {
            return Err(Error::InvalidArgument(
                "box inputs need power-of-two sides".into(),
            ));
        }
        let table = self.probabilities.chunks(4).flat_map(|c| {
            let s: f64 = c.iter().sum();
            c.iter().map(move |v| v.max(0.0) / s)
        });
        CorrelationBox::new(
            self.rows.trailing_zeros() as usize,
            self.cols.trailing_zeros() as usize,
            table.collect(),
        )
    }
}

/// Best XOR-game value over all non-signalling boxes, by LP.
///
/// Variables are `P(a,b|x,y) ≥ 0`; rows are normalization per `(x, y)`
/// and equality of `P(a=0|x,y)` across `y` and of `P(b=0|x,y)` across `x`.
/// The objective is normalized by `Σ|G|` so the value is a probability.
pub fn ns_value_lp(g: &GameMatrix) -> Result<NsValue> {
    let (xs, ys) = (g.rows(), g.cols());
    let vars = 4 * xs * ys;
    if vars > NS_MAX_VARIABLES {
        return Err(Error::guard(
            format!("non-signalling LP with {vars} box variables"),
            format!("{NS_MAX_VARIABLES}"),
        ));
    }
    let total = g.abs_sum();
    if total == 0.0 {
        return Err(Error::InvalidArgument(
            "zero game has no success probability".into(),
        ));
    }
    let var = |x: usize, y: usize, a: usize, b: usize| ((x * ys + y) * 2 + a) * 2 + b;
    let mut objective = vec![0.0; vars];
    for x in 0..xs {
        for y in 0..ys {
            let w = g.get(x, y) / total;
            for a in 0..2 {
                for b in 0..2 {
                    objective[var(x, y, a, b)] = if a == b { w } else { -w };
                }
            }
        }
    }
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for x in 0..xs {
        for y in 0..ys {
            let terms: Vec<(usize, f64)> =
                (0..4).map(|k| (var(x, y, k >> 1, k & 1), 1.0)).collect();
            lp.add_sparse_constraint(&terms, Relation::Eq, 1.0);
        }
    }
    // with normalization, the a = 0 (b = 0) marginal fixes both outcomes
    for x in 0..xs {
        for y in 1..ys {
            lp.add_sparse_constraint(
                &[
                    (var(x, y, 0, 0), 1.0),
                    (var(x, y, 0, 1), 1.0),
                    (var(x, 0, 0, 0), -1.0),
                    (var(x, 0, 0, 1), -1.0),
                ],
                Relation::Eq,
                0.0,
            );
        }
    }
    for y in 0..ys {
        for x in 1..xs {
            lp.add_sparse_constraint(
                &[
                    (var(x, y, 0, 0), 1.0),
                    (var(x, y, 1, 0), 1.0),
                    (var(0, y, 0, 0), -1.0),
                    (var(0, y, 1, 0), -1.0),
                ],
                Relation::Eq,
                0.0,
            );
        }
    }
    let sol = match solve_lp(&lp)? {
        LpOutcome::Optimal(s) => s,
        other => {
            return Err(Error::Numerical(format!(
                "non-signalling LP reported {}",
                other.status()
            )))
        }
    };
    Ok(NsValue {
        value: 0.5 * (1.0 + sol.objective),
        bias: sol.objective * total,
        probabilities: sol.primal,
        rows: xs,
        cols: ys,
    })
}

/// [`ns_value_lp`] on the nonlocal computation game of `(f, P̃)`.
pub fn ns_value_nlc(f: &BooleanFunction, prior: &PriorDistribution) -> Result<NsValue> {
    ns_value_lp(&game_from_nlc(f, prior)?)
}
