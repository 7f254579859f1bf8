use serde::Serialize;

use super::{solve_lp, LinearProgram, LpOutcome, LpSolution, Relation, Sense};
use crate::bitcore::{parity, BitString, BooleanFunction, PriorDistribution};
use crate::error::{Error, Result};
use crate::nlvalue::EXACT_MAX_WIDTH;

/// Largest allowed `|value − certificate|`.
pub const MINIMAX_GAP_TOL: f64 = 1e-9;
const SUPPORT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimaxReport {
    pub worst_case_value: f64,
    pub worst_prior: PriorDistribution,
    /// Weight of the affine strategy `(u, δ)` at index `2u + δ`.
    pub optimal_mixture: Vec<f64>,
    /// Difference between this report's value and the opposite side's.
    pub duality_gap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MixtureWeight {
    pub u: BitString,
    pub delta: bool,
    pub weight: f64,
}

impl MinimaxReport {
    /// Strategies with weight above `1e-12`, in index order.
    pub fn support(&self) -> Vec<MixtureWeight> {
        let n = self.worst_prior.width();
        self.optimal_mixture
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > SUPPORT_TOL)
            .map(|(s, &weight)| MixtureWeight {
                u: BitString::new((s >> 1) as u32, n).expect("index below 2^n"),
                delta: s & 1 == 1,
                weight,
            })
            .collect()
    }
}

/// `Σ_s μ_s [u_s·z ⊕ δ_s = f(z)]` for every `z`.
pub fn mixture_scores(f: &BooleanFunction, mixture: &[f64]) -> Result<Vec<f64>> {
    let len = f.len();
    if mixture.len() != 2 * len {
        return Err(Error::InvalidArgument(format!(
            "mixture has {} weights, expected {}",
            mixture.len(),
            2 * len
        )));
    }
    Ok((0..len as u32)
        .map(|z| {
            mixture
                .iter()
                .enumerate()
                .filter(|(s, _)| parity((*s >> 1) as u32 & z) ^ (s & 1 == 1) == f.eval(z))
                .map(|(_, w)| w)
                .sum()
        })
        .collect())
}

fn check_guard(f: &BooleanFunction) -> Result<()> {
    let n = f.width();
    if n > EXACT_MAX_WIDTH {
        return Err(Error::guard(
            format!("minimax LP at n={n}"),
            format!("n ≤ {EXACT_MAX_WIDTH}"),
        ));
    }
    Ok(())
}

fn optimal(lp: &LinearProgram, what: &str) -> Result<LpSolution> {
    match solve_lp(lp)? {
        LpOutcome::Optimal(s) => Ok(s),
        other => Err(Error::Numerical(format!(
            "{what} LP reported {}",
            other.status()
        ))),
    }
}

/// Clamps rounding noise below zero and rescales to a distribution.
fn distribution(v: &[f64], what: &str) -> Result<Vec<f64>> {
    let clamped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::Numerical(format!("{what} sums to {total}")));
    }
    Ok(clamped.iter().map(|x| x / total).collect())
}

/// Signs `(−1)^{f(z) + u·z}`, row `u`.
fn sign_rows(f: &BooleanFunction) -> Vec<Vec<f64>> {
    let len = f.len() as u32;
    (0..len)
        .map(|u| {
            (0..len)
                .map(|z| if f.eval(z) ^ parity(u & z) { -1.0 } else { 1.0 })
                .collect()
        })
        .collect()
}

/// Adversarial prior: `min_P max_u |coeff_P(u)|` as an LP over `(P, t)`.
///
/// The rows `coeff(u) ≤ t` and `−coeff(u) ≤ t` are exactly "strategy
/// `(u, 0)` resp. `(u, 1)` succeeds with probability at most `½(1 + t)`",
/// so their multipliers form the optimal strategy mixture. The reported
/// gap compares `½(1 + t*)` with that mixture's worst per-input score.
pub fn worst_case_prior(f: &BooleanFunction) -> Result<MinimaxReport> {
    check_guard(f)?;
    let len = f.len();
    // variable 0 is t, then P(z)
    let mut objective = vec![0.0; len + 1];
    objective[0] = 1.0;
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    for row in sign_rows(f) {
        let mut plus = vec![-1.0];
        plus.extend(&row);
        lp.add_constraint(plus, Relation::Le, 0.0);
        let mut minus = vec![-1.0];
        minus.extend(row.iter().map(|v| -v));
        lp.add_constraint(minus, Relation::Le, 0.0);
    }
    let mut simplex = vec![1.0; len + 1];
    simplex[0] = 0.0;
    lp.add_constraint(simplex, Relation::Eq, 1.0);

    let sol = optimal(&lp, "worst-case prior")?;
    let value = 0.5 * (1.0 + sol.objective);
    let prior = PriorDistribution::new(f.width(), distribution(&sol.primal[1..], "worst prior")?)?;
    // minimization duals on Le rows are ≤ 0
    let weights: Vec<f64> = sol.dual[..2 * len].iter().map(|y| -y).collect();
    let mixture = distribution(&weights, "optimal mixture")?;
    let certified = mixture_scores(f, &mixture)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(MinimaxReport {
        worst_case_value: value,
        worst_prior: prior,
        optimal_mixture: mixture,
        duality_gap: (value - certified).abs(),
    })
}

/// Best mixed strategy: `max_μ min_z Σ_s μ_s [u_s·z ⊕ δ_s = f(z)]` over the
/// `2^{n+1}` affine strategies.
///
/// Restricting to affine strategies loses nothing: for every prior some
/// affine strategy is optimal among all deterministic ones, so both
/// restricted and unrestricted games have the same value against every
/// prior and hence the same minimax value. The result is checked against
/// [`worst_case_prior`]; a gap above `1e-9` is a numerical error.
pub fn worst_case_mixture(f: &BooleanFunction) -> Result<MinimaxReport> {
    check_guard(f)?;
    let len = f.len();
    let strategies = 2 * len;
    let mut objective = vec![0.0; strategies + 1];
    objective[strategies] = 1.0;
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for z in 0..len as u32 {
        // w − Σ_s μ_s [s correct on z] ≤ 0
        let mut row: Vec<f64> = (0..strategies)
            .map(|s| {
                let correct = parity((s >> 1) as u32 & z) ^ (s & 1 == 1) == f.eval(z);
                if correct {
                    -1.0
                } else {
                    0.0
                }
            })
            .collect();
        row.push(1.0);
        lp.add_constraint(row, Relation::Le, 0.0);
    }
    let mut simplex = vec![1.0; strategies];
    simplex.push(0.0);
    lp.add_constraint(simplex, Relation::Eq, 1.0);

    let sol = optimal(&lp, "worst-case mixture")?;
    let value = sol.objective;
    let mixture = distribution(&sol.primal[..strategies], "optimal mixture")?;
    let prior = PriorDistribution::new(f.width(), distribution(&sol.dual[..len], "worst prior")?)?;
    let dual_side = worst_case_prior(f)?;
    let gap = (value - dual_side.worst_case_value).abs();
    if gap > MINIMAX_GAP_TOL {
        return Err(Error::Numerical(format!(
            "mixture value {value} and prior value {} differ by {gap:e}",
            dual_side.worst_case_value
        )));
    }
    Ok(MinimaxReport {
        worst_case_value: value,
        worst_prior: prior,
        optimal_mixture: mixture,
        duality_gap: gap,
    })
}
