//! Dense two-phase simplex with Bland's rule, and the two LPs built on it:
//! the worst-case (minimax) value of a nonlocal computation task and the
//! non-signalling value of an XOR game.

mod minimax;
mod nsvalue;

use serde::Serialize;

use crate::error::{Error, Result};

pub use minimax::{
    mixture_scores, worst_case_mixture, worst_case_prior, MinimaxReport, MixtureWeight,
    MINIMAX_GAP_TOL,
};
pub use nsvalue::{ns_value_lp, ns_value_nlc, NsValue, NS_MAX_VARIABLES};

/// Largest tableau (rows × columns) the solver allocates; it keeps two.
pub const MAX_TABLEAU_ENTRIES: usize = 1 << 25;
/// Reduced costs above `−COST_TOL` count as optimal.
pub const COST_TOL: f64 = 1e-10;
/// Smallest pivot element accepted by the ratio test.
pub const PIVOT_TOL: f64 = 1e-7;
/// Phase-one residual, relative to `max(1, ‖b‖∞)`, treated as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `sense c·x` subject to row constraints and per-variable bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

impl LinearProgram {
    /// All variables start nonnegative.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let bounds = vec![VarBound::NonNegative; objective.len()];
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            bounds,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(
        &mut self,
        coefficients: Vec<f64>,
        relation: Relation,
        rhs: f64,
    ) -> &mut Self {
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
        self
    }

    /// Row given as `(variable, coefficient)` pairs; repeated indices add.
    pub fn add_sparse_constraint(
        &mut self,
        terms: &[(usize, f64)],
        relation: Relation,
        rhs: f64,
    ) -> &mut Self {
        let mut row = vec![0.0; self.num_vars()];
        for &(j, v) in terms {
            if let Some(slot) = row.get_mut(j) {
                *slot += v;
            } else {
                // keep the bad index visible to validate()
                row.resize(j + 1, 0.0);
                row[j] = v;
            }
        }
        self.add_constraint(row, relation, rhs)
    }

    pub fn set_bound(&mut self, var: usize, bound: VarBound) -> &mut Self {
        self.bounds[var] = bound;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::InvalidArgument("LP has no variables".into()));
        }
        if self.bounds.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "objective has a non-finite coefficient".into(),
            ));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "constraint {i} has {} coefficients for {n} variables",
                    c.coefficients.len()
                )));
            }
            if !c.rhs.is_finite() || c.coefficients.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "constraint {i} is not finite"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpSolution {
    pub objective: f64,
    pub primal: Vec<f64>,
    /// One multiplier per constraint with `objective = Σ rhs_i · dual_i`.
    ///
    /// For `Maximize`, `dual_i ≥ 0` on `Le` rows and `≤ 0` on `Ge` rows;
    /// for `Minimize` the signs flip. `Eq` rows are free. Each column `j`
    /// satisfies `Σ_i dual_i A_ij ≥ c_j` (max) or `≤ c_j` (min), with
    /// equality for free variables.
    pub dual: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> &'static str {
        match self {
            LpOutcome::Optimal(_) => "optimal",
            LpOutcome::Infeasible => "infeasible",
            LpOutcome::Unbounded => "unbounded",
        }
    }

    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

/// Dense tableau: `rows × (cols + 1)` with the right-hand side last, plus a
/// reduced-cost row `d_j = c_B B⁻¹A_j − c_j` whose last entry is `c_B B⁻¹b`.
///
/// Rounding accumulates over pivots, so every `rows` pivots (and before
/// accepting a terminal state) the tableau is rebuilt from the original rows
/// for the current basis.
struct Tableau {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    original: Vec<f64>,
    cost: Vec<f64>,
    phase_costs: Vec<f64>,
    basis: Vec<usize>,
    since_refactor: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn set_costs(&mut self, c: &[f64]) {
        let w = self.width();
        self.phase_costs = c.to_vec();
        self.cost = vec![0.0; w];
        for (o, v) in self.cost.iter_mut().zip(&c[..self.cols]) {
            *o = -v;
        }
        for i in 0..self.rows {
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                let row = &self.data[i * w..(i + 1) * w];
                for (o, a) in self.cost.iter_mut().zip(row) {
                    *o += cb * a;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width();
        let p = self.at(r, c);
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        prow.iter_mut().for_each(|v| *v /= p);
        prow[c] = 1.0;
        let eliminate = |row: &mut [f64]| {
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
        eliminate(&mut self.cost);
        self.basis[r] = c;
        self.since_refactor += 1;
    }

    /// Recomputes `B⁻¹[A | b]` from the original rows by Gauss-Jordan
    /// elimination over the basic columns with partial pivoting.
    fn refactor(&mut self) -> Result<()> {
        let (m, w) = (self.rows, self.width());
        let mut data = self.original.clone();
        let mut assigned = vec![false; m];
        let mut order = vec![0; m];
        for (k, &col) in self.basis.iter().enumerate() {
            let (r, p) = (0..m)
                .filter(|&i| !assigned[i])
                .map(|i| (i, data[i * w + col]))
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .expect("one unassigned row per basic column");
            if p.abs() < 1e-11 {
                return Err(Error::Numerical("simplex basis became singular".into()));
            }
            assigned[r] = true;
            order[k] = r;
            let (before, rest) = data.split_at_mut(r * w);
            let (prow, after) = rest.split_at_mut(w);
            prow.iter_mut().for_each(|v| *v /= p);
            let eliminate = |row: &mut [f64]| {
                let f = row[col];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(prow.iter()) {
                        *v -= f * pv;
                    }
                }
            };
            before.chunks_mut(w).for_each(eliminate);
            after.chunks_mut(w).for_each(eliminate);
        }
        self.data = order
            .iter()
            .flat_map(|&r| data[r * w..(r + 1) * w].iter().copied())
            .collect();
        let c = std::mem::take(&mut self.phase_costs);
        self.set_costs(&c);
        self.since_refactor = 0;
        Ok(())
    }

    /// Maximizes with Bland's rule: lowest eligible entering index, ratio
    /// ties broken by lowest basic index.
    fn run(&mut self, enterable: impl Fn(usize) -> bool, pivots: &mut usize) -> Result<Phase> {
        loop {
            let Some(c) = (0..self.cols).find(|&j| enterable(j) && self.cost[j] < -COST_TOL) else {
                if self.since_refactor > 0 {
                    self.refactor()?;
                    continue;
                }
                return Ok(Phase::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - 1e-12
                            || (ratio <= best + 1e-12 && self.basis[i] < self.basis[r])
                        {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                if self.since_refactor > 0 {
                    self.refactor()?;
                    continue;
                }
                return Ok(Phase::Unbounded);
            };
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(Error::Numerical(format!(
                    "simplex exceeded {MAX_PIVOTS} pivots"
                )));
            }
            self.pivot(r, c);
            if self.since_refactor >= self.rows.max(50) {
                self.refactor()?;
            }
        }
    }
}

/// Solves an LP by the two-phase dense simplex method with Bland's rule.
///
/// Free variables are split as `x⁺ − x⁻`. Rows with negative right-hand
/// side are negated first so that slacks and artificials start feasible.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.num_vars();
    let m = lp.constraints.len();

    // column layout: structural (with split free parts), slack/surplus, artificial
    let mut structural = Vec::with_capacity(n);
    let mut cols = 0;
    for b in &lp.bounds {
        structural.push(cols);
        cols += if *b == VarBound::Free { 2 } else { 1 };
    }
    let flipped: Vec<bool> = lp.constraints.iter().map(|c| c.rhs < 0.0).collect();
    let relation: Vec<Relation> = lp
        .constraints
        .iter()
        .zip(&flipped)
        .map(|(c, &f)| match (c.relation, f) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        })
        .collect();
    let mut slack = vec![None; m];
    for (i, r) in relation.iter().enumerate() {
        if *r != Relation::Eq {
            slack[i] = Some(cols);
            cols += 1;
        }
    }
    let art_start = cols;
    let mut identity = vec![0; m];
    for (i, r) in relation.iter().enumerate() {
        identity[i] = match r {
            Relation::Le => slack[i].expect("Le rows have a slack"),
            _ => {
                cols += 1;
                cols - 1
            }
        };
    }
    let width = cols + 1;
    if m.saturating_mul(width) > MAX_TABLEAU_ENTRIES {
        return Err(Error::guard(
            format!("dense simplex tableau of {m}×{width}"),
            format!("{MAX_TABLEAU_ENTRIES} entries"),
        ));
    }

    let mut data = vec![0.0; m * width];
    for (i, c) in lp.constraints.iter().enumerate() {
        let s = if flipped[i] { -1.0 } else { 1.0 };
        let row = &mut data[i * width..(i + 1) * width];
        for (j, &v) in c.coefficients.iter().enumerate() {
            row[structural[j]] = s * v;
            if lp.bounds[j] == VarBound::Free {
                row[structural[j] + 1] = -s * v;
            }
        }
        match relation[i] {
            Relation::Le => row[slack[i].unwrap()] = 1.0,
            Relation::Ge => {
                row[slack[i].unwrap()] = -1.0;
                row[identity[i]] = 1.0;
            }
            Relation::Eq => row[identity[i]] = 1.0,
        }
        row[cols] = s * c.rhs;
    }
    let mut t = Tableau {
        rows: m,
        cols,
        original: data.clone(),
        data,
        cost: Vec::new(),
        phase_costs: Vec::new(),
        basis: identity.clone(),
        since_refactor: 0,
    };
    let mut pivots = 0;

    if art_start < cols {
        let mut phase1 = vec![0.0; cols];
        phase1[art_start..].iter_mut().for_each(|v| *v = -1.0);
        t.set_costs(&phase1);
        t.run(|_| true, &mut pivots)?;
        let scale = lp
            .constraints
            .iter()
            .fold(1.0f64, |a, c| a.max(c.rhs.abs()));
        if t.cost[cols] < -FEASIBILITY_TOL * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // drive zero-level artificials out; rows with no usable column are
        // redundant and keep their artificial basic at zero
        for i in 0..m {
            if t.basis[i] >= art_start {
                if let Some(j) = (0..art_start).find(|&j| t.at(i, j).abs() > PIVOT_TOL) {
                    t.pivot(i, j);
                }
            }
        }
    }

    let mut c = vec![0.0; cols];
    let sign = if lp.sense == Sense::Maximize {
        1.0
    } else {
        -1.0
    };
    for (j, &v) in lp.objective.iter().enumerate() {
        c[structural[j]] = sign * v;
        if lp.bounds[j] == VarBound::Free {
            c[structural[j] + 1] = -sign * v;
        }
    }
    t.set_costs(&c);
    if let Phase::Unbounded = t.run(|j| j < art_start, &mut pivots)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut values = vec![0.0; cols];
    for i in 0..m {
        values[t.basis[i]] = t.rhs(i);
    }
    let primal: Vec<f64> = (0..n)
        .map(|j| {
            let k = structural[j];
            match lp.bounds[j] {
                VarBound::NonNegative => values[k],
                VarBound::Free => values[k] - values[k + 1],
            }
        })
        .collect();
    let dual: Vec<f64> = (0..m)
        .map(|i| {
            let y = t.cost[identity[i]];
            let y = if flipped[i] { -y } else { y };
            sign * y
        })
        .collect();
    Ok(LpOutcome::Optimal(LpSolution {
        objective: sign * t.cost[cols],
        primal,
        dual,
    }))
}
