use rand::Rng;
use serde::Serialize;

use super::{classical_bias, GameMatrix};
use crate::error::{Error, Result};
use crate::rng::substream;

const IMPROVEMENT_TOL: f64 = 1e-10;

/// Real unit vectors `u_x`, `v_y` in dimension `d`; the correlation of
/// outputs on `(x, y)` is `⟨u_x, v_y⟩`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VectorStrategy {
    pub dim: usize,
    pub alice: Vec<Vec<f64>>,
    pub bob: Vec<Vec<f64>>,
}

impl VectorStrategy {
    pub fn bias(&self, g: &GameMatrix) -> f64 {
        let mut total = 0.0;
        for (x, ux) in self.alice.iter().enumerate() {
            for (y, vy) in self.bob.iter().enumerate() {
                total += g.get(x, y) * dot(ux, vy);
            }
        }
        total
    }
}

#[derive(Clone, Debug)]
pub struct SeesawOptions {
    /// Defaults to `min(|X|, |Y|)`.
    pub dim: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        SeesawOptions {
            dim: None,
            restarts: 16,
            max_iters: 10_000,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeesawResult {
    pub bias: f64,
    pub strategy: VectorStrategy,
    pub restart: usize,
    /// Bias after each half-sweep of the winning restart.
    pub trace: Vec<f64>,
}

/// Lower bound on the quantum bias by alternating maximization.
///
/// With Bob fixed, Alice's best unit vectors are `normalize(Σ_y G(x,y) v_y)`,
/// and symmetrically for Bob, so each half-sweep can only raise the bias.
/// Restart 0 starts from the optimal classical signs embedded along one axis
/// (when the game is small enough to enumerate); the others from random
/// vectors. The best restart wins, lowest index on ties.
pub fn seesaw_quantum_bias(g: &GameMatrix, opts: &SeesawOptions) -> Result<SeesawResult> {
    let dim = opts.dim.unwrap_or(g.rows().min(g.cols()));
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "see-saw dimension must be at least 1".into(),
        ));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument(
            "see-saw needs at least one restart".into(),
        ));
    }
    let classical = match classical_bias(g) {
        Ok(c) => Some(c),
        Err(Error::Guard { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut best: Option<SeesawResult> = None;
    for restart in 0..opts.restarts {
        let start = match (&classical, restart) {
            (Some(c), 0) => VectorStrategy {
                dim,
                alice: c.a.iter().map(|&s| axis(dim, s as f64)).collect(),
                bob: c.b.iter().map(|&s| axis(dim, s as f64)).collect(),
            },
            _ => random_strategy(g, dim, &mut substream(opts.seed, restart as u64)),
        };
        let run = optimize(g, start, opts.max_iters, restart);
        if best.as_ref().is_none_or(|b| run.bias > b.bias) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn optimize(
    g: &GameMatrix,
    mut s: VectorStrategy,
    max_iters: usize,
    restart: usize,
) -> SeesawResult {
    let mut bias = s.bias(g);
    let mut trace = vec![bias];
    for _ in 0..max_iters {
        for (x, ux) in s.alice.iter_mut().enumerate() {
            let mut target = vec![0.0; s.dim];
            for (y, vy) in s.bob.iter().enumerate() {
                axpy(&mut target, g.get(x, y), vy);
            }
            replace_if_nonzero(ux, target);
        }
        trace.push(s.bias(g));
        for (y, vy) in s.bob.iter_mut().enumerate() {
            let mut target = vec![0.0; s.dim];
            for (x, ux) in s.alice.iter().enumerate() {
                axpy(&mut target, g.get(x, y), ux);
            }
            replace_if_nonzero(vy, target);
        }
        let next = s.bias(g);
        trace.push(next);
        let improvement = next - bias;
        bias = next;
        if improvement < IMPROVEMENT_TOL {
            break;
        }
    }
    SeesawResult {
        bias,
        strategy: s,
        restart,
        trace,
    }
}

fn random_strategy<R: Rng>(g: &GameMatrix, dim: usize, rng: &mut R) -> VectorStrategy {
    let mut unit = || loop {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 1e-3 {
            v.iter_mut().for_each(|c| *c /= n);
            return v;
        }
    };
    VectorStrategy {
        dim,
        alice: (0..g.rows()).map(|_| unit()).collect(),
        bob: (0..g.cols()).map(|_| unit()).collect(),
    }
}

fn axis(dim: usize, value: f64) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[0] = value;
    v
}

fn replace_if_nonzero(slot: &mut Vec<f64>, mut target: Vec<f64>) {
    let n = norm(&target);
    if n > 0.0 {
        target.iter_mut().for_each(|c| *c /= n);
        *slot = target;
    }
}

fn axpy(acc: &mut [f64], a: f64, x: &[f64]) {
    for (o, xi) in acc.iter_mut().zip(x) {
        *o += a * xi;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::{BooleanFunction, PriorDistribution};
    use crate::xorgame::{game_from_nlc, norm_bound_bias};
    use proptest::prelude::*;

    #[test]
    fn chsh_reaches_tsirelson() {
        let opts = SeesawOptions {
            dim: Some(2),
            ..SeesawOptions::default()
        };
        let r = seesaw_quantum_bias(&GameMatrix::chsh(), &opts).unwrap();
        assert!(
            r.bias >= std::f64::consts::FRAC_1_SQRT_2 - 1e-7,
            "{}",
            r.bias
        );
        assert!(r.bias <= 0.5f64.sqrt() + 1e-9);
        for v in r.strategy.alice.iter().chain(&r.strategy.bob) {
            assert!((norm(v) - 1.0).abs() < 1e-9);
        }
        assert!((r.strategy.bias(&GameMatrix::chsh()) - r.bias).abs() < 1e-12);
    }

    #[test]
    fn and_game_has_no_quantum_gain() {
        let g = game_from_nlc(
            &BooleanFunction::and(),
            &PriorDistribution::uniform(2).unwrap(),
        )
        .unwrap();
        let r = seesaw_quantum_bias(&g, &SeesawOptions::default()).unwrap();
        assert!((r.bias - 0.5).abs() <= 1e-6, "{}", r.bias);
    }

    #[test]
    fn zero_game() {
        let g = GameMatrix::zeros(2, 2).unwrap();
        assert_eq!(
            seesaw_quantum_bias(&g, &SeesawOptions::default())
                .unwrap()
                .bias,
            0.0
        );
    }

    #[test]
    fn invalid_options() {
        let opts = SeesawOptions {
            dim: Some(0),
            ..SeesawOptions::default()
        };
        assert!(seesaw_quantum_bias(&GameMatrix::chsh(), &opts).is_err());
    }

    #[test]
    fn deterministic_for_a_seed() {
        let opts = SeesawOptions::default();
        let g = GameMatrix::chsh();
        let a = seesaw_quantum_bias(&g, &opts).unwrap();
        let b = seesaw_quantum_bias(&g, &opts).unwrap();
        assert_eq!(a.bias, b.bias);
        assert_eq!(a.strategy, b.strategy);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn bracketed_and_monotone(
            r in 1usize..5, c in 1usize..5,
            e in proptest::collection::vec(-1.0f64..1.0, 16),
            seed in any::<u64>(),
        ) {
            let g = GameMatrix::new(r, c, e[..r * c].to_vec()).unwrap();
            let opts = SeesawOptions { restarts: 4, seed, ..SeesawOptions::default() };
            let s = seesaw_quantum_bias(&g, &opts).unwrap();
            let classical = classical_bias(&g).unwrap().bias;
            prop_assert!(s.bias >= classical - 1e-9);
            prop_assert!(s.bias <= norm_bound_bias(&g).unwrap() + 1e-9);
            for w in s.trace.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-12);
            }
        }
    }
}
