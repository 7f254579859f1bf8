use rand::Rng;

use super::GameMatrix;
use crate::error::{Error, Result};
use crate::rng::substream;

pub const DEFAULT_SVD_TOL: f64 = 1e-12;

const MAX_ITERS: usize = 200_000;
const STARTS: u64 = 3;
const MAX_STARTS: u64 = 8;
const START_SEED: u64 = 0x0005_eed0_f5bd;

/// Largest singular value of `G` by power iteration on `GᵀG`.
///
/// Runs from a fixed schedule of pseudo-random start vectors and keeps the
/// largest converged Rayleigh quotient. A run converges when the residual
/// `‖GᵀG v − λ v‖` drops below `tol · λ`, or when the Rayleigh quotient moves
/// by less than `tol · λ` between iteration `k/2` and `k` at a power-of-two
/// checkpoint `k ≥ 1024` (nearly tied top values: the vector is slow, the
/// value is not). Runs that exhaust their budget are replaced by further
/// starts.
pub fn top_singular_value(g: &GameMatrix, tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if g.frobenius_norm() == 0.0 {
        return Ok(0.0);
    }
    // residuals cannot fall much below rounding of GᵀG v
    let tol = tol.max(1e-14 * (g.cols() as f64).sqrt());
    let mut best: Option<f64> = None;
    let mut converged = 0;
    let mut last = (0.0, f64::INFINITY);
    for start in 0..MAX_STARTS {
        match power_run(g, start, tol) {
            Ok(lambda) => {
                best = Some(best.map_or(lambda, |b: f64| b.max(lambda)));
                converged += 1;
                if converged == STARTS {
                    break;
                }
            }
            Err(state) => last = state,
        }
    }
    match best {
        Some(lambda) => Ok(lambda.sqrt()),
        None => Err(Error::Numerical(format!(
            "power iteration did not converge after {MAX_STARTS} starts of {MAX_ITERS} iterations \
             (last eigenvalue estimate {:e}, relative residual {:e}, tolerance {tol:e})",
            last.0, last.1
        ))),
    }
}

/// One power-iteration run; `Err` carries `(λ, relative residual)` on failure.
fn power_run(g: &GameMatrix, start: u64, tol: f64) -> std::result::Result<f64, (f64, f64)> {
    let mut rng = substream(START_SEED, start);
    let mut v: Vec<f64> = (0..g.cols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    if normalize(&mut v) == 0.0 {
        v[0] = 1.0;
    }
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    let mut checkpoint = 0.0;
    for k in 1..=MAX_ITERS {
        let w = g.apply(&v);
        lambda = w.iter().map(|x| x * x).sum::<f64>();
        let mut next = g.apply_transpose(&w);
        if lambda == 0.0 {
            // v is in the null space; a later start will differ
            return Err((0.0, f64::INFINITY));
        }
        if !lambda.is_finite() {
            return Err((lambda, f64::NAN));
        }
        residual = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt()
            / lambda;
        if residual <= tol {
            return Ok(lambda);
        }
        if k.is_power_of_two() {
            if k >= 1024 && (lambda - checkpoint).abs() <= tol * lambda {
                return Ok(lambda);
            }
            checkpoint = lambda;
        }
        normalize(&mut next);
        v = next;
    }
    Err((lambda, residual))
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// `√(|X||Y|) · σ_max(G)`, an upper bound on the quantum bias.
///
/// Stacking Alice's unit vectors gives a vector of norm `√|X|` (Bob's
/// `√|Y|`), and the bias is a bilinear form in those stacks.
pub fn norm_bound_bias(g: &GameMatrix) -> Result<f64> {
    let sigma = top_singular_value(g, DEFAULT_SVD_TOL)?;
    Ok(((g.rows() * g.cols()) as f64).sqrt() * sigma)
}
