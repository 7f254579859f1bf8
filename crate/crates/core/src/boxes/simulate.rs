use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::Serialize;

use super::{sample_box, BoxProtocol, CorrelationBox};
use crate::bitcore::{BitString, BooleanFunction, PriorDistribution};
use crate::error::{Error, Result};
use crate::nlvalue::{split_input, StrategyPair};
use crate::rng::seeded;

/// Anything that maps inputs `(x, y)` to a random output pair.
pub trait Resource {
    fn input_width(&self) -> usize;
    fn respond<R: Rng + ?Sized>(&self, x: u32, y: u32, rng: &mut R) -> (bool, bool);
}

impl Resource for StrategyPair {
    fn input_width(&self) -> usize {
        self.width()
    }

    fn respond<R: Rng + ?Sized>(&self, x: u32, y: u32, _rng: &mut R) -> (bool, bool) {
        (self.alice()[x as usize], self.bob()[y as usize])
    }
}

/// Only square boxes (`nx = ny`) have a single input width.
impl Resource for CorrelationBox {
    fn input_width(&self) -> usize {
        self.nx()
    }

    fn respond<R: Rng + ?Sized>(&self, x: u32, y: u32, rng: &mut R) -> (bool, bool) {
        sample_box(self, x, y, rng)
    }
}

impl Resource for BoxProtocol {
    fn input_width(&self) -> usize {
        self.width()
    }

    fn respond<R: Rng + ?Sized>(&self, x: u32, y: u32, rng: &mut R) -> (bool, bool) {
        let mut a = self.alice_local(x);
        let mut b = self.bob_local(y);
        for (k, w) in self.boxes().iter().enumerate() {
            let (bx, by) = self.box_inputs(k, x, y);
            let (ak, bk) = sample_box(&w.correlation, bx, by, rng);
            a ^= ak;
            b ^= bk;
        }
        (a, b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    /// `√(p̂(1 − p̂)/N)`.
    pub std_error: f64,
    pub trials: u64,
    pub successes: u64,
}

/// Samples `z ~ P̃`, splits it uniformly into `x ⊕ y = z`, queries the
/// resource and counts `a ⊕ b = f(z)`.
pub fn monte_carlo_success<T: Resource>(
    resource: &T,
    f: &BooleanFunction,
    prior: &PriorDistribution,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    Error::check_width(f.width(), prior.width())?;
    Error::check_width(f.width(), resource.input_width())?;
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let n = f.width();
    let sampler = WeightedIndex::new(prior.probs())
        .map_err(|e| Error::InvalidArgument(format!("prior cannot be sampled: {e}")))?;
    let mut rng = seeded(seed);
    let mut successes = 0u64;
    for _ in 0..trials {
        let z = sampler.sample(&mut rng) as u32;
        let shares = split_input(&BitString::new(z, n)?, 2, &mut rng)?;
        let (a, b) = resource.respond(shares[0].value(), shares[1].value(), &mut rng);
        successes += (a ^ b == f.eval(z)) as u64;
    }
    let estimate = successes as f64 / trials as f64;
    Ok(MonteCarloEstimate {
        estimate,
        std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        trials,
        successes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{
        and_protocol_from_two_boxes, noisy_pr_box, perfect_nlc_box, protocol_success_exact,
    };
    use crate::nlvalue::classical_optimum;

    fn within_four_sigma(est: &MonteCarloEstimate, exact: f64) -> bool {
        let sigma = (exact * (1.0 - exact) / est.trials as f64).sqrt();
        (est.estimate - exact).abs() <= 4.0 * sigma.max(1e-12)
    }

    #[test]
    fn noisy_and_protocol() {
        let f = BooleanFunction::and();
        let prior = PriorDistribution::uniform(2).unwrap();
        for p in [0.6, (2.0 + 2f64.sqrt()) / 4.0, 0.95] {
            let b = noisy_pr_box(p).unwrap();
            let proto = and_protocol_from_two_boxes(&b, &b).unwrap();
            let exact = protocol_success_exact(&proto, &f, &prior).unwrap();
            let est = monte_carlo_success(&proto, &f, &prior, 100_000, 42).unwrap();
            assert!(within_four_sigma(&est, exact), "p={p}: {est:?} vs {exact}");
        }
    }

    #[test]
    fn deterministic_strategy_on_skewed_prior() {
        let f = BooleanFunction::majority3();
        let prior =
            PriorDistribution::new(3, vec![0.3, 0.05, 0.05, 0.1, 0.1, 0.1, 0.1, 0.2]).unwrap();
        let report = classical_optimum(&f, &prior).unwrap();
        let est = monte_carlo_success(&report.strategy.to_pair(), &f, &prior, 100_000, 7).unwrap();
        assert!(
            within_four_sigma(&est, report.value),
            "{est:?} vs {}",
            report.value
        );
    }

    #[test]
    fn perfect_box_never_fails() {
        let f = BooleanFunction::or();
        let prior = PriorDistribution::uniform(2).unwrap();
        let est =
            monte_carlo_success(&perfect_nlc_box(&f).unwrap(), &f, &prior, 10_000, 3).unwrap();
        assert_eq!(est.successes, 10_000);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn reproducible_and_validated() {
        let f = BooleanFunction::and();
        let prior = PriorDistribution::uniform(2).unwrap();
        let proto =
            and_protocol_from_two_boxes(&noisy_pr_box(0.8).unwrap(), &noisy_pr_box(0.8).unwrap())
                .unwrap();
        let a = monte_carlo_success(&proto, &f, &prior, 5_000, 11).unwrap();
        let b = monte_carlo_success(&proto, &f, &prior, 5_000, 11).unwrap();
        assert_eq!(a, b);
        assert!(monte_carlo_success(&proto, &f, &prior, 0, 11).is_err());
        assert!(monte_carlo_success(&noisy_pr_box(0.8).unwrap(), &f, &prior, 10, 1).is_err());
    }
}
