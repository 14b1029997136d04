// SPDX-License-Identifier: Apache-2.0

//! Fixtures shared by the kernel benchmarks.

use nfl_core::category::BasisBall;
use nfl_core::extrapolation::Learner;
use nfl_core::measures::{sample, Law};
use nfl_core::registry::{law, learner, stream};
use nfl_core::{BitStream, BitString};

/// Learners with cheap, medium and combinator-heavy prediction costs.
pub fn learners() -> Vec<(&'static str, Learner)> {
    ["last-bit", "majority(3)", "combine-weak(last-bit,[all-zeros,alternating,periodic(110),all-ones])"]
        .into_iter()
        .map(|s| (s, learner(s).expect("registry name")))
        .collect()
}

/// A fresh (unmemoized) pseudo-random stream.
pub fn random_stream(seed: u64) -> BitStream {
    stream(&format!("random({seed},1/2)")).expect("registry name")
}

/// A forecaster/source pair and a sampled path of length `n`.
pub fn merge_fixture(n: usize) -> (Law, Law, BitString) {
    let mu = law("laplace-bayes").expect("registry name");
    let lambda = law("glue([0,10,11],[1/10,1/5,7/10],laplace-bayes)").expect("registry name");
    let path = sample(lambda.as_ref(), 7, n).expect("full-support source");
    (mu, lambda, path)
}

pub fn chain_fixture() -> (Law, BasisBall) {
    (law("bernoulli(1/2)").expect("registry name"), BasisBall::depth_one_full())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(learners().len(), 3);
        assert_eq!(random_stream(1).prefix(64).unwrap().len(), 64);
        assert_eq!(merge_fixture(32).2.len(), 32);
        assert_eq!(chain_fixture().1.depth(), 1);
    }
}
