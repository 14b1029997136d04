// SPDX-License-Identifier: Apache-2.0

//! Finite-horizon evaluators for next-chance learning (NC), its weak
//! version, and a depth-bounded diagnostic for strong NC (merging).
//!
//! Almost-sure statements are checked by seed majorities over sampled
//! paths: a verdict is reached only when at least [`EvalThresholds::seed_fraction`]
//! of the seeds agree on it.

use num::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrapolation::{defeat_with_conditional, CHECKPOINT_COUNT, TREND_WINDOW};
use crate::measures::{sample, ConditionalLaw, Law};
use crate::rational::{int, rat, Rational};
use crate::seq_core::{checkpoints, non_decreasing, non_increasing, BitStream, BitString, Verdict};

/// Default cap on the cylinder depth of [`merge_depth`].
pub const MAX_MERGE_DEPTH: usize = 10;

/// Caveat attached to every strong-NC diagnostic.
pub const STRONG_NC_CAVEAT: &str = "depth-bounded diagnostic: total variation over the depth-d \
     cylinder algebra is a lower bound for the supremum over all Borel events and does not \
     certify strong learning";

/// Decision thresholds, surfaced in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalThresholds {
    /// Fraction of seeds that must agree before a verdict is issued.
    #[serde(with = "crate::rational::text")]
    pub seed_fraction: Rational,
    pub trend_window: usize,
    pub checkpoint_count: usize,
    /// Slack on the good-set density for weak NC.
    #[serde(with = "crate::rational::text")]
    pub density_tol: Rational,
}

impl Default for EvalThresholds {
    fn default() -> Self {
        EvalThresholds {
            seed_fraction: rat(9, 10),
            trend_window: TREND_WINDOW,
            checkpoint_count: CHECKPOINT_COUNT,
            density_tol: rat(1, 100),
        }
    }
}

impl EvalThresholds {
    fn ladder(&self, horizon: usize) -> Vec<usize> {
        checkpoints(horizon, self.checkpoint_count.min(horizon)).expect("1 <= count <= horizon")
    }

    fn aggregate(&self, per_seed: impl Iterator<Item = Verdict> + Clone) -> Verdict {
        let total = per_seed.clone().count();
        let quorum = |v: Verdict| {
            let hits = per_seed.clone().filter(|&x| x == v).count();
            total > 0 && Rational::from_integer(hits.into()) >= &self.seed_fraction * int(total as i64)
        };
        if quorum(Verdict::Consistent) {
            Verdict::Consistent
        } else if quorum(Verdict::Refuted) {
            Verdict::Refuted
        } else {
            Verdict::Inconclusive
        }
    }
}

/// Gaps `|μ(1|σ[n]) − λ(1|σ[n])|` along one path, for `n = 0 .. horizon-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapTrajectory {
    pub seed: Option<u64>,
    pub horizon: usize,
    #[serde(with = "crate::rational::text")]
    pub epsilon: Rational,
    /// `gaps[n]` compares the forecasts after the first `n` bits.
    #[serde(with = "crate::rational::text")]
    pub gaps: Vec<Rational>,
    /// Fraction of `n` with `gaps[n] < ε`.
    #[serde(with = "crate::rational::text")]
    pub good_set_density: Rational,
    /// `(c, fraction of n < c with gaps[n] < ε)` along the checkpoint ladder.
    #[serde(with = "crate::rational::text")]
    pub good_density_trajectory: Vec<(usize, Rational)>,
    pub verdict: Verdict,
}

impl GapTrajectory {
    pub fn final_gap(&self) -> &Rational {
        self.gaps.last().expect("horizon >= 1")
    }

    /// Gap values at the checkpoint ladder (gap after `c - 1` bits).
    pub fn sampled(&self, ladder: &[usize]) -> Vec<(usize, Rational)> {
        ladder.iter().map(|&c| (c, self.gaps[c - 1].clone())).collect()
    }
}

fn require_full_support(mu: &dyn ConditionalLaw) -> Result<()> {
    if mu.full_support() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "forecaster {} must have full support",
            mu.describe()
        )))
    }
}

fn check_epsilon(epsilon: &Rational) -> Result<()> {
    if *epsilon <= int(0) {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    Ok(())
}

/// Exact gaps along the realized path `sigma`.
pub fn gap_trajectory(
    mu: &dyn ConditionalLaw,
    lambda: &dyn ConditionalLaw,
    sigma: &BitString,
    epsilon: &Rational,
) -> Result<GapTrajectory> {
    gap_trajectory_with(mu, lambda, sigma, epsilon, &EvalThresholds::default())
}

fn gap_trajectory_with(
    mu: &dyn ConditionalLaw,
    lambda: &dyn ConditionalLaw,
    sigma: &BitString,
    epsilon: &Rational,
    thresholds: &EvalThresholds,
) -> Result<GapTrajectory> {
    require_full_support(mu)?;
    check_epsilon(epsilon)?;
    if sigma.is_empty() {
        return Err(Error::Precondition("path must have length >= 1".into()));
    }
    let horizon = sigma.len();
    let mut gaps = Vec::with_capacity(horizon);
    let mut u = BitString::with_capacity(horizon);
    for b in sigma.iter() {
        let g = (mu.conditional(&u)? - lambda.conditional(&u)?).abs();
        gaps.push(g);
        u.push(b);
    }
    let ladder = thresholds.ladder(horizon);
    let good: Vec<bool> = gaps.iter().map(|g| g < epsilon).collect();
    let mut trajectory = Vec::with_capacity(ladder.len());
    let mut count = 0usize;
    let mut i = 0usize;
    for &c in &ladder {
        while i < c {
            count += good[i] as usize;
            i += 1;
        }
        trajectory.push((c, Rational::new(count.into(), c.into())));
    }
    let good_set_density = trajectory.last().expect("non-empty ladder").1.clone();
    Ok(GapTrajectory {
        seed: None,
        horizon,
        epsilon: epsilon.clone(),
        gaps,
        good_set_density,
        good_density_trajectory: trajectory,
        verdict: Verdict::Inconclusive,
    })
}

/// Per-path NC decision.
fn nc_path_verdict(t: &GapTrajectory, tail: usize, ladder: &[usize], window: usize) -> Verdict {
    let h = t.horizon;
    let tail_gaps = &t.gaps[h - tail..];
    if tail_gaps.iter().all(|g| *g < t.epsilon) {
        return Verdict::Consistent;
    }
    let twice = &t.epsilon * int(2);
    let tail_violation = tail_gaps.iter().any(|g| *g >= twice);
    // a violation of 2ε in every one of the last `window` checkpoint windows
    let persistent = ladder.len() >= window
        && (ladder.len() - window..ladder.len()).all(|i| {
            let lo = if i == 0 { 0 } else { ladder[i - 1] };
            t.gaps[lo..ladder[i]].iter().any(|g| *g >= twice)
        });
    if tail_violation && persistent {
        Verdict::Refuted
    } else {
        Verdict::Inconclusive
    }
}

fn weak_path_verdict(t: &GapTrajectory, r: &Rational, tol: &Rational, window: usize) -> Verdict {
    let last: Vec<Rational> = t
        .good_density_trajectory
        .iter()
        .rev()
        .take(window)
        .rev()
        .map(|(_, d)| d.min(r).clone())
        .collect();
    let threshold = r - tol;
    if t.good_set_density >= threshold && non_decreasing(&last) {
        Verdict::Consistent
    } else if t.good_set_density < threshold && non_increasing(&last) {
        Verdict::Refuted
    } else {
        Verdict::Inconclusive
    }
}

/// Aggregated NC or weak-NC evaluation over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastReport {
    pub criterion: String,
    pub forecaster: String,
    pub source: String,
    pub horizon: usize,
    #[serde(with = "crate::rational::text")]
    pub epsilon: Rational,
    pub tail: Option<usize>,
    #[serde(with = "crate::rational::text")]
    pub r: Option<Rational>,
    pub thresholds: EvalThresholds,
    pub verdict: Verdict,
    pub per_seed: Vec<GapTrajectory>,
}

fn sampled_trajectories(
    mu: &Law,
    lambda: &Law,
    seeds: &[u64],
    horizon: usize,
    epsilon: &Rational,
    thresholds: &EvalThresholds,
) -> Result<Vec<GapTrajectory>> {
    require_full_support(&**mu)?;
    check_epsilon(epsilon)?;
    if seeds.is_empty() || horizon == 0 {
        return Err(Error::Precondition("need at least one seed and horizon >= 1".into()));
    }
    seeds
        .par_iter()
        .map(|&seed| {
            let path = sample(&**lambda, seed, horizon)?;
            let mut t = gap_trajectory_with(&**mu, &**lambda, &path, epsilon, thresholds)?;
            t.seed = Some(seed);
            Ok(t)
        })
        .collect()
}

/// NC at a finite horizon: consistent when, for enough seeds, every gap in
/// the tail window is below `ε`; refuted when gaps of at least `2ε` show up
/// in the tail and in each of the last trend windows.
pub fn check_nc(
    mu: &Law,
    lambda: &Law,
    seeds: &[u64],
    horizon: usize,
    epsilon: &Rational,
    tail: usize,
    thresholds: &EvalThresholds,
) -> Result<ForecastReport> {
    if tail == 0 || tail > horizon {
        return Err(Error::Precondition(format!(
            "need 1 <= tail <= horizon, got tail={tail}"
        )));
    }
    let ladder = thresholds.ladder(horizon);
    let mut per_seed = sampled_trajectories(mu, lambda, seeds, horizon, epsilon, thresholds)?;
    for t in &mut per_seed {
        t.verdict = nc_path_verdict(t, tail, &ladder, thresholds.trend_window);
    }
    let verdict = thresholds.aggregate(per_seed.iter().map(|t| t.verdict));
    Ok(ForecastReport {
        criterion: "NC".into(),
        forecaster: mu.describe(),
        source: lambda.describe(),
        horizon,
        epsilon: epsilon.clone(),
        tail: Some(tail),
        r: None,
        thresholds: thresholds.clone(),
        verdict,
        per_seed,
    })
}

/// Weak NC: decided on the density of `n` with gap below `ε` and its trend.
pub fn check_weak_nc(
    mu: &Law,
    lambda: &Law,
    seeds: &[u64],
    horizon: usize,
    epsilon: &Rational,
    r: &Rational,
    thresholds: &EvalThresholds,
) -> Result<ForecastReport> {
    if *r <= int(0) || *r > int(1) {
        return Err(Error::Precondition(format!("need 0 < r <= 1, got {r}")));
    }
    let mut per_seed = sampled_trajectories(mu, lambda, seeds, horizon, epsilon, thresholds)?;
    for t in &mut per_seed {
        t.verdict = weak_path_verdict(t, r, &thresholds.density_tol, thresholds.trend_window);
    }
    let verdict = thresholds.aggregate(per_seed.iter().map(|t| t.verdict));
    Ok(ForecastReport {
        criterion: "weakNC".into(),
        forecaster: mu.describe(),
        source: lambda.describe(),
        horizon,
        epsilon: epsilon.clone(),
        tail: None,
        r: Some(r.clone()),
        thresholds: thresholds.clone(),
        verdict,
        per_seed,
    })
}

/// Total variation between the depth-`d` continuations of `prefix` under
/// the two laws, without checking that `prefix` has positive weight.
fn merge_depth_unchecked(
    mu: &dyn ConditionalLaw,
    lambda: &dyn ConditionalLaw,
    prefix: &BitString,
    d: usize,
) -> Result<Rational> {
    let mut total = int(0);
    let mut stack = vec![(prefix.clone(), int(1), int(1))];
    while let Some((u, pm, pl)) = stack.pop() {
        if u.len() == prefix.len() + d {
            total += (pm - pl).abs();
            continue;
        }
        let qm = mu.conditional(&u)?;
        let ql = lambda.conditional(&u)?;
        let one = int(1);
        stack.push((u.with_pushed(false), &pm * (&one - &qm), &pl * (&one - &ql)));
        stack.push((u.with_pushed(true), pm * qm, pl * ql));
    }
    Ok(total / int(2))
}

/// Verifies every bit of `prefix` has positive conditional chance under `law`.
fn check_positive_path(law: &dyn ConditionalLaw, prefix: &BitString) -> Result<()> {
    let mut u = BitString::with_capacity(prefix.len());
    for b in prefix.iter() {
        if law.conditional_of(&u, b)?.is_zero() {
            return Err(Error::Precondition(format!(
                "prefix {prefix} has zero weight under {}",
                law.describe()
            )));
        }
        u.push(b);
    }
    Ok(())
}

/// `½ Σ_{|v| = d} |μ(prefix.v)/μ(prefix) − λ(prefix.v)/λ(prefix)|`, the
/// total variation over the depth-`d` cylinder algebra after `prefix`.
pub fn merge_depth(
    mu: &dyn ConditionalLaw,
    lambda: &dyn ConditionalLaw,
    prefix: &BitString,
    d: usize,
) -> Result<Rational> {
    if d > MAX_MERGE_DEPTH {
        return Err(Error::Precondition(format!(
            "merge depth {d} exceeds the configured maximum {MAX_MERGE_DEPTH}"
        )));
    }
    check_positive_path(mu, prefix)?;
    check_positive_path(lambda, prefix)?;
    merge_depth_unchecked(mu, lambda, prefix, d)
}

/// Depth-`d` total variation sampled along one path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeReport {
    pub seed: u64,
    pub depth: usize,
    /// `(n, merge_depth(μ, λ, σ[n], d))` at the checkpoint ladder.
    #[serde(with = "crate::rational::text")]
    pub trajectory: Vec<(usize, Rational)>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongNcReport {
    pub forecaster: String,
    pub source: String,
    pub horizon: usize,
    pub depth: usize,
    #[serde(with = "crate::rational::text")]
    pub epsilon: Rational,
    pub tail: usize,
    pub thresholds: EvalThresholds,
    pub caveat: String,
    pub verdict: Verdict,
    pub per_seed: Vec<MergeReport>,
}

/// Strong-NC diagnostic: merge values at tail checkpoints must stay below
/// `ε` for enough seeds. Refuted when the last trend checkpoints all sit at
/// or above `2ε`.
#[allow(clippy::too_many_arguments)]
pub fn check_strong_nc(
    mu: &Law,
    lambda: &Law,
    seeds: &[u64],
    horizon: usize,
    d: usize,
    epsilon: &Rational,
    tail: usize,
    thresholds: &EvalThresholds,
) -> Result<StrongNcReport> {
    require_full_support(&**mu)?;
    check_epsilon(epsilon)?;
    if d > MAX_MERGE_DEPTH {
        return Err(Error::Precondition(format!(
            "merge depth {d} exceeds the configured maximum {MAX_MERGE_DEPTH}"
        )));
    }
    if seeds.is_empty() || tail == 0 || tail > horizon {
        return Err(Error::Precondition(
            "need at least one seed and 1 <= tail <= horizon".into(),
        ));
    }
    let ladder = thresholds.ladder(horizon);
    let twice = epsilon * int(2);
    let per_seed: Vec<MergeReport> = seeds
        .par_iter()
        .map(|&seed| {
            let path = sample(&**lambda, seed, horizon)?;
            check_positive_path(&**lambda, &path)?;
            let trajectory = ladder
                .iter()
                .map(|&n| Ok((n, merge_depth_unchecked(&**mu, &**lambda, &path.prefix(n), d)?)))
                .collect::<Result<Vec<_>>>()?;
            let tail_ok = trajectory
                .iter()
                .filter(|(n, _)| *n > horizon - tail)
                .all(|(_, v)| v < epsilon);
            let window = thresholds.trend_window.min(trajectory.len());
            let stuck = trajectory[trajectory.len() - window..]
                .iter()
                .all(|(_, v)| *v >= twice);
            let verdict = if tail_ok {
                Verdict::Consistent
            } else if stuck {
                Verdict::Refuted
            } else {
                Verdict::Inconclusive
            };
            Ok(MergeReport {
                seed,
                depth: d,
                trajectory,
                verdict,
            })
        })
        .collect::<Result<_>>()?;
    let verdict = thresholds.aggregate(per_seed.iter().map(|m| m.verdict));
    Ok(StrongNcReport {
        forecaster: mu.describe(),
        source: lambda.describe(),
        horizon,
        depth: d,
        epsilon: epsilon.clone(),
        tail,
        thresholds: thresholds.clone(),
        caveat: STRONG_NC_CAVEAT.into(),
        verdict,
        per_seed,
    })
}

/// `1^{n1} 0 1^{n2} 0 ...` with each `n_j` the smallest `n > 2^j` such that
/// `nu` gives a 1 more than 9/10 chance after the prefix so far and `1^n`.
/// The point mass on the result has sparse zeros, each of which `nu`
/// forecasts with chance below 1/10.
pub fn defeat_nc(nu: Law, budget: usize) -> Result<BitStream> {
    require_full_support(&*nu)?;
    let name = format!("defeat-nc({},{budget})", nu.describe());
    let threshold = rat(9, 10);
    defeat_with_conditional(name, budget, move |u| Ok(nu.conditional(u)? > threshold))
}

/// True when every gap in the trajectory is zero.
pub fn all_zero(values: &[(usize, Rational)]) -> bool {
    values.iter().all(|(_, v)| v.is_zero())
}
