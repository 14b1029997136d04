// SPDX-License-Identifier: Apache-2.0

//! Next-bit extrapolators, the finite-horizon learning criteria, and the
//! constructions built on top of them: guessing sequences, evil twins,
//! combiners, diagonal adversaries and block doubling.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};
use crate::seq_core::{
    checkpoints, non_decreasing, non_increasing, BitStream, BitString, DensityStats, IndexSet,
    Verdict,
};

/// Default per-block search budget for [`defeat_nv`].
pub const DEFAULT_DEFEAT_BUDGET: usize = 1 << 20;
/// Number of checkpoints sampled for trajectories.
pub const CHECKPOINT_COUNT: usize = 16;
/// Number of trailing checkpoints used for trend decisions.
pub const TREND_WINDOW: usize = 3;

/// A total map from finite strings to next-bit guesses.
pub trait Extrapolator: Send + Sync {
    /// Registry term that rebuilds this extrapolator, e.g. `evil-of(last-bit)`.
    fn describe(&self) -> String;

    fn predict(&self, w: &BitString) -> Result<bool>;

    /// Predictions on every prefix of `w`, including `w` itself:
    /// element `j` is the guess after seeing `w[..j]`.
    fn predictions_along(&self, w: &BitString) -> Result<Vec<bool>> {
        let mut out = Vec::with_capacity(w.len() + 1);
        let mut u = BitString::with_capacity(w.len());
        for b in w.iter() {
            out.push(self.predict(&u)?);
            u.push(b);
        }
        out.push(self.predict(&u)?);
        Ok(out)
    }
}

pub type Learner = Arc<dyn Extrapolator>;

impl fmt::Debug for dyn Extrapolator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Always guesses the same bit. `Constant(true)` is the machine that
/// outputs 1 on every input.
#[derive(Debug, Clone, Copy)]
pub struct Constant(pub bool);

impl Extrapolator for Constant {
    fn describe(&self) -> String {
        if self.0 { "always-1" } else { "always-0" }.into()
    }

    fn predict(&self, _w: &BitString) -> Result<bool> {
        Ok(self.0)
    }
}

/// Repeats the last bit seen; guesses 1 on the empty string.
#[derive(Debug, Clone, Copy)]
pub struct LastBit;

impl Extrapolator for LastBit {
    fn describe(&self) -> String {
        "last-bit".into()
    }

    fn predict(&self, w: &BitString) -> Result<bool> {
        Ok(w.last().unwrap_or(true))
    }
}

/// Majority vote over the last `order` bits (fewer on short inputs);
/// ties go to 1.
#[derive(Debug, Clone, Copy)]
pub struct Majority {
    pub order: usize,
}

impl Extrapolator for Majority {
    fn describe(&self) -> String {
        format!("majority({})", self.order)
    }

    fn predict(&self, w: &BitString) -> Result<bool> {
        let start = w.len().saturating_sub(self.order);
        let window = w.len() - start;
        let ones = (start..w.len()).filter(|&i| w.get(i)).count();
        Ok(2 * ones >= window)
    }
}

/// Explicit finite lookup table with a default answer.
#[derive(Debug, Clone)]
pub struct Table {
    entries: HashMap<BitString, bool>,
    default: bool,
    max_key_len: usize,
}

impl Table {
    pub fn new(entries: impl IntoIterator<Item = (BitString, bool)>, default: bool) -> Self {
        let entries: HashMap<BitString, bool> = entries.into_iter().collect();
        let max_key_len = entries.keys().map(BitString::len).max().unwrap_or(0);
        Table {
            entries,
            default,
            max_key_len,
        }
    }
}

impl Extrapolator for Table {
    fn describe(&self) -> String {
        let mut keys: Vec<_> = self.entries.iter().collect();
        keys.sort();
        let mut parts = vec![(self.default as u8).to_string()];
        parts.extend(keys.iter().map(|(k, v)| {
            let k = if k.is_empty() { "e".to_string() } else { k.to_string() };
            format!("{k}:{}", **v as u8)
        }));
        format!("table({})", parts.join(","))
    }

    fn predict(&self, w: &BitString) -> Result<bool> {
        if w.len() > self.max_key_len {
            return Ok(self.default);
        }
        Ok(self.entries.get(w).copied().unwrap_or(self.default))
    }
}

/// Wraps a closure as an extrapolator.
#[derive(Clone)]
pub struct FnExtrapolator {
    name: String,
    f: Arc<dyn Fn(&BitString) -> bool + Send + Sync>,
}

impl FnExtrapolator {
    pub fn new(name: impl Into<String>, f: impl Fn(&BitString) -> bool + Send + Sync + 'static) -> Self {
        FnExtrapolator {
            name: name.into(),
            f: Arc::new(f),
        }
    }
}

impl Extrapolator for FnExtrapolator {
    fn describe(&self) -> String {
        self.name.clone()
    }

    fn predict(&self, w: &BitString) -> Result<bool> {
        Ok((self.f)(w))
    }
}

struct EvilTwin {
    base: Learner,
}

impl Extrapolator for EvilTwin {
    fn describe(&self) -> String {
        format!("evil-of({})", self.base.describe())
    }

    fn predict(&self, w: &BitString) -> Result<bool> {
        Ok(!self.base.predict(w)?)
    }

    fn predictions_along(&self, w: &BitString) -> Result<Vec<bool>> {
        Ok(self.base.predictions_along(w)?.into_iter().map(|b| !b).collect())
    }
}

/// The extrapolator that always answers the complement of `m`.
pub fn evil_twin(m: Learner) -> Learner {
    Arc::new(EvilTwin { base: m })
}

fn family_names(family: &[BitStream]) -> String {
    let names: Vec<&str> = family.iter().map(BitStream::name).collect();
    format!("[{}]", names.join(","))
}

/// Longest common prefix of each family member with `w`, capped at `|w|`,
/// together with the first `|w| + 1` bits of each member.
fn family_matches(family: &[BitStream], w: &BitString) -> Result<Vec<(usize, BitString)>> {
    family
        .iter()
        .map(|s| {
            let p = s.prefix(w.len() + 1)?;
            Ok((p.common_prefix_len(w), p))
        })
        .collect()
}

struct CombineNv {
    base: Learner,
    family: Vec<BitStream>,
}

impl CombineNv {
    /// Guess of the family lookup machine on `w[..j]`: the next bit of the
    /// first family member extending it, falling back to the base guess.
    fn lookup(matches: &[(usize, BitString)], j: usize, fallback: bool) -> bool {
        matches
            .iter()
            .find(|(lcp, _)| *lcp >= j)
            .map(|(_, p)| p.get(j))
            .unwrap_or(fallback)
    }
}

impl Extrapolator for CombineNv {
    fn describe(&self) -> String {
        format!("combine-nv({},{})", self.base.describe(), family_names(&self.family))
    }

    fn predict(&self, w: &BitString) -> Result<bool> {
        Ok(*self.predictions_along(w)?.last().expect("non-empty"))
    }

    fn predictions_along(&self, w: &BitString) -> Result<Vec<bool>> {
        let base = self.base.predictions_along(w)?;
        let matches = family_matches(&self.family, w)?;
        let mut out = Vec::with_capacity(w.len() + 1);
        let mut odd = false;
        for (j, &b) in base.iter().enumerate() {
            let guess = if odd { Self::lookup(&matches, j, b) } else { b };
            out.push(guess);
            if j < w.len() && guess != w.get(j) {
                odd = !odd;
            }
        }
        Ok(out)
    }
}

/// Extrapolator that follows `m` while its own mistake count is even and a
/// family lookup while it is odd. Learns every family member in the limit
/// as well as everything `m` learns.
pub fn combine_nv(m: Learner, family: Vec<BitStream>) -> Learner {
    Arc::new(CombineNv { base: m, family })
}

struct CombineWeak {
    base: Learner,
    family: Vec<BitStream>,
}

impl Extrapolator for CombineWeak {
    fn describe(&self) -> String {
        format!(
            "combine-weak({},{})",
            self.base.describe(),
            family_names(&self.family)
        )
    }

    fn predict(&self, w: &BitString) -> Result<bool> {
        Ok(*self.predictions_along(w)?.last().expect("non-empty"))
    }

    fn predictions_along(&self, w: &BitString) -> Result<Vec<bool>> {
        let base = self.base.predictions_along(w)?;
        let matches = family_matches(&self.family, w)?;
        Ok(base
            .iter()
            .enumerate()
            .map(|(j, &b)| {
                // member k (1-based) is consulted at length j iff 2^k <= j
                matches
                    .iter()
                    .enumerate()
                    .take_while(|(i, _)| (i + 1) < usize::BITS as usize && (1usize << (i + 1)) <= j)
                    .find(|(_, (lcp, _))| *lcp >= j)
                    .map(|(_, (_, p))| p.get(j))
                    .unwrap_or(b)
            })
            .collect())
    }
}

/// Extrapolator that consults family member `k` only on inputs of length
/// `n` with `k <= log2 n`, otherwise deferring to `m`.
pub fn combine_weak(m: Learner, family: Vec<BitStream>) -> Learner {
    Arc::new(CombineWeak { base: m, family })
}

/// A map from strings to guesses that may be undefined.
pub trait PartialExtrapolator: Send + Sync {
    fn describe(&self) -> String;

    fn predict(&self, w: &BitString) -> Result<Option<bool>>;

    fn predictions_along(&self, w: &BitString) -> Result<Vec<Option<bool>>> {
        let mut out = Vec::with_capacity(w.len() + 1);
        let mut u = BitString::with_capacity(w.len());
        for b in w.iter() {
            out.push(self.predict(&u)?);
            u.push(b);
        }
        out.push(self.predict(&u)?);
        Ok(out)
    }
}

/// A total extrapolator viewed as a partial one.
pub struct Total(pub Learner);

impl PartialExtrapolator for Total {
    fn describe(&self) -> String {
        self.0.describe()
    }

    fn predict(&self, w: &BitString) -> Result<Option<bool>> {
        self.0.predict(w).map(Some)
    }

    fn predictions_along(&self, w: &BitString) -> Result<Vec<Option<bool>>> {
        Ok(self.0.predictions_along(w)?.into_iter().map(Some).collect())
    }
}

/// `base` with its answers removed on the listed strings.
pub struct UndefinedOn {
    pub base: Learner,
    pub holes: Vec<BitString>,
}

impl PartialExtrapolator for UndefinedOn {
    fn describe(&self) -> String {
        let holes: Vec<String> = self
            .holes
            .iter()
            .map(|h| if h.is_empty() { "e".into() } else { h.to_string() })
            .collect();
        format!("undefined-on({},[{}])", self.base.describe(), holes.join(","))
    }

    fn predict(&self, w: &BitString) -> Result<Option<bool>> {
        if self.holes.contains(w) {
            return Ok(None);
        }
        self.base.predict(w).map(Some)
    }
}

/// The partial extrapolator that is nowhere defined.
pub struct Nowhere;

impl PartialExtrapolator for Nowhere {
    fn describe(&self) -> String {
        "nowhere".into()
    }

    fn predict(&self, _w: &BitString) -> Result<Option<bool>> {
        Ok(None)
    }
}

/// The sequence that starts with `w` and afterwards always agrees with `m`.
pub fn guess_sequence(m: Learner, w: &BitString) -> BitStream {
    let name = format!("guess({},{})", m.describe(), w);
    let w = w.clone();
    BitStream::new(
        name,
        Box::new(move |prefix: &BitString| {
            if prefix.len() < w.len() {
                Ok(w.get(prefix.len()))
            } else {
                m.predict(prefix)
            }
        }),
    )
}

/// Positions `k` in `[1, horizon]` where `m(σ[k-1]) != σ(k)`, ascending.
pub fn error_positions(m: &dyn Extrapolator, sigma: &BitStream, horizon: usize) -> Result<Vec<usize>> {
    if horizon == 0 {
        return Err(Error::Precondition("horizon must be >= 1".into()));
    }
    let s = sigma.prefix(horizon)?;
    let preds = m.predictions_along(&s)?;
    Ok((1..=horizon).filter(|&k| preds[k - 1] != s.get(k - 1)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    Nv,
    /// Correct-prediction density at least `r`.
    NvR,
    WeakNv,
    NvPrime,
    NvDoublePrime,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Nv => "NV",
            Criterion::NvR => "NV(r)",
            Criterion::WeakNv => "weakNV",
            Criterion::NvPrime => "NVprime",
            Criterion::NvDoublePrime => "NVdoubleprime",
        })
    }
}

/// Evidence gathered for one criterion at one horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub learner: String,
    pub stream: String,
    pub criterion: Criterion,
    pub horizon: usize,
    pub error_positions: Vec<usize>,
    /// Positions where a partial extrapolator gave no answer.
    pub undefined_positions: Vec<usize>,
    pub last_error: Option<usize>,
    /// Error density sampled at the checkpoint ladder.
    pub density_trajectory: DensityStats,
    #[serde(with = "crate::rational::text")]
    pub correct_density: Rational,
    /// Quiet-tail length (NV family) when applicable.
    pub tail: Option<usize>,
    #[serde(with = "crate::rational::text")]
    pub r: Option<Rational>,
    #[serde(with = "crate::rational::text")]
    pub tol: Option<Rational>,
    pub verdict: Verdict,
}

impl VerdictReport {
    pub fn error_count(&self) -> usize {
        self.error_positions.len()
    }
}

fn ladder(horizon: usize) -> Vec<usize> {
    checkpoints(horizon, CHECKPOINT_COUNT.min(horizon)).expect("1 <= count <= horizon")
}

fn check_tail(horizon: usize, tail: usize) -> Result<()> {
    if tail == 0 || tail > horizon {
        return Err(Error::Precondition(format!(
            "need 1 <= tail <= horizon, got tail={tail}, horizon={horizon}"
        )));
    }
    Ok(())
}

/// Default quiet-tail window: a quarter of the horizon.
pub fn default_tail(horizon: usize) -> usize {
    (horizon / 4).max(1)
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    learner: String,
    stream: String,
    criterion: Criterion,
    horizon: usize,
    errors: Vec<usize>,
    undefined: Vec<usize>,
    tail: Option<usize>,
    r: Option<Rational>,
    tol: Option<Rational>,
    verdict: Verdict,
) -> VerdictReport {
    let stats = DensityStats::from_hits(&errors, horizon, &ladder(horizon));
    let correct_density = int(1) - stats.final_density();
    VerdictReport {
        learner,
        stream,
        criterion,
        horizon,
        last_error: errors.last().copied(),
        error_positions: errors,
        undefined_positions: undefined,
        density_trajectory: stats,
        correct_density,
        tail,
        r,
        tol,
        verdict,
    }
}

fn quiet_tail_verdict(errors: &[usize], horizon: usize, tail: usize) -> Verdict {
    if errors.iter().any(|&k| k > horizon - tail) {
        Verdict::Inconclusive
    } else {
        Verdict::Consistent
    }
}

/// NV at a finite horizon: consistent iff the last `tail` positions carry
/// no errors. Never refuted.
pub fn check_nv(m: &dyn Extrapolator, sigma: &BitStream, horizon: usize, tail: usize) -> Result<VerdictReport> {
    check_tail(horizon, tail)?;
    let errors = error_positions(m, sigma, horizon)?;
    let verdict = quiet_tail_verdict(&errors, horizon, tail);
    Ok(build_report(
        m.describe(),
        sigma.name().into(),
        Criterion::Nv,
        horizon,
        errors,
        vec![],
        Some(tail),
        None,
        None,
        verdict,
    ))
}

/// Trend verdict on a correct-density trajectory, values clipped at `r`.
fn density_verdict(correct: &DensityStats, r: &Rational, tol: &Rational) -> Verdict {
    let last: Vec<Rational> = correct
        .trajectory
        .iter()
        .rev()
        .take(TREND_WINDOW)
        .rev()
        .map(|(_, d)| d.min(r).clone())
        .collect();
    let threshold = r - tol;
    let fin = correct.final_density();
    if fin >= threshold && non_decreasing(&last) {
        Verdict::Consistent
    } else if fin < threshold && non_increasing(&last) {
        Verdict::Refuted
    } else {
        Verdict::Inconclusive
    }
}

/// Weak NV (`r = 1`) or NV(r): decided on the correct-prediction density
/// at the horizon and its trend over the last checkpoints.
pub fn check_weak_nv(
    m: &dyn Extrapolator,
    sigma: &BitStream,
    horizon: usize,
    r: &Rational,
    tol: &Rational,
) -> Result<VerdictReport> {
    if *r <= int(0) || *r > int(1) || *tol < int(0) || tol >= r {
        return Err(Error::Precondition(format!(
            "need 0 < r <= 1 and 0 <= tol < r, got r={r}, tol={tol}"
        )));
    }
    let errors = error_positions(m, sigma, horizon)?;
    let criterion = if *r == int(1) {
        Criterion::WeakNv
    } else {
        Criterion::NvR
    };
    let mut report = build_report(
        m.describe(),
        sigma.name().into(),
        criterion,
        horizon,
        errors,
        vec![],
        None,
        Some(r.clone()),
        Some(tol.clone()),
        Verdict::Inconclusive,
    );
    report.verdict = density_verdict(&report.density_trajectory.complement(), r, tol);
    Ok(report)
}

fn partial_errors(
    m: &dyn PartialExtrapolator,
    sigma: &BitStream,
    horizon: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if horizon == 0 {
        return Err(Error::Precondition("horizon must be >= 1".into()));
    }
    let s = sigma.prefix(horizon)?;
    let preds = m.predictions_along(&s)?;
    let mut wrong = vec![];
    let mut undefined = vec![];
    for k in 1..=horizon {
        match preds[k - 1] {
            None => undefined.push(k),
            Some(b) if b != s.get(k - 1) => wrong.push(k),
            Some(_) => {}
        }
    }
    Ok((wrong, undefined))
}

/// NV′: any undefined prediction up to the horizon refutes; otherwise as NV.
pub fn check_nv_prime(
    m: &dyn PartialExtrapolator,
    sigma: &BitStream,
    horizon: usize,
    tail: usize,
) -> Result<VerdictReport> {
    check_tail(horizon, tail)?;
    let (errors, undefined) = partial_errors(m, sigma, horizon)?;
    let verdict = if undefined.is_empty() {
        quiet_tail_verdict(&errors, horizon, tail)
    } else {
        Verdict::Refuted
    };
    Ok(build_report(
        m.describe(),
        sigma.name().into(),
        Criterion::NvPrime,
        horizon,
        errors,
        undefined,
        Some(tail),
        None,
        None,
        verdict,
    ))
}

/// NV″: undefined predictions count as errors; otherwise as NV.
pub fn check_nv_dprime(
    m: &dyn PartialExtrapolator,
    sigma: &BitStream,
    horizon: usize,
    tail: usize,
) -> Result<VerdictReport> {
    check_tail(horizon, tail)?;
    let (wrong, undefined) = partial_errors(m, sigma, horizon)?;
    let mut errors: Vec<usize> = wrong.iter().chain(&undefined).copied().collect();
    errors.sort_unstable();
    let verdict = quiet_tail_verdict(&errors, horizon, tail);
    Ok(build_report(
        m.describe(),
        sigma.name().into(),
        Criterion::NvDoublePrime,
        horizon,
        errors,
        undefined,
        Some(tail),
        None,
        None,
        verdict,
    ))
}

/// Smallest `n` in `(2^block, 2^block + budget]` with `predicts_one(prefix.1^n)`.
fn search_block<F>(prefix: &BitString, block: usize, budget: usize, mut predicts_one: F) -> Result<usize>
where
    F: FnMut(&BitString, usize) -> Result<Option<usize>>,
{
    if block >= 60 {
        return Err(Error::BudgetExhausted { block, budget });
    }
    let start = 1usize << block;
    let mut chunk = 64usize.min(budget.max(1));
    loop {
        let span = chunk.min(budget);
        let mut candidate = prefix.clone();
        candidate.extend_repeat(true, start + span);
        if let Some(n) = predicts_one(&candidate, start)? {
            if n <= start + span {
                return Ok(n);
            }
        }
        if span >= budget {
            return Err(Error::BudgetExhausted { block, budget });
        }
        chunk *= 2;
    }
}

/// Generator for streams of the form `1^{n1} 0 1^{n2} 0 ...` where each run
/// length comes from a block search.
fn block_stream<S>(name: String, mut search: S) -> Result<BitStream>
where
    S: FnMut(&BitString, usize) -> Result<usize> + Send + 'static,
{
    let mut pending_ones = 0usize;
    let mut zero_next = false;
    let mut block = 0usize;
    let stream = BitStream::new(
        name,
        Box::new(move |prefix: &BitString| {
            if pending_ones > 0 {
                pending_ones -= 1;
                return Ok(true);
            }
            if zero_next {
                zero_next = false;
                return Ok(false);
            }
            block += 1;
            let n = search(prefix, block)?;
            pending_ones = n - 1;
            zero_next = true;
            Ok(true)
        }),
    );
    // Resolve the first block eagerly so an impossible search fails here.
    stream.prefix(1)?;
    Ok(stream)
}

/// Builds `1^{n1} 0 1^{n2} 0 ...` where `n_j` is the smallest `n > 2^j`
/// such that `m` predicts 1 after the current prefix followed by `1^n`.
/// Every 0 is then a mistake of `m`, and the j-th zero sits beyond `2^j`.
pub fn defeat_nv(m: Learner, budget: usize) -> Result<BitStream> {
    let name = format!("defeat-nv({},{budget})", m.describe());
    block_stream(name, move |prefix, block| {
        search_block(prefix, block, budget, |candidate, start| {
            let preds = m.predictions_along(candidate)?;
            Ok((start + 1..=candidate.len() - prefix.len())
                .find(|&n| preds[prefix.len() + n]))
        })
    })
}

pub(crate) fn defeat_with_conditional<F>(name: String, budget: usize, exceeds: F) -> Result<BitStream>
where
    F: Fn(&BitString) -> Result<bool> + Send + 'static,
{
    block_stream(name, move |prefix, block| {
        search_block(prefix, block, budget, |candidate, start| {
            let mut u = prefix.clone();
            u.extend_repeat(true, start);
            for n in start + 1..=candidate.len() - prefix.len() {
                u.push(true);
                if exceeds(&u)? {
                    return Ok(Some(n));
                }
            }
            Ok(None)
        })
    })
}

fn has_vanishing_density(s: &IndexSet) -> bool {
    match s {
        IndexSet::All => false,
        IndexSet::Powers { base } => *base >= 2,
        IndexSet::Empty | IndexSet::Squares | IndexSet::Finite { .. } => true,
    }
}

/// The pair `(σ*, σ†)`: `σ*` starts with `w`, carries the `l`-th spice bit
/// at the `l`-th spike and follows `m` elsewhere; `σ†` agrees with `σ*` on
/// `w` and the spikes and is its complement everywhere else.
pub fn adversarial_pair(
    m: Learner,
    w: &BitString,
    spice: &BitStream,
    spikes: &IndexSet,
) -> Result<(BitStream, BitStream)> {
    if !has_vanishing_density(spikes) {
        return Err(Error::Precondition(format!(
            "spike set {} must have vanishing density",
            spikes.name()
        )));
    }
    if let Some(first) = spikes.iter().next() {
        if first <= w.len() {
            return Err(Error::Precondition(format!(
                "first spike {first} must exceed |w| = {}",
                w.len()
            )));
        }
    }
    let star_name = format!("adv-star({},{},{},{})", m.describe(), w, spice.name(), spikes.name());
    let dagger_name = format!("adv-dagger({},{},{},{})", m.describe(), w, spice.name(), spikes.name());
    let keep = {
        let w_len = w.len();
        let spikes = spikes.clone();
        move |n: usize| n <= w_len || spikes.contains(n)
    };
    let star = {
        let w = w.clone();
        let spice = spice.clone();
        let spikes = spikes.clone();
        BitStream::new(
            star_name,
            Box::new(move |prefix: &BitString| {
                let n = prefix.len() + 1;
                if n <= w.len() {
                    Ok(w.get(n - 1))
                } else if let Some(rank) = spikes.rank_of(n) {
                    spice.bit(rank)
                } else {
                    m.predict(prefix)
                }
            }),
        )
    };
    let dagger = {
        let star = star.clone();
        BitStream::new(
            dagger_name,
            Box::new(move |prefix: &BitString| {
                let n = prefix.len() + 1;
                let b = star.bit(n)?;
                Ok(if keep(n) { b } else { !b })
            }),
        )
    };
    Ok((star, dagger))
}

/// Two copies of the first bit, four of the second, ..., `2^k` copies of
/// the k-th.
pub fn coarse_block_double(sigma: &BitStream) -> BitStream {
    let src = sigma.clone();
    BitStream::new(
        format!("coarse({})", sigma.name()),
        Box::new(move |prefix: &BitString| {
            // block k covers positions 2^k - 1 ..= 2^(k+1) - 2
            let p = prefix.len() + 1;
            let k = (usize::BITS - (p + 1).leading_zeros()) as usize - 1;
            src.bit(k)
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::seq_core::bits;

    fn m1() -> Learner {
        Arc::new(Constant(true))
    }

    #[test]
    fn guess_sequence_examples() {
        assert_eq!(
            guess_sequence(m1(), &bits("0")).prefix(5).unwrap(),
            bits("01111")
        );
        let m: Learner = Arc::new(Majority { order: 2 });
        let g = guess_sequence(m.clone(), &BitString::new());
        assert_eq!(g.bit(1).unwrap(), m.predict(&BitString::new()).unwrap());
        assert_eq!(
            guess_sequence(Arc::new(LastBit), &bits("10")).prefix(5).unwrap(),
            bits("10000")
        );
    }

    #[test]
    fn error_position_examples() {
        let ones = BitStream::constant(true);
        assert!(error_positions(&*m1(), &ones, 100).unwrap().is_empty());
        assert_eq!(
            error_positions(&*m1(), &BitStream::alternating(), 10).unwrap(),
            vec![1, 3, 5, 7, 9]
        );
        assert_eq!(
            error_positions(&*evil_twin(m1()), &ones, 100).unwrap(),
            (1..=100).collect::<Vec<_>>()
        );
    }

    #[test]
    fn check_nv_examples() {
        let g = guess_sequence(m1(), &bits("0"));
        let r = check_nv(&*m1(), &g, 1000, 250).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent);
        assert_eq!(r.last_error, Some(1));
        let r = check_nv(&*m1(), &BitStream::alternating(), 1000, 250).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        let lb: Learner = Arc::new(LastBit);
        let r = check_nv(&*lb, &guess_sequence(lb.clone(), &BitString::new()), 100, 25).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent);
        assert_eq!(r.error_count(), 0);
        assert!(check_nv(&*lb, &BitStream::alternating(), 10, 0).is_err());
        assert!(check_nv(&*lb, &BitStream::alternating(), 10, 11).is_err());
    }

    #[test]
    fn weak_nv_on_spiked_sequence() {
        let sigma = BitStream::indicator(IndexSet::powers_of_ten(), false);
        let r = check_weak_nv(&*m1(), &sigma, 10_000, &rat(1, 1), &rat(1, 100)).unwrap();
        assert_eq!(r.error_positions, vec![10, 100, 1000, 10_000]);
        assert_eq!(r.density_trajectory.final_density(), rat(4, 10_000));
        assert_eq!(r.verdict, Verdict::Consistent);
        assert_eq!(r.criterion, Criterion::WeakNv);
    }

    #[test]
    fn weak_nv_preconditions() {
        let s = BitStream::constant(true);
        assert!(check_weak_nv(&*m1(), &s, 10, &rat(0, 1), &rat(0, 1)).is_err());
        assert!(check_weak_nv(&*m1(), &s, 10, &rat(1, 2), &rat(1, 2)).is_err());
        assert!(check_weak_nv(&*m1(), &s, 10, &rat(3, 2), &rat(0, 1)).is_err());
    }

    #[test]
    fn partial_criteria() {
        let ones = BitStream::constant(true);
        let lifted = Total(m1());
        assert_eq!(
            check_nv_prime(&lifted, &ones, 100, 25).unwrap().verdict,
            check_nv(&*m1(), &ones, 100, 25).unwrap().verdict
        );
        let hole = UndefinedOn {
            base: m1(),
            holes: vec![BitString::new()],
        };
        let p = check_nv_prime(&hole, &ones, 100, 25).unwrap();
        assert_eq!(p.verdict, Verdict::Refuted);
        assert_eq!(p.undefined_positions, vec![1]);
        let d = check_nv_dprime(&hole, &ones, 100, 25).unwrap();
        assert_eq!(d.verdict, Verdict::Consistent);
        assert_eq!(d.error_positions, vec![1]);
        let d = check_nv_dprime(&Nowhere, &ones, 50, 10).unwrap();
        assert_eq!(d.error_positions, (1..=50).collect::<Vec<_>>());
        assert_ne!(d.verdict, Verdict::Consistent);
    }

    #[test]
    fn evil_twin_is_an_involution() {
        let m: Learner = Arc::new(Majority { order: 3 });
        let twice = evil_twin(evil_twin(m.clone()));
        for w in BitString::all_up_to(6) {
            assert_eq!(m.predict(&w).unwrap(), twice.predict(&w).unwrap());
        }
        assert!(!evil_twin(m1()).predict(&bits("0101")).unwrap());
    }

    #[test]
    fn combine_nv_examples() {
        let m0: Learner = Arc::new(Constant(false));
        let ones = BitStream::constant(true);
        let star = combine_nv(m0.clone(), vec![ones.clone()]);
        assert_eq!(check_nv(&*star, &ones, 1000, 250).unwrap().verdict, Verdict::Consistent);
        let plain = combine_nv(m0.clone(), vec![]);
        for w in BitString::all_up_to(6) {
            assert_eq!(plain.predict(&w).unwrap(), m0.predict(&w).unwrap());
        }
    }

    #[test]
    fn combine_nv_predict_matches_predictions_along() {
        let star = combine_nv(
            Arc::new(LastBit),
            vec![BitStream::alternating(), BitStream::periodic(bits("110"))],
        );
        let w = bits("0101101001110");
        let along = star.predictions_along(&w).unwrap();
        for j in 0..=w.len() {
            assert_eq!(along[j], star.predict(&w.prefix(j)).unwrap(), "j={j}");
        }
    }

    #[test]
    fn combine_weak_examples() {
        let m0: Learner = Arc::new(Constant(false));
        let star = combine_weak(m0, vec![BitStream::constant(true)]);
        assert!(!star.predict(&bits("1")).unwrap());
        for n in 2..40 {
            assert!(star.predict(&BitString::repeat(true, n)).unwrap(), "n={n}");
        }
    }

    #[test]
    fn defeat_nv_examples() {
        let s = defeat_nv(m1(), DEFAULT_DEFEAT_BUDGET).unwrap();
        let p = s.prefix(100).unwrap();
        let zeros: Vec<usize> = (1..=100).filter(|&k| !p.get(k - 1)).collect();
        // n_j = 2^j + 1, so the j-th zero sits at sum_{i<=j} (2^i + 2)
        assert_eq!(zeros, vec![4, 10, 20, 38, 72]);
        let e = defeat_nv(Arc::new(Constant(false)), 1000).unwrap_err();
        assert_eq!(e, Error::BudgetExhausted { block: 1, budget: 1000 });
    }

    #[test]
    fn adversarial_pair_examples() {
        let (star, dagger) = adversarial_pair(
            m1(),
            &BitString::new(),
            &BitStream::constant(false),
            &IndexSet::powers_of_ten(),
        )
        .unwrap();
        let expected = BitStream::indicator(IndexSet::powers_of_ten(), false);
        assert_eq!(star.prefix(2000).unwrap(), expected.prefix(2000).unwrap());
        let r = check_weak_nv(&*m1(), &dagger, 10_000, &rat(1, 1), &rat(1, 100)).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        assert!(r.error_count() >= 10_000 - 4);

        let lb: Learner = Arc::new(LastBit);
        let (star, _) =
            adversarial_pair(lb.clone(), &bits("01"), &BitStream::constant(true), &IndexSet::Empty)
                .unwrap();
        assert_eq!(
            star.prefix(50).unwrap(),
            guess_sequence(lb, &bits("01")).prefix(50).unwrap()
        );
    }

    #[test]
    fn adversarial_pair_preconditions() {
        let spice = BitStream::constant(false);
        assert!(adversarial_pair(m1(), &BitString::new(), &spice, &IndexSet::All).is_err());
        assert!(
            adversarial_pair(m1(), &bits("0101010101"), &spice, &IndexSet::powers_of_ten()).is_err()
        );
    }

    #[test]
    fn coarse_examples() {
        let c = coarse_block_double(&BitStream::constant(true));
        assert_eq!(c.prefix(64).unwrap(), BitString::repeat(true, 64));
        let c = coarse_block_double(&BitStream::alternating());
        let mut expected = bits("00");
        expected.extend_repeat(true, 4);
        expected.extend_repeat(false, 8);
        expected.extend_repeat(true, 16);
        assert_eq!(c.prefix(30).unwrap(), expected);
        let errs = error_positions(&LastBit, &c, 1 << 12).unwrap();
        assert!(errs.len() <= 12, "{} errors", errs.len());
    }
}
