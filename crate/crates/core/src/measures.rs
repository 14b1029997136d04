// SPDX-License-Identifier: Apache-2.0

//! Probability measures on Cantor space, represented by their next-bit
//! conditional probabilities with exact rational values.
//!
//! A measure is a [`ConditionalLaw`]: `p1(w)` is the chance that the bit
//! following `w` is a 1. Cylinder weights are derived as products of
//! conditionals, so additivity `λ(w) = λ(w.0) + λ(w.1)` holds by
//! construction.

use std::fmt;
use std::sync::Arc;

use num::{BigInt, One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rational::{dyadic_floor, fmt_rational, int, pow2_neg, rat, Rational};
use crate::seq_core::{BitStream, BitString, IndexSet};

/// A measure on Cantor space given by next-bit conditionals.
pub trait ConditionalLaw: Send + Sync {
    /// Registry term that rebuilds this law, e.g. `bernoulli(1/2)`.
    fn describe(&self) -> String;

    /// Raw conditional chance of a 1 after `w`. Use [`ConditionalLaw::conditional`]
    /// for the checked version.
    fn p1(&self, w: &BitString) -> Result<Rational>;

    /// Whether every conditional is claimed to lie strictly inside (0, 1).
    fn full_support(&self) -> bool;

    /// Cylinder weight `λ(B_w)`.
    fn weight(&self, w: &BitString) -> Result<Rational> {
        let mut acc = int(1);
        let mut u = BitString::with_capacity(w.len());
        for b in w.iter() {
            let p = self.conditional(&u)?;
            acc *= if b { p } else { int(1) - p };
            if acc.is_zero() {
                return Ok(acc);
            }
            u.push(b);
        }
        Ok(acc)
    }

    /// `p1(w)`, checked to lie in `[0, 1]` and, for full-support laws, in
    /// `(0, 1)`.
    fn conditional(&self, w: &BitString) -> Result<Rational> {
        let p = self.p1(w)?;
        if p < int(0) || p > int(1) {
            return Err(Error::ConditionalOutOfRange {
                law: self.describe(),
                prefix: w.to_string(),
                value: fmt_rational(&p),
            });
        }
        if self.full_support() && (p.is_zero() || p.is_one()) {
            return Err(Error::FullSupportViolation {
                law: self.describe(),
                prefix: w.to_string(),
                value: fmt_rational(&p),
            });
        }
        Ok(p)
    }

    /// Conditional chance of bit `s` after `w`.
    fn conditional_of(&self, w: &BitString, s: bool) -> Result<Rational> {
        let p = self.conditional(w)?;
        Ok(if s { p } else { int(1) - p })
    }
}

pub type Law = Arc<dyn ConditionalLaw>;

impl fmt::Debug for dyn ConditionalLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// The chance of continuing `prefix` with `v`, i.e. `λ(prefix.v) / λ(prefix)`
/// computed from conditionals alone.
pub fn continuation_weight(law: &dyn ConditionalLaw, prefix: &BitString, v: &BitString) -> Result<Rational> {
    let mut acc = int(1);
    let mut u = prefix.clone();
    for b in v.iter() {
        acc *= law.conditional_of(&u, b)?;
        if acc.is_zero() {
            break;
        }
        u.push(b);
    }
    Ok(acc)
}

/// Exact cylinder weight.
pub fn cylinder_weight(law: &dyn ConditionalLaw, w: &BitString) -> Result<Rational> {
    law.weight(w)
}

fn check_probability(p: &Rational, what: &str) -> Result<()> {
    if *p < int(0) || *p > int(1) {
        return Err(Error::Precondition(format!("{what} must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Independent coin flips with chance `p` of a 1.
#[derive(Debug, Clone)]
pub struct Bernoulli {
    p: Rational,
}

impl ConditionalLaw for Bernoulli {
    fn describe(&self) -> String {
        format!("bernoulli({})", fmt_rational(&self.p))
    }

    fn p1(&self, _w: &BitString) -> Result<Rational> {
        Ok(self.p.clone())
    }

    fn full_support(&self) -> bool {
        self.p > int(0) && self.p < int(1)
    }
}

pub fn bernoulli(p: Rational) -> Result<Law> {
    check_probability(&p, "bernoulli parameter")?;
    Ok(Arc::new(Bernoulli { p }))
}

/// Markov chain of order `k`: the next-bit chance is looked up from the
/// last `k` bits (read big-endian). Histories shorter than `k` use 1/2.
#[derive(Debug, Clone)]
pub struct Markov {
    order: usize,
    table: Vec<Rational>,
}

impl ConditionalLaw for Markov {
    fn describe(&self) -> String {
        let rows: Vec<String> = self.table.iter().map(fmt_rational).collect();
        format!("markov({},[{}])", self.order, rows.join(","))
    }

    fn p1(&self, w: &BitString) -> Result<Rational> {
        if w.len() < self.order {
            return Ok(rat(1, 2));
        }
        let ctx = (w.len() - self.order..w.len()).fold(0usize, |acc, i| (acc << 1) | w.get(i) as usize);
        Ok(self.table[ctx].clone())
    }

    fn full_support(&self) -> bool {
        self.table.iter().all(|p| *p > int(0) && *p < int(1))
    }
}

pub fn markov(order: usize, table: Vec<Rational>) -> Result<Law> {
    if order > 16 || table.len() != 1 << order {
        return Err(Error::Precondition(format!(
            "markov order {order} needs {} table rows, got {}",
            1usize << order.min(16),
            table.len()
        )));
    }
    for p in &table {
        check_probability(p, "markov table row")?;
    }
    Ok(Arc::new(Markov { order, table }))
}

/// Rule of succession: `p1(w) = (k + 1) / (n + 2)` with `k` ones among
/// `n` bits.
#[derive(Debug, Clone, Copy)]
pub struct LaplaceBayes;

impl ConditionalLaw for LaplaceBayes {
    fn describe(&self) -> String {
        "laplace-bayes".into()
    }

    fn p1(&self, w: &BitString) -> Result<Rational> {
        Ok(Rational::new(
            BigInt::from(w.count_ones() + 1),
            BigInt::from(w.len() + 2),
        ))
    }

    fn full_support(&self) -> bool {
        true
    }
}

pub fn laplace_bayes() -> Law {
    Arc::new(LaplaceBayes)
}

/// Point mass on a single sequence.
#[derive(Debug, Clone)]
pub struct Delta {
    stream: BitStream,
}

impl ConditionalLaw for Delta {
    fn describe(&self) -> String {
        format!("delta({})", self.stream.name())
    }

    fn p1(&self, w: &BitString) -> Result<Rational> {
        Ok(if self.stream.bit(w.len() + 1)? { int(1) } else { int(0) })
    }

    fn full_support(&self) -> bool {
        false
    }
}

pub fn delta(stream: BitStream) -> Law {
    Arc::new(Delta { stream })
}

/// `base` with forced bits at spike positions: the `l`-th spike carries the
/// `l`-th bit of `inject`.
#[derive(Debug)]
pub struct Spiked {
    base: Law,
    spikes: IndexSet,
    inject: BitStream,
}

impl ConditionalLaw for Spiked {
    fn describe(&self) -> String {
        format!(
            "spiked({},{},{})",
            self.base.describe(),
            self.spikes.name(),
            self.inject.name()
        )
    }

    fn p1(&self, w: &BitString) -> Result<Rational> {
        match self.spikes.rank_of(w.len() + 1) {
            Some(rank) => Ok(if self.inject.bit(rank)? { int(1) } else { int(0) }),
            None => self.base.conditional(w),
        }
    }

    fn full_support(&self) -> bool {
        false
    }
}

pub fn spiked(base: Law, spikes: IndexSet, inject: BitStream) -> Law {
    Arc::new(Spiked {
        base,
        spikes,
        inject,
    })
}

/// Finite convex combination of laws.
#[derive(Debug)]
pub struct Mixture {
    weights: Vec<Rational>,
    components: Vec<Law>,
}

impl ConditionalLaw for Mixture {
    fn describe(&self) -> String {
        let w: Vec<String> = self.weights.iter().map(fmt_rational).collect();
        let c: Vec<String> = self.components.iter().map(|c| c.describe()).collect();
        format!("mixture([{}],[{}])", w.join(","), c.join(","))
    }

    fn p1(&self, w: &BitString) -> Result<Rational> {
        let total = self.weight(w)?;
        if total.is_zero() {
            return Err(Error::UndefinedConditional {
                law: self.describe(),
                prefix: w.to_string(),
            });
        }
        Ok(self.weight(&w.with_pushed(true))? / total)
    }

    fn full_support(&self) -> bool {
        self.components.iter().any(|c| c.full_support())
    }

    fn weight(&self, w: &BitString) -> Result<Rational> {
        let mut acc = int(0);
        for (p, c) in self.weights.iter().zip(&self.components) {
            acc += p * c.weight(w)?;
        }
        Ok(acc)
    }
}

pub fn mixture(weights: Vec<Rational>, components: Vec<Law>) -> Result<Law> {
    if weights.len() != components.len() || weights.is_empty() {
        return Err(Error::Precondition(format!(
            "mixture needs matching non-empty lists, got {} weights and {} components",
            weights.len(),
            components.len()
        )));
    }
    if weights.iter().any(|w| *w <= int(0)) {
        return Err(Error::Precondition("mixture weights must be positive".into()));
    }
    if weights.iter().sum::<Rational>() != int(1) {
        return Err(Error::Precondition("mixture weights must sum to exactly 1".into()));
    }
    Ok(Arc::new(Mixture {
        weights,
        components,
    }))
}

/// A value known to lie within `error_bound` of `estimate`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxValue {
    pub estimate: Rational,
    pub error_bound: Rational,
}

impl ApproxValue {
    pub fn lower(&self) -> Rational {
        &self.estimate - &self.error_bound
    }

    pub fn upper(&self) -> Rational {
        &self.estimate + &self.error_bound
    }

    pub fn contains(&self, x: &Rational) -> bool {
        *x >= self.lower() && *x <= self.upper()
    }

    /// Whether the two certified intervals intersect.
    pub fn overlaps(&self, other: &ApproxValue) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }
}

/// `floor(λ(w) 2^n) / 2^n`, a computable approximation within `2^-n`.
pub fn approx_weight(law: &dyn ConditionalLaw, w: &BitString, n: u32) -> Result<Rational> {
    Ok(dyadic_floor(&law.weight(w)?, n))
}

/// Certified approximation of the weight that
/// `½ base + ½ Σ_{k≥1} 2^-k family(k)` assigns to `w`, to within `2^-n`.
///
/// The base term is read at precision `n + 1`, the first `n + 1` family
/// members at precision `2n`, and the tail of the series is dropped.
pub fn mixture_approx<G>(base: &dyn ConditionalLaw, family: G, w: &BitString, n: u32) -> Result<ApproxValue>
where
    G: Fn(usize) -> Law,
{
    if n == 0 {
        return Err(Error::Precondition("mixture_approx needs n >= 1".into()));
    }
    let half = rat(1, 2);
    let mut sum = int(0);
    for k in 1..=(n as usize + 1) {
        sum += pow2_neg(k as u32) * approx_weight(&*family(k), w, 2 * n)?;
    }
    let estimate = &half * approx_weight(base, w, n + 1)? + &half * sum;
    Ok(ApproxValue {
        estimate,
        error_bound: pow2_neg(n),
    })
}

/// The three error terms of [`mixture_approx`] against the exact value, as
/// `(base error, truncated-member error, tail mass bound)`; each is at most
/// `2^-(n+2)` in absolute value.
pub fn mixture_approx_error_terms<G>(
    base: &dyn ConditionalLaw,
    family: G,
    w: &BitString,
    n: u32,
) -> Result<(Rational, Rational, Rational)>
where
    G: Fn(usize) -> Law,
{
    let half = rat(1, 2);
    let b = base.weight(w)?;
    let alpha = &half * (&b - approx_weight(base, w, n + 1)?);
    let mut beta = int(0);
    for k in 1..=(n as usize + 1) {
        let lam = family(k);
        beta += pow2_neg(k as u32 + 1) * (lam.weight(w)? - approx_weight(&*lam, w, 2 * n)?);
    }
    // Σ_{k ≥ n+2} 2^-(k+1) = 2^-(n+2)
    let gamma = pow2_neg(n + 2);
    Ok((alpha, beta, gamma))
}

/// The forecaster that puts 9/10 on whichever bit `base` finds less likely
/// (1/10 on a 1 when `base` gives a 1 at least even odds).
#[derive(Debug)]
pub struct EvilForecaster {
    base: Law,
}

impl ConditionalLaw for EvilForecaster {
    fn describe(&self) -> String {
        format!("evil-of({})", self.base.describe())
    }

    fn p1(&self, w: &BitString) -> Result<Rational> {
        let p = self.base.conditional(w)?;
        Ok(if p >= rat(1, 2) { rat(1, 10) } else { rat(9, 10) })
    }

    fn full_support(&self) -> bool {
        true
    }
}

pub fn evil_forecaster(mu: Law) -> Result<Law> {
    if !mu.full_support() {
        return Err(Error::Precondition(format!(
            "evil forecaster needs a full-support base, got {}",
            mu.describe()
        )));
    }
    Ok(Arc::new(EvilForecaster { base: mu }))
}

/// Source that puts weight `p_k` on each part `w_k` of a complete
/// prefix-free code and follows `base` conditionally beyond the part.
#[derive(Debug)]
pub struct Glued {
    parts: Vec<BitString>,
    weights: Vec<Rational>,
    base: Law,
}

impl Glued {
    fn part_index(&self, w: &BitString) -> Option<usize> {
        self.parts.iter().position(|p| p.is_prefix_of(w))
    }

    /// Total weight of parts extending `u`, for `u` not inside any part.
    fn upper_weight(&self, u: &BitString) -> Rational {
        self.parts
            .iter()
            .zip(&self.weights)
            .filter(|(p, _)| u.is_prefix_of(p))
            .map(|(_, q)| q.clone())
            .sum()
    }
}

impl ConditionalLaw for Glued {
    fn describe(&self) -> String {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| if p.is_empty() { "e".into() } else { p.to_string() })
            .collect();
        let w: Vec<String> = self.weights.iter().map(fmt_rational).collect();
        format!(
            "glue([{}],[{}],{})",
            parts.join(","),
            w.join(","),
            self.base.describe()
        )
    }

    fn p1(&self, w: &BitString) -> Result<Rational> {
        if self.part_index(w).is_some() {
            return self.base.conditional(w);
        }
        let one = w.with_pushed(true);
        let top = match self.part_index(&one) {
            Some(k) => self.weights[k].clone(),
            None => self.upper_weight(&one),
        };
        Ok(top / self.upper_weight(w))
    }

    fn full_support(&self) -> bool {
        self.base.full_support()
    }

    fn weight(&self, w: &BitString) -> Result<Rational> {
        match self.part_index(w) {
            Some(k) => {
                let part = &self.parts[k];
                let v = w.suffix_from(part.len());
                Ok(&self.weights[k] * continuation_weight(&*self.base, part, &v)?)
            }
            None => Ok(self.upper_weight(w)),
        }
    }
}

/// Glues `base` onto a complete prefix-free code with the given part weights.
pub fn glue_partition(parts: Vec<BitString>, weights: Vec<Rational>, base: Law) -> Result<Law> {
    if parts.is_empty() || parts.len() != weights.len() {
        return Err(Error::Precondition(
            "glue needs matching non-empty parts and weights".into(),
        ));
    }
    if weights.iter().any(|w| *w <= int(0)) || weights.iter().sum::<Rational>() != int(1) {
        return Err(Error::Precondition(
            "glue weights must be positive and sum to 1".into(),
        ));
    }
    if !base.full_support() {
        return Err(Error::Precondition("glue base must have full support".into()));
    }
    for (i, a) in parts.iter().enumerate() {
        for b in &parts[i + 1..] {
            if a.is_prefix_of(b) || b.is_prefix_of(a) {
                return Err(Error::Precondition(format!("parts {a} and {b} are not prefix-free")));
            }
        }
    }
    let kraft: Rational = parts.iter().map(|p| pow2_neg(p.len() as u32)).sum();
    if kraft != int(1) {
        return Err(Error::Precondition(format!(
            "parts do not cover Cantor space (Kraft sum {kraft})"
        )));
    }
    Ok(Arc::new(Glued {
        parts,
        weights,
        base,
    }))
}

/// Forecaster whose chance of a 0 after `n` bits is `2^-(n+1)`.
#[derive(Debug, Clone, Copy)]
pub struct VanishingZero;

impl ConditionalLaw for VanishingZero {
    fn describe(&self) -> String {
        "vanishing-zero".into()
    }

    fn p1(&self, w: &BitString) -> Result<Rational> {
        Ok(int(1) - pow2_neg(w.len() as u32 + 1))
    }

    fn full_support(&self) -> bool {
        true
    }
}

pub fn vanishing_zero() -> Law {
    Arc::new(VanishingZero)
}

/// A measure on strings of a fixed depth, extended beyond that depth by
/// fair coin flips. Used for ball centers and points inside balls.
#[derive(Debug, Clone)]
pub struct FiniteDepthLaw {
    name: String,
    /// `levels[d][i]` is the weight of the depth-`d` string with index `i`.
    levels: Vec<Vec<Rational>>,
}

impl FiniteDepthLaw {
    /// `cells` indexed big-endian by strings of length `log2(cells.len())`.
    pub fn new(name: impl Into<String>, cells: Vec<Rational>) -> Result<Self> {
        if !cells.len().is_power_of_two() {
            return Err(Error::Precondition("cell count must be a power of two".into()));
        }
        if cells.iter().any(|c| *c < int(0)) || cells.iter().sum::<Rational>() != int(1) {
            return Err(Error::Precondition(
                "cells must be nonnegative and sum to 1".into(),
            ));
        }
        let depth = cells.len().trailing_zeros();
        let mut levels = vec![cells];
        for _ in 0..depth {
            let next: Vec<Rational> = levels
                .last()
                .expect("non-empty")
                .chunks(2)
                .map(|c| &c[0] + &c[1])
                .collect();
            levels.push(next);
        }
        levels.reverse();
        Ok(FiniteDepthLaw {
            name: name.into(),
            levels,
        })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }
}

impl ConditionalLaw for FiniteDepthLaw {
    fn describe(&self) -> String {
        self.name.clone()
    }

    fn p1(&self, w: &BitString) -> Result<Rational> {
        if w.len() >= self.depth() {
            return Ok(rat(1, 2));
        }
        let i = w.to_index();
        let total = &self.levels[w.len()][i];
        if total.is_zero() {
            return Err(Error::UndefinedConditional {
                law: self.name.clone(),
                prefix: w.to_string(),
            });
        }
        Ok(&self.levels[w.len() + 1][2 * i + 1] / total)
    }

    fn full_support(&self) -> bool {
        self.levels.iter().all(|l| l.iter().all(|c| *c > int(0)))
    }

    fn weight(&self, w: &BitString) -> Result<Rational> {
        let d = self.depth();
        if w.len() <= d {
            return Ok(self.levels[w.len()][w.to_index()].clone());
        }
        let head = w.prefix(d);
        Ok(&self.levels[d][head.to_index()] * pow2_neg((w.len() - d) as u32))
    }
}

/// The k-th uniform deviate decides bit k: 1 iff `x / 2^64 < p1(prefix)`.
fn next_bit(rng: &mut ChaCha8Rng, p: &Rational) -> bool {
    let x = BigInt::from(rng.next_u64());
    x * p.denom() < p.numer() * (BigInt::one() << 64u32)
}

/// The first `horizon` bits drawn from `law` with the generator seeded by
/// `seed`. Longer horizons extend shorter ones.
pub fn sample(law: &dyn ConditionalLaw, seed: u64, horizon: usize) -> Result<BitString> {
    if horizon == 0 {
        return Err(Error::Precondition("sample needs horizon >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = BitString::with_capacity(horizon);
    for _ in 0..horizon {
        let p = law.conditional(&w)?;
        let b = next_bit(&mut rng, &p);
        w.push(b);
    }
    Ok(w)
}

/// [`sample`] as a lazy stream.
pub fn sample_stream(law: Law, seed: u64) -> BitStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let name = format!("sample({},{seed})", law.describe());
    BitStream::new(
        name,
        Box::new(move |prefix: &BitString| {
            let p = law.conditional(prefix)?;
            Ok(next_bit(&mut rng, &p))
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq_core::bits;

    fn half() -> Law {
        bernoulli(rat(1, 2)).unwrap()
    }

    #[test]
    fn cylinder_weight_examples() {
        assert_eq!(cylinder_weight(&*half(), &bits("101")).unwrap(), rat(1, 8));
        assert_eq!(cylinder_weight(&*laplace_bayes(), &bits("11")).unwrap(), rat(1, 3));
        let d = delta(BitStream::constant(true));
        assert_eq!(cylinder_weight(&*d, &bits("0")).unwrap(), int(0));
        assert_eq!(cylinder_weight(&*d, &BitString::new()).unwrap(), int(1));
    }

    #[test]
    fn laplace_examples() {
        let lb = laplace_bayes();
        assert_eq!(lb.p1(&BitString::new()).unwrap(), rat(1, 2));
        assert_eq!(lb.p1(&bits("1")).unwrap(), rat(2, 3));
        assert_eq!(lb.p1(&bits("10")).unwrap(), rat(1, 2));
    }

    #[test]
    fn registry_law_examples() {
        assert_eq!(half().p1(&bits("0110")).unwrap(), rat(1, 2));
        let d = delta(BitStream::alternating());
        assert_eq!(d.p1(&bits("0")).unwrap(), int(1));
        let s = spiked(half(), IndexSet::powers_of_ten(), BitStream::constant(true));
        for n in [0usize, 5, 9, 50, 99, 999] {
            let w = BitString::repeat(false, n);
            let expected = if [9, 99, 999].contains(&n) { int(1) } else { rat(1, 2) };
            assert_eq!(s.p1(&w).unwrap(), expected, "n={n}");
        }
        assert!(bernoulli(rat(3, 2)).is_err());
        assert!(markov(1, vec![rat(1, 2)]).is_err());
    }

    #[test]
    fn full_support_violation_is_an_error() {
        let bad = markov(1, vec![rat(1, 2), int(1)]).unwrap();
        assert!(!bad.full_support());
        struct Liar;
        impl ConditionalLaw for Liar {
            fn describe(&self) -> String {
                "liar".into()
            }
            fn p1(&self, _w: &BitString) -> Result<Rational> {
                Ok(int(0))
            }
            fn full_support(&self) -> bool {
                true
            }
        }
        assert!(matches!(
            Liar.conditional(&BitString::new()),
            Err(Error::FullSupportViolation { .. })
        ));
    }

    #[test]
    fn mixture_examples() {
        let lb = laplace_bayes();
        let m = mixture(vec![int(1)], vec![lb.clone()]).unwrap();
        for w in BitString::all_up_to(5) {
            assert_eq!(m.weight(&w).unwrap(), lb.weight(&w).unwrap());
        }
        let m = mixture(
            vec![rat(1, 2), rat(1, 2)],
            vec![bernoulli(rat(1, 4)).unwrap(), bernoulli(rat(3, 4)).unwrap()],
        )
        .unwrap();
        assert_eq!(m.weight(&bits("1")).unwrap(), rat(1, 2));
        assert_eq!(m.p1(&bits("1")).unwrap(), rat(5, 8));
        assert!(mixture(vec![rat(1, 2)], vec![lb.clone()]).is_err());
        assert!(mixture(vec![rat(1, 2), rat(1, 2)], vec![lb]).is_err());
    }

    #[test]
    fn mixture_of_point_masses_has_undefined_conditionals() {
        let m = mixture(
            vec![rat(1, 2), rat(1, 2)],
            vec![delta(BitStream::constant(true)), delta(BitStream::constant(false))],
        )
        .unwrap();
        assert_eq!(m.p1(&BitString::new()).unwrap(), rat(1, 2));
        assert!(matches!(
            m.p1(&bits("10")),
            Err(Error::UndefinedConditional { .. })
        ));
    }

    #[test]
    fn evil_forecaster_examples() {
        let e = evil_forecaster(half()).unwrap();
        assert_eq!(e.p1(&bits("01")).unwrap(), rat(1, 10));
        let ee = evil_forecaster(e).unwrap();
        assert_eq!(ee.p1(&bits("01")).unwrap(), rat(9, 10));
        let lb = laplace_bayes();
        let e = evil_forecaster(lb.clone()).unwrap();
        let w = bits("1");
        assert_eq!(e.p1(&w).unwrap(), rat(1, 10));
        assert_eq!(lb.p1(&w).unwrap() - e.p1(&w).unwrap(), rat(17, 30));
        assert!(evil_forecaster(delta(BitStream::constant(true))).is_err());
    }

    #[test]
    fn glue_examples() {
        let g = glue_partition(vec![bits("0"), bits("1")], vec![rat(1, 2), rat(1, 2)], half()).unwrap();
        for w in BitString::all_up_to(5) {
            assert_eq!(g.weight(&w).unwrap(), half().weight(&w).unwrap());
            assert_eq!(g.p1(&w).unwrap(), rat(1, 2));
        }
        let g = glue_partition(
            vec![bits("0"), bits("10"), bits("11")],
            vec![rat(1, 10), rat(2, 10), rat(7, 10)],
            laplace_bayes(),
        )
        .unwrap();
        assert_eq!(g.weight(&bits("11")).unwrap(), rat(7, 10));
        assert_eq!(g.weight(&bits("110")).unwrap(), rat(7, 40));
        assert_eq!(g.weight(&bits("1")).unwrap(), rat(9, 10));
        assert_eq!(g.p1(&bits("1")).unwrap(), rat(7, 9));
    }

    #[test]
    fn glue_rejects_bad_codes() {
        let w = vec![rat(1, 2), rat(1, 2)];
        assert!(glue_partition(vec![bits("0"), bits("01")], w.clone(), half()).is_err());
        assert!(glue_partition(vec![bits("0"), bits("10")], w.clone(), half()).is_err());
        assert!(glue_partition(vec![bits("0"), bits("1")], vec![rat(1, 2), rat(1, 3)], half()).is_err());
    }

    #[test]
    fn sample_examples() {
        let d = delta(BitStream::constant(true));
        assert_eq!(sample(&*d, 7, 64).unwrap(), BitString::repeat(true, 64));
        let s = spiked(half(), IndexSet::powers_of_ten(), BitStream::constant(true));
        for seed in 0..10 {
            let w = sample(&*s, seed, 1000).unwrap();
            assert!(w.get(9) && w.get(99) && w.get(999));
        }
        let a = sample(&*half(), 3, 100).unwrap();
        let b = sample(&*half(), 3, 300).unwrap();
        assert!(a.is_prefix_of(&b));
        assert_eq!(
            sample_stream(half(), 3).prefix(300).unwrap(),
            b,
            "lazy and eager samplers agree"
        );
    }

    #[test]
    fn finite_depth_law_conditionals() {
        let f = FiniteDepthLaw::new("c", vec![rat(1, 20), rat(9, 20), rat(1, 20), rat(9, 20)]).unwrap();
        assert_eq!(f.depth(), 2);
        assert_eq!(f.p1(&BitString::new()).unwrap(), rat(1, 2));
        assert_eq!(f.p1(&bits("0")).unwrap(), rat(9, 10));
        assert_eq!(f.p1(&bits("01")).unwrap(), rat(1, 2));
        assert_eq!(f.weight(&bits("011")).unwrap(), rat(9, 40));
        assert!(f.full_support());
    }
}
