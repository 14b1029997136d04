// SPDX-License-Identifier: Apache-2.0

//! Rational balls on measure space and the shrink operator.
//!
//! A [`BasisBall`] of depth `k` is the set of measures `ν` with
//! `|ν(w) − center(w)| < radius` for every `w` of length `k`.

use std::fmt::Write as _;

use num::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certificate::{digest, one, CertKind, Certificate, Outcome, Relation, TraceBuilder};
use crate::error::{Error, Result};
use crate::measures::{ConditionalLaw, FiniteDepthLaw};
use crate::rational::{fmt_rational, int, parse_rational, pow10_neg, rat, Rational};
use crate::seq_core::BitString;

/// Smallest radius tried by [`shrink_against`] is `10^-MAX_SHRINK_EXPONENT`.
pub const MAX_SHRINK_EXPONENT: u32 = 64;
/// Deepest level scanned by [`superbad_count`].
pub const MAX_SUPERBAD_DEPTH: usize = 12;

/// The uniform conditional gap that makes a depth bad.
pub fn bad_gap() -> Rational {
    rat(1, 5)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisBall {
    depth: usize,
    /// Indexed big-endian by strings of length `depth`.
    #[serde(with = "crate::rational::text")]
    center: Vec<Rational>,
    #[serde(with = "crate::rational::text")]
    radius: Rational,
}

fn label_of(w: &BitString) -> String {
    if w.is_empty() {
        "e".into()
    } else {
        w.to_string()
    }
}

impl BasisBall {
    pub fn new(depth: usize, center: Vec<Rational>, radius: Rational) -> Result<Self> {
        if depth >= usize::BITS as usize || center.len() != 1usize << depth {
            return Err(Error::Precondition(format!(
                "a depth-{depth} ball needs 2^{depth} center values, got {}",
                center.len()
            )));
        }
        if let Some(i) = center.iter().position(|c| c.is_negative()) {
            return Err(Error::Precondition(format!(
                "center value at {} is negative",
                label_of(&BitString::from_index(i, depth))
            )));
        }
        if center.iter().sum::<Rational>() != int(1) {
            return Err(Error::Precondition("center values must sum to 1".into()));
        }
        if !radius.is_positive() {
            return Err(Error::Precondition("radius must be positive".into()));
        }
        Ok(BasisBall { depth, center, radius })
    }

    /// Depth 1, center `(1/2, 1/2)`, radius `1/2`.
    pub fn depth_one_full() -> Self {
        BasisBall::new(1, vec![rat(1, 2), rat(1, 2)], rat(1, 2)).expect("valid")
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn center(&self) -> &[Rational] {
        &self.center
    }

    pub fn radius(&self) -> &Rational {
        &self.radius
    }

    pub fn center_at(&self, w: &BitString) -> &Rational {
        &self.center[w.to_index()]
    }

    /// Center masses summed down to depth `d <= depth`.
    pub fn restrict(&self, d: usize) -> Vec<Rational> {
        let block = 1usize << (self.depth - d.min(self.depth));
        self.center
            .chunks(block)
            .map(|c| c.iter().sum())
            .collect()
    }

    /// The center as a measure, extended past `depth` by fair coins.
    pub fn center_law(&self) -> Result<FiniteDepthLaw> {
        FiniteDepthLaw::new(format!("center(depth {})", self.depth), self.center.clone())
    }

    /// Whether `law` lies in the (open) ball.
    pub fn contains_law(&self, law: &dyn ConditionalLaw) -> Result<bool> {
        for w in BitString::all_of_length(self.depth) {
            let v = law.weight(&w)?;
            if (&v - self.center_at(&w)).abs() >= self.radius {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Depth-`depth` cell masses of a random measure inside the ball.
    /// Each cell moves by less than `min(radius, min center)`, and the
    /// moves sum to zero, so the result is a positive measure in the ball.
    pub fn perturbed_cells(&self, seed: u64) -> Result<Vec<Rational>> {
        let min_cell = self.center.iter().min().expect("non-empty");
        if !min_cell.is_positive() {
            return Err(Error::Precondition(
                "perturbation needs a strictly positive center".into(),
            ));
        }
        let scale = std::cmp::min(self.radius.clone(), min_cell.clone()) / int(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        const GRID: i64 = 1 << 20;
        let deltas: Vec<Rational> = (0..self.center.len())
            .map(|_| &scale * rat(rng.random_range(-GRID + 1..GRID), GRID))
            .collect();
        let mean = deltas.iter().sum::<Rational>() / int(deltas.len() as i64);
        Ok(self
            .center
            .iter()
            .zip(&deltas)
            .map(|(c, d)| c + d - &mean)
            .collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ball v1");
        let _ = writeln!(out, "depth {}", self.depth);
        let _ = writeln!(out, "radius {}", fmt_rational(&self.radius));
        for (i, c) in self.center.iter().enumerate() {
            let w = BitString::from_index(i, self.depth);
            let _ = writeln!(out, "cell {} {}", label_of(&w), fmt_rational(c));
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |l: &str| Error::Parse(format!("bad ball line {l:?}"));
        let mut lines = text.lines();
        if lines.next() != Some("ball v1") {
            return Err(Error::Parse("missing ball header".into()));
        }
        let (mut depth, mut radius) = (None, None);
        let mut cells: Vec<(BitString, Rational)> = vec![];
        for line in lines {
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok.as_slice() {
                ["depth", d] => depth = Some(d.parse::<usize>().map_err(|_| bad(line))?),
                ["radius", r] => radius = Some(parse_rational(r)?),
                ["cell", w, v] => {
                    let w = if *w == "e" { BitString::new() } else { w.parse()? };
                    cells.push((w, parse_rational(v)?));
                }
                ["end"] => break,
                _ => return Err(bad(line)),
            }
        }
        let depth = depth.ok_or_else(|| Error::Parse("ball without depth".into()))?;
        if depth >= usize::BITS as usize || cells.len() != 1usize << depth {
            return Err(Error::Parse("wrong number of ball cells".into()));
        }
        let mut center = vec![None; cells.len()];
        for (w, v) in cells {
            if w.len() != depth || center[w.to_index()].is_some() {
                return Err(Error::Parse(format!("bad or repeated cell {w}")));
            }
            center[w.to_index()] = Some(v);
        }
        let center = center.into_iter().map(|c| c.expect("all cells seen")).collect();
        BasisBall::new(
            depth,
            center,
            radius.ok_or_else(|| Error::Parse("ball without radius".into()))?,
        )
    }
}

/// Certifies `inner ⊆ outer` via the sufficient condition
/// `d(restrict(inner), outer.center) + 2^(Δdepth) · inner.radius <= outer.radius`.
pub fn ball_contains(outer: &BasisBall, inner: &BasisBall) -> Result<Outcome> {
    if inner.depth < outer.depth {
        return Err(Error::Precondition(format!(
            "inner depth {} is below outer depth {}",
            inner.depth, outer.depth
        )));
    }
    let block = 1usize << (inner.depth - outer.depth);
    let mut t = TraceBuilder::new();
    let mut diffs = vec![];
    for (i, oc) in outer.center.iter().enumerate() {
        let u = label_of(&BitString::from_index(i, outer.depth));
        let parts: Vec<usize> = (i * block..(i + 1) * block)
            .map(|j| {
                let v = BitString::from_index(j, inner.depth);
                t.konst(format!("inner[{}]", label_of(&v)), inner.center[j].clone())
            })
            .collect();
        let r = t.add(format!("restrict[{u}]"), parts);
        let o = t.konst(format!("outer[{u}]"), oc.clone());
        let d = t.sub(format!("diff[{u}]"), r, o);
        diffs.push(t.abs(format!("absdiff[{u}]"), d));
    }
    let dist = t.max("distance", diffs);
    let factor = t.konst("factor", int(block as i64));
    let ri = t.konst("inner_radius", inner.radius.clone());
    let spread = t.mul("spread", factor, ri);
    let lhs = t.add("lhs", vec![dist, spread]);
    let ro = t.konst("outer_radius", outer.radius.clone());
    let holds = t.conclude(lhs, Relation::Le, ro);
    if !holds {
        return Ok(Outcome::Rejected(format!(
            "{} + {} > {}",
            fmt_rational(t.value(dist)),
            fmt_rational(t.value(spread)),
            fmt_rational(&outer.radius)
        )));
    }
    Ok(Outcome::Certified(t.finish(
        CertKind::Contains,
        vec![
            ("outer".into(), digest(&outer.to_text())),
            ("inner".into(), digest(&inner.to_text())),
        ],
    )))
}

/// Certifies that every `ν` in `w1` has `|μ(s|w) − ν(s|w)| >= 1/5` for all
/// `w` of length `w1.depth − 1` and both `s`, by interval bounds on the
/// conditional quotient.
pub fn bad_gap_certificate(mu: &dyn ConditionalLaw, w1: &BasisBall) -> Result<Outcome> {
    if w1.depth == 0 {
        return Err(Error::Precondition("bad-gap certificates need depth >= 1".into()));
    }
    let k = w1.depth - 1;
    let mut t = TraceBuilder::new();
    let zero = t.konst("zero", int(0));
    let unit = t.konst("one", one());
    let two = t.konst("two", int(2));
    let eps = t.konst("radius", w1.radius.clone());
    let two_eps = t.mul("two_radius", two, eps);
    let fifth = t.konst("gap", bad_gap());
    for w in BitString::all_of_length(k) {
        let lw = label_of(&w);
        let c = [
            t.konst(format!("c[{}]", w.with_pushed(false)), w1.center_at(&w.with_pushed(false)).clone()),
            t.konst(format!("c[{}]", w.with_pushed(true)), w1.center_at(&w.with_pushed(true)).clone()),
        ];
        let mass = t.add(format!("mass[{lw}]"), vec![c[0], c[1]]);
        let den_lo = t.sub(format!("den_lo[{lw}]"), mass, two_eps);
        if !t.conclude(den_lo, Relation::Gt, zero) {
            return Ok(Outcome::Rejected(format!(
                "mass lower bound at {lw} is {} <= 0",
                fmt_rational(t.value(den_lo))
            )));
        }
        let den_hi = t.add(format!("den_hi[{lw}]"), vec![mass, two_eps]);
        for s in [false, true] {
            let tag = format!("{lw},{}", u8::from(s));
            let cs = c[usize::from(s)];
            let raw_lo = t.sub(format!("num_lo_raw[{tag}]"), cs, eps);
            let num_lo = t.max(format!("num_lo[{tag}]"), vec![raw_lo, zero]);
            let num_hi = t.add(format!("num_hi[{tag}]"), vec![cs, eps]);
            let lo = t.div(format!("cond_lo[{tag}]"), num_lo, den_hi);
            let raw_hi = t.div(format!("cond_hi_raw[{tag}]"), num_hi, den_lo);
            let hi = t.min(format!("cond_hi[{tag}]"), vec![raw_hi, unit]);
            let m = t.konst(format!("mu[{tag}]"), mu.conditional_of(&w, s)?);
            let above = t.sub(format!("above[{tag}]"), lo, m);
            let below = t.sub(format!("below[{tag}]"), m, hi);
            let g = t.max(format!("gap[{tag}]"), vec![above, below]);
            if !t.conclude(g, Relation::Ge, fifth) {
                return Ok(Outcome::Rejected(format!(
                    "gap at ({tag}) only {}",
                    fmt_rational(t.value(g))
                )));
            }
        }
    }
    Ok(Outcome::Certified(t.finish(
        CertKind::BadGap,
        vec![
            ("forecaster".into(), digest(&mu.describe())),
            ("ball".into(), digest(&w1.to_text())),
        ],
    )))
}

/// One application of the shrink operator with both certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShrinkStep {
    pub ball: BasisBall,
    pub exponent: u32,
    pub containment: Certificate,
    pub bad_gap: Certificate,
}

/// Splits every cell `1/10 : 9/10`, giving the smaller share to the child
/// `μ` favours, and picks the largest radius `10^-m` for which both the
/// containment and the bad-gap certificates pass.
pub fn shrink_against(mu: &dyn ConditionalLaw, w: &BasisBall) -> Result<ShrinkStep> {
    if !mu.full_support() {
        return Err(Error::Precondition(format!(
            "{} must have full support",
            mu.describe()
        )));
    }
    if let Some(i) = w.center.iter().position(|c| !c.is_positive()) {
        return Err(Error::Precondition(format!(
            "center cell {} has zero mass",
            label_of(&BitString::from_index(i, w.depth))
        )));
    }
    let (small, large) = (rat(1, 10), rat(9, 10));
    let mut center = Vec::with_capacity(2 * w.center.len());
    for (i, c) in w.center.iter().enumerate() {
        let u = BitString::from_index(i, w.depth);
        let zero_favoured = mu.conditional_of(&u, false)? >= mu.conditional_of(&u, true)?;
        let (c0, c1) = if zero_favoured {
            (c * &small, c * &large)
        } else {
            (c * &large, c * &small)
        };
        center.push(c0);
        center.push(c1);
    }
    let mut blocking = String::from("nothing tried");
    for m in 1..=MAX_SHRINK_EXPONENT {
        let w1 = BasisBall::new(w.depth + 1, center.clone(), pow10_neg(m))?;
        let containment = match ball_contains(w, &w1)? {
            Outcome::Certified(c) => c,
            Outcome::Rejected(r) => {
                blocking = format!("containment: {r}");
                continue;
            }
        };
        match bad_gap_certificate(mu, &w1)? {
            Outcome::Certified(bad_gap) => {
                return Ok(ShrinkStep {
                    ball: w1,
                    exponent: m,
                    containment,
                    bad_gap,
                })
            }
            Outcome::Rejected(r) => blocking = format!("bad gap: {r}"),
        }
    }
    Err(Error::ShrinkFailure {
        max_exponent: MAX_SHRINK_EXPONENT,
        blocking,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeagreChain {
    pub start: BasisBall,
    pub steps: Vec<ShrinkStep>,
}

impl MeagreChain {
    /// `W0, W1, …, Wt`.
    pub fn balls(&self) -> Vec<&BasisBall> {
        std::iter::once(&self.start)
            .chain(self.steps.iter().map(|s| &s.ball))
            .collect()
    }

    pub fn last(&self) -> &BasisBall {
        self.steps.last().map_or(&self.start, |s| &s.ball)
    }

    /// Replays every certificate in the chain.
    pub fn replay(&self) -> Result<()> {
        for s in &self.steps {
            s.containment.replay()?;
            s.bad_gap.replay()?;
        }
        Ok(())
    }
}

/// `t` shrink steps from `w0`.
pub fn meagre_chain(mu: &dyn ConditionalLaw, w0: &BasisBall, t: usize) -> Result<MeagreChain> {
    let mut steps: Vec<ShrinkStep> = Vec::with_capacity(t);
    for _ in 0..t {
        let prev = steps.last().map_or(w0, |s| &s.ball);
        let step = shrink_against(mu, prev)?;
        steps.push(step);
    }
    Ok(MeagreChain {
        start: w0.clone(),
        steps,
    })
}

fn check_superbad_depth(k_max: usize) -> Result<()> {
    if k_max > MAX_SUPERBAD_DEPTH {
        return Err(Error::Precondition(format!(
            "super-bad scan depth {k_max} exceeds {MAX_SUPERBAD_DEPTH}"
        )));
    }
    Ok(())
}

/// Smallest `|μ(1|w) − ν(1|w)|` over `w` of length `k`. The gap for `s = 0`
/// is the same number.
fn min_gap_at(mu: &dyn ConditionalLaw, nu: &dyn ConditionalLaw, k: usize) -> Result<Rational> {
    let mut best: Option<Rational> = None;
    for w in BitString::all_of_length(k) {
        let g = (mu.conditional(&w)? - nu.conditional(&w)?).abs();
        if best.as_ref().is_none_or(|b| g < *b) {
            best = Some(g);
        }
    }
    Ok(best.expect("at least one string"))
}

/// Depths `1..=k_max` at which every conditional gap is at least `1/5`.
pub fn bad_depths(mu: &dyn ConditionalLaw, nu: &dyn ConditionalLaw, k_max: usize) -> Result<Vec<bool>> {
    check_superbad_depth(k_max)?;
    (1..=k_max)
        .into_par_iter()
        .map(|k| Ok(min_gap_at(mu, nu, k)? >= bad_gap()))
        .collect()
}

/// Number of `k <= k_max` for which more than half of the depths
/// `j = 1..=k` are bad.
pub fn superbad_count(mu: &dyn ConditionalLaw, nu: &dyn ConditionalLaw, k_max: usize) -> Result<usize> {
    let bad = bad_depths(mu, nu, k_max)?;
    let mut seen = 0;
    let mut count = 0;
    for (i, b) in bad.iter().enumerate() {
        seen += usize::from(*b);
        if 2 * seen > i + 1 {
            count += 1;
        }
    }
    Ok(count)
}

/// [`superbad_count`] with a replayable trace over every conditional gap.
pub fn superbad_certificate(
    mu: &dyn ConditionalLaw,
    nu: &dyn ConditionalLaw,
    k_max: usize,
) -> Result<(usize, Certificate)> {
    check_superbad_depth(k_max)?;
    let mut t = TraceBuilder::new();
    let fifth = t.konst("gap", bad_gap());
    let two = t.konst("two", int(2));
    let mut bad = vec![];
    let mut superbad = vec![];
    for k in 1..=k_max {
        let mut gaps = vec![];
        for w in BitString::all_of_length(k) {
            let lw = label_of(&w);
            let a = t.konst(format!("mu[{lw}]"), mu.conditional(&w)?);
            let b = t.konst(format!("nu[{lw}]"), nu.conditional(&w)?);
            let d = t.sub(format!("diff[{lw}]"), a, b);
            gaps.push(t.abs(format!("absdiff[{lw}]"), d));
        }
        let g = t.min(format!("min_gap[{k}]"), gaps);
        bad.push(t.indicator(format!("bad[{k}]"), Relation::Ge, g, fifth));
        let count = t.add(format!("bad_upto[{k}]"), bad.clone());
        let twice = t.mul(format!("twice_bad_upto[{k}]"), two, count);
        let kk = t.konst(format!("depth[{k}]"), int(k as i64));
        superbad.push(t.indicator(format!("superbad[{k}]"), Relation::Gt, twice, kk));
    }
    let total = t.add("superbad_total", superbad);
    let n = t.value(total).to_integer();
    let claimed = t.konst("claimed", Rational::from_integer(n.clone()));
    t.conclude(total, Relation::Eq, claimed);
    let n: usize = n.try_into().map_err(|_| Error::Precondition("count overflow".into()))?;
    Ok((
        n,
        t.finish(
            CertKind::SuperbadCount,
            vec![
                ("forecaster".into(), digest(&mu.describe())),
                ("source".into(), digest(&nu.describe())),
            ],
        ),
    ))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::measures::{bernoulli, evil_forecaster, Law};
    use crate::rational::to_f64;
    use crate::seq_core::bits;

    fn half() -> Law {
        bernoulli(rat(1, 2)).unwrap()
    }

    #[test]
    fn ball_validation_and_text() {
        assert!(BasisBall::new(1, vec![rat(1, 2), rat(1, 3)], rat(1, 2)).is_err());
        assert!(BasisBall::new(1, vec![rat(1, 2), rat(1, 2)], int(0)).is_err());
        assert!(BasisBall::new(2, vec![rat(1, 2), rat(1, 2)], int(1)).is_err());
        let b = BasisBall::depth_one_full();
        assert_eq!(BasisBall::from_text(&b.to_text()).unwrap(), b);
        let z = BasisBall::new(0, vec![int(1)], int(1)).unwrap();
        assert_eq!(BasisBall::from_text(&z.to_text()).unwrap(), z);
    }

    #[test]
    fn containment_examples() {
        let outer = BasisBall::depth_one_full();
        let same = ball_contains(&outer, &outer).unwrap();
        same.certificate().unwrap().replay().unwrap();
        let inner = BasisBall::new(
            2,
            vec![rat(9, 20), rat(1, 20), rat(1, 20), rat(9, 20)],
            rat(1, 100),
        )
        .unwrap();
        let c = ball_contains(&outer, &inner).unwrap();
        c.certificate().unwrap().replay().unwrap();
        let huge = BasisBall::new(2, inner.center.clone(), int(1)).unwrap();
        assert!(!ball_contains(&outer, &huge).unwrap().is_certified());
        assert!(ball_contains(&inner, &outer).is_err());
    }

    #[test]
    fn shrink_example() {
        let step = shrink_against(half().as_ref(), &BasisBall::depth_one_full()).unwrap();
        assert_eq!(step.exponent, 2);
        assert_eq!(step.ball.center_at(&bits("00")), &rat(1, 20));
        assert_eq!(step.ball.center_at(&bits("01")), &rat(9, 20));
        assert_eq!(step.ball.center_at(&bits("10")), &rat(1, 20));
        assert_eq!(step.ball.center_at(&bits("11")), &rat(9, 20));
        step.containment.replay().unwrap();
        step.bad_gap.replay().unwrap();
        let lo = step
            .bad_gap
            .trace
            .iter()
            .find(|s| s.label == "cond_lo[0,1]")
            .unwrap();
        assert_eq!(lo.value, rat(11, 13));
    }

    #[test]
    fn huge_radius_bad_gap_is_rejected() {
        let step = shrink_against(half().as_ref(), &BasisBall::depth_one_full()).unwrap();
        let wide = BasisBall::new(2, step.ball.center.clone(), rat(1, 2)).unwrap();
        assert!(!bad_gap_certificate(half().as_ref(), &wide).unwrap().is_certified());
    }

    #[test]
    fn shrink_against_evil_forecaster_mirrors() {
        let mu = bernoulli(rat(1, 10)).unwrap();
        let plain = shrink_against(mu.as_ref(), &BasisBall::depth_one_full()).unwrap();
        assert_eq!(plain.ball.center_at(&bits("00")), &rat(1, 20));
        let evil = evil_forecaster(mu).unwrap();
        let step = shrink_against(evil.as_ref(), &BasisBall::depth_one_full()).unwrap();
        assert_eq!(step.ball.center_at(&bits("00")), &rat(9, 20));
        assert_eq!(step.ball.center_at(&bits("01")), &rat(1, 20));
        step.bad_gap.replay().unwrap();
    }

    #[test]
    fn shrink_preconditions() {
        let zero_cell = BasisBall::new(1, vec![int(0), int(1)], rat(1, 2)).unwrap();
        assert!(matches!(
            shrink_against(half().as_ref(), &zero_cell),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn superbad_examples() {
        let mu = half();
        assert_eq!(superbad_count(mu.as_ref(), mu.as_ref(), 8).unwrap(), 0);
        let evil = evil_forecaster(mu.clone()).unwrap();
        assert_eq!(superbad_count(mu.as_ref(), evil.as_ref(), 8).unwrap(), 8);
        let (n, cert) = superbad_certificate(mu.as_ref(), evil.as_ref(), 5).unwrap();
        assert_eq!(n, 5);
        cert.replay().unwrap();
        assert!(superbad_count(mu.as_ref(), mu.as_ref(), 13).is_err());
    }

    #[test]
    fn chain_of_two() {
        let mu = half();
        let chain = meagre_chain(mu.as_ref(), &BasisBall::depth_one_full(), 2).unwrap();
        assert_eq!(chain.steps.len(), 2);
        assert_eq!(chain.last().depth(), 3);
        chain.replay().unwrap();
        assert!(meagre_chain(mu.as_ref(), &BasisBall::depth_one_full(), 0)
            .unwrap()
            .steps
            .is_empty());
        let center: Arc<dyn ConditionalLaw> = Arc::new(chain.last().center_law().unwrap());
        assert!(chain.last().contains_law(center.as_ref()).unwrap());
        let p = chain.last().perturbed_cells(3).unwrap();
        let law = FiniteDepthLaw::new("p", p).unwrap();
        assert!(chain.last().contains_law(&law).unwrap());
        assert!(to_f64(chain.last().radius()) > 0.0);
    }
}
