// SPDX-License-Identifier: Apache-2.0

//! Nasty bits, wicked strings and nowhere-dense witnesses for the set of
//! sequences an extrapolator weakly learns.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extrapolation::{Extrapolator, Learner};
use crate::rational::Rational;
use crate::seq_core::BitString;

/// Fraction of positions `k <= |w|` where `m(w[k-1]) != w(k)`.
pub fn wickedness(m: &dyn Extrapolator, w: &BitString) -> Result<Rational> {
    if w.is_empty() {
        return Err(Error::Precondition("wickedness needs |w| >= 1".into()));
    }
    let nasty = nasty_positions(m, w)?.len();
    Ok(Rational::new(nasty.into(), w.len().into()))
}

/// 1-based positions of the nasty bits of `w`.
pub fn nasty_positions(m: &dyn Extrapolator, w: &BitString) -> Result<Vec<usize>> {
    let preds = m.predictions_along(w)?;
    Ok((1..=w.len()).filter(|&k| preds[k - 1] != w.get(k - 1)).collect())
}

/// At least half the bits are nasty.
pub fn is_wicked(m: &dyn Extrapolator, w: &BitString) -> Result<bool> {
    Ok(!w.is_empty() && 2 * nasty_positions(m, w)?.len() >= w.len())
}

/// Lengths `j >= 1` such that `w[..j]` is wicked, in one pass.
pub fn wicked_prefix_lengths(m: &dyn Extrapolator, w: &BitString) -> Result<Vec<usize>> {
    let preds = m.predictions_along(w)?;
    let mut nasty = 0usize;
    let mut out = vec![];
    for j in 1..=w.len() {
        if preds[j - 1] != w.get(j - 1) {
            nasty += 1;
        }
        if 2 * nasty >= j {
            out.push(j);
        }
    }
    Ok(out)
}

pub fn count_wicked_prefixes(m: &dyn Extrapolator, w: &BitString) -> Result<usize> {
    Ok(wicked_prefix_lengths(m, w)?.len())
}

/// Appends `count` bits, each the opposite of what `m` predicts next.
pub fn extend_nasty(m: &dyn Extrapolator, w: &mut BitString, count: usize) -> Result<()> {
    for _ in 0..count {
        let guess = m.predict(w)?;
        w.push(!guess);
    }
    Ok(())
}

type WitnessFn = dyn Fn(usize, &BitString) -> Result<BitString> + Send + Sync;

/// A computable map `F(n, w)` whose value strictly extends `w`.
#[derive(Clone)]
pub struct WitnessFamily {
    name: String,
    f: Arc<WitnessFn>,
}

impl fmt::Debug for WitnessFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WitnessFamily({})", self.name)
    }
}

impl WitnessFamily {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(usize, &BitString) -> Result<BitString> + Send + Sync + 'static,
    ) -> Self {
        WitnessFamily {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `F(n, w)`, checked to extend `w` strictly.
    pub fn apply(&self, n: usize, w: &BitString) -> Result<BitString> {
        let got = (self.f)(n, w)?;
        if got.len() <= w.len() || !w.is_prefix_of(&got) {
            return Err(Error::WitnessViolation {
                n,
                w: w.to_string(),
                got: got.to_string(),
            });
        }
        Ok(got)
    }
}

/// `F(n, w)`: `w`, then `|w|` nasty bits, then `n` more. The empty string
/// first receives one nasty bit so the extension is strict.
pub fn nwd_witness_weaknv(m: Learner) -> WitnessFamily {
    let name = format!("nwd({})", m.describe());
    WitnessFamily::new(name, move |n, w| {
        let lead = if w.is_empty() { 1 } else { w.len() };
        let mut u = BitString::with_capacity(w.len() + lead + n);
        u.append(w);
        extend_nasty(m.as_ref(), &mut u, lead + n)?;
        Ok(u)
    })
}

/// `F(n, w) = w.bit`, the simplest strict witness.
pub fn append_witness(bit: bool) -> WitnessFamily {
    WitnessFamily::new(format!("append({})", u8::from(bit)), move |_, w| {
        Ok(w.with_pushed(bit))
    })
}

/// Iterates `w_{k+1} = F(k, w_k).0` for `k = 0 .. steps-1`; returns every
/// `w_k`, starting with `w_0 = w`.
pub fn baire_escape_trace(f: &WitnessFamily, w: &BitString, steps: usize) -> Result<Vec<BitString>> {
    if steps == 0 {
        return Err(Error::Precondition("baire_escape needs steps >= 1".into()));
    }
    let mut trace = vec![w.clone()];
    for k in 0..steps {
        let next = f.apply(k, trace.last().expect("non-empty"))?.with_pushed(false);
        trace.push(next);
    }
    Ok(trace)
}

/// `w_steps` from [`baire_escape_trace`]. It extends `F(k, w_k)` for
/// every `k < steps`, so it avoids each of the first `steps` pieces.
pub fn baire_escape(f: &WitnessFamily, w: &BitString, steps: usize) -> Result<BitString> {
    Ok(baire_escape_trace(f, w, steps)?.pop().expect("non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extrapolation::{Constant, LastBit};
    use crate::rational::{int, rat};
    use crate::seq_core::bits;

    fn m1() -> Learner {
        Arc::new(Constant(true))
    }

    #[test]
    fn wickedness_examples() {
        let m = Constant(true);
        assert_eq!(wickedness(&m, &bits("111")).unwrap(), int(0));
        assert_eq!(wickedness(&m, &bits("000")).unwrap(), int(1));
        assert_eq!(wickedness(&m, &bits("10")).unwrap(), rat(1, 2));
        assert!(wickedness(&m, &BitString::new()).is_err());
    }

    #[test]
    fn witness_examples() {
        let f = nwd_witness_weaknv(m1());
        let v = f.apply(2, &bits("1")).unwrap();
        assert_eq!(v, bits("1000"));
        assert_eq!(wicked_prefix_lengths(&Constant(true), &v).unwrap(), vec![2, 3, 4]);
        assert_eq!(f.apply(0, &bits("11")).unwrap(), bits("1100"));
        assert_eq!(f.apply(0, &BitString::new()).unwrap(), bits("0"));
    }

    #[test]
    fn witness_against_last_bit() {
        let f = nwd_witness_weaknv(Arc::new(LastBit));
        let v = f.apply(1, &bits("01")).unwrap();
        // last-bit predicts 1 after "01" so the nasty bit is 0, then 1, then 0.
        assert_eq!(v, bits("01010"));
        assert!(count_wicked_prefixes(&LastBit, &v).unwrap() >= 1);
    }

    #[test]
    fn violating_witness_is_reported() {
        let bad = WitnessFamily::new("id", |_, w| Ok(w.clone()));
        assert!(matches!(
            bad.apply(0, &bits("1")),
            Err(Error::WitnessViolation { .. })
        ));
    }

    #[test]
    fn escape_examples() {
        let f = append_witness(true);
        assert_eq!(baire_escape(&f, &bits("0"), 2).unwrap(), bits("01010"));
        assert_eq!(baire_escape(&f, &bits("0"), 1).unwrap(), bits("010"));
        assert!(baire_escape(&f, &bits("0"), 0).is_err());
    }

    #[test]
    fn escape_extends_every_witness_value() {
        let f = nwd_witness_weaknv(m1());
        let trace = baire_escape_trace(&f, &bits("1"), 6).unwrap();
        let last = trace.last().unwrap();
        for (k, wk) in trace.iter().take(6).enumerate() {
            assert!(f.apply(k, wk).unwrap().is_prefix_of(last));
        }
        assert!(count_wicked_prefixes(&Constant(true), last).unwrap() >= 6);
    }
}
