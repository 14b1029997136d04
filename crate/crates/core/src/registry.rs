// SPDX-License-Identifier: Apache-2.0

//! Text references for learners, streams, schedules and laws.
//!
//! A reference is a term: an atom (`last-bit`, `1/2`, `0110`), a call
//! `name(arg, ...)` or a list `[a, b]`. The empty bit string is written
//! `e`. Every object built here describes itself with a term that
//! resolves back to an equivalent object.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extrapolation::{
    adversarial_pair, coarse_block_double, combine_nv, combine_weak, defeat_nv, evil_twin,
    guess_sequence, Constant, LastBit, Learner, Majority, Table,
};
use crate::forecasting_eval::defeat_nc;
use crate::measures::{
    bernoulli, delta, evil_forecaster, glue_partition, laplace_bayes, markov, mixture, sample_stream,
    spiked, vanishing_zero, Law,
};
use crate::rational::{parse_rational, Rational};
use crate::seq_core::{stream_from_string, BitStream, BitString, IndexSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Atom(String),
    Call(String, Vec<Term>),
    List(Vec<Term>),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ts: &[Term]| ts.iter().map(Term::to_string).collect::<Vec<_>>().join(",");
        match self {
            Term::Atom(a) => f.write_str(a),
            Term::Call(n, args) => write!(f, "{n}({})", join(args)),
            Term::List(items) => write!(f, "[{}]", join(items)),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(0, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected {c:?}")))
        }
    }

    fn atom(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest
            .find(|c: char| "()[],".contains(c) || c.is_whitespace())
            .unwrap_or(rest.len());
        self.pos += len;
        rest[..len].to_string()
    }

    fn args(&mut self, close: char) -> Result<Vec<Term>> {
        let mut out = vec![];
        if self.peek() == Some(close) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(c) if c == close => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.err(&format!("expected ',' or {close:?}"))),
            }
        }
    }

    fn term(&mut self) -> Result<Term> {
        if self.peek() == Some('[') {
            self.pos += 1;
            return Ok(Term::List(self.args(']')?));
        }
        let name = self.atom();
        if self.peek() == Some('(') {
            if name.is_empty() {
                return Err(self.err("call without a name"));
            }
            self.expect('(')?;
            return Ok(Term::Call(name, self.args(')')?));
        }
        Ok(Term::Atom(name))
    }
}

pub fn parse_term(s: &str) -> Result<Term> {
    let mut p = Parser { src: s, pos: 0 };
    let t = p.term()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

fn unknown(kind: &str, t: &Term) -> Error {
    Error::UnknownRef(format!("{kind} {t}"))
}

fn arity(t: &Term, args: &[Term], n: usize) -> Result<()> {
    if args.len() == n {
        Ok(())
    } else {
        Err(Error::Parse(format!("{t} takes {n} argument(s)")))
    }
}

fn atom(t: &Term) -> Result<&str> {
    match t {
        Term::Atom(a) => Ok(a),
        _ => Err(Error::Parse(format!("expected an atom, got {t}"))),
    }
}

fn list(t: &Term) -> Result<&[Term]> {
    match t {
        Term::List(items) => Ok(items),
        _ => Err(Error::Parse(format!("expected a list, got {t}"))),
    }
}

fn number(t: &Term) -> Result<usize> {
    atom(t)?
        .parse()
        .map_err(|_| Error::Parse(format!("expected a natural number, got {t}")))
}

fn seed_of(t: &Term) -> Result<u64> {
    atom(t)?
        .parse()
        .map_err(|_| Error::Parse(format!("expected a seed, got {t}")))
}

fn rational(t: &Term) -> Result<Rational> {
    parse_rational(atom(t)?)
}

fn bit(t: &Term) -> Result<bool> {
    match atom(t)? {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(Error::Parse(format!("expected a bit, got {t}"))),
    }
}

/// A bit string atom; `e` or nothing is the empty string.
pub fn parse_bits(s: &str) -> Result<BitString> {
    match s {
        "" | "e" => Ok(BitString::new()),
        _ => s.parse(),
    }
}

fn bitstring(t: &Term) -> Result<BitString> {
    parse_bits(atom(t)?)
}

fn call(t: &Term) -> (&str, &[Term]) {
    match t {
        Term::Atom(a) => (a.as_str(), &[]),
        Term::Call(n, args) => (n.as_str(), args.as_slice()),
        Term::List(_) => ("", &[]),
    }
}

pub fn resolve_learner(t: &Term) -> Result<Learner> {
    let (name, args) = call(t);
    let is_call = matches!(t, Term::Call(..));
    Ok(match (name, is_call) {
        ("always-0", false) => Arc::new(Constant(false)),
        ("always-1", false) => Arc::new(Constant(true)),
        ("last-bit", false) => Arc::new(LastBit),
        ("majority", true) => {
            arity(t, args, 1)?;
            Arc::new(Majority { order: number(&args[0])? })
        }
        ("table", true) => {
            if args.is_empty() {
                return Err(Error::Parse("table needs a default bit".into()));
            }
            let default = bit(&args[0])?;
            let entries = args[1..]
                .iter()
                .map(|e| {
                    let (k, v) = atom(e)?
                        .split_once(':')
                        .ok_or_else(|| Error::Parse(format!("table entry {e} is not w:b")))?;
                    Ok((parse_bits(k)?, bit(&Term::Atom(v.into()))?))
                })
                .collect::<Result<Vec<_>>>()?;
            Arc::new(Table::new(entries, default))
        }
        ("evil-of", true) => {
            arity(t, args, 1)?;
            evil_twin(resolve_learner(&args[0])?)
        }
        ("combine-nv" | "combine-weak", true) => {
            arity(t, args, 2)?;
            let base = resolve_learner(&args[0])?;
            let family = list(&args[1])?
                .iter()
                .map(resolve_stream)
                .collect::<Result<Vec<_>>>()?;
            if name == "combine-nv" {
                combine_nv(base, family)
            } else {
                combine_weak(base, family)
            }
        }
        _ => return Err(unknown("learner", t)),
    })
}

pub fn resolve_schedule(t: &Term) -> Result<IndexSet> {
    let (name, args) = call(t);
    Ok(match (name, matches!(t, Term::Call(..))) {
        ("pow10", false) => IndexSet::powers_of_ten(),
        ("squares", false) => IndexSet::Squares,
        ("all", false) => IndexSet::All,
        ("empty", false) => IndexSet::Empty,
        ("pow", true) => {
            arity(t, args, 1)?;
            let base = number(&args[0])?;
            if base < 2 {
                return Err(Error::Precondition("power schedules need base >= 2".into()));
            }
            IndexSet::Powers { base }
        }
        ("set", true) => IndexSet::finite(args.iter().map(number).collect::<Result<Vec<_>>>()?),
        _ => return Err(unknown("schedule", t)),
    })
}

pub fn resolve_stream(t: &Term) -> Result<BitStream> {
    let (name, args) = call(t);
    Ok(match (name, matches!(t, Term::Call(..))) {
        ("all-ones", false) => BitStream::constant(true),
        ("all-zeros", false) => BitStream::constant(false),
        ("alternating", false) => BitStream::alternating(),
        ("periodic", true) => {
            arity(t, args, 1)?;
            let p = bitstring(&args[0])?;
            if p.is_empty() {
                return Err(Error::Precondition("periodic pattern must be non-empty".into()));
            }
            BitStream::periodic(p)
        }
        ("prefix", true) => {
            arity(t, args, 2)?;
            stream_from_string(&bitstring(&args[0])?, &resolve_stream(&args[1])?)
        }
        ("indicator", true) => {
            arity(t, args, 2)?;
            BitStream::indicator(resolve_schedule(&args[0])?, bit(&args[1])?)
        }
        ("random", true) => {
            arity(t, args, 2)?;
            sample_stream(bernoulli(rational(&args[1])?)?, seed_of(&args[0])?)
        }
        ("sample", true) => {
            arity(t, args, 2)?;
            sample_stream(resolve_law(&args[0])?, seed_of(&args[1])?)
        }
        ("guess", true) => {
            arity(t, args, 2)?;
            guess_sequence(resolve_learner(&args[0])?, &bitstring(&args[1])?)
        }
        ("coarse", true) => {
            arity(t, args, 1)?;
            coarse_block_double(&resolve_stream(&args[0])?)
        }
        ("defeat-nv", true) => {
            arity(t, args, 2)?;
            defeat_nv(resolve_learner(&args[0])?, number(&args[1])?)?
        }
        ("defeat-nc", true) => {
            arity(t, args, 2)?;
            defeat_nc(resolve_law(&args[0])?, number(&args[1])?)?
        }
        ("adv-star" | "adv-dagger", true) => {
            arity(t, args, 4)?;
            let (star, dagger) = adversarial_pair(
                resolve_learner(&args[0])?,
                &bitstring(&args[1])?,
                &resolve_stream(&args[2])?,
                &resolve_schedule(&args[3])?,
            )?;
            if name == "adv-star" {
                star
            } else {
                dagger
            }
        }
        _ => return Err(unknown("stream", t)),
    })
}

pub fn resolve_law(t: &Term) -> Result<Law> {
    let (name, args) = call(t);
    match (name, matches!(t, Term::Call(..))) {
        ("laplace-bayes", false) => Ok(laplace_bayes()),
        ("vanishing-zero", false) => Ok(vanishing_zero()),
        ("bernoulli", true) => {
            arity(t, args, 1)?;
            bernoulli(rational(&args[0])?)
        }
        ("markov", true) => {
            arity(t, args, 2)?;
            let rows = list(&args[1])?.iter().map(rational).collect::<Result<Vec<_>>>()?;
            markov(number(&args[0])?, rows)
        }
        ("delta", true) => {
            arity(t, args, 1)?;
            Ok(delta(resolve_stream(&args[0])?))
        }
        ("spiked", true) => {
            arity(t, args, 3)?;
            Ok(spiked(
                resolve_law(&args[0])?,
                resolve_schedule(&args[1])?,
                resolve_stream(&args[2])?,
            ))
        }
        ("mixture", true) => {
            arity(t, args, 2)?;
            let w = list(&args[0])?.iter().map(rational).collect::<Result<Vec<_>>>()?;
            let c = list(&args[1])?.iter().map(resolve_law).collect::<Result<Vec<_>>>()?;
            mixture(w, c)
        }
        ("evil-of", true) => {
            arity(t, args, 1)?;
            evil_forecaster(resolve_law(&args[0])?)
        }
        ("glue", true) => {
            arity(t, args, 3)?;
            let parts = list(&args[0])?.iter().map(bitstring).collect::<Result<Vec<_>>>()?;
            let w = list(&args[1])?.iter().map(rational).collect::<Result<Vec<_>>>()?;
            glue_partition(parts, w, resolve_law(&args[2])?)
        }
        _ => Err(unknown("law", t)),
    }
}

pub fn learner(s: &str) -> Result<Learner> {
    resolve_learner(&parse_term(s)?)
}

pub fn stream(s: &str) -> Result<BitStream> {
    resolve_stream(&parse_term(s)?)
}

pub fn schedule(s: &str) -> Result<IndexSet> {
    resolve_schedule(&parse_term(s)?)
}

pub fn law(s: &str) -> Result<Law> {
    resolve_law(&parse_term(s)?)
}

/// The standard learner corpus.
pub const STANDARD_LEARNERS: &[&str] = &[
    "always-0",
    "always-1",
    "last-bit",
    "majority(1)",
    "majority(3)",
    "table(1,e:0,0:0,01:1,11:0)",
    "evil-of(last-bit)",
    "evil-of(majority(3))",
    "combine-nv(always-0,[all-ones,alternating])",
    "combine-weak(last-bit,[all-zeros,alternating,periodic(110),all-ones])",
];

/// The standard ten-stream corpus.
pub const STANDARD_STREAMS: &[&str] = &[
    "all-ones",
    "all-zeros",
    "alternating",
    "periodic(110)",
    "periodic(0010111)",
    "indicator(pow10,0)",
    "indicator(squares,1)",
    "random(1,1/2)",
    "random(2,1/5)",
    "prefix(0110,alternating)",
];

/// Full-support laws.
pub const STANDARD_LAWS: &[&str] = &[
    "bernoulli(1/2)",
    "bernoulli(1/4)",
    "bernoulli(9/10)",
    "laplace-bayes",
    "markov(1,[1/5,3/4])",
    "markov(2,[1/2,1/3,2/3,1/10])",
    "mixture([1/2,1/2],[bernoulli(1/4),laplace-bayes])",
    "evil-of(laplace-bayes)",
    "glue([0,10,11],[1/10,1/5,7/10],laplace-bayes)",
];

pub fn standard_learners() -> Vec<Learner> {
    STANDARD_LEARNERS
        .iter()
        .map(|s| learner(s).expect("standard learner"))
        .collect()
}

pub fn standard_streams() -> Vec<BitStream> {
    STANDARD_STREAMS
        .iter()
        .map(|s| stream(s).expect("standard stream"))
        .collect()
}

pub fn standard_laws() -> Vec<Law> {
    STANDARD_LAWS.iter().map(|s| law(s).expect("standard law")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::seq_core::bits;

    #[test]
    fn term_syntax() {
        let t = parse_term(" combine-nv( always-0 , [all-ones, periodic(01)] ) ").unwrap();
        assert_eq!(t.to_string(), "combine-nv(always-0,[all-ones,periodic(01)])");
        assert!(parse_term("a(b").is_err());
        assert!(parse_term("a)b").is_err());
        assert_eq!(parse_term("f()").unwrap(), Term::Call("f".into(), vec![]));
    }

    #[test]
    fn learners_round_trip() {
        for s in STANDARD_LEARNERS {
            let m = learner(s).unwrap();
            assert_eq!(m.describe(), *s);
            assert_eq!(learner(&m.describe()).unwrap().describe(), m.describe());
        }
    }

    #[test]
    fn streams_resolve_and_round_trip() {
        for s in STANDARD_STREAMS {
            let x = stream(s).unwrap();
            let y = stream(x.name()).unwrap();
            assert_eq!(x.prefix(64).unwrap(), y.prefix(64).unwrap(), "{s}");
        }
        let g = stream("guess(always-1,0)").unwrap();
        assert_eq!(g.prefix(4).unwrap(), bits("0111"));
        let g = stream(stream("guess(last-bit,e)").unwrap().name()).unwrap();
        assert_eq!(g.prefix(3).unwrap(), bits("111"));
        assert!(!stream("indicator(pow10,0)").unwrap().bit(10).unwrap());
    }

    #[test]
    fn laws_round_trip() {
        for s in STANDARD_LAWS {
            let l = law(s).unwrap();
            assert!(l.full_support(), "{s}");
            let again = law(&l.describe()).unwrap();
            for w in BitString::all_up_to(4) {
                assert_eq!(l.p1(&w).unwrap(), again.p1(&w).unwrap());
            }
        }
        assert_eq!(law("bernoulli(0.25)").unwrap().p1(&bits("")).unwrap(), rat(1, 4));
    }

    #[test]
    fn unknown_refs_are_reported() {
        assert!(matches!(learner("oracle"), Err(Error::UnknownRef(_))));
        assert!(matches!(stream("last-bit"), Err(Error::UnknownRef(_))));
        assert!(matches!(law("bernoulli"), Err(Error::UnknownRef(_))));
        assert!(matches!(schedule("primes"), Err(Error::UnknownRef(_))));
        assert!(learner("majority(1,2)").is_err());
    }

    #[test]
    fn schedules() {
        assert_eq!(schedule("pow(2)").unwrap().members_upto(10), vec![2, 4, 8]);
        assert_eq!(schedule("set(3,1)").unwrap().name(), "set(1,3)");
        assert!(schedule("pow(1)").is_err());
    }
}
