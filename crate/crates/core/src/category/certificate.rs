// SPDX-License-Identifier: Apache-2.0

//! Exact-arithmetic certificates.
//!
//! A certificate is a straight-line program over rationals: every step
//! names an operation on earlier steps (or a constant) together with the
//! value it produced. Replaying recomputes each step and re-checks the
//! asserted relations, so a certificate can be audited without trusting
//! the code that produced it.

use std::fmt::{self, Write as _};

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, parse_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertKind {
    Contains,
    BadGap,
    SuperbadCount,
}

impl fmt::Display for CertKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertKind::Contains => "contains",
            CertKind::BadGap => "bad_gap",
            CertKind::SuperbadCount => "superbad_count",
        })
    }
}

impl std::str::FromStr for CertKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "contains" => Ok(CertKind::Contains),
            "bad_gap" => Ok(CertKind::BadGap),
            "superbad_count" => Ok(CertKind::SuperbadCount),
            _ => Err(Error::Parse(format!("unknown certificate kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl Relation {
    pub fn holds(self, a: &Rational, b: &Rational) -> bool {
        match self {
            Relation::Lt => a < b,
            Relation::Le => a <= b,
            Relation::Gt => a > b,
            Relation::Ge => a >= b,
            Relation::Eq => a == b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Eq => "==",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "<" => Relation::Lt,
            "<=" => Relation::Le,
            ">" => Relation::Gt,
            ">=" => Relation::Ge,
            "==" => Relation::Eq,
            _ => return Err(Error::Parse(format!("unknown relation {s:?}"))),
        })
    }
}

/// One operation in a trace; operands index earlier steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    Const(#[serde(with = "crate::rational::text")] Rational),
    Add(Vec<usize>),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Abs(usize),
    Max(Vec<usize>),
    Min(Vec<usize>),
    /// 1 when the relation holds between the operands, else 0.
    Indicator(Relation, usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub label: String,
    pub op: Op,
    #[serde(with = "crate::rational::text")]
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conclusion {
    pub lhs: usize,
    pub relation: Relation,
    pub rhs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertKind,
    /// `(role, sha256 digest of the premise's canonical text)`.
    pub premises: Vec<(String, String)>,
    pub conclusions: Vec<Conclusion>,
    pub trace: Vec<Step>,
}

/// Hex SHA-256 of a premise's canonical text.
pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn eval(op: &Op, steps: &[Step]) -> Result<Rational> {
    let get = |i: usize| {
        steps
            .get(i)
            .map(|s| &s.value)
            .ok_or_else(|| Error::CertificateMismatch(format!("forward reference to step {i}")))
    };
    let many = |xs: &[usize]| xs.iter().map(|&i| get(i).cloned()).collect::<Result<Vec<_>>>();
    Ok(match op {
        Op::Const(c) => c.clone(),
        Op::Add(xs) => many(xs)?.into_iter().sum(),
        Op::Sub(a, b) => get(*a)? - get(*b)?,
        Op::Mul(a, b) => get(*a)? * get(*b)?,
        Op::Div(a, b) => {
            let d = get(*b)?;
            if d.is_zero() {
                return Err(Error::CertificateMismatch("division by zero".into()));
            }
            get(*a)? / d
        }
        Op::Abs(a) => get(*a)?.abs(),
        Op::Max(xs) => many(xs)?
            .into_iter()
            .max()
            .ok_or_else(|| Error::CertificateMismatch("max of nothing".into()))?,
        Op::Min(xs) => many(xs)?
            .into_iter()
            .min()
            .ok_or_else(|| Error::CertificateMismatch("min of nothing".into()))?,
        Op::Indicator(rel, a, b) => {
            if rel.holds(get(*a)?, get(*b)?) {
                Rational::one()
            } else {
                Rational::zero()
            }
        }
    })
}

impl Certificate {
    /// Recomputes every step and re-checks every conclusion.
    pub fn replay(&self) -> Result<()> {
        for (i, step) in self.trace.iter().enumerate() {
            let v = eval(&step.op, &self.trace[..i])?;
            if v != step.value {
                return Err(Error::CertificateMismatch(format!(
                    "step {i} ({}) recomputes to {} but records {}",
                    step.label,
                    fmt_rational(&v),
                    fmt_rational(&step.value)
                )));
            }
        }
        for c in &self.conclusions {
            let (l, r) = match (self.trace.get(c.lhs), self.trace.get(c.rhs)) {
                (Some(l), Some(r)) => (l, r),
                _ => return Err(Error::CertificateMismatch("conclusion refers past trace".into())),
            };
            if !c.relation.holds(&l.value, &r.value) {
                return Err(Error::CertificateMismatch(format!(
                    "{} {} {} fails",
                    l.label,
                    c.relation.symbol(),
                    r.label
                )));
            }
        }
        if self.conclusions.is_empty() {
            return Err(Error::CertificateMismatch("no conclusions".into()));
        }
        Ok(())
    }

    /// Human-readable conclusions, e.g. `lhs <= radius_out`.
    pub fn conclusion_text(&self) -> Vec<String> {
        self.conclusions
            .iter()
            .map(|c| {
                format!(
                    "{} {} {}",
                    self.trace[c.lhs].label,
                    c.relation.symbol(),
                    self.trace[c.rhs].label
                )
            })
            .collect()
    }

    /// Structured text record. Rationals are written as `num/den`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "certificate v1");
        let _ = writeln!(out, "kind {}", self.kind);
        for (role, d) in &self.premises {
            let _ = writeln!(out, "premise {role} {d}");
        }
        for (i, s) in self.trace.iter().enumerate() {
            let args = match &s.op {
                Op::Const(c) => format!("const {}", fmt_rational(c)),
                Op::Add(xs) => format!("add {}", refs(xs)),
                Op::Sub(a, b) => format!("sub #{a} #{b}"),
                Op::Mul(a, b) => format!("mul #{a} #{b}"),
                Op::Div(a, b) => format!("div #{a} #{b}"),
                Op::Abs(a) => format!("abs #{a}"),
                Op::Max(xs) => format!("max {}", refs(xs)),
                Op::Min(xs) => format!("min {}", refs(xs)),
                Op::Indicator(r, a, b) => format!("ind {} #{a} #{b}", r.symbol()),
            };
            let _ = writeln!(out, "step {i} {} {args} = {}", s.label, fmt_rational(&s.value));
        }
        for c in &self.conclusions {
            let _ = writeln!(out, "conclude #{} {} #{}", c.lhs, c.relation.symbol(), c.rhs);
        }
        out.push_str("end\n");
        out
    }

    /// Parses the output of [`Certificate::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |line: &str| Error::Parse(format!("bad certificate line {line:?}"));
        let mut lines = text.lines();
        if lines.next() != Some("certificate v1") {
            return Err(Error::Parse("missing certificate header".into()));
        }
        let mut kind = None;
        let mut premises = vec![];
        let mut trace = vec![];
        let mut conclusions = vec![];
        for line in lines {
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok.first().copied() {
                Some("kind") if tok.len() == 2 => kind = Some(tok[1].parse()?),
                Some("premise") if tok.len() == 3 => premises.push((tok[1].into(), tok[2].into())),
                Some("step") if tok.len() >= 6 => {
                    let eq = tok.iter().position(|t| *t == "=").ok_or_else(|| bad(line))?;
                    let value = parse_rational(tok.get(eq + 1).ok_or_else(|| bad(line))?)?;
                    let args = &tok[4..eq];
                    let r = |t: &str| -> Result<usize> {
                        t.strip_prefix('#')
                            .and_then(|x| x.parse().ok())
                            .ok_or_else(|| bad(line))
                    };
                    let rs = |ts: &[&str]| ts.iter().map(|t| r(t)).collect::<Result<Vec<_>>>();
                    let op = match (tok[3], args) {
                        ("const", [c]) => Op::Const(parse_rational(c)?),
                        ("add", xs) => Op::Add(rs(xs)?),
                        ("sub", [a, b]) => Op::Sub(r(a)?, r(b)?),
                        ("mul", [a, b]) => Op::Mul(r(a)?, r(b)?),
                        ("div", [a, b]) => Op::Div(r(a)?, r(b)?),
                        ("abs", [a]) => Op::Abs(r(a)?),
                        ("max", xs) => Op::Max(rs(xs)?),
                        ("min", xs) => Op::Min(rs(xs)?),
                        ("ind", [rel, a, b]) => Op::Indicator(Relation::parse(rel)?, r(a)?, r(b)?),
                        _ => return Err(bad(line)),
                    };
                    trace.push(Step {
                        label: tok[2].into(),
                        op,
                        value,
                    });
                }
                Some("conclude") if tok.len() == 4 => {
                    let r = |t: &str| -> Result<usize> {
                        t.strip_prefix('#')
                            .and_then(|x| x.parse().ok())
                            .ok_or_else(|| bad(line))
                    };
                    conclusions.push(Conclusion {
                        lhs: r(tok[1])?,
                        relation: Relation::parse(tok[2])?,
                        rhs: r(tok[3])?,
                    });
                }
                Some("end") => break,
                _ => return Err(bad(line)),
            }
        }
        Ok(Certificate {
            kind: kind.ok_or_else(|| Error::Parse("certificate without kind".into()))?,
            premises,
            conclusions,
            trace,
        })
    }
}

fn refs(xs: &[usize]) -> String {
    xs.iter().map(|i| format!("#{i}")).collect::<Vec<_>>().join(" ")
}

/// Builds a trace step by step, computing each value as it goes.
#[derive(Debug, Default)]
pub struct TraceBuilder {
    steps: Vec<Step>,
    conclusions: Vec<Conclusion>,
}

impl TraceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, label: impl Into<String>, op: Op) -> usize {
        let value = eval(&op, &self.steps).expect("builder only references earlier steps");
        self.steps.push(Step {
            label: label.into(),
            op,
            value,
        });
        self.steps.len() - 1
    }

    pub fn value(&self, i: usize) -> &Rational {
        &self.steps[i].value
    }

    pub fn konst(&mut self, label: impl Into<String>, c: Rational) -> usize {
        self.push(label, Op::Const(c))
    }

    pub fn add(&mut self, label: impl Into<String>, xs: Vec<usize>) -> usize {
        self.push(label, Op::Add(xs))
    }

    pub fn sub(&mut self, label: impl Into<String>, a: usize, b: usize) -> usize {
        self.push(label, Op::Sub(a, b))
    }

    pub fn mul(&mut self, label: impl Into<String>, a: usize, b: usize) -> usize {
        self.push(label, Op::Mul(a, b))
    }

    pub fn div(&mut self, label: impl Into<String>, a: usize, b: usize) -> usize {
        self.push(label, Op::Div(a, b))
    }

    pub fn abs(&mut self, label: impl Into<String>, a: usize) -> usize {
        self.push(label, Op::Abs(a))
    }

    pub fn max(&mut self, label: impl Into<String>, xs: Vec<usize>) -> usize {
        self.push(label, Op::Max(xs))
    }

    pub fn min(&mut self, label: impl Into<String>, xs: Vec<usize>) -> usize {
        self.push(label, Op::Min(xs))
    }

    pub fn indicator(&mut self, label: impl Into<String>, rel: Relation, a: usize, b: usize) -> usize {
        self.push(label, Op::Indicator(rel, a, b))
    }

    /// Records `lhs rel rhs`; returns whether it currently holds.
    pub fn conclude(&mut self, lhs: usize, relation: Relation, rhs: usize) -> bool {
        self.conclusions.push(Conclusion { lhs, relation, rhs });
        relation.holds(&self.steps[lhs].value, &self.steps[rhs].value)
    }

    pub fn finish(self, kind: CertKind, premises: Vec<(String, String)>) -> Certificate {
        Certificate {
            kind,
            premises,
            conclusions: self.conclusions,
            trace: self.steps,
        }
    }
}

/// A certificate, or the reason none could be issued. Rejection means
/// "not proven", never "false".
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Certified(Certificate),
    Rejected(String),
}

impl Outcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Outcome::Certified(c) => Some(c),
            Outcome::Rejected(_) => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Outcome::Certified(_))
    }
}

/// `1` as a trace constant, used often enough to deserve a name.
pub(crate) fn one() -> Rational {
    int(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn sample_cert() -> Certificate {
        let mut t = TraceBuilder::new();
        let a = t.konst("a", rat(1, 3));
        let b = t.konst("b", rat(1, 6));
        let s = t.add("s", vec![a, b]);
        let h = t.konst("half", rat(1, 2));
        assert!(t.conclude(s, Relation::Eq, h));
        let g = t.indicator("ge", Relation::Ge, a, b);
        let one = t.konst("one", int(1));
        assert!(t.conclude(g, Relation::Eq, one));
        t.finish(CertKind::Contains, vec![("x".into(), digest("x"))])
    }

    #[test]
    fn replay_and_text_round_trip() {
        let c = sample_cert();
        c.replay().unwrap();
        let back = Certificate::from_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
        back.replay().unwrap();
    }

    #[test]
    fn tampering_is_detected() {
        let mut c = sample_cert();
        c.trace[2].value = rat(2, 3);
        assert!(matches!(c.replay(), Err(Error::CertificateMismatch(_))));
        let mut c = sample_cert();
        c.trace[0].op = Op::Const(rat(1, 2));
        c.trace[0].value = rat(1, 2);
        assert!(c.replay().is_err());
    }
}
