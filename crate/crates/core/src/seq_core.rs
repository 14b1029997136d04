// SPDX-License-Identifier: Apache-2.0

//! Bit strings, memoized infinite bit streams, index sets and density
//! bookkeeping.
//!
//! Positions inside a stream are 1-indexed: `stream.bit(1)` is the first bit.
//! [`BitString`] itself is a plain container and is indexed from 0 like a
//! slice.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use num::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default maximum number of cached bits per stream.
pub const DEFAULT_CACHE_CAP: usize = 1 << 20;

static CACHE_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_CACHE_CAP);

/// Cap given to streams created after this call.
pub fn set_default_cache_cap(cap: usize) {
    CACHE_CAP.store(cap, Ordering::Relaxed);
}

pub fn default_cache_cap() -> usize {
    CACHE_CAP.load(Ordering::Relaxed)
}

/// A finite binary string, packed 64 bits per word.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitString {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut s = BitString::new();
        for b in bits {
            s.push(b);
        }
        s
    }

    /// `n` copies of `bit`.
    pub fn repeat(bit: bool, n: usize) -> Self {
        let mut s = BitString::with_capacity(n);
        s.extend_repeat(bit, n);
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at 0-based index `i`. Panics when out of range.
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn last(&self) -> Option<bool> {
        self.len.checked_sub(1).map(|i| self.get(i))
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn pop(&mut self) -> Option<bool> {
        let b = self.last()?;
        let i = self.len - 1;
        self.words[i / 64] &= !(1 << (i % 64));
        self.len -= 1;
        if self.len.is_multiple_of(64) {
            self.words.pop();
        }
        Some(b)
    }

    pub fn extend_repeat(&mut self, bit: bool, n: usize) {
        for _ in 0..n {
            self.push(bit);
        }
    }

    pub fn append(&mut self, other: &BitString) {
        for b in other.iter() {
            self.push(b);
        }
    }

    /// `self.other`, the concatenation.
    pub fn concat(&self, other: &BitString) -> BitString {
        let mut s = self.clone();
        s.append(other);
        s
    }

    pub fn with_pushed(&self, bit: bool) -> BitString {
        let mut s = self.clone();
        s.push(bit);
        s
    }

    /// The first `n` bits. Panics when `n > len`.
    pub fn prefix(&self, n: usize) -> BitString {
        assert!(n <= self.len, "prefix length {n} exceeds length {}", self.len);
        let mut words = self.words[..n.div_ceil(64)].to_vec();
        if !n.is_multiple_of(64) {
            if let Some(w) = words.last_mut() {
                *w &= (1u64 << (n % 64)) - 1;
            }
        }
        BitString { words, len: n }
    }

    /// Bits from `start` (0-based) to the end.
    pub fn suffix_from(&self, start: usize) -> BitString {
        BitString::from_bits((start..self.len).map(|i| self.get(i)))
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &BitString) -> usize {
        let n = self.len.min(other.len);
        for (wi, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let x = a ^ b;
            if x != 0 {
                return (wi * 64 + x.trailing_zeros() as usize).min(n);
            }
        }
        n
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len <= other.len && self.common_prefix_len(other) == self.len
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Bitwise complement.
    pub fn complement(&self) -> BitString {
        BitString::from_bits(self.iter().map(|b| !b))
    }

    /// The string read as a big-endian integer (first bit most significant).
    pub fn to_index(&self) -> usize {
        self.iter().fold(0usize, |acc, b| (acc << 1) | b as usize)
    }

    /// The `len`-bit string whose big-endian value is `index`.
    pub fn from_index(index: usize, len: usize) -> BitString {
        BitString::from_bits((0..len).rev().map(|i| (index >> i) & 1 == 1))
    }

    /// All strings of length `len` in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = BitString> {
        (0..1usize << len).map(move |i| BitString::from_index(i, len))
    }

    /// All strings of length at most `max_len`, shortest first.
    pub fn all_up_to(max_len: usize) -> impl Iterator<Item = BitString> {
        (0..=max_len).flat_map(BitString::all_of_length)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("not a bit string: {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::from_bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for tests and fixtures: `bits("0110")`. Panics on bad input.
pub fn bits(s: &str) -> BitString {
    s.parse().expect("literal bit string")
}

/// Produces bit `n + 1` of a stream given the first `n` bits.
pub type Generator = Box<dyn FnMut(&BitString) -> Result<bool> + Send>;

struct StreamState {
    cache: BitString,
    generator: Generator,
    cap: usize,
    failure: Option<Error>,
}

/// A lazily generated, memoized infinite binary sequence.
///
/// Clones share the cache. Generators run at most once per position, in
/// order, so generators carrying internal state (block counters, seeded
/// RNGs) still yield a deterministic sequence.
#[derive(Clone)]
pub struct BitStream {
    name: Arc<str>,
    state: Arc<Mutex<StreamState>>,
}

impl fmt::Debug for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BitStream").field("name", &self.name).finish()
    }
}

impl BitStream {
    pub fn new(name: impl Into<String>, generator: Generator) -> Self {
        Self::with_cap(name, default_cache_cap(), generator)
    }

    pub fn with_cap(name: impl Into<String>, cap: usize, generator: Generator) -> Self {
        BitStream {
            name: Arc::from(name.into()),
            state: Arc::new(Mutex::new(StreamState {
                cache: BitString::new(),
                generator,
                cap,
                failure: None,
            })),
        }
    }

    /// Stream whose bit at each position is a pure function of the position.
    pub fn from_position_fn<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(usize) -> bool + Send + 'static,
    {
        Self::new(name, Box::new(move |prefix: &BitString| Ok(f(prefix.len() + 1))))
    }

    pub fn constant(bit: bool) -> Self {
        let name = if bit { "all-ones" } else { "all-zeros" };
        Self::from_position_fn(name, move |_| bit)
    }

    /// 0, 1, 0, 1, ...
    pub fn alternating() -> Self {
        Self::from_position_fn("alternating", |n| n % 2 == 0)
    }

    /// The pattern repeated forever. Panics on an empty pattern.
    pub fn periodic(pattern: BitString) -> Self {
        assert!(!pattern.is_empty(), "periodic pattern must be non-empty");
        let name = format!("periodic({pattern})");
        Self::from_position_fn(name, move |n| pattern.get((n - 1) % pattern.len()))
    }

    /// Stream with `on` at positions in `positions` and `off` elsewhere.
    pub fn indicator(positions: IndexSet, on: bool) -> Self {
        let name = format!("indicator({},{})", positions.name(), on as u8);
        Self::from_position_fn(name, move |n| if positions.contains(n) { on } else { !on })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Replaces the memoization cap. Only affects later queries.
    pub fn set_cap(&self, cap: usize) {
        self.lock().cap = cap;
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, StreamState> {
        self.state.lock().unwrap_or_else(|p| p.into_inner())
    }

    /// The first `n` bits.
    pub fn prefix(&self, n: usize) -> Result<BitString> {
        let mut st = self.lock();
        if n > st.cap {
            return Err(Error::CacheCap {
                requested: n,
                cap: st.cap,
            });
        }
        if let Some(e) = &st.failure {
            if st.cache.len() < n {
                return Err(e.clone());
            }
        }
        while st.cache.len() < n {
            let StreamState {
                cache, generator, ..
            } = &mut *st;
            match generator(cache) {
                Ok(b) => cache.push(b),
                Err(e) => {
                    st.failure = Some(e.clone());
                    return Err(e);
                }
            }
        }
        Ok(st.cache.prefix(n))
    }

    /// Bit at 1-indexed position `pos`.
    pub fn bit(&self, pos: usize) -> Result<bool> {
        assert!(pos >= 1, "stream positions start at 1");
        {
            let st = self.lock();
            if pos <= st.cache.len() {
                return Ok(st.cache.get(pos - 1));
            }
        }
        Ok(self.prefix(pos)?.get(pos - 1))
    }
}

/// `w` followed by `tail`.
pub fn stream_from_string(w: &BitString, tail: &BitStream) -> BitStream {
    if w.is_empty() {
        return tail.clone();
    }
    let w = w.clone();
    let tail = tail.clone();
    let name = format!("prefix({w},{})", tail.name());
    BitStream::new(
        name,
        Box::new(move |prefix: &BitString| {
            let n = prefix.len();
            if n < w.len() {
                Ok(w.get(n))
            } else {
                tail.bit(n - w.len() + 1)
            }
        }),
    )
}

/// A decidable set of positive integers with an increasing enumerator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IndexSet {
    All,
    Empty,
    /// `{base^l : l >= 1}`.
    Powers { base: usize },
    /// `{l^2 : l >= 1}`.
    Squares,
    Finite { members: BTreeSet<usize> },
}

impl IndexSet {
    /// The default spike schedule `{10, 100, 1000, ...}`.
    pub fn powers_of_ten() -> Self {
        IndexSet::Powers { base: 10 }
    }

    pub fn finite<I: IntoIterator<Item = usize>>(members: I) -> Self {
        IndexSet::Finite {
            members: members.into_iter().filter(|&m| m >= 1).collect(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            IndexSet::All => "all".into(),
            IndexSet::Empty => "empty".into(),
            IndexSet::Powers { base: 10 } => "pow10".into(),
            IndexSet::Powers { base } => format!("pow({base})"),
            IndexSet::Squares => "squares".into(),
            IndexSet::Finite { members } => {
                let m: Vec<String> = members.iter().map(|m| m.to_string()).collect();
                format!("set({})", m.join(","))
            }
        }
    }

    pub fn contains(&self, n: usize) -> bool {
        if n == 0 {
            return false;
        }
        match self {
            IndexSet::All => true,
            IndexSet::Empty => false,
            IndexSet::Powers { base } => {
                if *base < 2 {
                    return false;
                }
                let mut p = *base;
                while p < n {
                    match p.checked_mul(*base) {
                        Some(q) => p = q,
                        None => return false,
                    }
                }
                p == n
            }
            IndexSet::Squares => {
                let r = n.isqrt();
                r * r == n
            }
            IndexSet::Finite { members } => members.contains(&n),
        }
    }

    /// Members in increasing order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = usize> + '_> {
        match self {
            IndexSet::All => Box::new(1..),
            IndexSet::Empty => Box::new(std::iter::empty()),
            IndexSet::Powers { base } if *base < 2 => Box::new(std::iter::empty()),
            IndexSet::Powers { base } => {
                let base = *base;
                Box::new(
                    std::iter::successors(Some(base), move |p| p.checked_mul(base)),
                )
            }
            IndexSet::Squares => Box::new((1usize..).map(|l| l * l)),
            IndexSet::Finite { members } => Box::new(members.iter().copied()),
        }
    }

    /// Members `<= n`, ascending.
    pub fn members_upto(&self, n: usize) -> Vec<usize> {
        self.iter().take_while(|&m| m <= n).collect()
    }

    /// The 1-based rank of `n` among the members, when `n` is a member.
    pub fn rank_of(&self, n: usize) -> Option<usize> {
        if !self.contains(n) {
            return None;
        }
        Some(self.iter().take_while(|&m| m <= n).count())
    }

    pub fn count_upto(&self, n: usize) -> usize {
        match self {
            IndexSet::All => n,
            _ => self.iter().take_while(|&m| m <= n).count(),
        }
    }
}

/// `|{k <= n : k in s}| / n`.
pub fn density_upto(s: &IndexSet, n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Precondition("density_upto needs n >= 1".into()));
    }
    Ok(Rational::new(
        BigInt::from(s.count_upto(n)),
        BigInt::from(n),
    ))
}

/// A geometric ladder of `count` strictly increasing indices ending at
/// `horizon`. Dense (`1..=horizon`) when `count == horizon`.
pub fn checkpoints(horizon: usize, count: usize) -> Result<Vec<usize>> {
    if count == 0 || horizon < count {
        return Err(Error::Precondition(format!(
            "checkpoints needs 1 <= count <= horizon, got count={count}, horizon={horizon}"
        )));
    }
    let h = horizon as f64;
    let mut ladder: Vec<usize> = (1..=count)
        .map(|i| h.powf(i as f64 / count as f64).round() as usize)
        .collect();
    ladder[count - 1] = horizon;
    for i in 0..count {
        let floor = if i == 0 { 1 } else { ladder[i - 1] + 1 };
        ladder[i] = ladder[i].max(floor);
    }
    for i in (0..count - 1).rev() {
        ladder[i] = ladder[i].min(ladder[i + 1] - 1);
    }
    Ok(ladder)
}

/// Running hit counts sampled at checkpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityStats {
    pub horizon: usize,
    pub hits: usize,
    /// `(checkpoint, hits up to checkpoint / checkpoint)`.
    #[serde(with = "crate::rational::text")]
    pub trajectory: Vec<(usize, Rational)>,
}

impl DensityStats {
    /// Builds the stats for the hit positions (1-indexed, ascending) on
    /// `[1, horizon]`, sampling at `ladder`.
    pub fn from_hits(hit_positions: &[usize], horizon: usize, ladder: &[usize]) -> Self {
        let mut trajectory = Vec::with_capacity(ladder.len());
        let mut i = 0;
        for &c in ladder {
            while i < hit_positions.len() && hit_positions[i] <= c {
                i += 1;
            }
            trajectory.push((c, Rational::new(BigInt::from(i), BigInt::from(c))));
        }
        let hits = hit_positions.iter().filter(|&&p| p <= horizon).count();
        DensityStats {
            horizon,
            hits,
            trajectory,
        }
    }

    /// `hits / horizon`.
    pub fn final_density(&self) -> Rational {
        Rational::new(BigInt::from(self.hits), BigInt::from(self.horizon.max(1)))
    }

    /// The complementary stats (`horizon - hits` and `1 - density`).
    pub fn complement(&self) -> Self {
        let one = Rational::from_integer(1.into());
        DensityStats {
            horizon: self.horizon,
            hits: self.horizon - self.hits,
            trajectory: self
                .trajectory
                .iter()
                .map(|(c, d)| (*c, &one - d))
                .collect(),
        }
    }
}

/// Outcome of a finite-horizon check of a limiting criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// True when `values` is non-decreasing.
pub fn non_decreasing<T: PartialOrd>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[0] <= w[1])
}

pub fn non_increasing<T: PartialOrd>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[0] >= w[1])
}
