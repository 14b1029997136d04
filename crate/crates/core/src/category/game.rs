// SPDX-License-Identifier: Apache-2.0

//! Banach–Mazur games on Cantor space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::witness::WitnessFamily;
use crate::error::{Error, Result};
use crate::seq_core::BitString;

/// Moves alternate Player I, Player II, starting with Player I.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GameTranscript {
    pub moves: Vec<BitString>,
    pub realized_prefix: BitString,
}

impl GameTranscript {
    /// Number of completed rounds.
    pub fn rounds(&self) -> usize {
        self.moves.len() / 2
    }

    /// Realized prefix at the end of each round.
    pub fn round_prefixes(&self) -> Vec<BitString> {
        let mut acc = BitString::new();
        let mut out = vec![];
        for (i, m) in self.moves.iter().enumerate() {
            acc.append(m);
            if i % 2 == 1 {
                out.push(acc.clone());
            }
        }
        out
    }
}

/// A player: a map from (round, transcript so far) to a non-empty move.
/// Rounds are numbered from 1.
pub trait Strategy: Send + Sync {
    fn name(&self) -> String;
    fn play(&self, round: usize, so_far: &GameTranscript) -> Result<BitString>;
}

/// Always plays the same string.
#[derive(Debug, Clone)]
pub struct ConstantPlayer(pub BitString);

impl Strategy for ConstantPlayer {
    fn name(&self) -> String {
        format!("constant({})", self.0)
    }

    fn play(&self, _round: usize, _so_far: &GameTranscript) -> Result<BitString> {
        Ok(self.0.clone())
    }
}

/// Plays a seeded random string of length `1..=max_len`; the move depends
/// only on the seed and the round.
#[derive(Debug, Clone, Copy)]
pub struct RandomPlayer {
    pub seed: u64,
    pub max_len: usize,
}

impl RandomPlayer {
    pub fn move_for_round(&self, round: usize) -> BitString {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (round as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let len = rng.random_range(1..=self.max_len.max(1));
        BitString::from_bits((0..len).map(|_| rng.random::<bool>()))
    }
}

impl Strategy for RandomPlayer {
    fn name(&self) -> String {
        format!("random({},{})", self.seed, self.max_len)
    }

    fn play(&self, round: usize, _so_far: &GameTranscript) -> Result<BitString> {
        Ok(self.move_for_round(round))
    }
}

/// Player II answering the suffix `s` with `u.s = F(k, u)` on round `k`.
#[derive(Debug, Clone)]
pub struct WitnessStrategy {
    family: WitnessFamily,
}

impl Strategy for WitnessStrategy {
    fn name(&self) -> String {
        format!("witness({})", self.family.name())
    }

    fn play(&self, round: usize, so_far: &GameTranscript) -> Result<BitString> {
        let u = &so_far.realized_prefix;
        let v = self.family.apply(round, u)?;
        Ok(v.suffix_from(u.len()))
    }
}

pub fn bm_strategy_from_witness(family: WitnessFamily) -> WitnessStrategy {
    WitnessStrategy { family }
}

pub fn play_banach_mazur(
    player_one: &dyn Strategy,
    player_two: &dyn Strategy,
    rounds: usize,
) -> Result<GameTranscript> {
    if rounds == 0 {
        return Err(Error::Precondition("a game needs rounds >= 1".into()));
    }
    let mut t = GameTranscript::default();
    for round in 1..=rounds {
        for (label, p) in [("I", player_one), ("II", player_two)] {
            let mv = p.play(round, &t)?;
            if mv.is_empty() {
                return Err(Error::RuleViolation {
                    player: format!("{label} ({})", p.name()),
                    round,
                });
            }
            t.realized_prefix.append(&mv);
            t.moves.push(mv);
        }
    }
    Ok(t)
}

/// A binary word stored as maximal runs `(bit, length)`. Used to follow
/// games whose realized prefixes are too long to materialize.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunWord {
    pub runs: Vec<(bool, u64)>,
}

impl RunWord {
    pub fn len(&self) -> u64 {
        self.runs.iter().map(|r| r.1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn push_run(&mut self, bit: bool, count: u64) {
        if count == 0 {
            return;
        }
        match self.runs.last_mut() {
            Some((b, c)) if *b == bit => *c += count,
            _ => self.runs.push((bit, count)),
        }
    }

    pub fn push_bits(&mut self, w: &BitString) {
        for b in w.iter() {
            self.push_run(b, 1);
        }
    }

    pub fn from_bits(w: &BitString) -> Self {
        let mut r = RunWord::default();
        r.push_bits(w);
        r
    }

    pub fn count_of(&self, bit: bool) -> u64 {
        self.runs.iter().filter(|r| r.0 == bit).map(|r| r.1).sum()
    }

    /// Wicked prefixes against the constant extrapolator guessing `guess`:
    /// the nasty bits are exactly the bits `!guess`.
    pub fn wicked_prefixes_against_constant(&self, guess: bool) -> u64 {
        let (mut len, mut nasty) = (0i128, 0i128);
        let mut total = 0i128;
        for &(b, c) in &self.runs {
            let c = c as i128;
            if b != guess {
                // prefix len+i is wicked iff 2(nasty+i) >= len+i, i.e. i >= len - 2 nasty
                let first = (len - 2 * nasty).max(1);
                total += (c - first + 1).max(0);
                nasty += c;
            } else {
                // wicked iff 2 nasty >= len+i
                total += (2 * nasty - len).clamp(0, c);
            }
            len += c;
        }
        total as u64
    }
}

/// The game of [`WitnessStrategy`] over `nwd_witness_weaknv(Constant(guess))`
/// against a [`RandomPlayer`], tracked as runs. Each Player II move is
/// `|u| + k` copies of `!guess` (one copy when `u` is empty). Returns the
/// realized prefix after every round.
pub fn constant_witness_game_runs(guess: bool, player_one: &RandomPlayer, rounds: usize) -> Vec<RunWord> {
    let mut w = RunWord::default();
    let mut out = Vec::with_capacity(rounds);
    for k in 1..=rounds {
        w.push_bits(&player_one.move_for_round(k));
        let lead = w.len().max(1);
        w.push_run(!guess, lead + k as u64);
        out.push(w.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::category::witness::{append_witness, count_wicked_prefixes, nwd_witness_weaknv};
    use crate::extrapolation::Constant;
    use crate::seq_core::bits;

    #[test]
    fn constant_players() {
        let one = ConstantPlayer(bits("1"));
        let t = play_banach_mazur(&one, &one, 3).unwrap();
        assert_eq!(t.realized_prefix, bits("111111"));
        assert_eq!(t.moves.len(), 6);
    }

    #[test]
    fn empty_move_is_a_violation() {
        let empty = ConstantPlayer(BitString::new());
        let one = ConstantPlayer(bits("1"));
        let e = play_banach_mazur(&one, &empty, 2).unwrap_err();
        assert!(matches!(e, Error::RuleViolation { round: 1, ref player } if player.starts_with("II")));
    }

    #[test]
    fn append_witness_answers_zero() {
        let two = bm_strategy_from_witness(append_witness(false));
        let one = ConstantPlayer(bits("1"));
        let t = play_banach_mazur(&one, &two, 3).unwrap();
        assert_eq!(t.realized_prefix, bits("101010"));
    }

    #[test]
    fn prefix_lies_in_witness_cylinder_each_round() {
        let f = nwd_witness_weaknv(Arc::new(Constant(true)));
        let two = bm_strategy_from_witness(f.clone());
        let one = ConstantPlayer(bits("0"));
        let t = play_banach_mazur(&one, &two, 5).unwrap();
        let mut u = BitString::new();
        for k in 1..=5 {
            u.append(&t.moves[2 * k - 2]);
            let target = f.apply(k, &u).unwrap();
            u.append(&t.moves[2 * k - 1]);
            assert_eq!(u, target);
        }
    }

    #[test]
    fn random_player_is_deterministic() {
        let p = RandomPlayer { seed: 7, max_len: 5 };
        for k in 1..20 {
            let a = p.move_for_round(k);
            assert_eq!(a, p.move_for_round(k));
            assert!((1..=5).contains(&a.len()));
        }
    }

    #[test]
    fn run_model_matches_the_engine() {
        let m = Arc::new(Constant(true));
        let two = bm_strategy_from_witness(nwd_witness_weaknv(m.clone()));
        for seed in 0..4 {
            let one = RandomPlayer { seed, max_len: 6 };
            let t = play_banach_mazur(&one, &two, 10).unwrap();
            let runs = constant_witness_game_runs(true, &one, 10);
            for (prefix, r) in t.round_prefixes().iter().zip(&runs) {
                assert_eq!(&RunWord::from_bits(prefix), r);
                assert_eq!(
                    count_wicked_prefixes(m.as_ref(), prefix).unwrap() as u64,
                    r.wicked_prefixes_against_constant(true)
                );
            }
        }
    }
}
