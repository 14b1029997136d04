// SPDX-License-Identifier: Apache-2.0

//! Effective category: Banach–Mazur games, nowhere-dense witnesses, the
//! Baire escape, rational balls on measure space and exact certificates.

pub mod ball;
pub mod certificate;
pub mod game;
pub mod witness;

pub use ball::{
    bad_depths, bad_gap, bad_gap_certificate, ball_contains, meagre_chain, shrink_against,
    superbad_certificate, superbad_count, BasisBall, MeagreChain, ShrinkStep, MAX_SHRINK_EXPONENT,
    MAX_SUPERBAD_DEPTH,
};
pub use certificate::{digest, CertKind, Certificate, Outcome, Relation};
pub use game::{
    bm_strategy_from_witness, constant_witness_game_runs, play_banach_mazur, ConstantPlayer,
    GameTranscript, RandomPlayer, RunWord, Strategy, WitnessStrategy,
};
pub use witness::{
    append_witness, baire_escape, baire_escape_trace, count_wicked_prefixes, extend_nasty,
    is_wicked, nasty_positions, nwd_witness_weaknv, wicked_prefix_lengths, wickedness,
    WitnessFamily,
};
