// SPDX-License-Identifier: Apache-2.0

use num::{One, Signed, Zero};
use proptest::prelude::*;

use nfl_core::category::{
    bad_gap_certificate, ball_contains, bm_strategy_from_witness, count_wicked_prefixes,
    meagre_chain, nwd_witness_weaknv, play_banach_mazur, BasisBall, Certificate, RandomPlayer,
};
use nfl_core::extrapolation::{error_positions, evil_twin, guess_sequence};
use nfl_core::forecasting_eval::merge_depth;
use nfl_core::measures::{bernoulli, evil_forecaster, mixture_approx, Law};
use nfl_core::rational::{fmt_rational, parse_rational, rat, Rational};
use nfl_core::registry::{standard_learners, standard_laws};
use nfl_core::seq_core::{checkpoints, density_upto, stream_from_string, DensityStats};
use nfl_core::{BitStream, BitString, IndexSet};

fn bitstring(max: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 0..=max).prop_map(BitString::from_bits)
}

fn nonempty_bitstring(max: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 1..=max).prop_map(BitString::from_bits)
}

fn learner_index() -> impl Strategy<Value = usize> {
    0..standard_learners().len()
}

fn law_index() -> impl Strategy<Value = usize> {
    0..standard_laws().len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evil_twin_errors_complement(i in learner_index(), w in nonempty_bitstring(200)) {
        let m = standard_learners()[i].clone();
        let sigma = stream_from_string(&w, &BitStream::alternating());
        let h = w.len() + 50;
        let a = error_positions(m.as_ref(), &sigma, h).unwrap();
        let b = error_positions(evil_twin(m).as_ref(), &sigma, h).unwrap();
        let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (1..=h).collect::<Vec<_>>());
    }

    #[test]
    fn guessed_sequences_are_learned(i in learner_index(), w in bitstring(8)) {
        let m = standard_learners()[i].clone();
        let sigma = guess_sequence(m.clone(), &w);
        let errs = error_positions(m.as_ref(), &sigma, 300).unwrap();
        prop_assert!(errs.iter().all(|&k| k <= w.len()));
    }

    #[test]
    fn weights_are_additive_and_normalized(i in law_index(), w in bitstring(10)) {
        let l = standard_laws()[i].clone();
        prop_assert!(l.weight(&BitString::new()).unwrap().is_one());
        let total = l.weight(&w.with_pushed(false)).unwrap() + l.weight(&w.with_pushed(true)).unwrap();
        prop_assert_eq!(total, l.weight(&w).unwrap());
    }

    #[test]
    fn evil_forecaster_gap(i in law_index(), w in bitstring(24)) {
        let l = standard_laws()[i].clone();
        let evil = evil_forecaster(l.clone()).unwrap();
        let g = (l.p1(&w).unwrap() - evil.p1(&w).unwrap()).abs();
        prop_assert!(g >= rat(2, 5));
    }

    #[test]
    fn merge_depth_is_monotone(i in law_index(), j in law_index(), w in bitstring(8)) {
        let (a, b) = (standard_laws()[i].clone(), standard_laws()[j].clone());
        let mut prev = Rational::zero();
        for d in 0..=5 {
            let v = merge_depth(a.as_ref(), b.as_ref(), &w, d).unwrap();
            prop_assert!(v >= prev);
            prop_assert!(v <= Rational::one());
            if d == 1 {
                let direct = (a.conditional(&w).unwrap() - b.conditional(&w).unwrap()).abs();
                prop_assert_eq!(&v, &direct);
            }
            prev = v;
        }
    }

    #[test]
    fn checkpoint_ladders(h in 1usize..100_000, count in 1usize..40) {
        let count = count.min(h);
        let c = checkpoints(h, count).unwrap();
        prop_assert_eq!(c.len(), count);
        prop_assert_eq!(*c.last().unwrap(), h);
        prop_assert!(c.windows(2).all(|p| p[0] < p[1]));
        prop_assert!(c[0] >= 1);
    }

    #[test]
    fn density_stats_complement(hits in prop::collection::btree_set(1usize..500, 0..60)) {
        let hits: Vec<usize> = hits.into_iter().collect();
        let ladder = checkpoints(500, 8).unwrap();
        let d = DensityStats::from_hits(&hits, 500, &ladder);
        let c = d.complement();
        prop_assert_eq!(d.final_density() + c.final_density(), Rational::one());
        let s = IndexSet::finite(hits.clone());
        prop_assert_eq!(density_upto(&s, 500).unwrap(), d.final_density());
    }

    #[test]
    fn rationals_round_trip(n in -10_000i64..10_000, dd in 1i64..10_000) {
        let r = rat(n, dd);
        prop_assert_eq!(parse_rational(&fmt_rational(&r)).unwrap(), r);
    }

    #[test]
    fn witness_soundness(i in learner_index(), w in bitstring(10), n in 0usize..=5, tail in bitstring(30)) {
        let m = standard_learners()[i].clone();
        let f = nwd_witness_weaknv(m.clone());
        let v = f.apply(n, &w).unwrap();
        prop_assert!(w.is_prefix_of(&v) && v.len() > w.len());
        let base = count_wicked_prefixes(m.as_ref(), &v).unwrap();
        prop_assert!(base >= n);
        let ext = v.concat(&tail);
        prop_assert!(count_wicked_prefixes(m.as_ref(), &ext).unwrap() >= base);
    }

    #[test]
    fn witness_strategy_keeps_prefix_in_cylinders(i in learner_index(), seed in any::<u64>(), rounds in 1usize..=5) {
        let m = standard_learners()[i].clone();
        let f = nwd_witness_weaknv(m);
        let two = bm_strategy_from_witness(f.clone());
        let one = RandomPlayer { seed, max_len: 4 };
        let t = play_banach_mazur(&one, &two, rounds).unwrap();
        prop_assert_eq!(t.moves.len(), 2 * rounds);
        let mut u = BitString::new();
        for k in 1..=rounds {
            u.append(&t.moves[2 * k - 2]);
            let target = f.apply(k, &u).unwrap();
            u.append(&t.moves[2 * k - 1]);
            prop_assert_eq!(&u, &target);
        }
        prop_assert_eq!(u, t.realized_prefix);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn chains_nest_and_certificates_replay(num in 1i64..20, t in 1usize..=3) {
        let mu: Law = bernoulli(rat(num, 20)).unwrap();
        let chain = meagre_chain(mu.as_ref(), &BasisBall::depth_one_full(), t).unwrap();
        let balls = chain.balls();
        for (k, s) in chain.steps.iter().enumerate() {
            s.containment.replay().unwrap();
            s.bad_gap.replay().unwrap();
            prop_assert!(ball_contains(balls[k], &s.ball).unwrap().is_certified());
            prop_assert_eq!(Certificate::from_text(&s.bad_gap.to_text()).unwrap(), s.bad_gap.clone());
            // depth-1 bridge: the certified gap shows up as depth-1 total variation
            let center = s.ball.center_law().unwrap();
            for w in BitString::all_of_length(s.ball.depth() - 1) {
                prop_assert!(merge_depth(mu.as_ref(), &center, &w, 1).unwrap() >= rat(1, 5));
            }
        }
        prop_assert_eq!(balls.len(), t + 1);
    }

    #[test]
    fn mixture_approximation_is_certified(w in bitstring(8), n in 1u32..16) {
        let laws = standard_laws();
        let base = laws[3].clone();
        let family = |k: usize| laws[k % laws.len()].clone();
        let a = mixture_approx(base.as_ref(), family, &w, n).unwrap();
        let b = mixture_approx(base.as_ref(), family, &w, n + 3).unwrap();
        prop_assert!(a.overlaps(&b));
    }

    #[test]
    fn bad_gap_needs_small_radius(num in 1i64..20) {
        let mu: Law = bernoulli(rat(num, 20)).unwrap();
        let step = nfl_core::category::shrink_against(mu.as_ref(), &BasisBall::depth_one_full()).unwrap();
        let wide = BasisBall::new(2, step.ball.center().to_vec(), rat(1, 2)).unwrap();
        prop_assert!(!bad_gap_certificate(mu.as_ref(), &wide).unwrap().is_certified());
    }
}
