// SPDX-License-Identifier: Apache-2.0

//! One function per subcommand, each producing report cases.

use std::collections::BTreeSet;

use num::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use nfl_core::category::{
    baire_escape_trace, bm_strategy_from_witness, constant_witness_game_runs, count_wicked_prefixes,
    meagre_chain, nasty_positions, nwd_witness_weaknv, play_banach_mazur, superbad_certificate, RandomPlayer,
};
use nfl_core::extrapolation::{
    adversarial_pair, check_nv, check_nv_dprime, check_nv_prime, check_weak_nv, coarse_block_double,
    defeat_nv, error_positions, evil_twin, Total, UndefinedOn, VerdictReport,
};
use nfl_core::forecasting_eval::{all_zero, check_nc, check_strong_nc, check_weak_nc, defeat_nc, EvalThresholds};
use nfl_core::rational::{fmt_rational, rat};
use nfl_core::registry::{learner, law, parse_bits, schedule, stream};
use nfl_core::seq_core::checkpoints;
use nfl_core::{BitString, Error, Rational, Result, Verdict};

use crate::config::{Command, CriterionChoice, ExperimentConfig};
use crate::report::{Artifact, Case, RunReport, Table};

const LADDER_POINTS: usize = 20;
/// Largest round count played on the real engine; the realized prefix at
/// least doubles every round.
pub const MAX_ENGINE_ROUNDS: usize = 16;

fn ladder(horizon: usize) -> Vec<usize> {
    checkpoints(horizon, LADDER_POINTS.min(horizon)).expect("1 <= count <= horizon")
}

fn ratio(a: usize, b: usize) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b.max(1)))
}

fn r(x: &Rational) -> String {
    fmt_rational(x)
}

/// Correct-prediction density at the ladder and on both sides of every
/// error, so each drop shows at its exact position.
pub fn correct_density_points(errors: &[usize], horizon: usize) -> Vec<(usize, Rational)> {
    let mut at: BTreeSet<usize> = ladder(horizon).into_iter().collect();
    for &e in errors {
        at.insert(e);
        if e > 1 {
            at.insert(e - 1);
        }
    }
    let mut i = 0;
    at.into_iter()
        .filter(|&k| (1..=horizon).contains(&k))
        .map(|k| {
            while i < errors.len() && errors[i] <= k {
                i += 1;
            }
            (k, ratio(k - i, k))
        })
        .collect()
}

fn case_or_error(key: String, f: impl FnOnce() -> Result<Case>) -> Case {
    f().unwrap_or_else(|e| Case::failed(key, &e))
}

fn verdict_summary(v: &VerdictReport) -> Value {
    json!({
        "learner": v.learner,
        "stream": v.stream,
        "criterion": v.criterion.to_string(),
        "horizon": v.horizon,
        "errors": v.error_count(),
        "undefined": v.undefined_positions.len(),
        "last_error": v.last_error,
        "first_errors": v.error_positions.iter().take(32).collect::<Vec<_>>(),
        "correct_density": r(&v.correct_density),
        "tail": v.tail,
        "r": v.r.as_ref().map(r),
        "tol": v.tol.as_ref().map(r),
        "verdict": v.verdict,
    })
}

fn verdict_case(key: String, v: VerdictReport) -> Case {
    let points = correct_density_points(&v.error_positions, v.horizon);
    Case::new(key, v.verdict, verdict_summary(&v)).with_trajectory("correct-density", points)
}

fn pairs<'a>(a: &'a [String], b: &'a [String]) -> Vec<(&'a String, &'a String)> {
    a.iter().flat_map(|x| b.iter().map(move |y| (x, y))).collect()
}

fn thresholds(cfg: &ExperimentConfig) -> EvalThresholds {
    EvalThresholds {
        density_tol: cfg.rational(&cfg.tol),
        ..EvalThresholds::default()
    }
}

/// Dispatches on the configured command.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let mut tables = vec![];
    let cases = match cfg.command {
        Command::ExtrapolateEval => extrapolate_eval(cfg),
        Command::Duel => {
            let (cases, table) = duel(cfg);
            tables.push(table);
            cases
        }
        Command::Defeat => defeat(cfg),
        Command::AdversaryPair => adversary_pair(cfg),
        Command::Coarse => coarse(cfg),
        Command::ForecastEval => forecast_eval(cfg),
        Command::Merge => merge(cfg),
        Command::DefeatNc => vec![defeat_nc_case(cfg)],
        Command::BmGame => bm_game(cfg)?,
        Command::WitnessCheck => witness_check(cfg),
        Command::MeagreChain => vec![meagre_chain_case(cfg)],
        Command::Escape => escape(cfg),
    };
    Ok(RunReport::new(cfg.clone(), cases, tables))
}

fn extrapolate_eval(cfg: &ExperimentConfig) -> Vec<Case> {
    let r_val = cfg.rational(&cfg.r);
    let tol = cfg.rational(&cfg.tol);
    pairs(&cfg.learners, &cfg.streams)
        .into_par_iter()
        .map(|(l, s)| {
            let key = format!("{l}|{s}");
            case_or_error(key.clone(), || {
                let m = learner(l)?;
                let sigma = stream(s)?;
                let holes = cfg.holes.iter().map(|h| parse_bits(h)).collect::<Result<Vec<_>>>()?;
                let v = match cfg.criterion {
                    CriterionChoice::Nv => check_nv(m.as_ref(), &sigma, cfg.horizon, cfg.tail)?,
                    CriterionChoice::WeakNv => check_weak_nv(m.as_ref(), &sigma, cfg.horizon, &r_val, &tol)?,
                    CriterionChoice::NvPrime | CriterionChoice::NvDprime => {
                        let check = if cfg.criterion == CriterionChoice::NvPrime {
                            check_nv_prime
                        } else {
                            check_nv_dprime
                        };
                        if holes.is_empty() {
                            check(&Total(m), &sigma, cfg.horizon, cfg.tail)?
                        } else {
                            check(&UndefinedOn { base: m, holes }, &sigma, cfg.horizon, cfg.tail)?
                        }
                    }
                    CriterionChoice::Nc | CriterionChoice::WeakNc => unreachable!("rejected at resolve time"),
                };
                Ok(verdict_case(key, v))
            })
        })
        .collect()
}

fn duel(cfg: &ExperimentConfig) -> (Vec<Case>, Table) {
    let cases: Vec<Case> = pairs(&cfg.learners, &cfg.streams)
        .into_par_iter()
        .map(|(l, s)| {
            let key = format!("{l}|{s}");
            case_or_error(key.clone(), || {
                let m = learner(l)?;
                let sigma = stream(s)?;
                let a = error_positions(m.as_ref(), &sigma, cfg.horizon)?;
                let b = error_positions(evil_twin(m).as_ref(), &sigma, cfg.horizon)?;
                let disjoint = {
                    let sa: BTreeSet<_> = a.iter().collect();
                    b.iter().all(|k| !sa.contains(k))
                };
                let sum = a.len() + b.len();
                let verdict = if sum == cfg.horizon && disjoint {
                    Verdict::Consistent
                } else {
                    Verdict::Refuted
                };
                let summary = json!({
                    "learner": l,
                    "stream": s,
                    "horizon": cfg.horizon,
                    "errors": a.len(),
                    "twin_errors": b.len(),
                    "row_sum": sum,
                    "disjoint": disjoint,
                });
                Ok(Case::new(key, verdict, summary))
            })
        })
        .collect();
    let mut rows: Vec<Vec<String>> = cases
        .iter()
        .filter(|c| c.error.is_none())
        .map(|c| {
            let s = &c.summary;
            ["learner", "stream", "errors", "twin_errors", "row_sum", "horizon"]
                .iter()
                .map(|k| match &s[*k] {
                    Value::String(x) => x.clone(),
                    other => other.to_string(),
                })
                .collect()
        })
        .collect();
    rows.sort();
    let table = Table {
        name: "duel".into(),
        header: ["learner", "stream", "errors", "twin_errors", "row_sum", "horizon"]
            .map(String::from)
            .to_vec(),
        rows,
    };
    (cases, table)
}

fn defeat(cfg: &ExperimentConfig) -> Vec<Case> {
    cfg.learners
        .par_iter()
        .map(|l| {
            case_or_error(l.clone(), || {
                let m = learner(l)?;
                let sigma = defeat_nv(m.clone(), cfg.budget)?;
                let prefix = sigma.prefix(cfg.horizon)?;
                let zeros: Vec<usize> = (1..=cfg.horizon).filter(|&k| !prefix.get(k - 1)).collect();
                let errors: BTreeSet<usize> = error_positions(m.as_ref(), &sigma, cfg.horizon)?.into_iter().collect();
                let zeros_are_errors = zeros.iter().all(|k| errors.contains(k));
                let spread = zeros
                    .iter()
                    .enumerate()
                    .all(|(j, &p)| j + 1 >= usize::BITS as usize || p > 1usize << (j + 1));
                let verdict = if zeros_are_errors && spread {
                    Verdict::Consistent
                } else {
                    Verdict::Refuted
                };
                let points = correct_density_points(&errors.iter().copied().collect::<Vec<_>>(), cfg.horizon);
                let summary = json!({
                    "learner": l,
                    "stream": sigma.name(),
                    "horizon": cfg.horizon,
                    "zero_positions": zeros,
                    "errors": errors.len(),
                    "zeros_are_errors": zeros_are_errors,
                    "zeros_beyond_powers_of_two": spread,
                });
                Ok(Case::new(l.clone(), verdict, summary).with_trajectory("correct-density", points))
            })
        })
        .collect()
}

fn adversary_pair(cfg: &ExperimentConfig) -> Vec<Case> {
    let r_val = cfg.rational(&cfg.r);
    let tol = cfg.rational(&cfg.tol);
    cfg.learners
        .par_iter()
        .flat_map(|l| {
            let run = || -> Result<Vec<Case>> {
                let m = learner(l)?;
                let w = parse_bits(&cfg.prefix)?;
                let (star, dagger) = adversarial_pair(m.clone(), &w, &stream(&cfg.spice)?, &schedule(&cfg.spikes)?)?;
                let a = check_weak_nv(m.as_ref(), &star, cfg.horizon, &r_val, &tol)?;
                let b = check_weak_nv(m.as_ref(), &dagger, cfg.horizon, &r_val, &tol)?;
                Ok(vec![verdict_case(format!("{l}|star"), a), verdict_case(format!("{l}|dagger"), b)])
            };
            run().unwrap_or_else(|e| vec![Case::failed(format!("{l}|pair"), &e)])
        })
        .collect()
}

fn coarse(cfg: &ExperimentConfig) -> Vec<Case> {
    pairs(&cfg.learners, &cfg.streams)
        .into_par_iter()
        .map(|(l, s)| {
            let key = format!("{l}|coarse({s})");
            case_or_error(key.clone(), || {
                let m = learner(l)?;
                let sigma = coarse_block_double(&stream(s)?);
                Ok(verdict_case(key, check_nv(m.as_ref(), &sigma, cfg.horizon, cfg.tail)?))
            })
        })
        .collect()
}

fn forecast_eval(cfg: &ExperimentConfig) -> Vec<Case> {
    let eps = cfg.rational(&cfg.epsilon);
    let r_val = cfg.rational(&cfg.r);
    let thr = thresholds(cfg);
    let lad = ladder(cfg.horizon);
    cfg.sources
        .iter()
        .map(|s| {
            let key = format!("{}|{s}", cfg.forecaster);
            case_or_error(key.clone(), || {
                let mu = law(&cfg.forecaster)?;
                let lambda = law(s)?;
                let rep = match cfg.criterion {
                    CriterionChoice::Nc => check_nc(&mu, &lambda, &cfg.seeds, cfg.horizon, &eps, cfg.tail, &thr)?,
                    _ => check_weak_nc(&mu, &lambda, &cfg.seeds, cfg.horizon, &eps, &r_val, &thr)?,
                };
                let per_seed: Vec<Value> = rep
                    .per_seed
                    .iter()
                    .map(|t| {
                        json!({
                            "seed": t.seed,
                            "final_gap": r(t.final_gap()),
                            "good_set_density": r(&t.good_set_density),
                            "verdict": t.verdict,
                        })
                    })
                    .collect();
                let below = rep.per_seed.iter().filter(|t| *t.final_gap() < eps).count();
                let summary = json!({
                    "criterion": rep.criterion,
                    "forecaster": rep.forecaster,
                    "source": rep.source,
                    "horizon": rep.horizon,
                    "epsilon": r(&rep.epsilon),
                    "tail": rep.tail,
                    "r": rep.r.as_ref().map(r),
                    "seeds_with_final_gap_below_epsilon": below,
                    "per_seed": per_seed,
                    "verdict": rep.verdict,
                });
                let mut case = Case::new(key, rep.verdict, summary);
                for t in &rep.per_seed {
                    let seed = t.seed.expect("sampled paths carry their seed");
                    case = case.with_trajectory(format!("gap-seed{seed}"), t.sampled(&lad));
                }
                Ok(case)
            })
        })
        .collect()
}

fn merge(cfg: &ExperimentConfig) -> Vec<Case> {
    let eps = cfg.rational(&cfg.epsilon);
    let thr = thresholds(cfg);
    cfg.sources
        .iter()
        .map(|s| {
            let key = format!("{}|{s}", cfg.forecaster);
            case_or_error(key.clone(), || {
                let mu = law(&cfg.forecaster)?;
                let lambda = law(s)?;
                let rep = check_strong_nc(&mu, &lambda, &cfg.seeds, cfg.horizon, cfg.depth, &eps, cfg.tail, &thr)?;
                let per_seed: Vec<Value> = rep
                    .per_seed
                    .iter()
                    .map(|m| {
                        json!({
                            "seed": m.seed,
                            "all_zero": all_zero(&m.trajectory),
                            "final": m.trajectory.last().map(|(_, v)| r(v)),
                            "verdict": m.verdict,
                        })
                    })
                    .collect();
                let summary = json!({
                    "forecaster": rep.forecaster,
                    "source": rep.source,
                    "horizon": rep.horizon,
                    "depth": rep.depth,
                    "epsilon": r(&rep.epsilon),
                    "tail": rep.tail,
                    "caveat": rep.caveat,
                    "per_seed": per_seed,
                    "verdict": rep.verdict,
                });
                let mut case = Case::new(key, rep.verdict, summary);
                for m in rep.per_seed {
                    case = case.with_trajectory(format!("merge-seed{}", m.seed), m.trajectory);
                }
                Ok(case)
            })
        })
        .collect()
}

fn defeat_nc_case(cfg: &ExperimentConfig) -> Case {
    let key = cfg.forecaster.clone();
    case_or_error(key.clone(), || {
        let nu = law(&cfg.forecaster)?;
        let sigma = defeat_nc(nu.clone(), cfg.budget)?;
        let prefix = sigma.prefix(cfg.horizon)?;
        let zeros: Vec<usize> = (1..=cfg.horizon).filter(|&k| !prefix.get(k - 1)).collect();
        let mut gaps = Vec::with_capacity(zeros.len());
        for &k in &zeros {
            // the point mass puts conditional 0 on a 1 here
            gaps.push((k, nu.conditional(&prefix.prefix(k - 1))?));
        }
        let floor = rat(9, 10);
        let all_wide = gaps.iter().all(|(_, g)| *g >= floor);
        let min_gap = gaps.iter().map(|(_, g)| g.clone()).min();
        let summary = json!({
            "forecaster": nu.describe(),
            "stream": sigma.name(),
            "horizon": cfg.horizon,
            "zero_positions": zeros,
            "zero_density": r(&ratio(zeros.len(), cfg.horizon)),
            "min_gap_at_zeros": min_gap.as_ref().map(r),
            "all_gaps_at_least_9/10": all_wide,
        });
        let verdict = if all_wide { Verdict::Consistent } else { Verdict::Refuted };
        Ok(Case::new(key, verdict, summary).with_trajectory("gap-at-zeros", gaps))
    })
}

fn constant_guess(name: &str) -> Option<bool> {
    match name {
        "always-0" => Some(false),
        "always-1" => Some(true),
        _ => None,
    }
}

fn bm_game(cfg: &ExperimentConfig) -> Result<Vec<Case>> {
    if cfg.rounds == 0 {
        return Err(Error::Precondition("rounds must be >= 1".into()));
    }
    for l in &cfg.learners {
        if constant_guess(l).is_none() && cfg.rounds > MAX_ENGINE_ROUNDS {
            return Err(Error::Precondition(format!(
                "{l}: at most {MAX_ENGINE_ROUNDS} rounds for non-constant learners, got {}",
                cfg.rounds
            )));
        }
    }
    Ok(pairs(&cfg.learners, &cfg.seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>())
        .into_par_iter()
        .map(|(l, seed)| {
            let key = format!("{l}|seed{seed:0>6}");
            case_or_error(key.clone(), || {
                let one = RandomPlayer {
                    seed: seed.parse().expect("formatted above"),
                    max_len: cfg.max_move,
                };
                // per round: (realized length, wicked prefixes, nasty bits)
                let per_round: Vec<(u64, u64, u64)> = match constant_guess(l) {
                    Some(guess) => constant_witness_game_runs(guess, &one, cfg.rounds)
                        .iter()
                        .map(|w| (w.len(), w.wicked_prefixes_against_constant(guess), w.count_of(!guess)))
                        .collect(),
                    None => {
                        let m = learner(l)?;
                        let two = bm_strategy_from_witness(nwd_witness_weaknv(m.clone()));
                        let t = play_banach_mazur(&one, &two, cfg.rounds)?;
                        t.round_prefixes()
                            .iter()
                            .map(|u| {
                                Ok((
                                    u.len() as u64,
                                    count_wicked_prefixes(m.as_ref(), u)? as u64,
                                    nasty_positions(m.as_ref(), u)?.len() as u64,
                                ))
                            })
                            .collect::<Result<_>>()?
                    }
                };
                let (len, wicked, nasty) = *per_round.last().expect("rounds >= 1");
                let rounds = cfg.rounds as u64;
                let verdict = if wicked >= rounds && 4 * nasty >= len {
                    Verdict::Consistent
                } else {
                    Verdict::Refuted
                };
                let summary = json!({
                    "learner": l,
                    "player_one": format!("random({seed},{})", cfg.max_move),
                    "rounds": cfg.rounds,
                    "model": if constant_guess(l).is_some() { "run-length" } else { "engine" },
                    "realized_length": len,
                    "wicked_prefixes": wicked,
                    "nasty_bits": nasty,
                });
                let points = per_round
                    .iter()
                    .enumerate()
                    .map(|(k, &(_, w, _))| (k + 1, Rational::from_integer(BigInt::from(w))))
                    .collect();
                Ok(Case::new(key, verdict, summary).with_trajectory("wicked-per-round", points))
            })
        })
        .collect())
}

/// Draws `(n, w, tail)` triples from seeded game moves and checks that
/// `F(n, w)` extends `w`, carries at least `n` wicked prefixes, and keeps
/// them under any extension.
fn witness_check(cfg: &ExperimentConfig) -> Vec<Case> {
    cfg.learners
        .par_iter()
        .map(|l| {
            case_or_error(l.clone(), || {
                let m = learner(l)?;
                let f = nwd_witness_weaknv(m.clone());
                let mut failures = vec![];
                for i in 0..cfg.cases {
                    let draw = RandomPlayer {
                        seed: i as u64,
                        max_len: 10,
                    };
                    let w = if i == 0 { BitString::new() } else { draw.move_for_round(1) };
                    let tail = RandomPlayer { max_len: 30, ..draw }.move_for_round(2);
                    let n = i % 6;
                    let v = f.apply(n, &w)?;
                    let base = count_wicked_prefixes(m.as_ref(), &v)?;
                    let extended = count_wicked_prefixes(m.as_ref(), &v.concat(&tail))?;
                    if !(w.is_prefix_of(&v) && v.len() > w.len() && base >= n && extended >= base) {
                        failures.push(json!({"n": n, "w": w.to_string(), "tail": tail.to_string()}));
                    }
                }
                let verdict = if failures.is_empty() {
                    Verdict::Consistent
                } else {
                    Verdict::Refuted
                };
                let summary = json!({
                    "learner": l,
                    "witness": f.name(),
                    "cases": cfg.cases,
                    "failures": failures,
                });
                Ok(Case::new(l.clone(), verdict, summary))
            })
        })
        .collect()
}

fn meagre_chain_case(cfg: &ExperimentConfig) -> Case {
    let key = cfg.law.clone();
    case_or_error(key.clone(), || {
        let mu = law(&cfg.law)?;
        let w0 = cfg.basis_ball()?;
        let chain = meagre_chain(mu.as_ref(), &w0, cfg.t)?;
        chain.replay()?;
        let last = chain.last();
        let (superbad, sb_cert) = superbad_certificate(mu.as_ref(), &last.center_law()?, cfg.k_max)?;
        let mut artifacts = vec![Artifact::new("balls/ball-00.ball", w0.to_text())];
        let mut bundle = String::new();
        let mut steps = vec![];
        for (k, s) in chain.steps.iter().enumerate() {
            let k = k + 1;
            artifacts.push(Artifact::new(format!("balls/ball-{k:02}.ball"), s.ball.to_text()));
            for (what, cert) in [("containment", &s.containment), ("bad-gap", &s.bad_gap)] {
                let text = cert.to_text();
                bundle.push_str(&text);
                artifacts.push(Artifact::new(format!("certificates/step-{k:02}-{what}.cert"), text));
            }
            steps.push(json!({
                "step": k,
                "depth": s.ball.depth(),
                "radius": r(s.ball.radius()),
                "exponent": s.exponent,
            }));
        }
        artifacts.push(Artifact::new("certificates/superbad.cert", sb_cert.to_text()));
        bundle.push_str(&sb_cert.to_text());
        artifacts.push(Artifact::new("certificates/bundle.cert", bundle));
        let summary = json!({
            "law": mu.describe(),
            "steps": steps,
            "certificates": 2 * chain.steps.len() + 1,
            "superbad_k_max": cfg.k_max,
            "superbad_count": superbad,
            "replayed": true,
        });
        let mut case = Case::new(key, Verdict::Consistent, summary);
        case.artifacts = artifacts;
        let radii = chain
            .balls()
            .iter()
            .enumerate()
            .map(|(k, b)| (k, b.radius().clone()))
            .collect();
        Ok(case.with_trajectory("radius", radii))
    })
}

fn escape(cfg: &ExperimentConfig) -> Vec<Case> {
    cfg.learners
        .par_iter()
        .map(|l| {
            case_or_error(l.clone(), || {
                let m = learner(l)?;
                let f = nwd_witness_weaknv(m.clone());
                let w = parse_bits(&cfg.prefix)?;
                let trace = baire_escape_trace(&f, &w, cfg.steps)?;
                let out = trace.last().expect("steps >= 1");
                let mut escapes = true;
                for (k, wk) in trace.iter().take(cfg.steps).enumerate() {
                    escapes &= f.apply(k, wk)?.is_prefix_of(out);
                }
                let wicked = count_wicked_prefixes(m.as_ref(), out)?;
                let verdict = if escapes && wicked >= cfg.steps {
                    Verdict::Consistent
                } else {
                    Verdict::Refuted
                };
                let summary = json!({
                    "learner": l,
                    "start": if w.is_empty() { "e".to_string() } else { w.to_string() },
                    "steps": cfg.steps,
                    "lengths": trace.iter().map(|t| t.len()).collect::<Vec<_>>(),
                    "wicked_prefixes": wicked,
                    "inside_every_cylinder": escapes,
                    "result": if out.len() <= 4096 { Some(out.to_string()) } else { None },
                });
                let points = trace
                    .iter()
                    .enumerate()
                    .map(|(k, t)| (k, ratio(count_wicked_prefixes(m.as_ref(), t).unwrap_or(0), 1)))
                    .collect();
                Ok(Case::new(l.clone(), verdict, summary).with_trajectory("wicked-per-step", points))
            })
        })
        .collect()
}
