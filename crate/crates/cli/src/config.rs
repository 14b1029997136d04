// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration: TOML file, flag overrides, fully resolved form.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use nfl_core::category::BasisBall;
use nfl_core::rational::{fmt_rational, parse_rational};
use nfl_core::registry::{self, STANDARD_STREAMS};
use nfl_core::{Error, Rational, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ExtrapolateEval,
    Duel,
    Defeat,
    AdversaryPair,
    Coarse,
    ForecastEval,
    Merge,
    DefeatNc,
    BmGame,
    WitnessCheck,
    MeagreChain,
    Escape,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_possible_value().expect("no skipped variants");
        f.write_str(v.get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionChoice {
    Nv,
    WeakNv,
    NvPrime,
    NvDprime,
    Nc,
    WeakNc,
}

impl CriterionChoice {
    fn for_extrapolators(self) -> bool {
        matches!(self, Self::Nv | Self::WeakNv | Self::NvPrime | Self::NvDprime)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Range(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallConfig {
    pub depth: usize,
    pub radius: String,
    /// Cell masses in big-endian order of the depth-`depth` strings.
    pub center: Vec<String>,
}

/// What a config file may contain; every field optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<Command>,
    pub learners: Option<Vec<String>>,
    pub streams: Option<Vec<String>>,
    pub forecaster: Option<String>,
    pub sources: Option<Vec<String>>,
    pub law: Option<String>,
    pub holes: Option<Vec<String>>,
    pub horizon: Option<usize>,
    pub seeds: Option<Seeds>,
    pub tail: Option<usize>,
    pub depth: Option<usize>,
    pub budget: Option<usize>,
    pub epsilon: Option<String>,
    pub r: Option<String>,
    pub tol: Option<String>,
    pub criterion: Option<CriterionChoice>,
    pub prefix: Option<String>,
    pub spice: Option<String>,
    pub spikes: Option<String>,
    pub rounds: Option<usize>,
    pub max_move: Option<usize>,
    pub steps: Option<usize>,
    pub t: Option<usize>,
    pub k_max: Option<usize>,
    pub cases: Option<usize>,
    pub ball: Option<BallConfig>,
    pub expect: Option<Verdict>,
    pub out: Option<PathBuf>,
}

/// Command-line overrides. List flags replace the whole list.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Learner reference (repeatable).
    #[arg(long = "learner")]
    pub learners: Vec<String>,
    /// Stream reference (repeatable).
    #[arg(long = "stream")]
    pub streams: Vec<String>,
    #[arg(long)]
    pub forecaster: Option<String>,
    /// Source law reference (repeatable).
    #[arg(long = "source")]
    pub sources: Vec<String>,
    #[arg(long)]
    pub law: Option<String>,
    /// Input string on which a partial learner is undefined (repeatable).
    #[arg(long = "hole")]
    pub holes: Vec<String>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// `a..b` or a comma list.
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub tail: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long, value_enum)]
    pub criterion: Option<CriterionChoice>,
    #[arg(long)]
    pub prefix: Option<String>,
    #[arg(long)]
    pub spice: Option<String>,
    #[arg(long)]
    pub spikes: Option<String>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub max_move: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub cases: Option<usize>,
    /// Verdict every case is asserted to reach.
    #[arg(long, value_parser = parse_verdict)]
    pub expect: Option<Verdict>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_verdict(s: &str) -> Result<Verdict, String> {
    match s {
        "consistent" => Ok(Verdict::Consistent),
        "refuted" => Ok(Verdict::Refuted),
        "inconclusive" => Ok(Verdict::Inconclusive),
        _ => Err(format!("unknown verdict {s:?}")),
    }
}

/// The resolved configuration; embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub learners: Vec<String>,
    pub streams: Vec<String>,
    pub forecaster: String,
    pub sources: Vec<String>,
    pub law: String,
    pub holes: Vec<String>,
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub tail: usize,
    pub depth: usize,
    pub budget: usize,
    pub epsilon: String,
    pub r: String,
    pub tol: String,
    pub criterion: CriterionChoice,
    pub prefix: String,
    pub spice: String,
    pub spikes: String,
    pub rounds: usize,
    pub max_move: usize,
    pub steps: usize,
    pub t: usize,
    pub k_max: usize,
    pub cases: usize,
    pub ball: BallConfig,
    pub expect: Option<Verdict>,
    #[serde(skip)]
    pub out: PathBuf,
}

pub fn parse_seeds(s: &str) -> Result<Vec<u64>, Error> {
    let bad = || Error::Parse(format!("seeds {s:?}: expected `a..b` or a comma list"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..b).collect());
    }
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse().map_err(|_| bad()))
        .collect()
}

fn canonical_rational(field: &str, s: &str) -> Result<String, Error> {
    parse_rational(s)
        .map(|r| fmt_rational(&r))
        .map_err(|e| Error::Parse(format!("{field}: {e}")))
}

fn pick_list(flag: Vec<String>, file: Option<Vec<String>>, default: &[&str]) -> Vec<String> {
    if !flag.is_empty() {
        flag
    } else {
        file.unwrap_or_else(|| default.iter().map(|s| s.to_string()).collect())
    }
}

pub fn load_file(path: &Path) -> Result<FileConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

impl ExperimentConfig {
    /// Merges flags over the file over built-in defaults, then checks that
    /// every reference and rational resolves.
    pub fn resolve(command: Option<Command>, file: FileConfig, o: Overrides) -> Result<Self, Error> {
        let command = command
            .or(file.command)
            .ok_or_else(|| Error::Parse("no command given (positional or `command` in the config)".into()))?;
        let horizon = o.horizon.or(file.horizon).unwrap_or(1000);
        let seeds = match (o.seeds, file.seeds) {
            (Some(s), _) => parse_seeds(&s)?,
            (None, Some(Seeds::List(v))) => v,
            (None, Some(Seeds::Range(s))) => parse_seeds(&s)?,
            (None, None) => (0..10).collect(),
        };
        let default_criterion = match command {
            Command::ForecastEval => CriterionChoice::Nc,
            _ => CriterionChoice::Nv,
        };
        let t = o.t.or(file.t).unwrap_or(6);
        let ball = file.ball.unwrap_or_else(|| BallConfig {
            depth: 1,
            radius: "1/2".into(),
            center: vec!["1/2".into(), "1/2".into()],
        });
        let cfg = ExperimentConfig {
            command,
            learners: pick_list(o.learners, file.learners, &["always-1"]),
            streams: pick_list(o.streams, file.streams, STANDARD_STREAMS),
            forecaster: o.forecaster.or(file.forecaster).unwrap_or_else(|| "laplace-bayes".into()),
            sources: pick_list(o.sources, file.sources, &["bernoulli(1/2)"]),
            law: o.law.or(file.law).unwrap_or_else(|| "bernoulli(1/2)".into()),
            holes: pick_list(o.holes, file.holes, &[]),
            horizon,
            seeds,
            tail: o.tail.or(file.tail).unwrap_or((horizon / 4).max(1)),
            depth: o.depth.or(file.depth).unwrap_or(3),
            budget: o.budget.or(file.budget).unwrap_or(1 << 20),
            epsilon: canonical_rational("epsilon", &o.epsilon.or(file.epsilon).unwrap_or_else(|| "1/20".into()))?,
            r: canonical_rational("r", &o.r.or(file.r).unwrap_or_else(|| "1".into()))?,
            tol: canonical_rational("tol", &o.tol.or(file.tol).unwrap_or_else(|| "1/100".into()))?,
            criterion: o.criterion.or(file.criterion).unwrap_or(default_criterion),
            prefix: o.prefix.or(file.prefix).unwrap_or_else(|| "e".into()),
            spice: o.spice.or(file.spice).unwrap_or_else(|| "all-zeros".into()),
            spikes: o.spikes.or(file.spikes).unwrap_or_else(|| "pow10".into()),
            rounds: o.rounds.or(file.rounds).unwrap_or(10),
            max_move: o.max_move.or(file.max_move).unwrap_or(8),
            steps: o.steps.or(file.steps).unwrap_or(10),
            t,
            k_max: o.k_max.or(file.k_max).unwrap_or((t + 1).min(12)),
            cases: o.cases.or(file.cases).unwrap_or(100),
            ball,
            expect: o.expect.or(file.expect),
            out: o.out.or(file.out).unwrap_or_else(|| PathBuf::from("nfl-out")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), Error> {
        for l in &self.learners {
            registry::learner(l)?;
        }
        for s in &self.streams {
            registry::stream(s)?;
        }
        for s in self.sources.iter().chain([&self.forecaster, &self.law]) {
            registry::law(s)?;
        }
        for h in &self.holes {
            registry::parse_bits(h)?;
        }
        registry::parse_bits(&self.prefix)?;
        registry::stream(&self.spice)?;
        registry::schedule(&self.spikes)?;
        self.basis_ball()?;
        if self.horizon == 0 {
            return Err(Error::Parse("horizon must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Parse("at least one seed is required".into()));
        }
        let wants_forecast = matches!(self.command, Command::ForecastEval);
        let wants_extrapolation = matches!(self.command, Command::ExtrapolateEval);
        if (wants_forecast && self.criterion.for_extrapolators())
            || (wants_extrapolation && !self.criterion.for_extrapolators())
        {
            return Err(Error::Parse(format!(
                "criterion {:?} does not apply to {}",
                self.criterion, self.command
            )));
        }
        Ok(())
    }

    pub fn rational(&self, s: &str) -> Rational {
        parse_rational(s).expect("validated at resolve time")
    }

    pub fn basis_ball(&self) -> Result<BasisBall, Error> {
        let center = self
            .ball
            .center
            .iter()
            .map(|c| parse_rational(c))
            .collect::<Result<Vec<_>, _>>()?;
        BasisBall::new(self.ball.depth, center, parse_rational(&self.ball.radius)?)
    }
}
