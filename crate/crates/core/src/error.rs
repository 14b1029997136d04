// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Everything that can go wrong inside the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("stream cache cap exceeded: requested prefix of length {requested}, cap is {cap}")]
    CacheCap { requested: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("construction budget of {budget} exhausted in block {block}")]
    BudgetExhausted { block: usize, budget: usize },

    #[error("conditional probability undefined at prefix {prefix:?} for law {law}")]
    UndefinedConditional { law: String, prefix: String },

    #[error("law {law} claims full support but gives conditional {value} at prefix {prefix:?}")]
    FullSupportViolation {
        law: String,
        prefix: String,
        value: String,
    },

    #[error("conditional {value} outside [0, 1] for law {law} at prefix {prefix:?}")]
    ConditionalOutOfRange {
        law: String,
        prefix: String,
        value: String,
    },

    #[error("game rule violated: player {player} played an empty string in round {round}")]
    RuleViolation { player: String, round: usize },

    #[error("witness F({n}, {w:?}) = {got:?} does not strictly extend its argument")]
    WitnessViolation { n: usize, w: String, got: String },

    #[error("shrink failed: no radius down to 10^-{max_exponent} passes ({blocking})")]
    ShrinkFailure { max_exponent: u32, blocking: String },

    #[error("certificate does not replay: {0}")]
    CertificateMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown reference: {0}")]
    UnknownRef(String),
}

impl Error {
    /// True for errors caused by running out of a configured resource.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::CacheCap { .. } | Error::BudgetExhausted { .. } | Error::ShrinkFailure { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
