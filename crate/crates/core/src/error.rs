use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// One link of the payoff ordering chain `β > α > γ > δ`, `δ ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Inequality {
    BetaAboveAlpha,
    AlphaAboveGamma,
    GammaAboveDelta,
    DeltaNonPositive,
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Inequality::BetaAboveAlpha => "β>α",
            Inequality::AlphaAboveGamma => "α>γ",
            Inequality::GammaAboveDelta => "γ>δ",
            Inequality::DeltaNonPositive => "δ≤0",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not unitary (max |U†U - I| entry {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("generator is not Hermitian (max |G† - G| entry {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error(
        "entangler base is invalid: U⊗U is not Hermitian (max |G† - G| entry {deviation:.3e})"
    )]
    NonHermitianBase { deviation: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("state is not normalized (sum of |amplitude|² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("payoff ordering violated: {0} does not hold")]
    OrderingViolation(Inequality),

    #[error("probability {value} is outside [0, 1]")]
    ProbabilityOutOfRange { value: f64 },

    #[error("{name} = {value} is outside [0, {max}]")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        max: f64,
    },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("grid has {size} strategies per player, limit is {limit}")]
    GridTooLarge { size: usize, limit: usize },

    #[error("a sweep needs at least 2 steps, got {0}")]
    TooFewSteps(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
