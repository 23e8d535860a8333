//! Newcomb's problem played as a symmetric two-player game.
//!
//! The human is the row player and the predictor the column player. Taking
//! only Box1 maps to cooperation (index 0), taking both boxes to defection
//! (index 1).

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::equilibrium::{self, EquilibriumReport, StrategySpace};
use crate::error::Result;
use crate::ewl::{self, named_unitary, GameConfig, NamedStrategy, OutcomeProbs, PayoffPair};
use crate::payoff::{self, check_probability, MatrixClass, PayoffMatrix};
use crate::qlin::Unitary2;

pub const BOX_LABELS: [&str; 2] = ["Box1", "Box2"];

/// Dollar amounts of an (extended) Newcomb instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewcombInstance {
    /// Box1 alone when the predictor filled it (α).
    pub box1_full: f64,
    /// Both boxes when Box1 was filled (β).
    pub both_when_full: f64,
    /// Both boxes when Box1 was left empty (γ).
    pub box2_only: f64,
    /// Box1 alone when it was left empty, at most zero (δ).
    pub penalty: f64,
}

impl NewcombInstance {
    /// The original one-million / one-thousand dollar set-up.
    pub fn original() -> Self {
        NewcombInstance {
            box1_full: 1_000_000.0,
            both_when_full: 1_001_000.0,
            box2_only: 1000.0,
            penalty: 0.0,
        }
    }
}

pub fn np_matrix(inst: &NewcombInstance) -> Result<PayoffMatrix> {
    PayoffMatrix::new(
        inst.box1_full,
        inst.both_when_full,
        inst.box2_only,
        inst.penalty,
    )
}

/// The human's classical mixture after the Hadamard step,
/// `½[[1, 2p-1], [2p-1, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedHumanState {
    pub p: f64,
    pub matrix: [[f64; 2]; 2],
}

impl MixedHumanState {
    pub fn trace(&self) -> f64 {
        self.matrix[0][0] + self.matrix[1][1]
    }
}

pub fn mixed_state(p: f64) -> Result<MixedHumanState> {
    let p = check_probability(p)?;
    let off = 0.5 * (2.0 * p - 1.0);
    Ok(MixedHumanState {
        p,
        matrix: [[0.5, off], [off, 0.5]],
    })
}

/// `¼[α + (2p-1)(δ+β) + γ]`.
pub fn mixed_payoff(p: f64, m: &PayoffMatrix) -> Result<f64> {
    let p = check_probability(p)?;
    let s = 2.0 * p - 1.0;
    Ok(0.25 * (m.alpha() + s * (m.delta() + m.beta()) + m.gamma()))
}

/// The same payoff as [`mixed_payoff`], computed as `½·tr(M ρ)` with
/// `M = [[α, δ], [β, γ]]` and `ρ` the mixed state.
pub fn density_route_payoff(state: &MixedHumanState, m: &PayoffMatrix) -> f64 {
    let w = m.as_matrix();
    let rho = state.matrix;
    let product = |r: usize, col: usize| (0..2).map(|k| w[r][k] * rho[k][col]).sum::<f64>();
    0.5 * (product(0, 0) + product(1, 1))
}

/// Mass on the diagonal outcomes, where the predictor's box matches the
/// human's.
pub fn prediction_accuracy(p: &OutcomeProbs) -> f64 {
    p.p_cc + p.p_dd
}

/// Game settings for [`solve_np`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewcombOptions {
    pub tau: f64,
    pub base: Unitary2,
    pub space: StrategySpace,
    pub epsilon: f64,
}

impl Default for NewcombOptions {
    fn default() -> Self {
        NewcombOptions {
            tau: FRAC_PI_2,
            base: named_unitary(NamedStrategy::D),
            space: StrategySpace::family(
                equilibrium::DEFAULT_THETA_STEPS,
                equilibrium::DEFAULT_PHI_STEPS,
            )
            .expect("default grid is valid"),
            epsilon: equilibrium::EPSILON_CANDIDATE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewcombReport {
    pub payoff_matrix: PayoffMatrix,
    pub matrix_class: MatrixClass,
    pub classical_recommendation: String,
    pub classical_dominance_strict: bool,
    /// Human's payoff for the recommendation when the predictor foresees it.
    pub classical_payoff: f64,
    pub classical_prediction_accuracy: f64,
    /// `mixed_payoff(½) = (α+γ)/4`.
    pub classical_mixed_reference: f64,
    pub quantum_equilibrium: EquilibriumReport,
    pub prediction_accuracy: f64,
    /// Both sides playing H under the σ_y entangler at the configured τ.
    pub hadamard_payoffs: PayoffPair,
}

pub fn solve_np(inst: &NewcombInstance, opts: &NewcombOptions) -> Result<NewcombReport> {
    let m = np_matrix(inst)?;
    let game = payoff::extend_symmetric(&m);
    let classical = payoff::solve_classical(&game);
    let dominant = classical
        .dominant_row
        .expect("β > α and γ > δ make Box2 dominant");
    let rec = dominant.index;

    let classical_cfg = GameConfig::new(0.0, opts.base, m)?;
    let rec_u = named_unitary(if rec == 0 {
        NamedStrategy::C
    } else {
        NamedStrategy::D
    });
    let (classical_probs, _) = ewl::play_and_score(&classical_cfg, &rec_u, &rec_u);

    let cfg = GameConfig::new(opts.tau, opts.base, m)?;
    let z = NamedStrategy::SigmaZ.into();
    let quantum_equilibrium = equilibrium::verify_nash(&cfg, (z, z), &opts.space, opts.epsilon);
    let zu = named_unitary(NamedStrategy::SigmaZ);
    let (quantum_probs, _) = ewl::play_and_score(&cfg, &zu, &zu);

    let h_cfg = GameConfig::new(opts.tau, named_unitary(NamedStrategy::SigmaY), m)?;
    let hu = named_unitary(NamedStrategy::Hadamard);
    let (_, hadamard_payoffs) = ewl::play_and_score(&h_cfg, &hu, &hu);

    Ok(NewcombReport {
        payoff_matrix: m,
        matrix_class: payoff::classify(&m),
        classical_recommendation: BOX_LABELS[rec].to_string(),
        classical_dominance_strict: dominant.strict,
        classical_payoff: game.row_payoffs[rec][rec],
        classical_prediction_accuracy: prediction_accuracy(&classical_probs),
        classical_mixed_reference: mixed_payoff(0.5, &m)?,
        quantum_equilibrium,
        prediction_accuracy: prediction_accuracy(&quantum_probs),
        hadamard_payoffs,
    })
}
