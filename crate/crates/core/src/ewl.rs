//! The EWL protocol: `|ψ_f⟩ = J†(U_A ⊗ U_B)J|00⟩`, measured in the
//! computational basis and scored with the payoff observables.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::payoff::PayoffMatrix;
use crate::qlin::{self, c, TwoQubitState, Unitary2, Unitary4, IDENTITY_TOL};

/// Angles of the two-parameter strategy family, `θ ∈ [0, π]`, `φ ∈ [0, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyParams {
    theta: f64,
    phi: f64,
}

impl StrategyParams {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        check_angle("theta", theta, PI)?;
        check_angle("phi", phi, FRAC_PI_2)?;
        Ok(StrategyParams { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

fn check_angle(name: &'static str, value: f64, max: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite(name));
    }
    if !(0.0..=max).contains(&value) {
        return Err(Error::AngleOutOfRange { name, value, max });
    }
    Ok(())
}

/// `U(θ, φ) = [[e^{iφ} cos(θ/2), sin(θ/2)], [-sin(θ/2), e^{-iφ} cos(θ/2)]]`.
pub fn strategy_unitary(s: &StrategyParams) -> Unitary2 {
    let (sin, cos) = (s.theta / 2.0).sin_cos();
    let m = [
        [Complex64::from_polar(cos, s.phi), c(sin, 0.0)],
        [c(-sin, 0.0), Complex64::from_polar(cos, -s.phi)],
    ];
    Unitary2::new(m).expect("U(θ, φ) is unitary for finite angles")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NamedStrategy {
    C,
    D,
    Q,
    #[serde(rename = "H")]
    Hadamard,
    #[serde(rename = "X")]
    SigmaX,
    #[serde(rename = "Y")]
    SigmaY,
    #[serde(rename = "Z")]
    SigmaZ,
}

impl NamedStrategy {
    pub const ALL: [NamedStrategy; 7] = [
        NamedStrategy::C,
        NamedStrategy::D,
        NamedStrategy::Q,
        NamedStrategy::Hadamard,
        NamedStrategy::SigmaX,
        NamedStrategy::SigmaY,
        NamedStrategy::SigmaZ,
    ];

    /// Strategies appended to a grid that widens the family.
    pub const OUT_OF_FAMILY: [NamedStrategy; 4] = [
        NamedStrategy::Hadamard,
        NamedStrategy::SigmaX,
        NamedStrategy::SigmaY,
        NamedStrategy::SigmaZ,
    ];

    /// Whether some `U(θ, φ)` reproduces the operator. σ_z counts: it equals
    /// `Q = U(0, π/2)` up to the global phase `i`.
    pub fn in_two_parameter_family(&self) -> bool {
        !matches!(
            self,
            NamedStrategy::Hadamard | NamedStrategy::SigmaX | NamedStrategy::SigmaY
        )
    }

    /// Family parameters, exact for C/D/Q and up to global phase for σ_z.
    pub fn family_params(&self) -> Option<StrategyParams> {
        let (theta, phi) = match self {
            NamedStrategy::C => (0.0, 0.0),
            NamedStrategy::D => (PI, 0.0),
            NamedStrategy::Q | NamedStrategy::SigmaZ => (0.0, FRAC_PI_2),
            _ => return None,
        };
        Some(StrategyParams { theta, phi })
    }

    pub fn label(&self) -> &'static str {
        match self {
            NamedStrategy::C => "C",
            NamedStrategy::D => "D",
            NamedStrategy::Q => "Q",
            NamedStrategy::Hadamard => "H",
            NamedStrategy::SigmaX => "X",
            NamedStrategy::SigmaY => "Y",
            NamedStrategy::SigmaZ => "Z",
        }
    }
}

impl fmt::Display for NamedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for NamedStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        NamedStrategy::ALL
            .into_iter()
            .find(|n| n.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown strategy {s:?}, expected one of C, D, Q, H, X, Y, Z"))
    }
}

/// The literal operator for a named strategy.
pub fn named_unitary(n: NamedStrategy) -> Unitary2 {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    let h = c(FRAC_1_SQRT_2, 0.0);
    let m = match n {
        NamedStrategy::C => [[l, o], [o, l]],
        NamedStrategy::D => [[o, l], [-l, o]],
        NamedStrategy::Q => [[i, o], [o, -i]],
        NamedStrategy::Hadamard => [[h, h], [h, -h]],
        NamedStrategy::SigmaX => [[o, l], [l, o]],
        NamedStrategy::SigmaY => [[o, -i], [i, o]],
        NamedStrategy::SigmaZ => [[l, o], [o, -l]],
    };
    Unitary2::new(m).expect("named strategies are unitary")
}

/// A strategy descriptor: a named operator or a point of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Strategy {
    Named(NamedStrategy),
    Params(StrategyParams),
}

impl Strategy {
    pub fn unitary(&self) -> Unitary2 {
        match self {
            Strategy::Named(n) => named_unitary(*n),
            Strategy::Params(p) => strategy_unitary(p),
        }
    }
}

impl From<NamedStrategy> for Strategy {
    fn from(n: NamedStrategy) -> Self {
        Strategy::Named(n)
    }
}

impl From<StrategyParams> for Strategy {
    fn from(p: StrategyParams) -> Self {
        Strategy::Params(p)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Named(n) => write!(f, "{n}"),
            Strategy::Params(p) => write!(f, "U({}, {})", p.theta, p.phi),
        }
    }
}

/// `J = exp(i·τ/2·Ũ⊗Ũ)`.
pub fn entangler(tau: f64, base: &Unitary2) -> Result<Unitary4> {
    check_angle("tau", tau, FRAC_PI_2)?;
    let generator = hermitian_generator(base)?;
    qlin::unitary_exp(tau / 2.0, &generator)
}

fn hermitian_generator(base: &Unitary2) -> Result<Unitary4> {
    let g = qlin::tensor2(base, base);
    let deviation = qlin::max_abs_diff4(g.dagger().matrix(), g.matrix());
    if deviation > IDENTITY_TOL {
        return Err(Error::NonHermitianBase { deviation });
    }
    Ok(g)
}

/// One EWL game instance. The entangler and the entangled initial state are
/// computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    tau: f64,
    entangler_base: Unitary2,
    payoffs: PayoffMatrix,
    entangler: Unitary4,
    disentangler: Unitary4,
    initial: TwoQubitState,
}

impl GameConfig {
    pub fn new(tau: f64, entangler_base: Unitary2, payoffs: PayoffMatrix) -> Result<Self> {
        let entangler = entangler(tau, &entangler_base)?;
        let initial = qlin::apply(&entangler, &TwoQubitState::basis(0));
        Ok(GameConfig {
            tau,
            entangler_base,
            payoffs,
            disentangler: entangler.dagger(),
            entangler,
            initial,
        })
    }

    /// Same base and payoffs at a different entanglement.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        GameConfig::new(tau, self.entangler_base, self.payoffs)
    }

    pub fn with_payoffs(&self, payoffs: PayoffMatrix) -> Self {
        GameConfig {
            payoffs,
            ..self.clone()
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn entangler_base(&self) -> &Unitary2 {
        &self.entangler_base
    }

    pub fn payoffs(&self) -> &PayoffMatrix {
        &self.payoffs
    }

    pub fn entangler(&self) -> &Unitary4 {
        &self.entangler
    }

    /// `J|00⟩`.
    pub fn initial_state(&self) -> &TwoQubitState {
        &self.initial
    }
}

/// Final state `J†(u_a ⊗ u_b)J|00⟩`.
pub fn play(cfg: &GameConfig, u_a: &Unitary2, u_b: &Unitary2) -> TwoQubitState {
    let local = qlin::tensor2(u_a, u_b);
    let moved = qlin::apply(&local, &cfg.initial);
    qlin::apply(&cfg.disentangler, &moved)
}

/// Measurement probabilities; the first letter is player A's outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomeProbs {
    pub p_cc: f64,
    pub p_cd: f64,
    pub p_dc: f64,
    pub p_dd: f64,
}

impl OutcomeProbs {
    pub fn as_array(&self) -> [f64; 4] {
        [self.p_cc, self.p_cd, self.p_dc, self.p_dd]
    }

    pub fn total(&self) -> f64 {
        self.as_array().iter().sum()
    }
}

pub fn outcome_probs(s: &TwoQubitState) -> OutcomeProbs {
    let p = s.amplitudes().map(|a| a.norm_sqr());
    OutcomeProbs {
        p_cc: p[0],
        p_cd: p[1],
        p_dc: p[2],
        p_dd: p[3],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffPair {
    pub a: f64,
    pub b: f64,
}

/// Player A is scored with `diag(α, δ, β, γ)`, player B with δ and β swapped.
pub fn expected_payoffs(p: &OutcomeProbs, m: &PayoffMatrix) -> PayoffPair {
    let (alpha, beta, gamma, delta) = (m.alpha(), m.beta(), m.gamma(), m.delta());
    PayoffPair {
        a: alpha * p.p_cc + delta * p.p_cd + beta * p.p_dc + gamma * p.p_dd,
        b: alpha * p.p_cc + beta * p.p_cd + delta * p.p_dc + gamma * p.p_dd,
    }
}

pub fn play_and_score(
    cfg: &GameConfig,
    u_a: &Unitary2,
    u_b: &Unitary2,
) -> (OutcomeProbs, PayoffPair) {
    let probs = outcome_probs(&play(cfg, u_a, u_b));
    (probs, expected_payoffs(&probs, &cfg.payoffs))
}
