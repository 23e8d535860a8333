//! Grid-certified Nash equilibria over strategy spaces.
//!
//! Every check here quantifies over a finite list of deviations: a uniform
//! θ×φ grid over the two-parameter family, optionally widened with the named
//! out-of-family operators, or just the classical pair {C, D}. Grid payoffs are
//! evaluated through [`crate::par`] and reduced in index order, so reports are
//! identical with or without the `parallel` feature.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ewl::{self, GameConfig, NamedStrategy, PayoffPair, Strategy, StrategyParams};
use crate::par::{self, Execution};
use crate::qlin::{self, Unitary2};

/// Largest number of strategies per player accepted by [`search_equilibria`].
pub const MAX_GRID_STRATEGIES: usize = 10_000;

/// Default grid resolution.
pub const DEFAULT_THETA_STEPS: usize = 65;
pub const DEFAULT_PHI_STEPS: usize = 33;

/// Tolerance for certifying named candidate points.
pub const EPSILON_CANDIDATE: f64 = 1e-9;
/// Tolerance for approximate equilibria found on the grid itself.
pub const EPSILON_GRID: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    TwoParameterFamily,
    TwoParameterPlusNamed,
    ClassicalPure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StrategySpace {
    kind: SpaceKind,
    theta_steps: usize,
    phi_steps: usize,
}

impl StrategySpace {
    pub fn new(kind: SpaceKind, theta_steps: usize, phi_steps: usize) -> Result<Self> {
        if theta_steps < 2 || phi_steps < 2 {
            return Err(Error::DegenerateGrid(format!(
                "{theta_steps}x{phi_steps}: both step counts must be at least 2 to include the endpoints"
            )));
        }
        Ok(StrategySpace {
            kind,
            theta_steps,
            phi_steps,
        })
    }

    pub fn classical() -> Self {
        StrategySpace {
            kind: SpaceKind::ClassicalPure,
            theta_steps: 2,
            phi_steps: 2,
        }
    }

    pub fn family(theta_steps: usize, phi_steps: usize) -> Result<Self> {
        Self::new(SpaceKind::TwoParameterFamily, theta_steps, phi_steps)
    }

    pub fn plus_named(theta_steps: usize, phi_steps: usize) -> Result<Self> {
        Self::new(SpaceKind::TwoParameterPlusNamed, theta_steps, phi_steps)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn theta_steps(&self) -> usize {
        self.theta_steps
    }

    pub fn phi_steps(&self) -> usize {
        self.phi_steps
    }

    /// Number of strategies [`build_grid`] yields.
    pub fn len(&self) -> usize {
        match self.kind {
            SpaceKind::ClassicalPure => 2,
            SpaceKind::TwoParameterFamily => self.theta_steps * self.phi_steps,
            SpaceKind::TwoParameterPlusNamed => {
                self.theta_steps * self.phi_steps + NamedStrategy::OUT_OF_FAMILY.len()
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// θ-major uniform grid including both endpoints of each range, then the
/// named extras.
pub fn build_grid(space: &StrategySpace) -> Vec<Strategy> {
    if space.kind == SpaceKind::ClassicalPure {
        return vec![NamedStrategy::C.into(), NamedStrategy::D.into()];
    }
    let (nt, np) = (space.theta_steps, space.phi_steps);
    let mut grid = Vec::with_capacity(space.len());
    for i in 0..nt {
        let theta = PI * (i as f64 / (nt - 1) as f64);
        for j in 0..np {
            let phi = FRAC_PI_2 * (j as f64 / (np - 1) as f64);
            let p = StrategyParams::new(theta, phi).expect("grid angles are in range");
            grid.push(p.into());
        }
    }
    if space.kind == SpaceKind::TwoParameterPlusNamed {
        grid.extend(NamedStrategy::OUT_OF_FAMILY.map(Strategy::from));
    }
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Player {
    A,
    B,
}

fn score(cfg: &GameConfig, a: &Unitary2, b: &Unitary2) -> PayoffPair {
    ewl::play_and_score(cfg, a, b).1
}

// First index holding the maximum; exact comparison keeps the lowest index on
// ties.
fn argmax(values: &[f64]) -> (usize, f64) {
    let mut best = (0, values[0]);
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > best.1 {
            best = (k, v);
        }
    }
    best
}

/// Deviation payoffs of `responder` over `grid` with the other side fixed.
fn deviation_payoffs(
    exec: Execution,
    cfg: &GameConfig,
    fixed: &Unitary2,
    grid: &[Unitary2],
    responder: Player,
) -> Vec<f64> {
    par::map_indexed(exec, grid.len(), |k| match responder {
        Player::A => score(cfg, &grid[k], fixed).a,
        Player::B => score(cfg, fixed, &grid[k]).b,
    })
}

/// Responder's payoff-maximizing grid strategy against a fixed opponent, with
/// ties going to the lowest grid index.
pub fn best_response(
    cfg: &GameConfig,
    opponent: &Strategy,
    space: &StrategySpace,
    responder: Player,
) -> (Strategy, f64) {
    best_response_in(
        Execution::default(),
        cfg,
        opponent,
        &build_grid(space),
        responder,
    )
}

pub fn best_response_in(
    exec: Execution,
    cfg: &GameConfig,
    opponent: &Strategy,
    grid: &[Strategy],
    responder: Player,
) -> (Strategy, f64) {
    assert!(!grid.is_empty(), "best response over an empty grid");
    let unitaries: Vec<Unitary2> = grid.iter().map(Strategy::unitary).collect();
    let values = deviation_payoffs(exec, cfg, &opponent.unitary(), &unitaries, responder);
    let (k, v) = argmax(&values);
    (grid[k], v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub pair: (Strategy, Strategy),
    pub payoffs: PayoffPair,
    /// Best deviation payoff minus current payoff; negative when every grid
    /// deviation is strictly worse.
    pub max_unilateral_gain_a: f64,
    pub max_unilateral_gain_b: f64,
    pub best_deviation_a: Strategy,
    pub best_deviation_b: Strategy,
    /// `None` for an explicit deviation list.
    pub grid: Option<StrategySpace>,
    pub grid_size: usize,
    pub epsilon: f64,
    pub is_nash: bool,
}

/// Measures the largest unilateral improvement available to each player over
/// the grid and reports Nash iff both are at most `epsilon`.
pub fn verify_nash(
    cfg: &GameConfig,
    pair: (Strategy, Strategy),
    space: &StrategySpace,
    epsilon: f64,
) -> EquilibriumReport {
    let mut report = verify_nash_in(Execution::default(), cfg, pair, &build_grid(space), epsilon);
    report.grid = Some(*space);
    report
}

pub fn verify_nash_in(
    exec: Execution,
    cfg: &GameConfig,
    pair: (Strategy, Strategy),
    grid: &[Strategy],
    epsilon: f64,
) -> EquilibriumReport {
    assert!(!grid.is_empty(), "Nash verification over an empty grid");
    let (ua, ub) = (pair.0.unitary(), pair.1.unitary());
    let payoffs = score(cfg, &ua, &ub);
    let unitaries: Vec<Unitary2> = grid.iter().map(Strategy::unitary).collect();
    let (ka, best_a) = argmax(&deviation_payoffs(exec, cfg, &ub, &unitaries, Player::A));
    let (kb, best_b) = argmax(&deviation_payoffs(exec, cfg, &ua, &unitaries, Player::B));
    let gain_a = best_a - payoffs.a;
    let gain_b = best_b - payoffs.b;
    EquilibriumReport {
        pair,
        payoffs,
        max_unilateral_gain_a: gain_a,
        max_unilateral_gain_b: gain_b,
        best_deviation_a: grid[ka],
        best_deviation_b: grid[kb],
        grid: None,
        grid_size: grid.len(),
        epsilon,
        is_nash: gain_a <= epsilon && gain_b <= epsilon,
    }
}

/// Every grid pair that passes [`verify_nash`], in row-major order (player
/// A's index major).
pub fn search_equilibria(
    cfg: &GameConfig,
    space: &StrategySpace,
    epsilon: f64,
) -> Result<Vec<EquilibriumReport>> {
    let size = space.len();
    if size > MAX_GRID_STRATEGIES {
        return Err(Error::GridTooLarge {
            size,
            limit: MAX_GRID_STRATEGIES,
        });
    }
    let mut reports = search_equilibria_in(Execution::default(), cfg, &build_grid(space), epsilon)?;
    for r in &mut reports {
        r.grid = Some(*space);
    }
    Ok(reports)
}

const ROW_BLOCK: usize = 64;

pub fn search_equilibria_in(
    exec: Execution,
    cfg: &GameConfig,
    grid: &[Strategy],
    epsilon: f64,
) -> Result<Vec<EquilibriumReport>> {
    let n = grid.len();
    if n > MAX_GRID_STRATEGIES {
        return Err(Error::GridTooLarge {
            size: n,
            limit: MAX_GRID_STRATEGIES,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let unitaries: Vec<Unitary2> = grid.iter().map(Strategy::unitary).collect();

    // Pass 1: player B's best reply along each row, and per-block maxima of
    // player A's payoff down each column. Blocks are merged in order below so
    // the lowest index wins ties.
    let blocks = n.div_ceil(ROW_BLOCK);
    let partials = par::map_indexed(exec, blocks, |blk| {
        let rows = blk * ROW_BLOCK..((blk + 1) * ROW_BLOCK).min(n);
        let mut col_best = vec![(usize::MAX, f64::NEG_INFINITY); n];
        let mut row_best = Vec::with_capacity(rows.len());
        for i in rows {
            let mut best_b = (0, f64::NEG_INFINITY);
            for j in 0..n {
                let p = score(cfg, &unitaries[i], &unitaries[j]);
                if p.b > best_b.1 {
                    best_b = (j, p.b);
                }
                if p.a > col_best[j].1 {
                    col_best[j] = (i, p.a);
                }
            }
            row_best.push(best_b);
        }
        (row_best, col_best)
    });
    let mut row_best_b = Vec::with_capacity(n);
    let mut col_best_a = vec![(usize::MAX, f64::NEG_INFINITY); n];
    for (rows, cols) in partials {
        row_best_b.extend(rows);
        for (acc, cand) in col_best_a.iter_mut().zip(cols) {
            if cand.1 > acc.1 {
                *acc = cand;
            }
        }
    }

    // Pass 2: keep the cells where neither player can improve.
    let rows = par::map_indexed(exec, n, |i| {
        (0..n)
            .filter_map(|j| {
                let payoffs = score(cfg, &unitaries[i], &unitaries[j]);
                let gain_a = col_best_a[j].1 - payoffs.a;
                let gain_b = row_best_b[i].1 - payoffs.b;
                (gain_a <= epsilon && gain_b <= epsilon).then(|| EquilibriumReport {
                    pair: (grid[i], grid[j]),
                    payoffs,
                    max_unilateral_gain_a: gain_a,
                    max_unilateral_gain_b: gain_b,
                    best_deviation_a: grid[col_best_a[j].0],
                    best_deviation_b: grid[row_best_b[i].0],
                    grid: None,
                    grid_size: n,
                    epsilon,
                    is_nash: true,
                })
            })
            .collect::<Vec<_>>()
    });
    Ok(rows.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauSweep {
    pub tau_values: Vec<f64>,
    pub payoff_pairs: Vec<PayoffPair>,
    /// Concurrence of `J(τ)|00⟩` at each step.
    pub concurrences: Vec<f64>,
}

/// Payoffs of a fixed strategy pair at `steps` uniformly spaced `τ ∈ [0, π/2]`,
/// endpoints included.
pub fn sweep_tau(
    cfg_base: &GameConfig,
    pair: (Strategy, Strategy),
    steps: usize,
) -> Result<TauSweep> {
    sweep_tau_in(Execution::default(), cfg_base, pair, steps)
}

pub fn sweep_tau_in(
    exec: Execution,
    cfg_base: &GameConfig,
    pair: (Strategy, Strategy),
    steps: usize,
) -> Result<TauSweep> {
    if steps < 2 {
        return Err(Error::TooFewSteps(steps));
    }
    let (ua, ub) = (pair.0.unitary(), pair.1.unitary());
    let taus: Vec<f64> = (0..steps)
        .map(|k| FRAC_PI_2 * (k as f64 / (steps - 1) as f64))
        .collect();
    let rows = par::map_indexed(exec, steps, |k| {
        let cfg = cfg_base.with_tau(taus[k])?;
        Ok((
            score(&cfg, &ua, &ub),
            qlin::concurrence(cfg.initial_state()),
        ))
    });
    let rows: Vec<(PayoffPair, f64)> = rows.into_iter().collect::<Result<_>>()?;
    let (payoff_pairs, concurrences) = rows.into_iter().unzip();
    Ok(TauSweep {
        tau_values: taus,
        payoff_pairs,
        concurrences,
    })
}
