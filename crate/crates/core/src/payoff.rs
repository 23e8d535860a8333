//! Payoff-matrix algebra and the classical 2×2 solver.
//!
//! A game is parameterized by four reals laid out as
//!
//! ```text
//!              col 0   col 1
//!     row 0  [   α       δ  ]
//!     row 1  [   β       γ  ]
//! ```
//!
//! for the row player; the symmetric extension hands the column player the
//! transpose.

use serde::Serialize;

use crate::error::{Error, Inequality, Result};

pub type Real2 = [[f64; 2]; 2];

/// The four payoff parameters, validated against `β > α > γ > δ`, `δ ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffMatrix {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

impl PayoffMatrix {
    /// Strict ordering, with `δ ≤ 0` enforced.
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        make_payoff_matrix(alpha, beta, gamma, delta, false)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Row player's matrix `[[α, δ], [β, γ]]`.
    pub fn as_matrix(&self) -> Real2 {
        [[self.alpha, self.delta], [self.beta, self.gamma]]
    }
}

/// Builds a validated [`PayoffMatrix`].
///
/// The chain `β > α > γ > δ` is always enforced. `legacy` only lifts the
/// `δ ≤ 0` requirement; `δ = 0` passes either way as long as `γ > 0`.
pub fn make_payoff_matrix(
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    legacy: bool,
) -> Result<PayoffMatrix> {
    if ![alpha, beta, gamma, delta].iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("payoff entries"));
    }
    let checks = [
        (beta > alpha, Inequality::BetaAboveAlpha),
        (alpha > gamma, Inequality::AlphaAboveGamma),
        (gamma > delta, Inequality::GammaAboveDelta),
        (legacy || delta <= 0.0, Inequality::DeltaNonPositive),
    ];
    if let Some((_, violated)) = checks.iter().find(|(ok, _)| !ok) {
        return Err(Error::OrderingViolation(*violated));
    }
    Ok(PayoffMatrix {
        alpha,
        beta,
        gamma,
        delta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatrixDecomposition {
    pub diagonal_part: Real2,
    pub offdiagonal_part: Real2,
}

impl MatrixDecomposition {
    pub fn reconstruct(&self) -> Real2 {
        let (d, o) = (self.diagonal_part, self.offdiagonal_part);
        [
            [d[0][0] + o[0][0], d[0][1] + o[0][1]],
            [d[1][0] + o[1][0], d[1][1] + o[1][1]],
        ]
    }
}

/// Splits `M` into `diag(α, γ) + [[0, δ], [β, 0]]`.
pub fn decompose(m: &PayoffMatrix) -> MatrixDecomposition {
    MatrixDecomposition {
        diagonal_part: [[m.alpha, 0.0], [0.0, m.gamma]],
        offdiagonal_part: [[0.0, m.delta], [m.beta, 0.0]],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MatrixClass {
    /// `|δ| < β`; the off-diagonal part is not symmetric.
    Asymmetric,
    /// `δ = -β`; the off-diagonal part is skew-symmetric.
    QuasiSkewSymmetric,
    GeneralOffDiagonal,
}

pub fn classify(m: &PayoffMatrix) -> MatrixClass {
    if m.delta == -m.beta {
        MatrixClass::QuasiSkewSymmetric
    } else if m.delta.abs() < m.beta && m.delta != m.beta {
        MatrixClass::Asymmetric
    } else {
        MatrixClass::GeneralOffDiagonal
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BimatrixGame {
    pub row_payoffs: Real2,
    pub col_payoffs: Real2,
    pub row_labels: [String; 2],
    pub col_labels: [String; 2],
}

impl BimatrixGame {
    pub fn new(row_payoffs: Real2, col_payoffs: Real2) -> Self {
        let labels = || ["0".to_string(), "1".to_string()];
        BimatrixGame {
            row_payoffs,
            col_payoffs,
            row_labels: labels(),
            col_labels: labels(),
        }
    }

    pub fn with_labels(mut self, row: [&str; 2], col: [&str; 2]) -> Self {
        self.row_labels = row.map(str::to_string);
        self.col_labels = col.map(str::to_string);
        self
    }

    pub fn cell(&self, row: usize, col: usize) -> (f64, f64) {
        (self.row_payoffs[row][col], self.col_payoffs[row][col])
    }
}

/// Symmetric two-player extension: row gets `[[α, δ], [β, γ]]`, column gets
/// its transpose. Strategies are labelled `C`/`D`.
pub fn extend_symmetric(m: &PayoffMatrix) -> BimatrixGame {
    let row = m.as_matrix();
    let col = [[row[0][0], row[1][0]], [row[0][1], row[1][1]]];
    BimatrixGame::new(row, col).with_labels(["C", "D"], ["C", "D"])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dominance {
    pub index: usize,
    /// Strictly better against every opposing strategy.
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
    pub payoffs: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalSolution {
    pub dominant_row: Option<Dominance>,
    pub dominant_col: Option<Dominance>,
    /// Row-major.
    pub pure_nash: Vec<Cell>,
    /// Row-major, pure cells only.
    pub pareto_optimal: Vec<Cell>,
}

// `payoff(i, j)`: own strategy `i` against opposing strategy `j`.
fn dominant(payoff: impl Fn(usize, usize) -> f64) -> Option<Dominance> {
    (0..2).find_map(|i| {
        let other = 1 - i;
        let weak = (0..2).all(|j| payoff(i, j) >= payoff(other, j));
        let strict = (0..2).all(|j| payoff(i, j) > payoff(other, j));
        weak.then_some(Dominance { index: i, strict })
    })
}

pub fn solve_classical(g: &BimatrixGame) -> ClassicalSolution {
    let a = g.row_payoffs;
    let b = g.col_payoffs;
    let dominant_row = dominant(|i, j| a[i][j]);
    let dominant_col = dominant(|i, j| b[j][i]);

    let cells: Vec<Cell> = (0..2)
        .flat_map(|row| (0..2).map(move |col| (row, col)))
        .map(|(row, col)| Cell {
            row,
            col,
            payoffs: g.cell(row, col),
        })
        .collect();

    let pure_nash = cells
        .iter()
        .filter(|c| {
            a[c.row][c.col] >= a[1 - c.row][c.col] && b[c.row][c.col] >= b[c.row][1 - c.col]
        })
        .copied()
        .collect();

    let pareto_optimal = cells
        .iter()
        .filter(|c| {
            !cells.iter().any(|o| {
                let (oa, ob) = o.payoffs;
                let (ca, cb) = c.payoffs;
                oa >= ca && ob >= cb && (oa > ca || ob > cb)
            })
        })
        .copied()
        .collect();

    ClassicalSolution {
        dominant_row,
        dominant_col,
        pure_nash,
        pareto_optimal,
    }
}

pub(crate) fn check_probability(p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::ProbabilityOutOfRange { value: p })
    }
}

/// Expected payoffs when the row player puts weight `p` on strategy 0 and the
/// column player independently puts weight `q` on strategy 0.
pub fn mixed_payoff_classical(g: &BimatrixGame, p: f64, q: f64) -> Result<(f64, f64)> {
    let p = check_probability(p)?;
    let q = check_probability(q)?;
    let rows = [p, 1.0 - p];
    let cols = [q, 1.0 - q];
    let mut out = (0.0, 0.0);
    for (i, wr) in rows.iter().enumerate() {
        for (j, wc) in cols.iter().enumerate() {
            let w = wr * wc;
            out.0 += w * g.row_payoffs[i][j];
            out.1 += w * g.col_payoffs[i][j];
        }
    }
    Ok(out)
}
