//! Double-precision complex linear algebra for two-qubit games.
//!
//! Everything here is fixed-size: 2×2 single-qubit operators, 4×4 two-qubit
//! operators and 4-amplitude pure states in the basis order
//! `|00⟩, |01⟩, |10⟩, |11⟩` with qubit A as the most significant bit.
//! Values are immutable once constructed and validated.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Matrix2 = [[Complex64; 2]; 2];
pub type Matrix4 = [[Complex64; 4]; 4];

/// Tolerance for identity-style checks (unitarity, normalization, Hermiticity).
pub const IDENTITY_TOL: f64 = 1e-12;
/// Tolerance for results of composed expressions.
pub const COMPOSED_TOL: f64 = 1e-10;

/// Series terms smaller than this (max entry magnitude) end the expansion.
const SERIES_CUTOFF: f64 = 1e-16;
const SERIES_MAX_TERMS: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn all_finite<'a>(it: impl IntoIterator<Item = &'a Complex64>) -> bool {
    it.into_iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn identity4() -> Matrix4 {
    let mut m = [[ZERO; 4]; 4];
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = ONE;
    }
    m
}

pub(crate) fn mat4_mul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for col in 0..4 {
            out[r][col] = (0..4).map(|k| a[r][k] * b[k][col]).sum();
        }
    }
    out
}

pub(crate) fn mat4_dagger(a: &Matrix4) -> Matrix4 {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for col in 0..4 {
            out[r][col] = a[col][r].conj();
        }
    }
    out
}

fn mat4_add(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut out = *a;
    for r in 0..4 {
        for col in 0..4 {
            out[r][col] += b[r][col];
        }
    }
    out
}

fn mat4_scale(a: &Matrix4, s: Complex64) -> Matrix4 {
    let mut out = *a;
    out.iter_mut().flatten().for_each(|z| *z *= s);
    out
}

fn max_entry(a: &Matrix4) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise magnitude of `a - b`.
pub fn max_abs_diff4(a: &Matrix4, b: &Matrix4) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff2(a: &Matrix2, b: &Matrix2) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn unitarity_deviation2(m: &Matrix2) -> f64 {
    let mut dev: f64 = 0.0;
    for r in 0..2 {
        for col in 0..2 {
            let entry: Complex64 = (0..2).map(|k| m[k][r].conj() * m[k][col]).sum();
            let target = if r == col { ONE } else { ZERO };
            dev = dev.max((entry - target).norm());
        }
    }
    dev
}

fn unitarity_deviation4(m: &Matrix4) -> f64 {
    max_abs_diff4(&mat4_mul(&mat4_dagger(m), m), &identity4())
}

fn hermiticity_deviation4(m: &Matrix4) -> f64 {
    max_abs_diff4(&mat4_dagger(m), m)
}

/// A validated 2×2 unitary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Unitary2(Matrix2);

impl Unitary2 {
    /// Validates finiteness and `U†U = I₂` within [`IDENTITY_TOL`].
    pub fn new(m: Matrix2) -> Result<Self> {
        if !all_finite(m.iter().flatten()) {
            return Err(Error::NonFinite("2×2 matrix"));
        }
        let deviation = unitarity_deviation2(&m);
        if deviation > IDENTITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Unitary2(m))
    }

    pub fn identity() -> Self {
        Unitary2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.0
    }

    /// `e^{iθ}·U`, still unitary.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let ph = Complex64::from_polar(1.0, theta);
        let m = self.0;
        Unitary2([[ph * m[0][0], ph * m[0][1]], [ph * m[1][0], ph * m[1][1]]])
    }

    pub fn dagger(&self) -> Self {
        let m = self.0;
        Unitary2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }
}

/// A validated 4×4 unitary acting on two qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Unitary4(Matrix4);

impl Unitary4 {
    /// Validates finiteness and `U†U = I₄` within [`IDENTITY_TOL`].
    pub fn new(m: Matrix4) -> Result<Self> {
        if !all_finite(m.iter().flatten()) {
            return Err(Error::NonFinite("4×4 matrix"));
        }
        let deviation = unitarity_deviation4(&m);
        if deviation > IDENTITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Unitary4(m))
    }

    pub fn identity() -> Self {
        Unitary4(identity4())
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.0
    }

    /// Operator product `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Unitary4) -> Unitary4 {
        Unitary4(mat4_mul(&self.0, &rhs.0))
    }

    pub fn dagger(&self) -> Unitary4 {
        dagger4(self)
    }

    pub fn is_hermitian(&self) -> bool {
        hermiticity_deviation4(&self.0) <= IDENTITY_TOL
    }

    /// Max entry of `U†U - I₄`.
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation4(&self.0)
    }
}

/// A normalized two-qubit pure state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoQubitState([Complex64; 4]);

impl TwoQubitState {
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        if !all_finite(amplitudes.iter()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > IDENTITY_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(TwoQubitState(amplitudes))
    }

    /// Computational basis ket; `index` is `2·a + b` for `|ab⟩`.
    ///
    /// # Panics
    /// If `index > 3`.
    pub fn basis(index: usize) -> Self {
        assert!(index < 4, "basis index {index} out of range");
        let mut amps = [ZERO; 4];
        amps[index] = ONE;
        TwoQubitState(amps)
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &TwoQubitState) -> Complex64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// True when the states differ only by a global phase: `|⟨a|b⟩| = 1`.
    pub fn equal_up_to_phase(&self, other: &TwoQubitState, tol: f64) -> bool {
        (self.inner(other).norm() - 1.0).abs() <= tol
    }
}

/// Kronecker product `a ⊗ b`, qubit A (first factor) most significant.
///
/// Both factors are unitary by construction of [`Unitary2`], so the product is
/// too.
pub fn tensor2(a: &Unitary2, b: &Unitary2) -> Unitary4 {
    let (a, b) = (a.matrix(), b.matrix());
    let mut out = [[ZERO; 4]; 4];
    for ar in 0..2 {
        for ac in 0..2 {
            for br in 0..2 {
                for bc in 0..2 {
                    out[2 * ar + br][2 * ac + bc] = a[ar][ac] * b[br][bc];
                }
            }
        }
    }
    Unitary4(out)
}

pub(crate) fn mat_vec4(m: &Matrix4, v: &[Complex64; 4]) -> [Complex64; 4] {
    let mut out = [ZERO; 4];
    for (r, slot) in out.iter_mut().enumerate() {
        *slot = (0..4).map(|k| m[r][k] * v[k]).sum();
    }
    out
}

/// `u|s⟩`.
pub fn apply(u: &Unitary4, s: &TwoQubitState) -> TwoQubitState {
    let out = TwoQubitState(mat_vec4(u.matrix(), s.amplitudes()));
    debug_assert!((out.norm_sqr() - 1.0).abs() <= COMPOSED_TOL);
    out
}

pub fn dagger4(u: &Unitary4) -> Unitary4 {
    Unitary4(mat4_dagger(u.matrix()))
}

fn check_hermitian(g: &Unitary4) -> Result<()> {
    let deviation = hermiticity_deviation4(g.matrix());
    if deviation > IDENTITY_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// `exp(i·angle·g)` for Hermitian `g`.
///
/// Uses the closed form `cos(angle)·I + i·sin(angle)·g` when `g² = I₄`, which
/// holds for every Hermitian unitary; the series path remains as a fallback.
pub fn unitary_exp(angle: f64, g: &Unitary4) -> Result<Unitary4> {
    check_hermitian(g)?;
    let g2 = mat4_mul(g.matrix(), g.matrix());
    if max_abs_diff4(&g2, &identity4()) <= IDENTITY_TOL {
        unitary_exp_involution(angle, g)
    } else {
        unitary_exp_series(angle, g)
    }
}

/// Closed form `cos(angle)·I₄ + i·sin(angle)·g`, valid when `g² = I₄`.
pub fn unitary_exp_involution(angle: f64, g: &Unitary4) -> Result<Unitary4> {
    check_hermitian(g)?;
    if !angle.is_finite() {
        return Err(Error::NonFinite("exponent angle"));
    }
    let lhs = mat4_scale(&identity4(), c(angle.cos(), 0.0));
    let rhs = mat4_scale(g.matrix(), c(0.0, angle.sin()));
    Unitary4::new(mat4_add(&lhs, &rhs))
}

/// Power series with scaling and squaring.
pub fn unitary_exp_series(angle: f64, g: &Unitary4) -> Result<Unitary4> {
    check_hermitian(g)?;
    if !angle.is_finite() {
        return Err(Error::NonFinite("exponent angle"));
    }
    let a = mat4_scale(g.matrix(), I * angle);
    Unitary4::new(expm_series(&a))
}

/// `exp(a)` for a general 4×4 complex matrix: scale so the max entry is at
/// most 1/8, sum the Taylor series until the next term drops below 1e-16, then
/// square back.
pub fn expm_series(a: &Matrix4) -> Matrix4 {
    let norm = max_entry(a);
    let squarings = if norm > 0.125 {
        (norm / 0.125).log2().ceil() as i32
    } else {
        0
    };
    let scaled = mat4_scale(a, c(0.5f64.powi(squarings), 0.0));

    let mut sum = identity4();
    let mut term = identity4();
    for k in 1..=SERIES_MAX_TERMS {
        term = mat4_scale(&mat4_mul(&term, &scaled), c(1.0 / k as f64, 0.0));
        sum = mat4_add(&sum, &term);
        if max_entry(&term) < SERIES_CUTOFF {
            break;
        }
    }
    for _ in 0..squarings {
        sum = mat4_mul(&sum, &sum);
    }
    sum
}

/// Pure-state concurrence `2|a₀₀a₁₁ - a₀₁a₁₀|`.
pub fn concurrence(s: &TwoQubitState) -> f64 {
    let a = s.amplitudes();
    (2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0)
}
