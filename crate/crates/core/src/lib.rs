//! Two-qubit quantum games in the Eisert–Wilkens–Lewenstein (EWL) scheme.
//!
//! The crate is layered bottom-up:
//!
//! - [`qlin`]: fixed-size complex linear algebra for two qubits
//! - [`payoff`]: the four-parameter payoff matrix and the classical solver
//! - [`ewl`]: strategies, the entangler and the game evolution
//! - [`equilibrium`]: grid-certified Nash equilibria, best responses, τ-sweeps
//! - [`newcomb`]: Newcomb's problem played as a symmetric two-player game
//! - [`cli`]: argument parsing and JSON/CSV reports for the `ewl-games` binary
//!
//! Grid work runs on rayon when the default `parallel` feature is enabled and
//! falls back to plain iteration otherwise; see [`par`].

pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod ewl;
pub mod newcomb;
pub mod par;
pub mod payoff;
pub mod qlin;

pub use error::{Error, Inequality, Result};
