//! Command-line front end.
//!
//! `parse` turns argv into a validated [`Command`], `execute` runs it and
//! returns a [`RunReport`]. Reports are deterministic: every number is rounded
//! to 12 significant digits and each JSON report embeds a canonical argv that
//! reproduces it byte for byte.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::equilibrium::{self, SpaceKind, StrategySpace, MAX_GRID_STRATEGIES};
use crate::error::Error;
use crate::ewl::{self, named_unitary, GameConfig, NamedStrategy, Strategy, StrategyParams};
use crate::newcomb::{self, NewcombInstance, NewcombOptions};
use crate::payoff::{self, make_payoff_matrix, PayoffMatrix};
use crate::qlin;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;

const SIGNIFICANT_DIGITS: usize = 12;
const DEFAULT_NEWCOMB_PAYOFFS: &str = "1000000,1001000,1000,0";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Clap(e) => e.exit_code().clamp(0, 255) as u8,
            CliError::Usage(_) | CliError::Invalid(_) => EXIT_VALIDATION,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "ewl-games",
    version,
    about = "Quantum EWL games, Nash search and the Newcomb reduction"
)]
struct RawArgs {
    #[command(subcommand)]
    verb: RawVerb,
    /// Write the report to FILE instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Emit sweep output as CSV (sweep-tau only)
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Args, Debug)]
struct PayoffArgs {
    /// Payoff parameters as "alpha,beta,gamma,delta"
    #[arg(long, value_name = "A,B,G,D")]
    payoffs: Option<String>,
    /// Lift the delta <= 0 requirement
    #[arg(long)]
    legacy_delta: bool,
}

#[derive(Args, Debug)]
struct GameArgs {
    /// Entanglement, radians or a multiple of pi such as "0.5pi"
    #[arg(long, default_value = "0.5pi")]
    tau: String,
    /// Entangler base: D, Y or Z
    #[arg(long, default_value = "D")]
    base: String,
    #[command(flatten)]
    payoffs: PayoffArgs,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Grid resolution as THETAxPHI steps
    #[arg(long, default_value = "65x33")]
    grid: String,
    /// Strategy space: family, plus-named or classical
    #[arg(long, default_value = "family")]
    space: String,
    #[arg(long, default_value = "1e-9")]
    epsilon: String,
}

#[derive(Subcommand, Debug)]
enum RawVerb {
    /// Dominance, pure Nash and Pareto analysis of the symmetric bimatrix
    SolveClassical {
        #[command(flatten)]
        payoffs: PayoffArgs,
    },
    /// Play one strategy pair and report the final state and payoffs
    Play {
        #[command(flatten)]
        game: GameArgs,
        /// Player A's strategy: C, D, Q, H, X, Y, Z or THETA:PHI
        #[arg(long, default_value = "C")]
        a: String,
        #[arg(long, default_value = "C")]
        b: String,
    },
    /// Verify a pair (with --a and --b) or list all grid equilibria
    SearchNash {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
    },
    /// Payoffs of a fixed pair over uniformly spaced tau in [0, pi/2]
    SweepTau {
        #[arg(long, default_value = "D")]
        base: String,
        #[command(flatten)]
        payoffs: PayoffArgs,
        #[arg(long, default_value = "C")]
        a: String,
        #[arg(long, default_value = "C")]
        b: String,
        #[arg(long, default_value_t = 9)]
        steps: usize,
    },
    /// Newcomb's problem: classical recommendation and quantum equilibrium
    Newcomb {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
}

/// Entangler bases accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Base {
    D,
    Y,
    Z,
}

impl Base {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_uppercase().as_str() {
            "D" => Ok(Base::D),
            "Y" => Ok(Base::Y),
            "Z" => Ok(Base::Z),
            _ => Err(CliError::Usage(format!(
                "unknown entangler base {s:?}, expected D, Y or Z"
            ))),
        }
    }

    fn strategy(self) -> NamedStrategy {
        match self {
            Base::D => NamedStrategy::D,
            Base::Y => NamedStrategy::SigmaY,
            Base::Z => NamedStrategy::SigmaZ,
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffInput {
    pub matrix: PayoffMatrix,
    pub legacy: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameInput {
    pub tau: f64,
    pub base: Base,
    pub payoffs: PayoffInput,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    SolveClassical {
        payoffs: PayoffInput,
    },
    Play {
        game: GameInput,
        a: Strategy,
        b: Strategy,
    },
    SearchNash {
        game: GameInput,
        space: StrategySpace,
        epsilon: f64,
        pair: Option<(Strategy, Strategy)>,
    },
    SweepTau {
        base: Base,
        payoffs: PayoffInput,
        a: Strategy,
        b: Strategy,
        steps: usize,
        csv: bool,
    },
    Newcomb {
        game: GameInput,
        space: StrategySpace,
        epsilon: f64,
    },
}

/// Parses an angle given in radians or as a multiple of π (`"0.5pi"`, `"pi"`).
pub fn parse_angle(s: &str) -> Result<f64, CliError> {
    let t = s.trim();
    let malformed = || CliError::Usage(format!("malformed angle {s:?}"));
    let value = match t.strip_suffix("pi").or_else(|| t.strip_suffix('π')) {
        Some("") => PI,
        Some("-") => -PI,
        Some(k) => k.parse::<f64>().map_err(|_| malformed())? * PI,
        None => t.parse::<f64>().map_err(|_| malformed())?,
    };
    if !value.is_finite() {
        return Err(malformed());
    }
    Ok(value)
}

fn parse_real(name: &str, s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Usage(format!("malformed {name} {s:?}")))
}

fn parse_payoffs(args: &PayoffArgs, default: Option<&str>) -> Result<PayoffInput, CliError> {
    let text = args
        .payoffs
        .as_deref()
        .or(default)
        .ok_or_else(|| CliError::Usage("--payoffs a,b,g,d is required".into()))?;
    let values = text
        .split(',')
        .map(|v| parse_real("payoff", v))
        .collect::<Result<Vec<_>, _>>()?;
    let [alpha, beta, gamma, delta] = values[..] else {
        return Err(CliError::Usage(format!(
            "--payoffs expects 4 comma-separated values, got {}",
            values.len()
        )));
    };
    let matrix = make_payoff_matrix(alpha, beta, gamma, delta, args.legacy_delta)?;
    Ok(PayoffInput {
        matrix,
        legacy: args.legacy_delta,
    })
}

fn parse_game(args: &GameArgs, default_payoffs: Option<&str>) -> Result<GameInput, CliError> {
    let payoffs = parse_payoffs(&args.payoffs, default_payoffs)?;
    let game = GameInput {
        tau: parse_angle(&args.tau)?,
        base: Base::parse(&args.base)?,
        payoffs,
    };
    // surfaces τ range errors at parse time
    game_config(&game)?;
    Ok(game)
}

/// A named strategy (`C D Q H X Y Z`, any case) or `THETA:PHI`.
pub fn parse_strategy(s: &str) -> Result<Strategy, CliError> {
    if let Some((theta, phi)) = s.split_once(':') {
        let p = StrategyParams::new(parse_angle(theta)?, parse_angle(phi)?)?;
        return Ok(p.into());
    }
    s.trim()
        .parse::<NamedStrategy>()
        .map(Strategy::from)
        .map_err(CliError::Usage)
}

fn parse_space(args: &GridArgs) -> Result<(StrategySpace, f64), CliError> {
    let bad_grid = || {
        CliError::Usage(format!(
            "malformed --grid {:?}, expected e.g. 65x33",
            args.grid
        ))
    };
    let (t, p) = args
        .grid
        .to_ascii_lowercase()
        .split_once('x')
        .map(|(t, p)| (t.to_string(), p.to_string()))
        .ok_or_else(bad_grid)?;
    let t: usize = t.trim().parse().map_err(|_| bad_grid())?;
    let p: usize = p.trim().parse().map_err(|_| bad_grid())?;
    let kind = match args.space.to_ascii_lowercase().as_str() {
        "family" => SpaceKind::TwoParameterFamily,
        "plus-named" => SpaceKind::TwoParameterPlusNamed,
        "classical" => SpaceKind::ClassicalPure,
        other => {
            return Err(CliError::Usage(format!(
                "unknown --space {other:?}, expected family, plus-named or classical"
            )))
        }
    };
    let space = if kind == SpaceKind::ClassicalPure {
        StrategySpace::classical()
    } else {
        StrategySpace::new(kind, t, p)?
    };
    let epsilon = parse_real("epsilon", &args.epsilon)?;
    if epsilon < 0.0 {
        return Err(CliError::Usage(format!(
            "--epsilon must be non-negative, got {epsilon}"
        )));
    }
    Ok((space, epsilon))
}

pub fn parse<S: AsRef<str>>(argv: &[S]) -> Result<Command, CliError> {
    Ok(parse_with_out(argv)?.0)
}

fn parse_with_out<S: AsRef<str>>(argv: &[S]) -> Result<(Command, Option<PathBuf>), CliError> {
    let raw = RawArgs::try_parse_from(
        std::iter::once("ewl-games").chain(argv.iter().map(AsRef::as_ref)),
    )?;
    if raw.csv && !matches!(raw.verb, RawVerb::SweepTau { .. }) {
        return Err(CliError::Usage("--csv only applies to sweep-tau".into()));
    }
    let command = match &raw.verb {
        RawVerb::SolveClassical { payoffs } => Command::SolveClassical {
            payoffs: parse_payoffs(payoffs, None)?,
        },
        RawVerb::Play { game, a, b } => Command::Play {
            game: parse_game(game, None)?,
            a: parse_strategy(a)?,
            b: parse_strategy(b)?,
        },
        RawVerb::SearchNash { game, grid, a, b } => {
            let game = parse_game(game, None)?;
            let (space, epsilon) = parse_space(grid)?;
            let pair = match (a, b) {
                (Some(a), Some(b)) => Some((parse_strategy(a)?, parse_strategy(b)?)),
                (None, None) => {
                    if space.len() > MAX_GRID_STRATEGIES {
                        return Err(Error::GridTooLarge {
                            size: space.len(),
                            limit: MAX_GRID_STRATEGIES,
                        }
                        .into());
                    }
                    None
                }
                _ => return Err(CliError::Usage("--a and --b must be given together".into())),
            };
            Command::SearchNash {
                game,
                space,
                epsilon,
                pair,
            }
        }
        RawVerb::SweepTau {
            base,
            payoffs,
            a,
            b,
            steps,
        } => {
            if *steps < 2 {
                return Err(Error::TooFewSteps(*steps).into());
            }
            Command::SweepTau {
                base: Base::parse(base)?,
                payoffs: parse_payoffs(payoffs, None)?,
                a: parse_strategy(a)?,
                b: parse_strategy(b)?,
                steps: *steps,
                csv: raw.csv,
            }
        }
        RawVerb::Newcomb { game, grid } => {
            let game = parse_game(game, Some(DEFAULT_NEWCOMB_PAYOFFS))?;
            let (space, epsilon) = parse_space(grid)?;
            Command::Newcomb {
                game,
                space,
                epsilon,
            }
        }
    };
    Ok((command, raw.out))
}

fn strategy_arg(s: &Strategy) -> String {
    match s {
        Strategy::Named(n) => n.label().to_string(),
        Strategy::Params(p) => format!("{}:{}", p.theta(), p.phi()),
    }
}

fn payoff_args(p: &PayoffInput, out: &mut Vec<String>) {
    let m = p.matrix;
    out.push("--payoffs".into());
    out.push(format!(
        "{},{},{},{}",
        m.alpha(),
        m.beta(),
        m.gamma(),
        m.delta()
    ));
    if p.legacy {
        out.push("--legacy-delta".into());
    }
}

fn game_args(g: &GameInput, out: &mut Vec<String>) {
    out.extend([
        "--tau".into(),
        g.tau.to_string(),
        "--base".into(),
        g.base.to_string(),
    ]);
    payoff_args(&g.payoffs, out);
}

fn grid_args(space: &StrategySpace, epsilon: f64, out: &mut Vec<String>) {
    let kind = match space.kind() {
        SpaceKind::TwoParameterFamily => "family",
        SpaceKind::TwoParameterPlusNamed => "plus-named",
        SpaceKind::ClassicalPure => "classical",
    };
    out.extend([
        "--grid".into(),
        format!("{}x{}", space.theta_steps(), space.phi_steps()),
        "--space".into(),
        kind.into(),
        "--epsilon".into(),
        format!("{epsilon:e}"),
    ]);
}

impl Command {
    pub fn verb(&self) -> &'static str {
        match self {
            Command::SolveClassical { .. } => "solve-classical",
            Command::Play { .. } => "play",
            Command::SearchNash { .. } => "search-nash",
            Command::SweepTau { .. } => "sweep-tau",
            Command::Newcomb { .. } => "newcomb",
        }
    }

    /// Canonical argv with every option spelled out; parses back to `self`.
    pub fn to_argv(&self) -> Vec<String> {
        let mut out = vec![self.verb().to_string()];
        match self {
            Command::SolveClassical { payoffs } => payoff_args(payoffs, &mut out),
            Command::Play { game, a, b } => {
                game_args(game, &mut out);
                out.extend(["--a".into(), strategy_arg(a), "--b".into(), strategy_arg(b)]);
            }
            Command::SearchNash {
                game,
                space,
                epsilon,
                pair,
            } => {
                game_args(game, &mut out);
                grid_args(space, *epsilon, &mut out);
                if let Some((a, b)) = pair {
                    out.extend(["--a".into(), strategy_arg(a), "--b".into(), strategy_arg(b)]);
                }
            }
            Command::SweepTau {
                base,
                payoffs,
                a,
                b,
                steps,
                csv,
            } => {
                out.extend(["--base".into(), base.to_string()]);
                payoff_args(payoffs, &mut out);
                out.extend([
                    "--a".into(),
                    strategy_arg(a),
                    "--b".into(),
                    strategy_arg(b),
                    "--steps".into(),
                    steps.to_string(),
                ]);
                if *csv {
                    out.push("--csv".into());
                }
            }
            Command::Newcomb {
                game,
                space,
                epsilon,
            } => {
                game_args(game, &mut out);
                grid_args(space, *epsilon, &mut out);
            }
        }
        out
    }
}

/// A finished report: JSON always, plus the CSV body for `--csv` sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub json: Value,
    pub csv: Option<String>,
}

impl RunReport {
    /// The bytes written to stdout or `--out`.
    pub fn render(&self) -> String {
        match &self.csv {
            Some(csv) => csv.clone(),
            None => {
                let mut s =
                    serde_json::to_string_pretty(&self.json).expect("report values are plain JSON");
                s.push('\n');
                s
            }
        }
    }
}

/// Rounds to 12 significant digits; `-0` becomes `0`.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| !n.is_i64() && !n.is_u64()) {
                *v = json!(round_sig(x));
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn to_value<T: Serialize>(t: &T) -> Result<Value, CliError> {
    serde_json::to_value(t).map_err(|e| CliError::Internal(format!("serialization failed: {e}")))
}

fn game_config(g: &GameInput) -> Result<GameConfig, Error> {
    GameConfig::new(g.tau, named_unitary(g.base.strategy()), g.payoffs.matrix)
}

fn grid_meta(space: &StrategySpace) -> Value {
    json!({
        "kind": space.kind(),
        "theta_steps": space.theta_steps(),
        "phi_steps": space.phi_steps(),
        "size": space.len(),
    })
}

fn internal(e: Error) -> CliError {
    CliError::Internal(e.to_string())
}

pub fn execute(c: &Command) -> Result<RunReport, CliError> {
    let mut csv = None;
    let (matrix, result, grid) = match c {
        Command::SolveClassical { payoffs } => {
            let m = payoffs.matrix;
            let game = payoff::extend_symmetric(&m);
            let solution = payoff::solve_classical(&game);
            let label = |d: Option<payoff::Dominance>, labels: &[String; 2]| {
                d.map(|d| labels[d.index].clone())
            };
            let result = json!({
                "matrix_class": payoff::classify(&m),
                "decomposition": payoff::decompose(&m),
                "bimatrix": game,
                "dominant_row_label": label(solution.dominant_row, &game.row_labels),
                "dominant_col_label": label(solution.dominant_col, &game.col_labels),
                "solution": solution,
                "uniform_mixed_payoffs": payoff::mixed_payoff_classical(&game, 0.5, 0.5).map_err(internal)?,
            });
            (m, result, Value::Null)
        }
        Command::Play { game, a, b } => {
            let cfg = game_config(game).map_err(internal)?;
            let state = ewl::play(&cfg, &a.unitary(), &b.unitary());
            let probs = ewl::outcome_probs(&state);
            let payoffs = ewl::expected_payoffs(&probs, cfg.payoffs());
            let amplitudes: Vec<Value> = state
                .amplitudes()
                .iter()
                .map(|z| json!({"re": z.re, "im": z.im}))
                .collect();
            let result = json!({
                "strategies": {"a": a, "b": b},
                "final_state": amplitudes,
                "probabilities": probs,
                "payoffs": payoffs,
                "prediction_accuracy": newcomb::prediction_accuracy(&probs),
                "initial_concurrence": qlin::concurrence(cfg.initial_state()),
            });
            (game.payoffs.matrix, result, Value::Null)
        }
        Command::SearchNash {
            game,
            space,
            epsilon,
            pair,
        } => {
            let cfg = game_config(game).map_err(internal)?;
            let result = match pair {
                Some(pair) => {
                    json!({"verification": equilibrium::verify_nash(&cfg, *pair, space, *epsilon)})
                }
                None => {
                    let found =
                        equilibrium::search_equilibria(&cfg, space, *epsilon).map_err(internal)?;
                    json!({"count": found.len(), "equilibria": found})
                }
            };
            (game.payoffs.matrix, result, grid_meta(space))
        }
        Command::SweepTau {
            base,
            payoffs,
            a,
            b,
            steps,
            csv: as_csv,
        } => {
            let cfg = GameConfig::new(0.0, named_unitary(base.strategy()), payoffs.matrix)
                .map_err(internal)?;
            let sweep = equilibrium::sweep_tau(&cfg, (*a, *b), *steps).map_err(internal)?;
            let rows: Vec<Value> = sweep
                .tau_values
                .iter()
                .zip(&sweep.payoff_pairs)
                .zip(&sweep.concurrences)
                .map(|((t, p), conc)| {
                    json!({"tau": t, "payoff_a": p.a, "payoff_b": p.b, "concurrence": conc})
                })
                .collect();
            if *as_csv {
                let mut body = String::from("tau,payoff_a,payoff_b\n");
                for (t, p) in sweep.tau_values.iter().zip(&sweep.payoff_pairs) {
                    body.push_str(&format!(
                        "{},{},{}\n",
                        round_sig(*t),
                        round_sig(p.a),
                        round_sig(p.b)
                    ));
                }
                csv = Some(body);
            }
            let result = json!({"strategies": {"a": a, "b": b}, "rows": rows});
            (payoffs.matrix, result, Value::Null)
        }
        Command::Newcomb {
            game,
            space,
            epsilon,
        } => {
            let m = game.payoffs.matrix;
            let inst = NewcombInstance {
                box1_full: m.alpha(),
                both_when_full: m.beta(),
                box2_only: m.gamma(),
                penalty: m.delta(),
            };
            let opts = NewcombOptions {
                tau: game.tau,
                base: named_unitary(game.base.strategy()),
                space: *space,
                epsilon: *epsilon,
            };
            let report = newcomb::solve_np(&inst, &opts).map_err(internal)?;
            (m, to_value(&report)?, grid_meta(space))
        }
    };

    let mut json = json!({
        "command": {"verb": c.verb(), "argv": c.to_argv()},
        "payoff_matrix": matrix,
        "result": result,
        "meta": {"version": env!("CARGO_PKG_VERSION"), "grid": grid},
    });
    round_numbers(&mut json);
    Ok(RunReport { json, csv })
}

/// Runs the tool end to end; returns the process exit code.
pub fn main_with_args<S: AsRef<str>>(argv: &[S]) -> u8 {
    let (command, out) = match parse_with_out(argv) {
        Ok(parsed) => parsed,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            return CliError::Clap(e).exit_code();
        }
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let report = match execute(&command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let body = report.render();
    let written = match out {
        Some(path) => {
            std::fs::write(&path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| format!("cannot write to stdout: {e}")),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_INTERNAL
        }
    }
}
