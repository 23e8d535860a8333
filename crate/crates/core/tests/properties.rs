//! Invariants checked over random inputs.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ewl_games::equilibrium::{self, build_grid, Player, StrategySpace};
use ewl_games::ewl::{self, named_unitary, GameConfig, NamedStrategy, Strategy, StrategyParams};
use ewl_games::newcomb::{self, NewcombInstance, NewcombOptions};
use ewl_games::par::Execution;
use ewl_games::payoff::{self, BimatrixGame, MatrixClass, PayoffMatrix};
use ewl_games::qlin::{self, TwoQubitState, Unitary2, Unitary4};

fn random_unitary2(rng: &mut impl Rng) -> Unitary2 {
    let (chi, psi, phi) = (
        rng.gen_range(0.0..2.0 * PI),
        rng.gen_range(0.0..2.0 * PI),
        rng.gen_range(0.0..2.0 * PI),
    );
    let theta = rng.gen_range(0.0..FRAC_PI_2);
    let e = |a: f64| Complex64::from_polar(1.0, a);
    let (s, c) = theta.sin_cos();
    let m = [[e(psi) * c, e(phi) * s], [-e(-phi) * s, e(-psi) * c]];
    Unitary2::new(m).unwrap().with_global_phase(chi)
}

fn random_state(rng: &mut impl Rng) -> TwoQubitState {
    let amps: [Complex64; 4] =
        std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    TwoQubitState::new(amps.map(|a| a / norm)).unwrap()
}

/// Local unitaries sandwiched between an entangler and its inverse.
fn random_unitary4(rng: &mut impl Rng) -> Unitary4 {
    let local = qlin::tensor2(&random_unitary2(rng), &random_unitary2(rng));
    let base = named_unitary([NamedStrategy::D, NamedStrategy::SigmaY][rng.gen_range(0..2)]);
    let j = ewl::entangler(rng.gen_range(0.0..FRAC_PI_2), &base).unwrap();
    j.dagger().compose(&local).compose(&j)
}

fn random_matrix(rng: &mut impl Rng) -> PayoffMatrix {
    let delta = rng.gen_range(-10.0..=0.0);
    let gamma = delta + rng.gen_range(0.1..5.0);
    let alpha = gamma + rng.gen_range(0.1..5.0);
    let beta = alpha + rng.gen_range(0.1..5.0);
    PayoffMatrix::new(alpha, beta, gamma, delta).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn d_base() -> Unitary2 {
    named_unitary(NamedStrategy::D)
}

// ---- qlin ----

#[test]
fn constructed_unitaries_stay_unitary() {
    let mut r = rng(1);
    for _ in 0..200 {
        let u = random_unitary4(&mut r);
        assert!(u.unitarity_deviation() <= 1e-12);
        assert!(u.dagger().unitarity_deviation() <= 1e-12);
        assert!(u.compose(&random_unitary4(&mut r)).unitarity_deviation() <= 1e-12);
    }
}

#[test]
fn apply_preserves_norm() {
    let mut r = rng(2);
    for _ in 0..1000 {
        let (u, s) = (random_unitary4(&mut r), random_state(&mut r));
        assert!((qlin::apply(&u, &s).norm_sqr() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn exponential_paths_agree() {
    for base in [
        NamedStrategy::D,
        NamedStrategy::SigmaY,
        NamedStrategy::SigmaZ,
    ] {
        let b = named_unitary(base);
        let g = qlin::tensor2(&b, &b);
        for k in 0..20 {
            let angle = FRAC_PI_4 * k as f64 / 19.0;
            let fast = qlin::unitary_exp_involution(angle, &g).unwrap();
            let series = qlin::unitary_exp_series(angle, &g).unwrap();
            assert!(qlin::max_abs_diff4(fast.matrix(), series.matrix()) <= 1e-10);
        }
    }
}

#[test]
fn series_handles_general_hermitian_generators() {
    // Hermitian but not involutive: sum of two Pauli products
    let y = named_unitary(NamedStrategy::SigmaY);
    let z = named_unitary(NamedStrategy::SigmaZ);
    let (yy, zz) = (qlin::tensor2(&y, &y), qlin::tensor2(&z, &z));
    let mut sum = *yy.matrix();
    for (row, zrow) in sum.iter_mut().zip(zz.matrix()) {
        for (v, z) in row.iter_mut().zip(zrow) {
            *v += z;
        }
    }
    // yy and zz commute, so exp(i a (yy + zz)) = exp(i a yy) exp(i a zz)
    for angle in [0.1, 0.7, 1.3] {
        let scaled = sum.map(|row| row.map(|v| v * Complex64::new(0.0, angle)));
        let series = qlin::expm_series(&scaled);
        let product = qlin::unitary_exp(angle, &yy)
            .unwrap()
            .compose(&qlin::unitary_exp(angle, &zz).unwrap());
        assert!(qlin::max_abs_diff4(&series, product.matrix()) <= 1e-10);
    }
}

proptest! {
    #[test]
    fn exponential_group_property(a in 0.0..FRAC_PI_4, b in 0.0..FRAC_PI_4, which in 0usize..3) {
        let base = named_unitary([NamedStrategy::D, NamedStrategy::SigmaY, NamedStrategy::SigmaZ][which]);
        let g = qlin::tensor2(&base, &base);
        let joint = qlin::unitary_exp(a + b, &g).unwrap();
        let split = qlin::unitary_exp(a, &g).unwrap().compose(&qlin::unitary_exp(b, &g).unwrap());
        prop_assert!(qlin::max_abs_diff4(joint.matrix(), split.matrix()) <= 1e-10);
        let joint = qlin::unitary_exp_series(a + b, &g).unwrap();
        let split = qlin::unitary_exp_series(a, &g).unwrap().compose(&qlin::unitary_exp_series(b, &g).unwrap());
        prop_assert!(qlin::max_abs_diff4(joint.matrix(), split.matrix()) <= 1e-10);
    }

    #[test]
    fn concurrence_is_bounded(seed in any::<u64>()) {
        let s = random_state(&mut rng(seed));
        let c = qlin::concurrence(&s);
        prop_assert!((0.0..=1.0).contains(&c));
    }

    #[test]
    fn product_states_have_zero_concurrence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let local = qlin::tensor2(&random_unitary2(&mut r), &random_unitary2(&mut r));
        let s = qlin::apply(&local, &TwoQubitState::basis(0));
        prop_assert!(qlin::concurrence(&s) <= 1e-12);
    }
}

// ---- payoff ----

#[test]
fn decomposition_reconstructs_bitwise() {
    let mut r = rng(3);
    for _ in 0..1000 {
        let m = random_matrix(&mut r);
        assert_eq!(payoff::decompose(&m).reconstruct(), m.as_matrix());
    }
}

proptest! {
    #[test]
    fn skew_construction_classifies_quasi_skew(a_gap in 0.1f64..5.0, b_gap in 0.1f64..5.0, gamma in -3.0f64..3.0) {
        let alpha = gamma + a_gap;
        let beta = alpha + b_gap;
        let delta = -beta;
        prop_assume!(gamma > delta && delta <= 0.0);
        let m = PayoffMatrix::new(alpha, beta, gamma, delta).unwrap();
        prop_assert_eq!(payoff::classify(&m), MatrixClass::QuasiSkewSymmetric);
    }
}

/// Independent brute force: enumerate deviations and dominance by definition.
struct Oracle {
    dominant_row: Option<usize>,
    dominant_col: Option<usize>,
    nash: Vec<(usize, usize)>,
    pareto: Vec<(usize, usize)>,
}

#[allow(clippy::needless_range_loop)]
fn oracle(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> Oracle {
    let mut nash = Vec::new();
    let mut pareto = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let mut stable = true;
            for alt in 0..2 {
                if a[alt][j] > a[i][j] || b[i][alt] > b[i][j] {
                    stable = false;
                }
            }
            if stable {
                nash.push((i, j));
            }
            let mut dominated = false;
            for k in 0..2 {
                for l in 0..2 {
                    let better_or_equal = a[k][l] >= a[i][j] && b[k][l] >= b[i][j];
                    let differs = a[k][l] != a[i][j] || b[k][l] != b[i][j];
                    if better_or_equal && differs {
                        dominated = true;
                    }
                }
            }
            if !dominated {
                pareto.push((i, j));
            }
        }
    }
    let mut dominant_row = None;
    for i in (0..2).rev() {
        let mut ok = true;
        for alt in 0..2 {
            for j in 0..2 {
                ok &= a[i][j] >= a[alt][j];
            }
        }
        if ok {
            dominant_row = Some(i);
        }
    }
    let mut dominant_col = None;
    for j in (0..2).rev() {
        let mut ok = true;
        for alt in 0..2 {
            for i in 0..2 {
                ok &= b[i][j] >= b[i][alt];
            }
        }
        if ok {
            dominant_col = Some(j);
        }
    }
    Oracle {
        dominant_row,
        dominant_col,
        nash,
        pareto,
    }
}

#[test]
fn classical_solver_matches_brute_force() {
    let mut r = rng(4);
    for round in 0..1000 {
        // small integers make ties common
        let mut draw =
            || std::array::from_fn(|_| std::array::from_fn(|_| r.gen_range(-3..=3) as f64));
        let (a, b): ([[f64; 2]; 2], [[f64; 2]; 2]) = (draw(), draw());
        let want = oracle(a, b);
        let got = payoff::solve_classical(&BimatrixGame::new(a, b));
        assert_eq!(
            got.dominant_row.map(|d| d.index),
            want.dominant_row,
            "round {round}"
        );
        assert_eq!(
            got.dominant_col.map(|d| d.index),
            want.dominant_col,
            "round {round}"
        );
        let nash: Vec<_> = got.pure_nash.iter().map(|c| (c.row, c.col)).collect();
        assert_eq!(nash, want.nash, "round {round}");
        let pareto: Vec<_> = got.pareto_optimal.iter().map(|c| (c.row, c.col)).collect();
        assert_eq!(pareto, want.pareto, "round {round}");
    }
}

#[test]
fn symmetric_extension_has_symmetric_diagonal() {
    let mut r = rng(5);
    for _ in 0..200 {
        let g = payoff::extend_symmetric(&random_matrix(&mut r));
        for s in 0..2 {
            let (pa, pb) = g.cell(s, s);
            assert_eq!(pa, pb);
        }
    }
}

#[test]
fn classical_mixed_payoff_is_bilinear() {
    let mut r = rng(6);
    let h = 1e-3;
    for _ in 0..100 {
        let g = payoff::extend_symmetric(&random_matrix(&mut r));
        let (p, q) = (r.gen_range(h..1.0 - h), r.gen_range(h..1.0 - h));
        let f = |p: f64, q: f64| payoff::mixed_payoff_classical(&g, p, q).unwrap();
        let a = g.row_payoffs;
        // ∂/∂p is (a00-a10)q + (a01-a11)(1-q), independent of p
        let slope_p = (a[0][0] - a[1][0]) * q + (a[0][1] - a[1][1]) * (1.0 - q);
        let fd_p = (f(p + h, q).0 - f(p - h, q).0) / (2.0 * h);
        assert!((fd_p - slope_p).abs() <= 1e-9 * slope_p.abs().max(1.0));
        // second differences vanish along each axis
        let second = f(p + h, q).0 - 2.0 * f(p, q).0 + f(p - h, q).0;
        assert!(second.abs() <= 1e-12 * f(p, q).0.abs().max(1.0) * 10.0);
        let second = f(p, q + h).1 - 2.0 * f(p, q).1 + f(p, q - h).1;
        assert!(second.abs() <= 1e-12 * f(p, q).1.abs().max(1.0) * 10.0);
    }
}

// ---- ewl ----

#[test]
fn classical_limit_reproduces_bimatrix() {
    let mut r = rng(7);
    let pure = [NamedStrategy::C, NamedStrategy::D];
    for _ in 0..100 {
        let m = random_matrix(&mut r);
        let g = payoff::extend_symmetric(&m);
        let cfg = GameConfig::new(0.0, d_base(), m).unwrap();
        for (i, sa) in pure.iter().enumerate() {
            for (j, sb) in pure.iter().enumerate() {
                let (_, p) = ewl::play_and_score(&cfg, &named_unitary(*sa), &named_unitary(*sb));
                let (ca, cb) = g.cell(i, j);
                assert!((p.a - ca).abs() <= 1e-12 && (p.b - cb).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn symmetric_play_gives_equal_payoffs() {
    let mut r = rng(8);
    for _ in 0..300 {
        let m = random_matrix(&mut r);
        let base = named_unitary([NamedStrategy::D, NamedStrategy::SigmaY][r.gen_range(0..2)]);
        let cfg = GameConfig::new(r.gen_range(0.0..=FRAC_PI_2), base, m).unwrap();
        let u = StrategyParams::new(r.gen_range(0.0..=PI), r.gen_range(0.0..=FRAC_PI_2)).unwrap();
        let u = ewl::strategy_unitary(&u);
        let (_, p) = ewl::play_and_score(&cfg, &u, &u);
        assert!((p.a - p.b).abs() <= 1e-12 * m.beta().abs().max(1.0));
    }
}

#[test]
fn global_phase_and_probability_conservation() {
    let mut r = rng(9);
    for _ in 0..300 {
        let cfg = GameConfig::new(
            r.gen_range(0.0..=FRAC_PI_2),
            d_base(),
            random_matrix(&mut r),
        )
        .unwrap();
        let (ua, ub) = (random_unitary2(&mut r), random_unitary2(&mut r));
        let before = ewl::outcome_probs(&ewl::play(&cfg, &ua, &ub));
        assert!((before.total() - 1.0).abs() <= 1e-12);
        let shifted = ua.with_global_phase(r.gen_range(0.0..2.0 * PI));
        let after = ewl::outcome_probs(&ewl::play(&cfg, &shifted, &ub));
        for (x, y) in before.as_array().iter().zip(after.as_array()) {
            assert!((x - y).abs() <= 1e-12);
        }
    }
}

#[test]
fn quasi_skew_cancels_hadamard_advantage() {
    let mut r = rng(10);
    let h = named_unitary(NamedStrategy::Hadamard);
    for _ in 0..100 {
        let gamma: f64 = r.gen_range(-3.0..5.0);
        let alpha = gamma + r.gen_range(0.1..5.0);
        let beta = (alpha + r.gen_range(0.1..5.0)).max(-gamma + 0.1);
        let skew = PayoffMatrix::new(alpha, beta, gamma, -beta).unwrap();
        let cfg = GameConfig::new(FRAC_PI_2, named_unitary(NamedStrategy::SigmaY), skew).unwrap();
        let (_, p) = ewl::play_and_score(&cfg, &h, &h);
        let expected = (skew.alpha() + skew.gamma()) / 4.0;
        assert!((p.a - expected).abs() <= 1e-12 * skew.beta().max(1.0));
        assert!((p.b - expected).abs() <= 1e-12 * skew.beta().max(1.0));
    }
}

// ---- equilibrium ----

fn pd_cfg(tau: f64) -> GameConfig {
    GameConfig::new(
        tau,
        d_base(),
        PayoffMatrix::new(3.0, 5.0, 1.0, 0.0).unwrap(),
    )
    .unwrap()
}

#[test]
fn best_response_dominates_every_grid_point() {
    let mut r = rng(11);
    let space = StrategySpace::plus_named(9, 5).unwrap();
    let grid = build_grid(&space);
    for _ in 0..20 {
        let cfg = GameConfig::new(
            r.gen_range(0.0..=FRAC_PI_2),
            d_base(),
            random_matrix(&mut r),
        )
        .unwrap();
        let opponent = grid[r.gen_range(0..grid.len())];
        for responder in [Player::A, Player::B] {
            let (_, best) = equilibrium::best_response(&cfg, &opponent, &space, responder);
            for s in &grid {
                let (_, p) = match responder {
                    Player::A => ewl::play_and_score(&cfg, &s.unitary(), &opponent.unitary()),
                    Player::B => ewl::play_and_score(&cfg, &opponent.unitary(), &s.unitary()),
                };
                let v = if responder == Player::A { p.a } else { p.b };
                assert!(best >= v);
            }
        }
    }
}

#[test]
fn verification_is_symmetric_under_player_swap() {
    let mut r = rng(12);
    let space = StrategySpace::plus_named(17, 9).unwrap();
    let grid = build_grid(&space);
    for _ in 0..20 {
        let cfg = GameConfig::new(
            r.gen_range(0.0..=FRAC_PI_2),
            d_base(),
            random_matrix(&mut r),
        )
        .unwrap();
        let s = grid[r.gen_range(0..grid.len())];
        let rep = equilibrium::verify_nash(&cfg, (s, s), &space, 1e-9);
        assert!((rep.max_unilateral_gain_a - rep.max_unilateral_gain_b).abs() <= 1e-10);
    }
}

#[test]
fn search_agrees_with_verification() {
    for tau in [0.0, FRAC_PI_4, FRAC_PI_2] {
        let cfg = pd_cfg(tau);
        let space = StrategySpace::plus_named(7, 4).unwrap();
        let grid = build_grid(&space);
        let found = equilibrium::search_equilibria(&cfg, &space, 1e-6).unwrap();
        let found_pairs: Vec<(Strategy, Strategy)> = found.iter().map(|r| r.pair).collect();
        let mut expected = Vec::new();
        for a in &grid {
            for b in &grid {
                let rep = equilibrium::verify_nash(&cfg, (*a, *b), &space, 1e-6);
                if rep.is_nash {
                    expected.push((*a, *b));
                }
            }
        }
        assert_eq!(found_pairs, expected, "tau = {tau}");
        for rep in &found {
            let again = equilibrium::verify_nash(&cfg, rep.pair, &space, 1e-6);
            assert!(again.is_nash);
            assert_eq!(again.max_unilateral_gain_a, rep.max_unilateral_gain_a);
            assert_eq!(again.max_unilateral_gain_b, rep.max_unilateral_gain_b);
        }
    }
}

#[test]
fn reports_do_not_depend_on_execution_mode() {
    let cfg = pd_cfg(FRAC_PI_2);
    let grid = build_grid(&StrategySpace::plus_named(17, 9).unwrap());
    let q: Strategy = NamedStrategy::Q.into();
    let seq = equilibrium::search_equilibria_in(Execution::Sequential, &cfg, &grid, 1e-6).unwrap();
    let def = equilibrium::search_equilibria_in(Execution::default(), &cfg, &grid, 1e-6).unwrap();
    assert_eq!(seq, def);
    assert_eq!(
        equilibrium::verify_nash_in(Execution::Sequential, &cfg, (q, q), &grid, 1e-9),
        equilibrium::verify_nash_in(Execution::default(), &cfg, (q, q), &grid, 1e-9)
    );
    let d: Strategy = NamedStrategy::D.into();
    assert_eq!(
        equilibrium::best_response_in(Execution::Sequential, &cfg, &d, &grid, Player::B),
        equilibrium::best_response_in(Execution::default(), &cfg, &d, &grid, Player::B)
    );
    assert_eq!(
        equilibrium::sweep_tau_in(Execution::Sequential, &cfg, (q, d), 33).unwrap(),
        equilibrium::sweep_tau_in(Execution::default(), &cfg, (q, d), 33).unwrap()
    );
    // and across repeated runs
    assert_eq!(
        seq,
        equilibrium::search_equilibria_in(Execution::default(), &cfg, &grid, 1e-6).unwrap()
    );
}

// ---- newcomb ----

#[test]
fn mixed_payoff_routes_coincide() {
    let mut r = rng(13);
    for _ in 0..50 {
        let m = random_matrix(&mut r);
        let p = r.gen_range(0.0..=1.0);
        let closed = newcomb::mixed_payoff(p, &m).unwrap();
        let density = newcomb::density_route_payoff(&newcomb::mixed_state(p).unwrap(), &m);
        assert!((closed - density).abs() <= 1e-12 * m.beta().abs().max(1.0));
    }
}

#[test]
fn mixed_payoff_is_affine_in_p() {
    let mut r = rng(14);
    let h = 1e-4;
    for _ in 0..50 {
        let m = random_matrix(&mut r);
        let p = r.gen_range(h..1.0 - h);
        let fd = (newcomb::mixed_payoff(p + h, &m).unwrap()
            - newcomb::mixed_payoff(p - h, &m).unwrap())
            / (2.0 * h);
        assert!(
            (fd - (m.delta() + m.beta()) / 2.0).abs() <= 1e-10 * m.beta().abs().max(1.0) * 10.0
        );
    }
}

#[test]
fn symmetric_quantum_play_is_always_predicted() {
    let cfg = pd_cfg(FRAC_PI_2);
    for n in [
        NamedStrategy::C,
        NamedStrategy::D,
        NamedStrategy::SigmaZ,
        NamedStrategy::Q,
    ] {
        let u = named_unitary(n);
        let probs = ewl::outcome_probs(&ewl::play(&cfg, &u, &u));
        assert!(
            (newcomb::prediction_accuracy(&probs) - 1.0).abs() <= 1e-12,
            "{n}"
        );
    }
}

#[test]
fn np_recommendation_matches_brute_force() {
    let mut r = rng(15);
    let opts = NewcombOptions {
        space: StrategySpace::family(3, 2).unwrap(),
        ..NewcombOptions::default()
    };
    for _ in 0..100 {
        let m = random_matrix(&mut r);
        let inst = NewcombInstance {
            box1_full: m.alpha(),
            both_when_full: m.beta(),
            box2_only: m.gamma(),
            penalty: m.delta(),
        };
        let a = m.as_matrix();
        let brute = (0..2)
            .find(|&i| (0..2).all(|j| a[i][j] >= a[1 - i][j]))
            .map(|i| newcomb::BOX_LABELS[i]);
        let report = newcomb::solve_np(&inst, &opts).unwrap();
        assert_eq!(Some(report.classical_recommendation.as_str()), brute);
    }
}
