use num_complex::Complex64;
use qbattery::bessel::bessel_j;
use qbattery::dynamics::modulation_factor;
use qbattery::oracle::{bessel_j_zero, unmodulated_survival};
use qbattery::{
    decoherence_free_check, jacobi_anger_phase, solve_general, solve_survival,
    solve_survival_quadrature, Error, GeneralParams, ModelParams, QubitDrive, SolverConfig,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_c2_population(p: &ModelParams, cfg: &SolverConfig) -> f64 {
    let traj = solve_survival(p, cfg).unwrap();
    traj.c2.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max)
}

#[test]
fn unmodulated_runs_follow_the_closed_form() {
    let cfg = SolverConfig::default();
    for &rabi in &[0.1, 1.0, 5.0] {
        for &detuning in &[0.0, 1.0, -1.0, 5.0, -5.0] {
            let traj = solve_survival(&ModelParams::new(rabi).with_detuning(detuning), &cfg).unwrap();
            let err = traj
                .times
                .iter()
                .zip(traj.survival.as_ref().unwrap())
                .map(|(&t, e)| (e - unmodulated_survival(rabi, detuning, t)).norm())
                .fold(0.0, f64::max);
            assert!(err <= 1e-8, "R = {rabi}, δ = {detuning}: {err:e}");
            traj.check_invariants().unwrap();
        }
    }
}

#[test]
fn adaptive_and_quadrature_agree_off_resonance() {
    let p = ModelParams::new(2.0).with_detuning(1.5).with_modulation(3.0, 2.0);
    let cfg = SolverConfig::default().with_horizon(10.0);
    let ode = solve_survival(&p, &cfg).unwrap();
    let quad = solve_survival_quadrature(&p, &cfg).unwrap();
    let dist = ode.survival_distance(&quad).unwrap();
    assert!(dist <= 1e-6, "{dist:e}");
    quad.check_invariants().unwrap();
}

#[test]
fn general_solver_reduces_to_the_survival_form() {
    // Unequal couplings and a superposed start exercise every term of the
    // reconstruction.
    let p = ModelParams::new(3.0)
        .with_modulation(4.0, 1.0)
        .with_couplings(0.6, 0.8)
        .with_initial(c(0.8, 0.0), c(0.0, 0.6));
    let cfg = SolverConfig::default().with_horizon(8.0);
    let reduced = solve_survival(&p, &cfg).unwrap();
    let general = solve_general(&p.to_general(), &cfg, p.c01, p.c02).unwrap();
    let dist = reduced.amplitude_distance(&general).unwrap();
    assert!(dist <= 1e-5, "{dist:e}");
}

#[test]
fn qubit_population_tracks_the_survival_amplitude() {
    // For r1 = r2 and a charger-only start, |c1|² + |c2|² = (1 + |E|²) / 2.
    let p = ModelParams::new(5.0).with_modulation(10.0, 1.0);
    let traj = solve_survival(&p, &SolverConfig::default()).unwrap();
    for ((a, b), e) in traj.c1.iter().zip(&traj.c2).zip(traj.survival.as_ref().unwrap()) {
        let lhs = a.norm_sqr() + b.norm_sqr();
        assert!((lhs - (1.0 + e.norm_sqr()) / 2.0).abs() < 1e-12);
    }
}

#[test]
fn dark_state_is_invariant() {
    let cfg = SolverConfig::default().with_horizon(10.0);
    let cases = [
        ModelParams::new(5.0).with_modulation(10.0, 1.0).with_couplings(0.6, 0.8),
        ModelParams::new(1.0).with_couplings(1.0, 0.0),
        ModelParams::new(0.1).with_detuning(2.0),
    ];
    for p in &cases {
        let deviation = decoherence_free_check(p, &cfg).unwrap();
        assert!(deviation <= 1e-6, "{p:?}: {deviation:e}");
    }
}

#[test]
fn uncoupled_battery_keeps_its_amplitude() {
    let g = GeneralParams {
        charger: QubitDrive { detuning: 0.0, mod_amplitude: 10.0, mod_frequency: 1.0 },
        battery: QubitDrive::resonant(),
        mu1: 1.0,
        mu2: 0.0,
        rabi: 5.0,
    };
    let traj = solve_general(&g, &SolverConfig::default().with_horizon(5.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
    assert!(traj.c2.iter().all(|a| a.norm() == 0.0));
    assert!(traj.c1.last().unwrap().norm() < traj.c1[0].norm());
}

#[test]
fn distinct_qubits_stay_normalized() {
    let g = GeneralParams {
        charger: QubitDrive { detuning: 1.0, mod_amplitude: 5.0, mod_frequency: 2.0 },
        battery: QubitDrive { detuning: -0.5, mod_amplitude: 2.0, mod_frequency: 3.0 },
        mu1: 2.0,
        mu2: 1.0,
        rabi: 4.0,
    };
    let traj = solve_general(&g, &SolverConfig::default().with_horizon(6.0), c(0.6, 0.0), c(0.0, -0.8)).unwrap();
    traj.check_invariants().unwrap();
    let last = traj.c1.last().unwrap().norm_sqr() + traj.c2.last().unwrap().norm_sqr();
    assert!(last < 1.0);
}

#[test]
fn fast_modulation_averages_out() {
    // Far above every other rate the phase averages to J_0(d/Ω) ≈ 1.
    let cfg = SolverConfig::default();
    let fast = solve_survival(&ModelParams::new(5.0).with_modulation(10.0, 1000.0), &cfg).unwrap();
    let plain = solve_survival(&ModelParams::new(5.0), &cfg).unwrap();
    let dist = fast.survival_distance(&plain).unwrap();
    assert!(dist <= 1e-2, "{dist:e}");
}

#[test]
fn bessel_zero_suppresses_transfer() {
    let cfg = SolverConfig::default();
    let z = bessel_j_zero(0, 2.0, 3.0).unwrap();
    let plain = max_c2_population(&ModelParams::new(5.0), &cfg);
    let mut previous = plain;
    for &omega in &[20.0, 40.0] {
        let at_zero = max_c2_population(&ModelParams::new(5.0).with_modulation(z * omega, omega), &cfg);
        assert!(at_zero < previous, "Ω = {omega}: {at_zero} vs {previous}");
        previous = at_zero;
    }
    assert!(previous < 0.1 * plain);
}

#[test]
fn jacobi_anger_series_converges() {
    let z0 = bessel_j_zero(0, 2.0, 3.0).unwrap();
    assert!(bessel_j(0, z0).abs() < 1e-14);
    assert!(bessel_j(0, 2.404826).abs() < 1e-6);

    let omega = 0.7;
    let period = 2.0 * std::f64::consts::PI / omega;
    for &z in &[0.1, 1.0, 2.404826, 5.0, 7.5, 10.0] {
        let worst = (0..=500)
            .map(|k| {
                let t = period * k as f64 / 500.0;
                (jacobi_anger_phase(z, omega, t, 40) - modulation_factor(z * omega, omega, t)).norm()
            })
            .fold(0.0, f64::max);
        assert!(worst <= 1e-10, "z = {z}: {worst:e}");
    }
    // Too few terms visibly misses the large-index sidebands.
    let short = jacobi_anger_phase(10.0, 1.0, 0.4, 5) - modulation_factor(10.0, 1.0, 0.4);
    assert!(short.norm() > 1e-3);
}

#[test]
fn flipped_memory_sign_is_detected() {
    let p = ModelParams::new(1.0);
    let cfg = SolverConfig::default().with_horizon(5.0);
    let traj = qbattery::fault::solve_survival_flipped(&p, &cfg).unwrap();
    assert!(matches!(traj.check_invariants(), Err(Error::Validation(_))));
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let p = ModelParams::new(5.0).with_modulation(10.0, 0.5);
    let cfg = SolverConfig::default().with_horizon(5.0);
    assert_eq!(solve_survival(&p, &cfg).unwrap(), solve_survival(&p, &cfg).unwrap());
}

#[test]
fn budget_exhaustion_is_a_solver_failure() {
    let p = ModelParams::new(5.0).with_modulation(10.0, 5.0);
    let cfg = SolverConfig { max_steps: 10, ..Default::default() };
    match solve_survival(&p, &cfg) {
        Err(Error::SolverFailure { last_good_time, .. }) => assert!(last_good_time < cfg.t_max),
        other => panic!("expected a solver failure, got {other:?}"),
    }
}
