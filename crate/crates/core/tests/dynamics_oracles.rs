use jch_core::dynamics::{
    bootstrap_standard_error, propagate, propagate_with, recommended_dt,
    simulate_measurement_protocol, PropagationOptions, RampSchedule,
};
use jch_core::observables::{expectation, fidelity, variance_polariton_number};
use jch_core::spectra::{analytic_mi_state, analytic_sf_state, ground_state};
use jch_core::{
    build_effective_hamiltonian, enumerate_basis, BasisSet, Complex64, ComplexState, ModelParams,
    SectorSpec,
};

fn three_sites() -> BasisSet {
    enumerate_basis(3, SectorSpec::effective(3))
}

fn ramp_fidelity(duration_over_kappa: f64) -> f64 {
    let basis = three_sites();
    let delta_c = 10.0;
    let params = ModelParams::uniform(3, -2.0, delta_c);
    let kappa = params.kappa();
    let start = ground_state(
        &build_effective_hamiltonian(&params, &basis).unwrap(),
        &basis,
    )
    .unwrap();
    let duration = duration_over_kappa / kappa;
    let schedule = RampSchedule::linear(-2.0, 10.0, duration, delta_c);
    let dt = recommended_dt(&basis, &params, &schedule).unwrap();
    let traj = propagate(&basis, &params, &start.state, &schedule, dt).unwrap();
    assert!(traj.max_norm_drift <= 1e-6, "drift {}", traj.max_norm_drift);
    assert!(traj.norms.iter().all(|n| (n - 1.0).abs() <= 1e-6));
    traj.final_fidelity().unwrap()
}

#[test]
fn stationary_eigenstate_stays_put() {
    let basis = three_sites();
    let params = ModelParams::uniform(3, 1.0, 10.0);
    let gs = ground_state(
        &build_effective_hamiltonian(&params, &basis).unwrap(),
        &basis,
    )
    .unwrap();
    let schedule = RampSchedule::linear(1.0, 1.0, 1.0, 10.0);
    let traj = propagate(&basis, &params, &gs.state, &schedule, 0.01).unwrap();
    assert!((traj.final_fidelity().unwrap() - 1.0).abs() <= 1e-9);
    assert!((fidelity(&gs.state, traj.final_state()).unwrap() - 1.0).abs() <= 1e-9);
}

#[test]
fn slow_ramp_follows_ground_state() {
    let fast = ramp_fidelity(0.5);
    let f5 = ramp_fidelity(5.0);
    let f20 = ramp_fidelity(20.0);
    let f50 = ramp_fidelity(50.0);
    assert!(f50 >= 0.99, "{f50}");
    assert!(fast < f50);
    assert!(f5 <= f20 && f20 <= f50, "{f5} {f20} {f50}");
}

#[test]
fn ramp_turns_mott_into_superfluid_statistics() {
    let basis = three_sites();
    let params = ModelParams::uniform(3, -2.0, 10.0);
    let start = analytic_mi_state(&basis, &params).unwrap();
    let schedule = RampSchedule::linear(-2.0, 10.0, 500.0, 10.0);
    let traj = propagate(&basis, &params, &start, &schedule, 0.02).unwrap();
    assert!(traj.var_site0[0] < 1e-12);
    assert!(*traj.var_site0.last().unwrap() > 0.6);
}

fn final_state(dt: f64) -> ComplexState {
    let basis = enumerate_basis(2, SectorSpec::effective(2));
    let params = ModelParams::uniform(2, -2.0, 10.0);
    let start = analytic_mi_state(&basis, &params).unwrap();
    let schedule = RampSchedule::linear(-2.0, 10.0, 10.0, 10.0);
    let opts = PropagationOptions {
        snapshots: 1,
        track_fidelity: false,
    };
    let traj = propagate_with(&basis, &params, &start, &schedule, dt, &opts).unwrap();
    traj.final_state().clone()
}

fn distance(a: &ComplexState, b: &ComplexState) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[test]
fn integrator_is_fourth_order() {
    let dt = 0.02;
    let reference = final_state(dt / 4.0);
    let coarse = distance(&final_state(dt), &reference);
    let fine = distance(&final_state(dt / 2.0), &reference);
    let ratio = coarse / fine;
    assert!(
        (12.0..=20.0).contains(&ratio),
        "ratio {ratio} ({coarse:e} / {fine:e})"
    );
}

#[test]
fn constant_schedule_conserves_energy() {
    let basis = three_sites();
    let params = ModelParams::uniform(3, -2.0, 10.0);
    let h = build_effective_hamiltonian(&params, &basis).unwrap();
    // not an eigenstate, so the dynamics are nontrivial
    let start = analytic_mi_state(&basis, &params).unwrap();
    let schedule = RampSchedule::linear(-2.0, -2.0, 100.0, 10.0);
    let traj = propagate(&basis, &params, &start, &schedule, 0.002).unwrap();
    let e0 = expectation(&traj.states[0], &h).unwrap();
    let worst = traj
        .states
        .iter()
        .map(|s| (expectation(s, &h).unwrap() - e0).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst:e}");
    assert!(traj.max_norm_drift <= 1e-6);
    // the state did move
    assert!(fidelity(&traj.states[0], traj.final_state()).unwrap() < 1.0 - 1e-6);
}

#[test]
fn sampled_variance_is_unbiased() {
    let basis = three_sites();
    let sf = analytic_sf_state(&basis).unwrap();
    let exact = 2.0 / 3.0;
    let estimates: Vec<f64> = (0..100u64)
        .map(|seed| {
            simulate_measurement_protocol(&basis, &sf, 0, 1000, seed)
                .unwrap()
                .estimated_var
        })
        .collect();
    let mean = estimates.iter().sum::<f64>() / 100.0;
    let sd = (estimates.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 99.0).sqrt();
    let standard_error = sd / 10.0;
    assert!(
        (mean - exact).abs() <= 3.0 * standard_error,
        "{mean} ± {standard_error}"
    );
}

#[test]
fn ten_thousand_shots_within_bootstrap_error() {
    let basis = three_sites();
    let sf = analytic_sf_state(&basis).unwrap();
    let run = simulate_measurement_protocol(&basis, &sf, 2, 10_000, 2024).unwrap();
    let se = bootstrap_standard_error(&run, 400, 7).unwrap();
    assert!(se > 0.0 && se < 0.05);
    assert!((run.estimated_var - 2.0 / 3.0).abs() <= 5.0 * se);
    let again = simulate_measurement_protocol(&basis, &sf, 2, 10_000, 2024).unwrap();
    assert_eq!(run, again);
}

#[test]
fn propagated_state_statistics_match_exact_marginals() {
    let basis = three_sites();
    let params = ModelParams::uniform(3, 4.0, 10.0);
    let gs = ground_state(
        &build_effective_hamiltonian(&params, &basis).unwrap(),
        &basis,
    )
    .unwrap();
    let phased: Vec<Complex64> = gs
        .state
        .amplitudes()
        .iter()
        .map(|&a| Complex64::new(0.0, a))
        .collect();
    let state = ComplexState::new(&basis, phased).unwrap();
    let exact = variance_polariton_number(&basis, &state, 1).unwrap();
    let run = simulate_measurement_protocol(&basis, &state, 1, 20_000, 5).unwrap();
    let se = bootstrap_standard_error(&run, 200, 1).unwrap();
    assert!((run.estimated_var - exact).abs() <= 5.0 * se);
}
