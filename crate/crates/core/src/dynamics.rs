//! Detuning ramps and the number-resolved measurement protocol.
//!
//! [`propagate`] integrates `i d|psi>/dt = H_eff(delta(t)) |psi>` with the
//! classical fixed-step Runge-Kutta scheme. The integrator works with
//! `H - E_ref(t)`, where `E_ref` follows the ground energies at the ramp ends;
//! this only changes the global phase of the state. Norms are never
//! renormalized, so the reported drift is the accuracy monitor.
//!
//! The measurement protocol is idealized: hopping is switched off
//! instantaneously (the state is frozen as is), the polariton-to-photon
//! mapping is perfect and the number-selective qubit readout never errs, so a
//! shot is an exact sample of the on-site number distribution.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::math::{abs, ceil, sqrt};
use crate::model::{
    build_effective_hamiltonian, BasisSet, ModelParams, SparseOperator, SymmetricOperator,
};
use crate::observables::{fidelity, marginal_distribution, variance_polariton_number};
use crate::spectra::{ground_state, GroundState};
use crate::state::{Amplitude, ComplexState, StateVector};
use crate::{Error, Result};

/// Norm drift that aborts a propagation.
pub const MAX_NORM_DRIFT: f64 = 1e-4;

/// Drift the step-size suggestion aims for.
const TARGET_NORM_DRIFT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum RampShape {
    #[default]
    Linear,
    /// `3s^2 - 2s^3`, flat at both ends.
    Smoothstep,
}

impl RampShape {
    /// Ramp progress in `[0, 1]` at fraction `s` of the duration.
    pub fn progress(self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        match self {
            RampShape::Linear => s,
            RampShape::Smoothstep => s * s * (3.0 - 2.0 * s),
        }
    }
}

/// `delta` swept from `delta_start` to `delta_end` over `duration` (in
/// `1/g`) at fixed `delta_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RampSchedule {
    pub shape: RampShape,
    pub delta_start: f64,
    pub delta_end: f64,
    pub duration: f64,
    pub delta_c: f64,
}

impl RampSchedule {
    pub fn linear(delta_start: f64, delta_end: f64, duration: f64, delta_c: f64) -> Self {
        Self {
            shape: RampShape::Linear,
            delta_start,
            delta_end,
            duration,
            delta_c,
        }
    }

    pub fn delta_at(&self, t: f64) -> f64 {
        let p = self.shape.progress(t / self.duration);
        self.delta_start + (self.delta_end - self.delta_start) * p
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "duration",
                reason: alloc::format!("must be positive and finite, got {}", self.duration),
            });
        }
        for (name, v) in [
            ("delta_start", self.delta_start),
            ("delta_end", self.delta_end),
            ("delta_c", self.delta_c),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite".into(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    /// Number of equal intervals between stored snapshots (both ends are
    /// always stored).
    pub snapshots: usize,
    /// Diagonalize at every snapshot for the instantaneous-ground-state
    /// overlap.
    pub track_fidelity: bool,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            snapshots: 100,
            track_fidelity: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ComplexState>,
    /// Overlap squared with the instantaneous ground state; empty when not
    /// tracked.
    pub instantaneous_fidelity: Vec<f64>,
    pub norms: Vec<f64>,
    pub var_site0: Vec<f64>,
    /// Step actually used: `duration / steps`, never above the requested one.
    pub dt: f64,
    pub steps: usize,
    /// Largest `| ||psi|| - 1 |` over every step.
    pub max_norm_drift: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &ComplexState {
        self.states
            .last()
            .expect("trajectory has at least the initial state")
    }

    pub fn final_fidelity(&self) -> Option<f64> {
        self.instantaneous_fidelity.last().copied()
    }
}

/// `H_eff(delta) = H_0 + delta * Q`, with `Q` counting site-qubit excitations.
struct RampHamiltonian {
    base: SymmetricOperator,
    base_sparse: SparseOperator,
    qubits: Vec<f64>,
}

impl RampHamiltonian {
    fn new(params: &ModelParams, basis: &BasisSet) -> Result<Self> {
        let base = build_effective_hamiltonian(
            &ModelParams {
                delta: 0.0,
                ..params.clone()
            },
            basis,
        )?;
        let qubits = basis
            .states()
            .iter()
            .map(|s| s.site_qubits.iter().filter(|&&e| e).count() as f64)
            .collect();
        Ok(Self {
            base_sparse: base.to_sparse(),
            base,
            qubits,
        })
    }

    fn dense(&self, delta: f64) -> Result<SymmetricOperator> {
        self.base
            .add_scaled(&SymmetricOperator::from_diagonal(&self.qubits), delta)
    }

    fn ground(&self, delta: f64, basis: &BasisSet) -> Result<GroundState> {
        ground_state(&self.dense(delta)?, basis)
    }

    /// `out = -i (H(delta) - shift) x`.
    fn derivative(&self, delta: f64, shift: f64, x: &[Complex64], out: &mut [Complex64]) {
        self.base_sparse.matvec_into(x, out);
        for ((o, &xi), &q) in out.iter_mut().zip(x).zip(&self.qubits) {
            let hx = *o + xi * (delta * q - shift);
            *o = Complex64::new(hx.im, -hx.re);
        }
    }
}

/// Largest `|lambda| dt` the step-size helper allows, `lambda` ranging over
/// the spectrum measured from the ground energy.
pub const STEP_PHASE: f64 = 0.05;

/// Step resolving the full spectral width of `H_eff` at both ramp ends, capped
/// at `duration / 100`.
pub fn recommended_dt(
    basis: &BasisSet,
    params: &ModelParams,
    schedule: &RampSchedule,
) -> Result<f64> {
    schedule.validate()?;
    let params = ModelParams {
        delta_c: schedule.delta_c,
        ..params.clone()
    };
    params.validate_effective()?;
    let ham = RampHamiltonian::new(&params, basis)?;
    let mut width: f64 = 0.0;
    for delta in [schedule.delta_start, schedule.delta_end] {
        let values = crate::spectra::eigendecompose(&ham.dense(delta)?)?.values;
        width = width.max(values[values.len() - 1] - values[0]);
    }
    let cap = schedule.duration / 100.0;
    Ok(if width > 0.0 {
        cap.min(STEP_PHASE / width)
    } else {
        cap
    })
}

/// Evolves `initial` through `schedule` with steps of at most `dt`, storing
/// 100 snapshot intervals and the instantaneous ground-state fidelity.
pub fn propagate<A: Amplitude>(
    basis: &BasisSet,
    params: &ModelParams,
    initial: &StateVector<A>,
    schedule: &RampSchedule,
    dt: f64,
) -> Result<Trajectory> {
    propagate_with(
        basis,
        params,
        initial,
        schedule,
        dt,
        &PropagationOptions::default(),
    )
}

pub fn propagate_with<A: Amplitude>(
    basis: &BasisSet,
    params: &ModelParams,
    initial: &StateVector<A>,
    schedule: &RampSchedule,
    dt: f64,
    options: &PropagationOptions,
) -> Result<Trajectory> {
    propagate_complex(basis, params, &initial.to_complex(), schedule, dt, options)
}

fn propagate_complex(
    basis: &BasisSet,
    params: &ModelParams,
    initial: &ComplexState,
    schedule: &RampSchedule,
    dt: f64,
    options: &PropagationOptions,
) -> Result<Trajectory> {
    schedule.validate()?;
    initial.check_basis(basis)?;
    if abs(initial.norm() - 1.0) > crate::state::NORM_TOLERANCE {
        return Err(Error::NotNormalized(initial.norm()));
    }
    if params.per_site_delta.is_some() {
        return Err(Error::InvalidParameter {
            name: "per_site_delta",
            reason: "a ramp drives the global delta; per-site overrides cannot be swept".into(),
        });
    }
    let max_dt = schedule.duration / 100.0;
    if dt.is_nan() || dt <= 0.0 || dt > max_dt * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, max: max_dt });
    }
    let params = ModelParams {
        delta: schedule.delta_start,
        delta_c: schedule.delta_c,
        ..params.clone()
    };
    params.validate_effective()?;

    let ham = RampHamiltonian::new(&params, basis)?;
    let steps = ceil(schedule.duration / dt - 1e-9).max(1.0) as usize;
    let h = schedule.duration / steps as f64;
    let snapshots = options.snapshots.clamp(1, steps);

    let e_start = ham.ground(schedule.delta_start, basis)?.energy;
    let e_end = ham.ground(schedule.delta_end, basis)?.energy;
    let reference = |t: f64| {
        let p = schedule.shape.progress(t / schedule.duration);
        (schedule.delta_at(t), e_start + (e_end - e_start) * p)
    };

    let tag = basis.tag();
    let mut psi: Vec<Complex64> = initial.amplitudes().to_vec();
    let mut traj = Trajectory {
        times: Vec::with_capacity(snapshots + 1),
        states: Vec::with_capacity(snapshots + 1),
        instantaneous_fidelity: Vec::new(),
        norms: Vec::with_capacity(snapshots + 1),
        var_site0: Vec::with_capacity(snapshots + 1),
        dt: h,
        steps,
        max_norm_drift: 0.0,
    };
    let record = |traj: &mut Trajectory, t: f64, psi: &[Complex64]| -> Result<()> {
        let state = ComplexState::from_raw(tag, psi.to_vec());
        traj.norms.push(state.norm());
        traj.var_site0
            .push(variance_polariton_number(basis, &state, 0)?);
        if options.track_fidelity {
            let gs = ham.ground(schedule.delta_at(t), basis)?;
            traj.instantaneous_fidelity
                .push(fidelity(&gs.state, &state)?);
        }
        traj.times.push(t);
        traj.states.push(state);
        Ok(())
    };
    record(&mut traj, 0.0, &psi)?;

    let n = psi.len();
    let (mut k1, mut k2, mut k3, mut k4) = (
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
    );
    let mut tmp = vec![Complex64::default(); n];
    let mut next_snapshot = 1;
    for step in 0..steps {
        let t = step as f64 * h;
        let (d0, e0) = reference(t);
        let (dm, em) = reference(t + 0.5 * h);
        let (d1, e1) = reference(t + h);

        ham.derivative(d0, e0, &psi, &mut k1);
        for i in 0..n {
            tmp[i] = psi[i] + k1[i] * (0.5 * h);
        }
        ham.derivative(dm, em, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = psi[i] + k2[i] * (0.5 * h);
        }
        ham.derivative(dm, em, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = psi[i] + k3[i] * h;
        }
        ham.derivative(d1, e1, &tmp, &mut k4);
        for i in 0..n {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }

        let t_next = if step + 1 == steps {
            schedule.duration
        } else {
            (step + 1) as f64 * h
        };
        let drift = abs(sqrt(psi.iter().map(|a| a.norm_sqr()).sum()) - 1.0);
        traj.max_norm_drift = traj.max_norm_drift.max(drift);
        if drift > MAX_NORM_DRIFT || !drift.is_finite() {
            let factor = if drift.is_finite() {
                libm::pow(TARGET_NORM_DRIFT / drift, 0.25)
            } else {
                0.1
            };
            return Err(Error::NormDrift {
                time: t_next,
                drift,
                dt: h,
                suggested_dt: 0.9 * h * factor,
            });
        }
        if (step + 1) * snapshots >= next_snapshot * steps {
            record(&mut traj, t_next, &psi)?;
            next_snapshot += 1;
        }
    }
    Ok(traj)
}

/// Outcome of `shots` repetitions of the measurement protocol on one site.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeasurementRun {
    pub site: usize,
    pub shots: u64,
    pub seed: u64,
    /// `counts[l]` shots found `l` polaritons.
    pub counts: Vec<u64>,
    pub estimated_p: Vec<f64>,
    /// `sum l^2 p_l - (sum l p_l)^2` of the sampled frequencies.
    pub estimated_var: f64,
}

/// Samples the polariton number on `site` `shots` times with a ChaCha8
/// generator seeded by `seed`.
pub fn simulate_measurement_protocol<A: Amplitude>(
    basis: &BasisSet,
    state: &StateVector<A>,
    site: usize,
    shots: u64,
    seed: u64,
) -> Result<MeasurementRun> {
    if shots == 0 {
        return Err(Error::InvalidParameter {
            name: "shots",
            reason: "at least one shot is needed".into(),
        });
    }
    let dist = marginal_distribution(basis, state, site)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = sample_counts(&dist.probs, shots, &mut rng)?;
    Ok(run_from_counts(site, seed, counts))
}

fn sample_counts(probs: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    let sampler = WeightedIndex::new(probs).map_err(|e| Error::InvalidParameter {
        name: "probabilities",
        reason: alloc::format!("{e}"),
    })?;
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        counts[sampler.sample(rng)] += 1;
    }
    Ok(counts)
}

fn run_from_counts(site: usize, seed: u64, counts: Vec<u64>) -> MeasurementRun {
    let shots: u64 = counts.iter().sum();
    let estimated_p: Vec<f64> = counts.iter().map(|&c| c as f64 / shots as f64).collect();
    MeasurementRun {
        site,
        shots,
        seed,
        estimated_var: frequency_variance(&estimated_p),
        counts,
        estimated_p,
    }
}

fn frequency_variance(p: &[f64]) -> f64 {
    let (mut first, mut second) = (0.0, 0.0);
    for (l, &pl) in p.iter().enumerate() {
        first += l as f64 * pl;
        second += (l * l) as f64 * pl;
    }
    (second - first * first).max(0.0)
}

/// Bootstrap standard error of `run.estimated_var`: the spread of the
/// estimator over `resamples` multinomial redraws from the sampled
/// frequencies.
pub fn bootstrap_standard_error(run: &MeasurementRun, resamples: usize, seed: u64) -> Result<f64> {
    if resamples < 2 {
        return Err(Error::InvalidParameter {
            name: "resamples",
            reason: "at least two resamples are needed".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut estimates = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let counts = sample_counts(&run.estimated_p, run.shots, &mut rng)?;
        estimates.push(run_from_counts(run.site, seed, counts).estimated_var);
    }
    let mean = estimates.iter().sum::<f64>() / resamples as f64;
    let var = estimates
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / (resamples - 1) as f64;
    Ok(sqrt(var))
}

/// Smallest `|delta| / g` at which the dispersive photon-number splitting is
/// trusted.
pub const MIN_READOUT_DETUNING: f64 = 5.0;

/// Frequency, as an offset from the resonator frequency in units of `g`, at
/// which the site qubit flips only when its resonator holds `l` photons:
/// `delta + 2 l g^2 / delta`.
pub fn dispersive_drive_frequency(l: u32, params: &ModelParams) -> Result<f64> {
    let (delta, g) = (params.delta, params.g);
    let min = MIN_READOUT_DETUNING * abs(g);
    if delta.is_nan() || abs(delta) < min {
        return Err(Error::DispersiveReadout { delta, min });
    }
    Ok(delta + 2.0 * f64::from(l) * g * g / delta)
}

/// Physical inputs of [`timescale_report`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimescaleParams {
    /// Coupler coupling `g_c / 2 pi` in Hz.
    pub g_c_hz: f64,
    /// Coupler detunings in units of `g_c`.
    pub delta_c_over_g_c: Vec<f64>,
    pub polariton_lifetime_ns: f64,
}

impl Default for TimescaleParams {
    fn default() -> Self {
        Self {
            g_c_hz: 200e6,
            delta_c_over_g_c: vec![10.0, 100.0],
            polariton_lifetime_ns: 2000.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimescaleRow {
    pub delta_c_over_g_c: f64,
    /// `kappa` in rad/ns.
    pub kappa_per_ns: f64,
    pub hopping_time_ns: f64,
    /// `tau_p * kappa`.
    pub lifetime_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimescaleReport {
    pub g_c_hz: f64,
    pub polariton_lifetime_ns: f64,
    pub rows: Vec<TimescaleRow>,
    pub min_lifetime_ratio: f64,
    /// Every hopping time is at least ten times shorter than the lifetime.
    pub well_separated: bool,
}

/// Hopping time `1/kappa` in nanoseconds, `kappa = g_c^2 / delta_c` with
/// `g_c = 2 pi g_c_hz`, compared with the polariton lifetime.
pub fn timescale_report(params: &TimescaleParams) -> TimescaleReport {
    let g_c_per_ns = 2.0 * core::f64::consts::PI * params.g_c_hz * 1e-9;
    let rows: Vec<TimescaleRow> = params
        .delta_c_over_g_c
        .iter()
        .map(|&r| {
            let kappa = g_c_per_ns / r;
            TimescaleRow {
                delta_c_over_g_c: r,
                kappa_per_ns: kappa,
                hopping_time_ns: 1.0 / kappa,
                lifetime_ratio: params.polariton_lifetime_ns * kappa,
            }
        })
        .collect();
    let min_lifetime_ratio = rows
        .iter()
        .map(|r| r.lifetime_ratio)
        .fold(f64::INFINITY, f64::min);
    TimescaleReport {
        g_c_hz: params.g_c_hz,
        polariton_lifetime_ns: params.polariton_lifetime_ns,
        well_separated: min_lifetime_ratio >= 10.0,
        rows,
        min_lifetime_ratio,
    }
}
