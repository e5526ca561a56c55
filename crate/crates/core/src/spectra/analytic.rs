//! Closed-form single-site spectrum and the two limiting many-body states.

use alloc::format;
use alloc::vec::Vec;

use crate::math::{atan, cos, sin, sqrt};
use crate::model::{BasisSet, ModelParams};
use crate::state::RealState;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }
}

/// Eigenstate `|n, +/->` of one Jaynes-Cummings site.
///
/// `|n,+> = sin(theta) |n-1,e> + cos(theta) |n,g>` and
/// `|n,-> = cos(theta) |n-1,e> - sin(theta) |n,g>`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolaritonLevel {
    pub n: u32,
    pub branch: Branch,
    pub energy: f64,
    pub mixing_angle: f64,
}

/// `E_n = delta'/2 +/- sqrt((delta'/2)^2 + n g^2)` and the mixing angle
/// `tan(theta_n) = (delta'/2 + sqrt((delta'/2)^2 + n g^2)) / (sqrt(n) g)`.
///
/// The vacuum `|0,->` has energy 0 and angle 0; it has no upper partner.
pub fn polariton_level(n: u32, branch: Branch, delta_prime: f64, g: f64) -> Result<PolaritonLevel> {
    if n == 0 {
        return match branch {
            Branch::Lower => Ok(PolaritonLevel {
                n,
                branch,
                energy: 0.0,
                mixing_angle: 0.0,
            }),
            Branch::Upper => Err(Error::UpperBranchVacuum),
        };
    }
    let half = 0.5 * delta_prime;
    let root = sqrt(half * half + f64::from(n) * g * g);
    Ok(PolaritonLevel {
        n,
        branch,
        energy: half + branch.sign() * root,
        mixing_angle: atan((half + root) / (sqrt(f64::from(n)) * g)),
    })
}

/// Lower-branch energy, written so that large positive `delta'` keeps its
/// precision.
fn lower_energy(n: u32, delta_prime: f64, g: f64) -> f64 {
    let half = 0.5 * delta_prime;
    let coupling = f64::from(n) * g * g;
    let root = sqrt(half * half + coupling);
    if half > 0.0 {
        -coupling / (half + root)
    } else {
        half - root
    }
}

/// On-site repulsion `U_eff(1) = E_2^- - 2 E_1^-`, i.e.
/// `-delta'/2 + sqrt(delta'^2 + 4 g^2) - sqrt((delta'/2)^2 + 2 g^2)`.
///
/// For positive `delta'` the difference is evaluated in a cancellation-free
/// form, so the result stays positive as `delta'` grows.
pub fn u_eff(delta_prime: f64, g: f64) -> f64 {
    let half = 0.5 * delta_prime;
    if half > 0.0 {
        let g2 = g * g;
        let r1 = sqrt(half * half + g2);
        let r2 = sqrt(half * half + 2.0 * g2);
        2.0 * g2 * g2 / ((r1 + r2) * (half + r1) * (half + r2))
    } else {
        lower_energy(2, delta_prime, g) - 2.0 * lower_energy(1, delta_prime, g)
    }
}

/// Hopping rate `kappa = g_c^2 / delta_c`; `delta_c` must be positive.
pub fn kappa(g_c: f64, delta_c: f64) -> Result<f64> {
    if delta_c > 0.0 {
        Ok(g_c * g_c / delta_c)
    } else {
        Err(Error::NonPositiveDetuning(delta_c))
    }
}

/// Single-photon band `-2 kappa cos(2 pi k / n)`, `k = 0..n`.
pub fn hopping_band(n_sites: usize, kappa: f64) -> Vec<f64> {
    (0..n_sites)
        .map(|k| -2.0 * kappa * cos(core::f64::consts::TAU * k as f64 / n_sites as f64))
        .collect()
}

fn check_unit_filling(basis: &BasisSet) -> Result<()> {
    let sector = basis.sector();
    if sector.include_couplers || sector.n_total as usize != basis.n_sites() {
        return Err(Error::SectorMismatch(format!(
            "expected a coupler-free sector with one excitation per site ({} sites), got n_total = {}{}",
            basis.n_sites(),
            sector.n_total,
            if sector.include_couplers { " with couplers" } else { "" }
        )));
    }
    Ok(())
}

/// Product of lower polaritons `(x)_i |1,->_i` at each site's `delta'`.
pub fn analytic_mi_state(basis: &BasisSet, params: &ModelParams) -> Result<RealState> {
    check_unit_filling(basis)?;
    if params.n_sites != basis.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: params.n_sites,
            found: basis.n_sites(),
        });
    }
    let site_amps: Vec<(f64, f64)> = (0..basis.n_sites())
        .map(|i| {
            let theta = polariton_level(1, Branch::Lower, params.delta_prime(i), params.site_g(i))
                .map(|l| l.mixing_angle)?;
            // (amplitude on |1,g>, amplitude on |0,e>)
            Ok((-sin(theta), cos(theta)))
        })
        .collect::<Result<_>>()?;
    let amplitudes = basis
        .states()
        .iter()
        .map(|s| {
            site_amps
                .iter()
                .enumerate()
                .map(
                    |(i, &(on_photon, on_qubit))| match (s.photons[i], s.site_qubits[i]) {
                        (1, false) => on_photon,
                        (0, true) => on_qubit,
                        _ => 0.0,
                    },
                )
                .product()
        })
        .collect();
    RealState::normalized(basis, amplitudes)
}

/// `(1/sqrt(n!)) (n^{-1/2} sum_i a_i^dag)^n |vac>` with `n` photons on `n`
/// sites and every qubit in its ground state.
pub fn analytic_sf_state(basis: &BasisSet) -> Result<RealState> {
    check_unit_filling(basis)?;
    let n = basis.n_sites();
    let log_fact = |k: u32| (1..=k).map(|x| libm::log(f64::from(x))).sum::<f64>();
    let log_prefactor = log_fact(n as u32) - (n as f64) * libm::log(n as f64);
    let amplitudes = basis
        .states()
        .iter()
        .map(|s| {
            if s.site_qubits.iter().any(|&q| q) {
                return 0.0;
            }
            // sqrt(n! / prod n_i!) * n^{-n/2}
            let log_sq = log_prefactor - s.photons.iter().map(|&k| log_fact(k)).sum::<f64>();
            libm::exp(0.5 * log_sq)
        })
        .collect();
    RealState::normalized(basis, amplitudes)
}
