//! Hamiltonians as operator actions on basis states, and their matrices.
//!
//! Both Hamiltonians are written in the frame rotating at the resonator
//! frequency, so the photon energy drops out and the sector energies are
//! shifted by a constant. The effective model additionally sits in the frame
//! shifted by `-2 kappa` per excitation, which moves the ac Stark shift of the
//! photons into `delta' = delta + 2 g_c^2 / delta_c`.

use alloc::vec;
use alloc::vec::Vec;

use super::{BasisSet, BasisState, ModelParams, SymmetricOperator};
use crate::math::sqrt;
use crate::{Error, Result};

/// Which pieces of the effective Hamiltonian to include.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EffectiveTerms {
    All,
    HoppingOnly,
    RepulsionOnly,
}

/// Image of one basis state under an operator: `(state, amplitude)` pairs,
/// possibly with repeats.
pub(crate) type Action = Vec<(BasisState, f64)>;

/// `-kappa_j (a_{j+1}^dag a_j + a_j^dag a_{j+1})` for every junction `j`.
fn push_hopping(params: &ModelParams, state: &BasisState, out: &mut Action) {
    let n = state.n_sites();
    for j in 0..n {
        let kappa = params.junction_kappa(j);
        if kappa == 0.0 {
            continue;
        }
        let k = (j + 1) % n;
        for (from, to) in [(j, k), (k, j)] {
            if state.photons[from] == 0 {
                continue;
            }
            let mut next = state.clone();
            let mut amp = sqrt(f64::from(next.photons[from]));
            next.photons[from] -= 1;
            amp *= sqrt(f64::from(next.photons[to] + 1));
            next.photons[to] += 1;
            out.push((next, -kappa * amp));
        }
    }
}

/// `g_i (sigma_i^+ a_i + sigma_i^- a_i^dag)`.
fn push_jaynes_cummings(params: &ModelParams, state: &BasisState, out: &mut Action) {
    for i in 0..state.n_sites() {
        let g = params.site_g(i);
        let mut next = state.clone();
        if state.site_qubits[i] {
            next.site_qubits[i] = false;
            next.photons[i] += 1;
            out.push((next, g * sqrt(f64::from(state.photons[i] + 1))));
        } else if state.photons[i] > 0 {
            next.site_qubits[i] = true;
            next.photons[i] -= 1;
            out.push((next, g * sqrt(f64::from(state.photons[i]))));
        }
    }
}

/// `g_c,i (sigma_ci^+ (a_i + a_{i+1}) + h.c.)`.
fn push_coupler_exchange(params: &ModelParams, state: &BasisState, out: &mut Action) {
    let n = state.n_sites();
    let couplers = state
        .coupler_qubits
        .as_ref()
        .expect("coupler exchange needs coupler qubits");
    for j in 0..n {
        let gc = params.junction_gc(j);
        if gc == 0.0 {
            continue;
        }
        for site in [j, (j + 1) % n] {
            let mut next = state.clone();
            let c = next.coupler_qubits.as_mut().unwrap();
            if couplers[j] {
                c[j] = false;
                next.photons[site] += 1;
                out.push((next, gc * sqrt(f64::from(state.photons[site] + 1))));
            } else if state.photons[site] > 0 {
                c[j] = true;
                next.photons[site] -= 1;
                out.push((next, gc * sqrt(f64::from(state.photons[site]))));
            }
        }
    }
}

pub(crate) fn effective_action(
    params: &ModelParams,
    state: &BasisState,
    terms: EffectiveTerms,
) -> Action {
    let mut out = Vec::new();
    if terms != EffectiveTerms::RepulsionOnly {
        push_hopping(params, state, &mut out);
    }
    if terms != EffectiveTerms::HoppingOnly {
        let mut diag = 0.0;
        for i in 0..state.n_sites() {
            if state.site_qubits[i] {
                diag += params.delta_prime(i);
            }
            let offset = params.photon_offset(i);
            if offset != 0.0 {
                diag += offset * f64::from(state.photons[i]);
            }
        }
        out.push((state.clone(), diag));
        push_jaynes_cummings(params, state, &mut out);
    }
    out
}

pub(crate) fn full_action(params: &ModelParams, state: &BasisState) -> Action {
    let mut out = Vec::new();
    let couplers = state
        .coupler_qubits
        .as_ref()
        .expect("full model needs couplers");
    let mut diag = 0.0;
    for (i, &coupler) in couplers.iter().enumerate().take(state.n_sites()) {
        if state.site_qubits[i] {
            diag += params.site_delta(i);
        }
        if coupler {
            diag += params.junction_delta_c(i);
        }
    }
    out.push((state.clone(), diag));
    push_jaynes_cummings(params, state, &mut out);
    push_coupler_exchange(params, state, &mut out);
    out
}

/// Assembles the matrix column by column from `action`, keeping the lower
/// triangle and mirroring it so the result is exactly symmetric.
pub(crate) fn assemble<F>(basis: &BasisSet, action: F) -> Result<SymmetricOperator>
where
    F: Fn(&BasisState) -> Action,
{
    let dim = basis.len();
    let mut lower = vec![0.0; dim * dim];
    for (col, state) in basis.states().iter().enumerate() {
        for (image, amp) in action(state) {
            let row = basis.index_of(&image).ok_or(Error::SectorLeak)?;
            if row >= col {
                lower[row * dim + col] += amp;
            }
        }
    }
    Ok(SymmetricOperator::from_lower(dim, lower))
}

fn check_effective(params: &ModelParams, basis: &BasisSet) -> Result<()> {
    if basis.sector().include_couplers {
        return Err(Error::WrongBasisKind {
            expected_couplers: false,
        });
    }
    check_sites(params, basis)?;
    params.validate_effective()
}

fn check_sites(params: &ModelParams, basis: &BasisSet) -> Result<()> {
    if params.n_sites != basis.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: params.n_sites,
            found: basis.n_sites(),
        });
    }
    Ok(())
}

/// Effective Hamiltonian: photon hopping around the ring plus local
/// Jaynes-Cummings terms at detuning `delta'`.
pub fn build_effective_hamiltonian(
    params: &ModelParams,
    basis: &BasisSet,
) -> Result<SymmetricOperator> {
    check_effective(params, basis)?;
    assemble(basis, |s| effective_action(params, s, EffectiveTerms::All))
}

/// Only the hopping part `-kappa sum (a_{i+1}^dag a_i + h.c.)`.
pub fn build_hopping_hamiltonian(
    params: &ModelParams,
    basis: &BasisSet,
) -> Result<SymmetricOperator> {
    check_effective(params, basis)?;
    assemble(basis, |s| {
        effective_action(params, s, EffectiveTerms::HoppingOnly)
    })
}

/// Only the on-site part: `delta' |e><e|` plus the Jaynes-Cummings coupling.
pub fn build_repulsion_hamiltonian(
    params: &ModelParams,
    basis: &BasisSet,
) -> Result<SymmetricOperator> {
    check_effective(params, basis)?;
    assemble(basis, |s| {
        effective_action(params, s, EffectiveTerms::RepulsionOnly)
    })
}

/// Full Hamiltonian with explicit junction qubits at detuning `delta_c`.
pub fn build_full_hamiltonian(params: &ModelParams, basis: &BasisSet) -> Result<SymmetricOperator> {
    if !basis.sector().include_couplers {
        return Err(Error::WrongBasisKind {
            expected_couplers: true,
        });
    }
    check_sites(params, basis)?;
    params.validate()?;
    assemble(basis, |s| full_action(params, s))
}

/// Diagonal polariton-number operator `N_i = a_i^dag a_i + |e><e|_i`.
pub fn build_number_operator(site: usize, basis: &BasisSet) -> Result<SymmetricOperator> {
    basis.check_site(site)?;
    let diag: Vec<f64> = basis
        .states()
        .iter()
        .map(|s| f64::from(s.polariton_number(site)))
        .collect();
    Ok(SymmetricOperator::from_diagonal(&diag))
}
