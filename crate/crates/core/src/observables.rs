//! Expectation values and on-site number statistics.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{BasisSet, SymmetricOperator};
use crate::state::{Amplitude, StateVector};
use crate::{Error, Result};

/// Variances down to this far below zero are rounding and clamp to 0.
pub const VARIANCE_ROUNDING: f64 = 1e-12;

/// Probabilities `p_l` of finding `l` polaritons on `site`, `l = 0..=n_total`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NumberDistribution {
    pub site: usize,
    pub probs: Vec<f64>,
}

impl NumberDistribution {
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(l, p)| l as f64 * p)
            .sum()
    }

    /// `sum l^2 p_l - (sum l p_l)^2`, clamped like
    /// [`variance_polariton_number`].
    pub fn variance(&self) -> Result<f64> {
        let second: f64 = self
            .probs
            .iter()
            .enumerate()
            .map(|(l, p)| (l * l) as f64 * p)
            .sum();
        let mean = self.mean();
        clamp_variance(second - mean * mean)
    }
}

/// `<psi| A |psi>` for a real symmetric `A`.
pub fn expectation<A: Amplitude>(state: &StateVector<A>, op: &SymmetricOperator) -> Result<f64> {
    if op.dim() != state.len() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: state.len(),
        });
    }
    let amps = state.amplitudes();
    let mut total = 0.0;
    for (i, &ai) in amps.iter().enumerate() {
        let row = op.row(i);
        let mut acc = 0.0;
        for (j, &aj) in amps.iter().enumerate() {
            if row[j] != 0.0 {
                acc += row[j] * ai.re_conj_mul(aj);
            }
        }
        total += acc;
    }
    Ok(total)
}

/// Mean polariton number on `site`.
pub fn mean_polariton_number<A: Amplitude>(
    basis: &BasisSet,
    state: &StateVector<A>,
    site: usize,
) -> Result<f64> {
    check(basis, state, site)?;
    Ok(basis
        .states()
        .iter()
        .zip(state.probabilities())
        .map(|(s, p)| f64::from(s.polariton_number(site)) * p)
        .sum())
}

/// `var(N_i) = <N_i^2> - <N_i>^2`.
pub fn variance_polariton_number<A: Amplitude>(
    basis: &BasisSet,
    state: &StateVector<A>,
    site: usize,
) -> Result<f64> {
    check(basis, state, site)?;
    let (mut first, mut second) = (0.0, 0.0);
    for (s, p) in basis.states().iter().zip(state.probabilities()) {
        let n = f64::from(s.polariton_number(site));
        first += n * p;
        second += n * n * p;
    }
    clamp_variance(second - first * first)
}

/// Number distribution on `site`.
pub fn marginal_distribution<A: Amplitude>(
    basis: &BasisSet,
    state: &StateVector<A>,
    site: usize,
) -> Result<NumberDistribution> {
    check(basis, state, site)?;
    let mut probs = vec![0.0; basis.sector().n_total as usize + 1];
    for (s, p) in basis.states().iter().zip(state.probabilities()) {
        probs[s.polariton_number(site) as usize] += p;
    }
    Ok(NumberDistribution { site, probs })
}

/// `|<a|b>|^2`.
pub fn fidelity<A: Amplitude, B: Amplitude>(a: &StateVector<A>, b: &StateVector<B>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.basis_tag() != b.basis_tag() {
        return Err(Error::BasisMismatch);
    }
    let overlap: num_complex::Complex64 = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.to_complex().conj() * y.to_complex())
        .sum();
    Ok(overlap.norm_sqr().min(1.0))
}

fn clamp_variance(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -VARIANCE_ROUNDING {
        Ok(0.0)
    } else {
        Err(Error::NegativeVariance(v))
    }
}

fn check<A: Amplitude>(basis: &BasisSet, state: &StateVector<A>, site: usize) -> Result<()> {
    state.check_basis(basis)?;
    basis.check_site(site)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_number_operator, enumerate_basis, ModelParams, SectorSpec};
    use crate::spectra::{analytic_mi_state, analytic_sf_state};
    use crate::state::{ComplexState, RealState};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn three_site() -> BasisSet {
        enumerate_basis(3, SectorSpec::effective(3))
    }

    #[test]
    fn mi_state_statistics() {
        let basis = three_site();
        let mi = analytic_mi_state(&basis, &ModelParams::uniform(3, -2.0, 10.0)).unwrap();
        for site in 0..3 {
            let n = build_number_operator(site, &basis).unwrap();
            assert!((expectation(&mi, &n).unwrap() - 1.0).abs() < 1e-14);
            assert!(variance_polariton_number(&basis, &mi, site).unwrap() < 1e-12);
            let d = marginal_distribution(&basis, &mi, site).unwrap();
            assert!((d.probs[1] - 1.0).abs() < 1e-14);
            assert!(d.probs[0].abs() < 1e-14 && d.probs[2].abs() < 1e-14);
        }
    }

    #[test]
    fn sf_state_statistics() {
        let basis = three_site();
        let sf = analytic_sf_state(&basis).unwrap();
        let binomial = [8.0 / 27.0, 12.0 / 27.0, 6.0 / 27.0, 1.0 / 27.0];
        for site in 0..3 {
            let n = build_number_operator(site, &basis).unwrap();
            assert!((expectation(&sf, &n).unwrap() - 1.0).abs() < 1e-14);
            let var = variance_polariton_number(&basis, &sf, site).unwrap();
            assert!((var - 2.0 / 3.0).abs() < 1e-12);
            let d = marginal_distribution(&basis, &sf, site).unwrap();
            for (p, q) in d.probs.iter().zip(binomial) {
                assert!((p - q).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sf_variance_is_binomial() {
        for n in 2..=4usize {
            let basis = enumerate_basis(n, SectorSpec::effective(n as u32));
            let sf = analytic_sf_state(&basis).unwrap();
            let p = 1.0 / n as f64;
            let expected = n as f64 * p * (1.0 - p);
            for site in 0..n {
                let var = variance_polariton_number(&basis, &sf, site).unwrap();
                assert!((var - expected).abs() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn identity_expectation_and_eigenstates() {
        let basis = three_site();
        let id = SymmetricOperator::identity(basis.len());
        for k in [0, 5, 37] {
            let s = RealState::basis_vector(&basis, k);
            assert!((expectation(&s, &id).unwrap() - 1.0).abs() < 1e-15);
            // basis states are N_i eigenstates
            for site in 0..3 {
                assert_eq!(variance_polariton_number(&basis, &s, site).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn fidelity_cases() {
        let basis = three_site();
        let a = RealState::basis_vector(&basis, 0);
        let b = RealState::basis_vector(&basis, 1);
        assert_eq!(fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        let sf = analytic_sf_state(&basis).unwrap();
        let phased: Vec<Complex64> = sf
            .amplitudes()
            .iter()
            .map(|&x| Complex64::new(0.0, x))
            .collect();
        let phased = ComplexState::new(&basis, phased).unwrap();
        assert!((fidelity(&sf, &phased).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        let basis = three_site();
        let other = enumerate_basis(2, SectorSpec::effective(2));
        let s = RealState::basis_vector(&basis, 0);
        assert!(matches!(
            variance_polariton_number(&basis, &s, 3),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(marginal_distribution(&other, &s, 0).is_err());
        let t = RealState::basis_vector(&other, 0);
        assert!(fidelity(&s, &t).is_err());
        assert!(expectation(&s, &SymmetricOperator::identity(2)).is_err());
        assert_eq!(clamp_variance(-5e-13), Ok(0.0));
        assert!(clamp_variance(-1e-9).is_err());
    }

    fn random_state(basis: &BasisSet, seed: u64) -> ComplexState {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..basis.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ComplexState::normalized(basis, amps).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn variance_matches_marginal_formula(seed in any::<u64>(), site in 0usize..3) {
            let basis = three_site();
            let s = random_state(&basis, seed);
            let var = variance_polariton_number(&basis, &s, site).unwrap();
            let d = marginal_distribution(&basis, &s, site).unwrap();
            prop_assert!((d.probs.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(d.probs.iter().all(|&p| (0.0..=1.0).contains(&p)));
            prop_assert!((var - d.variance().unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn mean_numbers_sum_to_total(seed in any::<u64>()) {
            let basis = three_site();
            let s = random_state(&basis, seed);
            let total: f64 = (0..3).map(|i| mean_polariton_number(&basis, &s, i).unwrap()).sum();
            prop_assert!((total - 3.0).abs() <= 1e-9);
        }

        #[test]
        fn variance_ignores_global_phase(seed in any::<u64>(), phase in 0.0f64..6.3) {
            let basis = three_site();
            let s = random_state(&basis, seed);
            let rot = Complex64::new(phase.cos(), phase.sin());
            let t = ComplexState::new(&basis, s.amplitudes().iter().map(|&a| a * rot).collect()).unwrap();
            let a = variance_polariton_number(&basis, &s, 0).unwrap();
            let b = variance_polariton_number(&basis, &t, 0).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}
