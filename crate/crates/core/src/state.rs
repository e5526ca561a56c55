//! State vectors over a [`BasisSet`].

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::model::BasisSet;
use crate::{Error, Result};

/// Scalar type of a state amplitude: `f64` for eigenvectors, [`Complex64`]
/// for propagated states.
pub trait Amplitude: Copy + core::fmt::Debug + PartialEq + Send + Sync + 'static {
    fn norm_sqr(self) -> f64;
    /// `conj(self) * other`.
    fn conj_mul(self, other: Self) -> Complex64;
    /// `Re(conj(self) * other)`.
    fn re_conj_mul(self, other: Self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn to_complex(self) -> Complex64;
}

impl Amplitude for f64 {
    #[inline]
    fn norm_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn conj_mul(self, other: Self) -> Complex64 {
        Complex64::new(self * other, 0.0)
    }
    #[inline]
    fn re_conj_mul(self, other: Self) -> f64 {
        self * other
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Amplitude for Complex64 {
    #[inline]
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    #[inline]
    fn conj_mul(self, other: Self) -> Complex64 {
        self.conj() * other
    }
    #[inline]
    fn re_conj_mul(self, other: Self) -> f64 {
        self.re * other.re + self.im * other.im
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// Unit-norm amplitudes aligned with the basis identified by `basis_tag`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<A: Amplitude = f64> {
    amplitudes: Vec<A>,
    basis_tag: u64,
}

pub type RealState = StateVector<f64>;
pub type ComplexState = StateVector<Complex64>;

/// Tolerance on `| ||psi|| - 1 |` for a checked state.
pub const NORM_TOLERANCE: f64 = 1e-9;

impl<A: Amplitude> StateVector<A> {
    /// Wraps `amplitudes`, which must already be normalized.
    pub fn new(basis: &BasisSet, amplitudes: Vec<A>) -> Result<Self> {
        check_len(basis, amplitudes.len())?;
        let norm = norm_of(&amplitudes);
        if crate::math::abs(norm - 1.0) > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes,
            basis_tag: basis.tag(),
        })
    }

    /// Normalizes `amplitudes`; fails on the zero vector.
    pub fn normalized(basis: &BasisSet, amplitudes: Vec<A>) -> Result<Self> {
        check_len(basis, amplitudes.len())?;
        let norm = norm_of(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        let amplitudes = amplitudes
            .into_iter()
            .map(|a| a.scale(1.0 / norm))
            .collect();
        Ok(Self {
            amplitudes,
            basis_tag: basis.tag(),
        })
    }

    /// No norm check; propagated states carry their own drift.
    pub(crate) fn from_raw(basis_tag: u64, amplitudes: Vec<A>) -> Self {
        Self {
            amplitudes,
            basis_tag,
        }
    }

    /// The basis state `index` itself.
    pub fn basis_vector(basis: &BasisSet, index: usize) -> Self
    where
        A: From<f64>,
    {
        let mut amplitudes: Vec<A> = (0..basis.len()).map(|_| A::from(0.0)).collect();
        amplitudes[index] = A::from(1.0);
        Self {
            amplitudes,
            basis_tag: basis.tag(),
        }
    }

    pub fn amplitudes(&self) -> &[A] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn basis_tag(&self) -> u64 {
        self.basis_tag
    }

    pub fn norm(&self) -> f64 {
        norm_of(&self.amplitudes)
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.amplitudes.iter().map(|a| a.norm_sqr())
    }

    pub fn to_complex(&self) -> ComplexState {
        StateVector {
            amplitudes: self.amplitudes.iter().map(|a| a.to_complex()).collect(),
            basis_tag: self.basis_tag,
        }
    }

    pub(crate) fn check_basis(&self, basis: &BasisSet) -> Result<()> {
        check_len(basis, self.len())?;
        if self.basis_tag != basis.tag() {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }
}

fn norm_of<A: Amplitude>(amplitudes: &[A]) -> f64 {
    crate::math::sqrt(amplitudes.iter().map(|a| a.norm_sqr()).sum())
}

fn check_len(basis: &BasisSet, len: usize) -> Result<()> {
    if len != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: len,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{enumerate_basis, SectorSpec};
    use alloc::vec;

    #[test]
    fn norm_is_checked() {
        let basis = enumerate_basis(1, SectorSpec::effective(1));
        assert!(RealState::new(&basis, vec![1.0, 0.0]).is_ok());
        assert!(matches!(
            RealState::new(&basis, vec![1.0, 1.0]),
            Err(Error::NotNormalized(_))
        ));
        assert!(RealState::new(&basis, vec![1.0]).is_err());
        let s = RealState::normalized(&basis, vec![3.0, 4.0]).unwrap();
        assert!((s.amplitudes()[1] - 0.8).abs() < 1e-15);
        assert!(RealState::normalized(&basis, vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn complex_promotion_keeps_tag() {
        let basis = enumerate_basis(2, SectorSpec::effective(1));
        let s = RealState::basis_vector(&basis, 2);
        let c = s.to_complex();
        assert_eq!(c.basis_tag(), basis.tag());
        assert_eq!(c.amplitudes()[2], Complex64::new(1.0, 0.0));
    }
}
