//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, sqrt};
use crate::model::{BasisSet, SymmetricOperator};
use crate::state::RealState;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Two lowest eigenvalues closer than this are reported as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// Eigenpairs sorted by ascending eigenvalue.
///
/// `vectors[k]` is the unit eigenvector of `values[k]`, with its first
/// component of magnitude above `1e-12` made positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Largest `||H v_k - lambda_k v_k|| / max(1, |lambda_k|)`.
    pub fn max_residual(&self, op: &SymmetricOperator) -> f64 {
        self.values
            .iter()
            .zip(&self.vectors)
            .map(|(&lambda, v)| {
                let hv = op.matvec(v);
                let r: f64 = hv
                    .iter()
                    .zip(v)
                    .map(|(a, b)| (a - lambda * b) * (a - lambda * b))
                    .sum();
                sqrt(r) / abs(lambda).max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

/// Lowest eigenpair of an operator.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub state: RealState,
    /// Set when the first excited level lies within [`DEGENERACY_GAP`].
    pub degenerate: bool,
}

/// Diagonalizes a symmetric operator by cyclic Jacobi rotations.
pub fn eigendecompose(op: &SymmetricOperator) -> Result<EigenDecomposition> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    let mut a = op.entries().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| abs(a[p * n + q]))
            .sum();
        if off == 0.0 {
            converged = true;
            break;
        }
        // Large rotations first during the opening sweeps.
        let threshold = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = 100.0 * abs(apq);
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                if sweep > 3 && abs(app) + g == abs(app) && abs(aqq) + g == abs(aqq) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if abs(apq) <= threshold || apq == 0.0 {
                    continue;
                }
                let h = aqq - app;
                let t = if abs(h) + g == abs(h) {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (abs(theta) + sqrt(1.0 + theta * theta));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = t * c;
                let tau = s / (1.0 + c);
                let shift = t * apq;
                a[p * n + p] = app - shift;
                a[q * n + q] = aqq + shift;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for j in 0..n {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = a[j * n + p];
                    let ajq = a[j * n + q];
                    let new_p = ajp - s * (ajq + ajp * tau);
                    let new_q = ajq + s * (ajp - ajq * tau);
                    a[j * n + p] = new_p;
                    a[p * n + j] = new_p;
                    a[j * n + q] = new_q;
                    a[q * n + j] = new_q;
                }
                for j in 0..n {
                    let vjp = v[j * n + p];
                    let vjq = v[j * n + q];
                    v[j * n + p] = vjp - s * (vjq + vjp * tau);
                    v[j * n + q] = vjq + s * (vjp - vjq * tau);
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]).then(x.cmp(&y)));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut col: Vec<f64> = (0..n).map(|j| v[j * n + k]).collect();
            fix_sign(&mut col);
            col
        })
        .collect();
    Ok(EigenDecomposition { values, vectors })
}

fn fix_sign(v: &mut [f64]) {
    if let Some(&first) = v.iter().find(|x| abs(**x) > 1e-12) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Lowest eigenpair of `op` as a state over `basis`.
pub fn ground_state(op: &SymmetricOperator, basis: &BasisSet) -> Result<GroundState> {
    if op.dim() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: op.dim(),
        });
    }
    let mut eig = eigendecompose(op)?;
    let degenerate = eig.values.len() > 1 && eig.values[1] - eig.values[0] < DEGENERACY_GAP;
    let energy = eig.values[0];
    let vector = eig.vectors.swap_remove(0);
    Ok(GroundState {
        energy,
        state: RealState::normalized(basis, vector)?,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{enumerate_basis, SectorSpec};
    use proptest::prelude::*;

    fn random_symmetric(dim: usize, seed: u64) -> SymmetricOperator {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let x: f64 = rng.random_range(-1.0..1.0);
                m[i * dim + j] = x;
                m[j * dim + i] = x;
            }
        }
        SymmetricOperator::from_row_major(dim, m).unwrap()
    }

    fn reconstruction_error(op: &SymmetricOperator, eig: &EigenDecomposition) -> f64 {
        let n = op.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n)
                    .map(|k| eig.vectors[k][i] * eig.values[k] * eig.vectors[k][j])
                    .sum();
                worst = worst.max((r - op.get(i, j)).abs());
            }
        }
        worst
    }

    #[test]
    fn jc_doublet() {
        let op = SymmetricOperator::from_row_major(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let eig = eigendecompose(&op).unwrap();
        assert_eq!(eig.values.len(), 2);
        assert!((eig.values[0] + 1.0).abs() < 1e-15);
        assert!((eig.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_gives_canonical_basis() {
        let eig = eigendecompose(&SymmetricOperator::identity(5)).unwrap();
        for k in 0..5 {
            assert_eq!(eig.values[k], 1.0);
            for j in 0..5 {
                assert_eq!(eig.vectors[k][j], if j == k { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn sign_rule_applied() {
        let op = SymmetricOperator::from_row_major(2, vec![1.0, -2.0, -2.0, 1.0]).unwrap();
        let eig = eigendecompose(&op).unwrap();
        for v in &eig.vectors {
            assert!(v[0] > 0.0);
        }
    }

    #[test]
    fn reconstructs_up_to_dim_200() {
        for (dim, seed) in [(1, 1), (7, 2), (38, 3), (111, 4), (200, 5)] {
            let op = random_symmetric(dim, seed);
            let eig = eigendecompose(&op).unwrap();
            assert!(reconstruction_error(&op, &eig) <= 1e-8 * op.max_abs());
            assert!(eig.max_residual(&op) <= 1e-9);
            for w in eig.values.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn ground_state_flags_degeneracy() {
        let basis = enumerate_basis(2, SectorSpec::effective(1));
        let op = SymmetricOperator::from_diagonal(&[0.0, 0.0, 1.0, 2.0]);
        let gs = ground_state(&op, &basis).unwrap();
        assert!(gs.degenerate);
        let op = SymmetricOperator::from_diagonal(&[0.0, 0.5, 1.0, 2.0]);
        assert!(!ground_state(&op, &basis).unwrap().degenerate);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn orthonormal_eigenvectors(dim in 1usize..30, seed in any::<u64>()) {
            let op = random_symmetric(dim, seed);
            let eig = eigendecompose(&op).unwrap();
            for a in 0..dim {
                for b in 0..dim {
                    let dot: f64 = eig.vectors[a].iter().zip(&eig.vectors[b]).map(|(x, y)| x * y).sum();
                    let expected = if a == b { 1.0 } else { 0.0 };
                    prop_assert!((dot - expected).abs() <= 1e-10);
                }
            }
            prop_assert!(eig.max_residual(&op) <= 1e-9);
        }

        #[test]
        fn degenerate_spectrum_is_orthonormal(seed in any::<u64>()) {
            // Block diagonal with repeated blocks forces exact degeneracies.
            let block = random_symmetric(3, seed);
            let mut m = vec![0.0; 36];
            for b in 0..2 {
                for i in 0..3 {
                    for j in 0..3 {
                        m[(3 * b + i) * 6 + 3 * b + j] = block.get(i, j);
                    }
                }
            }
            let op = SymmetricOperator::from_row_major(6, m).unwrap();
            let eig = eigendecompose(&op).unwrap();
            prop_assert!(reconstruction_error(&op, &eig) <= 1e-12);
            for a in 0..6 {
                for b in 0..6 {
                    let dot: f64 = eig.vectors[a].iter().zip(&eig.vectors[b]).map(|(x, y)| x * y).sum();
                    let expected = if a == b { 1.0 } else { 0.0 };
                    prop_assert!((dot - expected).abs() <= 1e-10);
                }
            }
        }
    }
}
