use nalgebra::DMatrix;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;
const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;

/// Eigen-decomposition of a symmetric matrix: `w = frame · diag(values) ·
/// frameᵀ`, values ascending, eigenvectors in the columns of `frame`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialEigen {
    pub values: Vec<f64>,
    pub frame: DMatrix<f64>,
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops to
/// `1e-12 · ‖w‖`.
pub fn eigen_spatial(w: &DMatrix<f64>) -> Result<SpatialEigen> {
    let n = w.nrows();
    if w.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w.ncols() });
    }
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("w_tilde"));
    }
    let residual = (w - w.transpose()).amax();
    if residual > 1e-12 * w.amax().max(1.0) {
        return Err(Error::NotSymmetric { residual });
    }

    let mut a = (w + w.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let target = OFF_DIAGONAL_TOLERANCE * a.norm();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let frame = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SpatialEigen { values, frame })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(e: &SpatialEigen) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(e.values.clone()));
        &e.frame * d * e.frame.transpose()
    }

    #[test]
    fn sorted_diagonal() {
        let w = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let e = eigen_spatial(&w).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert!((reconstruct(&e) - w).amax() < 1e-14);
    }

    #[test]
    fn swap_block() {
        let w = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let e = eigen_spatial(&w).unwrap();
        for (got, want) in e.values.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!((reconstruct(&e) - &w).amax() < 1e-10);
    }

    #[test]
    fn agrees_with_nalgebra() {
        let w = DMatrix::from_row_slice(
            4,
            4,
            &[4.0, -1.0, 2.0, 0.5, -1.0, 3.0, 0.0, 1.5, 2.0, 0.0, -2.0, 0.25, 0.5, 1.5, 0.25, 1.0],
        );
        let e = eigen_spatial(&w).unwrap();
        let mut reference: Vec<f64> = w.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (a, b) in e.values.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert!((reconstruct(&e) - &w).amax() < 1e-10);
        assert!((e.frame.transpose() * &e.frame - DMatrix::identity(4, 4)).amax() < 1e-12);
    }

    #[test]
    fn zero_and_empty() {
        let e = eigen_spatial(&DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
        let e = eigen_spatial(&DMatrix::zeros(1, 1)).unwrap();
        assert_eq!(e.values, vec![0.0]);
    }

    #[test]
    fn rejects_asymmetric() {
        let w = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(eigen_spatial(&w), Err(Error::NotSymmetric { .. })));
    }
}
