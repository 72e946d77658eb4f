use nalgebra::{DMatrix, DVector};

use super::Metric;
use crate::error::{Error, Result};

const SYMMETRY_TOLERANCE: f64 = 1e-14;

/// The 2-jet `u_α x^α + ½ u_{αβ} x^α x^β` of a scalar function, value
/// dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarJet2 {
    u: DVector<f64>,
    u2: DMatrix<f64>,
}

fn check_finite<'a>(values: impl IntoIterator<Item = &'a f64>, what: &'static str) -> Result<()> {
    if values.into_iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

impl ScalarJet2 {
    pub fn new(u: DVector<f64>, u2: DMatrix<f64>) -> Result<Self> {
        let n = u.len();
        Metric::new(n)?;
        if u2.nrows() != n || u2.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: u2.nrows().max(u2.ncols()) });
        }
        check_finite(u.iter(), "u")?;
        check_finite(u2.iter(), "u2")?;
        let residual = (&u2 - u2.transpose()).amax();
        if residual > SYMMETRY_TOLERANCE {
            return Err(Error::NotSymmetric { residual });
        }
        Ok(ScalarJet2 { u, u2: symmetrize(&u2) })
    }

    /// Internal constructor for results of exact-shape computations; forces
    /// symmetry instead of checking it.
    pub(crate) fn from_parts(u: DVector<f64>, u2: DMatrix<f64>) -> Self {
        ScalarJet2 { u, u2: symmetrize(&u2) }
    }

    pub fn from_slices(u: &[f64], u2: &[&[f64]]) -> Result<Self> {
        let n = u.len();
        if u2.len() != n || u2.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: u2.len() });
        }
        Self::new(DVector::from_column_slice(u), DMatrix::from_fn(n, n, |i, j| u2[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn metric(&self) -> Metric {
        Metric::new(self.dim()).expect("jet dimension validated on construction")
    }

    pub fn u(&self) -> &DVector<f64> {
        &self.u
    }

    pub fn u2(&self) -> &DMatrix<f64> {
        &self.u2
    }

    /// `η^{αβ} u_α u_β`.
    pub fn grad_sq(&self) -> f64 {
        self.metric().inner(&self.u, &self.u).expect("same dimension")
    }

    /// Independent coordinates: `u_0..u_{n-1}` followed by the upper triangle
    /// of `u2` row by row; `n + n(n+1)/2` numbers.
    pub fn coordinates(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out: Vec<f64> = self.u.iter().copied().collect();
        for i in 0..n {
            for j in i..n {
                out.push(self.u2[(i, j)]);
            }
        }
        out
    }

    pub fn from_coordinates(n: usize, coords: &[f64]) -> Result<Self> {
        let expected = n + n * (n + 1) / 2;
        if coords.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: coords.len() });
        }
        let u = DVector::from_column_slice(&coords[..n]);
        let mut u2 = DMatrix::zeros(n, n);
        let mut k = n;
        for i in 0..n {
            for j in i..n {
                u2[(i, j)] = coords[k];
                u2[(j, i)] = coords[k];
                k += 1;
            }
        }
        Self::new(u, u2)
    }
}

/// Order-2 Taylor data of a point transformation at a base point:
/// `φ(x + ξ) ≈ value + A ξ + ½ ξᵀ A2[μ] ξ` componentwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Map2Jet {
    value: DVector<f64>,
    a: DMatrix<f64>,
    a2: Vec<DMatrix<f64>>,
}

impl Map2Jet {
    pub fn new(value: DVector<f64>, a: DMatrix<f64>, a2: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = value.len();
        Metric::new(n)?;
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.nrows().max(a.ncols()) });
        }
        if a2.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a2.len() });
        }
        for h in &a2 {
            if h.nrows() != n || h.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: h.nrows().max(h.ncols()) });
            }
            check_finite(h.iter(), "A2")?;
            let residual = (h - h.transpose()).amax();
            if residual > 1e-12 * h.amax().max(1.0) {
                return Err(Error::NotSymmetric { residual });
            }
        }
        check_finite(value.iter(), "value")?;
        check_finite(a.iter(), "A")?;
        let det = a.clone().lu().determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularLinearPart);
        }
        let a2 = a2.iter().map(symmetrize).collect();
        Ok(Map2Jet { value, a, a2 })
    }

    pub(crate) fn from_parts(value: DVector<f64>, a: DMatrix<f64>, a2: Vec<DMatrix<f64>>) -> Self {
        Map2Jet { value, a, a2: a2.iter().map(symmetrize).collect() }
    }

    pub fn identity(base: DVector<f64>) -> Self {
        let n = base.len();
        Map2Jet { value: base, a: DMatrix::identity(n, n), a2: vec![DMatrix::zeros(n, n); n] }
    }

    /// The 2-jet of a linear map `x ↦ A x` at `base`.
    pub fn linear(base: &DVector<f64>, a: DMatrix<f64>) -> Result<Self> {
        let n = base.len();
        Self::new(&a * base, a, vec![DMatrix::zeros(n, n); n])
    }

    pub fn dim(&self) -> usize {
        self.value.len()
    }

    pub fn value(&self) -> &DVector<f64> {
        &self.value
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn a2(&self) -> &[DMatrix<f64>] {
        &self.a2
    }

    /// Truncated chain rule for `outer ∘ inner`, where `outer` is taken at
    /// `inner.value()`.
    pub fn compose(outer: &Map2Jet, inner: &Map2Jet) -> Result<Map2Jet> {
        let n = inner.dim();
        if outer.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: outer.dim() });
        }
        let a = &outer.a * &inner.a;
        let a2 = (0..n)
            .map(|mu| {
                let mut h = inner.a.transpose() * &outer.a2[mu] * &inner.a;
                for nu in 0..n {
                    h += &inner.a2[nu] * outer.a[(mu, nu)];
                }
                h
            })
            .collect();
        Ok(Map2Jet::from_parts(outer.value.clone(), a, a2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_validation() {
        let u = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let mut m = DMatrix::identity(3, 3);
        m[(0, 1)] = 1e-10;
        assert!(matches!(ScalarJet2::new(u.clone(), m), Err(Error::NotSymmetric { .. })));
        let mut m = DMatrix::identity(3, 3);
        m[(2, 2)] = f64::NAN;
        assert_eq!(ScalarJet2::new(u.clone(), m), Err(Error::NonFinite("u2")));
        assert!(matches!(ScalarJet2::new(u.clone(), DMatrix::identity(2, 2)), Err(Error::DimensionMismatch { .. })));
        assert_eq!(
            ScalarJet2::new(DVector::from_vec(vec![1.0]), DMatrix::identity(1, 1)),
            Err(Error::DimensionTooSmall(1))
        );
    }

    #[test]
    fn coordinates_round_trip() {
        let j =
            ScalarJet2::from_slices(&[1.0, 2.0, 3.0], &[&[4.0, 5.0, 6.0], &[5.0, 7.0, 8.0], &[6.0, 8.0, 9.0]]).unwrap();
        let c = j.coordinates();
        assert_eq!(c, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        assert_eq!(ScalarJet2::from_coordinates(3, &c).unwrap(), j);
    }

    #[test]
    fn singular_map_rejected() {
        let x = DVector::zeros(2);
        assert_eq!(Map2Jet::linear(&x, DMatrix::zeros(2, 2)), Err(Error::SingularLinearPart));
    }
}
