use super::{factorial, Coefficient};
use crate::error::{Error, Result};

/// A power series `c_1 z + c_2 z^2 + ... + c_k z^k` with no constant term,
/// where everything above `z^k` has been discarded.
///
/// Coefficients are stored in Taylor form. A jet given by derivatives
/// `u_l = f^(l)(0)` converts with [`TruncatedSeries::from_derivatives`] and
/// back with [`TruncatedSeries::derivatives`].
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<C> {
    coeffs: Vec<C>,
}

/// A truncated series that does carry a constant term.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftedSeries<C> {
    pub constant: C,
    pub tail: TruncatedSeries<C>,
}

impl<C: Coefficient> TruncatedSeries<C> {
    /// `coeffs[0]` is the coefficient of `z`.
    pub fn new(coeffs: Vec<C>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::OrderTooLow { order: 0, min: 1 });
        }
        Ok(TruncatedSeries { coeffs })
    }

    pub fn zero(order: usize) -> Result<Self> {
        Self::new(vec![C::zero(); order])
    }

    /// The series `z` at the given order.
    pub fn identity(order: usize) -> Result<Self> {
        let mut s = Self::zero(order)?;
        s.coeffs[0] = C::one();
        Ok(s)
    }

    /// Builds the series from derivative values `u_1, ..., u_k`.
    pub fn from_derivatives(derivatives: &[C]) -> Result<Self> {
        let coeffs = derivatives
            .iter()
            .enumerate()
            .map(|(i, u)| {
                let inv = factorial(i + 1).recip();
                u.clone() * C::from_rational(&inv)
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn derivatives(&self) -> Vec<C> {
        self.coeffs.iter().enumerate().map(|(i, c)| c.clone() * C::from_rational(&factorial(i + 1))).collect()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of `z^power`, `power` in `1..=order`.
    pub fn coefficient(&self, power: usize) -> &C {
        &self.coeffs[power - 1]
    }

    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> TruncatedSeries<D> {
        TruncatedSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Forgets every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order == 0 || order > self.order() {
            return Err(Error::OrderMismatch { left: self.order(), right: order });
        }
        Self::new(self.coeffs[..order].to_vec())
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch { left: self.order(), right: other.order() });
        }
        Ok(())
    }

    fn dense(&self) -> Vec<C> {
        let mut d = Vec::with_capacity(self.order() + 1);
        d.push(C::zero());
        d.extend(self.coeffs.iter().cloned());
        d
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(TruncatedSeries { coeffs })
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let k = self.order();
        let prod = mul_dense(&self.dense(), &other.dense(), k);
        Ok(TruncatedSeries { coeffs: prod[1..].to_vec() })
    }

    /// `self ∘ inner` through order `k`, evaluated by Horner's scheme in the
    /// truncated ring.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_order(inner)?;
        let k = self.order();
        let g = inner.dense();
        let mut acc = vec![C::zero(); k + 1];
        acc[0] = self.coeffs[k - 1].clone();
        for l in (1..k).rev() {
            acc = mul_dense(&acc, &g, k);
            acc[0] = acc[0].clone() + self.coeffs[l - 1].clone();
        }
        let out = mul_dense(&acc, &g, k);
        Ok(TruncatedSeries { coeffs: out[1..].to_vec() })
    }

    /// Expansion of `1 / (constant + tail)` through the order of `tail`.
    pub fn reciprocal_shifted(constant: &C, tail: &Self) -> Result<ShiftedSeries<C>> {
        let inv = constant.try_inverse().ok_or(Error::NonInvertibleConstant)?;
        let k = tail.order();
        // 1/(d + t) = (1/d) * sum_m (-t/d)^m, and t has no constant term, so
        // m runs to k at most.
        let ratio: Vec<C> = tail.dense().into_iter().map(|c| -(c * inv.clone())).collect();
        let mut acc = vec![C::zero(); k + 1];
        acc[0] = C::one();
        for _ in 0..k {
            acc = mul_dense(&acc, &ratio, k);
            acc[0] = acc[0].clone() + C::one();
        }
        let scaled: Vec<C> = acc.into_iter().map(|c| c * inv.clone()).collect();
        Ok(ShiftedSeries { constant: scaled[0].clone(), tail: TruncatedSeries { coeffs: scaled[1..].to_vec() } })
    }
}

impl<C: Coefficient> ShiftedSeries<C> {
    pub fn order(&self) -> usize {
        self.tail.order()
    }

    fn dense(&self) -> Vec<C> {
        let mut d = self.tail.dense();
        d[0] = self.constant.clone();
        d
    }

    fn from_dense(d: Vec<C>) -> Self {
        ShiftedSeries { constant: d[0].clone(), tail: TruncatedSeries { coeffs: d[1..].to_vec() } }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.tail.check_order(&other.tail)?;
        Ok(Self::from_dense(mul_dense(&self.dense(), &other.dense(), self.order())))
    }

    /// Coefficients `c_0, ..., c_k`.
    pub fn coefficients(&self) -> Vec<C> {
        self.dense()
    }
}

/// Product of two dense coefficient vectors (constant first), keeping powers
/// up to `k`.
fn mul_dense<C: Coefficient>(a: &[C], b: &[C], k: usize) -> Vec<C> {
    let mut out = vec![C::zero(); k + 1];
    for (i, ai) in a.iter().enumerate().take(k + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(k + 1 - i) {
            if bj.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].clone() + ai.clone() * bj.clone();
        }
    }
    out
}
