//! Exact arithmetic substrate.
//!
//! Three layers live here:
//!
//! * [`Rational`]: arbitrary-precision rationals, always in lowest terms.
//! * [`LaurentPolynomial`]: multivariate polynomials over the rationals that
//!   may carry negative exponents in symbols declared invertible.
//! * [`TruncatedSeries`]: power series without constant term, truncated at a
//!   fixed order, over any [`Coefficient`] ring.
//!
//! The series code is generic so that one composition routine serves exact
//! rationals, floating point jets, and fully symbolic jets whose coefficients
//! are Laurent polynomials.

mod laurent;
mod rational;
mod series;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};

pub use laurent::{LaurentPolynomial, PolyRing, Symbol};
pub use rational::{factorial, parse_decimal, rational, Rational};
pub use series::{ShiftedSeries, TruncatedSeries};

/// A commutative ring in which some elements can be inverted.
///
/// `try_inverse` returns `None` for elements that have no inverse in the
/// ring (zero for fields, non-monomials for Laurent polynomials).
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(r: &Rational) -> Self;

    fn try_inverse(&self) -> Option<Self>;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }

    /// Magnitude used for conditioning checks. Symbolic rings return `None`.
    fn magnitude(&self) -> Option<f64> {
        None
    }
}

impl Coefficient for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn try_inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn magnitude(&self) -> Option<f64> {
        self.to_f64().map(f64::abs)
    }
}

impl Coefficient for f64 {
    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn try_inverse(&self) -> Option<Self> {
        let inv = self.recip();
        if *self == 0.0 || !inv.is_finite() {
            None
        } else {
            Some(inv)
        }
    }

    fn magnitude(&self) -> Option<f64> {
        Some(self.abs())
    }
}

impl Coefficient for LaurentPolynomial {
    fn from_rational(r: &Rational) -> Self {
        LaurentPolynomial::constant(r.clone())
    }

    fn try_inverse(&self) -> Option<Self> {
        self.inverse().ok()
    }
}
