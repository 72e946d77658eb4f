//! Scalars that point maps and test functions can be evaluated over.
//!
//! Besides `f64` this covers [`HyperDual`] numbers, which carry two
//! independent infinitesimals and so recover one mixed second partial per
//! evaluation, exactly up to rounding.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait PointScalar:
    Clone
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(value: f64) -> Self;

    /// The real (non-infinitesimal) part.
    fn re(&self) -> f64;

    fn scale(&self, factor: f64) -> Self {
        self.clone() * Self::constant(factor)
    }

    fn powi(&self, exponent: u32) -> Self {
        let mut acc = Self::constant(1.0);
        for _ in 0..exponent {
            acc = acc * self.clone();
        }
        acc
    }
}

impl PointScalar for f64 {
    fn constant(value: f64) -> Self {
        value
    }

    fn re(&self) -> f64 {
        *self
    }

    fn scale(&self, factor: f64) -> Self {
        self * factor
    }

    fn powi(&self, exponent: u32) -> Self {
        f64::powi(*self, exponent as i32)
    }
}

/// `re + e1 ε1 + e2 ε2 + e12 ε1ε2` with `ε1² = ε2² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperDual {
    pub re: f64,
    pub e1: f64,
    pub e2: f64,
    pub e12: f64,
}

impl HyperDual {
    pub fn new(re: f64, e1: f64, e2: f64, e12: f64) -> Self {
        HyperDual { re, e1, e2, e12 }
    }

    /// The point `x` seeded so that evaluation yields `∂_i`, `∂_j` and
    /// `∂_i ∂_j`.
    pub fn seed(x: &[f64], i: usize, j: usize) -> Vec<HyperDual> {
        x.iter()
            .enumerate()
            .map(|(k, &v)| HyperDual::new(v, if k == i { 1.0 } else { 0.0 }, if k == j { 1.0 } else { 0.0 }, 0.0))
            .collect()
    }

    fn recip(self) -> Self {
        let inv = 1.0 / self.re;
        let inv2 = inv * inv;
        HyperDual::new(inv, -self.e1 * inv2, -self.e2 * inv2, -self.e12 * inv2 + 2.0 * self.e1 * self.e2 * inv2 * inv)
    }
}

impl Add for HyperDual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        HyperDual::new(self.re + o.re, self.e1 + o.e1, self.e2 + o.e2, self.e12 + o.e12)
    }
}

impl Sub for HyperDual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        HyperDual::new(self.re - o.re, self.e1 - o.e1, self.e2 - o.e2, self.e12 - o.e12)
    }
}

impl Mul for HyperDual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        HyperDual::new(
            self.re * o.re,
            self.re * o.e1 + self.e1 * o.re,
            self.re * o.e2 + self.e2 * o.re,
            self.re * o.e12 + self.e1 * o.e2 + self.e2 * o.e1 + self.e12 * o.re,
        )
    }
}

impl Div for HyperDual {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Neg for HyperDual {
    type Output = Self;
    fn neg(self) -> Self {
        HyperDual::new(-self.re, -self.e1, -self.e2, -self.e12)
    }
}

impl PointScalar for HyperDual {
    fn constant(value: f64) -> Self {
        HyperDual::new(value, 0.0, 0.0, 0.0)
    }

    fn re(&self) -> f64 {
        self.re
    }

    fn scale(&self, f: f64) -> Self {
        HyperDual::new(self.re * f, self.e1 * f, self.e2 * f, self.e12 * f)
    }
}
