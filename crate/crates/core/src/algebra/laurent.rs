use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::{Coefficient, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    /// Only invertible symbols may carry negative exponents.
    pub invertible: bool,
}

/// An ordered list of symbols shared by every polynomial built from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRing {
    symbols: Arc<[Symbol]>,
}

impl PolyRing {
    /// Builds a ring from `(name, invertible)` pairs. Order matters: it fixes
    /// the exponent-vector layout and the printing order.
    pub fn new<I, S>(symbols: I) -> Self
    where
        I: IntoIterator<Item = (S, bool)>,
        S: Into<String>,
    {
        let symbols: Vec<Symbol> =
            symbols.into_iter().map(|(name, invertible)| Symbol { name: name.into(), invertible }).collect();
        PolyRing { symbols: symbols.into() }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn zero(&self) -> LaurentPolynomial {
        LaurentPolynomial { symbols: self.symbols.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(&self, value: Rational) -> LaurentPolynomial {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(Monomial(vec![0; self.len()]), value);
        }
        LaurentPolynomial { symbols: self.symbols.clone(), terms }
    }

    /// The `index`-th symbol as a polynomial. Panics on an out-of-range index.
    pub fn var(&self, index: usize) -> LaurentPolynomial {
        assert!(index < self.len(), "symbol index {index} out of range");
        let mut exps = vec![0; self.len()];
        exps[index] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(exps), Rational::one());
        LaurentPolynomial { symbols: self.symbols.clone(), terms }
    }

    pub fn monomial(&self, coefficient: Rational, exponents: &[i32]) -> Result<LaurentPolynomial> {
        if exponents.len() != self.len() {
            return Err(Error::ArityMismatch { expected: self.len(), found: exponents.len() });
        }
        for (e, s) in exponents.iter().zip(self.symbols.iter()) {
            if *e < 0 && !s.invertible {
                return Err(Error::NotInvertible(s.name.clone()));
            }
        }
        let mut terms = BTreeMap::new();
        if !coefficient.is_zero() {
            terms.insert(Monomial(exponents.to_vec()), coefficient);
        }
        Ok(LaurentPolynomial { symbols: self.symbols.clone(), terms })
    }

    /// Sum of monomials; handy for writing down expected closed forms.
    pub fn from_terms<'a, I>(&self, terms: I) -> Result<LaurentPolynomial>
    where
        I: IntoIterator<Item = (Rational, &'a [i32])>,
    {
        let mut acc = self.zero();
        for (c, e) in terms {
            acc = acc.checked_add(&self.monomial(c, e)?)?;
        }
        Ok(acc)
    }
}

/// Exponent vector ordered graded-lexicographically: total degree first, then
/// lexicographic with the first symbol most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Monomial(Vec<i32>);

impl Monomial {
    fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate Laurent polynomial with rational coefficients.
///
/// A polynomial built with no symbols (see [`LaurentPolynomial::constant`])
/// is a context-free constant: it combines with polynomials over any ring.
/// Two polynomials over different non-empty symbol lists cannot be combined.
#[derive(Clone, Debug)]
pub struct LaurentPolynomial {
    symbols: Arc<[Symbol]>,
    terms: BTreeMap<Monomial, Rational>,
}

impl LaurentPolynomial {
    pub fn constant(value: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(Monomial(Vec::new()), value);
        }
        LaurentPolynomial { symbols: Arc::from(Vec::new()), terms }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn ring(&self) -> PolyRing {
        PolyRing { symbols: self.symbols.clone() }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (descending graded-lex) order.
    pub fn terms(&self) -> impl Iterator<Item = (&[i32], &Rational)> {
        self.terms.iter().rev().map(|(m, c)| (m.0.as_slice(), c))
    }

    /// The coefficient of the monomial with the given exponents (zero if
    /// absent).
    pub fn coefficient(&self, exponents: &[i32]) -> Rational {
        if self.symbols.is_empty() && exponents.iter().all(|&e| e == 0) {
            return self.terms.get(&Monomial(Vec::new())).cloned().unwrap_or_else(Rational::zero);
        }
        self.terms.get(&Monomial(exponents.to_vec())).cloned().unwrap_or_else(Rational::zero)
    }

    fn unify(&self, other: &Self) -> Result<Arc<[Symbol]>> {
        if Arc::ptr_eq(&self.symbols, &other.symbols) || self.symbols == other.symbols {
            Ok(self.symbols.clone())
        } else if self.symbols.is_empty() {
            Ok(other.symbols.clone())
        } else if other.symbols.is_empty() {
            Ok(self.symbols.clone())
        } else {
            Err(Error::VariableMismatch {
                left: self.symbols.iter().map(|s| s.name.clone()).collect(),
                right: other.symbols.iter().map(|s| s.name.clone()).collect(),
            })
        }
    }

    fn terms_with_arity(&self, arity: usize) -> BTreeMap<Monomial, Rational> {
        if self.symbols.len() == arity {
            self.terms.clone()
        } else {
            // Only context-free constants reach this branch.
            self.terms.values().map(|c| (Monomial(vec![0; arity]), c.clone())).collect()
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let symbols = self.unify(other)?;
        let arity = symbols.len();
        let mut terms = self.terms_with_arity(arity);
        for (m, c) in other.terms_with_arity(arity) {
            accumulate(&mut terms, m, c);
        }
        Ok(LaurentPolynomial { symbols, terms })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let symbols = self.unify(other)?;
        let arity = symbols.len();
        let lhs = self.terms_with_arity(arity);
        let rhs = other.terms_with_arity(arity);
        let mut terms = BTreeMap::new();
        for (ml, cl) in &lhs {
            for (mr, cr) in &rhs {
                let exps = ml.0.iter().zip(&mr.0).map(|(a, b)| a + b).collect();
                accumulate(&mut terms, Monomial(exps), cl * cr);
            }
        }
        Ok(LaurentPolynomial { symbols, terms })
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return LaurentPolynomial { symbols: self.symbols.clone(), terms: BTreeMap::new() };
        }
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c * factor)).collect();
        LaurentPolynomial { symbols: self.symbols.clone(), terms }
    }

    /// Inverse of a single nonzero term whose non-trivial symbols are all
    /// invertible.
    pub fn inverse(&self) -> Result<Self> {
        let mut iter = self.terms.iter();
        let (m, c) = match (iter.next(), iter.next()) {
            (None, _) => return Err(Error::NonInvertibleConstant),
            (Some(term), None) => term,
            (Some(_), Some(_)) => return Err(Error::NotInvertible(self.to_string())),
        };
        for (e, s) in m.0.iter().zip(self.symbols.iter()) {
            if *e != 0 && !s.invertible {
                return Err(Error::NotInvertible(s.name.clone()));
            }
        }
        let exps = m.0.iter().map(|e| -e).collect();
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(exps), c.recip());
        Ok(LaurentPolynomial { symbols: self.symbols.clone(), terms })
    }

    pub fn pow(&self, exponent: i32) -> Result<Self> {
        let base = if exponent < 0 { self.inverse()? } else { self.clone() };
        let mut acc = LaurentPolynomial::constant(Rational::one());
        for _ in 0..exponent.unsigned_abs() {
            acc = acc.checked_mul(&base)?;
        }
        if acc.symbols.is_empty() && !self.symbols.is_empty() {
            acc.terms = acc.terms_with_arity(self.symbols.len());
            acc.symbols = self.symbols.clone();
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to the `index`-th symbol.
    pub fn partial_derivative(&self, index: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = match m.0.get(index) {
                Some(&e) if e != 0 => e,
                _ => continue,
            };
            let mut exps = m.0.clone();
            exps[index] -= 1;
            accumulate(&mut terms, Monomial(exps), c * Rational::from_integer(e.into()));
        }
        LaurentPolynomial { symbols: self.symbols.clone(), terms }
    }

    /// Evaluates at a point in any coefficient ring. Negative exponents
    /// require the corresponding value to be invertible there.
    pub fn evaluate<C: Coefficient>(&self, values: &[C]) -> Result<C> {
        if !self.symbols.is_empty() && values.len() != self.symbols.len() {
            return Err(Error::ArityMismatch { expected: self.symbols.len(), found: values.len() });
        }
        let mut inverses: Vec<Option<C>> = vec![None; values.len()];
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut term = C::from_rational(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = if e > 0 {
                    values[i].clone()
                } else {
                    if inverses[i].is_none() {
                        inverses[i] = Some(
                            values[i]
                                .try_inverse()
                                .ok_or_else(|| Error::NotInvertible(self.symbols[i].name.clone()))?,
                        );
                    }
                    inverses[i].clone().unwrap()
                };
                for _ in 0..e.unsigned_abs() {
                    term = term * base.clone();
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }
}

fn accumulate(terms: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl PartialEq for LaurentPolynomial {
    fn eq(&self, other: &Self) -> bool {
        match self.unify(other) {
            Ok(symbols) => {
                let arity = symbols.len();
                self.terms_with_arity(arity) == other.terms_with_arity(arity)
            }
            Err(_) => self.terms.is_empty() && other.terms.is_empty(),
        }
    }
}

impl Eq for LaurentPolynomial {}

impl fmt::Display for LaurentPolynomial {
    /// Canonical text form, e.g. `u1^-3*u3 - 3/2*u1^-4*u2^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (exps, c)) in self.terms().enumerate() {
            let sign = c.is_negative();
            match (i, sign) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let magnitude = c.abs();
            let factors: Vec<String> = exps
                .iter()
                .zip(self.symbols.iter())
                .filter(|(e, _)| **e != 0)
                .map(|(e, s)| if *e == 1 { s.name.clone() } else { format!("{}^{}", s.name, e) })
                .collect();
            if factors.is_empty() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", magnitude, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Zero for LaurentPolynomial {
    fn zero() -> Self {
        LaurentPolynomial::constant(Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for LaurentPolynomial {
    fn one() -> Self {
        LaurentPolynomial::constant(Rational::one())
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn neg(self) -> LaurentPolynomial {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        LaurentPolynomial { symbols: self.symbols.clone(), terms }
    }
}

impl Neg for LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn neg(self) -> LaurentPolynomial {
        -&self
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&LaurentPolynomial> for &LaurentPolynomial {
            type Output = LaurentPolynomial;

            /// Panics if the operands live in different rings; use the
            /// `checked_*` method to get an error instead.
            fn $method(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
                self.$checked(rhs).expect("Laurent polynomial ring mismatch")
            }
        }

        impl $trait for LaurentPolynomial {
            type Output = LaurentPolynomial;

            fn $method(self, rhs: LaurentPolynomial) -> LaurentPolynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;

    fn ring() -> PolyRing {
        PolyRing::new([("u1", true), ("u2", false), ("u3", false)])
    }

    #[test]
    fn additive_inverse() {
        let r = ring();
        let u1 = r.var(0);
        assert!((u1.clone() + (-u1)).is_zero());
    }

    #[test]
    fn invertible_cancellation() {
        let r = ring();
        let u1 = r.var(0);
        let inv = u1.inverse().unwrap();
        assert_eq!(inv.to_string(), "u1^-1");
        assert_eq!(inv * u1, r.constant(Rational::one()));
        assert_eq!(r.constant(Rational::one()), LaurentPolynomial::one());
    }

    #[test]
    fn non_invertible_symbol_rejected() {
        let r = ring();
        assert_eq!(r.var(1).inverse(), Err(Error::NotInvertible("u2".into())));
        assert_eq!(r.monomial(Rational::one(), &[0, -1, 0]), Err(Error::NotInvertible("u2".into())));
        assert_eq!(LaurentPolynomial::zero().inverse(), Err(Error::NonInvertibleConstant));
        assert!((r.var(0) + r.var(2)).inverse().is_err());
    }

    #[test]
    fn quotient_term_of_schwarzian() {
        // (u2 / (2 u1))^2 * 6 = (3/2) u2^2 u1^-2; combined with u1^-2 gives the
        // u2^2 u1^-4 term with coefficient 3/2.
        let r = ring();
        let half = r.constant(rational(1, 2));
        let q = r.var(1) * r.var(0).pow(-2).unwrap() * half;
        let term = q.pow(2).unwrap().scale(&rational(6, 1));
        let expected = r.monomial(rational(3, 2), &[-4, 2, 0]).unwrap();
        assert_eq!(term, expected);
        assert_eq!(term.to_string(), "3/2*u1^-4*u2^2");
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = ring().var(0);
        let b = PolyRing::new([("x", false)]).var(0);
        assert!(matches!(a.checked_add(&b), Err(Error::VariableMismatch { .. })));
        assert!(matches!(a.checked_mul(&b), Err(Error::VariableMismatch { .. })));
        assert!(a != b);
    }

    #[test]
    fn printing_order_and_signs() {
        let r = ring();
        let p = r
            .from_terms([
                (rational(-3, 2), &[-4, 2, 0][..]),
                (rational(1, 1), &[-3, 0, 1][..]),
                (rational(7, 1), &[0, 0, 0][..]),
            ])
            .unwrap();
        assert_eq!(p.to_string(), "7 + u1^-3*u3 - 3/2*u1^-4*u2^2");
        assert_eq!((-p).to_string(), "-7 - u1^-3*u3 + 3/2*u1^-4*u2^2");
        assert_eq!(r.zero().to_string(), "0");
    }

    #[test]
    fn derivative_and_evaluation() {
        let r = ring();
        let p = r.from_terms([(rational(1, 1), &[-3, 0, 1][..]), (rational(-3, 2), &[-4, 2, 0][..])]).unwrap();
        let dp = p.partial_derivative(0);
        assert_eq!(dp.to_string(), "-3*u1^-4*u3 + 6*u1^-5*u2^2");
        let v = p.evaluate(&[rational(1, 1), rational(1, 1), rational(1, 1)]).unwrap();
        assert_eq!(v, rational(-1, 2));
        let err = p.evaluate(&[0.0, 1.0, 1.0]);
        assert_eq!(err, Err(Error::NotInvertible("u1".into())));
    }

    #[test]
    fn constants_are_context_free() {
        let r = ring();
        let c = LaurentPolynomial::constant(rational(2, 1));
        let p = r.var(0) + c.clone();
        assert_eq!(p.coefficient(&[0, 0, 0]), rational(2, 1));
        assert_eq!(c, r.constant(rational(2, 1)));
        assert_eq!(r.var(0).pow(0).unwrap(), r.constant(Rational::one()));
    }
}
