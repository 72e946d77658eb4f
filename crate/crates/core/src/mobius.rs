//! Invariants of univariate jets under fractional-linear changes of variable.
//!
//! The stabilizer of `z = 0` consists of the maps `z ↦ az/(cz + 1)` with
//! `a ≠ 0`. It acts on the jet of `f` at 0 by truncated composition, and every
//! orbit with `u1 ≠ 0` contains exactly one jet of the form
//! `z + Σ_{l≥3} w_l z^l / l!`. The coefficients `w_3, ..., w_k` of that
//! representative form a complete, functionally independent family of
//! invariants; `w_3` is the Schwarzian derivative divided by `f'^2`.

use num_traits::One;
use serde::Serialize;

use crate::algebra::{rational, Coefficient, LaurentPolynomial, PolyRing, ShiftedSeries, TruncatedSeries};
use crate::error::{Error, Result};

/// Default conditioning threshold for floating point projections: `|u1|` must
/// exceed this fraction of the largest derivative.
pub const FLOAT_U1_THRESHOLD: f64 = 1e-8;

/// `z ↦ az/(cz + 1)`, an element of the stabilizer of the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusStabilizer<C> {
    a: C,
    c: C,
}

impl<C: Coefficient> MobiusStabilizer<C> {
    pub fn new(a: C, c: C) -> Result<Self> {
        if a.try_inverse().is_none() {
            return Err(Error::ZeroStabilizerScale);
        }
        Ok(MobiusStabilizer { a, c })
    }

    pub fn a(&self) -> &C {
        &self.a
    }

    pub fn c(&self) -> &C {
        &self.c
    }
}

/// `z ↦ (az + b)/(cz + d)` with `ad - bc ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusElement<C> {
    pub a: C,
    pub b: C,
    pub c: C,
    pub d: C,
}

impl<C: Coefficient> MobiusElement<C> {
    pub fn new(a: C, b: C, c: C, d: C) -> Result<Self> {
        let det = a.clone() * d.clone() - b.clone() * c.clone();
        if det.try_inverse().is_none() {
            return Err(Error::SingularMobius);
        }
        Ok(MobiusElement { a, b, c, d })
    }

    pub fn identity() -> Self {
        MobiusElement { a: C::one(), b: C::zero(), c: C::zero(), d: C::one() }
    }

    pub fn translation(b: C) -> Self {
        MobiusElement { a: C::one(), b, c: C::zero(), d: C::one() }
    }

    pub fn apply(&self, z: &C) -> Result<C> {
        let den = self.c.clone() * z.clone() + self.d.clone();
        let inv = den.try_inverse().ok_or(Error::Pole)?;
        Ok((self.a.clone() * z.clone() + self.b.clone()) * inv)
    }
}

/// Taylor jet of `z ↦ az/(cz + 1)` at 0: `az Σ_{m<k} (-cz)^m`.
pub fn mobius_jet<C: Coefficient>(h: &MobiusStabilizer<C>, order: usize) -> Result<TruncatedSeries<C>> {
    let mut coeffs = Vec::with_capacity(order);
    let mut term = h.a.clone();
    let minus_c = -h.c.clone();
    for _ in 0..order {
        coeffs.push(term.clone());
        term = term * minus_c.clone();
    }
    TruncatedSeries::new(coeffs)
}

/// The prolonged stabilizer action: the jet of `f(az/(cz + 1))`.
pub fn stabilizer_action<C: Coefficient>(
    jet: &TruncatedSeries<C>,
    h: &MobiusStabilizer<C>,
) -> Result<TruncatedSeries<C>> {
    jet.compose(&mobius_jet(h, jet.order())?)
}

/// The stabilizer element carrying `jet` to its canonical representative:
/// `a = 1/u1`, `c = u2/(2 u1^2)`.
pub fn canonical_frame<C: Coefficient>(jet: &TruncatedSeries<C>) -> Result<MobiusStabilizer<C>> {
    let inv = jet.coefficient(1).try_inverse().ok_or(Error::DegenerateJet)?;
    // In Taylor form c_1 = u1 and c_2 = u2/2, so u2/(2 u1^2) = c_2/c_1^2.
    let c = if jet.order() >= 2 { jet.coefficient(2).clone() * inv.clone() * inv.clone() } else { C::zero() };
    MobiusStabilizer::new(inv, c)
}

/// The unique jet `z + Σ_{l≥3} w_l z^l/l!` in the orbit of `jet`.
pub fn canonical_representative<C: Coefficient>(jet: &TruncatedSeries<C>) -> Result<TruncatedSeries<C>> {
    stabilizer_action(jet, &canonical_frame(jet)?)
}

/// Invariants `w_3, ..., w_k` (derivative convention) of a jet with `u1 ≠ 0`.
///
/// For floating point jets prefer [`canonical_projection_f64`], which also
/// rejects jets too close to the `u1 = 0` stratum.
pub fn canonical_projection<C: Coefficient>(jet: &TruncatedSeries<C>) -> Result<Vec<C>> {
    let rep = canonical_representative(jet)?;
    Ok(rep.derivatives().into_iter().skip(2).collect())
}

/// Floating point projection with a conditioning guard: rejects
/// `|u1| < threshold * max_l |u_l|`.
pub fn canonical_projection_f64(jet: &TruncatedSeries<f64>, threshold: f64) -> Result<Vec<f64>> {
    check_conditioning(jet, threshold)?;
    canonical_projection(jet)
}

fn check_conditioning(jet: &TruncatedSeries<f64>, threshold: f64) -> Result<()> {
    let u = jet.derivatives();
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("jet"));
    }
    let scale = u.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if u[0] == 0.0 {
        return Err(Error::DegenerateJet);
    }
    if u[0].abs() < threshold * scale {
        return Err(Error::IllConditionedJet { u1: u[0].abs(), threshold });
    }
    Ok(())
}

/// The symbolic invariants `w_3, ..., w_k` as Laurent polynomials in
/// `u1, ..., uk`, with `u1` invertible.
#[derive(Clone, Debug)]
pub struct InvariantSymbolFamily {
    order: usize,
    ring: PolyRing,
    symbols: Vec<LaurentPolynomial>,
}

#[derive(Serialize)]
struct TermJson {
    coefficient: String,
    exponents: Vec<i32>,
}

#[derive(Serialize)]
struct SymbolJson {
    name: String,
    expression: String,
    terms: Vec<TermJson>,
}

#[derive(Serialize)]
struct FamilyJson {
    order: usize,
    variables: Vec<String>,
    invariants: Vec<SymbolJson>,
}

impl InvariantSymbolFamily {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    /// `symbols()[0]` is `w_3`.
    pub fn symbols(&self) -> &[LaurentPolynomial] {
        &self.symbols
    }

    pub fn get(&self, l: usize) -> Option<&LaurentPolynomial> {
        l.checked_sub(3).and_then(|i| self.symbols.get(i))
    }

    /// One line per invariant: `w3 = u1^-3*u3 - 3/2*u1^-4*u2^2`.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (i, w) in self.symbols.iter().enumerate() {
            out.push_str(&format!("w{} = {}\n", i + 3, w));
        }
        out
    }

    pub fn render_json(&self) -> String {
        let doc = FamilyJson {
            order: self.order,
            variables: self.ring.symbols().iter().map(|s| s.name.clone()).collect(),
            invariants: self
                .symbols
                .iter()
                .enumerate()
                .map(|(i, w)| SymbolJson {
                    name: format!("w{}", i + 3),
                    expression: w.to_string(),
                    terms: w
                        .terms()
                        .map(|(e, c)| TermJson { coefficient: c.to_string(), exponents: e.to_vec() })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("family serializes")
    }

    /// Jacobian `∂w_l/∂u_m` at a numeric point, rows `w_3..w_k`, columns
    /// `u_1..u_k`.
    pub fn jacobian_at(&self, point: &[f64]) -> Result<nalgebra::DMatrix<f64>> {
        let k = self.order;
        if point.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: point.len() });
        }
        let mut jac = nalgebra::DMatrix::zeros(self.symbols.len(), k);
        for (r, w) in self.symbols.iter().enumerate() {
            for c in 0..k {
                jac[(r, c)] = w.partial_derivative(c).evaluate(point)?;
            }
        }
        Ok(jac)
    }
}

/// The ring `u1, ..., uk` with `u1` invertible.
pub fn jet_ring(order: usize) -> PolyRing {
    PolyRing::new((1..=order).map(|l| (format!("u{l}"), l == 1)))
}

/// Derives `w_3, ..., w_k` symbolically by composing the generic jet with its
/// canonical frame.
pub fn symbolic_invariants(order: usize) -> Result<InvariantSymbolFamily> {
    if order < 3 {
        return Err(Error::OrderTooLow { order, min: 3 });
    }
    let ring = jet_ring(order);
    let u: Vec<LaurentPolynomial> = (0..order).map(|i| ring.var(i)).collect();
    let jet = TruncatedSeries::from_derivatives(&u)?;
    let rep = canonical_representative(&jet)?;
    debug_assert!(rep.coefficient(1).is_one());
    debug_assert!(num_traits::Zero::is_zero(rep.coefficient(2)));
    let symbols = rep.derivatives().into_iter().skip(2).collect();
    Ok(InvariantSymbolFamily { order, ring, symbols })
}

/// `(1/u1^2) (u3/u1 - (3/2)(u2/u1)^2)`: the Schwarzian divided by `f'^2`.
pub fn eval_d1<C: Coefficient>(jet: &TruncatedSeries<C>) -> Result<C> {
    if jet.order() < 3 {
        return Err(Error::OrderTooLow { order: jet.order(), min: 3 });
    }
    let u = jet.derivatives();
    let inv = u[0].try_inverse().ok_or(Error::DegenerateJet)?;
    let ratio2 = u[1].clone() * inv.clone();
    let ratio3 = u[2].clone() * inv.clone();
    let three_halves = C::from_rational(&rational(3, 2));
    Ok(inv.clone() * inv * (ratio3 - three_halves * ratio2.clone() * ratio2))
}

/// `u4/u1^4 - 6 u3 u2/u1^5 + 6 u2^3/u1^6`.
pub fn eval_d2<C: Coefficient>(jet: &TruncatedSeries<C>) -> Result<C> {
    if jet.order() < 4 {
        return Err(Error::OrderTooLow { order: jet.order(), min: 4 });
    }
    let u = jet.derivatives();
    let inv = u[0].try_inverse().ok_or(Error::DegenerateJet)?;
    let inv2 = inv.clone() * inv.clone();
    let inv4 = inv2.clone() * inv2.clone();
    let six = C::from_i64(6);
    Ok(u[3].clone() * inv4.clone() - six.clone() * u[2].clone() * u[1].clone() * inv4.clone() * inv.clone()
        + six * u[1].clone() * u[1].clone() * u[1].clone() * inv4 * inv2)
}

/// Order-`k` Taylor data of `t_g` at `z0`: the value `t_g(z0)` as the
/// constant and the increments as the tail.
pub fn mobius_jet_at<C: Coefficient>(g: &MobiusElement<C>, z0: &C, order: usize) -> Result<ShiftedSeries<C>> {
    let den0 = g.c.clone() * z0.clone() + g.d.clone();
    if den0.try_inverse().is_none() {
        return Err(Error::Pole);
    }
    // t(z0 + s) = (a z0 + b + a s) / (c z0 + d + c s)
    let mut den_tail = vec![C::zero(); order];
    den_tail[0] = g.c.clone();
    let recip = TruncatedSeries::reciprocal_shifted(&den0, &TruncatedSeries::new(den_tail)?)?;
    let mut num_tail = vec![C::zero(); order];
    num_tail[0] = g.a.clone();
    let numerator =
        ShiftedSeries { constant: g.a.clone() * z0.clone() + g.b.clone(), tail: TruncatedSeries::new(num_tail)? };
    numerator.mul(&recip)
}

/// Jet of `f ∘ t_g` at `z0` from the jet of `f` at `t_g(z0)` (constant term
/// of `f` already dropped).
pub fn chain_jet<C: Coefficient>(
    jet_f_at_image: &TruncatedSeries<C>,
    g: &MobiusElement<C>,
    z0: &C,
) -> Result<TruncatedSeries<C>> {
    let inner = mobius_jet_at(g, z0, jet_f_at_image.order())?;
    jet_f_at_image.compose(&inner.tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rational, Rational};

    fn q(n: i64) -> Rational {
        rational(n, 1)
    }

    fn jet(u: &[i64]) -> TruncatedSeries<Rational> {
        TruncatedSeries::from_derivatives(&u.iter().map(|&x| q(x)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn stabilizer_jets() {
        let id = MobiusStabilizer::new(q(1), q(0)).unwrap();
        assert_eq!(mobius_jet(&id, 3).unwrap().coefficients(), &[q(1), q(0), q(0)]);
        let h = MobiusStabilizer::new(q(2), q(1)).unwrap();
        assert_eq!(mobius_jet(&h, 3).unwrap().coefficients(), &[q(2), q(-2), q(2)]);
        let h = MobiusStabilizer::new(q(1), q(-1)).unwrap();
        assert_eq!(mobius_jet(&h, 2).unwrap().coefficients(), &[q(1), q(1)]);
        assert_eq!(MobiusStabilizer::new(q(0), q(1)), Err(Error::ZeroStabilizerScale));
    }

    #[test]
    fn action_on_numeric_jets() {
        let h = MobiusStabilizer::new(q(2), q(3)).unwrap();
        let out = stabilizer_action(&jet(&[1, 0, 0, 0]), &h).unwrap();
        assert_eq!(out.derivatives(), vec![q(2), q(-12), q(108), q(-1296)]);

        let u = jet(&[3, -1, 4, 1]);
        let id = MobiusStabilizer::new(q(1), q(0)).unwrap();
        assert_eq!(stabilizer_action(&u, &id).unwrap(), u);
    }

    #[test]
    fn projection_examples() {
        let r = canonical_projection(&jet(&[1, 0, 5, 7])).unwrap();
        assert_eq!(r, vec![q(5), q(7)]);
        assert_eq!(canonical_projection(&jet(&[1, 1, 1])).unwrap(), vec![rational(-1, 2)]);
        assert_eq!(canonical_projection(&jet(&[1, -2, 6])).unwrap(), vec![q(0)]);
        assert_eq!(canonical_projection(&jet(&[0, 1, 1])), Err(Error::DegenerateJet));
    }

    #[test]
    fn representative_is_normalized() {
        let rep = canonical_representative(&jet(&[3, -5, 2, 9, 4])).unwrap();
        assert_eq!(rep.derivatives()[..2], [q(1), q(0)]);
    }

    #[test]
    fn float_projection_guard() {
        let s = TruncatedSeries::from_derivatives(&[1e-12, 1.0, 1.0]).unwrap();
        assert!(matches!(canonical_projection_f64(&s, FLOAT_U1_THRESHOLD), Err(Error::IllConditionedJet { .. })));
        let s = TruncatedSeries::from_derivatives(&[0.0, 1.0, 1.0]).unwrap();
        assert_eq!(canonical_projection_f64(&s, FLOAT_U1_THRESHOLD), Err(Error::DegenerateJet));
        let s = TruncatedSeries::from_derivatives(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(canonical_projection_f64(&s, FLOAT_U1_THRESHOLD).unwrap(), vec![-0.5]);
    }

    #[test]
    fn d1_examples() {
        assert_eq!(eval_d1(&jet(&[1, 0, 0])).unwrap(), q(0));
        assert_eq!(eval_d1(&jet(&[1, 1, 1])).unwrap(), rational(-1, 2));
        assert_eq!(eval_d1(&jet(&[2, 0, 6])).unwrap(), rational(3, 4));
        assert_eq!(eval_d1(&jet(&[0, 0, 6])), Err(Error::DegenerateJet));
        assert!(matches!(eval_d1(&jet(&[1, 0])), Err(Error::OrderTooLow { .. })));
    }

    #[test]
    fn d2_examples() {
        assert_eq!(eval_d2(&jet(&[1, 0, 0, 11])).unwrap(), q(11));
        assert_eq!(eval_d2(&jet(&[1, 1, 1, 1])).unwrap(), q(1));
        assert_eq!(eval_d2(&jet(&[1, -2, 6, -24])).unwrap(), q(0));
        assert_eq!(eval_d2(&jet(&[0, 1, 6, -24])), Err(Error::DegenerateJet));
    }

    #[test]
    fn jets_at_base_points() {
        let id = MobiusElement::<Rational>::identity();
        let j = mobius_jet_at(&id, &q(5), 3).unwrap();
        assert_eq!(j.constant, q(5));
        assert_eq!(j.tail, TruncatedSeries::identity(3).unwrap());

        let t = MobiusElement::translation(q(7));
        let j = mobius_jet_at(&t, &q(0), 3).unwrap();
        assert_eq!(j.constant, q(7));
        assert_eq!(j.tail, TruncatedSeries::identity(3).unwrap());

        let g = MobiusElement::new(q(1), q(0), q(1), q(1)).unwrap();
        let j = mobius_jet_at(&g, &q(1), 2).unwrap();
        assert_eq!(j.constant, rational(1, 2));
        assert_eq!(j.tail.coefficients(), &[rational(1, 4), rational(-1, 8)]);

        let g = MobiusElement::new(q(1), q(0), q(1), q(1)).unwrap();
        assert_eq!(mobius_jet_at(&g, &q(-1), 2), Err(Error::Pole));
        assert_eq!(MobiusElement::new(q(1), q(2), q(2), q(4)), Err(Error::SingularMobius));
    }

    #[test]
    fn symbolic_order_guard() {
        assert!(matches!(symbolic_invariants(2), Err(Error::OrderTooLow { order: 2, min: 3 })));
    }
}
