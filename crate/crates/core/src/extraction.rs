//! Exact jets of concrete test functions.
//!
//! Multivariate functions come from a small catalog whose derivatives are
//! known in closed form: polynomials of degree at most four, and a
//! univariate polynomial applied to a quadratic. Both serialize to JSON:
//!
//! ```json
//! {"kind": "polynomial", "n": 2, "terms": [{"coefficient": 1.5, "exponents": [2, 1]}]}
//! {"kind": "composite", "outer": [0, 1, 0.5], "constant": 0, "linear": [1, 0], "quadratic": [[0, 0], [0, 2]]}
//! ```
//!
//! The composite stands for `p(c + l·x + ½ xᵀQx)` with `p(t) = Σ outer[m] t^m`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Coefficient, TruncatedSeries};
use crate::conformal::ConformalElement;
use crate::error::{Error, Result};
use crate::minkowski::ScalarJet2;
use crate::mobius::{mobius_jet_at, MobiusElement};
use crate::scalar::{HyperDual, PointScalar};

pub const DEGREE_CAP: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: f64,
    pub exponents: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    Polynomial { n: usize, terms: Vec<Term> },
    Composite { outer: Vec<f64>, constant: f64, linear: Vec<f64>, quadratic: Vec<Vec<f64>> },
}

impl TestFunction {
    pub fn polynomial(n: usize, terms: Vec<Term>) -> Result<Self> {
        let f = TestFunction::Polynomial { n, terms };
        f.validate()?;
        Ok(f)
    }

    pub fn composite(outer: Vec<f64>, constant: f64, linear: Vec<f64>, quadratic: DMatrix<f64>) -> Result<Self> {
        let quadratic = quadratic.row_iter().map(|r| r.iter().copied().collect()).collect();
        let f = TestFunction::Composite { outer, constant, linear, quadratic };
        f.validate()?;
        Ok(f)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: TestFunction = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        f.validate()?;
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunction::Polynomial { n, .. } => *n,
            TestFunction::Composite { linear, .. } => linear.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: &f64| x.is_finite();
        match self {
            TestFunction::Polynomial { n, terms } => {
                for t in terms {
                    if t.exponents.len() != *n {
                        return Err(Error::ArityMismatch { expected: *n, found: t.exponents.len() });
                    }
                    let degree = t.exponents.iter().sum::<u32>() as usize;
                    if degree > DEGREE_CAP {
                        return Err(Error::DegreeTooHigh { degree, cap: DEGREE_CAP });
                    }
                    if !t.coefficient.is_finite() {
                        return Err(Error::NonFinite("coefficient"));
                    }
                }
            }
            TestFunction::Composite { outer, constant, linear, quadratic } => {
                let n = linear.len();
                if outer.len() > DEGREE_CAP + 1 {
                    return Err(Error::DegreeTooHigh { degree: outer.len() - 1, cap: DEGREE_CAP });
                }
                if quadratic.len() != n || quadratic.iter().any(|r| r.len() != n) {
                    return Err(Error::DimensionMismatch { expected: n, found: quadratic.len() });
                }
                let all_finite = outer.iter().all(finite)
                    && constant.is_finite()
                    && linear.iter().all(finite)
                    && quadratic.iter().flatten().all(finite);
                if !all_finite {
                    return Err(Error::NonFinite("coefficient"));
                }
                let q = self.quadratic_matrix();
                let residual = (&q - q.transpose()).amax();
                if residual > 1e-12 * q.amax().max(1.0) {
                    return Err(Error::NotSymmetric { residual });
                }
            }
        }
        Ok(())
    }

    fn quadratic_matrix(&self) -> DMatrix<f64> {
        match self {
            TestFunction::Composite { quadratic, linear, .. } => {
                let n = linear.len();
                DMatrix::from_fn(n, n, |i, j| quadratic[i][j])
            }
            TestFunction::Polynomial { n, .. } => DMatrix::zeros(*n, *n),
        }
    }

    pub fn eval<T: PointScalar>(&self, x: &[T]) -> Result<T> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(match self {
            TestFunction::Polynomial { terms, .. } => terms.iter().fold(T::constant(0.0), |acc, t| {
                let m = t.exponents.iter().zip(x).fold(T::constant(t.coefficient), |m, (&e, xi)| m * xi.powi(e));
                acc + m
            }),
            TestFunction::Composite { outer, constant, linear, quadratic } => {
                let n = linear.len();
                let mut q = T::constant(*constant);
                for i in 0..n {
                    q = q + x[i].scale(linear[i]);
                    for j in 0..n {
                        q = q + (x[i].clone() * x[j].clone()).scale(0.5 * quadratic[i][j]);
                    }
                }
                outer.iter().rev().fold(T::constant(0.0), |acc, a| acc * q.clone() + T::constant(*a))
            }
        })
    }
}

/// The monomial `x^e` differentiated once along each index in `derivs`.
fn monomial_derivative(exponents: &[u32], x: &[f64], derivs: &[usize]) -> f64 {
    let mut e = exponents.to_vec();
    let mut factor = 1.0;
    for &k in derivs {
        if e[k] == 0 {
            return 0.0;
        }
        factor *= e[k] as f64;
        e[k] -= 1;
    }
    e.iter().zip(x).fold(factor, |acc, (&p, &xi)| acc * xi.powi(p as i32))
}

fn horner_derivatives(coeffs: &[f64], t: f64) -> (f64, f64) {
    let d1 = coeffs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (m, a)| acc * t + a * m as f64);
    let d2 = coeffs.iter().enumerate().skip(2).rev().fold(0.0, |acc, (m, a)| acc * t + a * (m * (m - 1)) as f64);
    (d1, d2)
}

/// First and second partial derivatives of `f` at `x`, in closed form.
pub fn jet2_of(f: &TestFunction, x: &[f64]) -> Result<ScalarJet2> {
    let n = f.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    match f {
        TestFunction::Polynomial { terms, .. } => {
            let sum = |d: &[usize]| terms.iter().map(|t| t.coefficient * monomial_derivative(&t.exponents, x, d)).sum();
            let u = DVector::from_fn(n, |i, _| sum(&[i]));
            let u2 = DMatrix::from_fn(n, n, |i, j| sum(&[i, j]));
            ScalarJet2::new(u, u2)
        }
        TestFunction::Composite { outer, constant, linear, .. } => {
            let q = f.quadratic_matrix();
            let xv = DVector::from_column_slice(x);
            let lin = DVector::from_column_slice(linear);
            let t = constant + lin.dot(&xv) + 0.5 * xv.dot(&(&q * &xv));
            let grad = lin + &q * xv;
            let (p1, p2) = horner_derivatives(outer, t);
            let u = &grad * p1;
            let u2 = &grad * grad.transpose() * p2 + q * p1;
            ScalarJet2::new(u, u2)
        }
    }
}

/// 2-jet at `x` of any function evaluated through hyper-dual numbers.
pub fn jet2_by_hyperdual<F>(x: &[f64], f: F) -> Result<ScalarJet2>
where
    F: Fn(&[HyperDual]) -> Result<HyperDual>,
{
    let n = x.len();
    let mut u = DVector::zeros(n);
    let mut u2 = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = f(&HyperDual::seed(x, i, j))?;
            if i == j {
                u[i] = v.e1;
            }
            u2[(i, j)] = v.e12;
            u2[(j, i)] = v.e12;
        }
    }
    ScalarJet2::new(u, u2)
}

/// The 2-jet of `f ∘ t_g` at `x`, differentiating through the whole
/// composite at once.
pub fn jet2_of_composed(f: &TestFunction, g: &ConformalElement, x: &[f64]) -> Result<ScalarJet2> {
    jet2_by_hyperdual(x, |p| f.eval(&g.apply_point_generic(p)?))
}

/// Second-order central differences of pointwise evaluation.
pub fn jet2_by_differences(f: &TestFunction, x: &[f64], h: f64) -> Result<ScalarJet2> {
    let n = x.len();
    let at = |shift: &[(usize, f64)]| {
        let mut p = x.to_vec();
        for &(k, s) in shift {
            p[k] += s;
        }
        f.eval(&p)
    };
    let mut u = DVector::zeros(n);
    let mut u2 = DMatrix::zeros(n, n);
    for i in 0..n {
        u[i] = (at(&[(i, h)])? - at(&[(i, -h)])?) / (2.0 * h);
        for j in i..n {
            let v = (at(&[(i, h), (j, h)])? - at(&[(i, h), (j, -h)])? - at(&[(i, -h), (j, h)])?
                + at(&[(i, -h), (j, -h)])?)
                / (4.0 * h * h);
            u2[(i, j)] = v;
            u2[(j, i)] = v;
        }
    }
    ScalarJet2::new(u, u2)
}

/// A random polynomial in `n` variables with every monomial of degree
/// `1..=degree` present and coefficients in `[-scale, scale]`.
pub fn random_polynomial<R: Rng>(rng: &mut R, n: usize, degree: usize, scale: f64) -> Result<TestFunction> {
    let degree = degree.min(DEGREE_CAP);
    let mut terms = Vec::new();
    let mut exps = vec![0u32; n];
    fn walk<R: Rng>(rng: &mut R, k: usize, left: u32, exps: &mut Vec<u32>, terms: &mut Vec<Term>, scale: f64) {
        if k == exps.len() {
            if exps.iter().any(|&e| e > 0) {
                terms.push(Term { coefficient: rng.random_range(-1.0..=1.0) * scale, exponents: exps.clone() });
            }
            return;
        }
        for e in 0..=left {
            exps[k] = e;
            walk(rng, k + 1, left - e, exps, terms, scale);
        }
        exps[k] = 0;
    }
    walk(rng, 0, degree as u32, &mut exps, &mut terms, scale);
    TestFunction::polynomial(n, terms)
}

/// A random `p(c + l·x + ½ xᵀQx)` with `p` of the given degree.
pub fn random_composite<R: Rng>(rng: &mut R, n: usize, degree: usize, scale: f64) -> Result<TestFunction> {
    let mut r = || rng.random_range(-1.0..=1.0) * scale;
    let outer = (0..=degree.min(DEGREE_CAP)).map(|_| r()).collect();
    let constant = r();
    let linear = (0..n).map(|_| r()).collect();
    let q = DMatrix::from_fn(n, n, |_, _| r());
    TestFunction::composite(outer, constant, linear, (&q + q.transpose()) * 0.5)
}

/// Univariate functions with exact Taylor expansions.
#[derive(Clone, Debug, PartialEq)]
pub enum UnivariateFunction<C> {
    /// Coefficients in ascending powers.
    Polynomial(Vec<C>),
    Mobius(MobiusElement<C>),
}

/// Taylor data `f^(l)(z0)`, `l = 1..=k`, as a truncated series (the value
/// `f(z0)` is dropped).
pub fn jetk_of<C: Coefficient>(f: &UnivariateFunction<C>, z0: &C, k: usize) -> Result<TruncatedSeries<C>> {
    match f {
        UnivariateFunction::Polynomial(a) => {
            // Coefficient of s^l in p(z0 + s) is Σ_m a_m C(m, l) z0^(m-l).
            let mut powers = vec![C::one()];
            for _ in 1..a.len().max(1) {
                let last = powers.last().cloned().unwrap_or_else(C::one);
                powers.push(last * z0.clone());
            }
            let coeffs = (1..=k)
                .map(|l| {
                    a.iter().enumerate().skip(l).fold(C::zero(), |acc, (m, am)| {
                        acc + am.clone() * C::from_i64(binomial(m, l)) * powers[m - l].clone()
                    })
                })
                .collect();
            TruncatedSeries::new(coeffs)
        }
        UnivariateFunction::Mobius(g) => Ok(mobius_jet_at(g, z0, k)?.tail),
    }
}

fn binomial(m: usize, l: usize) -> i64 {
    (0..l).fold(1i64, |acc, i| acc * (m - i) as i64 / (i + 1) as i64)
}
