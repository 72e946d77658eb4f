//! Elements of the conformal group of Minkowski space, written as words in
//! the generators, with point evaluation and order-2 Taylor data at any base
//! point.
//!
//! A word is applied left to right: `T(a) D(2)` first translates by `a` and
//! then scales by 2. Special conformal transformations are only defined off
//! the hypersurface where their denominator vanishes; evaluating there is a
//! [`Error::SingularPoint`] error.
//!
//! ```
//! use jetred::conformal::ConformalElement;
//!
//! let g: ConformalElement = ConformalElement::parse("K(0,1,0,0)", 4).unwrap();
//! let y = g.apply_point(&[0.0, 1.0, 0.0, 0.0]).unwrap();
//! assert_eq!(y, vec![0.0, 0.5, 0.0, 0.0]);
//! ```

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::minkowski::{diffeo_action, Map2Jet, Metric, ScalarJet2, LORENTZ_TOLERANCE};
use crate::reduction::boost_to_e0;
use crate::scalar::PointScalar;

/// Denominators of special conformal transformations below this size count
/// as singular.
pub const SINGULAR_DENOMINATOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Translation(DVector<f64>),
    Lorentz(DMatrix<f64>),
    Dilatation(f64),
    SpecialConformal(DVector<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Translation,
    Lorentz,
    Dilatation,
    SpecialConformal,
}

impl Generator {
    pub fn kind(&self) -> GeneratorKind {
        match self {
            Generator::Translation(_) => GeneratorKind::Translation,
            Generator::Lorentz(_) => GeneratorKind::Lorentz,
            Generator::Dilatation(_) => GeneratorKind::Dilatation,
            Generator::SpecialConformal(_) => GeneratorKind::SpecialConformal,
        }
    }

    fn validate(&self, metric: &Metric) -> Result<()> {
        let n = metric.dim();
        match self {
            Generator::Translation(v) | Generator::SpecialConformal(v) => {
                metric.check_dim(v.len())?;
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite("generator"));
                }
            }
            Generator::Lorentz(l) => {
                if l.nrows() != n || l.ncols() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: l.nrows().max(l.ncols()) });
                }
                if l.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite("generator"));
                }
                let residual = metric.lorentz_residual(l)?;
                if residual > LORENTZ_TOLERANCE * l.amax().powi(2).max(1.0) {
                    return Err(Error::NotLorentz { residual });
                }
            }
            Generator::Dilatation(s) => {
                if !(*s > 0.0 && s.is_finite()) {
                    return Err(Error::NonPositiveScale(*s));
                }
            }
        }
        Ok(())
    }

    fn apply<T: PointScalar>(&self, metric: &Metric, x: &[T]) -> Result<Vec<T>> {
        let n = metric.dim();
        Ok(match self {
            Generator::Translation(a) => x.iter().zip(a.iter()).map(|(xi, ai)| xi.clone() + T::constant(*ai)).collect(),
            Generator::Lorentz(l) => {
                (0..n).map(|i| (1..n).fold(x[0].scale(l[(i, 0)]), |acc, j| acc + x[j].scale(l[(i, j)]))).collect()
            }
            Generator::Dilatation(s) => x.iter().map(|xi| xi.scale(*s)).collect(),
            Generator::SpecialConformal(b) => {
                let x_sq = inner_generic(metric, x, x);
                let bx = (1..n).fold(x[0].scale(-b[0]), |acc, j| acc + x[j].scale(b[j]));
                let b_sq = metric.inner(b, b)?;
                let den = T::constant(1.0) + bx.scale(2.0) + x_sq.scale(b_sq);
                if den.re().abs() < SINGULAR_DENOMINATOR {
                    return Err(Error::SingularPoint { denominator: den.re() });
                }
                (0..n).map(|i| (x[i].clone() + x_sq.scale(b[i])) / den.clone()).collect()
            }
        })
    }

    /// Order-2 Taylor data of this generator at `x`.
    pub fn map_jet2_at(&self, metric: &Metric, x: &DVector<f64>) -> Result<Map2Jet> {
        let n = metric.dim();
        let zero_h = || vec![DMatrix::zeros(n, n); n];
        Ok(match self {
            Generator::Translation(a) => Map2Jet::from_parts(x + a, DMatrix::identity(n, n), zero_h()),
            Generator::Lorentz(l) => Map2Jet::from_parts(l * x, l.clone(), zero_h()),
            Generator::Dilatation(s) => Map2Jet::from_parts(x * *s, DMatrix::identity(n, n) * *s, zero_h()),
            Generator::SpecialConformal(b) => sct_jet(metric, b, x)?,
        })
    }
}

fn inner_generic<T: PointScalar>(metric: &Metric, x: &[T], y: &[T]) -> T {
    (1..metric.dim()).fold(-(x[0].clone() * y[0].clone()), |acc, j| acc + x[j].clone() * y[j].clone())
}

/// A scalar polynomial of degree at most two in a displacement `ξ`,
/// `c + g·ξ + ½ ξᵀ H ξ`, with products truncated at degree two.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly2 {
    pub constant: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl MultiPoly2 {
    pub fn constant(n: usize, c: f64) -> Self {
        MultiPoly2 { constant: c, gradient: DVector::zeros(n), hessian: DMatrix::zeros(n, n) }
    }

    /// The coordinate `x_i + ξ_i`.
    pub fn coordinate(n: usize, i: usize, x_i: f64) -> Self {
        let mut p = Self::constant(n, x_i);
        p.gradient[i] = 1.0;
        p
    }

    pub fn add(&self, o: &Self) -> Self {
        MultiPoly2 {
            constant: self.constant + o.constant,
            gradient: &self.gradient + &o.gradient,
            hessian: &self.hessian + &o.hessian,
        }
    }

    pub fn scale(&self, f: f64) -> Self {
        MultiPoly2 { constant: self.constant * f, gradient: &self.gradient * f, hessian: &self.hessian * f }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let cross = &self.gradient * o.gradient.transpose();
        MultiPoly2 {
            constant: self.constant * o.constant,
            gradient: &o.gradient * self.constant + &self.gradient * o.constant,
            hessian: &o.hessian * self.constant + &self.hessian * o.constant + &cross + cross.transpose(),
        }
    }

    /// `1/p` through degree two; the constant term must be nonzero.
    pub fn reciprocal(&self) -> Result<Self> {
        let c = self.constant;
        if c.abs() < SINGULAR_DENOMINATOR {
            return Err(Error::SingularPoint { denominator: c });
        }
        let c2 = c * c;
        Ok(MultiPoly2 {
            constant: 1.0 / c,
            gradient: &self.gradient * (-1.0 / c2),
            hessian: &self.hessian * (-1.0 / c2) + &self.gradient * self.gradient.transpose() * (2.0 / (c2 * c)),
        })
    }
}

/// Numerator `x^μ + b^μ x²` times the reciprocal of `1 + 2 b·x + b² x²`,
/// expanded around `x`.
fn sct_jet(metric: &Metric, b: &DVector<f64>, x: &DVector<f64>) -> Result<Map2Jet> {
    let n = metric.dim();
    let coords: Vec<MultiPoly2> = (0..n).map(|i| MultiPoly2::coordinate(n, i, x[i])).collect();
    let x_sq =
        (0..n).fold(MultiPoly2::constant(n, 0.0), |acc, i| acc.add(&coords[i].mul(&coords[i]).scale(metric.sign(i))));
    let bx = (0..n).fold(MultiPoly2::constant(n, 0.0), |acc, i| acc.add(&coords[i].scale(metric.sign(i) * b[i])));
    let b_sq = metric.inner(b, b)?;
    let den = MultiPoly2::constant(n, 1.0).add(&bx.scale(2.0)).add(&x_sq.scale(b_sq));
    let recip = den.reciprocal()?;
    let comps: Vec<MultiPoly2> = (0..n).map(|i| coords[i].add(&x_sq.scale(b[i])).mul(&recip)).collect();
    let value = DVector::from_fn(n, |i, _| comps[i].constant);
    let a = DMatrix::from_fn(n, n, |i, j| comps[i].gradient[j]);
    let a2 = comps.into_iter().map(|p| p.hessian).collect();
    Ok(Map2Jet::from_parts(value, a, a2))
}

/// A word in the generators, read left to right.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalElement {
    metric: Metric,
    word: Vec<Generator>,
}

impl ConformalElement {
    pub fn new(dim: usize, word: Vec<Generator>) -> Result<Self> {
        let metric = Metric::new(dim)?;
        for g in &word {
            g.validate(&metric)?;
        }
        Ok(ConformalElement { metric, word })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn word(&self) -> &[Generator] {
        &self.word
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &ConformalElement) -> Result<ConformalElement> {
        if next.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: next.dim() });
        }
        let mut word = self.word.clone();
        word.extend(next.word.iter().cloned());
        Ok(ConformalElement { metric: self.metric, word })
    }

    /// `self ∘ inner`: `inner` acts first.
    pub fn compose(&self, inner: &ConformalElement) -> Result<ConformalElement> {
        inner.then(self)
    }

    pub fn apply_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.apply_point_generic(x)
    }

    pub fn apply_point_generic<T: PointScalar>(&self, x: &[T]) -> Result<Vec<T>> {
        self.metric.check_dim(x.len())?;
        let mut y = x.to_vec();
        for g in &self.word {
            y = g.apply(&self.metric, &y)?;
        }
        Ok(y)
    }

    /// Smallest `|1 + 2b·x + b²x²|` met by a special conformal factor along
    /// the word, starting at `x`; `f64::INFINITY` if there is none. The walk
    /// stops at the first pole.
    pub fn min_denominator(&self, x: &[f64]) -> Result<f64> {
        self.metric.check_dim(x.len())?;
        let mut y = x.to_vec();
        let mut min = f64::INFINITY;
        for g in &self.word {
            if let Generator::SpecialConformal(b) = g {
                let yv = DVector::from_column_slice(&y);
                let den =
                    1.0 + 2.0 * self.metric.inner(b, &yv)? + self.metric.inner(b, b)? * self.metric.inner(&yv, &yv)?;
                min = min.min(den.abs());
                if min <= SINGULAR_DENOMINATOR {
                    return Ok(min);
                }
            }
            y = g.apply(&self.metric, &y)?;
        }
        Ok(min)
    }

    /// Order-2 Taylor data of the whole word at `x`, composed generator by
    /// generator with the truncated chain rule.
    pub fn map_jet2_at(&self, x: &DVector<f64>) -> Result<Map2Jet> {
        self.metric.check_dim(x.len())?;
        let mut jet = Map2Jet::identity(x.clone());
        for g in &self.word {
            let step = g.map_jet2_at(&self.metric, jet.value())?;
            jet = Map2Jet::compose(&step, &jet)?;
        }
        Ok(jet)
    }

    /// Parses a whitespace-separated word. Tokens:
    ///
    /// * `T(a0,...)`, `K(b0,...)`: translation, special conformal map;
    /// * `D(s)`: dilatation by `s > 0`;
    /// * `L(l00,l01,...)`: Lorentz matrix, row-major;
    /// * `R(boost:η,axis:i)`: boost with rapidity `η` in the `0-i` plane;
    /// * `R(rot:θ,plane:i-j)`: rotation by `θ` in a spatial plane;
    /// * `id`: the empty word.
    pub fn parse(text: &str, dim: usize) -> Result<ConformalElement> {
        let metric = Metric::new(dim)?;
        let mut word = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix("id") {
                rest = r.trim_start();
                continue;
            }
            let open = rest.find('(').ok_or_else(|| Error::Parse(format!("expected '(' in {rest:?}")))?;
            let close = rest.find(')').ok_or_else(|| Error::Parse(format!("unclosed generator in {rest:?}")))?;
            if close < open {
                return Err(Error::Parse(format!("malformed generator in {rest:?}")));
            }
            let name = rest[..open].trim();
            let args = &rest[open + 1..close];
            word.push(parse_generator(name, args, dim)?);
            rest = rest[close + 1..].trim_start();
        }
        for g in &word {
            g.validate(&metric)?;
        }
        Ok(ConformalElement { metric, word })
    }
}

fn parse_numbers(args: &str) -> Result<Vec<f64>> {
    args.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("not a number: {s:?}")))).collect()
}

fn parse_index(s: &str, dim: usize) -> Result<usize> {
    let i: usize = s.trim().parse().map_err(|_| Error::Parse(format!("not an index: {s:?}")))?;
    if i == 0 || i >= dim {
        return Err(Error::Parse(format!("spatial index {i} out of range 1..{dim}")));
    }
    Ok(i)
}

fn keyed<'a>(part: &'a str, key: &str) -> Result<&'a str> {
    part.trim()
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix(':'))
        .ok_or_else(|| Error::Parse(format!("expected {key}:... in {part:?}")))
}

fn parse_generator(name: &str, args: &str, dim: usize) -> Result<Generator> {
    let vector = |v: Vec<f64>| {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
        Ok(DVector::from_vec(v))
    };
    match name {
        "T" => Ok(Generator::Translation(vector(parse_numbers(args)?)?)),
        "K" => Ok(Generator::SpecialConformal(vector(parse_numbers(args)?)?)),
        "D" => match parse_numbers(args)?.as_slice() {
            [s] => Ok(Generator::Dilatation(*s)),
            other => Err(Error::ArityMismatch { expected: 1, found: other.len() }),
        },
        "L" => {
            let v = parse_numbers(args)?;
            if v.len() != dim * dim {
                return Err(Error::ArityMismatch { expected: dim * dim, found: v.len() });
            }
            Ok(Generator::Lorentz(DMatrix::from_row_slice(dim, dim, &v)))
        }
        "R" => {
            let parts: Vec<&str> = args.split(',').collect();
            if parts.len() != 2 {
                return Err(Error::ArityMismatch { expected: 2, found: parts.len() });
            }
            if let Ok(eta) = keyed(parts[0], "boost") {
                let eta: f64 = parse_numbers(eta)?[0];
                Ok(Generator::Lorentz(boost_matrix(dim, parse_index(keyed(parts[1], "axis")?, dim)?, eta)))
            } else {
                let theta: f64 = parse_numbers(keyed(parts[0], "rot")?)?[0];
                let plane = keyed(parts[1], "plane")?;
                let (i, j) =
                    plane.split_once('-').ok_or_else(|| Error::Parse(format!("expected i-j, got {plane:?}")))?;
                let (i, j) = (parse_index(i, dim)?, parse_index(j, dim)?);
                if i == j {
                    return Err(Error::Parse(format!("degenerate rotation plane {plane:?}")));
                }
                Ok(Generator::Lorentz(rotation_matrix(dim, i, j, theta)))
            }
        }
        other => Err(Error::Parse(format!("unknown generator {other:?}"))),
    }
}

/// Boost with rapidity `eta` mixing `x^0` and `x^axis`.
pub fn boost_matrix(dim: usize, axis: usize, eta: f64) -> DMatrix<f64> {
    let mut l = DMatrix::identity(dim, dim);
    let (c, s) = (eta.cosh(), eta.sinh());
    l[(0, 0)] = c;
    l[(axis, axis)] = c;
    l[(0, axis)] = s;
    l[(axis, 0)] = s;
    l
}

/// Rotation by `theta` in the spatial `i-j` plane.
pub fn rotation_matrix(dim: usize, i: usize, j: usize, theta: f64) -> DMatrix<f64> {
    let mut l = DMatrix::identity(dim, dim);
    let (c, s) = (theta.cos(), theta.sin());
    l[(i, i)] = c;
    l[(j, j)] = c;
    l[(i, j)] = -s;
    l[(j, i)] = s;
    l
}

fn join(values: impl Iterator<Item = f64>) -> String {
    values.map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Translation(a) => write!(f, "T({})", join(a.iter().copied())),
            Generator::SpecialConformal(b) => write!(f, "K({})", join(b.iter().copied())),
            Generator::Dilatation(s) => write!(f, "D({s})"),
            Generator::Lorentz(l) => write!(f, "L({})", join(l.transpose().iter().copied())),
        }
    }
}

impl fmt::Display for ConformalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("id");
        }
        let tokens: Vec<String> = self.word.iter().map(|g| g.to_string()).collect();
        f.write_str(&tokens.join(" "))
    }
}

/// The 2-jet of `f ∘ φ` at `x` from the 2-jet of `f` at `φ(x)` and the
/// Taylor data of `φ` at `x`.
pub fn pullback_scalar_jet(jet_at_image: &ScalarJet2, phi: &Map2Jet) -> Result<ScalarJet2> {
    diffeo_action(jet_at_image, phi)
}

/// Largest off-diagonal entry of `AᵀηA / e^w - η`, where `e^w` is read from
/// the `(1, 1)` entry; returns `(e^w, residual)`.
pub fn conformal_factor(a: &DMatrix<f64>) -> Result<(f64, f64)> {
    let metric = Metric::new(a.nrows())?;
    let eta = metric.matrix();
    let g = a.transpose() * &eta * a;
    let factor = g[(1, 1)];
    Ok((factor, (g - eta * factor).amax()))
}

pub const ALL_KINDS: [GeneratorKind; 4] =
    [GeneratorKind::Translation, GeneratorKind::Lorentz, GeneratorKind::Dilatation, GeneratorKind::SpecialConformal];

/// The generators fixing the origin.
pub const STABILIZER_KINDS: [GeneratorKind; 3] =
    [GeneratorKind::Lorentz, GeneratorKind::Dilatation, GeneratorKind::SpecialConformal];

/// A random orthochronous Lorentz matrix: a boost built from a random unit
/// timelike vector, followed by rotations in every spatial plane.
pub fn random_lorentz<R: Rng>(rng: &mut R, scale: f64, dim: usize) -> Result<DMatrix<f64>> {
    let mut v = DVector::zeros(dim);
    for i in 1..dim {
        v[i] = rng.random_range(-1.0..=1.0) * scale;
    }
    v[0] = (1.0 + v.rows(1, dim - 1).norm_squared()).sqrt();
    let mut l = boost_to_e0(&v)?;
    for i in 1..dim {
        for j in i + 1..dim {
            let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            l = rotation_matrix(dim, i, j, theta) * l;
        }
    }
    Ok(l)
}

pub fn random_generator<R: Rng>(rng: &mut R, kind: GeneratorKind, scale: f64, dim: usize) -> Result<Generator> {
    let vector = |rng: &mut R| DVector::from_fn(dim, |_, _| rng.random_range(-1.0..=1.0) * scale);
    Ok(match kind {
        GeneratorKind::Translation => Generator::Translation(vector(rng)),
        GeneratorKind::SpecialConformal => Generator::SpecialConformal(vector(rng)),
        GeneratorKind::Dilatation => Generator::Dilatation((rng.random_range(-1.0..=1.0) * scale).exp()),
        GeneratorKind::Lorentz => Generator::Lorentz(random_lorentz(rng, scale, dim)?),
    })
}

/// A deterministic random word of length `1..=max_word_len` with
/// parameters of size at most `scale`, drawn from `kinds`.
pub fn random_element_with(
    seed: u64,
    max_word_len: usize,
    scale: f64,
    dim: usize,
    kinds: &[GeneratorKind],
) -> Result<ConformalElement> {
    if max_word_len == 0 {
        return Err(Error::InvalidArgument("max_word_len must be at least 1".into()));
    }
    if kinds.is_empty() {
        return Err(Error::InvalidArgument("no generator kinds to sample from".into()));
    }
    let metric = Metric::new(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.random_range(1..=max_word_len);
    let word = (0..len)
        .map(|_| {
            let kind = kinds[rng.random_range(0..kinds.len())];
            random_generator(&mut rng, kind, scale, dim)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConformalElement { metric, word })
}

pub fn random_element(seed: u64, max_word_len: usize, scale: f64, dim: usize) -> Result<ConformalElement> {
    random_element_with(seed, max_word_len, scale, dim, &ALL_KINDS)
}

/// A random word in the stabilizer of the origin.
pub fn random_stabilizer(seed: u64, max_word_len: usize, scale: f64, dim: usize) -> Result<ConformalElement> {
    random_element_with(seed, max_word_len, scale, dim, &STABILIZER_KINDS)
}
