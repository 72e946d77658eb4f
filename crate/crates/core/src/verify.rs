//! Seeded property checks over random inputs.
//!
//! Every check draws its trials from a ChaCha8 stream seeded per trial, so a
//! failing trial can be replayed from its `trial_seed` alone, and a report
//! is byte-identical for the same flags. Samples that land in an
//! ill-conditioned region (near-lightlike gradients, points close to a pole)
//! are redrawn from the same trial stream and counted as `rejected`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::TruncatedSeries;
use crate::conformal::{
    conformal_factor, random_element, random_element_with, random_stabilizer, ConformalElement, Generator,
    GeneratorKind,
};
use crate::error::{Error, Result};
use crate::extraction::{jet2_of, jet2_of_composed, random_polynomial, Term, TestFunction};
use crate::minkowski::{diffeo_action, Metric, ScalarJet2};
use crate::mobius::{
    canonical_projection_f64, chain_jet, eval_d1, eval_d2, mobius_jet_at, stabilizer_action, symbolic_invariants,
    InvariantSymbolFamily, MobiusElement, MobiusStabilizer, FLOAT_U1_THRESHOLD,
};
use crate::reduction::{
    boost_to_e0, canonicalize, d1_closed, d2_closed, d3_closed, dn_closed, relative_gap, trace_invariants, trace_powers,
};

/// Redraws allowed per trial before the trial counts as failed.
pub const MAX_DRAWS: usize = 1000;

/// Gradients with `|u²| < NEAR_LIGHTLIKE · |u|²` (Euclidean norm) are redrawn.
pub const NEAR_LIGHTLIKE: f64 = 1e-2;

/// Words whose special conformal factors pass closer than this to their
/// poles are redrawn; near a pole both differentiation paths lose digits to
/// cancellation.
pub const MIN_DENOMINATOR: f64 = 0.1;

/// Rank points whose spectrum has a relative gap below this are redrawn.
/// Independence of the power sums degenerates where eigenvalues coincide.
pub const MIN_SPECTRAL_GAP: f64 = 1e-2;

/// `|a - b| / max(1, |a|, |b|)`.
pub fn relative_residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn max_relative(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| relative_residual(*x, *y)).fold(0.0, f64::max)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` of the check `name` under `master`.
pub fn trial_seed(master: u64, name: &str, index: usize) -> u64 {
    let tag = name.bytes().fold(0xcbf2_9ce4_8422_2325_u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    splitmix64(splitmix64(master ^ tag).wrapping_add(index as u64))
}

/// Outcome of one draw.
pub enum Sample {
    /// Ill-conditioned input; draw again.
    Reject,
    Done {
        residual: f64,
        inputs: Value,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub check: String,
    pub trial: usize,
    pub trial_seed: u64,
    pub inputs: Value,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub tolerance: f64,
    pub trials: usize,
    pub rejected: usize,
    pub max_residual: f64,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub master_seed: u64,
    pub trials: usize,
    pub dim: usize,
    /// Tolerance override applied to every check, if one was given.
    pub tolerance: Option<f64>,
    pub checks: Vec<CheckSummary>,
    pub failures: Vec<Failure>,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: Option<f64>,
    pub dim: usize,
}

/// Runs `trial` for `trials` seeds and collects residuals against
/// `tolerance`.
pub fn run_check<F>(
    name: &str,
    tolerance: f64,
    trials: usize,
    master: u64,
    mut trial: F,
) -> (CheckSummary, Vec<Failure>)
where
    F: FnMut(&mut ChaCha8Rng) -> Result<Sample>,
{
    let mut summary =
        CheckSummary { name: name.to_string(), tolerance, trials, rejected: 0, max_residual: 0.0, failures: 0 };
    let mut failures = Vec::new();
    for index in 0..trials {
        let seed = trial_seed(master, name, index);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut outcome = None;
        for _ in 0..MAX_DRAWS {
            match trial(&mut rng) {
                Ok(Sample::Reject) => summary.rejected += 1,
                Ok(Sample::Done { residual, inputs }) => {
                    outcome = Some((residual, inputs));
                    break;
                }
                Err(e) => {
                    outcome = Some((f64::INFINITY, json!({ "error": e.to_string() })));
                    break;
                }
            }
        }
        let (residual, inputs) = outcome.unwrap_or((f64::INFINITY, json!({ "error": "no acceptable sample" })));
        // NaN never compares below the tolerance, so it fails too.
        let ok = residual <= tolerance;
        if residual.is_nan() || residual > summary.max_residual {
            summary.max_residual = residual;
        }
        if !ok {
            summary.failures += 1;
            failures.push(Failure { check: name.to_string(), trial: index, trial_seed: seed, inputs, residual });
        }
    }
    (summary, failures)
}

fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..=hi)
}

fn away_from_zero<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let x = uniform(rng, lo, hi);
    if rng.random::<bool>() {
        x
    } else {
        -x
    }
}

// ---- Möbius samplers ----

/// Random jet `u_1..u_k` with `|u_1| ∈ [0.2, 2]` and other entries in
/// `[-2, 2]`.
pub fn random_mobius_jet<R: Rng>(rng: &mut R, k: usize) -> TruncatedSeries<f64> {
    let mut u = vec![away_from_zero(rng, 0.2, 2.0)];
    u.extend((1..k).map(|_| uniform(rng, -2.0, 2.0)));
    TruncatedSeries::from_derivatives(&u).expect("order at least 1")
}

/// Random `(az + b)/(cz + d)` with entries in `[-2, 2]` and `|ad - bc| ≥ 0.2`.
pub fn random_mobius_element<R: Rng>(rng: &mut R) -> Option<MobiusElement<f64>> {
    let [a, b, c, d] = [(); 4].map(|_| uniform(rng, -2.0, 2.0));
    if (a * d - b * c).abs() < 0.2 {
        return None;
    }
    MobiusElement::new(a, b, c, d).ok()
}

fn mobius_full_group(rng: &mut ChaCha8Rng) -> Result<Sample> {
    let Some(g) = random_mobius_element(rng) else { return Ok(Sample::Reject) };
    let z0 = uniform(rng, -2.0, 2.0);
    if (g.c * z0 + g.d).abs() < 0.2 {
        return Ok(Sample::Reject);
    }
    let jet_f = random_mobius_jet(rng, 4);
    let pulled = chain_jet(&jet_f, &g, &z0)?;
    if pulled.coefficient(1).abs() < 0.05 {
        return Ok(Sample::Reject);
    }
    let before = [eval_d1(&jet_f)?, eval_d2(&jet_f)?];
    let after = [eval_d1(&pulled)?, eval_d2(&pulled)?];
    Ok(Sample::Done {
        residual: max_relative(&after, &before),
        inputs: json!({ "g": [g.a, g.b, g.c, g.d], "z0": z0, "jet": jet_f.derivatives() }),
    })
}

fn mobius_stabilizer(rng: &mut ChaCha8Rng) -> Result<Sample> {
    let jet = random_mobius_jet(rng, 6);
    let h = MobiusStabilizer::new(away_from_zero(rng, 0.5, 2.0), uniform(rng, -1.0, 1.0))?;
    let moved = stabilizer_action(&jet, &h)?;
    let before = canonical_projection_f64(&jet, FLOAT_U1_THRESHOLD)?;
    let after = match canonical_projection_f64(&moved, FLOAT_U1_THRESHOLD) {
        Ok(w) => w,
        Err(Error::IllConditionedJet { .. }) => return Ok(Sample::Reject),
        Err(e) => return Err(e),
    };
    Ok(Sample::Done {
        residual: max_relative(&after, &before),
        inputs: json!({ "a": h.a(), "c": h.c(), "jet": jet.derivatives() }),
    })
}

fn mobius_schwarzian(rng: &mut ChaCha8Rng) -> Result<Sample> {
    let Some(g) = random_mobius_element(rng) else { return Ok(Sample::Reject) };
    let z0 = uniform(rng, -2.0, 2.0);
    if (g.c * z0 + g.d).abs() < 0.2 {
        return Ok(Sample::Reject);
    }
    let jet = mobius_jet_at(&g, &z0, 3)?.tail;
    let u = jet.derivatives();
    // D1 is a difference of these two terms; measure it against their size.
    let scale = (u[2] / u[0].powi(3)).abs().max(1.5 * u[1] * u[1] / u[0].powi(4)).max(1.0);
    Ok(Sample::Done { residual: eval_d1(&jet)?.abs() / scale, inputs: json!({ "g": [g.a, g.b, g.c, g.d], "z0": z0 }) })
}

/// Numerical rank with singular values below `rel · σ_max` treated as zero.
pub fn numerical_rank(m: &DMatrix<f64>, rel: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(0.0_f64, |a, b| a.max(*b));
    sv.iter().filter(|s| **s > rel * max).count()
}

/// Scales every nonzero row, then every nonzero column, to unit Euclidean
/// norm. Diagonal rescaling leaves the rank unchanged but stops rows that
/// grow like different powers of the data from swamping the threshold.
pub fn equilibrate(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for mut row in out.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    for mut col in out.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
    }
    out
}

pub const RANK_THRESHOLD: f64 = 1e-8;

fn mobius_rank(family: &InvariantSymbolFamily, rng: &mut ChaCha8Rng) -> Result<Sample> {
    let point = random_mobius_jet(rng, family.order()).derivatives();
    let rank = numerical_rank(&equilibrate(&family.jacobian_at(&point)?), RANK_THRESHOLD);
    let expected = family.order() - 2;
    Ok(Sample::Done { residual: expected.abs_diff(rank) as f64, inputs: json!({ "point": point, "rank": rank }) })
}

// ---- Minkowski samplers ----

/// Random jet whose gradient is comfortably timelike: spatial components in
/// `[-1, 1]`, `|u_0|` exceeding the spatial norm by a margin, and second
/// derivatives in `[-1, 1]`.
pub fn random_timelike_jet<R: Rng>(rng: &mut R, n: usize) -> Result<ScalarJet2> {
    let mut u = DVector::from_fn(n, |_, _| uniform(rng, -1.0, 1.0));
    let spatial = u.rows(1, n - 1).norm_squared();
    u[0] = (spatial + uniform(rng, 0.25, 4.0)).sqrt() * if rng.random::<bool>() { 1.0 } else { -1.0 };
    let m = DMatrix::from_fn(n, n, |_, _| uniform(rng, -1.0, 1.0));
    ScalarJet2::new(u, (&m + m.transpose()) * 0.5)
}

/// Random unit timelike vector on either sheet; occasionally exactly `±e0`.
pub fn random_unit_timelike<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    if rng.random_range(0..10) > 0 {
        for i in 1..n {
            v[i] = uniform(rng, -3.0, 3.0);
        }
    }
    v[0] = (1.0 + v.rows(1, n - 1).norm_squared()).sqrt();
    if rng.random::<bool>() {
        v[0] = -v[0];
    }
    v
}

fn well_conditioned(jet: &ScalarJet2) -> bool {
    let g = jet.grad_sq();
    g < 0.0 && g.abs() >= NEAR_LIGHTLIKE * jet.u().norm_squared()
}

fn random_point<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| uniform(rng, -scale, scale)).collect()
}

fn domain_reject(e: Error) -> Result<Sample> {
    match e {
        Error::SingularPoint { .. } | Error::NonTimelikeGradient { .. } => Ok(Sample::Reject),
        other => Err(other),
    }
}

fn mink_stabilizer(n: usize, rng: &mut ChaCha8Rng) -> Result<Sample> {
    let jet = random_timelike_jet(rng, n)?;
    let g = random_stabilizer(rng.random(), 4, 0.5, n)?;
    let moved = diffeo_action(&jet, &g.map_jet2_at(&DVector::zeros(n))?)?;
    let before = trace_invariants(&jet)?;
    let after = trace_invariants(&moved)?;
    Ok(Sample::Done {
        residual: max_relative(&after, &before),
        inputs: json!({ "jet": jet.coordinates(), "g": g.to_string() }),
    })
}

/// A degree-2 polynomial `f`, a point `x`, and a word `g` such that `f` has a
/// well-conditioned timelike gradient at `g(x)`.
pub fn random_full_group_case<R: Rng>(
    rng: &mut R,
    n: usize,
) -> Result<Option<(TestFunction, ConformalElement, Vec<f64>)>> {
    let f = random_polynomial(rng, n, 2, 1.0)?;
    let g = random_element(rng.random(), 4, 0.3, n)?;
    let x = random_point(rng, n, 0.5);
    if g.min_denominator(&x)? < MIN_DENOMINATOR {
        return Ok(None);
    }
    let y = match g.apply_point(&x) {
        Ok(y) => y,
        Err(Error::SingularPoint { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let phi = g.map_jet2_at(&DVector::from_column_slice(&x))?;
    let (factor, _) = conformal_factor(phi.a())?;
    if !(1e-2..=1e2).contains(&factor) {
        return Ok(None);
    }
    // Shift the x^0 coefficient so the gradient at y is timelike with margin.
    let u = jet2_of(&f, &y)?.u().clone();
    let spatial = u.rows(1, n - 1).norm_squared();
    let target = (spatial + uniform(rng, 0.25, 4.0)).sqrt() * if u[0] < 0.0 { -1.0 } else { 1.0 };
    let TestFunction::Polynomial { mut terms, .. } = f else { unreachable!() };
    let mut e0 = vec![0; n];
    e0[0] = 1;
    terms.push(Term { coefficient: target - u[0], exponents: e0 });
    let f = TestFunction::polynomial(n, terms)?;
    if !well_conditioned(&jet2_of(&f, &y)?) {
        return Ok(None);
    }
    Ok(Some((f, g, x)))
}

fn mink_full_group(n: usize, rng: &mut ChaCha8Rng) -> Result<Sample> {
    let Some((f, g, x)) = random_full_group_case(rng, n)? else { return Ok(Sample::Reject) };
    let y = g.apply_point(&x)?;
    let composed = jet2_of_composed(&f, &g, &x)?;
    let (before, after) = match (trace_invariants(&jet2_of(&f, &y)?), trace_invariants(&composed)) {
        (Ok(b), Ok(a)) => (b, a),
        (Err(e), _) | (_, Err(e)) => return domain_reject(e),
    };
    Ok(Sample::Done { residual: max_relative(&after, &before), inputs: json!({ "f": f, "g": g.to_string(), "x": x }) })
}

/// `S_k` against `(-1)^k D_k` (`k = 1, 2, 3` in four dimensions, `k = 1`
/// otherwise).
pub fn closed_form_residual(jet: &ScalarJet2) -> Result<f64> {
    let s = trace_invariants(jet)?;
    let d =
        if jet.dim() == 4 { vec![d1_closed(jet)?, d2_closed(jet)?, d3_closed(jet)?] } else { vec![dn_closed(jet)?] };
    Ok(d.iter().enumerate().map(|(i, dk)| relative_gap(if i % 2 == 0 { -dk } else { *dk }, s[i])).fold(0.0, f64::max))
}

fn mink_closed_form(n: usize, rng: &mut ChaCha8Rng) -> Result<Sample> {
    let jet = random_timelike_jet(rng, n)?;
    Ok(Sample::Done { residual: closed_form_residual(&jet)?, inputs: json!({ "jet": jet.coordinates() }) })
}

fn mink_first_order(n: usize, rng: &mut ChaCha8Rng) -> Result<Sample> {
    let jet = random_timelike_jet(rng, n)?;
    let flat = ScalarJet2::new(jet.u().clone(), DMatrix::zeros(n, n))?;
    Ok(Sample::Done { residual: canonicalize(&flat)?.w_tilde.amax(), inputs: json!({ "u": flat.u().as_slice() }) })
}

/// Largest of `|AᵀηA - η|` and `|Av - e0|`.
pub fn boost_residual(v: &DVector<f64>) -> Result<f64> {
    let a = boost_to_e0(v)?;
    let metric = Metric::new(v.len())?;
    Ok(metric.lorentz_residual(&a)?.max((&a * v - metric.basis(0)).amax()))
}

fn mink_boost(n: usize, rng: &mut ChaCha8Rng) -> Result<Sample> {
    let v = random_unit_timelike(rng, n);
    Ok(Sample::Done { residual: boost_residual(&v)?, inputs: json!({ "v": v.as_slice() }) })
}

/// Largest relative entry gap between the directly differentiated jet of
/// `f ∘ t_g` at `x` and the pullback of the jet of `f` at `t_g(x)`.
pub fn chain_rule_residual(f: &TestFunction, g: &ConformalElement, x: &[f64]) -> Result<f64> {
    let direct = jet2_of_composed(f, g, x)?;
    let phi = g.map_jet2_at(&DVector::from_column_slice(x))?;
    let pulled = diffeo_action(&jet2_of(f, phi.value().as_slice())?, &phi)?;
    let scale = direct.u().amax().max(direct.u2().amax()).max(1.0);
    Ok((direct.u() - pulled.u()).amax().max((direct.u2() - pulled.u2()).amax()) / scale)
}

fn mink_chain_rule(n: usize, rng: &mut ChaCha8Rng) -> Result<Sample> {
    let f = random_polynomial(rng, n, 4, 1.0)?;
    let g = random_element(rng.random(), 4, 0.3, n)?;
    let x = random_point(rng, n, 0.5);
    if g.min_denominator(&x)? < MIN_DENOMINATOR {
        return Ok(Sample::Reject);
    }
    match chain_rule_residual(&f, &g, &x) {
        Ok(residual) => Ok(Sample::Done { residual, inputs: json!({ "f": f, "g": g.to_string(), "x": x }) }),
        Err(e) => domain_reject(e),
    }
}

fn mink_conformality(n: usize, rng: &mut ChaCha8Rng) -> Result<Sample> {
    let g = random_element(rng.random(), 4, 0.3, n)?;
    let x = random_point(rng, n, 0.5);
    if g.min_denominator(&x)? < MIN_DENOMINATOR {
        return Ok(Sample::Reject);
    }
    let phi = match g.map_jet2_at(&DVector::from_column_slice(&x)) {
        Ok(p) => p,
        Err(e) => return domain_reject(e),
    };
    let (factor, residual) = conformal_factor(phi.a())?;
    let residual = if factor > 0.0 { residual / phi.a().norm_squared() } else { f64::INFINITY };
    Ok(Sample::Done { residual, inputs: json!({ "g": g.to_string(), "x": x }) })
}

fn mink_rotation(n: usize, rng: &mut ChaCha8Rng) -> Result<Sample> {
    let jet = random_timelike_jet(rng, n)?;
    let w = canonicalize(&jet)?.w_tilde;
    // A random rotation of the spatial block, taken from a random Lorentz
    // rotation word.
    let g = random_element_with(rng.random(), 1, 1.0, n, &[GeneratorKind::Lorentz])?;
    let Generator::Lorentz(l) = &g.word()[0] else { unreachable!() };
    let (q, _) = l.view((1, 1), (n - 1, n - 1)).into_owned().qr().unpack();
    let rotated = q.transpose() * &w * &q;
    let rotated = (&rotated + rotated.transpose()) * 0.5;
    Ok(Sample::Done {
        residual: max_relative(&trace_powers(&rotated, n - 1), &trace_powers(&w, n - 1)),
        inputs: json!({ "jet": jet.coordinates() }),
    })
}

/// Jacobian of `(S_1, ..., S_{n-1})` with respect to the jet coordinates,
/// by central differences.
pub fn trace_jacobian(jet: &ScalarJet2, h: f64) -> Result<DMatrix<f64>> {
    let n = jet.dim();
    let coords = jet.coordinates();
    let mut jac = DMatrix::zeros(n - 1, coords.len());
    for (c, &base) in coords.iter().enumerate() {
        let step = h * base.abs().max(1.0);
        let at = |delta: f64| {
            let mut p = coords.clone();
            p[c] += delta;
            trace_invariants(&ScalarJet2::from_coordinates(n, &p)?)
        };
        let (plus, minus) = (at(step)?, at(-step)?);
        for r in 0..n - 1 {
            jac[(r, c)] = (plus[r] - minus[r]) / (2.0 * step);
        }
    }
    Ok(jac)
}

/// Smallest gap between sorted eigenvalues over `max(1, max |λ|)`.
pub fn relative_spectral_gap(sorted: &[f64]) -> f64 {
    let scale = sorted.iter().fold(1.0_f64, |m, l| m.max(l.abs()));
    sorted.windows(2).map(|w| (w[1] - w[0]) / scale).fold(f64::INFINITY, f64::min)
}

fn mink_rank(n: usize, rng: &mut ChaCha8Rng) -> Result<Sample> {
    let jet = random_timelike_jet(rng, n)?;
    if relative_spectral_gap(&canonicalize(&jet)?.eigenvalues) < MIN_SPECTRAL_GAP {
        return Ok(Sample::Reject);
    }
    let rank = numerical_rank(&equilibrate(&trace_jacobian(&jet, 1e-5)?), RANK_THRESHOLD);
    Ok(Sample::Done {
        residual: (n - 1).abs_diff(rank) as f64,
        inputs: json!({ "jet": jet.coordinates(), "rank": rank }),
    })
}

/// Checks of the univariate suite with their default tolerances.
pub const MOBIUS_CHECKS: [(&str, f64); 4] = [
    ("mobius.full_group_invariance", 1e-9),
    ("mobius.stabilizer_invariance", 1e-9),
    ("mobius.schwarzian_vanishing", 1e-12),
    ("mobius.independence_rank", 0.0),
];

/// Checks of the Minkowski suite with their default tolerances.
pub const MINKOWSKI_CHECKS: [(&str, f64); 9] = [
    ("minkowski.stabilizer_invariance", 1e-6),
    ("minkowski.full_group_invariance", 1e-6),
    ("minkowski.closed_form", 1e-8),
    ("minkowski.first_order_quotient", 1e-12),
    ("minkowski.boost", 1e-10),
    ("minkowski.chain_rule", 1e-8),
    ("minkowski.conformality", 1e-8),
    ("minkowski.rotation_invariance", 1e-10),
    ("minkowski.independence_rank", 0.0),
];

/// Runs a single named check.
pub fn run_named_check(name: &str, config: &SuiteConfig) -> Result<(CheckSummary, Vec<Failure>)> {
    let default = MOBIUS_CHECKS
        .iter()
        .chain(MINKOWSKI_CHECKS.iter())
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown check {name:?}")))?;
    let tol = config.tol.unwrap_or(default);
    let (trials, seed, n) = (config.trials, config.seed, config.dim);
    Ok(match name {
        "mobius.full_group_invariance" => run_check(name, tol, trials, seed, mobius_full_group),
        "mobius.stabilizer_invariance" => run_check(name, tol, trials, seed, mobius_stabilizer),
        "mobius.schwarzian_vanishing" => run_check(name, tol, trials, seed, mobius_schwarzian),
        "mobius.independence_rank" => {
            let family = symbolic_invariants(6)?;
            run_check(name, tol, trials, seed, |rng| mobius_rank(&family, rng))
        }
        "minkowski.stabilizer_invariance" => run_check(name, tol, trials, seed, |r| mink_stabilizer(n, r)),
        "minkowski.full_group_invariance" => run_check(name, tol, trials, seed, |r| mink_full_group(n, r)),
        "minkowski.closed_form" => run_check(name, tol, trials, seed, |r| mink_closed_form(n, r)),
        "minkowski.first_order_quotient" => run_check(name, tol, trials, seed, |r| mink_first_order(n, r)),
        "minkowski.boost" => run_check(name, tol, trials, seed, |r| mink_boost(n, r)),
        "minkowski.chain_rule" => run_check(name, tol, trials, seed, |r| mink_chain_rule(n, r)),
        "minkowski.conformality" => run_check(name, tol, trials, seed, |r| mink_conformality(n, r)),
        "minkowski.rotation_invariance" => run_check(name, tol, trials, seed, |r| mink_rotation(n, r)),
        "minkowski.independence_rank" => run_check(name, tol, trials, seed, |r| mink_rank(n, r)),
        _ => unreachable!(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Mobius,
    Minkowski,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Mobius => "mobius",
            Suite::Minkowski => "minkowski",
            Suite::All => "all",
        }
    }
}

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<VerificationReport> {
    if config.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    Metric::new(config.dim)?;
    let names: Vec<&str> = match suite {
        Suite::Mobius => MOBIUS_CHECKS.iter().map(|c| c.0).collect(),
        Suite::Minkowski => MINKOWSKI_CHECKS.iter().map(|c| c.0).collect(),
        Suite::All => MOBIUS_CHECKS.iter().chain(MINKOWSKI_CHECKS.iter()).map(|c| c.0).collect(),
    };
    let mut checks = Vec::new();
    let mut failures = Vec::new();
    for name in names {
        let (summary, mut f) = run_named_check(name, config)?;
        checks.push(summary);
        failures.append(&mut f);
    }
    let max_residual = checks.iter().map(|c| c.max_residual).fold(0.0, f64::max);
    Ok(VerificationReport {
        suite: suite.name().to_string(),
        master_seed: config.seed,
        trials: config.trials,
        dim: config.dim,
        tolerance: config.tol,
        pass: failures.is_empty(),
        checks,
        failures,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(trials: usize, seed: u64) -> SuiteConfig {
        SuiteConfig { trials, seed, tol: None, dim: 4 }
    }

    #[test]
    fn trial_seeds_are_stable_and_distinct() {
        assert_eq!(trial_seed(1, "a", 0), trial_seed(1, "a", 0));
        assert_ne!(trial_seed(1, "a", 0), trial_seed(1, "a", 1));
        assert_ne!(trial_seed(1, "a", 0), trial_seed(1, "b", 0));
        assert_ne!(trial_seed(1, "a", 0), trial_seed(2, "a", 0));
    }

    #[test]
    fn failing_check_is_reported() {
        let (summary, failures) =
            run_check("t", 1e-3, 3, 0, |_| Ok(Sample::Done { residual: 1.0, inputs: json!(null) }));
        assert_eq!(summary.failures, 3);
        assert_eq!(failures.len(), 3);
        let (summary, _) = run_check("t", 1e-3, 2, 0, |_| Ok(Sample::Done { residual: f64::NAN, inputs: json!(null) }));
        assert_eq!(summary.failures, 2);
        let (summary, failures) = run_check("t", 1e-3, 1, 0, |_| Err(Error::VanishingGradient));
        assert_eq!(summary.failures, 1);
        assert!(failures[0].inputs["error"].is_string());
    }

    #[test]
    fn small_suites_pass_and_repeat() {
        let a = run_suite(Suite::Minkowski, &config(20, 3)).unwrap();
        assert!(a.pass, "{a:#?}");
        assert_eq!(a, run_suite(Suite::Minkowski, &config(20, 3)).unwrap());
        let m = run_suite(Suite::Mobius, &config(20, 3)).unwrap();
        assert!(m.pass, "{m:#?}");
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(matches!(run_suite(Suite::Mobius, &config(0, 1)), Err(Error::InvalidArgument(_))));
    }
}
