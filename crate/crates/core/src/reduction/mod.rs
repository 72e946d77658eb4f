//! Canonical forms for 2-jets under the stabilizer of the origin, and the
//! invariants read off from them.
//!
//! A jet with timelike gradient is reduced in four steps:
//!
//! 1. a dilatation scales the gradient to unit length;
//! 2. a boost turns the unit gradient into `e0`;
//! 3. a special conformal transformation clears the time row and column of
//!    the second-order part and shifts the spatial block by `-w_00 I`;
//! 4. what remains is a symmetric `(n-1)×(n-1)` matrix `w̃`, defined up to
//!    spatial rotations.
//!
//! The traces `S_k = Tr(w̃^k)`, `k = 1..n-1`, are then complete invariants of
//! the second-order jet. In four dimensions they agree with the closed forms
//! in [`closed_form`] up to the sign `(-1)^k`.

pub mod closed_form;
mod eigen;
mod symmetric;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub use closed_form::{d1_closed, d2_closed, d3_closed, dn_closed, GradientFrame};
pub use eigen::{eigen_spatial, SpatialEigen};
pub use symmetric::{elementary_from_roots, elementary_from_traces, power_sums};

use crate::error::{Error, Result};
use crate::minkowski::lorentz_action_unchecked;
use crate::minkowski::{dilatation_action, sct_action, Metric, ScalarJet2};

/// Accepted deviation of `η(v, v)` from `-1` for [`boost_to_e0`].
pub const UNIT_TOLERANCE: f64 = 1e-8;

/// Accepted deviation of the first-order part from `e0` for [`sct_cancel`].
pub const E0_TOLERANCE: f64 = 1e-10;

/// Rescales the jet so its gradient has `η(u, u) = -1`:
/// `(u, u2) ↦ (u/√(-u²), u2/(-u²))`.
pub fn normalize_dilatation(jet: &ScalarJet2) -> Result<ScalarJet2> {
    let norm = jet.grad_sq();
    if norm.is_nan() || norm >= 0.0 {
        return Err(Error::NonTimelikeGradient { norm });
    }
    dilatation_action(jet, 1.0 / (-norm).sqrt())
}

fn time_reversal(n: usize) -> DMatrix<f64> {
    let mut t = DMatrix::identity(n, n);
    t[(0, 0)] = -1.0;
    t
}

/// The boost `[[v0, -v⃗ᵀ], [v⃗, I - v⃗ v⃗ᵀ (1 + v0)/|v⃗|²]]` taking a unit timelike
/// `v` with `v0 > 0` to `e0`.
fn future_boost(v: &DVector<f64>) -> DMatrix<f64> {
    let n = v.len();
    let spatial = v.rows(1, n - 1);
    let s2 = spatial.norm_squared();
    if s2 == 0.0 {
        return DMatrix::identity(n, n);
    }
    let v0 = v[0];
    let k = (1.0 + v0) / s2;
    let mut a = DMatrix::identity(n, n);
    a[(0, 0)] = v0;
    for i in 1..n {
        a[(0, i)] = -v[i];
        a[(i, 0)] = v[i];
        for j in 1..n {
            a[(i, j)] -= v[i] * v[j] * k;
        }
    }
    a
}

/// A matrix `A` with `A v = e0` and `AᵀηA = η` for a unit timelike `v`.
///
/// Past-pointing `v` (`v0 < 0`) is first sent to the future sheet by time
/// reversal, itself a matrix preserving `η`.
pub fn boost_to_e0(v: &DVector<f64>) -> Result<DMatrix<f64>> {
    let metric = Metric::new(v.len())?;
    let norm = metric.inner(v, v)?;
    if norm.is_nan() || (norm + 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NotUnitTimelike { norm });
    }
    if v[0] > 0.0 {
        Ok(future_boost(v))
    } else {
        let t = time_reversal(v.len());
        Ok(future_boost(&(&t * v)) * t)
    }
}

/// Clears the mixed time components of a jet whose gradient is `e0`, using
/// the special conformal transformation with `b_β = w_{0β}/2`.
pub fn sct_cancel(jet: &ScalarJet2) -> Result<ScalarJet2> {
    let metric = jet.metric();
    let residual = (jet.u() - metric.basis(0)).amax();
    if residual.is_nan() || residual > E0_TOLERANCE {
        return Err(Error::NotCanonicalForm { residual });
    }
    let b_low = jet.u2().row(0).transpose() * 0.5;
    sct_action(jet, &metric.raise(&b_low)?)
}

/// Reduced form of a 2-jet: the spatial block `w̃` and its spectrum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CanonicalJet {
    pub n: usize,
    #[serde(serialize_with = "serialize_matrix")]
    pub w_tilde: DMatrix<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors of `w̃` as columns, matching `eigenvalues`.
    #[serde(serialize_with = "serialize_matrix")]
    pub frame: DMatrix<f64>,
}

pub(crate) fn serialize_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for r in 0..m.nrows() {
        let row: Vec<f64> = m.row(r).iter().copied().collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

/// Intermediate jets of the reduction, for inspection.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionSteps {
    pub normalized: ScalarJet2,
    pub boost: DMatrix<f64>,
    pub boosted: ScalarJet2,
    pub cancelled: ScalarJet2,
}

pub fn reduction_steps(jet: &ScalarJet2) -> Result<ReductionSteps> {
    let normalized = normalize_dilatation(jet)?;
    let boost = boost_to_e0(normalized.u())?;
    // lorentz_action maps u to Λᵀu, so Λ = Aᵀ gives A v = e0.
    let boosted = lorentz_action_unchecked(&normalized, &boost.transpose());
    let cancelled = sct_cancel(&boosted)?;
    Ok(ReductionSteps { normalized, boost, boosted, cancelled })
}

pub fn canonicalize(jet: &ScalarJet2) -> Result<CanonicalJet> {
    let steps = reduction_steps(jet)?;
    let n = jet.dim();
    let w_tilde = steps.cancelled.u2().view((1, 1), (n - 1, n - 1)).into_owned();
    let eigen = eigen_spatial(&w_tilde)?;
    Ok(CanonicalJet { n, w_tilde, eigenvalues: eigen.values, frame: eigen.frame })
}

/// `Tr(w̃^k)` for `k = 1..n-1`.
pub fn traces(c: &CanonicalJet) -> Vec<f64> {
    trace_powers(&c.w_tilde, c.n - 1)
}

pub fn trace_powers(m: &DMatrix<f64>, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut power = m.clone();
    for k in 0..count {
        if k > 0 {
            power = &power * m;
        }
        out.push(power.trace());
    }
    out
}

/// The trace invariants straight from a jet.
pub fn trace_invariants(jet: &ScalarJet2) -> Result<Vec<f64>> {
    Ok(traces(&canonicalize(jet)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residuals {
    /// Largest `|σ_k(traces) - σ_k(eigenvalues)| / max(1, |σ_k|)`.
    pub newton: f64,
    /// `|S_k - (-1)^k D_k| / max(1, |S_k|)` for each available closed form.
    pub closed_form: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub n: usize,
    #[serde(rename = "S")]
    pub s: Vec<f64>,
    pub sigma: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    /// `[D1, D2, D3]` in four dimensions, `[D]` otherwise.
    #[serde(rename = "D_closed")]
    pub d_closed: Vec<f64>,
    pub residuals: Residuals,
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

pub fn invariant_report(jet: &ScalarJet2) -> Result<InvariantReport> {
    let canonical = canonicalize(jet)?;
    let s = traces(&canonical);
    let sigma = elementary_from_traces(&s);
    let direct = elementary_from_roots(&canonical.eigenvalues);
    let newton = sigma.iter().zip(&direct).map(|(a, b)| relative_gap(*a, *b)).fold(0.0, f64::max);

    let d_closed =
        if jet.dim() == 4 { vec![d1_closed(jet)?, d2_closed(jet)?, d3_closed(jet)?] } else { vec![dn_closed(jet)?] };
    let closed_form = d_closed
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
            relative_gap(sign * d, s[i])
        })
        .collect();

    Ok(InvariantReport {
        n: jet.dim(),
        s,
        sigma,
        eigenvalues: canonical.eigenvalues,
        d_closed,
        residuals: Residuals { newton, closed_form },
    })
}
