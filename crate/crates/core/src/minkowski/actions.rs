use nalgebra::{DMatrix, DVector};

use super::{Map2Jet, ScalarJet2};
use crate::error::{Error, Result};

/// Accepted size of `ΛᵀηΛ - η`, relative to `max(1, max|Λ|^2)`.
pub const LORENTZ_TOLERANCE: f64 = 1e-10;

/// Chain rule for a jet at a fixed point of `φ`:
/// `u'_μ = A^ν_μ u_ν`, `u'_{μρ} = A^ν_μ A^σ_ρ u_{νσ} + A^ν_{μρ} u_ν`.
pub fn diffeo_action(jet: &ScalarJet2, phi: &Map2Jet) -> Result<ScalarJet2> {
    let n = jet.dim();
    if phi.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: phi.dim() });
    }
    let a = phi.a();
    let u = a.transpose() * jet.u();
    let mut u2 = a.transpose() * jet.u2() * a;
    for (nu, h) in phi.a2().iter().enumerate() {
        u2 += h * jet.u()[nu];
    }
    Ok(ScalarJet2::from_parts(u, u2))
}

/// `(u, u2) ↦ (λu, λ²u2)`.
pub fn dilatation_action(jet: &ScalarJet2, lambda: f64) -> Result<ScalarJet2> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::NonPositiveScale(lambda));
    }
    Ok(ScalarJet2::from_parts(jet.u() * lambda, jet.u2() * (lambda * lambda)))
}

/// `(u, u2) ↦ (Λᵀu, Λᵀ u2 Λ)` for `ΛᵀηΛ = η`.
pub fn lorentz_action(jet: &ScalarJet2, lambda: &DMatrix<f64>) -> Result<ScalarJet2> {
    let metric = jet.metric();
    let residual = metric.lorentz_residual(lambda)?;
    if residual > LORENTZ_TOLERANCE * lambda.amax().powi(2).max(1.0) {
        return Err(Error::NotLorentz { residual });
    }
    Ok(lorentz_action_unchecked(jet, lambda))
}

pub(crate) fn lorentz_action_unchecked(jet: &ScalarJet2, lambda: &DMatrix<f64>) -> ScalarJet2 {
    ScalarJet2::from_parts(lambda.transpose() * jet.u(), lambda.transpose() * jet.u2() * lambda)
}

/// Special conformal transformation with parameter `b` (a vector) acting on
/// jets at its fixed point:
/// `u_{μρ} ↦ u_{μρ} - 2u_μ b_ρ - 2u_ρ b_μ + 2(u_β b^β) η_{μρ}`, `u` unchanged.
pub fn sct_action(jet: &ScalarJet2, b: &DVector<f64>) -> Result<ScalarJet2> {
    let metric = jet.metric();
    let b_low = metric.lower(b)?;
    let u = jet.u();
    let ub = u.dot(b);
    let mut u2 = jet.u2() - (u * b_low.transpose() + &b_low * u.transpose()) * 2.0;
    for i in 0..jet.dim() {
        u2[(i, i)] += 2.0 * ub * metric.sign(i);
    }
    Ok(ScalarJet2::from_parts(u.clone(), u2))
}
