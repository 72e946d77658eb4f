//! The second-order invariants written directly in terms of the derivatives
//! of `f`, without passing through the canonical form.
//!
//! With `M = ∂∂f / (∇f)²`, `E = η` and `P = ∂f ∂f / (∇f)²` (both indices up),
//! each operator is a sum of traces of products of `M`, `E` and `P`. The
//! rank-6 tensor multiplying `M ⊗ M ⊗ M` in the third invariant is never
//! formed; each of its six terms is contracted on its own.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::minkowski::ScalarJet2;

/// First and second derivative data of `f` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientFrame {
    /// `(∇f)² = η^{αβ} ∂_α f ∂_β f`
    pub grad_sq: f64,
    /// `∂^α f`
    pub grad_up: DVector<f64>,
    /// `∂^α f ∂^β f / (∇f)²`
    pub projector: DMatrix<f64>,
    /// `∇²f = η^{αβ} ∂_{αβ} f`
    pub laplacian: f64,
}

impl GradientFrame {
    pub fn new(jet: &ScalarJet2) -> Result<Self> {
        let metric = jet.metric();
        let grad_sq = jet.grad_sq();
        if grad_sq == 0.0 || !grad_sq.is_finite() {
            return Err(Error::VanishingGradient);
        }
        let grad_up = metric.raise(jet.u())?;
        let projector = &grad_up * grad_up.transpose() / grad_sq;
        let laplacian = (0..jet.dim()).map(|i| metric.sign(i) * jet.u2()[(i, i)]).sum();
        Ok(GradientFrame { grad_sq, grad_up, projector, laplacian })
    }
}

/// Shared contractions for the closed forms.
struct Contractions {
    n: usize,
    m: DMatrix<f64>,
    eta: DMatrix<f64>,
    p: DMatrix<f64>,
    /// `∇²f / (∇f)² = tr(ηM)`
    trace_em: f64,
    /// `P^{αβ} M_{αβ}`
    pm: f64,
}

impl Contractions {
    fn new(jet: &ScalarJet2) -> Result<Self> {
        let frame = GradientFrame::new(jet)?;
        let m = jet.u2() / frame.grad_sq;
        let pm = frame.projector.component_mul(&m).sum();
        Ok(Contractions {
            n: jet.dim(),
            trace_em: frame.laplacian / frame.grad_sq,
            eta: jet.metric().matrix(),
            p: frame.projector,
            m,
            pm,
        })
    }
}

fn require_dim4(jet: &ScalarJet2) -> Result<()> {
    if jet.dim() != 4 {
        return Err(Error::UnsupportedDimension { expected: 4, found: jet.dim() });
    }
    Ok(())
}

/// `∇²f/(∇f)² + 2 ∂^α f ∂^β f ∂_{αβ} f / (∇f)⁴`, four dimensions.
pub fn d1_closed(jet: &ScalarJet2) -> Result<f64> {
    require_dim4(jet)?;
    dn_closed(jet)
}

pub fn d2_closed(jet: &ScalarJet2) -> Result<f64> {
    require_dim4(jet)?;
    let c = Contractions::new(jet)?;
    let (m, e, p) = (&c.m, &c.eta, &c.p);
    let mem = m * e * m;
    Ok((&mem * e).trace() - 2.0 * (m * p * m * e).trace() + 2.0 * c.pm * c.pm + 2.0 * c.trace_em * c.pm)
}

pub fn d3_closed(jet: &ScalarJet2) -> Result<f64> {
    require_dim4(jet)?;
    let c = Contractions::new(jet)?;
    let (m, e, p) = (&c.m, &c.eta, &c.p);
    let em = e * m;
    let t_eee = (&em * &em * &em).trace();
    let t_eep = (m * e * m * p * m * e).trace();
    let t_ee = (&em * &em).trace();
    let t_epp = (m * p * m * p * m * e).trace();
    let t_ep = (m * p * m * e).trace();
    let tensor_part = t_eee - 3.0 * t_eep + 3.0 * t_ee * c.pm + 3.0 * t_epp - 6.0 * t_ep * c.pm + 2.0 * c.pm.powi(3);
    Ok(tensor_part + 3.0 * c.trace_em * c.pm * c.pm)
}

/// The first invariant in any dimension:
/// `∇²f/(∇f)² + (n - 2) ∂^α f ∂^β f ∂_{αβ} f / (∇f)⁴`.
pub fn dn_closed(jet: &ScalarJet2) -> Result<f64> {
    let c = Contractions::new(jet)?;
    Ok(c.trace_em + (c.n as f64 - 2.0) * c.pm)
}
