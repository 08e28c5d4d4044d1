//! The trace metric `g_A(V, W) = tr(A⁻¹VA⁻¹W)` on `𝒫_n`, its geodesics,
//! distance, exponential and logarithm, and the determinant splitting
//! `𝒫_n ≅ SL𝒫_n × ℝ`.
//!
//! All maps go through the whitening `X ↦ A^{-1/2} X A^{-1/2}`, so every
//! computation reduces to symmetric eigendecompositions.

use crate::error::{Error, Result};
use crate::linalg::{matrix_exp_sym, relative_asymmetry, symmetrize, RealMatrix, SpdPoint, Tolerances};

/// A symmetric matrix attached to a base point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: SpdPoint,
    direction: RealMatrix,
}

impl TangentVector {
    pub fn new(base: SpdPoint, direction: RealMatrix) -> Result<Self> {
        if direction.shape() != (base.order(), base.order()) {
            return Err(Error::DimensionMismatch { expected: base.order(), got: direction.nrows() });
        }
        let asym = relative_asymmetry(&direction);
        if asym > Tolerances::default().tol_sym {
            return Err(Error::NonSymmetric(asym));
        }
        Ok(Self { base, direction: symmetrize(&direction) })
    }

    /// Symmetrizes `direction` without validating it.
    pub(crate) fn from_trusted(base: SpdPoint, direction: RealMatrix) -> Self {
        Self { base, direction: symmetrize(&direction) }
    }

    pub fn zero(base: SpdPoint) -> Self {
        let n = base.order();
        Self { base, direction: RealMatrix::zeros(n, n) }
    }

    pub fn base(&self) -> &SpdPoint {
        &self.base
    }

    pub fn direction(&self) -> &RealMatrix {
        &self.direction
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { base: self.base.clone(), direction: &self.direction * c }
    }
}

fn same_point(a: &SpdPoint, b: &SpdPoint) -> bool {
    a.order() == b.order() && (a.matrix() - b.matrix()).norm() <= Tolerances::default().tol_sym * a.matrix().norm()
}

fn check_orders(a: &SpdPoint, b: &SpdPoint) -> Result<()> {
    if a.order() != b.order() {
        return Err(Error::DimensionMismatch { expected: a.order(), got: b.order() });
    }
    Ok(())
}

/// `A^{1/2}` and `A^{-1/2}`.
fn whitening(a: &SpdPoint) -> (RealMatrix, RealMatrix) {
    let e = a.eigen();
    (e.apply(f64::sqrt), e.apply(|l| 1.0 / l.sqrt()))
}

pub fn metric(a: &SpdPoint, v: &TangentVector, w: &TangentVector) -> Result<f64> {
    if !same_point(a, &v.base) || !same_point(a, &w.base) {
        return Err(Error::BasePointMismatch);
    }
    let ai = a.inverse();
    let ai = ai.matrix();
    Ok((ai * &v.direction * ai * &w.direction).trace())
}

/// `A^{1/2} exp(A^{-1/2} V A^{-1/2}) A^{1/2}`.
pub fn exp_map(a: &SpdPoint, v: &TangentVector) -> Result<SpdPoint> {
    if !same_point(a, &v.base) {
        return Err(Error::BasePointMismatch);
    }
    let (s, si) = whitening(a);
    let inner = matrix_exp_sym(&symmetrize(&(&si * &v.direction * &si)))?;
    Ok(inner.congruence(&s))
}

/// `A^{1/2} log(A^{-1/2} B A^{-1/2}) A^{1/2}`.
pub fn log_map(a: &SpdPoint, b: &SpdPoint) -> Result<TangentVector> {
    check_orders(a, b)?;
    let (s, si) = whitening(a);
    let inner = b.congruence(&si);
    let l = inner.eigen().apply(f64::ln);
    Ok(TangentVector { base: a.clone(), direction: symmetrize(&(&s * l * &s)) })
}

/// `A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}`.
pub fn geodesic(a: &SpdPoint, b: &SpdPoint, t: f64) -> Result<SpdPoint> {
    check_orders(a, b)?;
    let (s, si) = whitening(a);
    Ok(b.congruence(&si).powf(t).congruence(&s))
}

/// `‖log(A^{-1/2} B A^{-1/2})‖_F`.
pub fn distance(a: &SpdPoint, b: &SpdPoint) -> Result<f64> {
    check_orders(a, b)?;
    let (_, si) = whitening(a);
    let ev = b.congruence(&si).eigen().values;
    Ok(ev.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt())
}

/// `P ↦ (P / det(P)^{1/n}, ln det(P) / √n)`.
pub fn sl_split(p: &SpdPoint) -> (SpdPoint, f64) {
    let n = p.order() as f64;
    let ld = p.log_det();
    (p.scaled((-ld / n).exp()), ld / n.sqrt())
}

/// Inverse of [`sl_split`].
pub fn sl_join(unit: &SpdPoint, coordinate: f64) -> SpdPoint {
    let n = unit.order() as f64;
    unit.scaled((coordinate / n.sqrt()).exp())
}
