//! The four isometry families of `(𝒫_n, g)`:
//!
//! ```text
//! Γ_M(X)     = M X Mᵀ
//! Γ_M∘δ(X)   = M X Mᵀ / det(X)^{2/n}
//! Γ_M∘j(X)   = M X⁻¹ Mᵀ
//! Γ_M∘j∘δ(X) = det(X)^{2/n} M X⁻¹ Mᵀ
//! ```
//!
//! with their differentials and the ellipticity criteria.

use serde::Serialize;

use crate::canonical::{
    rja_orthogonal_conjugator, rjs_conjugator, rjs_frame, spectral_signature, RjaSignature, RjsSignature,
};
use crate::error::{Error, Result};
use crate::linalg::{
    check_finite, check_square, determinant, general_eigenvalues_with_budget, inverse, polar_decompose, spd_sqrt,
    RealMatrix, SpdPoint, Tolerances,
};
use crate::manifold::TangentVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    Gamma,
    GammaDelta,
    GammaJ,
    GammaJDelta,
}

impl Family {
    pub fn from_flags(use_j: bool, use_delta: bool) -> Self {
        match (use_j, use_delta) {
            (false, false) => Family::Gamma,
            (false, true) => Family::GammaDelta,
            (true, false) => Family::GammaJ,
            (true, true) => Family::GammaJDelta,
        }
    }

    pub fn uses_j(self) -> bool {
        matches!(self, Family::GammaJ | Family::GammaJDelta)
    }

    pub fn uses_delta(self) -> bool {
        matches!(self, Family::GammaDelta | Family::GammaJDelta)
    }
}

/// A nonsingular `M` of order `n ≥ 2` and the family selector.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometrySpec {
    m: RealMatrix,
    family: Family,
}

impl IsometrySpec {
    pub fn new(m: RealMatrix, use_j: bool, use_delta: bool) -> Result<Self> {
        Self::with_tolerances(m, use_j, use_delta, &Tolerances::default())
    }

    pub fn with_tolerances(m: RealMatrix, use_j: bool, use_delta: bool, tol: &Tolerances) -> Result<Self> {
        check_square(&m)?;
        check_finite(&m)?;
        if m.nrows() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: m.nrows() });
        }
        let det = determinant(&m).abs();
        if det <= tol.tol_sing {
            return Err(Error::Singular(det));
        }
        Ok(Self { m, family: Family::from_flags(use_j, use_delta) })
    }

    pub fn m(&self) -> &RealMatrix {
        &self.m
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn order(&self) -> usize {
        self.m.nrows()
    }

    pub fn use_j(&self) -> bool {
        self.family.uses_j()
    }

    pub fn use_delta(&self) -> bool {
        self.family.uses_delta()
    }
}

fn check_point(spec: &IsometrySpec, p: &SpdPoint) -> Result<()> {
    if p.order() != spec.order() {
        return Err(Error::DimensionMismatch { expected: spec.order(), got: p.order() });
    }
    Ok(())
}

/// `det(P)^{2/n}`.
fn det_factor(p: &SpdPoint) -> f64 {
    (2.0 * p.log_det() / p.order() as f64).exp()
}

pub fn apply(spec: &IsometrySpec, p: &SpdPoint) -> Result<SpdPoint> {
    check_point(spec, p)?;
    let mut x = p.clone();
    if spec.use_delta() {
        x = x.scaled(1.0 / det_factor(&x));
    }
    if spec.use_j() {
        x = x.inverse();
    }
    Ok(x.congruence(&spec.m))
}

/// `dΦ_P(V)` by the chain rule through `δ`, `j` and `Γ_M`.
pub fn differential(spec: &IsometrySpec, p: &SpdPoint, v: &TangentVector) -> Result<TangentVector> {
    check_point(spec, p)?;
    if v.base() != p {
        return Err(Error::BasePointMismatch);
    }
    let n = p.order() as f64;
    let mut x = p.clone();
    let mut dv = v.direction().clone();
    if spec.use_delta() {
        // dδ_P(V) = det(P)^{-2/n} (V − (2/n) tr(P⁻¹V) P)
        let tr = (p.inverse().matrix() * &dv).trace();
        let f = det_factor(&x);
        dv = (dv - x.matrix() * (2.0 * tr / n)) / f;
        x = x.scaled(1.0 / f);
    }
    if spec.use_j() {
        // dj_P(V) = −P⁻¹ V P⁻¹
        let xi = x.inverse();
        dv = -(xi.matrix() * dv * xi.matrix());
        x = xi;
    }
    let m = &spec.m;
    let dv = m * dv * m.transpose();
    Ok(TangentVector::from_trusted(x.congruence(m), dv))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Reason {
    Elliptic,
    NotSemisimple,
    NonConstantModulus,
    ModulusNotOne,
    DetNotUnit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EllipticityReport {
    pub family: Family,
    pub elliptic: bool,
    pub reason: Reason,
    /// RJS signature of `M` (`Γ`, `Γδ`) or of `MM^{-T}` (`j` cases).
    pub rjs_of: Option<RjsSignature>,
    /// RJA signature of the orthogonal polar factor `U` (`j` cases).
    pub rja_of_u: Option<RjaSignature>,
}

impl EllipticityReport {
    fn rejected(family: Family, reason: Reason) -> Self {
        Self { family, elliptic: false, reason, rjs_of: None, rja_of_u: None }
    }
}

/// `M M^{-T}`.
pub fn twisted_square(m: &RealMatrix) -> Result<RealMatrix> {
    Ok(m * inverse(&m.transpose())?)
}

/// Decides whether `X` is similar to an orthogonal matrix, returning the
/// reason it is not.
fn orthogonal_similarity(x: &RealMatrix, tol: &Tolerances) -> Result<std::result::Result<RjsSignature, Reason>> {
    let eigs = general_eigenvalues_with_budget(x, tol.sweeps_per_order * x.nrows())?;
    if eigs.iter().any(|z| (z.norm() - 1.0).abs() > tol.modulus_one) {
        return Ok(Err(Reason::ModulusNotOne));
    }
    constant_modulus(x, tol)
}

fn constant_modulus(x: &RealMatrix, tol: &Tolerances) -> Result<std::result::Result<RjsSignature, Reason>> {
    match spectral_signature(x, tol) {
        Ok(sig) => Ok(Ok(sig)),
        Err(Error::NotSemisimple { .. }) => Ok(Err(Reason::NotSemisimple)),
        Err(Error::NonConstantModulus(_)) => Ok(Err(Reason::NonConstantModulus)),
        Err(e) => Err(e),
    }
}

/// Ellipticity diagnosis. Only numerical failures (eigenvalue iteration
/// budget, conjugator reassembly) surface as errors.
pub fn classify(spec: &IsometrySpec) -> Result<EllipticityReport> {
    classify_with(spec, &Tolerances::default())
}

pub fn classify_with(spec: &IsometrySpec, tol: &Tolerances) -> Result<EllipticityReport> {
    let family = spec.family;
    let m = &spec.m;
    if !family.uses_j() {
        let verdict = match family {
            Family::Gamma => orthogonal_similarity(m, tol)?,
            _ => constant_modulus(m, tol)?,
        };
        return Ok(match verdict {
            Ok(sig) => EllipticityReport {
                family,
                elliptic: true,
                reason: Reason::Elliptic,
                rjs_of: Some(sig),
                rja_of_u: None,
            },
            Err(reason) => EllipticityReport::rejected(family, reason),
        });
    }
    let twisted = match twisted_normal_form(m, tol)? {
        Ok(t) => t,
        Err(reason) => return Ok(EllipticityReport::rejected(family, reason)),
    };
    let data = congruence_data_from(m, twisted.s, &twisted.a, tol)?;
    let mut report = EllipticityReport {
        family,
        elliptic: true,
        reason: Reason::Elliptic,
        rjs_of: Some(twisted.signature),
        rja_of_u: Some(data.signature),
    };
    if family == Family::GammaJDelta && (determinant(m).abs() - 1.0).abs() > tol.det_unit {
        report.elliptic = false;
        report.reason = Reason::DetNotUnit;
    }
    Ok(report)
}

/// The factors of `M = R J̃_U Rᵀ`, `R = S √Q Z`.
#[derive(Debug, Clone)]
pub struct CongruenceData {
    /// RJS conjugator of `MM^{-T}`.
    pub s: RealMatrix,
    /// Polar factors of `S⁻¹ M S^{-T} = Q U`.
    pub q: SpdPoint,
    pub u: RealMatrix,
    /// `U = Z J̃_U Zᵀ`.
    pub z: RealMatrix,
    pub j_tilde: RealMatrix,
    pub signature: RjaSignature,
    pub r: RealMatrix,
}

pub fn orthogonal_congruence_data(m: &RealMatrix) -> Result<CongruenceData> {
    orthogonal_congruence_data_with(m, &Tolerances::default())
}

/// `S` with `S⁻¹ MM^{-T} S = J` orthogonal, the normal matrix
/// `A = S⁻¹ M S^{-T}`, and the RJS signature of `MM^{-T}`.
struct TwistedNormalForm {
    signature: RjsSignature,
    s: RealMatrix,
    a: RealMatrix,
}

/// Builds `S` in two stages. A first conjugator `S₁` of `MM^{-T}` makes
/// `A₁ = S₁⁻¹ M S₁^{-T}` nearly normal; `A₁A₁^{-T}` is then close to
/// orthogonal and well conditioned, so the strict classification and the
/// verified conjugator `S₂` are computed there, and `S = S₁S₂`. When `M` is
/// badly conditioned `MM^{-T}` may miss the strict thresholds, in which case
/// `S₁` comes from coarsened ones.
fn twisted_normal_form(m: &RealMatrix, tol: &Tolerances) -> Result<std::result::Result<TwistedNormalForm, Reason>> {
    let n0 = twisted_square(m)?;
    let strict = orthogonal_similarity(&n0, tol)?;
    let first_tol = match strict {
        Ok(_) => *tol,
        Err(reason) => {
            let coarse = tol.coarsened(COARSENING);
            if orthogonal_similarity(&n0, &coarse)?.is_err() {
                return Ok(Err(reason));
            }
            coarse
        }
    };
    let s1 = match rjs_frame(&n0, &first_tol) {
        Ok(c) => c.f0,
        Err(Error::NotSemisimple { .. }) => return Ok(Err(Reason::NotSemisimple)),
        Err(Error::NonConstantModulus(_)) => return Ok(Err(Reason::NonConstantModulus)),
        Err(e) => return Err(e),
    };
    let s1_inv = inverse(&s1)?;
    let a1 = &s1_inv * m * s1_inv.transpose();
    let n1 = twisted_square(&a1)?;
    let signature = match orthogonal_similarity(&n1, tol)? {
        Ok(sig) => sig,
        Err(reason) => return Ok(Err(reason)),
    };
    let s2 = rjs_conjugator(&n1, tol)?.f0;
    let s2_inv = inverse(&s2)?;
    let a = &s2_inv * a1 * s2_inv.transpose();
    Ok(Ok(TwistedNormalForm { signature, s: s1 * s2, a }))
}

/// Factor applied to the spectral thresholds for the first-stage conjugator.
const COARSENING: f64 = 1e4;

pub fn orthogonal_congruence_data_with(m: &RealMatrix, tol: &Tolerances) -> Result<CongruenceData> {
    check_square(m)?;
    check_finite(m)?;
    match twisted_normal_form(m, tol)? {
        Ok(t) => congruence_data_from(m, t.s, &t.a, tol),
        Err(reason) => Err(Error::NotElliptic(format!("{reason:?}"))),
    }
}

fn congruence_data_from(m: &RealMatrix, s: RealMatrix, a: &RealMatrix, tol: &Tolerances) -> Result<CongruenceData> {
    let polar = polar_decompose(a)?;
    let rja = rja_orthogonal_conjugator(&polar.u, tol)?;
    let r = &s * spd_sqrt(&polar.q).matrix() * &rja.z;
    let res = (&r * &rja.j_tilde * r.transpose() - m).norm() / m.norm();
    if res > 1e-7 {
        return Err(Error::ReassemblyFailure(res));
    }
    Ok(CongruenceData {
        s,
        q: polar.q,
        u: polar.u,
        z: rja.z,
        j_tilde: rja.j_tilde,
        signature: rja.signature,
        r,
    })
}
