//! Fixed-point loci of elliptic isometries.
//!
//! Every locus is the congruence image of a block-diagonal model:
//!
//! ```text
//! Γ      Fix = F0 (𝒫_p ⊕ ρ(𝓗_{m1}) ⊕ … ⊕ ρ(𝓗_{mr}) ⊕ 𝒫_q) F0ᵀ
//! Γδ     the same, restricted to det = |det M| (F0 normalized)
//! Γj     Fix = R (𝒫_n ∩ 𝒦_{J̃}) Rᵀ,  𝒦_{J̃} = {G : G J̃ Gᵀ = J̃}
//! Γjδ    Fix = ℝ⁺ · Fix(Γj)
//! ```
//!
//! Points are sampled as exponentials of symmetric elements of the Lie
//! algebra of each block group.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::canonical::{rjs_conjugator, rjs_conjugator_normalized, RjaSignature, RjsSignature};
use crate::error::{Error, Result};
use crate::isometry::{apply, classify_with, differential, orthogonal_congruence_data_with, Family, IsometrySpec};
use crate::linalg::{
    determinant, direct_sum, inverse, matrix_exp_sym, rho_embed, rho_project, ComplexMatrix, RealMatrix, SpdPoint,
    Tolerances,
};
use crate::manifold::{distance, TangentVector};

/// Identifier of an irreducible (or flat) De Rham factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FactorKind {
    Euclidean(usize),
    #[serde(rename = "SL_over_SO")]
    SlOverSo(usize),
    #[serde(rename = "SLC_over_SU")]
    SlcOverSu(usize),
    #[serde(rename = "SO0_over_SOxSO")]
    So0OverSoxSo(usize, usize),
    #[serde(rename = "Sp_over_U")]
    SpOverU(usize),
    #[serde(rename = "SU_over_SU")]
    SuOverSu(usize, usize),
}

impl FactorKind {
    pub fn dimension(self) -> usize {
        match self {
            FactorKind::Euclidean(m) => m,
            FactorKind::SlOverSo(m) => m * (m + 1) / 2 - 1,
            FactorKind::SlcOverSu(m) => m * m - 1,
            FactorKind::So0OverSoxSo(p, q) => p * q,
            FactorKind::SpOverU(k) => k * (k + 1),
            FactorKind::SuOverSu(mu, nu) => 2 * mu * nu,
        }
    }
}

impl fmt::Display for FactorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorKind::Euclidean(m) => write!(f, "Euclidean({m})"),
            FactorKind::SlOverSo(m) => write!(f, "SL_over_SO({m})"),
            FactorKind::SlcOverSu(m) => write!(f, "SLC_over_SU({m})"),
            FactorKind::So0OverSoxSo(p, q) => write!(f, "SO0_over_SOxSO({p},{q})"),
            FactorKind::SpOverU(k) => write!(f, "Sp_over_U({k})"),
            FactorKind::SuOverSu(mu, nu) => write!(f, "SU_over_SU({mu},{nu})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DeRhamFactor {
    pub kind: FactorKind,
    pub dimension: usize,
}

impl From<FactorKind> for DeRhamFactor {
    fn from(kind: FactorKind) -> Self {
        Self { kind, dimension: kind.dimension() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum LocusSignature {
    Rjs(RjsSignature),
    Rja(RjaSignature),
}

#[derive(Debug, Clone)]
pub struct FixedLocusDescriptor {
    pub family: Family,
    /// `F0` for `Γ`, `Γδ`; `R` for the `j` cases.
    pub conjugator: RealMatrix,
    pub signature: LocusSignature,
    /// Required `det P` of every fixed point, when constrained.
    pub det_constraint: Option<f64>,
    pub dimension: usize,
    pub factors: Vec<DeRhamFactor>,
}

impl FixedLocusDescriptor {
    pub fn order(&self) -> usize {
        self.conjugator.nrows()
    }
}

fn gamma_factors(sig: &RjsSignature, delta: bool) -> Vec<DeRhamFactor> {
    let flat = sig.r_prime();
    let mut out = Vec::new();
    if !delta {
        out.push(FactorKind::Euclidean(flat));
    } else if flat >= 2 {
        out.push(FactorKind::Euclidean(flat - 1));
    }
    if sig.p >= 2 {
        out.push(FactorKind::SlOverSo(sig.p));
    }
    for b in &sig.rotations {
        if b.multiplicity >= 2 {
            out.push(FactorKind::SlcOverSu(b.multiplicity));
        }
    }
    if sig.q >= 2 {
        out.push(FactorKind::SlOverSo(sig.q));
    }
    out.into_iter().map(DeRhamFactor::from).collect()
}

fn j_factors(sig: &RjaSignature, delta: bool) -> Vec<DeRhamFactor> {
    let mut out = Vec::new();
    let (p, q) = (sig.p, sig.q);
    match (delta, p == 1 && q == 1) {
        (false, true) => out.push(FactorKind::Euclidean(1)),
        (false, false) => {}
        (true, true) => out.push(FactorKind::Euclidean(2)),
        (true, false) => out.push(FactorKind::Euclidean(1)),
    }
    if p >= 1 && q >= 1 && p + q >= 3 {
        out.push(FactorKind::So0OverSoxSo(p, q));
    }
    if sig.k >= 1 {
        out.push(FactorKind::SpOverU(sig.k));
    }
    for b in &sig.mixed {
        if b.mu >= 1 && b.nu >= 1 {
            out.push(FactorKind::SuOverSu(b.mu, b.nu));
        }
    }
    out.into_iter().map(DeRhamFactor::from).collect()
}

/// `Σ p(p+1)/2 + q(q+1)/2 + Σ m_j²`.
pub fn gamma_dimension(sig: &RjsSignature) -> usize {
    sig.p * (sig.p + 1) / 2
        + sig.q * (sig.q + 1) / 2
        + sig.rotations.iter().map(|b| b.multiplicity * b.multiplicity).sum::<usize>()
}

/// `pq + 2 Σ μ_j ν_j + k(k+1)`.
pub fn j_dimension(sig: &RjaSignature) -> usize {
    sig.p * sig.q + 2 * sig.mixed.iter().map(|b| b.mu * b.nu).sum::<usize>() + sig.k * (sig.k + 1)
}

pub fn fix_locus(spec: &IsometrySpec) -> Result<FixedLocusDescriptor> {
    fix_locus_with(spec, &Tolerances::default())
}

pub fn fix_locus_with(spec: &IsometrySpec, tol: &Tolerances) -> Result<FixedLocusDescriptor> {
    let report = classify_with(spec, tol)?;
    if !report.elliptic {
        return Err(Error::NotElliptic(format!("{:?}", report.reason)));
    }
    let m = spec.m();
    let abs_det = determinant(m).abs();
    let family = spec.family();
    let desc = match family {
        Family::Gamma | Family::GammaDelta => {
            let delta = family == Family::GammaDelta;
            let c = if delta { rjs_conjugator_normalized(m, tol)? } else { rjs_conjugator(m, tol)? };
            let dim = gamma_dimension(&c.signature) - usize::from(delta);
            FixedLocusDescriptor {
                family,
                conjugator: c.f0,
                factors: gamma_factors(&c.signature, delta),
                signature: LocusSignature::Rjs(c.signature),
                det_constraint: delta.then_some(abs_det),
                dimension: dim,
            }
        }
        Family::GammaJ | Family::GammaJDelta => {
            let delta = family == Family::GammaJDelta;
            let d = orthogonal_congruence_data_with(m, tol)?;
            FixedLocusDescriptor {
                family,
                conjugator: d.r,
                factors: j_factors(&d.signature, delta),
                dimension: j_dimension(&d.signature) + usize::from(delta),
                signature: LocusSignature::Rja(d.signature),
                det_constraint: (!delta).then_some(abs_det),
            }
        }
    };
    debug_assert_eq!(desc.dimension, desc.factors.iter().map(|f| f.dimension).sum::<usize>());
    Ok(desc)
}

fn gaussian(rng: &mut ChaCha8Rng, scale: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    scale * z
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> RealMatrix {
    let mut y = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = gaussian(rng, scale);
            y[(i, j)] = v;
            y[(j, i)] = v;
        }
    }
    y
}

fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex64::new(gaussian(rng, scale), gaussian(rng, scale)))
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Complex64::new(gaussian(rng, scale), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(gaussian(rng, scale), gaussian(rng, scale));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

fn sym_exp(y: &RealMatrix) -> RealMatrix {
    matrix_exp_sym(y).expect("symmetric by construction").into_matrix()
}

/// `[[0, B], [Bᵀ, 0]]`.
fn off_diagonal(b: &RealMatrix) -> RealMatrix {
    let (p, q) = b.shape();
    let mut y = RealMatrix::zeros(p + q, p + q);
    y.view_mut((0, p), (p, q)).copy_from(b);
    y.view_mut((p, 0), (q, p)).copy_from(&b.transpose());
    y
}

/// `[[0, B], [B*, 0]]`.
fn off_diagonal_complex(b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = b.shape();
    let mut y = ComplexMatrix::zeros(p + q, p + q);
    y.view_mut((0, p), (p, q)).copy_from(b);
    y.view_mut((p, 0), (q, p)).copy_from(&b.adjoint());
    y
}

/// The permutation `W` with `Λ_k = W [[0, I_k], [−I_k, 0]] Wᵀ`: the `a`-th
/// standard vector goes to `f_{2a}` and the `(k+a)`-th to `f_{2a−1}`.
pub fn symplectic_frame(k: usize) -> RealMatrix {
    let mut w = RealMatrix::zeros(2 * k, 2 * k);
    for a in 0..k {
        w[(2 * a + 1, a)] = 1.0;
        w[(2 * a, k + a)] = 1.0;
    }
    w
}

/// Block model `P0` for `Γ`/`Γδ`: `exp(Y_p) ⊕ ρ(exp H_1) ⊕ … ⊕ exp(Y_q)`.
fn gamma_model(sig: &RjsSignature, rng: &mut ChaCha8Rng, scale: f64) -> RealMatrix {
    let mut blocks = Vec::new();
    if sig.p > 0 {
        blocks.push(sym_exp(&random_symmetric(rng, sig.p, scale)));
    }
    for b in &sig.rotations {
        let h = rho_embed(&random_hermitian(rng, b.multiplicity, scale));
        blocks.push(sym_exp(&h));
    }
    if sig.q > 0 {
        blocks.push(sym_exp(&random_symmetric(rng, sig.q, scale)));
    }
    direct_sum(&blocks)
}

/// Block model `P0 ∈ 𝒫_n ∩ 𝒦_{J̃}` for the `j` cases.
fn j_model(sig: &RjaSignature, rng: &mut ChaCha8Rng, scale: f64) -> RealMatrix {
    let mut y_blocks = Vec::new();
    let mut b = RealMatrix::zeros(sig.p, sig.q);
    b.iter_mut().for_each(|x| *x = gaussian(rng, scale));
    y_blocks.push(off_diagonal(&b));
    for m in &sig.mixed {
        let c = random_complex(rng, m.mu, m.nu, scale);
        y_blocks.push(rho_embed(&off_diagonal_complex(&c)));
    }
    let k = sig.k;
    if k > 0 {
        let a = random_symmetric(rng, k, scale);
        let c = random_symmetric(rng, k, scale);
        let mut y = RealMatrix::zeros(2 * k, 2 * k);
        y.view_mut((0, 0), (k, k)).copy_from(&a);
        y.view_mut((0, k), (k, k)).copy_from(&c);
        y.view_mut((k, 0), (k, k)).copy_from(&c);
        y.view_mut((k, k), (k, k)).copy_from(&(-a));
        let w = symplectic_frame(k);
        y_blocks.push(&w * y * w.transpose());
    }
    sym_exp(&direct_sum(&y_blocks))
}

/// A fixed point drawn from the locus. Identical `(desc, seed, scale)`
/// reproduce identical output.
pub fn sample_point(desc: &FixedLocusDescriptor, seed: u64, scale: f64) -> SpdPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = desc.order();
    let mut p0 = match &desc.signature {
        LocusSignature::Rjs(sig) => gamma_model(sig, &mut rng, scale),
        LocusSignature::Rja(sig) => j_model(sig, &mut rng, scale),
    };
    if desc.family == Family::GammaDelta {
        let ld = SpdPoint::from_trusted(p0.clone()).log_det();
        p0 /= (ld / n as f64).exp();
    }
    if desc.family == Family::GammaJDelta {
        p0 *= gaussian(&mut rng, scale).exp();
    }
    SpdPoint::from_trusted(p0).congruence(&desc.conjugator)
}

/// `‖Φ(P) − P‖ / ‖P‖`.
pub fn membership_residual(spec: &IsometrySpec, p: &SpdPoint) -> Result<f64> {
    let image = apply(spec, p)?;
    Ok((image.matrix() - p.matrix()).norm() / p.matrix().norm())
}

pub fn membership(spec: &IsometrySpec, p: &SpdPoint, tol: f64) -> bool {
    membership_residual(spec, p).is_ok_and(|r| r <= tol)
}

/// Orthonormal basis of `Sym_n` under the Frobenius inner product.
fn sym_basis(n: usize) -> Vec<RealMatrix> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in i..n {
            let mut e = RealMatrix::zeros(n, n);
            if i == j {
                e[(i, i)] = 1.0;
            } else {
                e[(i, j)] = h;
                e[(j, i)] = h;
            }
            out.push(e);
        }
    }
    out
}

/// `dim ker(dΦ_P − id)` on `Sym_n`, in coordinates whitened at `P` so that
/// `dΦ_P` acts orthogonally.
pub fn tangent_dim_oracle(spec: &IsometrySpec, p: &SpdPoint) -> Result<usize> {
    tangent_dim_oracle_with(spec, p, &Tolerances::default())
}

pub fn tangent_dim_oracle_with(spec: &IsometrySpec, p: &SpdPoint, tol: &Tolerances) -> Result<usize> {
    let res = membership_residual(spec, p)?;
    if res > 1e-8 {
        return Err(Error::NotAFixedPoint(res));
    }
    let n = p.order();
    let e = p.eigen();
    let s = e.apply(f64::sqrt);
    let si = e.apply(|l| 1.0 / l.sqrt());
    let basis = sym_basis(n);
    let big_n = basis.len();
    let mut a = RealMatrix::zeros(big_n, big_n);
    for (col, x) in basis.iter().enumerate() {
        let v = TangentVector::from_trusted(p.clone(), &s * x * &s);
        let w = differential(spec, p, &v)?;
        let y = &si * w.direction() * &si - x;
        for (row, b) in basis.iter().enumerate() {
            a[(row, col)] = y.dot(b);
        }
    }
    // dΦ_P is orthogonal here, so the singular values of dΦ_P − id lie in
    // [0, 2]; the floor of 1 keeps dΦ_P = id from looking like noise
    let sv = crate::linalg::svd::singular_values(&a)?;
    let cut = tol.kernel * sv.first().copied().unwrap_or(0.0).max(1.0);
    Ok(sv.iter().filter(|&&x| x < cut).count())
}

/// Coordinates of a `Γδ` fixed point under the splitting
/// `P ↦ ((B_i / det(B_i)^{1/d_i})_i, (ln det B_i)_{i < r'})`.
#[derive(Debug, Clone)]
pub struct DeltaSplitting {
    /// Unit-determinant diagonal blocks of `F0⁻¹ P F0^{-T}`.
    pub blocks: Vec<SpdPoint>,
    /// `ln det` of every block but the last.
    pub coords: Vec<f64>,
}

impl DeltaSplitting {
    /// Distance in the product metric: the flat part carries
    /// `τ = Σ_{i<r'} dt_i²/d_i + (Σ dt_i)²/d_{r'}`.
    pub fn distance(&self, other: &DeltaSplitting) -> Result<f64> {
        if self.blocks.len() != other.blocks.len() {
            return Err(Error::DimensionMismatch { expected: self.blocks.len(), got: other.blocks.len() });
        }
        let mut sq = 0.0;
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            sq += distance(a, b)?.powi(2);
        }
        let dims: Vec<f64> = self.blocks.iter().map(|b| b.order() as f64).collect();
        let dt: Vec<f64> = self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        for (d, di) in dt.iter().zip(&dims) {
            sq += d * d / di;
        }
        let total: f64 = dt.iter().sum();
        sq += total * total / dims.last().copied().unwrap_or(1.0);
        Ok(sq.sqrt())
    }
}

fn block_sizes(sig: &RjsSignature) -> Vec<(usize, bool)> {
    let mut out = Vec::new();
    if sig.p > 0 {
        out.push((sig.p, false));
    }
    out.extend(sig.rotations.iter().map(|b| (2 * b.multiplicity, true)));
    if sig.q > 0 {
        out.push((sig.q, false));
    }
    out
}

fn delta_parts(desc: &FixedLocusDescriptor) -> Result<&RjsSignature> {
    match (&desc.signature, desc.family) {
        (LocusSignature::Rjs(sig), Family::GammaDelta) => Ok(sig),
        _ => Err(Error::BlockExtractionFailure("descriptor is not of family GammaDelta".into())),
    }
}

pub fn delta_splitting_coords(desc: &FixedLocusDescriptor, p: &SpdPoint) -> Result<DeltaSplitting> {
    let sig = delta_parts(desc)?;
    let n = desc.order();
    if p.order() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.order() });
    }
    let fi = inverse(&desc.conjugator)?;
    let p0 = &fi * p.matrix() * fi.transpose();
    let slack = 1e-8 * p0.norm();
    let sizes = block_sizes(sig);

    let mut at = 0;
    let mut blocks = Vec::new();
    let mut log_dets = Vec::new();
    for &(d, complex) in &sizes {
        for i in at..at + d {
            for j in (0..at).chain(at + d..n) {
                if p0[(i, j)].abs() > slack {
                    return Err(Error::BlockExtractionFailure(format!("entry ({i}, {j}) couples two blocks")));
                }
            }
        }
        let block = p0.view((at, at), (d, d)).into_owned();
        if complex && rho_project(&block, 1e-8).is_err() {
            return Err(Error::BlockExtractionFailure(format!("block at {at} is not a ρ-image")));
        }
        let block = SpdPoint::new(block).map_err(|e| Error::BlockExtractionFailure(e.to_string()))?;
        let ld = block.log_det();
        blocks.push(block.scaled((-ld / d as f64).exp()));
        log_dets.push(ld);
        at += d;
    }
    let total: f64 = log_dets.iter().sum();
    if total.abs() > 1e-8 {
        return Err(Error::NotAFixedPoint(total.abs()));
    }
    log_dets.pop();
    Ok(DeltaSplitting { blocks, coords: log_dets })
}

pub fn delta_splitting_inverse(desc: &FixedLocusDescriptor, split: &DeltaSplitting) -> Result<SpdPoint> {
    let sig = delta_parts(desc)?;
    let sizes = block_sizes(sig);
    if split.blocks.len() != sizes.len() || split.coords.len() + 1 != sizes.len() {
        return Err(Error::DimensionMismatch { expected: sizes.len(), got: split.blocks.len() });
    }
    let last = -split.coords.iter().sum::<f64>();
    let mut parts = Vec::with_capacity(sizes.len());
    for (i, (block, &(d, _))) in split.blocks.iter().zip(&sizes).enumerate() {
        if block.order() != d {
            return Err(Error::DimensionMismatch { expected: d, got: block.order() });
        }
        let t = split.coords.get(i).copied().unwrap_or(last);
        parts.push(block.matrix() * (t / d as f64).exp());
    }
    Ok(SpdPoint::from_trusted(direct_sum(&parts)).congruence(&desc.conjugator))
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRecord {
    pub seed: u64,
    pub residual: f64,
    pub oracle_dimension: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct LocusReport {
    pub classification: crate::isometry::EllipticityReport,
    pub descriptor: Option<FixedLocusDescriptor>,
    pub samples: Vec<SampleRecord>,
    /// Every sample residual is within the tolerance and every oracle
    /// dimension equals the descriptor dimension.
    pub verified: bool,
    /// Numerical failure that interrupted the report, if any.
    pub failure: Option<String>,
}

impl LocusReport {
    pub fn oracle_agrees(&self) -> bool {
        let Some(desc) = &self.descriptor else { return false };
        !self.samples.is_empty() && self.samples.iter().all(|s| s.oracle_dimension == Some(desc.dimension))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SamplingOptions {
    pub samples: usize,
    pub seed: u64,
    pub scale: f64,
    pub tol: f64,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self { samples: 10, seed: 0, scale: 0.5, tol: 1e-8 }
    }
}

/// Classification, descriptor, and `samples` fixed points with their
/// membership residuals and oracle dimensions. Sample `i` uses seed
/// `seed + i`.
pub fn locus_report(spec: &IsometrySpec, opts: &SamplingOptions, tol: &Tolerances) -> LocusReport {
    let classification = match classify_with(spec, tol) {
        Ok(c) => c,
        Err(e) => {
            return LocusReport {
                classification: crate::isometry::EllipticityReport {
                    family: spec.family(),
                    elliptic: false,
                    reason: crate::isometry::Reason::NotSemisimple,
                    rjs_of: None,
                    rja_of_u: None,
                },
                descriptor: None,
                samples: Vec::new(),
                verified: false,
                failure: Some(e.to_string()),
            }
        }
    };
    let mut report =
        LocusReport { classification, descriptor: None, samples: Vec::new(), verified: false, failure: None };
    if !report.classification.elliptic {
        return report;
    }
    let desc = match fix_locus_with(spec, tol) {
        Ok(d) => d,
        Err(e) => {
            report.failure = Some(e.to_string());
            return report;
        }
    };
    let mut ok = true;
    for i in 0..opts.samples {
        let seed = opts.seed.wrapping_add(i as u64);
        let p = sample_point(&desc, seed, opts.scale);
        let residual = membership_residual(spec, &p).unwrap_or(f64::INFINITY);
        let oracle_dimension = tangent_dim_oracle_with(spec, &p, tol).ok();
        ok &= residual <= opts.tol && oracle_dimension == Some(desc.dimension);
        report.samples.push(SampleRecord { seed, residual, oracle_dimension });
    }
    report.verified = ok;
    report.descriptor = Some(desc);
    report
}
