//! Real Jordan standard (RJS) and auxiliary (RJA) forms of matrices similar to
//! a multiple of an orthogonal matrix, their conjugators, and the commutant of
//! an RJS block matrix.
//!
//! For such a matrix `M`,
//!
//! ```text
//! J_M = |λ| (I_p ⊕ E_{θ1}^{⊕m1} ⊕ … ⊕ E_{θr}^{⊕mr} ⊕ (−I_q)),   0 < θ1 < … < θr < π
//! J̃_M = |λ| (I_p ⊕ (−I_q) ⊕ E_{φ1}^{⊕μ1} ⊕ (−E_{φ1})^{⊕ν1} ⊕ … ⊕ E_{π/2}^{⊕k}),  0 < φ < π/2
//! ```
//!
//! and `J̃_M² = J_{M²}`. Conjugators are built from complex eigenvectors: each
//! eigenvector `w` of `|λ|e^{iθ}` contributes the column pair
//! `(√2 Re w, −√2 Im w)`, which `M` maps onto itself through `|λ| E_θ`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    check_finite, check_square, complex_kernel, determinant, direct_sum, general_eigenvalues_with_budget, inverse, lambda,
    orthogonality_residual, polar_decompose, real_kernel, rho_embed, rotation, to_complex,
    ComplexMatrix, RealMatrix, Tolerances,
};

/// Residual bound for conjugator reassembly, relative to `‖M‖`.
const REASSEMBLY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationBlock {
    pub angle: f64,
    pub multiplicity: usize,
}

/// Multiplicity data of an RJS form: `(λ; p, q, {(θ_j, m_j)})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RjsSignature {
    pub modulus: f64,
    pub p: usize,
    pub q: usize,
    pub rotations: Vec<RotationBlock>,
}

impl RjsSignature {
    pub fn new(modulus: f64, p: usize, q: usize, rotations: Vec<RotationBlock>) -> Result<Self> {
        let sig = Self { modulus, p, q, rotations };
        sig.validate()?;
        Ok(sig)
    }

    pub fn order(&self) -> usize {
        self.p + self.q + 2 * self.rotations.iter().map(|b| b.multiplicity).sum::<usize>()
    }

    /// Number of rotation groups `r`.
    pub fn r(&self) -> usize {
        self.rotations.len()
    }

    /// `r' = r + [p > 0] + [q > 0]`.
    pub fn r_prime(&self) -> usize {
        self.r() + usize::from(self.p > 0) + usize::from(self.q > 0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::BlockExtractionFailure(format!("invalid RJS signature: {msg}")));
        if !(self.modulus > 0.0 && self.modulus.is_finite()) {
            return bad("modulus must be positive");
        }
        if self.order() == 0 {
            return bad("empty signature");
        }
        let mut prev = 0.0;
        for b in &self.rotations {
            if b.multiplicity == 0 {
                return bad("rotation multiplicity must be positive");
            }
            if !(b.angle > prev && b.angle < PI) {
                return bad("angles must increase strictly within (0, π)");
            }
            prev = b.angle;
        }
        Ok(())
    }

    /// Eigenvalues of the RJS matrix, with multiplicity.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let l = self.modulus;
        let mut out = vec![Complex64::new(l, 0.0); self.p];
        out.extend(std::iter::repeat_n(Complex64::new(-l, 0.0), self.q));
        for b in &self.rotations {
            let z = Complex64::from_polar(l, b.angle);
            for _ in 0..b.multiplicity {
                out.push(z);
                out.push(z.conj());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedBlock {
    pub angle: f64,
    pub mu: usize,
    pub nu: usize,
}

/// Multiplicity data of an RJA form: `(λ; p, q, k, {(φ_j, μ_j, ν_j)})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RjaSignature {
    pub modulus: f64,
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub mixed: Vec<MixedBlock>,
}

impl RjaSignature {
    pub fn new(modulus: f64, p: usize, q: usize, k: usize, mixed: Vec<MixedBlock>) -> Result<Self> {
        let sig = Self { modulus, p, q, k, mixed };
        sig.validate()?;
        Ok(sig)
    }

    pub fn order(&self) -> usize {
        self.p + self.q + 2 * self.k + 2 * self.mixed.iter().map(|b| b.mu + b.nu).sum::<usize>()
    }

    /// Number of mixed groups `h`.
    pub fn h(&self) -> usize {
        self.mixed.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::BlockExtractionFailure(format!("invalid RJA signature: {msg}")));
        if !(self.modulus > 0.0 && self.modulus.is_finite()) {
            return bad("modulus must be positive");
        }
        if self.order() == 0 {
            return bad("empty signature");
        }
        let mut prev = 0.0;
        for b in &self.mixed {
            if b.mu + b.nu == 0 {
                return bad("each mixed block needs μ + ν ≥ 1");
            }
            if !(b.angle > prev && b.angle < FRAC_PI_2) {
                return bad("angles must increase strictly within (0, π/2)");
            }
            prev = b.angle;
        }
        Ok(())
    }
}

/// `|λ|(I_p ⊕ E_{θ1}^{⊕m1} ⊕ … ⊕ E_{θr}^{⊕mr} ⊕ (−I_q))`.
pub fn rjs_matrix(sig: &RjsSignature) -> RealMatrix {
    let mut blocks = vec![RealMatrix::identity(sig.p, sig.p)];
    for b in &sig.rotations {
        blocks.extend(std::iter::repeat_n(rotation(b.angle), b.multiplicity));
    }
    blocks.push(-RealMatrix::identity(sig.q, sig.q));
    direct_sum(&blocks) * sig.modulus
}

/// `|λ|(I_p ⊕ (−I_q) ⊕ E_{φ1}^{⊕μ1} ⊕ (−E_{φ1})^{⊕ν1} ⊕ … ⊕ E_{π/2}^{⊕k})`.
pub fn rja_matrix(sig: &RjaSignature) -> RealMatrix {
    let mut blocks = vec![RealMatrix::identity(sig.p, sig.p), -RealMatrix::identity(sig.q, sig.q)];
    for b in &sig.mixed {
        blocks.extend(std::iter::repeat_n(rotation(b.angle), b.mu));
        blocks.extend(std::iter::repeat_n(-rotation(b.angle), b.nu));
    }
    blocks.push(lambda(sig.k));
    direct_sum(&blocks) * sig.modulus
}

/// Spectral data of `M` together with eigenspace bases, one per RJS group.
struct Analysis {
    sig: RjsSignature,
    plus: RealMatrix,
    minus: RealMatrix,
    rotations: Vec<ComplexMatrix>,
}

enum ClusterKind {
    Plus,
    Minus,
    Rotation,
}

struct Cluster {
    kind: ClusterKind,
    angle: f64,
    count: usize,
    center: Complex64,
}

fn analyze(m: &RealMatrix, tol: &Tolerances) -> Result<Analysis> {
    check_square(m)?;
    check_finite(m)?;
    let n = m.nrows();
    let det = determinant(m);
    if det.abs() <= tol.tol_sing {
        return Err(Error::Singular(det.abs()));
    }
    let eigs = general_eigenvalues_with_budget(m, tol.sweeps_per_order * n)?;

    let (min_mod, max_mod) = eigs
        .iter()
        .map(|z| z.norm())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let spread = max_mod / min_mod - 1.0;
    if spread > tol.modulus_ratio {
        return Err(Error::NonConstantModulus(spread));
    }
    let modulus = det.abs().powf(1.0 / n as f64);

    let mut tagged: Vec<(f64, Complex64)> = eigs
        .iter()
        .map(|z| (z.im.abs().atan2(z.re), Complex64::new(z.re, z.im.abs())))
        .collect();
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut groups: Vec<Vec<(f64, Complex64)>> = Vec::new();
    for t in tagged {
        match groups.last_mut() {
            Some(g) if t.0 - g.last().unwrap().0 <= tol.angle_gap => g.push(t),
            _ => groups.push(vec![t]),
        }
    }

    let clusters: Vec<Cluster> = groups
        .into_iter()
        .map(|g| {
            let count = g.len();
            let lo = g.first().unwrap().0;
            let hi = g.last().unwrap().0;
            let angle = g.iter().map(|t| t.0).sum::<f64>() / count as f64;
            let center = g.iter().map(|t| t.1).sum::<Complex64>() / count as f64;
            let kind = if lo <= tol.angle_gap {
                ClusterKind::Plus
            } else if hi >= PI - tol.angle_gap {
                ClusterKind::Minus
            } else {
                ClusterKind::Rotation
            };
            Cluster { kind, angle, count, center }
        })
        .collect();

    let sigma_max = crate::linalg::svd::singular_values(m)?[0];
    let rank_floor = tol.tol_rank * sigma_max;
    let not_semisimple = |c: Complex64| Error::NotSemisimple { re: c.re, im: c.im };

    let mut sig = RjsSignature { modulus, p: 0, q: 0, rotations: Vec::new() };
    let mut plus = RealMatrix::zeros(n, 0);
    let mut minus = RealMatrix::zeros(n, 0);
    let mut rotations = Vec::new();
    let id = RealMatrix::identity(n, n);

    for c in clusters {
        match c.kind {
            ClusterKind::Plus | ClusterKind::Minus => {
                let mu = c.center.re;
                let (basis, sv) = real_kernel(&(m - &id * mu), c.count)?;
                let rank = sv.iter().filter(|&&s| s > rank_floor).count();
                if rank != n - c.count {
                    return Err(not_semisimple(Complex64::new(mu, 0.0)));
                }
                if matches!(c.kind, ClusterKind::Plus) {
                    sig.p += c.count;
                    plus = basis;
                } else {
                    sig.q += c.count;
                    minus = basis;
                }
            }
            ClusterKind::Rotation => {
                if c.count % 2 != 0 {
                    return Err(not_semisimple(c.center));
                }
                let mult = c.count / 2;
                let shifted = to_complex(m) - to_complex(&id) * c.center;
                let (basis, sv) = complex_kernel(&shifted, mult)?;
                let rank = sv.iter().filter(|&&s| s > rank_floor).count();
                if rank != n - mult {
                    return Err(not_semisimple(c.center));
                }
                sig.rotations.push(RotationBlock { angle: c.angle, multiplicity: mult });
                rotations.push(basis);
            }
        }
    }
    Ok(Analysis { sig, plus, minus, rotations })
}

/// Real column pairs `(√2 Re w, −√2 Im w)` for each column `w`.
fn realify(w: &ComplexMatrix) -> RealMatrix {
    let n = w.nrows();
    let s = std::f64::consts::SQRT_2;
    let mut out = RealMatrix::zeros(n, 2 * w.ncols());
    for j in 0..w.ncols() {
        for i in 0..n {
            out[(i, 2 * j)] = s * w[(i, j)].re;
            out[(i, 2 * j + 1)] = -s * w[(i, j)].im;
        }
    }
    out
}

/// Swaps each column pair `(x, y) → (y, x)`: turns `E_θ` into `−E_{π−θ}`.
fn swap_pairs(f: &RealMatrix) -> RealMatrix {
    let mut out = f.clone();
    for j in 0..f.ncols() / 2 {
        out.swap_columns(2 * j, 2 * j + 1);
    }
    out
}

fn hstack(parts: &[RealMatrix], n: usize) -> RealMatrix {
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = RealMatrix::zeros(n, cols);
    let mut at = 0;
    for p in parts {
        out.view_mut((0, at), (n, p.ncols())).copy_from(p);
        at += p.ncols();
    }
    out
}

fn relative_residual(a: &RealMatrix, b: &RealMatrix) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// The RJS signature of a nonsingular semisimple matrix whose eigenvalues
/// have constant modulus. `λ = |det M|^{1/n}`.
pub fn spectral_signature(m: &RealMatrix, tol: &Tolerances) -> Result<RjsSignature> {
    Ok(analyze(m, tol)?.sig)
}

/// `J_M` together with a real nonsingular `F0` such that `F0 J_M F0⁻¹ = M`.
#[derive(Debug, Clone)]
pub struct RjsConjugator {
    pub signature: RjsSignature,
    pub j: RealMatrix,
    pub f0: RealMatrix,
}

pub fn rjs_conjugator(m: &RealMatrix, tol: &Tolerances) -> Result<RjsConjugator> {
    let c = rjs_frame(m, tol)?;
    let f0_inv = inverse(&c.f0)?;
    let res = relative_residual(&(&c.f0 * &c.j * f0_inv), m);
    if res > REASSEMBLY_TOL {
        return Err(Error::ReassemblyFailure(res));
    }
    Ok(c)
}

/// [`rjs_conjugator`] without the reassembly check.
pub(crate) fn rjs_frame(m: &RealMatrix, tol: &Tolerances) -> Result<RjsConjugator> {
    let a = analyze(m, tol)?;
    let n = m.nrows();
    let j = rjs_matrix(&a.sig);
    if relative_residual(&j, m) <= 1e-12 {
        return Ok(RjsConjugator { signature: a.sig, j, f0: RealMatrix::identity(n, n) });
    }
    let mut parts = vec![a.plus];
    parts.extend(a.rotations.iter().map(realify));
    parts.push(a.minus);
    Ok(RjsConjugator { signature: a.sig, j, f0: hstack(&parts, n) })
}

/// As [`rjs_conjugator`], rescaled so that `|det F0| = √|det M|`.
pub fn rjs_conjugator_normalized(m: &RealMatrix, tol: &Tolerances) -> Result<RjsConjugator> {
    let mut c = rjs_conjugator(m, tol)?;
    let n = m.nrows() as f64;
    let target = determinant(m).abs().sqrt();
    let current = determinant(&c.f0).abs();
    c.f0 *= (target / current).powf(1.0 / n);
    Ok(c)
}

/// Where each RJA group comes from in the RJS group list.
struct RjaLayout {
    sig: RjaSignature,
    /// For each mixed block: RJS rotation indices feeding μ and ν.
    mixed_src: Vec<(Vec<usize>, Vec<usize>)>,
    k_src: Vec<usize>,
}

fn rja_layout(rjs: &RjsSignature, tol: &Tolerances) -> RjaLayout {
    let mut k = 0;
    let mut k_src = Vec::new();
    // (φ, μ, ν, μ sources, ν sources)
    let mut folded: Vec<(f64, usize, usize, Vec<usize>, Vec<usize>)> = Vec::new();
    for (idx, b) in rjs.rotations.iter().enumerate() {
        if (b.angle - FRAC_PI_2).abs() <= tol.right_angle_band {
            k += b.multiplicity;
            k_src.push(idx);
        } else if b.angle < FRAC_PI_2 {
            folded.push((b.angle, b.multiplicity, 0, vec![idx], Vec::new()));
        } else {
            folded.push((PI - b.angle, 0, b.multiplicity, Vec::new(), vec![idx]));
        }
    }
    folded.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, usize, usize, Vec<usize>, Vec<usize>, usize)> = Vec::new();
    for f in folded {
        match merged.last_mut() {
            Some(last) if f.0 - last.0 / last.5 as f64 <= tol.angle_gap => {
                last.0 += f.0;
                last.5 += 1;
                last.1 += f.1;
                last.2 += f.2;
                last.3.extend(f.3);
                last.4.extend(f.4);
            }
            _ => merged.push((f.0, f.1, f.2, f.3, f.4, 1)),
        }
    }
    let mut mixed = Vec::new();
    let mut mixed_src = Vec::new();
    for (sum, mu, nu, mus, nus, cnt) in merged {
        mixed.push(MixedBlock { angle: sum / cnt as f64, mu, nu });
        mixed_src.push((mus, nus));
    }
    RjaLayout {
        sig: RjaSignature { modulus: rjs.modulus, p: rjs.p, q: rjs.q, k, mixed },
        mixed_src,
        k_src,
    }
}

/// Folds an RJS signature into its RJA counterpart.
pub fn rja_from_rjs(rjs: &RjsSignature, tol: &Tolerances) -> RjaSignature {
    rja_layout(rjs, tol).sig
}

pub fn rja_signature(m: &RealMatrix, tol: &Tolerances) -> Result<RjaSignature> {
    Ok(rja_from_rjs(&spectral_signature(m, tol)?, tol))
}

/// `J̃_U` together with an orthogonal `Z` such that `U = Z J̃_U Zᵀ`.
#[derive(Debug, Clone)]
pub struct RjaConjugator {
    pub signature: RjaSignature,
    pub j_tilde: RealMatrix,
    pub z: RealMatrix,
}

pub fn rja_orthogonal_conjugator(u: &RealMatrix, tol: &Tolerances) -> Result<RjaConjugator> {
    check_square(u)?;
    check_finite(u)?;
    let orth = orthogonality_residual(u);
    if orth > tol.tol_orth {
        return Err(Error::NotOrthogonal(orth));
    }
    let n = u.nrows();
    let a = analyze(u, tol)?;
    let layout = rja_layout(&a.sig, tol);
    let j_tilde = rja_matrix(&layout.sig);
    if relative_residual(&j_tilde, u) <= 1e-12 {
        return Ok(RjaConjugator { signature: layout.sig, j_tilde, z: RealMatrix::identity(n, n) });
    }
    let frames: Vec<RealMatrix> = a.rotations.iter().map(realify).collect();
    let mut parts = vec![a.plus, a.minus];
    for (mus, nus) in &layout.mixed_src {
        parts.extend(mus.iter().map(|&i| frames[i].clone()));
        parts.extend(nus.iter().map(|&i| swap_pairs(&frames[i])));
    }
    parts.extend(layout.k_src.iter().map(|&i| frames[i].clone()));
    let raw = hstack(&parts, n);
    // nearest orthogonal matrix; the eigenspaces of a normal matrix are
    // already orthogonal, so this only removes rounding
    let z = polar_decompose(&raw)?.u;
    let res = (&z * &j_tilde * z.transpose() - u).norm();
    if res > REASSEMBLY_TOL {
        return Err(Error::ReassemblyFailure(res));
    }
    Ok(RjaConjugator { signature: layout.sig, j_tilde, z })
}

/// A basis of the real vector space of matrices commuting with
/// `rjs_matrix(sig)`: `M_p ⊕ ρ(M_{m1}(ℂ)) ⊕ … ⊕ ρ(M_{mr}(ℂ)) ⊕ M_q`.
pub fn commutant_basis(sig: &RjsSignature) -> Vec<RealMatrix> {
    let n = sig.order();
    let mut out = Vec::with_capacity(sig.p * sig.p + sig.q * sig.q);
    let unit = |i: usize, j: usize| {
        let mut e = RealMatrix::zeros(n, n);
        e[(i, j)] = 1.0;
        e
    };
    for i in 0..sig.p {
        for j in 0..sig.p {
            out.push(unit(i, j));
        }
    }
    let mut at = sig.p;
    for b in &sig.rotations {
        let m = b.multiplicity;
        for i in 0..m {
            for j in 0..m {
                for z in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                    let mut c = ComplexMatrix::zeros(m, m);
                    c[(i, j)] = z;
                    let mut e = RealMatrix::zeros(n, n);
                    e.view_mut((at, at), (2 * m, 2 * m)).copy_from(&rho_embed(&c));
                    out.push(e);
                }
            }
        }
        at += 2 * m;
    }
    for i in 0..sig.q {
        for j in 0..sig.q {
            out.push(unit(at + i, at + j));
        }
    }
    out
}

/// Greedy nearest-match comparison of two eigenvalue multisets at
/// `tol_eig · max|λ|`.
pub fn spectra_match(a: &[Complex64], b: &[Complex64], tol_eig: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let scale = a.iter().chain(b).map(|z| z.norm()).fold(0.0, f64::max);
    let slack = tol_eig * scale.max(f64::MIN_POSITIVE);
    let mut used = vec![false; b.len()];
    for x in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|l, r| l.1.total_cmp(&r.1));
        match best {
            Some((i, d)) if d <= slack => used[i] = true,
            _ => return false,
        }
    }
    true
}
