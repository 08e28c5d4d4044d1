//! Dense real/complex matrix primitives.
//!
//! Storage is `nalgebra::DMatrix`; symmetric eigendecomposition is delegated
//! to nalgebra, the SVD to faer ([`svd`]), while the nonsymmetric eigenvalue iteration lives in
//! [`hqr`]. Every SPD-valued result is re-symmetrized as `(X + Xᵀ) / 2` before
//! it is wrapped in an [`SpdPoint`].

mod hqr;
mod rho;
pub mod svd;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub use hqr::{general_eigenvalues, general_eigenvalues_with_budget, hessenberg};
pub use rho::{rho_embed, rho_project};

pub type RealMatrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;

/// Numerical thresholds shared by every module.
///
/// The defaults are sized for double precision at desk scale (n ≤ 32).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative symmetry tolerance `‖P − Pᵀ‖ ≤ tol_sym·‖P‖`.
    pub tol_sym: f64,
    /// Orthogonality tolerance on `‖UᵀU − I‖`.
    pub tol_orth: f64,
    /// Positive definiteness: smallest eigenvalue must exceed `tol_pd·‖P‖`.
    pub tol_pd: f64,
    /// Absolute determinant threshold for singularity.
    pub tol_sing: f64,
    /// Eigenvalue matching tolerance, relative to the largest modulus.
    pub tol_eig: f64,
    /// Numeric rank threshold, relative to the largest singular value.
    pub tol_rank: f64,
    /// Absolute gap (radians) separating eigenangle clusters.
    pub angle_gap: f64,
    /// Half-width of the band around π/2 assigned to the `k` block.
    pub right_angle_band: f64,
    /// Constant-modulus test: `max|λ| / min|λ| − 1`.
    pub modulus_ratio: f64,
    /// Unit-modulus test: `| |λ| − 1 |`.
    pub modulus_one: f64,
    /// Unit-determinant test for `Γ_M ∘ j ∘ δ`.
    pub det_unit: f64,
    /// Relative singular-value threshold of the tangent-space kernel oracle.
    pub kernel: f64,
    /// QR sweeps allowed per matrix order.
    pub sweeps_per_order: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_sym: 1e-10,
            tol_orth: 1e-10,
            tol_pd: 1e-12,
            tol_sing: 1e-12,
            tol_eig: 1e-8,
            tol_rank: 1e-8,
            angle_gap: 1e-7,
            right_angle_band: 1e-7,
            modulus_ratio: 1e-8,
            modulus_one: 1e-8,
            det_unit: 1e-9,
            kernel: 1e-6,
            sweeps_per_order: 100,
        }
    }
}

impl Tolerances {
    /// Spectral thresholds (modulus, rank, angle gap) multiplied by `factor`.
    pub fn coarsened(&self, factor: f64) -> Self {
        Self {
            tol_rank: self.tol_rank * factor,
            angle_gap: self.angle_gap * factor,
            modulus_ratio: self.modulus_ratio * factor,
            modulus_one: self.modulus_one * factor,
            ..*self
        }
    }
}

/// A symmetric positive-definite matrix: a point of the manifold `𝒫_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdPoint(RealMatrix);

impl SpdPoint {
    /// Validates symmetry and positive definiteness with the default tolerances.
    pub fn new(m: RealMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    pub fn with_tolerances(m: RealMatrix, tol: &Tolerances) -> Result<Self> {
        check_square(&m)?;
        check_finite(&m)?;
        let asym = relative_asymmetry(&m);
        if asym > tol.tol_sym {
            return Err(Error::NonSymmetric(asym));
        }
        let m = symmetrize(&m);
        let eig = SymmetricEigen::new(m.clone());
        let min = eig.eigenvalues.min();
        let scale = m.norm();
        if !(min > tol.tol_pd * scale) {
            return Err(Error::NotPositiveDefinite(min));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix known to be SPD by construction, symmetrizing it.
    pub(crate) fn from_trusted(m: RealMatrix) -> Self {
        Self(symmetrize(&m))
    }

    pub fn identity(n: usize) -> Self {
        Self(RealMatrix::identity(n, n))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.0
    }

    /// Ascending eigenvalues and orthogonal eigenvectors.
    pub fn eigen(&self) -> SymEigen {
        sym_eigen_unchecked(&self.0)
    }

    /// `ln det P`, summed from the eigenvalues.
    /// `2 Σ ln L_ii` from the Cholesky factor `P = LLᵀ`, which keeps
    /// relative accuracy on graded matrices.
    pub fn log_det(&self) -> f64 {
        match self.0.clone().cholesky() {
            Some(c) => 2.0 * c.l_dirty().diagonal().iter().map(|l| l.ln()).sum::<f64>(),
            None => self.eigen().values.iter().map(|l| l.ln()).sum(),
        }
    }

    pub fn det(&self) -> f64 {
        self.log_det().exp()
    }

    /// `P^s` for real `s`, by functional calculus.
    pub fn powf(&self, s: f64) -> SpdPoint {
        SpdPoint::from_trusted(self.eigen().apply(|l| l.powf(s)))
    }

    pub fn inverse(&self) -> SpdPoint {
        SpdPoint::from_trusted(self.eigen().apply(|l| 1.0 / l))
    }

    pub fn scaled(&self, c: f64) -> SpdPoint {
        SpdPoint::from_trusted(&self.0 * c)
    }

    /// `C P Cᵀ`.
    pub fn congruence(&self, c: &RealMatrix) -> SpdPoint {
        SpdPoint::from_trusted(c * &self.0 * c.transpose())
    }
}

/// Symmetric eigendecomposition `S = V diag(λ) Vᵀ`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: DVector<f64>,
    pub vectors: RealMatrix,
}

impl SymEigen {
    /// `V diag(f(λ)) Vᵀ`, symmetrized.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> RealMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            let fl = f(l);
            scaled.column_mut(j).scale_mut(fl);
        }
        symmetrize(&(scaled * self.vectors.transpose()))
    }
}

pub fn sym_eigen(s: &RealMatrix) -> Result<SymEigen> {
    check_square(s)?;
    check_finite(s)?;
    let asym = relative_asymmetry(s);
    if asym > Tolerances::default().tol_sym {
        return Err(Error::NonSymmetric(asym));
    }
    Ok(sym_eigen_unchecked(&symmetrize(s)))
}

fn sym_eigen_unchecked(s: &RealMatrix) -> SymEigen {
    let eig = SymmetricEigen::new(s.clone());
    let n = s.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = RealMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    SymEigen { values, vectors }
}

/// The unique SPD square root.
pub fn spd_sqrt(p: &SpdPoint) -> SpdPoint {
    p.powf(0.5)
}

pub fn matrix_exp_sym(x: &RealMatrix) -> Result<SpdPoint> {
    Ok(SpdPoint::from_trusted(sym_eigen(x)?.apply(f64::exp)))
}

pub fn matrix_log_spd(p: &SpdPoint) -> RealMatrix {
    p.eigen().apply(f64::ln)
}

/// Polar factors `A = Q U` with `Q = √(AAᵀ)` SPD and `U` orthogonal.
#[derive(Debug, Clone)]
pub struct Polar {
    pub q: SpdPoint,
    pub u: RealMatrix,
}

/// Right polar decomposition via the SVD `A = W Σ Vᵀ`: `Q = W Σ Wᵀ`, `U = W Vᵀ`.
pub fn polar_decompose(a: &RealMatrix) -> Result<Polar> {
    check_square(a)?;
    check_finite(a)?;
    let det = determinant(a);
    if det.abs() <= Tolerances::default().tol_sing {
        return Err(Error::Singular(det.abs()));
    }
    let svd = svd::real_svd(a)?;
    let w = svd.u;
    let mut ws = w.clone();
    for (j, s) in svd.s.iter().enumerate() {
        ws.column_mut(j).scale_mut(*s);
    }
    let q = SpdPoint::from_trusted(symmetrize(&(ws * w.transpose())));
    let u = w * svd.v.transpose();
    Ok(Polar { q, u })
}

/// `‖AAᵀ − AᵀA‖ ≤ tol·‖A‖²`.
pub fn is_normal(a: &RealMatrix, tol: f64) -> bool {
    let at = a.transpose();
    let comm = a * &at - &at * a;
    comm.norm() <= tol * a.norm_squared()
}

/// Block-diagonal assembly; 0×0 blocks are skipped.
pub fn direct_sum(blocks: &[RealMatrix]) -> RealMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = RealMatrix::zeros(n, n);
    let mut at = 0;
    for b in blocks.iter().filter(|b| b.nrows() > 0) {
        assert!(b.is_square(), "direct_sum requires square blocks");
        out.view_mut((at, at), b.shape()).copy_from(b);
        at += b.nrows();
    }
    out
}

/// The rotation `E_θ = cos θ I₂ + sin θ E`.
pub fn rotation(theta: f64) -> RealMatrix {
    let (s, c) = theta.sin_cos();
    RealMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// `Ω_p = I_p ⊕ (−I_{n−p})`.
pub fn omega(p: usize, n: usize) -> RealMatrix {
    assert!(p <= n);
    RealMatrix::from_diagonal(&DVector::from_fn(n, |i, _| if i < p { 1.0 } else { -1.0 }))
}

/// `Λ_m = E^{⊕m}`.
pub fn lambda(m: usize) -> RealMatrix {
    let e = RealMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    direct_sum(&vec![e; m])
}

/// `Θ_{θ;μ,ν} = E_θ^{⊕μ} ⊕ (−E_θ^{⊕ν})`.
pub fn theta_form(theta: f64, mu: usize, nu: usize) -> RealMatrix {
    let mut blocks = vec![rotation(theta); mu];
    blocks.extend(std::iter::repeat_n(-rotation(theta), nu));
    direct_sum(&blocks)
}

pub fn symmetrize(m: &RealMatrix) -> RealMatrix {
    (m + m.transpose()) * 0.5
}

/// `‖M − Mᵀ‖ / ‖M‖` (zero for the zero matrix).
pub fn relative_asymmetry(m: &RealMatrix) -> f64 {
    let scale = m.norm();
    if scale == 0.0 {
        return 0.0;
    }
    (m - m.transpose()).norm() / scale
}

/// `‖UᵀU − I‖`.
pub fn orthogonality_residual(u: &RealMatrix) -> f64 {
    (u.transpose() * u - RealMatrix::identity(u.ncols(), u.ncols())).norm()
}

/// Determinant from the partially pivoted LU factorization.
pub fn determinant(a: &RealMatrix) -> f64 {
    a.clone().lu().determinant()
}

pub fn inverse(a: &RealMatrix) -> Result<RealMatrix> {
    check_square(a)?;
    // LU for every order; nalgebra's closed forms for n ≤ 4 lose accuracy
    // on ill-conditioned input
    a.clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Singular(determinant(a).abs()))
}

pub(crate) fn check_square(m: &RealMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

pub(crate) fn check_finite(m: &RealMatrix) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Orthonormal basis (columns) of the numeric kernel of a complex matrix, with
/// the singular values in descending order.
pub(crate) fn complex_kernel(a: &ComplexMatrix, dim: usize) -> Result<(ComplexMatrix, Vec<f64>)> {
    let n = a.ncols();
    let svd = svd::complex_svd(a)?;
    Ok((svd.v.columns(n - dim, dim).into_owned(), svd.s))
}

/// Real counterpart of [`complex_kernel`].
pub(crate) fn real_kernel(a: &RealMatrix, dim: usize) -> Result<(RealMatrix, Vec<f64>)> {
    let n = a.ncols();
    let svd = svd::real_svd(a)?;
    Ok((svd.v.columns(n - dim, dim).into_owned(), svd.s))
}

pub(crate) fn to_complex(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}
