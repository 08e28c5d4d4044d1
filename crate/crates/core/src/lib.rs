//! Elliptic isometries of the manifold of symmetric positive-definite
//! matrices with the trace metric `g_A(V, W) = tr(A⁻¹ V A⁻¹ W)`.
//!
//! The crate classifies the four isometry families
//! (`Γ_M`, `Γ_M ∘ δ`, `Γ_M ∘ j`, `Γ_M ∘ j ∘ δ`), builds explicit descriptions
//! of their fixed-point loci (conjugator, block structure, dimension and
//! De Rham factors), samples verified fixed points, and checks every
//! closed-form claim against an independent numerical oracle.
//!
//! Module map:
//!
//! - [`linalg`]: dense primitives, decompositions, the `ρ` embedding.
//! - [`canonical`]: real Jordan standard / auxiliary forms and commutants.
//! - [`manifold`]: metric, geodesics, distance, determinant splitting.
//! - [`isometry`]: the four families, their differentials, ellipticity.
//! - [`fixlocus`]: descriptors, sampling, tangent-space oracle, reports.
//! - [`random`]: seeded generators of random canonical forms and isometries.

pub mod canonical;
pub mod error;
pub mod fixlocus;
pub mod isometry;
pub mod linalg;
pub mod manifold;
pub mod random;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, RealMatrix, SpdPoint, Tolerances};
