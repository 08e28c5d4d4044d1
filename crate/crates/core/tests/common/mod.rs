#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spdfix::linalg::svd::singular_values;
use spdfix::{ComplexMatrix, RealMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn rel(a: &RealMatrix, b: &RealMatrix) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &RealMatrix, b: &RealMatrix) -> RealMatrix {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    RealMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Dimension of `{X : JX = XJ}` from the singular values of the vectorized
/// commutator `I ⊗ J − Jᵀ ⊗ I`.
pub fn commutator_kernel_dim(j: &RealMatrix) -> usize {
    let n = j.nrows();
    let id = RealMatrix::identity(n, n);
    let op = kron(&id, j) - kron(&j.transpose(), &id);
    let sv = singular_values(&op).unwrap();
    let cut = 1e-10 * sv[0].max(1.0);
    sv.iter().filter(|&&s| s < cut).count()
}
