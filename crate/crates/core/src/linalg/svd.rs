//! Singular value decompositions, computed by faer and returned as nalgebra
//! matrices with singular values in descending order.

use faer::Mat;
use num_complex::Complex64;

use super::{ComplexMatrix, RealMatrix};
use crate::error::{Error, Result};

/// `A = U diag(s) Vᴴ`.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: DMatrixOf<T>,
    pub s: Vec<f64>,
    pub v: DMatrixOf<T>,
}

type DMatrixOf<T> = nalgebra::DMatrix<T>;

fn sorted<T: Copy + nalgebra::Scalar>(u: DMatrixOf<T>, s: Vec<f64>, v: DMatrixOf<T>) -> Svd<T> {
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    Svd {
        u: u.select_columns(&idx),
        s: idx.iter().map(|&i| s[i]).collect(),
        v: v.select_columns(&idx),
    }
}

pub fn real_svd(a: &RealMatrix) -> Result<Svd<f64>> {
    let f = Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]);
    let svd = f.svd().map_err(|_| Error::ConvergenceFailure(0))?;
    let (u, v) = (svd.U(), svd.V());
    let s = svd.S().column_vector().iter().copied().collect();
    Ok(sorted(
        RealMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
        s,
        RealMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]),
    ))
}

pub fn complex_svd(a: &ComplexMatrix) -> Result<Svd<Complex64>> {
    let f = Mat::<faer::c64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]);
    let svd = f.svd().map_err(|_| Error::ConvergenceFailure(0))?;
    let (u, v) = (svd.U(), svd.V());
    let s = svd.S().column_vector().iter().map(|z| z.re).collect();
    Ok(sorted(
        ComplexMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
        s,
        ComplexMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]),
    ))
}

pub fn singular_values(a: &RealMatrix) -> Result<Vec<f64>> {
    Ok(real_svd(a)?.s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_repeated_singular_values() {
        // normal matrix with a doubly repeated singular value
        let a = RealMatrix::from_row_slice(4, 4, &[
            0.0, -2.0, 0.0, 0.0, //
            2.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.6, -1.6, //
            0.0, 0.0, 1.6, 0.6,
        ]);
        let svd = real_svd(&a).unwrap();
        let mut us = svd.u.clone();
        for (j, s) in svd.s.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        assert!((us * svd.v.transpose() - &a).norm() < 1e-14);
        assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn complex_reconstruction() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new((i + 2 * j) as f64, i as f64 - j as f64));
        let svd = complex_svd(&a).unwrap();
        let mut us = svd.u.clone();
        for (j, s) in svd.s.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        assert!((us * svd.v.adjoint() - &a).norm() < 1e-13);
    }
}
