//! The algebra monomorphism `ρ: M_h(ℂ) → M_{2h}(ℝ)`, `ρ(z) = Re(z) I₂ + Im(z) E`.

use num_complex::Complex64;

use super::{ComplexMatrix, RealMatrix};
use crate::error::{Error, Result};

pub fn rho_embed(z: &ComplexMatrix) -> RealMatrix {
    let (h, w) = z.shape();
    let mut out = RealMatrix::zeros(2 * h, 2 * w);
    for i in 0..h {
        for j in 0..w {
            let c = z[(i, j)];
            out[(2 * i, 2 * j)] = c.re;
            out[(2 * i, 2 * j + 1)] = -c.im;
            out[(2 * i + 1, 2 * j)] = c.im;
            out[(2 * i + 1, 2 * j + 1)] = c.re;
        }
    }
    out
}

/// Inverse of [`rho_embed`] on its image. Each 2×2 block must have the form
/// `aI₂ + bE` within `tol·max(1, ‖R‖)`.
pub fn rho_project(r: &RealMatrix, tol: f64) -> Result<ComplexMatrix> {
    let (rows, cols) = r.shape();
    if rows % 2 != 0 || cols % 2 != 0 {
        return Err(Error::NotInImage(rows, cols));
    }
    let slack = tol * r.norm().max(1.0);
    let mut z = ComplexMatrix::zeros(rows / 2, cols / 2);
    for i in 0..rows / 2 {
        for j in 0..cols / 2 {
            let (a, b, c, d) = (
                r[(2 * i, 2 * j)],
                r[(2 * i, 2 * j + 1)],
                r[(2 * i + 1, 2 * j)],
                r[(2 * i + 1, 2 * j + 1)],
            );
            if (a - d).abs() > slack || (b + c).abs() > slack {
                return Err(Error::NotInImage(i, j));
            }
            z[(i, j)] = Complex64::new((a + d) / 2.0, (c - b) / 2.0);
        }
    }
    Ok(z)
}
