//! Seeded generators of random canonical forms and random elliptic
//! isometries, for experiments and tests.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::canonical::{rja_matrix, rjs_matrix, MixedBlock, RjaSignature, RjsSignature, RotationBlock};
use crate::error::Result;
use crate::isometry::{Family, IsometrySpec};
use crate::linalg::{inverse, RealMatrix, SpdPoint};

/// Minimum separation between sampled eigenangles.
const ANGLE_SEPARATION: f64 = 0.1;
/// Margin kept from the ends of the angle range.
const ANGLE_MARGIN: f64 = 0.15;

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> RealMatrix {
    RealMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
/// signs of `diag(R)` absorbed).
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> RealMatrix {
    let qr = gaussian_matrix(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `Q₁ diag(σ) Q₂` with `σ` log-uniform in `[1, c]` and `c` itself
/// log-uniform in `[1, max_cond]`, so the condition number is at most
/// `max_cond`.
pub fn random_conditioned<R: Rng>(rng: &mut R, n: usize, max_cond: f64) -> RealMatrix {
    conditioned(rng, n, max_cond, false)
}

/// As [`random_conditioned`], with `σ` rescaled to unit product so that
/// `|det| = 1` up to the orthogonality of the factors.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize, max_cond: f64) -> RealMatrix {
    conditioned(rng, n, max_cond, true)
}

fn conditioned<R: Rng>(rng: &mut R, n: usize, max_cond: f64, unimodular: bool) -> RealMatrix {
    let log_c = rng.random_range(0.0..=max_cond.ln());
    let mut log_sigma: Vec<f64> = (0..n)
        .map(|i| match i {
            0 => 0.0,
            1 => log_c,
            _ => rng.random_range(0.0..=log_c),
        })
        .collect();
    if unimodular {
        let mean = log_sigma.iter().sum::<f64>() / n as f64;
        log_sigma.iter_mut().for_each(|l| *l -= mean);
    }
    let sigma = RealMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, log_sigma.into_iter().map(f64::exp)));
    random_orthogonal(rng, n) * sigma * random_orthogonal(rng, n)
}

/// Symmetric positive-definite matrix `exp(Y)` with Gaussian symmetric `Y`
/// of standard deviation `scale`.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize, scale: f64) -> SpdPoint {
    let g = gaussian_matrix(rng, n, n) * scale;
    crate::linalg::matrix_exp_sym(&((&g + g.transpose()) * 0.5)).expect("symmetric")
}

pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> RealMatrix {
    let g = gaussian_matrix(rng, n, n);
    (&g + g.transpose()) * 0.5
}

/// `count` sorted angles in `[lo, hi]`, pairwise at least
/// [`ANGLE_SEPARATION`] apart.
fn separated_angles<R: Rng>(rng: &mut R, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    loop {
        let mut a: Vec<f64> = (0..count).map(|_| rng.random_range(lo..hi)).collect();
        a.sort_by(f64::total_cmp);
        if a.windows(2).all(|w| w[1] - w[0] >= ANGLE_SEPARATION) {
            return a;
        }
    }
}

/// Splits `n` into single units and pairs; pairs go into groups whose count
/// is returned alongside the unit tallies `(a, b)`.
fn random_partition<R: Rng>(rng: &mut R, n: usize, max_groups: usize) -> (usize, usize, Vec<usize>) {
    let (mut a, mut b) = (0, 0);
    let mut groups: Vec<usize> = Vec::new();
    let mut left = n;
    while left > 0 {
        match rng.random_range(0..3) {
            0 => {
                a += 1;
                left -= 1;
            }
            1 => {
                b += 1;
                left -= 1;
            }
            _ if left >= 2 => {
                if !groups.is_empty() && (groups.len() >= max_groups || rng.random_bool(0.5)) {
                    let i = rng.random_range(0..groups.len());
                    groups[i] += 1;
                } else {
                    groups.push(1);
                }
                left -= 2;
            }
            _ => {}
        }
    }
    (a, b, groups)
}

pub fn random_rjs_signature<R: Rng>(rng: &mut R, n: usize, modulus: f64) -> RjsSignature {
    let (p, q, mult) = random_partition(rng, n, 4);
    let angles = separated_angles(rng, mult.len(), ANGLE_MARGIN, PI - ANGLE_MARGIN);
    let rotations = angles
        .into_iter()
        .zip(mult)
        .map(|(angle, multiplicity)| RotationBlock { angle, multiplicity })
        .collect();
    RjsSignature::new(modulus, p, q, rotations).expect("valid by construction")
}

pub fn random_rja_signature<R: Rng>(rng: &mut R, n: usize) -> RjaSignature {
    let (p, q, pairs) = random_partition(rng, n, 4);
    // each pair group becomes either the k block or a mixed φ block
    let mut k = 0;
    let mut mixed_sizes = Vec::new();
    for g in pairs {
        if k == 0 && rng.random_bool(0.3) {
            k = g;
        } else {
            mixed_sizes.push(g);
        }
    }
    let angles = separated_angles(rng, mixed_sizes.len(), ANGLE_MARGIN, FRAC_PI_2 - ANGLE_MARGIN);
    let mixed = angles
        .into_iter()
        .zip(mixed_sizes)
        .map(|(angle, size)| {
            let mu = rng.random_range(0..=size);
            MixedBlock { angle, mu, nu: size - mu }
        })
        .collect();
    RjaSignature::new(1.0, p, q, k, mixed).expect("valid by construction")
}

/// A random elliptic isometry of the given family:
///
/// * `Γ`: `C J C⁻¹` with `J` an RJS form of modulus 1;
/// * `Γδ`: the same with a random modulus in `[1/2, 2]`;
/// * `Γj`: `K J̃ Kᵀ` with `J̃` an RJA form;
/// * `Γjδ`: the same with `|det K| = 1`.
///
/// `C`, `K` have condition number at most `max_cond`.
pub fn random_elliptic_spec<R: Rng>(rng: &mut R, family: Family, n: usize, max_cond: f64) -> Result<IsometrySpec> {
    let m = match family {
        Family::Gamma | Family::GammaDelta => {
            let c = random_conditioned(rng, n, max_cond);
            let modulus = if family == Family::GammaDelta { rng.random_range(-(2f64.ln())..2f64.ln()).exp() } else { 1.0 };
            let j = rjs_matrix(&random_rjs_signature(rng, n, modulus));
            &c * j * inverse(&c)?
        }
        Family::GammaJ => {
            let k = random_conditioned(rng, n, max_cond);
            &k * rja_matrix(&random_rja_signature(rng, n)) * k.transpose()
        }
        Family::GammaJDelta => {
            let k = random_unimodular(rng, n, max_cond);
            &k * rja_matrix(&random_rja_signature(rng, n)) * k.transpose()
        }
    };
    IsometrySpec::new(m, family.uses_j(), family.uses_delta())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::orthogonality_residual;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orthogonal_and_conditioned() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..7 {
            assert!(orthogonality_residual(&random_orthogonal(&mut rng, n)) < 1e-13);
            let c = random_conditioned(&mut rng, n, 1e3);
            let sv = crate::linalg::svd::singular_values(&c).unwrap();
            assert!(sv[0] / sv[n - 1] <= 1e3 * (1.0 + 1e-10));
        }
    }

    #[test]
    fn signatures_have_requested_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..9 {
            assert_eq!(random_rjs_signature(&mut rng, n, 1.0).order(), n);
            assert_eq!(random_rja_signature(&mut rng, n).order(), n);
        }
    }
}
