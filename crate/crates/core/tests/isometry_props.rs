mod common;

use common::rng;
use proptest::prelude::*;
use rand::Rng;
use spdfix::isometry::*;
use spdfix::linalg::*;
use spdfix::manifold::{distance, TangentVector};
use spdfix::random::{gaussian_matrix, random_conditioned, random_elliptic_spec, random_orthogonal, random_spd, random_symmetric};
use spdfix::Tolerances;

const FAMILIES: [Family; 4] = [Family::Gamma, Family::GammaDelta, Family::GammaJ, Family::GammaJDelta];

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(FAMILIES.to_vec())
}

/// Any nonsingular `M`, elliptic or not.
fn random_spec(seed: u64, n: usize, family: Family) -> IsometrySpec {
    let m = gaussian_matrix(&mut rng(seed), n, n);
    IsometrySpec::new(m, family.uses_j(), family.uses_delta()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn apply_preserves_distance(seed in any::<u64>(), n in 2usize..7, fam in family()) {
        let spec = random_spec(seed, n, fam);
        let mut r = rng(seed ^ 1);
        let (a, b) = (random_spd(&mut r, n, 1.0), random_spd(&mut r, n, 1.0));
        let d = distance(&a, &b).unwrap();
        let e = distance(&apply(&spec, &a).unwrap(), &apply(&spec, &b).unwrap()).unwrap();
        prop_assert!((d - e).abs() <= 1e-9 * d, "{d} vs {e}");
    }

    #[test]
    fn symmetric_m_is_j_elliptic(seed in any::<u64>(), n in 2usize..9, delta in any::<bool>()) {
        let s = random_symmetric(&mut rng(seed), n);
        let m = if delta { &s / determinant(&s).abs().powf(1.0 / n as f64) } else { s };
        let r = classify(&IsometrySpec::new(m, true, delta).unwrap()).unwrap();
        prop_assert!(r.elliptic, "{:?}", r.reason);
    }

    #[test]
    fn gamma_ellipticity_is_similarity_invariant(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed);
        let spec = random_elliptic_spec(&mut r, Family::Gamma, n, 1e2).unwrap();
        let c = random_conditioned(&mut r, n, 1e2);
        let m = &c * spec.m() * inverse(&c).unwrap();
        let a = classify(&spec).unwrap();
        let b = classify(&IsometrySpec::new(m, false, false).unwrap()).unwrap();
        prop_assert!(a.elliptic && b.elliptic);
        let (sa, sb) = (a.rjs_of.unwrap(), b.rjs_of.unwrap());
        prop_assert_eq!((sa.p, sa.q, sa.rotations.len()), (sb.p, sb.q, sb.rotations.len()));
    }
}

/// Central differences of `apply` along `V`, step `1e-5`.
#[test]
fn differential_matches_finite_differences() {
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let mut r = rng(500 + i);
        let n = 2 + (i % 5) as usize;
        let spec = random_spec(900 + i, n, FAMILIES[(i % 4) as usize]);
        let p = random_spd(&mut r, n, 0.5);
        let v = random_symmetric(&mut r, n);
        let h = 1e-5;
        let plus = SpdPoint::new(p.matrix() + &v * h).unwrap();
        let minus = SpdPoint::new(p.matrix() - &v * h).unwrap();
        let fd = (apply(&spec, &plus).unwrap().matrix() - apply(&spec, &minus).unwrap().matrix()) / (2.0 * h);
        let dv = differential(&spec, &p, &TangentVector::new(p.clone(), v).unwrap()).unwrap();
        worst = worst.max((dv.direction() - &fd).norm() / fd.norm());
    }
    assert!(worst <= 1e-6, "worst {worst:e}");
}

/// `M = K U₀ Kᵀ` with random `K` and random orthogonal `U₀`.
#[test]
fn congruence_data_reassembles() {
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let mut r = rng(2000 + i);
        let n = r.random_range(2..9);
        let k = random_conditioned(&mut r, n, 1e3);
        let u0 = random_orthogonal(&mut r, n);
        let m = &k * u0 * k.transpose();
        let d = orthogonal_congruence_data(&m).unwrap();
        let back = &d.r * &d.j_tilde * d.r.transpose();
        worst = worst.max((back - &m).norm() / m.norm());
        assert!(orthogonality_residual(&d.z) <= 1e-10);
        assert!(orthogonality_residual(&d.u) <= 1e-8);
    }
    assert!(worst <= 1e-7, "worst {worst:e}");
}

#[test]
fn classification_examples() {
    let tol = Tolerances::default();
    let shear = spdfix::RealMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
    let r = classify_with(&IsometrySpec::new(shear, false, false).unwrap(), &tol).unwrap();
    assert_eq!(r.reason, Reason::NotSemisimple);
    let r = classify(&IsometrySpec::new(spdfix::RealMatrix::identity(3, 3) * 2.0, false, false).unwrap()).unwrap();
    assert_eq!(r.reason, Reason::ModulusNotOne);
    let r = classify(&IsometrySpec::new(spdfix::RealMatrix::identity(3, 3) * 2.0, false, true).unwrap()).unwrap();
    assert!(r.elliptic);
    let r = classify(&IsometrySpec::new(spdfix::RealMatrix::identity(3, 3) * 2.0, true, true).unwrap()).unwrap();
    assert_eq!(r.reason, Reason::DetNotUnit);
    let diag = spdfix::RealMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[1.0, 2.0]));
    let r = classify(&IsometrySpec::new(diag, false, true).unwrap()).unwrap();
    assert_eq!(r.reason, Reason::NonConstantModulus);
}
