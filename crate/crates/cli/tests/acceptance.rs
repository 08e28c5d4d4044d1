//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Every threshold and sample count is pinned below.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spdfix::canonical::{
    commutant_basis, rja_matrix, rja_signature, rjs_conjugator, rjs_matrix, spectral_signature, RjsSignature,
    RotationBlock,
};
use spdfix::fixlocus::{
    delta_splitting_coords, delta_splitting_inverse, fix_locus, membership_residual, sample_point,
    tangent_dim_oracle, FactorKind, FixedLocusDescriptor,
};
use spdfix::isometry::{apply, Family, IsometrySpec};
use spdfix::linalg::svd::singular_values;
use spdfix::linalg::{determinant, inverse, lambda, omega, theta_form};
use spdfix::manifold::{distance, geodesic, sl_split};
use spdfix::random::{gaussian_matrix, random_conditioned, random_elliptic_spec, random_rjs_signature, random_spd};
use spdfix::RealMatrix;

const SEED: u64 = 20_240_601;
const FAMILIES: [Family; 4] = [Family::Gamma, Family::GammaDelta, Family::GammaJ, Family::GammaJDelta];

// 1
const GOLDEN_ORDERS: std::ops::RangeInclusive<usize> = 2..=8;
const GOLDEN_ORACLE_SAMPLES: u64 = 3;
const GOLDEN_RUNTIME: Duration = Duration::from_secs(30);
// 2
const SPECIAL_ORDERS: std::ops::RangeInclusive<usize> = 2..=6;
// 3
const RANDOM_SPECS_PER_FAMILY: usize = 50;
const RANDOM_SAMPLES: u64 = 10;
const RANDOM_MAX_COND: f64 = 1e3;
const MEMBERSHIP_TOL: f64 = 1e-8;
const RANDOM_RUNTIME: Duration = Duration::from_secs(120);
// 4
const RJA_SQUARE_CASES: usize = 100;
const RJA_SQUARE_TOL: f64 = 1e-10;
/// Conditioning of `C` in `A = C J C⁻¹` for the `(J̃_A)² = J_{A²}` check.
const RJA_SQUARE_MAX_COND: f64 = 1e2;
const RJS_REASSEMBLY_CASES: usize = 200;
const RJS_REASSEMBLY_TOL: f64 = 1e-8;
const COMMUTANT_MAX_ORDER: usize = 8;
const COMMUTANT_KERNEL_CUT: f64 = 1e-10;
// 5
const ISOMETRY_TRIPLES: usize = 100;
const ISOMETRY_TOL: f64 = 1e-9;
// 6
const GEODESIC_SPECS_PER_FAMILY: usize = 25;
const GEODESIC_TOL: f64 = 1e-7;
const GEODESIC_TIMES: [f64; 3] = [0.25, 0.5, 0.75];
// 7
const DET_SPECS: usize = 50;
const DET_TOL: f64 = 1e-8;
// 8
const SPLIT_PAIRS: usize = 100;
const SPLIT_TOL: f64 = 1e-9;
const SPLITTING_POINTS: usize = 50;
const SPLITTING_TOL: f64 = 1e-9;
// 9
const CLI_SEED: &str = "7";

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spec(m: RealMatrix, family: Family) -> IsometrySpec {
    IsometrySpec::new(m, family.uses_j(), family.uses_delta()).expect("nonsingular")
}

/// Descriptor dimension equals `expected` and the oracle dimension at
/// the first `samples` sampled points.
fn check_dimension(s: &IsometrySpec, expected: usize, samples: u64, label: &str) -> Result<FixedLocusDescriptor, String> {
    let d = fix_locus(s).map_err(|e| format!("{label}: {e}"))?;
    ensure(d.dimension == expected, || format!("{label}: descriptor dimension {} != {expected}", d.dimension))?;
    for seed in 0..samples {
        let p = sample_point(&d, seed, 0.5);
        let o = tangent_dim_oracle(s, &p).map_err(|e| format!("{label}: {e}"))?;
        ensure(o == expected, || format!("{label}: oracle dimension {o} != {expected} (seed {seed})"))?;
    }
    Ok(d)
}

fn golden_dimensions() -> Outcome {
    let start = Instant::now();
    let mut loci = 0;
    for n in GOLDEN_ORDERS {
        for p in 0..=n {
            let s = spec(omega(p, n), Family::GammaJ);
            check_dimension(&s, p * (n - p), GOLDEN_ORACLE_SAMPLES, &format!("Omega_{p}, n={n}"))?;
            loci += 1;
        }
        if n % 2 == 0 {
            let m = n / 2;
            check_dimension(&spec(lambda(m), Family::GammaJ), m * (m + 1), GOLDEN_ORACLE_SAMPLES, &format!("Lambda_{m}"))?;
            loci += 1;
        }
    }
    for theta in [FRAC_PI_6, FRAC_PI_3] {
        for mu in 0..=3 {
            for nu in 0..=3 - mu {
                if mu + nu == 0 {
                    continue;
                }
                let s = spec(theta_form(theta, mu, nu), Family::GammaJ);
                check_dimension(&s, 2 * mu * nu, GOLDEN_ORACLE_SAMPLES, &format!("Theta({theta:.4}; {mu}, {nu})"))?;
                loci += 1;
            }
        }
    }
    let t = start.elapsed();
    ensure(t < GOLDEN_RUNTIME, || format!("runtime {t:?} exceeds {GOLDEN_RUNTIME:?}"))?;
    Ok(format!("{loci} loci, descriptor and oracle dimensions exact, {:.1} s", t.as_secs_f64()))
}

fn special_loci() -> Outcome {
    for n in SPECIAL_ORDERS {
        let id = RealMatrix::identity(n, n);
        let d = check_dimension(&spec(id.clone(), Family::GammaJ), 0, 3, &format!("Fix(j), n={n}"))?;
        ensure(d.factors.is_empty(), || format!("Fix(j), n={n}: factors {:?}", d.factors))?;
        let p = sample_point(&d, 0, 0.5);
        ensure((p.matrix() - &id).norm() <= 1e-12, || format!("Fix(j), n={n}: sampled point is not I"))?;

        let d = check_dimension(&spec(id.clone(), Family::GammaDelta), n * (n + 1) / 2 - 1, 3, &format!("Fix(delta), n={n}"))?;
        let kinds: Vec<FactorKind> = d.factors.iter().map(|f| f.kind).collect();
        ensure(kinds == [FactorKind::SlOverSo(n)], || format!("Fix(delta), n={n}: factors {kinds:?}"))?;

        let d = check_dimension(&spec(id, Family::GammaJDelta), 1, 3, &format!("Fix(j delta), n={n}"))?;
        let kinds: Vec<FactorKind> = d.factors.iter().map(|f| f.kind).collect();
        ensure(kinds == [FactorKind::Euclidean(1)], || format!("Fix(j delta), n={n}: factors {kinds:?}"))?;
    }
    Ok(format!("Fix(j), Fix(delta), Fix(j delta) exact for n in {SPECIAL_ORDERS:?}"))
}

fn randomized_generator_checker() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (fi, &family) in FAMILIES.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + fi as u64);
        for i in 0..RANDOM_SPECS_PER_FAMILY {
            let n = 2 + i % 7;
            let s = random_elliptic_spec(&mut rng, family, n, RANDOM_MAX_COND).map_err(|e| e.to_string())?;
            let label = format!("{family:?} spec {i} (n={n})");
            let d = fix_locus(&s).map_err(|e| format!("{label}: {e}"))?;
            let sum: usize = d.factors.iter().map(|f| f.dimension).sum();
            ensure(sum == d.dimension, || format!("{label}: factor sum {sum} != {}", d.dimension))?;
            for seed in 0..RANDOM_SAMPLES {
                let p = sample_point(&d, seed, 0.5);
                let r = membership_residual(&s, &p).map_err(|e| format!("{label}: {e}"))?;
                worst = worst.max(r);
                ensure(r <= MEMBERSHIP_TOL, || format!("{label}: residual {r:e} at seed {seed}"))?;
                let o = tangent_dim_oracle(&s, &p).map_err(|e| format!("{label}: {e}"))?;
                ensure(o == d.dimension, || format!("{label}: oracle {o} != {} at seed {seed}", d.dimension))?;
            }
        }
    }
    let t = start.elapsed();
    ensure(t < RANDOM_RUNTIME, || format!("runtime {t:?} exceeds {RANDOM_RUNTIME:?}"))?;
    Ok(format!(
        "{} specs x {RANDOM_SAMPLES} samples, worst residual {worst:.1e}, {:.1} s",
        4 * RANDOM_SPECS_PER_FAMILY,
        t.as_secs_f64()
    ))
}

/// Dimension of `{X : JX = XJ}` from the singular values of
/// `I ⊗ J − Jᵀ ⊗ I`.
fn commutator_kernel_dim(j: &RealMatrix) -> usize {
    let n = j.nrows();
    let kron = |a: &RealMatrix, b: &RealMatrix| {
        RealMatrix::from_fn(n * n, n * n, |r, c| a[(r / n, c / n)] * b[(r % n, c % n)])
    };
    let id = RealMatrix::identity(n, n);
    let sv = singular_values(&(kron(&id, j) - kron(&j.transpose(), &id))).unwrap();
    let cut = COMMUTANT_KERNEL_CUT * sv[0].max(1.0);
    sv.iter().filter(|&&s| s < cut).count()
}

fn partitions(k: usize, max: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=k.min(max)).rev() {
        for mut rest in partitions(k - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn canonical_identities() -> Outcome {
    let tol = spdfix::Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut worst_sq = 0.0f64;
    for i in 0..RJA_SQUARE_CASES {
        let n = 2 + i % 7;
        let sig = random_rjs_signature(&mut rng, n, 1.0);
        let c = random_conditioned(&mut rng, n, RJA_SQUARE_MAX_COND);
        let a = &c * rjs_matrix(&sig) * inverse(&c).unwrap();
        let jt = rja_matrix(&rja_signature(&a, &tol).map_err(|e| e.to_string())?);
        let j2 = rjs_matrix(&spectral_signature(&(&a * &a), &tol).map_err(|e| e.to_string())?);
        worst_sq = worst_sq.max((&jt * &jt - j2).norm());
    }
    ensure(worst_sq <= RJA_SQUARE_TOL, || format!("(J~_A)^2 vs J_(A^2): {worst_sq:e}"))?;

    let mut worst_re = 0.0f64;
    for i in 0..RJS_REASSEMBLY_CASES {
        let n = 2 + i % 7;
        let sig = random_rjs_signature(&mut rng, n, 1.0);
        let c = random_conditioned(&mut rng, n, 1e3);
        let m = &c * rjs_matrix(&sig) * inverse(&c).unwrap();
        let k = rjs_conjugator(&m, &tol).map_err(|e| e.to_string())?;
        worst_re = worst_re.max((&k.f0 * &k.j * inverse(&k.f0).unwrap() - &m).norm() / m.norm());
    }
    ensure(worst_re <= RJS_REASSEMBLY_TOL, || format!("RJS reassembly {worst_re:e}"))?;

    let mut sigs = 0;
    for n in 1..=COMMUTANT_MAX_ORDER {
        for p in 0..=n {
            for q in 0..=n - p {
                if (n - p - q) % 2 != 0 {
                    continue;
                }
                for part in partitions((n - p - q) / 2, n) {
                    let rotations = part
                        .iter()
                        .zip([0.4, 1.1, 1.9, 2.6])
                        .map(|(&multiplicity, angle)| RotationBlock { angle, multiplicity })
                        .collect();
                    let sig = RjsSignature::new(1.0, p, q, rotations).unwrap();
                    let formula = p * p + q * q + 2 * part.iter().map(|m| m * m).sum::<usize>();
                    let basis = commutant_basis(&sig).len();
                    let brute = commutator_kernel_dim(&rjs_matrix(&sig));
                    ensure(basis == formula && brute == formula, || {
                        format!("commutant of {sig:?}: basis {basis}, kernel {brute}, formula {formula}")
                    })?;
                    sigs += 1;
                }
            }
        }
    }
    Ok(format!(
        "square identity {worst_sq:.1e}, RJS reassembly {worst_re:.1e}, {sigs} commutant dimensions exact"
    ))
}

fn isometry_contract() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 20);
    let mut worst = 0.0f64;
    for &family in &FAMILIES {
        for i in 0..ISOMETRY_TRIPLES {
            let n = 2 + i % 5;
            let s = spec(gaussian_matrix(&mut rng, n, n), family);
            let (a, b) = (random_spd(&mut rng, n, 1.0), random_spd(&mut rng, n, 1.0));
            let d = distance(&a, &b).unwrap();
            let e = distance(&apply(&s, &a).unwrap(), &apply(&s, &b).unwrap()).unwrap();
            worst = worst.max((d - e).abs() / d);
        }
    }
    ensure(worst <= ISOMETRY_TOL, || format!("relative distance error {worst:e}"))?;
    Ok(format!("{} triples per family, worst relative error {worst:.1e}", ISOMETRY_TRIPLES))
}

fn totally_geodesic() -> Outcome {
    let mut worst = 0.0f64;
    for (fi, &family) in FAMILIES.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 30 + fi as u64);
        for i in 0..GEODESIC_SPECS_PER_FAMILY {
            let n = 2 + i % 7;
            let s = random_elliptic_spec(&mut rng, family, n, RANDOM_MAX_COND).map_err(|e| e.to_string())?;
            let d = fix_locus(&s).map_err(|e| e.to_string())?;
            let (p, q) = (sample_point(&d, 0, 0.5), sample_point(&d, 1, 0.5));
            for t in GEODESIC_TIMES {
                let g = geodesic(&p, &q, t).unwrap();
                worst = worst.max(membership_residual(&s, &g).unwrap());
            }
        }
    }
    ensure(worst <= GEODESIC_TOL, || format!("worst geodesic residual {worst:e}"))?;
    Ok(format!("{} loci, worst residual {worst:.1e}", 4 * GEODESIC_SPECS_PER_FAMILY))
}

fn determinant_constraints() -> Outcome {
    let mut worst = 0.0f64;
    for (fi, family) in [Family::GammaDelta, Family::GammaJ].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 40 + fi as u64);
        for i in 0..DET_SPECS {
            let n = 2 + i % 7;
            let s = random_elliptic_spec(&mut rng, family, n, RANDOM_MAX_COND).map_err(|e| e.to_string())?;
            let d = fix_locus(&s).map_err(|e| e.to_string())?;
            let target = determinant(s.m()).abs();
            for seed in 0..RANDOM_SAMPLES {
                let p = sample_point(&d, seed, 0.5);
                worst = worst.max((p.det() - target).abs() / target);
            }
        }
    }
    ensure(worst <= DET_TOL, || format!("worst relative det error {worst:e}"))?;
    Ok(format!("{} points, worst relative error {worst:.1e}", 2 * DET_SPECS * RANDOM_SAMPLES as usize))
}

fn splitting_isometries() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 50);
    let mut worst_py = 0.0f64;
    for i in 0..SPLIT_PAIRS {
        let n = 2 + i % 5;
        let (p, q) = (random_spd(&mut rng, n, 1.0), random_spd(&mut rng, n, 1.0));
        let ((pu, pc), (qu, qc)) = (sl_split(&p), sl_split(&q));
        let lhs = distance(&p, &q).unwrap().powi(2);
        let rhs = distance(&pu, &qu).unwrap().powi(2) + (pc - qc).powi(2);
        worst_py = worst_py.max((lhs - rhs).abs() / lhs.max(1.0));
    }
    ensure(worst_py <= SPLIT_TOL, || format!("sl_split Pythagorean error {worst_py:e}"))?;

    let mut worst_rt = 0.0f64;
    let mut points = 0;
    while points < SPLITTING_POINTS {
        let n = 2 + points % 7;
        let s = random_elliptic_spec(&mut rng, Family::GammaDelta, n, RANDOM_MAX_COND).map_err(|e| e.to_string())?;
        let d = fix_locus(&s).map_err(|e| e.to_string())?;
        for seed in 0..5 {
            let p = sample_point(&d, seed, 0.5);
            let c = delta_splitting_coords(&d, &p).map_err(|e| e.to_string())?;
            let back = delta_splitting_inverse(&d, &c).map_err(|e| e.to_string())?;
            worst_rt = worst_rt.max((back.matrix() - p.matrix()).norm() / p.matrix().norm());
            points += 1;
        }
    }
    ensure(worst_rt <= SPLITTING_TOL, || format!("splitting round-trip error {worst_rt:e}"))?;
    Ok(format!("Pythagorean {worst_py:.1e} on {SPLIT_PAIRS} pairs, round trip {worst_rt:.1e} on {points} points"))
}

fn matrix_json(m: &RealMatrix, use_j: bool, use_delta: bool) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| format!("[{}]", r.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(", ")))
        .collect();
    format!(r#"{{"n": {}, "data": [{}], "use_j": {use_j}, "use_delta": {use_delta}}}"#, m.nrows(), rows.join(", "))
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_spdfix");
    let dir = std::env::temp_dir().join(format!("spdfix-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 60);
    let mut checked = 0;
    for &family in &FAMILIES {
        let n = rng.random_range(3..7);
        let s = random_elliptic_spec(&mut rng, family, n, RANDOM_MAX_COND).map_err(|e| e.to_string())?;
        let input = dir.join(format!("{family:?}.json"));
        std::fs::write(&input, matrix_json(s.m(), family.uses_j(), family.uses_delta())).map_err(|e| e.to_string())?;
        let point = dir.join(format!("{family:?}.point.json"));
        let run = |extra: &[&Path]| {
            let mut c = Command::new(bin);
            c.args(["locus", "--seed", CLI_SEED, "--json"]).arg(&input);
            if let Some(p) = extra.first() {
                c.arg("--emit-point").arg(p);
            }
            c.output().expect("binary runs")
        };
        let (a, b) = (run(&[]), run(&[point.as_path()]));
        ensure(a.status.code() == Some(0), || format!("{family:?}: locus exit {:?}", a.status.code()))?;
        ensure(a.stdout == b.stdout, || format!("{family:?}: reports differ"))?;
        let v = Command::new(bin).arg("verify").arg(&input).arg(&point).output().expect("binary runs");
        ensure(v.status.code() == Some(0), || format!("{family:?}: verify exit {:?}", v.status.code()))?;
        checked += 1;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{checked} specs: byte-identical reports, locus -> verify exits 0"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("golden dimensions", golden_dimensions),
        ("special loci", special_loci),
        ("randomized generator/checker", randomized_generator_checker),
        ("canonical-form identities", canonical_identities),
        ("isometry contract", isometry_contract),
        ("totally geodesic property", totally_geodesic),
        ("determinant constraints", determinant_constraints),
        ("splitting isometries", splitting_isometries),
        ("CLI determinism", cli_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {detail}", i + 1)
            }
        }
    }
    let _ = panic::take_hook();
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

