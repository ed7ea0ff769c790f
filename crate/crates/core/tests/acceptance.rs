//! Acceptance gate: one PASS/FAIL line per criterion, exit status 1 on any
//! failure. Every check is an exact equality.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use qmat_core::check::all_passed;
use qmat_core::derivations::{
    annihilates_qdet, basis_derivation, check_derivation, check_z_condition, decompose_torus_derivation,
    diagonal_derivation, express_hh1, sl_basis_derivation, sl_mu_constraint, DeltaPoly, HH1Coordinates,
    TorusDecomposition,
};
use qmat_core::kernel::{hermite_normal_form, DEFAULT_MAX_TERMS};
use qmat_core::qmatrix::sigma_automorphism;
use qmat_core::qtorus::{b_times, delta_exponents, is_central_monomial, zset_conditions, SubalgebraPattern};
use qmat_core::{build_context, qdet, ExponentVector, RationalFunction, TorusElement, Tower};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const LIMIT: usize = DEFAULT_MAX_TERMS;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn tower(n: usize) -> Tower {
    Tower::new(build_context(n).unwrap()).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Calls `f` on every vector of `[-bound, bound]^len`, in parallel over the
/// first two coordinates; returns the first error.
fn for_each_in_box(len: usize, bound: i64, f: impl Fn(&[i64]) -> Result<(), String> + Sync) -> Result<(), String> {
    let width = 2 * bound + 1;
    (0..width * width).into_par_iter().try_for_each(|prefix| {
        let mut v = vec![-bound; len];
        v[0] = prefix / width - bound;
        v[1] = prefix % width - bound;
        loop {
            f(&v)?;
            let mut k = len - 1;
            loop {
                if k < 2 {
                    return Ok(());
                }
                if v[k] < bound {
                    v[k] += 1;
                    break;
                }
                v[k] = -bound;
                k -= 1;
            }
        }
    })
}

fn criterion_1() -> Outcome {
    for (n, expected) in [(2, 6), (3, 36)] {
        let checks = tower(n).verify_relations_preserved();
        ensure(checks.len() == expected, || format!("n={n}: {} relations, expected {expected}", checks.len()))?;
        if let Some(bad) = checks.iter().find(|c| !c.passed) {
            return Err(format!("n={n}: {} ({})", bad.name, bad.witness.clone().unwrap_or_default()));
        }
    }
    Ok("6 identities at n=2, 36 at n=3".into())
}

fn criterion_2() -> Outcome {
    for n in 2..=3 {
        let checks = tower(n).verify_minor_monomials();
        ensure(checks.len() == 2 * n - 1, || format!("n={n}: wrong number of minors"))?;
        if let Some(bad) = checks.iter().find(|c| !c.passed) {
            return Err(format!("n={n}: {} ({})", bad.name, bad.witness.clone().unwrap_or_default()));
        }
    }
    Ok("embed(b_i) is the diagonal T-monomial for i in [1,2n-1], n=2,3".into())
}

fn criterion_3() -> Outcome {
    for n in 2..=4 {
        let ctx = build_context(n).unwrap();
        let kernel = ctx.kernel_basis();
        ensure(kernel.len() == n, || format!("n={n}: ker B has rank {}", kernel.len()))?;
        let deltas: Vec<Vec<i64>> = (1..=n).map(|i| delta_exponents(n, i).unwrap().into_vec()).collect();
        ensure(hermite_normal_form(&deltas) == kernel, || format!("n={n}: ker B differs from the Delta lattice"))?;
    }
    let mut counted = 0usize;
    for n in 2..=3 {
        for_each_in_box(n * n, 2, |v| {
            let gamma = ExponentVector::from_vec(v.to_vec());
            let in_kernel = b_times(n, &gamma).iter().all(|&x| x == 0);
            ensure(zset_conditions(n, &gamma) == in_kernel, || format!("n={n}: disagreement at {v:?}"))
        })?;
        counted += 5usize.pow((n * n) as u32);
    }
    Ok(format!("ker B = Z-span of Delta exponents for n=2,3,4; z-set criterion matches B*g=0 on {counted} vectors"))
}

fn criterion_4() -> Outcome {
    let mut central_seen = 0usize;
    for n in 2..=3 {
        let diag = delta_exponents(n, n).unwrap();
        let found = std::sync::atomic::AtomicUsize::new(0);
        for_each_in_box(n * n, 3, |v| {
            let gamma = ExponentVector::from_vec(v.to_vec());
            if !SubalgebraPattern::U22.admits(n, &gamma) || !is_central_monomial(n, &gamma) {
                return Ok(());
            }
            found.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            let m = v[0];
            ensure(m >= 0 && gamma == diag.scale(m), || format!("n={n}: central {v:?} is not a power of Delta_n"))
        })?;
        central_seen += found.into_inner();
    }
    Ok(format!("{central_seen} central U(2,2)-pattern monomials on |g|<=3, all nonnegative powers of Delta_n"))
}

fn criterion_5() -> Outcome {
    for n in 2..=4 {
        for j in 1..2 * n {
            let checks = check_derivation(&basis_derivation(n, j).unwrap(), LIMIT);
            if let Some(bad) = checks.iter().find(|c| !c.passed) {
                return Err(format!("n={n}, D_{j}: {}", bad.name));
            }
        }
    }
    Ok("D_1..D_{2n-1} respect every relation for n=2,3,4".into())
}

fn criterion_6() -> Outcome {
    let n = 2;
    let mut passing = 0;
    for mask in 0u32..16 {
        let bits: Vec<i64> = (0..4).map(|k| i64::from(mask >> k & 1)).collect();
        let weights: Vec<RationalFunction> = bits.iter().map(|&b| RationalFunction::from_int(b)).collect();
        let z: Vec<TorusElement> = bits.iter().map(|&b| TorusElement::scalar(n, RationalFunction::from_int(b))).collect();
        let is_derivation = all_passed(&check_derivation(&diagonal_derivation(n, &weights).unwrap(), LIMIT));
        ensure(is_derivation == check_z_condition(n, &z), || format!("pattern {bits:?} disagrees"))?;
        passing += usize::from(is_derivation);
    }
    Ok(format!("16 patterns at n=2, {passing} derivations, all matching the z-condition"))
}

fn unit_mu(n: usize, j: usize) -> Vec<DeltaPoly> {
    (1..2 * n)
        .map(|i| if i == j { DeltaPoly::constant(RationalFunction::one()) } else { DeltaPoly::zero() })
        .collect()
}

fn criterion_7() -> Outcome {
    const SAMPLES: u64 = 100;
    for n in 2..=3 {
        let tw = tower(n);
        for j in 1..2 * n {
            let c = express_hh1(&basis_derivation(n, j).unwrap(), &tw, None).map_err(|e| format!("n={n}, D_{j}: {e}"))?;
            ensure(c.inner.is_zero() && c.mu == unit_mu(n, j), || format!("n={n}, D_{j}: got mu {:?}", c.mu))?;
        }
        (0..SAMPLES).into_par_iter().try_for_each(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * n as u64 + seed);
            let built = HH1Coordinates {
                inner: random_matrix_element(&mut rng, n, 2, 3),
                mu: (1..2 * n).map(|_| random_delta_poly(&mut rng, 1)).collect(),
            };
            let d = built.recombine(LIMIT).map_err(|e| e.to_string())?;
            let got = express_hh1(&d, &tw, None).map_err(|e| format!("n={n}, sample {seed}: {e}"))?;
            ensure(got.mu == built.mu, || format!("n={n}, sample {seed}: mu differs"))?;
            let residual = d.sub(&got.recombine(LIMIT).map_err(|e| e.to_string())?);
            ensure(residual.is_zero(), || format!("n={n}, sample {seed}: nonzero residual"))
        })?;
    }
    Ok(format!("unit coordinates for every D_j and {SAMPLES} random derivations recovered exactly at n=2 and n=3"))
}

fn criterion_8() -> Outcome {
    const SAMPLES: u64 = 200;
    for n in 2..=3 {
        (0..SAMPLES).into_par_iter().try_for_each(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(5000 * n as u64 + seed);
            let expected = TorusDecomposition {
                x: random_noncentral_torus_element(&mut rng, n, 1, 3),
                z: (0..n * n).map(|_| random_central_torus_element(&mut rng, n)).collect(),
            };
            let d = expected.reconstruct(LIMIT).map_err(|e| e.to_string())?;
            let got = decompose_torus_derivation(&d).map_err(|e| format!("n={n}, sample {seed}: {e}"))?;
            ensure(got == expected, || format!("n={n}, sample {seed}: decomposition differs"))
        })?;
    }
    Ok(format!("{SAMPLES} (x, z) pairs recovered exactly at n=2 and n=3"))
}

fn sl_indices(n: usize) -> Vec<usize> {
    if n == 2 {
        vec![1, 2]
    } else {
        (1..2 * n).filter(|&i| i != n).collect()
    }
}

fn criterion_9() -> Outcome {
    for n in 2..=4 {
        let idx = sl_indices(n);
        ensure(idx.len() == 2 * n - 2, || format!("n={n}: wrong count"))?;
        for i in idx {
            let d = sl_basis_derivation(n, i).map_err(|e| e.to_string())?;
            ensure(annihilates_qdet(&d, LIMIT).map_err(|e| e.to_string())?, || format!("n={n}, i={i}: d(det_q) != 0"))?;
        }
    }
    let n = 3;
    let tw = tower(n);
    for i in sl_indices(n) {
        let c = express_hh1(&sl_basis_derivation(n, i).unwrap(), &tw, None).map_err(|e| e.to_string())?;
        ensure(sl_mu_constraint(n, &c.mu), || format!("n=3, i={i}: mu constraint fails"))?;
    }
    Ok("2n-2 SL derivations kill det_q for n=2,3,4; mu constraint holds at n=3".into())
}

fn criterion_10() -> Outcome {
    for n in 2..=4 {
        ensure(sigma_automorphism(&qdet(n)) == qdet(n), || format!("n={n}: sigma moves det_q"))?;
    }
    for n in 2..=3 {
        let mut rng = ChaCha8Rng::seed_from_u64(77 + n as u64);
        for k in 0..50 {
            let x = random_matrix_element(&mut rng, n, 2, 3);
            let y = random_matrix_element(&mut rng, n, 2, 3);
            let lhs = sigma_automorphism(&x.mul(&y, LIMIT).unwrap());
            let rhs = sigma_automorphism(&x).mul(&sigma_automorphism(&y), LIMIT).unwrap();
            ensure(lhs == rhs, || format!("n={n}, pair {k}: sigma(xy) != sigma(x)sigma(y)"))?;
        }
    }
    Ok("sigma fixes det_q for n=2,3,4 and is multiplicative on 50 pairs at n=2 and n=3".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("relations preserved through the tower", criterion_1),
        ("b_i embed as diagonal T-monomials", criterion_2),
        ("centre of the torus", criterion_3),
        ("central monomials in the U(2,2) pattern", criterion_4),
        ("basis derivations", criterion_5),
        ("diagonal derivations vs z-condition", criterion_6),
        ("HH^1 coordinates", criterion_7),
        ("torus decomposition round trip", criterion_8),
        ("SL derivations and mu constraint", criterion_9),
        ("sigma automorphism", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2}: {name}: {detail} [{ms} ms]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name}: {why} [{ms} ms]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
