//! The `verify-suite` command: every check at a fixed `n`, run in parallel and
//! reported in id order.

use std::fmt::Write as _;
use std::time::Instant;

use qmat_core::check::Check;
use qmat_core::derivations::{
    annihilates_qdet, basis_derivation, check_derivation, check_z_condition, decompose_torus_derivation,
    diagonal_derivation, express_hh1, gl_express, lift_to_torus, sl_basis_derivation, sl_mu_constraint, DeltaPoly,
    GlDerivation, HH1Coordinates, TorusDecomposition,
};
use qmat_core::kernel::{hermite_normal_form, MAX_SUITE_N};
use qmat_core::qmatrix::{commutes_with_all_generators, sigma_automorphism};
use qmat_core::qtorus::{b_times, delta_exponents, delta_monomial, is_central_monomial, zset_conditions, SubalgebraPattern};
use qmat_core::{
    build_context, qdet, ExponentVector, GeneratorIndex, MatrixAlgebraElement, MatrixDerivation, QmatError,
    RationalFunction, Result, StepIndex, TorusElement, Tower,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteCheck {
    pub id: String,
    pub anchor: &'static str,
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Wall time of the group the check belongs to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_ms: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub passed: bool,
    pub total: usize,
    pub failures: usize,
    pub checks: Vec<SuiteCheck>,
}

struct Env {
    n: usize,
    max_terms: usize,
    tower: Tower,
}

type GroupFn = fn(&Env) -> Result<Vec<Check>>;

struct Group {
    id: &'static str,
    anchor: &'static str,
    run: GroupFn,
}

const GROUPS: &[Group] = &[
    Group { id: "centre.lattice", anchor: "the centre of the quantum torus is the Laurent polynomial ring in Delta_1, ..., Delta_n", run: centre_lattice },
    Group { id: "centre.u22", anchor: "a central element of U_(2,2) is a polynomial in Delta_n", run: centre_u22 },
    Group { id: "centre.zset", anchor: "T^gamma is central iff its exponents satisfy the z-set conditions", run: centre_zset },
    Group { id: "derivations.basis", anchor: "D_1, ..., D_{2n-1} are derivations of O_q(M_n)", run: derivation_basis },
    Group { id: "derivations.decomposition", anchor: "every derivation of the quantum torus is ad_x plus a central diagonal derivation", run: decomposition },
    Group { id: "derivations.gl", anchor: "derivations of O_q(GL_n) have coordinates in K[Delta_n^{+-1}]", run: gl_coordinates },
    Group { id: "derivations.hh1-basis", anchor: "HH^1(O_q(M_n)) is a free Z(R)-module of rank 2n-1 with basis D_1, ..., D_{2n-1}", run: hh1_basis },
    Group { id: "derivations.hh1-inner", anchor: "an inner derivation has zero central coordinates", run: hh1_inner },
    Group { id: "derivations.hh1-random", anchor: "every derivation is ad_x + sum mu_j D_j with mu_j in K[Delta_n], uniquely", run: hh1_random },
    Group { id: "derivations.lift", anchor: "a derivation of R extends uniquely to its localisation, the quantum torus", run: lift },
    Group { id: "derivations.sl", anchor: "D_i + D_n/(n-2) (D_1 - D_3 and D_2 when n = 2) annihilates Delta_n and induces a derivation of O_q(SL_n)", run: sl_annihilation },
    Group { id: "derivations.sl-mu", anchor: "the SL coordinates satisfy sum_{j != n} mu_j = (n-2) mu_n", run: sl_mu },
    Group { id: "derivations.z-condition", anchor: "a diagonal derivation is well defined iff its weights satisfy the z-condition", run: z_condition },
    Group { id: "qmatrix.associativity", anchor: "the straightened product on the PBW basis is associative", run: associativity },
    Group { id: "qmatrix.qdet-central", anchor: "the quantum determinant is central", run: qdet_central },
    Group { id: "qmatrix.sigma", anchor: "sigma is an automorphism fixing the quantum determinant", run: sigma },
    Group { id: "tower.deltas", anchor: "Delta_i is the image of a product of b-minors", run: |e| Ok(e.tower.verify_delta_monomials()) },
    Group { id: "tower.factorizations", anchor: "the quantum minors factor through the tower as monomials in the pivots", run: |e| Ok(e.tower.verify_step_factorizations()) },
    Group { id: "tower.minors", anchor: "b_i maps to a monomial in the diagonal T's", run: |e| Ok(e.tower.verify_minor_monomials()) },
    Group { id: "tower.rebase", anchor: "rebasing inverts the embedding on the PBW basis", run: rebase },
    Group { id: "tower.recursion", anchor: "each row of the table is obtained from the next by the deleting-derivation formula", run: |e| Ok(e.tower.verify_forward_recursion()) },
    Group { id: "tower.relations", anchor: "the embedded generators satisfy every defining relation of O_q(M_n)", run: |e| Ok(e.tower.verify_relations_preserved()) },
    Group { id: "tower.table", anchor: "the bottom row of the table is the T generators and the top row is the Y generators", run: |e| Ok(e.tower.verify_table_invariants()) },
];

/// Runs every group at `n`. Refuses `n` above the suite cap.
pub fn run_suite(n: usize, max_terms: usize, timings: bool) -> Result<VerificationReport> {
    if n > MAX_SUITE_N {
        return Err(QmatError::ResourceLimit {
            what: format!("verify-suite at n={n} (suite scope is n <= {MAX_SUITE_N})"),
            limit: max_terms,
        });
    }
    let env = Env { n, max_terms, tower: Tower::new(build_context(n)?.with_max_terms(max_terms))? };
    let mut checks: Vec<SuiteCheck> = GROUPS
        .par_iter()
        .flat_map_iter(|group| {
            let start = Instant::now();
            let results = (group.run)(&env).unwrap_or_else(|e| vec![Check::fail(group.id, e.to_string())]);
            let ms = timings.then(|| start.elapsed().as_millis() as u64);
            let single = results.len() == 1;
            results.into_iter().enumerate().map(move |(k, c)| SuiteCheck {
                id: if single { group.id.to_owned() } else { format!("{}.{:02}", group.id, k + 1) },
                anchor: group.anchor,
                name: c.name,
                status: if c.passed { Status::Pass } else { Status::Fail },
                witness: c.witness,
                time_ms: ms,
            })
        })
        .collect();
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    let failures = checks.iter().filter(|c| c.status == Status::Fail).count();
    Ok(VerificationReport { n, passed: failures == 0, total: checks.len(), failures, checks })
}

pub fn to_markdown(report: &VerificationReport) -> String {
    let mut out = format!(
        "# verify-suite n={}\n\n{} checks, {} failed\n\n| id | check | status | anchor | witness |\n|---|---|---|---|---|\n",
        report.n, report.total, report.failures
    );
    for c in &report.checks {
        let status = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
        };
        let _ = writeln!(out, "| {} | {} | {status} | {} | {} |", c.id, c.name, c.anchor, c.witness.as_deref().unwrap_or(""));
    }
    out
}

fn rng(label: &str, n: usize) -> ChaCha8Rng {
    let seed = label.bytes().fold(n as u64, |h, b| h.wrapping_mul(31).wrapping_add(u64::from(b)));
    ChaCha8Rng::seed_from_u64(seed)
}

fn coeff(rng: &mut ChaCha8Rng) -> RationalFunction {
    match rng.gen_range(0..3) {
        0 => RationalFunction::from_int([-2, -1, 1, 2, 3][rng.gen_range(0..5)]),
        1 => RationalFunction::q_pow(rng.gen_range(-2..=2)),
        _ => &RationalFunction::one() + &RationalFunction::q_pow(1),
    }
}

fn random_matrix_element(rng: &mut ChaCha8Rng, n: usize, degree: usize, terms: usize) -> MatrixAlgebraElement {
    let mut out = MatrixAlgebraElement::zero(n);
    for _ in 0..rng.gen_range(1..=terms) {
        let mut v = vec![0i64; n * n];
        for _ in 0..rng.gen_range(0..=degree) {
            v[rng.gen_range(0..n * n)] += 1;
        }
        out = &out + &MatrixAlgebraElement::monomial(n, ExponentVector::from_vec(v), coeff(rng));
    }
    out
}

fn unit_mu(n: usize, j: usize, power: i64) -> Vec<DeltaPoly> {
    (1..2 * n)
        .map(|i| if i == j { DeltaPoly::monomial(power, RationalFunction::one()) } else { DeltaPoly::zero() })
        .collect()
}

fn sl_indices(n: usize) -> Vec<usize> {
    if n == 2 {
        vec![1, 2]
    } else {
        (1..2 * n).filter(|&i| i != n).collect()
    }
}

fn associativity(e: &Env) -> Result<Vec<Check>> {
    let mut rng = rng("associativity", e.n);
    let mut out = Vec::new();
    for k in 0..3 {
        let [x, y, z] = [0, 1, 2].map(|_| random_matrix_element(&mut rng, e.n, 2, 2));
        let lhs = x.mul(&y, e.max_terms)?.mul(&z, e.max_terms)?;
        let rhs = x.mul(&y.mul(&z, e.max_terms)?, e.max_terms)?;
        out.push(Check::equal(format!("(xy)z = x(yz), sample {}", k + 1), &lhs, &rhs));
    }
    Ok(out)
}

fn qdet_central(e: &Env) -> Result<Vec<Check>> {
    let ok = commutes_with_all_generators(&qdet(e.n), e.max_terms)?;
    Ok(vec![if ok { Check::pass("det_q Y = Y det_q") } else { Check::fail("det_q Y = Y det_q", "a generator fails to commute") }])
}

fn sigma(e: &Env) -> Result<Vec<Check>> {
    let det = qdet(e.n);
    let mut out = vec![Check::equal("sigma(det_q) = det_q", &sigma_automorphism(&det), &det)];
    let mut rng = rng("sigma", e.n);
    let mut bad = None;
    for k in 0..5 {
        let x = random_matrix_element(&mut rng, e.n, 2, 2);
        let y = random_matrix_element(&mut rng, e.n, 2, 2);
        let lhs = sigma_automorphism(&x.mul(&y, e.max_terms)?);
        let rhs = sigma_automorphism(&x).mul(&sigma_automorphism(&y), e.max_terms)?;
        if lhs != rhs && bad.is_none() {
            bad = Some(format!("pair {}: x = {x}, y = {y}", k + 1));
        }
    }
    out.push(match bad {
        None => Check::pass("sigma(xy) = sigma(x) sigma(y)"),
        Some(w) => Check::fail("sigma(xy) = sigma(x) sigma(y)", w),
    });
    Ok(out)
}

fn rebase(e: &Env) -> Result<Vec<Check>> {
    let mut rng = rng("rebase", e.n);
    let mut out = Vec::new();
    for k in 0..3 {
        let x = random_matrix_element(&mut rng, e.n, 2, 3);
        let back = e.tower.rebase_to_step(StepIndex::top(e.n), &e.tower.embed(&x)?, None)?.to_matrix_element()?;
        out.push(Check::equal(format!("rebase(embed(x)) = x, sample {}", k + 1), &back, &x));
    }
    Ok(out)
}

fn centre_lattice(e: &Env) -> Result<Vec<Check>> {
    let kernel = build_context(e.n)?.kernel_basis();
    let deltas: Vec<Vec<i64>> = (1..=e.n).map(|i| delta_exponents(e.n, i).map(ExponentVector::into_vec)).collect::<Result<_>>()?;
    let name = "ker B = Z Delta_1 + ... + Z Delta_n";
    Ok(vec![if kernel.len() == e.n && hermite_normal_form(&deltas) == kernel {
        Check::pass(name)
    } else {
        Check::fail(name, format!("HNF(ker B) = {kernel:?}"))
    }])
}

/// Exhaustive on a box for `n <= 3`, seeded samples otherwise.
fn centre_zset(e: &Env) -> Result<Vec<Check>> {
    let n = e.n;
    let len = n * n;
    let vectors: Vec<Vec<i64>> = if n <= 3 {
        let bound = if n == 2 { 2 } else { 1 };
        let width = (2 * bound + 1) as usize;
        (0..width.pow(len as u32))
            .map(|mut code| {
                (0..len)
                    .map(|_| {
                        let d = (code % width) as i64 - bound;
                        code /= width;
                        d
                    })
                    .collect()
            })
            .collect()
    } else {
        let mut rng = rng("zset", n);
        (0..20_000).map(|_| (0..len).map(|_| rng.gen_range(-2..=2)).collect()).collect()
    };
    let bad = vectors.par_iter().find_any(|v| {
        let gamma = ExponentVector::from_vec(v.to_vec());
        zset_conditions(n, &gamma) != b_times(n, &gamma).iter().all(|&x| x == 0)
    });
    let name = format!("z-set conditions <=> B gamma = 0 on {} vectors", vectors.len());
    Ok(vec![match bad {
        None => Check::pass(name),
        Some(v) => Check::fail(name, format!("{v:?}")),
    }])
}

/// Runs over central exponents `Σ k_i Δ_i` with `|k_i| <= 3`, which by
/// `centre.lattice` are all central monomials there.
fn centre_u22(e: &Env) -> Result<Vec<Check>> {
    let n = e.n;
    let deltas: Vec<ExponentVector> = (1..=n).map(|i| delta_exponents(n, i)).collect::<Result<_>>()?;
    let mut bad = None;
    let mut seen = 0;
    for code in 0..7usize.pow(n as u32) {
        let k: Vec<i64> = (0..n).map(|i| (code / 7usize.pow(i as u32) % 7) as i64 - 3).collect();
        let gamma = ExponentVector::from_vec(
            (0..n * n).map(|p| deltas.iter().zip(&k).map(|(d, &ki)| ki * d.as_slice()[p]).sum()).collect(),
        );
        debug_assert!(is_central_monomial(n, &gamma));
        if !SubalgebraPattern::U22.admits(n, &gamma) {
            continue;
        }
        seen += 1;
        let is_delta_power = k[n - 1] >= 0 && k[..n - 1].iter().all(|&x| x == 0);
        if !is_delta_power && bad.is_none() {
            bad = Some(format!("k = {k:?}"));
        }
    }
    let name = format!("{seen} central U(2,2) monomials are powers of Delta_n");
    Ok(vec![match bad {
        None => Check::pass(name),
        Some(w) => Check::fail(name, w),
    }])
}

fn derivation_basis(e: &Env) -> Result<Vec<Check>> {
    (1..2 * e.n)
        .map(|j| {
            let checks = check_derivation(&basis_derivation(e.n, j)?, e.max_terms);
            let name = format!("D_{j} respects every relation");
            Ok(match checks.into_iter().find(|c| !c.passed) {
                None => Check::pass(name),
                Some(c) => Check::fail(name, c.name),
            })
        })
        .collect()
}

/// All `{0,1}` weight patterns for `n <= 3`, seeded samples at `n = 4`.
fn z_condition(e: &Env) -> Result<Vec<Check>> {
    let n = e.n;
    let len = n * n;
    let masks: Vec<u64> = if n <= 3 {
        (0..1u64 << len).collect()
    } else {
        let mut rng = rng("z-condition", n);
        (0..128).map(|_| rng.gen_range(0..1u64 << len)).collect()
    };
    let outcomes: Vec<(u64, bool, bool)> = masks
        .par_iter()
        .map(|&mask| {
            let bits: Vec<i64> = (0..len).map(|k| (mask >> k & 1) as i64).collect();
            let weights: Vec<RationalFunction> = bits.iter().map(|&b| RationalFunction::from_int(b)).collect();
            let z: Vec<TorusElement> = weights.iter().map(|w| TorusElement::scalar(n, w.clone())).collect();
            let d = diagonal_derivation(n, &weights)?;
            let is_derivation = check_derivation(&d, e.max_terms).iter().all(|c| c.passed);
            Ok((mask, is_derivation, check_z_condition(n, &z)))
        })
        .collect::<Result<_>>()?;
    let good = outcomes.iter().filter(|o| o.1).count();
    let name = format!("Leibniz <=> z-condition on {} patterns ({good} derivations)", outcomes.len());
    Ok(vec![match outcomes.iter().find(|o| o.1 != o.2) {
        None => Check::pass(name),
        Some((mask, d, z)) => Check::fail(name, format!("mask {mask:#b}: derivation {d}, z-condition {z}")),
    }])
}

fn lift(e: &Env) -> Result<Vec<Check>> {
    let mut rng = rng("lift", e.n);
    let mut out = Vec::new();
    for j in 1..2 * e.n {
        let d = basis_derivation(e.n, j)?.add(&MatrixDerivation::ad(&random_matrix_element(&mut rng, e.n, 1, 2), e.max_terms)?);
        let lifted = lift_to_torus(&d, &e.tower)?;
        let x = random_matrix_element(&mut rng, e.n, 2, 2);
        let lhs = lifted.leibniz_extend(&e.tower.embed(&x)?)?;
        let rhs = e.tower.embed(&d.leibniz_extend(&x, e.max_terms)?)?;
        out.push(Check::equal(format!("lift(D_{j} + ad_y) commutes with embed"), &lhs, &rhs));
    }
    Ok(out)
}

fn decomposition(e: &Env) -> Result<Vec<Check>> {
    let n = e.n;
    let mut rng = rng("decomposition", n);
    let mut bad = None;
    let samples = 12;
    for k in 0..samples {
        let mut x = TorusElement::zero(n);
        for _ in 0..rng.gen_range(1..=3) {
            let v: Vec<i64> = (0..n * n).map(|_| rng.gen_range(-1..=1)).collect();
            x = &x + &TorusElement::monomial(n, ExponentVector::from_vec(v), coeff(&mut rng));
        }
        let x = x.filter_terms(|g| !is_central_monomial(n, g));
        let z = (0..n * n)
            .map(|_| {
                let k: Vec<i64> = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
                Ok(delta_monomial(n, &k)?.scale(&coeff(&mut rng)))
            })
            .collect::<Result<Vec<_>>>()?;
        let expected = TorusDecomposition { x, z };
        let got = decompose_torus_derivation(&expected.reconstruct(e.max_terms)?)?;
        if got != expected && bad.is_none() {
            bad = Some(format!("sample {}: x = {}", k + 1, expected.x));
        }
    }
    let name = format!("decompose(ad_x + theta_z) = (x, z) on {samples} samples");
    Ok(vec![match bad {
        None => Check::pass(name),
        Some(w) => Check::fail(name, w),
    }])
}

fn hh1_basis(e: &Env) -> Result<Vec<Check>> {
    (1..2 * e.n)
        .map(|j| {
            let c = express_hh1(&basis_derivation(e.n, j)?, &e.tower, None)?;
            let name = format!("hh1(D_{j}) = e_{j}");
            Ok(if c.inner.is_zero() && c.mu == unit_mu(e.n, j, 0) {
                Check::pass(name)
            } else {
                Check::fail(name, format!("inner {}, mu {:?}", c.inner, c.mu.iter().map(|m| m.to_string()).collect::<Vec<_>>()))
            })
        })
        .collect()
}

fn hh1_inner(e: &Env) -> Result<Vec<Check>> {
    let y12 = MatrixAlgebraElement::generator(e.n, GeneratorIndex::new(1, 2));
    let c = express_hh1(&MatrixDerivation::ad(&y12, e.max_terms)?, &e.tower, None)?;
    let name = "hh1(ad Y12) = (Y12, 0)";
    Ok(vec![if c.inner == y12 && c.mu.iter().all(DeltaPoly::is_zero) {
        Check::pass(name)
    } else {
        Check::fail(name, format!("inner {}", c.inner))
    }])
}

fn hh1_random(e: &Env) -> Result<Vec<Check>> {
    let n = e.n;
    let mut rng = rng("hh1-random", n);
    let mut out = Vec::new();
    for k in 0..4 {
        let built = HH1Coordinates {
            inner: random_matrix_element(&mut rng, n, if n <= 3 { 2 } else { 1 }, 2),
            mu: (1..2 * n)
                .map(|_| {
                    let mut m = DeltaPoly::zero();
                    for p in 0..=1 {
                        if rng.gen_bool(0.5) {
                            m = m.add(&DeltaPoly::monomial(p, coeff(&mut rng)));
                        }
                    }
                    m
                })
                .collect(),
        };
        let d = built.recombine(e.max_terms)?;
        let got = express_hh1(&d, &e.tower, None)?;
        let residual = d.sub(&got.recombine(e.max_terms)?);
        let name = format!("coordinates of ad_x + sum mu_j D_j recovered, sample {}", k + 1);
        out.push(if got.mu == built.mu && residual.is_zero() {
            Check::pass(name)
        } else {
            Check::fail(name, format!("x = {}", built.inner))
        });
    }
    Ok(out)
}

fn sl_annihilation(e: &Env) -> Result<Vec<Check>> {
    sl_indices(e.n)
        .into_iter()
        .map(|i| {
            let name = format!("SL derivation {i} kills det_q");
            Ok(if annihilates_qdet(&sl_basis_derivation(e.n, i)?, e.max_terms)? {
                Check::pass(name)
            } else {
                Check::fail(name, "d(det_q) != 0")
            })
        })
        .collect()
}

fn sl_mu(e: &Env) -> Result<Vec<Check>> {
    let mut bad = None;
    for i in sl_indices(e.n) {
        let c = express_hh1(&sl_basis_derivation(e.n, i)?, &e.tower, None)?;
        if !sl_mu_constraint(e.n, &c.mu) && bad.is_none() {
            bad = Some(format!("SL derivation {i}"));
        }
    }
    let name = "mu constraint for every SL derivation";
    Ok(vec![match bad {
        None => Check::pass(name),
        Some(w) => Check::fail(name, w),
    }])
}

fn gl_coordinates(e: &Env) -> Result<Vec<Check>> {
    (1..2 * e.n)
        .map(|j| {
            let d = GlDerivation::from_matrix(&basis_derivation(e.n, j)?, 1);
            let c = gl_express(&d, &e.tower, None)?;
            let name = format!("gl(Delta^-1 D_{j}) = Delta^-1 e_{j}");
            Ok(if c.inner.body.is_zero() && c.mu == unit_mu(e.n, j, -1) {
                Check::pass(name)
            } else {
                Check::fail(name, format!("mu {:?}", c.mu.iter().map(|m| m.to_string()).collect::<Vec<_>>()))
            })
        })
        .collect()
}
