#![allow(dead_code)]

use qmat_core::derivations::DeltaPoly;
use qmat_core::qtorus::{delta_monomial, is_central_monomial};
use qmat_core::{ExponentVector, MatrixAlgebraElement, RationalFunction, TorusElement};
use rand::Rng;

/// Small nonzero scalars: integers, powers of `q` and a few sums.
pub fn random_coeff<R: Rng>(rng: &mut R) -> RationalFunction {
    match rng.gen_range(0..4) {
        0 => RationalFunction::from_int([-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)]),
        1 => RationalFunction::q_pow(rng.gen_range(-2..=2)),
        2 => &RationalFunction::one() + &RationalFunction::q_pow(rng.gen_range(1..=2)),
        _ => RationalFunction::from_ratio(rng.gen_range(1..=3), rng.gen_range(1..=3)).unwrap(),
    }
}

/// A random element of `O_q(M_n)` with up to `terms` monomials of total
/// degree at most `degree`.
pub fn random_matrix_element<R: Rng>(rng: &mut R, n: usize, degree: usize, terms: usize) -> MatrixAlgebraElement {
    let mut out = MatrixAlgebraElement::zero(n);
    for _ in 0..rng.gen_range(1..=terms) {
        let d = rng.gen_range(0..=degree);
        let mut v = vec![0i64; n * n];
        for _ in 0..d {
            v[rng.gen_range(0..n * n)] += 1;
        }
        let m = MatrixAlgebraElement::monomial(n, ExponentVector::from_vec(v), random_coeff(rng));
        out = &out + &m;
    }
    out
}

/// A random torus element with exponents in `[-bound, bound]`.
pub fn random_torus_element<R: Rng>(rng: &mut R, n: usize, bound: i64, terms: usize) -> TorusElement {
    let mut out = TorusElement::zero(n);
    for _ in 0..rng.gen_range(1..=terms) {
        let v: Vec<i64> = (0..n * n).map(|_| rng.gen_range(-bound..=bound)).collect();
        out = &out + &TorusElement::monomial(n, ExponentVector::from_vec(v), random_coeff(rng));
    }
    out
}

/// A random torus element none of whose monomials is central.
pub fn random_noncentral_torus_element<R: Rng>(rng: &mut R, n: usize, bound: i64, terms: usize) -> TorusElement {
    random_torus_element(rng, n, bound, terms).filter_terms(|e| !is_central_monomial(n, e))
}

/// A random central torus element: a combination of `Δ`-monomials.
pub fn random_central_torus_element<R: Rng>(rng: &mut R, n: usize) -> TorusElement {
    let mut out = TorusElement::zero(n);
    for _ in 0..rng.gen_range(0..=2) {
        let k: Vec<i64> = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
        out = &out + &delta_monomial(n, &k).unwrap().scale(&random_coeff(rng));
    }
    out
}

/// A random polynomial in `Δ_n` of degree at most `degree`.
pub fn random_delta_poly<R: Rng>(rng: &mut R, degree: i64) -> DeltaPoly {
    let mut out = DeltaPoly::zero();
    for k in 0..=degree {
        if rng.gen_bool(0.6) {
            out = out.add(&DeltaPoly::monomial(k, random_coeff(rng)));
        }
    }
    out
}
