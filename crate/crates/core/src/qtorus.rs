//! The quantum torus `P(Λ)` on generators `T_{i,α}` and its subalgebras
//! spanned by restricted-sign monomials.
//!
//! Elements are stored in normal order: a term `(γ, c)` stands for
//! `c · T_{1,1}^{γ_{1,1}} T_{1,2}^{γ_{1,2}} ⋯ T_{n,n}^{γ_{n,n}}`. With
//! `e(γ, δ) = Σ_{a<b} γ_b δ_a B_{b,a}` one has
//! `T^γ · T^δ = q^{e(γ,δ)} T^{γ+δ}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QmatError, Result};
use crate::kernel::{commutation_entry, solve_integer_combination, GeneratorIndex, RationalFunction, StepIndex};
use crate::terms::{add_maps, add_term, fmt_terms, neg_map, scale_map, ElementJson, ExponentVector, TermMap};

/// The q-exponent picked up when normal-ordering `T^γ · T^δ`.
pub fn commutation_exponent(n: usize, gamma: &ExponentVector, delta: &ExponentVector) -> i64 {
    let (g, d) = (gamma.as_slice(), delta.as_slice());
    let mut e = 0i64;
    for i in 0..n {
        let row = i * n;
        for beta in 0..n {
            let gb = g[row + beta];
            if gb == 0 {
                continue;
            }
            // same row, moving T_{i,β} right past T_{i,α} for α < β
            for alpha in 0..beta {
                e -= gb * d[row + alpha];
            }
            // same column, moving T_{i,β} right past T_{k,β} for k < i
            for k in 0..i {
                e -= gb * d[k * n + beta];
            }
        }
    }
    e
}

/// `(B·γ)_a` for every generator `a`; `T^γ` is central iff this vanishes.
pub fn b_times(n: usize, gamma: &ExponentVector) -> Vec<i64> {
    GeneratorIndex::all(n)
        .map(|a| {
            gamma
                .entries(n)
                .map(|(b, e)| commutation_entry(a, b) * e)
                .sum()
        })
        .collect()
}

pub fn is_central_monomial(n: usize, gamma: &ExponentVector) -> bool {
    b_times(n, gamma).iter().all(|&x| x == 0)
}

/// Exponent vector of `Δ_i = T_{1,n-i+1} ⋯ T_{i,n} · T_{i+1,1}^{-1} ⋯ T_{n,n-i}^{-1}`.
pub fn delta_exponents(n: usize, i: usize) -> Result<ExponentVector> {
    if !(1..=n).contains(&i) {
        return Err(QmatError::IndexOutOfRange(format!("Delta index {i} outside [1,{n}]")));
    }
    let mut v = ExponentVector::zero(n).into_vec();
    for k in 1..=i {
        v[GeneratorIndex::new(k, n - i + k).flat(n)] += 1;
    }
    for m in 1..=n - i {
        v[GeneratorIndex::new(i + m, m).flat(n)] -= 1;
    }
    Ok(ExponentVector::from_vec(v))
}

/// Membership in the set 𝒵: all diagonals `γ_{k,k}` agree, and for each
/// `β ≥ 2` the wrapped diagonal starting at `(1,β)` is constant with the sign
/// flipped once it wraps into the first columns.
pub fn zset_conditions(n: usize, gamma: &ExponentVector) -> bool {
    let at = |r: usize, c: usize| gamma.at(n, GeneratorIndex::new(r, c));
    for beta in 1..=n {
        let head = at(1, beta);
        for k in 1..=n - beta {
            if at(1 + k, beta + k) != head {
                return false;
            }
        }
        for m in 1..beta {
            if -at(n - beta + 1 + m, m) != head {
                return false;
            }
        }
    }
    true
}

/// Which exponents each generator may carry in a monomial subalgebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubalgebraPattern {
    /// The quantum affine space `K_Λ[T_{1,1}, …, T_{n,n}]`: all exponents in ℕ.
    AffineSpace,
    /// `U_{(2,2)}`: negative exponents only where `row > 1` and `col > 1`.
    U22,
    /// `V_{(j,β)}` for `j = 1` or `β = 1` (with `(1,0)` giving the whole
    /// torus): first-row and first-column generators up to `(j,β)` stay in ℕ.
    V(StepIndex),
    /// The whole torus `P(Λ)`.
    Torus,
    /// The sign pattern of `U_{(j,β)}` on its own PBW generators
    /// `Y^{(j,β)}`: ℕ when `(i,α) < (j,β)` or `i = 1` or `α = 1`.
    StepAlgebra(StepIndex),
}

impl SubalgebraPattern {
    /// Whether generator `g` may carry negative exponents.
    pub fn allows_negative(self, g: GeneratorIndex) -> bool {
        let border = g.row == 1 || g.col == 1;
        match self {
            SubalgebraPattern::AffineSpace => false,
            SubalgebraPattern::U22 => !border,
            SubalgebraPattern::V(s) => !(border && (g.row, g.col) <= (s.j, s.beta)),
            SubalgebraPattern::Torus => true,
            SubalgebraPattern::StepAlgebra(s) => !(border || (g.row, g.col) < (s.j, s.beta)),
        }
    }

    pub fn admits(self, n: usize, gamma: &ExponentVector) -> bool {
        gamma
            .entries(n)
            .all(|(g, e)| e >= 0 || self.allows_negative(g))
    }
}

/// An element of the quantum torus in normal-ordered PBW form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusElement {
    n: usize,
    terms: TermMap,
}

impl TorusElement {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: TermMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(n, ExponentVector::zero(n), RationalFunction::one())
    }

    pub fn scalar(n: usize, c: RationalFunction) -> Self {
        Self::monomial(n, ExponentVector::zero(n), c)
    }

    pub fn monomial(n: usize, exp: ExponentVector, coeff: RationalFunction) -> Self {
        assert_eq!(exp.len(), n * n, "exponent vector length");
        let mut terms = TermMap::new();
        add_term(&mut terms, exp, coeff);
        Self { n, terms }
    }

    /// `T^γ` with coefficient 1.
    pub fn from_exponents(n: usize, exp: ExponentVector) -> Self {
        Self::monomial(n, exp, RationalFunction::one())
    }

    pub fn generator(n: usize, g: GeneratorIndex) -> Self {
        Self::from_exponents(n, ExponentVector::unit(n, g))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &ExponentVector) -> RationalFunction {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn single_term(&self) -> Option<(&ExponentVector, &RationalFunction)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        Self { n: self.n, terms: scale_map(&self.terms, c) }
    }

    /// Inverse of a single nonzero term.
    pub fn invert_monomial(&self) -> Result<Self> {
        let (exp, coeff) = self.single_term().ok_or(QmatError::NotAMonomial)?;
        // (c T^γ)(c' T^{-γ}) = c c' q^{e(γ,-γ)}, and e(γ,-γ) = -e(γ,γ)
        let e = commutation_exponent(self.n, exp, &exp.neg());
        let inv = coeff.inv()?.mul_q_pow(-e);
        Ok(Self::monomial(self.n, exp.neg(), inv))
    }

    /// Integer power of a single term.
    pub fn monomial_pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.invert_monomial()? } else { self.clone() };
        let mut acc = Self::one(self.n);
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Restricts to the terms whose monomial passes `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&ExponentVector) -> bool) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Central iff every monomial is central.
    pub fn is_central(&self) -> bool {
        self.terms.keys().all(|e| is_central_monomial(self.n, e))
    }

    /// Brute-force centrality: commutes with every `T_{i,α}` and its inverse.
    pub fn commutes_with_all_generators(&self) -> bool {
        GeneratorIndex::all(self.n).all(|g| {
            let t = Self::generator(self.n, g);
            let ti = t.invert_monomial().unwrap();
            self * &t == &t * self && self * &ti == &ti * self
        })
    }

    pub fn in_subalgebra(&self, pattern: SubalgebraPattern) -> bool {
        self.terms.keys().all(|e| pattern.admits(self.n, e))
    }

    /// `x·y - y·x`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Componentwise `[min, max]` over all monomials.
    pub fn exponent_hull(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let mut it = self.terms.keys();
        let first = it.next()?.as_slice().to_vec();
        let (mut lo, mut hi) = (first.clone(), first);
        for e in it {
            for (k, &x) in e.as_slice().iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        Some((lo, hi))
    }
}

fn check_same_n(a: usize, b: usize) {
    assert_eq!(a, b, "mixing elements of different dimensions");
}

impl Add for &TorusElement {
    type Output = TorusElement;
    fn add(self, rhs: &TorusElement) -> TorusElement {
        check_same_n(self.n, rhs.n);
        TorusElement { n: self.n, terms: add_maps(&self.terms, &rhs.terms) }
    }
}

impl Sub for &TorusElement {
    type Output = TorusElement;
    fn sub(self, rhs: &TorusElement) -> TorusElement {
        self + &(-rhs)
    }
}

impl Neg for &TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        TorusElement { n: self.n, terms: neg_map(&self.terms) }
    }
}

impl Mul for &TorusElement {
    type Output = TorusElement;
    fn mul(self, rhs: &TorusElement) -> TorusElement {
        torus_mul(self, rhs)
    }
}

/// Normal-ordered product in `P(Λ)`.
pub fn torus_mul(x: &TorusElement, y: &TorusElement) -> TorusElement {
    check_same_n(x.n, y.n);
    let n = x.n;
    let mut terms = TermMap::new();
    for (gx, cx) in &x.terms {
        for (gy, cy) in &y.terms {
            let e = commutation_exponent(n, gx, gy);
            add_term(&mut terms, gx.add(gy), (cx * cy).mul_q_pow(e));
        }
    }
    TorusElement { n, terms }
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(f, self.n, &self.terms, 'T')
    }
}

impl Serialize for TorusElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementJson::from_map(None, self.n, &self.terms).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorusElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw = ElementJson::deserialize(d)?;
        if let Some(alg) = &raw.alg {
            if alg != "torus" {
                return Err(D::Error::custom(format!("expected a torus element, found alg {alg:?}")));
            }
        }
        let (n, terms) = raw.into_map().map_err(D::Error::custom)?;
        Ok(TorusElement { n, terms })
    }
}

/// A Laurent polynomial in `Δ_1, …, Δ_n`: keys are exponent tuples `k`, and
/// the key `k` stands for the normal-ordered product `Δ_1^{k_1} ⋯ Δ_n^{k_n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaLaurent {
    pub n: usize,
    pub terms: BTreeMap<Vec<i64>, RationalFunction>,
}

/// `Δ_1^{k_1} ⋯ Δ_n^{k_n}` as a torus element.
pub fn delta_monomial(n: usize, k: &[i64]) -> Result<TorusElement> {
    let mut acc = TorusElement::one(n);
    for (i, &ki) in k.iter().enumerate() {
        let d = TorusElement::from_exponents(n, delta_exponents(n, i + 1)?);
        acc = &acc * &d.monomial_pow(ki)?;
    }
    Ok(acc)
}

impl DeltaLaurent {
    pub fn to_torus(&self) -> Result<TorusElement> {
        let mut out = TorusElement::zero(self.n);
        for (k, c) in &self.terms {
            out = &out + &delta_monomial(self.n, k)?.scale(c);
        }
        Ok(out)
    }
}

/// Rewrites a central torus element in the basis of `Δ`-monomials.
pub fn central_to_delta_basis(x: &TorusElement) -> Result<DeltaLaurent> {
    let n = x.n;
    let basis: Vec<Vec<i64>> = (1..=n)
        .map(|i| delta_exponents(n, i).map(ExponentVector::into_vec))
        .collect::<Result<_>>()?;
    let mut terms = BTreeMap::new();
    for (exp, coeff) in &x.terms {
        if !is_central_monomial(n, exp) {
            return Err(QmatError::NotCentral(format!("{:?}", exp.as_slice())));
        }
        let k = solve_integer_combination(&basis, exp.as_slice())
            .ok_or_else(|| QmatError::NotInLattice(format!("{:?}", exp.as_slice())))?;
        let unit = delta_monomial(n, &k)?;
        let (_, lead) = unit.single_term().expect("Delta monomial is a single term");
        terms.insert(k, coeff.div(lead)?);
    }
    Ok(DeltaLaurent { n, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::build_context;

    fn ev(n: usize, entries: &[(usize, usize, i64)]) -> ExponentVector {
        ExponentVector::from_entries(n, entries).unwrap()
    }

    fn t(n: usize, entries: &[(usize, usize, i64)]) -> TorusElement {
        TorusElement::from_exponents(n, ev(n, entries))
    }

    /// Straight from the definition with the full `B` matrix.
    fn exponent_oracle(b: &[Vec<i64>], g: &ExponentVector, d: &ExponentVector) -> i64 {
        let mut e = 0;
        for a in 0..g.len() {
            for bb in a + 1..g.len() {
                e += g.get(bb) * d.get(a) * b[bb][a];
            }
        }
        e
    }

    #[test]
    fn commutation_exponent_examples() {
        assert_eq!(commutation_exponent(2, &ev(2, &[(1, 2, 1)]), &ev(2, &[(1, 1, 1)])), -1);
        assert_eq!(commutation_exponent(2, &ev(2, &[(2, 2, 1)]), &ev(2, &[(1, 1, 1)])), 0);
        assert_eq!(commutation_exponent(2, &ev(2, &[(2, 1, 1)]), &ev(2, &[(1, 1, 1)])), -1);
    }

    #[test]
    fn commutation_exponent_matches_b_matrix() {
        for n in 2..=4 {
            let ctx = build_context(n).unwrap();
            for a in 0..n * n {
                for b in 0..n * n {
                    let ga = ExponentVector::unit(n, GeneratorIndex::from_flat(a, n));
                    let gb = ExponentVector::unit(n, GeneratorIndex::from_flat(b, n)).scale(-2);
                    let sum = ga.add(&gb);
                    assert_eq!(
                        commutation_exponent(n, &sum, &ga),
                        exponent_oracle(ctx.b_matrix(), &sum, &ga)
                    );
                }
            }
        }
    }

    #[test]
    fn the_four_t_relations() {
        let n = 3;
        let q = |e| RationalFunction::q_pow(e);
        for a in GeneratorIndex::all(n) {
            for b in GeneratorIndex::all(n) {
                if a >= b {
                    continue;
                }
                // a <_s b; relations are stated as T_b T_a = λ T_a T_b
                let (ta, tb) = (TorusElement::generator(n, a), TorusElement::generator(n, b));
                let lam = if a.row == b.row || a.col == b.col { q(-1) } else { q(0) };
                assert_eq!(&tb * &ta, (&ta * &tb).scale(&lam), "{a} {b}");
            }
        }
    }

    #[test]
    fn torus_mul_examples() {
        let n = 2;
        let p = &t(n, &[(1, 2, 1)]) * &t(n, &[(1, 1, 1)]);
        assert_eq!(
            p,
            TorusElement::monomial(n, ev(n, &[(1, 1, 1), (1, 2, 1)]), RationalFunction::q_pow(-1))
        );
        let x = &t(n, &[(1, 1, 1)]) + &t(n, &[(2, 1, 2)]);
        assert_eq!(&x * &TorusElement::one(n), x);
        let lhs = &(&t(n, &[(2, 2, -1)]) * &t(n, &[(2, 1, 1)])) * &t(n, &[(2, 2, 1)]);
        assert_eq!(lhs, t(n, &[(2, 1, 1)]).scale(&RationalFunction::q()));
    }

    #[test]
    fn invert_monomial_examples() {
        let n = 2;
        assert_eq!(t(n, &[(2, 2, 1)]).invert_monomial().unwrap(), t(n, &[(2, 2, -1)]));
        let x = TorusElement::monomial(n, ev(n, &[(1, 1, 1), (2, 2, 1)]), RationalFunction::q());
        let xi = x.invert_monomial().unwrap();
        assert_eq!(&x * &xi, TorusElement::one(n));
        assert_eq!(&xi * &x, TorusElement::one(n));
        assert_eq!(TorusElement::zero(n).invert_monomial(), Err(QmatError::NotAMonomial));
        let two = &t(n, &[(1, 1, 1)]) + &t(n, &[(1, 2, 1)]);
        assert_eq!(two.invert_monomial(), Err(QmatError::NotAMonomial));
    }

    #[test]
    fn centrality_examples() {
        assert!(is_central_monomial(2, &ev(2, &[(1, 1, 1), (2, 2, 1)])));
        assert!(!is_central_monomial(2, &ev(2, &[(1, 1, 1)])));
        assert!(is_central_monomial(2, &ExponentVector::zero(2)));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_exponents(2, 1).unwrap(), ev(2, &[(1, 2, 1), (2, 1, -1)]));
        assert_eq!(delta_exponents(2, 2).unwrap(), ev(2, &[(1, 1, 1), (2, 2, 1)]));
        assert!(delta_exponents(2, 0).is_err());
        assert!(delta_exponents(2, 3).is_err());
        for n in 2..=5 {
            for i in 1..=n {
                let d = delta_exponents(n, i).unwrap();
                assert!(is_central_monomial(n, &d));
                assert!(zset_conditions(n, &d));
                assert!(TorusElement::from_exponents(n, d).commutes_with_all_generators());
            }
        }
    }

    #[test]
    fn delta_lattice_equals_kernel_of_b() {
        for n in 2..=4 {
            let ctx = build_context(n).unwrap();
            let deltas: Vec<Vec<i64>> = (1..=n).map(|i| delta_exponents(n, i).unwrap().into_vec()).collect();
            assert_eq!(crate::kernel::hermite_normal_form(&deltas), ctx.kernel_basis());
        }
    }

    #[test]
    fn central_to_delta_basis_examples() {
        let n = 2;
        let d2 = t(n, &[(1, 1, 1), (2, 2, 1)]);
        let out = central_to_delta_basis(&d2).unwrap();
        assert_eq!(out.terms, BTreeMap::from([(vec![0, 1], RationalFunction::one())]));
        let one = central_to_delta_basis(&TorusElement::one(n)).unwrap();
        assert_eq!(one.terms, BTreeMap::from([(vec![0, 0], RationalFunction::one())]));
        // Δ1·Δ2 as a single normal-ordered monomial; coefficient fixed by e(δ1, δ2)
        let g = delta_exponents(n, 1).unwrap().add(&delta_exponents(n, 2).unwrap());
        let c = commutation_exponent(n, &delta_exponents(n, 1).unwrap(), &delta_exponents(n, 2).unwrap());
        let out = central_to_delta_basis(&TorusElement::from_exponents(n, g)).unwrap();
        assert_eq!(out.terms, BTreeMap::from([(vec![1, 1], RationalFunction::q_pow(-c))]));
        assert!(matches!(
            central_to_delta_basis(&t(n, &[(1, 1, 1)])),
            Err(QmatError::NotCentral(_))
        ));
    }

    #[test]
    fn central_round_trip() {
        let n = 3;
        let x = &(&delta_monomial(n, &[1, -2, 1]).unwrap().scale(&RationalFunction::q_power_minus(2, 0))
            + &delta_monomial(n, &[0, 0, 3]).unwrap())
            + &TorusElement::scalar(n, RationalFunction::from_int(5));
        let d = central_to_delta_basis(&x).unwrap();
        assert_eq!(d.to_torus().unwrap(), x);
        assert_eq!(d.terms.len(), 3);
    }

    #[test]
    fn subalgebra_patterns() {
        let n = 2;
        assert!(t(n, &[(1, 1, 1), (2, 2, -1)]).in_subalgebra(SubalgebraPattern::U22));
        assert!(!t(n, &[(1, 1, -1)]).in_subalgebra(SubalgebraPattern::U22));
        assert!(t(n, &[(1, 1, -1), (2, 1, -3)]).in_subalgebra(SubalgebraPattern::Torus));
        assert!(!t(n, &[(2, 2, -1)]).in_subalgebra(SubalgebraPattern::AffineSpace));
        // V_{(n,1)} = U_{(2,2)}; V_{(1,0)} = P(Λ)
        let n = 3;
        for g in GeneratorIndex::all(n) {
            assert_eq!(
                SubalgebraPattern::V(StepIndex::new(n, 1)).allows_negative(g),
                SubalgebraPattern::U22.allows_negative(g)
            );
            assert!(SubalgebraPattern::V(StepIndex::new(1, 0)).allows_negative(g));
        }
        // V_{(1,2)}: T11, T12 stay in ℕ, T13 and the first column may be inverted
        let v12 = SubalgebraPattern::V(StepIndex::new(1, 2));
        assert!(!v12.allows_negative(GeneratorIndex::new(1, 2)));
        assert!(v12.allows_negative(GeneratorIndex::new(1, 3)));
        assert!(v12.allows_negative(GeneratorIndex::new(2, 1)));
        // U_{(2,2)} on the step generators is the same pattern as on the Ts
        for g in GeneratorIndex::all(n) {
            assert_eq!(
                SubalgebraPattern::StepAlgebra(StepIndex::new(2, 2)).allows_negative(g),
                SubalgebraPattern::U22.allows_negative(g)
            );
            assert!(!SubalgebraPattern::StepAlgebra(StepIndex::top(n)).allows_negative(g));
        }
    }

    #[test]
    fn zset_small_examples() {
        assert!(!zset_conditions(2, &ev(2, &[(1, 1, 1)])));
        assert!(zset_conditions(3, &ExponentVector::zero(3)));
    }

    #[test]
    fn json_schema() {
        let n = 2;
        let x = TorusElement::monomial(n, ev(n, &[(1, 1, 1), (1, 2, -1)]), RationalFunction::q_pow(-1));
        let v = serde_json::to_value(&x).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"n": 2, "terms": [{"exp": [[1,1,1],[1,2,-1]], "coeff": {"num": [1], "den": [0,1]}}]})
        );
        let back: TorusElement = serde_json::from_value(v).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<TorusElement>(r#"{"n":2,"terms":[{"exp":[[3,1,1]],"coeff":{"num":[1],"den":[1]}}]}"#).is_err());
    }
}
