//! The deleting-derivations tower, materialized inside the quantum torus.
//!
//! Row `t` of the table holds the images of `Y^{(r)}_{i,α}` for the `t`-th
//! step `r` of `E`. Row 0 is the torus generators themselves; each later
//! row is obtained from the previous one by undoing one deletion:
//!
//! ```text
//! Y^{(r⁺)}_{i,α} = Y^{(r)}_{i,α} + Y^{(r)}_{i,β} (Y^{(r)}_{j,β})^{-1} Y^{(r)}_{j,α}   if i < j and α < β
//! ```
//!
//! with `r = (j,β)`, and unchanged otherwise. The last row is the embedding
//! of `O_q(M_n)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::check::Check;
use crate::error::{QmatError, Result};
use crate::kernel::{AlgebraContext, GeneratorIndex, RationalFunction, StepIndex};
use crate::qmatrix::{b_minor, defining_relations, qdet, MatrixAlgebraElement};
use crate::qtorus::{delta_exponents, TorusElement};
use crate::terms::{add_term, fmt_terms, ElementJson, ExponentVector, TermMap};

/// Per-generator inclusive exponent bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentBox {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl ExponentBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(QmatError::InvalidSpec("box bounds of different lengths".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(QmatError::InvalidSpec("box lower bound exceeds upper bound".into()));
        }
        Ok(Self { lo, hi })
    }

    /// The same range `lo..=hi` for all `n^2` generators.
    pub fn uniform(n: usize, lo: i64, hi: i64) -> Result<Self> {
        Self::new(vec![lo; n * n], vec![hi; n * n])
    }

    /// `ℕ`-exponents of total degree at most `degree`, as a box.
    pub fn natural(n: usize, degree: i64) -> Self {
        Self { lo: vec![0; n * n], hi: vec![degree.max(0); n * n] }
    }

    /// The componentwise exponent hull of `x`, widened by `margin` on both
    /// sides. The zero element gets the box `[-margin, margin]`.
    pub fn around(x: &TorusElement, margin: i64) -> Self {
        let n2 = x.n() * x.n();
        let (lo, hi) = x.exponent_hull().unwrap_or((vec![0; n2], vec![0; n2]));
        Self {
            lo: lo.into_iter().map(|v| v - margin).collect(),
            hi: hi.into_iter().map(|v| v + margin).collect(),
        }
    }

    pub fn with_bound(mut self, g: GeneratorIndex, n: usize, lo: i64, hi: i64) -> Self {
        self.lo[g.flat(n)] = lo;
        self.hi[g.flat(n)] = hi;
        self
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn contains(&self, gamma: &ExponentVector) -> bool {
        gamma.len() == self.lo.len()
            && gamma
                .as_slice()
                .iter()
                .enumerate()
                .all(|(k, &e)| self.lo[k] <= e && e <= self.hi[k])
    }

    /// Number of lattice points, saturating.
    pub fn size(&self) -> u128 {
        self.lo
            .iter()
            .zip(&self.hi)
            .fold(1u128, |acc, (a, b)| acc.saturating_mul((b - a + 1) as u128))
    }
}

/// A linear combination of step monomials `Y^{(r)γ} = Y^{(r)γ_{1,1}}_{1,1} ⋯ Y^{(r)γ_{n,n}}_{n,n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepExpansion {
    step: StepIndex,
    n: usize,
    terms: TermMap,
}

impl StepExpansion {
    pub fn step(&self) -> StepIndex {
        self.step
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &RationalFunction)> {
        self.terms.iter()
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

    /// Reads a top-step expansion with `ℕ` exponents as an element of `O_q(M_n)`.
    pub fn to_matrix_element(&self) -> Result<MatrixAlgebraElement> {
        if self.step != StepIndex::top(self.n) {
            return Err(QmatError::InvalidSpec(format!("expansion is at step {}, not the top", self.step)));
        }
        MatrixAlgebraElement::from_terms(self.n, self.terms.clone())
            .map_err(|_| QmatError::NotInSpan("expansion uses inverted generators".into()))
    }
}

impl fmt::Display for StepExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(f, self.n, &self.terms, 'Y')
    }
}

impl Serialize for StepExpansion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            step: [usize; 2],
            #[serde(flatten)]
            body: &'a ElementJson,
        }
        let body = ElementJson::from_map(Some("step"), self.n, &self.terms);
        Out { step: [self.step.j, self.step.beta], body: &body }.serialize(s)
    }
}

/// Weight `Σ i·α·γ_{i,α}`; every table entry is `T_{i,α}` plus terms of
/// strictly smaller weight.
fn weight(n: usize, gamma: &ExponentVector) -> i64 {
    gamma.entries(n).map(|(g, e)| (g.row * g.col) as i64 * e).sum()
}

fn pow_checked(x: &TorusElement, k: i64, max_terms: usize) -> Result<TorusElement> {
    if k < 0 {
        return x.monomial_pow(k);
    }
    let mut acc = TorusElement::one(x.n());
    for _ in 0..k {
        acc = &acc * x;
        if acc.len() > max_terms {
            return Err(QmatError::ResourceLimit { what: "torus power".into(), limit: max_terms });
        }
    }
    Ok(acc)
}

/// The full table of step generators.
#[derive(Clone, Debug)]
pub struct Tower {
    ctx: AlgebraContext,
    table: Vec<Vec<TorusElement>>,
}

impl Tower {
    pub fn new(ctx: AlgebraContext) -> Result<Self> {
        let n = ctx.n();
        let steps = ctx.steps().to_vec();
        let mut table = Vec::with_capacity(steps.len());
        table.push(GeneratorIndex::all(n).map(|g| TorusElement::generator(n, g)).collect::<Vec<_>>());
        for pivot in &steps[..steps.len() - 1] {
            let prev = table.last().unwrap();
            let mut next = prev.clone();
            let (j, beta) = (pivot.j, pivot.beta);
            if j > 1 && beta > 1 {
                let pivot_inv = prev[GeneratorIndex::new(j, beta).flat(n)]
                    .invert_monomial()
                    .map_err(|_| QmatError::PivotNotMonomial(pivot.to_string()))?;
                for i in 1..j {
                    for alpha in 1..beta {
                        let g = GeneratorIndex::new(i, alpha).flat(n);
                        let left = &prev[GeneratorIndex::new(i, beta).flat(n)];
                        let right = &prev[GeneratorIndex::new(j, alpha).flat(n)];
                        next[g] = &prev[g] + &(&(left * &pivot_inv) * right);
                    }
                }
            }
            table.push(next);
        }
        Ok(Self { ctx, table })
    }

    pub fn context(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    /// All `n^2` entries at `step`, in generator order.
    pub fn step_entries(&self, step: StepIndex) -> Result<&[TorusElement]> {
        Ok(&self.table[self.ctx.step_position(step)?])
    }

    pub fn entry(&self, step: StepIndex, g: GeneratorIndex) -> Result<&TorusElement> {
        let n = self.n();
        let g = GeneratorIndex::checked(g.row, g.col, n)?;
        Ok(&self.step_entries(step)?[g.flat(n)])
    }

    /// Images of the `Y_{i,α}` in the torus.
    pub fn top(&self) -> &[TorusElement] {
        self.table.last().unwrap()
    }

    /// The homomorphism `O_q(M_n) → P(Λ)`.
    pub fn embed(&self, x: &MatrixAlgebraElement) -> Result<TorusElement> {
        let n = self.n();
        if x.n() != n {
            return Err(QmatError::DimensionMismatch { expected: n, found: x.n() });
        }
        let mut out = TorusElement::zero(n);
        for (exp, c) in x.terms() {
            let y = self.monomial_at(self.table.len() - 1, exp)?;
            out = &out + &y.scale(c);
            if out.len() > self.ctx.max_terms() {
                return Err(QmatError::ResourceLimit { what: "embedding".into(), limit: self.ctx.max_terms() });
            }
        }
        Ok(out)
    }

    /// `Y^{(r)γ}` as a torus element.
    pub fn step_monomial(&self, step: StepIndex, gamma: &ExponentVector) -> Result<TorusElement> {
        self.monomial_at(self.ctx.step_position(step)?, gamma)
    }

    fn monomial_at(&self, pos: usize, gamma: &ExponentVector) -> Result<TorusElement> {
        let n = self.n();
        if gamma.len() != n * n {
            return Err(QmatError::DimensionMismatch { expected: n * n, found: gamma.len() });
        }
        let mut acc = TorusElement::one(n);
        for (g, e) in gamma.entries(n) {
            let p = pow_checked(&self.table[pos][g.flat(n)], e, self.ctx.max_terms())?;
            acc = &acc * &p;
            if acc.len() > self.ctx.max_terms() {
                return Err(QmatError::ResourceLimit { what: "step monomial".into(), limit: self.ctx.max_terms() });
            }
        }
        Ok(acc)
    }

    /// Expresses `x` over the PBW monomials `Y^{(r)γ}` with `γ` inside `bx`
    /// (default: the exponent hull of `x` widened by one).
    ///
    /// Since each step monomial `Y^{(r)γ}` is a unit multiple of `T^γ` plus
    /// terms of smaller weight, the expansion is found by repeatedly
    /// cancelling the heaviest remaining term. A term whose exponent leaves
    /// the box, or needs the inverse of an entry that is not a single
    /// monomial, gives
    /// `NotInSpan`; this is inconclusive for a larger box.
    pub fn rebase_to_step(&self, step: StepIndex, x: &TorusElement, bx: Option<&ExponentBox>) -> Result<StepExpansion> {
        let n = self.n();
        if x.n() != n {
            return Err(QmatError::DimensionMismatch { expected: n, found: x.n() });
        }
        let pos = self.ctx.step_position(step)?;
        let bx = bx.cloned().unwrap_or_else(|| ExponentBox::around(x, 1));
        if bx.lo.len() != n * n {
            return Err(QmatError::DimensionMismatch { expected: n * n, found: bx.lo.len() });
        }
        let invertible: Vec<bool> = self.table[pos].iter().map(|e| e.single_term().is_some()).collect();
        let mut residual: BTreeMap<(i64, ExponentVector), RationalFunction> =
            x.terms().map(|(e, c)| ((weight(n, e), e.clone()), c.clone())).collect();
        let mut out = TermMap::new();
        let mut rounds = 0usize;
        while let Some(((_, gamma), c)) = residual.pop_last() {
            rounds += 1;
            if rounds > self.ctx.max_terms() {
                return Err(QmatError::ResourceLimit { what: "rebase".into(), limit: self.ctx.max_terms() });
            }
            let admissible = gamma.as_slice().iter().zip(&invertible).all(|(&e, &inv)| e >= 0 || inv);
            if !bx.contains(&gamma) || !admissible {
                return Err(QmatError::NotInSpan(format!(
                    "T^{:?} is not reached by step {step} monomials inside the box",
                    gamma.as_slice()
                )));
            }
            let y = self.monomial_at(pos, &gamma)?;
            let k = c.div(&y.coefficient(&gamma))?;
            for (e, d) in y.terms() {
                if *e == gamma {
                    continue;
                }
                let key = (weight(n, e), e.clone());
                let value = &residual.get(&key).cloned().unwrap_or_default() - &(&k * d);
                if value.is_zero() {
                    residual.remove(&key);
                } else {
                    residual.insert(key, value);
                }
            }
            add_term(&mut out, gamma, k);
        }
        Ok(StepExpansion { step, n, terms: out })
    }

    /// Every defining relation, checked among the embedded generators.
    pub fn verify_relations_preserved(&self) -> Vec<Check> {
        let n = self.n();
        defining_relations(n)
            .into_iter()
            .map(|rel| {
                let name = rel.label();
                let lhs = &self.top()[rel.later.flat(n)] * &self.top()[rel.earlier.flat(n)];
                match self.embed(&rel.rhs) {
                    Ok(rhs) => Check::equal(name, &lhs, &rhs),
                    Err(e) => Check::fail(name, e.to_string()),
                }
            })
            .collect()
    }

    /// The factorizations of `det_q`, `b_{n-1}` and `b_{n+1}` through the
    /// step `(2,3)` generators `Z`.
    pub fn verify_step_factorizations(&self) -> Vec<Check> {
        let n = self.n();
        let z = match self.step_entries(StepIndex::new(2, 3)) {
            Ok(z) => z,
            Err(e) => return vec![Check::fail("step (2,3) exists", e.to_string())],
        };
        let zg = |i: usize, a: usize| &z[GeneratorIndex::new(i, a).flat(n)];
        let product = |gens: Vec<(usize, usize)>| {
            gens.into_iter().fold(TorusElement::one(n), |acc, (i, a)| &acc * zg(i, a))
        };
        let mut checks = Vec::new();
        let head = &(zg(1, 1) * zg(2, 2)) - &(zg(1, 2) * zg(2, 1)).scale(&RationalFunction::q());
        let det = &head * &product((3..=n).map(|k| (k, k)).collect());
        checks.push(self.compare_embedded("det_q = (Z11*Z22 - q*Z12*Z21)*Z33*...*Znn", &qdet(n), &det));
        let upper = product((1..n).map(|k| (k, k + 1)).collect());
        checks.push(self.compare_embedded_minor("b_{n-1} = Z12*Z23*...*Z(n-1)n", n - 1, &upper));
        let lower = product((2..=n).map(|k| (k, k - 1)).collect());
        checks.push(self.compare_embedded_minor("b_{n+1} = Z21*Z32*...*Zn(n-1)", n + 1, &lower));
        checks
    }

    fn compare_embedded(&self, name: &str, x: &MatrixAlgebraElement, expected: &TorusElement) -> Check {
        match self.embed(x) {
            Ok(e) => Check::equal(name, &e, expected),
            Err(err) => Check::fail(name, err.to_string()),
        }
    }

    fn compare_embedded_minor(&self, name: &str, i: usize, expected: &TorusElement) -> Check {
        match b_minor(self.n(), i) {
            Ok(b) => self.compare_embedded(name, &b, expected),
            Err(err) => Check::fail(name, err.to_string()),
        }
    }

    /// The shape of the table: row 0 is the torus generators, every entry
    /// with `(i,α) ≥ (j,β)`, `i > 1`, `α > 1` is a single monomial `T_{i,α}`,
    /// and steps `(j,1)` and `(j,2)` coincide.
    pub fn verify_table_invariants(&self) -> Vec<Check> {
        let n = self.n();
        let mut checks = Vec::new();
        let first_ok = GeneratorIndex::all(n).all(|g| self.table[0][g.flat(n)] == TorusElement::generator(n, g));
        checks.push(if first_ok {
            Check::pass("Y^(1,2) = T")
        } else {
            Check::fail("Y^(1,2) = T", "some entry at step (1,2) is not its torus generator")
        });
        let mut bad = Vec::new();
        for (pos, step) in self.ctx.steps().iter().enumerate() {
            for g in GeneratorIndex::all(n) {
                if g.row > 1 && g.col > 1 && (g.row, g.col) >= (step.j, step.beta)
                    && self.table[pos][g.flat(n)] != TorusElement::generator(n, g)
                {
                    bad.push(format!("{g} at step {step}"));
                }
            }
        }
        checks.push(if bad.is_empty() {
            Check::pass("Y^(j,b)_(i,a) = T_(i,a) for (i,a) >= (j,b), i,a > 1")
        } else {
            Check::fail("Y^(j,b)_(i,a) = T_(i,a) for (i,a) >= (j,b), i,a > 1", bad.join(", "))
        });
        for j in 2..=n {
            let name = format!("Y^({j},1) = Y^({j},2)");
            let a = self.step_entries(StepIndex::new(j, 1));
            let b = self.step_entries(StepIndex::new(j, 2));
            checks.push(match (a, b) {
                (Ok(a), Ok(b)) if a == b => Check::pass(name),
                _ => Check::fail(name, "tables differ"),
            });
        }
        checks
    }

    /// Applies the deletion formula to each row and compares with the row
    /// below it.
    pub fn verify_forward_recursion(&self) -> Vec<Check> {
        let n = self.n();
        let steps = self.ctx.steps();
        (0..steps.len() - 1)
            .map(|t| {
                let pivot = steps[t];
                let name = format!("deletion at {pivot} recovers step {pivot} from step {}", steps[t + 1]);
                let upper = &self.table[t + 1];
                let inv = if pivot.j > 1 && pivot.beta > 1 {
                    match upper[GeneratorIndex::new(pivot.j, pivot.beta).flat(n)].invert_monomial() {
                        Ok(v) => Some(v),
                        Err(e) => return Check::fail(name, e.to_string()),
                    }
                } else {
                    None
                };
                for g in GeneratorIndex::all(n) {
                    let mut value = upper[g.flat(n)].clone();
                    if let Some(inv) = &inv {
                        if g.row < pivot.j && g.col < pivot.beta {
                            let left = &upper[GeneratorIndex::new(g.row, pivot.beta).flat(n)];
                            let right = &upper[GeneratorIndex::new(pivot.j, g.col).flat(n)];
                            value = &value - &(&(left * inv) * right);
                        }
                    }
                    if value != self.table[t][g.flat(n)] {
                        return Check::fail(name, format!("entry {g}: got {value}, expected {}", self.table[t][g.flat(n)]));
                    }
                }
                Check::pass(name)
            })
            .collect()
    }

    /// The monomial `embed(b_i)` is expected to be, for `i ∈ [1, 2n-1]`.
    pub fn expected_b_monomial(n: usize, i: usize) -> Result<TorusElement> {
        if i == 0 || i >= 2 * n {
            return Err(QmatError::IndexOutOfRange(format!("b_{i} with n={n}")));
        }
        let entries: Vec<(usize, usize, i64)> = if i <= n {
            (1..=i).map(|k| (k, n - i + k, 1)).collect()
        } else {
            (i - n + 1..=n).map(|k| (k, k + n - i, 1)).collect()
        };
        Ok(TorusElement::from_exponents(n, ExponentVector::from_entries(n, &entries)?))
    }

    /// `embed(b_i)` is the diagonal monomial `T_{1,n-i+1}⋯T_{i,n}` (or
    /// `T_{i-n+1,1}⋯T_{n,2n-i}`) for every `i ∈ [1, 2n-1]`.
    pub fn verify_minor_monomials(&self) -> Vec<Check> {
        let n = self.n();
        (1..2 * n)
            .map(|i| {
                let name = format!("embed(b_{i}) is a diagonal T-monomial");
                match (b_minor(n, i), Self::expected_b_monomial(n, i)) {
                    (Ok(b), Ok(expected)) => self.compare_embedded(&name, &b, &expected),
                    (Err(e), _) | (_, Err(e)) => Check::fail(name, e.to_string()),
                }
            })
            .collect()
    }

    /// `embed(b_i) · embed(b_{n+i})^{-1}` is a monomial with the exponents of `Δ_i`.
    pub fn verify_delta_monomials(&self) -> Vec<Check> {
        let n = self.n();
        (1..=n)
            .map(|i| {
                let name = format!("embed(b_{i}) * embed(b_{})^-1 has the exponents of Delta_{i}", n + i);
                let run = || -> Result<Option<String>> {
                    let num = self.embed(&b_minor(n, i)?)?;
                    let den = self.embed(&b_minor(n, n + i)?)?.invert_monomial()?;
                    let prod = &num * &den;
                    let expected = delta_exponents(n, i)?;
                    Ok(match prod.single_term() {
                        Some((e, _)) if *e == expected => None,
                        _ => Some(format!("got {prod}, expected exponents {:?}", expected.as_slice())),
                    })
                };
                match run() {
                    Ok(None) => Check::pass(name),
                    Ok(Some(w)) => Check::fail(name, w),
                    Err(e) => Check::fail(name, e.to_string()),
                }
            })
            .collect()
    }

    /// The table as `{"(j,β)": {"(i,α)": element, ...}, ...}`.
    pub fn to_json(&self) -> Value {
        let n = self.n();
        let mut out = Map::new();
        for (pos, step) in self.ctx.steps().iter().enumerate() {
            let mut row = Map::new();
            for g in GeneratorIndex::all(n) {
                let v = serde_json::to_value(&self.table[pos][g.flat(n)]).expect("torus elements serialize");
                row.insert(g.to_string(), v);
            }
            out.insert(step.to_string(), Value::Object(row));
        }
        Value::Object(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_passed;
    use crate::kernel::build_context;

    fn tower(n: usize) -> Tower {
        Tower::new(build_context(n).unwrap()).unwrap()
    }

    fn t(n: usize, entries: &[(usize, usize, i64)]) -> TorusElement {
        TorusElement::from_exponents(n, ExponentVector::from_entries(n, entries).unwrap())
    }

    fn y(n: usize, r: usize, c: usize) -> MatrixAlgebraElement {
        MatrixAlgebraElement::generator(n, GeneratorIndex::new(r, c))
    }

    #[test]
    fn n2_top_step() {
        let tw = tower(2);
        let z11 = &t(2, &[(1, 1, 1)]) + &t(2, &[(1, 2, 1), (2, 2, -1), (2, 1, 1)]).scale(&RationalFunction::q());
        // T12 T22^-1 T21 = q T12 T21 T22^-1 in normal order
        let direct = &t(2, &[(1, 1, 1)]) + &(&(&t(2, &[(1, 2, 1)]) * &t(2, &[(2, 2, -1)])) * &t(2, &[(2, 1, 1)]));
        assert_eq!(z11, direct);
        assert_eq!(tw.top()[0], direct);
        assert_eq!(tw.top()[1], t(2, &[(1, 2, 1)]));
        assert_eq!(tw.top()[2], t(2, &[(2, 1, 1)]));
        assert_eq!(tw.top()[3], t(2, &[(2, 2, 1)]));
    }

    #[test]
    fn n3_top_entry_for_11() {
        // contributions from pivots (2,2),(2,3),(3,2),(3,3) raise the term count
        let tw = tower(3);
        let e = tw.entry(StepIndex::top(3), GeneratorIndex::new(1, 1)).unwrap();
        assert!(e.len() > 2);
        assert_eq!(e.coefficient(&ExponentVector::unit(3, GeneratorIndex::new(1, 1))), RationalFunction::one());
        assert_eq!(
            tw.entry(StepIndex::new(2, 3), GeneratorIndex::new(1, 1)).unwrap(),
            &(&t(3, &[(1, 1, 1)]) + &(&(&t(3, &[(1, 2, 1)]) * &t(3, &[(2, 2, -1)])) * &t(3, &[(2, 1, 1)])))
        );
    }

    #[test]
    fn embed_examples() {
        let tw = tower(2);
        assert_eq!(tw.embed(&qdet(2)).unwrap(), t(2, &[(1, 1, 1), (2, 2, 1)]));
        assert_eq!(tw.embed(&y(2, 2, 2)).unwrap(), t(2, &[(2, 2, 1)]));
        assert_eq!(tw.embed(&b_minor(2, 3).unwrap()).unwrap(), t(2, &[(2, 1, 1)]));
        assert!(matches!(tw.embed(&y(3, 1, 1)), Err(QmatError::DimensionMismatch { .. })));
    }

    #[test]
    fn relations_preserved() {
        for n in 2..=3 {
            let checks = tower(n).verify_relations_preserved();
            assert_eq!(checks.len(), if n == 2 { 6 } else { 36 });
            assert!(all_passed(&checks), "{checks:?}");
        }
    }

    #[test]
    fn structural_checks() {
        for n in 2..=3 {
            let tw = tower(n);
            for checks in [
                tw.verify_step_factorizations(),
                tw.verify_table_invariants(),
                tw.verify_forward_recursion(),
                tw.verify_minor_monomials(),
                tw.verify_delta_monomials(),
            ] {
                assert!(all_passed(&checks), "n={n}: {checks:?}");
            }
        }
    }

    #[test]
    fn rebase_examples() {
        let n = 2;
        let tw = tower(n);
        let top = StepIndex::top(n);
        let x = tw.embed(&y(n, 1, 1)).unwrap();
        assert_eq!(tw.rebase_to_step(top, &x, None).unwrap().to_matrix_element().unwrap(), y(n, 1, 1));

        let t11 = t(n, &[(1, 1, 1)]);
        let bx = ExponentBox::uniform(n, 0, 1).unwrap().with_bound(GeneratorIndex::new(2, 2), n, -1, 1);
        let got = tw.rebase_to_step(top, &t11, Some(&bx)).unwrap();
        let mut expected = TermMap::new();
        add_term(&mut expected, ExponentVector::from_entries(n, &[(1, 1, 1)]).unwrap(), RationalFunction::one());
        add_term(
            &mut expected,
            ExponentVector::from_entries(n, &[(1, 2, 1), (2, 1, 1), (2, 2, -1)]).unwrap(),
            -&RationalFunction::q(),
        );
        assert_eq!(got, StepExpansion { step: top, n, terms: expected });

        let natural = ExponentBox::natural(n, 1);
        assert!(matches!(tw.rebase_to_step(top, &t11, Some(&natural)), Err(QmatError::NotInSpan(_))));
    }

    #[test]
    fn rebase_at_first_step_is_identity() {
        let n = 3;
        let tw = tower(n);
        let x = &t(n, &[(1, 1, 2), (3, 3, -1)]) + &t(n, &[(2, 1, 1)]).scale(&RationalFunction::q_pow(3));
        let got = tw.rebase_to_step(StepIndex::first(), &x, None).unwrap();
        let back: Vec<_> = got.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
        let orig: Vec<_> = x.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
        assert_eq!(back, orig);
    }

    #[test]
    fn table_json_keys() {
        let v = tower(2).to_json();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["(1,2)", "(2,1)", "(2,2)", "(2,3)"]);
        assert!(v["(2,3)"]["(1,1)"]["terms"].as_array().unwrap().len() == 2);
    }

    #[test]
    fn box_basics() {
        assert!(ExponentBox::new(vec![1], vec![0]).is_err());
        let b = ExponentBox::uniform(2, -1, 1).unwrap();
        assert_eq!(b.size(), 81);
        assert!(b.contains(&ExponentVector::from_vec(vec![1, -1, 0, 0])));
        assert!(!b.contains(&ExponentVector::from_vec(vec![2, 0, 0, 0])));
    }
}
