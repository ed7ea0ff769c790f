//! `O_q(M_n)`: PBW normal forms, straightening, quantum minors and the
//! scaling automorphism σ.
//!
//! For generators `Y_{i,α} <_s Y_{j,β}` the defining relations are
//!
//! ```text
//! Y_{i,β} Y_{i,α} = q^{-1} Y_{i,α} Y_{i,β}                           (α < β)
//! Y_{j,α} Y_{i,α} = q^{-1} Y_{i,α} Y_{j,α}                           (i < j)
//! Y_{j,β} Y_{i,α} = Y_{i,α} Y_{j,β}                                  (i < j, α > β)
//! Y_{j,β} Y_{i,α} = Y_{i,α} Y_{j,β} - (q - q^{-1}) Y_{i,β} Y_{j,α}   (i < j, α < β)
//! ```
//!
//! and elements are kept as sums of ordered monomials
//! `Y_{1,1}^{a_{1,1}} ⋯ Y_{n,n}^{a_{n,n}}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QmatError, Result};
use crate::kernel::{GeneratorIndex, RationalFunction, DEFAULT_MAX_TERMS};
use crate::terms::{add_maps, add_term, fmt_terms, neg_map, scale_map, ElementJson, ExponentVector, TermMap};

/// An element of `O_q(M_n)` in PBW normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixAlgebraElement {
    n: usize,
    terms: TermMap,
}

impl MatrixAlgebraElement {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: TermMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, RationalFunction::one())
    }

    pub fn scalar(n: usize, c: RationalFunction) -> Self {
        Self::monomial(n, ExponentVector::zero(n), c)
    }

    /// `c · Y^a`; panics on negative exponents.
    pub fn monomial(n: usize, exp: ExponentVector, coeff: RationalFunction) -> Self {
        assert_eq!(exp.len(), n * n, "exponent vector length");
        assert!(exp.is_nonnegative(), "negative exponent in O_q(M_n)");
        let mut terms = TermMap::new();
        add_term(&mut terms, exp, coeff);
        Self { n, terms }
    }

    pub fn generator(n: usize, g: GeneratorIndex) -> Self {
        Self::monomial(n, ExponentVector::unit(n, g), RationalFunction::one())
    }

    /// Builds from an arbitrary term map, rejecting negative exponents.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (ExponentVector, RationalFunction)>) -> Result<Self> {
        let mut map = TermMap::new();
        for (e, c) in terms {
            if e.len() != n * n {
                return Err(QmatError::DimensionMismatch { expected: n * n, found: e.len() });
            }
            if !e.is_nonnegative() {
                return Err(QmatError::InvalidSpec(format!(
                    "negative exponent {:?} in O_q(M_n)",
                    e.as_slice()
                )));
            }
            add_term(&mut map, e, c);
        }
        Ok(Self { n, terms: map })
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

    pub fn scale(&self, c: &RationalFunction) -> Self {
        Self { n: self.n, terms: scale_map(&self.terms, c) }
    }

    pub fn max_degree(&self) -> i64 {
        self.terms.keys().map(ExponentVector::total_degree).max().unwrap_or(0)
    }

    /// Product in normal form, failing once more than `max_terms` words are
    /// live at any point.
    pub fn mul(&self, rhs: &Self, max_terms: usize) -> Result<Self> {
        ymul_limited(self, rhs, max_terms)
    }

    pub fn pow(&self, k: u32, max_terms: usize) -> Result<Self> {
        let mut acc = Self::one(self.n);
        for _ in 0..k {
            acc = acc.mul(self, max_terms)?;
        }
        Ok(acc)
    }

    /// `x·y - y·x`.
    pub fn commutator(&self, other: &Self, max_terms: usize) -> Result<Self> {
        Ok(&self.mul(other, max_terms)? - &other.mul(self, max_terms)?)
    }
}

impl Add for &MatrixAlgebraElement {
    type Output = MatrixAlgebraElement;
    fn add(self, rhs: &MatrixAlgebraElement) -> MatrixAlgebraElement {
        assert_eq!(self.n, rhs.n, "mixing elements of different dimensions");
        MatrixAlgebraElement { n: self.n, terms: add_maps(&self.terms, &rhs.terms) }
    }
}

impl Sub for &MatrixAlgebraElement {
    type Output = MatrixAlgebraElement;
    fn sub(self, rhs: &MatrixAlgebraElement) -> MatrixAlgebraElement {
        self + &(-rhs)
    }
}

impl Neg for &MatrixAlgebraElement {
    type Output = MatrixAlgebraElement;
    fn neg(self) -> MatrixAlgebraElement {
        MatrixAlgebraElement { n: self.n, terms: neg_map(&self.terms) }
    }
}

impl fmt::Display for MatrixAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(f, self.n, &self.terms, 'Y')
    }
}

impl Serialize for MatrixAlgebraElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementJson::from_map(Some("Mq"), self.n, &self.terms).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixAlgebraElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw = ElementJson::deserialize(d)?;
        if let Some(alg) = &raw.alg {
            if alg != "Mq" {
                return Err(D::Error::custom(format!("expected an O_q(M_n) element, found alg {alg:?}")));
            }
        }
        let (n, terms) = raw.into_map().map_err(D::Error::custom)?;
        if let Some(bad) = terms.keys().find(|e| !e.is_nonnegative()) {
            return Err(D::Error::custom(format!("negative exponent {:?} in O_q(M_n)", bad.as_slice())));
        }
        Ok(MatrixAlgebraElement { n, terms })
    }
}

/// How to reorder an adjacent pair `Y_l Y_g` with `g <_s l`.
enum Rewrite {
    /// `Y_l Y_g = q^e Y_g Y_l`
    Skew(i64),
    /// `Y_l Y_g = Y_g Y_l - (q - q^{-1}) Y_a Y_b` with `a <_s b`
    Cross(u16, u16),
}

fn rewrite_rule(n: usize, l: usize, g: usize) -> Rewrite {
    let (lg, gg) = (GeneratorIndex::from_flat(l, n), GeneratorIndex::from_flat(g, n));
    debug_assert!(gg < lg);
    if gg.row == lg.row || gg.col == lg.col {
        Rewrite::Skew(-1)
    } else if gg.col > lg.col {
        Rewrite::Skew(0)
    } else {
        let a = GeneratorIndex::new(gg.row, lg.col).flat(n);
        let b = GeneratorIndex::new(lg.row, gg.col).flat(n);
        Rewrite::Cross(a as u16, b as u16)
    }
}

fn word_of(n: usize, exp: &ExponentVector) -> Vec<u16> {
    let mut w = Vec::with_capacity(exp.total_degree() as usize);
    for k in 0..n * n {
        for _ in 0..exp.get(k) {
            w.push(k as u16);
        }
    }
    w
}

fn exponents_of(n: usize, word: &[u16]) -> ExponentVector {
    let mut v = vec![0i64; n * n];
    for &k in word {
        v[k as usize] += 1;
    }
    ExponentVector::from_vec(v)
}

/// Brings a linear combination of words into PBW normal form.
///
/// Each word is sorted by swapping its leftmost out-of-order adjacent pair.
/// Skew swaps only accumulate a power of `q`; a cross swap additionally
/// queues the word with the pair replaced by `Y_{i,β} Y_{j,α}`, which is
/// strictly less misordered, so the process terminates.
fn straighten(n: usize, words: BTreeMap<Vec<u16>, RationalFunction>, max_terms: usize) -> Result<TermMap> {
    let mut pending = words;
    let mut out = TermMap::new();
    let cross = -&RationalFunction::q_power_minus(1, -1);
    while let Some((mut w, c)) = pending.pop_first() {
        let mut qexp = 0i64;
        let mut k = 0usize;
        while k + 1 < w.len() {
            if w[k] <= w[k + 1] {
                k += 1;
                continue;
            }
            match rewrite_rule(n, w[k] as usize, w[k + 1] as usize) {
                Rewrite::Skew(e) => qexp += e,
                Rewrite::Cross(a, b) => {
                    let mut branch = w.clone();
                    branch[k] = a;
                    branch[k + 1] = b;
                    let coeff = (&c * &cross).mul_q_pow(qexp);
                    let slot = pending.entry(branch).or_insert_with(RationalFunction::zero);
                    *slot = &*slot + &coeff;
                    if pending.len() > max_terms {
                        return Err(QmatError::ResourceLimit { what: "straightening worklist".into(), limit: max_terms });
                    }
                }
            }
            w.swap(k, k + 1);
            k = k.saturating_sub(1);
        }
        add_term(&mut out, exponents_of(n, &w), c.mul_q_pow(qexp));
        if out.len() > max_terms {
            return Err(QmatError::ResourceLimit { what: "product".into(), limit: max_terms });
        }
    }
    Ok(out)
}

/// Shape of the defining relation between two generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    SameRow,
    SameColumn,
    Commuting,
    Crossing,
}

/// One defining relation `Y_later Y_earlier = rhs`, with `rhs` in normal form.
#[derive(Clone, Debug)]
pub struct Relation {
    pub earlier: GeneratorIndex,
    pub later: GeneratorIndex,
    pub kind: RelationKind,
    pub rhs: MatrixAlgebraElement,
}

impl Relation {
    pub fn label(&self) -> String {
        let (g, l) = (self.earlier, self.later);
        format!("Y{}{}*Y{}{} = {}", l.row, l.col, g.row, g.col, self.rhs)
    }
}

/// The `n^2(n^2-1)/2` defining relations, one per pair `earlier <_s later`.
pub fn defining_relations(n: usize) -> Vec<Relation> {
    let mut out = Vec::new();
    for a in 0..n * n {
        for b in a + 1..n * n {
            let (g, l) = (GeneratorIndex::from_flat(a, n), GeneratorIndex::from_flat(b, n));
            let mut terms = TermMap::new();
            let kind = match rewrite_rule(n, b, a) {
                Rewrite::Skew(e) => {
                    add_term(&mut terms, exponents_of(n, &[a as u16, b as u16]), RationalFunction::q_pow(e));
                    if e == 0 {
                        RelationKind::Commuting
                    } else if g.row == l.row {
                        RelationKind::SameRow
                    } else {
                        RelationKind::SameColumn
                    }
                }
                Rewrite::Cross(x, y) => {
                    add_term(&mut terms, exponents_of(n, &[a as u16, b as u16]), RationalFunction::one());
                    add_term(&mut terms, exponents_of(n, &[x, y]), -&RationalFunction::q_power_minus(1, -1));
                    RelationKind::Crossing
                }
            };
            out.push(Relation { earlier: g, later: l, kind, rhs: MatrixAlgebraElement { n, terms } });
        }
    }
    out
}

/// Product in normal form with the default term limit.
pub fn ymul(x: &MatrixAlgebraElement, y: &MatrixAlgebraElement) -> Result<MatrixAlgebraElement> {
    ymul_limited(x, y, DEFAULT_MAX_TERMS)
}

pub fn ymul_limited(x: &MatrixAlgebraElement, y: &MatrixAlgebraElement, max_terms: usize) -> Result<MatrixAlgebraElement> {
    if x.n != y.n {
        return Err(QmatError::DimensionMismatch { expected: x.n, found: y.n });
    }
    let n = x.n;
    let mut words = BTreeMap::new();
    for (ex, cx) in &x.terms {
        let wx = word_of(n, ex);
        for (ey, cy) in &y.terms {
            let mut w = wx.clone();
            w.extend(word_of(n, ey));
            let slot = words.entry(w).or_insert_with(RationalFunction::zero);
            *slot = &*slot + &(cx * cy);
        }
    }
    words.retain(|_, c| !c.is_zero());
    let terms = straighten(n, words, max_terms)?;
    Ok(MatrixAlgebraElement { n, terms })
}

/// Rows `I` and columns `Γ` of a quantum minor `[I | Γ]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorSpec {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl MinorSpec {
    pub fn new(n: usize, rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(QmatError::InvalidSpec(format!(
                "minor has {} rows but {} columns",
                rows.len(),
                cols.len()
            )));
        }
        for set in [&rows, &cols] {
            if !set.windows(2).all(|w| w[0] < w[1]) {
                return Err(QmatError::InvalidSpec(format!("index set {set:?} is not strictly increasing")));
            }
            if set.iter().any(|&x| !(1..=n).contains(&x)) {
                return Err(QmatError::InvalidSpec(format!("index set {set:?} leaves [1,{n}]")));
            }
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }
}

/// All permutations of `0..t` with their inversion counts.
pub(crate) fn permutations_with_length(t: usize) -> Vec<(Vec<usize>, u32)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, u32)>) {
        let t = used.len();
        if prefix.len() == t {
            let mut inv = 0;
            for a in 0..t {
                for b in a + 1..t {
                    if prefix[a] > prefix[b] {
                        inv += 1;
                    }
                }
            }
            out.push((prefix.clone(), inv));
            return;
        }
        for k in 0..t {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; t], &mut out);
    out
}

/// `[I | Γ] = Σ_σ (-q)^{l(σ)} Y_{i_1, γ_{σ(1)}} ⋯ Y_{i_t, γ_{σ(t)}}`.
///
/// Rows increase along each product, so every term is already an ordered
/// monomial.
pub fn qminor(n: usize, spec: &MinorSpec) -> MatrixAlgebraElement {
    let t = spec.rows.len();
    let mut terms = TermMap::new();
    let minus_q = -&RationalFunction::q();
    for (perm, len) in permutations_with_length(t) {
        let mut v = vec![0i64; n * n];
        for (k, &p) in perm.iter().enumerate() {
            v[GeneratorIndex::new(spec.rows[k], spec.cols[p]).flat(n)] += 1;
        }
        add_term(&mut terms, ExponentVector::from_vec(v), minus_q.pow(len));
    }
    MatrixAlgebraElement { n, terms }
}

/// The quantum determinant.
pub fn qdet(n: usize) -> MatrixAlgebraElement {
    let all: Vec<usize> = (1..=n).collect();
    qminor(n, &MinorSpec { rows: all.clone(), cols: all })
}

/// The minors `b_i`, with `b_0 = b_{2n} = 1`.
pub fn b_minor(n: usize, i: usize) -> Result<MatrixAlgebraElement> {
    if i == 0 || i == 2 * n {
        return Ok(MatrixAlgebraElement::one(n));
    }
    if i > 2 * n {
        return Err(QmatError::IndexOutOfRange(format!("b_{i} with n={n}")));
    }
    let (rows, cols): (Vec<usize>, Vec<usize>) = if i <= n {
        ((1..=i).collect(), (n - i + 1..=n).collect())
    } else {
        ((i - n + 1..=n).collect(), (1..=2 * n - i).collect())
    };
    Ok(qminor(n, &MinorSpec::new(n, rows, cols)?))
}

/// True iff `x` commutes with every generator `Y_{i,α}`.
pub fn commutes_with_all_generators(x: &MatrixAlgebraElement, max_terms: usize) -> Result<bool> {
    for g in GeneratorIndex::all(x.n) {
        let y = MatrixAlgebraElement::generator(x.n, g);
        if !x.commutator(&y, max_terms)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Weight of `Y_{i,α}` under σ: `σ(Y_{i,α}) = q^{2(n+1-i-α)} Y_{i,α}`.
pub fn sigma_weight(n: usize, g: GeneratorIndex) -> i64 {
    2 * (n as i64 + 1 - g.row as i64 - g.col as i64)
}

/// The automorphism σ, applied termwise.
pub fn sigma_automorphism(x: &MatrixAlgebraElement) -> MatrixAlgebraElement {
    let n = x.n;
    let terms = x
        .terms
        .iter()
        .map(|(e, c)| {
            let w: i64 = e.entries(n).map(|(g, k)| sigma_weight(n, g) * k).sum();
            (e.clone(), c.mul_q_pow(w))
        })
        .collect();
    MatrixAlgebraElement { n, terms }
}

/// Inverse of σ.
pub fn sigma_inverse(x: &MatrixAlgebraElement) -> MatrixAlgebraElement {
    let n = x.n;
    let terms = x
        .terms
        .iter()
        .map(|(e, c)| {
            let w: i64 = e.entries(n).map(|(g, k)| sigma_weight(n, g) * k).sum();
            (e.clone(), c.mul_q_pow(-w))
        })
        .collect();
    MatrixAlgebraElement { n, terms }
}
