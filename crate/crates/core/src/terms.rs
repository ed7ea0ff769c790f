//! Sparse term storage shared by torus and quantum-matrix elements, plus their
//! common JSON shape.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QmatError, Result};
use crate::kernel::{GeneratorIndex, RationalFunction};

/// Exponents of `T_{1,1}, T_{1,2}, ..., T_{n,n}` (or the `Y`s), dense in
/// lexicographic generator order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(Vec<i64>);

impl ExponentVector {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n * n])
    }

    pub fn unit(n: usize, g: GeneratorIndex) -> Self {
        let mut v = vec![0; n * n];
        v[g.flat(n)] = 1;
        Self(v)
    }

    pub fn from_vec(v: Vec<i64>) -> Self {
        Self(v)
    }

    /// Builds from sparse `(row, col, exponent)` triples.
    pub fn from_entries(n: usize, entries: &[(usize, usize, i64)]) -> Result<Self> {
        let mut v = vec![0; n * n];
        for &(r, c, e) in entries {
            let g = GeneratorIndex::checked(r, c, n)?;
            v[g.flat(n)] += e;
        }
        Ok(Self(v))
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    pub fn get(&self, flat: usize) -> i64 {
        self.0[flat]
    }

    pub fn at(&self, n: usize, g: GeneratorIndex) -> i64 {
        self.0[g.flat(n)]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        Self(
            self.0
                .iter()
                .map(|a| a.checked_mul(k).expect("exponent overflow"))
                .collect(),
        )
    }

    /// Nonzero entries as `(generator, exponent)`.
    pub fn entries(&self, n: usize) -> impl Iterator<Item = (GeneratorIndex, i64)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(move |(k, &e)| (GeneratorIndex::from_flat(k, n), e))
    }
}

pub(crate) type TermMap = BTreeMap<ExponentVector, RationalFunction>;

/// Adds `coeff` to the term at `exp`, dropping it if the sum vanishes.
pub(crate) fn add_term(map: &mut TermMap, exp: ExponentVector, coeff: RationalFunction) {
    if coeff.is_zero() {
        return;
    }
    match map.entry(exp) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(coeff);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get() + &coeff;
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

pub(crate) fn add_maps(a: &TermMap, b: &TermMap) -> TermMap {
    let mut out = a.clone();
    for (e, c) in b {
        add_term(&mut out, e.clone(), c.clone());
    }
    out
}

pub(crate) fn neg_map(a: &TermMap) -> TermMap {
    a.iter().map(|(e, c)| (e.clone(), -c)).collect()
}

pub(crate) fn scale_map(a: &TermMap, s: &RationalFunction) -> TermMap {
    if s.is_zero() {
        return TermMap::new();
    }
    a.iter().map(|(e, c)| (e.clone(), c * s)).collect()
}

pub(crate) fn fmt_terms(f: &mut fmt::Formatter<'_>, n: usize, map: &TermMap, symbol: char) -> fmt::Result {
    if map.is_empty() {
        return write!(f, "0");
    }
    for (k, (exp, coeff)) in map.iter().enumerate() {
        let mono: Vec<String> = exp
            .entries(n)
            .map(|(g, e)| {
                if e == 1 {
                    format!("{symbol}{}{}", g.row, g.col)
                } else {
                    format!("{symbol}{}{}^{e}", g.row, g.col)
                }
            })
            .collect();
        let coeff_str = coeff.to_string();
        let needs_paren = coeff_str.contains(' ') || coeff_str.contains('/');
        let (negative, body) = match coeff_str.strip_prefix('-') {
            Some(rest) if !needs_paren => (true, rest),
            _ => (false, coeff_str.as_str()),
        };
        match (k > 0, negative) {
            (true, true) => write!(f, " - ")?,
            (true, false) => write!(f, " + ")?,
            (false, true) => write!(f, "-")?,
            (false, false) => {}
        }
        match (mono.is_empty(), body == "1") {
            (true, _) => write!(f, "{body}")?,
            (false, true) => write!(f, "{}", mono.join("*"))?,
            (false, false) if needs_paren => write!(f, "({body})*{}", mono.join("*"))?,
            (false, false) => write!(f, "{body}*{}", mono.join("*"))?,
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
pub(crate) struct TermJson {
    pub exp: Vec<[i64; 3]>,
    pub coeff: RationalFunction,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct ElementJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alg: Option<String>,
    pub n: usize,
    pub terms: Vec<TermJson>,
}

impl ElementJson {
    pub fn from_map(alg: Option<&str>, n: usize, map: &TermMap) -> Self {
        Self {
            alg: alg.map(str::to_owned),
            n,
            terms: map
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e
                        .entries(n)
                        .map(|(g, x)| [g.row as i64, g.col as i64, x])
                        .collect(),
                    coeff: c.clone(),
                })
                .collect(),
        }
    }

    pub fn into_map(self) -> Result<(usize, TermMap)> {
        let n = self.n;
        if n < 2 {
            return Err(QmatError::Parse(format!("n must be at least 2, got {n}")));
        }
        let mut map = TermMap::new();
        for t in self.terms {
            let mut v = vec![0i64; n * n];
            for [r, c, e] in t.exp {
                let (r, c) = (
                    usize::try_from(r).map_err(|_| QmatError::Parse(format!("bad row {r}")))?,
                    usize::try_from(c).map_err(|_| QmatError::Parse(format!("bad column {c}")))?,
                );
                let g = GeneratorIndex::checked(r, c, n).map_err(|e| QmatError::Parse(e.to_string()))?;
                v[g.flat(n)] += e;
            }
            add_term(&mut map, ExponentVector(v), t.coeff);
        }
        Ok((n, map))
    }
}
