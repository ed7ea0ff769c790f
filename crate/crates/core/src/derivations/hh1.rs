use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QmatError, Result};
use crate::kernel::{GeneratorIndex, RationalFunction, StepIndex};
use crate::qmatrix::{qdet, MatrixAlgebraElement};
use crate::qtorus::{central_to_delta_basis, delta_monomial, TorusElement};
use crate::tower::{ExponentBox, Tower};

use super::{basis_derivation, decompose_torus_derivation, lift_to_torus, MatrixDerivation};

/// A Laurent polynomial in `Δ_n = det_q`, keyed by the power of `Δ_n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeltaPoly {
    terms: BTreeMap<i64, RationalFunction>,
}

#[derive(Serialize, Deserialize)]
struct DeltaTermJson {
    pow: i64,
    coeff: RationalFunction,
}

impl Serialize for DeltaPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<DeltaTermJson> =
            self.terms.iter().map(|(&pow, c)| DeltaTermJson { pow, coeff: c.clone() }).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DeltaPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<DeltaTermJson>::deserialize(d)?;
        let mut out = DeltaPoly::zero();
        for t in v {
            out = out.add(&DeltaPoly::monomial(t.pow, t.coeff));
        }
        Ok(out)
    }
}

impl DeltaPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: RationalFunction) -> Self {
        Self::monomial(0, c)
    }

    /// `c · Δ_n^k`.
    pub fn monomial(k: i64, c: RationalFunction) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &RationalFunction)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn coefficient(&self, k: i64) -> RationalFunction {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// No negative powers of `Δ_n`.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|&k| k >= 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (&k, c) in &other.terms {
            let sum = &terms.get(&k).cloned().unwrap_or_default() + c;
            if sum.is_zero() {
                terms.remove(&k);
            } else {
                terms.insert(k, sum);
            }
        }
        Self { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&RationalFunction::from_int(-1)))
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(&k, v)| (k, v * c)).collect() }
    }

    /// Multiplies by `Δ_n^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self { terms: self.terms.iter().map(|(&e, v)| (e + k, v.clone())).collect() }
    }

    /// Reads a central torus element lying in `K[Δ_n^{±1}]`.
    pub fn from_central(x: &TorusElement) -> Result<Self> {
        let n = x.n();
        let laurent = central_to_delta_basis(x)?;
        let mut out = Self::zero();
        for (k, c) in &laurent.terms {
            if k[..n - 1].iter().any(|&e| e != 0) {
                return Err(QmatError::NotPolynomial(format!(
                    "central element {x} involves Delta_1..Delta_{} (exponents {k:?})",
                    n - 1
                )));
            }
            out = out.add(&Self::monomial(k[n - 1], c.clone()));
        }
        Ok(out)
    }

    pub fn to_torus(&self, n: usize) -> Result<TorusElement> {
        let mut out = TorusElement::zero(n);
        let mut k = vec![0i64; n];
        for (&e, c) in &self.terms {
            k[n - 1] = e;
            out = &out + &delta_monomial(n, &k)?.scale(c);
        }
        Ok(out)
    }

    /// `Σ c_k det_q^k`; fails on negative powers.
    pub fn to_matrix_element(&self, n: usize, max_terms: usize) -> Result<MatrixAlgebraElement> {
        if !self.is_polynomial() {
            return Err(QmatError::NotPolynomial(format!("{self} has negative powers of Delta_n")));
        }
        let det = qdet(n);
        let mut out = MatrixAlgebraElement::zero(n);
        for (&e, c) in &self.terms {
            out = &out + &det.pow(e as u32, max_terms)?.scale(c);
        }
        Ok(out)
    }
}

impl fmt::Display for DeltaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let cs = c.to_string();
            let cs = if cs.contains(' ') || cs.contains('/') { format!("({cs})") } else { cs };
            match (k, c.is_one()) {
                (0, _) => write!(f, "{cs}")?,
                (1, true) => write!(f, "Delta")?,
                (_, true) => write!(f, "Delta^{k}")?,
                (1, false) => write!(f, "{cs}*Delta")?,
                (_, false) => write!(f, "{cs}*Delta^{k}")?,
            }
        }
        Ok(())
    }
}

/// `d = ad_x + μ_1 D_1 + … + μ_{2n-1} D_{2n-1}` with `μ_j ∈ K[Δ_n]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HH1Coordinates {
    pub inner: MatrixAlgebraElement,
    pub mu: Vec<DeltaPoly>,
}

impl HH1Coordinates {
    /// `ad_x + Σ μ_j D_j`.
    pub fn recombine(&self, max_terms: usize) -> Result<MatrixDerivation> {
        let n = self.inner.n();
        combine(n, &self.inner, &self.mu, max_terms)
    }
}

fn combine(n: usize, inner: &MatrixAlgebraElement, mu: &[DeltaPoly], max_terms: usize) -> Result<MatrixDerivation> {
    let mut out = MatrixDerivation::ad(inner, max_terms)?;
    for (j, m) in mu.iter().enumerate() {
        if m.is_zero() {
            continue;
        }
        let c = m.to_matrix_element(n, max_terms)?;
        out = out.add(&basis_derivation(n, j + 1)?.left_multiply(&c, max_terms)?);
    }
    Ok(out)
}

/// `Σ_{j≠n} μ_j - (n-2) μ_n = 0`, the constraint satisfied by derivations
/// that kill `det_q`.
pub fn sl_mu_constraint(n: usize, mu: &[DeltaPoly]) -> bool {
    let mut acc = DeltaPoly::zero();
    for (j, m) in mu.iter().enumerate() {
        if j + 1 == n {
            acc = acc.sub(&m.scale(&RationalFunction::from_int(n as i64 - 2)));
        } else {
            acc = acc.add(m);
        }
    }
    acc.is_zero()
}

/// Coordinates of `d` in `HH^1(O_q(M_n))`.
///
/// The derivation is lifted to the torus and split as `ad_x + θ`. The
/// coefficients `μ` are read off `θ`: `μ_n = z_{1,1}`, `μ_{n+1-α} = z_{1,α}`
/// and `μ_{n+i-1} = z_{i,1}`; every other `z_{i,α}` must then equal
/// `μ_{n+1-α} + μ_{n+i-1} - μ_n`. The inner part `x` is rebased into
/// `O_q(M_n)` (by default over `ℕ`-exponents up to its degree), and
/// `d - ad_x - Σ μ_j D_j` must vanish.
pub fn express_hh1(d: &MatrixDerivation, tower: &Tower, bx: Option<&ExponentBox>) -> Result<HH1Coordinates> {
    let n = d.n();
    let max_terms = tower.context().max_terms();
    let lifted = lift_to_torus(d, tower)?;
    let dec = decompose_torus_derivation(&lifted)?;
    let z = |r: usize, c: usize| dec.z_at(GeneratorIndex::new(r, c));

    let mut mu_t = vec![TorusElement::zero(n); 2 * n - 1];
    mu_t[n - 1] = z(1, 1).clone();
    for alpha in 2..=n {
        mu_t[n - alpha] = z(1, alpha).clone();
    }
    for i in 2..=n {
        mu_t[n + i - 2] = z(i, 1).clone();
    }
    for i in 2..=n {
        for alpha in 2..=n {
            let expected = &(&mu_t[n - alpha] + &mu_t[n + i - 2]) - &mu_t[n - 1];
            if z(i, alpha) != &expected {
                return Err(QmatError::ConditionViolated(format!(
                    "z({i},{alpha}) = {} but the dictionary predicts {expected}",
                    z(i, alpha)
                )));
            }
        }
    }
    let mu: Vec<DeltaPoly> = mu_t.iter().map(DeltaPoly::from_central).collect::<Result<_>>()?;
    if let Some(bad) = mu.iter().position(|m| !m.is_polynomial()) {
        return Err(QmatError::NotPolynomial(format!("mu_{} = {}", bad + 1, mu[bad])));
    }

    let degree = dec.x.terms().map(|(e, _)| e.total_degree()).max().unwrap_or(0);
    let default_box = ExponentBox::natural(n, degree);
    let inner = tower
        .rebase_to_step(StepIndex::top(n), &dec.x, Some(bx.unwrap_or(&default_box)))?
        .to_matrix_element()?;

    let coords = HH1Coordinates { inner, mu };
    let residual = d.sub(&coords.recombine(max_terms)?);
    if !residual.is_zero() {
        let gens: Vec<String> = residual.differing_generators(&MatrixDerivation::zero(n)).iter().map(|g| g.to_string()).collect();
        return Err(QmatError::ConditionViolated(format!("residual derivation is nonzero at {}", gens.join(", "))));
    }
    Ok(coords)
}

/// `Δ_n^{-k} · body`, an element of `O_q(GL_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlElement {
    pub delta_power: u32,
    pub body: MatrixAlgebraElement,
}

impl GlElement {
    pub fn new(delta_power: u32, body: MatrixAlgebraElement) -> Self {
        Self { delta_power, body }
    }

    /// `body · Δ_n^{-k}` in the torus.
    pub fn to_torus(&self, tower: &Tower) -> Result<TorusElement> {
        let n = self.body.n();
        let mut k = vec![0i64; n];
        k[n - 1] = -(self.delta_power as i64);
        Ok(&tower.embed(&self.body)? * &delta_monomial(n, &k)?)
    }
}

impl fmt::Display for GlElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.delta_power == 0 {
            write!(f, "{}", self.body)
        } else {
            write!(f, "Delta^-{}*({})", self.delta_power, self.body)
        }
    }
}

/// A derivation of `O_q(GL_n)` given on the generators `Y_{i,α}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlDerivation {
    pub n: usize,
    pub images: Vec<GlElement>,
}

impl GlDerivation {
    /// `Δ_n^{-k} · d`.
    pub fn from_matrix(d: &MatrixDerivation, k: u32) -> Self {
        Self { n: d.n(), images: d.images().iter().map(|x| GlElement::new(k, x.clone())).collect() }
    }

    /// Clears denominators: `Δ_n^k · d` with `k` the largest power present.
    pub fn clear_delta(&self, max_terms: usize) -> Result<(u32, MatrixDerivation)> {
        let k = self.images.iter().map(|x| x.delta_power).max().unwrap_or(0);
        let det = qdet(self.n);
        let images = self
            .images
            .iter()
            .map(|x| det.pow(k - x.delta_power, max_terms)?.mul(&x.body, max_terms))
            .collect::<Result<Vec<_>>>()?;
        Ok((k, MatrixDerivation::new(self.n, images)?))
    }
}

/// `d = ad_x + Σ μ_j D_j` in `O_q(GL_n)`, with `μ_j ∈ K[Δ_n^{±1}]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlCoordinates {
    pub inner: GlElement,
    pub mu: Vec<DeltaPoly>,
}

/// Coordinates of a derivation of `O_q(GL_n)`: multiply by `Δ_n^k` to land
/// in `O_q(M_n)`, take [`express_hh1`], and divide back.
pub fn gl_express(d: &GlDerivation, tower: &Tower, bx: Option<&ExponentBox>) -> Result<GlCoordinates> {
    let (k, cleared) = d.clear_delta(tower.context().max_terms())?;
    let coords = express_hh1(&cleared, tower, bx)?;
    Ok(GlCoordinates {
        inner: GlElement::new(k, coords.inner),
        mu: coords.mu.iter().map(|m| m.shift(-(k as i64))).collect(),
    })
}
