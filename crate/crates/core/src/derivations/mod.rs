//! Derivations of `O_q(M_n)`, of the quantum torus and of `O_q(GL_n)`.
//!
//! A derivation is stored by its values on the generators; everything else
//! follows from the Leibniz rule.

mod hh1;
mod matrix;
mod torus;

use std::fmt;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QmatError, Result};
use crate::kernel::{GeneratorIndex, RationalFunction};
use crate::qmatrix::MatrixAlgebraElement;
use crate::qtorus::TorusElement;

pub use hh1::{express_hh1, gl_express, sl_mu_constraint, DeltaPoly, GlCoordinates, GlDerivation, GlElement, HH1Coordinates};
pub use matrix::{
    annihilates_qdet, basis_derivation, check_derivation, diagonal_derivation, sl_basis_derivation,
};
pub use torus::{check_torus_derivation, check_z_condition, decompose_torus_derivation, lift_to_torus, TorusDecomposition};

/// The element types a derivation can take values in.
pub trait AlgebraElement: Clone + PartialEq + fmt::Display + fmt::Debug + Serialize + DeserializeOwned {
    /// The `"alg"` tag used in JSON.
    const ALG: &'static str;

    fn dim(&self) -> usize;
    fn zero_of(n: usize) -> Self;
    fn generator_of(n: usize, g: GeneratorIndex) -> Self;
    fn is_zero_element(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn scaled(&self, c: &RationalFunction) -> Self;
    fn times(&self, other: &Self, max_terms: usize) -> Result<Self>;
}

impl AlgebraElement for MatrixAlgebraElement {
    const ALG: &'static str = "Mq";

    fn dim(&self) -> usize {
        self.n()
    }
    fn zero_of(n: usize) -> Self {
        Self::zero(n)
    }
    fn generator_of(n: usize, g: GeneratorIndex) -> Self {
        Self::generator(n, g)
    }
    fn is_zero_element(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn scaled(&self, c: &RationalFunction) -> Self {
        self.scale(c)
    }
    fn times(&self, other: &Self, max_terms: usize) -> Result<Self> {
        self.mul(other, max_terms)
    }
}

impl AlgebraElement for TorusElement {
    const ALG: &'static str = "torus";

    fn dim(&self) -> usize {
        self.n()
    }
    fn zero_of(n: usize) -> Self {
        Self::zero(n)
    }
    fn generator_of(n: usize, g: GeneratorIndex) -> Self {
        Self::generator(n, g)
    }
    fn is_zero_element(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn scaled(&self, c: &RationalFunction) -> Self {
        self.scale(c)
    }
    fn times(&self, other: &Self, max_terms: usize) -> Result<Self> {
        let p = self * other;
        if p.len() > max_terms {
            return Err(QmatError::ResourceLimit { what: "torus product".into(), limit: max_terms });
        }
        Ok(p)
    }
}

/// A derivation given by its images of the generators, in flat generator order.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationSpec<E> {
    n: usize,
    images: Vec<E>,
}

pub type MatrixDerivation = DerivationSpec<MatrixAlgebraElement>;
pub type TorusDerivation = DerivationSpec<TorusElement>;

impl<E: AlgebraElement> DerivationSpec<E> {
    /// Builds from all `n^2` images in generator order.
    pub fn new(n: usize, images: Vec<E>) -> Result<Self> {
        if images.len() != n * n {
            return Err(QmatError::DimensionMismatch { expected: n * n, found: images.len() });
        }
        if let Some(bad) = images.iter().find(|e| e.dim() != n) {
            return Err(QmatError::DimensionMismatch { expected: n, found: bad.dim() });
        }
        Ok(Self { n, images })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(GeneratorIndex) -> E) -> Self {
        Self { n, images: GeneratorIndex::all(n).map(&mut f).collect() }
    }

    pub fn try_from_fn(n: usize, mut f: impl FnMut(GeneratorIndex) -> Result<E>) -> Result<Self> {
        Ok(Self { n, images: GeneratorIndex::all(n).map(&mut f).collect::<Result<_>>()? })
    }

    pub fn zero(n: usize) -> Self {
        Self::from_fn(n, |_| E::zero_of(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn image(&self, g: GeneratorIndex) -> &E {
        &self.images[g.flat(self.n)]
    }

    pub fn images(&self) -> &[E] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(E::is_zero_element)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "mixing derivations of different dimensions");
        Self { n: self.n, images: self.images.iter().zip(&other.images).map(|(a, b)| a.plus(b)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "mixing derivations of different dimensions");
        Self { n: self.n, images: self.images.iter().zip(&other.images).map(|(a, b)| a.minus(b)).collect() }
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        Self { n: self.n, images: self.images.iter().map(|a| a.scaled(c)).collect() }
    }

    /// `g ↦ c · d(g)`; a derivation again when `c` is central.
    pub fn left_multiply(&self, c: &E, max_terms: usize) -> Result<Self> {
        Ok(Self { n: self.n, images: self.images.iter().map(|a| c.times(a, max_terms)).collect::<Result<_>>()? })
    }

    /// The inner derivation `g ↦ x·g - g·x`.
    pub fn ad(x: &E, max_terms: usize) -> Result<Self> {
        let n = x.dim();
        Self::try_from_fn(n, |g| {
            let y = E::generator_of(n, g);
            Ok(x.times(&y, max_terms)?.minus(&y.times(x, max_terms)?))
        })
    }

    /// Generators whose images differ from `other`'s.
    pub fn differing_generators(&self, other: &Self) -> Vec<GeneratorIndex> {
        GeneratorIndex::all(self.n)
            .filter(|g| self.image(*g) != other.image(*g))
            .collect()
    }
}

impl<E: AlgebraElement> fmt::Display for DerivationSpec<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, g) in GeneratorIndex::all(self.n).enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{g} -> {}", self.images[k])?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ImageJson<E> {
    gen: [usize; 2],
    value: E,
}

#[derive(Serialize, Deserialize)]
struct SpecJson<E> {
    alg: String,
    images: Vec<ImageJson<E>>,
}

impl<E: AlgebraElement> Serialize for DerivationSpec<E> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecJson {
            alg: E::ALG.to_owned(),
            images: GeneratorIndex::all(self.n)
                .zip(&self.images)
                .map(|(g, v)| ImageJson { gen: [g.row, g.col], value: v.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de, E: AlgebraElement> Deserialize<'de> for DerivationSpec<E> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw = SpecJson::<E>::deserialize(d)?;
        if raw.alg != E::ALG {
            return Err(D::Error::custom(format!("expected a derivation over {:?}, found {:?}", E::ALG, raw.alg)));
        }
        let n = raw.images.first().map(|i| i.value.dim()).ok_or_else(|| D::Error::custom("no images"))?;
        let mut slots: Vec<Option<E>> = vec![None; n * n];
        for img in raw.images {
            let [r, c] = img.gen;
            let g = GeneratorIndex::checked(r, c, n).map_err(D::Error::custom)?;
            if img.value.dim() != n {
                return Err(D::Error::custom(format!("image of {g} has n={}, expected {n}", img.value.dim())));
            }
            if slots[g.flat(n)].replace(img.value).is_some() {
                return Err(D::Error::custom(format!("two images given for {g}")));
            }
        }
        let images = slots
            .into_iter()
            .enumerate()
            .map(|(k, v)| v.ok_or_else(|| D::Error::custom(format!("no image for {}", GeneratorIndex::from_flat(k, n)))))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { n, images })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::DEFAULT_MAX_TERMS;
    use crate::qmatrix::qdet;
    use crate::terms::ExponentVector;

    #[test]
    fn ad_examples() {
        assert!(MatrixDerivation::ad(&MatrixAlgebraElement::one(2), DEFAULT_MAX_TERMS).unwrap().is_zero());
        for n in 2..=3 {
            assert!(MatrixDerivation::ad(&qdet(n), DEFAULT_MAX_TERMS).unwrap().is_zero());
        }
        let t11 = TorusElement::generator(2, GeneratorIndex::new(1, 1));
        let ad = TorusDerivation::ad(&t11, DEFAULT_MAX_TERMS).unwrap();
        assert!(ad.image(GeneratorIndex::new(2, 2)).is_zero());
        let expected = TorusElement::monomial(
            2,
            ExponentVector::from_entries(2, &[(1, 1, 1), (1, 2, 1)]).unwrap(),
            &RationalFunction::one() - &RationalFunction::q_pow(-1),
        );
        assert_eq!(ad.image(GeneratorIndex::new(1, 2)), &expected);
    }

    #[test]
    fn json_round_trip() {
        let d = basis_derivation(2, 2).unwrap();
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["alg"], "Mq");
        assert_eq!(v["images"].as_array().unwrap().len(), 4);
        assert_eq!(v["images"][3]["gen"], serde_json::json!([2, 2]));
        assert_eq!(serde_json::from_value::<MatrixDerivation>(v.clone()).unwrap(), d);
        assert!(serde_json::from_value::<TorusDerivation>(v.clone()).is_err());
        let mut missing = v;
        missing["images"].as_array_mut().unwrap().pop();
        assert!(serde_json::from_value::<MatrixDerivation>(missing).is_err());
    }
}
