//! The coefficient field `K = Q(q)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::IntPoly;
use crate::error::{QmatError, Result};

/// A reduced quotient of two integer polynomials in `q`.
///
/// Canonical form: numerator and denominator are coprime, the integer
/// coefficients of both share no common factor, and the leading coefficient of
/// the denominator is positive. Zero is `0/1`. Two values are equal exactly
/// when their components are.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: IntPoly,
    den: IntPoly,
}

impl RationalFunction {
    pub fn zero() -> Self {
        Self {
            num: IntPoly::zero(),
            den: IntPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_bigint(BigInt::from(c))
    }

    pub fn from_bigint(c: BigInt) -> Self {
        Self {
            num: IntPoly::constant(c),
            den: IntPoly::one(),
        }
    }

    /// `num / den` for integers.
    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        Self::new(IntPoly::from_i64s(&[num]), IntPoly::from_i64s(&[den]))
    }

    /// The indeterminate `q`.
    pub fn q() -> Self {
        Self::q_pow(1)
    }

    /// `q^e` for any integer `e`.
    pub fn q_pow(e: i64) -> Self {
        let k = usize::try_from(e.unsigned_abs()).expect("q exponent out of range");
        let mono = IntPoly::monomial(BigInt::one(), k);
        if e >= 0 {
            Self {
                num: mono,
                den: IntPoly::one(),
            }
        } else {
            Self {
                num: IntPoly::one(),
                den: mono,
            }
        }
    }

    /// `q^a - q^b`. Zero exactly when `a == b`, since `q` is transcendental.
    pub fn q_power_minus(a: i64, b: i64) -> Self {
        Self::q_pow(a) - Self::q_pow(b)
    }

    /// Builds and normalizes `num / den`.
    pub fn new(num: IntPoly, den: IntPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(QmatError::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    pub fn from_polys(num: IntPoly) -> Self {
        Self::normalize(num, IntPoly::one())
    }

    fn normalize(mut num: IntPoly, mut den: IntPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if !den.is_one() {
            let g = num.gcd(&den);
            if !g.is_one() {
                num = num.div_exact(&g).expect("gcd divides numerator");
                den = den.div_exact(&g).expect("gcd divides denominator");
            }
        }
        Self::fix_content(num, den)
    }

    /// Removes the joint integer content and fixes the sign of the
    /// denominator. Assumes `num`, `den` are already coprime over `Q[q]`.
    fn fix_content(mut num: IntPoly, mut den: IntPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            num = num.div_scalar(&c);
            den = den.div_scalar(&c);
        }
        if den.leading().unwrap().is_negative() {
            num = num.neg();
            den = den.neg();
        }
        Self { num, den }
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.num
    }

    pub fn denominator(&self) -> &IntPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Integer value, when the function is an integer constant.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.den.is_one() && self.num.degree().unwrap_or(0) == 0 {
            Some(self.num.coeffs().first().cloned().unwrap_or_default())
        } else {
            None
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(QmatError::DivisionByZero);
        }
        Ok(Self::fix_content(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Multiplies by `q^e`.
    pub fn mul_q_pow(&self, e: i64) -> Self {
        if e == 0 || self.is_zero() {
            return self.clone();
        }
        let k = usize::try_from(e.unsigned_abs()).expect("q exponent out of range");
        if e > 0 {
            let cancel = k.min(self.den.valuation().unwrap());
            Self {
                num: self.num.shift_up(k - cancel),
                den: self.den.shift_down(cancel),
            }
        } else {
            let cancel = k.min(self.num.valuation().unwrap());
            Self {
                num: self.num.shift_down(cancel),
                den: self.den.shift_up(k - cancel),
            }
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluation at an integer `q` as an exact rational `(num, den)`;
    /// `None` if the denominator vanishes there.
    pub fn eval_i64(&self, q: i64) -> Option<(BigInt, BigInt)> {
        let d = self.den.eval_i64(q);
        if d.is_zero() {
            return None;
        }
        Some((self.num.eval_i64(q), d))
    }
}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFunction::normalize(self.num.add(&rhs.num), self.den.clone());
        }
        RationalFunction::normalize(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        if rhs.den.is_one() && rhs.num.is_one() {
            return self.clone();
        }
        if self.den.is_one() && self.num.is_one() {
            return rhs.clone();
        }
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let cut = |p: &IntPoly, g: &IntPoly| {
            if g.is_one() {
                p.clone()
            } else {
                p.div_exact(g).expect("gcd divides")
            }
        };
        let num = cut(&self.num, &g1).mul(&cut(&rhs.num, &g2));
        let den = cut(&self.den, &g2).mul(&cut(&rhs.den, &g1));
        RationalFunction::fix_content(num, den)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: &RationalFunction) -> RationalFunction {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let multi = |p: &IntPoly| p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1;
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if multi(&self.num) {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        let scaled = self.den.degree() != Some(0) && !self.den.leading().unwrap().is_one();
        if multi(&self.den) || scaled {
            write!(f, "/({})", self.den)
        } else {
            write!(f, "/{}", self.den)
        }
    }
}

/// JSON integer: a number when it fits in `i64`, otherwise a decimal string.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for JsonInt {
    fn from(c: &BigInt) -> Self {
        match i64::try_from(c) {
            Ok(v) => JsonInt::Small(v),
            Err(_) => JsonInt::Big(c.to_str_radix(10)),
        }
    }
}

impl JsonInt {
    fn into_bigint(self) -> std::result::Result<BigInt, String> {
        match self {
            JsonInt::Small(v) => Ok(BigInt::from(v)),
            JsonInt::Big(s) => s
                .parse::<BigInt>()
                .map_err(|e| format!("bad integer {s:?}: {e}")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RationalJson {
    num: Vec<JsonInt>,
    den: Vec<JsonInt>,
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalJson {
            num: self.num.coeffs().iter().map(JsonInt::from).collect(),
            den: self.den.coeffs().iter().map(JsonInt::from).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw = RationalJson::deserialize(d)?;
        let conv = |v: Vec<JsonInt>| -> std::result::Result<IntPoly, D::Error> {
            let coeffs = v
                .into_iter()
                .map(JsonInt::into_bigint)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(D::Error::custom)?;
            Ok(IntPoly::from_coeffs(coeffs))
        };
        let num = conv(raw.num)?;
        let den = conv(raw.den)?;
        RationalFunction::new(num, den).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(poly(n), poly(d)).unwrap()
    }

    #[test]
    fn addition_examples() {
        let q = RationalFunction::q();
        assert_eq!(&q + &q, rf(&[0, 2], &[1]));
        assert!((&q + &(-&q)).is_zero());
        // 1/(q-1) + 1/(q+1) = 2q/(q^2-1)
        let s = &rf(&[1], &[-1, 1]) + &rf(&[1], &[1, 1]);
        assert_eq!(s, rf(&[0, 2], &[-1, 0, 1]));
        assert_eq!(s.numerator(), &poly(&[0, 2]));
        assert_eq!(s.denominator(), &poly(&[-1, 0, 1]));
    }

    #[test]
    fn multiplication_examples() {
        let q = RationalFunction::q();
        let qq = RationalFunction::q_power_minus(1, -1);
        assert_eq!(qq, rf(&[-1, 0, 1], &[0, 1]));
        assert_eq!(&qq * &q, rf(&[-1, 0, 1], &[1]));
        assert_eq!(&qq * &RationalFunction::one(), qq);
        assert!((&qq * &rf(&[0, 1], &[-1, 0, 1])).is_one());
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(RationalFunction::q().inv().unwrap(), rf(&[1], &[0, 1]));
        assert_eq!(
            rf(&[-1, 0, 1], &[1]).inv().unwrap(),
            rf(&[1], &[-1, 0, 1])
        );
        assert!(matches!(
            RationalFunction::zero().inv(),
            Err(QmatError::DivisionByZero)
        ));
    }

    #[test]
    fn q_power_minus_examples() {
        assert!(RationalFunction::q_power_minus(3, 3).is_zero());
        assert_eq!(RationalFunction::q_power_minus(2, 0), rf(&[-1, 0, 1], &[1]));
    }

    #[test]
    fn canonical_form() {
        // -2/(-4q) = 1/(2q)
        let x = rf(&[-2], &[0, -4]);
        assert_eq!(x.numerator(), &poly(&[1]));
        assert_eq!(x.denominator(), &poly(&[0, 2]));
        assert_eq!(RationalFunction::from_ratio(3, 6).unwrap(), rf(&[1], &[2]));
        assert_eq!(rf(&[0], &[5, 7]), RationalFunction::zero());
    }

    #[test]
    fn mul_q_pow_matches_multiplication() {
        let x = rf(&[1, 2], &[0, 0, 3, 1]);
        for e in -4..=4 {
            assert_eq!(x.mul_q_pow(e), &x * &RationalFunction::q_pow(e));
        }
    }

    #[test]
    fn json_shape() {
        let x = rf(&[0, 2], &[-1, 0, 1]);
        let v = serde_json::to_value(&x).unwrap();
        assert_eq!(v, serde_json::json!({"num": [0, 2], "den": [-1, 0, 1]}));
        let back: RationalFunction = serde_json::from_value(v).unwrap();
        assert_eq!(back, x);
        let big: RationalFunction =
            serde_json::from_str(r#"{"num": ["100000000000000000000000"], "den": [3]}"#).unwrap();
        assert_eq!(serde_json::from_value::<RationalFunction>(serde_json::to_value(&big).unwrap()).unwrap(), big);
        assert!(serde_json::from_str::<RationalFunction>(r#"{"num": [1], "den": []}"#).is_err());
    }

    fn arb_poly() -> impl Strategy<Value = IntPoly> {
        prop::collection::vec(-4i64..=4, 0..4).prop_map(|c| IntPoly::from_i64s(&c))
    }

    fn arb_rf() -> impl Strategy<Value = RationalFunction> {
        (arb_poly(), arb_poly()).prop_filter_map("nonzero denominator", |(n, d)| {
            RationalFunction::new(n, d).ok()
        })
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_rf(), b in arb_rf(), c in arb_rf()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn evaluation_is_a_homomorphism(a in arb_rf(), b in arb_rf()) {
            // q = 7 is a cheap witness for canonical-form bugs
            let ev = |x: &RationalFunction| x.eval_i64(7);
            if let (Some((an, ad)), Some((bn, bd)), Some((sn, sd))) = (ev(&a), ev(&b), ev(&(&a * &b))) {
                prop_assert_eq!(&an * &bn * &sd, &sn * &ad * &bd);
            }
        }

        #[test]
        fn q_power_minus_vanishes_only_on_diagonal(a in -20i64..20, b in -20i64..20) {
            prop_assert_eq!(RationalFunction::q_power_minus(a, b).is_zero(), a == b);
        }
    }
}
