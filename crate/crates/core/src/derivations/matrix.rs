use crate::check::Check;
use crate::error::{QmatError, Result};
use crate::kernel::{GeneratorIndex, RationalFunction};
use crate::qmatrix::{defining_relations, qdet, MatrixAlgebraElement};
use crate::terms::ExponentVector;

use super::MatrixDerivation;

fn ordered_monomial(n: usize, word: &[usize]) -> MatrixAlgebraElement {
    let mut v = vec![0i64; n * n];
    for &k in word {
        v[k] += 1;
    }
    MatrixAlgebraElement::monomial(n, ExponentVector::from_vec(v), RationalFunction::one())
}

impl MatrixDerivation {
    /// `d(x)`, expanding each PBW monomial by the Leibniz rule.
    pub fn leibniz_extend(&self, x: &MatrixAlgebraElement, max_terms: usize) -> Result<MatrixAlgebraElement> {
        let n = self.n();
        if x.n() != n {
            return Err(QmatError::DimensionMismatch { expected: n, found: x.n() });
        }
        let mut out = MatrixAlgebraElement::zero(n);
        for (exp, c) in x.terms() {
            let word: Vec<usize> = exp.entries(n).flat_map(|(g, e)| std::iter::repeat_n(g.flat(n), e as usize)).collect();
            for p in 0..word.len() {
                let image = &self.images()[word[p]];
                if image.is_zero() {
                    continue;
                }
                let left = ordered_monomial(n, &word[..p]).mul(image, max_terms)?;
                let full = left.mul(&ordered_monomial(n, &word[p + 1..]), max_terms)?;
                out = &out + &full.scale(c);
            }
        }
        Ok(out)
    }

    /// `d(y·z)` for generators `y`, `z`, straight from the images.
    fn on_pair(&self, y: GeneratorIndex, z: GeneratorIndex, max_terms: usize) -> Result<MatrixAlgebraElement> {
        let n = self.n();
        let (gy, gz) = (MatrixAlgebraElement::generator(n, y), MatrixAlgebraElement::generator(n, z));
        Ok(&self.image(y).mul(&gz, max_terms)? + &gy.mul(self.image(z), max_terms)?)
    }
}

/// Checks `d` against every defining relation `Y_l Y_g = rhs`: the Leibniz
/// value of the left side must equal `d(rhs)`.
pub fn check_derivation(d: &MatrixDerivation, max_terms: usize) -> Vec<Check> {
    defining_relations(d.n())
        .into_iter()
        .map(|rel| {
            let name = rel.label();
            let run = || -> Result<(MatrixAlgebraElement, MatrixAlgebraElement)> {
                Ok((d.on_pair(rel.later, rel.earlier, max_terms)?, d.leibniz_extend(&rel.rhs, max_terms)?))
            };
            match run() {
                Ok((lhs, rhs)) => Check::equal(name, &lhs, &rhs),
                Err(e) => Check::fail(name, e.to_string()),
            }
        })
        .collect()
}

/// `Y_{i,α} ↦ w_{i,α} Y_{i,α}`.
pub fn diagonal_derivation(n: usize, weights: &[RationalFunction]) -> Result<MatrixDerivation> {
    if weights.len() != n * n {
        return Err(QmatError::DimensionMismatch { expected: n * n, found: weights.len() });
    }
    Ok(MatrixDerivation::from_fn(n, |g| MatrixAlgebraElement::generator(n, g).scale(&weights[g.flat(n)])))
}

/// Weight of `Y_{i,α}` under `D_j`.
fn basis_weight(n: usize, j: usize, g: GeneratorIndex) -> i64 {
    if j < n {
        i64::from(g.col == n + 1 - j)
    } else if j == n {
        match (g.row, g.col) {
            (1, 1) => 1,
            (r, c) if r >= 2 && c >= 2 => -1,
            _ => 0,
        }
    } else {
        i64::from(g.row == j - n + 1)
    }
}

/// The derivation `D_j`, `j ∈ [1, 2n-1]`:
///
/// * `j < n`: fixes column `n+1-j` and kills the other columns;
/// * `j = n`: `Y_{1,1} ↦ Y_{1,1}`, `Y_{i,α} ↦ -Y_{i,α}` for `i, α ≥ 2`, zero
///   on the rest of the first row and column;
/// * `j > n`: fixes row `j-n+1` and kills the other rows.
pub fn basis_derivation(n: usize, j: usize) -> Result<MatrixDerivation> {
    if n < 2 {
        return Err(QmatError::InvalidDimension(n));
    }
    if !(1..2 * n).contains(&j) {
        return Err(QmatError::IndexOutOfRange(format!("D_{j} with n={n}; need 1 <= j <= {}", 2 * n - 1)));
    }
    let weights: Vec<RationalFunction> =
        GeneratorIndex::all(n).map(|g| RationalFunction::from_int(basis_weight(n, j, g))).collect();
    diagonal_derivation(n, &weights)
}

/// Derivations of `O_q(M_n)` killing `det_q`: `D_i + D_n/(n-2)` for
/// `n ≥ 3` and `i ≠ n`; for `n = 2`, `D_1 - D_3` (`i = 1`) and `D_2` (`i = 2`).
pub fn sl_basis_derivation(n: usize, i: usize) -> Result<MatrixDerivation> {
    if n < 2 {
        return Err(QmatError::InvalidDimension(n));
    }
    if n == 2 {
        return match i {
            1 => Ok(basis_derivation(2, 1)?.sub(&basis_derivation(2, 3)?)),
            2 => basis_derivation(2, 2),
            _ => Err(QmatError::IndexOutOfRange(format!("SL derivation {i} with n=2; need i in {{1,2}}"))),
        };
    }
    if i == n || !(1..2 * n).contains(&i) {
        return Err(QmatError::IndexOutOfRange(format!(
            "SL derivation {i} with n={n}; need i in [1,{}] or [{},{}]",
            n - 1,
            n + 1,
            2 * n - 1
        )));
    }
    let c = RationalFunction::from_ratio(1, n as i64 - 2)?;
    Ok(basis_derivation(n, i)?.add(&basis_derivation(n, n)?.scale(&c)))
}

/// True iff `d(det_q) = 0`.
pub fn annihilates_qdet(d: &MatrixDerivation, max_terms: usize) -> Result<bool> {
    Ok(d.leibniz_extend(&qdet(d.n()), max_terms)?.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_passed;
    use crate::kernel::DEFAULT_MAX_TERMS;

    const LIMIT: usize = DEFAULT_MAX_TERMS;

    fn y(n: usize, r: usize, c: usize) -> MatrixAlgebraElement {
        MatrixAlgebraElement::generator(n, GeneratorIndex::new(r, c))
    }

    #[test]
    fn basis_derivation_images() {
        let d1 = basis_derivation(2, 1).unwrap();
        assert_eq!(d1.image(GeneratorIndex::new(1, 2)), &y(2, 1, 2));
        assert_eq!(d1.image(GeneratorIndex::new(2, 2)), &y(2, 2, 2));
        assert!(d1.image(GeneratorIndex::new(1, 1)).is_zero());
        assert!(d1.image(GeneratorIndex::new(2, 1)).is_zero());

        let d2 = basis_derivation(2, 2).unwrap();
        assert_eq!(d2.image(GeneratorIndex::new(1, 1)), &y(2, 1, 1));
        assert_eq!(d2.image(GeneratorIndex::new(2, 2)), &y(2, 2, 2).scale(&RationalFunction::from_int(-1)));
        assert!(d2.image(GeneratorIndex::new(1, 2)).is_zero());

        let d3 = basis_derivation(2, 3).unwrap();
        assert_eq!(d3.image(GeneratorIndex::new(2, 1)), &y(2, 2, 1));
        assert!(d3.image(GeneratorIndex::new(1, 1)).is_zero());

        assert!(matches!(basis_derivation(2, 0), Err(QmatError::IndexOutOfRange(_))));
        assert!(matches!(basis_derivation(2, 4), Err(QmatError::IndexOutOfRange(_))));
    }

    #[test]
    fn leibniz_examples() {
        let dn = basis_derivation(2, 2).unwrap();
        let x = y(2, 1, 1).mul(&y(2, 2, 2), LIMIT).unwrap();
        assert!(dn.leibniz_extend(&x, LIMIT).unwrap().is_zero());
        assert!(dn.leibniz_extend(&MatrixAlgebraElement::one(2), LIMIT).unwrap().is_zero());
    }

    #[test]
    fn basis_derivations_pass() {
        for n in 2..=3 {
            for j in 1..2 * n {
                let checks = check_derivation(&basis_derivation(n, j).unwrap(), LIMIT);
                assert!(all_passed(&checks), "n={n} j={j}");
            }
        }
        let ad = MatrixDerivation::ad(&y(2, 1, 1), LIMIT).unwrap();
        assert!(all_passed(&check_derivation(&ad, LIMIT)));
    }

    #[test]
    fn bad_scaling_fails_on_crossing_relation() {
        let mut w = vec![RationalFunction::zero(); 4];
        w[0] = RationalFunction::one();
        let d = diagonal_derivation(2, &w).unwrap();
        let failed: Vec<String> = check_derivation(&d, LIMIT).into_iter().filter(|c| !c.passed).map(|c| c.name).collect();
        assert_eq!(failed.len(), 1);
        assert!(failed[0].starts_with("Y22*Y11"), "{failed:?}");
    }

    #[test]
    fn sl_derivations() {
        assert_eq!(
            sl_basis_derivation(3, 1).unwrap(),
            basis_derivation(3, 1).unwrap().add(&basis_derivation(3, 3).unwrap())
        );
        assert_eq!(
            sl_basis_derivation(2, 1).unwrap(),
            basis_derivation(2, 1).unwrap().sub(&basis_derivation(2, 3).unwrap())
        );
        assert_eq!(sl_basis_derivation(2, 2).unwrap(), basis_derivation(2, 2).unwrap());
        assert!(matches!(sl_basis_derivation(3, 3), Err(QmatError::IndexOutOfRange(_))));
        assert!(matches!(sl_basis_derivation(2, 3), Err(QmatError::IndexOutOfRange(_))));
        assert!(annihilates_qdet(&sl_basis_derivation(2, 1).unwrap(), LIMIT).unwrap());
        assert!(annihilates_qdet(&sl_basis_derivation(3, 1).unwrap(), LIMIT).unwrap());
        assert!(!annihilates_qdet(&basis_derivation(2, 1).unwrap(), LIMIT).unwrap());
    }
}
