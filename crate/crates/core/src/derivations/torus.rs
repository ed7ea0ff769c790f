use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::check::Check;
use crate::error::{QmatError, Result};
use crate::kernel::{GeneratorIndex, RationalFunction};
use crate::qtorus::{is_central_monomial, TorusElement};
use crate::terms::ExponentVector;
use crate::tower::Tower;

use super::{check_derivation, MatrixDerivation, TorusDerivation};

impl TorusDerivation {
    /// `d(x)` on Laurent monomials, using `d(t^{-1}) = -t^{-1} d(t) t^{-1}`.
    pub fn leibniz_extend(&self, x: &TorusElement) -> Result<TorusElement> {
        let n = self.n();
        if x.n() != n {
            return Err(QmatError::DimensionMismatch { expected: n, found: x.n() });
        }
        let mut inverse_images: Vec<Option<TorusElement>> = vec![None; n * n];
        let mut out = TorusElement::zero(n);
        for (exp, c) in x.terms() {
            // T^γ is the ordered product of its unit factors T_g^{±1}
            let factors: Vec<(usize, i64)> = exp
                .entries(n)
                .flat_map(|(g, e)| std::iter::repeat_n((g.flat(n), e.signum()), e.unsigned_abs() as usize))
                .collect();
            let mut prefix = vec![0i64; n * n];
            let mut suffix = exp.as_slice().to_vec();
            for &(k, s) in &factors {
                suffix[k] -= s;
                let image = if s > 0 {
                    self.images()[k].clone()
                } else {
                    if inverse_images[k].is_none() {
                        let inv = TorusElement::generator(n, GeneratorIndex::from_flat(k, n)).invert_monomial()?;
                        inverse_images[k] = Some(-&(&(&inv * &self.images()[k]) * &inv));
                    }
                    inverse_images[k].clone().unwrap()
                };
                if !image.is_zero() {
                    let left = TorusElement::from_exponents(n, ExponentVector::from_vec(prefix.clone()));
                    let right = TorusElement::from_exponents(n, ExponentVector::from_vec(suffix.clone()));
                    out = &out + &(&(&left * &image) * &right).scale(c);
                }
                prefix[k] += s;
            }
        }
        Ok(out)
    }

    /// `θ_z: T_{i,α} ↦ z_{i,α} T_{i,α}`.
    pub fn diagonal(n: usize, z: &[TorusElement]) -> Result<Self> {
        if z.len() != n * n {
            return Err(QmatError::DimensionMismatch { expected: n * n, found: z.len() });
        }
        Ok(Self::from_fn(n, |g| &z[g.flat(n)] * &TorusElement::generator(n, g)))
    }
}

/// Checks `d` against every relation `T_l T_k = q^{b_{l,k}} T_k T_l`.
pub fn check_torus_derivation(d: &TorusDerivation) -> Vec<Check> {
    let n = d.n();
    let mut out = Vec::new();
    for k in 0..n * n {
        for l in k + 1..n * n {
            let (gk, gl) = (GeneratorIndex::from_flat(k, n), GeneratorIndex::from_flat(l, n));
            let (tk, tl) = (TorusElement::generator(n, gk), TorusElement::generator(n, gl));
            let lhs = &(&d.images()[l] * &tk) + &(&tl * &d.images()[k]);
            let rhs = &(&d.images()[k] * &tl) + &(&tk * &d.images()[l]);
            let e = crate::kernel::commutation_entry(gl, gk);
            out.push(Check::equal(
                format!("T{}{}*T{}{} = q^{e}*T{}{}*T{}{}", gl.row, gl.col, gk.row, gk.col, gk.row, gk.col, gl.row, gl.col),
                &lhs,
                &rhs.scale(&RationalFunction::q_pow(e)),
            ));
        }
    }
    out
}

/// `z_{i,α} + z_{k,δ} = z_{i,δ} + z_{k,α}` whenever `i < k` and `α < δ`.
pub fn check_z_condition(n: usize, z: &[TorusElement]) -> bool {
    let at = |r: usize, c: usize| &z[GeneratorIndex::new(r, c).flat(n)];
    for i in 1..=n {
        for k in i + 1..=n {
            for a in 1..=n {
                for d in a + 1..=n {
                    if at(i, a) + at(k, d) != at(i, d) + at(k, a) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Extends a derivation of `O_q(M_n)` to the quantum torus.
///
/// The top row of the tower gets `embed(d(Y_{i,α}))`; each lower row is then
/// obtained by differentiating the deletion formula
/// `Y^{(r)}_{i,α} = Y^{(r⁺)}_{i,α} - Y^{(r⁺)}_{i,β}(Y^{(r⁺)}_{j,β})^{-1}Y^{(r⁺)}_{j,α}`.
pub fn lift_to_torus(d: &MatrixDerivation, tower: &Tower) -> Result<TorusDerivation> {
    let n = d.n();
    if tower.n() != n {
        return Err(QmatError::DimensionMismatch { expected: tower.n(), found: n });
    }
    let max_terms = tower.context().max_terms();
    if let Some(bad) = check_derivation(d, max_terms).into_iter().find(|c| !c.passed) {
        return Err(QmatError::NotADerivation(bad.name));
    }
    let mut current: Vec<TorusElement> = d.images().iter().map(|x| tower.embed(x)).collect::<Result<_>>()?;
    let steps = tower.context().steps().to_vec();
    for t in (0..steps.len() - 1).rev() {
        let pivot = steps[t];
        if pivot.j == 1 || pivot.beta == 1 {
            continue;
        }
        let upper = tower.step_entries(steps[t + 1])?;
        let pg = GeneratorIndex::new(pivot.j, pivot.beta).flat(n);
        let b_inv = upper[pg].invert_monomial()?;
        let d_b_inv = -&(&(&b_inv * &current[pg]) * &b_inv);
        let mut next = current.clone();
        for i in 1..pivot.j {
            for alpha in 1..pivot.beta {
                let g = GeneratorIndex::new(i, alpha).flat(n);
                let a = GeneratorIndex::new(i, pivot.beta).flat(n);
                let c = GeneratorIndex::new(pivot.j, alpha).flat(n);
                let (ua, uc) = (&upper[a], &upper[c]);
                let term = &(&(&(&current[a] * &b_inv) * uc) + &(&(ua * &d_b_inv) * uc)) + &(&(ua * &b_inv) * &current[c]);
                next[g] = &current[g] - &term;
                if next[g].len() > max_terms {
                    return Err(QmatError::ResourceLimit { what: "lifted image".into(), limit: max_terms });
                }
            }
        }
        current = next;
    }
    TorusDerivation::new(n, current)
}

/// `d = ad_x + θ` with `x` free of central monomials and `θ(T_a) = z_a T_a`
/// for central `z_a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusDecomposition {
    pub x: TorusElement,
    pub z: Vec<TorusElement>,
}

impl TorusDecomposition {
    /// `ad_x + θ_z`.
    pub fn reconstruct(&self, max_terms: usize) -> Result<TorusDerivation> {
        let n = self.x.n();
        Ok(TorusDerivation::ad(&self.x, max_terms)?.add(&TorusDerivation::diagonal(n, &self.z)?))
    }

    pub fn z_at(&self, g: GeneratorIndex) -> &TorusElement {
        &self.z[g.flat(self.x.n())]
    }
}

/// Coefficient `f_a(γ)` of `T^γ` in `(T^γ T_a - T_a T^γ) T_a^{-1}`.
fn separating_factor(n: usize, gamma: &ExponentVector, a: usize) -> Result<RationalFunction> {
    let tg = TorusElement::from_exponents(n, gamma.clone());
    let ta = TorusElement::generator(n, GeneratorIndex::from_flat(a, n));
    let comm = &(&tg * &ta) - &(&ta * &tg);
    Ok((&comm * &ta.invert_monomial()?).coefficient(gamma))
}

/// Splits a torus derivation into inner and central-diagonal parts.
///
/// Writing `d(T_a) T_a^{-1} = Σ_γ c_{a,γ} T^γ`, central `γ` go to `z_a`; for
/// other `γ` the first generator `a` with `f_a(γ) ≠ 0` fixes
/// `x_γ = c_{a,γ} / f_a(γ)`, and every other generator must agree.
pub fn decompose_torus_derivation(d: &TorusDerivation) -> Result<TorusDecomposition> {
    let n = d.n();
    let parts: Vec<TorusElement> = (0..n * n)
        .map(|a| {
            let ta = TorusElement::generator(n, GeneratorIndex::from_flat(a, n));
            Ok(&d.images()[a] * &ta.invert_monomial()?)
        })
        .collect::<Result<_>>()?;
    let z: Vec<TorusElement> = parts.iter().map(|p| p.filter_terms(|e| is_central_monomial(n, e))).collect();
    let support: BTreeSet<ExponentVector> = parts
        .iter()
        .flat_map(|p| p.terms().map(|(e, _)| e.clone()))
        .filter(|e| !is_central_monomial(n, e))
        .collect();
    let mut x = TorusElement::zero(n);
    for gamma in support {
        let factors: Vec<RationalFunction> = (0..n * n).map(|a| separating_factor(n, &gamma, a)).collect::<Result<_>>()?;
        let a0 = factors.iter().position(|f| !f.is_zero()).expect("non-central monomials fail to commute with some generator");
        let xg = parts[a0].coefficient(&gamma).div(&factors[a0])?;
        for a in 0..n * n {
            if parts[a].coefficient(&gamma) != &xg * &factors[a] {
                return Err(QmatError::Inconsistent(format!(
                    "coefficient of T^{:?} seen from generators {} and {} disagree",
                    gamma.as_slice(),
                    GeneratorIndex::from_flat(a0, n),
                    GeneratorIndex::from_flat(a, n)
                )));
            }
        }
        x = &x + &TorusElement::monomial(n, gamma, xg);
    }
    Ok(TorusDecomposition { x, z })
}
