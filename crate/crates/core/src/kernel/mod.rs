//! Ambient configuration and exact scalars.
//!
//! Generators of `O_q(M_n)` (and of the quantum torus) are indexed by
//! `(row, col)` pairs in lexicographic order; [`GeneratorIndex::flat`] gives
//! the zero-based position used by every dense exponent vector in the crate.

mod lattice;
mod poly;
mod rational;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QmatError, Result};

pub use lattice::{hermite_normal_form, integer_kernel, solve_integer_combination};
pub use poly::IntPoly;
pub use rational::RationalFunction;

/// Default cap on intermediate term counts; see [`AlgebraContext::max_terms`].
pub const DEFAULT_MAX_TERMS: usize = 200_000;

/// Largest `n` accepted by [`build_context`]'s callers that run exhaustive
/// certification; arithmetic itself has no upper bound.
pub const MAX_SUITE_N: usize = 4;

/// Position `(row, col)` of a generator, both one-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorIndex {
    pub row: usize,
    pub col: usize,
}

impl GeneratorIndex {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Zero-based lexicographic position, `(row-1)*n + (col-1)`.
    pub fn flat(self, n: usize) -> usize {
        (self.row - 1) * n + (self.col - 1)
    }

    pub fn from_flat(flat: usize, n: usize) -> Self {
        Self {
            row: flat / n + 1,
            col: flat % n + 1,
        }
    }

    pub fn checked(row: usize, col: usize, n: usize) -> Result<Self> {
        if (1..=n).contains(&row) && (1..=n).contains(&col) {
            Ok(Self { row, col })
        } else {
            Err(QmatError::IndexOutOfRange(format!(
                "generator ({row},{col}) outside [1,{n}]^2"
            )))
        }
    }

    /// All `n^2` generators in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = GeneratorIndex> {
        (0..n * n).map(move |k| GeneratorIndex::from_flat(k, n))
    }
}

impl fmt::Display for GeneratorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// A step `(j, beta)` of the deleting-derivations tower.
///
/// Steps range over `([1,n]^2 ∪ {(n,n+1)}) \ {(1,1)}` in lexicographic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StepIndex {
    pub j: usize,
    pub beta: usize,
}

impl StepIndex {
    pub fn new(j: usize, beta: usize) -> Self {
        Self { j, beta }
    }

    /// The least step `(1,2)`.
    pub fn first() -> Self {
        Self { j: 1, beta: 2 }
    }

    /// The top step `(n, n+1)`, where the tower generators are the `Y`s.
    pub fn top(n: usize) -> Self {
        Self { j: n, beta: n + 1 }
    }

    pub fn is_valid(self, n: usize) -> bool {
        match (self.j, self.beta) {
            (1, 1) => false,
            (j, b) if j == n && b == n + 1 => true,
            (j, b) => (1..=n).contains(&j) && (1..=n).contains(&b),
        }
    }

    /// The next step in lexicographic order, `None` at the top.
    pub fn successor(self, n: usize) -> Option<Self> {
        if self == Self::top(n) {
            return None;
        }
        if self.beta < n || (self.j == n && self.beta == n) {
            Some(Self::new(self.j, self.beta + 1))
        } else {
            Some(Self::new(self.j + 1, 1))
        }
    }

    /// All steps in increasing order.
    pub fn all(n: usize) -> Vec<StepIndex> {
        let mut out = vec![Self::first()];
        while let Some(next) = out.last().unwrap().successor(n) {
            out.push(next);
        }
        out
    }
}

impl fmt::Display for StepIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.j, self.beta)
    }
}

/// Entry of the commutation matrix between generators `a` and `b`:
/// `T_a T_b = q^{entry} T_b T_a`.
pub fn commutation_entry(a: GeneratorIndex, b: GeneratorIndex) -> i64 {
    use std::cmp::Ordering::*;
    match (a.row.cmp(&b.row), a.col.cmp(&b.col)) {
        (Equal, Less) => 1,
        (Equal, Greater) => -1,
        (Less, Equal) => 1,
        (Greater, Equal) => -1,
        _ => 0,
    }
}

/// Dimension, commutation matrix and tower steps for one `n`.
#[derive(Clone, Debug)]
pub struct AlgebraContext {
    n: usize,
    b: Vec<Vec<i64>>,
    steps: Vec<StepIndex>,
    max_terms: usize,
}

impl AlgebraContext {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The `n^2 x n^2` skew-symmetric matrix with blocks `A` on the diagonal,
    /// `I` above and `-I` below.
    pub fn b_matrix(&self) -> &[Vec<i64>] {
        &self.b
    }

    pub fn steps(&self) -> &[StepIndex] {
        &self.steps
    }

    /// Upper bound on intermediate term counts before an operation gives up
    /// with [`QmatError::ResourceLimit`].
    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    pub fn generators(&self) -> impl Iterator<Item = GeneratorIndex> {
        GeneratorIndex::all(self.n)
    }

    pub fn step_position(&self, step: StepIndex) -> Result<usize> {
        self.steps
            .iter()
            .position(|&s| s == step)
            .ok_or_else(|| QmatError::IndexOutOfRange(format!("step {step} not in E for n={}", self.n)))
    }

    /// Integer kernel of `B`, in Hermite normal form.
    pub fn kernel_basis(&self) -> Vec<Vec<i64>> {
        integer_kernel(&self.b)
    }
}

/// Builds the context for `n >= 2`.
pub fn build_context(n: usize) -> Result<AlgebraContext> {
    if n < 2 {
        return Err(QmatError::InvalidDimension(n));
    }
    let size = n * n;
    let mut b = vec![vec![0i64; size]; size];
    for (k, row) in b.iter_mut().enumerate() {
        for (l, entry) in row.iter_mut().enumerate() {
            let (bi, bj) = (k / n, l / n);
            let (ri, rj) = (k % n, l % n);
            *entry = match bi.cmp(&bj) {
                // A: +1 above the diagonal, -1 below
                std::cmp::Ordering::Equal => (rj as i64 - ri as i64).signum(),
                std::cmp::Ordering::Less => i64::from(ri == rj),
                std::cmp::Ordering::Greater => -i64::from(ri == rj),
            };
        }
    }
    Ok(AlgebraContext {
        n,
        b,
        steps: StepIndex::all(n),
        max_terms: DEFAULT_MAX_TERMS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_matrix_for_n2() {
        let ctx = build_context(2).unwrap();
        assert_eq!(
            ctx.b_matrix(),
            &[
                vec![0, 1, 1, 0],
                vec![-1, 0, 0, 1],
                vec![-1, 0, 0, 1],
                vec![0, -1, -1, 0]
            ]
        );
    }

    #[test]
    fn b_is_skew_and_matches_entry_rule() {
        for n in 2..=5 {
            let ctx = build_context(n).unwrap();
            let b = ctx.b_matrix();
            for k in 0..n * n {
                for l in 0..n * n {
                    assert_eq!(b[k][l], -b[l][k]);
                    let e = commutation_entry(GeneratorIndex::from_flat(k, n), GeneratorIndex::from_flat(l, n));
                    assert_eq!(b[k][l], e);
                }
            }
        }
    }

    #[test]
    fn kernel_rank_is_n() {
        for n in 2..=4 {
            let ctx = build_context(n).unwrap();
            assert_eq!(ctx.kernel_basis().len(), n);
        }
    }

    #[test]
    fn invalid_dimension() {
        assert!(matches!(build_context(1), Err(QmatError::InvalidDimension(1))));
        assert!(matches!(build_context(0), Err(QmatError::InvalidDimension(0))));
    }

    #[test]
    fn flat_index_round_trip() {
        for n in 2..=4 {
            for k in 0..n * n {
                let g = GeneratorIndex::from_flat(k, n);
                assert_eq!(g.flat(n), k);
                assert_eq!(g.flat(n), (g.row - 1) * n + g.col - 1);
            }
        }
    }

    #[test]
    fn steps_in_order() {
        let s = StepIndex::all(2);
        assert_eq!(
            s,
            vec![StepIndex::new(1, 2), StepIndex::new(2, 1), StepIndex::new(2, 2), StepIndex::new(2, 3)]
        );
        for n in 2..=4 {
            let s = StepIndex::all(n);
            assert_eq!(s.len(), n * n);
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            assert!(s.iter().all(|x| x.is_valid(n)));
            assert_eq!(*s.last().unwrap(), StepIndex::top(n));
            assert_eq!(StepIndex::top(n).successor(n), None);
        }
        assert_eq!(StepIndex::new(1, 3).successor(3), Some(StepIndex::new(2, 1)));
    }
}
