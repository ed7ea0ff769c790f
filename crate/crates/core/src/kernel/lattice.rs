//! Small integer lattices: row Hermite normal form, integer kernels and
//! integer solutions of `sum k_i b_i = t`.
//!
//! Matrices here are at most `n^2 x n^2` with `n <= 4` and tiny entries, so
//! plain `i128` with overflow checks is enough.

fn checked_axpy(row: &mut [i128], factor: i128, pivot: &[i128]) {
    for (x, p) in row.iter_mut().zip(pivot) {
        let t = factor.checked_mul(*p).expect("lattice entry overflow");
        *x = x.checked_sub(t).expect("lattice entry overflow");
    }
}

/// Reduces `rows` in place to row Hermite normal form over the first
/// `width` columns. Row operations act on whole rows, so trailing columns
/// record the transformation when the caller appends an identity block.
/// Returns the pivot columns; rows past `pivots.len()` are zero on the left
/// block.
fn echelon(rows: &mut [Vec<i128>], width: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        if r == rows.len() {
            break;
        }
        loop {
            let best = (r..rows.len())
                .filter(|&i| rows[i][c] != 0)
                .min_by_key(|&i| rows[i][c].unsigned_abs());
            let Some(best) = best else { break };
            rows.swap(r, best);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c] != 0 {
                    let f = rows[i][c].div_euclid(rows[r][c]);
                    let pivot = rows[r].clone();
                    checked_axpy(&mut rows[i], f, &pivot);
                    if rows[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if rows[r][c] == 0 {
            continue;
        }
        if rows[r][c] < 0 {
            for x in rows[r].iter_mut() {
                *x = -*x;
            }
        }
        let pivot = rows[r].clone();
        for i in 0..r {
            let f = rows[i][c].div_euclid(pivot[c]);
            if f != 0 {
                checked_axpy(&mut rows[i], f, &pivot);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Row Hermite normal form of the lattice spanned by `rows`, zero rows
/// dropped. Two generating sets span the same lattice iff their forms agree.
pub fn hermite_normal_form(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let width = rows.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| i128::from(x)).collect())
        .collect();
    let pivots = echelon(&mut m, width);
    m.truncate(pivots.len());
    m.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| i64::try_from(x).expect("lattice entry overflow"))
                .collect()
        })
        .collect()
}

/// A basis (in Hermite normal form) of `{ x in Z^cols : matrix * x = 0 }`.
pub fn integer_kernel(matrix: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    // Row j of [M^T | I] starts as (column j of M, e_j).
    let mut aug: Vec<Vec<i128>> = (0..cols)
        .map(|j| {
            let mut r: Vec<i128> = (0..rows).map(|i| i128::from(matrix[i][j])).collect();
            r.extend((0..cols).map(|k| i128::from(k == j)));
            r
        })
        .collect();
    let pivots = echelon(&mut aug, rows);
    let basis: Vec<Vec<i64>> = aug[pivots.len()..]
        .iter()
        .map(|r| {
            r[rows..]
                .iter()
                .map(|&x| i64::try_from(x).expect("lattice entry overflow"))
                .collect()
        })
        .collect();
    hermite_normal_form(&basis)
}

/// Integer coefficients `k` with `sum_i k_i * basis[i] = target`, if any.
/// When the basis is linearly dependent one solution is returned.
pub fn solve_integer_combination(basis: &[Vec<i64>], target: &[i64]) -> Option<Vec<i64>> {
    let width = target.len();
    let count = basis.len();
    let mut aug: Vec<Vec<i128>> = basis
        .iter()
        .enumerate()
        .map(|(i, b)| {
            assert_eq!(b.len(), width, "basis vector has the wrong length");
            let mut r: Vec<i128> = b.iter().map(|&x| i128::from(x)).collect();
            r.extend((0..count).map(|k| i128::from(k == i)));
            r
        })
        .collect();
    let pivots = echelon(&mut aug, width);
    let mut residual: Vec<i128> = target.iter().map(|&x| i128::from(x)).collect();
    let mut coeffs = vec![0i128; count];
    for (r, &c) in pivots.iter().enumerate() {
        if residual[c] % aug[r][c] != 0 {
            return None;
        }
        let f = residual[c] / aug[r][c];
        checked_axpy(&mut residual, f, &aug[r][..width]);
        for (k, t) in coeffs.iter_mut().zip(&aug[r][width..]) {
            *k = k.checked_add(f * t).expect("lattice entry overflow");
        }
    }
    if residual.iter().any(|&x| x != 0) {
        return None;
    }
    coeffs
        .into_iter()
        .map(|x| i64::try_from(x).ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_is_canonical() {
        let a = hermite_normal_form(&[vec![2, 4], vec![1, 3]]);
        let b = hermite_normal_form(&[vec![1, 3], vec![0, 2], vec![3, 9]]);
        assert_eq!(a, b);
        assert_eq!(a, vec![vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn kernel_of_rank_one_map() {
        let k = integer_kernel(&[vec![1, 2, 3]]);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v[0] + 2 * v[1] + 3 * v[2], 0);
        }
        // (1,1,-1) lies in the span
        assert!(solve_integer_combination(&k, &[1, 1, -1]).is_some());
    }

    #[test]
    fn kernel_is_saturated() {
        // kernel of [2 4] is spanned by (2,-1), not (4,-2)
        let k = integer_kernel(&[vec![2, 4]]);
        assert_eq!(k, vec![vec![2, -1]]);
    }

    #[test]
    fn solve_finds_integer_coordinates_or_none() {
        let basis = vec![vec![2, 0], vec![0, 3]];
        assert_eq!(solve_integer_combination(&basis, &[4, -3]), Some(vec![2, -1]));
        assert_eq!(solve_integer_combination(&basis, &[1, 0]), None);
    }
}
