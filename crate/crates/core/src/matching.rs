//! Exact maximum-weight bipartite matching.
//!
//! A potentials-based Hungarian algorithm in O(n^3). Maximisation is reduced
//! to minimisation by negating weights; rectangular matrices are padded to
//! square with zero-weight dummy cells, and forbidden edges (weight `-inf`)
//! become a finite cost penalty large enough that any feasible matching beats
//! any infeasible one. If the optimum still crosses a forbidden edge, no
//! feasible full matching exists and [`Error::InfeasibleMatching`] is raised.
//!
//! Ties between optimal matchings are tidied deterministically: partners of two
//! left nodes are swapped whenever that keeps the total weight bit-for-bit
//! identical and lowers the pair list lexicographically. A matrix of equal
//! weights therefore yields the identity pairing.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major weight matrix, entries finite or `-inf` (forbidden).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix<T> {
    rows: usize,
    cols: usize,
    w: Vec<T>,
}

impl<T: Scalar> WeightMatrix<T> {
    /// Matrix filled with `value`.
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self {
            rows,
            cols,
            w: vec![value; rows * cols],
        }
    }

    /// Matrix built cell by cell from `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut w = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                w.push(f(r, c));
            }
        }
        Self { rows, cols, w }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.w[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.w[row * self.cols + col] = value;
    }

    /// Transposed copy.
    pub fn transposed(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }
}

/// Matching result: `pairs` sorted by left index, `total_weight` the sum of
/// matched weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching<T> {
    pub pairs: Vec<(usize, usize)>,
    pub total_weight: T,
}

/// Maximum-weight matching covering all of the smaller side.
pub fn max_weight_matching<T: Scalar>(weights: &WeightMatrix<T>) -> Result<Matching<T>> {
    let (rows, cols) = (weights.rows(), weights.cols());
    if rows == 0 || cols == 0 {
        return Err(Error::Config(
            "weight matrix needs at least one row and one column".into(),
        ));
    }
    let mut max_abs = T::zero();
    for r in 0..rows {
        for c in 0..cols {
            let w = weights.get(r, c);
            if w.is_nan() || w == T::infinity() {
                return Err(Error::Config(
                    "weights must be finite or -inf".into(),
                ));
            }
            if w.is_finite() {
                max_abs = max_abs.max(w.abs());
            }
        }
    }

    let n = rows.max(cols);
    // Forbidden-edge penalty: larger than any possible swing of a full matching.
    let penalty = (max_abs + T::one()) * T::cast(2 * n + 2);
    let cost = |i: usize, j: usize| -> T {
        if i < rows && j < cols {
            let w = weights.get(i, j);
            if w.is_finite() {
                -w
            } else {
                penalty
            }
        } else {
            T::zero()
        }
    };

    let row_of_col = hungarian_min(n, cost);

    let mut col_of_row: Vec<Option<usize>> = vec![None; rows];
    for (j, &i) in row_of_col.iter().enumerate() {
        if i < rows && j < cols {
            if weights.get(i, j) == T::neg_infinity() {
                return Err(Error::InfeasibleMatching);
            }
            col_of_row[i] = Some(j);
        }
    }

    canonicalise_ties(weights, &mut col_of_row);

    let mut pairs = Vec::new();
    let mut total_weight = T::zero();
    for (i, col) in col_of_row.iter().enumerate() {
        if let Some(j) = col {
            pairs.push((i, *j));
            total_weight += weights.get(i, *j);
        }
    }
    Ok(Matching {
        pairs,
        total_weight,
    })
}

/// Classic Hungarian algorithm with row/column potentials on an `n x n`
/// minimisation problem. Returns the row matched to each column.
fn hungarian_min<T: Scalar>(n: usize, cost: impl Fn(usize, usize) -> T) -> Vec<usize> {
    const FREE: usize = usize::MAX;
    let mut u = vec![T::zero(); n];
    let mut v = vec![T::zero(); n + 1];
    // Row matched to each column; index n is the virtual column that seeds
    // each augmenting search.
    let mut row_of_col = vec![FREE; n + 1];
    let mut way = vec![n; n + 1];

    for i in 0..n {
        row_of_col[n] = i;
        let mut j0 = n;
        let mut minv = vec![T::infinity(); n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = T::infinity();
            let mut j1 = n;
            for j in 0..n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            debug_assert!(delta.is_finite(), "augmenting path must exist");
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == FREE {
                break;
            }
        }
        // Walk the alternating path backwards, reassigning columns.
        while j0 != n {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
        }
    }
    row_of_col.truncate(n);
    row_of_col
}

/// Swaps partners between equal-weight alternatives so the final pair list is
/// lexicographically smallest among the optima reachable by two-row exchanges.
fn canonicalise_ties<T: Scalar>(weights: &WeightMatrix<T>, col_of_row: &mut [Option<usize>]) {
    let finite = |r: usize, c: usize| weights.get(r, c).is_finite();
    loop {
        let mut changed = false;
        for a in 0..col_of_row.len() {
            for b in (a + 1)..col_of_row.len() {
                match (col_of_row[a], col_of_row[b]) {
                    (Some(ca), Some(cb))
                        if cb < ca
                            && finite(a, cb)
                            && finite(b, ca)
                            && weights.get(a, ca) + weights.get(b, cb)
                                == weights.get(a, cb) + weights.get(b, ca) =>
                    {
                        col_of_row[a] = Some(cb);
                        col_of_row[b] = Some(ca);
                        changed = true;
                    }
                    (None, Some(cb))
                        if finite(a, cb) && weights.get(a, cb) == weights.get(b, cb) =>
                    {
                        col_of_row[a] = Some(cb);
                        col_of_row[b] = None;
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
        if !changed {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: usize, cols: usize, data: &[f64]) -> WeightMatrix<f64> {
        assert_eq!(data.len(), rows * cols);
        WeightMatrix::from_fn(rows, cols, |r, c| data[r * cols + c])
    }

    #[test]
    fn two_by_two_tie_takes_identity() {
        // Both diagonals sum to 5; the identity pairing wins the tie.
        let m = matching(&matrix(2, 2, &[1.0, 2.0, 3.0, 4.0]));
        assert_eq!(m.pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(m.total_weight, 5.0);
    }

    fn matching(w: &WeightMatrix<f64>) -> Matching<f64> {
        max_weight_matching(w).unwrap()
    }

    #[test]
    fn all_equal_weights_give_identity() {
        let m = matching(&WeightMatrix::filled(4, 4, 7.0));
        assert_eq!(m.pairs, vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        assert_eq!(m.total_weight, 28.0);
    }

    #[test]
    fn picks_clearly_best_assignment() {
        let m = matching(&matrix(3, 3, &[10.0, 1.0, 1.0, 1.0, 10.0, 1.0, 1.0, 1.0, 10.0]));
        assert_eq!(m.pairs, vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(m.total_weight, 30.0);
        let m = matching(&matrix(2, 2, &[1.0, 10.0, 10.0, 1.0]));
        assert_eq!(m.pairs, vec![(0, 1), (1, 0)]);
        assert_eq!(m.total_weight, 20.0);
    }

    #[test]
    fn wide_matrix_covers_all_rows() {
        let m = matching(&matrix(1, 3, &[1.0, 3.0, 2.0]));
        assert_eq!(m.pairs, vec![(0, 1)]);
        assert_eq!(m.total_weight, 3.0);
    }

    #[test]
    fn tall_matrix_covers_all_columns() {
        let m = matching(&matrix(3, 1, &[1.0, 5.0, 2.0]));
        assert_eq!(m.pairs, vec![(1, 0)]);
        assert_eq!(m.total_weight, 5.0);
    }

    #[test]
    fn negative_weights_still_cover_smaller_side() {
        let m = matching(&matrix(2, 2, &[-1.0, -2.0, -3.0, -4.0]));
        assert_eq!(m.pairs.len(), 2);
        assert_eq!(m.total_weight, -5.0);
    }

    #[test]
    fn forbidden_edges_route_around() {
        let inf = f64::NEG_INFINITY;
        let m = matching(&matrix(2, 2, &[5.0, inf, inf, 3.0]));
        assert_eq!(m.pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(m.total_weight, 8.0);
    }

    #[test]
    fn fully_forbidden_is_infeasible() {
        let inf = f64::NEG_INFINITY;
        let err = max_weight_matching(&matrix(2, 2, &[inf, 1.0, inf, 2.0])).unwrap_err();
        assert_eq!(err, Error::InfeasibleMatching);
        let err = max_weight_matching(&matrix(1, 1, &[inf])).unwrap_err();
        assert_eq!(err, Error::InfeasibleMatching);
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(max_weight_matching(&WeightMatrix::<f64>::filled(0, 3, 0.0)).is_err());
        assert!(max_weight_matching(&matrix(1, 1, &[f64::NAN])).is_err());
        assert!(max_weight_matching(&matrix(1, 1, &[f64::INFINITY])).is_err());
    }

    #[test]
    fn matches_brute_force_on_small_integers() {
        // 4x4 with integer weights, checked against exhaustive enumeration.
        let data = [
            7.0, 2.0, 9.0, 4.0, //
            3.0, 8.0, 5.0, 1.0, //
            6.0, 6.0, 2.0, 9.0, //
            1.0, 4.0, 7.0, 3.0,
        ];
        let w = matrix(4, 4, &data);
        let mut best = f64::NEG_INFINITY;
        let mut perm = [0usize, 1, 2, 3];
        permute(&mut perm, 0, &mut |p| {
            let total: f64 = (0..4).map(|r| data[r * 4 + p[r]]).sum();
            if total > best {
                best = total;
            }
        });
        assert_eq!(matching(&w).total_weight, best);
    }

    fn permute(p: &mut [usize; 4], k: usize, visit: &mut impl FnMut(&[usize; 4])) {
        if k == 4 {
            visit(p);
            return;
        }
        for i in k..4 {
            p.swap(k, i);
            permute(p, k + 1, visit);
            p.swap(k, i);
        }
    }
}
