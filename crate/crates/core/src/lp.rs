//! Phase-one simplex for feasibility of `A·w = b, w ≥ 0`.
//!
//! Dense tableau with Bland's rule, generic over [`Scalar`] so the same code
//! runs in exact rational arithmetic or in doubles with a pivot tolerance.

use alloc::vec;
use alloc::vec::Vec;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility<T> {
    pub feasible: bool,
    /// A nonnegative solution, when one exists.
    pub solution: Option<Vec<T>>,
    /// Optimal sum of artificial variables; zero exactly when feasible.
    pub infeasibility: T,
}

/// Decides whether `a · w = b` has a solution with `w ≥ 0`.
///
/// `a` is row-major with `b.len()` rows. For doubles, feasibility is declared
/// when the phase-one optimum is at most `margin`; pass zero for exact types.
pub fn phase_one<T: Scalar>(a: &[Vec<T>], b: &[T], margin: &T) -> Feasibility<T> {
    let m = b.len();
    assert_eq!(a.len(), m, "row count mismatch");
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;
    let rhs = width - 1;

    // Tableau rows 0..m, objective row m. Artificial for row i is column n+i.
    let mut t: Vec<Vec<T>> = Vec::with_capacity(m + 1);
    for (row, bi) in a.iter().zip(b) {
        assert_eq!(row.len(), n, "ragged constraint matrix");
        let flip = bi.is_negative();
        let mut r = vec![T::zero(); width];
        for (dst, v) in r.iter_mut().zip(row) {
            *dst = if flip { -v.clone() } else { v.clone() };
        }
        r[rhs] = if flip { -bi.clone() } else { bi.clone() };
        t.push(r);
    }
    for (i, row) in t.iter_mut().enumerate() {
        row[n + i] = T::one();
    }
    let mut obj = vec![T::zero(); width];
    for row in &t {
        for j in 0..n {
            obj[j] = obj[j].clone() - row[j].clone();
        }
        obj[rhs] = obj[rhs].clone() - row[rhs].clone();
    }
    t.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Bland: lowest-index column with negative reduced cost.
    while let Some(enter) = (0..n + m).find(|&j| t[m][j].is_negative_tol()) {
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            if !t[i][enter].is_positive_tol() {
                continue;
            }
            let ratio = t[i][rhs].clone() / t[i][enter].clone();
            let better = match &leave {
                None => true,
                Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((pivot_row, _)) = leave else {
            // Unbounded direction cannot occur in phase one (objective ≥ 0).
            break;
        };
        pivot(&mut t, pivot_row, enter);
        basis[pivot_row] = enter;
    }

    let infeasibility = -t[m][rhs].clone();
    let feasible = infeasibility <= *margin;
    let solution = feasible.then(|| {
        let mut w = vec![T::zero(); n];
        for (i, &var) in basis.iter().enumerate() {
            if var < n {
                w[var] = t[i][rhs].clone();
            }
        }
        w
    });
    Feasibility {
        feasible,
        solution,
        infeasibility,
    }
}

fn pivot<T: Scalar>(t: &mut [Vec<T>], row: usize, col: usize) {
    let p = t[row][col].clone();
    for v in t[row].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let factor = r[col].clone();
        for (v, pv) in r.iter_mut().zip(&pivot_row) {
            *v = v.clone() - factor.clone() * pv.clone();
        }
    }
}
