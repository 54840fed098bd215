//! Column-oriented Gaussian elimination over a single field.
//!
//! Everything here works on raw canonical encodings (`u64`) and a shared
//! `FieldSpec`; callers validate that their elements actually belong to that
//! field before dropping down to this layer.

use crate::field::{raw_add, raw_inv, raw_mul, raw_neg, FieldSpec};

/// Rank of the matrix whose columns are `cols`, each of length `rows`.
pub(crate) fn rank_cols(spec: &FieldSpec, rows: usize, cols: &[&[u64]]) -> usize {
    let mut work: Vec<Vec<u64>> = cols.iter().map(|c| c.to_vec()).collect();
    let mut rank = 0usize;
    let mut pivot_row = vec![usize::MAX; work.len()];
    for col in 0..work.len() {
        debug_assert_eq!(work[col].len(), rows);
        // Find a pivot row unused by earlier columns.
        let used: Vec<usize> = pivot_row[..col]
            .iter()
            .copied()
            .filter(|&r| r != usize::MAX)
            .collect();
        let Some(r) = (0..rows).find(|r| !used.contains(r) && work[col][*r] != 0) else {
            continue;
        };
        pivot_row[col] = r;
        rank += 1;
        let inv = raw_inv(spec, work[col][r]);
        let pivot = work[col].clone();
        // Eliminate this row from all later columns.
        for later in work.iter_mut().skip(col + 1) {
            if later[r] == 0 {
                continue;
            }
            let factor = raw_mul(spec, later[r], inv);
            for row in 0..rows {
                let sub = raw_mul(spec, factor, pivot[row]);
                later[row] = raw_add(spec, later[row], raw_neg(spec, sub));
            }
        }
    }
    rank
}

/// Does `v` lie in the span of `basis`?
pub(crate) fn in_span(spec: &FieldSpec, rows: usize, basis: &[&[u64]], v: &[u64]) -> bool {
    let base_rank = rank_cols(spec, rows, basis);
    let mut with: Vec<&[u64]> = basis.to_vec();
    with.push(v);
    rank_cols(spec, rows, &with) == base_rank
}

/// y = sum_i x[i] * cols[i], a matrix-vector product with a column-major matrix.
pub(crate) fn mat_vec(spec: &FieldSpec, rows: usize, cols: &[Vec<u64>], x: &[u64]) -> Vec<u64> {
    debug_assert_eq!(cols.len(), x.len());
    let mut y = vec![0u64; rows];
    for (col, &coef) in cols.iter().zip(x) {
        if coef == 0 {
            continue;
        }
        for (yr, &cr) in y.iter_mut().zip(col) {
            *yr = raw_add(spec, *yr, raw_mul(spec, coef, cr));
        }
    }
    y
}

/// Inverse of the square column-major matrix, or None if singular.
pub(crate) fn invert(spec: &FieldSpec, n: usize, cols: &[Vec<u64>]) -> Option<Vec<Vec<u64>>> {
    debug_assert_eq!(cols.len(), n);
    // Row-major augmented [A | I], full Gauss-Jordan.
    let mut a = vec![vec![0u64; 2 * n]; n];
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            a[i][j] = v;
        }
    }
    for i in 0..n {
        a[i][n + i] = 1;
    }
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, pivot);
        let inv = raw_inv(spec, a[col][col]);
        for x in a[col].iter_mut() {
            *x = raw_mul(spec, *x, inv);
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col] == 0 {
                continue;
            }
            let factor = row[col];
            for (x, &p) in row.iter_mut().zip(&pivot_row) {
                let sub = raw_mul(spec, factor, p);
                *x = raw_add(spec, *x, raw_neg(spec, sub));
            }
        }
    }
    // Read out the right block column-major.
    let mut out = vec![vec![0u64; n]; n];
    for (j, out_col) in out.iter_mut().enumerate() {
        for (i, slot) in out_col.iter_mut().enumerate() {
            *slot = a[i][n + j];
        }
    }
    Some(out)
}

/// Lexicographically smallest solution x of sum_i x[i] * cols[i] = target,
/// comparing coefficient vectors left to right by canonical element order.
/// None if the system is inconsistent.
pub(crate) fn solve_lex_min(
    spec: &FieldSpec,
    rows: usize,
    cols: &[&[u64]],
    target: &[u64],
) -> Option<Vec<u64>> {
    let m = cols.len();
    // Residual after subtracting the fixed prefix.
    let feasible = |rest: &[&[u64]], residual: &[u64]| -> bool {
        let r = rank_cols(spec, rows, rest);
        let mut with: Vec<&[u64]> = rest.to_vec();
        with.push(residual);
        rank_cols(spec, rows, &with) == r
    };
    let mut residual: Vec<u64> = target.to_vec();
    if !feasible(cols, &residual) {
        return None;
    }
    let q = spec.order();
    let mut x = vec![0u64; m];
    for i in 0..m {
        let rest = &cols[i + 1..];
        let mut chosen = None;
        for cand in 0..q {
            // residual' = residual - cand * cols[i]
            let mut res2 = residual.clone();
            if cand != 0 {
                for (rr, &cv) in res2.iter_mut().zip(cols[i]) {
                    let sub = raw_mul(spec, cand, cv);
                    *rr = raw_add(spec, *rr, raw_neg(spec, sub));
                }
            }
            if feasible(rest, &res2) {
                chosen = Some((cand, res2));
                break;
            }
        }
        let (cand, res2) = chosen.expect("outer feasibility guarantees a choice");
        x[i] = cand;
        residual = res2;
    }
    debug_assert!(residual.iter().all(|&v| v == 0));
    Some(x)
}
