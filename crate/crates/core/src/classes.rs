//! Membership tests for the generalized-Laplacian class `S` and the
//! diagonally dominant nonnegative class `V`, and the block-level line-sum
//! checks that decide whether a constructive decomposition applies.

use crate::error::{BlockPos, Result};
use crate::linalg::{is_psd, RealMatrix};
use crate::tensor::{partial_transpose, TensorShape};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Flags describing which matrix classes a matrix belongs to.
///
/// `in_s` is the class of symmetric matrices with nonnegative row sums and
/// nonpositive off-diagonal entries; `in_v` the nonnegative symmetric
/// diagonally dominant matrices. The `1` suffix adds unit trace and `_0`
/// adds zero row sums.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassReport {
    pub is_symmetric: bool,
    pub nonneg_row_sums: bool,
    pub nonpos_off_diagonal: bool,
    pub in_s: bool,
    pub unit_trace: bool,
    pub in_s1: bool,
    pub zero_row_sums: bool,
    pub in_s1_0: bool,
    pub is_nonnegative: bool,
    pub diag_dominant: bool,
    pub in_v: bool,
    pub in_v1: bool,
    pub is_psd: bool,
    pub is_valid_density: bool,
    pub tol_used: f64,
}

/// Never fails: non-finite input gives an all-false report.
pub fn classify_membership(a: &RealMatrix, tol: f64) -> ClassReport {
    let n = a.dim();
    if n == 0 || a.as_slice().iter().any(|x| !x.is_finite()) {
        return ClassReport {
            tol_used: tol,
            ..Default::default()
        };
    }
    let mut is_symmetric = true;
    let mut nonpos_off_diagonal = true;
    let mut is_nonnegative = true;
    let mut diag_dominant = true;
    for r in 0..n {
        let mut off_abs = 0.0;
        for c in 0..n {
            let x = a[(r, c)];
            if (x - a[(c, r)]).abs() > tol {
                is_symmetric = false;
            }
            if x < -tol {
                is_nonnegative = false;
            }
            if r != c {
                if x > tol {
                    nonpos_off_diagonal = false;
                }
                off_abs += x.abs();
            }
        }
        if a[(r, r)] - off_abs < -tol {
            diag_dominant = false;
        }
    }
    let row_sums = a.row_sums();
    let nonneg_row_sums = row_sums.iter().all(|&s| s >= -tol);
    let zero_row_sums = row_sums.iter().all(|&s| s.abs() <= tol);
    let unit_trace = (a.trace() - 1.0).abs() <= tol;

    let in_s = is_symmetric && nonneg_row_sums && nonpos_off_diagonal;
    let in_s1 = in_s && unit_trace;
    let in_v = is_symmetric && is_nonnegative && diag_dominant;
    // Gershgorin: S and V members are PSD, so only the rest needs a solve.
    let is_psd = is_symmetric && (in_s || in_v || is_psd(a, tol).map(|c| c.psd).unwrap_or(false));

    ClassReport {
        is_symmetric,
        nonneg_row_sums,
        nonpos_off_diagonal,
        in_s,
        unit_trace,
        in_s1,
        zero_row_sums,
        in_s1_0: in_s1 && zero_row_sums,
        is_nonnegative,
        diag_dominant,
        in_v,
        in_v1: in_v && unit_trace,
        is_psd,
        is_valid_density: is_symmetric && unit_trace && is_psd,
        tol_used: tol,
    }
}

/// Largest `|row_sum_i - col_sum_i|`.
pub fn line_sum_deviation(b: &RealMatrix) -> f64 {
    b.row_sums()
        .iter()
        .zip(b.col_sums())
        .fold(0.0f64, |m, (r, c)| m.max((r - c).abs()))
}

pub fn is_line_sum_symmetric(b: &RealMatrix, tol: f64) -> bool {
    line_sum_deviation(b) <= tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLss {
    pub holds: bool,
    /// First failing block in lexicographic order, 1-based.
    pub failing_block: Option<BlockPos>,
}

/// Checks every `q x q` block for line-sum symmetry.
pub fn blockwise_line_sum_symmetric(
    a: &RealMatrix,
    shape: TensorShape,
    tol: f64,
) -> Result<BlockLss> {
    shape.check(a)?;
    for u in 0..shape.p() {
        for v in 0..shape.p() {
            if !is_line_sum_symmetric(&shape.block(a, u, v), tol) {
                return Ok(BlockLss {
                    holds: false,
                    failing_block: Some((u + 1, v + 1)),
                });
            }
        }
    }
    Ok(BlockLss {
        holds: true,
        failing_block: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSumMatch {
    pub matches: bool,
    pub max_deviation: f64,
}

/// Compares the row sums of `A^pT` with those of `A`.
pub fn row_sums_match_after_pt(
    a: &RealMatrix,
    shape: TensorShape,
    tol: f64,
) -> Result<RowSumMatch> {
    let pt = partial_transpose(a, shape)?;
    let max_deviation = a
        .row_sums()
        .iter()
        .zip(pt.row_sums())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    Ok(RowSumMatch {
        matches: max_deviation <= tol,
        max_deviation,
    })
}

/// Whether every block more than one step off the block diagonal vanishes.
pub fn is_block_tridiagonal(a: &RealMatrix, shape: TensorShape, tol: f64) -> Result<bool> {
    shape.check(a)?;
    for u in 0..shape.p() {
        for v in 0..shape.p() {
            if u.abs_diff(v) > 1 && shape.block(a, u, v).max_abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Block-tridiagonal structure plus matching partial-transpose row sums.
///
/// For a symmetric block-tridiagonal matrix the row-sum match propagates
/// line-sum symmetry down the superdiagonal blocks one at a time, so a
/// `true` result implies [`blockwise_line_sum_symmetric`].
pub fn block_tridiagonal_inference(a: &RealMatrix, shape: TensorShape, tol: f64) -> Result<bool> {
    if !is_block_tridiagonal(a, shape, tol)? {
        return Ok(false);
    }
    let ok = row_sums_match_after_pt(a, shape, tol)?.matches;
    if ok && a.hermitian_deviation() <= tol {
        debug_assert!(
            blockwise_line_sum_symmetric(a, shape, 2.0 * shape.p() as f64 * tol)?.holds,
            "row-sum match on a block-tridiagonal matrix must give blockwise line-sum symmetry"
        );
    }
    Ok(ok)
}
