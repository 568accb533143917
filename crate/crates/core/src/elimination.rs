//! Column-oriented Gauss-Jordan reduction with a tracked nonnegative
//! transformation, and the inverse construction built from vertex-deletion
//! witnesses.
//!
//! At step `i` the multiple of column `i` added to column `j` is
//! `-x_ij / x_ii`. With a positive pivot this is nonnegative exactly when
//! `x_ij <= 0`, so the transformation stays entrywise nonnegative only for
//! inputs whose off-diagonal entries are `<= 0`.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::digraph::Digraph;
use crate::linalg::{second_neighborhood_matrix, RatMatrix, RatVector, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EliminationError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("off-diagonal entry ({row},{col}) is positive")]
    SignPreconditionViolated { row: usize, col: usize },
    #[error("deletion witness {index} is invalid: {reason}")]
    InvalidDeletionWitness { index: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignMode {
    /// Reject inputs with a positive off-diagonal entry.
    Strict,
    /// Reduce anyway; failure vectors then carry no certificate meaning.
    Permissive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EliminationResult {
    /// `C T = I`.
    Success { t: RatMatrix },
    /// Pivot `step` (1-based) was `<= 0`; `a` is that column of the
    /// accumulated transformation.
    Failure { step: usize, a: RatVector },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnReduction {
    pub result: EliminationResult,
    /// Whether the off-diagonal sign pattern held, i.e. whether `T >= 0`
    /// and the failure certificate are guaranteed.
    pub certified: bool,
    pub pivot_steps: usize,
}

fn offdiag_positive(c: &RatMatrix) -> Option<(usize, usize)> {
    let n = c.rows();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && c[(i, j)].is_positive())
}

pub fn column_reduce(c: &RatMatrix, mode: SignMode) -> Result<ColumnReduction, EliminationError> {
    if !c.is_square() {
        return Err(EliminationError::NotSquare {
            rows: c.rows(),
            cols: c.cols(),
        });
    }
    let violation = offdiag_positive(c);
    if let (SignMode::Strict, Some((row, col))) = (mode, violation) {
        return Err(EliminationError::SignPreconditionViolated {
            row: row + 1,
            col: col + 1,
        });
    }
    let certified = violation.is_none();
    let n = c.rows();
    let mut x = c.clone();
    let mut t = RatMatrix::identity(n);

    for i in 0..n {
        let pivot = x[(i, i)].clone();
        if !pivot.is_positive() {
            return Ok(ColumnReduction {
                result: EliminationResult::Failure {
                    step: i + 1,
                    a: t.col(i),
                },
                certified,
                pivot_steps: i,
            });
        }
        for j in 0..n {
            if j == i || x[(i, j)].is_zero() {
                continue;
            }
            let mult = -&x[(i, j)] / &pivot;
            add_column_multiple(&mut x, j, i, &mult);
            add_column_multiple(&mut t, j, i, &mult);
        }
        let inv = Rational::one() / &pivot;
        scale_column(&mut x, i, &inv);
        scale_column(&mut t, i, &inv);
        debug_assert_eq!(c.mat_mul(&t).ok().as_ref(), Some(&x));
        debug_assert!(!certified || t.is_nonnegative());
    }
    debug_assert!(x.is_identity());
    Ok(ColumnReduction {
        result: EliminationResult::Success { t },
        certified,
        pivot_steps: n,
    })
}

/// column[target] += mult * column[source]
fn add_column_multiple(m: &mut RatMatrix, target: usize, source: usize, mult: &Rational) {
    for r in 0..m.rows() {
        let s = &m[(r, source)];
        if !s.is_zero() {
            let d = s * mult;
            m[(r, target)] += d;
        }
    }
}

fn scale_column(m: &mut RatMatrix, col: usize, k: &Rational) {
    for r in 0..m.rows() {
        if !m[(r, col)].is_zero() {
            let v = &m[(r, col)] * k;
            m[(r, col)] = v;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeletionOutcome {
    /// `S_D W' = I` with `W' >= 0`.
    NonnegativeInverse { w_prime: RatMatrix },
    /// `w = W_hat a` satisfies `w >= 0` and `S_D w <= 0`; it is nonzero
    /// whenever `D` has at least two vertices.
    Witness {
        step: usize,
        a: RatVector,
        w: RatVector,
    },
}

/// Checks that `w` is a nonnegative, nonzero vector on `D - v` with
/// `S_{D-v} w <= 0`. The empty vector is accepted for the null digraph.
pub fn validate_deletion_witness(d: &Digraph, v: usize, w: &RatVector) -> Result<(), String> {
    let (dv, _) = d.delete_vertex(v).map_err(|e| e.to_string())?;
    if w.dim() != dv.vertex_count() {
        return Err(format!(
            "dimension {} but D - v{v} has {} vertices",
            w.dim(),
            dv.vertex_count()
        ));
    }
    if !w.is_nonnegative() {
        return Err("has a negative component".into());
    }
    if w.dim() > 0 && w.is_zero() {
        return Err("is the zero vector".into());
    }
    let sw = second_neighborhood_matrix(&dv)
        .mat_vec(w)
        .map_err(|e| e.to_string())?;
    if !sw.is_nonpositive() {
        return Err("S w has a positive component".into());
    }
    Ok(())
}

/// Extends each `w_list[i]` (a witness on `D - v_{i+1}`) by a zero at
/// `v_{i+1}`, forms `C = S_D W_hat` and column-reduces it.
pub fn attempt_inverse_from_deletions(
    d: &Digraph,
    w_list: &[RatVector],
) -> Result<DeletionOutcome, EliminationError> {
    let n = d.vertex_count();
    if w_list.len() != n {
        return Err(EliminationError::InvalidDeletionWitness {
            index: w_list.len().min(n) + 1,
            reason: format!("expected {n} witnesses, got {}", w_list.len()),
        });
    }
    let mut columns = Vec::with_capacity(n);
    for (i, w) in w_list.iter().enumerate() {
        validate_deletion_witness(d, i + 1, w).map_err(|reason| {
            EliminationError::InvalidDeletionWitness {
                index: i + 1,
                reason,
            }
        })?;
        let mut hat = Vec::with_capacity(n);
        hat.extend(w.iter().take(i).cloned());
        hat.push(Rational::zero());
        hat.extend(w.iter().skip(i).cloned());
        columns.push(RatVector::new(hat));
    }
    let w_hat = RatMatrix::from_columns(n, &columns).expect("dimensions checked");
    let s = second_neighborhood_matrix(d);
    let c = s.mat_mul(&w_hat).expect("square");
    let reduction = column_reduce(&c, SignMode::Permissive)?;
    Ok(match reduction.result {
        EliminationResult::Success { t } => {
            let w_prime = w_hat.mat_mul(&t).expect("square");
            DeletionOutcome::NonnegativeInverse { w_prime }
        }
        EliminationResult::Failure { step, a } => {
            let w = w_hat.mat_vec(&a).expect("square");
            DeletionOutcome::Witness { step, a, w }
        }
    })
}
