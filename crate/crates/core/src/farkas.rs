//! Exact feasibility of `Mx = b, x >= 0` with Farkas certificates.
//!
//! [`solve_standard`] runs a phase-1 simplex over the rationals with Bland's
//! rule. When the phase-1 optimum is positive the certificate is read off
//! the reduced costs of the artificial columns, i.e. the optimal phase-1
//! duals.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{int, LinalgError, RatMatrix, RatVector, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FarkasError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
}

impl From<LinalgError> for FarkasError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NotSquare { rows, cols } => FarkasError::NotSquare { rows, cols },
            other => FarkasError::DimensionMismatch(other.to_string()),
        }
    }
}

/// The system `M x = b, x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardSystem {
    m: RatMatrix,
    b: RatVector,
}

impl StandardSystem {
    pub fn new(m: RatMatrix, b: RatVector) -> Result<Self, FarkasError> {
        if m.rows() != b.dim() {
            return Err(FarkasError::DimensionMismatch(format!(
                "{}x{} matrix with right-hand side of dimension {}",
                m.rows(),
                m.cols(),
                b.dim()
            )));
        }
        Ok(StandardSystem { m, b })
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.m
    }

    pub fn rhs(&self) -> &RatVector {
        &self.b
    }

    pub fn constraints(&self) -> usize {
        self.m.rows()
    }

    pub fn variables(&self) -> usize {
        self.m.cols()
    }

    /// Replaces each listed free column `c` by the pair `c+`, `-c`, the
    /// negative copies appended after the original columns in list order.
    pub fn split_free_columns(&self, free: &[usize]) -> StandardSystem {
        let (rows, cols) = (self.m.rows(), self.m.cols());
        let mut m = RatMatrix::zeros(rows, cols + free.len());
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self.m[(i, j)].clone();
            }
            for (k, &c) in free.iter().enumerate() {
                m[(i, cols + k)] = -self.m[(i, c)].clone();
            }
        }
        StandardSystem {
            m,
            b: self.b.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityOutcome {
    /// `M x = b` and `x >= 0`.
    Solution(RatVector),
    /// `M^T y >= 0` and `b^T y < 0`.
    Certificate(RatVector),
}

impl FeasibilityOutcome {
    pub fn is_solution(&self) -> bool {
        matches!(self, FeasibilityOutcome::Solution(_))
    }
}

/// Checks the outcome's defining inequalities by direct arithmetic.
pub fn verify_outcome(sys: &StandardSystem, out: &FeasibilityOutcome) -> Result<bool, FarkasError> {
    match out {
        FeasibilityOutcome::Solution(x) => {
            if x.dim() != sys.variables() {
                return Err(FarkasError::DimensionMismatch(format!(
                    "solution of dimension {} for {} variables",
                    x.dim(),
                    sys.variables()
                )));
            }
            Ok(x.is_nonnegative() && sys.m.mat_vec(x)? == sys.b)
        }
        FeasibilityOutcome::Certificate(y) => {
            if y.dim() != sys.constraints() {
                return Err(FarkasError::DimensionMismatch(format!(
                    "certificate of dimension {} for {} constraints",
                    y.dim(),
                    sys.constraints()
                )));
            }
            let mty = sys.m.transpose().mat_vec(y)?;
            Ok(mty.is_nonnegative() && sys.b.dot(y)?.is_negative())
        }
    }
}

/// Number of bases available to the phase-1 tableau; Bland's rule never
/// revisits one, so this bounds the pivot count.
fn pivot_ceiling(total_cols: usize, rows: usize) -> u128 {
    let k = rows.min(total_cols - rows) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(total_cols as u128 - i) / (i + 1);
    }
    acc
}

struct Tableau {
    rows: usize,
    width: usize,
    /// rows x (width + 1), last column is the right-hand side
    t: Vec<Rational>,
    reduced: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> &Rational {
        &self.t[i * (self.width + 1) + j]
    }

    fn rhs(&self, i: usize) -> &Rational {
        self.at(i, self.width)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width + 1;
        let p = self.at(r, c).clone();
        for j in 0..w {
            let x = &mut self.t[r * w + j];
            if !x.is_zero() {
                *x /= &p;
            }
        }
        let pivot_row: Vec<Rational> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c].clone();
            if f.is_zero() {
                continue;
            }
            for (j, pj) in pivot_row.iter().enumerate() {
                if !pj.is_zero() {
                    self.t[i * w + j] -= &f * pj;
                }
            }
        }
        let f = self.reduced[c].clone();
        if !f.is_zero() {
            for (j, pj) in pivot_row.iter().enumerate().take(self.width) {
                if !pj.is_zero() {
                    self.reduced[j] -= &f * pj;
                }
            }
        }
        self.basis[r] = c;
    }
}

/// Decides `Mx = b, x >= 0` exactly, returning whichever Farkas alternative
/// holds. The payload is verified before it is returned.
///
/// Panics only on an internal defect: exceeding the pivot ceiling or
/// producing a payload that fails verification.
pub fn solve_standard(sys: &StandardSystem) -> FeasibilityOutcome {
    let (m, n) = (sys.constraints(), sys.variables());
    if m == 0 {
        return FeasibilityOutcome::Solution(RatVector::zeros(n));
    }
    let width = n + m;
    let flip: Vec<bool> = sys.b.iter().map(|b| b.is_negative()).collect();
    let mut t = Vec::with_capacity(m * (width + 1));
    for (i, &flipped) in flip.iter().enumerate() {
        let sign = if flipped { int(-1) } else { int(1) };
        for j in 0..n {
            t.push(&sys.m[(i, j)] * &sign);
        }
        for k in 0..m {
            t.push(if k == i {
                Rational::one()
            } else {
                Rational::zero()
            });
        }
        t.push(&sys.b[i] * &sign);
    }
    // phase-1 costs: 0 on original columns, 1 on artificials
    let mut reduced = vec![Rational::zero(); width];
    for (j, r) in reduced.iter_mut().enumerate().take(n) {
        let col_sum: Rational = (0..m).map(|i| t[i * (width + 1) + j].clone()).sum();
        *r = -col_sum;
    }
    let mut tab = Tableau {
        rows: m,
        width,
        t,
        reduced,
        basis: (n..n + m).collect(),
    };

    let ceiling = pivot_ceiling(width, m);
    let mut pivots: u128 = 0;
    while let Some(enter) = (0..width).find(|&j| tab.reduced[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            let a = tab.at(i, enter);
            if !a.is_positive() {
                continue;
            }
            let ratio = tab.rhs(i) / a;
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && tab.basis[i] < tab.basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (row, _) = leave.expect("phase-1 objective is bounded below by zero");
        tab.pivot(row, enter);
        pivots += 1;
        assert!(
            pivots <= ceiling,
            "simplex exceeded the Bland pivot ceiling {ceiling}: solver defect"
        );
    }

    let infeasibility: Rational = (0..m)
        .filter(|&i| tab.basis[i] >= n)
        .map(|i| tab.rhs(i).clone())
        .sum();
    let outcome = if infeasibility.is_zero() {
        let mut x = RatVector::zeros(n);
        for i in 0..m {
            if tab.basis[i] < n {
                x[tab.basis[i]] = tab.rhs(i).clone();
            }
        }
        FeasibilityOutcome::Solution(x)
    } else {
        let y: RatVector = (0..m)
            .map(|i| {
                let dual = Rational::one() - &tab.reduced[n + i];
                if flip[i] {
                    dual
                } else {
                    -dual
                }
            })
            .collect();
        FeasibilityOutcome::Certificate(y)
    };
    assert!(
        verify_outcome(sys, &outcome).unwrap_or(false),
        "simplex produced an unverifiable outcome: solver defect"
    );
    outcome
}

/// `M = [S | I ; 1^T | 0^T]`, `b = e_{n+1}`.
pub fn assemble_weight_system(s: &RatMatrix) -> Result<StandardSystem, FarkasError> {
    if !s.is_square() {
        return Err(FarkasError::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    let n = s.rows();
    let mut m = RatMatrix::zeros(n + 1, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = s[(i, j)].clone();
        }
        m[(i, n + i)] = Rational::one();
        m[(n, i)] = Rational::one();
    }
    StandardSystem::new(m, RatVector::basis(n + 1, n))
}

/// Outcome of searching for `p >= 0` with `A^T p >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrictOutcome {
    Witness(RatVector),
    /// `q >= 0`, `q != 0`, `A q <= 0`: no such `p` exists.
    Obstruction(RatVector),
}

/// The slack form `[A^T | -I] (p, s) = 1`, `p, s >= 0`.
pub fn strict_system(a: &RatMatrix) -> Result<StandardSystem, FarkasError> {
    if !a.is_square() {
        return Err(FarkasError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut m = RatMatrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = a[(j, i)].clone();
        }
        m[(i, n + i)] = int(-1);
    }
    StandardSystem::new(m, RatVector::ones(n))
}

/// Finds `p >= 0` with `A^T p > 0`, normalized to `A^T p >= 1` since the
/// solution set is a cone; otherwise returns the dual obstruction.
pub fn strict_cone_feasibility(a: &RatMatrix) -> Result<StrictOutcome, FarkasError> {
    let sys = strict_system(a)?;
    let n = a.rows();
    Ok(match solve_standard(&sys) {
        FeasibilityOutcome::Solution(x) => {
            let p: RatVector = x.iter().take(n).cloned().collect();
            debug_assert!(a.transpose().mat_vec(&p)?.all_ge(&RatVector::ones(n)));
            StrictOutcome::Witness(p)
        }
        // M^T y = (A y, -y) >= 0 and 1^T y < 0, so q = -y works
        FeasibilityOutcome::Certificate(y) => StrictOutcome::Obstruction(y.neg()),
    })
}

/// `Some(p)` with `p >= 0` and `A^T p >= 1`, or `None` if no `p >= 0`
/// gives `A^T p > 0`.
pub fn exists_nonneg_strict(a: &RatMatrix) -> Result<Option<RatVector>, FarkasError> {
    Ok(match strict_cone_feasibility(a)? {
        StrictOutcome::Witness(p) => Some(p),
        StrictOutcome::Obstruction(_) => None,
    })
}
