//! Exact rational vectors and dense matrices.
//!
//! Componentwise relations (`all_le`, `all_gt`, ...) hold for *every*
//! component. Negated relations are existential: `not_gt(u, v)` means some
//! `u_i <= v_i`, which for dimension > 1 differs from `all_le`.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::digraph::Digraph;

/// Arbitrary-precision fraction, always in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses `p/q` or `p`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.parse().ok()?;
            let q: BigInt = q.parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// `p/q`, or `p` when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RatVector(Vec<Rational>);

impl RatVector {
    pub fn new(components: Vec<Rational>) -> Self {
        RatVector(components)
    }

    pub fn from_ints(v: &[i64]) -> Self {
        RatVector(v.iter().map(|&x| int(x)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        RatVector(vec![Rational::zero(); dim])
    }

    pub fn ones(dim: usize) -> Self {
        RatVector(vec![Rational::one(); dim])
    }

    /// Standard basis vector `e_i`, 0-based `i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn dot(&self, other: &RatVector) -> Result<Rational, LinalgError> {
        self.same_dim(other)?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().sum()
    }

    pub fn scale(&self, k: &Rational) -> RatVector {
        RatVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn neg(&self) -> RatVector {
        RatVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &RatVector) -> Result<RatVector, LinalgError> {
        self.same_dim(other)?;
        Ok(RatVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    fn same_dim(&self, other: &RatVector) -> Result<(), LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimensionMismatch(format!(
                "vectors of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    fn all_pairs(&self, other: &RatVector, f: impl Fn(&Rational, &Rational) -> bool) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| f(a, b))
    }

    pub fn all_le(&self, other: &RatVector) -> bool {
        self.all_pairs(other, |a, b| a <= b)
    }
    pub fn all_lt(&self, other: &RatVector) -> bool {
        self.all_pairs(other, |a, b| a < b)
    }
    pub fn all_ge(&self, other: &RatVector) -> bool {
        self.all_pairs(other, |a, b| a >= b)
    }
    pub fn all_gt(&self, other: &RatVector) -> bool {
        self.all_pairs(other, |a, b| a > b)
    }

    /// Some `u_i > v_i`.
    pub fn not_le(&self, other: &RatVector) -> bool {
        self.dim() == other.dim() && !self.all_le(other)
    }
    /// Some `u_i <= v_i`.
    pub fn not_gt(&self, other: &RatVector) -> bool {
        self.dim() == other.dim() && !self.all_gt(other)
    }
    /// Some `u_i >= v_i`.
    pub fn not_lt(&self, other: &RatVector) -> bool {
        self.dim() == other.dim() && !self.all_lt(other)
    }
    /// Some `u_i < v_i`.
    pub fn not_ge(&self, other: &RatVector) -> bool {
        self.dim() == other.dim() && !self.all_ge(other)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }
    pub fn is_nonpositive(&self) -> bool {
        self.0.iter().all(|x| !x.is_positive())
    }
    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|x| x.is_positive())
    }
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }
    pub fn has_positive_component(&self) -> bool {
        self.0.iter().any(|x| x.is_positive())
    }

    /// Components as `p/q` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(format_rational).collect()
    }

    /// Serializes as a `dim 1` column in the matrix text format.
    pub fn to_text(&self) -> String {
        RatMatrix::column(self).to_text()
    }

    /// Accepts a single column or a single row in the matrix text format.
    pub fn parse(text: &str) -> Result<RatVector, LinalgError> {
        let m = RatMatrix::parse(text)?;
        if m.cols == 1 {
            Ok(m.col(0))
        } else if m.rows == 1 {
            Ok(m.row(0))
        } else {
            Err(LinalgError::DimensionMismatch(format!(
                "expected a vector, got a {}x{} matrix",
                m.rows, m.cols
            )))
        }
    }
}

impl Index<usize> for RatVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for RatVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

impl FromIterator<Rational> for RatVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        RatVector(iter.into_iter().collect())
    }
}

impl fmt::Display for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_strings().join(", "))
    }
}

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Result of [`RatMatrix::invert`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inversion {
    Inverse(RatMatrix),
    /// `M * null_vector = 0`, `null_vector != 0`.
    Singular {
        null_vector: RatVector,
    },
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self, LinalgError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
    }

    /// The vector as an `n x 1` matrix.
    pub fn column(v: &RatVector) -> Self {
        RatMatrix {
            rows: v.dim(),
            cols: 1,
            data: v.as_slice().to_vec(),
        }
    }

    /// Matrix whose columns are the given vectors, all of dimension `rows`.
    pub fn from_columns(rows: usize, columns: &[RatVector]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.dim() != rows {
                return Err(LinalgError::DimensionMismatch(format!(
                    "column {j} has dimension {}, expected {rows}",
                    c.dim()
                )));
            }
            for i in 0..rows {
                m[(i, j)] = c[i].clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Rational> {
        (i < self.rows && j < self.cols).then(|| &self.data[i * self.cols + j])
    }

    pub fn row(&self, i: usize) -> RatVector {
        RatVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> RatVector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rational> {
        self.data.iter()
    }

    pub fn mat_vec(&self, x: &RatVector) -> Result<RatVector, LinalgError> {
        if self.cols != x.dim() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} matrix times vector of dimension {}",
                self.rows,
                self.cols,
                x.dim()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter()
                    .zip(x.iter())
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn mat_mul(&self, other: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    /// First entry `(i, j)` (row-major) that is negative.
    pub fn first_negative_entry(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|x| x.is_negative())
            .map(|p| (p / self.cols, p % self.cols))
    }

    /// Exact Gauss-Jordan inversion, pivoting on the first nonzero entry.
    ///
    /// A singular matrix yields a nonzero null vector read off the first
    /// column without a pivot in the reduced row echelon form.
    pub fn invert(&self) -> Result<Inversion, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        // pivot_row_of[col] = row holding that column's pivot
        let mut pivot_row_of: Vec<Option<usize>> = vec![None; n];
        let mut next_row = 0;
        for col in 0..n {
            let Some(p) = (next_row..n).find(|&r| !a[(r, col)].is_zero()) else {
                continue;
            };
            a.swap_rows(p, next_row);
            inv.swap_rows(p, next_row);
            let piv = a[(next_row, col)].clone();
            a.scale_row(next_row, &piv);
            inv.scale_row(next_row, &piv);
            for r in 0..n {
                if r != next_row && !a[(r, col)].is_zero() {
                    let f = a[(r, col)].clone();
                    a.sub_row_multiple(r, next_row, &f);
                    inv.sub_row_multiple(r, next_row, &f);
                }
            }
            pivot_row_of[col] = Some(next_row);
            next_row += 1;
        }
        if let Some(free) = pivot_row_of.iter().position(Option::is_none) {
            let mut u = RatVector::zeros(n);
            u[free] = Rational::one();
            for (col, row) in pivot_row_of.iter().enumerate() {
                if let Some(r) = row {
                    if col < free {
                        u[col] = -a[(*r, free)].clone();
                    }
                }
            }
            return Ok(Inversion::Singular { null_vector: u });
        }
        Ok(Inversion::Inverse(inv))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, divisor: &Rational) {
        for j in 0..self.cols {
            let x = &mut self.data[r * self.cols + j];
            if !x.is_zero() {
                *x /= divisor;
            }
        }
    }

    /// row[target] -= f * row[source]
    fn sub_row_multiple(&mut self, target: usize, source: usize, f: &Rational) {
        for j in 0..self.cols {
            let s = &self.data[source * self.cols + j];
            if !s.is_zero() {
                let d = f * s;
                self.data[target * self.cols + j] -= d;
            }
        }
    }

    /// Parses `rows cols` followed by one line of entries per row.
    pub fn parse(text: &str) -> Result<RatMatrix, LinalgError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hl, header) = lines.next().ok_or(LinalgError::Parse {
            line: 1,
            message: "missing header `rows cols`".into(),
        })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<Result<_, _>>()
            .map_err(|_| LinalgError::Parse {
                line: hl,
                message: "header must be `rows cols`".into(),
            })?;
        let [rows, cols] = dims[..] else {
            return Err(LinalgError::Parse {
                line: hl,
                message: "header must be `rows cols`".into(),
            });
        };
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (ln, line) = lines.next().ok_or(LinalgError::Parse {
                line: hl + data.len() / cols.max(1) + 1,
                message: format!("expected {rows} rows"),
            })?;
            let row: Vec<Rational> = line
                .split_whitespace()
                .map(|t| {
                    parse_rational(t).ok_or_else(|| LinalgError::Parse {
                        line: ln,
                        message: format!("`{t}` is not a rational"),
                    })
                })
                .collect::<Result<_, _>>()?;
            if row.len() != cols {
                return Err(LinalgError::Parse {
                    line: ln,
                    message: format!("expected {cols} entries, found {}", row.len()),
                });
            }
            data.extend(row);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(LinalgError::Parse {
                line: ln,
                message: "unexpected content after the last row".into(),
            });
        }
        Ok(RatMatrix { rows, cols, data })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| format_rational(&self[(i, j)]))
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).to_strings()).collect()
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(
            i < self.rows && j < self.cols,
            "entry ({i},{j}) out of range"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(
            i < self.rows && j < self.cols,
            "entry ({i},{j}) out of range"
        );
        &mut self.data[i * self.cols + j]
    }
}

/// `s_ij = 1` if `d(v_i, v_j) = 1`, `-1` if it is 2, else 0.
pub fn second_neighborhood_matrix(d: &Digraph) -> RatMatrix {
    let n = d.vertex_count();
    let mut s = RatMatrix::zeros(n, n);
    for i in 0..n {
        let dist = d
            .out_distances_from(i + 1)
            .expect("vertex in range by construction");
        for (j, dj) in dist.iter().enumerate() {
            match dj {
                Some(1) => s[(i, j)] = int(1),
                Some(2) => s[(i, j)] = int(-1),
                _ => {}
            }
        }
    }
    s
}
