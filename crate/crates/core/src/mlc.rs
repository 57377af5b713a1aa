//! Matrices with labeled columns.
//!
//! Each column of an [`Mlc`] is keyed by a symbol identifier, so `M s_I`
//! reads as a linear form in the labeled symbols. Sums align columns by
//! label instead of by position, which is what lets `s - s` cancel exactly.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::symbols::SymbolId;

/// Real matrix whose columns are labeled by distinct symbol identifiers.
///
/// Labels are kept sorted ascending and all-zero columns are dropped, so two
/// `Mlc` values describing the same linear form compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlc {
    matrix: DMatrix<f64>,
    labels: Vec<SymbolId>,
}

impl Mlc {
    /// Builds the canonical form of `(matrix, labels)`.
    pub fn new(matrix: DMatrix<f64>, labels: Vec<SymbolId>) -> Result<Self> {
        if matrix.ncols() != labels.len() {
            return Err(Error::DimensionMismatch {
                op: "mlc",
                expected: matrix.ncols(),
                found: labels.len(),
            });
        }
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by_key(|&j| labels[j]);
        if let Some(w) = order.windows(2).find(|w| labels[w[0]] == labels[w[1]]) {
            return Err(Error::DuplicateSymbol(labels[w[0]]));
        }
        let keep: Vec<usize> = order
            .into_iter()
            .filter(|&j| matrix.column(j).iter().any(|v| *v != 0.0))
            .collect();
        let sorted_labels = keep.iter().map(|&j| labels[j]).collect();
        let sorted = matrix.select_columns(keep.iter());
        Ok(Mlc {
            matrix: sorted,
            labels: sorted_labels,
        })
    }

    /// An `Mlc` with `rows` rows and no columns.
    pub fn empty(rows: usize) -> Self {
        Mlc {
            matrix: DMatrix::zeros(rows, 0),
            labels: Vec::new(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn labels(&self) -> &[SymbolId] {
        &self.labels
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.labels.len()
    }

    pub fn column(&self, label: SymbolId) -> Option<DVector<f64>> {
        self.labels
            .binary_search(&label)
            .ok()
            .map(|j| self.matrix.column(j).into_owned())
    }

    /// Label-aligned sum: `M s_I + N s_J = P s_K`.
    pub fn add(&self, other: &Mlc) -> Result<Mlc> {
        if self.nrows() != other.nrows() {
            return Err(Error::DimensionMismatch {
                op: "mlc_add",
                expected: self.nrows(),
                found: other.nrows(),
            });
        }
        Ok(merge(self, other, 0, 0, self.nrows()))
    }

    /// Vertical concatenation `[M; N] = [M; 0] + [0; N]`.
    pub fn vcat(&self, other: &Mlc) -> Mlc {
        merge(self, other, 0, self.nrows(), self.nrows() + other.nrows())
    }

    /// Linear image `T M`, labels unchanged.
    pub fn scale(&self, t: &DMatrix<f64>) -> Result<Mlc> {
        if t.ncols() != self.nrows() {
            return Err(Error::DimensionMismatch {
                op: "mlc_scale",
                expected: self.nrows(),
                found: t.ncols(),
            });
        }
        Mlc::new(t * &self.matrix, self.labels.clone())
    }

    /// Evaluates `M s` for the given symbol values (missing symbols read as 0).
    pub fn evaluate(&self, values: &HashMap<SymbolId, f64>) -> DVector<f64> {
        let s = DVector::from_iterator(
            self.labels.len(),
            self.labels.iter().map(|l| values.get(l).copied().unwrap_or(0.0)),
        );
        &self.matrix * s
    }
}

/// Merges two sorted label sets, placing `a` at row offset `a_row` and `b` at
/// `b_row` in a result with `rows` rows. Overlapping rows are summed.
fn merge(a: &Mlc, b: &Mlc, a_row: usize, b_row: usize, rows: usize) -> Mlc {
    let mut labels = Vec::with_capacity(a.ncols() + b.ncols());
    let mut columns: Vec<DVector<f64>> = Vec::with_capacity(a.ncols() + b.ncols());
    let (mut i, mut j) = (0, 0);
    while i < a.ncols() || j < b.ncols() {
        let take_a = j >= b.ncols() || (i < a.ncols() && a.labels[i] <= b.labels[j]);
        let take_b = i >= a.ncols() || (j < b.ncols() && b.labels[j] <= a.labels[i]);
        let mut col = DVector::zeros(rows);
        let label = if take_a { a.labels[i] } else { b.labels[j] };
        if take_a {
            let mut rows_a = col.rows_mut(a_row, a.nrows());
            rows_a += a.matrix.column(i);
            i += 1;
        }
        if take_b {
            let mut rows_b = col.rows_mut(b_row, b.nrows());
            rows_b += b.matrix.column(j);
            j += 1;
        }
        if col.iter().any(|v| *v != 0.0) {
            labels.push(label);
            columns.push(col);
        }
    }
    let matrix = if columns.is_empty() {
        DMatrix::zeros(rows, 0)
    } else {
        DMatrix::from_columns(&columns)
    };
    Mlc { matrix, labels }
}
