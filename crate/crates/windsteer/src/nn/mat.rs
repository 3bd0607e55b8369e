//! Row-major dense matrix used for batched network evaluation.

/// A dense row-major matrix of `f64`.
///
/// Rows are batch entries; columns are feature dimensions. The layout is a
/// single contiguous buffer so per-row slices are cache-friendly.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    /// All-zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Wraps an existing buffer; `data.len()` must equal `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "matrix buffer length {} does not match shape {}x{}",
            data.len(),
            rows,
            cols
        );
        Self { rows, cols, data }
    }

    /// Single-row matrix around one sample.
    pub fn from_row(row: &[f64]) -> Self {
        Self { rows: 1, cols: row.len(), data: row.to_vec() }
    }

    /// Immutable view of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Mutable view of row `i`.
    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Element accessor (row, col).
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// Builds a matrix by stacking rows produced by `f(row_index)`.
    pub fn from_rows<F: FnMut(usize) -> Vec<f64>>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            let v = f(r);
            assert_eq!(v.len(), cols, "row {r} has length {} (expected {cols})", v.len());
            m.row_mut(r).copy_from_slice(&v);
        }
        m
    }
}
