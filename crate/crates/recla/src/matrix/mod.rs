//! Column-major matrix storage and zero-copy rectangular views.
//!
//! [`DenseMatrix`] owns a flat column-major buffer with an explicit
//! leading dimension; [`MatrixView`] is a cheap window into that buffer.
//! Every algorithm in this crate works in place on views, so quadrants
//! of one matrix can be handed to different kernel arguments without
//! copying.
//!
//! Views are raw-pointer based and `Copy`. Writing through two views
//! whose index ranges overlap is forbidden by contract except from a
//! single thread in program order; the partitioning helpers in
//! [`crate::matrix::split`] only ever produce disjoint siblings, and the
//! library itself never mutates overlapping views.

mod gen;
mod io;
mod split;

pub use gen::{gen_spd, gen_triangular, gen_uniform};
pub use io::{read_text, read_text_file, write_text, write_text_file, ParseError};
pub use split::{partition_cols, partition_quadrants, split_point, SplitPlan, SPLIT_ALIGN};

use std::marker::PhantomData;

/// Owner of a column-major `f64` buffer with explicit leading dimension.
///
/// Element `(i, j)` lives at flat index `i + j * ld`. The leading
/// dimension is at least `max(rows, 1)`, so a matrix can be embedded in
/// a larger allocation (views inherit the stride).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    ld: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// An all-zero `rows x cols` matrix with tight leading dimension.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::zeros_with_ld(rows, cols, rows.max(1))
    }

    /// An all-zero matrix with a caller-chosen leading dimension.
    pub fn zeros_with_ld(rows: usize, cols: usize, ld: usize) -> Self {
        assert!(ld >= rows.max(1), "ld {ld} < max(rows, 1) with rows {rows}");
        DenseMatrix {
            rows,
            cols,
            ld,
            data: vec![0.0; ld * cols],
        }
    }

    /// The `n x n` identity.
    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            a.set(i, i, 1.0);
        }
        a
    }

    /// Builds a matrix from row slices; handy for literal test inputs.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let m = rows.len();
        let n = if m == 0 { 0 } else { rows[0].len() };
        let mut a = Self::zeros(m, n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "ragged row {i}");
            for (j, &v) in row.iter().enumerate() {
                a.set(i, j, v);
            }
        }
        a
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ld(&self) -> usize {
        self.ld
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        self.data[i + j * self.ld]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        self.data[i + j * self.ld] = v;
    }

    /// Frobenius norm over the `rows x cols` window (gaps between
    /// columns introduced by `ld > rows` are excluded).
    pub fn frobenius_norm(&self) -> f64 {
        let mut sum = 0.0;
        for j in 0..self.cols {
            for i in 0..self.rows {
                let v = self.data[i + j * self.ld];
                sum += v * v;
            }
        }
        sum.sqrt()
    }

    /// A mutable view covering the whole matrix.
    pub fn view_mut(&mut self) -> MatrixView<'_> {
        MatrixView {
            ptr: self.data.as_mut_ptr(),
            rows: self.rows,
            cols: self.cols,
            ld: self.ld,
            _marker: PhantomData,
        }
    }

    /// The transpose as a new matrix.
    pub fn transposed(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }
}

/// A rectangular window into a [`DenseMatrix`], `Copy` so that sibling
/// quadrants can be passed to one kernel call.
///
/// All kernels and algorithms take their operands as views. Bounds are
/// asserted on element access; aliasing between *distinct* views is the
/// caller's contract (see the module docs).
#[derive(Debug, Clone, Copy)]
pub struct MatrixView<'a> {
    ptr: *mut f64,
    rows: usize,
    cols: usize,
    ld: usize,
    _marker: PhantomData<&'a mut [f64]>,
}

impl<'a> MatrixView<'a> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ld(&self) -> usize {
        self.ld
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        unsafe { *self.ptr.add(i + j * self.ld) }
    }

    /// Writes through the view. Takes `&self`: the view is a handle,
    /// copies of it alias the same storage, and exclusive access is the
    /// creator's responsibility (see [`DenseMatrix::view_mut`]).
    pub fn set(&self, i: usize, j: usize, v: f64) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        unsafe { *self.ptr.add(i + j * self.ld) = v }
    }

    /// The window at (`row_off`, `col_off`) of shape `rows x cols`,
    /// sharing storage with `self`.
    pub fn submatrix(&self, row_off: usize, col_off: usize, rows: usize, cols: usize) -> MatrixView<'a> {
        assert!(
            row_off + rows <= self.rows && col_off + cols <= self.cols,
            "submatrix ({row_off}+{rows}, {col_off}+{cols}) exceeds ({}, {})",
            self.rows,
            self.cols
        );
        MatrixView {
            ptr: unsafe { self.ptr.add(row_off + col_off * self.ld) },
            rows,
            cols,
            ld: self.ld,
            _marker: PhantomData,
        }
    }

    /// Raw pointer to the first element of column `j`. The column holds
    /// `rows()` contiguous elements. Kernel-internal escape hatch.
    pub(crate) fn col_ptr(&self, j: usize) -> *mut f64 {
        debug_assert!(j < self.cols || (j == 0 && self.cols == 0));
        unsafe { self.ptr.add(j * self.ld) }
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut sum = 0.0;
        for j in 0..self.cols {
            for i in 0..self.rows {
                let v = unsafe { *self.ptr.add(i + j * self.ld) };
                sum += v * v;
            }
        }
        sum.sqrt()
    }

    /// Copies the window out into an owned matrix.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// Overwrites the window from an equally-shaped matrix.
    pub fn copy_from(&self, src: &DenseMatrix) {
        assert_eq!((self.rows, self.cols), (src.rows(), src.cols()), "shape mismatch");
        for j in 0..self.cols {
            for i in 0..self.rows {
                self.set(i, j, src.get(i, j));
            }
        }
    }
}

// A view is a window into one allocation; sending it to another thread
// is fine, shared concurrent access is not.
unsafe impl Send for MatrixView<'_> {}
