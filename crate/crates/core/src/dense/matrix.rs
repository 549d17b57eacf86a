use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::par;

/// Column-major dense real matrix.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from column-major data, rejecting bad shapes and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::InvalidShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { rows, cols, data })
    }

    /// Internal constructor for data produced by finite arithmetic.
    pub(crate) fn from_parts(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self::from_parts(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Square diagonal matrix.
    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds from row slices; handy for small literals.
    ///
    /// Panics if the rows are ragged or empty.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data).expect("from_fn produced an invalid matrix")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[&[f64]]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.len());
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            if c.len() != rows {
                return Err(Error::InvalidShape {
                    rows,
                    cols: columns.len(),
                    len: c.len(),
                });
            }
            data.extend_from_slice(c);
        }
        Self::new(rows, columns.len(), data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Column-major backing storage.
    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    /// First `k` columns.
    pub fn leading_columns(&self, k: usize) -> DenseMatrix {
        self.column_range(0, k)
    }

    /// Columns `start..end`.
    pub fn column_range(&self, start: usize, end: usize) -> DenseMatrix {
        assert!(
            start < end && end <= self.cols,
            "column range out of bounds"
        );
        DenseMatrix::from_parts(
            self.rows,
            end - start,
            self.data[start * self.rows..end * self.rows].to_vec(),
        )
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = vec![0.0; self.data.len()];
        for j in 0..self.cols {
            for i in 0..self.rows {
                out[i * self.cols + j] = self.data[j * self.rows + i];
            }
        }
        DenseMatrix::from_parts(self.cols, self.rows, out)
    }

    pub fn scaled(&self, alpha: f64) -> DenseMatrix {
        DenseMatrix::from_parts(
            self.rows,
            self.cols,
            self.data.iter().map(|v| v * alpha).collect(),
        )
    }

    /// Multiplies column `j` by `scale[j]`, i.e. `self * diag(scale)`.
    pub fn scale_columns(&self, scale: &[f64]) -> DenseMatrix {
        assert_eq!(scale.len(), self.cols);
        let mut out = self.clone();
        for (j, &s) in scale.iter().enumerate() {
            out.col_mut(j).iter_mut().for_each(|v| *v *= s);
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &DenseMatrix,
        op: &'static str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<DenseMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(DenseMatrix::from_parts(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// `self * x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                op: "matvec",
                left: self.shape(),
                right: (x.len(), 1),
            });
        }
        let mut y = vec![0.0; self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                axpy(xj, self.col(j), &mut y);
            }
        }
        Ok(y)
    }

    /// `self^T * y`.
    pub fn transpose_matvec(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch {
                op: "transpose_matvec",
                left: (self.cols, self.rows),
                right: (y.len(), 1),
            });
        }
        Ok((0..self.cols).map(|j| dot(self.col(j), y)).collect())
    }

    /// `max_ij |(self^T self - I)_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = matmul_tn(self, self).expect("gram of self");
        let mut worst = 0.0_f64;
        for j in 0..gram.cols {
            for i in 0..gram.rows {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Dense real vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidShape {
                rows: 0,
                cols: 1,
                len: 0,
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(data))
    }

    pub(crate) fn from_vec(data: Vec<f64>) -> Self {
        Self(data)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.0)
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scaled(&self, alpha: f64) -> Vector {
        Vector(self.0.iter().map(|v| v * alpha).collect())
    }

    /// The vector as an `n x 1` matrix.
    pub fn to_column(&self) -> DenseMatrix {
        DenseMatrix::from_parts(self.dim(), 1, self.0.clone())
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Euclidean norm with scaling against overflow.
pub(crate) fn norm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let ss: f64 = x.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * ss.sqrt()
}

/// `a * b`.
///
/// Each output column is accumulated in a fixed order, so the result does not
/// depend on how columns are scheduled across threads.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            op: "matmul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut out = vec![0.0; a.rows * b.cols];
    par::for_each_column(&mut out, a.rows, |j, col| {
        for (l, &blj) in b.col(j).iter().enumerate() {
            if blj != 0.0 {
                axpy(blj, a.col(l), col);
            }
        }
    });
    Ok(DenseMatrix::from_parts(a.rows, b.cols, out))
}

/// `a^T * b` without forming the transpose.
pub fn matmul_tn(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch {
            op: "matmul_tn",
            left: (a.cols, a.rows),
            right: b.shape(),
        });
    }
    let mut out = vec![0.0; a.cols * b.cols];
    par::for_each_column(&mut out, a.cols, |j, col| {
        let bj = b.col(j);
        for (i, c) in col.iter_mut().enumerate() {
            *c = dot(a.col(i), bj);
        }
    });
    Ok(DenseMatrix::from_parts(a.cols, b.cols, out))
}

/// `a * b^T`.
pub fn matmul_nt(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.cols {
        return Err(Error::DimensionMismatch {
            op: "matmul_nt",
            left: a.shape(),
            right: (b.cols, b.rows),
        });
    }
    matmul(a, &b.transpose())
}
