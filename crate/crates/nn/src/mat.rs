//! Row-major dense matrices over `f64`.
//!
//! This is the single array type used throughout the workspace. It is
//! deliberately small: dense storage, shape-checked products, and the few
//! elementwise helpers the tape needs. Matrices with zero rows are legal
//! (they represent empty object sets) as long as `data.len() == rows * cols`.

use crate::error::{shape_err, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn filled(rows: usize, cols: usize, v: f64) -> Self {
        Self { rows, cols, data: vec![v; rows * cols] }
    }

    /// Builds a matrix from row-major data. Fails if the length does not
    /// equal `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape_err(
                "Mat::from_vec",
                format!("{} values for a {rows}x{cols} matrix", data.len()),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows. At least one row is required;
    /// use [`Mat::zeros`] with zero rows for empty sets.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(shape_err("Mat::from_rows", "no rows given".to_string()));
        };
        let cols = first.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(shape_err(
                    "Mat::from_rows",
                    format!("row {i} has {} entries, expected {cols}", r.len()),
                ));
            }
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn row_vector(v: &[f64]) -> Self {
        Self { rows: 1, cols: v.len(), data: v.to_vec() }
    }

    pub fn col_vector(v: &[f64]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn scalar(v: f64) -> Self {
        Self { rows: 1, cols: 1, data: vec![v] }
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
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// The single entry of a 1x1 matrix.
    pub fn as_scalar(&self) -> Result<f64> {
        if self.rows == 1 && self.cols == 1 {
            Ok(self.data[0])
        } else {
            Err(shape_err("Mat::as_scalar", format!("{}x{}", self.rows, self.cols)))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `C = A * B`.
    pub fn matmul(&self, b: &Mat) -> Result<Mat> {
        if self.cols != b.rows {
            return Err(shape_err(
                "matmul",
                format!("{}x{} * {}x{}", self.rows, self.cols, b.rows, b.cols),
            ));
        }
        let (m, n) = (self.rows, b.cols);
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            let arow = self.row(i);
            let crow = &mut out[i * n..(i + 1) * n];
            for (kk, &aik) in arow.iter().enumerate() {
                let brow = &b.data[kk * n..(kk + 1) * n];
                for (c, &bkj) in crow.iter_mut().zip(brow) {
                    *c += aik * bkj;
                }
            }
        }
        Ok(Mat { rows: m, cols: n, data: out })
    }

    /// `C = A * B^T`.
    pub fn matmul_nt(&self, b: &Mat) -> Result<Mat> {
        if self.cols != b.cols {
            return Err(shape_err(
                "matmul_nt",
                format!("{}x{} * ({}x{})^T", self.rows, self.cols, b.rows, b.cols),
            ));
        }
        let (m, n) = (self.rows, b.rows);
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            let arow = self.row(i);
            let orow = &mut out[i * n..(i + 1) * n];
            for (j, o) in orow.iter_mut().enumerate() {
                let brow = b.row(j);
                let mut acc = 0.0;
                for (&a, &bb) in arow.iter().zip(brow) {
                    acc += a * bb;
                }
                *o = acc;
            }
        }
        Ok(Mat { rows: m, cols: n, data: out })
    }

    /// `C = A^T * B` (self is `k x m`, `b` is `k x n`, output `m x n`).
    pub fn matmul_tn(&self, b: &Mat) -> Result<Mat> {
        if self.rows != b.rows {
            return Err(shape_err(
                "matmul_tn",
                format!("({}x{})^T * {}x{}", self.rows, self.cols, b.rows, b.cols),
            ));
        }
        let (m, n) = (self.cols, b.cols);
        let mut out = vec![0.0; m * n];
        for kk in 0..self.rows {
            let arow = self.row(kk);
            let brow = b.row(kk);
            for (i, &aki) in arow.iter().enumerate() {
                let orow = &mut out[i * n..(i + 1) * n];
                for (o, &bkj) in orow.iter_mut().zip(brow) {
                    *o += aki * bkj;
                }
            }
        }
        Ok(Mat { rows: m, cols: n, data: out })
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Mat, f: impl Fn(f64, f64) -> f64) -> Result<Mat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(shape_err(
                "zip_map",
                format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols),
            ));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Mat { rows: self.rows, cols: self.cols, data })
    }

    /// `self += a * x`, elementwise.
    pub fn axpy(&mut self, a: f64, x: &Mat) -> Result<()> {
        if self.rows != x.rows || self.cols != x.cols {
            return Err(shape_err(
                "axpy",
                format!("{}x{} vs {}x{}", self.rows, self.cols, x.rows, x.cols),
            ));
        }
        for (s, &v) in self.data.iter_mut().zip(&x.data) {
            *s += a * v;
        }
        Ok(())
    }

    /// Column totals as a `1 x cols` row vector.
    pub fn col_sums(&self) -> Mat {
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            for (o, &v) in out.iter_mut().zip(self.row(r)) {
                *o += v;
            }
        }
        Mat { rows: 1, cols: self.cols, data: out }
    }

    /// Row totals as a `rows x 1` column vector.
    pub fn row_sums(&self) -> Mat {
        let data = (0..self.rows).map(|r| self.row(r).iter().sum()).collect();
        Mat { rows: self.rows, cols: 1, data }
    }

    /// Largest absolute entry difference; shapes must match.
    pub fn max_abs_diff(&self, other: &Mat) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(shape_err(
                "max_abs_diff",
                format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols),
            ));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}
