//! Dense matrices over R or C with tolerance-aware rank and PSD tests.
//!
//! Storage is always complex; a matrix tagged [`Field::Real`] carries
//! imaginary parts that are exactly zero.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Field of a result built from operands over `self` and `other`.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }

    /// Standard Gaussian scalar: real, or with independent real and imaginary parts.
    pub fn gaussian<R: Rng + ?Sized>(self, rng: &mut R) -> C64 {
        let re: f64 = rng.sample(StandardNormal);
        match self {
            Field::Real => C64::new(re, 0.0),
            Field::Complex => C64::new(re, rng.sample(StandardNormal)),
        }
    }
}

/// Relative tolerances. All three default to `1e-9`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub rank_rel: f64,
    pub psd_rel: f64,
    pub eq_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_rel: 1e-9,
            psd_rel: 1e-9,
            eq_rel: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn new(rank_rel: f64, psd_rel: f64, eq_rel: f64) -> Result<Self> {
        let t = Tolerances {
            rank_rel,
            psd_rel,
            eq_rel,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rel", self.rank_rel),
            ("psd_rel", self.psd_rel),
            ("eq_rel", self.eq_rel),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "tolerance {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
    field: Field,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} ({:?})", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self[(i, j)];
                    if self.field == Field::Real {
                        format!("{:.6}", z.re)
                    } else {
                        format!("{:.6}{:+.6}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl Mat {
    /// Builds a matrix from row-major data. A real field requires zero imaginary parts.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>, field: Field) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                op: "Mat::new",
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        if field == Field::Real && data.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidArgument(
                "real matrix with nonzero imaginary part".into(),
            ));
        }
        Ok(Mat {
            rows,
            cols,
            data,
            field,
        })
    }

    /// Row-major complex data; the field is inferred from the imaginary parts.
    pub fn from_complex(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length");
        let field = if data.iter().all(|z| z.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        };
        Mat {
            rows,
            cols,
            data,
            field,
        }
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols, "data length");
        Mat {
            rows,
            cols,
            data: data.iter().map(|&x| C64::new(x, 0.0)).collect(),
            field: Field::Real,
        }
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        field: Field,
        mut f: impl FnMut(usize, usize) -> C64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat {
            rows,
            cols,
            data,
            field: Field::Complex,
        }
        .coerce(field)
    }

    pub fn zeros(rows: usize, cols: usize, field: Field) -> Self {
        Mat {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
            field,
        }
    }

    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, Field::Real, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        Mat::from_fn(n, n, Field::Complex, |i, j| {
            if i == j {
                entries[i]
            } else {
                ZERO
            }
        })
        .tighten()
    }

    pub fn column(entries: Vec<C64>) -> Self {
        let n = entries.len();
        Mat::from_complex(n, 1, entries)
    }

    /// Unit vector `e_k` (0-based) of length `n`.
    pub fn unit(n: usize, k: usize) -> Self {
        Mat::from_fn(n, 1, Field::Real, |i, _| if i == k { ONE } else { ZERO })
    }

    /// Matrix unit with a single one at `(i, j)`.
    pub fn unit_matrix(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        Mat::from_fn(rows, cols, Field::Real, |a, b| {
            if a == i && b == j {
                ONE
            } else {
                ZERO
            }
        })
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, field: Field, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| field.gaussian(rng)).collect();
        Mat {
            rows,
            cols,
            data,
            field,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self[(i, j)]
    }

    /// Sets one entry; a nonreal value promotes a real matrix to complex.
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        if v.im != 0.0 {
            self.field = Field::Complex;
        }
        self.data[i * self.cols + j] = v;
    }

    /// Retags the matrix. Going to real drops imaginary parts.
    pub fn coerce(mut self, field: Field) -> Self {
        if field == Field::Real {
            for z in &mut self.data {
                z.im = 0.0;
            }
        }
        self.field = field;
        self
    }

    /// Marks the matrix real when every imaginary part is exactly zero.
    pub fn tighten(mut self) -> Self {
        if self.data.iter().all(|z| z.im == 0.0) {
            self.field = Field::Real;
        }
        self
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
            field: Field::Complex,
        }
        .coerce(self.field)
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, self.field, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn adjoint(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, self.field, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        let field = if c.im == 0.0 { self.field } else { Field::Complex };
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
            field,
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        Mat::from_fn(rows, cols, self.field, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        assert!(
            r0 + b.rows <= self.rows && c0 + b.cols <= self.cols,
            "block out of range"
        );
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = b[(i, j)];
            }
        }
        self.field = self.field.join(b.field);
    }

    pub fn col(&self, j: usize) -> Self {
        self.block(0, j, self.rows, 1)
    }

    pub fn row(&self, i: usize) -> Self {
        self.block(i, 0, 1, self.cols)
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(parts: &[Mat]) -> Self {
        let cols = parts.first().map_or(0, |m| m.cols);
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Mat::zeros(rows, cols, Field::Real);
        let mut r = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vstack column mismatch");
            out.set_block(r, 0, p);
            r += p.rows;
        }
        out
    }

    /// Places matrices side by side.
    pub fn hstack(parts: &[Mat]) -> Self {
        let rows = parts.first().map_or(0, |m| m.rows);
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Mat::zeros(rows, cols, Field::Real);
        let mut c = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            out.set_block(0, c, p);
            c += p.cols;
        }
        out
    }

    /// Block-diagonal matrix.
    pub fn block_diag(parts: &[Mat]) -> Self {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Mat::zeros(rows, cols, Field::Real);
        let (mut r, mut c) = (0, 0);
        for p in parts {
            out.set_block(r, c, p);
            r += p.rows;
            c += p.cols;
        }
        out
    }

    pub fn try_mul(&self, rhs: &Mat) -> Result<Mat> {
        if self.cols != rhs.rows {
            return Err(Error::Shape {
                op: "matmul",
                expected: format!("{} rows on the right", self.cols),
                found: format!("{}x{}", rhs.rows, rhs.cols),
            });
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Mat) -> Mat {
        let (m, k, n) = (self.rows, self.cols, rhs.cols);
        let mut data = vec![ZERO; m * n];
        for i in 0..m {
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[p * n..(p + 1) * n];
                let out = &mut data[i * n..(i + 1) * n];
                for (o, &b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Mat {
            rows: m,
            cols: n,
            data,
            field: Field::Complex,
        }
        .coerce(self.field.join(rhs.field))
    }

    fn zip_with(&self, rhs: &Mat, op: &'static str, f: impl Fn(C64, C64) -> C64) -> Result<Mat> {
        if self.shape() != rhs.shape() {
            return Err(Error::Shape {
                op,
                expected: format!("{}x{}", self.rows, self.cols),
                found: format!("{}x{}", rhs.rows, rhs.cols),
            });
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            field: Field::Complex,
        }
        .coerce(self.field.join(rhs.field)))
    }

    pub fn try_add(&self, rhs: &Mat) -> Result<Mat> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Mat) -> Result<Mat> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    /// `(M + M*)/2`.
    pub fn hermitian_part(&self) -> Mat {
        assert!(self.is_square(), "hermitian_part needs a square matrix");
        Mat::from_fn(self.rows, self.cols, self.field, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn to_na(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub fn from_na(m: &DMatrix<C64>, field: Field) -> Mat {
        Mat::from_fn(m.nrows(), m.ncols(), field, |i, j| m[(i, j)])
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Vec::new();
        }
        let mut s: Vec<f64> = self.to_na().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        assert!(self.is_square(), "eigenvalues need a square matrix");
        if self.rows == 0 {
            return Vec::new();
        }
        let h = self.hermitian_part().to_na();
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::Shape {
                op: "inverse",
                expected: "square matrix".into(),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        let inv = self
            .to_na()
            .try_inverse()
            .ok_or(Error::Singular("inverse"))?;
        let out = Mat::from_na(&inv, self.field);
        if !out.is_finite() {
            return Err(Error::Singular("inverse"));
        }
        Ok(out)
    }

    /// Solves `self * X = rhs` for square `self`.
    pub fn solve(&self, rhs: &Mat) -> Result<Mat> {
        if !self.is_square() || self.rows != rhs.rows {
            return Err(Error::Shape {
                op: "solve",
                expected: format!("square system with {} rows", rhs.rows),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        let lu = self.to_na().lu();
        let x = lu.solve(&rhs.to_na()).ok_or(Error::Singular("solve"))?;
        let out = Mat::from_na(&x, self.field.join(rhs.field));
        if !out.is_finite() {
            return Err(Error::Singular("solve"));
        }
        Ok(out)
    }

    /// Minimum-norm least-squares solution of `self * X = rhs`, discarding
    /// singular values below `rel * sigma_max`.
    pub fn lstsq(&self, rhs: &Mat, rel: f64) -> Result<Mat> {
        if self.rows != rhs.rows {
            return Err(Error::Shape {
                op: "lstsq",
                expected: format!("{} rows", self.rows),
                found: format!("{} rows", rhs.rows),
            });
        }
        let field = self.field.join(rhs.field);
        if self.rows == 0 || self.cols == 0 {
            return Ok(Mat::zeros(self.cols, rhs.cols, field));
        }
        let svd = self.to_na().svd(true, true);
        let u = svd.u.as_ref().expect("u requested");
        let vt = svd.v_t.as_ref().expect("v_t requested");
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let b = rhs.to_na();
        let mut x = DMatrix::<C64>::zeros(self.cols, rhs.cols);
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s <= rel * smax || s == 0.0 {
                continue;
            }
            let uk = u.column(k);
            let coeff = uk.adjoint() * &b / C64::new(s, 0.0);
            let vk = vt.row(k).adjoint();
            x += &vk * coeff;
        }
        Ok(Mat::from_na(&x, field))
    }

    /// Orthonormal basis (as columns) of the null space, using a relative
    /// singular-value cut.
    pub fn null_space(&self, rel: f64) -> Mat {
        let n = self.cols;
        if n == 0 {
            return Mat::zeros(0, 0, self.field);
        }
        // Pad to at least n rows so the SVD returns a full right basis.
        let padded = if self.rows < n {
            Mat::vstack(&[self.clone(), Mat::zeros(n - self.rows, n, self.field)])
        } else {
            self.clone()
        };
        let svd = padded.to_na().svd(false, true);
        let vt = svd.v_t.as_ref().expect("v_t requested");
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let cut = rel * smax;
        let cols: Vec<DVector<C64>> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|&(_, &s)| smax == 0.0 || s <= cut)
            .map(|(k, _)| vt.row(k).adjoint())
            .collect();
        let mut out = Mat::zeros(n, cols.len(), self.field);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                out.data[i * cols.len() + j] = c[i];
            }
        }
        out.coerce(self.field)
    }

    /// Orthonormal basis of the column space.
    pub fn range_basis(&self, rel: f64) -> Mat {
        if self.rows == 0 || self.cols == 0 {
            return Mat::zeros(self.rows, 0, self.field);
        }
        let svd = self.to_na().svd(true, false);
        let u = svd.u.as_ref().expect("u requested");
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let keep: Vec<usize> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|&(_, &s)| smax > 0.0 && s > rel * smax)
            .map(|(k, _)| k)
            .collect();
        Mat::from_fn(self.rows, keep.len(), self.field, |i, j| u[(i, keep[j])])
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        self.try_mul(rhs).expect("matmul shape mismatch")
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        self.try_add(rhs).expect("add shape mismatch")
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        self.try_sub(rhs).expect("sub shape mismatch")
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.map(|z| -z)
    }
}

/// Column-stacking vectorization: entry `(i, j)` lands at `j * rows + i`.
pub fn vec(m: &Mat) -> Mat {
    let (r, c) = m.shape();
    Mat::from_fn(r * c, 1, m.field(), |k, _| m[(k % r, k / r)])
}

/// Inverse of [`vec`].
pub fn unvec(v: &Mat, rows: usize, cols: usize) -> Result<Mat> {
    if v.cols() != 1 || v.rows() != rows * cols {
        return Err(Error::Shape {
            op: "unvec",
            expected: format!("{}x1", rows * cols),
            found: format!("{}x{}", v.rows(), v.cols()),
        });
    }
    Ok(Mat::from_fn(rows, cols, v.field(), |i, j| v[(j * rows + i, 0)]))
}

/// Kronecker product `[a_ij B]`.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    Mat::from_fn(ar * br, ac * bc, a.field().join(b.field()), |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn hadamard(a: &Mat, b: &Mat) -> Result<Mat> {
    a.zip_with(b, "hadamard", |x, y| x * y)
}

/// Permutation taking `u ⊗ v` to `v ⊗ u` for `u` of length `m`, `v` of length `n`.
pub fn canonical_shuffle(m: usize, n: usize) -> Mat {
    // (u ⊗ v)[i*n + j] = u_i v_j must land at position j*m + i.
    Mat::from_fn(m * n, m * n, Field::Real, |r, c| {
        let (i, j) = (c / n, c % n);
        if r == j * m + i {
            ONE
        } else {
            ZERO
        }
    })
}

/// Number of singular values above `rank_rel * sigma_max`.
pub fn rank_tol(m: &Mat, tol: &Tolerances) -> usize {
    let s = m.singular_values();
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol.rank_rel * smax).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsdVerdict {
    Yes,
    No,
    Marginal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub verdict: PsdVerdict,
    pub min_eig: f64,
    /// `psd_rel * (1 + ||M||_2)`.
    pub band: f64,
    /// Rounding floor below which a negative eigenvalue counts as zero.
    pub floor: f64,
}

/// Multiple of `dim * eps * (1 + ||M||_2)` treated as rounding noise.
const NOISE_FACTOR: f64 = 1e3;

/// Tolerance-aware positive semidefiniteness of a Hermitian matrix.
///
/// With `band = psd_rel * (1 + ||Ms||_2)` and `Ms` the Hermitian part:
/// `No` when the smallest eigenvalue is below `-band`, `Yes` when it is at or
/// above `-floor` (a rounding-noise floor, never larger than `band`), and
/// `Marginal` in between.
pub fn is_psd(m: &Mat, tol: &Tolerances) -> Result<PsdReport> {
    if !m.is_square() {
        return Err(Error::Shape {
            op: "is_psd",
            expected: "square matrix".into(),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let dev = (m - &m.adjoint()).frobenius_norm();
    let allowed = tol.eq_rel * (1.0 + m.frobenius_norm());
    if dev > allowed {
        return Err(Error::NotHermitian {
            deviation: dev,
            allowed,
        });
    }
    let ev = m.hermitian_eigenvalues();
    let min_eig = ev.first().copied().unwrap_or(0.0);
    let norm = ev.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let band = tol.psd_rel * (1.0 + norm);
    let floor = (NOISE_FACTOR * m.rows().max(1) as f64 * f64::EPSILON * (1.0 + norm)).min(band);
    let verdict = if min_eig < -band {
        PsdVerdict::No
    } else if min_eig >= -floor {
        PsdVerdict::Yes
    } else {
        PsdVerdict::Marginal
    };
    Ok(PsdReport {
        verdict,
        min_eig,
        band,
        floor,
    })
}

/// Sine of the largest principal angle between two subspaces given by
/// orthonormal column bases; `None` if the dimensions differ.
pub fn subspace_distance(a: &Mat, b: &Mat) -> Option<f64> {
    if a.cols() != b.cols() || a.rows() != b.rows() {
        return None;
    }
    if a.cols() == 0 {
        return Some(0.0);
    }
    let proj = &(a * &a.adjoint()) * b;
    Some((b - &proj).spectral_norm())
}

/// Exact binomial coefficient; panics on `u64` overflow.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflow")
}
