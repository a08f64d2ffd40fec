//! Dense complex linear algebra.
//!
//! Row-major vectors and matrices over `Complex64`, the tensor and outer
//! products used to build kets and weights, a one-sided Jacobi SVD and a
//! cyclic Jacobi eigensolver for Hermitian matrices. Dimensions in this crate
//! stay small (tens at most), so everything is dense and iterative methods are
//! run to full working precision.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type Complex = Complex64;

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);

/// Tolerance on `‖U·U† − I‖_max` accepted by [`UnitaryMatrix::new`].
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on `‖H − H†‖_max` accepted by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 80;

fn check_finite(entries: &[Complex]) -> Result<()> {
    if entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Contract("non-finite entry".into()))
    }
}

/// A complex column vector of dimension at least one.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector {
    entries: Vec<Complex>,
}

impl CVector {
    pub fn new(entries: Vec<Complex>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput("vector must have dimension >= 1"));
        }
        check_finite(&entries)?;
        Ok(Self { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex::new(v, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "vector dimension must be >= 1");
        Self {
            entries: vec![ZERO; dim],
        }
    }

    pub fn basis(index: usize, dim: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Range { index, dim });
        }
        let mut v = Self::zeros(dim);
        v.entries[index] = ONE;
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex> {
        self.entries.iter()
    }

    pub fn into_vec(self) -> Vec<Complex> {
        self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &CVector) -> Result<Complex> {
        if self.dim() != other.dim() {
            return Err(Error::lengths(self.dim(), other.dim()));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scale(&self, factor: Complex) -> CVector {
        CVector {
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Zero-pads (or truncates) to `dim` entries.
    pub fn resized(&self, dim: usize) -> CVector {
        assert!(dim >= 1, "vector dimension must be >= 1");
        let mut entries = self.entries.clone();
        entries.resize(dim, ZERO);
        CVector { entries }
    }

    pub fn max_abs_diff(&self, other: &CVector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for CVector {
    type Output = Complex;
    fn index(&self, i: usize) -> &Complex {
        &self.entries[i]
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        Self {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyInput("matrix must have at least one row and column"));
        }
        if entries.len() != rows * cols {
            return Err(Error::lengths(entries.len(), rows * cols));
        }
        check_finite(&entries)?;
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<Complex>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::lengths(bad.len(), cols));
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Complex::new(v, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex::new(v, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[CVector]) -> Result<Self> {
        let rows = columns.first().map_or(0, CVector::dim);
        if columns.is_empty() {
            return Err(Error::EmptyInput("at least one column required"));
        }
        if let Some(bad) = columns.iter().find(|c| c.dim() != rows) {
            return Err(Error::lengths(bad.dim(), rows));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector {
            entries: (0..self.rows).map(|i| self[(i, j)]).collect(),
        }
    }

    pub fn row(&self, i: usize) -> &[Complex] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::shapes(self.shape(), other.shape()));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out.entries[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &CVector) -> Result<CVector> {
        if self.cols != x.dim() {
            return Err(Error::shapes(self.shape(), (x.dim(), 1)));
        }
        Ok(CVector {
            entries: (0..self.rows)
                .map(|i| self.row(i).iter().zip(x.iter()).map(|(a, b)| a * b).sum())
                .collect(),
        })
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &CMatrix, f: impl Fn(Complex, Complex) -> Complex) -> Result<CMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::shapes(self.shape(), other.shape()));
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, factor: Complex) -> CMatrix {
        self.map(|z| z * factor)
    }

    pub fn map(&self, f: impl Fn(Complex) -> Complex) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `‖M·M† − I‖_max`; infinite for non-square input.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let dot: Complex = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(a, b)| a * b.conj())
                    .sum();
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    /// Zero-padded (or truncated) copy with the given shape; the top-left block is kept.
    pub fn resized(&self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |i, j| {
            if i < self.rows && j < self.cols {
                self[(i, j)]
            } else {
                ZERO
            }
        })
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for CMatrix {
    /// One row per line, entries as `re,im` pairs separated by spaces, 17 significant digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:.16e},{:.16e}", z.re, z.im))
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// A square matrix with `U·U† = I` to within [`UNITARY_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let defect = m.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::Contract(format!(
                "matrix is not unitary (|UU* - I|_max = {defect:e})"
            )));
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        UnitaryMatrix(self.0.adjoint())
    }

    pub fn apply(&self, x: &CVector) -> Result<CVector> {
        self.0.matvec(x)
    }

    /// Product of two unitaries; re-checked because rounding accumulates.
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        UnitaryMatrix::new(self.0.matmul(&other.0)?)
    }
}

impl Index<(usize, usize)> for UnitaryMatrix {
    type Output = Complex;
    fn index(&self, idx: (usize, usize)) -> &Complex {
        &self.0[idx]
    }
}

/// `a ⊗ b`; entry `i·dim(b) + j` is `a[i]·b[j]`.
pub fn tensor_product(a: &CVector, b: &CVector) -> CVector {
    let mut entries = Vec::with_capacity(a.dim() * b.dim());
    for x in a.iter() {
        for y in b.iter() {
            entries.push(x * y);
        }
    }
    CVector { entries }
}

/// `|y⟩⟨x|`: entry `(i, j)` is `y[i]·conj(x[j])`.
pub fn outer_product(y: &CVector, x: &CVector) -> CMatrix {
    CMatrix::from_fn(y.dim(), x.dim(), |i, j| y[i] * x[j].conj())
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    a.matmul(b)
}

pub fn matvec(a: &CMatrix, x: &CVector) -> Result<CVector> {
    a.matvec(x)
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

/// Full singular value decomposition `m = U · diag(s) · V†`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: UnitaryMatrix,
    /// `min(rows, cols)` non-negative values, non-increasing.
    pub s: Vec<f64>,
    pub v: UnitaryMatrix,
}

impl Svd {
    /// `U · diag(s) · V†` rebuilt at the original shape.
    pub fn reconstruct(&self) -> CMatrix {
        let (rows, cols) = (self.u.dim(), self.v.dim());
        let mut sigma = CMatrix::zeros(rows, cols);
        for (k, &s) in self.s.iter().enumerate() {
            sigma[(k, k)] = Complex::new(s, 0.0);
        }
        self.u
            .matrix()
            .matmul(&sigma)
            .and_then(|us| us.matmul(&self.v.matrix().adjoint()))
            .expect("shapes conform by construction")
    }
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
///
/// Columns of `m` (or of `m†` when `m` is wide) are orthogonalized pairwise; the
/// accumulated rotations give `V` and the normalized columns give `U`. Zero
/// singular directions are completed deterministically from the standard basis.
pub fn svd(m: &CMatrix) -> Result<Svd> {
    check_finite(m.as_slice())?;
    if m.rows >= m.cols {
        tall_svd(m)
    } else {
        let t = tall_svd(&m.adjoint())?;
        Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        })
    }
}

fn tall_svd(m: &CMatrix) -> Result<Svd> {
    let (rows, cols) = m.shape();
    // Work column-major: columns[j] is column j of A·V.
    let mut columns: Vec<Vec<Complex>> = (0..cols).map(|j| m.column(j).into_vec()).collect();
    let mut v: Vec<Vec<Complex>> = (0..cols)
        .map(|j| (0..cols).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();

    let scale = m.max_abs();
    // Columns at roundoff level relative to the whole matrix count as zero.
    let negligible = (f64::EPSILON * m.frobenius_norm()).powi(2);
    let mut converged = scale == 0.0 || cols == 1;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                routine: "svd",
                sweeps,
            });
        }
        sweeps += 1;
        converged = true;
        for p in 0..cols - 1 {
            for q in p + 1..cols {
                let alpha: f64 = columns[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = columns[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex = columns[p]
                    .iter()
                    .zip(&columns[q])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt()
                    || g < f64::MIN_POSITIVE
                    || alpha.min(beta) <= negligible
                {
                    continue;
                }
                converged = false;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut columns, p, q, c, s, phase);
                rotate_pair(&mut v, p, q, c, s, phase);
            }
        }
    }

    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));

    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let cutoff = s.first().copied().unwrap_or(0.0) * f64::EPSILON * (rows.max(cols) as f64);
    let mut u_cols: Vec<Vec<Complex>> = Vec::with_capacity(rows);
    for (&j, &sigma) in order.iter().zip(&s) {
        if sigma > cutoff && sigma > 0.0 {
            u_cols.push(columns[j].iter().map(|z| z / sigma).collect());
        }
    }
    complete_orthonormal(&mut u_cols, rows);
    let v_cols: Vec<Vec<Complex>> = order.iter().map(|&j| v[j].clone()).collect();

    let u = CMatrix::from_fn(rows, rows, |i, j| u_cols[j][i]);
    let vm = CMatrix::from_fn(cols, cols, |i, j| v_cols[j][i]);
    Ok(Svd {
        u: UnitaryMatrix::new(u)?,
        s,
        v: UnitaryMatrix::new(vm)?,
    })
}

/// With `b = conj(phase)·y` (so `⟨x|b⟩` is real and positive), replaces the pair
/// by `x' = c·x − s·b`, `y' = s·x + c·b`.
fn rotate_pair(cols: &mut [Vec<Complex>], p: usize, q: usize, c: f64, s: f64, phase: Complex) {
    let back = phase.conj();
    let (left, right) = cols.split_at_mut(q);
    let x = &mut left[p];
    let y = &mut right[0];
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let a = *xi;
        let b = *yi * back;
        *xi = a * c - b * s;
        *yi = a * s + b * c;
    }
}

/// Extends `cols` (orthonormal vectors in `C^dim`) to a full orthonormal basis.
fn complete_orthonormal(cols: &mut Vec<Vec<Complex>>, dim: usize) {
    while cols.len() < dim {
        let mut best: Option<(f64, Vec<Complex>)> = None;
        for e in 0..dim {
            let mut w: Vec<Complex> = (0..dim).map(|i| if i == e { ONE } else { ZERO }).collect();
            for _ in 0..2 {
                for q in cols.iter() {
                    let proj: Complex = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= proj * qi;
                    }
                }
            }
            let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(bn, _)| n > *bn + 1e-12) {
                best = Some((n, w));
            }
        }
        let (n, w) = best.expect("dim >= 1");
        cols.push(w.into_iter().map(|z| z / n).collect());
    }
}

/// Eigendecomposition `h = Ξ · diag(λ) · Ξ†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Real eigenvalues, non-increasing.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: UnitaryMatrix,
}

impl HermitianEig {
    pub fn eigenvector(&self, i: usize) -> CVector {
        self.vectors.matrix().column(i)
    }
}

/// Cyclic complex Jacobi eigensolver.
pub fn hermitian_eig(h: &CMatrix) -> Result<HermitianEig> {
    if !h.is_square() {
        return Err(Error::Contract(format!(
            "hermitian_eig needs a square matrix, got {}x{}",
            h.rows, h.cols
        )));
    }
    check_finite(h.as_slice())?;
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::Contract(format!(
            "matrix is not Hermitian (|H - H*|_max = {defect:e})"
        )));
    }
    let n = h.rows;
    // Symmetrize exactly so rotations see a Hermitian matrix.
    let mut a = CMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    for i in 0..n {
        a[(i, i)] = Complex::new(a[(i, i)].re, 0.0);
    }
    let mut vecs = CMatrix::identity(n);
    let total = a.frobenius_norm();
    let mut sweeps = 0;
    loop {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * total.max(f64::MIN_POSITIVE) || n == 1 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                routine: "hermitian_eig",
                sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let b = a[(p, q)];
                let g = b.norm();
                if g == 0.0 {
                    continue;
                }
                let phase = b / g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]] on the (p, q) plane.
                let g_pp = Complex::new(c, 0.0);
                let g_pq = Complex::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;
                // A ← A·G (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                    let vkp = vecs[(k, p)];
                    let vkq = vecs[(k, q)];
                    vecs[(k, p)] = vkp * g_pp + vkq * g_qp;
                    vecs[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
                // A ← G†·A (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re).then(x.cmp(&y)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    Ok(HermitianEig {
        values,
        vectors: UnitaryMatrix::new(vectors)?,
    })
}

/// Standard complex Gaussian entry, `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_complex_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Random Hermitian matrix `(G + G†)/2` with complex Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = random_complex_matrix(n, n, rng);
    let ga = g.adjoint();
    g.add(&ga).expect("square").scale(Complex::new(0.5, 0.0))
}

/// Unitary Q factor of a complex Gaussian matrix (modified Gram–Schmidt,
/// phases fixed so that R has a positive diagonal).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    loop {
        let g = random_complex_matrix(n, n, rng);
        if let Some(q) = gram_schmidt_columns(&g) {
            if let Ok(u) = UnitaryMatrix::new(q) {
                return u;
            }
        }
    }
}

fn gram_schmidt_columns(m: &CMatrix) -> Option<CMatrix> {
    let n = m.cols;
    let mut qs: Vec<Vec<Complex>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut w = m.column(j).into_vec();
        for _ in 0..2 {
            for q in &qs {
                let proj: Complex = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= proj * qi;
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        qs.push(w.into_iter().map(|z| z / norm).collect());
    }
    Some(CMatrix::from_fn(m.rows, n, |i, j| qs[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn real_vec(v: &[f64]) -> CVector {
        CVector::from_real(v).unwrap()
    }

    #[test]
    fn tensor_of_basis_states() {
        let out = tensor_product(&real_vec(&[1.0, 0.0]), &real_vec(&[0.0, 1.0]));
        assert_eq!(out, real_vec(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn tensor_two_qubit_layout() {
        let psi = CVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let phi = CVector::new(vec![c(1.0, 1.0), c(2.0, -1.0)]).unwrap();
        let out = tensor_product(&psi, &phi);
        let expected = [psi[0] * phi[0], psi[0] * phi[1], psi[1] * phi[0], psi[1] * phi[1]];
        assert_eq!(out.as_slice(), &expected);
    }

    #[test]
    fn tensor_matches_nested_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = CVector::new((0..3).map(|_| complex_gaussian(&mut rng)).collect()).unwrap();
        let b = CVector::new((0..2).map(|_| complex_gaussian(&mut rng)).collect()).unwrap();
        let out = tensor_product(&a, &b);
        assert_eq!(out.dim(), 6);
        let mut k = 0;
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(out[k], a[i] * b[j]);
                k += 1;
            }
        }
        assert!((out.norm() - a.norm() * b.norm()).abs() < 1e-12);
    }

    #[test]
    fn outer_products() {
        let m = outer_product(&real_vec(&[0.0, 1.0]), &real_vec(&[1.0, 0.0]));
        assert_eq!(m, CMatrix::from_real_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap());
        let p = outer_product(&real_vec(&[1.0, 0.0]), &real_vec(&[1.0, 0.0]));
        assert_eq!(p, CMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y = CVector::new((0..3).map(|_| complex_gaussian(&mut rng)).collect()).unwrap();
        let x = CVector::new((0..2).map(|_| complex_gaussian(&mut rng)).collect()).unwrap();
        let m = outer_product(&y, &x);
        assert_eq!(m.shape(), (3, 2));
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(m[(i, j)], y[i] * x[j].conj());
            }
        }
    }

    #[test]
    fn matmul_against_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_complex_matrix(3, 2, &mut rng);
        let b = random_complex_matrix(2, 4, &mut rng);
        let p = a.matmul(&b).unwrap();
        for i in 0..3 {
            for j in 0..4 {
                let mut acc = ZERO;
                for k in 0..2 {
                    acc += a[(i, k)] * b[(k, j)];
                }
                assert!((p[(i, j)] - acc).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn identity_and_adjoint() {
        let x = CVector::new(vec![c(1.0, 2.0), c(-3.0, 0.5)]).unwrap();
        assert_eq!(CMatrix::identity(2).matvec(&x).unwrap(), x);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_complex_matrix(3, 5, &mut rng);
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn dimension_errors_name_both_shapes() {
        let a = CMatrix::zeros(3, 2);
        let b = CMatrix::zeros(3, 2);
        let err = a.matmul(&b).unwrap_err();
        assert_eq!(err.to_string(), "dimension mismatch: 3x2 vs 3x2");
        assert!(a.matvec(&CVector::zeros(3)).is_err());
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(CVector::new(vec![c(f64::NAN, 0.0)]).is_err());
        assert!(CMatrix::from_real_rows(&[vec![f64::INFINITY]]).is_err());
        assert!(CVector::new(vec![]).is_err());
    }

    #[test]
    fn svd_of_identity() {
        let d = svd(&CMatrix::identity(2)).unwrap();
        assert_eq!(d.s, vec![1.0, 1.0]);
        let uv = d.u.matrix().matmul(&d.v.matrix().adjoint()).unwrap();
        assert!(uv.max_abs_diff(&CMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn svd_of_rank_deficient_diagonal() {
        let d = svd(&CMatrix::diagonal(&[3.0, 0.0])).unwrap();
        assert_eq!(d.s, vec![3.0, 0.0]);
        assert!(d.reconstruct().max_abs_diff(&CMatrix::diagonal(&[3.0, 0.0])) < 1e-14);
    }

    #[test]
    fn svd_sorts_and_handles_rectangular_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for &(r, cdim) in &[(4, 4), (5, 2), (2, 5), (1, 3), (3, 1)] {
            let m = random_complex_matrix(r, cdim, &mut rng);
            let d = svd(&m).unwrap();
            assert_eq!(d.s.len(), r.min(cdim));
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
            assert!(d.s.iter().all(|&s| s >= 0.0));
            assert_eq!(d.u.dim(), r);
            assert_eq!(d.v.dim(), cdim);
            assert!(d.reconstruct().max_abs_diff(&m) <= 1e-10 * m.max_abs().max(1.0));
        }
    }

    #[test]
    fn svd_of_zero_matrix() {
        let d = svd(&CMatrix::zeros(3, 3)).unwrap();
        assert_eq!(d.s, vec![0.0; 3]);
        assert!(d.u.matrix().unitarity_defect() < 1e-12);
    }

    #[test]
    fn eig_of_pauli_z() {
        let z = CMatrix::diagonal(&[1.0, -1.0]);
        let e = hermitian_eig(&z).unwrap();
        assert_eq!(e.values, vec![1.0, -1.0]);
        assert!(e.vectors.matrix().max_abs_diff(&CMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn eig_of_pauli_x() {
        let x = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = hermitian_eig(&x).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // Eigenvectors are fixed up to a global phase; compare |⟨expected|ξ⟩|.
        let plus = real_vec(&[h, h]);
        let minus = real_vec(&[h, -h]);
        assert!((plus.inner(&e.eigenvector(0)).unwrap().norm() - 1.0).abs() < 1e-14);
        assert!((minus.inner(&e.eigenvector(1)).unwrap().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_trace_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = random_hermitian(5, &mut rng);
        let e = hermitian_eig(&h).unwrap();
        let sum: f64 = e.values.iter().sum();
        assert!((sum - h.trace().re).abs() < 1e-10);
        let hx = h.matmul(e.vectors.matrix()).unwrap();
        let xl = e
            .vectors
            .matrix()
            .matmul(&CMatrix::diagonal(&e.values))
            .unwrap();
        assert!(hx.max_abs_diff(&xl) <= 1e-10 * h.max_abs().max(1.0));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::Contract(_))));
        assert!(matches!(hermitian_eig(&CMatrix::zeros(2, 3)), Err(Error::Contract(_))));
    }

    #[test]
    fn unitary_constructor_checks() {
        assert!(UnitaryMatrix::new(CMatrix::diagonal(&[1.0, 2.0])).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_unitary(6, &mut rng);
        assert!(u.matrix().unitarity_defect() < 1e-12);
    }
}
