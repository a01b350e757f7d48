//! Dense complex linear algebra for small operators.
//!
//! Everything here works on row-major [`ComplexMatrix`] values of modest size
//! (the eigensolver refuses anything above [`DEFAULT_DIM_CAP`]). Tensor
//! products follow one convention throughout the crate: the left factor is the
//! slower index, so entry `(i * d_b + j)` of a bipartite vector belongs to
//! `|i>_A (x) |j>_B`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default Hermiticity tolerance (max-abs deviation of `m - m^dagger`).
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Largest dimension accepted by [`hermitian_eig`].
pub const DEFAULT_DIM_CAP: usize = 64;

const JACOBI_REL_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Dense complex matrix stored in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!("{rows}x{cols} has no entries")));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![ZERO; rows * cols])
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_raw(rows, cols, data)
    }

    /// Diagonal matrix with real entries.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Real matrix from nested rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    /// Rank-one operator `|u><v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Column vector as an `n x 1` matrix.
    pub fn column(v: &[Complex64]) -> Self {
        Self::from_raw(v.len(), 1, v.to_vec())
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

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.data
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|z| z * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|z| z * s).collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max_ij |a_ij - b_ij|`; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max_ij |m_ij - conj(m_ji)|`; infinite for non-square input.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(m + m^dagger) / 2`, used to strip rounding asymmetry from products.
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        Self::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Checked product.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let (n, k, m) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[l * m..(l + 1) * m];
                for (o, b) in out[i * m..(i + 1) * m].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Self::from_raw(n, m, out)
    }

    /// `a * self * a^dagger`.
    pub fn sandwich(&self, a: &Self) -> Self {
        &(a * self) * &a.adjoint()
    }

    /// Real part of `tr(self * rhs)` without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> Complex64 {
        assert_eq!(self.cols, rhs.rows);
        assert_eq!(self.rows, rhs.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * rhs[(k, i)];
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on incompatible shapes; use [`ComplexMatrix::matmul`] for a checked product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape mismatch");
        ComplexMatrix::from_raw(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        )
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape mismatch");
        ComplexMatrix::from_raw(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        )
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.col(k)
    }

    /// `V diag(f(lambda)) V^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .filter(|&k| fl[k] != 0.0)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }
}

fn check_hermitian(m: &ComplexMatrix, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let dev = m.hermiticity_deviation();
    if dev > tol {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Eigenvalues come back sorted descending. Each eigenvector is phase
/// normalized so its first non-negligible component is real positive; equal
/// eigenvalues are ordered by the lexicographically larger normalized vector
/// first, so identical input always produces identical output.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<HermitianEig> {
    hermitian_eig_capped(m, tol, DEFAULT_DIM_CAP)
}

pub fn hermitian_eig_capped(m: &ComplexMatrix, tol: f64, cap: usize) -> Result<HermitianEig> {
    check_hermitian(m, tol)?;
    if m.rows > cap {
        return Err(Error::DimensionTooLarge { dim: m.rows, cap });
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    jacobi_diagonalize(&mut a, Some(&mut v));
    let values: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    Ok(sort_spectrum(values, v))
}

/// Eigenvalues only (unsorted), for hot loops that never need vectors.
/// Input must already be Hermitian; no checks are made.
pub(crate) fn hermitian_eigenvalues_unchecked(m: &ComplexMatrix) -> Vec<f64> {
    let mut a = m.hermitian_part();
    jacobi_diagonalize(&mut a, None);
    (0..a.rows).map(|i| a[(i, i)].re).collect()
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi_diagonalize(a: &mut ComplexMatrix, mut v: Option<&mut ComplexMatrix>) {
    let n = a.rows;
    let scale = a.frobenius_norm();
    if n < 2 || scale == 0.0 {
        return;
    }
    let target = JACOBI_REL_TOL * scale;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(a) < target {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE * 1e10 {
                    continue;
                }
                // Phase change D = diag(.., e^{-i phi} at q, ..) makes a_pq real positive.
                let phase = apq / r;
                let d = phase.conj();
                for k in 0..n {
                    a[(k, q)] *= d;
                }
                for k in 0..n {
                    a[(q, k)] *= phase;
                }
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        v[(k, q)] *= d;
                    }
                }

                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                let data = &mut a.data;
                for k in 0..n {
                    let (ip, iq) = (k * n + p, k * n + q);
                    let (akp, akq) = (data[ip], data[iq]);
                    data[ip] = akp * c - akq * s;
                    data[iq] = akp * s + akq * c;
                }
                for k in 0..n {
                    let (ip, iq) = (p * n + k, q * n + k);
                    let (apk, aqk) = (data[ip], data[iq]);
                    data[ip] = apk * c - aqk * s;
                    data[iq] = apk * s + aqk * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(app - t * r, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * r, 0.0);

                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - vkq * s;
                        v[(k, q)] = vkp * s + vkq * c;
                    }
                }
            }
        }
    }
}

fn phase_normalize(vec: &mut [Complex64]) {
    let max = vec.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(lead) = vec.iter().find(|z| z.norm() > 1e-12 * max.max(1e-300)).copied() {
        let ph = lead.conj() / lead.norm();
        for z in vec.iter_mut() {
            *z *= ph;
        }
    }
}

fn lexicographic_desc(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        for (p, q) in [(x.re, y.re), (x.im, y.im)] {
            if (p - q).abs() > 1e-12 {
                return q.partial_cmp(&p).unwrap_or(Ordering::Equal);
            }
        }
    }
    Ordering::Equal
}

fn sort_spectrum(values: Vec<f64>, v: ComplexMatrix) -> HermitianEig {
    let n = values.len();
    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            let mut col = v.col(k);
            phase_normalize(&mut col);
            (values[k], col)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));

    // Group numerically equal eigenvalues and order each group by its vectors.
    let scale = values.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let tie = 1e-12 * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (pairs[end - 1].0 - pairs[end].0).abs() <= tie {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| lexicographic_desc(&a.1, &b.1));
        start = end;
    }

    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, k| pairs[k].1[i]);
    HermitianEig { eigenvalues, eigenvectors }
}

/// Applies a real scalar function through the spectral decomposition.
///
/// Fails with [`Error::Domain`] if `f` returns a non-finite value at any
/// eigenvalue.
pub fn matrix_func(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m, HERMITIAN_TOL)?;
    for &l in &eig.eigenvalues {
        if !f(l).is_finite() {
            return Err(Error::Domain(l));
        }
    }
    Ok(eig.reconstruct_with(f).hermitian_part())
}

/// Matrix exponential of a Hermitian matrix.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_func(m, f64::exp)
}

/// Natural logarithm of a positive definite matrix.
pub fn logm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_func(m, |x| if x > 0.0 { x.ln() } else { f64::NAN })
}

/// `x ln x` with the continuous extension `0 ln 0 = 0`. Slightly negative
/// inputs (rounding noise) are treated as zero.
pub fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Kronecker product, left factor slower.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows, a.cols, b.rows, b.cols);
    ComplexMatrix::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

/// Kronecker product of vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Which tensor factor of a bipartite operator to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    /// The left (slower) factor.
    First,
    /// The right (faster) factor.
    Second,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::First => Subsystem::Second,
            Subsystem::Second => Subsystem::First,
        }
    }
}

/// Partial trace of an operator on `C^{d_a} (x) C^{d_b}`, keeping `keep`.
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), keep: Subsystem) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    let d = da * db;
    if m.rows != d || m.cols != d {
        return Err(Error::DimensionMismatch(format!(
            "partial trace over {da}x{db} needs a {d}x{d} matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    Ok(match keep {
        Subsystem::First => ComplexMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
        Subsystem::Second => ComplexMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn check_decomposition(m: &ComplexMatrix, eig: &HermitianEig) {
        let n = m.rows();
        assert!(eig.reconstruct().max_abs_diff(m) <= 1e-10);
        let vv = &eig.eigenvectors.adjoint() * &eig.eigenvectors;
        assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-10);
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eig_identity() {
        let m = ComplexMatrix::identity(2);
        let eig = hermitian_eig(&m, HERMITIAN_TOL).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0]);
        check_decomposition(&m, &eig);
        assert_eq!(eig.vector(0), vec![ONE, ZERO]);
    }

    #[test]
    fn eig_diagonal_sorted_descending() {
        let m = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        let eig = hermitian_eig(&m, HERMITIAN_TOL).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 0.0]);
        check_decomposition(&m, &eig);
    }

    #[test]
    fn eig_pauli_x() {
        // det(X - l) = l^2 - 1
        let m = pauli_x();
        let eig = hermitian_eig(&m, HERMITIAN_TOL).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] + 1.0).abs() < 1e-14);
        check_decomposition(&m, &eig);
    }

    #[test]
    fn eig_complex_entries() {
        // Pauli-Y has eigenvalues +-1 with complex eigenvectors.
        let m = ComplexMatrix::new(2, 2, vec![ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]).unwrap();
        let eig = hermitian_eig(&m, HERMITIAN_TOL).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-14);
        check_decomposition(&m, &eig);
        // first component phase-normalized to be real positive
        let v = eig.vector(0);
        assert!(v[0].im.abs() < 1e-15 && v[0].re > 0.0);
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect, HERMITIAN_TOL), Err(Error::NotSquare { .. })));
        let skew = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        match hermitian_eig(&skew, HERMITIAN_TOL) {
            Err(Error::NotHermitian(dev)) => assert!((dev - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        let big = ComplexMatrix::identity(5);
        assert!(matches!(hermitian_eig_capped(&big, HERMITIAN_TOL, 4), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn eig_is_deterministic_with_degeneracy() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 1.0]]);
        let a = hermitian_eig(&m, HERMITIAN_TOL).unwrap();
        let b = hermitian_eig(&m, HERMITIAN_TOL).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
        assert_eq!(a.vector(1), vec![ONE, ZERO, ZERO]);
        assert_eq!(a.vector(2), vec![ZERO, ZERO, ONE]);
    }

    #[test]
    fn constructor_rejects_non_finite() {
        let err = ComplexMatrix::new(1, 2, vec![ONE, c(f64::NAN, 0.0)]).unwrap_err();
        assert_eq!(err, Error::NonFinite(1));
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::new(2, 2, vec![ONE]).is_err());
    }

    #[test]
    fn matrix_functions() {
        let z = ComplexMatrix::zeros(3, 3);
        assert!(expm(&z).unwrap().max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);

        let d = ComplexMatrix::from_real_diag(&[0.3, -0.7]);
        let back = logm(&expm(&d).unwrap()).unwrap();
        assert!(back.max_abs_diff(&d) < 1e-8);

        let h = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        let e = expm(&h.scale_real(-1.0)).unwrap();
        let expected = ComplexMatrix::from_real_diag(&[1.0, (-1.0f64).exp()]);
        assert!(e.max_abs_diff(&expected) < 1e-15);

        assert!(matches!(logm(&ComplexMatrix::from_real_diag(&[1.0, 0.0])), Err(Error::Domain(_))));
    }

    #[test]
    fn kron_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let p0 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        assert_eq!(kron(&p0, &p0), ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, 0.0]));
        let xx = kron(&pauli_x(), &pauli_x());
        let out = xx.matvec(&[ONE, ZERO, ZERO, ZERO]);
        assert_eq!(out, vec![ZERO, ZERO, ZERO, ONE]);
    }

    #[test]
    fn partial_trace_examples() {
        let ra = ComplexMatrix::new(2, 2, vec![c(0.6, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.4, 0.0)]).unwrap();
        let rb = ComplexMatrix::from_real_diag(&[0.25, 0.5, 0.25]);
        let prod = kron(&ra, &rb);
        let kept_b = partial_trace(&prod, (2, 3), Subsystem::Second).unwrap();
        assert!(kept_b.max_abs_diff(&rb) < 1e-15);
        let kept_a = partial_trace(&prod, (2, 3), Subsystem::First).unwrap();
        assert!(kept_a.max_abs_diff(&ra) < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [c(s, 0.0), ZERO, ZERO, c(s, 0.0)];
        let bell = ComplexMatrix::outer(&phi, &phi);
        let red = partial_trace(&bell, (2, 2), Subsystem::Second).unwrap();
        assert!(red.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);

        assert!(matches!(
            partial_trace(&ComplexMatrix::identity(3), (2, 2), Subsystem::First),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
