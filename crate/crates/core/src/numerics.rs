//! Dense complex linear algebra substrate: matrices, Hermitian
//! eigendecomposition, PSD square roots, operator norms, and unitary
//! dilation of contractions.
//!
//! Matrices are immutable values; every operation returns a new matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Dense complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c(1.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Shape("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|row| row.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_real_diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, c(e));
        }
        m
    }

    pub fn from_complex_diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Dimension of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert_eq!(self.rows, self.cols);
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn kron(&self, rhs: &CMatrix) -> CMatrix {
        let (p, q) = (rhs.rows, rhs.cols);
        CMatrix::from_fn(self.rows * p, self.cols * q, |i, j| {
            self.get(i / p, j / q) * rhs.get(i % p, j % q)
        })
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        assert_eq!(self.cols, v.dim());
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * v.get(j);
            }
            out[i] = acc;
        }
        CVector::new(out)
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// Real parts of the diagonal. Meaningful for the real diagonal
    /// operators that dominate this simulator.
    pub fn diag_real(&self) -> Vec<f64> {
        self.diag().iter().map(|z| z.re).collect()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j && self.get(i, j).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry magnitude of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn to_na(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    fn from_na(m: &DMatrix<C64>) -> CMatrix {
        CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

/// Dense complex vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector {
    data: Vec<C64>,
}

impl CVector {
    pub fn new(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self {
            data: entries.iter().map(|&x| c(x)).collect(),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![C64::new(0.0, 0.0); dim],
        }
    }

    /// Computational basis state |k> of the given dimension.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = c(1.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn get(&self, i: usize) -> C64 {
        self.data[i]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inner product `<self|rhs>`, conjugate-linear in `self`.
    pub fn dot(&self, rhs: &CVector) -> C64 {
        assert_eq!(self.dim(), rhs.dim());
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn normalized(&self) -> Result<CVector> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(CVector::new(self.data.iter().map(|z| z / n).collect()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn re(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }
}

/// Largest singular value of `a`.
pub fn operator_norm(a: &CMatrix) -> Result<f64> {
    if !a.all_finite() {
        return Err(Error::InvalidInput("non-finite matrix entries".into()));
    }
    // Exactly diagonal blocks dominate this simulator; short-circuit them.
    if a.is_square() && a.is_diagonal(0.0) {
        return Ok(a.diag().iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    if a.is_square() && a.is_hermitian(1e-13) {
        let (vals, _) = hermitian_eig(a)?;
        return Ok(vals.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    let gram = a.dagger().mul(a);
    let (vals, _) = hermitian_eig(&gram)?;
    let top = vals.iter().copied().fold(0.0, f64::max);
    Ok(top.max(0.0).sqrt())
}

/// Full spectrum of a Hermitian matrix, eigenvalues ascending with
/// matching eigenvector columns.
pub fn hermitian_eig(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !a.is_square() {
        return Err(Error::Shape("eigendecomposition needs a square matrix".into()));
    }
    if !a.all_finite() {
        return Err(Error::InvalidInput("non-finite matrix entries".into()));
    }
    if !a.is_hermitian(1e-9 * a.max_abs().max(1.0)) {
        return Err(Error::InvalidInput("matrix is not Hermitian".into()));
    }
    let se = a.to_na().symmetric_eigen();
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    Ok((vals, vecs))
}

/// Hermitian PSD square root via eigendecomposition, clamping eigenvalues
/// at -1e-12 (relative).
pub fn psd_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eig(a)?;
    let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let tol = 1e-12 * scale;
    for &v in &vals {
        if v < -tol {
            return Err(Error::NotPsd(v));
        }
    }
    let roots: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    let lambda = CMatrix::from_real_diag(&roots);
    let s = vecs.mul(&lambda).mul(&vecs.dagger());
    // Symmetrize away rounding skew from the three-factor product.
    Ok(s.add(&s.dagger()).scale(c(0.5)))
}

/// Unitary dilation of a contraction: the 2n x 2n unitary whose top-left
/// block equals `a / alpha`.
pub fn dilate(a: &CMatrix, alpha: f64) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::Shape("dilation needs a square matrix".into()));
    }
    let norm = operator_norm(a)?;
    if alpha < norm - 1e-9 {
        return Err(Error::SubnormalizationTooSmall { alpha, norm });
    }
    let n = a.dim();
    let b = a.scale(c(1.0 / alpha));
    let id = CMatrix::identity(n);
    let top_right = psd_sqrt(&id.sub(&b.mul(&b.dagger())))?;
    let bottom_left = psd_sqrt(&id.sub(&b.dagger().mul(&b)))?;
    let mut u = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            u.set(i, j, b.get(i, j));
            u.set(i, n + j, top_right.get(i, j));
            u.set(n + i, j, bottom_left.get(i, j));
            u.set(n + i, n + j, -b.get(j, i).conj());
        }
    }
    Ok(u)
}

/// Deviation of `u` from unitarity, max |(U†U - I)_ij|.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let id = CMatrix::identity(u.dim());
    u.dagger().mul(u).max_abs_diff(&id)
}

/// Partial trace of |psi><psi| over one factor of a bipartite system.
pub fn partial_trace_pure(psi: &CVector, dim_keep: usize, trace_first: bool) -> CMatrix {
    let total = psi.dim();
    assert_eq!(total % dim_keep, 0, "state dimension must factor");
    let dim_other = total / dim_keep;
    let mut rho = CMatrix::zeros(dim_keep, dim_keep);
    for i in 0..dim_keep {
        for j in 0..dim_keep {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..dim_other {
                // Index layout |first>|second>; the kept system is the
                // second factor when tracing the first, and vice versa.
                let (ii, jj) = if trace_first {
                    (k * dim_keep + i, k * dim_keep + j)
                } else {
                    (i * dim_other + k, j * dim_other + k)
                };
                acc += psi.get(ii) * psi.get(jj).conj();
            }
            rho.set(i, j, acc);
        }
    }
    rho
}

pub fn next_power_of_two(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_norm_identity() {
        assert!((operator_norm(&CMatrix::identity(4)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_zero() {
        assert_eq!(operator_norm(&CMatrix::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn operator_norm_diagonal() {
        let a = CMatrix::from_real_diag(&[0.3, -0.5]);
        assert!((operator_norm(&a).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_rejects_nan() {
        let mut a = CMatrix::zeros(2, 2);
        a.set(0, 0, c(f64::NAN));
        assert!(matches!(operator_norm(&a), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn psd_sqrt_identity() {
        let s = psd_sqrt(&CMatrix::identity(3)).unwrap();
        assert!(s.max_abs_diff(&CMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn psd_sqrt_diagonal() {
        let s = psd_sqrt(&CMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!(s.max_abs_diff(&CMatrix::from_real_diag(&[2.0, 3.0])) < 1e-10);
    }

    #[test]
    fn psd_sqrt_random_gram() {
        // Deterministic pseudo-random 6x6 Gram matrix.
        let mut seed = 0x2545f4914f6cdd1du64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let a = CMatrix::from_fn(6, 6, |_, _| C64::new(next(), next()));
        let gram = a.dagger().mul(&a);
        let s = psd_sqrt(&gram).unwrap();
        let resid = s.mul(&s).max_abs_diff(&gram);
        let bound = 1e-10 * operator_norm(&gram).unwrap().max(1.0);
        assert!(resid <= bound, "residual {resid} above {bound}");
    }

    #[test]
    fn psd_sqrt_rejects_negative() {
        let a = CMatrix::from_real_diag(&[1.0, -0.5]);
        assert!(matches!(psd_sqrt(&a), Err(Error::NotPsd(_))));
    }

    #[test]
    fn dilate_zero_block() {
        let u = dilate(&CMatrix::zeros(2, 2), 1.0).unwrap();
        let mut expect = CMatrix::zeros(4, 4);
        for i in 0..2 {
            expect.set(i, 2 + i, c(1.0));
            expect.set(2 + i, i, c(1.0));
        }
        assert!(u.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn dilate_scalar_half() {
        let a = CMatrix::from_real_diag(&[0.5]);
        let u = dilate(&a, 1.0).unwrap();
        let r = 0.75f64.sqrt();
        let expect = CMatrix::from_rows(&[
            vec![c(0.5), c(r)],
            vec![c(r), c(-0.5)],
        ])
        .unwrap();
        assert!(u.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn dilate_rejects_small_alpha() {
        let a = CMatrix::identity(2);
        assert!(matches!(
            dilate(&a, 0.5),
            Err(Error::SubnormalizationTooSmall { .. })
        ));
    }

    #[test]
    fn dilation_is_unitary_and_keeps_block() {
        let a = CMatrix::from_fn(4, 4, |i, j| C64::new(0.11 * ((i + 2 * j) % 5) as f64 - 0.2, 0.07 * ((i * j) % 3) as f64));
        let norm = operator_norm(&a).unwrap();
        let alpha = norm.max(1.0) * 1.25;
        let u = dilate(&a, alpha).unwrap();
        assert!(unitarity_defect(&u) <= 1e-10);
        for i in 0..4 {
            for j in 0..4 {
                let want = a.get(i, j) / c(alpha);
                assert!((u.get(i, j) - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hermitian_eig_sorted_with_residual() {
        let h = CMatrix::from_rows(&[
            vec![c(2.0), C64::new(0.0, -1.0)],
            vec![C64::new(0.0, 1.0), c(3.0)],
        ])
        .unwrap();
        let (vals, vecs) = hermitian_eig(&h).unwrap();
        assert!(vals[0] <= vals[1]);
        for k in 0..2 {
            let v = CVector::new((0..2).map(|i| vecs.get(i, k)).collect());
            let hv = h.apply(&v);
            for i in 0..2 {
                assert!((hv.get(i) - v.get(i) * c(vals[k])).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn partial_trace_bell_state() {
        let psi = CVector::new(vec![c(1.0 / 2f64.sqrt()), c(0.0), c(0.0), c(1.0 / 2f64.sqrt())]);
        let rho = partial_trace_pure(&psi, 2, true);
        assert!(rho.max_abs_diff(&CMatrix::from_real_diag(&[0.5, 0.5])) < 1e-12);
    }
}
