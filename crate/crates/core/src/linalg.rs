//! Small dense complex linear algebra helpers shared by every module.
//!
//! All systems in this crate are tiny (a few hundred unknowns at most), so
//! rank and null-space decisions go through a full SVD with a threshold
//! relative to the largest singular value.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Dense complex matrix, the coefficient type of every form in the crate.
pub type CMat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn trace(a: &CMat) -> Complex64 {
    a.trace()
}

/// Frobenius norm.
pub fn norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Re Tr(a^* b)`, the real inner product used for gradients.
pub fn real_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn hermitean_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

pub fn antihermitean_part(a: &CMat) -> CMat {
    (a - a.adjoint()).scale(0.5)
}

/// Removes the trace part: `a - (1/n) Tr(a) 1`.
pub fn traceless_part(a: &CMat) -> CMat {
    let n = a.nrows();
    let t = a.trace() / n as f64;
    a - identity(n) * t
}

/// Projection onto `su(n)`: antihermitean and traceless.
pub fn su_projection(a: &CMat) -> CMat {
    traceless_part(&antihermitean_part(a))
}

pub fn is_hermitean(a: &CMat, tol: f64) -> bool {
    max_abs(&(a - a.adjoint())) <= tol
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - identity(n))) <= tol
}

/// Block-diagonal assembly.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let size: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(size, size);
    let mut off = 0;
    for b in blocks {
        let r = b.nrows();
        out.view_mut((off, off), (r, r)).copy_from(b);
        off += r;
    }
    out
}

/// Row-major flattening of a square matrix into a vector (index `i * n + j`).
pub fn vectorize(a: &CMat) -> DVector<Complex64> {
    let (r, c) = a.shape();
    DVector::from_fn(r * c, |k, _| a[(k / c, k % c)])
}

pub fn unvectorize(v: &[Complex64], rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Singular values of `a`, sorted in decreasing order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

/// Numerical rank with a threshold relative to the largest singular value.
pub fn rank(a: &CMat, rel_tol: f64) -> usize {
    let s = singular_values(a);
    match s.first() {
        Some(&smax) if smax > f64::MIN_POSITIVE => s.iter().filter(|&&x| x > rel_tol * smax).count(),
        _ => 0,
    }
}

/// Orthonormal basis (as columns) of the null space of `a`.
pub fn null_space(a: &CMat, rel_tol: f64) -> CMat {
    let ncols = a.ncols();
    if ncols == 0 {
        return CMat::zeros(0, 0);
    }
    // SVD only returns min(m, n) right singular vectors, so pad short matrices.
    let padded = if a.nrows() < ncols {
        let mut p = CMat::zeros(ncols, ncols);
        p.view_mut((0, 0), (a.nrows(), ncols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = if smax > f64::MIN_POSITIVE { rel_tol * smax } else { f64::INFINITY };
    let cols: Vec<DVector<Complex64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut)
        .map(|(i, _)| v_t.row(i).adjoint())
        .collect();
    if cols.is_empty() {
        CMat::zeros(ncols, 0)
    } else {
        CMat::from_columns(&cols)
    }
}

/// Orthonormal basis (columns) of the column space of `a`.
pub fn column_space(a: &CMat, rel_tol: f64) -> CMat {
    let nrows = a.nrows();
    if a.ncols() == 0 || nrows == 0 {
        return CMat::zeros(nrows, 0);
    }
    let padded = if a.ncols() < nrows {
        let mut p = CMat::zeros(nrows, nrows);
        p.view_mut((0, 0), (nrows, a.ncols())).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cols: Vec<DVector<Complex64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax > f64::MIN_POSITIVE && s > rel_tol * smax)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        CMat::zeros(nrows, 0)
    } else {
        CMat::from_columns(&cols)
    }
}

/// Real counterpart of [`null_space`].
pub fn null_space_real(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let ncols = a.ncols();
    if ncols == 0 {
        return DMatrix::zeros(0, 0);
    }
    let padded = if a.nrows() < ncols {
        let mut p = DMatrix::zeros(ncols, ncols);
        p.view_mut((0, 0), (a.nrows(), ncols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = if smax > f64::MIN_POSITIVE { rel_tol * smax } else { f64::INFINITY };
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(ncols, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Minimum-norm least-squares solution of `a x = b`, together with the
/// residual norm `|a x - b|`.
pub fn least_squares_real(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    if a.ncols() == 0 {
        return (DVector::zeros(0), b.norm());
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let x = svd
        .solve(b, 1e-12 * smax.max(f64::MIN_POSITIVE))
        .expect("u and v_t were requested");
    let res = (a * &x - b).norm();
    (x, res)
}

/// Ratio of the smallest to the largest singular value; zero for singular input.
pub fn inverse_condition(a: &CMat) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    }
}

/// `exp(a)` for a square complex matrix.
pub fn expm(a: &CMat) -> CMat {
    a.clone().exp()
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

pub fn random_hermitean<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    hermitean_part(&random_complex(rng, n, n))
}

/// Random element of `su(n)`.
pub fn random_su<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    su_projection(&random_complex(rng, n, n))
}

/// Random special unitary matrix `exp(scale * X)` with `X` in `su(n)`.
pub fn random_special_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> CMat {
    expm(&random_su(rng, n).scale(scale))
}

/// Random unitary (not necessarily of determinant one).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let h = random_hermitean(rng, n);
    expm(&(h * I))
}

pub fn pauli() -> [CMat; 3] {
    let s1 = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let s2 = CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
    let s3 = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    [s1, s2, s3]
}
