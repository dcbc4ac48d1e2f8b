//! Hermitean bases of `sl_n`, their structure constants and metric, and
//! finite-dimensional representations.
//!
//! The structure constants follow `[E_k, E_l] = Σ_m C^m_{kl} E_m` with no
//! factor of `i` removed, so they are purely imaginary.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{self, MatrixJson};
use crate::error::{Error, Result};
use crate::linalg::{self, c, commutator, CMat, ONE, ZERO};

/// Relative singular-value threshold for rank and null-space decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Number of random draws from the intertwiner space before giving up.
const INTERTWINER_ATTEMPTS: usize = 32;
const INTERTWINER_SEED: u64 = 0x5EED_1A7E;

/// A hermitean traceless basis of `sl_n` with its structure constants and
/// metric `g_{kl} = (1/n) Tr(E_k E_l)`.
#[derive(Debug, Clone)]
pub struct LieBasis {
    n: usize,
    e: Vec<CMat>,
    /// `C^m_{kl}` stored at `(m * dim + k) * dim + l`.
    c: Vec<Complex64>,
    g: DMatrix<f64>,
    g_inv: DMatrix<f64>,
    sqrt_abs_det_g: f64,
}

impl LieBasis {
    /// Builds the basis data from user-supplied matrices, validating
    /// hermiticity, tracelessness, linear independence and closure.
    pub fn from_matrices(e: Vec<CMat>) -> Result<Self> {
        let n = e.first().map(|m| m.nrows()).ok_or_else(|| Error::invalid("empty basis"))?;
        let dim = n * n - 1;
        if n < 2 || e.len() != dim {
            return Err(Error::invalid(format!(
                "a basis of sl_{n} needs {dim} matrices, got {}",
                e.len()
            )));
        }
        let scale = e.iter().map(linalg::max_abs).fold(0.0, f64::max).max(1.0);
        for (k, m) in e.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::invalid(format!("basis element {k} is not {n}x{n}")));
            }
            if !linalg::is_hermitean(m, 1e-12 * scale) {
                return Err(Error::invalid(format!("basis element {k} is not hermitean")));
            }
            if m.trace().norm() > 1e-12 * scale * n as f64 {
                return Err(Error::invalid(format!("basis element {k} is not traceless")));
            }
        }
        let g = DMatrix::from_fn(dim, dim, |k, l| (e[k].clone() * &e[l]).trace().re / n as f64);
        let g = (&g + g.transpose()) * 0.5;
        let chol = g
            .clone()
            .cholesky()
            .ok_or_else(|| Error::invalid("basis matrices are linearly dependent"))?;
        let g_inv = chol.inverse();
        let sqrt_abs_det_g = g.determinant().abs().sqrt();

        let mut cst = vec![ZERO; dim * dim * dim];
        for k in 0..dim {
            for l in 0..dim {
                let br = commutator(&e[k], &e[l]);
                // Project onto the dual basis: x^m = g^{mp} (1/n) Tr(E_p x).
                let dual: Vec<Complex64> =
                    (0..dim).map(|p| (e[p].clone() * &br).trace() / n as f64).collect();
                for m in 0..dim {
                    let mut s = ZERO;
                    for p in 0..dim {
                        s += dual[p] * g_inv[(m, p)];
                    }
                    cst[(m * dim + k) * dim + l] = s;
                }
            }
        }
        let basis = LieBasis { n, e, c: cst, g, g_inv, sqrt_abs_det_g };
        let res = basis.closure_residual();
        if res > 1e-9 * scale * scale {
            return Err(Error::invalid(format!(
                "basis does not close under commutators (residual {res:.3e})"
            )));
        }
        Ok(basis)
    }

    /// Matrix size `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of basis elements, `n² − 1`.
    pub fn dim(&self) -> usize {
        self.e.len()
    }

    pub fn elements(&self) -> &[CMat] {
        &self.e
    }

    pub fn element(&self, k: usize) -> &CMat {
        &self.e[k]
    }

    /// `C^m_{kl}`.
    #[inline]
    pub fn structure_constant(&self, m: usize, k: usize, l: usize) -> Complex64 {
        let d = self.dim();
        self.c[(m * d + k) * d + l]
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn metric_inverse(&self) -> &DMatrix<f64> {
        &self.g_inv
    }

    pub fn sqrt_abs_det_g(&self) -> f64 {
        self.sqrt_abs_det_g
    }

    /// Coordinates `x^k` of the traceless part of `x` in the basis `E_k`.
    pub fn coordinates(&self, x: &CMat) -> Vec<Complex64> {
        let d = self.dim();
        let dual: Vec<Complex64> =
            self.e.iter().map(|ek| (ek * x).trace() / self.n as f64).collect();
        (0..d)
            .map(|k| (0..d).map(|l| dual[l] * self.g_inv[(k, l)]).sum())
            .collect()
    }

    /// `Σ_k x^k E_k`.
    pub fn combine(&self, coords: &[Complex64]) -> CMat {
        let mut out = CMat::zeros(self.n, self.n);
        for (x, ek) in coords.iter().zip(&self.e) {
            out += ek * *x;
        }
        out
    }

    /// `Σ_m C^m_{kl} X_m` for an arbitrary list of matrices `X_m`.
    pub fn contract(&self, k: usize, l: usize, xs: &[CMat]) -> CMat {
        let (r, cc) = xs[0].shape();
        let mut out = CMat::zeros(r, cc);
        for (m, xm) in xs.iter().enumerate() {
            let cm = self.structure_constant(m, k, l);
            if cm != ZERO {
                out += xm * cm;
            }
        }
        out
    }

    /// `max_{k,l} ‖[E_k, E_l] − Σ_m C^m_{kl} E_m‖`.
    pub fn closure_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for k in 0..d {
            for l in 0..d {
                let r = commutator(&self.e[k], &self.e[l]) - self.contract(k, l, &self.e);
                worst = worst.max(linalg::norm(&r));
            }
        }
        worst
    }

    /// Largest violation of the Jacobi identity on the structure constants.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for k in 0..d {
            for l in 0..d {
                for q in 0..d {
                    for p in 0..d {
                        let mut s = ZERO;
                        for m in 0..d {
                            s += self.structure_constant(m, k, l) * self.structure_constant(p, m, q)
                                + self.structure_constant(m, l, q) * self.structure_constant(p, m, k)
                                + self.structure_constant(m, q, k) * self.structure_constant(p, m, l);
                        }
                        worst = worst.max(s.norm());
                    }
                }
            }
        }
        worst
    }

    /// The basis `E'_k = Σ_j t_{jk} E_j` for a real invertible matrix `t`.
    pub fn change_basis(&self, t: &DMatrix<f64>) -> Result<Self> {
        let d = self.dim();
        if t.shape() != (d, d) {
            return Err(Error::invalid("basis change has the wrong shape"));
        }
        let e = (0..d)
            .map(|k| {
                let mut m = CMat::zeros(self.n, self.n);
                for j in 0..d {
                    m += &self.e[j] * c(t[(j, k)], 0.0);
                }
                m
            })
            .collect();
        LieBasis::from_matrices(e)
    }

    /// Same matrix size and basis elements (to `1e-12`).
    pub fn same_as(&self, other: &LieBasis) -> bool {
        self.n == other.n
            && self.e.len() == other.e.len()
            && self.e.iter().zip(&other.e).all(|(a, b)| linalg::max_abs(&(a - b)) <= 1e-12)
    }
}

#[derive(Serialize, Deserialize)]
struct LieBasisJson {
    n: usize,
    #[serde(with = "encoding::cmat_vec")]
    elements: Vec<CMat>,
    /// `structure_constants[m][k][l] = C^m_{kl}` as `[re, im]`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    structure_constants: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    metric: Vec<Vec<f64>>,
    #[serde(default)]
    sqrt_abs_det_g: f64,
}

impl Serialize for LieBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let json = LieBasisJson {
            n: self.n,
            elements: self.e.clone(),
            structure_constants: (0..d)
                .map(|m| {
                    (0..d)
                        .map(|k| {
                            (0..d)
                                .map(|l| {
                                    let z = self.structure_constant(m, k, l);
                                    [z.re, z.im]
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
            metric: (0..d).map(|k| (0..d).map(|l| self.g[(k, l)]).collect()).collect(),
            sqrt_abs_det_g: self.sqrt_abs_det_g,
        };
        json.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LieBasis {
    /// Only the matrices are read; everything else is recomputed.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = LieBasisJson::deserialize(d)?;
        let basis = LieBasis::from_matrices(json.elements).map_err(serde::de::Error::custom)?;
        if basis.n != json.n {
            return Err(serde::de::Error::custom("declared n does not match the matrices"));
        }
        Ok(basis)
    }
}

fn matrix_unit(n: usize, i: usize, j: usize, z: Complex64) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = z;
    m
}

/// The generalized Gell-Mann basis of `sl_n`.
///
/// Ordering: for each column `k = 1..n−1` the symmetric and antisymmetric
/// off-diagonal pairs `(j, k)` with `j < k` are emitted in turn, followed by
/// the diagonal matrix `D_k`. For `n = 2` this gives the Pauli matrices and for
/// `n = 3` the Gell-Mann matrices `λ_1 … λ_8` in their usual order.
pub fn build_su_basis(n: usize) -> Result<LieBasis> {
    if n < 2 {
        return Err(Error::invalid(format!("sl_n needs n >= 2, got {n}")));
    }
    if n * n - 1 > crate::exterior::MAX_GENERATORS {
        return Err(Error::Capacity(format!("n = {n} exceeds the supported size 8")));
    }
    let mut e = Vec::with_capacity(n * n - 1);
    for k in 1..n {
        for j in 0..k {
            e.push(matrix_unit(n, j, k, ONE) + matrix_unit(n, k, j, ONE));
            e.push(matrix_unit(n, j, k, c(0.0, -1.0)) + matrix_unit(n, k, j, c(0.0, 1.0)));
        }
        let l = k as f64;
        let s = (2.0 / (l * (l + 1.0))).sqrt();
        let mut dk = CMat::zeros(n, n);
        for i in 0..k {
            dk[(i, i)] = c(s, 0.0);
        }
        dk[(k, k)] = c(-l * s, 0.0);
        e.push(dk);
    }
    LieBasis::from_matrices(e)
}

/// A representation `E_k ↦ A_k` of the Lie algebra of a [`LieBasis`] on `C^r`.
#[derive(Debug, Clone)]
pub struct LieRep {
    basis: Arc<LieBasis>,
    a: Vec<CMat>,
}

impl LieRep {
    /// Wraps the images of the basis elements. The representation property is
    /// not enforced here; see [`LieRep::closure_residual`].
    pub fn new(basis: Arc<LieBasis>, a: Vec<CMat>) -> Result<Self> {
        if a.len() != basis.dim() {
            return Err(Error::invalid(format!(
                "expected {} matrices, got {}",
                basis.dim(),
                a.len()
            )));
        }
        let r = a.first().map(|m| m.nrows()).unwrap_or(0);
        if r == 0 || a.iter().any(|m| m.nrows() != r || m.ncols() != r) {
            return Err(Error::invalid("representation matrices must be square of one size"));
        }
        Ok(LieRep { basis, a })
    }

    pub fn r(&self) -> usize {
        self.a[0].nrows()
    }

    pub fn basis(&self) -> &Arc<LieBasis> {
        &self.basis
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.a
    }

    /// `max_{k<l} ‖[A_k, A_l] − Σ_m C^m_{kl} A_m‖`.
    pub fn closure_residual(&self) -> f64 {
        let d = self.basis.dim();
        let mut worst = 0.0f64;
        for k in 0..d {
            for l in k + 1..d {
                let r = commutator(&self.a[k], &self.a[l]) - self.basis.contract(k, l, &self.a);
                worst = worst.max(linalg::norm(&r));
            }
        }
        worst
    }

    /// `T A_k T⁻¹`.
    pub fn conjugate(&self, t: &CMat) -> Result<LieRep> {
        let t_inv = t
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::invalid("conjugating matrix is singular"))?;
        let a = self.a.iter().map(|m| t * m * &t_inv).collect();
        Ok(LieRep { basis: self.basis.clone(), a })
    }

    /// Quadratic Casimir `Σ g^{kl} A_k A_l`.
    pub fn casimir(&self) -> CMat {
        let d = self.basis.dim();
        let gi = self.basis.metric_inverse();
        let mut out = CMat::zeros(self.r(), self.r());
        for k in 0..d {
            for l in 0..d {
                if gi[(k, l)] != 0.0 {
                    out += &self.a[k] * &self.a[l] * c(gi[(k, l)], 0.0);
                }
            }
        }
        out
    }
}

/// Spin-`j` representation of `sl_2` with `2j = two_j`, expressed in the given
/// `n = 2` basis so that the structure constants match.
pub fn sl2_irrep(basis: &Arc<LieBasis>, two_j: usize) -> Result<LieRep> {
    if basis.n() != 2 {
        return Err(Error::invalid("sl2 irreps need an n = 2 basis"));
    }
    let r = two_j + 1;
    let j = two_j as f64 / 2.0;
    // Angular momentum matrices in the |j, m> basis, m = j, j-1, …, -j.
    let mut jz = CMat::zeros(r, r);
    let mut jp = CMat::zeros(r, r);
    for a in 0..r {
        let m = j - a as f64;
        jz[(a, a)] = c(m, 0.0);
        if a > 0 {
            // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>
            jp[(a - 1, a)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * c(0.5, 0.0);
    let jy = (&jp - &jm) * c(0.0, -0.5);
    let spin = [jx, jy, jz];
    let sigma = linalg::pauli();
    let a = basis
        .elements()
        .iter()
        .map(|ek| {
            let mut m = CMat::zeros(r, r);
            for (s, jj) in sigma.iter().zip(&spin) {
                // E_k = Σ_a x^a σ_a with x^a = ½ Tr(σ_a E_k); σ_a ↦ 2 J_a.
                let x = (s * ek).trace() * 0.5;
                m += jj * (x * 2.0);
            }
            m
        })
        .collect();
    LieRep::new(basis.clone(), a)
}

/// Block-diagonal sum of representations over the same basis.
pub fn direct_sum(reps: &[LieRep]) -> Result<LieRep> {
    let first = reps.first().ok_or_else(|| Error::invalid("direct sum of an empty list"))?;
    for rep in reps {
        if !Arc::ptr_eq(&rep.basis, &first.basis) && !rep.basis.same_as(&first.basis) {
            return Err(Error::invalid("representations over different bases"));
        }
    }
    let d = first.basis.dim();
    let a = (0..d)
        .map(|k| linalg::block_diag(&reps.iter().map(|r| r.a[k].clone()).collect::<Vec<_>>()))
        .collect();
    LieRep::new(first.basis.clone(), a)
}

/// Matrix of `x ↦ a x` acting on row-major vectorized `x`.
pub fn left_mult(a: &CMat, cols: usize) -> CMat {
    a.kronecker(&linalg::identity(cols))
}

/// Matrix of `x ↦ x b` acting on row-major vectorized `x`.
pub fn right_mult(b: &CMat, rows: usize) -> CMat {
    linalg::identity(rows).kronecker(&b.transpose())
}

fn stack_rows(blocks: &[CMat], ncols: usize) -> CMat {
    let total: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(total, ncols);
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, 0), (b.nrows(), ncols)).copy_from(b);
        off += b.nrows();
    }
    out
}

fn columns_as_matrices(null: &CMat, rows: usize, cols: usize) -> Vec<CMat> {
    (0..null.ncols())
        .map(|j| {
            let v: Vec<Complex64> = null.column(j).iter().copied().collect();
            linalg::unvectorize(&v, rows, cols)
        })
        .collect()
}

/// Basis of the commutant `{x ∈ M_n : [x, s] = 0 for all s ∈ S}`.
pub fn commutant(n: usize, s: &[CMat]) -> Result<Vec<CMat>> {
    if s.iter().any(|m| m.nrows() != n || m.ncols() != n) {
        return Err(Error::invalid(format!("commutant needs {n}x{n} matrices")));
    }
    if s.is_empty() {
        return Ok(columns_as_matrices(&linalg::identity(n * n), n, n));
    }
    let blocks: Vec<CMat> = s.iter().map(|m| right_mult(m, n) - left_mult(m, n)).collect();
    let system = stack_rows(&blocks, n * n);
    Ok(columns_as_matrices(&linalg::null_space(&system, RANK_TOL), n, n))
}

/// Outcome of an equivalence test between two representations.
#[derive(Debug, Clone)]
pub struct Equivalence {
    pub equivalent: bool,
    /// Invertible `T` with `T A_k = B_k T`.
    pub intertwiner: Option<CMat>,
    /// `max_k ‖T A_k − B_k T‖ / ‖T‖` for the returned intertwiner.
    pub residual: f64,
}

impl Equivalence {
    fn no() -> Self {
        Equivalence { equivalent: false, intertwiner: None, residual: f64::INFINITY }
    }
}

fn intertwining_residual(a: &LieRep, b: &LieRep, t: &CMat) -> f64 {
    let tn = linalg::norm(t).max(f64::MIN_POSITIVE);
    a.a.iter()
        .zip(&b.a)
        .map(|(ak, bk)| linalg::norm(&(t * ak - bk * t)) / tn)
        .fold(0.0, f64::max)
}

/// Power traces `Tr(K^p)/r`, `p = 1..r`, of the Casimir; they fix its spectrum.
fn casimir_power_traces(rep: &LieRep) -> Vec<Complex64> {
    let k = rep.casimir();
    let mut pw = linalg::identity(rep.r());
    (0..rep.r())
        .map(|_| {
            pw = &pw * &k;
            pw.trace() / rep.r() as f64
        })
        .collect()
}

/// Decides whether two representations are equivalent, returning an
/// intertwiner when they are.
pub fn reps_equivalent(a: &LieRep, b: &LieRep) -> Result<Equivalence> {
    reps_equivalent_with_tol(a, b, RANK_TOL)
}

/// [`reps_equivalent`] with an explicit relative tolerance, for
/// representations that are only known approximately.
pub fn reps_equivalent_with_tol(a: &LieRep, b: &LieRep, tol: f64) -> Result<Equivalence> {
    if !Arc::ptr_eq(&a.basis, &b.basis) && !a.basis.same_as(&b.basis) {
        return Err(Error::invalid("representations over different bases"));
    }
    let r = a.r();
    if r != b.r() {
        return Ok(Equivalence::no());
    }
    let scale = a.a.iter().chain(&b.a).map(linalg::max_abs).fold(1.0, f64::max);
    if a.a.iter().zip(&b.a).all(|(x, y)| linalg::max_abs(&(x - y)) <= tol * scale) {
        let t = linalg::identity(r);
        let residual = intertwining_residual(a, b, &t);
        return Ok(Equivalence { equivalent: true, intertwiner: Some(t), residual });
    }
    // Necessary condition: conjugate Casimirs have the same spectrum.
    let (ta, tb) = (casimir_power_traces(a), casimir_power_traces(b));
    let prefilter_tol = tol.max(1e-8);
    for (x, y) in ta.iter().zip(&tb) {
        if (x - y).norm() > prefilter_tol * x.norm().max(y.norm()).max(scale * scale) {
            return Ok(Equivalence::no());
        }
    }
    // T A_k − B_k T = 0 for all k.
    let blocks: Vec<CMat> =
        a.a.iter().zip(&b.a).map(|(ak, bk)| right_mult(ak, r) - left_mult(bk, r)).collect();
    let null = linalg::null_space(&stack_rows(&blocks, r * r), tol);
    if null.ncols() == 0 {
        return Ok(Equivalence::no());
    }
    let candidates = columns_as_matrices(&null, r, r);
    let mut rng = ChaCha8Rng::seed_from_u64(INTERTWINER_SEED);
    for _ in 0..INTERTWINER_ATTEMPTS {
        let coeffs = linalg::random_complex(&mut rng, candidates.len(), 1);
        let mut t = CMat::zeros(r, r);
        for (z, m) in coeffs.iter().zip(&candidates) {
            t += m * *z;
        }
        let det = t.determinant();
        if det.norm() > 0.0 && linalg::inverse_condition(&t) > 1e-8 {
            let residual = intertwining_residual(a, b, &t);
            return Ok(Equivalence { equivalent: true, intertwiner: Some(t), residual });
        }
    }
    Ok(Equivalence::no())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, I};

    #[test]
    fn pauli_basis_and_constants() {
        let b = build_su_basis(2).unwrap();
        let s = pauli();
        for k in 0..3 {
            assert_eq!(b.element(k), &s[k]);
        }
        assert!((b.metric() - DMatrix::<f64>::identity(3, 3)).abs().max() < 1e-15);
        assert!((b.structure_constant(2, 0, 1) - c(0.0, 2.0)).norm() < 1e-15);
        assert!((b.sqrt_abs_det_g() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gell_mann_ordering_for_n3() {
        let b = build_su_basis(3).unwrap();
        assert_eq!(b.dim(), 8);
        // λ_2 has -i in position (0, 1); λ_8 = diag(1, 1, -2)/√3.
        assert_eq!(b.element(1)[(0, 1)], -I);
        assert!((b.element(7)[(2, 2)].re + 2.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(b.closure_residual() < 1e-12);
    }

    #[test]
    fn basis_rejects_small_n() {
        assert!(matches!(build_su_basis(1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn spin_one_closes() {
        let b = Arc::new(build_su_basis(2).unwrap());
        let rep = sl2_irrep(&b, 2).unwrap();
        assert_eq!(rep.r(), 3);
        assert!(rep.closure_residual() < 1e-12);
        let half = sl2_irrep(&b, 1).unwrap();
        for k in 0..3 {
            assert!(linalg::max_abs(&(&half.matrices()[k] - b.element(k))) < 1e-15);
        }
    }

    #[test]
    fn commutant_examples() {
        assert_eq!(commutant(2, &[]).unwrap().len(), 4);
        assert_eq!(commutant(2, &pauli()).unwrap().len(), 1);
        assert_eq!(commutant(2, &[pauli()[2].clone()]).unwrap().len(), 2);
    }

    #[test]
    fn spin_half_is_not_two_trivials() {
        let b = Arc::new(build_su_basis(2).unwrap());
        let half = sl2_irrep(&b, 1).unwrap();
        let zero = sl2_irrep(&b, 0).unwrap();
        let triv = direct_sum(&[zero.clone(), zero]).unwrap();
        assert!(!reps_equivalent(&half, &triv).unwrap().equivalent);
    }
}
