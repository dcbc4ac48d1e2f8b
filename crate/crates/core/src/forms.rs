//! The graded differential algebra `Ω_Der(M_n) ≅ M_n ⊗ Λ sl_n*`.
//!
//! A [`MatrixForm`] of degree `p` stores one matrix per strictly increasing
//! index tuple `k_1 < … < k_p`; the coefficient on the tuple is the value of
//! the form on `(∂_{k_1}, …, ∂_{k_p})`. The basis derivations are
//! `∂_k = ad_{E_k}`, so `[∂_k, ∂_l] = C^m_{kl} ∂_m` and the dual 1-forms
//! satisfy `θ^l(∂_k) = δ^l_k`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{self};
use crate::error::{Error, Result};
use crate::exterior::{self, Mask};
use crate::lie::LieBasis;
use crate::linalg::{self, commutator, CMat, ZERO};

/// A homogeneous form with matrix coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixForm {
    dim: usize,
    degree: usize,
    rows: usize,
    cols: usize,
    terms: BTreeMap<Mask, CMat>,
}

impl MatrixForm {
    /// The zero form of the given degree over `dim` generators.
    pub fn zero(dim: usize, degree: usize, rows: usize, cols: usize) -> Self {
        assert!(dim <= exterior::MAX_GENERATORS, "too many generators");
        MatrixForm { dim, degree, rows, cols, terms: BTreeMap::new() }
    }

    /// A degree-0 form.
    pub fn scalar(dim: usize, a: CMat) -> Self {
        let mut f = MatrixForm::zero(dim, 0, a.nrows(), a.ncols());
        f.terms.insert(0, a);
        f
    }

    /// `a θ^{k_1} … θ^{k_p}` for arbitrary (not necessarily sorted) indices.
    pub fn monomial(dim: usize, indices: &[usize], a: CMat) -> Self {
        let mut f = MatrixForm::zero(dim, indices.len(), a.nrows(), a.ncols());
        f.add_term(indices, a);
        f
    }

    /// Adds `a θ^{k_1} … θ^{k_p}`, reordering the indices with sign.
    pub fn add_term(&mut self, indices: &[usize], a: CMat) {
        assert_eq!(indices.len(), self.degree, "term degree mismatch");
        assert!(indices.iter().all(|&k| k < self.dim), "index out of range");
        let mask = exterior::from_indices(indices);
        if exterior::degree(mask) != indices.len() {
            return;
        }
        let sign = exterior::permutation_sign(indices);
        self.accumulate(mask, &a, Complex64::new(sign, 0.0));
    }

    fn accumulate(&mut self, mask: Mask, a: &CMat, factor: Complex64) {
        match self.terms.get_mut(&mask) {
            Some(m) => *m += a * factor,
            None => {
                self.terms.insert(mask, a * factor);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Shape of the coefficient matrices.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Stored terms, keyed by index bitmask.
    pub fn terms(&self) -> impl Iterator<Item = (Mask, &CMat)> {
        self.terms.iter().map(|(m, a)| (*m, a))
    }

    /// Coefficient on an arbitrary index tuple, using antisymmetry.
    pub fn coefficient(&self, indices: &[usize]) -> CMat {
        let mask = exterior::from_indices(indices);
        if indices.len() != self.degree || exterior::degree(mask) != indices.len() {
            return CMat::zeros(self.rows, self.cols);
        }
        match self.terms.get(&mask) {
            Some(a) => a * Complex64::new(exterior::permutation_sign(indices), 0.0),
            None => CMat::zeros(self.rows, self.cols),
        }
    }

    /// Coefficient of a degree-0 form.
    pub fn as_matrix(&self) -> CMat {
        self.coefficient(&[])
    }

    fn check_compatible(&self, other: &MatrixForm) {
        assert_eq!(self.dim, other.dim, "forms over different bases");
        assert_eq!(self.degree, other.degree, "forms of different degrees");
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "coefficient shape mismatch");
    }

    pub fn add(&self, other: &MatrixForm) -> MatrixForm {
        self.check_compatible(other);
        let mut out = self.clone();
        for (m, a) in &other.terms {
            out.accumulate(*m, a, linalg::ONE);
        }
        out
    }

    pub fn sub(&self, other: &MatrixForm) -> MatrixForm {
        self.add(&other.scale(-linalg::ONE))
    }

    pub fn scale(&self, z: Complex64) -> MatrixForm {
        let mut out = self.clone();
        for a in out.terms.values_mut() {
            *a *= z;
        }
        out
    }

    /// `u ω` with `u` acting on coefficients from the left.
    pub fn left_mul(&self, u: &CMat) -> MatrixForm {
        self.map_coefficients(u.nrows(), self.cols, |a| u * a)
    }

    /// `ω u` with `u` acting on coefficients from the right.
    pub fn right_mul(&self, u: &CMat) -> MatrixForm {
        self.map_coefficients(self.rows, u.ncols(), |a| a * u)
    }

    pub fn map_coefficients(&self, rows: usize, cols: usize, f: impl Fn(&CMat) -> CMat) -> MatrixForm {
        let mut out = MatrixForm::zero(self.dim, self.degree, rows, cols);
        for (m, a) in &self.terms {
            out.terms.insert(*m, f(a));
        }
        out
    }

    /// Largest entry modulus over all coefficients.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// Frobenius norm over all stored coefficients.
    pub fn norm(&self) -> f64 {
        self.terms.values().map(|a| linalg::norm(a).powi(2)).sum::<f64>().sqrt()
    }

    /// Product in the graded algebra. Degrees beyond the number of generators
    /// give the zero form.
    pub fn wedge(&self, other: &MatrixForm) -> MatrixForm {
        assert_eq!(self.dim, other.dim, "forms over different bases");
        assert_eq!(self.cols, other.rows, "coefficient shapes do not compose");
        let mut out = MatrixForm::zero(self.dim, self.degree + other.degree, self.rows, other.cols);
        if out.degree > self.dim {
            return out;
        }
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                if let Some(s) = exterior::merge_sign(*ma, *mb) {
                    out.accumulate(ma | mb, &(a * b), Complex64::new(s, 0.0));
                }
            }
        }
        out
    }

    /// Graded commutator `ω η − (−1)^{|ω||η|} η ω`.
    pub fn graded_commutator(&self, other: &MatrixForm) -> MatrixForm {
        let ab = self.wedge(other);
        let ba = other.wedge(self);
        if (self.degree * other.degree) % 2 == 0 {
            ab.sub(&ba)
        } else {
            ab.add(&ba)
        }
    }

    /// Value on derivations given by their coordinate vectors:
    /// `Σ_I a_I det[x_i^{k_j}]`.
    pub fn evaluate(&self, args: &[Vec<Complex64>]) -> CMat {
        assert_eq!(args.len(), self.degree, "wrong number of arguments");
        let mut out = CMat::zeros(self.rows, self.cols);
        for (m, a) in &self.terms {
            let idx = exterior::indices(*m);
            let p = idx.len();
            let minor = CMat::from_fn(p, p, |i, j| args[i][idx[j]]);
            let det = if p == 0 { linalg::ONE } else { minor.determinant() };
            if det != ZERO {
                out += a * det;
            }
        }
        out
    }

    /// Drops coefficients whose entries are all below `tol`.
    pub fn pruned(&self, tol: f64) -> MatrixForm {
        let mut out = self.clone();
        out.terms.retain(|_, a| linalg::max_abs(a) > tol);
        out
    }

    /// A random form with every coefficient drawn from a complex Gaussian.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize, degree: usize, n: usize) -> MatrixForm {
        let mut out = MatrixForm::zero(dim, degree, n, n);
        for m in exterior::masks_of_degree(dim, degree) {
            out.terms.insert(m, linalg::random_complex(rng, n, n));
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    indices: Vec<usize>,
    #[serde(with = "encoding::cmat")]
    matrix: CMat,
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    dim: usize,
    degree: usize,
    rows: usize,
    cols: usize,
    terms: Vec<TermJson>,
}

impl Serialize for MatrixForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormJson {
            dim: self.dim,
            degree: self.degree,
            rows: self.rows,
            cols: self.cols,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| TermJson { indices: exterior::indices(*m), matrix: a.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let json = FormJson::deserialize(d)?;
        if json.dim > exterior::MAX_GENERATORS || json.degree > json.dim {
            return Err(D::Error::custom("form degree or dimension out of range"));
        }
        let mut f = MatrixForm::zero(json.dim, json.degree, json.rows, json.cols);
        for t in json.terms {
            if t.indices.len() != json.degree || t.indices.iter().any(|&k| k >= json.dim) {
                return Err(D::Error::custom("term indices do not match the form"));
            }
            if t.matrix.shape() != (json.rows, json.cols) {
                return Err(D::Error::custom("term matrix has the wrong shape"));
            }
            f.add_term(&t.indices, t.matrix);
        }
        Ok(f)
    }
}

/// An inner derivation `ad_γ` of `M_n`, with `γ` traceless.
#[derive(Debug, Clone)]
pub struct InnerDerivation {
    gamma: CMat,
    coords: Vec<Complex64>,
}

impl InnerDerivation {
    /// `ad_γ`; the trace part of `γ` is dropped since it acts trivially.
    pub fn new(basis: &LieBasis, gamma: &CMat) -> Self {
        let gamma = linalg::traceless_part(gamma);
        let coords = basis.coordinates(&gamma);
        InnerDerivation { gamma, coords }
    }

    /// `Σ x^k ∂_k`.
    pub fn from_coordinates(basis: &LieBasis, coords: Vec<Complex64>) -> Self {
        InnerDerivation { gamma: basis.combine(&coords), coords }
    }

    /// The basis derivation `∂_k = ad_{E_k}`.
    pub fn basis_element(basis: &LieBasis, k: usize) -> Self {
        let mut coords = vec![ZERO; basis.dim()];
        coords[k] = linalg::ONE;
        InnerDerivation::from_coordinates(basis, coords)
    }

    pub fn gamma(&self) -> &CMat {
        &self.gamma
    }

    pub fn coordinates(&self) -> &[Complex64] {
        &self.coords
    }

    /// `ad_γ(a) = [γ, a]`.
    pub fn apply(&self, a: &CMat) -> CMat {
        commutator(&self.gamma, a)
    }

    /// `[ad_γ, ad_η] = ad_{[γ, η]}`.
    pub fn bracket(&self, basis: &LieBasis, other: &InnerDerivation) -> InnerDerivation {
        InnerDerivation::new(basis, &commutator(&self.gamma, &other.gamma))
    }

    /// A real derivation (`γ` antihermitean) is one preserving the involution.
    pub fn is_real(&self, tol: f64) -> bool {
        linalg::max_abs(&(&self.gamma + self.gamma.adjoint())) <= tol
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, basis: &LieBasis) -> Self {
        let coords = (0..basis.dim())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        InnerDerivation::from_coordinates(basis, coords)
    }
}

fn check_algebra_form(basis: &LieBasis, w: &MatrixForm) -> Result<()> {
    if w.dim != basis.dim() || w.rows != basis.n() || w.cols != basis.n() {
        return Err(Error::invalid("form does not live in the matrix algebra of this basis"));
    }
    Ok(())
}

/// The differential `d′`, from `d′a = Σ_l [E_l, a] θ^l` in degree 0 and
/// `d′θ^k = −Σ_{l<m} C^k_{lm} θ^l θ^m`, extended as a graded derivation.
pub fn differential(basis: &LieBasis, w: &MatrixForm) -> Result<MatrixForm> {
    check_algebra_form(basis, w)?;
    let dim = basis.dim();
    let mut out = MatrixForm::zero(dim, w.degree + 1, w.rows, w.cols);
    if w.degree >= dim {
        return Ok(out);
    }
    for (mask, a) in &w.terms {
        for l in 0..dim {
            if mask & (1 << l) != 0 {
                continue;
            }
            let s = exterior::position_sign(l, *mask);
            out.accumulate(mask | (1 << l), &commutator(basis.element(l), a), Complex64::new(s, 0.0));
        }
        for k in exterior::indices(*mask) {
            let rest = mask & !(1u64 << k);
            let s_k = exterior::position_sign(k, *mask);
            for l in 0..dim {
                for m in l + 1..dim {
                    let cst = basis.structure_constant(k, l, m);
                    if cst == ZERO {
                        continue;
                    }
                    let lm = (1u64 << l) | (1u64 << m);
                    if let Some(s) = exterior::merge_sign(lm, rest) {
                        out.accumulate(lm | rest, a, -cst * (s * s_k));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `(d′ω)(X_0, …, X_p)` by the Koszul formula, independently of
/// [`differential`].
pub fn koszul_evaluate(basis: &LieBasis, w: &MatrixForm, args: &[InnerDerivation]) -> CMat {
    let p = w.degree;
    assert_eq!(args.len(), p + 1, "Koszul evaluation needs degree + 1 arguments");
    let coords = |xs: &[&InnerDerivation]| -> Vec<Vec<Complex64>> {
        xs.iter().map(|x| x.coords.clone()).collect()
    };
    let mut out = CMat::zeros(w.rows, w.cols);
    for i in 0..=p {
        let rest: Vec<&InnerDerivation> =
            args.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x).collect();
        let val = args[i].apply(&w.evaluate(&coords(&rest)));
        if i % 2 == 0 {
            out += val;
        } else {
            out -= val;
        }
    }
    for i in 0..=p {
        for j in i + 1..=p {
            let br = args[i].bracket(basis, &args[j]);
            let mut list = vec![&br];
            list.extend(args.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, x)| x));
            let val = w.evaluate(&coords(&list));
            if (i + j) % 2 == 0 {
                out += val;
            } else {
                out -= val;
            }
        }
    }
    out
}

/// The canonical 1-form `iθ = Σ_k E_k θ^k`, with `iθ(ad_γ) = γ − (1/n) Tr(γ) 1`.
pub fn canonical_theta(basis: &LieBasis) -> MatrixForm {
    let mut f = MatrixForm::zero(basis.dim(), 1, basis.n(), basis.n());
    for k in 0..basis.dim() {
        f.add_term(&[k], basis.element(k).clone());
    }
    f
}

/// Interior product `i_X ω`; zero on degree 0.
pub fn interior(x: &InnerDerivation, w: &MatrixForm) -> MatrixForm {
    if w.degree == 0 {
        return MatrixForm::zero(w.dim, 0, w.rows, w.cols);
    }
    let mut out = MatrixForm::zero(w.dim, w.degree - 1, w.rows, w.cols);
    for (mask, a) in &w.terms {
        for k in exterior::indices(*mask) {
            let xk = x.coords[k];
            if xk == ZERO {
                continue;
            }
            let s = exterior::position_sign(k, *mask);
            out.accumulate(mask & !(1u64 << k), a, xk * s);
        }
    }
    out
}

/// Lie derivative `L_X = i_X d′ + d′ i_X`.
pub fn lie_derivative(basis: &LieBasis, x: &InnerDerivation, w: &MatrixForm) -> Result<MatrixForm> {
    let a = interior(x, &differential(basis, w)?);
    if w.degree == 0 {
        return Ok(a);
    }
    Ok(a.add(&differential(basis, &interior(x, w))?))
}

/// Noncommutative integral: for `ω = a √|g| θ^1 … θ^N` returns `(1/n) Tr(a)`,
/// and zero below top degree.
pub fn nc_integrate(basis: &LieBasis, w: &MatrixForm) -> Result<Complex64> {
    check_algebra_form(basis, w)?;
    if w.degree != basis.dim() {
        return Ok(ZERO);
    }
    let full: Vec<usize> = (0..basis.dim()).collect();
    let a = w.coefficient(&full) / Complex64::new(basis.sqrt_abs_det_g(), 0.0);
    Ok(a.trace() / basis.n() as f64)
}
