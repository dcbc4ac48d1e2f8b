//! Characteristic classes of a short exact sequence of real Lie algebras
//! `0 → i → g → h → 0` built from a vector-space splitting `φ : h → g`.
//!
//! Forms on `h` are stored by increasing index tuples; the coefficient on
//! `(x_1 < … < x_p)` is the value of the form on `(e_{x_1}, …, e_{x_p})`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{self, Mask};
use crate::linalg;

/// Tolerance for validating the bracket data of a sequence.
pub const SES_TOL: f64 = 1e-10;
/// Threshold below which a least-squares residual counts as solvable.
pub const EXACTNESS_TOL: f64 = 1e-9;
/// Largest form degree `2q` for which characteristic forms are evaluated.
pub const MAX_FORM_DEGREE: usize = 8;

/// JSON description of a sequence: the structure tensor
/// `structure_constants[k][i][j]` with `[e_i, e_j] = Σ_k c^k_{ij} e_k`, and the
/// number of leading basis vectors spanning the ideal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SesDescriptor {
    pub i_dim: usize,
    pub structure_constants: Vec<Vec<Vec<f64>>>,
}

/// A Lie algebra `g` with an ideal `i` spanned by its first `i_dim` basis
/// vectors; `h = g/i` has the images of the remaining vectors as basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LieSES {
    g_dim: usize,
    i_dim: usize,
    c: Vec<f64>,
}

impl LieSES {
    /// Validates antisymmetry, the Jacobi identity and the ideal property.
    pub fn new(g_dim: usize, i_dim: usize, c: Vec<f64>) -> Result<Self> {
        if i_dim > g_dim {
            return Err(Error::invalid("ideal dimension exceeds the algebra dimension"));
        }
        if g_dim > exterior::MAX_GENERATORS {
            return Err(Error::Capacity(format!("algebra dimension {g_dim} exceeds {}", exterior::MAX_GENERATORS)));
        }
        if c.len() != g_dim * g_dim * g_dim {
            return Err(Error::invalid("structure tensor has the wrong size"));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("structure tensor has non-finite entries"));
        }
        let s = LieSES { g_dim, i_dim, c };
        let scale = s.c.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut anti = 0.0f64;
        let mut ideal = 0.0f64;
        for k in 0..g_dim {
            for a in 0..g_dim {
                for b in 0..g_dim {
                    anti = anti.max((s.sc(k, a, b) + s.sc(k, b, a)).abs());
                    if b < i_dim && k >= i_dim {
                        ideal = ideal.max(s.sc(k, a, b).abs());
                    }
                }
            }
        }
        if anti > SES_TOL * scale {
            return Err(Error::invalid(format!("bracket is not antisymmetric (defect {anti:.3e})")));
        }
        if ideal > SES_TOL * scale {
            return Err(Error::invalid(format!("leading {i_dim} vectors do not span an ideal (defect {ideal:.3e})")));
        }
        let jac = s.jacobi_residual();
        if jac > SES_TOL * scale * scale {
            return Err(Error::invalid(format!("Jacobi identity fails (defect {jac:.3e})")));
        }
        Ok(s)
    }

    pub fn from_descriptor(d: &SesDescriptor) -> Result<Self> {
        let g = d.structure_constants.len();
        let mut c = Vec::with_capacity(g * g * g);
        for slab in &d.structure_constants {
            if slab.len() != g || slab.iter().any(|row| row.len() != g) {
                return Err(Error::invalid("structure tensor must be g_dim x g_dim x g_dim"));
            }
            for row in slab {
                c.extend_from_slice(row);
            }
        }
        Self::new(g, d.i_dim, c)
    }

    pub fn descriptor(&self) -> SesDescriptor {
        let g = self.g_dim;
        let structure_constants =
            (0..g).map(|k| (0..g).map(|a| (0..g).map(|b| self.sc(k, a, b)).collect()).collect()).collect();
        SesDescriptor { i_dim: self.i_dim, structure_constants }
    }

    /// `g = i ⊕ h` with `[i, h] = 0`, from the structure tensors of the summands.
    pub fn direct_sum(i_dim: usize, ci: &[f64], h_dim: usize, ch: &[f64]) -> Result<Self> {
        if ci.len() != i_dim.pow(3) || ch.len() != h_dim.pow(3) {
            return Err(Error::invalid("summand structure tensor has the wrong size"));
        }
        let g = i_dim + h_dim;
        let mut c = vec![0.0; g * g * g];
        for k in 0..i_dim {
            for a in 0..i_dim {
                for b in 0..i_dim {
                    c[(k * g + a) * g + b] = ci[(k * i_dim + a) * i_dim + b];
                }
            }
        }
        for k in 0..h_dim {
            for a in 0..h_dim {
                for b in 0..h_dim {
                    c[((k + i_dim) * g + a + i_dim) * g + b + i_dim] = ch[(k * h_dim + a) * h_dim + b];
                }
            }
        }
        Self::new(g, i_dim, c)
    }

    /// The Heisenberg algebra of dimension `2m + 1` with basis
    /// `Z, X_1, Y_1, …, X_m, Y_m`, `[X_j, Y_j] = Z`, and ideal `span{Z}`.
    pub fn heisenberg(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("Heisenberg algebra needs m >= 1"));
        }
        let g = 2 * m + 1;
        let mut c = vec![0.0; g * g * g];
        for j in 0..m {
            let (x, y) = (1 + 2 * j, 2 + 2 * j);
            c[x * g + y] = 1.0;
            c[y * g + x] = -1.0;
        }
        Self::new(g, 1, c)
    }

    /// The real Lie algebra generated by the given square matrices, with the
    /// derived algebra `[g, g]` as ideal. The basis is orthonormal for the
    /// Frobenius inner product, ideal vectors first.
    pub fn from_generators(gens: &[DMatrix<f64>]) -> Result<Self> {
        let n = gens.first().map(|m| m.nrows()).ok_or_else(|| Error::invalid("no generators"))?;
        if gens.iter().any(|m| m.shape() != (n, n)) {
            return Err(Error::invalid("generators must be square and of equal size"));
        }
        let bracket = |a: &DMatrix<f64>, b: &DMatrix<f64>| a * b - b * a;
        let mut g_basis: Vec<DMatrix<f64>> = Vec::new();
        for m in gens {
            orthonormal_push(&mut g_basis, m.clone());
        }
        let mut frontier = 0;
        while frontier < g_basis.len() {
            let end = g_basis.len();
            for a in 0..end {
                for b in frontier.max(a + 1)..end {
                    let br = bracket(&g_basis[a], &g_basis[b]);
                    orthonormal_push(&mut g_basis, br);
                }
            }
            if g_basis.len() > exterior::MAX_GENERATORS {
                return Err(Error::Capacity("generated algebra is too large".into()));
            }
            frontier = end;
        }
        let mut basis: Vec<DMatrix<f64>> = Vec::new();
        for a in 0..g_basis.len() {
            for b in a + 1..g_basis.len() {
                orthonormal_push(&mut basis, bracket(&g_basis[a], &g_basis[b]));
            }
        }
        let i_dim = basis.len();
        for m in &g_basis {
            orthonormal_push(&mut basis, m.clone());
        }
        let gd = basis.len();
        let cols = DMatrix::from_columns(&basis.iter().map(|m| DVector::from_column_slice(m.as_slice())).collect::<Vec<_>>());
        let mut c = vec![0.0; gd * gd * gd];
        for a in 0..gd {
            for b in 0..gd {
                let br = bracket(&basis[a], &basis[b]);
                let coords = cols.transpose() * DVector::from_column_slice(br.as_slice());
                for k in 0..gd {
                    c[(k * gd + a) * gd + b] = coords[k];
                }
            }
        }
        Self::new(gd, i_dim, c)
    }

    pub fn g_dim(&self) -> usize {
        self.g_dim
    }

    pub fn i_dim(&self) -> usize {
        self.i_dim
    }

    pub fn h_dim(&self) -> usize {
        self.g_dim - self.i_dim
    }

    fn sc(&self, k: usize, a: usize, b: usize) -> f64 {
        self.c[(k * self.g_dim + a) * self.g_dim + b]
    }

    /// `c^k_{ab}` in the basis of `g`.
    pub fn structure_constant(&self, k: usize, a: usize, b: usize) -> f64 {
        self.sc(k, a, b)
    }

    /// Induced structure constants of `h`.
    pub fn h_structure_constant(&self, k: usize, a: usize, b: usize) -> f64 {
        let i = self.i_dim;
        self.sc(k + i, a + i, b + i)
    }

    pub fn bracket_g(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let g = self.g_dim;
        let mut out = vec![0.0; g];
        for (a, &xa) in x.iter().enumerate() {
            if xa == 0.0 {
                continue;
            }
            for (b, &yb) in y.iter().enumerate() {
                if yb == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += self.sc(k, a, b) * xa * yb;
                }
            }
        }
        out
    }

    /// `max |Σ_cyc [[e_a, e_b], e_c]|`.
    pub fn jacobi_residual(&self) -> f64 {
        let g = self.g_dim;
        let mut worst = 0.0f64;
        for a in 0..g {
            for b in a + 1..g {
                for cc in b + 1..g {
                    for m in 0..g {
                        let mut s = 0.0;
                        for (x, y, z) in [(a, b, cc), (b, cc, a), (cc, a, b)] {
                            for k in 0..g {
                                s += self.sc(k, x, y) * self.sc(m, k, z);
                            }
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }
}

fn orthonormal_push(basis: &mut Vec<DMatrix<f64>>, mut m: DMatrix<f64>) {
    let scale = m.norm();
    for _ in 0..2 {
        for b in basis.iter() {
            let p = b.dot(&m);
            m -= b * p;
        }
    }
    let r = m.norm();
    if r > 1e-9 * scale.max(1.0) {
        basis.push(m / r);
    }
}

/// A linear map `φ : h → g` with `π ∘ φ = id`, stored as a `g_dim × h_dim`
/// matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Splitting {
    phi: DMatrix<f64>,
}

impl Splitting {
    pub fn new(ses: &LieSES, phi: DMatrix<f64>) -> Result<Self> {
        if phi.shape() != (ses.g_dim, ses.h_dim()) {
            return Err(Error::invalid("splitting has the wrong shape"));
        }
        let h = ses.h_dim();
        let lower = phi.view((ses.i_dim, 0), (h, h));
        let defect = (lower - DMatrix::<f64>::identity(h, h)).amax();
        if defect > 1e-12 || phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("map is not a section of the projection (defect {defect:.3e})")));
        }
        Ok(Splitting { phi })
    }

    /// `φ(e_x) = e_{i_dim + x}`.
    pub fn canonical(ses: &LieSES) -> Self {
        let mut phi = DMatrix::zeros(ses.g_dim, ses.h_dim());
        for x in 0..ses.h_dim() {
            phi[(ses.i_dim + x, x)] = 1.0;
        }
        Splitting { phi }
    }

    /// `φ_0 + λ` for an `i`-valued map `λ` given as an `i_dim × h_dim` matrix.
    pub fn perturbed(ses: &LieSES, lambda: &DMatrix<f64>) -> Result<Self> {
        if lambda.shape() != (ses.i_dim, ses.h_dim()) {
            return Err(Error::invalid("perturbation must be i_dim x h_dim"));
        }
        let mut phi = Self::canonical(ses).phi;
        phi.view_mut((0, 0), (ses.i_dim, ses.h_dim())).copy_from(lambda);
        Self::new(ses, phi)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, ses: &LieSES, scale: f64) -> Self {
        let lambda = DMatrix::from_fn(ses.i_dim, ses.h_dim(), |_, _| scale * rng.sample::<f64, _>(StandardNormal));
        Self::perturbed(ses, &lambda).expect("perturbation has the right shape")
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.phi
    }

    fn image(&self, x: usize) -> Vec<f64> {
        self.phi.column(x).iter().copied().collect()
    }
}

/// A `p`-form on `h` with values in `ℝ^values`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HForm {
    pub dim: usize,
    pub degree: usize,
    pub values: usize,
    coeffs: BTreeMap<Mask, Vec<f64>>,
}

impl HForm {
    pub fn zero(dim: usize, degree: usize, values: usize) -> Self {
        let coeffs = exterior::masks_of_degree(dim, degree).into_iter().map(|m| (m, vec![0.0; values])).collect();
        HForm { dim, degree, values, coeffs }
    }

    /// Coefficient on an increasing tuple.
    pub fn coefficient(&self, indices: &[usize]) -> &[f64] {
        &self.coeffs[&exterior::from_indices(indices)]
    }

    pub fn set(&mut self, indices: &[usize], v: Vec<f64>) {
        assert_eq!(v.len(), self.values);
        self.coeffs.insert(exterior::from_indices(indices), v);
    }

    /// Value on an arbitrary tuple of basis indices.
    pub fn value(&self, args: &[usize]) -> Vec<f64> {
        let mut sorted = args.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return vec![0.0; self.values];
        }
        let sign = exterior::permutation_sign(args);
        self.coeffs[&exterior::from_indices(&sorted)].iter().map(|v| sign * v).collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &Vec<f64>)> {
        self.coeffs.iter().map(|(&m, v)| (exterior::indices(m), v))
    }

    pub fn sub(&self, other: &HForm) -> HForm {
        let mut out = self.clone();
        for (m, v) in out.coeffs.iter_mut() {
            for (a, b) in v.iter_mut().zip(&other.coeffs[m]) {
                *a -= b;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// The leading `k` value components.
    pub fn truncate_values(&self, k: usize) -> HForm {
        let coeffs = self.coeffs.iter().map(|(&m, v)| (m, v[..k].to_vec())).collect();
        HForm { dim: self.dim, degree: self.degree, values: k, coeffs }
    }

    fn as_vector(&self) -> DVector<f64> {
        DVector::from_iterator(self.coeffs.len() * self.values, self.coeffs.values().flatten().copied())
    }
}

/// Chevalley differential of `h` with the trivial action on values:
/// `dω(x_0, …, x_p) = Σ_{i<j} (−1)^{i+j} ω([x_i, x_j], x_0, …, x̂_i, …, x̂_j, …)`.
pub fn chevalley_differential(ses: &LieSES, w: &HForm) -> HForm {
    let hd = ses.h_dim();
    let p = w.degree;
    let mut out = HForm::zero(hd, p + 1, w.values);
    for m in exterior::masks_of_degree(hd, p + 1) {
        let xs = exterior::indices(m);
        let mut acc = vec![0.0; w.values];
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let rest: Vec<usize> = xs.iter().enumerate().filter(|&(t, _)| t != i && t != j).map(|(_, &x)| x).collect();
                for k in 0..hd {
                    let ck = ses.h_structure_constant(k, xs[i], xs[j]);
                    if ck == 0.0 {
                        continue;
                    }
                    let mut args = vec![k];
                    args.extend_from_slice(&rest);
                    for (a, v) in acc.iter_mut().zip(w.value(&args)) {
                        *a += sign * ck * v;
                    }
                }
            }
        }
        out.coeffs.insert(m, acc);
    }
    out
}

/// `R_φ` together with its two checks.
#[derive(Debug, Clone, Serialize)]
pub struct Obstruction {
    /// `R_φ` as a `g`-valued 2-form on `h`.
    pub r: HForm,
    /// Largest component of `R_φ` outside `i`.
    pub outside_ideal: f64,
    /// `max |Σ_cyc ([φx, R(y, z)] − R([x, y], z))|`.
    pub bianchi_residual: f64,
}

impl Obstruction {
    /// `R_φ` as an element of `Λ²h* ⊗ i`.
    pub fn ideal_part(&self, ses: &LieSES) -> HForm {
        self.r.truncate_values(ses.i_dim)
    }
}

/// `R_φ(x, y) = −φ([x, y]) + [φ(x), φ(y)]`.
pub fn lecomte_obstruction(ses: &LieSES, phi: &Splitting) -> Result<Obstruction> {
    let phi = Splitting::new(ses, phi.phi.clone())?;
    let hd = ses.h_dim();
    let g = ses.g_dim;
    let images: Vec<Vec<f64>> = (0..hd).map(|x| phi.image(x)).collect();
    let mut r = HForm::zero(hd, 2, g);
    for x in 0..hd {
        for y in x + 1..hd {
            let mut v = ses.bracket_g(&images[x], &images[y]);
            for k in 0..hd {
                let ck = ses.h_structure_constant(k, x, y);
                if ck != 0.0 {
                    for (o, p) in v.iter_mut().zip(&images[k]) {
                        *o -= ck * p;
                    }
                }
            }
            r.set(&[x, y], v);
        }
    }
    let outside_ideal = r.coeffs.values().flat_map(|v| v[ses.i_dim..].iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    let mut bianchi_residual = 0.0f64;
    for m in exterior::masks_of_degree(hd, 3) {
        let t = exterior::indices(m);
        let mut acc = vec![0.0; g];
        for (x, y, z) in [(t[0], t[1], t[2]), (t[1], t[2], t[0]), (t[2], t[0], t[1])] {
            let br = ses.bracket_g(&images[x], &r.value(&[y, z]));
            for (a, b) in acc.iter_mut().zip(br) {
                *a += b;
            }
            for k in 0..hd {
                let ck = ses.h_structure_constant(k, x, y);
                if ck != 0.0 {
                    for (a, b) in acc.iter_mut().zip(r.value(&[k, z])) {
                        *a -= ck * b;
                    }
                }
            }
        }
        bianchi_residual = bianchi_residual.max(acc.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    Ok(Obstruction { r, outside_ideal, bianchi_residual })
}

/// A symmetric `q`-linear form on `i`, stored as a full symmetric tensor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdealPolynomial {
    pub q: usize,
    pub i_dim: usize,
    tensor: Vec<f64>,
}

fn multi_index(mut flat: usize, dim: usize, q: usize) -> Vec<usize> {
    let mut out = vec![0; q];
    for slot in out.iter_mut().rev() {
        *slot = flat % dim;
        flat /= dim;
    }
    out
}

fn flat_index(idx: &[usize], dim: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

impl IdealPolynomial {
    /// Symmetrizes the given tensor of length `i_dim^q`.
    pub fn new(q: usize, i_dim: usize, tensor: Vec<f64>) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("polynomial degree must be at least 1"));
        }
        if tensor.len() != i_dim.pow(q as u32) {
            return Err(Error::invalid("tensor length must be i_dim^q"));
        }
        let mut sym = vec![0.0; tensor.len()];
        for (flat, s) in sym.iter_mut().enumerate() {
            let idx = multi_index(flat, i_dim, q);
            let perms = permutations(q);
            let total: f64 = perms.iter().map(|(p, _)| tensor[flat_index(&p.iter().map(|&j| idx[j]).collect::<Vec<_>>(), i_dim)]).sum();
            *s = total / perms.len() as f64;
        }
        Ok(IdealPolynomial { q, i_dim, tensor: sym })
    }

    /// `P(e_0, …, e_0) = 1` on a one-dimensional ideal.
    pub fn identity_on_line() -> Self {
        IdealPolynomial { q: 1, i_dim: 1, tensor: vec![1.0] }
    }

    pub fn evaluate(&self, args: &[&[f64]]) -> f64 {
        assert_eq!(args.len(), self.q);
        let mut total = 0.0;
        for (flat, &t) in self.tensor.iter().enumerate() {
            if t == 0.0 {
                continue;
            }
            let idx = multi_index(flat, self.i_dim, self.q);
            total += t * idx.iter().zip(args).map(|(&j, a)| a[j]).product::<f64>();
        }
        total
    }

    /// `max |Σ_j P(a_1, …, [e_b, a_j], …, a_q)|` over basis arguments and all
    /// `b` in `g`.
    pub fn invariance_residual(&self, ses: &LieSES) -> f64 {
        let id = self.i_dim;
        let mut worst = 0.0f64;
        for b in 0..ses.g_dim {
            for flat in 0..id.pow(self.q as u32) {
                let idx = multi_index(flat, id, self.q);
                let mut s = 0.0;
                for j in 0..self.q {
                    for k in 0..id {
                        let ck = ses.sc(k, b, idx[j]);
                        if ck != 0.0 {
                            let mut moved = idx.clone();
                            moved[j] = k;
                            s += ck * self.tensor[flat_index(&moved, id)];
                        }
                    }
                }
                worst = worst.max(s.abs());
            }
        }
        worst
    }
}

/// All permutations of `0..q` with their signs.
fn permutations(q: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, f64)>) {
        if left.is_empty() {
            out.push((prefix.clone(), exterior::permutation_sign(prefix)));
            return;
        }
        for i in 0..left.len() {
            let v = left.remove(i);
            prefix.push(v);
            rec(prefix, left, out);
            prefix.pop();
            left.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..q).collect(), &mut out);
    out
}

/// Basis of the symmetric `q`-linear forms on `i` invariant under the
/// adjoint action of `g`.
pub fn invariant_polynomials(ses: &LieSES, q: usize) -> Result<Vec<IdealPolynomial>> {
    if q == 0 {
        return Err(Error::invalid("polynomial degree must be at least 1"));
    }
    let id = ses.i_dim;
    if id == 0 {
        return Ok(Vec::new());
    }
    let size = id.checked_pow(q as u32).filter(|&s| s <= 4096).ok_or_else(|| Error::Capacity("too many tensor coefficients".into()))?;
    // Unknowns: one per multiset, i.e. per nondecreasing index tuple.
    let reps: Vec<usize> = (0..size).filter(|&f| multi_index(f, id, q).windows(2).all(|w| w[0] <= w[1])).collect();
    let unknown_of = |idx: &[usize]| {
        let mut s = idx.to_vec();
        s.sort_unstable();
        reps.binary_search(&flat_index(&s, id)).expect("sorted tuples are representatives")
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for b in 0..ses.g_dim {
        for &flat in &reps {
            let idx = multi_index(flat, id, q);
            let mut row = vec![0.0; reps.len()];
            for j in 0..q {
                for k in 0..id {
                    let ck = ses.sc(k, b, idx[j]);
                    if ck != 0.0 {
                        let mut moved = idx.clone();
                        moved[j] = k;
                        row[unknown_of(&moved)] += ck;
                    }
                }
            }
            if row.iter().any(|&v| v != 0.0) {
                rows.push(row);
            }
        }
    }
    let kernel = if rows.is_empty() {
        DMatrix::identity(reps.len(), reps.len())
    } else {
        let a = DMatrix::from_fn(rows.len(), reps.len(), |r, c| rows[r][c]);
        linalg::null_space_real(&a, 1e-10)
    };
    let mut out = Vec::new();
    for col in kernel.column_iter() {
        let tensor: Vec<f64> = (0..size).map(|f| col[unknown_of(&multi_index(f, id, q))]).collect();
        out.push(IdealPolynomial { q, i_dim: id, tensor });
    }
    Ok(out)
}

/// `α_φ` and its closedness defect.
#[derive(Debug, Clone, Serialize)]
pub struct CharacteristicForm {
    pub alpha: HForm,
    /// `max |d_h α_φ|`.
    pub closure_residual: f64,
}

/// `α_φ(x_1, …, x_{2q}) = 2^{−q} Σ_σ sgn(σ) P(R_φ(x_{σ1}, x_{σ2}), …)`.
/// Returns the zero form when `2q > h_dim`.
pub fn characteristic_form(p: &IdealPolynomial, ses: &LieSES, phi: &Splitting) -> Result<CharacteristicForm> {
    if p.i_dim != ses.i_dim {
        return Err(Error::invalid("polynomial is defined on an ideal of a different dimension"));
    }
    let deg = 2 * p.q;
    let hd = ses.h_dim();
    if deg > hd {
        return Ok(CharacteristicForm { alpha: HForm::zero(hd, deg, 1), closure_residual: 0.0 });
    }
    if deg > MAX_FORM_DEGREE {
        return Err(Error::Capacity(format!("form degree {deg} exceeds {MAX_FORM_DEGREE}")));
    }
    let r = lecomte_obstruction(ses, phi)?.ideal_part(ses);
    let perms = permutations(deg);
    let norm = 0.5f64.powi(p.q as i32);
    let mut alpha = HForm::zero(hd, deg, 1);
    for m in exterior::masks_of_degree(hd, deg) {
        let xs = exterior::indices(m);
        let mut total = 0.0;
        for (perm, sign) in &perms {
            let vals: Vec<Vec<f64>> = (0..p.q).map(|t| r.value(&[xs[perm[2 * t]], xs[perm[2 * t + 1]]])).collect();
            let args: Vec<&[f64]> = vals.iter().map(|v| v.as_slice()).collect();
            total += sign * p.evaluate(&args);
        }
        alpha.coeffs.insert(m, vec![norm * total]);
    }
    let closure_residual = chevalley_differential(ses, &alpha).max_abs();
    Ok(CharacteristicForm { alpha, closure_residual })
}

/// Least-squares test of `d_h β = w`.
#[derive(Debug, Clone, Serialize)]
pub struct Exactness {
    pub exact: bool,
    pub residual: f64,
    pub tolerance: f64,
}

/// Solves `d_h β = w` for `β` of degree `deg(w) − 1` in the least-squares
/// sense and reports the residual.
pub fn exactness(ses: &LieSES, w: &HForm) -> Exactness {
    let residual = if w.degree == 0 || w.degree > w.dim {
        w.max_abs()
    } else {
        let hd = ses.h_dim();
        let lower = exterior::masks_of_degree(hd, w.degree - 1);
        let cols: Vec<DVector<f64>> = lower
            .iter()
            .flat_map(|&m| {
                (0..w.values).map(move |v| {
                    let mut e = HForm::zero(hd, w.degree - 1, w.values);
                    e.coeffs.get_mut(&m).expect("mask of the right degree")[v] = 1.0;
                    chevalley_differential(ses, &e).as_vector()
                })
            })
            .collect();
        let a = DMatrix::from_columns(&cols);
        linalg::least_squares_real(&a, &w.as_vector()).1
    };
    Exactness { exact: residual <= EXACTNESS_TOL, residual, tolerance: EXACTNESS_TOL }
}
