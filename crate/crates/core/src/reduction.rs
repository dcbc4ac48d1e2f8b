//! Pointwise algebra of symmetric reduction: the centralizer `W` of an
//! isotropy action on `M_n`, reductive complements, the space `F` of
//! equivariant maps `l ⊕ m → M_n`, and reduced dimension counts over a point.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding::{self, MatrixJson};
use crate::error::{Error, Result};
use crate::linalg::{self, c, commutator, CMat};

/// Tolerance for the homomorphism and closure checks.
pub const REDUCTION_TOL: f64 = 1e-10;
/// Relative singular-value cutoff for null spaces.
pub const RANK_TOL: f64 = 1e-9;

/// Isotropy data: a real Lie algebra `h0` with structure tensor
/// `[x_a, x_b] = Σ_k c^k_{ab} x_k`, its antihermitean representation
/// `λ_* x_a` on `C^n`, and its real action `ρ_a` on the module `l ⊕ m`.
#[derive(Debug, Clone)]
pub struct ReductionData {
    n: usize,
    h0: Vec<f64>,
    lambda_star: Vec<CMat>,
    lm: Vec<DMatrix<f64>>,
    lm_dim: usize,
}

/// JSON form of [`ReductionData`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionDescriptor {
    pub n: usize,
    /// `h0_structure_constants[k][a][b] = c^k_{ab}`.
    pub h0_structure_constants: Vec<Vec<Vec<f64>>>,
    pub lambda_star: Vec<MatrixJson>,
    pub lm_dim: usize,
    /// One real `lm_dim × lm_dim` matrix per `h0` basis element.
    pub lm_action: Vec<Vec<Vec<f64>>>,
}

fn hom_residual<T>(h0: &[f64], mats: &[T], br: impl Fn(&T, &T) -> T, lin: impl Fn(&[f64]) -> T, dist: impl Fn(&T, &T) -> f64) -> f64 {
    let d = mats.len();
    let mut worst = 0.0f64;
    for a in 0..d {
        for b in a + 1..d {
            let coeffs: Vec<f64> = (0..d).map(|k| h0[(k * d + a) * d + b]).collect();
            worst = worst.max(dist(&br(&mats[a], &mats[b]), &lin(&coeffs)));
        }
    }
    worst
}

impl ReductionData {
    pub fn new(n: usize, h0: Vec<f64>, lambda_star: Vec<CMat>, lm_dim: usize, lm: Vec<DMatrix<f64>>) -> Result<Self> {
        let d = lambda_star.len();
        if n == 0 {
            return Err(Error::invalid("matrix size must be positive"));
        }
        if h0.len() != d * d * d || lm.len() != d {
            return Err(Error::invalid("h0 structure tensor, lambda_star and lm action disagree on dim h0"));
        }
        if lambda_star.iter().any(|m| m.shape() != (n, n)) {
            return Err(Error::invalid(format!("lambda_star entries must be {n}x{n}")));
        }
        if lm.iter().any(|m| m.shape() != (lm_dim, lm_dim)) {
            return Err(Error::invalid(format!("lm action matrices must be {lm_dim}x{lm_dim}")));
        }
        if h0.iter().any(|v| !v.is_finite()) || lm.iter().any(|m| m.iter().any(|v| !v.is_finite())) {
            return Err(Error::invalid("non-finite entries"));
        }
        if let Some(bad) = lambda_star.iter().position(|m| linalg::max_abs(&(m + m.adjoint())) > REDUCTION_TOL) {
            return Err(Error::invalid(format!("lambda_star[{bad}] is not antihermitean")));
        }
        let lam = hom_residual(
            &h0,
            &lambda_star,
            commutator,
            |cs| cs.iter().zip(&lambda_star).fold(CMat::zeros(n, n), |acc, (&k, m)| acc + m * c(k, 0.0)),
            |x, y| linalg::max_abs(&(x - y)),
        );
        if lam > REDUCTION_TOL {
            return Err(Error::invalid(format!("lambda_star is not a homomorphism (defect {lam:.3e})")));
        }
        let rho = hom_residual(
            &h0,
            &lm,
            |x, y| x * y - y * x,
            |cs| cs.iter().zip(&lm).fold(DMatrix::zeros(lm_dim, lm_dim), |acc, (&k, m)| acc + m * k),
            |x, y| (x - y).amax(),
        );
        if rho > REDUCTION_TOL {
            return Err(Error::invalid(format!("lm action does not respect brackets (defect {rho:.3e})")));
        }
        Ok(ReductionData { n, h0, lambda_star, lm, lm_dim })
    }

    pub fn from_descriptor(d: &ReductionDescriptor) -> Result<Self> {
        let hd = d.lambda_star.len();
        let mut h0 = Vec::with_capacity(hd * hd * hd);
        if d.h0_structure_constants.len() != hd {
            return Err(Error::invalid("h0 structure tensor must be dim_h0 cubed"));
        }
        for slab in &d.h0_structure_constants {
            if slab.len() != hd || slab.iter().any(|r| r.len() != hd) {
                return Err(Error::invalid("h0 structure tensor must be dim_h0 cubed"));
            }
            slab.iter().for_each(|r| h0.extend_from_slice(r));
        }
        let lambda = d.lambda_star.iter().map(|m| encoding::square_from_json(m, d.n)).collect::<Result<Vec<_>>>()?;
        let mut lm = Vec::with_capacity(d.lm_action.len());
        for m in &d.lm_action {
            if m.len() != d.lm_dim || m.iter().any(|r| r.len() != d.lm_dim) {
                return Err(Error::invalid("lm action matrices must be lm_dim x lm_dim"));
            }
            lm.push(DMatrix::from_fn(d.lm_dim, d.lm_dim, |i, j| m[i][j]));
        }
        Self::new(d.n, h0, lambda, d.lm_dim, lm)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h0_dim(&self) -> usize {
        self.lambda_star.len()
    }

    pub fn lm_dim(&self) -> usize {
        self.lm_dim
    }

    pub fn lambda_star(&self) -> &[CMat] {
        &self.lambda_star
    }

    pub fn lm_action(&self) -> &[DMatrix<f64>] {
        &self.lm
    }

    /// The same data in the basis `x'_a = Σ_b t_{ab} x_b` of `h0`.
    pub fn change_h0_basis(&self, t: &DMatrix<f64>) -> Result<Self> {
        let d = self.h0_dim();
        if t.shape() != (d, d) {
            return Err(Error::invalid("basis change has the wrong shape"));
        }
        let tinv = t.clone().try_inverse().ok_or_else(|| Error::invalid("basis change is singular"))?;
        let mut h0 = vec![0.0; d * d * d];
        for k in 0..d {
            for a in 0..d {
                for b in 0..d {
                    let mut s = 0.0;
                    for p in 0..d {
                        for q in 0..d {
                            for m in 0..d {
                                s += t[(a, p)] * t[(b, q)] * self.h0[(m * d + p) * d + q] * tinv[(m, k)];
                            }
                        }
                    }
                    h0[(k * d + a) * d + b] = s;
                }
            }
        }
        let lambda = (0..d)
            .map(|a| (0..d).fold(CMat::zeros(self.n, self.n), |acc, b| acc + &self.lambda_star[b] * c(t[(a, b)], 0.0)))
            .collect();
        let lm = (0..d)
            .map(|a| (0..d).fold(DMatrix::zeros(self.lm_dim, self.lm_dim), |acc, b| acc + &self.lm[b] * t[(a, b)]))
            .collect();
        Self::new(self.n, h0, lambda, self.lm_dim, lm)
    }

    /// The same data with `l ⊕ m` re-expressed in the basis given by the
    /// columns of `s`.
    pub fn change_lm_basis(&self, s: &DMatrix<f64>) -> Result<Self> {
        if s.shape() != (self.lm_dim, self.lm_dim) {
            return Err(Error::invalid("basis change has the wrong shape"));
        }
        let sinv = s.clone().try_inverse().ok_or_else(|| Error::invalid("basis change is singular"))?;
        let lm = self.lm.iter().map(|r| &sinv * r * s).collect();
        Self::new(self.n, self.h0.clone(), self.lambda_star.clone(), self.lm_dim, lm)
    }

    pub fn descriptor(&self) -> ReductionDescriptor {
        let d = self.h0_dim();
        ReductionDescriptor {
            n: self.n,
            h0_structure_constants: (0..d)
                .map(|k| (0..d).map(|a| (0..d).map(|b| self.h0[(k * d + a) * d + b]).collect()).collect())
                .collect(),
            lambda_star: self.lambda_star.iter().map(encoding::to_json).collect(),
            lm_dim: self.lm_dim,
            lm_action: self.lm.iter().map(|m| m.row_iter().map(|r| r.iter().copied().collect()).collect()).collect(),
        }
    }
}

fn real_vec(m: &CMat) -> DVector<f64> {
    DVector::from_iterator(2 * m.len(), m.iter().map(|z| z.re).chain(m.iter().map(|z| z.im)))
}

/// Distance from `v` to the complex span of `basis`.
fn span_residual(basis: &[CMat], v: &CMat) -> f64 {
    if basis.is_empty() {
        return linalg::norm(v);
    }
    let cols: Vec<_> = basis.iter().map(linalg::vectorize).collect();
    let a = CMat::from_columns(&cols);
    let b = linalg::vectorize(v);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let x = svd.solve(&b, 1e-12 * smax.max(f64::MIN_POSITIVE)).expect("u and v_t were requested");
    (a * x - b).norm()
}

/// Distance from `v` to the real span of `basis`.
fn real_span_residual(basis: &[CMat], v: &CMat) -> f64 {
    if basis.is_empty() {
        return linalg::norm(v);
    }
    let a = DMatrix::from_columns(&basis.iter().map(real_vec).collect::<Vec<_>>());
    linalg::least_squares_real(&a, &real_vec(v)).1
}

#[derive(Debug, Clone, Serialize)]
pub struct Centralizer {
    #[serde(with = "encoding::cmat_vec")]
    pub basis: Vec<CMat>,
    pub dim: usize,
    /// Largest distance of a product of basis elements from the span.
    pub product_residual: f64,
    /// Distance of the identity from the span.
    pub identity_residual: f64,
}

/// `W = {w ∈ M_n : [λ_* x, w] = 0 for all x ∈ h0}`.
pub fn centralizer_w(rd: &ReductionData) -> Result<Centralizer> {
    let basis = crate::lie::commutant(rd.n, &rd.lambda_star)?;
    let mut product_residual = 0.0f64;
    for a in &basis {
        for b in &basis {
            product_residual = product_residual.max(span_residual(&basis, &(a * b)));
        }
    }
    let identity_residual = span_residual(&basis, &linalg::identity(rd.n));
    Ok(Centralizer { dim: basis.len(), basis, product_residual, identity_residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct Complement {
    #[serde(with = "encoding::cmat_vec")]
    pub basis: Vec<CMat>,
    pub dim: usize,
    /// Largest `|Re Tr(s c)|` over subalgebra and complement basis elements.
    pub orthogonality_residual: f64,
    /// Largest distance of `[s, c]` from the complement.
    pub stability_residual: f64,
}

/// Trace-orthogonal complement of `sub` inside the real span of `amb`, for
/// matrix Lie algebras with the invariant form `B(X, Y) = Re Tr(XY)`.
pub fn reductive_complement(amb: &[CMat], sub: &[CMat]) -> Result<Complement> {
    let n = amb.first().or(sub.first()).map(|m| m.nrows()).unwrap_or(0);
    if amb.iter().chain(sub).any(|m| m.shape() != (n, n)) {
        return Err(Error::invalid("all matrices must be square and of equal size"));
    }
    let form = |x: &CMat, y: &CMat| linalg::trace(&(x * y)).re;
    let scale = amb.iter().chain(sub).map(linalg::norm).fold(1.0, f64::max);
    for s in sub {
        let r = real_span_residual(amb, s);
        if r > REDUCTION_TOL * scale {
            return Err(Error::invalid(format!("subalgebra is not contained in the ambient span (defect {r:.3e})")));
        }
    }
    for a in sub {
        for b in sub {
            let r = real_span_residual(sub, &commutator(a, b));
            if r > REDUCTION_TOL * scale * scale {
                return Err(Error::invalid(format!("subalgebra is not closed under brackets (defect {r:.3e})")));
            }
        }
    }
    if !sub.is_empty() {
        let gram = DMatrix::from_fn(sub.len(), sub.len(), |i, j| form(&sub[i], &sub[j]));
        let s = gram.singular_values();
        let smin = s.iter().copied().fold(f64::INFINITY, f64::min);
        if smin <= RANK_TOL * scale * scale {
            return Err(Error::Numerical(format!(
                "trace form is degenerate on the subalgebra (smallest singular value {smin:.3e}); no reductive split"
            )));
        }
    }
    let ambient = {
        let mut out: Vec<CMat> = Vec::new();
        for m in amb {
            if real_span_residual(&out, m) > REDUCTION_TOL * scale {
                out.push(m.clone());
            }
        }
        out
    };
    let basis: Vec<CMat> = if sub.is_empty() {
        ambient.clone()
    } else {
        let constraints = DMatrix::from_fn(sub.len(), ambient.len(), |i, j| form(&sub[i], &ambient[j]));
        let kernel = linalg::null_space_real(&constraints, RANK_TOL);
        kernel
            .column_iter()
            .map(|col| col.iter().zip(&ambient).fold(CMat::zeros(n, n), |acc, (&k, m)| acc + m * c(k, 0.0)))
            .collect()
    };
    let mut orthogonality_residual = 0.0f64;
    let mut stability_residual = 0.0f64;
    for s in sub {
        for b in &basis {
            orthogonality_residual = orthogonality_residual.max(form(s, b).abs());
            stability_residual = stability_residual.max(real_span_residual(&basis, &commutator(s, b)));
        }
    }
    Ok(Complement { dim: basis.len(), basis, orthogonality_residual, stability_residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantMaps {
    /// Each element lists `f(e_j)` for the basis `e_j` of `l ⊕ m`.
    pub basis: Vec<Vec<MatrixJson>>,
    /// Complex dimension of `F`.
    pub dim: usize,
    /// Largest intertwining defect `|f(ρ_a e_j) − [λ_a, f(e_j)]|` of the basis.
    pub residual: f64,
}

/// `F = {f : l ⊕ m → M_n | f(x·v) = [λ_* x, f(v)]}`, complex-linear in the
/// values.
pub fn invariant_maps_f(rd: &ReductionData) -> Result<InvariantMaps> {
    let (n, l) = (rd.n, rd.lm_dim);
    let nn = n * n;
    let unknowns = l * nn;
    if unknowns > 4096 {
        return Err(Error::Capacity(format!("{unknowns} unknowns exceed 4096")));
    }
    let maps: Vec<Vec<CMat>> = if rd.h0_dim() == 0 {
        (0..unknowns).map(|u| unit_map(u, l, n)).collect()
    } else {
        let mut system = CMat::zeros(rd.h0_dim() * unknowns, unknowns);
        for (a, (lam, rho)) in rd.lambda_star.iter().zip(&rd.lm).enumerate() {
            for j in 0..l {
                let row0 = (a * l + j) * nn;
                // f(ρ_a e_j) = Σ_i ρ_a[i, j] f(e_i)
                for i in 0..l {
                    let r = rho[(i, j)];
                    if r != 0.0 {
                        for e in 0..nn {
                            system[(row0 + e, i * nn + e)] += c(r, 0.0);
                        }
                    }
                }
                // −[λ_a, f(e_j)] entrywise
                for p in 0..n {
                    for q in 0..n {
                        for k in 0..n {
                            system[(row0 + p * n + q, j * nn + k * n + q)] -= lam[(p, k)];
                            system[(row0 + p * n + q, j * nn + p * n + k)] += lam[(k, q)];
                        }
                    }
                }
            }
        }
        let kernel = linalg::null_space(&system, RANK_TOL);
        kernel
            .column_iter()
            .map(|col| (0..l).map(|j| CMat::from_fn(n, n, |p, q| col[j * nn + p * n + q])).collect())
            .collect()
    };
    let residual = maps.iter().map(|f| intertwining_defect(rd, f)).fold(0.0, f64::max);
    Ok(InvariantMaps {
        dim: maps.len(),
        basis: maps.iter().map(|f| f.iter().map(encoding::to_json).collect()).collect(),
        residual,
    })
}

fn unit_map(u: usize, l: usize, n: usize) -> Vec<CMat> {
    let mut f = vec![CMat::zeros(n, n); l];
    let (j, e) = (u / (n * n), u % (n * n));
    f[j][(e / n, e % n)] = linalg::ONE;
    f
}

fn intertwining_defect(rd: &ReductionData, f: &[CMat]) -> f64 {
    let mut worst = 0.0f64;
    for (lam, rho) in rd.lambda_star.iter().zip(&rd.lm) {
        for j in 0..rd.lm_dim {
            let lhs = (0..rd.lm_dim).fold(CMat::zeros(rd.n, rd.n), |acc, i| acc + &f[i] * c(rho[(i, j)], 0.0));
            worst = worst.max(linalg::max_abs(&(lhs - commutator(lam, &f[j]))));
        }
    }
    worst
}

/// Action of `k ⊕ z0` at the point: by commutators with antihermitean
/// matrices on `M_n` and by real matrices on `l ⊕ m`.
#[derive(Debug, Clone)]
pub struct SymmetryActions {
    pub k_dim: usize,
    pub z0_dim: usize,
    pub on_matrices: Vec<CMat>,
    pub on_lm: Vec<DMatrix<f64>>,
}

impl SymmetryActions {
    /// `k ⊕ z0` acting trivially on everything.
    pub fn trivial(rd: &ReductionData, k_dim: usize, z0_dim: usize) -> Self {
        let d = k_dim + z0_dim;
        SymmetryActions {
            k_dim,
            z0_dim,
            on_matrices: vec![CMat::zeros(rd.n, rd.n); d],
            on_lm: vec![DMatrix::zeros(rd.lm_dim, rd.lm_dim); d],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReducedDims {
    /// Basic `W`-valued 1-forms of `k ⊕ z0` over a point.
    pub basic_one_forms: usize,
    /// Elements of `F` fixed by `k ⊕ z0`.
    pub invariant_maps: usize,
}

/// Dimension counts of the reduced connection space over a one-point base.
///
/// Basic 1-forms are the common kernel of all interior products `i_X` and
/// Lie derivatives `L_X` on `W ⊗ (k ⊕ z0)*`; the invariant part of `F` is
/// the kernel of `f ↦ [μ_b, f(·)] − f(σ_b ·)` restricted to `F`.
pub fn reduced_space_dims(rd: &ReductionData, actions: &SymmetryActions) -> Result<ReducedDims> {
    let d = actions.k_dim + actions.z0_dim;
    if actions.on_matrices.len() != d || actions.on_lm.len() != d {
        return Err(Error::invalid("symmetry actions must list k_dim + z0_dim generators"));
    }
    if actions.on_matrices.iter().any(|m| m.shape() != (rd.n, rd.n))
        || actions.on_lm.iter().any(|m| m.shape() != (rd.lm_dim, rd.lm_dim))
    {
        return Err(Error::invalid("symmetry action matrices have the wrong shape"));
    }
    let w = centralizer_w(rd)?;
    let wd = w.dim;
    let basic_one_forms = if d == 0 || wd == 0 {
        0
    } else {
        // Unknowns ω(X_b) ∈ W in coordinates of the W basis; i_{X_b} ω = ω(X_b).
        let mut system = CMat::zeros(d * wd, d * wd);
        for r in 0..d * wd {
            system[(r, r)] = linalg::ONE;
        }
        linalg::null_space(&system, RANK_TOL).ncols()
    };
    let f = invariant_maps_f(rd)?;
    let invariant_maps = if d == 0 || f.dim == 0 {
        f.dim
    } else {
        let maps: Vec<Vec<CMat>> =
            f.basis.iter().map(|m| m.iter().map(|x| encoding::square_from_json(x, rd.n)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        let l = rd.lm_dim;
        let nn = rd.n * rd.n;
        let mut system = CMat::zeros(d * l * nn, maps.len());
        for (col, fm) in maps.iter().enumerate() {
            for (b, (mu, sigma)) in actions.on_matrices.iter().zip(&actions.on_lm).enumerate() {
                for j in 0..l {
                    let moved = (0..l).fold(CMat::zeros(rd.n, rd.n), |acc, i| acc + &fm[i] * c(sigma[(i, j)], 0.0));
                    let v = commutator(mu, &fm[j]) - moved;
                    for (e, z) in v.iter().enumerate() {
                        system[((b * l + j) * nn + e, col)] = *z;
                    }
                }
            }
        }
        linalg::null_space(&system, RANK_TOL).ncols()
    };
    Ok(ReducedDims { basic_one_forms, invariant_maps })
}

/// `ε_{abc}`, the structure tensor of `su(2)` in the basis `T_a = σ_a/(2i)`.
pub fn su2_structure() -> Vec<f64> {
    let mut c0 = vec![0.0; 27];
    for (a, b, k, s) in [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)] {
        c0[(k * 3 + a) * 3 + b] = s;
        c0[(k * 3 + b) * 3 + a] = -s;
    }
    c0
}

/// Antihermitean spin-`j` matrices `T_a = −i J_a` with `[T_a, T_b] = ε_{abc} T_c`.
pub fn su2_spin(two_j: usize) -> [CMat; 3] {
    let d = two_j + 1;
    let j = two_j as f64 / 2.0;
    let mut jz = CMat::zeros(d, d);
    let mut jp = CMat::zeros(d, d);
    for k in 0..d {
        let m = j - k as f64;
        jz[(k, k)] = c(m, 0.0);
        if k > 0 {
            jp[(k - 1, k)] = c(((j - m) * (j + m + 1.0)).sqrt(), 0.0);
        }
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * c(0.5, 0.0);
    let jy = (&jp - &jm) * c(0.0, -0.5);
    let mi = Complex64::new(0.0, -1.0);
    [jx * mi, jy * mi, jz * mi]
}

/// Real `so(3)` generators `(L_a)_{bc} = −ε_{abc}` (the adjoint module).
pub fn so3_adjoint() -> [DMatrix<f64>; 3] {
    let eps = su2_structure();
    std::array::from_fn(|a| DMatrix::from_fn(3, 3, |b, cc| -eps[(cc * 3 + a) * 3 + b]))
}

/// The real 5-dimensional spin-2 module: traceless symmetric `3 × 3` matrices
/// under `S ↦ [L_a, S]`, in an orthonormal basis.
pub fn so3_spin2() -> [DMatrix<f64>; 3] {
    let s2 = 0.5f64.sqrt();
    let s6 = (1.0f64 / 6.0).sqrt();
    let basis = [
        DMatrix::from_row_slice(3, 3, &[0.0, s2, 0.0, s2, 0.0, 0.0, 0.0, 0.0, 0.0]),
        DMatrix::from_row_slice(3, 3, &[0.0, 0.0, s2, 0.0, 0.0, 0.0, s2, 0.0, 0.0]),
        DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, s2, 0.0, s2, 0.0]),
        DMatrix::from_row_slice(3, 3, &[s2, 0.0, 0.0, 0.0, -s2, 0.0, 0.0, 0.0, 0.0]),
        DMatrix::from_row_slice(3, 3, &[s6, 0.0, 0.0, 0.0, s6, 0.0, 0.0, 0.0, -2.0 * s6]),
    ];
    let l = so3_adjoint();
    std::array::from_fn(|a| {
        DMatrix::from_fn(5, 5, |i, j| {
            let img = &l[a] * &basis[j] - &basis[j] * &l[a];
            img.dot(&basis[i])
        })
    })
}
