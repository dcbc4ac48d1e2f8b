//! Noncommutative connections on the right modules `M_{r,n}` of `M_n`.
//!
//! A connection is stored through its offset `A = A_k θ^k` from the canonical
//! connection `∇^{−iθ}`, which acts as `∇_{ad_γ} m = −m γ` for traceless `γ`.
//! Thus `∇_X m = −m γ + A(X) m`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding;
use crate::error::{Error, Result};
use crate::forms::{canonical_theta, differential, InnerDerivation, MatrixForm};
use crate::lie::{self, LieBasis, LieRep};
use crate::linalg::{self, commutator, CMat};

/// Tolerance for the algebraic identities of this module.
pub const ALGEBRAIC_TOL: f64 = 1e-10;

/// `A = Σ_k A_k θ^k` with `A_k ∈ M_r`.
#[derive(Debug, Clone)]
pub struct ConnectionForm {
    basis: Arc<LieBasis>,
    a: Vec<CMat>,
}

impl ConnectionForm {
    pub fn new(basis: Arc<LieBasis>, a: Vec<CMat>) -> Result<Self> {
        if a.len() != basis.dim() {
            return Err(Error::invalid(format!(
                "connection needs {} components, got {}",
                basis.dim(),
                a.len()
            )));
        }
        let r = a.first().map(|m| m.nrows()).unwrap_or(0);
        if r == 0 || a.iter().any(|m| m.nrows() != r || m.ncols() != r) {
            return Err(Error::invalid("connection components must be square of one size"));
        }
        Ok(ConnectionForm { basis, a })
    }

    /// The canonical connection `∇^{−iθ}` on `M_{r,n}`.
    pub fn canonical(basis: Arc<LieBasis>, r: usize) -> Self {
        let a = vec![CMat::zeros(r, r); basis.dim()];
        ConnectionForm { basis, a }
    }

    pub fn from_rep(rep: &LieRep) -> Self {
        ConnectionForm { basis: rep.basis().clone(), a: rep.matrices().to_vec() }
    }

    pub fn r(&self) -> usize {
        self.a[0].nrows()
    }

    pub fn basis(&self) -> &Arc<LieBasis> {
        &self.basis
    }

    pub fn components(&self) -> &[CMat] {
        &self.a
    }

    /// `Σ A_k θ^k` as a 1-form with `r×r` coefficients.
    pub fn as_form(&self) -> MatrixForm {
        let mut f = MatrixForm::zero(self.basis.dim(), 1, self.r(), self.r());
        for (k, ak) in self.a.iter().enumerate() {
            f.add_term(&[k], ak.clone());
        }
        f
    }

    /// For `r = n`: the full connection 1-form `ω = −iθ + A`.
    pub fn full_form(&self) -> Result<MatrixForm> {
        if self.r() != self.basis.n() {
            return Err(Error::invalid("the full 1-form exists only for r = n"));
        }
        Ok(self.as_form().sub(&canonical_theta(&self.basis)))
    }

    /// `A(X) = Σ x^k A_k`.
    pub fn evaluate(&self, x: &InnerDerivation) -> CMat {
        let mut out = CMat::zeros(self.r(), self.r());
        for (xk, ak) in x.coordinates().iter().zip(&self.a) {
            out += ak * *xk;
        }
        out
    }

    /// `∇_X m = −m γ + A(X) m` for `m ∈ M_{r,n}`.
    pub fn covariant_derivative(&self, x: &InnerDerivation, m: &CMat) -> CMat {
        self.evaluate(x) * m - m * x.gamma()
    }

    /// Gauge transform by `u ∈ GL_r`: `A_k ↦ u⁻¹ A_k u`.
    pub fn gauge(&self, u: &GaugeElement) -> Result<ConnectionForm> {
        if u.u.nrows() != self.r() {
            return Err(Error::invalid("gauge element has the wrong size"));
        }
        let a = self.a.iter().map(|ak| &u.inverse * ak * &u.u).collect();
        Ok(ConnectionForm { basis: self.basis.clone(), a })
    }
}

#[derive(Serialize, Deserialize)]
struct ConnectionJson {
    #[serde(with = "encoding::cmat_vec")]
    components: Vec<CMat>,
}

impl Serialize for ConnectionForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConnectionJson { components: self.a.clone() }.serialize(s)
    }
}

impl ConnectionForm {
    /// Reads `{"components": [...]}` against a known basis.
    pub fn from_json(basis: Arc<LieBasis>, value: serde_json::Value) -> Result<Self> {
        let json: ConnectionJson = serde_json::from_value(value)?;
        ConnectionForm::new(basis, json.components)
    }
}

/// An invertible element of `M_r` acting as a gauge transformation.
#[derive(Debug, Clone)]
pub struct GaugeElement {
    u: CMat,
    inverse: CMat,
    unitary: bool,
}

impl GaugeElement {
    pub fn new(u: CMat) -> Result<Self> {
        if u.nrows() != u.ncols() || u.nrows() == 0 {
            return Err(Error::invalid("gauge element must be a nonempty square matrix"));
        }
        if linalg::inverse_condition(&u) < 1e-12 {
            return Err(Error::invalid("gauge element is singular"));
        }
        let inverse = u.clone().try_inverse().ok_or_else(|| Error::invalid("gauge element is singular"))?;
        let unitary = linalg::is_unitary(&u, 1e-12);
        Ok(GaugeElement { u, inverse, unitary })
    }

    pub fn matrix(&self) -> &CMat {
        &self.u
    }

    pub fn inverse(&self) -> &CMat {
        &self.inverse
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }
}

/// Curvature of `∇^{−iθ} + A`: the coefficient on `k < l` is
/// `[A_k, A_l] − Σ_m C^m_{kl} A_m`.
pub fn curvature(conn: &ConnectionForm) -> MatrixForm {
    let b = &conn.basis;
    let d = b.dim();
    let r = conn.r();
    let mut f = MatrixForm::zero(d, 2, r, r);
    for k in 0..d {
        for l in k + 1..d {
            let v = commutator(&conn.a[k], &conn.a[l]) - b.contract(k, l, &conn.a);
            if linalg::max_abs(&v) > 0.0 {
                f.add_term(&[k, l], v);
            }
        }
    }
    f
}

/// Curvature `d′ω + ω²` of a 1-form on the module `M_n` itself.
pub fn form_curvature(basis: &LieBasis, w: &MatrixForm) -> Result<MatrixForm> {
    if w.degree() != 1 {
        return Err(Error::invalid("connection forms have degree 1"));
    }
    Ok(differential(basis, w)?.add(&w.wedge(w)))
}

/// `ω^g = g⁻¹ ω g + g⁻¹ d′g`.
pub fn gauge_transform(basis: &LieBasis, w: &MatrixForm, g: &GaugeElement) -> Result<MatrixForm> {
    if w.degree() != 1 {
        return Err(Error::invalid("connection forms have degree 1"));
    }
    if g.u.nrows() != basis.n() || w.shape() != (basis.n(), basis.n()) {
        return Err(Error::invalid("gauge element and form must be n x n"));
    }
    let dg = differential(basis, &MatrixForm::scalar(basis.dim(), g.u.clone()))?;
    Ok(w.left_mul(&g.inverse).right_mul(&g.u).add(&dg.left_mul(&g.inverse)))
}

/// Hermitean compatibility with `⟨m_1, m_2⟩ = m_1^* m_2`.
///
/// On a real derivation `ad_{iE_k}` the connection contributes `i A_k`, which
/// must be antihermitean; equivalently every `A_k` is hermitean.
pub fn check_hermitean_compat(conn: &ConnectionForm) -> bool {
    let scale = conn.a.iter().map(linalg::max_abs).fold(1.0, f64::max);
    conn.a.iter().all(|ak| {
        let on_real = ak * Complex64::new(0.0, 1.0);
        linalg::max_abs(&(&on_real + on_real.adjoint())) <= ALGEBRAIC_TOL * scale
    })
}

/// Defect `X⟨m_1, m_2⟩ − ⟨∇_X m_1, m_2⟩ − ⟨m_1, ∇_X m_2⟩` of the
/// compatibility identity, evaluated directly.
pub fn compat_defect(conn: &ConnectionForm, x: &InnerDerivation, m1: &CMat, m2: &CMat) -> f64 {
    let lhs = x.apply(&(m1.adjoint() * m2));
    let rhs = conn.covariant_derivative(x, m1).adjoint() * m2
        + m1.adjoint() * conn.covariant_derivative(x, m2);
    linalg::max_abs(&(lhs - rhs))
}

/// One gauge orbit of flat connections.
#[derive(Debug, Clone, Serialize)]
pub struct FlatOrbit {
    /// Dimensions of the irreducible summands, in decreasing order.
    pub partition: Vec<usize>,
    pub connection: ConnectionForm,
    pub curvature_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatClassification {
    pub r: usize,
    pub orbits: Vec<FlatOrbit>,
    pub pairwise_inequivalent: bool,
    pub max_curvature_residual: f64,
}

/// Partitions of `r` in decreasing order of parts.
pub fn partitions(r: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(r, r, &mut Vec::new(), &mut out);
    out
}

/// Largest module size handled by [`classify_flat`].
pub const MAX_FLAT_R: usize = 6;

/// One representative per gauge orbit of flat connections on `M_{r,2}`.
pub fn classify_flat(r: usize, basis: &Arc<LieBasis>) -> Result<FlatClassification> {
    if basis.n() != 2 {
        return Err(Error::Capacity("flat classification is implemented for n = 2 only".into()));
    }
    if r == 0 {
        return Err(Error::invalid("module size must be positive"));
    }
    if r > MAX_FLAT_R {
        return Err(Error::Capacity(format!("r = {r} exceeds the supported {MAX_FLAT_R}")));
    }
    let mut orbits = Vec::new();
    let mut reps = Vec::new();
    for part in partitions(r) {
        let irreps: Vec<LieRep> =
            part.iter().map(|&d| lie::sl2_irrep(basis, d - 1)).collect::<Result<_>>()?;
        let rep = lie::direct_sum(&irreps)?;
        let connection = ConnectionForm::from_rep(&rep);
        let curvature_residual = curvature(&connection).max_abs();
        orbits.push(FlatOrbit { partition: part, connection, curvature_residual });
        reps.push(rep);
    }
    let mut pairwise_inequivalent = true;
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            if lie::reps_equivalent(&reps[i], &reps[j])?.equivalent {
                pairwise_inequivalent = false;
            }
        }
    }
    let max_curvature_residual = orbits.iter().map(|o| o.curvature_residual).fold(0.0, f64::max);
    Ok(FlatClassification { r, orbits, pairwise_inequivalent, max_curvature_residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct AffineCheck {
    pub equal: bool,
    pub residual: f64,
}

/// Compares `(λ_1 ω_1 + λ_2 ω_2)^u` with `λ_1 ω_1^u + λ_2 ω_2^u`.
pub fn affine_gauge_check(
    basis: &LieBasis,
    w1: &MatrixForm,
    w2: &MatrixForm,
    l1: f64,
    l2: f64,
    u: &GaugeElement,
) -> Result<AffineCheck> {
    let (z1, z2) = (Complex64::new(l1, 0.0), Complex64::new(l2, 0.0));
    let lhs = gauge_transform(basis, &w1.scale(z1).add(&w2.scale(z2)), u)?;
    let rhs = gauge_transform(basis, w1, u)?.scale(z1).add(&gauge_transform(basis, w2, u)?.scale(z2));
    let residual = lhs.sub(&rhs).max_abs();
    let scale = w1.max_abs().max(w2.max_abs()).max(1.0) * (l1.abs() + l2.abs()).max(1.0);
    Ok(AffineCheck { equal: residual <= ALGEBRAIC_TOL * scale, residual })
}
