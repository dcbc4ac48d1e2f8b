//! Glued sections, glued derivations and local connection 1-forms.
//!
//! Valid data is produced by gluing arbitrary local data with the partition of
//! unity, which makes the gluing relations hold exactly on the overlap.

use std::sync::Arc;

use rand::Rng;

use super::{directional, ChartedManifold, FormField, MatField, TransitionData, VecField};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};

/// A section of the endomorphism bundle: `a_2 = g⁻¹ a_1 g` on the overlap.
/// Sections built from polynomial data also carry exact derivatives.
#[derive(Clone)]
pub struct GluedSection {
    pub a1: MatField,
    pub a2: MatField,
    pub da1: Option<FormField>,
    pub da2: Option<FormField>,
}

/// A derivation `X + ad_{γ_i}` with `γ_2 = g⁻¹ γ_1 g + g⁻¹ (X·g)`.
#[derive(Clone)]
pub struct GluedDerivation {
    pub x: VecField,
    pub gamma1: MatField,
    pub gamma2: MatField,
}

/// Local connection forms with `A_2 = g⁻¹ A_1 g + g⁻¹ dg`.
#[derive(Clone)]
pub struct LocalConnection {
    pub a1: FormField,
    pub a2: FormField,
}

impl std::fmt::Debug for GluedSection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("GluedSection { .. }")
    }
}

impl std::fmt::Debug for GluedDerivation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("GluedDerivation { .. }")
    }
}

impl std::fmt::Debug for LocalConnection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("LocalConnection { .. }")
    }
}

/// A matrix field with its exact derivative `df(p)(v)`.
#[derive(Clone)]
pub(crate) struct SmoothField {
    pub f: MatField,
    pub df: FormField,
}

/// Random polynomial of degree ≤ 2 in the ambient coordinates with
/// coefficients drawn by `coeff`.
fn random_poly<R: Rng + ?Sized>(rng: &mut R, dim: usize, mut coeff: impl FnMut(&mut R) -> CMat) -> SmoothField {
    let c0 = coeff(rng);
    let lin: Arc<Vec<CMat>> = Arc::new((0..dim).map(|_| coeff(rng)).collect());
    let quad: Arc<Vec<(usize, usize, CMat)>> = Arc::new(
        (0..dim).flat_map(|a| (a..dim).map(move |b| (a, b))).map(|(a, b)| (a, b, coeff(rng))).collect(),
    );
    let (lin2, quad2) = (lin.clone(), quad.clone());
    let f: MatField = Arc::new(move |p: &[f64]| {
        let mut m = c0.clone();
        for (a, ca) in lin.iter().enumerate() {
            m += ca * c(p[a], 0.0);
        }
        for (a, b, cab) in quad.iter() {
            m += cab * c(p[*a] * p[*b], 0.0);
        }
        m
    });
    let df: FormField = Arc::new(move |p: &[f64], v: &[f64]| {
        let mut m = &lin2[0] * c(v[0], 0.0);
        for (a, ca) in lin2.iter().enumerate().skip(1) {
            m += ca * c(v[a], 0.0);
        }
        for (a, b, cab) in quad2.iter() {
            m += cab * c(v[*a] * p[*b] + p[*a] * v[*b], 0.0);
        }
        m
    });
    SmoothField { f, df }
}

/// Random `su(n)`-valued polynomial field.
pub(crate) fn random_su_field<R: Rng + ?Sized>(rng: &mut R, dim: usize, n: usize, scale: f64) -> SmoothField {
    random_poly(rng, dim, |r| linalg::random_su(r, n) * c(scale, 0.0))
}

/// Random `su(n)`-valued 1-form `B(p)(v) = Σ_j B_j(p) v^j`.
pub(crate) fn random_su_form<R: Rng + ?Sized>(rng: &mut R, dim: usize, n: usize, scale: f64) -> FormField {
    let comps: Vec<MatField> = (0..dim).map(|_| random_su_field(rng, dim, n, scale).f).collect();
    Arc::new(move |p: &[f64], v: &[f64]| {
        let mut m = comps[0](p) * c(v[0], 0.0);
        for (j, cj) in comps.iter().enumerate().skip(1) {
            m += cj(p) * c(v[j], 0.0);
        }
        m
    })
}

/// Complex scalar polynomial of degree ≤ 2 with its derivative.
#[derive(Clone)]
struct ScalarPoly {
    c0: Complex64,
    lin: Vec<Complex64>,
    quad: Vec<(usize, usize, Complex64)>,
}

impl ScalarPoly {
    fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64, real: bool) -> Self {
        let draw = |r: &mut R| {
            let im = if real { 0.0 } else { r.random_range(-1.0..1.0) };
            Complex64::new(r.random_range(-1.0..1.0), im) * scale
        };
        let c0 = draw(rng);
        let lin = (0..dim).map(|_| draw(rng)).collect();
        let quad = (0..dim).flat_map(|a| (a..dim).map(move |b| (a, b))).collect::<Vec<_>>();
        let quad = quad.into_iter().map(|(a, b)| (a, b, draw(rng))).collect();
        ScalarPoly { c0, lin, quad }
    }

    fn eval(&self, p: &[f64]) -> Complex64 {
        let mut s = self.c0;
        for (a, ca) in self.lin.iter().enumerate() {
            s += ca * p[a];
        }
        for (a, b, cab) in &self.quad {
            s += cab * (p[*a] * p[*b]);
        }
        s
    }

    fn deriv(&self, p: &[f64], v: &[f64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (a, ca) in self.lin.iter().enumerate() {
            s += ca * v[a];
        }
        for (a, b, cab) in &self.quad {
            s += cab * (v[*a] * p[*b] + p[*a] * v[*b]);
        }
        s
    }
}

/// `ζ^m` for `m ≥ 0` or `ζ̄^{|m|}` for `m < 0`, `ζ = x + iy`, with derivative.
fn zeta_power(m: i64, p: &[f64], v: &[f64]) -> (Complex64, Complex64) {
    let (z, dz) = if m >= 0 {
        (Complex64::new(p[0], p[1]), Complex64::new(v[0], v[1]))
    } else {
        (Complex64::new(p[0], -p[1]), Complex64::new(v[0], -v[1]))
    };
    let k = m.unsigned_abs() as i32;
    if k == 0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    (z.powi(k), dz * z.powi(k - 1) * f64::from(k))
}

/// `(x² + y²)^{k}` with derivative.
fn radial_power(k: i32, p: &[f64], v: &[f64]) -> (f64, f64) {
    let r2 = p[0] * p[0] + p[1] * p[1];
    if k == 0 {
        return (1.0, 0.0);
    }
    (r2.powi(k), f64::from(k) * r2.powi(k - 1) * 2.0 * (p[0] * v[0] + p[1] * v[1]))
}

impl GluedSection {
    /// `a_1 = ψ_1 s_1 + ψ_2 g s_2 g⁻¹`, `a_2 = ψ_2 s_2 + ψ_1 g⁻¹ s_1 g`.
    pub fn glue(m: &ChartedManifold, t: &TransitionData, s1: MatField, s2: MatField) -> Self {
        let (m1, t1, s1a, s2a) = (m.clone(), *t, s1.clone(), s2.clone());
        let a1: MatField = Arc::new(move |p: &[f64]| {
            let w2 = m1.psi(2, p);
            let mut out = s1a(p) * c(m1.psi(1, p), 0.0);
            if w2 > 0.0 {
                out += t1.g(p) * s2a(p) * t1.g_inv(p) * c(w2, 0.0);
            }
            out
        });
        let (m2, t2) = (m.clone(), *t);
        let a2: MatField = Arc::new(move |p: &[f64]| {
            let w1 = m2.psi(1, p);
            let mut out = s2(p) * c(m2.psi(2, p), 0.0);
            if w1 > 0.0 {
                out += t2.g_inv(p) * s1(p) * t2.g(p) * c(w1, 0.0);
            }
            out
        });
        GluedSection::new(a1, a2)
    }

    /// Sections without derivative data; derivatives fall back to finite
    /// differences.
    pub fn new(a1: MatField, a2: MatField) -> Self {
        GluedSection { a1, a2, da1: None, da2: None }
    }

    /// [`GluedSection::glue`] for local data with exact derivatives, which
    /// are propagated through the gluing.
    pub(crate) fn glue_smooth(m: &ChartedManifold, t: &TransitionData, s1: SmoothField, s2: SmoothField) -> Self {
        let mut out = GluedSection::glue(m, t, s1.f.clone(), s2.f.clone());
        let (m1, t1, a, b) = (m.clone(), *t, s1.clone(), s2.clone());
        out.da1 = Some(Arc::new(move |p: &[f64], v: &[f64]| {
            let mut d = (a.df)(p, v) * c(m1.psi(1, p), 0.0) + (a.f)(p) * c(m1.dpsi(1, p, v), 0.0);
            let (w2, dw2) = (m1.psi(2, p), m1.dpsi(2, p, v));
            if w2 > 0.0 || dw2 != 0.0 {
                let (g, gi, dg) = (t1.g(p), t1.g_inv(p), t1.dg(p, v));
                let conj = &g * (b.f)(p) * &gi;
                let dconj = &dg * (b.f)(p) * &gi + &g * (b.df)(p, v) * &gi - &conj * &dg * &gi;
                d += conj * c(dw2, 0.0) + dconj * c(w2, 0.0);
            }
            d
        }));
        let (m2, t2) = (m.clone(), *t);
        out.da2 = Some(Arc::new(move |p: &[f64], v: &[f64]| {
            let mut d = (s2.df)(p, v) * c(m2.psi(2, p), 0.0) + (s2.f)(p) * c(m2.dpsi(2, p, v), 0.0);
            let (w1, dw1) = (m2.psi(1, p), m2.dpsi(1, p, v));
            if w1 > 0.0 || dw1 != 0.0 {
                let (g, gi, dg) = (t2.g(p), t2.g_inv(p), t2.dg(p, v));
                let conj = &gi * (s1.f)(p) * &g;
                let dconj = &gi * (s1.df)(p, v) * &g + &gi * (s1.f)(p) * &dg - &gi * &dg * &conj;
                d += conj * c(dw1, 0.0) + dconj * c(w1, 0.0);
            }
            d
        }));
        out
    }

    /// The same matrix in every trivialisation; glued only if it is central.
    pub fn constant(a: CMat) -> Self {
        let (b, n) = (a.clone(), a.nrows());
        let zero: FormField = Arc::new(move |_, _| CMat::zeros(n, n));
        GluedSection {
            a1: Arc::new(move |_| a.clone()),
            a2: Arc::new(move |_| b.clone()),
            da1: Some(zero.clone()),
            da2: Some(zero),
        }
    }

    /// Random antihermitean traceless section.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, m: &ChartedManifold, t: &TransitionData, scale: f64) -> Self {
        let s1 = random_su_field(rng, m.ambient_dim(), t.n, scale);
        let s2 = random_su_field(rng, m.ambient_dim(), t.n, scale);
        GluedSection::glue_smooth(m, t, s1, s2)
    }

    /// Random `su(n)` section whose chart values are polynomials, so that
    /// it and its derivatives are free of partition-of-unity factors.
    ///
    /// The entry `(a, b)` picks up the phase `e^{−imφ}` under `g⁻¹ · g`, with
    /// `m = k (w_a − w_b)` and weights `w = (1, −1, 0, …)`. It is set to
    /// `ζ^m q` in chart 1 and `(x² + y²)^{|m|/2} q` in chart 2 for a random
    /// polynomial `q`; entries with odd `m` are zero. Needs an integer charge.
    pub fn random_polynomial<R: Rng + ?Sized>(
        rng: &mut R,
        m: &ChartedManifold,
        t: &TransitionData,
        scale: f64,
    ) -> Result<Self> {
        if t.charge.fract() != 0.0 {
            return Err(Error::invalid("polynomial sections need an integer charge"));
        }
        let (n, dim, k) = (t.n, m.ambient_dim(), t.charge as i64);
        let weight = |a: usize| match a {
            0 => 1i64,
            1 => -1,
            _ => 0,
        };
        let mut off = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let mm = k * (weight(a) - weight(b));
                if mm % 2 == 0 {
                    off.push((a, b, mm, ScalarPoly::random(rng, dim, scale, false)));
                }
            }
        }
        let diag: Vec<ScalarPoly> = (0..n - 1).map(|_| ScalarPoly::random(rng, dim, scale, true)).collect();
        let off = Arc::new(off);
        let diag = Arc::new(diag);
        let build = |chart: usize, derivative: bool| {
            let (off, diag) = (off.clone(), diag.clone());
            move |p: &[f64], v: &[f64]| -> CMat {
                let mut out = CMat::zeros(n, n);
                let mut last = Complex64::new(0.0, 0.0);
                for (a, q) in diag.iter().enumerate() {
                    let val = if derivative { q.deriv(p, v) } else { q.eval(p) } * Complex64::i();
                    out[(a, a)] = val;
                    last -= val;
                }
                out[(n - 1, n - 1)] = last;
                for (a, b, mm, q) in off.iter() {
                    let (f, df) = if chart == 1 {
                        zeta_power(*mm, p, v)
                    } else {
                        let (r, dr) = radial_power((mm.abs() / 2) as i32, p, v);
                        (Complex64::new(r, 0.0), Complex64::new(dr, 0.0))
                    };
                    let val = if derivative { df * q.eval(p) + f * q.deriv(p, v) } else { f * q.eval(p) };
                    out[(*a, *b)] = val;
                    out[(*b, *a)] = -val.conj();
                }
                out
            }
        };
        let zero = vec![0.0; dim];
        let (v1, v2) = (build(1, false), build(2, false));
        let (z1, z2) = (zero.clone(), zero);
        Ok(GluedSection {
            a1: Arc::new(move |p| v1(p, &z1)),
            a2: Arc::new(move |p| v2(p, &z2)),
            da1: Some(Arc::new(build(1, true))),
            da2: Some(Arc::new(build(2, true))),
        })
    }

    /// Pointwise `exp`; conjugation commutes with `exp`, so gluing survives.
    /// Derivatives use `d exp(a)(v) = [exp([[a, da(v)], [0, a]])]_{12}`.
    pub fn exp(&self) -> GluedSection {
        let (a1, a2) = (self.a1.clone(), self.a2.clone());
        let dexp = |a: MatField, da: Option<FormField>| -> Option<FormField> {
            let da = da?;
            Some(Arc::new(move |p: &[f64], v: &[f64]| {
                let x = a(p);
                let n = x.nrows();
                let mut big = CMat::zeros(2 * n, 2 * n);
                big.view_mut((0, 0), (n, n)).copy_from(&x);
                big.view_mut((n, n), (n, n)).copy_from(&x);
                big.view_mut((0, n), (n, n)).copy_from(&da(p, v));
                linalg::expm(&big).view((0, n), (n, n)).into_owned()
            }))
        };
        GluedSection {
            da1: dexp(a1.clone(), self.da1.clone()),
            da2: dexp(a2.clone(), self.da2.clone()),
            a1: Arc::new(move |p| linalg::expm(&a1(p))),
            a2: Arc::new(move |p| linalg::expm(&a2(p))),
        }
    }

    pub fn scale(&self, s: f64) -> GluedSection {
        let (a1, a2) = (self.a1.clone(), self.a2.clone());
        let sd = |d: &Option<FormField>| -> Option<FormField> {
            d.clone().map(|d| Arc::new(move |p: &[f64], v: &[f64]| d(p, v) * c(s, 0.0)) as FormField)
        };
        GluedSection {
            a1: Arc::new(move |p| a1(p) * c(s, 0.0)),
            a2: Arc::new(move |p| a2(p) * c(s, 0.0)),
            da1: sd(&self.da1),
            da2: sd(&self.da2),
        }
    }

    /// Derivative of the chart-`i` value along `v`: exact when available,
    /// otherwise a finite difference.
    pub fn derivative(&self, chart: usize, p: &[f64], v: &[f64]) -> CMat {
        let (a, da) = if chart == 1 { (&self.a1, &self.da1) } else { (&self.a2, &self.da2) };
        match da {
            Some(d) => d(p, v),
            None => directional(a.as_ref(), p, v),
        }
    }

    /// Chart-`i` value.
    pub fn at(&self, chart: usize, p: &[f64]) -> CMat {
        if chart == 1 {
            (self.a1)(p)
        } else {
            (self.a2)(p)
        }
    }

    /// `max ‖a_2 − g⁻¹ a_1 g‖` over the overlap samples.
    pub fn gluing_residual(&self, m: &ChartedManifold, t: &TransitionData) -> f64 {
        m.max_over(
            |p| m.in_overlap(p),
            |p| linalg::max_abs(&((self.a2)(p) - t.g_inv(p) * (self.a1)(p) * t.g(p))),
        )
    }
}

impl GluedDerivation {
    /// `γ_1 = ψ_1 η_1 + ψ_2 (g η_2 g⁻¹ − (X·g) g⁻¹)`,
    /// `γ_2 = ψ_2 η_2 + ψ_1 (g⁻¹ η_1 g + g⁻¹ (X·g))`.
    pub fn glue(m: &ChartedManifold, t: &TransitionData, x: VecField, eta1: MatField, eta2: MatField) -> Self {
        let (m1, t1, x1, e1, e2) = (m.clone(), *t, x.clone(), eta1.clone(), eta2.clone());
        let gamma1: MatField = Arc::new(move |p: &[f64]| {
            let w2 = m1.psi(2, p);
            let mut out = e1(p) * c(m1.psi(1, p), 0.0);
            if w2 > 0.0 {
                let (g, gi) = (t1.g(p), t1.g_inv(p));
                out += (&g * e2(p) * &gi - t1.dg(p, &x1(p)) * &gi) * c(w2, 0.0);
            }
            out
        });
        let (m2, t2, x2) = (m.clone(), *t, x.clone());
        let gamma2: MatField = Arc::new(move |p: &[f64]| {
            let w1 = m2.psi(1, p);
            let mut out = eta2(p) * c(m2.psi(2, p), 0.0);
            if w1 > 0.0 {
                let (g, gi) = (t2.g(p), t2.g_inv(p));
                out += (&gi * eta1(p) * &g + &gi * t2.dg(p, &x2(p))) * c(w1, 0.0);
            }
            out
        });
        GluedDerivation { x, gamma1, gamma2 }
    }

    /// The inner derivation `ad_γ` of a glued section (`X = 0`).
    pub fn inner(m: &ChartedManifold, gamma: &GluedSection) -> Self {
        let dim = m.ambient_dim();
        GluedDerivation {
            x: Arc::new(move |_| vec![0.0; dim]),
            gamma1: gamma.a1.clone(),
            gamma2: gamma.a2.clone(),
        }
    }

    /// Horizontal lift `∇_X`: `γ_i = A_i(X)`.
    pub fn horizontal_lift(conn: &LocalConnection, x: VecField) -> Self {
        let (a1, a2, x1, x2) = (conn.a1.clone(), conn.a2.clone(), x.clone(), x.clone());
        GluedDerivation {
            x,
            gamma1: Arc::new(move |p| a1(p, &x1(p))),
            gamma2: Arc::new(move |p| a2(p, &x2(p))),
        }
    }

    /// Random vector field `Σ_a f_a K_a` (Killing fields `K_a`, linear `f_a`)
    /// with random inner parts.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, m: &ChartedManifold, t: &TransitionData, scale: f64) -> Self {
        let x = random_vector_field(rng, m);
        GluedDerivation::random_with_field(rng, m, t, x, scale)
    }

    /// Random inner parts over a given vector field.
    pub fn random_with_field<R: Rng + ?Sized>(
        rng: &mut R,
        m: &ChartedManifold,
        t: &TransitionData,
        x: VecField,
        scale: f64,
    ) -> Self {
        let e1 = random_su_field(rng, m.ambient_dim(), t.n, scale).f;
        let e2 = random_su_field(rng, m.ambient_dim(), t.n, scale).f;
        GluedDerivation::glue(m, t, x, e1, e2)
    }

    /// Sum of two derivations.
    pub fn add(&self, other: &GluedDerivation) -> GluedDerivation {
        let (x, y) = (self.x.clone(), other.x.clone());
        let (a1, b1, a2, b2) = (self.gamma1.clone(), other.gamma1.clone(), self.gamma2.clone(), other.gamma2.clone());
        GluedDerivation {
            x: Arc::new(move |p| x(p).iter().zip(y(p)).map(|(u, v)| u + v).collect()),
            gamma1: Arc::new(move |p| a1(p) + b1(p)),
            gamma2: Arc::new(move |p| a2(p) + b2(p)),
        }
    }

    pub fn gamma(&self, chart: usize) -> &MatField {
        if chart == 1 {
            &self.gamma1
        } else {
            &self.gamma2
        }
    }

    /// `max ‖γ_2 − g⁻¹ γ_1 g − g⁻¹ (X·g)‖` over the overlap samples.
    pub fn gluing_residual(&self, m: &ChartedManifold, t: &TransitionData) -> f64 {
        m.max_over(
            |p| m.in_overlap(p),
            |p| {
                let gi = t.g_inv(p);
                let expected = &gi * (self.gamma1)(p) * t.g(p) + &gi * t.dg(p, &(self.x)(p));
                linalg::max_abs(&((self.gamma2)(p) - expected))
            },
        )
    }
}

/// Random tangent vector field `Σ_a (c_a + d_a · p) K_a`.
pub fn random_vector_field<R: Rng + ?Sized>(rng: &mut R, m: &ChartedManifold) -> VecField {
    let dim = m.ambient_dim();
    let killing = m.killing_fields();
    let coeffs: Vec<(f64, Vec<f64>)> = killing
        .iter()
        .map(|_| (rng.random_range(-1.0..1.0), (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()))
        .collect();
    Arc::new(move |p: &[f64]| {
        let mut v = vec![0.0; dim];
        for (k, (c0, lin)) in killing.iter().zip(&coeffs) {
            let f = c0 + lin.iter().zip(p).map(|(a, b)| a * b).sum::<f64>();
            for (vi, ki) in v.iter_mut().zip(k(p)) {
                *vi += f * ki;
            }
        }
        v
    })
}

impl LocalConnection {
    /// `A_1 = ψ_1 B_1 + ψ_2 (g B_2 g⁻¹ − dg g⁻¹)`,
    /// `A_2 = ψ_2 B_2 + ψ_1 (g⁻¹ B_1 g + g⁻¹ dg)`.
    pub fn glue(m: &ChartedManifold, t: &TransitionData, b1: FormField, b2: FormField) -> Self {
        let (m1, t1, b1a, b2a) = (m.clone(), *t, b1.clone(), b2.clone());
        let a1: FormField = Arc::new(move |p: &[f64], v: &[f64]| {
            let w2 = m1.psi(2, p);
            let mut out = b1a(p, v) * c(m1.psi(1, p), 0.0);
            if w2 > 0.0 {
                let (g, gi) = (t1.g(p), t1.g_inv(p));
                out += (&g * b2a(p, v) * &gi - t1.dg(p, v) * &gi) * c(w2, 0.0);
            }
            out
        });
        let (m2, t2) = (m.clone(), *t);
        let a2: FormField = Arc::new(move |p: &[f64], v: &[f64]| {
            let w1 = m2.psi(1, p);
            let mut out = b2(p, v) * c(m2.psi(2, p), 0.0);
            if w1 > 0.0 {
                let (g, gi) = (t2.g(p), t2.g_inv(p));
                out += (&gi * b1(p, v) * &g + &gi * t2.dg(p, v)) * c(w1, 0.0);
            }
            out
        });
        LocalConnection { a1, a2 }
    }

    /// The connection with zero local forms before gluing (only the
    /// transition terms survive).
    pub fn minimal(m: &ChartedManifold, t: &TransitionData) -> Self {
        let n = t.n;
        let zero: FormField = Arc::new(move |_, _| CMat::zeros(n, n));
        LocalConnection::glue(m, t, zero.clone(), zero)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, m: &ChartedManifold, t: &TransitionData, scale: f64) -> Self {
        let b1 = random_su_form(rng, m.ambient_dim(), t.n, scale);
        let b2 = random_su_form(rng, m.ambient_dim(), t.n, scale);
        LocalConnection::glue(m, t, b1, b2)
    }

    /// `A_i(p)(v)`.
    pub fn at(&self, chart: usize, p: &[f64], v: &[f64]) -> CMat {
        if chart == 1 {
            (self.a1)(p, v)
        } else {
            (self.a2)(p, v)
        }
    }

    pub fn form(&self, chart: usize) -> &FormField {
        if chart == 1 {
            &self.a1
        } else {
            &self.a2
        }
    }

    /// `max ‖A_2(K) − g⁻¹ A_1(K) g − g⁻¹ dg(K)‖` over overlap samples and
    /// Killing fields `K`.
    pub fn gluing_residual(&self, m: &ChartedManifold, t: &TransitionData) -> f64 {
        let killing = m.killing_fields();
        m.max_over(
            |p| m.in_overlap(p),
            |p| {
                let (g, gi) = (t.g(p), t.g_inv(p));
                killing
                    .iter()
                    .map(|k| {
                        let v = k(p);
                        let expected = &gi * (self.a1)(p, &v) * &g + &gi * t.dg(p, &v);
                        linalg::max_abs(&((self.a2)(p, &v) - expected))
                    })
                    .fold(0.0, f64::max)
            },
        )
    }
}
