//! The noncommutative 1-form `α` of a connection, its curvature and gauge
//! transformations.
//!
//! On a derivation `𝔛 = X + ad_{γ_i}` the local value is
//! `α_i(𝔛) = A_i(X) − γ_i`. The inhomogeneous gluing terms of `A_i` and `γ_i`
//! coincide, so `α(𝔛)` is a global section.

use std::sync::Arc;

use super::fields::{GluedDerivation, GluedSection, LocalConnection};
use super::{directional, vector_bracket, ChartedManifold, FormField, MatField, TransitionData};
use crate::error::{Error, Result};
use crate::linalg::{self, commutator, CMat};

/// Threshold for identities that hold exactly up to rounding.
pub const ALGEBRAIC_TOL: f64 = 1e-10;
/// Threshold for identities limited by finite differences.
pub const FD_TOL: f64 = 1e-8;

fn require(what: &str, residual: f64, tolerance: f64) -> Result<()> {
    if residual > tolerance {
        return Err(Error::GluingViolation { what: what.into(), residual, tolerance });
    }
    Ok(())
}

fn alpha_field(conn: &LocalConnection, d: &GluedDerivation, chart: usize) -> MatField {
    let a = conn.form(chart).clone();
    let g = d.gamma(chart).clone();
    let x = d.x.clone();
    Arc::new(move |p| a(p, &x(p)) - g(p))
}

/// `α(𝔛)` in both trivialisations.
pub fn alpha_eval(
    m: &ChartedManifold,
    t: &TransitionData,
    conn: &LocalConnection,
    d: &GluedDerivation,
) -> Result<GluedSection> {
    require("local connection", conn.gluing_residual(m, t), ALGEBRAIC_TOL)?;
    require("derivation", d.gluing_residual(m, t), ALGEBRAIC_TOL)?;
    Ok(GluedSection::new(alpha_field(conn, d, 1), alpha_field(conn, d, 2)))
}

/// `𝔛(a) = X·a + [γ, a]` in one chart.
fn act(d: &GluedDerivation, chart: usize, a: &MatField, p: &[f64]) -> CMat {
    directional(a.as_ref(), p, &(d.x)(p)) + commutator(&d.gamma(chart)(p), &a(p))
}

/// Inner part of `[𝔛, 𝔜]`: `X·γ_Y − Y·γ_X + [γ_X, γ_Y]`.
fn bracket_gamma(d1: &GluedDerivation, d2: &GluedDerivation, chart: usize, p: &[f64]) -> CMat {
    let (g1, g2) = (d1.gamma(chart), d2.gamma(chart));
    directional(g2.as_ref(), p, &(d1.x)(p)) - directional(g1.as_ref(), p, &(d2.x)(p))
        + commutator(&g1(p), &g2(p))
}

/// `Ω(𝔛, 𝔜) = d̂α(𝔛, 𝔜) + [α(𝔛), α(𝔜)]`, with `d̂α` from the Koszul formula
/// on derivations. The result depends only on `X` and `Y`.
pub fn global_curvature(
    m: &ChartedManifold,
    t: &TransitionData,
    conn: &LocalConnection,
    d1: &GluedDerivation,
    d2: &GluedDerivation,
) -> Result<GluedSection> {
    global_curvature_with_tolerance(m, t, conn, d1, d2, ALGEBRAIC_TOL)
}

/// [`global_curvature`] accepting connections that glue only to `conn_tol`,
/// such as the finite-difference output of [`gauge_transform_alpha`].
pub fn global_curvature_with_tolerance(
    m: &ChartedManifold,
    t: &TransitionData,
    conn: &LocalConnection,
    d1: &GluedDerivation,
    d2: &GluedDerivation,
    conn_tol: f64,
) -> Result<GluedSection> {
    require("local connection", conn.gluing_residual(m, t), conn_tol)?;
    require("first derivation", d1.gluing_residual(m, t), ALGEBRAIC_TOL)?;
    require("second derivation", d2.gluing_residual(m, t), ALGEBRAIC_TOL)?;
    let chart_value = |chart: usize| -> MatField {
        let (conn, d1, d2) = (conn.clone(), d1.clone(), d2.clone());
        Arc::new(move |p: &[f64]| {
            let al1 = alpha_field(&conn, &d1, chart);
            let al2 = alpha_field(&conn, &d2, chart);
            let a = conn.form(chart);
            let xy = vector_bracket(&d1.x, &d2.x, p);
            let alpha_bracket = a(p, &xy) - bracket_gamma(&d1, &d2, chart, p);
            act(&d1, chart, &al2, p) - act(&d2, chart, &al1, p) - alpha_bracket
                + commutator(&al1(p), &al2(p))
        })
    };
    Ok(GluedSection::new(chart_value(1), chart_value(2)))
}

/// Local curvature `F_i(X, Y) = dA_i(X, Y) + [A_i(X), A_i(Y)]` of the base
/// vector fields alone.
pub fn local_curvature(conn: &LocalConnection, d1: &GluedDerivation, d2: &GluedDerivation) -> GluedSection {
    let value = |chart: usize| -> MatField {
        let a = conn.form(chart).clone();
        let (x, y) = (d1.x.clone(), d2.x.clone());
        Arc::new(move |p: &[f64]| {
            let ay: MatField = {
                let (a, y) = (a.clone(), y.clone());
                Arc::new(move |q: &[f64]| a(q, &y(q)))
            };
            let ax: MatField = {
                let (a, x) = (a.clone(), x.clone());
                Arc::new(move |q: &[f64]| a(q, &x(q)))
            };
            let xy = vector_bracket(&x, &y, p);
            directional(ay.as_ref(), p, &x(p)) - directional(ax.as_ref(), p, &y(p)) - a(p, &xy)
                + commutator(&ax(p), &ay(p))
        })
    };
    GluedSection::new(value(1), value(2))
}

/// `A_i ↦ u_i^* A_i u_i + u_i^* du_i` for a glued special-unitary section `u`.
/// With exact derivatives of `u` the result glues to rounding; otherwise the
/// finite-difference derivative limits the gluing to about `FD_TOL`.
pub fn gauge_transform_alpha(
    m: &ChartedManifold,
    t: &TransitionData,
    u: &GluedSection,
    conn: &LocalConnection,
) -> Result<LocalConnection> {
    let n = t.n;
    for chart in [1, 2] {
        let worst = m.max_over(
            |p| m.in_chart(chart, p),
            |p| {
                let v = u.at(chart, p);
                let unit = linalg::max_abs(&(v.adjoint() * &v - linalg::identity(n)));
                unit.max((v.determinant() - linalg::ONE).norm())
            },
        );
        if worst > ALGEBRAIC_TOL {
            return Err(Error::invalid(format!("gauge section is not special unitary (defect {worst:.3e})")));
        }
    }
    require("gauge section", u.gluing_residual(m, t), ALGEBRAIC_TOL)?;
    let value = |chart: usize| -> FormField {
        let a = conn.form(chart).clone();
        let u = u.clone();
        Arc::new(move |p: &[f64], v: &[f64]| {
            let uu = u.at(chart, p);
            let ud = uu.adjoint();
            &ud * a(p, v) * &uu + &ud * u.derivative(chart, p, v)
        })
    };
    Ok(LocalConnection { a1: value(1), a2: value(2) })
}

/// The infinitesimal gauge variation `L_{ad_ξ} α = −d̂ξ − [α, ξ]`, as local
/// 1-forms `δA_i(v) = −v·ξ_i − [A_i(v), ξ_i]` (the first-order part of the
/// transformation by `exp(−ξ)`).
pub fn infinitesimal_gauge(conn: &LocalConnection, xi: &GluedSection) -> [FormField; 2] {
    let value = |chart: usize| -> FormField {
        let a = conn.form(chart).clone();
        let x = if chart == 1 { xi.a1.clone() } else { xi.a2.clone() };
        Arc::new(move |p: &[f64], v: &[f64]| -directional(x.as_ref(), p, v) - commutator(&a(p, v), &x(p)))
    };
    [value(1), value(2)]
}
