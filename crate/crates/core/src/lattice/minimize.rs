//! Vacuum search by gradient descent with Armijo backtracking, and
//! classification of the limiting Higgs field as a representation.

use serde::Serialize;

use super::{action_gradient, ymh_action, FieldConfig};
use crate::error::Result;
use crate::lie::{self, LieBasis, LieRep};
use crate::linalg::{self, CMat};
use std::sync::Arc;

/// Tolerance for classifying the site-averaged Higgs field. Averaging over
/// sites that converged to slightly different conjugates of one vacuum leaves
/// a second-order defect, so this is much looser than the algebraic checks.
pub const CLASSIFY_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct MinimizeOptions {
    pub max_steps: usize,
    /// Freeze the gauge field and descend in `b` only.
    pub b_only: bool,
    /// Stop once the action is at or below this value.
    pub action_tol: f64,
    /// Stop once the gradient norm is at or below this value.
    pub grad_tol: f64,
    /// Sufficient-decrease constant of the Armijo rule.
    pub armijo: f64,
    pub initial_step: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_steps: 5000,
            b_only: false,
            action_tol: 1e-12,
            grad_tol: 1e-13,
            armijo: 1e-4,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TracePoint {
    pub step: usize,
    pub action: f64,
    pub gradient_norm: f64,
}

/// Equivalence class of a Higgs vacuum as a representation on `C^n`.
#[derive(Debug, Clone, Serialize)]
pub struct VacuumClass {
    /// `trivial`, `spin-1/2`, `defining`, `dual`, `unclassified` or
    /// `not-a-representation`.
    pub label: String,
    /// Closure defect `max ‖[b_k, b_l] − C^m_{kl} b_m‖` of the classified field.
    pub closure_residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub config: FieldConfig,
    pub trace: Vec<TracePoint>,
    pub converged: bool,
    pub final_action: f64,
    pub gradient_norm: f64,
    pub class: VacuumClass,
}

fn candidates(basis: &Arc<LieBasis>) -> Result<Vec<(&'static str, LieRep)>> {
    let n = basis.n();
    let mut out = vec![("trivial", LieRep::new(basis.clone(), vec![CMat::zeros(n, n); basis.dim()])?)];
    let defining = LieRep::new(basis.clone(), basis.elements().to_vec())?;
    if n == 2 {
        out.push(("spin-1/2", defining));
    } else {
        out.push(("defining", defining));
        let dual = basis.elements().iter().map(|e| -e.transpose()).collect();
        out.push(("dual", LieRep::new(basis.clone(), dual)?));
    }
    Ok(out)
}

/// Classifies constant Higgs data `b_k` against the trivial, defining and
/// (for `n ≥ 3`) dual representations.
pub fn classify_vacuum(basis: &Arc<LieBasis>, b: &[CMat], tol: f64) -> Result<VacuumClass> {
    let rep = LieRep::new(basis.clone(), b.to_vec())?;
    let closure_residual = rep.closure_residual();
    let scale = b.iter().map(linalg::max_abs).fold(1.0, f64::max);
    if closure_residual > tol * scale {
        return Ok(VacuumClass { label: "not-a-representation".into(), closure_residual, tolerance: tol });
    }
    for (label, cand) in candidates(basis)? {
        if lie::reps_equivalent_with_tol(&rep, &cand, tol)?.equivalent {
            return Ok(VacuumClass { label: label.into(), closure_residual, tolerance: tol });
        }
    }
    Ok(VacuumClass { label: "unclassified".into(), closure_residual, tolerance: tol })
}

/// Gradient descent with backtracking. The recorded action is nonincreasing.
pub fn minimize(f0: &FieldConfig, opts: &MinimizeOptions) -> Result<MinimizeResult> {
    let mut f = f0.clone();
    let mut s = ymh_action(&f);
    let mut alpha = opts.initial_step;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut gn;
    let mut step = 0;
    loop {
        let mut g = action_gradient(&f);
        if opts.b_only {
            g = g.without_a();
        }
        gn = g.norm();
        trace.push(TracePoint { step, action: s, gradient_norm: gn });
        if s <= opts.action_tol || gn <= opts.grad_tol {
            converged = true;
            break;
        }
        if step >= opts.max_steps {
            break;
        }
        let mut accepted = false;
        while alpha > 1e-20 {
            let cand = f.step(-alpha, &g);
            let sc = ymh_action(&cand);
            if sc <= s - opts.armijo * alpha * gn * gn {
                f = cand;
                s = sc;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
        alpha *= 2.0;
        step += 1;
    }
    let class = classify_vacuum(&f.basis, &f.mean_b(), CLASSIFY_TOL)?;
    Ok(MinimizeResult { config: f, trace, converged, final_action: s, gradient_norm: gn, class })
}
