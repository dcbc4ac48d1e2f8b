//! Seeded consistency sweep over random connections and derivations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fields::{random_vector_field, GluedDerivation, GluedSection, LocalConnection};
use super::{alpha_eval, gauge_transform_alpha, global_curvature, global_curvature_with_tolerance};
use super::{ChartedManifold, Instance, TransitionData};
use super::{ALGEBRAIC_TOL, FD_TOL};
use crate::error::Result;
use crate::linalg;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleCheckOptions {
    pub instance: Instance,
    pub n: usize,
    pub charge: f64,
    pub samples: usize,
    /// Number of random (connection, derivation) pairs for the gluing test.
    pub pairs: usize,
    /// Number of those pairs also used for the curvature tests.
    pub curvature_pairs: usize,
    pub scale: f64,
    pub seed: u64,
}

impl BundleCheckOptions {
    pub fn new(instance: Instance) -> Self {
        BundleCheckOptions { instance, n: 2, charge: 1.0, samples: 120, pairs: 100, curvature_pairs: 10, scale: 0.5, seed: 0xC0FFEE }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BundleReport {
    pub options: BundleCheckOptions,
    pub transition_unitarity: f64,
    /// Worst gluing defect of `α(𝔛)` over all pairs.
    pub alpha_gluing_residual: f64,
    pub alpha_gluing_tolerance: f64,
    /// Worst change of `Ω(𝔛, 𝔜)` when the inner parts of `𝔛` are replaced.
    pub horizontality_residual: f64,
    pub horizontality_tolerance: f64,
    /// Worst `‖Ω^u − u^* Ω u‖` for a random glued gauge transformation `u`.
    pub gauge_covariance_residual: f64,
    pub gauge_covariance_tolerance: f64,
    pub passed: bool,
}

/// Runs the gluing, horizontality and gauge-covariance checks.
pub fn bundle_check(opts: &BundleCheckOptions) -> Result<BundleReport> {
    let m = ChartedManifold::new(opts.instance, opts.samples)?;
    let t = TransitionData::new(&m, opts.n, opts.charge)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut alpha_gluing_residual = 0.0f64;
    let mut horizontality_residual = 0.0f64;
    let mut gauge_covariance_residual = 0.0f64;
    for pair in 0..opts.pairs {
        let conn = LocalConnection::random(&mut rng, &m, &t, opts.scale);
        let x = random_vector_field(&mut rng, &m);
        let d1 = GluedDerivation::random_with_field(&mut rng, &m, &t, x.clone(), opts.scale);
        alpha_gluing_residual = alpha_gluing_residual.max(alpha_eval(&m, &t, &conn, &d1)?.gluing_residual(&m, &t));
        if pair >= opts.curvature_pairs {
            continue;
        }
        let d1b = GluedDerivation::random_with_field(&mut rng, &m, &t, x, opts.scale);
        let d2 = GluedDerivation::random(&mut rng, &m, &t, opts.scale);
        let om = global_curvature(&m, &t, &conn, &d1, &d2)?;
        let omb = global_curvature(&m, &t, &conn, &d1b, &d2)?;
        let u = GluedSection::random_polynomial(&mut rng, &m, &t, opts.scale)?.exp();
        let conn_u = gauge_transform_alpha(&m, &t, &u, &conn)?;
        let om_u = global_curvature_with_tolerance(&m, &t, &conn_u, &d1, &d2, FD_TOL)?;
        for chart in [1, 2] {
            horizontality_residual = horizontality_residual.max(m.max_over(
                |p| m.in_chart(chart, p),
                |p| linalg::max_abs(&(om.at(chart, p) - omb.at(chart, p))),
            ));
            gauge_covariance_residual = gauge_covariance_residual.max(m.max_over(
                |p| m.in_chart(chart, p),
                |p| {
                    let uu = u.at(chart, p);
                    linalg::max_abs(&(om_u.at(chart, p) - uu.adjoint() * om.at(chart, p) * &uu))
                },
            ));
        }
    }
    let passed = alpha_gluing_residual <= ALGEBRAIC_TOL
        && horizontality_residual <= ALGEBRAIC_TOL
        && gauge_covariance_residual <= FD_TOL;
    Ok(BundleReport {
        options: opts.clone(),
        transition_unitarity: t.unitarity_residual(&m),
        alpha_gluing_residual,
        alpha_gluing_tolerance: ALGEBRAIC_TOL,
        horizontality_residual,
        horizontality_tolerance: ALGEBRAIC_TOL,
        gauge_covariance_residual,
        gauge_covariance_tolerance: FD_TOL,
        passed,
    })
}
