//! Endomorphism algebras of nontrivial `SU(n)` bundles in a two-chart model.
//!
//! The base is a circle in `R²` or a 2-sphere in `R³`. Every field is a closure
//! on the ambient space, so derivatives along tangent vector fields are plain
//! directional derivatives. Chart 1 is `{h > −s}` and chart 2 is `{h < s}`
//! for a height coordinate `h` (`x` on the circle, `z` on the sphere); they
//! overlap in the band `|h| < s`.

mod alpha;
mod check;
mod fields;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

pub use alpha::{
    alpha_eval, gauge_transform_alpha, global_curvature, global_curvature_with_tolerance, infinitesimal_gauge, local_curvature,
    ALGEBRAIC_TOL,
    FD_TOL,
};
pub use check::{bundle_check, BundleCheckOptions, BundleReport};
pub use fields::{random_vector_field, GluedDerivation, GluedSection, LocalConnection};

/// A matrix-valued function on the ambient space.
pub type MatField = Arc<dyn Fn(&[f64]) -> CMat + Send + Sync>;
/// A matrix-valued 1-form: `(point, vector) ↦ matrix`, linear in the vector.
pub type FormField = Arc<dyn Fn(&[f64], &[f64]) -> CMat + Send + Sync>;
/// A vector field on the ambient space, tangent to the base.
pub type VecField = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Step of the five-point difference stencil.
pub const FD_STEP: f64 = 1.25e-4;

/// Derivative of `f` at `p` along `v` (fourth-order central stencil).
pub fn directional(f: &dyn Fn(&[f64]) -> CMat, p: &[f64], v: &[f64]) -> CMat {
    let at = |t: f64| -> CMat {
        let q: Vec<f64> = p.iter().zip(v).map(|(a, b)| a + t * b).collect();
        f(&q)
    };
    let h = FD_STEP;
    (at(-2.0 * h) - at(-h) * linalg::c(8.0, 0.0) + at(h) * linalg::c(8.0, 0.0) - at(2.0 * h))
        / linalg::c(12.0 * h, 0.0)
}

/// Lie bracket `[X, Y]` of two vector fields at `p`.
pub fn vector_bracket(x: &VecField, y: &VecField, p: &[f64]) -> Vec<f64> {
    let h = FD_STEP;
    let deriv = |f: &VecField, v: &[f64]| -> Vec<f64> {
        let at = |t: f64| -> Vec<f64> {
            let q: Vec<f64> = p.iter().zip(v).map(|(a, b)| a + t * b).collect();
            f(&q)
        };
        let (m2, m1, p1, p2) = (at(-2.0 * h), at(-h), at(h), at(2.0 * h));
        (0..p.len()).map(|j| (m2[j] - 8.0 * m1[j] + 8.0 * p1[j] - p2[j]) / (12.0 * h)).collect()
    };
    let xp = x(p);
    let yp = y(p);
    let dy = deriv(y, &xp);
    let dx = deriv(x, &yp);
    dy.iter().zip(&dx).map(|(a, b)| a - b).collect()
}

/// The built-in bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Instance {
    Circle,
    Sphere,
}

/// Smooth step: 0 for `t ≤ 0`, 1 for `t ≥ 1`, `C^∞` in between.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// Derivative of [`smooth_step`].
fn smooth_step_derivative(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a * b * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / ((a + b) * (a + b))
}

/// A base manifold covered by two charts, with sample points.
#[derive(Debug, Clone)]
pub struct ChartedManifold {
    instance: Instance,
    /// Half-width `s` of the overlap band.
    overlap: f64,
    /// Half-width of the band where the partition of unity varies (`< s`).
    blend: f64,
    samples: Vec<Vec<f64>>,
}

impl ChartedManifold {
    /// Builds an instance with roughly `samples` sample points.
    pub fn new(instance: Instance, samples: usize) -> Result<Self> {
        if samples < 8 {
            return Err(Error::invalid("need at least 8 sample points"));
        }
        if samples > 100_000 {
            return Err(Error::Capacity("more than 100000 sample points".into()));
        }
        let (overlap, blend) = (0.3, 0.2);
        let pts = match instance {
            Instance::Circle => (0..samples)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / samples as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect(),
            Instance::Sphere => {
                // Fibonacci lattice plus rings inside the overlap band.
                let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
                let mut pts: Vec<Vec<f64>> = (0..samples)
                    .map(|i| {
                        let z = 1.0 - 2.0 * (i as f64 + 0.5) / samples as f64;
                        let r = (1.0 - z * z).sqrt();
                        let phi = golden * i as f64;
                        vec![r * phi.cos(), r * phi.sin(), z]
                    })
                    .collect();
                let ring = (samples / 8).max(8);
                for z in [-0.25, -0.1, 0.0, 0.1, 0.25] {
                    let r: f64 = (1.0f64 - z * z).sqrt();
                    for j in 0..ring {
                        let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.25) / ring as f64;
                        pts.push(vec![r * phi.cos(), r * phi.sin(), z]);
                    }
                }
                pts
            }
        };
        Ok(ChartedManifold { instance, overlap, blend, samples: pts })
    }

    pub fn instance(&self) -> Instance {
        self.instance
    }

    /// Dimension of the ambient space.
    pub fn ambient_dim(&self) -> usize {
        match self.instance {
            Instance::Circle => 2,
            Instance::Sphere => 3,
        }
    }

    /// Dimension of the base manifold.
    pub fn base_dim(&self) -> usize {
        self.ambient_dim() - 1
    }

    fn height(&self, p: &[f64]) -> f64 {
        match self.instance {
            Instance::Circle => p[0],
            Instance::Sphere => p[2],
        }
    }

    pub fn in_chart(&self, chart: usize, p: &[f64]) -> bool {
        let h = self.height(p);
        if chart == 1 {
            h > -self.overlap
        } else {
            h < self.overlap
        }
    }

    pub fn in_overlap(&self, p: &[f64]) -> bool {
        self.height(p).abs() < self.overlap
    }

    /// Partition of unity `ψ_1 + ψ_2 = 1` subordinate to the two charts.
    pub fn psi(&self, chart: usize, p: &[f64]) -> f64 {
        let s1 = smooth_step((self.height(p) + self.blend) / (2.0 * self.blend));
        if chart == 1 {
            s1
        } else {
            1.0 - s1
        }
    }

    /// `dψ_chart(p)(v)`.
    pub fn dpsi(&self, chart: usize, p: &[f64], v: &[f64]) -> f64 {
        let dh = match self.instance {
            Instance::Circle => v[0],
            Instance::Sphere => v[2],
        };
        let d1 = smooth_step_derivative((self.height(p) + self.blend) / (2.0 * self.blend)) * dh / (2.0 * self.blend);
        if chart == 1 {
            d1
        } else {
            -d1
        }
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    /// Indices of the samples lying in a chart.
    pub fn chart_samples(&self, chart: usize) -> Vec<usize> {
        (0..self.samples.len()).filter(|&i| self.in_chart(chart, &self.samples[i])).collect()
    }

    /// Overlap identification: pairs `(i, j)` of positions in the chart-1 and
    /// chart-2 sample lists that denote the same point.
    pub fn overlap_map(&self) -> Vec<(usize, usize)> {
        let c1 = self.chart_samples(1);
        let c2 = self.chart_samples(2);
        c1.iter()
            .enumerate()
            .filter(|(_, &s)| self.in_overlap(&self.samples[s]))
            .map(|(i, &s)| (i, c2.iter().position(|&t| t == s).expect("overlap sample in chart 2")))
            .collect()
    }

    pub fn overlap_samples(&self) -> Vec<&[f64]> {
        self.samples.iter().filter(|p| self.in_overlap(p)).map(|p| p.as_slice()).collect()
    }

    /// Killing vector fields spanning every tangent space.
    pub fn killing_fields(&self) -> Vec<VecField> {
        match self.instance {
            Instance::Circle => vec![Arc::new(|p: &[f64]| vec![-p[1], p[0]])],
            Instance::Sphere => vec![
                Arc::new(|p: &[f64]| vec![0.0, -p[2], p[1]]),
                Arc::new(|p: &[f64]| vec![p[2], 0.0, -p[0]]),
                Arc::new(|p: &[f64]| vec![-p[1], p[0], 0.0]),
            ],
        }
    }

    /// Largest value of `f` over the samples selected by `select`.
    pub(crate) fn max_over(&self, select: impl Fn(&[f64]) -> bool + Sync, f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
        self.samples
            .par_iter()
            .filter(|p| select(p))
            .map(|p| f(p))
            .reduce(|| 0.0, f64::max)
    }
}

/// Transition function `g_12 = exp(i k H φ)` on the overlap, with
/// `H = diag(1, −1, 0, …)` and `φ` the azimuth in the `xy` plane.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TransitionData {
    pub n: usize,
    pub charge: f64,
}

impl TransitionData {
    pub fn new(manifold: &ChartedManifold, n: usize, charge: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("bundle rank must be at least 2"));
        }
        if !charge.is_finite() {
            return Err(Error::invalid("charge must be finite"));
        }
        // The azimuth jumps by 2π inside the sphere's overlap band.
        if manifold.instance == Instance::Sphere && charge.fract() != 0.0 {
            return Err(Error::invalid("the sphere needs an integer transition charge"));
        }
        Ok(TransitionData { n, charge })
    }

    fn phase(&self, p: &[f64]) -> f64 {
        self.charge * p[1].atan2(p[0])
    }

    /// `g_12(p)`.
    pub fn g(&self, p: &[f64]) -> CMat {
        let w = self.phase(p);
        let mut g = linalg::identity(self.n);
        g[(0, 0)] = linalg::c(w.cos(), w.sin());
        g[(1, 1)] = linalg::c(w.cos(), -w.sin());
        g
    }

    pub fn g_inv(&self, p: &[f64]) -> CMat {
        self.g(p).adjoint()
    }

    /// `dg_12(v) = i k H dφ(v) g_12`, exact.
    pub fn dg(&self, p: &[f64], v: &[f64]) -> CMat {
        let r2 = p[0] * p[0] + p[1] * p[1];
        let dphi = (p[0] * v[1] - p[1] * v[0]) / r2;
        let mut h = CMat::zeros(self.n, self.n);
        h[(0, 0)] = linalg::c(0.0, self.charge * dphi);
        h[(1, 1)] = linalg::c(0.0, -self.charge * dphi);
        h * self.g(p)
    }

    /// Largest deviation from `SU(n)` over the overlap samples.
    pub fn unitarity_residual(&self, m: &ChartedManifold) -> f64 {
        m.max_over(
            |p| m.in_overlap(p),
            |p| {
                let g = self.g(p);
                let u = linalg::max_abs(&(g.adjoint() * &g - linalg::identity(self.n)));
                u.max((g.determinant() - linalg::ONE).norm())
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_map_is_a_bijection() {
        for inst in [Instance::Circle, Instance::Sphere] {
            let m = ChartedManifold::new(inst, 120).unwrap();
            let map = m.overlap_map();
            assert_eq!(map.len(), m.overlap_samples().len());
            assert!(!map.is_empty());
            let mut seconds: Vec<usize> = map.iter().map(|x| x.1).collect();
            seconds.sort_unstable();
            seconds.dedup();
            assert_eq!(seconds.len(), map.len());
        }
    }

    #[test]
    fn partition_of_unity_is_subordinate() {
        let m = ChartedManifold::new(Instance::Sphere, 200).unwrap();
        for p in m.samples() {
            let (a, b) = (m.psi(1, p), m.psi(2, p));
            assert!((a + b - 1.0).abs() < 1e-15);
            if a > 0.0 {
                assert!(m.in_chart(1, p));
            }
            if b > 0.0 {
                assert!(m.in_chart(2, p));
            }
        }
    }

    #[test]
    fn analytic_transition_derivative_matches_differences() {
        let m = ChartedManifold::new(Instance::Sphere, 100).unwrap();
        let t = TransitionData::new(&m, 2, 1.0).unwrap();
        let k = m.killing_fields();
        for p in m.overlap_samples() {
            for x in &k {
                let v = x(p);
                let fd = directional(&|q: &[f64]| t.g(q), p, &v);
                assert!(linalg::max_abs(&(fd - t.dg(p, &v))) < 1e-10);
            }
        }
        assert!(t.unitarity_residual(&m) < 1e-14);
    }
}
