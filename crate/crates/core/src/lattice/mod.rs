//! The trivial endomorphism algebra `C∞(T^d) ⊗ M_n` on a periodic lattice.
//!
//! A noncommutative connection splits along `Der = [vector fields] ⊕ [inner]`
//! into a gauge field `a_μ` (antihermitean, traceless) and Higgs fields `b_k`
//! (hermitean), one per basis derivation. Derivatives are central differences.

mod action;
mod gauge;
mod minimize;

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::LieBasis;
use crate::linalg::{self, CMat};

pub use action::{action_density, action_gradient, curvature_components, ymh_action, CurvatureComponents};
pub use gauge::gauge_transform_fields;
pub use minimize::{
    classify_vacuum, minimize, MinimizeOptions, MinimizeResult, TracePoint, VacuumClass,
    CLASSIFY_TOL,
};

/// A periodic cubic lattice with `N^d` sites and spacing `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub d: usize,
    pub sites_per_axis: usize,
    pub spacing: f64,
}

impl Lattice {
    pub fn new(d: usize, sites_per_axis: usize, spacing: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("lattice dimension must be positive"));
        }
        if sites_per_axis < 2 {
            return Err(Error::invalid("need at least 2 sites per axis"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid("lattice spacing must be positive"));
        }
        if (sites_per_axis as f64).powi(d as i32) > 1e7 {
            return Err(Error::Capacity("lattice has more than 10^7 sites".into()));
        }
        Ok(Lattice { d, sites_per_axis, spacing })
    }

    pub fn num_sites(&self) -> usize {
        self.sites_per_axis.pow(self.d as u32)
    }

    /// `(N h)^d`.
    pub fn volume(&self) -> f64 {
        (self.sites_per_axis as f64 * self.spacing).powi(self.d as i32)
    }

    /// Side length `N h`.
    pub fn length(&self) -> f64 {
        self.sites_per_axis as f64 * self.spacing
    }

    /// Integer coordinates of a site; axis 0 varies fastest.
    pub fn coords(&self, site: usize) -> Vec<usize> {
        let mut c = Vec::with_capacity(self.d);
        let mut s = site;
        for _ in 0..self.d {
            c.push(s % self.sites_per_axis);
            s /= self.sites_per_axis;
        }
        c
    }

    /// Physical position `h · coords`.
    pub fn position(&self, site: usize) -> Vec<f64> {
        self.coords(site).into_iter().map(|i| i as f64 * self.spacing).collect()
    }

    /// Neighbour one step forward (`forward = true`) or backward along `mu`.
    pub fn neighbor(&self, site: usize, mu: usize, forward: bool) -> usize {
        let n = self.sites_per_axis;
        let stride = n.pow(mu as u32);
        let i = (site / stride) % n;
        let j = if forward { (i + 1) % n } else { (i + n - 1) % n };
        site - i * stride + j * stride
    }
}

/// Gauge and Higgs fields on a lattice.
#[derive(Debug, Clone)]
pub struct FieldConfig {
    pub lattice: Lattice,
    pub basis: Arc<LieBasis>,
    /// `a[site][μ]`, antihermitean traceless.
    pub a: Vec<Vec<CMat>>,
    /// `b[site][k]`, hermitean.
    pub b: Vec<Vec<CMat>>,
    pub mass: f64,
}

impl FieldConfig {
    /// All fields zero.
    pub fn zeros(lattice: Lattice, basis: Arc<LieBasis>, mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::invalid("mass must be positive"));
        }
        let n = basis.n();
        let sites = lattice.num_sites();
        let a = vec![vec![CMat::zeros(n, n); lattice.d]; sites];
        let b = vec![vec![CMat::zeros(n, n); basis.dim()]; sites];
        Ok(FieldConfig { lattice, basis, a, b, mass })
    }

    /// Site-independent fields.
    pub fn constant(
        lattice: Lattice,
        basis: Arc<LieBasis>,
        mass: f64,
        a: &[CMat],
        b: &[CMat],
    ) -> Result<Self> {
        let mut f = FieldConfig::zeros(lattice, basis, mass)?;
        if a.len() != lattice.d || b.len() != f.basis.dim() {
            return Err(Error::invalid("wrong number of constant field components"));
        }
        for site in 0..lattice.num_sites() {
            f.a[site] = a.to_vec();
            f.b[site] = b.to_vec();
        }
        f.validate()?;
        Ok(f)
    }

    /// Fields given by functions of the physical position.
    pub fn from_fn(
        lattice: Lattice,
        basis: Arc<LieBasis>,
        mass: f64,
        a: impl Fn(&[f64], usize) -> CMat + Sync,
        b: impl Fn(&[f64], usize) -> CMat + Sync,
    ) -> Result<Self> {
        let mut f = FieldConfig::zeros(lattice, basis, mass)?;
        let dim = f.basis.dim();
        f.a.par_iter_mut().zip(f.b.par_iter_mut()).enumerate().for_each(|(site, (fa, fb))| {
            let x = lattice.position(site);
            for (mu, slot) in fa.iter_mut().enumerate() {
                *slot = a(&x, mu);
            }
            for (k, slot) in fb.iter_mut().enumerate().take(dim) {
                *slot = b(&x, k);
            }
        });
        f.validate()?;
        Ok(f)
    }

    /// Checks shapes, hermiticity of `b` and `a ∈ su(n)`.
    pub fn validate(&self) -> Result<()> {
        let n = self.basis.n();
        let sites = self.lattice.num_sites();
        if self.a.len() != sites || self.b.len() != sites {
            return Err(Error::invalid("field arrays do not match the lattice"));
        }
        for site in 0..sites {
            if self.a[site].len() != self.lattice.d || self.b[site].len() != self.basis.dim() {
                return Err(Error::invalid("wrong number of field components"));
            }
            for a in &self.a[site] {
                let tol = 1e-10 * linalg::max_abs(a).max(1.0);
                if a.shape() != (n, n)
                    || linalg::max_abs(&(a + a.adjoint())) > tol
                    || a.trace().norm() > tol
                {
                    return Err(Error::invalid("gauge field is not in su(n)"));
                }
            }
            for b in &self.b[site] {
                if b.shape() != (n, n) || !linalg::is_hermitean(b, 1e-10 * linalg::max_abs(b).max(1.0)) {
                    return Err(Error::invalid("Higgs field is not hermitean"));
                }
            }
        }
        Ok(())
    }

    /// Adds seeded Gaussian noise of the given amplitude, staying in the field
    /// spaces.
    pub fn add_noise<R: Rng + ?Sized>(&mut self, rng: &mut R, amp_a: f64, amp_b: f64) {
        let n = self.basis.n();
        for site in 0..self.lattice.num_sites() {
            for a in &mut self.a[site] {
                if amp_a > 0.0 {
                    *a += linalg::random_su(rng, n) * linalg::c(amp_a, 0.0);
                }
            }
            for b in &mut self.b[site] {
                if amp_b > 0.0 {
                    *b += linalg::random_hermitean(rng, n) * linalg::c(amp_b, 0.0);
                }
            }
        }
    }

    /// `f + t v`.
    pub fn step(&self, t: f64, v: &FieldTangent) -> FieldConfig {
        let z = linalg::c(t, 0.0);
        let mut out = self.clone();
        out.a.par_iter_mut().zip(&v.a).for_each(|(fa, va)| {
            for (x, y) in fa.iter_mut().zip(va) {
                *x += y * z;
            }
        });
        out.b.par_iter_mut().zip(&v.b).for_each(|(fb, vb)| {
            for (x, y) in fb.iter_mut().zip(vb) {
                *x += y * z;
            }
        });
        out
    }

    /// Site average of each `b_k`.
    pub fn mean_b(&self) -> Vec<CMat> {
        let n = self.basis.n();
        let sites = self.lattice.num_sites() as f64;
        (0..self.basis.dim())
            .map(|k| {
                let mut s = CMat::zeros(n, n);
                for site in &self.b {
                    s += &site[k];
                }
                s / linalg::c(sites, 0.0)
            })
            .collect()
    }
}

/// A tangent vector to the field space, shaped like a [`FieldConfig`].
#[derive(Debug, Clone)]
pub struct FieldTangent {
    pub a: Vec<Vec<CMat>>,
    pub b: Vec<Vec<CMat>>,
}

impl FieldTangent {
    /// Real inner product `Σ Re Tr(x^* y)` over all components.
    pub fn dot(&self, other: &FieldTangent) -> f64 {
        let pa: f64 = self
            .a
            .par_iter()
            .zip(&other.a)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| linalg::real_inner(p, q)).sum::<f64>())
            .collect::<Vec<_>>()
            .iter()
            .sum();
        let pb: f64 = self
            .b
            .par_iter()
            .zip(&other.b)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| linalg::real_inner(p, q)).sum::<f64>())
            .collect::<Vec<_>>()
            .iter()
            .sum();
        pa + pb
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Zeroes the gauge-field part.
    pub fn without_a(mut self) -> FieldTangent {
        for site in &mut self.a {
            for x in site {
                x.fill(linalg::ZERO);
            }
        }
        self
    }

    /// A random tangent vector (antihermitean traceless `a`, hermitean `b`).
    pub fn random<R: Rng + ?Sized>(rng: &mut R, f: &FieldConfig) -> FieldTangent {
        let n = f.basis.n();
        let a = f.a.iter().map(|s| s.iter().map(|_| linalg::random_su(rng, n)).collect()).collect();
        let b = f.b.iter().map(|s| s.iter().map(|_| linalg::random_hermitean(rng, n)).collect()).collect();
        FieldTangent { a, b }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neighbours_wrap_around() {
        let l = Lattice::new(2, 4, 0.5).unwrap();
        assert_eq!(l.neighbor(3, 0, true), 0);
        assert_eq!(l.neighbor(0, 1, false), 12);
        assert_eq!(l.coords(13), vec![1, 3]);
        assert!((l.volume() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_lattices_rejected() {
        assert!(Lattice::new(0, 4, 1.0).is_err());
        assert!(Lattice::new(2, 1, 1.0).is_err());
        assert!(Lattice::new(2, 4, -1.0).is_err());
    }
}
