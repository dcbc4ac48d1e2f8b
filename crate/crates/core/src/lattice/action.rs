//! Curvature components, the Yang-Mills-Higgs action and its gradient.

use rayon::prelude::*;

use super::{FieldConfig, FieldTangent};
use crate::linalg::{self, c, commutator, CMat};

/// Per-site blocks of the curvature 2-form.
#[derive(Debug, Clone)]
pub struct CurvatureComponents {
    /// `f[site][μ d + ν] = ∂_μ a_ν − ∂_ν a_μ + [a_μ, a_ν]`.
    pub f: Vec<Vec<CMat>>,
    /// `db[site][μ dim + k] = ∂_μ b_k + [a_μ, b_k]`.
    pub db: Vec<Vec<CMat>>,
    /// `v[site][k dim + l] = [b_k, b_l] − C^m_{kl} b_m`.
    pub v: Vec<Vec<CMat>>,
}

impl CurvatureComponents {
    /// Largest entry over all three blocks.
    pub fn max_abs(&self) -> f64 {
        [&self.f, &self.db, &self.v]
            .iter()
            .flat_map(|blk| blk.iter().flatten())
            .map(linalg::max_abs)
            .fold(0.0, f64::max)
    }
}

/// Central difference of a site field along `mu`.
fn central<T: Fn(usize) -> CMat>(f: &FieldConfig, site: usize, mu: usize, field: T) -> CMat {
    let fw = f.lattice.neighbor(site, mu, true);
    let bw = f.lattice.neighbor(site, mu, false);
    (field(fw) - field(bw)) / c(2.0 * f.lattice.spacing, 0.0)
}

pub fn curvature_components(f: &FieldConfig) -> CurvatureComponents {
    let d = f.lattice.d;
    let dim = f.basis.dim();
    let n = f.basis.n();
    let sites = f.lattice.num_sites();
    let per_site: Vec<(Vec<CMat>, Vec<CMat>, Vec<CMat>)> = (0..sites)
        .into_par_iter()
        .map(|s| {
            let mut fs = vec![CMat::zeros(n, n); d * d];
            for mu in 0..d {
                for nu in mu + 1..d {
                    let v = central(f, s, mu, |t| f.a[t][nu].clone())
                        - central(f, s, nu, |t| f.a[t][mu].clone())
                        + commutator(&f.a[s][mu], &f.a[s][nu]);
                    fs[nu * d + mu] = -&v;
                    fs[mu * d + nu] = v;
                }
            }
            let mut dbs = Vec::with_capacity(d * dim);
            for mu in 0..d {
                for k in 0..dim {
                    dbs.push(central(f, s, mu, |t| f.b[t][k].clone()) + commutator(&f.a[s][mu], &f.b[s][k]));
                }
            }
            let mut vs = vec![CMat::zeros(n, n); dim * dim];
            for k in 0..dim {
                for l in k + 1..dim {
                    let v = commutator(&f.b[s][k], &f.b[s][l]) - f.basis.contract(k, l, &f.b[s]);
                    vs[l * dim + k] = -&v;
                    vs[k * dim + l] = v;
                }
            }
            (fs, dbs, vs)
        })
        .collect();
    let mut out = CurvatureComponents {
        f: Vec::with_capacity(sites),
        db: Vec::with_capacity(sites),
        v: Vec::with_capacity(sites),
    };
    for (fs, dbs, vs) in per_site {
        out.f.push(fs);
        out.db.push(dbs);
        out.v.push(vs);
    }
    out
}

fn sq(x: &CMat) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Density `¼ Σ ‖F_μν‖² + m² Σ ‖D_μ b_k‖² + ¼ m⁴ Σ ‖V_kl‖²` at one site, with
/// `‖X‖² = Tr(X X^*)`.
pub fn action_density(curv: &CurvatureComponents, site: usize, mass: f64) -> f64 {
    let m2 = mass * mass;
    let f: f64 = curv.f[site].iter().map(sq).sum();
    let db: f64 = curv.db[site].iter().map(sq).sum();
    let v: f64 = curv.v[site].iter().map(sq).sum();
    0.25 * f + m2 * db + 0.25 * m2 * m2 * v
}

/// Riemann sum `h^d Σ_sites density`.
pub fn ymh_action(f: &FieldConfig) -> f64 {
    let curv = curvature_components(f);
    let hd = f.lattice.spacing.powi(f.lattice.d as i32);
    let total: f64 = (0..f.lattice.num_sites())
        .into_par_iter()
        .map(|s| action_density(&curv, s, f.mass))
        .collect::<Vec<_>>()
        .iter()
        .sum();
    hd * total
}

/// Gradient of [`ymh_action`] with respect to the real coordinates of the
/// fields: the `a` part lies in `su(n)`, the `b` part is hermitean.
pub fn action_gradient(f: &FieldConfig) -> FieldTangent {
    let curv = curvature_components(f);
    let d = f.lattice.d;
    let dim = f.basis.dim();
    let n = f.basis.n();
    let hd = f.lattice.spacing.powi(d as i32);
    let m2 = f.mass * f.mass;
    let basis = &f.basis;
    let sites = f.lattice.num_sites();
    // Adjoints used below: ad_A has adjoint ad_{A^*}, central ∂ has adjoint −∂.
    let (ga, gb): (Vec<Vec<CMat>>, Vec<Vec<CMat>>) = (0..sites)
        .into_par_iter()
        .map(|s| {
            let mut ga = Vec::with_capacity(d);
            for nu in 0..d {
                let mut g = CMat::zeros(n, n);
                for mu in 0..d {
                    g -= central(f, s, mu, |t| curv.f[t][mu * d + nu].clone());
                    g += commutator(&f.a[s][mu].adjoint(), &curv.f[s][mu * d + nu]);
                }
                let mut gd = CMat::zeros(n, n);
                for k in 0..dim {
                    gd -= commutator(&f.b[s][k].adjoint(), &curv.db[s][nu * dim + k]);
                }
                let total = g * c(hd, 0.0) + gd * c(2.0 * hd * m2, 0.0);
                ga.push(linalg::su_projection(&total));
            }
            let mut gb = Vec::with_capacity(dim);
            for p in 0..dim {
                let mut gd = CMat::zeros(n, n);
                for mu in 0..d {
                    gd -= central(f, s, mu, |t| curv.db[t][mu * dim + p].clone());
                    gd += commutator(&f.a[s][mu].adjoint(), &curv.db[s][mu * dim + p]);
                }
                let mut gv = CMat::zeros(n, n);
                for l in 0..dim {
                    gv -= commutator(&f.b[s][l].adjoint(), &curv.v[s][p * dim + l]) * c(2.0, 0.0);
                }
                for k in 0..dim {
                    for l in 0..dim {
                        let cst = basis.structure_constant(p, k, l);
                        if cst != linalg::ZERO {
                            gv -= &curv.v[s][k * dim + l] * cst.conj();
                        }
                    }
                }
                let total = gd * c(2.0 * hd * m2, 0.0) + gv * c(0.5 * hd * m2 * m2, 0.0);
                gb.push(linalg::hermitean_part(&total));
            }
            (ga, gb)
        })
        .unzip();
    FieldTangent { a: ga, b: gb }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::lie::build_su_basis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn setup() -> FieldConfig {
        let basis = Arc::new(build_su_basis(2).unwrap());
        let lat = Lattice::new(2, 4, 0.7).unwrap();
        let mut f = FieldConfig::zeros(lat, basis, 1.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        f.add_noise(&mut rng, 0.5, 0.5);
        f
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let f = setup();
        let g = action_gradient(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..3 {
            let v = FieldTangent::random(&mut rng, &f);
            let eps = 1e-5;
            let fd = (ymh_action(&f.step(eps, &v)) - ymh_action(&f.step(-eps, &v))) / (2.0 * eps);
            let an = g.dot(&v);
            assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "fd {fd} analytic {an}");
        }
    }

    #[test]
    fn quartic_closed_form() {
        let basis = Arc::new(build_su_basis(2).unwrap());
        let lat = Lattice::new(2, 3, 0.5).unwrap();
        let t = 0.5;
        let m = 1.1;
        let b: Vec<CMat> = basis.elements().iter().map(|e| e * c(t, 0.0)).collect();
        let zero = vec![CMat::zeros(2, 2); 2];
        let f = FieldConfig::constant(lat, basis, m, &zero, &b).unwrap();
        let expected = lat.volume() * 12.0 * m.powi(4) * (t * t - t).powi(2);
        assert!((ymh_action(&f) - expected).abs() < 1e-12);
    }
}
