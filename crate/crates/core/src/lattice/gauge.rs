//! Local gauge transformations of lattice fields.

use rayon::prelude::*;

use super::FieldConfig;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};

/// `a_μ ↦ u^* a_μ u + u^* ∂_μ u`, `b_k ↦ u^* b_k u` for a special-unitary
/// field `u[site]`.
///
/// With central differences `u^* ∂_μ u` is antihermitean and traceless only up
/// to `O(h²)`, so it is projected back onto `su(n)`.
pub fn gauge_transform_fields(u: &[CMat], f: &FieldConfig) -> Result<FieldConfig> {
    let n = f.basis.n();
    if u.len() != f.lattice.num_sites() {
        return Err(Error::invalid("gauge field does not match the lattice"));
    }
    for (site, us) in u.iter().enumerate() {
        if us.shape() != (n, n) || !linalg::is_unitary(us, 1e-10) {
            return Err(Error::invalid(format!("gauge field is not unitary at site {site}")));
        }
        if (us.determinant() - linalg::ONE).norm() > 1e-10 {
            return Err(Error::invalid(format!("gauge field has det != 1 at site {site}")));
        }
    }
    let lat = f.lattice;
    let two_h = c(2.0 * lat.spacing, 0.0);
    let mut out = f.clone();
    out.a.par_iter_mut().zip(out.b.par_iter_mut()).enumerate().for_each(|(s, (fa, fb))| {
        let ud = u[s].adjoint();
        for (mu, a) in fa.iter_mut().enumerate() {
            let du = (&u[lat.neighbor(s, mu, true)] - &u[lat.neighbor(s, mu, false)]) / two_h;
            *a = linalg::su_projection(&(&ud * &*a * &u[s] + &ud * du));
        }
        for b in fb.iter_mut() {
            *b = &ud * &*b * &u[s];
        }
    });
    Ok(out)
}
