//! Cohomology of `(Ω_Der(M_n), d′)` by numerical rank.
//!
//! The differential is assembled on the basis `e_{ij} θ^I` of each degree and
//! its ranks are read off singular values with a relative threshold.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{self, binomial};
use crate::forms::{differential, MatrixForm};
use crate::lie::LieBasis;
use crate::linalg::{self, CMat};

/// Relative singular-value threshold for the rank of `d′`.
pub const COHOMOLOGY_TOL: f64 = 1e-8;

/// Largest matrix size for which the full complex is assembled.
pub const MAX_N: usize = 3;

#[derive(Debug, Clone, Serialize)]
pub struct CohomologyReport {
    pub n: usize,
    /// `dim H^p` for `p = 0 ..= n² − 1`.
    pub dims: Vec<usize>,
    /// Rank of `d′: Ω^p → Ω^{p+1}`.
    pub ranks: Vec<usize>,
    /// Smallest ratio between the last kept and first dropped singular value,
    /// over all degrees; a large value means the rank decisions are clear-cut.
    pub min_spectral_gap: f64,
    pub euler_complex: i64,
    pub euler_cohomology: i64,
    pub tolerance: f64,
    /// Orthonormal representatives of each `H^p`, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representatives: Option<Vec<Vec<MatrixForm>>>,
}

/// Matrix of `d′: Ω^p → Ω^{p+1}` on the bases `e_{ij} θ^I`, masks ordered as
/// in [`exterior::masks_of_degree`] and matrix units row-major.
pub fn differential_matrix(basis: &LieBasis, p: usize) -> Result<CMat> {
    let n = basis.n();
    let dim = basis.dim();
    let src = exterior::masks_of_degree(dim, p);
    let dst = exterior::masks_of_degree(dim, p + 1);
    let pos: std::collections::HashMap<u64, usize> =
        dst.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let nn = n * n;
    let mut out = CMat::zeros(dst.len() * nn, src.len() * nn);
    for (ci, mask) in src.iter().enumerate() {
        let idx = exterior::indices(*mask);
        for u in 0..nn {
            let mut unit = CMat::zeros(n, n);
            unit[(u / n, u % n)] = linalg::ONE;
            let d = differential(basis, &MatrixForm::monomial(dim, &idx, unit))?;
            for (m, a) in d.terms() {
                let row0 = pos[&m] * nn;
                for v in 0..nn {
                    out[(row0 + v, ci * nn + u)] = a[(v / n, v % n)];
                }
            }
        }
    }
    Ok(out)
}

fn rank_and_gap(s: &[f64], tol: f64) -> (usize, f64) {
    let smax = s.first().copied().unwrap_or(0.0);
    if smax <= f64::MIN_POSITIVE {
        return (0, f64::INFINITY);
    }
    let r = s.iter().filter(|&&x| x > tol * smax).count();
    let gap = if r == 0 || r == s.len() {
        f64::INFINITY
    } else {
        s[r - 1] / s[r].max(f64::MIN_POSITIVE)
    };
    (r, gap)
}

fn vector_to_form(dim: usize, n: usize, p: usize, v: &[Complex64]) -> MatrixForm {
    let nn = n * n;
    let mut f = MatrixForm::zero(dim, p, n, n);
    for (i, mask) in exterior::masks_of_degree(dim, p).into_iter().enumerate() {
        let a = linalg::unvectorize(&v[i * nn..(i + 1) * nn], n, n);
        if linalg::max_abs(&a) > 0.0 {
            f.add_term(&exterior::indices(mask), a);
        }
    }
    f
}

/// Full cohomology computation with diagnostics.
pub fn cohomology(basis: &LieBasis, with_representatives: bool) -> Result<CohomologyReport> {
    let n = basis.n();
    if n > MAX_N {
        return Err(Error::Capacity(format!(
            "the complex of M_{n} has {} dimensions; only n <= {MAX_N} is supported",
            n * n * (1usize << basis.dim())
        )));
    }
    let dim = basis.dim();
    let mats: Vec<CMat> = (0..dim).map(|p| differential_matrix(basis, p)).collect::<Result<_>>()?;
    let mut ranks = Vec::with_capacity(dim + 1);
    let mut gap = f64::INFINITY;
    for m in &mats {
        let (r, g) = rank_and_gap(&linalg::singular_values(m), COHOMOLOGY_TOL);
        ranks.push(r);
        gap = gap.min(g);
    }
    ranks.push(0);
    let sizes: Vec<usize> = (0..=dim).map(|p| n * n * binomial(dim, p)).collect();
    let mut dims = Vec::with_capacity(dim + 1);
    for p in 0..=dim {
        let below = if p == 0 { 0 } else { ranks[p - 1] };
        let h = sizes[p] as i64 - ranks[p] as i64 - below as i64;
        if h < 0 {
            return Err(Error::Numerical(format!("negative cohomology dimension in degree {p}")));
        }
        dims.push(h as usize);
    }
    let alt = |v: &[usize]| -> i64 {
        v.iter().enumerate().map(|(p, &x)| if p % 2 == 0 { x as i64 } else { -(x as i64) }).sum()
    };
    let euler_complex = alt(&sizes);
    let euler_cohomology = alt(&dims);
    if euler_complex != euler_cohomology {
        return Err(Error::Numerical("Euler characteristic mismatch".into()));
    }
    let representatives = if with_representatives {
        let mut reps = Vec::with_capacity(dim + 1);
        for p in 0..=dim {
            // ker d_p ∩ (im d_{p−1})^⊥ = ker of [d_p ; d_{p−1}^*].
            let cols = sizes[p];
            let upper = if p < dim { mats[p].clone() } else { CMat::zeros(0, cols) };
            let lower = if p > 0 { mats[p - 1].adjoint() } else { CMat::zeros(0, cols) };
            let mut stacked = CMat::zeros(upper.nrows() + lower.nrows(), cols);
            stacked.view_mut((0, 0), (upper.nrows(), cols)).copy_from(&upper);
            stacked.view_mut((upper.nrows(), 0), (lower.nrows(), cols)).copy_from(&lower);
            let null = linalg::null_space(&stacked, COHOMOLOGY_TOL);
            reps.push(
                (0..null.ncols())
                    .map(|j| {
                        let v: Vec<Complex64> = null.column(j).iter().copied().collect();
                        vector_to_form(dim, n, p, &v).pruned(1e-12)
                    })
                    .collect(),
            );
        }
        Some(reps)
    } else {
        None
    };
    Ok(CohomologyReport {
        n,
        dims,
        ranks,
        min_spectral_gap: gap,
        euler_complex,
        euler_cohomology,
        tolerance: COHOMOLOGY_TOL,
        representatives,
    })
}

/// `dim H^p` for every degree.
pub fn cohomology_dims(basis: &LieBasis) -> Result<Vec<usize>> {
    Ok(cohomology(basis, false)?.dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::build_su_basis;

    #[test]
    fn m2_cohomology() {
        let b = build_su_basis(2).unwrap();
        let rep = cohomology(&b, true).unwrap();
        assert_eq!(rep.dims, vec![1, 0, 0, 1]);
        // H^0 is spanned by the identity.
        let h0 = &rep.representatives.unwrap()[0][0];
        let a = h0.as_matrix();
        let ratio = a[(0, 0)];
        assert!(linalg::max_abs(&(a - linalg::identity(2) * ratio)) < 1e-12);
    }

    #[test]
    fn capacity_error_for_n4() {
        let b = build_su_basis(4).unwrap();
        assert!(matches!(cohomology_dims(&b), Err(Error::Capacity(_))));
    }
}
