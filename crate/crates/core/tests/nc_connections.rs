use std::sync::Arc;

use ncdg_core::connection::{
    affine_gauge_check, check_hermitean_compat, classify_flat, compat_defect, curvature, form_curvature,
    gauge_transform, partitions, ConnectionForm, GaugeElement,
};
use ncdg_core::forms::{canonical_theta, InnerDerivation, MatrixForm};
use ncdg_core::lie::{build_su_basis, direct_sum, sl2_irrep, LieBasis, LieRep};
use ncdg_core::linalg::{self, c, CMat};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn su(n: usize) -> Arc<LieBasis> {
    Arc::new(build_su_basis(n).unwrap())
}

fn invertible(rng: &mut ChaCha8Rng, r: usize) -> GaugeElement {
    loop {
        let u = linalg::identity(r) + linalg::random_complex(rng, r, r) * c(0.5, 0.0);
        if linalg::inverse_condition(&u) > 1e-2 {
            return GaugeElement::new(u).unwrap();
        }
    }
}

fn random_connection(rng: &mut ChaCha8Rng, b: &Arc<LieBasis>, r: usize) -> ConnectionForm {
    let a = (0..b.dim()).map(|_| linalg::random_complex(rng, r, r)).collect();
    ConnectionForm::new(b.clone(), a).unwrap()
}

fn hermitean_connection(rng: &mut ChaCha8Rng, b: &Arc<LieBasis>, r: usize) -> ConnectionForm {
    let a = (0..b.dim()).map(|_| linalg::random_hermitean(rng, r)).collect();
    ConnectionForm::new(b.clone(), a).unwrap()
}

/// A real derivation: antihermitean `γ`, i.e. imaginary coordinates.
fn real_derivation(rng: &mut ChaCha8Rng, b: &LieBasis) -> InnerDerivation {
    let coords = (0..b.dim()).map(|_| Complex64::new(0.0, rng.random_range(-1.0..1.0))).collect();
    InnerDerivation::from_coordinates(b, coords)
}

fn gap(a: &MatrixForm, b: &MatrixForm) -> f64 {
    a.sub(b).max_abs() / (1.0 + a.max_abs().max(b.max_abs()))
}

#[test]
fn flat_orbit_counts_follow_the_partition_numbers() {
    let b = su(2);
    for (r, count) in [(1, 1), (2, 2), (3, 3), (4, 5), (5, 7), (6, 11)] {
        let cls = classify_flat(r, &b).unwrap();
        assert_eq!(cls.orbits.len(), count, "r = {r}");
        assert_eq!(partitions(r).len(), count);
        assert!(cls.pairwise_inequivalent);
        assert!(cls.max_curvature_residual <= 1e-12);
    }
}

#[test]
fn classification_rejects_sizes_out_of_range() {
    assert!(classify_flat(0, &su(2)).is_err());
    assert!(classify_flat(7, &su(2)).is_err());
    assert!(classify_flat(2, &su(3)).is_err());
}

#[test]
fn connection_json_round_trip() {
    let b = su(2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let conn = random_connection(&mut rng, &b, 3);
    let v = serde_json::to_value(&conn).unwrap();
    let back = ConnectionForm::from_json(b, v).unwrap();
    for (x, y) in back.components().iter().zip(conn.components()) {
        assert_eq!(linalg::max_abs(&(x - y)), 0.0);
    }
}

#[test]
fn canonical_connection_is_flat() {
    for n in [2, 3] {
        let b = su(n);
        for r in 1..=3 {
            assert_eq!(curvature(&ConnectionForm::canonical(b.clone(), r)).max_abs(), 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn flat_exactly_when_the_components_represent(seed in any::<u64>(), n in 2usize..=3, pick in 0usize..3) {
        let b = su(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Random matrices are generically not a representation.
        let conn = random_connection(&mut rng, &b, 2);
        let rep = LieRep::new(b.clone(), conn.components().to_vec()).unwrap();
        let f = curvature(&conn);
        prop_assert!(f.max_abs() > 1e-3);
        prop_assert!(rep.closure_residual() > 1e-3);
        // Conjugated sums of irreducibles are representations, hence flat.
        if n == 2 {
            let dims: [&[usize]; 3] = [&[2], &[3], &[2, 1]];
            let irreps: Vec<LieRep> = dims[pick].iter().map(|&d| sl2_irrep(&b, d - 1).unwrap()).collect();
            let rep = direct_sum(&irreps).unwrap();
            let u = invertible(&mut rng, rep.r());
            let moved = rep.conjugate(u.matrix()).unwrap();
            prop_assert!(curvature(&ConnectionForm::from_rep(&moved)).max_abs() <= TOL);
        }
        // Each curvature coefficient is the representation defect on that pair.
        for k in 0..b.dim() {
            for l in k + 1..b.dim() {
                let a = conn.components();
                let defect = linalg::commutator(&a[k], &a[l]) - b.contract(k, l, a);
                prop_assert!(linalg::max_abs(&(f.coefficient(&[k, l]) - defect)) <= 1e-12);
            }
        }
    }

    #[test]
    fn curvature_is_gauge_covariant(seed in any::<u64>(), n in 2usize..=3, r in 1usize..4) {
        let b = su(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let conn = random_connection(&mut rng, &b, r);
        let u = invertible(&mut rng, r);
        let lhs = curvature(&conn.gauge(&u).unwrap());
        let rhs = curvature(&conn).map_coefficients(r, r, |f| u.inverse() * f * u.matrix());
        prop_assert!(gap(&lhs, &rhs) <= TOL);
    }

    #[test]
    fn gauge_transformations_compose(seed in any::<u64>(), r in 1usize..4) {
        let b = su(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let conn = random_connection(&mut rng, &b, r);
        let (g, h) = (invertible(&mut rng, r), invertible(&mut rng, r));
        let gh = GaugeElement::new(g.matrix() * h.matrix()).unwrap();
        let twice = conn.gauge(&g).unwrap().gauge(&h).unwrap();
        let once = conn.gauge(&gh).unwrap();
        prop_assert!(gap(&twice.as_form(), &once.as_form()) <= TOL);
    }

    #[test]
    fn full_forms_transform_as_a_group_action(seed in any::<u64>(), n in 2usize..=3) {
        let b = su(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_connection(&mut rng, &b, n).full_form().unwrap();
        let (g, h) = (invertible(&mut rng, n), invertible(&mut rng, n));
        let gh = GaugeElement::new(g.matrix() * h.matrix()).unwrap();
        let twice = gauge_transform(&b, &gauge_transform(&b, &w, &g).unwrap(), &h).unwrap();
        let once = gauge_transform(&b, &w, &gh).unwrap();
        prop_assert!(gap(&twice, &once) <= TOL);
        // The curvature of the full form is covariant as well.
        let lhs = form_curvature(&b, &gauge_transform(&b, &w, &g).unwrap()).unwrap();
        let rhs = form_curvature(&b, &w).unwrap().map_coefficients(n, n, |f| g.inverse() * f * g.matrix());
        prop_assert!(gap(&lhs, &rhs) <= TOL);
    }

    #[test]
    fn minus_theta_is_gauge_invariant(seed in any::<u64>(), n in 2usize..=3) {
        let b = su(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = canonical_theta(&b).scale(c(-1.0, 0.0));
        let g = invertible(&mut rng, n);
        prop_assert!(gap(&gauge_transform(&b, &w, &g).unwrap(), &w) <= TOL);
        prop_assert!(form_curvature(&b, &w).unwrap().max_abs() <= TOL);
    }

    #[test]
    fn gauge_action_is_affine(seed in any::<u64>(), l1 in -2.0f64..2.0) {
        let b = su(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w1 = random_connection(&mut rng, &b, 2).full_form().unwrap();
        let w2 = random_connection(&mut rng, &b, 2).full_form().unwrap();
        let g = GaugeElement::new(linalg::random_special_unitary(&mut rng, 2, 1.0)).unwrap();
        prop_assert!(affine_gauge_check(&b, &w1, &w2, l1, 1.0 - l1, &g).unwrap().equal);
        let off = affine_gauge_check(&b, &w1, &w2, l1, 1.5 - l1, &g).unwrap();
        prop_assert!(!off.equal);
    }

    #[test]
    fn unitary_gauge_preserves_hermitean_compatibility(seed in any::<u64>(), n in 2usize..=3, r in 1usize..4) {
        let b = su(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let conn = hermitean_connection(&mut rng, &b, r);
        prop_assert!(check_hermitean_compat(&conn));
        let u = GaugeElement::new(linalg::random_unitary(&mut rng, r)).unwrap();
        prop_assert!(u.is_unitary());
        let moved = conn.gauge(&u).unwrap();
        prop_assert!(check_hermitean_compat(&moved));
        let x = real_derivation(&mut rng, &b);
        let m1 = linalg::random_complex(&mut rng, r, n);
        let m2 = linalg::random_complex(&mut rng, r, n);
        prop_assert!(compat_defect(&moved, &x, &m1, &m2) <= TOL * 100.0);
    }

    #[test]
    fn non_hermitean_components_break_compatibility(seed in any::<u64>()) {
        let b = su(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let conn = hermitean_connection(&mut rng, &b, 2);
        let mut a: Vec<CMat> = conn.components().to_vec();
        a[0] += linalg::random_hermitean(&mut rng, 2) * c(0.0, 1.0);
        let broken = ConnectionForm::new(b, a).unwrap();
        prop_assert!(!check_hermitean_compat(&broken));
    }
}
