use std::sync::Arc;

use ncdg_core::lattice::{
    action_density, action_gradient, classify_vacuum, curvature_components, gauge_transform_fields, minimize,
    ymh_action, FieldConfig, FieldTangent, Lattice, MinimizeOptions, CLASSIFY_TOL,
};
use ncdg_core::lie::{build_su_basis, LieBasis};
use ncdg_core::linalg::{self, c, CMat};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn su(n: usize) -> Arc<LieBasis> {
    Arc::new(build_su_basis(n).unwrap())
}

fn random_fields(rng: &mut ChaCha8Rng, n: usize, d: usize, sites: usize, mass: f64) -> FieldConfig {
    let lat = Lattice::new(d, sites, 0.5).unwrap();
    let mut f = FieldConfig::zeros(lat, su(n), mass).unwrap();
    f.add_noise(rng, 0.5, 0.5);
    f
}

fn unitary_conjugate(rng: &mut ChaCha8Rng, f: &FieldConfig) -> (Vec<CMat>, FieldConfig) {
    let n = f.basis.n();
    let u = linalg::random_special_unitary(rng, n, 1.0);
    let field = vec![u; f.lattice.num_sites()];
    let moved = gauge_transform_fields(&field, f).unwrap();
    (field, moved)
}

#[test]
fn lattice_rejects_bad_parameters() {
    assert!(Lattice::new(0, 4, 0.5).is_err());
    assert!(Lattice::new(2, 1, 0.5).is_err());
    assert!(Lattice::new(2, 4, 0.0).is_err());
    assert!(Lattice::new(8, 10, 0.1).is_err());
    let lat = Lattice::new(2, 4, 0.5).unwrap();
    assert!(FieldConfig::zeros(lat, su(2), 0.0).is_err());
}

#[test]
fn vacua_have_zero_action() {
    let b = su(2);
    let lat = Lattice::new(2, 4, 0.5).unwrap();
    let zero_a = vec![CMat::zeros(2, 2); 2];
    let trivial = FieldConfig::constant(lat, b.clone(), 1.3, &zero_a, &vec![CMat::zeros(2, 2); 3]).unwrap();
    assert_eq!(ymh_action(&trivial), 0.0);
    let spin = FieldConfig::constant(lat, b.clone(), 1.3, &zero_a, b.elements()).unwrap();
    assert!(ymh_action(&spin) <= 1e-24);
    assert!(curvature_components(&spin).max_abs() <= 1e-14);
}

#[test]
fn vacuum_classes() {
    let b = su(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = linalg::random_unitary(&mut rng, 2);
    let conj: Vec<CMat> = b.elements().iter().map(|e| u.adjoint() * e * &u).collect();
    assert_eq!(classify_vacuum(&b, &conj, CLASSIFY_TOL).unwrap().label, "spin-1/2");
    assert_eq!(classify_vacuum(&b, &vec![CMat::zeros(2, 2); 3], CLASSIFY_TOL).unwrap().label, "trivial");
    let half: Vec<CMat> = b.elements().iter().map(|e| e * c(0.5, 0.0)).collect();
    assert_eq!(classify_vacuum(&b, &half, CLASSIFY_TOL).unwrap().label, "not-a-representation");

    let b3 = su(3);
    let dual: Vec<CMat> = b3.elements().iter().map(|e| -e.transpose()).collect();
    assert_eq!(classify_vacuum(&b3, b3.elements(), CLASSIFY_TOL).unwrap().label, "defining");
    assert_eq!(classify_vacuum(&b3, &dual, CLASSIFY_TOL).unwrap().label, "dual");
}

#[test]
fn descent_trace_is_monotone_and_reaches_a_vacuum() {
    let b = su(2);
    let lat = Lattice::new(2, 4, 0.5).unwrap();
    let zero_a = vec![CMat::zeros(2, 2); 2];
    let start: Vec<CMat> = b.elements().iter().map(|e| e * c(0.9, 0.0)).collect();
    let mut f = FieldConfig::constant(lat, b, 1.0, &zero_a, &start).unwrap();
    f.add_noise(&mut ChaCha8Rng::seed_from_u64(9), 0.0, 0.05);
    let opts = MinimizeOptions { b_only: true, action_tol: 1e-10, ..MinimizeOptions::default() };
    let res = minimize(&f, &opts).unwrap();
    assert!(res.converged);
    assert!(res.trace.windows(2).all(|w| w[1].action <= w[0].action));
    assert_eq!(res.class.label, "spin-1/2");
    // Gauge fields were frozen.
    assert!(res.config.a.iter().flatten().all(|a| linalg::max_abs(a) == 0.0));
    res.config.validate().unwrap();
}

#[test]
fn gauge_transformation_rejects_non_special_unitary_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = random_fields(&mut rng, 2, 2, 3, 1.0);
    let sites = f.lattice.num_sites();
    let phase = linalg::identity(2) * c(0.0, 1.0);
    assert!(gauge_transform_fields(&vec![phase; sites], &f).is_err());
    let scaled = linalg::identity(2) * c(2.0, 0.0);
    assert!(gauge_transform_fields(&vec![scaled; sites], &f).is_err());
    assert!(gauge_transform_fields(&vec![linalg::identity(2); sites - 1], &f).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn action_is_nonnegative(seed in any::<u64>(), n in 2usize..=3, d in 1usize..=3, mass in 0.1f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_fields(&mut rng, n, d, 3, mass);
        prop_assert!(ymh_action(&f) >= 0.0);
    }

    #[test]
    fn constant_fields_integrate_to_volume_times_density(seed in any::<u64>(), n in 2usize..=3, d in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = su(n);
        let lat = Lattice::new(d, 3, 0.7).unwrap();
        let a: Vec<CMat> = (0..d).map(|_| linalg::random_su(&mut rng, n)).collect();
        let h: Vec<CMat> = (0..b.dim()).map(|_| linalg::random_hermitean(&mut rng, n)).collect();
        let f = FieldConfig::constant(lat, b, 1.7, &a, &h).unwrap();
        let curv = curvature_components(&f);
        let density = action_density(&curv, 0, f.mass);
        let s = ymh_action(&f);
        prop_assert!((s - lat.volume() * density).abs() <= 1e-12 * (1.0 + s));
    }

    #[test]
    fn gradient_steps_stay_in_the_field_spaces(seed in any::<u64>(), n in 2usize..=3, t in 0.0f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_fields(&mut rng, n, 2, 3, 1.0);
        let g = action_gradient(&f);
        prop_assert!(f.step(-t, &g).validate().is_ok());
        prop_assert!(f.step(t, &g.without_a()).validate().is_ok());
    }

    #[test]
    fn gradient_matches_finite_differences(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_fields(&mut rng, n, 2, 3, 0.8);
        let v = FieldTangent::random(&mut rng, &f);
        let eps = 1e-5;
        let fd = (ymh_action(&f.step(eps, &v)) - ymh_action(&f.step(-eps, &v))) / (2.0 * eps);
        let exact = action_gradient(&f).dot(&v);
        prop_assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()), "fd {} exact {}", fd, exact);
    }

    #[test]
    fn constant_gauge_leaves_the_action_unchanged(seed in any::<u64>(), n in 2usize..=3, d in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_fields(&mut rng, n, d, 3, 1.1);
        let (_, moved) = unitary_conjugate(&mut rng, &f);
        prop_assert!(moved.validate().is_ok());
        let (s0, s1) = (ymh_action(&f), ymh_action(&moved));
        prop_assert!((s0 - s1).abs() <= 1e-12 * (1.0 + s0));
    }

    #[test]
    fn gauge_transformations_preserve_hermiticity(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_fields(&mut rng, n, 2, 3, 1.0);
        let u: Vec<CMat> = (0..f.lattice.num_sites())
            .map(|_| linalg::random_special_unitary(&mut rng, n, 1.0))
            .collect();
        let moved = gauge_transform_fields(&u, &f).unwrap();
        prop_assert!(moved.validate().is_ok());
        // Higgs fields transform by conjugation, site by site.
        for (s, us) in u.iter().enumerate() {
            for (b0, b1) in f.b[s].iter().zip(&moved.b[s]) {
                prop_assert!(linalg::max_abs(&(us.adjoint() * b0 * us - b1)) <= 1e-12);
            }
        }
    }
}
