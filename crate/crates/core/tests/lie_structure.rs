use std::sync::Arc;

use ncdg_core::lie::{build_su_basis, commutant, direct_sum, reps_equivalent, sl2_irrep, LieBasis, LieRep};
use ncdg_core::linalg::{self, c, CMat};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn su2() -> Arc<LieBasis> {
    Arc::new(build_su_basis(2).unwrap())
}

/// Direct sum of irreducibles of the given dimensions.
fn rep_of(basis: &Arc<LieBasis>, dims: &[usize]) -> LieRep {
    let irreps: Vec<LieRep> = dims.iter().map(|&d| sl2_irrep(basis, d - 1).unwrap()).collect();
    direct_sum(&irreps).unwrap()
}

fn well_conditioned(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    loop {
        let t = linalg::identity(n) + linalg::random_complex(rng, n, n) * c(0.4, 0.0);
        if linalg::inverse_condition(&t) > 1e-2 {
            return t;
        }
    }
}

#[test]
fn generated_bases_close_and_satisfy_jacobi() {
    for n in 2..=5 {
        let b = build_su_basis(n).unwrap();
        assert_eq!(b.dim(), n * n - 1);
        assert!(b.closure_residual() <= 1e-12, "n = {n}: closure {}", b.closure_residual());
        assert!(b.jacobi_residual() <= 1e-10, "n = {n}: Jacobi {}", b.jacobi_residual());
    }
}

#[test]
fn basis_round_trips_through_json() {
    let b = build_su_basis(3).unwrap();
    let text = serde_json::to_string(&b).unwrap();
    let back: LieBasis = serde_json::from_str(&text).unwrap();
    assert!(back.same_as(&b));
}

#[test]
fn basis_rejects_non_closing_matrices() {
    let [s1, s2, _] = linalg::pauli();
    assert!(LieBasis::from_matrices(vec![s1, s2]).is_err());
}

#[test]
fn irreps_satisfy_the_bracket_relations() {
    let b = su2();
    for two_j in 0..6 {
        let r = sl2_irrep(&b, two_j).unwrap();
        assert_eq!(r.r(), two_j + 1);
        assert!(r.closure_residual() <= 1e-12);
    }
}

#[test]
fn class_count_is_the_partition_number() {
    let b = su2();
    let expected = [1, 2, 3, 5];
    for r in 1..=4 {
        let reps: Vec<LieRep> = ncdg_core::connection::partitions(r).iter().map(|p| rep_of(&b, p)).collect();
        // Count classes by exhaustive pairwise comparison.
        let mut class_of: Vec<usize> = Vec::new();
        let mut classes = 0;
        for i in 0..reps.len() {
            let found = (0..i).find(|&j| reps_equivalent(&reps[i], &reps[j]).unwrap().equivalent);
            match found {
                Some(j) => class_of.push(class_of[j]),
                None => {
                    class_of.push(classes);
                    classes += 1;
                }
            }
        }
        assert_eq!(classes, expected[r - 1], "r = {r}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn commutant_dimension_is_conjugation_invariant(seed in any::<u64>(), pick in 0usize..5) {
        let b = su2();
        let parts: [&[usize]; 5] = [&[2], &[2, 1], &[1, 1, 1], &[2, 2], &[3, 1]];
        let rep = rep_of(&b, parts[pick]);
        let n = rep.r();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = well_conditioned(&mut rng, n);
        let moved = rep.conjugate(&t).unwrap();
        let d0 = commutant(n, rep.matrices()).unwrap().len();
        let d1 = commutant(n, moved.matrices()).unwrap().len();
        prop_assert_eq!(d0, d1);
    }

    #[test]
    fn equivalence_is_an_equivalence_relation(seed in any::<u64>(), i in 0usize..3, j in 0usize..3, k in 0usize..3) {
        let b = su2();
        let parts: [&[usize]; 3] = [&[3], &[2, 1], &[1, 1, 1]];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |p: usize| rep_of(&b, parts[p]).conjugate(&well_conditioned(&mut rng, 3)).unwrap();
        let (x, y, z) = (draw(i), draw(j), draw(k));
        let eq = |a: &LieRep, b: &LieRep| reps_equivalent(a, b).unwrap().equivalent;
        prop_assert!(eq(&x, &x));
        prop_assert_eq!(eq(&x, &y), eq(&y, &x));
        if eq(&x, &y) && eq(&y, &z) {
            prop_assert!(eq(&x, &z));
        }
        // Conjugates of one direct sum are equivalent, different sums are not.
        prop_assert_eq!(eq(&x, &y), i == j);
    }

    #[test]
    fn conjugated_reps_still_represent(seed in any::<u64>()) {
        let b = su2();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = rep_of(&b, &[2, 2]).conjugate(&well_conditioned(&mut rng, 4)).unwrap();
        prop_assert!(rep.closure_residual() <= 1e-10);
        let casimir = rep.casimir();
        // Two copies of spin 1/2: the Casimir is scalar.
        let scalar = casimir[(0, 0)];
        prop_assert!(linalg::max_abs(&(&casimir - linalg::identity(4) * scalar)) <= 1e-9);
    }
}
