//! Scaling, reduction and serialization invariants checked on random inputs.

use hec_core::catalog::theta::theta_structure;
use hec_core::catalog::build_case;
use hec_core::geometry::{random_invariant_metrics, ricci_form, HomogeneousSpace};
use hec_core::lie::LieAlgebra;
use hec_core::structure::{moment_map_residual, rank_one_reduction, StructureData};
use hec_core::{Matrix, Rational, Scalar};
use proptest::prelude::*;

/// `x ⋉_A ℝᵏ` with `x` stored last.
fn semidirect_line(a: &Matrix<f64>) -> LieAlgebra<f64> {
    let k = a.rows();
    let n = k + 1;
    let mut c = vec![0.0; n * n * n];
    for i in 0..k {
        for j in 0..k {
            c[(k * n + i) * n + j] = a[(j, i)];
            c[(i * n + k) * n + j] = -a[(j, i)];
        }
    }
    LieAlgebra::new((0..n).map(|i| format!("e{i}")).collect(), c).unwrap()
}

fn unit_last(n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { 1.0 } else { 0.0 }).collect()
}

fn entries(k: usize) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(-3i32..=3, k * k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ricci_is_scale_invariant(seed in 0u64..10_000, t in 0.05f64..20.0, row in 0usize..4) {
        let name = ["Sl2C/U1", "SU21/SU2", "Sl2R", "Sl2C"][row];
        let space = build_case(name, &[]).unwrap().space.to_f64();
        let g = random_invariant_metrics(&space, 1, seed).unwrap().remove(0);
        let a = ricci_form(&space, &g).unwrap();
        let b = ricci_form(&space, &g.scale(&t)).unwrap();
        prop_assert!(a.sub(&b).max_abs() <= 1e-9 * a.max_abs().max(1.0));
    }

    #[test]
    fn exact_ricci_is_scale_invariant(num in 1i64..40, den in 1i64..40) {
        let space = build_case("Sl2C/U1", &[]).unwrap().space;
        let g = Matrix::<Rational>::identity(space.dim());
        let t = Rational::from_ratio(num, den);
        prop_assert_eq!(ricci_form(&space, &g).unwrap(), ricci_form(&space, &g.scale(&t)).unwrap());
    }

    #[test]
    fn rank_one_with_inert_direction_has_no_correction(k in 1usize..5, diag in prop::collection::vec(0.2f64..4.0, 5)) {
        let alg = LieAlgebra::<f64>::heisenberg().direct_sum(&LieAlgebra::abelian(1)).direct_sum(&LieAlgebra::abelian(k - 1));
        let n = alg.dim();
        let space = HomogeneousSpace::lie_group("inert", alg);
        let gram = Matrix::from_fn(n, n, |i, j| if i == j { diag[i % diag.len()] } else { 0.0 });
        let red = rank_one_reduction(&space, &gram, &unit_last(n)).unwrap();
        prop_assert!(red.a.max_abs() == 0.0);
        prop_assert!(red.residual < 1e-12);
    }

    #[test]
    fn rank_one_with_normal_action_has_no_correction(k in 1usize..5, raw in entries(4), scale in 0.2f64..5.0) {
        let b = Matrix::from_fn(k, k, |i, j| raw[i * 4 + j] as f64);
        let a = b.add(&b.transpose());
        let a = a.sub(&Matrix::identity(k).scale(&(a.trace() / k as f64)));
        let alg = semidirect_line(&a);
        let n = alg.dim();
        let space = HomogeneousSpace::lie_group("symmetric-action", alg);
        let mut gram = Matrix::identity(n);
        gram[(k, k)] = scale;
        let red = rank_one_reduction(&space, &gram, &unit_last(n)).unwrap();
        let a_star = red.metric.inverse().unwrap().mul(&red.a.transpose()).mul(&red.metric);
        prop_assert!(red.a.commutator(&a_star).max_abs() < 1e-12);
        prop_assert!(red.residual < 1e-9 * a.max_abs().max(1.0).powi(2));
    }

    #[test]
    fn moment_map_verdict_ignores_k_metric_scale(t in 0.05f64..20.0) {
        let case = build_case("Sl2C/U1-theta", &[]).unwrap();
        let data = theta_structure(&case, Matrix::identity(5)).unwrap().to_f64().unwrap();
        let k = data.uk_space.isotropy().len();
        let base = moment_map_residual(&data).unwrap();
        let scaled = moment_map_residual(&data.clone().with_k_metric(Matrix::identity(k).scale(&t)).unwrap()).unwrap();
        prop_assert!(base.residual < 1e-10);
        prop_assert!(scaled.residual < 1e-10);
    }
}

#[test]
fn structure_data_round_trips_through_json() {
    for name in ["Sl2C/U1-theta", "Sl2RxSl2R/D11-theta"] {
        let case = build_case(name, &[]).unwrap();
        let data = theta_structure(&case, Matrix::identity(5)).unwrap();
        let json = data.to_json();
        let back = StructureData::<Rational>::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json, "{name}");
        assert_eq!(back.nil_metric, data.nil_metric);
        assert_eq!(back.uk_metric.gram(), data.uk_metric.gram());
    }
}

#[test]
fn ricci_form_agrees_with_connection_oracle_on_catalog() {
    for name in ["Sl2C/U1", "SU21/SU2", "Sl2RxSl2R", "SU21/T2"] {
        let space = build_case(name, &[]).unwrap().space.to_f64();
        for g in random_invariant_metrics(&space, 3, 7).unwrap() {
            let diff = ricci_form(&space, &g).unwrap().sub(&crate::oracle::nomizu_ricci(&space, &g)).max_abs();
            assert!(diff < 1e-9, "{name}: {diff:e}");
        }
    }
}
