use abac_core::discretization::{y_apply, AllAtOnceOperator, SpaceTimeMesh, SpatialOperator};
use abac_core::minres::{minres_solve, SolverConfig};
use abac_core::oracle::appendix_eigenvalue_formula;
use abac_core::preconditioner::{AbacPreconditioner, AlphaCirculantSpec};
use abac_core::transforms::{dst1, dst_space, scale_time, unitary_dft};
use abac_core::vector::{dot, norm2};
use abac_core::SpaceTimeVector;
use num_complex::Complex64;
use proptest::prelude::*;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

fn vec_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm2(&diff) <= tol * norm2(b).max(1e-300)
}

fn values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}

fn mesh_and_vectors() -> impl Strategy<Value = (SpaceTimeMesh, Vec<f64>, Vec<f64>)> {
    (1usize..=2, 1usize..=4, 1usize..=6).prop_flat_map(|(d, m1, n)| {
        let mesh = SpaceTimeMesh::new(d, m1, n, 1.0).unwrap();
        let len = mesh.dof();
        (Just(mesh), values(len), values(len))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dst1_is_an_isometric_involution(v in (1usize..40).prop_flat_map(values)) {
        let once = dst1(&v).unwrap();
        prop_assert!(rel_close(norm2(&once), norm2(&v), 1e-13));
        let twice = dst1(&once).unwrap();
        prop_assert!(vec_close(&twice, &v, 1e-13));
    }

    #[test]
    fn dst_space_is_an_involution((mesh, v, _) in mesh_and_vectors()) {
        let sv = SpaceTimeVector::from_vec(mesh.n, mesh.m, v.clone()).unwrap();
        let back = dst_space(&dst_space(&sv, mesh.d).unwrap(), mesh.d).unwrap();
        prop_assert!(vec_close(back.as_slice(), &v, 1e-13));
    }

    #[test]
    fn unitary_dft_round_trip(re in (1usize..50).prop_flat_map(values)) {
        let w: Vec<Complex64> = re.iter().enumerate().map(|(i, &x)| Complex64::new(x, (i as f64).sin())).collect();
        let f = unitary_dft(&w, false).unwrap();
        let back = unitary_dft(&f, true).unwrap();
        let norm = |z: &[Complex64]| z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(rel_close(norm(&f), norm(&w), 1e-13));
        let err: f64 = back.iter().zip(&w).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-13 * norm(&w).max(1e-300));
    }

    #[test]
    fn scale_time_signs_cancel((mesh, v, _) in mesh_and_vectors(), alpha in 1e-8f64..=1.0) {
        let sv = SpaceTimeVector::from_vec(mesh.n, mesh.m, v.clone()).unwrap();
        let back = scale_time(&scale_time(&sv, alpha, 1).unwrap(), alpha, -1).unwrap();
        prop_assert!(vec_close(back.as_slice(), &v, 1e-14));
    }

    #[test]
    fn y_is_an_isometric_involution((mesh, v, _) in mesh_and_vectors()) {
        let sv = SpaceTimeVector::from_vec(mesh.n, mesh.m, v).unwrap();
        let yv = y_apply(&sv);
        prop_assert!(rel_close(yv.norm(), sv.norm(), 1e-15));
        prop_assert_eq!(y_apply(&yv), sv);
    }

    #[test]
    fn yt_is_symmetric((mesh, v, w) in mesh_and_vectors()) {
        let aao = AllAtOnceOperator::new(mesh, SpatialOperator::laplacian(&mesh)).unwrap();
        let sv = SpaceTimeVector::from_vec(mesh.n, mesh.m, v).unwrap();
        let sw = SpaceTimeVector::from_vec(mesh.n, mesh.m, w).unwrap();
        let a = aao.yt_apply(&sv).unwrap().dot(&sw);
        let b = sv.dot(&aao.yt_apply(&sw).unwrap());
        let scale = aao.yt_apply(&sv).unwrap().norm() * sw.norm();
        prop_assert!((a - b).abs() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn variable_operator_is_symmetric_negative_definite(
        (mesh, v, w) in mesh_and_vectors(),
        c in 0.5f64..3.0,
    ) {
        let op = SpatialOperator::variable(&mesh, |x| c + x[0] * x[0]).unwrap();
        let v = &v[..mesh.m];
        let w = &w[..mesh.m];
        let av = op.variable_laplacian_apply(v).unwrap();
        let aw = op.variable_laplacian_apply(w).unwrap();
        prop_assert!((dot(&av, w) - dot(v, &aw)).abs() <= 1e-12 * norm2(&av).max(norm2(&aw)) * norm2(v).max(norm2(w)));
        if norm2(v) > 1e-3 {
            prop_assert!(dot(&av, v) < 0.0);
        }
    }

    #[test]
    fn l_rayleigh_quotient_exceeds_one((mesh, v, _) in mesh_and_vectors()) {
        let op = SpatialOperator::laplacian(&mesh);
        let v = &v[..mesh.m];
        prop_assume!(norm2(v) > 1e-6);
        let lv = op.l_apply(mesh.tau, v).unwrap();
        prop_assert!(dot(&lv, v) / dot(v, v) > 1.0);
    }

    #[test]
    fn symbols_obey_closed_form_and_avoid_the_cut(
        alpha in 1e-9f64..0.999,
        n in 2usize..12,
        eigs in prop::collection::vec(1.0f64 + 1e-9..100.0, 1..6),
    ) {
        let spec = AlphaCirculantSpec::from_parts(alpha, n, eigs.clone()).unwrap();
        let m = eigs.len();
        for k in 0..n {
            for (j, &lam) in eigs.iter().enumerate() {
                let d = spec.diag[k * m + j];
                let want = appendix_eigenvalue_formula(alpha, lam, k + 1, n).unwrap();
                prop_assert!((d - want).norm() <= 1e-12 * want.norm().max(lam));
                prop_assert!(d.re > 0.0 || d.im != 0.0);
                let s = spec.inv_sqrt_diag[k * m + j];
                prop_assert!(rel_close(s.norm_sqr() * d.norm(), 1.0, 1e-13));
                prop_assert!((1.0 / s).re > 0.0);
            }
        }
    }

    #[test]
    fn p_inv_is_symmetric_positive((mesh, v, w) in mesh_and_vectors(), alpha in 1e-4f64..0.9) {
        prop_assume!(mesh.n >= 2);
        let pre = AbacPreconditioner::new(&mesh, alpha, 1.0).unwrap();
        let sv = SpaceTimeVector::from_vec(mesh.n, mesh.m, v).unwrap();
        let sw = SpaceTimeVector::from_vec(mesh.n, mesh.m, w).unwrap();
        let pv = pre.apply_p_inv(&sv).unwrap();
        let pw = pre.apply_p_inv(&sw).unwrap();
        let a = pv.dot(&sw);
        let b = sv.dot(&pw);
        prop_assert!((a - b).abs() <= 1e-11 * pv.norm().max(pw.norm()) * sv.norm().max(sw.norm()));
        if sv.norm() > 1e-6 {
            prop_assert!(pv.dot(&sv) > 0.0);
        }
    }

    #[test]
    fn minres_history_is_monotone((mesh, v, _) in mesh_and_vectors(), alpha in 1e-6f64..0.5) {
        prop_assume!(mesh.n >= 2);
        let aao = AllAtOnceOperator::new(mesh, SpatialOperator::laplacian(&mesh)).unwrap();
        let pre = AbacPreconditioner::new(&mesh, alpha, 1.0).unwrap();
        let b = SpaceTimeVector::from_vec(mesh.n, mesh.m, v).unwrap();
        let x0 = SpaceTimeVector::zeros(mesh.n, mesh.m);
        let config = SolverConfig { tol: 1e-10, max_iter: 500, ..SolverConfig::default() };
        let report = minres_solve(|x| aao.yt_apply(x), |r| pre.apply_p_inv(r), &b, &x0, &config).unwrap();
        for pair in report.residual_history.windows(2) {
            prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-12));
        }
        // same inputs, same iterates
        let again = minres_solve(|x| aao.yt_apply(x), |r| pre.apply_p_inv(r), &b, &x0, &config).unwrap();
        prop_assert_eq!(again.iterations, report.iterations);
        prop_assert_eq!(again.residual_history, report.residual_history);
    }
}
