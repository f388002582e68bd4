use std::f64::consts::PI;

use aewalk::cmv::{self, lambda_inverse, lambda_map, spectral_measure, verblunsky};
use aewalk::halfline::{self, evolve_k, reconstruct_boundary, reconstruct_full, HalfLineState};
use aewalk::lattice::{self, initial_state, Window};
use aewalk::{CoinAngles, C64};
use nalgebra::DVector;

fn angles_list() -> Vec<CoinAngles> {
    vec![
        CoinAngles::new(PI / 4.0, PI / 6.0),
        CoinAngles::new(0.3, 1.9),
        CoinAngles::new(2.2, 0.4),
        CoinAngles::new(5.0, 3.7),
    ]
}

#[test]
fn vertex_form_matches_two_arc_steps() {
    for a in angles_list() {
        let w = Window::light_cone(20);
        let mut arc = initial_state(w);
        let mut spin = lattice::to_spinor(&arc).unwrap();
        for n in 1..=10 {
            arc = lattice::evolve(&arc, &a, 2).unwrap();
            spin = lattice::gamma_step(&spin, &a).unwrap();
            let back = lattice::from_spinor(&spin, 2 * n);
            assert!(arc.max_abs_diff(&back) < 1e-12, "n={n} {a:?}");
        }
    }
}

#[test]
fn lattice_matches_fourier_route() {
    for a in angles_list() {
        let n = 50;
        let f = lattice::evolve(&initial_state(Window::light_cone(2 * n)), &a, 2 * n).unwrap();
        let lat = lattice::boundary_distribution(&f).unwrap();
        let dft = reconstruct_boundary(&a, n, 128).unwrap();
        assert!(lat.max_abs_diff(&dft) < 1e-10, "{a:?}");
        let full_lat = lattice::full_distribution(&f).unwrap();
        let full_dft = reconstruct_full(&a, n, 128).unwrap();
        assert!(full_lat.max_abs_diff(&full_dft) < 1e-10);
    }
}

#[test]
fn cmv_power_matches_halfline() {
    for a in angles_list() {
        for k in [0.2, 1.1, 2.9, 4.4] {
            let n = 30;
            let size = 2 * (n + 2);
            let op = cmv::build_cmv(verblunsky(k, &a), size).unwrap();
            let mut v = lambda_map(&HalfLineState::initial(k, n + 1), &a);
            let mut s = HalfLineState::initial(k, n + 1);
            for _ in 0..n {
                v = op.transpose_power_apply(&v, 1);
                s = halfline::halfline_step(&s, &a).unwrap();
            }
            let back = lambda_inverse(&v, k, &a);
            assert!(back.max_abs_diff(&s) < 1e-12, "{a:?} k={k}");
        }
    }
}

#[test]
fn spectral_integral_matches_matrix_row() {
    for a in angles_list() {
        for k in [0.2, 1.1, 2.9, 4.4] {
            let n = 20;
            let eta = verblunsky(k, &a);
            let mu = spectral_measure(eta).unwrap();
            let row = mu.matrix_row(n, 2 * n + 1).unwrap();
            let op = cmv::build_cmv(eta, 4 * n + 8).unwrap();
            let e0 = DVector::from_fn(4 * n + 8, |j, _| if j == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
            let col = op.transpose_power_apply(&e0, n);
            for j in 0..=2 * n + 1 {
                assert!((row[j] - col[j]).norm() < 1e-10, "{a:?} k={k} j={j}: {} vs {}", row[j], col[j]);
            }
            let s = evolve_k(&a, k, n).unwrap();
            assert!((row[0] - s.amp[0][1]).norm() < 1e-10);
        }
    }
}

#[test]
fn edge_eigenvector_matches_eigen_solve() {
    for eta in [C64::new(0.5, 0.0), C64::new(-0.3, 0.4), C64::new(0.2, -0.6)] {
        let e = cmv::edge_eigenvector(eta, 120).unwrap();
        assert!(e.residual < 10.0 * e.lambda.abs().powi(60), "{eta}: {}", e.residual);
        let eig = cmv::unitary_spectrum(eta, 120).unwrap();
        let (theta, w) = eig.iter().cloned().max_by(|x, y| x.1.total_cmp(&y.1)).unwrap();
        assert!((theta - e.theta0).abs() < 1e-10, "{eta}: {theta} vs {}", e.theta0);
        assert!((w - cmv::point_weight(eta)).abs() < 1e-10);
    }
}

mod random {
    use super::*;
    use proptest::prelude::*;

    fn angle() -> impl Strategy<Value = f64> {
        0.0..std::f64::consts::TAU
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn three_routes_agree(a in angle(), b in angle(), k in angle(), n in 0usize..40) {
            let angles = CoinAngles::new(a, b);
            let direct = evolve_k(&angles, k, n).unwrap();
            let eta = verblunsky(k, &angles);
            let op = cmv::build_cmv(eta, 2 * (n + 2)).unwrap();
            let v = op.transpose_power_apply(&lambda_map(&HalfLineState::initial(k, n + 1), &angles), n);
            let back = lambda_inverse(&v, k, &angles);
            prop_assert!(back.max_abs_diff(&direct) < 1e-8);
            let row = spectral_measure(eta).unwrap().matrix_row(n, 2 * n + 1).unwrap();
            for x in 0..=n {
                let seq = lambda_map(&direct, &angles);
                prop_assert!((row[2 * x] - seq[2 * x]).norm() < 1e-8);
                prop_assert!((row[2 * x + 1] - seq[2 * x + 1]).norm() < 1e-8);
            }
        }

        #[test]
        fn measure_has_unit_mass(a in angle(), b in angle(), k in angle()) {
            let mu = spectral_measure(verblunsky(k, &CoinAngles::new(a, b))).unwrap();
            prop_assert!((mu.total_mass().unwrap() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn halfline_is_isometric(a in angle(), b in angle(), k in angle(), n in 0usize..80) {
            let s = evolve_k(&CoinAngles::new(a, b), k, n).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
