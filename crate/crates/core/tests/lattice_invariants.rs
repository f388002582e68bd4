use aewalk::lattice::{self, initial_state, ArcField, ShiftVariant, Window};
use aewalk::{CoinAngles, WalkError, C64};
use proptest::prelude::*;

fn angle() -> impl Strategy<Value = f64> {
    0.0..std::f64::consts::TAU
}

fn random_field(w: Window, seeds: &[(f64, f64)]) -> ArcField {
    let mut f = ArcField::zeros(w);
    let mut i = 0;
    for x in 0..=2 {
        for y in -2..=2 {
            for d in 0..4 {
                let (re, im) = seeds[i % seeds.len()];
                f.set(x, y, d, C64::new(re, im)).unwrap();
                i += 1;
            }
        }
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_light_cone_and_parity(a in angle(), b in angle(), n in 1usize..60) {
        let angles = CoinAngles::new(a, b);
        let mut max_drift: f64 = 0.0;
        let mut ok = true;
        lattice::evolve_with(&initial_state(Window::light_cone(n)), &angles, n, |f| {
            max_drift = max_drift.max((f.norm_sqr() - 1.0).abs());
            ok &= f.max_outside_cone(f.steps()) == 0.0;
            if f.steps() % 2 == 0 {
                ok &= f.vertical_norm_sqr() == 0.0;
            }
        }).unwrap();
        prop_assert!(max_drift < 1e-13);
        prop_assert!(ok);
    }

    #[test]
    fn coin_is_unitary(a in angle(), b in angle(),
                       seeds in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8)) {
        let f = random_field(Window::new(4, 4), &seeds);
        let g = lattice::coin_apply(&f, &CoinAngles::new(a, b));
        prop_assert!((g.norm_sqr() - f.norm_sqr()).abs() < 1e-12 * f.norm_sqr().max(1.0));
    }

    #[test]
    fn fused_step_matches_coin_then_shift(a in angle(), b in angle(),
                       seeds in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8)) {
        let angles = CoinAngles::new(a, b);
        let f = random_field(Window::new(6, 6), &seeds);
        let fused = lattice::step(&f, &angles).unwrap();
        let split = lattice::shift_apply(&lattice::coin_apply(&f, &angles)).unwrap();
        prop_assert!(fused.max_abs_diff(&split) < 1e-14);
    }

    #[test]
    fn moving_picture_agrees(a in angle(), b in angle(), n in 1usize..30) {
        let angles = CoinAngles::new(a, b);
        let mut f = initial_state(Window::light_cone(n));
        let mut g = f.clone();
        for _ in 0..n {
            f = lattice::step(&f, &angles).unwrap();
            g = lattice::moving_step(&g, &angles, ShiftVariant::Moving).unwrap();
        }
        prop_assert!(f.max_abs_diff(&g) < 1e-12);
    }
}

#[test]
fn first_step_support() {
    let a = CoinAngles::new(std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_6);
    let f = lattice::step(&initial_state(Window::new(3, 3)), &a).unwrap();
    let mut support = Vec::new();
    for x in 0..=3 {
        for y in -3..=3 {
            for d in 0..4 {
                if f.get(x, y, d) != C64::new(0.0, 0.0) {
                    support.push((x, y, d));
                }
            }
        }
    }
    assert!(support.iter().all(|&(x, y, _)| x + y.abs() <= 1));
    assert!((f.norm_sqr() - 1.0).abs() < 1e-15);
}

#[test]
fn window_without_room_reports_truncation() {
    let a = CoinAngles::new(0.3, 0.4);
    let r = lattice::evolve(&initial_state(Window::new(2, 2)), &a, 10);
    assert!(matches!(r, Err(WalkError::Truncation { .. })));
}

#[test]
fn odd_time_has_no_boundary_distribution() {
    let a = CoinAngles::new(0.3, 0.4);
    let f = lattice::step(&initial_state(Window::light_cone(1)), &a).unwrap();
    assert!(matches!(lattice::boundary_distribution(&f), Err(WalkError::OddTime { .. })));
}
