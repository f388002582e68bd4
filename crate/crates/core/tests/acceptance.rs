use std::collections::hash_map::DefaultHasher;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::hash::Hasher;
use std::process::ExitCode;

use aewalk::cmv::{self, lambda_inverse, lambda_map, spectral_measure, unitary_spectrum, verblunsky};
use aewalk::halfline::{boundary_history, evolve_k, reconstruct_boundary, reconstruct_full, HalfLineState};
use aewalk::lattice::{self, initial_state, ShiftVariant, Window};
use aewalk::limits::{self, limit_density, VelocityOptions};
use aewalk::spectra::{self, dispersion_sample};
use aewalk::topology::{self, Family};
use aewalk::CoinAngles;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Digest(DefaultHasher);

impl Digest {
    fn new() -> Self {
        Digest(DefaultHasher::new())
    }
    fn add(&mut self, x: f64) {
        self.0.write_u64(x.to_bits());
    }
    fn extend<I: IntoIterator<Item = f64>>(&mut self, xs: I) {
        for x in xs {
            self.add(x);
        }
    }
    fn finish(&self) -> u64 {
        self.0.finish()
    }
}

struct Outcome {
    id: usize,
    pass: bool,
    detail: String,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_angles(r: &mut ChaCha8Rng) -> CoinAngles {
    CoinAngles::new(r.random_range(0.0..TAU), r.random_range(0.0..TAU))
}

fn wrapped(d: f64) -> f64 {
    (d + PI).rem_euclid(TAU) - PI
}

fn unitarity(d: &mut Digest) -> Outcome {
    let mut r = rng(1);
    let steps = 1000;
    let mut drift: f64 = 0.0;
    let mut vertical: f64 = 0.0;
    let mut outside: f64 = 0.0;
    for _ in 0..20 {
        let a = random_angles(&mut r);
        let last = lattice::evolve_with(&initial_state(Window::light_cone(steps)), &a, steps, |f| {
            let t = f.steps();
            if t % 50 == 0 || t <= 3 || t == steps - 1 {
                drift = drift.max((f.norm_sqr() - 1.0).abs());
                outside = outside.max(f.max_outside_cone(t));
                if t % 2 == 0 {
                    vertical = vertical.max(f.vertical_norm_sqr());
                }
            }
        })
        .expect("evolution");
        d.extend(lattice::boundary_distribution(&last).expect("even time").values);
    }
    d.extend([drift, vertical, outside]);
    Outcome {
        id: 1,
        pass: drift < 1e-12 && vertical == 0.0 && outside == 0.0,
        detail: format!(
            "20 angles x 1000 steps: norm drift {drift:.2e}, vertical mass at even times {vertical:e}, amplitude outside cone {outside:e}"
        ),
    }
}

fn triangulation(d: &mut Digest) -> Outcome {
    let mut r = rng(2);
    let mut route = 0.0f64;
    for _ in 0..50 {
        let a = random_angles(&mut r);
        let k = r.random_range(0.0..TAU);
        let n = r.random_range(0..=50usize);
        let direct = evolve_k(&a, k, n).expect("halfline");
        let eta = verblunsky(k, &a);
        let op = cmv::build_cmv(eta, 2 * (n + 2)).expect("cmv");
        let v = op.transpose_power_apply(&lambda_map(&HalfLineState::initial(k, n + 1), &a), n);
        route = route.max(lambda_inverse(&v, k, &a).max_abs_diff(&direct));
        let row = spectral_measure(eta)
            .and_then(|m| m.matrix_row(n, 2 * n + 1))
            .expect("quadrature");
        let seq = lambda_map(&direct, &a);
        for j in 0..=2 * n + 1 {
            route = route.max((row[j] - seq[j]).norm());
        }
        d.extend(row.iter().flat_map(|z| [z.re, z.im]));
    }
    let mut lat = 0.0f64;
    for _ in 0..4 {
        let a = random_angles(&mut r);
        let mut field = initial_state(Window::light_cone(200));
        let mut t = 0;
        for n in [1usize, 10, 25, 50, 75, 100] {
            field = lattice::evolve(&field, &a, 2 * n - t).expect("lattice");
            t = 2 * n;
            let lhs = lattice::boundary_distribution(&field).expect("even");
            let rhs = reconstruct_boundary(&a, n, 256).expect("dft");
            lat = lat.max(lhs.max_abs_diff(&rhs));
            d.extend(rhs.values);
        }
    }
    Outcome {
        id: 2,
        pass: route < 1e-8 && lat < 1e-10,
        detail: format!("three-route max deviation {route:.2e} (50 samples); lattice vs Fourier {lat:.2e} (n <= 100)"),
    }
}

fn spectral_forms(d: &mut Digest) -> Outcome {
    let mut r = rng(3);
    let mut cases = vec![CoinAngles::new(PI / 4.0, PI / 6.0)];
    cases.extend((0..2).map(|_| random_angles(&mut r)));
    let mut point_err = 0.0f64;
    let mut weight_err = 0.0f64;
    let mut edge_err = 0.0f64;
    for a in &cases {
        for k in [0.0, 0.4, 1.0, 1.4, 2.0, 2.6, 3.4, 4.1] {
            let s = dispersion_sample(k, a);
            let eta = verblunsky(k, a);
            let eig = unitary_spectrum(eta, 400).expect("eigen-solve");
            d.extend(eig.iter().flat_map(|&(p, w)| [p, w]));
            if let Some(e) = s.edge {
                let (p, w) = eig
                    .iter()
                    .cloned()
                    .filter(|&(p, _)| !s.in_bulk(p))
                    .max_by(|x, y| x.1.total_cmp(&y.1))
                    .expect("in-gap eigenvalue");
                point_err = point_err.max(wrapped(p - e.theta0).abs());
                weight_err = weight_err.max((w - e.m0).abs());
            }
            let t = s.theta_c;
            for edge in [t, PI - t, PI + t, TAU - t] {
                let near = eig
                    .iter()
                    .map(|&(p, _)| wrapped(p - edge).abs())
                    .fold(f64::INFINITY, f64::min);
                edge_err = edge_err.max(near);
            }
        }
    }
    let mut fd_err = 0.0f64;
    let h = 1e-4;
    for _ in 0..200 {
        let a = random_angles(&mut r);
        let k = r.random_range(0.0..TAU);
        if a.s().abs() < 1e-3 || (k - FRAC_PI_2).abs() < 0.01 || (k - 3.0 * FRAC_PI_2).abs() < 0.01 {
            continue;
        }
        let th = |k: f64| dispersion_sample(k, &a).edge.expect("edge").theta0;
        let fd = wrapped(th(k + h) - th(k - h)) / (2.0 * h);
        fd_err = fd_err.max((fd - spectra::group_velocity(k, &a).expect("edge")).abs());
    }
    d.extend([point_err, weight_err, edge_err, fd_err]);
    Outcome {
        id: 3,
        pass: point_err < 1e-6 && edge_err < 1e-3 && fd_err < 1e-6,
        detail: format!(
            "N=400 point phase {point_err:.2e} (weight {weight_err:.2e}), band edges {edge_err:.2e}, velocity vs finite differences {fd_err:.2e}"
        ),
    }
}

fn continuous_linear(d: &mut Digest) -> Outcome {
    let a = CoinAngles::new(PI / 4.0, PI / 6.0);
    let n = 400;
    let nu = reconstruct_boundary(&a, n, 1024).expect("dft");
    d.extend(nu.values.iter().cloned());
    let g = limit_density(&a).expect("regime");
    let total = nu.total();
    let mut acc = 0.0;
    let mut sup = 0.0f64;
    for (j, v) in nu.iter() {
        acc += v;
        sup = sup.max((acc - g.cumulative(j as f64 / n as f64)).abs());
    }
    let mut changes = 0;
    let mut prev = 0.0;
    for j in 1..(g.r * n as f64) as i64 {
        let diff = n as f64 * nu.get(j) - g.density(j as f64 / n as f64);
        if diff * prev < 0.0 {
            changes += 1;
        }
        if diff != 0.0 {
            prev = diff;
        }
    }
    d.extend([total, sup, changes as f64]);
    Outcome {
        id: 4,
        pass: (total - 0.47456).abs() < 0.01 && sup < 0.02 && changes > 20,
        detail: format!("sum nu_400 = {total:.5}; cumulative sup error {sup:.4}; {changes} sign changes of n nu - g"),
    }
}

fn ballistic(d: &mut Digest) -> Outcome {
    let a = CoinAngles::new(5.0 * PI / 3.0, PI / 6.0);
    let b = limits::ballistic_limit(&a).expect("regime");
    let mut fronts = Vec::new();
    let mut near = 0.0;
    for n in [100usize, 200, 400] {
        let nu = reconstruct_boundary(&a, n, 1024).expect("dft");
        let front = b.speed_sign * n as i64;
        fronts.push(nu.get(front));
        near = (0..=3).map(|j| nu.get(front - b.speed_sign * j)).sum();
        d.extend(nu.values);
    }
    let errs: Vec<f64> = fronts.iter().map(|f| (f - b.mass).abs()).collect();
    let shrinking = errs.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    Outcome {
        id: 5,
        pass: errs[2] < 0.01 && near > 0.24 && shrinking,
        detail: format!(
            "front mass {:.5} / {:.5} / {:.5} at n = 100/200/400 (limit {}); within 3 sites {near:.5}",
            fronts[0], fronts[1], fronts[2], b.mass
        ),
    }
}

fn localization(d: &mut Digest) -> Outcome {
    let a = CoinAngles::new(PI / 3.0, PI / 3.0);
    let hist = boundary_history(&a, 1001, 2048).expect("dft");
    let even = hist[1000].get(0);
    let mut odd = 0.0f64;
    for t in (1..=1001).step_by(2) {
        for j in [-1, 1] {
            odd = odd.max((hist[t].get(j) - 0.1875).abs());
        }
    }
    d.extend(hist[1000].values.iter().cloned());
    d.extend([even, odd]);
    let target = 3.0 / (PI * PI);
    Outcome {
        id: 6,
        pass: (even - target).abs() < 0.003 && odd < 1e-12,
        detail: format!("nu_1000(0) = {even:.6} (3/pi^2 = {target:.6}); max |nu_odd(+-1) - 0.1875| = {odd:.2e}"),
    }
}

fn edge_decay(d: &mut Digest) -> Outcome {
    let a = CoinAngles::new(PI / 4.0, PI / 6.0);
    let n = 400;
    let full = reconstruct_full(&a, n, 1024).expect("dft");
    let g = limit_density(&a).expect("regime");
    let window = |j: i64| {
        let y = j as f64 / n as f64;
        y >= 0.8 * g.r && y <= 0.95 * g.r
    };
    let col = |c: usize| -> f64 {
        full.column(c)
            .map(|p| p.iter().filter(|&(j, _)| window(j)).map(|(_, v)| v).sum())
            .unwrap_or(0.0)
    };
    let theory = |c: usize| -> f64 {
        (0..=n as i64)
            .filter(|&j| window(j))
            .map(|j| g.column_density(c, j as f64 / n as f64))
            .sum()
    };
    let mut worst = 0.0f64;
    let mut report = Vec::new();
    for c in [0usize, 2] {
        let measured = col(c + 2) / col(c);
        let predicted = theory(c + 2) / theory(c);
        worst = worst.max((measured / predicted - 1.0).abs());
        report.push(format!("{measured:.5}/{predicted:.5}"));
    }
    let simulated: f64 = (0..40).filter_map(|c| full.column(c)).map(|p| p.total()).sum();
    let formula = g.total_edge_mass();
    d.extend([worst, simulated, formula]);
    Outcome {
        id: 7,
        pass: worst < 0.1 && (simulated - 0.311).abs() < 0.01,
        detail: format!(
            "even-column ratios measured/predicted {} (worst deviation {:.1}%); edge mass simulated {simulated:.4}, closed form {formula:.4}, target 0.311",
            report.join(", "),
            100.0 * worst
        ),
    }
}

fn topology_suite(d: &mut Digest) -> Outcome {
    let mut r = rng(8);
    let mut mismatches = [0usize; 2];
    for (i, f) in [Family::Class6, Family::Class1].into_iter().enumerate() {
        let mut done = 0;
        while done < 200 {
            let alpha = r.random_range(0.0..TAU);
            let n = r.random_range(0..4i64);
            let k = r.random_range(0.0..TAU);
            if f.gate(alpha, n, k).abs() < 1e-3 {
                continue;
            }
            done += 1;
            let got = topology::winding_numbers(alpha, n, k, f).expect("winding").pair();
            if got != f.closed_form(alpha, n, k) {
                mismatches[i] += 1;
            }
            if let Some((a, b)) = got {
                d.extend([a as f64, b as f64]);
            }
        }
    }
    let spots = [
        topology::nu2d(&CoinAngles::new(PI / 4.0, PI / 6.0)) == Some(1),
        topology::nu2d(&CoinAngles::new(PI / 6.0, PI / 4.0)) == Some(-1),
        topology::nu2d(&CoinAngles::new(PI / 3.0, PI / 3.0)).is_none(),
    ];
    let plain = topology::boundary_chiral_check(ShiftVariant::Moving).expect("chiral");
    let phased = topology::boundary_chiral_check(ShiftVariant::MovingPhase).expect("chiral");
    let table = (plain.yhat_ok, plain.ycheck_ok, phased.yhat_ok, phased.ycheck_ok) == (true, false, false, true);
    Outcome {
        id: 8,
        pass: mismatches == [0, 0] && spots.iter().all(|&b| b) && table,
        detail: format!(
            "winding mismatches class-6 {}/200, class-1 {}/200; nu2d spots {:?}; chiral table S'' ({}, {}) S''_i ({}, {})",
            mismatches[0], mismatches[1], spots, plain.yhat_ok, plain.ycheck_ok, phased.yhat_ok, phased.ycheck_ok
        ),
    }
}

fn velocity(d: &mut Digest) -> Outcome {
    let a = CoinAngles::new(PI / 4.0, PI / 6.0);
    let g = limit_density(&a).expect("regime");
    let ys: Vec<f64> = (0..=600).map(|i| 0.3 * i as f64 / 600.0).collect();
    let cum: Vec<f64> = ys.iter().map(|&y| g.cumulative(y)).collect();
    let opts = VelocityOptions::default();
    let exact = limits::estimate_velocity_from_cumulative(&ys, &cum, &opts).expect("fit");
    let nu = reconstruct_boundary(&a, 400, 1024).expect("dft");
    let sim = limits::estimate_velocity(&nu, 400, &opts).expect("fit");
    let rms_exact = exact.rms_error(&a, 2000, 0.2);
    let rms_sim = sim.rms_error(&a, 2000, 0.2);
    d.extend(exact.coefficients.iter().chain(&sim.coefficients).cloned());
    d.extend([exact.k0, sim.k0, rms_exact, rms_sim]);
    Outcome {
        id: 9,
        pass: rms_exact < 0.02 && rms_sim < 0.08,
        detail: format!(
            "RMS |v| error: exact input {rms_exact:.4}, simulated n=400 {rms_sim:.4} (r = {:.3}, k0 = {:.3}, cond {:.0})",
            sim.r, sim.k0, sim.condition_number
        ),
    }
}

type Criterion = fn(&mut Digest) -> Outcome;

const CRITERIA: [Criterion; 9] = [
    unitarity,
    triangulation,
    spectral_forms,
    continuous_linear,
    ballistic,
    localization,
    edge_decay,
    topology_suite,
    velocity,
];

fn run_all(threads: usize, print: bool) -> (Vec<Outcome>, Vec<u64>) {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| {
        let mut outcomes = Vec::new();
        let mut digests = Vec::new();
        for c in CRITERIA {
            let mut d = Digest::new();
            let o = c(&mut d);
            if print {
                println!("criterion {} {}: {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.detail);
            }
            outcomes.push(o);
            digests.push(d.finish());
        }
        (outcomes, digests)
    })
}

fn main() -> ExitCode {
    let (outcomes, first) = run_all(1, true);
    let (_, second) = run_all(4, false);
    let same = first == second;
    println!(
        "criterion 10 {}: digests with 1 and 4 threads {}",
        if same { "PASS" } else { "FAIL" },
        if same { "identical" } else { "differ" }
    );
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    if failed.is_empty() && same {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
