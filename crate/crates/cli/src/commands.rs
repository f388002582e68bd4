use std::f64::consts::{PI, TAU};

use aewalk::halfline::{boundary_history, reconstruct_boundary, reconstruct_full};
use aewalk::lattice::{self, initial_state, ShiftVariant, Window};
use aewalk::limits::{self, Regime, TimeParity, VelocityOptions};
use aewalk::spectra::{classify, dispersion_sample, gap_analysis, uniform_grid};
use aewalk::topology::{self, Family, WindingResult};
use aewalk::{CoinAngles, WalkError};

use crate::table::{Cell, Table};
use crate::{Common, Failure, Variant};

/// Largest `n` for which `simulate` also runs the lattice.
const LATTICE_CHECK_MAX: usize = 500;
const ROUTE_TOLERANCE: f64 = 1e-10;

const CAPTION_POINTS: [(&str, f64, f64); 14] = [
    ("A", PI / 4.0, PI / 6.0),
    ("B", 3.0 * PI / 4.0, PI / 6.0),
    ("C", 5.0 * PI / 4.0, PI / 6.0),
    ("D", 7.0 * PI / 4.0, PI / 6.0),
    ("E", PI / 6.0, PI / 4.0),
    ("F", 11.0 * PI / 6.0, PI / 4.0),
    ("G", 7.0 * PI / 6.0, PI / 4.0),
    ("H", 5.0 * PI / 6.0, PI / 4.0),
    ("I", 5.0 * PI / 3.0, PI / 6.0),
    ("J", PI / 6.0, 5.0 * PI / 3.0),
    ("K", PI / 3.0, PI / 3.0),
    ("L", 2.0 * PI / 3.0, 2.0 * PI / 3.0),
    ("M", PI / 3.0, 5.0 * PI / 3.0),
    ("N", PI / 4.0, 3.0 * PI / 4.0),
];

/// A failed command, possibly with a table that should still be written.
pub struct Partial {
    pub table: Option<Table>,
    pub failure: Failure,
}

impl From<Failure> for Partial {
    fn from(failure: Failure) -> Self {
        Partial { table: None, failure }
    }
}

impl From<WalkError> for Partial {
    fn from(e: WalkError) -> Self {
        Failure::from(e).into()
    }
}

type Outcome = Result<Option<Table>, Partial>;

fn angles(c: &Common) -> CoinAngles {
    CoinAngles::new(c.alpha.radians.rem_euclid(TAU), c.beta.radians.rem_euclid(TAU))
}

fn header(t: &mut Table, command: &str, c: &Common) {
    t.meta("tool", concat!("aewalk ", env!("CARGO_PKG_VERSION")));
    t.meta("command", command);
    let a = angles(c);
    t.meta("alpha", format!("{} = {}", c.alpha.text, a.alpha));
    t.meta("beta", format!("{} = {}", c.beta.text, a.beta));
}

fn simulation_grid(c: &Common, n: usize) -> Result<usize, Failure> {
    let need = 2 * n + 2;
    match c.grid {
        None => Ok(need.next_power_of_two().max(64)),
        Some(m) if m.is_power_of_two() && m >= need => Ok(m),
        Some(m) => Err(Failure::Config(format!(
            "grid {m} must be a power of two no smaller than 2n+2 = {need}"
        ))),
    }
}

fn sweep_size(c: &Common, default: usize) -> Result<usize, Failure> {
    match c.grid {
        Some(0) => Err(Failure::Config("grid must be positive".into())),
        Some(m) => Ok(m),
        None => Ok(default),
    }
}

fn log10(x: f64) -> Cell {
    if x > 0.0 {
        Cell::Num(x.log10())
    } else {
        Cell::Empty
    }
}

fn validated(mut t: Table, residual: Option<f64>) -> Outcome {
    match residual {
        Some(r) if r.is_nan() || r > ROUTE_TOLERANCE => {
            t.meta("status", "route residual above tolerance");
            Err(Partial {
                table: Some(t),
                failure: Failure::Validation(format!(
                    "route residual {r:e} exceeds {ROUTE_TOLERANCE:e}"
                )),
            })
        }
        _ => Ok(Some(t)),
    }
}

pub fn simulate(c: &Common, full: bool) -> Outcome {
    let a = angles(c);
    let n = c.n;
    let m = simulation_grid(c, n)?;
    let lat = if n <= LATTICE_CHECK_MAX {
        let steps = 2 * n;
        Some(lattice::evolve(&initial_state(Window::light_cone(steps)), &a, steps)?)
    } else {
        None
    };
    let ni = n as i64;
    let (mut t, residual) = if full {
        let dist = reconstruct_full(&a, n, m)?;
        let residual = match &lat {
            Some(f) => Some(lattice::full_distribution(f)?.max_abs_diff(&dist)),
            None => None,
        };
        let mut t = Table::new(&["j", "m", "nu"]);
        for (col, p) in dist.columns.iter().enumerate() {
            for y in -ni..=ni {
                t.push(vec![Cell::Int(col as i64), Cell::Int(y), p.get(y).into()]);
            }
        }
        t.meta("total", dist.total());
        (t, residual)
    } else {
        let nu = reconstruct_boundary(&a, n, m)?;
        let residual = match &lat {
            Some(f) => Some(lattice::boundary_distribution(f)?.max_abs_diff(&nu)),
            None => None,
        };
        let mut t = Table::new(&["j", "nu"]);
        for j in -ni..=ni {
            t.push(vec![Cell::Int(j), nu.get(j).into()]);
        }
        t.meta("total", nu.total());
        (t, residual)
    };
    let mut out = Table::new(&[]);
    header(&mut out, if full { "simulate --full" } else { "simulate" }, c);
    out.meta("n", n);
    out.meta("grid", m);
    match residual {
        Some(r) => out.meta("route_residual", format!("{r:e}")),
        None => out.meta("route_residual", format!("not computed for n > {LATTICE_CHECK_MAX}")),
    }
    out.meta.append(&mut t.meta);
    t.meta = out.meta;
    validated(t, residual)
}

pub fn dispersion(c: &Common) -> Outcome {
    let a = angles(c);
    let points = sweep_size(c, 256)?;
    let class = classify(&a);
    let gap = gap_analysis(&a);
    let mut t = Table::new(&["k", "theta_c", "theta_0", "m0", "v", "M"]);
    header(&mut t, "dispersion", c);
    t.meta("points", points);
    t.meta("class", format!("{} case {}", class.label(), class.case));
    t.meta("gapless", gap.gapless);
    t.meta("closing_k", format!("{:?}", gap.closing_k));
    for k in uniform_grid(points) {
        let d = dispersion_sample(k, &a);
        let e = d.edge;
        t.push(vec![
            k.into(),
            d.theta_c.into(),
            e.map(|e| e.theta0).into(),
            e.map(|e| e.m0).into(),
            e.map(|e| e.velocity).into(),
            e.map(|e| e.mass).into(),
        ]);
    }
    Ok(Some(t))
}

fn phase_row(t: &mut Table, alpha: f64, beta: f64, spot: &str) {
    let a = CoinAngles::new(alpha, beta);
    let class = classify(&a);
    let nu = match topology::nu2d(&a) {
        Some(v) => Cell::Int(v as i64),
        None => Cell::Text("undefined".into()),
    };
    t.push(vec![
        alpha.into(),
        beta.into(),
        nu,
        class.label().into(),
        Cell::Int(class.case as i64),
        if spot.is_empty() { Cell::Empty } else { spot.into() },
    ]);
}

pub fn phase(c: &Common) -> Outcome {
    let points = sweep_size(c, 64)?;
    let mut t = Table::new(&["alpha", "beta", "nu2d", "class", "case", "spot"]);
    header(&mut t, "phase", c);
    t.meta("points_per_axis", points);
    for (name, alpha, beta) in CAPTION_POINTS {
        phase_row(&mut t, alpha, beta, name);
    }
    let axis = uniform_grid(points);
    for &alpha in &axis {
        for &beta in &axis {
            phase_row(&mut t, alpha, beta, "");
        }
    }
    let undefined = t.rows.iter().filter(|r| r[2] == Cell::Text("undefined".into())).count();
    t.meta("undefined_rows", undefined);
    Ok(Some(t))
}

pub fn limits(c: &Common) -> Outcome {
    let a = angles(c);
    let n = c.n;
    if n == 0 {
        return Err(Failure::Config("limit comparison needs n >= 1".into()).into());
    }
    let regime = limits::regime(&a);
    let nf = n as f64;
    let ni = n as i64;
    match regime {
        Regime::Null => Err(Failure::Config(
            "s = 0: the boundary distribution has no nontrivial limit".into(),
        )
        .into()),
        Regime::ContinuousLinear => {
            let m = simulation_grid(c, n)?;
            let nu = reconstruct_boundary(&a, n, m)?;
            let g = limits::limit_density(&a)?;
            let mut t = Table::new(&[
                "j", "y", "nu", "n_nu", "g", "cum_sim", "cum_limit", "log10_n_nu", "log10_g",
            ]);
            header(&mut t, "limits", c);
            t.meta("regime", regime.name());
            t.meta("n", n);
            t.meta("grid", m);
            t.meta("r", g.r);
            t.meta("s", g.s);
            t.meta("c0", g.c0());
            t.meta("total_sim", nu.total());
            t.meta("edge_mass_closed_form", g.total_edge_mass());
            let mut acc = 0.0;
            let mut sup = 0.0f64;
            for j in -ni..=ni {
                let y = j as f64 / nf;
                acc += nu.get(j);
                let cum = g.cumulative(y);
                sup = sup.max((acc - cum).abs());
                let dens = g.density(y);
                t.push(vec![
                    Cell::Int(j),
                    y.into(),
                    nu.get(j).into(),
                    (nf * nu.get(j)).into(),
                    dens.into(),
                    acc.into(),
                    cum.into(),
                    log10(nf * nu.get(j)),
                    log10(dens),
                ]);
            }
            t.meta("cumulative_sup_error", sup);
            Ok(Some(t))
        }
        Regime::Ballistic => {
            let m = simulation_grid(c, n)?;
            let nu = reconstruct_boundary(&a, n, m)?;
            let b = limits::ballistic_limit(&a)?;
            let mut t = Table::new(&["j", "y", "nu", "cum_sim", "cum_limit", "log10_nu"]);
            header(&mut t, "limits", c);
            t.meta("regime", regime.name());
            t.meta("n", n);
            t.meta("grid", m);
            t.meta("front", b.speed_sign * ni);
            t.meta("front_mass_sim", nu.get(b.speed_sign * ni));
            t.meta("front_mass_limit", b.mass);
            let mut acc = 0.0;
            for j in -ni..=ni {
                let y = j as f64 / nf;
                acc += nu.get(j);
                t.push(vec![
                    Cell::Int(j),
                    y.into(),
                    nu.get(j).into(),
                    acc.into(),
                    b.cumulative(y).into(),
                    log10(nu.get(j)),
                ]);
            }
            Ok(Some(t))
        }
        Regime::Localization => {
            let m = simulation_grid(c, n + 1)?;
            let hist = boundary_history(&a, n + 1, m)?;
            let (now, next) = (&hist[n], &hist[n + 1]);
            let parity = |t: usize| if t % 2 == 0 { TimeParity::Even } else { TimeParity::Odd };
            let mut t = Table::new(&[
                "j",
                "nu_n",
                "limit_n",
                "nu_n1",
                "limit_n1",
                "mean_sim",
                "mean_limit",
                "log10_nu_n",
                "log10_limit_n",
            ]);
            header(&mut t, "limits", c);
            t.meta("regime", regime.name());
            t.meta("n", n);
            t.meta("grid", m);
            let mut worst = 0.0f64;
            for j in -ni..=ni {
                let l0 = limits::localization_limit(j, parity(n), &a)?;
                let l1 = limits::localization_limit(j, parity(n + 1), &a)?;
                worst = worst.max((now.get(j) - l0).abs()).max((next.get(j) - l1).abs());
                t.push(vec![
                    Cell::Int(j),
                    now.get(j).into(),
                    l0.into(),
                    next.get(j).into(),
                    l1.into(),
                    (0.5 * (now.get(j) + next.get(j))).into(),
                    limits::time_averaged_limit(j, &a)?.into(),
                    log10(now.get(j)),
                    log10(l0),
                ]);
            }
            t.meta("max_deviation", worst);
            Ok(Some(t))
        }
    }
}

pub fn velocity(c: &Common, r_hat: Option<f64>) -> Outcome {
    let a = angles(c);
    let regime = limits::regime(&a);
    if regime != Regime::ContinuousLinear {
        return Err(Failure::Config(format!(
            "velocity recovery needs the continuous-linear regime, found {}",
            regime.name()
        ))
        .into());
    }
    if c.n == 0 {
        return Err(Failure::Config("velocity recovery needs n >= 1".into()).into());
    }
    if c.order < 3 {
        return Err(Failure::Config("fit order must be at least 3".into()).into());
    }
    if let Some(r) = r_hat {
        if !(r > 0.0 && r < 1.0) {
            return Err(Failure::Config(format!("r-hat {r} must lie in (0, 1)")).into());
        }
    }
    let m = simulation_grid(c, c.n)?;
    let nu = reconstruct_boundary(&a, c.n, m)?;
    let opts = VelocityOptions {
        order: c.order,
        r_override: r_hat,
        ..VelocityOptions::default()
    };
    let est = limits::estimate_velocity(&nu, c.n, &opts)?;
    let points = 256;
    let mut t = Table::new(&["k", "v_est", "v_exact"]);
    header(&mut t, "velocity", c);
    t.meta("n", c.n);
    t.meta("grid", m);
    t.meta("order", c.order);
    t.meta("coefficients", format!("{:?}", est.coefficients));
    t.meta("r", est.r);
    t.meta("r_source", if r_hat.is_some() { "override" } else { "detected" });
    t.meta("c0", est.c0);
    t.meta("s2", est.s2);
    t.meta("k0", est.k0);
    t.meta("condition_number", est.condition_number);
    t.meta("clamped_fraction", est.clamped_fraction);
    t.meta("boundary_residual", est.boundary_residual);
    t.meta("rms_error", est.rms_error(&a, 2000, 0.2));
    for k in uniform_grid(points) {
        let exact = dispersion_sample(k, &a).edge.map_or(0.0, |e| e.velocity.abs());
        t.push(vec![k.into(), est.speed(k).into(), exact.into()]);
    }
    Ok(Some(t))
}

pub fn topology(c: &Common, variant: Variant, family_n: i64) -> Outcome {
    let a = angles(c);
    let alpha = a.alpha;
    let points = sweep_size(c, 64)?;
    let shift = match variant {
        Variant::Moving => ShiftVariant::Moving,
        Variant::MovingPhase => ShiftVariant::MovingPhase,
    };
    let check = topology::boundary_chiral_check(shift)?;
    let sym = topology::check_symmetries(&a, 64);
    let mut t = Table::new(&[
        "family", "k", "gate", "nu_prime", "nu_double_prime", "nu0", "nu_pi", "closed_nu0",
        "closed_nu_pi", "min_gap",
    ]);
    header(&mut t, "topology", c);
    t.meta("family_n", family_n);
    t.meta("shift_variant", format!("{shift:?}"));
    t.meta("chiral_yhat", check.yhat_ok);
    t.meta("chiral_ycheck", check.ycheck_ok);
    let show = |d: &[topology::Defect]| {
        d.iter()
            .map(|d| format!("({},{},{})={}", d.x, d.y, d.arc, d.value))
            .collect::<Vec<_>>()
            .join(" ")
    };
    for (i, y) in ["yhat", "ycheck"].iter().enumerate() {
        t.meta(&format!("defects_{y}_ysys"), show(&check.defects[i]));
        t.meta(&format!("defects_{y}_sysy"), show(&check.defects_reversed[i]));
    }
    t.meta("particle_hole", sym.particle_hole);
    t.meta("time_reversal", sym.time_reversal);
    t.meta("chiral_s1", sym.chiral_s1);
    t.meta("chiral_s2", sym.chiral_s2);
    t.meta(
        "nu2d",
        topology::nu2d(&a).map_or("undefined".to_string(), |v| v.to_string()),
    );
    let mut worst = 0.0f64;
    for (name, family) in [("class6", Family::Class6), ("class1", Family::Class1)] {
        for k in uniform_grid(points) {
            let closed = family.closed_form(alpha, family_n, k);
            let pair = |p: Option<(i32, i32)>| -> [Cell; 2] {
                match p {
                    Some((x, y)) => [Cell::Int(x as i64), Cell::Int(y as i64)],
                    None => [Cell::Empty, Cell::Empty],
                }
            };
            let [c0, cpi] = pair(closed);
            let mut row = vec![
                name.into(),
                k.into(),
                family.gate(alpha, family_n, k).into(),
            ];
            match topology::winding_numbers(alpha, family_n, k, family)? {
                WindingResult::Defined(w) => {
                    worst = worst.max(w.residual);
                    row.extend([
                        Cell::Int(w.nu_prime as i64),
                        Cell::Int(w.nu_double_prime as i64),
                        Cell::Int(w.nu0 as i64),
                        Cell::Int(w.nu_pi as i64),
                        c0,
                        cpi,
                        w.min_gap.into(),
                    ]);
                }
                WindingResult::Undefined { min_gap } => {
                    row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, c0, cpi]);
                    row.push(min_gap.into());
                }
            }
            t.push(row);
        }
    }
    t.meta("winding_rounding_residual", worst);
    Ok(Some(t))
}
