//! Long-time limit laws on the boundary and the inverse estimation of the
//! edge group velocity from a measured boundary distribution.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{DMatrix, DVector};

use crate::angles::{Sign, SIGN_TOL};
use crate::quad::{bisect, integrate};
use crate::spectra::dispersion_sample;
use crate::{CoinAngles, Profile, Result, WalkError};

/// Konno density `sqrt(1-p^2) / (pi (1-x^2) sqrt(p^2-x^2))` on `(-p, p)`.
/// Infinite at `|x| = p`.
pub fn konno_density(x: f64, p: f64) -> f64 {
    let p = p.abs();
    if x.abs() > p {
        return 0.0;
    }
    if x.abs() == p {
        return f64::INFINITY;
    }
    (1.0 - p * p).sqrt() / (PI * (1.0 - x * x) * (p * p - x * x).sqrt())
}

/// Distribution function of the Konno law.
pub fn konno_cdf(x: f64, p: f64) -> f64 {
    let p = p.abs();
    let phi = (x.clamp(-p, p) / p).asin();
    let q = (1.0 - p * p).sqrt();
    0.5 + (q * phi.sin()).atan2(phi.cos()) / PI
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `0 < |r| < 1`, `s != 0`
    ContinuousLinear,
    /// `|r| = 1`
    Ballistic,
    /// `r = 0`, `s != 0`
    Localization,
    /// `s = 0`
    Null,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::ContinuousLinear => "continuous-linear",
            Regime::Ballistic => "ballistic",
            Regime::Localization => "localization",
            Regime::Null => "null",
        }
    }
}

pub fn regime(angles: &CoinAngles) -> Regime {
    let r = angles.r();
    if Sign::of(angles.s()) == Sign::Zero {
        Regime::Null
    } else if (r.abs() - 1.0).abs() <= SIGN_TOL {
        Regime::Ballistic
    } else if Sign::of(r) == Sign::Zero {
        Regime::Localization
    } else {
        Regime::ContinuousLinear
    }
}

fn require(angles: &CoinAngles, expected: Regime) -> Result<()> {
    let found = regime(angles);
    if found != expected {
        return Err(WalkError::Regime {
            expected: expected.name(),
            found: found.name(),
        });
    }
    Ok(())
}

/// Limit density of `nu_n(floor(n y))` in the continuous-linear regime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitDensity {
    pub angles: CoinAngles,
    pub r: f64,
    pub s: f64,
    /// `sgn(r s)`: the side of the half-line carrying the mass.
    pub side: f64,
}

pub fn limit_density(angles: &CoinAngles) -> Result<LimitDensity> {
    require(angles, Regime::ContinuousLinear)?;
    let (r, s) = (angles.r(), angles.s());
    Ok(LimitDensity {
        angles: *angles,
        r,
        s,
        side: (r * s).signum(),
    })
}

impl LimitDensity {
    pub fn support(&self) -> (f64, f64) {
        if self.side > 0.0 {
            (0.0, self.r.abs())
        } else {
            (-self.r.abs(), 0.0)
        }
    }

    fn prefactor(&self) -> f64 {
        2.0 * self.s * self.s / (self.r * self.r)
    }

    /// `(2 s^2 / r^2) y^2 f_K(y; |r|)` on the support.
    pub fn density(&self, y: f64) -> f64 {
        if y * self.side < 0.0 {
            return 0.0;
        }
        self.prefactor() * y * y * konno_density(y, self.r)
    }

    /// `int_0^{|y|} g` measured from the boundary outwards.
    pub fn mass_within(&self, y: f64) -> f64 {
        let p = self.r.abs();
        let phi = (y.abs().min(p) / p).asin();
        let q = (1.0 - p * p).sqrt();
        self.prefactor() / PI * ((q * phi.sin()).atan2(phi.cos()) - q * phi)
    }

    /// `int_{-inf}^y g`
    pub fn cumulative(&self, y: f64) -> f64 {
        if self.side > 0.0 {
            if y < 0.0 {
                0.0
            } else {
                self.mass_within(y)
            }
        } else if y >= 0.0 {
            self.c0()
        } else if y <= -self.r.abs() {
            0.0
        } else {
            self.c0() - self.mass_within(y)
        }
    }

    /// `s^2 (1 - sqrt(1 - r^2)) / r^2`
    pub fn c0(&self) -> f64 {
        self.s * self.s * (1.0 - (1.0 - self.r * self.r).sqrt()) / (self.r * self.r)
    }

    /// `(|r| - |s||y|) / (|r| + |s||y|)`
    pub fn zeta(&self, y: f64) -> f64 {
        let (r, sy) = (self.r.abs(), self.s.abs() * y.abs());
        (r - sy) / (r + sy)
    }

    /// Density on column `c` of the arcs: `zeta^j g` for `c = 2j`, `zeta^{j+1} g` for `c = 2j+1`.
    pub fn column_density(&self, c: usize, y: f64) -> f64 {
        let e = (c / 2 + c % 2) as i32;
        self.zeta(y).powi(e) * self.density(y)
    }

    /// Sum over all columns, `g(y) (1 + zeta) / (1 - zeta)`.
    pub fn edge_density(&self, y: f64) -> f64 {
        if y == 0.0 {
            return 0.0;
        }
        let z = self.zeta(y);
        self.density(y) * (1.0 + z) / (1.0 - z)
    }

    /// Total mass carried by the edge columns, `2 |s| arcsin|r| / (pi |r|)`.
    pub fn total_edge_mass(&self) -> f64 {
        let r = self.r.abs();
        2.0 * self.s.abs() * r.asin() / (PI * r)
    }

    /// `total_edge_mass` by quadrature with `y = |r| sin(phi)`.
    pub fn total_edge_mass_quadrature(&self) -> f64 {
        let r = self.r.abs();
        integrate(
            |phi| {
                let y = self.side * r * phi.sin();
                self.edge_density(y) * r * phi.cos()
            },
            0.0,
            FRAC_PI_2,
            64,
            16,
        )
    }

    /// `int g` by quadrature with `y = |r| sin(phi)`.
    pub fn c0_quadrature(&self) -> f64 {
        let r = self.r.abs();
        integrate(
            |phi| self.density(self.side * r * phi.sin()) * r * phi.cos(),
            0.0,
            FRAC_PI_2,
            64,
            16,
        )
    }
}

/// Parity of the number of double steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeParity {
    Even,
    Odd,
}

/// Pointwise limit of `nu_n(j)` along times of one parity when `r = 0`.
pub fn localization_limit(j: i64, parity: TimeParity, angles: &CoinAngles) -> Result<f64> {
    require(angles, Regime::Localization)?;
    let s2 = angles.s().powi(2);
    Ok(match parity {
        TimeParity::Even if j % 2 == 0 => {
            let d = (j * j - 1) as f64;
            4.0 * s2 / (PI * PI * d * d)
        }
        TimeParity::Even => 0.0,
        TimeParity::Odd if j.abs() == 1 => s2 / 4.0,
        TimeParity::Odd => 0.0,
    })
}

/// `lim (1/T) sum_{n<T} nu_n(j)`, the mean of the two parity limits.
pub fn time_averaged_limit(j: i64, angles: &CoinAngles) -> Result<f64> {
    Ok(0.5
        * (localization_limit(j, TimeParity::Even, angles)?
            + localization_limit(j, TimeParity::Odd, angles)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallisticLimit {
    /// Direction `sgn(r s)` of the front `j = sgn(r s) n`.
    pub speed_sign: i64,
    pub mass: f64,
}

impl BallisticLimit {
    /// Limit of `nu_n(sgn(rs)(n - j))`.
    pub fn behind_front(&self, j: i64) -> f64 {
        if j == 0 {
            self.mass
        } else {
            0.0
        }
    }

    /// `F(y) = s^2 H(y - sgn(rs))`
    pub fn cumulative(&self, y: f64) -> f64 {
        if y >= self.speed_sign as f64 {
            self.mass
        } else {
            0.0
        }
    }
}

pub fn ballistic_limit(angles: &CoinAngles) -> Result<BallisticLimit> {
    require(angles, Regime::Ballistic)?;
    Ok(BallisticLimit {
        speed_sign: (angles.r() * angles.s()).signum() as i64,
        mass: angles.s().powi(2),
    })
}

/// `g(j, y)` on arc column `j`.
pub fn bulk_decay_density(j: usize, y: f64, angles: &CoinAngles) -> Result<f64> {
    Ok(limit_density(angles)?.column_density(j, y))
}

/// Points `(v(k), 2 m0(k)^2 M(k) / pi)` for every `k` with an edge state and finite mass.
pub fn parametric_plot(angles: &CoinAngles, kgrid: &[f64]) -> Result<Vec<(f64, f64)>> {
    require(angles, Regime::ContinuousLinear)?;
    Ok(kgrid
        .iter()
        .filter_map(|&k| dispersion_sample(k, angles).edge)
        .filter(|e| e.mass.is_finite())
        .map(|e| (e.velocity, 2.0 * e.m0 * e.m0 * e.mass / PI))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VelocityOptions {
    /// Highest power `M` in `G(y) = sum_{m=3}^M g_m y^m`.
    pub order: usize,
    /// Fixed support edge in place of the detected one.
    pub r_override: Option<f64>,
    /// Support edge where `G` first reaches `(1 - edge_fraction) C0`.
    pub edge_fraction: f64,
}

impl Default for VelocityOptions {
    fn default() -> Self {
        VelocityOptions {
            order: 5,
            r_override: None,
            edge_fraction: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VelocityEstimate {
    /// `g_3 .. g_M`
    pub coefficients: Vec<f64>,
    pub r: f64,
    pub c0: f64,
    pub s2: f64,
    pub k0: f64,
    pub condition_number: f64,
    /// Fraction of the `t` grid where the polynomial equation had no root in `[0, r]`.
    pub clamped_fraction: f64,
    /// Boundary-condition residual at `k0`.
    pub boundary_residual: f64,
}

const T_POINTS: usize = 1025;

impl VelocityEstimate {
    /// `sum_m m/(m-2) g_m y^{m-2}`
    pub fn polynomial(&self, y: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let m = (i + 3) as f64;
                m / (m - 2.0) * g * y.powi(i as i32 + 1)
            })
            .sum()
    }

    fn slope(&self) -> f64 {
        2.0 * self.s2 / (self.r * self.r * PI)
    }

    fn solve(&self, t: f64, k0: f64) -> (f64, bool) {
        let rhs = self.slope() * (t - k0);
        let f = |y: f64| self.polynomial(y) - rhs;
        if f(0.0) >= 0.0 {
            return (0.0, true);
        }
        if f(self.r) <= 0.0 {
            return (self.r, true);
        }
        (bisect(f, 0.0, self.r, 1e-14).unwrap_or(self.r), false)
    }

    /// `|v|` at distance `t` from the velocity zero.
    pub fn profile(&self, t: f64) -> f64 {
        self.solve(t, self.k0).0
    }

    /// Estimated `|v(k)|`.
    pub fn speed(&self, k: f64) -> f64 {
        self.profile(((k.rem_euclid(PI)) - FRAC_PI_2).abs())
    }

    fn quarter_mean(&self, k0: f64) -> (f64, usize) {
        let h = FRAC_PI_2 / (T_POINTS - 1) as f64;
        let mut sum = 0.0;
        let mut clamped = 0;
        for i in 0..T_POINTS {
            let (y, c) = self.solve(i as f64 * h, k0);
            clamped += c as usize;
            let w = if i == 0 || i == T_POINTS - 1 { 0.5 } else { 1.0 };
            sum += w * y * h;
        }
        (sum / FRAC_PI_2, clamped)
    }

    /// Mean of `|v|` over a period minus `2 arcsin(r) / pi`.
    pub fn boundary_condition(&self, k0: f64) -> f64 {
        self.quarter_mean(k0).0 - 2.0 * self.r.asin() / PI
    }

    /// RMS of `speed(k) - |v(k)|` on `points` wave numbers, excluding `|k - pi/2|`,
    /// `|k - 3pi/2| <= exclude`.
    pub fn rms_error(&self, angles: &CoinAngles, points: usize, exclude: f64) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in 0..points {
            let k = TAU * i as f64 / points as f64;
            if (k - FRAC_PI_2).abs() <= exclude || (k - 3.0 * FRAC_PI_2).abs() <= exclude {
                continue;
            }
            let exact = dispersion_sample(k, angles)
                .edge
                .map_or(0.0, |e| e.velocity.abs());
            sum += (self.speed(k) - exact).powi(2);
            count += 1;
        }
        (sum / count as f64).sqrt()
    }
}

/// Fits `G(y) = sum_{m=3}^M g_m y^m` to a measured cumulative curve and
/// inverts for `|v(k)|`.
pub fn estimate_velocity_from_cumulative(
    ys: &[f64],
    cumulative: &[f64],
    opts: &VelocityOptions,
) -> Result<VelocityEstimate> {
    if ys.len() != cumulative.len() || ys.is_empty() {
        return Err(WalkError::Fit("empty or mismatched data".into()));
    }
    if opts.order < 3 {
        return Err(WalkError::Fit(format!("order {} below 3", opts.order)));
    }
    let c0 = *cumulative.last().unwrap_or(&0.0);
    let r = match opts.r_override {
        Some(r) => r,
        None => {
            let target = (1.0 - opts.edge_fraction) * c0;
            let i = cumulative
                .iter()
                .position(|&g| g >= target)
                .ok_or_else(|| WalkError::Fit("cumulative curve never reaches C0".into()))?;
            ys[i]
        }
    };
    if !(r > 0.0 && r < 1.0) {
        return Err(WalkError::Fit(format!("support edge {r} outside (0, 1)")));
    }
    let rows: Vec<usize> = (0..ys.len())
        .filter(|&i| ys[i] >= 0.0 && ys[i] <= r + 1e-12)
        .collect();
    let cols = opts.order - 2;
    if rows.len() < cols {
        return Err(WalkError::Fit(format!(
            "{} points for {} coefficients",
            rows.len(),
            cols
        )));
    }
    let a = DMatrix::from_fn(rows.len(), cols, |i, m| ys[rows[i]].powi(m as i32 + 3));
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|&i| cumulative[i]));
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    let condition_number = sv.max() / sv.min();
    let coef = svd
        .solve(&b, 0.0)
        .map_err(|e| WalkError::Fit(e.to_string()))?;
    let s2 = r * r * c0 / (1.0 - (1.0 - r * r).sqrt());
    let mut est = VelocityEstimate {
        coefficients: coef.iter().cloned().collect(),
        r,
        c0,
        s2,
        k0: 0.0,
        condition_number,
        clamped_fraction: 0.0,
        boundary_residual: 0.0,
    };
    let k0 = bisect(|k0| est.boundary_condition(k0), -3.0, 3.0, 1e-8)
        .ok_or_else(|| WalkError::Fit("boundary condition has no root in [-3, 3]".into()))?;
    let (_, clamped) = est.quarter_mean(k0);
    est.k0 = k0;
    est.clamped_fraction = clamped as f64 / T_POINTS as f64;
    est.boundary_residual = est.boundary_condition(k0);
    Ok(est)
}

/// Inclusive cumulative sum of `nu_n(j)` at `y = j / n` on the side carrying more mass.
pub fn boundary_cumulative(nu: &Profile, n: usize) -> (Vec<f64>, Vec<f64>) {
    let plus: f64 = nu.iter().filter(|&(j, _)| j > 0).map(|(_, v)| v).sum();
    let minus: f64 = nu.iter().filter(|&(j, _)| j < 0).map(|(_, v)| v).sum();
    let dir = if plus >= minus { 1 } else { -1 };
    let reach = nu.lo.unsigned_abs().max(nu.hi().unsigned_abs()) as i64;
    let mut ys = Vec::new();
    let mut g = Vec::new();
    let mut acc = 0.0;
    for j in 0..=reach {
        acc += nu.get(dir * j);
        ys.push(j as f64 / n as f64);
        g.push(acc);
    }
    (ys, g)
}

/// Velocity estimate from a boundary distribution at time `n`.
pub fn estimate_velocity(nu: &Profile, n: usize, opts: &VelocityOptions) -> Result<VelocityEstimate> {
    if n == 0 {
        return Err(WalkError::Fit("time zero carries no spreading".into()));
    }
    let (ys, g) = boundary_cumulative(nu, n);
    estimate_velocity_from_cumulative(&ys, &g, opts)
}
