//! Closed-form dispersion data of the walk: bulk bands, the edge band and
//! its derivatives, gap closings and the sign classification.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::angles::Sign;
use crate::cmv::{edge_lambda, point_angle, verblunsky};
use crate::{CoinAngles, Result, WalkError};

/// Edge point at one wave number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgePoint {
    pub theta0: f64,
    pub m0: f64,
    pub velocity: f64,
    /// `|1 / theta0''|`, infinite where the curvature vanishes.
    pub mass: f64,
    pub lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionSample {
    pub k: f64,
    pub rho: f64,
    pub theta_c: f64,
    pub edge: Option<EdgePoint>,
}

impl DispersionSample {
    /// The two bulk arcs `[tc, pi - tc]` and `[pi + tc, 2pi - tc]`.
    pub fn bands(&self) -> [(f64, f64); 2] {
        let t = self.theta_c;
        [(t, PI - t), (PI + t, TAU - t)]
    }

    pub fn in_bulk(&self, theta: f64) -> bool {
        let th = theta.rem_euclid(TAU);
        self.bands().iter().any(|&(a, b)| th >= a && th <= b)
    }
}

/// `rho(k)^2 = cos^2(a-b) - sin2a sin2b cos^2 k`
pub fn rho(k: f64, angles: &CoinAngles) -> f64 {
    (1.0 - verblunsky(k, angles).norm_sqr()).max(0.0).sqrt()
}

fn edge_exists(k: f64, angles: &CoinAngles) -> bool {
    Sign::of(k.cos() * angles.s()) != Sign::Zero
}

fn root(k: f64, r: f64) -> f64 {
    (1.0 - r * r * k.sin().powi(2)).max(0.0).sqrt()
}

fn velocity_unchecked(k: f64, angles: &CoinAngles) -> f64 {
    let r = angles.r();
    let d = root(k, r);
    if d == 0.0 {
        return 0.0;
    }
    (r * angles.s()).signum() * r.abs() * k.cos().abs() / d
}

fn mass_unchecked(k: f64, angles: &CoinAngles) -> f64 {
    let r = angles.r();
    let curv = r.abs() * k.sin().abs() * (1.0 - r * r) / root(k, r).powi(3);
    if curv == 0.0 {
        f64::INFINITY
    } else {
        1.0 / curv
    }
}

pub fn dispersion_sample(k: f64, angles: &CoinAngles) -> DispersionSample {
    let eta = verblunsky(k, angles);
    let rho = (1.0 - eta.norm_sqr()).max(0.0).sqrt();
    let edge = edge_exists(k, angles).then(|| EdgePoint {
        theta0: point_angle(eta),
        m0: (angles.s() * k.cos()).abs() / root(k, angles.r()),
        velocity: velocity_unchecked(k, angles),
        mass: mass_unchecked(k, angles),
        lambda: edge_lambda(eta),
    });
    DispersionSample {
        k,
        rho,
        theta_c: rho.min(1.0).acos(),
        edge,
    }
}

/// `theta0'(k)`
pub fn group_velocity(k: f64, angles: &CoinAngles) -> Result<f64> {
    if !edge_exists(k, angles) {
        return Err(WalkError::Undefined("no edge state at this wave number"));
    }
    Ok(velocity_unchecked(k, angles))
}

/// `|1 / theta0''(k)|`
pub fn effective_mass(k: f64, angles: &CoinAngles) -> Result<f64> {
    if !edge_exists(k, angles) {
        return Err(WalkError::Undefined("no edge state at this wave number"));
    }
    Ok(mass_unchecked(k, angles))
}

/// Sampled dispersion relation.
#[derive(Clone, Debug, PartialEq)]
pub struct DispersionRelation {
    pub samples: Vec<DispersionSample>,
    pub class: Classification,
}

impl DispersionRelation {
    pub fn bulk(&self) -> impl Iterator<Item = (f64, [(f64, f64); 2])> + '_ {
        self.samples.iter().map(|s| (s.k, s.bands()))
    }

    pub fn edge(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples
            .iter()
            .filter_map(|s| s.edge.map(|e| (s.k, e.theta0)))
    }
}

pub fn uniform_grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| TAU * i as f64 / points as f64).collect()
}

pub fn dispersion(angles: &CoinAngles, kgrid: &[f64]) -> DispersionRelation {
    DispersionRelation {
        samples: kgrid.iter().map(|&k| dispersion_sample(k, angles)).collect(),
        class: classify(angles),
    }
}

pub fn bulk_bands(angles: &CoinAngles, kgrid: &[f64]) -> Vec<(f64, [(f64, f64); 2])> {
    kgrid
        .iter()
        .map(|&k| (k, dispersion_sample(k, angles).bands()))
        .collect()
}

pub fn edge_band(angles: &CoinAngles, kgrid: &[f64]) -> Vec<(f64, f64)> {
    kgrid
        .iter()
        .filter_map(|&k| dispersion_sample(k, angles).edge.map(|e| (k, e.theta0)))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub gapless: bool,
    pub closing_k: Vec<f64>,
    /// The older sign clauses `r = 0, sin2a sin2b <= 0`
    /// and `s = 0, sin2a sin2b > 0`, kept for comparison.
    pub legacy_clauses: [bool; 2],
}

/// Bulk gaps close at `k = pi/2, 3pi/2` when `r = 0` and at `k = 0, pi` when `s = 0`.
pub fn gap_analysis(angles: &CoinAngles) -> GapReport {
    let [e1, e2, e3] = angles.signs();
    let mut closing_k = Vec::new();
    if e2 == Sign::Zero {
        closing_k.extend([0.0, PI]);
    }
    if e3 == Sign::Zero {
        closing_k.extend([FRAC_PI_2, 3.0 * FRAC_PI_2]);
    }
    closing_k.sort_by(f64::total_cmp);
    GapReport {
        gapless: !closing_k.is_empty(),
        closing_k,
        legacy_clauses: [
            e3 == Sign::Zero && e1 != Sign::Plus,
            e2 == Sign::Zero && e1 == Sign::Plus,
        ],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub signs: [Sign; 3],
    /// 1: no edge states; 2-5: signs of `(s, r)` as `(+,+)`, `(+,-)`, `(-,+)`, `(-,-)`; 6: flat edge band.
    pub case: u8,
}

impl Classification {
    pub fn label(&self) -> String {
        let [a, b, c] = self.signs;
        format!("({},{},{})", a.symbol(), b.symbol(), c.symbol())
    }
}

pub fn classify(angles: &CoinAngles) -> Classification {
    let signs = angles.signs();
    let case = match (signs[1], signs[2]) {
        (Sign::Zero, _) => 1,
        (_, Sign::Zero) => 6,
        (Sign::Plus, Sign::Plus) => 2,
        (Sign::Plus, Sign::Minus) => 3,
        (Sign::Minus, Sign::Plus) => 4,
        (Sign::Minus, Sign::Minus) => 5,
    };
    Classification { signs, case }
}
