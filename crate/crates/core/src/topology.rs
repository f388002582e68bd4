//! Bloch operator of the boundary-free walk, its symmetries, and the
//! winding-number invariants of the two chiral parameter families.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use crate::angles::{phase, rotation, Sign};
use crate::lattice::{local_apply, moving_shift, ArcField, ShiftVariant, Window, D, L, R, U};
use crate::spectra::gap_analysis;
use crate::{CoinAngles, Mat2, Result, C64};

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// Coefficients of `G = d0 + i (d1 s1 + d2 s2 + d3 s3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pauli {
    pub d: [f64; 4],
}

pub fn sigma(j: usize) -> Mat2 {
    match j {
        1 => Mat2::new(ZERO, ONE, ONE, ZERO),
        2 => Mat2::new(ZERO, -I, I, ZERO),
        3 => Mat2::new(ONE, ZERO, ZERO, -ONE),
        _ => Mat2::identity(),
    }
}

pub fn pauli(g: &Mat2) -> Pauli {
    let mut d = [g.trace().re / 2.0, 0.0, 0.0, 0.0];
    for (j, dj) in d.iter_mut().enumerate().skip(1) {
        *dj = ((sigma(j) * g).trace() / (2.0 * I)).re;
    }
    Pauli { d }
}

/// `D(kx) H_alpha D(ky) H_beta`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochOperator {
    pub kx: f64,
    pub ky: f64,
    pub matrix: Mat2,
}

impl BlochOperator {
    pub fn pauli(&self) -> Pauli {
        pauli(&self.matrix)
    }

    /// Quasi-energies in [0, 2pi).
    pub fn eigenphases(&self) -> [f64; 2] {
        let p = self.pauli();
        let t = p.d[0].clamp(-1.0, 1.0).acos();
        [t, (TAU - t).rem_euclid(TAU)]
    }
}

pub fn bloch(kx: f64, ky: f64, angles: &CoinAngles) -> BlochOperator {
    BlochOperator {
        kx,
        ky,
        matrix: phase(kx) * rotation(angles.alpha) * phase(ky) * rotation(angles.beta),
    }
}

/// `D(kx/2) H_alpha D(ky) H_beta D(kx/2)`, the operator in the symmetric time frame.
pub fn bloch_symmetric(kx: f64, ky: f64, angles: &CoinAngles) -> Mat2 {
    let h = phase(kx / 2.0);
    h * rotation(angles.alpha) * phase(ky) * rotation(angles.beta) * h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymmetryReport {
    pub particle_hole: bool,
    pub time_reversal: bool,
    pub chiral_s1: bool,
    pub chiral_s2: bool,
}

impl SymmetryReport {
    pub fn chiral(&self) -> bool {
        self.chiral_s1 || self.chiral_s2
    }
}

const SYM_TOL: f64 = 1e-12;

/// Checks on a `samples x samples` grid of `(kx, ky)`. Time reversal is tested
/// against `K`, `s1 K`, `s2 K`, `s3 K`; chiral symmetry with `s1` and `s2` in the
/// symmetric time frame.
pub fn check_symmetries(angles: &CoinAngles, samples: usize) -> SymmetryReport {
    let grid: Vec<f64> = (0..samples)
        .map(|i| TAU * (i as f64 + 0.37) / samples as f64)
        .collect();
    let points: Vec<(f64, f64)> = grid
        .iter()
        .flat_map(|&a| grid.iter().map(move |&b| (a, b)))
        .collect();
    let holds = |f: &dyn Fn(f64, f64) -> f64| points.iter().all(|&(a, b)| f(a, b) < SYM_TOL);
    let g = |a: f64, b: f64| bloch(a, b, angles).matrix;
    let particle_hole = holds(&|a, b| (g(a, b).conjugate() - g(-a, -b)).norm());
    let time_reversal = (0..4).any(|j| {
        let t = sigma(j);
        holds(&|a, b| {
            let lhs = t * g(a, b).conjugate() * t.adjoint();
            (lhs - g(-a, -b).adjoint()).norm()
        })
    });
    let chiral = |j: usize| {
        let y = sigma(j);
        holds(&|a, b| {
            let m = bloch_symmetric(a, b, angles);
            (y * m * y - m.adjoint()).norm()
        })
    };
    SymmetryReport {
        particle_hole,
        time_reversal,
        chiral_s1: chiral(1),
        chiral_s2: chiral(2),
    }
}

/// `eps2 eps3`, undefined on gapless parameters.
pub fn nu2d(angles: &CoinAngles) -> Option<i32> {
    let [_, e2, e3] = angles.signs();
    if e2 == Sign::Zero || e3 == Sign::Zero || gap_analysis(angles).gapless {
        return None;
    }
    Some(e2.value() * e3.value())
}

/// Chiral parameter families: `beta = alpha + n pi` and `beta = -alpha + n pi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Class6,
    Class1,
}

impl Family {
    pub fn angles(self, alpha: f64, n: i64) -> CoinAngles {
        match self {
            Family::Class6 => CoinAngles::new(alpha, alpha + n as f64 * PI),
            Family::Class1 => CoinAngles::new(alpha, -alpha + n as f64 * PI),
        }
    }

    fn second(self, alpha: f64) -> f64 {
        match self {
            Family::Class6 => alpha,
            Family::Class1 => -alpha,
        }
    }

    /// Rotation taking the chiral operator to `s3`.
    fn frame(self) -> Mat2 {
        match self {
            Family::Class6 => rotation(PI / 4.0),
            Family::Class1 => Mat2::new(ONE, I, I, ONE) * C64::new(FRAC_1_SQRT_2, 0.0),
        }
    }

    /// The gating quantity `cos k sin 2a` or `sin k sin 2a`, times `(-1)^n`.
    pub fn gate(self, alpha: f64, n: i64, k: f64) -> f64 {
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let t = match self {
            Family::Class6 => k.cos(),
            Family::Class1 => k.sin(),
        };
        sign * t * (2.0 * alpha).sin()
    }

    /// The pair `(nu0, nu_pi)` as tabulated in closed form.
    pub fn closed_form(self, alpha: f64, n: i64, k: f64) -> Option<(i32, i32)> {
        let plus = match self {
            Family::Class6 => (0, -1),
            Family::Class1 => (-1, 0),
        };
        match Sign::of(self.gate(alpha, n, k)) {
            Sign::Zero => None,
            Sign::Plus => Some(plus),
            Sign::Minus => Some((plus.1, plus.0)),
        }
    }
}

/// `D(kx/2) H_a D(k) H_b D(kx/2)` for the family.
pub fn frame_prime(family: Family, alpha: f64, kx: f64, k: f64) -> Mat2 {
    let h = phase(kx / 2.0);
    h * rotation(alpha) * phase(k) * rotation(family.second(alpha)) * h
}

/// `D(k/2) H_a D(kx) H_b D(k/2)` for the family.
pub fn frame_double_prime(family: Family, alpha: f64, kx: f64, k: f64) -> Mat2 {
    frame_prime(family, alpha, k, kx)
}

/// Pauli coefficients after rotating the chiral operator to `s3`.
pub fn chiral_frame_pauli(family: Family, g: &Mat2) -> Pauli {
    let u = family.frame();
    pauli(&(u * g * u.adjoint()))
}

/// Winding of a closed sampled curve by summing principal phase increments.
pub fn winding(curve: &[C64]) -> f64 {
    let n = curve.len();
    (0..n)
        .map(|i| (curve[(i + 1) % n] / curve[i]).arg())
        .sum::<f64>()
        / TAU
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Windings {
    pub nu_prime: i32,
    pub nu_double_prime: i32,
    pub nu0: i32,
    pub nu_pi: i32,
    /// Largest distance of the raw windings from the integers.
    pub residual: f64,
    pub min_gap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WindingResult {
    Defined(Windings),
    Undefined { min_gap: f64 },
}

impl WindingResult {
    pub fn pair(&self) -> Option<(i32, i32)> {
        match self {
            WindingResult::Defined(w) => Some((w.nu0, w.nu_pi)),
            WindingResult::Undefined { .. } => None,
        }
    }
}

pub const WINDING_POINTS: usize = 1024;
const GAP_TOL: f64 = 1e-8;
const ROUND_TOL: f64 = 0.05;

fn curve(family: Family, alpha: f64, k: f64, op: fn(Family, f64, f64, f64) -> Mat2) -> Vec<C64> {
    (0..WINDING_POINTS)
        .map(|i| {
            let kx = TAU * i as f64 / WINDING_POINTS as f64;
            let t = chiral_frame_pauli(family, &op(family, alpha, kx, k)).d;
            C64::new(t[2], t[1])
        })
        .collect()
}

/// Numeric `(nu', nu'', nu0, nu_pi)` for `beta = +-alpha + n pi` at fixed `k`.
pub fn winding_numbers(alpha: f64, n: i64, k: f64, family: Family) -> Result<WindingResult> {
    let min_gap = (0..WINDING_POINTS)
        .map(|i| {
            let kx = TAU * i as f64 / WINDING_POINTS as f64;
            1.0 - pauli(&frame_prime(family, alpha, kx, k)).d[0].powi(2)
        })
        .fold(f64::INFINITY, f64::min);
    if min_gap <= GAP_TOL {
        return Ok(WindingResult::Undefined { min_gap });
    }
    let raw1 = winding(&curve(family, alpha, k, frame_prime));
    let raw2 = winding(&curve(family, alpha, k, frame_double_prime));
    let residual = (raw1 - raw1.round()).abs().max((raw2 - raw2.round()).abs());
    if residual > ROUND_TOL {
        return Err(crate::WalkError::Domain(format!(
            "winding {raw1}, {raw2} not close to an integer"
        )));
    }
    // (-1)^n exchanges the 0 and pi gaps.
    let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
    let nu_prime = sign * raw1.round() as i32;
    let nu_double_prime = sign * raw2.round() as i32;
    Ok(WindingResult::Defined(Windings {
        nu_prime,
        nu_double_prime,
        nu0: (nu_prime + nu_double_prime - 1) / 2,
        nu_pi: (nu_prime - nu_double_prime - 1) / 2,
        residual,
        min_gap,
    }))
}

/// Per-arc 4x4 blocks `s1 + s1` and `s2 + s2` on `(L, R, D, U)`.
pub fn chiral_operator(which: usize) -> [[C64; 4]; 4] {
    let s = sigma(which);
    let mut m = [[ZERO; 4]; 4];
    for (a, b) in [(L, R), (D, U)] {
        let idx = [a, b];
        for r in 0..2 {
            for c in 0..2 {
                m[idx[r]][idx[c]] = s[(r, c)];
            }
        }
    }
    m
}

/// Diagonal entry of `X S X S` (or `S X S X`) that differs from one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Defect {
    pub x: i64,
    pub y: i64,
    pub arc: usize,
    pub value: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiralCheck {
    pub variant: ShiftVariant,
    pub yhat_ok: bool,
    pub ycheck_ok: bool,
    /// Defects of `Y S Y S`, indexed as `[Yhat, Ycheck]`.
    pub defects: [Vec<Defect>; 2],
    /// Defects of `S Y S Y`.
    pub defects_reversed: [Vec<Defect>; 2],
}

fn basis(w: Window, x: i64, y: i64, arc: usize) -> ArcField {
    let mut f = ArcField::zeros(w);
    f.set(x, y, arc, ONE).expect("inside window");
    f
}

fn product_defects(
    w: Window,
    range: i64,
    apply: &dyn Fn(&ArcField) -> Result<ArcField>,
) -> Result<Vec<Defect>> {
    let mut out = Vec::new();
    for x in 0..=range {
        for y in -range..=range {
            for arc in 0..4 {
                let img = apply(&basis(w, x, y, arc))?;
                let value = img.get(x, y, arc);
                let stray = img.norm_sqr() - value.norm_sqr();
                if (value - ONE).norm() > SYM_TOL || stray > SYM_TOL {
                    out.push(Defect { x, y, arc, value });
                }
            }
        }
    }
    Ok(out)
}

/// Checks `X S X S = 1` for `X = s1 + s1` and `X = s2 + s2` on a small window.
pub fn boundary_chiral_check(variant: ShiftVariant) -> Result<ChiralCheck> {
    let w = Window::new(4, 4);
    let range = 2;
    let ops = [chiral_operator(1), chiral_operator(2)];
    let mut defects: [Vec<Defect>; 2] = Default::default();
    let mut reversed: [Vec<Defect>; 2] = Default::default();
    for (i, x) in ops.iter().enumerate() {
        let s = |f: &ArcField| moving_shift(f, variant);
        defects[i] = product_defects(w, range, &|f| {
            Ok(local_apply(&s(&local_apply(&s(f)?, x))?, x))
        })?;
        reversed[i] = product_defects(w, range, &|f| s(&local_apply(&s(&local_apply(f, x))?, x)))?;
    }
    Ok(ChiralCheck {
        variant,
        yhat_ok: defects[0].is_empty() && reversed[0].is_empty(),
        ycheck_ok: defects[1].is_empty() && reversed[1].is_empty(),
        defects,
        defects_reversed: reversed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_origin() {
        let b = bloch(0.0, 0.0, &CoinAngles::new(0.0, 0.0));
        assert!((b.matrix - Mat2::identity()).norm() < 1e-15);
    }

    #[test]
    fn pauli_round_trip() {
        let g = bloch(0.3, 1.7, &CoinAngles::new(0.4, 2.1)).matrix;
        let d = pauli(&g).d;
        let back = sigma(0) * C64::new(d[0], 0.0)
            + (1..4).map(|j| sigma(j) * (I * d[j])).sum::<Mat2>();
        assert!((back - g).norm() < 1e-14);
        assert!((d.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn class6_frame_has_no_s1_part() {
        for kx in [0.1, 1.4, 3.3] {
            let d = pauli(&frame_prime(Family::Class6, 0.7, kx, 0.9)).d;
            assert!(d[1].abs() < 1e-15);
            let e = pauli(&frame_prime(Family::Class1, 0.7, kx, 0.9)).d;
            assert!(e[2].abs() < 1e-15);
        }
    }

    #[test]
    fn class6_spot_values() {
        let a = PI / 3.0;
        let r = winding_numbers(a, 0, 0.0, Family::Class6).unwrap();
        assert_eq!(r.pair(), Some((0, -1)));
        let r = winding_numbers(a, 0, PI, Family::Class6).unwrap();
        assert_eq!(r.pair(), Some((-1, 0)));
        let r = winding_numbers(a, 0, PI / 2.0, Family::Class6).unwrap();
        assert!(matches!(r, WindingResult::Undefined { .. }));
    }

    #[test]
    fn nu2d_caption_points() {
        assert_eq!(nu2d(&CoinAngles::new(PI / 4.0, PI / 6.0)), Some(1));
        assert_eq!(nu2d(&CoinAngles::new(PI / 6.0, PI / 4.0)), Some(-1));
        assert_eq!(nu2d(&CoinAngles::new(PI / 3.0, PI / 3.0)), None);
    }

    #[test]
    fn winding_of_circle() {
        let c: Vec<C64> = (0..100).map(|i| C64::from_polar(2.0, -TAU * i as f64 / 100.0)).collect();
        assert!((winding(&c) + 1.0).abs() < 1e-12);
    }
}
