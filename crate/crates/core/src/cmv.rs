//! CMV matrices with Verblunsky coefficients `(eta, 0, eta, 0, ...)`, the
//! phase map onto the half-line walk, and the spectral measure of `e_0`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Schur};

use crate::halfline::{coin_matrix, HalfLineState};
use crate::{CoinAngles, Mat2, Result, WalkError, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// `eta(k) = conj(<0|H_k|1>) = -cos k sin(a+b) + i sin k sin(a-b)`
pub fn verblunsky(k: f64, angles: &CoinAngles) -> C64 {
    coin_matrix(k, angles)[(0, 1)].conj()
}

/// Truncated CMV matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CmvOperator {
    pub eta: C64,
    pub matrix: DMatrix<C64>,
}

impl CmvOperator {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rho(&self) -> f64 {
        (1.0 - self.eta.norm_sqr()).max(0.0).sqrt()
    }

    /// `(C^T)^n v`
    pub fn transpose_power_apply(&self, v: &DVector<C64>, n: usize) -> DVector<C64> {
        let t = self.matrix.transpose();
        let mut out = v.clone();
        for _ in 0..n {
            out = &t * out;
        }
        out
    }
}

fn theta_block(a: C64) -> [[C64; 2]; 2] {
    let rho = C64::new((1.0 - a.norm_sqr()).max(0.0).sqrt(), 0.0);
    [[a.conj(), rho], [rho, -a]]
}

/// `L M` with `L = Theta_0 + Theta_2 + ...` and `M = 1 + Theta_1 + Theta_3 + ...`.
/// A block cut by the truncation keeps only its corner `conj(a)`.
pub fn cmv_from_coefficients(coef: &[C64]) -> DMatrix<C64> {
    let n = coef.len();
    let mut l = DMatrix::<C64>::zeros(n, n);
    let mut m = DMatrix::<C64>::zeros(n, n);
    m[(0, 0)] = ONE;
    for (j, &a) in coef.iter().enumerate() {
        let target = if j % 2 == 0 { &mut l } else { &mut m };
        let b = theta_block(a);
        if j + 1 < n {
            for r in 0..2 {
                for c in 0..2 {
                    target[(j + r, j + c)] = b[r][c];
                }
            }
        } else {
            target[(j, j)] = b[0][0];
        }
    }
    l * m
}

fn check_eta(eta: C64) -> Result<()> {
    if eta.norm() > 1.0 + 1e-12 {
        return Err(WalkError::Domain(format!("|eta| = {} exceeds 1", eta.norm())));
    }
    Ok(())
}

fn coefficients(eta: C64, n: usize) -> Vec<C64> {
    (0..n).map(|j| if j % 2 == 0 { eta } else { ZERO }).collect()
}

/// `N x N` truncation of the CMV matrix with coefficients `(eta, 0, eta, 0, ...)`.
pub fn build_cmv(eta: C64, n: usize) -> Result<CmvOperator> {
    check_eta(eta)?;
    if n < 4 {
        return Err(WalkError::Domain(format!("truncation size {n} below 4")));
    }
    Ok(CmvOperator {
        eta,
        matrix: cmv_from_coefficients(&coefficients(eta, n)),
    })
}

/// Unitary truncation: the last coefficient is replaced by the unimodular `last`.
pub fn build_cmv_unitary(eta: C64, n: usize, last: C64) -> Result<CmvOperator> {
    check_eta(eta)?;
    if n < 4 || (last.norm() - 1.0).abs() > 1e-12 {
        return Err(WalkError::Domain("need n >= 4 and |last| = 1".into()));
    }
    let mut coef = coefficients(eta, n);
    coef[n - 1] = last;
    Ok(CmvOperator {
        eta,
        matrix: cmv_from_coefficients(&coef),
    })
}

fn arg_or_zero(z: C64) -> f64 {
    if z == ZERO {
        0.0
    } else {
        z.arg()
    }
}

/// Phases `omega(2j) = j arg<0|H|0>`, `omega(2j+1) = -(j+1) arg<1|H|1>`.
fn omega(h: &Mat2, j: usize) -> f64 {
    let half = (j / 2) as f64;
    if j % 2 == 0 {
        half * arg_or_zero(h[(0, 0)])
    } else {
        -(half + 1.0) * arg_or_zero(h[(1, 1)])
    }
}

/// Interleaves the spinor into one sequence: index `2x` takes component 1
/// of site `x`, index `2x+1` takes component 0, each with a phase.
pub fn lambda_map(state: &HalfLineState, angles: &CoinAngles) -> DVector<C64> {
    let h = coin_matrix(state.k, angles);
    DVector::from_fn(2 * state.amp.len(), |j, _| {
        let c = if j % 2 == 0 { 1 } else { 0 };
        C64::from_polar(1.0, omega(&h, j)) * state.amp[j / 2][c]
    })
}

pub fn lambda_inverse(seq: &DVector<C64>, k: f64, angles: &CoinAngles) -> HalfLineState {
    let h = coin_matrix(k, angles);
    let sites = seq.len().div_ceil(2);
    let mut amp = vec![[ZERO; 2]; sites];
    for (j, &v) in seq.iter().enumerate() {
        let c = if j % 2 == 0 { 1 } else { 0 };
        amp[j / 2][c] = C64::from_polar(1.0, -omega(&h, j)) * v;
    }
    HalfLineState { k, amp }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointMass {
    pub theta: f64,
    pub mass: f64,
}

/// Spectral measure of `e_0` for the CMV matrix with coefficients `(eta, 0, eta, 0, ...)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralMeasure {
    pub eta: C64,
    pub rho: f64,
    pub point: Option<PointMass>,
}

/// Quasi-energy of the point mass: `arcsin(-Im eta)` for `Re eta >= 0`,
/// `pi - arcsin(-Im eta)` otherwise, reduced to [0, 2pi).
pub fn point_angle(eta: C64) -> f64 {
    let a = (-eta.im).clamp(-1.0, 1.0).asin();
    let t = if eta.re >= 0.0 { a } else { PI - a };
    t.rem_euclid(TAU)
}

/// `|Re eta| / sqrt(1 - Im^2 eta)`
pub fn point_weight(eta: C64) -> f64 {
    let d = (1.0 - eta.im * eta.im).max(0.0).sqrt();
    if d == 0.0 {
        0.0
    } else {
        (eta.re.abs() / d).min(1.0)
    }
}

const PURE_POINT_TOL: f64 = 1e-14;
const MIN_NODES: usize = 32;
const MAX_NODES: usize = 1 << 17;
const QUAD_TOL: f64 = 1e-13;

pub fn spectral_measure(eta: C64) -> Result<SpectralMeasure> {
    check_eta(eta)?;
    if eta.norm() >= 1.0 - PURE_POINT_TOL {
        return Ok(SpectralMeasure {
            eta,
            rho: 0.0,
            point: Some(PointMass {
                theta: arg_or_zero(eta.conj()).rem_euclid(TAU),
                mass: 1.0,
            }),
        });
    }
    let rho = (1.0 - eta.norm_sqr()).sqrt();
    let point = (eta.re != 0.0).then(|| PointMass {
        theta: point_angle(eta),
        mass: point_weight(eta),
    });
    Ok(SpectralMeasure { eta, rho, point })
}

impl SpectralMeasure {
    pub fn is_pure_point(&self) -> bool {
        self.rho == 0.0
    }

    /// Density of the absolutely continuous part with respect to `dtheta / 2pi`.
    pub fn weight(&self, theta: f64) -> f64 {
        let c = theta.cos();
        if c.abs() >= self.rho {
            return 0.0;
        }
        (self.rho * self.rho - c * c).sqrt() / (theta.sin() + self.eta.im).abs()
    }

    /// Nodes `z = e^{i theta}` on both bands with weights of the continuous part.
    ///
    /// With `cos theta = rho cos phi` the band integrand becomes a smooth even
    /// periodic function of `phi`, so the midpoint rule converges spectrally.
    fn nodes(&self, n: usize) -> Vec<(C64, f64)> {
        let mut out = Vec::with_capacity(2 * n);
        let h = PI / n as f64;
        let scale = self.rho * self.rho * h / TAU;
        for i in 0..n {
            let phi = h * (i as f64 + 0.5);
            let c = self.rho * phi.cos();
            let s = (1.0 - c * c).sqrt();
            let w = scale * phi.sin().powi(2) / s;
            out.push((C64::new(c, s), w / (s + self.eta.im).abs()));
            out.push((C64::new(c, -s), w / (self.eta.im - s).abs()));
        }
        out
    }

    /// Integrates every component of `f` against the continuous part, doubling
    /// the node count until successive results agree.
    fn integrate_ac<F>(&self, len: usize, f: F) -> Result<Vec<C64>>
    where
        F: Fn(C64, &mut [C64]),
    {
        let mut buf = vec![ZERO; len];
        let eval = |n: usize, buf: &mut Vec<C64>| {
            let mut acc = vec![ZERO; len];
            for (z, w) in self.nodes(n) {
                f(z, buf);
                for (a, b) in acc.iter_mut().zip(buf.iter()) {
                    *a += *b * w;
                }
            }
            acc
        };
        let mut n = MIN_NODES;
        let mut prev = eval(n, &mut buf);
        loop {
            n *= 2;
            let cur = eval(n, &mut buf);
            let change = cur
                .iter()
                .zip(&prev)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if change < QUAD_TOL {
                return Ok(cur);
            }
            if n >= MAX_NODES {
                return Err(WalkError::Quadrature {
                    nodes: n,
                    last_change: change,
                });
            }
            prev = cur;
        }
    }

    /// Mass of the continuous part.
    pub fn ac_mass(&self) -> Result<f64> {
        if self.is_pure_point() {
            return Ok(0.0);
        }
        Ok(self.integrate_ac(1, |_, out| out[0] = ONE)?[0].re)
    }

    pub fn total_mass(&self) -> Result<f64> {
        Ok(self.ac_mass()? + self.point.map_or(0.0, |p| p.mass))
    }

    /// `(C^n)_{0,j}` for `j = 0..=jmax`, as `int z^n f_j(z) dmu(z)`.
    pub fn matrix_row(&self, n: usize, jmax: usize) -> Result<Vec<C64>> {
        let eta = self.eta;
        if self.is_pure_point() {
            let mut row = vec![ZERO; jmax + 1];
            row[0] = eta.conj().powu(n as u32);
            return Ok(row);
        }
        let rho = self.rho;
        let mut row = self.integrate_ac(jmax + 1, |z, out| {
            fill_eigen_components(z, eta, rho, out);
            let zn = z.powu(n as u32);
            for v in out.iter_mut() {
                *v *= zn;
            }
        })?;
        if let Some(p) = self.point {
            let z0 = C64::from_polar(1.0, p.theta);
            let lam = edge_lambda(eta);
            let zn = z0.powu(n as u32) * p.mass;
            for (j, v) in row.iter_mut().enumerate() {
                let e = if j % 2 == 0 { j / 2 } else { j / 2 + 1 };
                *v += zn * lam.powi(e as i32);
            }
        }
        Ok(row)
    }

    /// `(C^n)_{0,0}`
    pub fn moment(&self, n: usize) -> Result<C64> {
        Ok(self.matrix_row(n, 0)?[0])
    }
}

/// Formal eigenvector `f_j(z)` of `C^T` normalised by `f_0 = 1`.
fn fill_eigen_components(z: C64, eta: C64, rho: f64, out: &mut [C64]) {
    if out.is_empty() {
        return;
    }
    out[0] = ONE;
    if out.len() > 1 {
        out[1] = (z - eta.conj()) / rho;
    }
    let mut j = 2;
    while j < out.len() {
        out[j] = (out[j - 2] * rho - eta * out[j - 1]) / z;
        if j + 1 < out.len() {
            out[j + 1] = (z * out[j - 1] - eta.conj() * out[j]) / rho;
        }
        j += 2;
    }
}

/// `(C_k^n)_{0,0}`, the return amplitude of the half-line walk.
pub fn return_amplitude(angles: &CoinAngles, k: f64, n: usize) -> Result<C64> {
    spectral_measure(verblunsky(k, angles))?.moment(n)
}

/// `sgn(Re eta) / rho * (sqrt(1 - Im^2 eta) - |Re eta|)`
pub fn edge_lambda(eta: C64) -> f64 {
    let rho = (1.0 - eta.norm_sqr()).max(0.0).sqrt();
    if rho == 0.0 {
        return 0.0;
    }
    eta.re.signum() * ((1.0 - eta.im * eta.im).sqrt() - eta.re.abs()) / rho
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeEigen {
    pub lambda: f64,
    pub theta0: f64,
    pub vector: DVector<C64>,
    /// `||C^T v - e^{i theta0} v|| / ||v||` on the `N x N` truncation.
    pub residual: f64,
}

/// Edge eigenvector `x_{2j} = lambda^j`, `x_{2j+1} = lambda^{j+1}` of `C^T`.
pub fn edge_eigenvector(eta: C64, n: usize) -> Result<EdgeEigen> {
    if eta.re == 0.0 {
        return Err(WalkError::NoPointSpectrum);
    }
    let op = build_cmv(eta, n)?;
    let lambda = edge_lambda(eta);
    let theta0 = point_angle(eta);
    let vector = DVector::from_fn(n, |j, _| {
        let e = if j % 2 == 0 { j / 2 } else { j / 2 + 1 };
        C64::new(lambda.powi(e as i32), 0.0)
    });
    let z0 = C64::from_polar(1.0, theta0);
    let r = op.matrix.transpose() * &vector - &vector * z0;
    Ok(EdgeEigen {
        lambda,
        theta0,
        residual: r.norm() / vector.norm(),
        vector,
    })
}

/// Eigenphases in [0, 2pi) of a unitary truncation with the weight `|v_0|^2`
/// of each normalised eigenvector, sorted by phase.
pub fn unitary_spectrum(eta: C64, n: usize) -> Result<Vec<(f64, f64)>> {
    let op = build_cmv_unitary(eta, n, ONE)?;
    let schur = Schur::try_new(op.matrix.transpose(), 1e-15, 10_000)
        .ok_or(WalkError::Domain("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|i| (t[(i, i)].arg().rem_euclid(TAU), q[(0, i)].norm_sqr()))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}
