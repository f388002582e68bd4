//! Wave-number decomposed walk on the half line and the inverse transform
//! back to the boundary distribution.

use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::angles::{lower_from_upper, phase, rotation, row_only, upper_from_lower};
use crate::{CoinAngles, FullDistribution, Mat2, Profile, Result, WalkError, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// `H_k = H_alpha D(k) H_beta`
pub fn coin_matrix(k: f64, angles: &CoinAngles) -> Mat2 {
    rotation(angles.alpha) * phase(k) * rotation(angles.beta)
}

/// Two-component amplitudes on `x = 0..=xmax` for a fixed wave number.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfLineState {
    pub k: f64,
    pub amp: Vec<[C64; 2]>,
}

impl HalfLineState {
    /// `delta(x) [0, 1]^T`
    pub fn initial(k: f64, xmax: usize) -> Self {
        let mut amp = vec![[ZERO; 2]; xmax + 1];
        amp[0][1] = C64::new(1.0, 0.0);
        HalfLineState { k, amp }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .sum()
    }

    pub fn max_abs_diff(&self, other: &HalfLineState) -> f64 {
        let n = self.amp.len().max(other.amp.len());
        let get = |s: &HalfLineState, x: usize, c: usize| s.amp.get(x).map_or(ZERO, |a| a[c]);
        (0..n)
            .flat_map(|x| (0..2).map(move |c| (x, c)))
            .map(|(x, c)| (get(self, x, c) - get(other, x, c)).norm())
            .fold(0.0, f64::max)
    }
}

/// Boundary block of the half-line recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryBlock {
    /// `|1><0| H`, the block that matches the lattice walk.
    Lower,
    /// `|0><1| H`
    Upper,
}

/// The three blocks `P = |0><0|H`, `Q = |1><1|H` and the boundary block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypeOneBlocks {
    pub p: Mat2,
    pub q: Mat2,
    pub s: Mat2,
}

impl TypeOneBlocks {
    pub fn new(h: &Mat2, boundary: BoundaryBlock) -> Self {
        TypeOneBlocks {
            p: row_only(h, 0),
            q: row_only(h, 1),
            s: match boundary {
                BoundaryBlock::Lower => lower_from_upper(h),
                BoundaryBlock::Upper => upper_from_lower(h),
            },
        }
    }
}

fn mv(m: &Mat2, v: &[C64; 2]) -> [C64; 2] {
    [
        m[(0, 0)] * v[0] + m[(0, 1)] * v[1],
        m[(1, 0)] * v[0] + m[(1, 1)] * v[1],
    ]
}

/// `phi'(x) = P phi(x+1) + Q phi(x-1)` for `x >= 1`, `phi'(0) = P phi(1) + S phi(0)`.
pub fn type_one_step(state: &HalfLineState, blocks: &TypeOneBlocks) -> Result<HalfLineState> {
    let xm = state.amp.len() - 1;
    let lost = mv(&blocks.q, &state.amp[xm]);
    if lost[0] != ZERO || lost[1] != ZERO {
        return Err(WalkError::Truncation {
            x: xm as i64,
            y: 0,
            amplitude: lost[0].norm().max(lost[1].norm()),
        });
    }
    let mut amp = vec![[ZERO; 2]; xm + 1];
    for x in 0..=xm {
        let right = if x < xm {
            mv(&blocks.p, &state.amp[x + 1])
        } else {
            [ZERO; 2]
        };
        let left = if x == 0 {
            mv(&blocks.s, &state.amp[0])
        } else {
            mv(&blocks.q, &state.amp[x - 1])
        };
        amp[x] = [right[0] + left[0], right[1] + left[1]];
    }
    Ok(HalfLineState { k: state.k, amp })
}

/// One application of the half-line walk with coin `h`, restricted to `x <= limit`.
fn step_with(state: &HalfLineState, h: &Mat2, limit: usize) -> Result<HalfLineState> {
    let xm = state.amp.len() - 1;
    let top = (h[(1, 0)] * state.amp[xm][0] + h[(1, 1)] * state.amp[xm][1]).norm();
    if top != 0.0 {
        return Err(WalkError::Truncation {
            x: xm as i64,
            y: 0,
            amplitude: top,
        });
    }
    let row = |c: usize, v: &[C64; 2]| h[(c, 0)] * v[0] + h[(c, 1)] * v[1];
    let mut amp = vec![[ZERO; 2]; xm + 1];
    let end = limit.min(xm);
    for x in 0..=end {
        amp[x][0] = if x < xm { row(0, &state.amp[x + 1]) } else { ZERO };
        amp[x][1] = if x == 0 {
            row(0, &state.amp[0])
        } else {
            row(1, &state.amp[x - 1])
        };
    }
    Ok(HalfLineState { k: state.k, amp })
}

/// One step of the half-line walk at wave number `state.k`.
pub fn halfline_step(state: &HalfLineState, angles: &CoinAngles) -> Result<HalfLineState> {
    let h = coin_matrix(state.k, angles);
    step_with(state, &h, usize::MAX)
}

/// `n` steps from `delta(x) [0,1]^T` on the window `x <= n + 1`.
pub fn evolve_k(angles: &CoinAngles, k: f64, n: usize) -> Result<HalfLineState> {
    let h = coin_matrix(k, angles);
    let mut s = HalfLineState::initial(k, n + 1);
    for t in 0..n {
        s = step_with(&s, &h, t + 1)?;
    }
    Ok(s)
}

fn check_grid(n: usize, m: usize) -> Result<()> {
    if m < 2 * n + 1 {
        return Err(WalkError::Aliasing {
            grid: m,
            degree: n,
        });
    }
    Ok(())
}

fn grid(m: usize) -> Vec<f64> {
    (0..m)
        .map(|l| std::f64::consts::TAU * l as f64 / m as f64)
        .collect()
}

/// Inverse transform of samples `f(k_l)` on the uniform grid: returns the profile
/// of `|tau(j)|^2` with `tau(j) = (1/M) sum_l f(k_l) e^{-i k_l j}`.
fn invert(samples: Vec<C64>) -> Profile {
    let m = samples.len();
    let mut buf = samples;
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let half = (m - 1) / 2;
    let lo = half as i64 + 1 - m as i64;
    let mut values = Vec::with_capacity(m);
    for j in lo..=half as i64 {
        let idx = if j < 0 { (j + m as i64) as usize } else { j as usize };
        values.push((buf[idx] / m as f64).norm_sqr());
    }
    Profile::new(lo, values)
}

/// `nu_n(j)` through the half-line walk on an `m`-point wave-number grid.
pub fn reconstruct_boundary(angles: &CoinAngles, n: usize, m: usize) -> Result<Profile> {
    check_grid(n, m)?;
    let samples = grid(m)
        .par_iter()
        .map(|&k| evolve_k(angles, k, n).map(|s| s.amp[0][1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(invert(samples))
}

/// `nu_t(j)` for every `t = 0..=n` from a single pass over the grid.
pub fn boundary_history(angles: &CoinAngles, n: usize, m: usize) -> Result<Vec<Profile>> {
    check_grid(n, m)?;
    let traces = grid(m)
        .par_iter()
        .map(|&k| {
            let h = coin_matrix(k, angles);
            let mut s = HalfLineState::initial(k, n + 1);
            let mut trace = Vec::with_capacity(n + 1);
            trace.push(s.amp[0][1]);
            for t in 0..n {
                s = step_with(&s, &h, t + 1)?;
                trace.push(s.amp[0][1]);
            }
            Ok(trace)
        })
        .collect::<Result<Vec<Vec<C64>>>>()?;
    Ok((0..=n)
        .map(|t| invert(traces.iter().map(|tr| tr[t]).collect()))
        .collect())
}

/// Column-resolved `nu_n(c, m)`; column `2x` from component 1, `2x+1` from component 0.
pub fn reconstruct_full(angles: &CoinAngles, n: usize, m: usize) -> Result<FullDistribution> {
    check_grid(n, m)?;
    let states = grid(m)
        .par_iter()
        .map(|&k| evolve_k(angles, k, n))
        .collect::<Result<Vec<_>>>()?;
    let mut columns = Vec::with_capacity(2 * (n + 1));
    for x in 0..=n {
        for c in [1, 0] {
            columns.push(invert(states.iter().map(|s| s.amp[x][c]).collect()));
        }
    }
    Ok(FullDistribution { columns })
}
