//! Arc-based evolution on the half plane `x >= 0`.
//!
//! Every vertex carries four arcs `(v; d)` that terminate at `v`. Arc `d = 0`
//! comes from `v + e_x`, `d = 1` from `v - e_x` (or is the self-loop when
//! `v` sits on the boundary), `d = 2` from `v + e_y` and `d = 3` from
//! `v - e_y`. The one-step evolution is `U = S C`, with `C` the local coin and
//! `(S psi)(a) = psi(reverse(a))`.

use rayon::prelude::*;

use crate::angles::{lower_from_upper, rotation, row_only};
use crate::{CoinAngles, FullDistribution, Mat2, Profile, Result, WalkError, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Rectangular window `0 <= x <= xmax`, `-ymax <= y <= ymax`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub xmax: usize,
    pub ymax: usize,
}

impl Window {
    pub fn new(xmax: usize, ymax: usize) -> Self {
        Window { xmax, ymax }
    }

    /// Smallest window that holds `steps` single steps from the origin.
    pub fn light_cone(steps: usize) -> Self {
        Window::new(steps + 1, steps + 1)
    }

    pub fn width(&self) -> usize {
        self.xmax + 1
    }

    pub fn height(&self) -> usize {
        2 * self.ymax + 1
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && x <= self.xmax as i64 && y.abs() <= self.ymax as i64
    }

    fn index(&self, x: usize, y: i64) -> usize {
        (y + self.ymax as i64) as usize * self.width() + x
    }
}

/// Complex amplitudes on every arc of a window.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcField {
    window: Window,
    amp: Vec<[C64; 4]>,
    steps: usize,
    reach: usize,
}

impl ArcField {
    pub fn zeros(window: Window) -> Self {
        ArcField {
            window,
            amp: vec![[ZERO; 4]; window.len()],
            steps: 0,
            reach: 0,
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Number of shift applications since the initial state.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Upper bound on `|x| + |y|` over the support.
    pub fn reach(&self) -> usize {
        self.reach
    }

    pub fn get(&self, x: i64, y: i64, d: usize) -> C64 {
        if self.window.contains(x, y) {
            self.amp[self.window.index(x as usize, y)][d]
        } else {
            ZERO
        }
    }

    pub fn set(&mut self, x: i64, y: i64, d: usize, value: C64) -> Result<()> {
        if !self.window.contains(x, y) || d > 3 {
            return Err(WalkError::Domain(format!("arc ({x},{y};{d}) outside window")));
        }
        let i = self.window.index(x as usize, y);
        self.amp[i][d] = value;
        if value != ZERO {
            self.reach = self.reach.max((x + y.abs()) as usize);
        }
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp
            .iter()
            .flat_map(|a| a.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Squared norm carried by the vertical arcs `d = 2, 3`.
    pub fn vertical_norm_sqr(&self) -> f64 {
        self.amp
            .iter()
            .map(|a| a[2].norm_sqr() + a[3].norm_sqr())
            .sum()
    }

    /// Largest modulus on vertices with `x + |y| > radius`.
    pub fn max_outside_cone(&self, radius: usize) -> f64 {
        let w = self.window;
        let mut worst: f64 = 0.0;
        for y in -(w.ymax as i64)..=w.ymax as i64 {
            for x in 0..=w.xmax {
                if x + y.unsigned_abs() as usize > radius {
                    let a = &self.amp[w.index(x, y)];
                    worst = a.iter().map(|z| z.norm()).fold(worst, f64::max);
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &ArcField) -> f64 {
        assert_eq!(self.window, other.window, "window mismatch");
        self.amp
            .iter()
            .zip(&other.amp)
            .flat_map(|(a, b)| (0..4).map(move |d| (a[d] - b[d]).norm()))
            .fold(0.0, f64::max)
    }

    fn fresh_like(&self) -> ArcField {
        ArcField::zeros(self.window)
    }
}

/// The delta state on the origin self-loop `((0,0); 1)`.
pub fn initial_state(window: Window) -> ArcField {
    let mut f = ArcField::zeros(window);
    f.set(0, 0, 1, C64::new(1.0, 0.0)).expect("origin is always inside");
    f
}

#[derive(Clone, Copy)]
struct Coin {
    ca: f64,
    sa: f64,
    cb: f64,
    sb: f64,
}

impl Coin {
    fn new(angles: &CoinAngles) -> Self {
        let (sa, ca) = angles.alpha.sin_cos();
        let (sb, cb) = angles.beta.sin_cos();
        Coin { ca, sa, cb, sb }
    }

    #[inline(always)]
    fn out(&self, p: &[C64; 4], d: usize) -> C64 {
        match d {
            0 => p[2] * self.sa + p[3] * self.ca,
            1 => p[2] * self.ca - p[3] * self.sa,
            2 => p[0] * self.sb + p[1] * self.cb,
            _ => p[0] * self.cb - p[1] * self.sb,
        }
    }

    #[inline(always)]
    fn apply(&self, p: &[C64; 4]) -> [C64; 4] {
        [self.out(p, 0), self.out(p, 1), self.out(p, 2), self.out(p, 3)]
    }
}

/// Local coin `C` on every vertex.
pub fn coin_apply(field: &ArcField, angles: &CoinAngles) -> ArcField {
    let coin = Coin::new(angles);
    let mut out = field.clone();
    out.amp.par_iter_mut().for_each(|a| *a = coin.apply(a));
    out
}

fn truncation(x: usize, y: i64, z: C64) -> WalkError {
    WalkError::Truncation {
        x: x as i64,
        y,
        amplitude: z.norm(),
    }
}

/// Amplitudes that `S` would send outside the window, after `pre` is applied.
fn check_rim<F: Fn(&[C64; 4], usize) -> C64>(field: &ArcField, pre: F) -> Result<()> {
    let w = field.window;
    if field.reach < w.xmax.min(w.ymax) {
        return Ok(());
    }
    let ym = w.ymax as i64;
    for y in -ym..=ym {
        let z = pre(&field.amp[w.index(w.xmax, y)], 0);
        if z != ZERO {
            return Err(truncation(w.xmax, y, z));
        }
    }
    for x in 0..=w.xmax {
        let z = pre(&field.amp[w.index(x, ym)], 2);
        if z != ZERO {
            return Err(truncation(x, ym, z));
        }
        let z = pre(&field.amp[w.index(x, -ym)], 3);
        if z != ZERO {
            return Err(truncation(x, -ym, z));
        }
    }
    Ok(())
}

/// Writes `S(pre(field))` into `out`, touching only the light-cone rows.
fn shift_into<F>(field: &ArcField, out: &mut ArcField, pre: F) -> Result<()>
where
    F: Fn(&[C64; 4], usize) -> C64 + Sync,
{
    check_rim(field, &pre)?;
    let w = field.window;
    let reach = (field.reach + 1).max(out.reach);
    let width = w.width();
    let src = &field.amp;
    let ym = w.ymax as i64;
    let at = |x: usize, y: i64| src[(y + ym) as usize * width + x];
    out.amp
        .par_chunks_mut(width)
        .enumerate()
        .for_each(|(row, dst)| {
            let y = row as i64 - ym;
            let ay = y.unsigned_abs() as usize;
            if ay > reach {
                return;
            }
            let xend = (reach - ay).min(w.xmax);
            for x in 0..=xend {
                let d0 = if x < w.xmax { pre(&at(x + 1, y), 1) } else { ZERO };
                let d1 = if x == 0 {
                    pre(&at(0, y), 1)
                } else {
                    pre(&at(x - 1, y), 0)
                };
                let d2 = if y < ym { pre(&at(x, y + 1), 3) } else { ZERO };
                let d3 = if y > -ym { pre(&at(x, y - 1), 2) } else { ZERO };
                dst[x] = [d0, d1, d2, d3];
            }
        });
    out.reach = (field.reach + 1).min(w.xmax + w.ymax);
    out.steps = field.steps + 1;
    Ok(())
}

/// Flip-flop shift `S`; the self-loops are fixed.
pub fn shift_apply(field: &ArcField) -> Result<ArcField> {
    let mut out = field.fresh_like();
    shift_into(field, &mut out, |p, d| p[d])?;
    Ok(out)
}

/// One step `U = S C`.
pub fn step(field: &ArcField, angles: &CoinAngles) -> Result<ArcField> {
    let mut out = field.fresh_like();
    step_into(field, angles, &mut out)?;
    Ok(out)
}

/// One step written into a caller-owned buffer of the same window.
///
/// `out` may hold any earlier state of the same walk; every cell it could
/// still occupy is overwritten.
pub fn step_into(field: &ArcField, angles: &CoinAngles, out: &mut ArcField) -> Result<()> {
    if field.window != out.window {
        return Err(WalkError::Domain("window mismatch".into()));
    }
    let coin = Coin::new(angles);
    shift_into(field, out, move |p, d| coin.out(p, d))
}

/// `U^n psi`.
pub fn evolve(field: &ArcField, angles: &CoinAngles, n: usize) -> Result<ArcField> {
    evolve_with(field, angles, n, |_| {})
}

/// `U^n psi`, calling `observe` on every intermediate state (including the first).
pub fn evolve_with<F: FnMut(&ArcField)>(
    field: &ArcField,
    angles: &CoinAngles,
    n: usize,
    mut observe: F,
) -> Result<ArcField> {
    let mut cur = field.clone();
    observe(&cur);
    if n == 0 {
        return Ok(cur);
    }
    let mut next = cur.fresh_like();
    for _ in 0..n {
        step_into(&cur, angles, &mut next)?;
        std::mem::swap(&mut cur, &mut next);
        observe(&cur);
    }
    Ok(cur)
}

fn require_even(field: &ArcField) -> Result<usize> {
    if field.steps % 2 == 1 {
        return Err(WalkError::OddTime {
            steps: field.steps,
        });
    }
    Ok(field.steps / 2)
}

/// `nu_n(j) = |psi((0, j); 1)|^2` for a state after `2n` steps.
pub fn boundary_distribution(field: &ArcField) -> Result<Profile> {
    require_even(field)?;
    let ym = field.window.ymax as i64;
    let values = (-ym..=ym)
        .map(|y| field.get(0, y, 1).norm_sqr())
        .collect();
    Ok(Profile::new(-ym, values))
}

/// Column `2x` holds `|psi((x,m);1)|^2`, column `2x+1` holds `|psi((x,m);0)|^2`.
pub fn full_distribution(field: &ArcField) -> Result<FullDistribution> {
    require_even(field)?;
    let w = field.window;
    let ym = w.ymax as i64;
    let mut columns = Vec::with_capacity(2 * w.width());
    for x in 0..=w.xmax as i64 {
        for d in [1, 0] {
            let values = (-ym..=ym).map(|y| field.get(x, y, d).norm_sqr()).collect();
            columns.push(Profile::new(-ym, values));
        }
    }
    Ok(FullDistribution { columns })
}

/// Two-component field per vertex, the image of the horizontal arcs.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField {
    window: Window,
    amp: Vec<[C64; 2]>,
    reach: usize,
}

impl SpinorField {
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn get(&self, x: i64, y: i64, c: usize) -> C64 {
        if self.window.contains(x, y) {
            self.amp[self.window.index(x as usize, y)][c]
        } else {
            ZERO
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .sum()
    }

    pub fn max_abs_diff(&self, other: &SpinorField) -> f64 {
        self.amp
            .iter()
            .zip(&other.amp)
            .flat_map(|(a, b)| [(a[0] - b[0]).norm(), (a[1] - b[1]).norm()])
            .fold(0.0, f64::max)
    }
}

/// Component 0 takes the arc `(x; 0)`, component 1 the arc `(x; 1)`.
pub fn to_spinor(field: &ArcField) -> Result<SpinorField> {
    if field.vertical_norm_sqr() != 0.0 {
        return Err(WalkError::Domain(
            "vertical arcs carry amplitude; the spinor image is undefined".into(),
        ));
    }
    Ok(SpinorField {
        window: field.window,
        amp: field.amp.iter().map(|a| [a[0], a[1]]).collect(),
        reach: field.reach,
    })
}

pub fn from_spinor(spinor: &SpinorField, steps: usize) -> ArcField {
    ArcField {
        window: spinor.window,
        amp: spinor.amp.iter().map(|a| [a[0], a[1], ZERO, ZERO]).collect(),
        steps,
        reach: spinor.reach,
    }
}

struct GammaBlocks {
    qq: Mat2,
    qp: Mat2,
    pq: Mat2,
    pp: Mat2,
    sq: Mat2,
    sp: Mat2,
    qb: Mat2,
    pb: Mat2,
}

impl GammaBlocks {
    fn new(angles: &CoinAngles) -> Self {
        let ha = rotation(angles.alpha);
        let hb = rotation(angles.beta);
        let (pa, qa, sa) = (row_only(&ha, 0), row_only(&ha, 1), lower_from_upper(&ha));
        let (pb, qb) = (row_only(&hb, 0), row_only(&hb, 1));
        GammaBlocks {
            qq: qa * qb,
            qp: qa * pb,
            pq: pa * qb,
            pp: pa * pb,
            sq: sa * qb,
            sp: sa * pb,
            qb,
            pb,
        }
    }
}

fn mv(m: &Mat2, v: &[C64; 2]) -> [C64; 2] {
    [
        m[(0, 0)] * v[0] + m[(0, 1)] * v[1],
        m[(1, 0)] * v[0] + m[(1, 1)] * v[1],
    ]
}

fn add(a: [C64; 2], b: [C64; 2]) -> [C64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

fn nonzero(v: [C64; 2]) -> bool {
    v[0] != ZERO || v[1] != ZERO
}

/// Vertex form of `U^2` on the horizontal arcs.
pub fn gamma_step(spinor: &SpinorField, angles: &CoinAngles) -> Result<SpinorField> {
    let g = GammaBlocks::new(angles);
    let w = spinor.window;
    let ym = w.ymax as i64;
    let xm = w.xmax as i64;
    let at = |x: i64, y: i64| -> [C64; 2] {
        if w.contains(x, y) {
            spinor.amp[w.index(x as usize, y)]
        } else {
            [ZERO; 2]
        }
    };
    for y in -ym..=ym {
        let p = at(xm, y);
        if nonzero(mv(&g.qq, &p)) || nonzero(mv(&g.qp, &p)) {
            return Err(WalkError::Truncation {
                x: xm,
                y,
                amplitude: p[0].norm().max(p[1].norm()),
            });
        }
    }
    for x in 0..=xm {
        for (y, half) in [(ym, &g.qb), (-ym, &g.pb)] {
            let p = at(x, y);
            if nonzero(mv(half, &p)) {
                return Err(WalkError::Truncation {
                    x,
                    y,
                    amplitude: p[0].norm().max(p[1].norm()),
                });
            }
        }
    }
    let mut amp = vec![[ZERO; 2]; w.len()];
    amp.par_chunks_mut(w.width())
        .enumerate()
        .for_each(|(row, dst)| {
            let y = row as i64 - ym;
            for (x, cell) in dst.iter_mut().enumerate() {
                let x = x as i64;
                let right = add(mv(&g.pq, &at(x + 1, y - 1)), mv(&g.pp, &at(x + 1, y + 1)));
                let left = if x == 0 {
                    add(mv(&g.sq, &at(0, y - 1)), mv(&g.sp, &at(0, y + 1)))
                } else {
                    add(mv(&g.qq, &at(x - 1, y - 1)), mv(&g.qp, &at(x - 1, y + 1)))
                };
                *cell = add(left, right);
            }
        });
    Ok(SpinorField {
        window: w,
        amp,
        reach: (spinor.reach + 2).min(w.xmax + w.ymax),
    })
}

/// Boundary rule of the moving shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftVariant {
    /// `|0,y>|L> -> |0,y>|R>`
    Moving,
    /// `|0,y>|L> -> i |0,y>|R>`
    MovingPhase,
}

impl ShiftVariant {
    fn boundary_phase(self) -> C64 {
        match self {
            ShiftVariant::Moving => C64::new(1.0, 0.0),
            ShiftVariant::MovingPhase => C64::new(0.0, 1.0),
        }
    }
}

/// Arc labels in the moving-shift picture: `L, R, D, U` are `d = 0, 1, 2, 3`.
pub const L: usize = 0;
pub const R: usize = 1;
pub const D: usize = 2;
pub const U: usize = 3;

/// Moving shift: `R` hops to `x+1`, `L` to `x-1`, `U` to `y+1`, `D` to `y-1`;
/// on the boundary `L` turns into `R`.
pub fn moving_shift(field: &ArcField, variant: ShiftVariant) -> Result<ArcField> {
    let w = field.window;
    let ym = w.ymax as i64;
    for y in -ym..=ym {
        let z = field.get(w.xmax as i64, y, R);
        if z != ZERO {
            return Err(truncation(w.xmax, y, z));
        }
    }
    for x in 0..=w.xmax {
        for (y, d) in [(ym, U), (-ym, D)] {
            let z = field.get(x as i64, y, d);
            if z != ZERO {
                return Err(truncation(x, y, z));
            }
        }
    }
    let ph = variant.boundary_phase();
    let mut out = field.fresh_like();
    for y in -ym..=ym {
        for x in 0..=w.xmax as i64 {
            let i = w.index(x as usize, y);
            out.amp[i] = [
                field.get(x + 1, y, L),
                if x == 0 {
                    ph * field.get(0, y, L)
                } else {
                    field.get(x - 1, y, R)
                },
                field.get(x, y + 1, D),
                field.get(x, y - 1, U),
            ];
        }
    }
    out.reach = (field.reach + 1).min(w.xmax + w.ymax);
    out.steps = field.steps + 1;
    Ok(out)
}

/// Applies the same 4x4 matrix (rows and columns in arc order) on every vertex.
pub fn local_apply(field: &ArcField, m: &[[C64; 4]; 4]) -> ArcField {
    let mut out = field.clone();
    for a in out.amp.iter_mut() {
        let p = *a;
        for (d, row) in m.iter().enumerate() {
            a[d] = (0..4).map(|e| row[e] * p[e]).sum();
        }
    }
    out
}

/// The local map `S''^{-1} S'`, which swaps `L <-> R` and `D <-> U`.
pub fn flip_to_moving(field: &ArcField) -> ArcField {
    let mut out = field.clone();
    for a in out.amp.iter_mut() {
        *a = [a[1], a[0], a[3], a[2]];
    }
    out
}

/// Coin of the moving-shift picture, `C'' = S''^{-1} S' C`.
pub fn moving_coin(field: &ArcField, angles: &CoinAngles) -> ArcField {
    flip_to_moving(&coin_apply(field, angles))
}

/// `S'' C''`; agrees with [`step`] for [`ShiftVariant::Moving`].
pub fn moving_step(field: &ArcField, angles: &CoinAngles, variant: ShiftVariant) -> Result<ArcField> {
    moving_shift(&moving_coin(field, angles), variant)
}
