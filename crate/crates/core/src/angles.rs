use std::f64::consts::TAU;

use crate::{Mat2, C64};

/// Tolerance below which a signed quantity counts as zero.
pub const SIGN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x > SIGN_TOL {
            Sign::Plus
        } else if x < -SIGN_TOL {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }

    pub fn value(self) -> i32 {
        match self {
            Sign::Minus => -1,
            Sign::Zero => 0,
            Sign::Plus => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Zero => '0',
            Sign::Plus => '+',
        }
    }
}

/// Coin angles (alpha, beta), both reduced to [0, 2pi).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinAngles {
    pub alpha: f64,
    pub beta: f64,
}

impl CoinAngles {
    pub fn new(alpha: f64, beta: f64) -> Self {
        CoinAngles {
            alpha: alpha.rem_euclid(TAU),
            beta: beta.rem_euclid(TAU),
        }
    }

    /// sin(alpha - beta)
    pub fn r(&self) -> f64 {
        (self.alpha - self.beta).sin()
    }

    /// sin(alpha + beta)
    pub fn s(&self) -> f64 {
        (self.alpha + self.beta).sin()
    }

    /// sin(2 alpha) sin(2 beta)
    pub fn sin2_product(&self) -> f64 {
        (2.0 * self.alpha).sin() * (2.0 * self.beta).sin()
    }

    pub fn signs(&self) -> [Sign; 3] {
        [
            Sign::of(self.sin2_product()),
            Sign::of(self.s()),
            Sign::of(self.r()),
        ]
    }

    pub fn sign_label(&self) -> String {
        let [a, b, c] = self.signs();
        format!("({},{},{})", a.symbol(), b.symbol(), c.symbol())
    }
}

/// Rotation H_g = [[cos g, -sin g], [sin g, cos g]].
pub fn rotation(g: f64) -> Mat2 {
    let (s, c) = g.sin_cos();
    Mat2::new(
        C64::new(c, 0.0),
        C64::new(-s, 0.0),
        C64::new(s, 0.0),
        C64::new(c, 0.0),
    )
}

/// D(k) = diag(e^{-ik}, e^{ik}).
pub fn phase(k: f64) -> Mat2 {
    Mat2::new(
        C64::from_polar(1.0, -k),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::from_polar(1.0, k),
    )
}

/// Keep only row `row` of `m`.
pub(crate) fn row_only(m: &Mat2, row: usize) -> Mat2 {
    let mut out = Mat2::zeros();
    out[(row, 0)] = m[(row, 0)];
    out[(row, 1)] = m[(row, 1)];
    out
}

/// |1><0| m
pub(crate) fn lower_from_upper(m: &Mat2) -> Mat2 {
    let mut out = Mat2::zeros();
    out[(1, 0)] = m[(0, 0)];
    out[(1, 1)] = m[(0, 1)];
    out
}

/// |0><1| m
pub(crate) fn upper_from_lower(m: &Mat2) -> Mat2 {
    let mut out = Mat2::zeros();
    out[(0, 0)] = m[(1, 0)];
    out[(0, 1)] = m[(1, 1)];
    out
}
