use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("amplitude {amplitude:e} would leave the window at ({x}, {y})")]
    Truncation { x: i64, y: i64, amplitude: f64 },
    #[error("grid of {grid} points aliases a degree-{degree} trigonometric polynomial")]
    Aliasing { grid: usize, degree: usize },
    #[error("distribution requested at odd time {steps}")]
    OddTime { steps: usize },
    #[error("regime mismatch: expected {expected}, found {found}")]
    Regime {
        expected: &'static str,
        found: &'static str,
    },
    #[error("no point spectrum: Re eta = 0")]
    NoPointSpectrum,
    #[error("quadrature did not converge (last change {last_change:e} at {nodes} nodes)")]
    Quadrature { nodes: usize, last_change: f64 },
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("undefined: {0}")]
    Undefined(&'static str),
}

pub type Result<T> = std::result::Result<T, WalkError>;
