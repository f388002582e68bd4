//! Two-dimensional alternating-rotation quantum walk on the half plane whose
//! left edge is cut and rewired into self-loops.
//!
//! The crate offers three independent routes to the boundary dynamics:
//! direct arc evolution on the lattice ([`lattice`]), the wave-number
//! decomposed walk on the half line ([`halfline`]), and spectral integrals
//! against the CMV spectral measure ([`cmv`]). On top of these sit closed-form
//! dispersion data ([`spectra`]), topological invariants ([`topology`]) and the
//! weak limit laws with the group-velocity estimator ([`limits`]).

pub mod angles;
pub mod cmv;
pub mod dist;
pub mod error;
pub mod halfline;
pub mod lattice;
pub mod limits;
pub mod quad;
pub mod spectra;
pub mod topology;

pub use angles::{CoinAngles, Sign};
pub use dist::{FullDistribution, Profile};
pub use error::{Result, WalkError};

pub type C64 = num_complex::Complex64;
pub type Mat2 = nalgebra::Matrix2<C64>;
