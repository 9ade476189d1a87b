//! Moduli of rank-2 parabolic connections on P¹ with four poles.
//!
//! * [`lattice`]: Picard lattices of blown-up Σ₂ and affine Dynkin types.
//! * [`parabolic`]: φ-connections in normal form, stability, the map to the surface.
//! * [`rh`]: Fuchsian systems and numerical monodromy.
//! * [`charvar`]: representation side, characteristic data.
//! * [`isomonodromy`]: Painlevé VI and trace-preserving continuation.

pub mod charvar;
pub mod field;
pub mod isomonodromy;
pub mod lattice;
pub mod parabolic;
pub mod ode;
pub mod poly;
pub mod rh;

pub use field::{Field, QC};
pub use num_complex::Complex64;
