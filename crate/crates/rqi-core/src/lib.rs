//! Localised qubits in curved spacetime.
//!
//! Geometry (metrics, tetrads, the connection 1-form), worldline integration,
//! Fermi-Walker transport of Weyl spinors, parallel transport of photon
//! polarisation, covariant measurement, multipartite states and teleportation,
//! and the phase bookkeeping for spacetime Mach-Zehnder interferometers.
//!
//! Natural units (c = ħ = 1) and signature (+,-,-,-) throughout, except in
//! [`interferometry`], which works in SI.

pub mod fermion;
pub mod geometry;
pub mod interferometry;
pub mod measurement;
pub mod multiqubit;
pub mod photon;
pub mod spinor;
pub mod trajectories;

pub use num_complex::Complex64 as C64;

pub type Vec4 = nalgebra::Vector4<f64>;
pub type Mat4 = nalgebra::Matrix4<f64>;
pub type Vec2c = nalgebra::Vector2<C64>;
pub type Mat2c = nalgebra::Matrix2<C64>;
pub type Vec4c = nalgebra::Vector4<C64>;
pub type Mat4c = nalgebra::Matrix4<C64>;

/// Minkowski metric η = diag(1,-1,-1,-1).
pub fn eta() -> Mat4 {
    Mat4::from_diagonal(&Vec4::new(1.0, -1.0, -1.0, -1.0))
}

/// η(a, b) for real 4-vectors.
pub fn mdot(a: &Vec4, b: &Vec4) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// Lower (or raise) a frame index with η.
pub fn lower(v: &Vec4) -> Vec4 {
    Vec4::new(v[0], -v[1], -v[2], -v[3])
}
