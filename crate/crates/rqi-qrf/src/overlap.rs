//! Closed-form frame overlaps and the SU(2) coherent-frame noise map.

use nalgebra::DMatrix;

use crate::channel::{bloch_transfer, CPMap};
use crate::group::{gauss_legendre, wigner_small_d};
use crate::C64;

/// |⟨s;g|s;g+Δ⟩|² = (1/(s+1)²)(1 - cos((s+1)Δ))/(1 - cos Δ).
pub fn u1_overlap(s: usize, delta: f64) -> f64 {
    let n = (s + 1) as f64;
    let half = (delta / 2.0).sin();
    if half.abs() < 1e-6 {
        // Fejér kernel near Δ = 0 (mod 2π); the Δ⁴ term is below 1e-20 here
        let d = delta.sin().asin();
        return 1.0 - (n * n - 1.0) * d * d / 12.0;
    }
    let num = (n * delta / 2.0).sin();
    (num * num) / (half * half) / (n * n)
}

/// ⟨s;e|U(g)|s;e⟩ for the regular-representation fiducial state, with ω the
/// rotation angle of g.
pub fn su2_fiducial_overlap(s: u32, omega: f64) -> C64 {
    let d = ((2 * s + 1) * (2 * s + 3) * (s + 1)) as f64 / 3.0;
    let s = s as i64;
    let sum: C64 = (-s..=s)
        .map(|m| C64::from_polar(((1 + s) * (1 + s) - m * m) as f64, m as f64 * omega))
        .sum();
    sum / d
}

/// ⟨j,j|U(α,β,γ)|j,j⟩ = e^{-i(α+γ)j} cos^{2j}(β/2).
pub fn su2_coherent_overlap(two_j: u32, alpha: f64, beta: f64, gamma: f64) -> C64 {
    let j = two_j as f64 / 2.0;
    C64::from_polar((beta / 2.0).cos().powi(two_j as i32), -(alpha + gamma) * j)
}

/// Removes coherences between distinct Jz eigenvalues.
pub fn z_dephasing(dim: usize) -> CPMap {
    let mut l = DMatrix::zeros(dim * dim, dim * dim);
    for i in 0..dim {
        l[(i + i * dim, i + i * dim)] = C64::new(1.0, 0.0);
    }
    CPMap::from_liouville(dim, l)
}

/// (2j+1) ∫ sinβ dβ/2 cos^{4j}(β/2) 𝓡ʸ(-β) on a spin-½ system, by
/// Gauss-Legendre in cos β with `quadrature_n` nodes.
pub fn su2_cs_middle(two_j: u32, quadrature_n: usize) -> CPMap {
    let mut terms = Vec::with_capacity(quadrature_n);
    for (x, w) in gauss_legendre(quadrature_n.max(1)) {
        let beta = x.clamp(-1.0, 1.0).acos();
        let weight = (two_j + 1) as f64 * w / 2.0 * ((1.0 + x) / 2.0).powi(two_j as i32);
        let r = wigner_small_d(1, -beta).map(|v| C64::new(v, 0.0));
        terms.push((weight, r));
    }
    CPMap::mixture(2, terms.iter().map(|(w, u)| (*w, u)))
}

/// Noise map of an SU(2) coherent-state frame on a spin-½ system:
/// 𝒟 ∘ middle ∘ 𝒟 with 𝒟 the z-dephasing channel.
pub fn su2_cs_decoherence(two_j: u32, quadrature_n: usize) -> CPMap {
    let d = z_dephasing(2);
    d.compose(&su2_cs_middle(two_j, quadrature_n)).compose(&d)
}

/// How far the coherent-frame map is from pure z-dephasing: the largest
/// entry of |T(map) - T(𝒟)| on Bloch transfer matrices. Only the z→z part of
/// the middle integral survives the dephasers, so this equals 1 - ⟨cos β⟩.
pub fn su2_cs_deviation(two_j: u32, quadrature_n: usize) -> f64 {
    let t = bloch_transfer(&su2_cs_decoherence(two_j, quadrature_n));
    let d = bloch_transfer(&z_dephasing(2));
    (t - d).abs().max()
}
