//! Two-component spinor algebra: σ matrices, the left-handed SL(2,C) generators,
//! exact exponentials and the spin-½ lift of a Lorentz matrix.
//!
//! Index placement: `sigma_bar(I)` is σ̄^{I A'A} stored with the primed (conjugate)
//! index as the row. A Weyl spinor ψ_A is a column vector, so ψ̄_{A'} σ̄^{IA'A} ψ_A
//! is `psi.adjoint() * sigma_bar(I) * psi`.

use crate::{Mat2c, Mat4, Vec2c, Vec4, C64};
use nalgebra::Matrix2;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Pauli matrix σ_k for k = 1, 2, 3; k = 0 gives the identity.
pub fn pauli(k: usize) -> Mat2c {
    match k {
        0 => Matrix2::new(ONE, ZERO, ZERO, ONE),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("pauli index {k} out of range"),
    }
}

/// σ^I = (1, σ^i).
pub fn sigma(idx: usize) -> Mat2c {
    pauli(idx)
}

/// σ̄^I = (1, −σ^i).
pub fn sigma_bar(idx: usize) -> Mat2c {
    if idx == 0 {
        pauli(0)
    } else {
        -pauli(idx)
    }
}

/// L^{IJ} = (i/4)(σ^I σ̄^J − σ^J σ̄^I).
pub fn generator(a: usize, b: usize) -> Mat2c {
    (sigma(a) * sigma_bar(b) - sigma(b) * sigma_bar(a)) * C64::new(0.0, 0.25)
}

/// All sixteen L^{IJ}, indexed `[I][J]`.
pub fn generators() -> [[Mat2c; 4]; 4] {
    std::array::from_fn(|a| std::array::from_fn(|b| generator(a, b)))
}

/// i Θ_{IJ} L^{IJ} summed over all I, J, for a real matrix Θ with both indices lowered.
/// Only the antisymmetric part of Θ contributes.
pub fn spin_generator(theta_lower: &Mat4) -> Mat2c {
    let gens = generators();
    let mut acc = Mat2c::zeros();
    for a in 0..4 {
        for b in 0..4 {
            let t = theta_lower[(a, b)];
            if t != 0.0 {
                acc += gens[a][b] * C64::new(t, 0.0);
            }
        }
    }
    acc * I
}

/// Exact exponential of a 2×2 complex matrix.
///
/// For traceless A we have A² = −det(A)·1, so exp(A) = cosh q + (sinh q / q) A with q² = −det A.
/// A trace part is split off as a scalar factor.
pub fn expm2(a: &Mat2c) -> Mat2c {
    let half_tr = (a[(0, 0)] + a[(1, 1)]) * 0.5;
    let t = a - Mat2c::identity() * half_tr;
    let q2 = -(t[(0, 0)] * t[(1, 1)] - t[(0, 1)] * t[(1, 0)]);
    let (c, s) = if q2.norm() < 1e-8 {
        // series through q⁶ keeps full double accuracy at this size
        (
            ONE + q2 / 2.0 + q2 * q2 / 24.0 + q2 * q2 * q2 / 720.0,
            ONE + q2 / 6.0 + q2 * q2 / 120.0 + q2 * q2 * q2 / 5040.0,
        )
    } else {
        let q = q2.sqrt();
        (q.cosh(), q.sinh() / q)
    };
    (Mat2c::identity() * c + t * s) * half_tr.exp()
}

pub fn det2(m: &Mat2c) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Spin-½ image S of a proper orthochronous Λ in the representation generated by L^{IJ}.
///
/// Defined by S† σ̄^I S = Λ^I_J σ̄^J, so that the null vector ψ†σ̄^Iψ transforms with Λ.
/// The overall sign is fixed by Re tr S ≥ 0; S is only defined up to ±1.
pub fn spin_half_lift(lambda: &Mat4) -> Mat2c {
    // A = lift of Λ⁻¹ in the convention A (x^μ σ_μ) A† = (Λ⁻¹x)^μ σ_μ, then S = A†.
    let inv = crate::eta() * lambda.transpose() * crate::eta();
    let mut m = Mat2c::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            let l = inv[(mu, nu)];
            if l != 0.0 {
                m += pauli(mu) * pauli(nu) * C64::new(l, 0.0);
            }
        }
    }
    let d = det2(&m).sqrt();
    let mut a = m / d;
    if (a[(0, 0)] + a[(1, 1)]).re < 0.0 {
        a = -a;
    }
    a.adjoint()
}

/// Real 4-vector b^I = ψ̄_{A'} σ̄^{IA'A} ψ_A.
pub fn bilinear(phi: &Vec2c, psi: &Vec2c) -> [C64; 4] {
    std::array::from_fn(|k| (phi.adjoint() * sigma_bar(k) * psi)[(0, 0)])
}

/// Σ_I x_I σ̄^I with x given contravariant (x_I = η_IJ x^J).
pub fn contract_lower(x: &Vec4) -> Mat2c {
    let xl = crate::lower(x);
    let mut m = Mat2c::zeros();
    for k in 0..4 {
        m += sigma_bar(k) * C64::new(xl[k], 0.0);
    }
    m
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Frobenius norm of a 2×2 complex matrix.
pub fn norm2(m: &Mat2c) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
