//! Group elements, Wigner-D matrices and Haar quadrature grids.

use std::f64::consts::{PI, TAU};

use gauss_quad::GaussLegendre;
use nalgebra::{DMatrix, Matrix2};

use crate::{QrfError, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    U1,
    SU2,
}

/// An element of U(1) or SU(2).
///
/// SU(2) elements are stored as their spin-½ matrix, so composition is exact
/// and both the polar and the Euler parameterisation can be read back.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GroupElement {
    U1(f64),
    SU2(Matrix2<C64>),
}

impl GroupElement {
    /// Phase reduced into [0, 2π).
    pub fn u1(theta: f64) -> Self {
        GroupElement::U1(theta.rem_euclid(TAU))
    }

    /// e^{-iασz/2} e^{-iβσy/2} e^{-iγσz/2}.
    pub fn su2_euler(alpha: f64, beta: f64, gamma: f64) -> Self {
        let (s, c) = (beta / 2.0).sin_cos();
        let e = |x: f64| C64::from_polar(1.0, x);
        GroupElement::SU2(Matrix2::new(
            e(-(alpha + gamma) / 2.0) * c,
            -e(-(alpha - gamma) / 2.0) * s,
            e((alpha - gamma) / 2.0) * s,
            e((alpha + gamma) / 2.0) * c,
        ))
    }

    /// exp(iω n·σ/2) with n = (sinθ cosφ, sinθ sinφ, cosθ).
    pub fn su2_polar(omega: f64, theta: f64, phi: f64) -> Self {
        let (s, c) = (omega / 2.0).sin_cos();
        let n = [
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ];
        let i = C64::i();
        GroupElement::SU2(Matrix2::new(
            C64::new(c, 0.0) + i * s * n[2],
            i * s * C64::new(n[0], -n[1]),
            i * s * C64::new(n[0], n[1]),
            C64::new(c, 0.0) - i * s * n[2],
        ))
    }

    pub fn identity(group: Group) -> Self {
        match group {
            Group::U1 => GroupElement::U1(0.0),
            Group::SU2 => GroupElement::SU2(Matrix2::identity()),
        }
    }

    pub fn group(&self) -> Group {
        match self {
            GroupElement::U1(_) => Group::U1,
            GroupElement::SU2(_) => Group::SU2,
        }
    }

    /// The product `self · other`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement, QrfError> {
        match (self, other) {
            (GroupElement::U1(a), GroupElement::U1(b)) => Ok(GroupElement::u1(a + b)),
            (GroupElement::SU2(a), GroupElement::SU2(b)) => Ok(GroupElement::SU2(a * b)),
            _ => Err(QrfError::GroupMismatch),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::U1(a) => GroupElement::u1(-a),
            GroupElement::SU2(u) => GroupElement::SU2(u.adjoint()),
        }
    }

    /// Euler angles (α, β, γ) with β ∈ [0, π]. Where a difference or sum of
    /// α and γ is undetermined it is set to zero.
    pub fn euler(&self) -> Option<(f64, f64, f64)> {
        let GroupElement::SU2(u) = self else {
            return None;
        };
        let (a, b) = (u[(0, 0)], u[(1, 0)]);
        let beta = 2.0 * b.norm().atan2(a.norm());
        let sum = if a.norm() > 0.0 { -2.0 * a.arg() } else { 0.0 };
        let diff = if b.norm() > 0.0 { 2.0 * b.arg() } else { 0.0 };
        Some(((sum + diff) / 2.0, beta, (sum - diff) / 2.0))
    }

    /// Polar parameters (ω, θ, φ) with ω ∈ [0, 2π].
    pub fn polar(&self) -> Option<(f64, f64, f64)> {
        let GroupElement::SU2(u) = self else {
            return None;
        };
        let c = ((u[(0, 0)] + u[(1, 1)]).re / 2.0).clamp(-1.0, 1.0);
        let omega = 2.0 * c.acos();
        let s = (omega / 2.0).sin();
        if s.abs() < 1e-15 {
            return Some((omega, 0.0, 0.0));
        }
        // i s n·σ = (u - u†)/2
        let nz = ((u[(0, 0)] - u[(1, 1)]) / 2.0).im / s;
        let nx = ((u[(1, 0)] + u[(0, 1)]) / 2.0).im / s;
        let ny = -((u[(1, 0)] - u[(0, 1)]) / 2.0).re / s;
        Some((omega, nz.clamp(-1.0, 1.0).acos(), ny.atan2(nx)))
    }
}

fn factorial(n: i64) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Wigner small-d matrix d^j(β) = ⟨j m'| e^{-iβJy} |j m⟩, rows and columns
/// ordered by descending m.
pub fn wigner_small_d(two_j: u32, beta: f64) -> DMatrix<f64> {
    let n = two_j as usize + 1;
    let tj = two_j as i64;
    let (s, c) = (beta / 2.0).sin_cos();
    DMatrix::from_fn(n, n, |r, col| {
        // doubled quantum numbers
        let mp = tj - 2 * r as i64;
        let m = tj - 2 * col as i64;
        let (jpmp, jmmp) = ((tj + mp) / 2, (tj - mp) / 2);
        let (jpm, jmm) = ((tj + m) / 2, (tj - m) / 2);
        let pref = (factorial(jpmp) * factorial(jmmp) * factorial(jpm) * factorial(jmm)).sqrt();
        let dm = (mp - m) / 2;
        let kmin = 0.max(-dm);
        let kmax = jpm.min(jmmp);
        let mut sum = 0.0;
        for k in kmin..=kmax {
            let sign = if (k + dm) % 2 == 0 { 1.0 } else { -1.0 };
            let den = factorial(jpm - k) * factorial(k) * factorial(jmmp - k) * factorial(k + dm);
            sum += sign / den * c.powi((tj - 2 * k - dm) as i32) * s.powi((2 * k + dm) as i32);
        }
        pref * sum
    })
}

/// Spin-j representation matrix D^j(g) = e^{-iαJz} e^{-iβJy} e^{-iγJz}.
pub fn wigner_d(two_j: u32, g: &GroupElement) -> Result<DMatrix<C64>, QrfError> {
    let (alpha, beta, gamma) = g.euler().ok_or(QrfError::GroupMismatch)?;
    let d = wigner_small_d(two_j, beta);
    let m = |i: usize| (two_j as f64 - 2.0 * i as f64) / 2.0;
    Ok(DMatrix::from_fn(d.nrows(), d.ncols(), |r, c| {
        C64::from_polar(d[(r, c)], -m(r) * alpha - m(c) * gamma)
    }))
}

/// A weighted set of group elements approximating normalised Haar measure.
#[derive(Clone, Debug)]
pub struct HaarGrid {
    pub points: Vec<(GroupElement, f64)>,
}

impl HaarGrid {
    /// Trapezoid rule on `n` equispaced phases; exact for Fourier modes
    /// |q| < n.
    pub fn u1(n: usize) -> Self {
        let n = n.max(1);
        HaarGrid {
            points: (0..n)
                .map(|k| (GroupElement::U1(TAU * k as f64 / n as f64), 1.0 / n as f64))
                .collect(),
        }
    }

    /// Euler grid: `n` equispaced α and γ on [0, 2π) and `n` Gauss-Legendre
    /// nodes in cos β. Integrands of the form U ρ U† and |⟨g|ψ⟩|² are
    /// insensitive to the centre element -1, so the SO(3) range suffices.
    /// Exact for adjoint actions of representations with 2j < n.
    pub fn su2_euler(n: usize) -> Self {
        let n = n.max(1);
        let gl = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n * n);
        for ia in 0..n {
            let alpha = TAU * ia as f64 / n as f64;
            for &(x, wb) in &gl {
                let beta = x.clamp(-1.0, 1.0).acos();
                for ig in 0..n {
                    let gamma = TAU * ig as f64 / n as f64;
                    let w = wb / 2.0 / (n * n) as f64;
                    points.push((GroupElement::su2_euler(alpha, beta, gamma), w));
                }
            }
        }
        HaarGrid { points }
    }

    /// Polar grid: Gauss-Legendre in ω ∈ [0, 2π] weighted by sin²(ω/2)/π,
    /// Gauss-Legendre in cos θ and `n` equispaced φ.
    pub fn su2_polar(n: usize) -> Self {
        let n = n.max(1);
        let gl = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n * n);
        for &(x, wx) in &gl {
            let omega = PI * (x + 1.0);
            let wo = wx * (omega / 2.0).sin().powi(2);
            for &(y, wy) in &gl {
                let theta = y.clamp(-1.0, 1.0).acos();
                for ip in 0..n {
                    let phi = TAU * ip as f64 / n as f64;
                    points.push((
                        GroupElement::su2_polar(omega, theta, phi),
                        wo * wy / 2.0 / n as f64,
                    ));
                }
            }
        }
        HaarGrid { points }
    }

    pub fn for_group(group: Group, n: usize) -> Self {
        match group {
            Group::U1 => HaarGrid::u1(n),
            Group::SU2 => HaarGrid::su2_euler(n),
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|(_, w)| w).sum()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    if n == 1 {
        return vec![(0.0, 2.0)];
    }
    GaussLegendre::new(n.try_into().expect("n >= 2"))
        .iter()
        .map(|(x, w)| (*x, *w))
        .collect()
}
