//! Photon polarisation: parallel transport of the complex polarisation 4-vector along
//! null geodesics, the gauge-invariant Jones vector in an adapted frame, and the
//! accumulated Wigner rotation angle.
//!
//! Frame components throughout. A Jones vector rotates as R_y(θ) = exp(−iθσ_y), i.e. the
//! real rotation [[cos θ, −sin θ], [sin θ, cos θ]].

use crate::geometry::{GeometryError, LorentzTransform, Point, Spacetime};
use crate::spinor::c;
use crate::trajectories::{Kind, Sample, Trajectory};
use crate::{eta, mdot, Mat2c, Mat4, Mat4c, Vec2c, Vec4, Vec4c, C64};
use nalgebra::{Matrix2, Vector4};

/// cos θ below −1 + this counts as the antipodal chart singularity.
pub const ANTIPODAL_TOL: f64 = 1e-9;
pub const VELOCITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PhotonError {
    #[error("photon direction is antipodal to the frame z axis (cos θ = {0})")]
    AntipodalSingularity(f64),
    #[error("velocity is not null (u.u = {0:e})")]
    NotNull(f64),
    #[error("photon velocities are not parallel")]
    MomentumMismatch,
    #[error("qubit velocity does not match the trajectory start")]
    VelocityMismatch,
    #[error("transport needs a null trajectory")]
    NotNullTrajectory,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarisationQubit {
    pub point: Point,
    /// null frame velocity u^I
    pub velocity: Vec4,
    pub psi: Vec4c,
}

/// −η_{IJ} ā^I b^J for complex 4-vectors.
pub fn minus_eta_dot(a: &Vec4c, b: &Vec4c) -> C64 {
    -(a[0].conj() * b[0]) + a[1].conj() * b[1] + a[2].conj() * b[2] + a[3].conj() * b[3]
}

/// η_{IJ} u^I ψ^J with u real.
pub fn eta_dot_real(u: &Vec4, psi: &Vec4c) -> C64 {
    psi[0] * u[0] - psi[1] * u[1] - psi[2] * u[2] - psi[3] * u[3]
}

fn complexify(m: &Mat4) -> Mat4c {
    m.map(|x| c(x, 0.0))
}

impl PolarisationQubit {
    pub fn new(point: Point, velocity: Vec4, psi: Vec4c) -> Self {
        PolarisationQubit {
            point,
            velocity,
            psi,
        }
    }

    /// State with Jones vector `jones` for a photon moving with frame velocity u.
    pub fn from_jones(point: Point, velocity: Vec4, jones: &Vec2c) -> Result<Self, PhotonError> {
        let r = adaption_rotation(&velocity)?;
        let adapted = Vec4c::new(c(0.0, 0.0), jones[0], jones[1], c(0.0, 0.0));
        let psi = complexify(r.inverse().matrix()) * adapted;
        Ok(PolarisationQubit {
            point,
            velocity,
            psi,
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        minus_eta_dot(&self.psi, &self.psi).re
    }

    /// ψ → ψ + υu.
    pub fn gauge_shift(&self, upsilon: C64) -> Self {
        let mut q = *self;
        q.psi += self.velocity.map(|x| c(x, 0.0)) * upsilon;
        q
    }
}

fn check_null(u: &Vec4) -> Result<(), PhotonError> {
    let uu = mdot(u, u) / (u[0] * u[0]);
    if uu.abs() > 1e-9 || u[0] <= 0.0 {
        return Err(PhotonError::NotNull(uu));
    }
    Ok(())
}

/// Spatial rotation taking the photon direction to +z, about the axis n̂ × ẑ.
pub fn adaption_rotation(u: &Vec4) -> Result<LorentzTransform, PhotonError> {
    check_null(u)?;
    let n = nalgebra::Vector3::new(u[1], u[2], u[3]).normalize();
    let cos_t = n[2].clamp(-1.0, 1.0);
    if cos_t < -1.0 + ANTIPODAL_TOL {
        return Err(PhotonError::AntipodalSingularity(cos_t));
    }
    let axis = nalgebra::Vector3::new(n[1], -n[0], 0.0);
    let s = axis.norm();
    if s == 0.0 {
        return Ok(LorentzTransform::identity());
    }
    let axis = axis / s;
    Ok(LorentzTransform::rotation(
        [axis[0], axis[1], axis[2]],
        s.atan2(cos_t),
    ))
}

/// Jones vector ψ^A = R^A_I ψ^I for A = 1, 2.
pub fn extract_jones(q: &PolarisationQubit) -> Result<Vec2c, PhotonError> {
    let r = adaption_rotation(&q.velocity)?;
    let p = complexify(r.matrix()) * q.psi;
    Ok(Vec2c::new(p[1], p[2]))
}

/// The null partner w with u·w = 1 and no component along the adapted diad.
pub fn null_partner(u: &Vec4) -> Vec4 {
    let k = (u[1] * u[1] + u[2] * u[2] + u[3] * u[3]).sqrt();
    Vec4::new(1.0, -u[1] / k, -u[2] / k, -u[3] / k) / (2.0 * u[0])
}

/// ψ → ψ − (u·ψ)w, removing any component that breaks u·ψ = 0.
pub fn reproject(u: &Vec4, psi: &Vec4c) -> Vec4c {
    let w = null_partner(u);
    psi - w.map(|x| c(x, 0.0)) * eta_dot_real(u, psi)
}

fn ordered_exponential4<F>(
    traj: &Trajectory,
    mut gen: F,
    mut after_step: impl FnMut(&Sample, Mat4) -> Mat4,
) -> Result<Mat4, PhotonError>
where
    F: FnMut(&Sample) -> Result<Mat4, PhotonError>,
{
    let d = 3f64.sqrt() / 6.0;
    let mut t = Mat4::identity();
    for w in traj.samples.windows(2) {
        let (l0, l1) = (w[0].lambda, w[1].lambda);
        let h = l1 - l0;
        let o1 = gen(&traj.at(l0 + (0.5 - d) * h))?;
        let o2 = gen(&traj.at(l0 + (0.5 + d) * h))?;
        let comm = o2 * o1 - o1 * o2;
        let step = ((o1 + o2) * (0.5 * h) + comm * (3f64.sqrt() / 12.0 * h * h)).exp();
        t = after_step(&w[1], step * t);
    }
    Ok(t)
}

/// Parallel-transport operator Dψ/dλ = 0 in frame components, dψ^I/dλ = −u^ν ω_ν^I_J ψ^J,
/// with the transverse condition re-imposed after every step.
pub fn polarisation_transport_operator(
    traj: &Trajectory,
    st: &Spacetime,
) -> Result<Mat4, PhotonError> {
    if traj.kind != Kind::Null {
        return Err(PhotonError::NotNullTrajectory);
    }
    ordered_exponential4(
        traj,
        |s| Ok(-st.connection(&s.x)?.along(&s.u)),
        |s, t| {
            let w = null_partner(&s.u_frame);
            (Mat4::identity() - w * (eta() * s.u_frame).transpose()) * t
        },
    )
}

pub fn parallel_transport_polarisation(
    q: &PolarisationQubit,
    traj: &Trajectory,
    st: &Spacetime,
) -> Result<PolarisationQubit, PhotonError> {
    let u0 = traj.first().u_frame;
    if (q.velocity / q.velocity[0] - u0 / u0[0]).amax() > VELOCITY_TOL {
        return Err(PhotonError::VelocityMismatch);
    }
    let t = polarisation_transport_operator(traj, st)?;
    let end = traj.last();
    // qubit velocity may differ from the trajectory's by a positive scale
    let scale = q.velocity[0] / u0[0];
    Ok(PolarisationQubit {
        point: end.x,
        velocity: end.u_frame * scale,
        psi: complexify(&t) * q.psi,
    })
}

/// Rate θ'(λ) of the Jones rotation at a sample: the Jones generator is
/// dR/dλ f − R (u^μω_μ) f restricted to the diad, which is θ'·[[0, −1], [1, 0]].
pub fn wigner_rate(st: &Spacetime, s: &Sample) -> Result<f64, PhotonError> {
    let u = s.u_frame;
    let w_up = st.connection(&s.x)?.along(&s.u);
    let du = -(w_up * u);
    let r = adaption_rotation(&u)?;
    let h = 1e-6 / u.amax().max(1.0);
    let dr = (adaption_rotation(&(u + du * h))?.matrix()
        - adaption_rotation(&(u - du * h))?.matrix())
        / (2.0 * h);
    let f = r.inverse();
    let m = (dr - r.matrix() * w_up) * f.matrix();
    // antisymmetric 2×2 block; average both entries
    Ok(0.5 * (m[(2, 1)] - m[(1, 2)]))
}

/// Accumulated Wigner angle θ along a null geodesic (Gauss–Legendre per interval).
pub fn wigner_angle(traj: &Trajectory, st: &Spacetime) -> Result<f64, PhotonError> {
    if traj.kind != Kind::Null {
        return Err(PhotonError::NotNullTrajectory);
    }
    let d = 3f64.sqrt() / 6.0;
    let mut theta = 0.0;
    for w in traj.samples.windows(2) {
        let (l0, l1) = (w[0].lambda, w[1].lambda);
        let h = l1 - l0;
        theta += 0.5
            * h
            * (wigner_rate(st, &traj.at(l0 + (0.5 - d) * h))?
                + wigner_rate(st, &traj.at(l0 + (0.5 + d) * h))?);
    }
    Ok(theta)
}

/// Wigner angle when the tetrad stays adapted to the photon: θ' = −u^μ ω_{μ12}.
pub fn wigner_angle_adapted(traj: &Trajectory, st: &Spacetime) -> Result<f64, PhotonError> {
    let d = 3f64.sqrt() / 6.0;
    let rate = |s: &Sample| -> Result<f64, PhotonError> {
        let w = eta() * st.connection(&s.x)?.along(&s.u);
        Ok(-w[(1, 2)])
    };
    let mut theta = 0.0;
    for w in traj.samples.windows(2) {
        let (l0, l1) = (w[0].lambda, w[1].lambda);
        let h = l1 - l0;
        theta +=
            0.5 * h * (rate(&traj.at(l0 + (0.5 - d) * h))? + rate(&traj.at(l0 + (0.5 + d) * h))?);
    }
    Ok(theta)
}

/// R_y(θ) = exp(−iθσ_y).
pub fn jones_rotation(theta: f64) -> Mat2c {
    let (s, co) = theta.sin_cos();
    Matrix2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

fn parallel(a: &Vec4, b: &Vec4) -> bool {
    (a / a[0] - b / b[0]).amax() <= VELOCITY_TOL
}

/// −η_{IJ} ā^I b^J between photons sharing a velocity direction.
pub fn polarisation_inner_product(
    a: &PolarisationQubit,
    b: &PolarisationQubit,
) -> Result<C64, PhotonError> {
    if !parallel(&a.velocity, &b.velocity) {
        return Err(PhotonError::MomentumMismatch);
    }
    Ok(minus_eta_dot(&a.psi, &b.psi))
}

/// Diad f_A^I (columns of R⁻¹ for A = 1, 2) with its null partners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiadFrame {
    pub f: [Vec4; 2],
    pub u: Vec4,
    pub w: Vec4,
}

impl DiadFrame {
    pub fn for_velocity(u: &Vec4) -> Result<Self, PhotonError> {
        let r = adaption_rotation(u)?;
        let inv = r.inverse();
        let m = inv.matrix();
        Ok(DiadFrame {
            f: [m.column(1).into_owned(), m.column(2).into_owned()],
            u: *u,
            w: null_partner(u),
        })
    }

    /// f^A_I with the frame index lowered: f^A_I = −η_{IJ} f_A^J.
    pub fn dual(&self, a: usize) -> Vector4<f64> {
        -(eta() * self.f[a])
    }
}
