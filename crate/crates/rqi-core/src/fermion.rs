//! Spin-½ qubits: the momentum-indexed inner product, Fermi–Walker transport with
//! magnetic precession, and the maps between the covariant (Weyl) description and the
//! rest-frame (Wigner) one.
//!
//! Velocities in [`WeylQubit`] are frame components u^I. Matrices acting on spinors
//! are plain 2×2 complex matrices; see [`crate::spinor`] for index placement.

use crate::geometry::{ConnectionOneForm, GeometryError, LorentzTransform, Point, Spacetime};
use crate::spinor::{self, c, expm2, generators, spin_generator, spin_half_lift};
use crate::trajectories::{EMField, Kind, Sample, Trajectory};
use crate::{eta, lower, mdot, Mat2c, Mat4, Vec2c, Vec4, C64};

/// Tolerance for comparing velocities and for orthogonality preconditions.
pub const VELOCITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FermionError {
    #[error("states carry different momenta (|du| = {0:e})")]
    MomentumMismatch(f64),
    #[error("qubit velocity does not match the trajectory start (|du| = {0:e})")]
    VelocityMismatch(f64),
    #[error("velocity is not timelike, normalised and future directed")]
    NotTimelike,
    #[error("acceleration not orthogonal to velocity (u.a = {0:e})")]
    NonOrthogonalAcceleration(f64),
    #[error("transport needs a timelike trajectory")]
    NotTimelikeTrajectory,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylQubit {
    pub point: Point,
    /// frame components u^I
    pub velocity: Vec4,
    pub spinor: Vec2c,
}

impl WeylQubit {
    pub fn new(point: Point, velocity: Vec4, spinor: Vec2c) -> Self {
        WeylQubit {
            point,
            velocity,
            spinor,
        }
    }

    /// Qubit at rest at the origin.
    pub fn at_rest(spinor: Vec2c) -> Self {
        WeylQubit {
            point: Vec4::zeros(),
            velocity: Vec4::new(1.0, 0.0, 0.0, 0.0),
            spinor,
        }
    }

    /// ⟨ψ|ψ⟩ under I_u.
    pub fn norm_sqr(&self) -> f64 {
        (self.spinor.adjoint() * inner_product_form(&self.velocity) * self.spinor)[(0, 0)].re
    }

    pub fn normalised(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        self.spinor /= c(n, 0.0);
        self
    }
}

fn check_timelike(u: &Vec4) -> Result<(), FermionError> {
    if u[0] > 0.0 && (mdot(u, u) - 1.0).abs() < 1e-8 {
        Ok(())
    } else {
        Err(FermionError::NotTimelike)
    }
}

/// I_u^{A'A} = u_I σ̄^{IA'A}. For timelike future-directed u its eigenvalues are u⁰(1 ± |v|).
pub fn inner_product_form(u: &Vec4) -> Mat2c {
    spinor::contract_lower(u)
}

/// ā_{A'} I_u^{A'A} b_A.
pub fn inner_product(a: &WeylQubit, b: &WeylQubit) -> Result<C64, FermionError> {
    let d = (a.velocity - b.velocity).amax();
    if d > VELOCITY_TOL {
        return Err(FermionError::MomentumMismatch(d));
    }
    Ok((a.spinor.adjoint() * inner_product_form(&a.velocity) * b.spinor)[(0, 0)])
}

/// L(u) = ((1 + u⁰)·1 + u_i σ^i)/√(2(1 + u⁰)) with u_i = −u^i. Satisfies L† I_u L = 1.
pub fn standard_boost_spinhalf(u: &Vec4) -> Result<Mat2c, FermionError> {
    check_timelike(u)?;
    let ul = lower(u);
    let mut m = Mat2c::identity() * c(1.0 + u[0], 0.0);
    for i in 1..4 {
        m += spinor::pauli(i) * c(ul[i], 0.0);
    }
    Ok(m / c((2.0 * (1.0 + u[0])).sqrt(), 0.0))
}

/// Inverse of [`standard_boost_spinhalf`]: the same formula with the spatial part flipped.
pub fn standard_boost_spinhalf_inv(u: &Vec4) -> Result<Mat2c, FermionError> {
    standard_boost_spinhalf(&Vec4::new(u[0], -u[1], -u[2], -u[3]))
}

/// Spin-1 standard boost, the Lorentz matrix with first column u.
pub fn spin1_boost(u: &Vec4) -> Result<LorentzTransform, FermionError> {
    check_timelike(u)?;
    Ok(LorentzTransform::boost_to(u))
}

/// ψ̃ = L(u)⁻¹ ψ.
pub fn weyl_to_wigner(q: &WeylQubit) -> Result<Vec2c, FermionError> {
    Ok(standard_boost_spinhalf_inv(&q.velocity)? * q.spinor)
}

/// ψ = L(u) ψ̃.
pub fn wigner_to_weyl(
    point: Point,
    velocity: Vec4,
    rest: &Vec2c,
) -> Result<WeylQubit, FermionError> {
    Ok(WeylQubit {
        point,
        velocity,
        spinor: standard_boost_spinhalf(&velocity)? * rest,
    })
}

/// W = L⁻¹(Λp) S(Λ) L(p), fixed up to sign by Re tr W ≥ 0.
pub fn wigner_rotation(lambda: &LorentzTransform, p: &Vec4) -> Result<Mat2c, FermionError> {
    let lp = lambda.apply(p);
    let mut w = standard_boost_spinhalf_inv(&lp)?
        * spin_half_lift(lambda.matrix())
        * standard_boost_spinhalf(p)?;
    if (w[(0, 0)] + w[(1, 1)]).re < 0.0 {
        w = -w;
    }
    Ok(w)
}

/// Contravariant components b^I = ψ̄ σ̄^I ψ. Null and future directed.
pub fn bloch_vector(q: &WeylQubit) -> Vec4 {
    let b = spinor::bilinear(&q.spinor, &q.spinor);
    Vec4::new(b[0].re, b[1].re, b[2].re, b[3].re)
}

/// Covariant components b_I. In the rest frame the spatial part is the usual Bloch vector.
pub fn bloch_covector(q: &WeylQubit) -> Vec4 {
    lower(&bloch_vector(q))
}

/// h_I^K = δ_I^K − u_I u^K, as a matrix indexed (I, K).
fn projector(u: &Vec4) -> Mat4 {
    Mat4::identity() - lower(u) * u.transpose()
}

/// B_{IJ} = h_I^K h_J^L F_{KL}.
pub fn rest_frame_field(f: &Mat4, u: &Vec4) -> Mat4 {
    let h = projector(u);
    h * f * h.transpose()
}

/// Θ_{IJ} = ½ u^μ ω_{μIJ} + u_I a_J − (e/2m) B_{IJ}, lowered indices.
fn fw_theta(omega_along: &Mat4, u: &Vec4, a: &Vec4, b_rest: &Mat4, q_over_m: f64) -> Mat4 {
    eta() * omega_along * 0.5 + lower(u) * lower(a).transpose() - b_rest * (0.5 * q_over_m)
}

/// 4×4 generator acting on frame vectors for the same Θ: dV^I/dτ = −η^{IK}(Θ_{KJ} − Θ_{JK})V^J.
pub fn vector_generator(theta_lower: &Mat4) -> Mat4 {
    -(eta() * (theta_lower - theta_lower.transpose()))
}

/// One step of dψ/dτ = i[½u^μω_{μIJ} + u_I a_J − (e/2m)B_{IJ}]L^{IJ}ψ with the data frozen
/// over the step. The velocity advances under the vector form of the same generator.
pub fn fermi_walker_step(
    q: &WeylQubit,
    omega: &ConnectionOneForm,
    coord_velocity: &Vec4,
    a: &Vec4,
    b_rest: &Mat4,
    q_over_m: f64,
    dtau: f64,
) -> Result<WeylQubit, FermionError> {
    let ua = mdot(&q.velocity, a);
    if ua.abs() > VELOCITY_TOL * a.amax().max(1.0) {
        return Err(FermionError::NonOrthogonalAcceleration(ua));
    }
    let theta = fw_theta(
        &omega.along(coord_velocity),
        &q.velocity,
        a,
        b_rest,
        q_over_m,
    );
    let s = expm2(&(spin_generator(&theta) * c(dtau, 0.0)));
    let lam = (vector_generator(&theta) * dtau).exp();
    Ok(WeylQubit {
        point: q.point + coord_velocity * dtau,
        velocity: lam * q.velocity,
        spinor: s * q.spinor,
    })
}

/// Electromagnetic coupling for transport.
#[derive(Debug, Clone, Copy)]
pub struct Coupling<'a> {
    pub field: &'a EMField,
    pub charge_to_mass: f64,
}

/// Quadrature scheme for the time-ordered exponential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// exp(hΩ(midpoint)), second order.
    Midpoint,
    /// Two-node Gauss Magnus expansion, fourth order.
    #[default]
    Magnus4,
}

/// Ordered product of per-step exponentials of a generator λ ↦ Ω(λ).
pub fn ordered_exponential<F>(
    traj: &Trajectory,
    scheme: Scheme,
    mut gen: F,
) -> Result<Mat2c, FermionError>
where
    F: FnMut(&Sample) -> Result<Mat2c, FermionError>,
{
    let mut t = Mat2c::identity();
    for w in traj.samples.windows(2) {
        let (l0, l1) = (w[0].lambda, w[1].lambda);
        let h = l1 - l0;
        let step = match scheme {
            Scheme::Midpoint => expm2(&(gen(&traj.at(0.5 * (l0 + l1)))? * c(h, 0.0))),
            Scheme::Magnus4 => {
                let d = 3f64.sqrt() / 6.0;
                let o1 = gen(&traj.at(l0 + (0.5 - d) * h))?;
                let o2 = gen(&traj.at(l0 + (0.5 + d) * h))?;
                let comm = o2 * o1 - o1 * o2;
                expm2(&((o1 + o2) * c(0.5 * h, 0.0) + comm * c(3f64.sqrt() / 12.0 * h * h, 0.0)))
            }
        };
        t = step * t;
    }
    Ok(t)
}

/// Weyl-frame generator i Θ_{IJ} L^{IJ} at a trajectory point.
pub fn weyl_generator(
    st: &Spacetime,
    s: &Sample,
    coupling: Option<Coupling>,
) -> Result<Mat2c, FermionError> {
    let omega = st.connection(&s.x)?;
    let (b, qm) = match coupling {
        Some(cp) => (
            rest_frame_field(&cp.field.at(&s.x), &s.u_frame),
            cp.charge_to_mass,
        ),
        None => (Mat4::zeros(), 0.0),
    };
    Ok(spin_generator(&fw_theta(
        &omega.along(&s.u),
        &s.u_frame,
        &s.a_frame,
        &b,
        qm,
    )))
}

/// du^I/dτ = a^I − u^μ ω_μ^I_J u^J.
pub fn frame_velocity_rate(omega_along: &Mat4, u: &Vec4, a: &Vec4) -> Vec4 {
    a - omega_along * u
}

/// Rest-frame generator: coefficients of L^{ij} in the Wigner transport equation,
///   i[ u_i (du_j/dτ)/(u⁰+1) + u^μ(½ω_{μij} + ω_{μ0j}u^i + ω_{μil}u^l u^j/(u⁰+1)) ] L^{ij},
/// plus the magnetic term with B̃_{KL} = B_{IJ}Λ^I_K Λ^J_L for the standard boost Λ.
///
/// The velocity factors in the two connection terms carry upper indices. This is what
/// L⁻¹GL − L⁻¹dL/dτ gives; see the unit test below.
pub fn wigner_generator(
    st: &Spacetime,
    s: &Sample,
    coupling: Option<Coupling>,
) -> Result<Mat2c, FermionError> {
    let omega = st.connection(&s.x)?;
    let w_up = omega.along(&s.u);
    let w = eta() * w_up; // u^μ ω_{μIJ}
    let u = &s.u_frame;
    let ul = lower(u);
    let du = lower(&frame_velocity_rate(&w_up, u, &s.a_frame));
    let k = 1.0 / (u[0] + 1.0);
    let mut theta = Mat4::zeros();
    for i in 1..4 {
        for j in 1..4 {
            let mut v = k * ul[i] * du[j] + 0.5 * w[(i, j)] + w[(0, j)] * u[i];
            for l in 1..4 {
                v += k * w[(i, l)] * u[l] * u[j];
            }
            theta[(i, j)] = v;
        }
    }
    if let Some(cp) = coupling {
        let b = rest_frame_field(&cp.field.at(&s.x), u);
        let lam = LorentzTransform::boost_to(u);
        let bt = lam.matrix().transpose() * b * lam.matrix();
        theta -= bt * (0.5 * cp.charge_to_mass);
    }
    Ok(spin_generator(&theta))
}

/// 2×2 transport operator with the velocities it maps between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportOperator {
    pub matrix: Mat2c,
    pub u_start: Vec4,
    pub u_end: Vec4,
}

impl TransportOperator {
    /// ‖T† I_end T − I_start‖, zero for an exactly norm-preserving map.
    pub fn unitarity_residual(&self) -> f64 {
        let t = &self.matrix;
        spinor::norm2(
            &(t.adjoint() * inner_product_form(&self.u_end) * t
                - inner_product_form(&self.u_start)),
        )
    }

    /// Rest-frame form L⁻¹(u_end) T L(u_start).
    pub fn to_wigner(&self) -> Result<Mat2c, FermionError> {
        Ok(standard_boost_spinhalf_inv(&self.u_end)?
            * self.matrix
            * standard_boost_spinhalf(&self.u_start)?)
    }
}

fn check_start(q: Option<&WeylQubit>, traj: &Trajectory) -> Result<(), FermionError> {
    if traj.kind != Kind::Timelike {
        return Err(FermionError::NotTimelikeTrajectory);
    }
    if let Some(q) = q {
        let d = (q.velocity - traj.first().u_frame).amax();
        if d > VELOCITY_TOL.max(1e-7) {
            return Err(FermionError::VelocityMismatch(d));
        }
    }
    Ok(())
}

/// Transport a qubit along a trajectory; returns the final qubit and T_Weyl.
pub fn transport(
    q: &WeylQubit,
    traj: &Trajectory,
    st: &Spacetime,
    coupling: Option<Coupling>,
    scheme: Scheme,
) -> Result<(WeylQubit, TransportOperator), FermionError> {
    let op = weyl_transport_operator(traj, st, coupling, Some(q), scheme)?;
    let end = traj.last();
    Ok((
        WeylQubit {
            point: end.x,
            velocity: end.u_frame,
            spinor: op.matrix * q.spinor,
        },
        op,
    ))
}

/// T_Weyl along a trajectory.
pub fn weyl_transport_operator(
    traj: &Trajectory,
    st: &Spacetime,
    coupling: Option<Coupling>,
    q: Option<&WeylQubit>,
    scheme: Scheme,
) -> Result<TransportOperator, FermionError> {
    check_start(q, traj)?;
    let m = ordered_exponential(traj, scheme, |s| weyl_generator(st, s, coupling))?;
    Ok(TransportOperator {
        matrix: m,
        u_start: traj.first().u_frame,
        u_end: traj.last().u_frame,
    })
}

/// T_Wigner from integrating the rest-frame equation directly.
pub fn wigner_transport_operator(
    traj: &Trajectory,
    st: &Spacetime,
    coupling: Option<Coupling>,
    scheme: Scheme,
) -> Result<Mat2c, FermionError> {
    check_start(None, traj)?;
    ordered_exponential(traj, scheme, |s| wigner_generator(st, s, coupling))
}

/// Rotation angle of an SU(2) matrix, 2·acos(|tr U|/2), in [0, π].
pub fn rotation_angle(u: &Mat2c) -> f64 {
    let t = (u[(0, 0)] + u[(1, 1)]).norm() / 2.0;
    2.0 * t.min(1.0).acos()
}

/// Magnetic precession term alone written as dψ/dτ = iĤψ, Ĥ = −(e/2m) B_{IJ} L^{IJ}.
pub fn magnetic_operator(b_rest: &Mat4, q_over_m: f64) -> Mat2c {
    let g = generators();
    let mut acc = Mat2c::zeros();
    for a in 0..4 {
        for b in 0..4 {
            acc += g[a][b] * c(-0.5 * q_over_m * b_rest[(a, b)], 0.0);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MetricField;
    use crate::trajectories::{from_worldline, grid};

    fn rindler_circle(g: f64, r: f64, w: f64) -> (Spacetime, Trajectory) {
        // z = 0, x = r cos(wt), y = r sin(wt); u^t fixed by normalisation
        let st = Spacetime::diagonal(MetricField::Rindler { g });
        let ut = 1.0 / (1.0 - r * r * w * w).sqrt();
        let ts = grid((0.0, 2.0), 400);
        let tr = from_worldline(&st, Kind::Timelike, &ts, |tau| {
            let ph = w * ut * tau;
            (
                Vec4::new(ut * tau, r * ph.cos(), r * ph.sin(), 0.0),
                Vec4::new(ut, -r * w * ut * ph.sin(), r * w * ut * ph.cos(), 0.0),
                Vec4::new(
                    0.0,
                    -r * w * w * ut * ut * ph.cos(),
                    -r * w * w * ut * ut * ph.sin(),
                    0.0,
                ),
            )
        })
        .unwrap();
        (st, tr)
    }

    #[test]
    fn spinor_and_vector_laws_agree() {
        // d b^I/dτ from the spinor generator equals the vector generator applied to b
        let theta = Mat4::from_fn(|i, j| ((i * 4 + j) as f64 * 0.37).sin());
        let g = spin_generator(&theta);
        let m = vector_generator(&theta);
        let psi = Vec2c::new(c(0.3, -0.7), c(0.5, 0.2));
        for i in 0..4 {
            let sb = spinor::sigma_bar(i);
            let db = (psi.adjoint() * (g.adjoint() * sb + sb * g) * psi)[(0, 0)].re;
            let b = Vec4::from_fn(|k, _| (psi.adjoint() * spinor::sigma_bar(k) * psi)[(0, 0)].re);
            assert!((db - (m * b)[i]).abs() < 1e-13, "component {i}");
        }
    }

    #[test]
    fn rest_frame_equation_matches_conjugated_weyl_generator() {
        let (st, tr) = rindler_circle(0.3, 0.8, 0.9);
        for k in [0, 37, 211] {
            let s = tr.samples[k];
            let u = s.u_frame;
            let omega = st.connection(&s.x).unwrap();
            let du = frame_velocity_rate(&omega.along(&s.u), &u, &s.a_frame);
            let h = 1e-6;
            let dl = (standard_boost_spinhalf(&(u + du * h)).unwrap()
                - standard_boost_spinhalf(&(u - du * h)).unwrap())
                / c(2.0 * h, 0.0);
            let linv = standard_boost_spinhalf_inv(&u).unwrap();
            let l = standard_boost_spinhalf(&u).unwrap();
            let expected = linv * weyl_generator(&st, &s, None).unwrap() * l - linv * dl;
            let got = wigner_generator(&st, &s, None).unwrap();
            assert!(
                spinor::norm2(&(expected - got)) < 1e-8,
                "sample {k}: {expected:?} vs {got:?}"
            );
        }
    }

    #[test]
    fn rest_frame_equation_in_schwarzschild() {
        // eccentric equatorial geodesic exercises the spatial connection term
        let st = Spacetime::diagonal(MetricField::Schwarzschild { mass: 1.0 });
        let x0 = Vec4::new(0.0, 12.0, std::f64::consts::FRAC_PI_2, 0.0);
        let (ur, uphi): (f64, f64) = (0.1, 0.025);
        let f = 1.0 - 2.0 / 12.0;
        let ut = ((1.0 + ur * ur / f + 144.0 * uphi * uphi) / f).sqrt();
        let tr = crate::trajectories::integrate_lorentz_force(
            &st,
            None,
            1.0,
            0.0,
            x0,
            Vec4::new(ut, ur, 0.0, uphi),
            (0.0, 1.0),
            0.01,
            Default::default(),
        )
        .unwrap();
        let s = tr.samples[50];
        let u = s.u_frame;
        let omega = st.connection(&s.x).unwrap();
        assert!(omega.lowered(3).amax() > 1e-3);
        let du = frame_velocity_rate(&omega.along(&s.u), &u, &s.a_frame);
        let h = 1e-6;
        let dl = (standard_boost_spinhalf(&(u + du * h)).unwrap()
            - standard_boost_spinhalf(&(u - du * h)).unwrap())
            / c(2.0 * h, 0.0);
        let linv = standard_boost_spinhalf_inv(&u).unwrap();
        let l = standard_boost_spinhalf(&u).unwrap();
        let expected = linv * weyl_generator(&st, &s, None).unwrap() * l - linv * dl;
        let got = wigner_generator(&st, &s, None).unwrap();
        assert!(
            spinor::norm2(&(expected - got)) < 1e-8,
            "{expected:?} vs {got:?}"
        );
    }

    #[test]
    fn boost_properties() {
        let u = Vec4::new(1.25, 0.0, 0.0, 0.75);
        let l = standard_boost_spinhalf(&u).unwrap();
        let iu = inner_product_form(&u);
        assert!(spinor::norm2(&(l.adjoint() * iu * l - Mat2c::identity())) < 1e-14);
        // the spin-½ boost is the lift of the vector boost
        let s = spin_half_lift(spin1_boost(&u).unwrap().matrix());
        assert!(spinor::norm2(&(s - l)) < 1e-14);
        assert!(standard_boost_spinhalf(&Vec4::new(1.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn magnetic_operator_is_hermitian_in_rest_frame() {
        let f = crate::trajectories::field_tensor([0.2, 0.0, -0.1], [0.3, -0.4, 1.0]);
        let u = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let h = magnetic_operator(&rest_frame_field(&f, &u), 2.0);
        assert!(spinor::norm2(&(h - h.adjoint())) < 1e-15);
        // −(e/2m) B_{ij} L^{ij} = (e/2m) B·σ
        let bs = spinor::pauli(1) * c(0.3, 0.0)
            + spinor::pauli(2) * c(-0.4, 0.0)
            + spinor::pauli(3) * c(1.0, 0.0);
        assert!(spinor::norm2(&(h - bs)) < 1e-15);
    }
}
