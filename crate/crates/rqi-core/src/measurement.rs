//! Covariant observables and projective measurements: the spin observable for a
//! relativistic Stern–Gerlach apparatus, and photon polarisers.
//!
//! All vectors are frame components with upper indices.

use crate::fermion::{
    self, inner_product_form, standard_boost_spinhalf, standard_boost_spinhalf_inv, WeylQubit,
};
use crate::photon::{self, eta_dot_real, minus_eta_dot, DiadFrame, PolarisationQubit};
use crate::spinor::{c, contract_lower, generators};
use crate::{eta, lower, mdot, Mat2c, Mat4c, Vec2c, Vec4, Vec4c, C64};

/// −B·B at or below this makes the Stern–Gerlach axis undefined.
pub const DEGENERATE_TOL: f64 = 1e-14;
/// Branch probabilities at or below this have no post-measurement state.
pub const ZERO_PROBABILITY: f64 = 1e-14;
pub const ORTHO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeasurementError {
    #[error("Stern-Gerlach configuration is degenerate (-B.B = {0:e})")]
    DegenerateConfiguration(f64),
    #[error("axis is not orthogonal to the velocity (n.u = {0:e})")]
    NotOrthogonal(f64),
    #[error("state and observable refer to different momenta")]
    MomentumMismatch,
    #[error("state is not normalised (norm^2 = {0})")]
    NotNormalised(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("invalid diad frame (residual {0:e})")]
    InvalidFrame(f64),
    #[error(transparent)]
    Fermion(#[from] fermion::FermionError),
    #[error(transparent)]
    Photon(#[from] photon::PhotonError),
}

/// Apparatus orientation m, apparatus velocity v and qubit velocity u.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SternGerlachConfig {
    pub m: Vec4,
    pub v: Vec4,
    pub u: Vec4,
}

impl SternGerlachConfig {
    pub fn new(m: Vec4, v: Vec4, u: Vec4) -> Result<Self, MeasurementError> {
        if (mdot(&m, &m) + 1.0).abs() > 1e-9 {
            return Err(MeasurementError::InvalidConfig("m.m must be -1"));
        }
        for w in [&v, &u] {
            if (mdot(w, w) - 1.0).abs() > 1e-9 || w[0] <= 0.0 {
                return Err(MeasurementError::InvalidConfig(
                    "velocities must be unit and future directed",
                ));
            }
        }
        Ok(SternGerlachConfig { m, v, u })
    }

    /// Apparatus at rest with orientation along the spatial unit vector `dir`.
    pub fn at_rest(dir: [f64; 3], u: Vec4) -> Result<Self, MeasurementError> {
        let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        let m = Vec4::new(0.0, dir[0] / n, dir[1] / n, dir[2] / n);
        Self::new(m, Vec4::new(1.0, 0.0, 0.0, 0.0), u)
    }
}

/// Rest-frame field direction B = m(v·u) − v(m·u), normalised to n·n = −1.
pub fn stern_gerlach_axis(cfg: &SternGerlachConfig) -> Result<Vec4, MeasurementError> {
    let b = cfg.m * mdot(&cfg.v, &cfg.u) - cfg.v * mdot(&cfg.m, &cfg.u);
    let bb = -mdot(&b, &b);
    if bb <= DEGENERATE_TOL {
        return Err(MeasurementError::DegenerateConfiguration(bb));
    }
    Ok(b / bb.sqrt())
}

/// Observable with coefficient vector N at velocity u.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinObservable {
    pub n: Vec4,
    pub velocity: Vec4,
    /// ô = −2i u_I N_J L^{IJ} + (u·N)·1
    pub matrix: Mat2c,
}

impl SpinObservable {
    /// Any real N; the spin observable is the special case N·u = 0, N·N = −1.
    pub fn general(n: Vec4, u: Vec4) -> Self {
        let (ul, nl) = (lower(&u), lower(&n));
        let g = generators();
        let mut m = Mat2c::identity() * c(mdot(&u, &n), 0.0);
        for a in 0..4 {
            for b in 0..4 {
                m += g[a][b] * c(0.0, -2.0 * ul[a] * nl[b]);
            }
        }
        SpinObservable {
            n,
            velocity: u,
            matrix: m,
        }
    }

    /// ‖I_u ô − (I_u ô)†‖, zero for an I_u-Hermitian operator.
    pub fn hermiticity_residual(&self) -> f64 {
        let h = inner_product_form(&self.velocity) * self.matrix;
        crate::spinor::norm2(&(h - h.adjoint()))
    }

    /// L(u)⁻¹ ô L(u), an ordinary Hermitian matrix.
    pub fn rest_frame(&self) -> Result<Mat2c, MeasurementError> {
        Ok(standard_boost_spinhalf_inv(&self.velocity)?
            * self.matrix
            * standard_boost_spinhalf(&self.velocity)?)
    }

    /// Eigenvalues (ascending) with I_u-orthonormal eigenspinors, solved in the rest frame.
    pub fn eigen(&self) -> Result<[(f64, Vec2c); 2], MeasurementError> {
        let rest = self.rest_frame()?;
        let herm = (rest + rest.adjoint()) * c(0.5, 0.0);
        let e = nalgebra::SymmetricEigen::new(herm);
        let l = standard_boost_spinhalf(&self.velocity)?;
        let mut out: [(f64, Vec2c); 2] =
            std::array::from_fn(|k| (e.eigenvalues[k], l * e.eigenvectors.column(k)));
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(out)
    }

    /// P± = ½(1 ± ô), valid when N·u = 0.
    pub fn projectors(&self) -> (Mat2c, Mat2c) {
        let half = c(0.5, 0.0);
        let one = Mat2c::identity();
        ((one + self.matrix) * half, (one - self.matrix) * half)
    }
}

/// Spin observable along a unit spacelike n orthogonal to u.
pub fn make_spin_observable(n: &Vec4, u: &Vec4) -> Result<SpinObservable, MeasurementError> {
    let nu = mdot(n, u);
    if nu.abs() > ORTHO_TOL {
        return Err(MeasurementError::NotOrthogonal(nu));
    }
    Ok(SpinObservable::general(*n, *u))
}

fn same_velocity(a: &Vec4, b: &Vec4) -> Result<(), MeasurementError> {
    if (a - b).amax() > fermion::VELOCITY_TOL {
        return Err(MeasurementError::MomentumMismatch);
    }
    Ok(())
}

/// ψ̄ N_I σ̄^I ψ.
pub fn expectation(q: &WeylQubit, obs: &SpinObservable) -> Result<f64, MeasurementError> {
    same_velocity(&q.velocity, &obs.velocity)?;
    Ok((q.spinor.adjoint() * contract_lower(&obs.n) * q.spinor)[(0, 0)].re)
}

/// Outcome probabilities with the renormalised post-measurement states. A branch whose
/// probability is at most [`ZERO_PROBABILITY`] has no state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMeasurement {
    pub p_plus: f64,
    pub p_minus: f64,
    pub post_plus: Option<WeylQubit>,
    pub post_minus: Option<WeylQubit>,
}

pub fn measure_observable(
    q: &WeylQubit,
    obs: &SpinObservable,
) -> Result<SpinMeasurement, MeasurementError> {
    same_velocity(&q.velocity, &obs.velocity)?;
    let norm = q.norm_sqr();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(MeasurementError::NotNormalised(norm));
    }
    let iu = inner_product_form(&q.velocity);
    let (pp, pm) = obs.projectors();
    let branch = |p: &Mat2c| {
        let v = p * q.spinor;
        let prob = (q.spinor.adjoint() * iu * v)[(0, 0)].re.max(0.0);
        let post = (prob > ZERO_PROBABILITY).then(|| WeylQubit {
            spinor: v / c(prob.sqrt(), 0.0),
            ..*q
        });
        (prob, post)
    };
    let (p_plus, post_plus) = branch(&pp);
    let (p_minus, post_minus) = branch(&pm);
    Ok(SpinMeasurement {
        p_plus,
        p_minus,
        post_plus,
        post_minus,
    })
}

pub fn measure_spin(
    q: &WeylQubit,
    cfg: &SternGerlachConfig,
) -> Result<SpinMeasurement, MeasurementError> {
    same_velocity(&q.velocity, &cfg.u)?;
    let n = stern_gerlach_axis(cfg)?;
    measure_observable(q, &make_spin_observable(&n, &cfg.u)?)
}

/// Complex polariser P with P·u = 0 and −η(P̄, P) = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolariserVector {
    pub p: Vec4c,
    pub velocity: Vec4,
}

impl PolariserVector {
    pub fn new(p: Vec4c, velocity: Vec4) -> Result<Self, MeasurementError> {
        let pu = eta_dot_real(&velocity, &p).norm();
        if pu > 1e-9 * velocity[0].abs().max(1.0) {
            return Err(MeasurementError::NotOrthogonal(pu));
        }
        let nn = minus_eta_dot(&p, &p).re;
        if (nn - 1.0).abs() > 1e-9 {
            return Err(MeasurementError::NotNormalised(nn));
        }
        Ok(PolariserVector { p, velocity })
    }

    /// Polariser passing the Jones vector `jones` in the frame adapted to u.
    pub fn from_jones(velocity: Vec4, jones: &Vec2c) -> Result<Self, MeasurementError> {
        let q = PolarisationQubit::from_jones(Vec4::zeros(), velocity, &jones.normalize())?;
        Self::new(q.psi, velocity)
    }

    /// Linear polariser at angle φ from the first adapted axis.
    pub fn linear(velocity: Vec4, phi: f64) -> Result<Self, MeasurementError> {
        Self::from_jones(velocity, &Vec2c::new(c(phi.cos(), 0.0), c(phi.sin(), 0.0)))
    }
}

/// |P̄_I ψ^I|².
pub fn polariser_probability(
    q: &PolarisationQubit,
    pol: &PolariserVector,
) -> Result<f64, MeasurementError> {
    let (a, b) = (q.velocity / q.velocity[0], pol.velocity / pol.velocity[0]);
    if (a - b).amax() > photon::VELOCITY_TOL {
        return Err(MeasurementError::MomentumMismatch);
    }
    Ok(minus_eta_dot(&pol.p, &q.psi).norm_sqr())
}

/// ô^I_J = a f₁^I f¹_J + β f₁^I f²_J + β̄ f₂^I f¹_J + b f₂^I f²_J.
pub fn make_photon_observable(
    a: f64,
    b: f64,
    beta: C64,
    frame: &DiadFrame,
) -> Result<Mat4c, MeasurementError> {
    let mut res: f64 = 0.0;
    for i in 0..2 {
        res = res.max(mdot(&frame.f[i], &frame.u).abs());
        for j in 0..2 {
            let target = if i == j { -1.0 } else { 0.0 };
            res = res.max((mdot(&frame.f[i], &frame.f[j]) - target).abs());
        }
    }
    if res > 1e-9 || mdot(&frame.u, &frame.u).abs() > 1e-9 * frame.u[0] * frame.u[0] {
        return Err(MeasurementError::InvalidFrame(res));
    }
    let f = frame.f.map(|v| v.map(|x| c(x, 0.0)));
    let d = [frame.dual(0), frame.dual(1)].map(|v| v.map(|x| c(x, 0.0)));
    let h = [[c(a, 0.0), beta], [beta.conj(), c(b, 0.0)]];
    let mut o = Mat4c::zeros();
    for i in 0..2 {
        for j in 0..2 {
            o += f[i] * d[j].transpose() * h[i][j];
        }
    }
    Ok(o)
}

/// Residuals of the two Hermiticity conditions: −η ô Hermitian, and ô u = 0 = u_I ô^I_J.
pub fn photon_observable_residual(o: &Mat4c, u: &Vec4) -> (f64, f64) {
    let eta_c = eta().map(|x| c(x, 0.0));
    let h = eta_c * o;
    let herm = (h - h.adjoint()).camax();
    let uc = u.map(|x| c(x, 0.0));
    let ul = lower(u).map(|x| c(x, 0.0));
    let k0 = (o * uc).camax().max((ul.transpose() * o).camax());
    (herm, k0)
}

/// −η(ψ̄, ôψ).
pub fn photon_expectation(q: &PolarisationQubit, o: &Mat4c) -> C64 {
    minus_eta_dot(&q.psi, &(o * q.psi))
}
