//! Worldlines: RK4 integration of Lorentz-force and null geodesic motion, plus
//! trajectories built from closed-form worldlines.
//!
//! Samples store coordinate velocity u^μ alongside frame components u^I and the
//! frame acceleration a^I, so downstream transport never has to re-derive them.

use crate::geometry::{GeometryError, Point, Spacetime};
use crate::{eta, mdot, Mat4, Vec4};
use std::io::{BufRead, Write};
use std::sync::Arc;

/// Allowed normalisation drift before integration is declared to have failed.
pub const DRIFT_TOL: f64 = 1e-6;
/// Tolerance on the normalisation of initial data.
pub const INIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrajectoryError {
    #[error("normalisation drift {drift:e} at parameter {at}; reduce the step")]
    StepTooLarge { drift: f64, at: f64 },
    #[error("initial velocity not normalised (u.u - 1 = {0:e})")]
    NotNormalised(f64),
    #[error("initial wavevector not null (k.k = {0:e})")]
    NotNull(f64),
    #[error("operation requires a timelike trajectory")]
    NullTrajectory,
    #[error("step must be positive and span nonempty")]
    BadStep,
    #[error("left the coordinate chart at parameter {0}")]
    OutOfChart(f64),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Timelike,
    Null,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub lambda: f64,
    pub x: Point,
    /// coordinate velocity u^μ
    pub u: Vec4,
    /// frame velocity u^I
    pub u_frame: Vec4,
    /// frame acceleration a^I
    pub a_frame: Vec4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: Kind,
    pub samples: Vec<Sample>,
}

/// Electromagnetic field F_{IJ} in tetrad indices, optionally with its potential A_μ.
#[derive(Clone)]
pub struct EMField {
    pub eval: Arc<dyn Fn(&Point) -> Mat4 + Send + Sync>,
    pub potential: Option<Arc<dyn Fn(&Point) -> Vec4 + Send + Sync>>,
}

impl std::fmt::Debug for EMField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "EMField {{ potential: {} }}", self.potential.is_some())
    }
}

impl EMField {
    pub fn new(eval: impl Fn(&Point) -> Mat4 + Send + Sync + 'static) -> Self {
        EMField {
            eval: Arc::new(eval),
            potential: None,
        }
    }

    /// Uniform field with F_{0i} = E_i and F_{ij} = −ε_{ijk} B^k, so the force is γE + u×B.
    pub fn uniform(e: [f64; 3], b: [f64; 3]) -> Self {
        let f = field_tensor(e, b);
        EMField::new(move |_| f)
    }

    pub fn at(&self, x: &Point) -> Mat4 {
        (self.eval)(x)
    }
}

/// F_{IJ} from electric and magnetic 3-vectors.
pub fn field_tensor(e: [f64; 3], b: [f64; 3]) -> Mat4 {
    let mut f = Mat4::zeros();
    for i in 0..3 {
        f[(0, i + 1)] = e[i];
        f[(i + 1, 0)] = -e[i];
    }
    f[(1, 2)] = -b[2];
    f[(2, 1)] = b[2];
    f[(2, 3)] = -b[0];
    f[(3, 2)] = b[0];
    f[(3, 1)] = -b[1];
    f[(1, 3)] = b[1];
    f
}

/// Options for [`integrate_lorentz_force`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    /// Re-project u onto the unit hyperboloid after each step.
    pub renormalise: bool,
    pub drift_tol: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            renormalise: false,
            drift_tol: DRIFT_TOL,
        }
    }
}

fn steps_for(span: (f64, f64), step: f64) -> Result<usize, TrajectoryError> {
    let len = span.1 - span.0;
    if !(step > 0.0) || !(len >= 0.0) || !len.is_finite() {
        return Err(TrajectoryError::BadStep);
    }
    Ok((len / step).round() as usize)
}

fn norm_g(st: &Spacetime, x: &Point, v: &Vec4) -> f64 {
    (v.transpose() * st.metric.eval(x) * v)[(0, 0)]
}

fn rk4<F>(f: &F, y: &[Vec4; 2], t: f64, h: f64) -> Result<[Vec4; 2], TrajectoryError>
where
    F: Fn(f64, &[Vec4; 2]) -> Result<[Vec4; 2], TrajectoryError>,
{
    let add = |y: &[Vec4; 2], k: &[Vec4; 2], s: f64| [y[0] + k[0] * s, y[1] + k[1] * s];
    let k1 = f(t, y)?;
    let k2 = f(t + h / 2.0, &add(y, &k1, h / 2.0))?;
    let k3 = f(t + h / 2.0, &add(y, &k2, h / 2.0))?;
    let k4 = f(t + h, &add(y, &k3, h))?;
    Ok([
        y[0] + (k1[0] + k2[0] * 2.0 + k3[0] * 2.0 + k4[0]) * (h / 6.0),
        y[1] + (k1[1] + k2[1] * 2.0 + k3[1] * 2.0 + k4[1]) * (h / 6.0),
    ])
}

fn lorentz_accel(
    st: &Spacetime,
    field: Option<&EMField>,
    q_over_m: f64,
    x: &Point,
    u: &Vec4,
) -> Vec4 {
    match field {
        Some(f) if q_over_m != 0.0 => {
            let e = st.tetrad(x);
            let ui = e.try_inverse().expect("tetrad invertible") * u;
            // a^I = (e/m) η^{IK} F_{KJ} u^J
            let ai = eta() * f.at(x) * ui * q_over_m;
            e * ai
        }
        _ => Vec4::zeros(),
    }
}

fn check_chart(st: &Spacetime, x: &Point, t: f64) -> Result<(), TrajectoryError> {
    let g = st.metric.eval(x);
    let d = g.determinant();
    if !d.is_finite() || d >= 0.0 || g[(0, 0)] <= 0.0 {
        return Err(TrajectoryError::OutOfChart(t));
    }
    Ok(())
}

fn sample(st: &Spacetime, lambda: f64, x: Point, u: Vec4, a: Vec4) -> Sample {
    let einv = st.tetrad.inverse(&x).expect("tetrad invertible");
    Sample {
        lambda,
        x,
        u,
        u_frame: einv * u,
        a_frame: einv * a,
    }
}

/// Timelike motion under m Du^μ/dτ = e F^μ_ν u^ν; geodesic when `charge` is 0 or `field` is `None`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_lorentz_force(
    st: &Spacetime,
    field: Option<&EMField>,
    mass: f64,
    charge: f64,
    x0: Point,
    u0: Vec4,
    span: (f64, f64),
    step: f64,
    opts: IntegrationOptions,
) -> Result<Trajectory, TrajectoryError> {
    let n = steps_for(span, step)?;
    check_chart(st, &x0, span.0)?;
    let n0 = norm_g(st, &x0, &u0);
    if (n0 - 1.0).abs() > INIT_TOL {
        return Err(TrajectoryError::NotNormalised(n0 - 1.0));
    }
    let qm = if mass != 0.0 { charge / mass } else { 0.0 };
    let h = if n == 0 {
        0.0
    } else {
        (span.1 - span.0) / n as f64
    };
    let rhs = |t: f64, y: &[Vec4; 2]| -> Result<[Vec4; 2], TrajectoryError> {
        check_chart(st, &y[0], t)?;
        let gamma = st.christoffel(&y[0])?;
        let acc = lorentz_accel(st, field, qm, &y[0], &y[1]);
        Ok([y[1], acc - gamma.contract(&y[1], &y[1])])
    };
    let mut y = [x0, u0];
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(sample(
        st,
        span.0,
        x0,
        u0,
        lorentz_accel(st, field, qm, &x0, &u0),
    ));
    for k in 0..n {
        let t = span.0 + k as f64 * h;
        y = rk4(&rhs, &y, t, h)?;
        let t1 = span.0 + (k + 1) as f64 * h;
        let nn = norm_g(st, &y[0], &y[1]);
        if (nn - 1.0).abs() > opts.drift_tol {
            return Err(TrajectoryError::StepTooLarge {
                drift: nn - 1.0,
                at: t1,
            });
        }
        if opts.renormalise {
            y[1] /= nn.sqrt();
        }
        samples.push(sample(
            st,
            t1,
            y[0],
            y[1],
            lorentz_accel(st, field, qm, &y[0], &y[1]),
        ));
    }
    Ok(Trajectory {
        kind: Kind::Timelike,
        samples,
    })
}

/// Affinely parameterised null geodesic, scaled so that e^0_μ k^μ = 1 at the start.
pub fn integrate_null_geodesic(
    st: &Spacetime,
    x0: Point,
    k0: Vec4,
    span: (f64, f64),
    step: f64,
) -> Result<Trajectory, TrajectoryError> {
    let n = steps_for(span, step)?;
    check_chart(st, &x0, span.0)?;
    let e0 = st.to_frame(&x0, &k0)[0];
    let kk = norm_g(st, &x0, &k0) / (e0 * e0);
    if kk.abs() > INIT_TOL {
        return Err(TrajectoryError::NotNull(kk));
    }
    let k0 = k0 / e0;
    let h = if n == 0 {
        0.0
    } else {
        (span.1 - span.0) / n as f64
    };
    let rhs = |t: f64, y: &[Vec4; 2]| -> Result<[Vec4; 2], TrajectoryError> {
        check_chart(st, &y[0], t)?;
        let gamma = st.christoffel(&y[0])?;
        Ok([y[1], -gamma.contract(&y[1], &y[1])])
    };
    let mut y = [x0, k0];
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(sample(st, span.0, x0, k0, Vec4::zeros()));
    for k in 0..n {
        let t = span.0 + k as f64 * h;
        y = rk4(&rhs, &y, t, h)?;
        let t1 = span.0 + (k + 1) as f64 * h;
        let ki = st.to_frame(&y[0], &y[1]);
        let drift = norm_g(st, &y[0], &y[1]) / (ki[0] * ki[0]);
        if drift.abs() > DRIFT_TOL {
            return Err(TrajectoryError::StepTooLarge { drift, at: t1 });
        }
        samples.push(sample(st, t1, y[0], y[1], Vec4::zeros()));
    }
    Ok(Trajectory {
        kind: Kind::Null,
        samples,
    })
}

/// Sample a closed-form worldline τ ↦ (x^μ, u^μ, du^μ/dτ) at the given parameters.
/// The acceleration is a^μ = du^μ/dτ + Γ^μ_{αβ} u^α u^β.
pub fn from_worldline(
    st: &Spacetime,
    kind: Kind,
    params: &[f64],
    f: impl Fn(f64) -> (Point, Vec4, Vec4),
) -> Result<Trajectory, TrajectoryError> {
    let mut samples = Vec::with_capacity(params.len());
    for &t in params {
        let (x, u, du) = f(t);
        check_chart(st, &x, t)?;
        let a = du + st.christoffel(&x)?.contract(&u, &u);
        samples.push(sample(st, t, x, u, a));
    }
    Ok(Trajectory { kind, samples })
}

/// Evenly spaced parameters t0, t0+h, ..., t1.
pub fn grid(span: (f64, f64), n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| span.0 + (span.1 - span.0) * k as f64 / n.max(1) as f64)
        .collect()
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        &self.samples[self.samples.len() - 1]
    }

    /// Restrict to samples `range` (inclusive of both ends).
    pub fn slice(&self, from: usize, to: usize) -> Trajectory {
        Trajectory {
            kind: self.kind,
            samples: self.samples[from..=to].to_vec(),
        }
    }

    /// Values at an arbitrary parameter by 4-point Lagrange interpolation of the stored samples.
    pub fn at(&self, lambda: f64) -> Sample {
        let s = &self.samples;
        let n = s.len();
        if n == 1 {
            return s[0];
        }
        let idx = s.partition_point(|p| p.lambda <= lambda).clamp(1, n - 1) - 1;
        let npts = n.min(4);
        let start = (idx as isize - 1).clamp(0, (n - npts) as isize) as usize;
        let pts = &s[start..start + npts];
        let w: Vec<f64> = (0..npts)
            .map(|i| {
                (0..npts)
                    .filter(|&j| j != i)
                    .map(|j| (lambda - pts[j].lambda) / (pts[i].lambda - pts[j].lambda))
                    .product()
            })
            .collect();
        let mix = |g: &dyn Fn(&Sample) -> Vec4| {
            pts.iter()
                .zip(&w)
                .fold(Vec4::zeros(), |acc, (p, wi)| acc + g(p) * *wi)
        };
        Sample {
            lambda,
            x: mix(&|p| p.x),
            u: mix(&|p| p.u),
            u_frame: mix(&|p| p.u_frame),
            a_frame: mix(&|p| p.a_frame),
        }
    }

    /// Largest |u·u − 1| (timelike) or |u·u| (null) in frame components.
    pub fn normalisation_drift(&self) -> f64 {
        let target = if self.kind == Kind::Timelike {
            1.0
        } else {
            0.0
        };
        self.samples
            .iter()
            .map(|s| (mdot(&s.u_frame, &s.u_frame) - target).abs())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "lambda,x0,x1,x2,x3,u0,u1,u2,u3,uI0,uI1,uI2,uI3,aI0,aI1,aI2,aI3"
        )?;
        for s in &self.samples {
            let mut row = vec![fmt17(s.lambda)];
            for v in [&s.x, &s.u, &s.u_frame, &s.a_frame] {
                row.extend(v.iter().map(|c| fmt17(*c)));
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R, kind: Kind) -> Result<Trajectory, TrajectoryError> {
        let mut samples = Vec::new();
        for (n, line) in r.lines().enumerate() {
            let line = line.map_err(|e| TrajectoryError::Csv(e.to_string()))?;
            if n == 0 || line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| TrajectoryError::Csv(format!("line {}: {e}", n + 1)))?;
            if vals.len() != 17 {
                return Err(TrajectoryError::Csv(format!(
                    "line {}: expected 17 columns, got {}",
                    n + 1,
                    vals.len()
                )));
            }
            let v = |o: usize| Vec4::new(vals[o], vals[o + 1], vals[o + 2], vals[o + 3]);
            samples.push(Sample {
                lambda: vals[0],
                x: v(1),
                u: v(5),
                u_frame: v(9),
                a_frame: v(13),
            });
        }
        Ok(Trajectory { kind, samples })
    }
}

/// 17 significant digits, round-trip exact for f64.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// a^I at sample `index` from covariant differencing of the stored velocities:
/// a^μ = du^μ/dτ + Γ^μ_{αβ}u^αu^β, with a 5-point stencil in the interior.
pub fn proper_acceleration(
    st: &Spacetime,
    traj: &Trajectory,
    index: usize,
) -> Result<Vec4, TrajectoryError> {
    if traj.kind != Kind::Timelike {
        return Err(TrajectoryError::NullTrajectory);
    }
    let s = &traj.samples;
    let n = s.len();
    if n < 3 {
        return Err(TrajectoryError::BadStep);
    }
    let h = s[1].lambda - s[0].lambda;
    let u = |k: usize| s[k].u;
    let du = if index >= 2 && index + 2 < n {
        (u(index - 2) - u(index - 1) * 8.0 + u(index + 1) * 8.0 - u(index + 2)) / (12.0 * h)
    } else if index >= 1 && index + 1 < n {
        (u(index + 1) - u(index - 1)) / (2.0 * h)
    } else if index == 0 {
        (u(0) * -3.0 + u(1) * 4.0 - u(2)) / (2.0 * h)
    } else {
        (u(n - 1) * 3.0 - u(n - 2) * 4.0 + u(n - 3)) / (2.0 * h)
    };
    let x = s[index].x;
    let a = du + st.christoffel(&x)?.contract(&u(index), &u(index));
    Ok(st.to_frame(&x, &a))
}

/// Closed-form worldlines used as reference scenarios.
pub mod catalogue {
    use super::*;
    use crate::geometry::MetricField;
    use std::f64::consts::TAU;

    /// Flat spacetime, circle of radius `radius` in the xy-plane at speed β,
    /// `revolutions` turns sampled with `n` proper-time steps.
    pub fn flat_circular_orbit(
        beta: f64,
        radius: f64,
        revolutions: f64,
        n: usize,
    ) -> Result<(Spacetime, Trajectory), TrajectoryError> {
        let st = Spacetime::minkowski();
        let gamma = 1.0 / (1.0 - beta * beta).sqrt();
        let w = beta / radius;
        let tau_end = revolutions * TAU / (w * gamma);
        let tr = from_worldline(&st, Kind::Timelike, &grid((0.0, tau_end), n), |tau| {
            let ph = w * gamma * tau;
            let (s, c) = ph.sin_cos();
            (
                Vec4::new(gamma * tau, radius * c, radius * s, 0.0),
                Vec4::new(gamma, -beta * gamma * s, beta * gamma * c, 0.0),
                Vec4::new(
                    0.0,
                    -beta * w * gamma * gamma * c,
                    -beta * w * gamma * gamma * s,
                    0.0,
                ),
            )
        })?;
        Ok((st, tr))
    }

    /// Rindler observer at z = 0 circling in the xy-plane with coordinate
    /// angular velocity `omega`; `omega = 0` is the static hover.
    pub fn rindler_hover(
        g: f64,
        radius: f64,
        omega: f64,
        tau_end: f64,
        n: usize,
    ) -> Result<(Spacetime, Trajectory), TrajectoryError> {
        let st = Spacetime::diagonal(MetricField::Rindler { g });
        let ut = 1.0 / (1.0 - radius * radius * omega * omega).sqrt();
        let tr = from_worldline(&st, Kind::Timelike, &grid((0.0, tau_end), n), |tau| {
            let ph = omega * ut * tau;
            let (s, c) = ph.sin_cos();
            let (v, acc) = (radius * omega * ut, radius * omega * omega * ut * ut);
            (
                Vec4::new(ut * tau, radius * c, radius * s, 0.0),
                Vec4::new(ut, -v * s, v * c, 0.0),
                Vec4::new(0.0, -acc * c, -acc * s, 0.0),
            )
        })?;
        Ok((st, tr))
    }

    /// Equatorial circular geodesic of Schwarzschild at areal radius r > 3M.
    pub fn schwarzschild_circular_geodesic(
        mass: f64,
        r: f64,
        revolutions: f64,
        n: usize,
    ) -> Result<(Spacetime, Trajectory), TrajectoryError> {
        let st = Spacetime::diagonal(MetricField::Schwarzschild { mass });
        let ut = 1.0 / (1.0 - 3.0 * mass / r).sqrt();
        let w = (mass / (r * r * r)).sqrt();
        let tau_end = revolutions * TAU / (w * ut);
        let tr = from_worldline(&st, Kind::Timelike, &grid((0.0, tau_end), n), |tau| {
            (
                Vec4::new(ut * tau, r, std::f64::consts::FRAC_PI_2, w * ut * tau),
                Vec4::new(ut, 0.0, 0.0, w * ut),
                Vec4::zeros(),
            )
        })?;
        Ok((st, tr))
    }
}
