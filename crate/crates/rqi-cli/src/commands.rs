//! One function per command. Each returns the artifact as text.

use std::fmt::Write as _;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rqi_core::fermion::{self, Scheme};
use rqi_core::geometry::{LorentzTransform, MetricField, Point, Spacetime};
use rqi_core::interferometry::{cow_table as cow_rows, format_sig, COWConfig};
use rqi_core::measurement::{measure_spin, stern_gerlach_axis, SternGerlachConfig};
use rqi_core::multiqubit::{SpinBasis, TeleportationSession};
use rqi_core::photon::{self, PolarisationQubit};
use rqi_core::spinor::{c, norm2};
use rqi_core::trajectories::{
    catalogue, fmt17, integrate_lorentz_force, integrate_null_geodesic, IntegrationOptions, Kind,
    Trajectory, TrajectoryError,
};
use rqi_core::{Mat2c, Vec2c, Vec4, C64};
use rqi_qrf::channel::bloch_transfer;
use rqi_qrf::{bhd as qbhd, overlap, relational, FrameKind, FrameState, GroupElement, RepSpace};
use serde_json::json;

use crate::{CliError, RunConfig};

const METRICS: [&str; 3] = ["minkowski", "rindler", "schwarzschild"];

/// 17 significant digits, with −0 printed as 0.
fn num(v: f64) -> String {
    fmt17(v + 0.0)
}

/// Starting outside the chart is a bad `x0`; anything later is numeric.
fn trajectory_error(e: TrajectoryError) -> CliError {
    match e {
        TrajectoryError::OutOfChart(at) if at == 0.0 => CliError::config("x0", e.to_string()),
        TrajectoryError::NotNormalised(_) => CliError::config("velocity", e.to_string()),
        other => CliError::numeric(other),
    }
}

fn table(rows: &[(&str, f64)]) -> String {
    let mut s = String::from("quantity,value\n");
    for (k, v) in rows {
        let _ = writeln!(s, "{k},{}", num(*v));
    }
    s
}

fn spacetime(cfg: &RunConfig) -> Result<Spacetime, CliError> {
    let name = cfg.choice("metric", &METRICS)?;
    let param: f64 = cfg.get("metric_param")?;
    if name != "minkowski" && !(param > 0.0) {
        return Err(CliError::config("metric_param", "must be positive"));
    }
    let metric = MetricField::from_name(name, param)
        .map_err(|e| CliError::config("metric", e.to_string()))?;
    Ok(Spacetime::diagonal(metric))
}

fn point(cfg: &RunConfig, key: &str) -> Result<Point, CliError> {
    let v = cfg.list(key, 4)?;
    Ok(Vec4::new(v[0], v[1], v[2], v[3]))
}

fn spinor(cfg: &RunConfig, key: &str) -> Result<Vec2c, CliError> {
    let v = cfg.list(key, 4)?;
    let s = Vec2c::new(c(v[0], v[1]), c(v[2], v[3]));
    if s.norm() == 0.0 {
        return Err(CliError::config(key, "must be nonzero"));
    }
    Ok(s.normalize())
}

fn frame_velocity(cfg: &RunConfig, key: &str) -> Result<Vec4, CliError> {
    let v = cfg.list(key, 3)?;
    let n2 = v.iter().map(|x| x * x).sum::<f64>();
    Ok(Vec4::new((1.0 + n2).sqrt(), v[0], v[1], v[2]))
}

fn positive(cfg: &RunConfig, key: &str) -> Result<f64, CliError> {
    let x: f64 = cfg.get(key)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(CliError::config(key, "must be positive"));
    }
    Ok(x)
}

fn steps(cfg: &RunConfig) -> Result<usize, CliError> {
    let n: usize = cfg.get("steps")?;
    if n == 0 {
        return Err(CliError::config("steps", "must be at least 1"));
    }
    Ok(n)
}

pub fn cow_table(cfg: &RunConfig) -> Result<String, CliError> {
    let cow = COWConfig {
        mass: cfg.raw("mass").into(),
        speed_v1: cfg.raw("speed_v1").into(),
        delta_z: cfg.raw("delta_z").into(),
        ell: cfg.raw("ell").into(),
        g: cfg.raw("g").into(),
        precision_digits: cfg.get("precision_digits")?,
    };
    if cow.precision_digits < 40 {
        return Err(CliError::config("precision_digits", "must be at least 40"));
    }
    let rows = cow_rows(&cow).map_err(|e| match e {
        rqi_core::interferometry::InterferometryError::InvalidConfig(m) => {
            let key = m.split([' ', '=']).next().unwrap_or("cow").to_string();
            CliError::config(key, m)
        }
        other => CliError::numeric(other),
    })?;
    let mut s = String::from("result,delta_theta,diff_from_cow,diff_from_exact\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.label,
            format_sig(&r.delta_theta, 30),
            format_sig(&r.diff_from_cow, 30),
            format_sig(&r.diff_from_exact, 30)
        );
    }
    Ok(s)
}

fn fermion_trajectory(cfg: &RunConfig) -> Result<(Spacetime, Trajectory), CliError> {
    let n = steps(cfg)?;
    let kind = cfg.choice("trajectory", &["geodesic", "circular"])?;
    if kind == "geodesic" {
        let st = spacetime(cfg)?;
        let x0 = point(cfg, "x0")?;
        let u_frame = frame_velocity(cfg, "velocity")?;
        let tau_end = positive(cfg, "tau_end")?;
        let u0 = st.to_coords(&x0, &u_frame);
        let tr = integrate_lorentz_force(
            &st,
            None,
            1.0,
            0.0,
            x0,
            u0,
            (0.0, tau_end),
            tau_end / n as f64,
            IntegrationOptions::default(),
        )
        .map_err(trajectory_error)?;
        return Ok((st, tr));
    }
    let radius = positive(cfg, "radius")?;
    let metric = cfg.choice("metric", &METRICS)?;
    let res = match metric {
        "minkowski" => {
            let beta: f64 = cfg.get("beta")?;
            if !(0.0..1.0).contains(&beta) {
                return Err(CliError::config("beta", "must lie in [0, 1)"));
            }
            catalogue::flat_circular_orbit(beta, radius, cfg.get("revolutions")?, n)
        }
        "rindler" => {
            let omega: f64 = cfg.get("omega")?;
            if (radius * omega).abs() >= 1.0 {
                return Err(CliError::config("omega", "radius * omega must be below 1"));
            }
            catalogue::rindler_hover(
                positive(cfg, "metric_param")?,
                radius,
                omega,
                positive(cfg, "tau_end")?,
                n,
            )
        }
        _ => {
            let mass = positive(cfg, "metric_param")?;
            if radius <= 3.0 * mass {
                return Err(CliError::config(
                    "radius",
                    "circular geodesics need radius > 3 * mass",
                ));
            }
            catalogue::schwarzschild_circular_geodesic(mass, radius, cfg.get("revolutions")?, n)
        }
    };
    res.map_err(CliError::numeric)
}

pub fn transport_fermion(cfg: &RunConfig) -> Result<String, CliError> {
    let scheme = match cfg.choice("scheme", &["magnus4", "midpoint"])? {
        "midpoint" => Scheme::Midpoint,
        _ => Scheme::Magnus4,
    };
    let rest = spinor(cfg, "spinor")?;
    let (st, tr) = fermion_trajectory(cfg)?;
    debug_assert_eq!(tr.kind, Kind::Timelike);
    let start = tr.first();
    let q = fermion::wigner_to_weyl(start.x, start.u_frame, &rest).map_err(CliError::numeric)?;
    let (out, op) = fermion::transport(&q, &tr, &st, None, scheme).map_err(CliError::numeric)?;
    let wigner =
        fermion::wigner_transport_operator(&tr, &st, None, scheme).map_err(CliError::numeric)?;
    let from_weyl = op.to_wigner().map_err(CliError::numeric)?;
    let rest_out = fermion::weyl_to_wigner(&out).map_err(CliError::numeric)?;
    let end = tr.last();
    Ok(table(&[
        ("samples", tr.len() as f64),
        ("tau_end", end.lambda),
        ("x_end_0", end.x[0]),
        ("x_end_1", end.x[1]),
        ("x_end_2", end.x[2]),
        ("x_end_3", end.x[3]),
        ("u_end_0", end.u_frame[0]),
        ("u_end_1", end.u_frame[1]),
        ("u_end_2", end.u_frame[2]),
        ("u_end_3", end.u_frame[3]),
        ("rest_up_re", rest_out[0].re),
        ("rest_up_im", rest_out[0].im),
        ("rest_down_re", rest_out[1].re),
        ("rest_down_im", rest_out[1].im),
        ("norm_drift", out.norm_sqr() - 1.0),
        ("unitarity_residual", op.unitarity_residual()),
        ("dual_route_error", norm2(&(wigner - from_weyl))),
        ("rotation_angle", fermion::rotation_angle(&from_weyl)),
    ]))
}

pub fn transport_photon(cfg: &RunConfig) -> Result<String, CliError> {
    let st = spacetime(cfg)?;
    let x0 = point(cfg, "x0")?;
    let d = cfg.list("direction", 3)?;
    let dn = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if dn == 0.0 {
        return Err(CliError::config("direction", "must be nonzero"));
    }
    let jones = spinor(cfg, "jones")?;
    let lambda_end = positive(cfg, "lambda_end")?;
    let n = steps(cfg)?;
    let k0 = st.to_coords(&x0, &Vec4::new(1.0, d[0] / dn, d[1] / dn, d[2] / dn));
    let tr = integrate_null_geodesic(&st, x0, k0, (0.0, lambda_end), lambda_end / n as f64)
        .map_err(trajectory_error)?;
    let q0 =
        PolarisationQubit::from_jones(x0, tr.first().u_frame, &jones).map_err(CliError::numeric)?;
    let q1 = photon::parallel_transport_polarisation(&q0, &tr, &st).map_err(CliError::numeric)?;
    let out = photon::extract_jones(&q1).map_err(CliError::numeric)?;
    let theta = photon::wigner_angle(&tr, &st).map_err(CliError::numeric)?;
    let predicted = photon::jones_rotation(theta) * jones;
    let dual = (out - predicted)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok(table(&[
        ("samples", tr.len() as f64),
        ("jones_1_re", out[0].re),
        ("jones_1_im", out[0].im),
        ("jones_2_re", out[1].re),
        ("jones_2_im", out[1].im),
        ("wigner_angle", theta),
        ("dual_route_error", dual),
        (
            "transversality",
            photon::eta_dot_real(&q1.velocity, &q1.psi).norm(),
        ),
        ("norm_drift", q1.norm_sqr() - 1.0),
    ]))
}

pub fn measure(cfg: &RunConfig) -> Result<String, CliError> {
    let rest = spinor(cfg, "spinor")?;
    let u = frame_velocity(cfg, "qubit_velocity")?;
    let v = frame_velocity(cfg, "apparatus_velocity")?;
    let dir = cfg.list("orientation", 3)?;
    let dn = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
    if dn == 0.0 {
        return Err(CliError::config("orientation", "must be nonzero"));
    }
    let shots: usize = cfg.get("shots")?;
    let seed: u64 = cfg.get("seed")?;
    let m = LorentzTransform::boost_to(&v).apply(&Vec4::new(
        0.0,
        dir[0] / dn,
        dir[1] / dn,
        dir[2] / dn,
    ));
    let sg = SternGerlachConfig::new(m, v, u).map_err(CliError::numeric)?;
    let n = stern_gerlach_axis(&sg).map_err(|e| CliError::config("orientation", e.to_string()))?;
    let q = fermion::wigner_to_weyl(Vec4::zeros(), u, &rest).map_err(CliError::numeric)?;
    let r = measure_spin(&q, &sg).map_err(CliError::numeric)?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}",
        json!({"type": "setup", "axis": [n[0], n[1], n[2], n[3]], "p_plus": r.p_plus, "p_minus": r.p_minus})
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plus = 0usize;
    for k in 0..shots {
        let up = rng.random::<f64>() < r.p_plus;
        plus += up as usize;
        let _ = writeln!(
            s,
            "{}",
            json!({"type": "shot", "index": k, "outcome": if up { 1 } else { -1 }})
        );
    }
    let _ = writeln!(
        s,
        "{}",
        json!({"type": "summary", "shots": shots, "plus": plus, "minus": shots - plus})
    );
    Ok(s)
}

fn complex(cfg: &RunConfig, key: &str) -> Result<C64, CliError> {
    let v = cfg.list(key, 2)?;
    Ok(c(v[0], v[1]))
}

/// Alice's input circles a Rindler hover, her half of the pair orbits in flat
/// space and Bob's half orbits a Schwarzschild mass.
pub fn teleport_legs(
    n: usize,
) -> Result<Vec<(fermion::TransportOperator, Point, Point)>, CliError> {
    let runs = [
        catalogue::rindler_hover(0.5, 0.8, 0.9, 6.0, n),
        catalogue::flat_circular_orbit(0.6, 2.0, 0.7, n),
        catalogue::schwarzschild_circular_geodesic(1.0, 9.0, 0.4, n),
    ];
    runs.into_iter()
        .map(|r| {
            let (st, tr) = r.map_err(CliError::numeric)?;
            let op = fermion::weyl_transport_operator(&tr, &st, None, None, Scheme::Magnus4)
                .map_err(CliError::numeric)?;
            Ok((op, tr.first().x, tr.last().x))
        })
        .collect()
}

pub fn teleport(cfg: &RunConfig) -> Result<String, CliError> {
    let (a, b) = (complex(cfg, "alpha")?, complex(cfg, "beta")?);
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if norm == 0.0 {
        return Err(CliError::config(
            "alpha",
            "alpha and beta cannot both vanish",
        ));
    }
    let skip = match cfg.choice("skip_basis", &["none", "input", "alice", "bob"])? {
        "input" => Some(0),
        "alice" => Some(1),
        "bob" => Some(2),
        _ => None,
    };
    let seed: u64 = cfg.get("seed")?;
    let legs = teleport_legs(steps(cfg)?)?;
    let bases: Vec<SpinBasis> = legs
        .iter()
        .map(|(op, x, _)| {
            SpinBasis::boosted(*x, op.u_start, &Mat2c::identity()).map_err(CliError::numeric)
        })
        .collect::<Result<_, _>>()?;
    let mut session = TeleportationSession::new(a / norm, b / norm, [bases[0], bases[1], bases[2]])
        .map_err(CliError::numeric)?;
    for (k, (op, _, end)) in legs.iter().enumerate() {
        session
            .transport(k, op, *end, skip == Some(k))
            .map_err(CliError::numeric)?;
    }
    let mut s = String::new();
    for br in session.branches().map_err(CliError::numeric)? {
        let st = br.bob_state;
        let _ = writeln!(
            s,
            "{}",
            json!({
                "type": "branch",
                "outcome": br.outcome.label(),
                "probability": br.probability,
                "fidelity": br.fidelity,
                "bob_state": [st[0].re, st[0].im, st[1].re, st[1].im],
            })
        );
    }
    let r = ChaCha8Rng::seed_from_u64(seed).random::<f64>();
    let pick = session.teleport(r).map_err(CliError::numeric)?;
    let _ = writeln!(
        s,
        "{}",
        json!({"type": "run", "outcome": pick.outcome.label(), "fidelity": pick.fidelity})
    );
    Ok(s)
}

pub fn qrf_decohere(cfg: &RunConfig) -> Result<String, CliError> {
    let group = cfg.choice("group", &["u1", "su2"])?;
    let (frame, system) = match (
        group,
        cfg.choice("frame", &["phase", "coherent", "fiducial"])?,
    ) {
        ("u1", "phase") => (
            FrameKind::U1PhaseEigenstate { s: cfg.get("s")? },
            RepSpace::u1_qubit(),
        ),
        ("u1", "coherent") => (
            FrameKind::U1Coherent {
                amplitude: positive(cfg, "amplitude")?,
            },
            RepSpace::u1_qubit(),
        ),
        ("su2", "fiducial") => (
            FrameKind::Su2Fiducial { s: cfg.get("s")? },
            RepSpace::spin_half(),
        ),
        ("su2", "coherent") => (
            FrameKind::Su2Coherent {
                two_j: cfg.get("two_j")?,
            },
            RepSpace::spin_half(),
        ),
        (_, f) => {
            return Err(CliError::config(
                "frame",
                format!("`{f}` frames are not available for {group}"),
            ))
        }
    };
    let mut n: usize = cfg.get("quadrature")?;
    if n == 0 {
        n = match frame {
            FrameKind::U1PhaseEigenstate { s } => 2 * s + 4,
            FrameKind::U1Coherent { amplitude } => {
                2 * rqi_qrf::frame::coherent_cutoff(amplitude) + 4
            }
            FrameKind::Su2Fiducial { s } => 2 * s as usize + 4,
            FrameKind::Su2Coherent { two_j } => two_j as usize + 4,
        };
    }
    // the coherent-state map has a one-dimensional closed form; the generic
    // route needs an n³ Euler grid over a (2j+1)-dimensional family
    let map = match frame {
        FrameKind::Su2Coherent { two_j } => overlap::su2_cs_decoherence(two_j, n),
        _ => relational::decoherence_map_a(&frame, &system, n).map_err(CliError::numeric)?,
    };
    let plus = nalgebra::DMatrix::from_element(2, 2, c(0.5, 0.0));
    let survival = (map.apply(&plus)[(0, 1)] / c(0.5, 0.0)).re;
    let t = bloch_transfer(&map);
    let mut rows = vec![("quadrature", n as f64), ("plus_survival", survival)];
    let names = [
        "t_xx", "t_xy", "t_xz", "t_yx", "t_yy", "t_yz", "t_zx", "t_zy", "t_zz",
    ];
    for (k, name) in names.iter().enumerate() {
        rows.push((name, t[(k / 3, k % 3)]));
    }
    rows.push(("trace_residual", map.trace_residual()));
    rows.push(("min_choi_eigenvalue", map.min_choi_eigenvalue()));
    if let FrameKind::Su2Coherent { two_j } = frame {
        rows.push((
            "deviation_from_dephasing",
            overlap::su2_cs_deviation(two_j, n),
        ));
    }
    Ok(table(&rows))
}

pub fn qrf_overlap(cfg: &RunConfig) -> Result<String, CliError> {
    let kind = cfg.choice("kind", &["u1_phase", "su2_fiducial", "su2_coherent"])?;
    let points: usize = cfg.get("points")?;
    if points < 2 {
        return Err(CliError::config("points", "must be at least 2"));
    }
    let grid = |end: f64| (0..points).map(move |k| end * k as f64 / (points - 1) as f64);
    let tau = std::f64::consts::TAU;
    let mut s = String::new();
    match kind {
        "u1_phase" => {
            let size: usize = cfg.get("s")?;
            s.push_str("delta,overlap_sq\n");
            for d in grid(tau) {
                let _ = writeln!(s, "{},{}", num(d), num(overlap::u1_overlap(size, d)));
            }
        }
        _ => {
            s.push_str("angle,re,im,abs2\n");
            let (end, f): (f64, Box<dyn Fn(f64) -> C64>) = if kind == "su2_fiducial" {
                let size: u32 = cfg.get("s")?;
                (
                    tau,
                    Box::new(move |w| overlap::su2_fiducial_overlap(size, w)),
                )
            } else {
                let two_j: u32 = cfg.get("two_j")?;
                (
                    std::f64::consts::PI,
                    Box::new(move |b| overlap::su2_coherent_overlap(two_j, 0.0, b, 0.0)),
                )
            };
            for x in grid(end) {
                let z = f(x);
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    num(x),
                    num(z.re),
                    num(z.im),
                    num(z.norm_sqr())
                );
            }
        }
    }
    Ok(s)
}

fn bhd_frame(cfg: &RunConfig, side: &str) -> Result<FrameState, CliError> {
    let (fk, sk, ak) = (
        format!("frame_{side}"),
        format!("size_{side}"),
        format!("angle_{side}"),
    );
    let kind = match cfg.choice(&fk, &["coherent", "phase"])? {
        "coherent" => FrameKind::U1Coherent {
            amplitude: positive(cfg, &sk)?,
        },
        _ => FrameKind::U1PhaseEigenstate { s: cfg.get(&sk)? },
    };
    FrameState::new(kind, GroupElement::u1(cfg.get(&ak)?)).map_err(CliError::numeric)
}

pub fn bhd(cfg: &RunConfig) -> Result<String, CliError> {
    let (a, b) = (bhd_frame(cfg, "a")?, bhd_frame(cfg, "b")?);
    let dist = qbhd::bhd_distribution(&a, &b).map_err(CliError::numeric)?;
    let mut s = String::from("two_j,two_m,probability\n");
    for (j, m, p) in dist {
        let _ = writeln!(s, "{j},{m},{}", num(p));
    }
    Ok(s)
}
