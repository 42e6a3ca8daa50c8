//! Mach–Zehnder phase bookkeeping: internal (proper-time) phases, the displacement phase
//! between packets that do not arrive at the same event, the transport phase of the
//! internal state, and the COW neutron table evaluated in extended precision.
//!
//! Everything except the COW functions works in natural units. The COW functions take SI
//! inputs and use exact decimal constants.

use crate::fermion::{self, WeylQubit};
use crate::geometry::{Point, Spacetime};
use crate::photon::{self, PolarisationQubit};
use crate::spinor::c;
use crate::trajectories::{Kind, Trajectory};
use crate::{Vec4, C64};
use dashu_float::DBig;
use std::str::FromStr;

/// Speed of light, m/s (exact).
pub const C_SI: &str = "299792458";
/// Reduced Planck constant, J·s (CODATA 2018, exact given h).
pub const HBAR_SI: &str = "1.054571817e-34";
pub const DEFAULT_PRECISION: usize = 50;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InterferometryError {
    #[error("arm has no wavevector samples")]
    MissingWavevector,
    #[error("wavevectors at recombination differ by {0:e}")]
    WavevectorMismatch(f64),
    #[error("states are orthogonal, the transport phase is undefined")]
    OrthogonalStates,
    #[error("states live in different Hilbert spaces")]
    MomentumMismatch,
    #[error("particle cannot reach the upper path (1 - g00/gamma^2 = {0})")]
    ImaginaryVelocity(String),
    #[error("negative radicand in weak-field formula ({0})")]
    NegativeRadicand(String),
    #[error("invalid COW configuration: {0}")]
    InvalidConfig(String),
}

/// Internal state carried by an arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArmState {
    Fermion(WeylQubit),
    Photon(PolarisationQubit),
}

/// One arm: trajectory with the covector k_μ + eA_μ already known at each sample.
#[derive(Debug, Clone)]
pub struct InterferometerArm {
    pub trajectory: Trajectory,
    /// k_μ at each sample (natural units, 1/length)
    pub wavevector: Vec<Vec4>,
    /// A_μ at each sample, if the arm is charged
    pub potential: Option<Vec<Vec4>>,
    pub state: Option<ArmState>,
}

impl InterferometerArm {
    /// Free fermion: k_μ = m g_{μν} u^ν.
    pub fn fermion(trajectory: Trajectory, st: &Spacetime, mass: f64) -> Self {
        let wavevector = trajectory
            .samples
            .iter()
            .map(|s| st.metric.eval(&s.x) * s.u * mass)
            .collect();
        InterferometerArm {
            trajectory,
            wavevector,
            potential: None,
            state: None,
        }
    }

    /// Photon with wavevector k_μ = E g_{μν} u^ν for the arm's affine velocity.
    pub fn photon(trajectory: Trajectory, st: &Spacetime, energy: f64) -> Self {
        let wavevector = trajectory
            .samples
            .iter()
            .map(|s| st.metric.eval(&s.x) * s.u * energy)
            .collect();
        InterferometerArm {
            trajectory,
            wavevector,
            potential: None,
            state: None,
        }
    }
}

/// ∫(k_μ + eA_μ) dx^μ along the arm; exactly zero for photons.
pub fn internal_phase(arm: &InterferometerArm, charge: f64) -> Result<f64, InterferometryError> {
    if arm.trajectory.kind == Kind::Null {
        return Ok(0.0);
    }
    let s = &arm.trajectory.samples;
    if arm.wavevector.len() != s.len() || s.is_empty() {
        return Err(InterferometryError::MissingWavevector);
    }
    let integrand: Vec<f64> = (0..s.len())
        .map(|i| {
            let mut k = arm.wavevector[i];
            if let Some(a) = &arm.potential {
                k += a[i] * charge;
            }
            k.dot(&s[i].u)
        })
        .collect();
    Ok(integrate_samples(
        s.iter().map(|p| p.lambda).collect::<Vec<_>>().as_slice(),
        &integrand,
    ))
}

/// Composite Simpson on an even number of uniform intervals, trapezoid otherwise.
fn integrate_samples(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let h = (x[n - 1] - x[0]) / (n - 1) as f64;
    let uniform = x
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-12 * h.abs().max(1e-300));
    if uniform && (n - 1) % 2 == 0 {
        let mut acc = y[0] + y[n - 1];
        for (i, v) in y.iter().enumerate().take(n - 1).skip(1) {
            acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        acc * h / 3.0
    } else {
        x.windows(2)
            .zip(y.windows(2))
            .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
            .sum()
    }
}

/// (k_μ + eA_μ)(x₁^μ − x₂^μ), with k₁ and k₂ required to agree.
pub fn displacement_phase(
    k1: &Vec4,
    k2: &Vec4,
    x1: &Point,
    x2: &Point,
    potential: Option<&Vec4>,
    charge: f64,
) -> Result<f64, InterferometryError> {
    let dk = (k1 - k2).amax();
    if dk > 1e-9 * k1.amax().max(1.0) {
        return Err(InterferometryError::WavevectorMismatch(dk));
    }
    let mut k = *k1;
    if let Some(a) = potential {
        k += a * charge;
    }
    Ok(k.dot(&(x1 - x2)))
}

fn overlap(s1: &ArmState, s2: &ArmState) -> Result<C64, InterferometryError> {
    match (s1, s2) {
        (ArmState::Fermion(a), ArmState::Fermion(b)) => {
            fermion::inner_product(a, b).map_err(|_| InterferometryError::MomentumMismatch)
        }
        (ArmState::Photon(a), ArmState::Photon(b)) => photon::polarisation_inner_product(a, b)
            .map_err(|_| InterferometryError::MomentumMismatch),
        _ => Err(InterferometryError::MomentumMismatch),
    }
}

/// arg⟨ψ⁽¹⁾|ψ⁽²⁾⟩.
pub fn transport_phase(s1: &ArmState, s2: &ArmState) -> Result<f64, InterferometryError> {
    let z = overlap(s1, s2)?;
    if z.norm() < 1e-12 {
        return Err(InterferometryError::OrthogonalStates);
    }
    Ok(z.arg())
}

/// a·ψ⁽¹⁾ + b·e^{iΔθ}·ψ⁽²⁾.
pub fn recombine(
    a: C64,
    s1: &ArmState,
    b: C64,
    s2: &ArmState,
    delta_theta: f64,
) -> Result<ArmState, InterferometryError> {
    overlap(s1, s2)?;
    let w = b * C64::from_polar(1.0, delta_theta);
    Ok(match (s1, s2) {
        (ArmState::Fermion(p), ArmState::Fermion(q)) => ArmState::Fermion(WeylQubit {
            spinor: p.spinor * a + q.spinor * w,
            ..*p
        }),
        (ArmState::Photon(p), ArmState::Photon(q)) => ArmState::Photon(PolarisationQubit {
            psi: p.psi * a + q.psi * w,
            ..*p
        }),
        _ => unreachable!("checked by overlap"),
    })
}

impl ArmState {
    pub fn norm_sqr(&self) -> f64 {
        match self {
            ArmState::Fermion(q) => q.norm_sqr(),
            ArmState::Photon(q) => q.norm_sqr(),
        }
    }
}

/// Phase contributions of a two-arm interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseResult {
    pub internal_1: f64,
    pub internal_2: f64,
    pub displacement: f64,
    pub transport: f64,
    pub total: f64,
}

impl PhaseResult {
    pub fn new(internal_1: f64, internal_2: f64, displacement: f64, transport: f64) -> Self {
        let total = (internal_2 - internal_1) + displacement + transport;
        PhaseResult {
            internal_1,
            internal_2,
            displacement,
            transport,
            total,
        }
    }
}

/// Full phase difference between two arms ending at x₁ and x₂ with a common wavevector.
/// The transport phase is included when both arms carry a state.
pub fn mach_zehnder(
    arm1: &InterferometerArm,
    arm2: &InterferometerArm,
    charge: f64,
) -> Result<PhaseResult, InterferometryError> {
    let i1 = internal_phase(arm1, charge)?;
    let i2 = internal_phase(arm2, charge)?;
    let k1 = arm1
        .wavevector
        .last()
        .ok_or(InterferometryError::MissingWavevector)?;
    let k2 = arm2
        .wavevector
        .last()
        .ok_or(InterferometryError::MissingWavevector)?;
    let a = arm1.potential.as_ref().and_then(|p| p.last());
    let disp = displacement_phase(
        k1,
        k2,
        &arm1.trajectory.last().x,
        &arm2.trajectory.last().x,
        a,
        charge,
    )?;
    let trans = match (&arm1.state, &arm2.state) {
        (Some(s1), Some(s2)) => transport_phase(s1, s2)?,
        _ => 0.0,
    };
    Ok(PhaseResult::new(i1, i2, disp, trans))
}

/// Detector probability |a + b e^{iΔθ}|² for equal normalised states, used for fringe sweeps.
pub fn fringe(a: C64, b: C64, delta_theta: f64) -> f64 {
    (a + b * C64::from_polar(1.0, delta_theta)).norm_sqr()
}

// ---------------------------------------------------------------------------
// COW table

/// Neutron interferometer in a uniform field, SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct COWConfig {
    pub mass: String,
    pub speed_v1: String,
    pub delta_z: String,
    pub ell: String,
    pub g: String,
    pub precision_digits: usize,
}

impl Default for COWConfig {
    fn default() -> Self {
        COWConfig {
            mass: "1.67e-27".into(),
            speed_v1: "2794".into(),
            delta_z: "0.0316".into(),
            ell: "0.0316".into(),
            g: "9.81".into(),
            precision_digits: DEFAULT_PRECISION,
        }
    }
}

struct Inputs {
    m: DBig,
    v1: DBig,
    dz: DBig,
    ell: DBig,
    g: DBig,
    c: DBig,
    hbar: DBig,
    one: DBig,
}

fn parse(name: &str, v: &str, p: usize) -> Result<DBig, InterferometryError> {
    let x = DBig::from_str(v.trim())
        .map_err(|_| InterferometryError::InvalidConfig(format!("{name} = {v}")))?;
    Ok(x.with_precision(p).value())
}

impl COWConfig {
    fn inputs(&self) -> Result<Inputs, InterferometryError> {
        let p = self.precision_digits.max(20);
        let i = Inputs {
            m: parse("mass", &self.mass, p)?,
            v1: parse("speed_v1", &self.speed_v1, p)?,
            dz: parse("delta_z", &self.delta_z, p)?,
            ell: parse("ell", &self.ell, p)?,
            g: parse("g", &self.g, p)?,
            c: parse("c", C_SI, p)?,
            hbar: parse("hbar", HBAR_SI, p)?,
            one: DBig::ONE.with_precision(p).value(),
        };
        for (name, v) in [
            ("mass", &i.m),
            ("speed_v1", &i.v1),
            ("ell", &i.ell),
            ("g", &i.g),
        ] {
            if *v <= DBig::ZERO {
                return Err(InterferometryError::InvalidConfig(format!(
                    "{name} must be positive"
                )));
            }
        }
        if i.dz < DBig::ZERO {
            return Err(InterferometryError::InvalidConfig(
                "delta_z must be nonnegative".into(),
            ));
        }
        if i.v1 >= i.c {
            return Err(InterferometryError::InvalidConfig(
                "speed_v1 must be below c".into(),
            ));
        }
        Ok(i)
    }
}

impl Inputs {
    fn gamma1(&self) -> DBig {
        let b2 = (&self.v1 * &self.v1) / (&self.c * &self.c);
        &self.one / (&self.one - b2).sqrt()
    }

    /// 1 + Δz g/c²
    fn redshift(&self) -> DBig {
        &self.one + (&self.dz * &self.g) / (&self.c * &self.c)
    }

    fn weak_bracket(&self) -> Result<DBig, InterferometryError> {
        let two = &self.one + &self.one;
        let rad = &self.one - two * &self.dz * &self.g / (&self.v1 * &self.v1);
        if rad < DBig::ZERO {
            return Err(InterferometryError::NegativeRadicand(format!("{rad:e}")));
        }
        Ok(&self.one - rad.sqrt())
    }
}

/// Δθ = (mℓγ₁/ħ)(v₁ − v₂/(1+Δzg/c²)²), v₂ = c√(g₀₀(1 − g₀₀/γ₁²)), g₀₀ = (1+Δzg/c²)².
pub fn cow_exact(cfg: &COWConfig) -> Result<DBig, InterferometryError> {
    let i = cfg.inputs()?;
    let g1 = i.gamma1();
    let rs = i.redshift();
    let g00 = &rs * &rs;
    let rad = &g00 * (&i.one - &g00 / (&g1 * &g1));
    if rad < DBig::ZERO {
        return Err(InterferometryError::ImaginaryVelocity(format!("{rad:e}")));
    }
    let v2 = &i.c * rad.sqrt();
    Ok(&i.m * &i.ell * &g1 / &i.hbar * (&i.v1 - v2 / g00))
}

/// Δθ ≈ (mℓv₁γ₁/ħ)(1 − √(1 − 2Δzg/v₁²)).
pub fn cow_weak_field(cfg: &COWConfig) -> Result<DBig, InterferometryError> {
    let i = cfg.inputs()?;
    Ok(&i.m * &i.ell * &i.v1 * i.gamma1() / &i.hbar * i.weak_bracket()?)
}

/// First order in Δzg/v₁² of the weak-field result: γ₁ mΔzℓg/(ħv₁).
pub fn cow_small_dv(cfg: &COWConfig) -> Result<DBig, InterferometryError> {
    let i = cfg.inputs()?;
    Ok(i.gamma1() * &i.m * &i.dz * &i.ell * &i.g / (&i.hbar * &i.v1))
}

/// Weak-field result with γ₁ = 1.
pub fn cow_nonrelativistic(cfg: &COWConfig) -> Result<DBig, InterferometryError> {
    let i = cfg.inputs()?;
    Ok(&i.m * &i.ell * &i.v1 / &i.hbar * i.weak_bracket()?)
}

/// (mℓ/ħ)(Δzg/v₁ + Δz²g²/(4v₁³)).
pub fn cow_g2_correction(cfg: &COWConfig) -> Result<DBig, InterferometryError> {
    let i = cfg.inputs()?;
    let x = &i.dz * &i.g;
    let four = DBig::from(4u8)
        .with_precision(cfg.precision_digits.max(20))
        .value();
    let v3 = &i.v1 * &i.v1 * &i.v1;
    Ok(&i.m * &i.ell / &i.hbar * (&x / &i.v1 + &x * &x / (four * v3)))
}

/// mΔzℓg/(ħv₁).
pub fn cow_standard(cfg: &COWConfig) -> Result<DBig, InterferometryError> {
    let i = cfg.inputs()?;
    Ok(&i.m * &i.dz * &i.ell * &i.g / (&i.hbar * &i.v1))
}

/// θ⁽¹⁾_int = (mc²/ħ)ℓ/(γ₁v₁), the internal phase of the lower horizontal leg.
pub fn cow_internal_lower(cfg: &COWConfig) -> Result<DBig, InterferometryError> {
    let i = cfg.inputs()?;
    Ok(&i.m * &i.c * &i.c / &i.hbar * &i.ell / (i.gamma1() * &i.v1))
}

/// k_μΔx^μ = (mc²ℓ/ħ)(γ₁/v₁ − γ₁/v₂) from the arrival-time offset.
pub fn cow_displacement(cfg: &COWConfig) -> Result<DBig, InterferometryError> {
    let i = cfg.inputs()?;
    let g1 = i.gamma1();
    let rs = i.redshift();
    let g00 = &rs * &rs;
    let rad = &g00 * (&i.one - &g00 / (&g1 * &g1));
    if rad < DBig::ZERO {
        return Err(InterferometryError::ImaginaryVelocity(format!("{rad:e}")));
    }
    let v2 = &i.c * rad.sqrt();
    Ok(&i.m * &i.c * &i.c * &i.ell / &i.hbar * (&g1 / &i.v1 - &g1 / v2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CowRow {
    pub label: &'static str,
    pub delta_theta: DBig,
    pub diff_from_cow: DBig,
    pub diff_from_exact: DBig,
}

pub const COW_LABELS: [&str; 6] = [
    "exact",
    "weak_field",
    "small_dv",
    "nonrelativistic",
    "g2_correction",
    "cow",
];

/// All six rows, differences taken in extended precision.
pub fn cow_table(cfg: &COWConfig) -> Result<Vec<CowRow>, InterferometryError> {
    if cfg.precision_digits < 40 {
        return Err(InterferometryError::InvalidConfig(
            "precision_digits must be at least 40".into(),
        ));
    }
    let vals = [
        cow_exact(cfg)?,
        cow_weak_field(cfg)?,
        cow_small_dv(cfg)?,
        cow_nonrelativistic(cfg)?,
        cow_g2_correction(cfg)?,
        cow_standard(cfg)?,
    ];
    let exact = vals[0].clone();
    let cow = vals[5].clone();
    Ok(COW_LABELS
        .iter()
        .zip(vals)
        .map(|(label, v)| CowRow {
            label,
            diff_from_cow: &v - &cow,
            diff_from_exact: &v - &exact,
            delta_theta: v,
        })
        .collect())
}

/// Scientific notation with exactly `digits` significant digits.
pub fn format_sig(x: &DBig, digits: usize) -> String {
    if *x == DBig::ZERO {
        return format!("{:.*}e0", digits - 1, 0.0);
    }
    let r = x.clone().with_precision(digits).value();
    let s = format!("{r:e}");
    let (mant, exp) = s.split_once('e').unwrap_or((&s, "0"));
    let (sign, mant) = mant
        .strip_prefix('-')
        .map(|m| ("-", m))
        .unwrap_or(("", mant));
    let mut ds: String = mant.chars().filter(|ch| ch.is_ascii_digit()).collect();
    while ds.len() < digits {
        ds.push('0');
    }
    format!("{sign}{}.{}e{exp}", &ds[..1], &ds[1..digits])
}

pub fn to_f64(x: &DBig) -> f64 {
    x.to_f64().value()
}

/// Photon polarisation of the recombined state is unchanged by a global phase; helper for tests.
pub fn phase_factor(theta: f64) -> C64 {
    c(theta.cos(), theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        let x = DBig::from_str("55.5").unwrap().with_precision(40).value();
        assert_eq!(format_sig(&x, 5), "5.5500e1");
        let y = DBig::from_str("-0.000123456789")
            .unwrap()
            .with_precision(40)
            .value();
        assert_eq!(format_sig(&y, 4), "-1.235e-4");
        assert_eq!(format_sig(&DBig::ZERO, 3), "0.00e0");
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let x: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|t| t * t * t).collect();
        assert!((integrate_samples(&x, &y) - 0.25).abs() < 1e-15);
    }
}
