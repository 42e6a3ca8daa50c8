//! Metrics, tetrads and the connection 1-form.
//!
//! Arrays with three indices are stored as `[Mat4; 4]`. For Christoffel symbols the
//! outer index is the upper one, `gamma[ρ][(μ, ν)] = Γ^ρ_{μν}`. For the connection
//! the outer index is the form index, `omega[ν][(I, J)] = ω_ν^I_J`.

use crate::{eta, Mat4, Vec4};
use std::fmt;
use std::sync::Arc;

pub type Point = Vec4;
pub type MetricFn = Arc<dyn Fn(&Point) -> Mat4 + Send + Sync>;
pub type TetradFn = Arc<dyn Fn(&Point) -> Mat4 + Send + Sync>;
pub type LorentzFn = Arc<dyn Fn(&Point) -> LorentzTransform + Send + Sync>;

/// Tolerance used for orthonormality and Lorentz-matrix checks.
pub const FRAME_TOL: f64 = 1e-10;
pub const DEFAULT_FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("metric is singular at {0:?}")]
    SingularMetric([f64; 4]),
    #[error("tetrad is not orthonormal (residual {0:e})")]
    NonOrthonormalTetrad(f64),
    #[error("not a proper orthochronous Lorentz transform (residual {residual:e}, det {det}, L00 {l00})")]
    ImproperTransform { residual: f64, det: f64, l00: f64 },
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
}

/// Metric catalogue plus user-supplied metrics.
#[derive(Clone)]
pub enum MetricField {
    Minkowski,
    /// g_tt = (1 + g z)², spatial part flat.
    Rindler {
        g: f64,
    },
    /// Coordinates (t, r, θ, φ).
    Schwarzschild {
        mass: f64,
    },
    Custom {
        name: String,
        eval: MetricFn,
    },
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MetricField({})", self.name())
    }
}

impl MetricField {
    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(&Point) -> Mat4 + Send + Sync + 'static,
    ) -> Self {
        MetricField::Custom {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    /// Build a catalogue metric from a name and its single parameter.
    pub fn from_name(name: &str, param: f64) -> Result<Self, GeometryError> {
        match name {
            "minkowski" => Ok(MetricField::Minkowski),
            "rindler" => Ok(MetricField::Rindler { g: param }),
            "schwarzschild" => Ok(MetricField::Schwarzschild { mass: param }),
            other => Err(GeometryError::UnknownMetric(other.to_string())),
        }
    }

    pub fn name(&self) -> String {
        match self {
            MetricField::Minkowski => "minkowski".into(),
            MetricField::Rindler { g } => format!("rindler({g})"),
            MetricField::Schwarzschild { mass } => format!("schwarzschild({mass})"),
            MetricField::Custom { name, .. } => name.clone(),
        }
    }

    pub fn eval(&self, x: &Point) -> Mat4 {
        match self {
            MetricField::Minkowski => eta(),
            MetricField::Rindler { g } => {
                let mut m = eta();
                m[(0, 0)] = (1.0 + g * x[3]).powi(2);
                m
            }
            MetricField::Schwarzschild { mass } => {
                let (r, th) = (x[1], x[2]);
                let f = 1.0 - 2.0 * mass / r;
                Mat4::from_diagonal(&Vec4::new(f, -1.0 / f, -r * r, -(r * th.sin()).powi(2)))
            }
            MetricField::Custom { eval, .. } => eval(x),
        }
    }

    /// ∂_α g_{μν} for α = 0..3, closed form for the catalogue, `None` for custom metrics.
    fn analytic_derivative(&self, x: &Point) -> Option<[Mat4; 4]> {
        let mut d = [Mat4::zeros(); 4];
        match self {
            MetricField::Minkowski => {}
            MetricField::Rindler { g } => {
                d[3][(0, 0)] = 2.0 * g * (1.0 + g * x[3]);
            }
            MetricField::Schwarzschild { mass } => {
                let (r, th) = (x[1], x[2]);
                let f = 1.0 - 2.0 * mass / r;
                let fp = 2.0 * mass / (r * r);
                d[1][(0, 0)] = fp;
                d[1][(1, 1)] = fp / (f * f);
                d[1][(2, 2)] = -2.0 * r;
                d[1][(3, 3)] = -2.0 * r * th.sin().powi(2);
                d[2][(3, 3)] = -2.0 * r * r * th.sin() * th.cos();
            }
            MetricField::Custom { .. } => return None,
        }
        Some(d)
    }

    /// ∂_α g_{μν}: closed form where available, otherwise finite differences.
    pub fn derivative(&self, x: &Point, step: f64) -> [Mat4; 4] {
        self.analytic_derivative(x)
            .unwrap_or_else(|| fd_derivative(&|p: &Point| self.eval(p), x, step))
    }

    pub fn is_catalogue(&self) -> bool {
        !matches!(self, MetricField::Custom { .. })
    }
}

/// Central differences with one Richardson level, per coordinate, step scaled by max(1, |x^α|).
pub fn fd_derivative(f: &dyn Fn(&Point) -> Mat4, x: &Point, step: f64) -> [Mat4; 4] {
    std::array::from_fn(|a| {
        let h = step * x[a].abs().max(1.0);
        let central = |h: f64| {
            let mut xp = *x;
            let mut xm = *x;
            xp[a] += h;
            xm[a] -= h;
            (f(&xp) - f(&xm)) / (2.0 * h)
        };
        let d1 = central(h);
        let d2 = central(h / 2.0);
        (d2 * 4.0 - d1) / 3.0
    })
}

/// Γ^ρ_{μν}(x); `gamma[ρ][(μ, ν)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChristoffelSymbols(pub [Mat4; 4]);

impl ChristoffelSymbols {
    pub fn get(&self, rho: usize, mu: usize, nu: usize) -> f64 {
        self.0[rho][(mu, nu)]
    }

    /// Γ^ρ_{μν} a^μ b^ν.
    pub fn contract(&self, a: &Vec4, b: &Vec4) -> Vec4 {
        Vec4::from_fn(|rho, _| (a.transpose() * self.0[rho] * b)[(0, 0)])
    }
}

pub fn christoffel(
    metric: &MetricField,
    x: &Point,
    step: f64,
) -> Result<ChristoffelSymbols, GeometryError> {
    let g = metric.eval(x);
    let ginv = g
        .try_inverse()
        .ok_or(GeometryError::SingularMetric([x[0], x[1], x[2], x[3]]))?;
    let dg = metric.derivative(x, step);
    // lowered Γ_{σμν} = ½(∂_μ g_{σν} + ∂_ν g_{σμ} − ∂_σ g_{μν})
    let low: [Mat4; 4] = std::array::from_fn(|s| {
        Mat4::from_fn(|m, n| 0.5 * (dg[m][(s, n)] + dg[n][(s, m)] - dg[s][(m, n)]))
    });
    Ok(ChristoffelSymbols(std::array::from_fn(|rho| {
        let mut acc = Mat4::zeros();
        for s in 0..4 {
            if ginv[(rho, s)] != 0.0 {
                acc += low[s] * ginv[(rho, s)];
            }
        }
        acc
    })))
}

/// A proper orthochronous Lorentz matrix Λ^I_J.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzTransform(Mat4);

impl LorentzTransform {
    pub fn new(m: Mat4) -> Result<Self, GeometryError> {
        let residual = (m.transpose() * eta() * m - eta()).amax();
        let det = m.determinant();
        let l00 = m[(0, 0)];
        if residual > FRAME_TOL * m.amax().max(1.0).powi(2) || det <= 0.0 || l00 < 1.0 - FRAME_TOL {
            return Err(GeometryError::ImproperTransform { residual, det, l00 });
        }
        Ok(LorentzTransform(m))
    }

    pub fn identity() -> Self {
        LorentzTransform(Mat4::identity())
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        LorentzTransform(eta() * self.0.transpose() * eta())
    }

    pub fn compose(&self, other: &LorentzTransform) -> Self {
        LorentzTransform(self.0 * other.0)
    }

    /// Rotation by `angle` about the unit spatial axis `n` (right-handed).
    pub fn rotation(n: [f64; 3], angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let mut m = Mat4::identity();
        for i in 0..3 {
            for j in 0..3 {
                let mut v = n[i] * n[j] * (1.0 - c);
                if i == j {
                    v += c;
                }
                m[(i + 1, j + 1)] = v;
            }
        }
        m[(1, 2)] -= n[2] * s;
        m[(2, 1)] += n[2] * s;
        m[(1, 3)] += n[1] * s;
        m[(3, 1)] -= n[1] * s;
        m[(2, 3)] -= n[0] * s;
        m[(3, 2)] += n[0] * s;
        LorentzTransform(m)
    }

    /// Pure boost taking the rest 4-velocity (1,0,0,0) to `u`.
    ///
    /// Λ^0_0 = u⁰, Λ^i_0 = Λ^0_i = u^i, Λ^i_j = δ^i_j + u^i u^j/(1+u⁰).
    pub fn boost_to(u: &Vec4) -> Self {
        let mut m = Mat4::identity();
        m[(0, 0)] = u[0];
        for i in 1..4 {
            m[(i, 0)] = u[i];
            m[(0, i)] = u[i];
            for j in 1..4 {
                m[(i, j)] += u[i] * u[j] / (1.0 + u[0]);
            }
        }
        LorentzTransform(m)
    }

    pub fn apply(&self, v: &Vec4) -> Vec4 {
        self.0 * v
    }
}

/// Tetrad field e^μ_I(x), columns are the frame vectors.
#[derive(Clone)]
pub enum TetradField {
    /// e^μ_I = δ^μ_I / √|g_μμ| for a diagonal metric.
    Diagonal(MetricField),
    Custom(TetradFn),
    /// e'^μ_I = e^μ_J (Λ⁻¹)^J_I, i.e. frame components transform as V'^I = Λ^I_J V^J.
    Transformed {
        base: Box<TetradField>,
        lambda: LorentzFn,
    },
}

impl fmt::Debug for TetradField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TetradField::Diagonal(m) => write!(f, "TetradField::Diagonal({})", m.name()),
            TetradField::Custom(_) => write!(f, "TetradField::Custom"),
            TetradField::Transformed { base, .. } => {
                write!(f, "TetradField::Transformed({base:?})")
            }
        }
    }
}

impl TetradField {
    pub fn custom(eval: impl Fn(&Point) -> Mat4 + Send + Sync + 'static) -> Self {
        TetradField::Custom(Arc::new(eval))
    }

    pub fn eval(&self, x: &Point) -> Mat4 {
        match self {
            TetradField::Diagonal(m) => {
                let g = m.eval(x);
                Mat4::from_diagonal(&Vec4::from_fn(|i, _| 1.0 / g[(i, i)].abs().sqrt()))
            }
            TetradField::Custom(f) => f(x),
            TetradField::Transformed { base, lambda } => base.eval(x) * lambda(x).inverse().0,
        }
    }

    /// e^I_μ, the inverse matrix.
    pub fn inverse(&self, x: &Point) -> Option<Mat4> {
        self.eval(x).try_inverse()
    }

    /// ∂_ν e^μ_I. Exact for a diagonal tetrad on a catalogue metric.
    pub fn derivative(&self, x: &Point, step: f64) -> [Mat4; 4] {
        if let TetradField::Diagonal(m) = self {
            if m.is_catalogue() {
                let g = m.eval(x);
                let dg = m.derivative(x, step);
                return std::array::from_fn(|a| {
                    Mat4::from_diagonal(&Vec4::from_fn(|i, _| {
                        let gi = g[(i, i)];
                        -0.5 * gi.signum() * dg[a][(i, i)] / gi.abs().powf(1.5)
                    }))
                });
            }
        }
        fd_derivative(&|p: &Point| self.eval(p), x, step)
    }
}

/// max |g_{μν} e^μ_I e^ν_J − η_{IJ}|.
pub fn check_tetrad(metric: &MetricField, tetrad: &TetradField, x: &Point) -> f64 {
    let e = tetrad.eval(x);
    (e.transpose() * metric.eval(x) * e - eta()).amax()
}

/// Wrap a tetrad with a field of local Lorentz transformations, e'^μ_I = Λ_I^J e^μ_J.
pub fn transform_tetrad(tetrad: &TetradField, lambda_field: LorentzFn) -> TetradField {
    TetradField::Transformed {
        base: Box::new(tetrad.clone()),
        lambda: lambda_field,
    }
}

/// Like [`transform_tetrad`] but takes raw matrices and rejects improper ones at the given points.
pub fn transform_tetrad_checked(
    tetrad: &TetradField,
    lambda_field: impl Fn(&Point) -> Mat4 + Send + Sync + 'static,
    probe: &[Point],
) -> Result<TetradField, GeometryError> {
    for p in probe {
        LorentzTransform::new(lambda_field(p))?;
    }
    let f = Arc::new(lambda_field);
    Ok(transform_tetrad(
        tetrad,
        Arc::new(move |p: &Point| LorentzTransform(f(p))),
    ))
}

/// ω_ν^I_J; `omega[ν][(I, J)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionOneForm(pub [Mat4; 4]);

impl ConnectionOneForm {
    pub fn zero() -> Self {
        ConnectionOneForm([Mat4::zeros(); 4])
    }

    /// ω_{νIJ} with the first frame index lowered.
    pub fn lowered(&self, nu: usize) -> Mat4 {
        eta() * self.0[nu]
    }

    /// v^ν ω_ν^I_J.
    pub fn along(&self, v: &Vec4) -> Mat4 {
        let mut acc = Mat4::zeros();
        for nu in 0..4 {
            if v[nu] != 0.0 {
                acc += self.0[nu] * v[nu];
            }
        }
        acc
    }
}

/// ω_ν^I_J = e^I_ρ ∂_ν e^ρ_J + Γ^σ_{νρ} e^I_σ e^ρ_J.
pub fn connection_one_form(
    metric: &MetricField,
    tetrad: &TetradField,
    gamma: &ChristoffelSymbols,
    x: &Point,
    step: f64,
) -> Result<ConnectionOneForm, GeometryError> {
    let residual = check_tetrad(metric, tetrad, x);
    if residual > FRAME_TOL {
        return Err(GeometryError::NonOrthonormalTetrad(residual));
    }
    let e = tetrad.eval(x);
    let einv = e
        .try_inverse()
        .ok_or(GeometryError::NonOrthonormalTetrad(f64::INFINITY))?;
    let de = tetrad.derivative(x, step);
    Ok(ConnectionOneForm(std::array::from_fn(|nu| {
        // (Γ_ν)^σ_ρ = Γ^σ_{νρ}
        let g_nu = Mat4::from_fn(|s, r| gamma.0[s][(nu, r)]);
        einv * de[nu] + einv * g_nu * e
    })))
}

/// Metric, tetrad and finite-difference step bundled together.
#[derive(Clone, Debug)]
pub struct Spacetime {
    pub metric: MetricField,
    pub tetrad: TetradField,
    pub step: f64,
}

impl Spacetime {
    /// Catalogue metric with its diagonal tetrad.
    pub fn diagonal(metric: MetricField) -> Self {
        Spacetime {
            tetrad: TetradField::Diagonal(metric.clone()),
            metric,
            step: DEFAULT_FD_STEP,
        }
    }

    pub fn minkowski() -> Self {
        Self::diagonal(MetricField::Minkowski)
    }

    pub fn christoffel(&self, x: &Point) -> Result<ChristoffelSymbols, GeometryError> {
        christoffel(&self.metric, x, self.step)
    }

    pub fn connection(&self, x: &Point) -> Result<ConnectionOneForm, GeometryError> {
        let gamma = self.christoffel(x)?;
        connection_one_form(&self.metric, &self.tetrad, &gamma, x, self.step)
    }

    pub fn tetrad(&self, x: &Point) -> Mat4 {
        self.tetrad.eval(x)
    }

    /// Coordinate vector to frame components.
    pub fn to_frame(&self, x: &Point, v: &Vec4) -> Vec4 {
        self.tetrad.inverse(x).expect("tetrad invertible") * v
    }

    /// Frame components to a coordinate vector.
    pub fn to_coords(&self, x: &Point, v: &Vec4) -> Vec4 {
        self.tetrad.eval(x) * v
    }
}
