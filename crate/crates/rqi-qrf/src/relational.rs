//! Twirls, relational encoding and recovery, the relational instrument and
//! the change of reference frame.

use nalgebra::{DMatrix, DVector};

use crate::channel::CPMap;
use crate::frame::{FrameKind, FrameState};
use crate::group::{Group, GroupElement, HaarGrid};
use crate::rep::RepSpace;
use crate::{QrfError, C64};

/// Tolerance for density-matrix validation and invariance checks.
pub const STATE_TOL: f64 = 1e-10;
pub const INVARIANCE_TOL: f64 = 1e-8;

fn maxabs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn check_density(rho: &DMatrix<C64>, dim: usize) -> Result<(), QrfError> {
    if rho.shape() != (dim, dim) {
        return Err(QrfError::DimensionMismatch {
            expected: dim,
            found: rho.nrows(),
        });
    }
    let herm = maxabs(&(rho - rho.adjoint()));
    if herm > STATE_TOL {
        return Err(QrfError::NotDensityMatrix(format!(
            "not Hermitian ({herm:.2e})"
        )));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > STATE_TOL {
        return Err(QrfError::NotDensityMatrix(format!("trace {tr}")));
    }
    let h = (rho + rho.adjoint()) * C64::from(0.5);
    let min = h.symmetric_eigenvalues().min();
    if min < -STATE_TOL {
        return Err(QrfError::NotDensityMatrix(format!("eigenvalue {min:.2e}")));
    }
    Ok(())
}

/// ∫dμ(g) U(g) X U(g)† for any operator X, without state validation. U(1) is
/// done exactly by charge-sector projection; SU(2) on an Euler grid with
/// `quadrature_n` points per angle.
pub fn twirl_operator(
    x: &DMatrix<C64>,
    rep: &RepSpace,
    quadrature_n: usize,
) -> Result<DMatrix<C64>, QrfError> {
    let d = rep.dim();
    if x.shape() != (d, d) {
        return Err(QrfError::DimensionMismatch {
            expected: d,
            found: x.nrows(),
        });
    }
    match rep.group()? {
        Group::U1 => {
            let q = rep.charges().expect("U(1) space");
            Ok(DMatrix::from_fn(d, d, |i, j| {
                if (q[i] - q[j]).abs() < 1e-9 {
                    x[(i, j)]
                } else {
                    C64::new(0.0, 0.0)
                }
            }))
        }
        Group::SU2 => twirl_on_grid(x, rep, &HaarGrid::su2_euler(quadrature_n)),
    }
}

/// The same average as a plain quadrature sum over `grid`.
pub fn twirl_on_grid(
    x: &DMatrix<C64>,
    rep: &RepSpace,
    grid: &HaarGrid,
) -> Result<DMatrix<C64>, QrfError> {
    let d = rep.dim();
    let mut out = DMatrix::zeros(d, d);
    for (g, w) in &grid.points {
        let u = rep.unitary(g)?;
        out += (&u * x * u.adjoint()) * C64::from(*w);
    }
    Ok(out)
}

/// G-twirl of a density matrix.
pub fn g_twirl(
    rho: &DMatrix<C64>,
    rep: &RepSpace,
    quadrature_n: usize,
) -> Result<DMatrix<C64>, QrfError> {
    check_density(rho, rep.dim())?;
    twirl_operator(rho, rep, quadrature_n)
}

/// Relational encoding G_SR(ρ_S ⊗ |ψ⟩⟨ψ|_R).
pub fn encode(
    rho_s: &DMatrix<C64>,
    system: &RepSpace,
    frame: &FrameState,
    quadrature_n: usize,
) -> Result<DMatrix<C64>, QrfError> {
    check_density(rho_s, system.dim())?;
    let joint = RepSpace::product(system.clone(), frame.rep());
    twirl_operator(&rho_s.kronecker(&frame.density()), &joint, quadrature_n)
}

/// Measurement-family vector |g⟩ for a projector family.
fn family_vector(
    kind: &FrameKind,
    rep: &RepSpace,
    reference: &DVector<C64>,
    g: &GroupElement,
) -> Result<DVector<C64>, QrfError> {
    if g.group() != kind.group() {
        return Err(QrfError::GroupMismatch);
    }
    Ok(rep.unitary(g)? * reference)
}

/// Recovery map D ∫dμ(g) [U_S(g⁻¹) ⊗ ⟨g|] σ [U_S(g⁻¹)† ⊗ |g⟩], with ⟨g| from
/// the measurement family of `frame_kind`.
pub fn recover(
    sigma: &DMatrix<C64>,
    system: &RepSpace,
    frame_kind: &FrameKind,
    quadrature_n: usize,
) -> Result<DMatrix<C64>, QrfError> {
    let fam = frame_kind.measurement_family();
    let rep = fam.rep();
    let joint = RepSpace::product(system.clone(), rep.clone());
    let dim = joint.dim();
    if sigma.shape() != (dim, dim) {
        return Err(QrfError::DimensionMismatch {
            expected: dim,
            found: sigma.nrows(),
        });
    }
    let residual = maxabs(&(twirl_operator(sigma, &joint, quadrature_n)? - sigma));
    if residual > INVARIANCE_TOL {
        return Err(QrfError::NotInvariant(residual));
    }
    let e = fam.reference_vector();
    let scale = rep.dim() as f64;
    let ds = system.dim();
    let mut out = DMatrix::zeros(ds, ds);
    for (g, w) in &HaarGrid::for_group(fam.group(), quadrature_n).points {
        let v = family_vector(&fam, &rep, &e, g)?;
        let op = system.unitary(&g.inverse())?.kronecker(&v.adjoint());
        out += (&op * sigma * op.adjoint()) * C64::from(w * scale);
    }
    Ok(out)
}

fn require_ml(kind: &FrameKind) -> Result<(), QrfError> {
    if let FrameKind::U1Coherent { .. } = kind {
        return Err(QrfError::NonMLProjectors(kind.ml_residual(kind.dim() + 1)));
    }
    Ok(())
}

/// Matrix whose columns are |g⟩_A ⊗ |gh⟩_B over the grid, each scaled by
/// sqrt(w D_A D_B), so that V V† is the effect E_h.
fn effect_factor(
    proj_a: &FrameKind,
    proj_b: &FrameKind,
    h: &GroupElement,
    grid: &HaarGrid,
) -> Result<DMatrix<C64>, QrfError> {
    let (ra, rb) = (proj_a.rep(), proj_b.rep());
    let (ea, eb) = (proj_a.reference_vector(), proj_b.reference_vector());
    let scale = (ra.dim() * rb.dim()) as f64;
    let mut cols = Vec::with_capacity(grid.points.len());
    for (g, w) in &grid.points {
        let va = family_vector(proj_a, &ra, &ea, g)?;
        let vb = family_vector(proj_b, &rb, &eb, &g.compose(h)?)?;
        cols.push(va.kronecker(&vb) * C64::from((w * scale).sqrt()));
    }
    Ok(DMatrix::from_columns(&cols))
}

/// Effect E_h = D_A D_B ∫dμ(g) |g⟩⟨g|_A ⊗ |gh⟩⟨gh|_B.
pub fn relational_effect(
    proj_a: &FrameKind,
    proj_b: &FrameKind,
    h: &GroupElement,
    quadrature_n: usize,
) -> Result<DMatrix<C64>, QrfError> {
    require_ml(proj_a)?;
    require_ml(proj_b)?;
    if proj_a.group() != proj_b.group() {
        return Err(QrfError::GroupMismatch);
    }
    let grid = HaarGrid::for_group(proj_a.group(), quadrature_n);
    let v = effect_factor(proj_a, proj_b, h, &grid)?;
    Ok(&v * v.adjoint())
}

/// ‖∫dμ(h) E_h - I‖ (max-abs entry), with the same grid size for g and h.
pub fn povm_completeness_residual(
    proj_a: &FrameKind,
    proj_b: &FrameKind,
    quadrature_n: usize,
) -> Result<f64, QrfError> {
    let grid = HaarGrid::for_group(proj_a.group(), quadrature_n);
    let d = proj_a.dim() * proj_b.dim();
    let mut total = DMatrix::zeros(d, d);
    for (h, w) in &grid.points {
        total += relational_effect(proj_a, proj_b, h, quadrature_n)? * C64::from(*w);
    }
    Ok(maxabs(&(total - DMatrix::identity(d, d))))
}

/// Unnormalised post-measurement state D_A D_B ∫dμ(g) Π σ Π with
/// Π = I_S ⊗ |g⟩⟨g|_A ⊗ |gh⟩⟨gh|_B. Ordering is S ⊗ A ⊗ B; pass
/// `system_dim = 1` for a bare A ⊗ B state. The trace is the outcome density
/// P(h).
pub fn relational_instrument(
    sigma: &DMatrix<C64>,
    system_dim: usize,
    proj_a: &FrameKind,
    proj_b: &FrameKind,
    h: &GroupElement,
    quadrature_n: usize,
) -> Result<DMatrix<C64>, QrfError> {
    require_ml(proj_a)?;
    require_ml(proj_b)?;
    if proj_a.group() != proj_b.group() {
        return Err(QrfError::GroupMismatch);
    }
    let dab = proj_a.dim() * proj_b.dim();
    let dim = system_dim * dab;
    if sigma.shape() != (dim, dim) {
        return Err(QrfError::DimensionMismatch {
            expected: dim,
            found: sigma.nrows(),
        });
    }
    let grid = HaarGrid::for_group(proj_a.group(), quadrature_n);
    let v = effect_factor(proj_a, proj_b, h, &grid)?;
    let id = DMatrix::<C64>::identity(system_dim, system_dim);
    let mut out = DMatrix::zeros(dim, dim);
    let scale = (proj_a.dim() * proj_b.dim()) as f64;
    for (k, (_, w)) in grid.points.iter().enumerate() {
        // columns of V carry sqrt(w D_A D_B); Π needs unit vectors
        let weight = w * scale;
        if weight == 0.0 {
            continue;
        }
        let p = id.kronecker(&v.column(k).into_owned()) / C64::from(weight.sqrt());
        let x = p.adjoint() * sigma * &p;
        out += (&p * x * p.adjoint()) * C64::from(weight);
    }
    Ok(out)
}

/// Partial trace keeping the listed subsystems (in order) of a state on
/// ⊗ dims.
pub fn partial_trace(rho: &DMatrix<C64>, dims: &[usize], keep: &[usize]) -> DMatrix<C64> {
    let n: usize = dims.iter().product();
    assert_eq!(rho.shape(), (n, n));
    let kept: usize = keep.iter().map(|&k| dims[k]).product();
    let digits = |mut idx: usize| {
        let mut d = vec![0; dims.len()];
        for (slot, &size) in dims.iter().enumerate().rev() {
            d[slot] = idx % size;
            idx /= size;
        }
        d
    };
    let kept_index = |d: &[usize]| keep.iter().fold(0, |acc, &k| acc * dims[k] + d[k]);
    let mut out = DMatrix::zeros(kept, kept);
    for i in 0..n {
        let di = digits(i);
        for j in 0..n {
            let dj = digits(j);
            let traced_match = (0..dims.len())
                .filter(|s| !keep.contains(s))
                .all(|s| di[s] == dj[s]);
            if traced_match {
                out[(kept_index(&di), kept_index(&dj))] += rho[(i, j)];
            }
        }
    }
    out
}

/// Kernel D |⟨g|ψ(e)⟩|² with ⟨g| from the frame's
/// measurement family.
pub fn decoherence_kernel(frame: &FrameKind, g: &GroupElement) -> Result<f64, QrfError> {
    let fam = frame.measurement_family();
    let rep = fam.rep();
    let v = family_vector(&fam, &rep, &fam.reference_vector(), g)?;
    let psi = frame.reference_vector();
    Ok(rep.dim() as f64 * v.dotc(&psi).norm_sqr())
}

/// 𝓕^{(A)} = D ∫dμ(g) |⟨g|ψ(e)⟩|² 𝒰_S(g⁻¹).
pub fn decoherence_map_a(
    frame: &FrameKind,
    system: &RepSpace,
    quadrature_n: usize,
) -> Result<CPMap, QrfError> {
    let grid = HaarGrid::for_group(frame.group(), quadrature_n);
    let mut terms = Vec::with_capacity(grid.points.len());
    for (g, w) in &grid.points {
        terms.push((
            w * decoherence_kernel(frame, g)?,
            system.unitary(&g.inverse())?,
        ));
    }
    Ok(CPMap::mixture(
        system.dim(),
        terms.iter().map(|(w, u)| (*w, u)),
    ))
}

/// Factored change of frame: 𝓔_{|h⟩_B}(𝓕^{(A)} ∘ 𝒰_S(a⁻¹)[ρ_S]) on S ⊗ B,
/// with a the orientation of `frame_a` and |h⟩_B from B's measurement family.
pub fn change_frame(
    rho_s: &DMatrix<C64>,
    system: &RepSpace,
    frame_a: &FrameState,
    frame_b: &FrameKind,
    h: &GroupElement,
    quadrature_n: usize,
) -> Result<DMatrix<C64>, QrfError> {
    check_density(rho_s, system.dim())?;
    let ua = system.unitary(&frame_a.orientation.inverse())?;
    let rotated = &ua * rho_s * ua.adjoint();
    let decohered = decoherence_map_a(&frame_a.kind, system, quadrature_n)?.apply(&rotated);
    let fam = frame_b.measurement_family();
    let hb = FrameState::new(fam, *h)?;
    let joint = RepSpace::product(system.clone(), fam.rep());
    twirl_operator(&decohered.kronecker(&hb.density()), &joint, quadrature_n)
}

/// Result of the brute-force route: normalised state on S ⊗ B and P(h).
#[derive(Clone, Debug)]
pub struct FrameChange {
    pub state: DMatrix<C64>,
    pub probability: f64,
}

/// Tr_A[𝓜ʰ(σ_SAB)] / P(h) for σ_SAB = G_SA(ρ_S ⊗ |ψ(a)⟩⟨ψ(a)|) ⊗ G_B(ρ_B).
pub fn brute_force_change_frame(
    rho_s: &DMatrix<C64>,
    system: &RepSpace,
    frame_a: &FrameState,
    rho_b: &DMatrix<C64>,
    frame_b: &FrameKind,
    h: &GroupElement,
    quadrature_n: usize,
) -> Result<FrameChange, QrfError> {
    let sigma_sa = encode(rho_s, system, frame_a, quadrature_n)?;
    let fam_a = frame_a.kind.measurement_family();
    let fam_b = frame_b.measurement_family();
    let sigma_b = g_twirl(rho_b, &fam_b.rep(), quadrature_n)?;
    let sigma = sigma_sa.kronecker(&sigma_b);
    let post = relational_instrument(&sigma, system.dim(), &fam_a, &fam_b, h, quadrature_n)?;
    let probability = post.trace().re;
    if probability <= 0.0 {
        return Err(QrfError::InvalidArgument("outcome has zero density".into()));
    }
    let reduced = partial_trace(&post, &[system.dim(), fam_a.dim(), fam_b.dim()], &[0, 2]);
    Ok(FrameChange {
        state: reduced / C64::from(probability),
        probability,
    })
}

/// 𝓕^{(B)} ∘ 𝒰(h⁻¹) ∘ 𝓕^{(A)} ∘ 𝒰(a⁻¹).
pub fn net_decoherence(
    frame_a: &FrameState,
    frame_b: &FrameKind,
    system: &RepSpace,
    h: &GroupElement,
    quadrature_n: usize,
) -> Result<CPMap, QrfError> {
    let ua = CPMap::unitary(&system.unitary(&frame_a.orientation.inverse())?);
    let fa = decoherence_map_a(&frame_a.kind, system, quadrature_n)?;
    let uh = CPMap::unitary(&system.unitary(&h.inverse())?);
    let fb = decoherence_map_a(&frame_b.measurement_family(), system, quadrature_n)?;
    Ok(fb.compose(&uh).compose(&fa).compose(&ua))
}
