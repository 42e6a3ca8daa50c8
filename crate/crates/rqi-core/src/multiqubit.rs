//! Multipartite localised qubits: bipartite states with one Hilbert space per
//! (point, momentum), local evolution and state update, and teleportation over
//! three worldlines.
//!
//! Coefficients are stored in physical components: spinor components ψ_A for
//! fermions, polarisation components ψ^I for photons.

use crate::fermion::{
    inner_product_form, standard_boost_spinhalf_inv, TransportOperator, WeylQubit,
};
use crate::geometry::Point;
use crate::photon::adaption_rotation;
use crate::spinor::{c, expm2, pauli};
use crate::{eta, lower, Mat2c, Vec2c, Vec4, C64};
use nalgebra::{DMatrix, DVector};

/// Schmidt-coefficient equality tolerance for the canonical-form check.
pub const CANONICAL_TOL: f64 = 1e-10;
pub const ZERO_PROBABILITY: f64 = 1e-14;
const VELOCITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MultiqubitError {
    #[error("subsystem momenta differ")]
    MomentumMismatch,
    #[error("subsystem {0} out of range")]
    SubsystemOutOfRange(usize),
    #[error("outcome has zero probability")]
    ZeroProbabilityBranch,
    #[error("coefficient shape does not match the subsystems")]
    ShapeMismatch,
    #[error("basis is not orthonormal (residual {0:e})")]
    NonOrthonormalBasis(f64),
    #[error("shared pair is not in canonical form (residual {0:e})")]
    NonCanonicalEntanglement(f64),
    #[error("input amplitudes are not normalised")]
    NotNormalised,
    #[error("photon slot has a component along its wavevector")]
    NotTransverse,
    #[error("state vanishes")]
    VanishingState,
    #[error(transparent)]
    Fermion(#[from] crate::fermion::FermionError),
    #[error(transparent)]
    Photon(#[from] crate::photon::PhotonError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    Fermion,
    Photon,
}

impl Species {
    pub fn dim(self) -> usize {
        match self {
            Species::Fermion => 2,
            Species::Photon => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subsystem {
    pub point: Point,
    pub velocity: Vec4,
    pub species: Species,
}

impl Subsystem {
    pub fn fermion(point: Point, velocity: Vec4) -> Self {
        Subsystem {
            point,
            velocity,
            species: Species::Fermion,
        }
    }

    pub fn photon(point: Point, velocity: Vec4) -> Self {
        Subsystem {
            point,
            velocity,
            species: Species::Photon,
        }
    }

    /// Positive form G with ⟨a|b⟩ = ā G b: I_u for fermions, −η for photons.
    pub fn metric(&self) -> DMatrix<C64> {
        match self.species {
            Species::Fermion => {
                let m = inner_product_form(&self.velocity);
                DMatrix::from_fn(2, 2, |i, j| m[(i, j)])
            }
            Species::Photon => DMatrix::from_fn(4, 4, |i, j| c(-eta()[(i, j)], 0.0)),
        }
    }

    /// Map from physical components to components in an orthonormal frame (rest frame
    /// for fermions, the Jones components for photons).
    pub fn to_orthonormal(&self) -> Result<DMatrix<C64>, MultiqubitError> {
        Ok(match self.species {
            Species::Fermion => {
                let l = standard_boost_spinhalf_inv(&self.velocity)?;
                DMatrix::from_fn(2, 2, |i, j| l[(i, j)])
            }
            Species::Photon => {
                let r = adaption_rotation(&self.velocity)?;
                DMatrix::from_fn(2, 4, |i, j| c(r.matrix()[(i + 1, j)], 0.0))
            }
        })
    }

    fn same_hilbert_space(&self, other: &Subsystem) -> bool {
        if self.species != other.species {
            return false;
        }
        match self.species {
            Species::Fermion => (self.velocity - other.velocity).amax() <= VELOCITY_TOL,
            Species::Photon => {
                (self.velocity / self.velocity[0] - other.velocity / other.velocity[0]).amax()
                    <= VELOCITY_TOL
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    pub coefficients: DMatrix<C64>,
    pub subsystems: [Subsystem; 2],
}

impl BipartiteState {
    pub fn new(
        coefficients: DMatrix<C64>,
        subsystems: [Subsystem; 2],
    ) -> Result<Self, MultiqubitError> {
        if coefficients.nrows() != subsystems[0].species.dim()
            || coefficients.ncols() != subsystems[1].species.dim()
        {
            return Err(MultiqubitError::ShapeMismatch);
        }
        let s = BipartiteState {
            coefficients,
            subsystems,
        };
        if s.transversality_residual() > 1e-9 * s.coefficients.norm().max(1.0) {
            return Err(MultiqubitError::NotTransverse);
        }
        Ok(s)
    }

    /// a ⊗ b for two fermion qubits.
    pub fn product(a: &WeylQubit, b: &WeylQubit) -> Self {
        let m = DMatrix::from_fn(2, 2, |i, j| a.spinor[i] * b.spinor[j]);
        BipartiteState {
            coefficients: m,
            subsystems: [
                Subsystem::fermion(a.point, a.velocity),
                Subsystem::fermion(b.point, b.velocity),
            ],
        }
    }

    /// max |u_I ψ^{I·}| over photon slots.
    pub fn transversality_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for (k, s) in self.subsystems.iter().enumerate() {
            if s.species == Species::Photon {
                let ul = DVector::from_fn(4, |i, _| c(lower(&s.velocity)[i], 0.0));
                let v: Vec<C64> = if k == 0 {
                    (ul.transpose() * &self.coefficients)
                        .iter()
                        .copied()
                        .collect()
                } else {
                    (&self.coefficients * ul).iter().copied().collect()
                };
                r = v.iter().map(|z| z.norm()).fold(r, f64::max);
            }
        }
        r
    }

    pub fn norm_sqr(&self) -> f64 {
        bipartite_inner_product(self, self)
            .map(|z| z.re)
            .unwrap_or(f64::NAN)
    }

    pub fn normalised(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        self.coefficients /= c(n, 0.0);
        self
    }

    /// Coefficients in orthonormal frames of both slots.
    pub fn orthonormal_coefficients(&self) -> Result<DMatrix<C64>, MultiqubitError> {
        let a = self.subsystems[0].to_orthonormal()?;
        let b = self.subsystems[1].to_orthonormal()?;
        Ok(a * &self.coefficients * b.transpose())
    }

    /// Schmidt coefficients, descending.
    pub fn schmidt_coefficients(&self) -> Result<Vec<f64>, MultiqubitError> {
        let m = self.orthonormal_coefficients()?;
        let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        Ok(s)
    }

    /// Entanglement entropy of either reduced state, in nats.
    pub fn entanglement_entropy(&self) -> Result<f64, MultiqubitError> {
        let s = self.schmidt_coefficients()?;
        let total: f64 = s.iter().map(|x| x * x).sum();
        Ok(s.iter()
            .map(|x| x * x / total)
            .filter(|p| *p > 1e-300)
            .map(|p| -p * p.ln())
            .sum())
    }
}

/// Σ ā_{ab} G₁_{aa'} G₂_{bb'} b_{a'b'}.
pub fn bipartite_inner_product(
    s: &BipartiteState,
    t: &BipartiteState,
) -> Result<C64, MultiqubitError> {
    for k in 0..2 {
        if !s.subsystems[k].same_hilbert_space(&t.subsystems[k]) {
            return Err(MultiqubitError::MomentumMismatch);
        }
    }
    let g1 = s.subsystems[0].metric();
    let g2 = s.subsystems[1].metric();
    let m = s.coefficients.adjoint() * g1 * &t.coefficients;
    Ok(m.component_mul(&g2).sum())
}

/// One local step on a subsystem.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalStep {
    /// transport operator with the point it ends at
    Transport(TransportOperator, Point),
    /// iD/dλ ψ = ô ψ for a time step dλ; ô must be Hermitian under the slot's form
    Hamiltonian(DMatrix<C64>, f64),
}

pub fn evolve_local(
    s: &BipartiteState,
    which: usize,
    step: &LocalStep,
) -> Result<BipartiteState, MultiqubitError> {
    if which > 1 {
        return Err(MultiqubitError::SubsystemOutOfRange(which));
    }
    let mut out = s.clone();
    let op: DMatrix<C64> = match step {
        LocalStep::Transport(t, end) => {
            let sub = &s.subsystems[which];
            if sub.species != Species::Fermion || (t.u_start - sub.velocity).amax() > 1e-7 {
                return Err(MultiqubitError::MomentumMismatch);
            }
            out.subsystems[which].velocity = t.u_end;
            out.subsystems[which].point = *end;
            DMatrix::from_fn(2, 2, |i, j| t.matrix[(i, j)])
        }
        LocalStep::Hamiltonian(h, dl) => {
            let d = s.subsystems[which].species.dim();
            if h.nrows() != d || h.ncols() != d {
                return Err(MultiqubitError::ShapeMismatch);
            }
            if d == 2 {
                let m = Mat2c::from_fn(|i, j| h[(i, j)] * c(0.0, -dl));
                let e = expm2(&m);
                DMatrix::from_fn(2, 2, |i, j| e[(i, j)])
            } else {
                (h * c(0.0, -dl)).exp()
            }
        }
    };
    apply(&mut out.coefficients, which, &op);
    Ok(out)
}

fn apply(coeffs: &mut DMatrix<C64>, which: usize, op: &DMatrix<C64>) {
    *coeffs = if which == 0 {
        op * &*coeffs
    } else {
        &*coeffs * op.transpose()
    };
}

/// Apply a projector to one slot; returns the branch probability and renormalised state.
pub fn update_on_outcome(
    s: &BipartiteState,
    which: usize,
    projector: &DMatrix<C64>,
) -> Result<(f64, BipartiteState), MultiqubitError> {
    if which > 1 {
        return Err(MultiqubitError::SubsystemOutOfRange(which));
    }
    let d = s.subsystems[which].species.dim();
    if projector.nrows() != d || projector.ncols() != d {
        return Err(MultiqubitError::ShapeMismatch);
    }
    let mut out = s.clone();
    apply(&mut out.coefficients, which, projector);
    let p = out.norm_sqr() / s.norm_sqr();
    if p <= ZERO_PROBABILITY {
        return Err(MultiqubitError::ZeroProbabilityBranch);
    }
    Ok((p, out.normalised()))
}

/// (Anti)symmetrised state of two identical particles sharing a momentum.
pub fn symmetrise(
    s: &BipartiteState,
    antisymmetric: bool,
) -> Result<BipartiteState, MultiqubitError> {
    if !s.subsystems[0].same_hilbert_space(&s.subsystems[1]) {
        return Err(MultiqubitError::MomentumMismatch);
    }
    let t = s.coefficients.transpose();
    let m = if antisymmetric {
        &s.coefficients - t
    } else {
        &s.coefficients + t
    };
    let out = BipartiteState {
        coefficients: m,
        subsystems: s.subsystems,
    };
    let n = out.norm_sqr();
    if n <= ZERO_PROBABILITY {
        return Err(MultiqubitError::VanishingState);
    }
    Ok(out.normalised())
}

/// I_u-orthonormal pair (φ, ψ) at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinBasis {
    pub point: Point,
    pub velocity: Vec4,
    pub phi: Vec2c,
    pub psi: Vec2c,
}

impl SpinBasis {
    pub fn new(
        point: Point,
        velocity: Vec4,
        phi: Vec2c,
        psi: Vec2c,
    ) -> Result<Self, MultiqubitError> {
        let b = SpinBasis {
            point,
            velocity,
            phi,
            psi,
        };
        let r = b.orthonormality_residual();
        if r > 1e-9 {
            return Err(MultiqubitError::NonOrthonormalBasis(r));
        }
        Ok(b)
    }

    /// L(u) applied to the rest-frame pair (↑, ↓) rotated by `rest`.
    pub fn boosted(point: Point, velocity: Vec4, rest: &Mat2c) -> Result<Self, MultiqubitError> {
        let l = crate::fermion::standard_boost_spinhalf(&velocity)? * rest;
        Self::new(
            point,
            velocity,
            l.column(0).into_owned(),
            l.column(1).into_owned(),
        )
    }

    pub fn matrix(&self) -> Mat2c {
        Mat2c::from_columns(&[self.phi, self.psi])
    }

    pub fn orthonormality_residual(&self) -> f64 {
        let b = self.matrix();
        crate::spinor::norm2(
            &(b.adjoint() * inner_product_form(&self.velocity) * b - Mat2c::identity()),
        )
    }

    pub fn transported(&self, t: &TransportOperator, end: Point) -> Self {
        SpinBasis {
            point: end,
            velocity: t.u_end,
            phi: t.matrix * self.phi,
            psi: t.matrix * self.psi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "Phi+",
            BellOutcome::PhiMinus => "Phi-",
            BellOutcome::PsiPlus => "Psi+",
            BellOutcome::PsiMinus => "Psi-",
        }
    }

    /// Bob's correction in his basis: 1, σ_z, σ_x, iσ_y.
    pub fn correction(self) -> Mat2c {
        match self {
            BellOutcome::PhiPlus => pauli(0),
            BellOutcome::PhiMinus => pauli(3),
            BellOutcome::PsiPlus => pauli(1),
            BellOutcome::PsiMinus => pauli(2) * c(0.0, 1.0),
        }
    }

    /// Components of the Bell state in the (φ⁽¹⁾,ψ⁽¹⁾)⊗(φ⁽²⁾,ψ⁽²⁾) basis.
    fn components(self) -> [[f64; 2]; 2] {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            BellOutcome::PhiPlus => [[r, 0.0], [0.0, r]],
            BellOutcome::PhiMinus => [[r, 0.0], [0.0, -r]],
            BellOutcome::PsiPlus => [[0.0, r], [r, 0.0]],
            BellOutcome::PsiMinus => [[0.0, r], [-r, 0.0]],
        }
    }
}

/// Three qubits with the tensor Υ_{A₁A₂A₃} in physical components.
///
/// `reference` holds the bases transported alongside the state; `working` holds the
/// bases the parties actually use. They differ only when a basis transport is skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportationSession {
    pub alpha: C64,
    pub beta: C64,
    /// Υ[a1][a2][a3]
    pub upsilon: [[[C64; 2]; 2]; 2],
    pub reference: [SpinBasis; 3],
    pub working: [SpinBasis; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportBranch {
    pub outcome: BellOutcome,
    pub probability: f64,
    /// Bob's corrected state in the reference basis (φ⁽³⁾, ψ⁽³⁾)
    pub bob_state: Vec2c,
    pub fidelity: f64,
}

impl TeleportationSession {
    /// Υ = (αφ⁽¹⁾ + βψ⁽¹⁾)(φ⁽²⁾φ⁽³⁾ + ψ⁽²⁾ψ⁽³⁾)/√2.
    pub fn new(alpha: C64, beta: C64, bases: [SpinBasis; 3]) -> Result<Self, MultiqubitError> {
        if ((alpha.norm_sqr() + beta.norm_sqr()) - 1.0).abs() > 1e-12 {
            return Err(MultiqubitError::NotNormalised);
        }
        for b in &bases {
            let r = b.orthonormality_residual();
            if r > 1e-9 {
                return Err(MultiqubitError::NonOrthonormalBasis(r));
            }
        }
        let input = bases[0].phi * alpha + bases[0].psi * beta;
        let r = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let upsilon = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                std::array::from_fn(|k| {
                    input[i]
                        * (bases[1].phi[j] * bases[2].phi[k] + bases[1].psi[j] * bases[2].psi[k])
                        * r
                })
            })
        });
        Ok(TeleportationSession {
            alpha,
            beta,
            upsilon,
            reference: bases,
            working: bases,
        })
    }

    /// Transport particle `which` (0, 1, 2) along with its basis. With
    /// `skip_working_basis` the party's basis is left behind.
    pub fn transport(
        &mut self,
        which: usize,
        t: &TransportOperator,
        end: Point,
        skip_working_basis: bool,
    ) -> Result<(), MultiqubitError> {
        if which > 2 {
            return Err(MultiqubitError::SubsystemOutOfRange(which));
        }
        if (t.u_start - self.reference[which].velocity).amax() > 1e-7 {
            return Err(MultiqubitError::MomentumMismatch);
        }
        let m = t.matrix;
        let old = self.upsilon;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let mut acc = c(0.0, 0.0);
                    for l in 0..2 {
                        acc += match which {
                            0 => m[(i, l)] * old[l][j][k],
                            1 => m[(j, l)] * old[i][l][k],
                            _ => m[(k, l)] * old[i][j][l],
                        };
                    }
                    self.upsilon[i][j][k] = acc;
                }
            }
        }
        self.reference[which] = self.reference[which].transported(t, end);
        if !skip_working_basis {
            self.working[which] = self.working[which].transported(t, end);
        }
        Ok(())
    }

    /// Υ in the reference bases.
    pub fn components(&self) -> Result<[[[C64; 2]; 2]; 2], MultiqubitError> {
        let inv: Vec<Mat2c> = self
            .reference
            .iter()
            .map(|b| {
                b.matrix()
                    .try_inverse()
                    .ok_or(MultiqubitError::NonOrthonormalBasis(f64::INFINITY))
            })
            .collect::<Result<_, _>>()?;
        let mut out = [[[c(0.0, 0.0); 2]; 2]; 2];
        for (i, oi) in out.iter_mut().enumerate() {
            for (j, oij) in oi.iter_mut().enumerate() {
                for (k, o) in oij.iter_mut().enumerate() {
                    for a in 0..2 {
                        for b in 0..2 {
                            for d in 0..2 {
                                *o += inv[0][(i, a)]
                                    * inv[1][(j, b)]
                                    * inv[2][(k, d)]
                                    * self.upsilon[a][b][d];
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Residual of the canonical form: the 2–3 factor must be 1/√2 in the shared bases,
    /// with equal Schmidt coefficients.
    pub fn canonical_residual(&self) -> Result<f64, MultiqubitError> {
        let comp = self.components()?;
        let input = [self.alpha, self.beta];
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut res: f64 = 0.0;
        let mut pair = DMatrix::<C64>::zeros(2, 2);
        for j in 0..2 {
            for k in 0..2 {
                pair[(j, k)] = input[0].conj() * comp[0][j][k] + input[1].conj() * comp[1][j][k];
                let target = if j == k { r } else { 0.0 };
                res = res.max((pair[(j, k)] - c(target, 0.0)).norm());
            }
        }
        for (i, inp) in input.iter().enumerate() {
            for j in 0..2 {
                for k in 0..2 {
                    res = res.max((comp[i][j][k] - inp * pair[(j, k)]).norm());
                }
            }
        }
        let s = pair.singular_values();
        res = res.max((s[0] - s[1]).abs());
        Ok(res)
    }

    /// Bob's unnormalised state for one Bell outcome, in physical components.
    fn bob_branch(&self, outcome: BellOutcome) -> Vec2c {
        let w = outcome.components();
        let (b1, b2) = (&self.working[0], &self.working[1]);
        let bell: [[C64; 2]; 2] = std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let v1 = [b1.phi[a], b1.psi[a]];
                let v2 = [b2.phi[b], b2.psi[b]];
                let mut acc = c(0.0, 0.0);
                for (p, vp) in v1.iter().enumerate() {
                    for (q, vq) in v2.iter().enumerate() {
                        acc += vp * vq * w[p][q];
                    }
                }
                acc
            })
        });
        let g1 = inner_product_form(&self.reference[0].velocity);
        let g2 = inner_product_form(&self.reference[1].velocity);
        let mut chi = Vec2c::zeros();
        for a3 in 0..2 {
            for a1 in 0..2 {
                for a2 in 0..2 {
                    for p in 0..2 {
                        for q in 0..2 {
                            chi[a3] += bell[p][q].conj()
                                * g1[(p, a1)]
                                * g2[(q, a2)]
                                * self.upsilon[a1][a2][a3];
                        }
                    }
                }
            }
        }
        chi
    }

    /// Every Bell outcome with its probability, Bob's corrected state and fidelity.
    pub fn branches(&self) -> Result<Vec<TeleportBranch>, MultiqubitError> {
        let res = self.canonical_residual()?;
        if res > CANONICAL_TOL {
            return Err(MultiqubitError::NonCanonicalEntanglement(res));
        }
        let total = self.total_norm();
        let g3 = inner_product_form(&self.reference[2].velocity);
        let bw = self.working[2].matrix();
        let bw_inv = bw
            .try_inverse()
            .ok_or(MultiqubitError::NonOrthonormalBasis(f64::INFINITY))?;
        let br_inv = self.reference[2]
            .matrix()
            .try_inverse()
            .ok_or(MultiqubitError::NonOrthonormalBasis(f64::INFINITY))?;
        let target = Vec2c::new(self.alpha, self.beta);
        BellOutcome::ALL
            .iter()
            .map(|&outcome| {
                let chi = self.bob_branch(outcome);
                let p = (chi.adjoint() * g3 * chi)[(0, 0)].re / total;
                let corrected = bw * outcome.correction() * bw_inv * chi;
                let mut out = br_inv * corrected;
                let n = out.norm();
                if n <= 1e-300 {
                    return Err(MultiqubitError::ZeroProbabilityBranch);
                }
                out /= c(n, 0.0);
                let fidelity = (target.adjoint() * out)[(0, 0)].norm_sqr();
                Ok(TeleportBranch {
                    outcome,
                    probability: p,
                    bob_state: out,
                    fidelity,
                })
            })
            .collect()
    }

    fn total_norm(&self) -> f64 {
        let g: Vec<Mat2c> = self
            .reference
            .iter()
            .map(|b| inner_product_form(&b.velocity))
            .collect();
        let mut acc = c(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                for d in 0..2 {
                    for x in 0..2 {
                        for y in 0..2 {
                            for z in 0..2 {
                                acc += self.upsilon[a][b][d].conj()
                                    * g[0][(a, x)]
                                    * g[1][(b, y)]
                                    * g[2][(d, z)]
                                    * self.upsilon[x][y][z];
                            }
                        }
                    }
                }
            }
        }
        acc.re
    }

    /// Run the protocol once; `r` ∈ [0, 1) selects the Bell outcome by its probability.
    pub fn teleport(&self, r: f64) -> Result<TeleportBranch, MultiqubitError> {
        let branches = self.branches()?;
        let mut acc = 0.0;
        for b in &branches {
            acc += b.probability;
            if r < acc {
                return Ok(b.clone());
            }
        }
        Ok(branches.last().cloned().expect("four branches"))
    }
}
