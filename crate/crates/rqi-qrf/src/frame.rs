//! Reference-frame states.

use nalgebra::{DMatrix, DVector};

use crate::group::{Group, GroupElement};
use crate::rep::RepSpace;
use crate::{QrfError, C64};

/// Probability mass kept when truncating a coherent state in the number basis.
pub const COHERENT_SUPPORT: f64 = 0.9999;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FrameKind {
    /// (s+1)^{-1/2} Σ_{k≤s} e^{ikg}|k⟩.
    U1PhaseEigenstate { s: usize },
    /// Glauber state with amplitude t (mean photon number t²), truncated at
    /// [`COHERENT_SUPPORT`] and renormalised.
    U1Coherent { amplitude: f64 },
    /// Maximally entangled irrep⊗multiplicity state on the regular rep.
    Su2Fiducial { s: u32 },
    /// Spin coherent state |j, j⟩ rotated by g.
    Su2Coherent { two_j: u32 },
}

/// Number of Fock states kept for a coherent state of amplitude t.
pub fn coherent_cutoff(amplitude: f64) -> usize {
    let mean = amplitude * amplitude;
    let mut p = (-mean).exp();
    let mut total = p;
    let mut k = 0usize;
    while total < COHERENT_SUPPORT {
        k += 1;
        p *= mean / k as f64;
        total += p;
    }
    k + 1
}

impl FrameKind {
    pub fn group(&self) -> Group {
        match self {
            FrameKind::U1PhaseEigenstate { .. } | FrameKind::U1Coherent { .. } => Group::U1,
            FrameKind::Su2Fiducial { .. } | FrameKind::Su2Coherent { .. } => Group::SU2,
        }
    }

    pub fn rep(&self) -> RepSpace {
        match *self {
            FrameKind::U1PhaseEigenstate { s } => RepSpace::u1_fock(s),
            FrameKind::U1Coherent { amplitude } => {
                RepSpace::u1_fock(coherent_cutoff(amplitude) - 1)
            }
            FrameKind::Su2Fiducial { s } => RepSpace::su2_regular(s),
            FrameKind::Su2Coherent { two_j } => RepSpace::su2_irrep(two_j),
        }
    }

    pub fn dim(&self) -> usize {
        self.rep().dim()
    }

    /// State at the identity orientation.
    pub fn reference_vector(&self) -> DVector<C64> {
        match *self {
            FrameKind::U1PhaseEigenstate { s } => {
                DVector::from_element(s + 1, C64::new(1.0 / ((s + 1) as f64).sqrt(), 0.0))
            }
            FrameKind::U1Coherent { amplitude } => {
                let n = coherent_cutoff(amplitude);
                let mut v = DVector::zeros(n);
                let mut c = (-amplitude * amplitude / 2.0).exp();
                for k in 0..n {
                    if k > 0 {
                        c *= amplitude / (k as f64).sqrt();
                    }
                    v[k] = C64::new(c, 0.0);
                }
                v.normalize()
            }
            FrameKind::Su2Fiducial { s } => {
                let rep = RepSpace::su2_regular(s);
                let norm = (rep.dim() as f64).sqrt();
                let mut v = DVector::zeros(rep.dim());
                let mut off = 0;
                for j in 0..=s as usize {
                    let mu = 2 * j + 1;
                    for m in 0..mu {
                        v[off + m * mu + m] = C64::new((mu as f64).sqrt() / norm, 0.0);
                    }
                    off += mu * mu;
                }
                v
            }
            FrameKind::Su2Coherent { two_j } => {
                let mut v = DVector::zeros(two_j as usize + 1);
                v[0] = C64::new(1.0, 0.0);
                v
            }
        }
    }

    /// Projector family used for relational measurements of a frame of this
    /// kind. Coherent U(1) frames are read out with phase eigenstates on the
    /// same truncated space; the other kinds are their own family.
    pub fn measurement_family(&self) -> FrameKind {
        match *self {
            FrameKind::U1Coherent { amplitude } => FrameKind::U1PhaseEigenstate {
                s: coherent_cutoff(amplitude) - 1,
            },
            k => k,
        }
    }

    /// ‖G(|e⟩⟨e|) - I/D‖ (max-abs entry). Zero for maximum-likelihood kinds.
    pub fn ml_residual(&self, quadrature_n: usize) -> f64 {
        let v = self.reference_vector();
        let rho = &v * v.adjoint();
        let rep = self.rep();
        let n = match self.group() {
            Group::U1 => quadrature_n,
            Group::SU2 => quadrature_n.max(rep.max_two_j().unwrap_or(0) as usize + 1),
        };
        let tw = crate::relational::twirl_operator(&rho, &rep, n).expect("own rep");
        let d = rep.dim();
        (tw - DMatrix::<C64>::identity(d, d) / C64::from(d as f64))
            .map(|z| z.norm())
            .max()
    }
}

/// A frame state |ψ(g)⟩ = U(g)|ψ(e)⟩.
#[derive(Clone, Debug)]
pub struct FrameState {
    pub kind: FrameKind,
    pub orientation: GroupElement,
    pub vector: DVector<C64>,
}

impl FrameState {
    pub fn new(kind: FrameKind, orientation: GroupElement) -> Result<Self, QrfError> {
        if orientation.group() != kind.group() {
            return Err(QrfError::GroupMismatch);
        }
        let vector = kind.rep().unitary(&orientation)? * kind.reference_vector();
        Ok(FrameState {
            kind,
            orientation,
            vector,
        })
    }

    pub fn identity(kind: FrameKind) -> Self {
        FrameState::new(kind, GroupElement::identity(kind.group())).expect("matching group")
    }

    pub fn rep(&self) -> RepSpace {
        self.kind.rep()
    }

    pub fn density(&self) -> DMatrix<C64> {
        &self.vector * self.vector.adjoint()
    }
}
