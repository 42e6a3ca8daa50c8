//! Finite-dimensional unitary representations of U(1) and SU(2).

use nalgebra::DMatrix;

use crate::group::{wigner_d, Group, GroupElement};
use crate::{QrfError, C64};

/// A representation space.
///
/// `U1` carries one charge per basis vector, U(θ) = diag(e^{iqθ}). `SU2` is a
/// direct sum of irreps D^j ⊗ I_μ given as (2j, μ) blocks, each block indexed
/// by (m, k) → m_idx·μ + k with m descending. Products use the left factor as
/// the outer index.
#[derive(Clone, Debug, PartialEq)]
pub enum RepSpace {
    U1 { charges: Vec<f64> },
    SU2 { blocks: Vec<(u32, usize)> },
    Product(Box<RepSpace>, Box<RepSpace>),
}

impl RepSpace {
    /// Single mode truncated at s photons: charges 0..=s.
    pub fn u1_fock(s: usize) -> Self {
        RepSpace::U1 {
            charges: (0..=s).map(|k| k as f64).collect(),
        }
    }

    /// Qubit with U(g) = exp(igσz/2).
    pub fn u1_qubit() -> Self {
        RepSpace::U1 {
            charges: vec![0.5, -0.5],
        }
    }

    pub fn su2_irrep(two_j: u32) -> Self {
        RepSpace::SU2 {
            blocks: vec![(two_j, 1)],
        }
    }

    pub fn spin_half() -> Self {
        RepSpace::su2_irrep(1)
    }

    /// ⊕_{j=0..s} D^j ⊗ I_{2j+1}.
    pub fn su2_regular(s: u32) -> Self {
        RepSpace::SU2 {
            blocks: (0..=s).map(|j| (2 * j, 2 * j as usize + 1)).collect(),
        }
    }

    pub fn product(a: RepSpace, b: RepSpace) -> Self {
        RepSpace::Product(Box::new(a), Box::new(b))
    }

    pub fn dim(&self) -> usize {
        match self {
            RepSpace::U1 { charges } => charges.len(),
            RepSpace::SU2 { blocks } => blocks.iter().map(|(tj, mu)| (*tj as usize + 1) * mu).sum(),
            RepSpace::Product(a, b) => a.dim() * b.dim(),
        }
    }

    pub fn group(&self) -> Result<Group, QrfError> {
        match self {
            RepSpace::U1 { .. } => Ok(Group::U1),
            RepSpace::SU2 { .. } => Ok(Group::SU2),
            RepSpace::Product(a, b) => {
                let (ga, gb) = (a.group()?, b.group()?);
                if ga == gb {
                    Ok(ga)
                } else {
                    Err(QrfError::GroupMismatch)
                }
            }
        }
    }

    /// Total charge per basis vector, for U(1) spaces.
    pub fn charges(&self) -> Option<Vec<f64>> {
        match self {
            RepSpace::U1 { charges } => Some(charges.clone()),
            RepSpace::SU2 { .. } => None,
            RepSpace::Product(a, b) => {
                let (qa, qb) = (a.charges()?, b.charges()?);
                Some(
                    qa.iter()
                        .flat_map(|x| qb.iter().map(move |y| x + y))
                        .collect(),
                )
            }
        }
    }

    /// Largest 2j occurring, for SU(2) spaces (the sum over factors for
    /// products).
    pub fn max_two_j(&self) -> Option<u32> {
        match self {
            RepSpace::U1 { .. } => None,
            RepSpace::SU2 { blocks } => blocks.iter().map(|b| b.0).max(),
            RepSpace::Product(a, b) => Some(a.max_two_j()? + b.max_two_j()?),
        }
    }

    pub fn unitary(&self, g: &GroupElement) -> Result<DMatrix<C64>, QrfError> {
        match (self, g) {
            (RepSpace::U1 { charges }, GroupElement::U1(theta)) => {
                Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    charges.len(),
                    charges.iter().map(|q| C64::from_polar(1.0, q * theta)),
                )))
            }
            (RepSpace::SU2 { blocks }, GroupElement::SU2(_)) => {
                let n = self.dim();
                let mut u = DMatrix::zeros(n, n);
                let mut off = 0;
                for &(two_j, mu) in blocks {
                    let d = wigner_d(two_j, g)?;
                    let blk = d.kronecker(&DMatrix::<C64>::identity(mu, mu));
                    let k = blk.nrows();
                    u.view_mut((off, off), (k, k)).copy_from(&blk);
                    off += k;
                }
                Ok(u)
            }
            (RepSpace::Product(a, b), _) => Ok(a.unitary(g)?.kronecker(&b.unitary(g)?)),
            _ => Err(QrfError::GroupMismatch),
        }
    }
}
