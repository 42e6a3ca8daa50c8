//! Completely positive maps in Liouville form.

use nalgebra::{DMatrix, DVector};

use crate::C64;

/// A linear map on d×d matrices stored as its d²×d² superoperator acting on
/// column-stacked vec(ρ). U ρ U† becomes conj(U) ⊗ U.
#[derive(Clone, Debug)]
pub struct CPMap {
    dim: usize,
    liouville: DMatrix<C64>,
}

impl CPMap {
    pub fn identity(dim: usize) -> Self {
        CPMap {
            dim,
            liouville: DMatrix::identity(dim * dim, dim * dim),
        }
    }

    pub fn unitary(u: &DMatrix<C64>) -> Self {
        CPMap {
            dim: u.nrows(),
            liouville: u.conjugate().kronecker(u),
        }
    }

    /// Σ_k w_k U_k ρ U_k†. Weights are expected to be nonnegative.
    pub fn mixture<'a, I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (f64, &'a DMatrix<C64>)>,
    {
        let mut liouville = DMatrix::zeros(dim * dim, dim * dim);
        for (w, u) in terms {
            liouville += u.conjugate().kronecker(u) * C64::from(w);
        }
        CPMap { dim, liouville }
    }

    pub fn from_liouville(dim: usize, liouville: DMatrix<C64>) -> Self {
        assert_eq!(liouville.shape(), (dim * dim, dim * dim));
        CPMap { dim, liouville }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn liouville(&self) -> &DMatrix<C64> {
        &self.liouville
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let v = DVector::from_column_slice(rho.as_slice());
        let out = &self.liouville * v;
        DMatrix::from_column_slice(self.dim, self.dim, out.as_slice())
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &CPMap) -> CPMap {
        CPMap {
            dim: self.dim,
            liouville: &self.liouville * &first.liouville,
        }
    }

    /// max |Tr Φ(E_jk) - δ_jk|.
    pub fn trace_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for col in 0..d * d {
            let tr: C64 = (0..d).map(|i| self.liouville[(i + i * d, col)]).sum();
            let expect = if col % d == col / d { 1.0 } else { 0.0 };
            worst = worst.max((tr - expect).norm());
        }
        worst
    }

    /// Choi matrix Σ_jk E_jk ⊗ Φ(E_jk).
    pub fn choi(&self) -> DMatrix<C64> {
        let d = self.dim;
        let mut j = DMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                let mut e = DMatrix::zeros(d, d);
                e[(a, b)] = C64::new(1.0, 0.0);
                let out = self.apply(&e);
                j.view_mut((a * d, b * d), (d, d)).copy_from(&out);
            }
        }
        j
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        let j = self.choi();
        let h = (&j + j.adjoint()) * C64::from(0.5);
        h.symmetric_eigenvalues().min()
    }

    /// Max-abs entry difference of the superoperators.
    pub fn distance(&self, other: &CPMap) -> f64 {
        (&self.liouville - &other.liouville).map(|z| z.norm()).max()
    }
}

/// Pauli transfer matrix on the Bloch vector for a qubit map, T_ij =
/// ½ Tr(σ_i Φ(σ_j)) for i, j ∈ {x, y, z}.
pub fn bloch_transfer(map: &CPMap) -> nalgebra::Matrix3<f64> {
    assert_eq!(map.dim(), 2);
    let (o, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    let im = C64::i();
    let paulis = [
        DMatrix::from_row_slice(2, 2, &[o, i, i, o]),
        DMatrix::from_row_slice(2, 2, &[o, -im, im, o]),
        DMatrix::from_row_slice(2, 2, &[i, o, o, -i]),
    ];
    nalgebra::Matrix3::from_fn(|r, c| {
        let out = map.apply(&paulis[c]);
        (&paulis[r] * out).trace().re / 2.0
    })
}
