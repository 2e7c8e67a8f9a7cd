//! Hamiltonian assembly in the oscillator product basis.
//!
//! The operator is kept in tensor-structured form
//! `H = A_w ⊗ I + I ⊗ A_z - a3 · W ⊗ Z²` with exact 1D blocks, so a
//! matrix-vector product is three small GEMMs instead of a sparse sweep,
//! and the z-parity block structure is available exactly.

use super::basis::{kinetic_matrix, position_power_matrix, SpectralBasis};
use crate::error::{Error, Result};
use crate::surface::NormalFormCoefficients;
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    basis: SpectralBasis,
    coeffs: NormalFormCoefficients,
    /// `kin_w T_w + a1 w^2` in the w basis.
    aw: DMatrix<f64>,
    /// `kin_z T_z + a2 z^2 + a4 z^4` in the z basis.
    az: DMatrix<f64>,
    /// `w` in the w basis.
    w1: DMatrix<f64>,
    /// `z^2` in the z basis.
    z2: DMatrix<f64>,
    a3: f64,
}

/// Largest full dimension handled by the dense eigensolver path.
pub const DENSE_DIM_LIMIT: usize = 4096;

/// Assemble the normal-form Hamiltonian
/// `-1/2 Δ + a1 w^2 + (a2 - a3 w) z^2 + a4 z^4` over `basis`.
pub fn assemble_hamiltonian(
    c: &NormalFormCoefficients,
    basis: &SpectralBasis,
) -> Result<HamiltonianMatrix> {
    assemble_with_kinetic_scales(c, basis, 1.0, 1.0)
}

/// Assembly with general kinetic prefactors `-(kin_w/2) d^2/dw^2
/// - (kin_z/2) d^2/dz^2`; used to cross-check coordinate rescalings
/// against the standard form.
pub(crate) fn assemble_with_kinetic_scales(
    c: &NormalFormCoefficients,
    basis: &SpectralBasis,
    kin_w: f64,
    kin_z: f64,
) -> Result<HamiltonianMatrix> {
    let (n_w, n_z) = (basis.n_w, basis.n_z);
    if n_w < 2 || n_z < 2 || basis.omega_w <= 0.0 || basis.omega_z <= 0.0 {
        return Err(Error::invalid("invalid basis"));
    }
    let aw = kinetic_matrix(n_w, basis.omega_w) * kin_w
        + position_power_matrix(n_w, basis.omega_w, 2) * c.a1;
    let az = kinetic_matrix(n_z, basis.omega_z) * kin_z
        + position_power_matrix(n_z, basis.omega_z, 2) * c.a2
        + position_power_matrix(n_z, basis.omega_z, 4) * c.a4;
    let w1 = position_power_matrix(n_w, basis.omega_w, 1);
    let z2 = position_power_matrix(n_z, basis.omega_z, 2);
    let scale = aw.amax().max(az.amax()).max(c.a3.abs() * w1.amax() * z2.amax());
    if !scale.is_finite() {
        return Err(Error::AssemblyOverflow { scale });
    }
    Ok(HamiltonianMatrix {
        basis: *basis,
        coeffs: *c,
        aw,
        az,
        w1,
        z2,
        a3: c.a3,
    })
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &NormalFormCoefficients {
        &self.coeffs
    }

    /// Single matrix element `H[(n,m),(n',m')]`.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        let n_z = self.basis.n_z;
        let (n, m) = (row / n_z, row % n_z);
        let (np, mp) = (col / n_z, col % n_z);
        let mut v = 0.0;
        if m == mp {
            v += self.aw[(n, np)];
        }
        if n == np {
            v += self.az[(m, mp)];
        }
        v - self.a3 * self.w1[(n, np)] * self.z2[(m, mp)]
    }

    /// `y = H x` with `x` flattened in `(n, m)` lexicographic order.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let (n_w, n_z) = (self.basis.n_w, self.basis.n_z);
        debug_assert_eq!(x.len(), n_w * n_z);
        debug_assert_eq!(y.len(), n_w * n_z);
        // reshape: V[n, m] = x[n * n_z + m]; nalgebra stores column-major, so
        // build V as (n_z x n_w) with columns indexed by n.
        let v = DMatrix::<f64>::from_column_slice(n_z, n_w, x);
        // (A_w ⊗ I) x -> V A_wᵀ ; (I ⊗ A_z) x -> A_z V ; coupling -> Z2 V W1ᵀ
        let mut out = &self.az * &v;
        out += &v * &self.aw; // A_w symmetric
        out -= (&self.z2 * &v * &self.w1) * self.a3; // W1, Z2 symmetric
        y.copy_from_slice(out.as_slice());
    }

    /// Dense materialization; intended for the sub-[`DENSE_DIM_LIMIT`] path
    /// and for tests.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        DMatrix::from_fn(dim, dim, |i, j| self.entry(i, j))
    }

    /// Indices of even-m and odd-m basis states. The potential is even in z,
    /// so H is exactly block diagonal in this split.
    pub fn parity_indices(&self) -> (Vec<usize>, Vec<usize>) {
        let (n_w, n_z) = (self.basis.n_w, self.basis.n_z);
        let mut even = Vec::with_capacity(n_w * n_z.div_ceil(2));
        let mut odd = Vec::with_capacity(n_w * (n_z / 2));
        for n in 0..n_w {
            for m in 0..n_z {
                let idx = n * n_z + m;
                if m % 2 == 0 {
                    even.push(idx);
                } else {
                    odd.push(idx);
                }
            }
        }
        (even, odd)
    }

    /// Dense block of H restricted to `indices`.
    pub fn dense_block(&self, indices: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(indices.len(), indices.len(), |i, j| {
            self.entry(indices[i], indices[j])
        })
    }

    /// Matrix of a Z-even monomial operator `coeff * w^alpha * z^(2 beta)`
    /// summed over a table, in this basis (exact ladder elements).
    pub fn monomial_operator(&self, table: &[(f64, u32, u32)]) -> DMatrix<f64> {
        let (n_w, n_z) = (self.basis.n_w, self.basis.n_z);
        let dim = n_w * n_z;
        let mut out = DMatrix::<f64>::zeros(dim, dim);
        for &(coeff, alpha, beta) in table {
            let mw = if alpha == 0 {
                DMatrix::identity(n_w, n_w)
            } else {
                position_power_matrix(n_w, self.basis.omega_w, alpha as usize)
            };
            let mz = if beta == 0 {
                DMatrix::identity(n_z, n_z)
            } else {
                position_power_matrix(n_z, self.basis.omega_z, 2 * beta as usize)
            };
            for n in 0..n_w {
                for np in 0..n_w {
                    let wv = mw[(n, np)];
                    if wv == 0.0 {
                        continue;
                    }
                    for m in 0..n_z {
                        for mp in 0..n_z {
                            out[(n * n_z + m, np * n_z + mp)] += coeff * wv * mz[(m, mp)];
                        }
                    }
                }
            }
        }
        out
    }
}
