//! Fock-Darwin ground orbitals centred on the two wells and their
//! symmetric (Löwdin) orthogonalization.

use crate::error::{DqdError, Result};
use crate::model::{derive_constants, DeviceParams};

pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitalBasis {
    /// R₁ = (−a, 0) and R₂ = (a, 0).
    pub centers: [[f64; 2]; 2],
    pub radius_nm: f64,
    /// Off-diagonal overlap ⟨φ₁|φ₂⟩.
    pub overlap: f64,
    /// O^(−1/2).
    pub m: Mat2,
}

impl OrbitalBasis {
    pub fn new(params: &DeviceParams) -> Result<Self> {
        let d = derive_constants(params)?;
        Self::from_geometry(params.a_nm, d.fock_darwin_radius_nm)
    }

    pub fn from_geometry(a_nm: f64, radius_nm: f64) -> Result<Self> {
        let overlap = (-(a_nm * a_nm) / (radius_nm * radius_nm)).exp();
        let m = orthonormalize(&overlap_matrix_from(overlap))?;
        Ok(OrbitalBasis {
            centers: [[-a_nm, 0.0], [a_nm, 0.0]],
            radius_nm,
            overlap,
            m,
        })
    }

    pub fn center(&self, i: usize) -> Result<[f64; 2]> {
        self.centers
            .get(i)
            .copied()
            .ok_or(DqdError::IndexOutOfRange { index: i })
    }

    /// Overlap ⟨φ_i|φ_j⟩ for zero-based indices.
    pub fn s(&self, i: usize, j: usize) -> f64 {
        if i == j {
            1.0
        } else {
            self.overlap
        }
    }

    /// Orthonormal orbital ψ_i = Σ_j M_ij φ_j at r.
    pub fn psi(&self, i: usize, r: [f64; 2]) -> Result<f64> {
        let row = self.m.get(i).ok_or(DqdError::IndexOutOfRange { index: i })?;
        Ok(row[0] * fock_darwin_eval(0, r, self)? + row[1] * fock_darwin_eval(1, r, self)?)
    }
}

/// φ_i(r) = exp(−|r − R_i|²/(2a_B²)) / (a_B√π), with zero-based `i`.
pub fn fock_darwin_eval(i: usize, r: [f64; 2], basis: &OrbitalBasis) -> Result<f64> {
    let c = basis.center(i)?;
    let ab = basis.radius_nm;
    let d2 = (r[0] - c[0]).powi(2) + (r[1] - c[1]).powi(2);
    Ok((-d2 / (2.0 * ab * ab)).exp() / (ab * std::f64::consts::PI.sqrt()))
}

pub fn overlap_matrix(basis: &OrbitalBasis) -> Mat2 {
    overlap_matrix_from(basis.overlap)
}

fn overlap_matrix_from(s: f64) -> Mat2 {
    [[1.0, s], [s, 1.0]]
}

/// O^(−1/2) for a 2×2 overlap matrix with unit diagonal.
pub fn orthonormalize(o: &Mat2) -> Result<Mat2> {
    let s = o[0][1];
    if !(s.abs() < 1.0) {
        return Err(DqdError::DegenerateBasis { overlap: s });
    }
    let p = 1.0 / (1.0 + s).sqrt();
    let q = 1.0 / (1.0 - s).sqrt();
    let alpha = 0.5 * (p + q);
    let beta = 0.5 * (p - q);
    Ok([[alpha, beta], [beta, alpha]])
}

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

/// Mᵀ A M for symmetric M.
pub fn congruence(m: &Mat2, a: &Mat2) -> Mat2 {
    mat_mul(m, &mat_mul(a, m))
}
