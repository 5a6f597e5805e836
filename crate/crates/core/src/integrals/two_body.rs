//! Closed-form Coulomb elements between Fock-Darwin orbitals.
//!
//! ⟨ij|V|kl⟩ = ∫∫ φ_i(r₁)φ_j(r₂) e²/(4πκ|r₁ − r₂|) φ_k(r₁)φ_l(r₂), so the
//! pairs (i, k) and (j, l) share a coordinate. Both kernels reduce to
//! `e^{−A}I₀(A)`, which is always taken from the scaled Bessel routine.

use std::f64::consts::PI;

use super::bessel::{i0e, BesselFn};
use crate::error::Result;
use crate::model::Impurity;
use crate::orbitals::OrbitalBasis;

fn dist2(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
}

pub fn coulomb_element(
    i: usize,
    j: usize,
    k: usize,
    l: usize,
    basis: &OrbitalBasis,
    coulomb_scale: f64,
) -> Result<f64> {
    coulomb_element_with_bessel(i, j, k, l, basis, coulomb_scale, i0e)
}

/// Same as [`coulomb_element`] with the scaled Bessel routine injected.
pub fn coulomb_element_with_bessel(
    i: usize,
    j: usize,
    k: usize,
    l: usize,
    basis: &OrbitalBasis,
    coulomb_scale: f64,
    bessel: BesselFn,
) -> Result<f64> {
    let [ri, rj, rk, rl] = [
        basis.center(i)?,
        basis.center(j)?,
        basis.center(k)?,
        basis.center(l)?,
    ];
    let ab = basis.radius_nm;
    let ab2 = ab * ab;
    let damping = (-(dist2(ri, rk) + dist2(rj, rl)) / (4.0 * ab2)).exp();
    let sum = [ri[0] + rk[0] - rj[0] - rl[0], ri[1] + rk[1] - rj[1] - rl[1]];
    let arg = (sum[0] * sum[0] + sum[1] * sum[1]) / (16.0 * ab2);
    Ok(coulomb_scale * (0.5 * PI).sqrt() / ab * damping * bessel(arg)?)
}

/// Full tensor V[i][j][k][l] in the φ basis.
pub fn coulomb_tensor(
    basis: &OrbitalBasis,
    coulomb_scale: f64,
    bessel: BesselFn,
) -> Result<[[[[f64; 2]; 2]; 2]; 2]> {
    let mut v = [[[[0.0; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    v[i][j][k][l] =
                        coulomb_element_with_bessel(i, j, k, l, basis, coulomb_scale, bessel)?;
                }
            }
        }
    }
    Ok(v)
}

/// ⟨φ_i|−q·e²/(4πκ|r − R_c|)|φ_j⟩, positive (repulsive) for q < 0.
pub fn impurity_element(
    i: usize,
    j: usize,
    impurity: &Impurity,
    basis: &OrbitalBasis,
    coulomb_scale: f64,
) -> Result<f64> {
    impurity_element_with_bessel(i, j, impurity, basis, coulomb_scale, i0e)
}

pub fn impurity_element_with_bessel(
    i: usize,
    j: usize,
    impurity: &Impurity,
    basis: &OrbitalBasis,
    coulomb_scale: f64,
    bessel: BesselFn,
) -> Result<f64> {
    let (ri, rj) = (basis.center(i)?, basis.center(j)?);
    let rc = impurity.position();
    let ab = basis.radius_nm;
    let ab2 = ab * ab;
    let overlap = (-dist2(ri, rj) / (4.0 * ab2)).exp();
    let off = [ri[0] + rj[0] - 2.0 * rc[0], ri[1] + rj[1] - 2.0 * rc[1]];
    let arg = (off[0] * off[0] + off[1] * off[1]) / (8.0 * ab2);
    Ok(-impurity.charge_e * coulomb_scale * PI.sqrt() / ab * overlap * bessel(arg)?)
}
