//! Closed-form one-body matrix elements in the nonorthogonal φ basis.
//!
//! The product φ_iφ_j is `s_ij` times a normalized isotropic Gaussian
//! centred at P = (R_i + R_j)/2 with variance v = a_B²/2 per axis, so every
//! element is `s_ij` times an expectation over that Gaussian.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::Result;
use crate::orbitals::OrbitalBasis;
use crate::potential::{ConfinementPotential, PotentialPiece, Side};

/// Gaussian density of the orbital product φ_iφ_j.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductDensity {
    pub weight: f64,
    pub center: [f64; 2],
    pub variance: f64,
}

pub fn product_density(i: usize, j: usize, basis: &OrbitalBasis) -> Result<ProductDensity> {
    let (ri, rj) = (basis.center(i)?, basis.center(j)?);
    let ab2 = basis.radius_nm * basis.radius_nm;
    let d2 = (ri[0] - rj[0]).powi(2) + (ri[1] - rj[1]).powi(2);
    Ok(ProductDensity {
        weight: (-d2 / (4.0 * ab2)).exp(),
        center: [0.5 * (ri[0] + rj[0]), 0.5 * (ri[1] + rj[1])],
        variance: 0.5 * ab2,
    })
}

/// ⟨φ_i|−(ħ²/2m*)∇²|φ_j⟩ = s_ij·(ħω₀/2)·(1 − |R_i − R_j|²/(4a_B²)).
pub fn kinetic_element(
    i: usize,
    j: usize,
    basis: &OrbitalBasis,
    hbar_omega0_mev: f64,
) -> Result<f64> {
    let (ri, rj) = (basis.center(i)?, basis.center(j)?);
    let d2 = (ri[0] - rj[0]).powi(2) + (ri[1] - rj[1]).powi(2);
    let ab2 = basis.radius_nm * basis.radius_nm;
    let s = (-d2 / (4.0 * ab2)).exp();
    Ok(s * 0.5 * hbar_omega0_mev * (1.0 - d2 / (4.0 * ab2)))
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// `∫_{−∞}^{z₀} zⁿ φ(z) dz` for n = 0..=4, φ the standard normal density.
pub fn lower_moments(z0: f64) -> [f64; 5] {
    let pdf = std_normal_pdf(z0);
    let mut t = [0.0; 5];
    t[0] = 0.5 * libm::erfc(-z0 * FRAC_1_SQRT_2);
    t[1] = -pdf;
    for n in 2..5 {
        t[n] = (n - 1) as f64 * t[n - 2] - z0.powi(n as i32 - 1) * pdf;
    }
    t
}

/// `∫_{z₀}^{∞} zⁿ φ(z) dz` for n = 0..=4.
pub fn upper_moments(z0: f64) -> [f64; 5] {
    let mut t = lower_moments(-z0);
    for (n, v) in t.iter_mut().enumerate() {
        if n % 2 == 1 {
            *v = -*v;
        }
    }
    t
}

const BINOMIAL: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

/// E[piece(x)·1{x on the piece's side}] for x ~ N(mean, variance).
pub fn half_line_expectation(piece: &PotentialPiece, mean: f64, variance: f64) -> f64 {
    let sigma = variance.sqrt();
    let z0 = -mean / sigma;
    let moments = match piece.side {
        Side::Left => lower_moments(z0),
        Side::Right => upper_moments(z0),
    };
    // u = x − center = d + σz
    let d = mean - piece.center_nm;
    let mut total = 0.0;
    for (n, &b) in piece.coeffs.iter().enumerate() {
        if b == 0.0 {
            continue;
        }
        let mut acc = 0.0;
        for m in 0..=n {
            acc += BINOMIAL[n][m] * d.powi((n - m) as i32) * sigma.powi(m as i32) * moments[m];
        }
        total += b * acc;
    }
    total
}

/// Sub-terms of ⟨φ_i|V|φ_j⟩, each already multiplied by s_ij.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialTerms {
    /// Piecewise quartic V_x over both half-planes.
    pub longitudinal: f64,
    /// m*ω₀²y²/2.
    pub transverse: f64,
    /// ξ·exp(−8(x²+y²)/a²).
    pub barrier: f64,
}

impl PotentialTerms {
    pub fn total(&self) -> f64 {
        self.longitudinal + self.transverse + self.barrier
    }
}

pub fn potential_terms(
    i: usize,
    j: usize,
    pot: &ConfinementPotential,
    basis: &OrbitalBasis,
) -> Result<PotentialTerms> {
    let rho = product_density(i, j, basis)?;
    let [px, py] = rho.center;
    let v = rho.variance;
    let longitudinal = half_line_expectation(&pot.left, px, v)
        + half_line_expectation(&pot.right, px, v);
    let transverse = 0.5 * pot.curvature * (v + py * py);
    let spread = 1.0 + 2.0 * pot.gauss_rate * v;
    let barrier = pot.xi_mev * (-pot.gauss_rate * (px * px + py * py) / spread).exp() / spread;
    Ok(PotentialTerms {
        longitudinal: rho.weight * longitudinal,
        transverse: rho.weight * transverse,
        barrier: rho.weight * barrier,
    })
}

pub fn potential_element(
    i: usize,
    j: usize,
    pot: &ConfinementPotential,
    basis: &OrbitalBasis,
) -> Result<f64> {
    Ok(potential_terms(i, j, pot, basis)?.total())
}
