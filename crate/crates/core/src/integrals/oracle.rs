//! Numeric quadrature oracle for every closed-form matrix element.
//!
//! Integrands are built from [`fock_darwin_eval`] and
//! [`ConfinementPotential::eval`] only; nothing here calls the closed forms.
//! Each value is computed at two resolutions, and the difference is reported
//! as the error estimate.
//!
//! * Overlap and kinetic: 2D Gauss-Hermite about the midpoint of the two
//!   centres, Laplacian applied analytically to φ_j.
//! * Confinement: tensor composite Gauss-Legendre. Panels break at x = 0
//!   (curvature kink) and are refined over the Gaussian barrier.
//! * Coulomb: with r₁ = R + ρ/2, r₂ = R − ρ/2 the integrand
//!   F(R, ρ) = φ_i(r₁)φ_k(r₁)φ_j(r₂)φ_l(r₂) is a product of a Gaussian in R
//!   and a Gaussian in ρ, so ∫∫F/|ρ| = [∫F(R, ρ₀)dR]·[∫F(R₀, ρ)/|ρ|dρ]/F(R₀, ρ₀).
//!   The R integral is Gauss-Hermite. The ρ integral is taken in polar form,
//!   where the Jacobian cancels 1/|ρ|, with Gauss-Legendre radial panels and a
//!   periodic trapezoid in angle.
//! * Impurity: polar coordinates centred on R_c, same scheme.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::{GaussHermite, GaussLegendre};
use rayon::prelude::*;

use crate::error::{DqdError, Result};
use crate::model::{derive_constants, DeviceParams, Impurity};
use crate::orbitals::{fock_darwin_eval, OrbitalBasis};
use crate::potential::ConfinementPotential;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    /// |fine − coarse| between the two resolutions.
    pub error_estimate: f64,
    /// ∫|integrand|, the scale against which relative errors are measured.
    pub magnitude: f64,
}

impl OracleValue {
    /// |x − value| relative to the integrand's L1 norm.
    pub fn relative_deviation(&self, x: f64) -> f64 {
        (x - self.value).abs() / self.magnitude.max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleKind {
    Overlap,
    Kinetic,
    Potential,
    Coulomb,
    Impurity(Impurity),
}

/// Dispatches on `kind`; `indices` has two entries for one-body kinds and
/// four for Coulomb. Indices are zero-based.
pub fn quadrature_oracle(
    kind: OracleKind,
    indices: &[usize],
    params: &DeviceParams,
    tol: f64,
) -> Result<OracleValue> {
    let basis = OrbitalBasis::new(params)?;
    let d = derive_constants(params)?;
    let pair = || -> Result<(usize, usize)> {
        match indices {
            [i, j] => Ok((*i, *j)),
            _ => Err(DqdError::IndexOutOfRange {
                index: indices.len(),
            }),
        }
    };
    match kind {
        OracleKind::Overlap => {
            let (i, j) = pair()?;
            oracle_overlap(i, j, &basis, tol)
        }
        OracleKind::Kinetic => {
            let (i, j) = pair()?;
            oracle_kinetic(i, j, &basis, d.kinetic_scale_mev_nm2, tol)
        }
        OracleKind::Potential => {
            let (i, j) = pair()?;
            let pot = ConfinementPotential::new(params)?;
            oracle_potential(i, j, &pot, &basis, tol)
        }
        OracleKind::Coulomb => match indices {
            [i, j, k, l] => oracle_coulomb(*i, *j, *k, *l, &basis, d.coulomb_scale_mev_nm, tol),
            _ => Err(DqdError::IndexOutOfRange {
                index: indices.len(),
            }),
        },
        OracleKind::Impurity(imp) => {
            let (i, j) = pair()?;
            oracle_impurity(i, j, &imp, &basis, d.coulomb_scale_mev_nm, tol)
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Sum {
    value: f64,
    magnitude: f64,
}

impl Sum {
    fn add(&mut self, w: f64, f: f64) {
        self.value += w * f;
        self.magnitude += (w * f).abs();
    }

    fn scaled(self, c: f64) -> Sum {
        Sum {
            value: self.value * c,
            magnitude: self.magnitude * c.abs(),
        }
    }
}

fn finish(coarse: Sum, fine: Sum, tol: f64) -> Result<OracleValue> {
    let error_estimate = (fine.value - coarse.value).abs();
    let allowed = tol * fine.value.abs() + 64.0 * f64::EPSILON * fine.magnitude;
    if !(error_estimate <= allowed) {
        return Err(DqdError::QuadratureTolerance {
            estimate: error_estimate,
            tolerance: allowed,
        });
    }
    Ok(OracleValue {
        value: fine.value,
        error_estimate,
        magnitude: fine.magnitude,
    })
}

fn hermite(n: usize) -> GaussHermite {
    GaussHermite::new(NonZeroUsize::new(n).expect("node count is positive"))
}

fn legendre(n: usize) -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(n).expect("node count is positive"))
}

/// ∫∫ f(r) dr with r = c + scale·(u, v); the e^{−u²−v²} weight is divided out.
fn hermite_2d(n: usize, c: [f64; 2], scale: f64, f: impl Fn([f64; 2]) -> f64) -> Sum {
    let gh = hermite(n);
    let nw = gh.as_node_weight_pairs();
    let mut s = Sum::default();
    for &(u, wu) in nw {
        for &(v, wv) in nw {
            let r = [c[0] + scale * u, c[1] + scale * v];
            s.add(wu * wv * (u * u + v * v).exp(), f(r));
        }
    }
    s.scaled(scale * scale)
}

/// Composite Gauss-Legendre nodes and weights over consecutive breakpoints.
fn composite_rule(breaks: &[f64], order: usize) -> Vec<(f64, f64)> {
    let gl = legendre(order);
    let mut out = Vec::with_capacity(order * breaks.len());
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for &(x, wt) in gl.as_node_weight_pairs() {
            out.push((mid + half * x, half * wt));
        }
    }
    out
}

/// Uniform breakpoints of step ≤ `step` on [lo, hi], merged with `extra`.
fn breakpoints(lo: f64, hi: f64, step: f64, extra: &[f64]) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let mut b: Vec<f64> = (0..=n)
        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
        .collect();
    b.extend(extra.iter().copied().filter(|x| *x > lo && *x < hi));
    b.sort_by(f64::total_cmp);
    b.dedup_by(|x, y| (*x - *y).abs() <= 1e-9 * step);
    b
}

/// Half-width of every integration window in units of the Gaussian's
/// standard deviation; the neglected tail is below e⁻⁷².
const WINDOW: f64 = 12.0;

/// φ_n(r) for an index already checked through [`OrbitalBasis::center`].
fn phi(basis: &OrbitalBasis, n: usize, r: [f64; 2]) -> f64 {
    fock_darwin_eval(n, r, basis).expect("orbital index validated by caller")
}

pub fn oracle_overlap(i: usize, j: usize, basis: &OrbitalBasis, tol: f64) -> Result<OracleValue> {
    let (ri, rj) = (basis.center(i)?, basis.center(j)?);
    let c = [0.5 * (ri[0] + rj[0]), 0.5 * (ri[1] + rj[1])];
    let f = |r: [f64; 2]| {
        phi(basis, i, r) * phi(basis, j, r)
    };
    finish(
        hermite_2d(80, c, basis.radius_nm, f),
        hermite_2d(120, c, basis.radius_nm, f),
        tol,
    )
}

pub fn oracle_kinetic(
    i: usize,
    j: usize,
    basis: &OrbitalBasis,
    kinetic_scale: f64,
    tol: f64,
) -> Result<OracleValue> {
    let (ri, rj) = (basis.center(i)?, basis.center(j)?);
    let c = [0.5 * (ri[0] + rj[0]), 0.5 * (ri[1] + rj[1])];
    let ab2 = basis.radius_nm * basis.radius_nm;
    // −∇²φ_j = (2/a_B² − |r − R_j|²/a_B⁴)·φ_j in two dimensions.
    let f = |r: [f64; 2]| {
        let d2 = (r[0] - rj[0]).powi(2) + (r[1] - rj[1]).powi(2);
        let lap = (2.0 / ab2 - d2 / (ab2 * ab2)) * phi(basis, j, r);
        kinetic_scale * phi(basis, i, r) * lap
    };
    finish(
        hermite_2d(80, c, basis.radius_nm, f),
        hermite_2d(120, c, basis.radius_nm, f),
        tol,
    )
}

pub fn oracle_potential(
    i: usize,
    j: usize,
    pot: &ConfinementPotential,
    basis: &OrbitalBasis,
    tol: f64,
) -> Result<OracleValue> {
    let (ri, rj) = (basis.center(i)?, basis.center(j)?);
    let ab = basis.radius_nm;
    let a = pot.half_separation_nm;
    let reach = WINDOW * ab / 2f64.sqrt();
    let fine: Vec<f64> = (-8..=8).map(|k| f64::from(k) * a / 8.0).collect();
    let xb = breakpoints(
        ri[0].min(rj[0]) - reach,
        ri[0].max(rj[0]) + reach,
        0.5 * ab,
        &fine,
    );
    let yb = breakpoints(
        ri[1].min(rj[1]) - reach,
        ri[1].max(rj[1]) + reach,
        0.5 * ab,
        &fine,
    );
    let run = |order: usize| -> Sum {
        let xs = composite_rule(&xb, order);
        let ys = composite_rule(&yb, order);
        let rows: Vec<Sum> = xs
            .par_iter()
            .map(|&(x, wx)| {
                let mut s = Sum::default();
                for &(y, wy) in &ys {
                    let r = [x, y];
                    s.add(wx * wy, phi(basis, i, r) * phi(basis, j, r) * pot.eval(x, y));
                }
                s
            })
            .collect();
        rows.into_iter().fold(Sum::default(), |acc, r| Sum {
            value: acc.value + r.value,
            magnitude: acc.magnitude + r.magnitude,
        })
    };
    finish(run(10), run(20), tol)
}

/// Periodic trapezoid node count resolving exp(z·cos θ) to near roundoff.
fn angular_nodes(z: f64) -> usize {
    let n = (10.0 * z.max(0.0).sqrt()).ceil() as usize;
    n.max(64).next_multiple_of(4)
}

/// ∫₀^∞ dρ ∫₀^{2π} dθ g(ρ(cos θ, sin θ)) for g a Gaussian of standard
/// deviation `width` centred at `peak`.
fn polar_integral(
    peak: [f64; 2],
    width: f64,
    resolution: usize,
    g: impl Fn([f64; 2]) -> f64 + Sync,
) -> Sum {
    let dist = peak[0].hypot(peak[1]);
    let lo = (dist - WINDOW * width).max(0.0);
    let hi = dist + WINDOW * width;
    let radial = composite_rule(&breakpoints(lo, hi, 0.5 * width, &[]), 10 * resolution);
    let n_theta = angular_nodes(hi * dist / (width * width)) * resolution;
    let h = 2.0 * PI / n_theta as f64;
    let trig: Vec<(f64, f64)> = (0..n_theta)
        .map(|m| {
            let t = h * m as f64;
            (t.cos(), t.sin())
        })
        .collect();
    let rings: Vec<Sum> = radial
        .par_iter()
        .map(|&(rho, w)| {
            let mut s = Sum::default();
            for &(c, sn) in &trig {
                s.add(w * h, g([rho * c, rho * sn]));
            }
            s
        })
        .collect();
    rings.into_iter().fold(Sum::default(), |acc, r| Sum {
        value: acc.value + r.value,
        magnitude: acc.magnitude + r.magnitude,
    })
}

pub fn oracle_coulomb(
    i: usize,
    j: usize,
    k: usize,
    l: usize,
    basis: &OrbitalBasis,
    coulomb_scale: f64,
    tol: f64,
) -> Result<OracleValue> {
    let [ri, rj, rk, rl] = [
        basis.center(i)?,
        basis.center(j)?,
        basis.center(k)?,
        basis.center(l)?,
    ];
    let ab = basis.radius_nm;
    let f = |big: [f64; 2], rel: [f64; 2]| {
        let r1 = [big[0] + 0.5 * rel[0], big[1] + 0.5 * rel[1]];
        let r2 = [big[0] - 0.5 * rel[0], big[1] - 0.5 * rel[1]];
        phi(basis, i, r1) * phi(basis, k, r1) * phi(basis, j, r2) * phi(basis, l, r2)
    };
    let r0 = [
        0.25 * (ri[0] + rj[0] + rk[0] + rl[0]),
        0.25 * (ri[1] + rj[1] + rk[1] + rl[1]),
    ];
    let rho0 = [
        0.5 * (ri[0] + rk[0] - rj[0] - rl[0]),
        0.5 * (ri[1] + rk[1] - rj[1] - rl[1]),
    ];
    let f00 = f(r0, rho0);
    let run = |res: usize| -> Sum {
        let com = hermite_2d(30 * res, r0, ab / 2f64.sqrt(), |big| f(big, rho0));
        let rel = polar_integral(rho0, ab, res, |rel| f(r0, rel));
        Sum {
            value: com.value * rel.value / f00,
            magnitude: com.magnitude * rel.magnitude / f00,
        }
        .scaled(coulomb_scale)
    };
    finish(run(1), run(2), tol)
}

pub fn oracle_impurity(
    i: usize,
    j: usize,
    impurity: &Impurity,
    basis: &OrbitalBasis,
    coulomb_scale: f64,
    tol: f64,
) -> Result<OracleValue> {
    let (ri, rj) = (basis.center(i)?, basis.center(j)?);
    let rc = impurity.position();
    let peak = [
        0.5 * (ri[0] + rj[0]) - rc[0],
        0.5 * (ri[1] + rj[1]) - rc[1],
    ];
    let g = |d: [f64; 2]| {
        let r = [rc[0] + d[0], rc[1] + d[1]];
        phi(basis, i, r) * phi(basis, j, r)
    };
    let c = -impurity.charge_e * coulomb_scale;
    let width = basis.radius_nm / 2f64.sqrt();
    let run = |res: usize| polar_integral(peak, width, res, g).scaled(c);
    finish(run(1), run(2), tol)
}
