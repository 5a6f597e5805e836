//! Piecewise quartic confinement with a Gaussian central barrier.
//!
//! Along x the potential is two quartics in `x ∓ a` glued at the origin,
//! each fixed by its well bottom `−μ_i`, curvature `m*ω₀²` and the barrier
//! height `C`. Transverse confinement is the harmonic `m*ω₀²y²/2`, and the
//! Gaussian `ξ·exp(−8(x²+y²)/a²)` is added on top.

use std::fmt;

use crate::error::Result;
use crate::model::{derive_constants, DeviceParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// x < 0, polynomial in (x + a), dot 1.
    Left,
    /// x ≥ 0, polynomial in (x − a), dot 2.
    Right,
}

impl Side {
    pub fn of(x: f64) -> Side {
        if x < 0.0 {
            Side::Left
        } else {
            Side::Right
        }
    }
}

/// Quartic `Σ b_n uⁿ` with `u = x − center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialPiece {
    pub side: Side,
    pub center_nm: f64,
    pub coeffs: [f64; 5],
}

impl PotentialPiece {
    fn build(side: Side, a: f64, k: f64, c: f64, mu: f64) -> Self {
        let (center, sign) = match side {
            Side::Left => (-a, 1.0),
            Side::Right => (a, -1.0),
        };
        let a2k = a * a * k;
        PotentialPiece {
            side,
            center_nm: center,
            coeffs: [
                -mu,
                0.0,
                0.5 * k,
                sign * (4.0 * c + 4.0 * mu - a2k) / a.powi(3),
                (-6.0 * c - 6.0 * mu + a2k) / (2.0 * a.powi(4)),
            ],
        }
    }

    /// Value of the polynomial at x, ignoring the side restriction.
    pub fn value(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    /// n-th analytic derivative at x (n ≤ 4 is nonzero).
    pub fn derivative(&self, x: f64, n: usize) -> f64 {
        let u = x - self.center_nm;
        let mut acc = 0.0;
        for p in (n..5).rev() {
            let falling: f64 = (p + 1 - n..=p).map(|f| f as f64).product();
            acc = acc * u + self.coeffs[p] * falling;
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfinementPotential {
    pub left: PotentialPiece,
    pub right: PotentialPiece,
    pub half_separation_nm: f64,
    /// m*ω₀².
    pub curvature: f64,
    pub barrier_height_mev: f64,
    pub xi_mev: f64,
    /// 8/a², the Gaussian exponent rate.
    pub gauss_rate: f64,
    pub mu: (f64, f64),
}

impl ConfinementPotential {
    pub fn new(params: &DeviceParams) -> Result<Self> {
        let d = derive_constants(params)?;
        let a = params.a_nm;
        let k = d.curvature_mev_per_nm2;
        let c = d.barrier_height_mev;
        let (mu1, mu2) = params.well_depths();
        Ok(ConfinementPotential {
            left: PotentialPiece::build(Side::Left, a, k, c, mu1),
            right: PotentialPiece::build(Side::Right, a, k, c, mu2),
            half_separation_nm: a,
            curvature: k,
            barrier_height_mev: c,
            xi_mev: params.xi_mev,
            gauss_rate: 8.0 / (a * a),
            mu: (mu1, mu2),
        })
    }

    pub fn piece(&self, side: Side) -> &PotentialPiece {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Longitudinal quartic V_x(x) without the Gaussian.
    pub fn longitudinal(&self, x: f64) -> f64 {
        self.piece(Side::of(x)).value(x)
    }

    pub fn gaussian(&self, x: f64, y: f64) -> f64 {
        self.xi_mev * (-self.gauss_rate * (x * x + y * y)).exp()
    }

    pub fn transverse(&self, y: f64) -> f64 {
        0.5 * self.curvature * y * y
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.longitudinal(x) + self.transverse(y) + self.gaussian(x, y)
    }

    /// One-sided second derivative of V(x, 0) at the origin, Gaussian included.
    pub fn curvature_at_origin(&self, side: Side) -> f64 {
        self.piece(side).derivative(0.0, 2) - 2.0 * self.gauss_rate * self.xi_mev
    }
}

pub fn eval_potential(x_nm: f64, y_nm: f64, params: &DeviceParams) -> Result<f64> {
    Ok(ConfinementPotential::new(params)?.eval(x_nm, y_nm))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintResidual {
    pub name: &'static str,
    pub side: Side,
    pub value: f64,
    pub target: f64,
    /// Natural magnitude used to make the residual relative.
    pub scale: f64,
}

impl ConstraintResidual {
    pub fn absolute(&self) -> f64 {
        (self.value - self.target).abs()
    }

    pub fn relative(&self) -> f64 {
        self.absolute() / self.scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    pub residuals: Vec<ConstraintResidual>,
    pub barrier_exists: bool,
}

impl ConstraintReport {
    pub fn max_relative(&self) -> f64 {
        self.residuals
            .iter()
            .map(ConstraintResidual::relative)
            .fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.barrier_exists && self.max_relative() <= tol
    }
}

impl fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.residuals {
            writeln!(
                f,
                "{:<10} {:?}: value {:+.6e} target {:+.6e} rel {:.2e}",
                r.name,
                r.side,
                r.value,
                r.target,
                r.relative()
            )?;
        }
        writeln!(f, "barrier exists: {}", self.barrier_exists)
    }
}

/// Residuals of the construction table, evaluated on the quartic alone.
///
/// `V_x(0) = C` and `V_x′(0) = 0` are checked from both sides; the well
/// conditions on the side that owns each well. Derivatives are analytic.
pub fn potential_constraint_report(params: &DeviceParams) -> Result<ConstraintReport> {
    let pot = ConfinementPotential::new(params)?;
    let a = pot.half_separation_nm;
    let k = pot.curvature;
    let (mu1, mu2) = pot.mu;
    let energy = 0.5 * a * a * k + pot.barrier_height_mev + mu1.abs() + mu2.abs();
    let slope = energy / a;
    let mut residuals = Vec::with_capacity(10);
    for side in [Side::Left, Side::Right] {
        let piece = pot.piece(side);
        let (well, mu) = match side {
            Side::Left => (-a, mu1),
            Side::Right => (a, mu2),
        };
        let mut push = |name, x: f64, n, target, scale| {
            residuals.push(ConstraintResidual {
                name,
                side,
                value: piece.derivative(x, n),
                target,
                scale,
            });
        };
        push("V(0)", 0.0, 0, pot.barrier_height_mev, energy);
        push("V'(0)", 0.0, 1, 0.0, slope);
        push("V(well)", well, 0, -mu, energy);
        push("V'(well)", well, 1, 0.0, slope);
        push("V''(well)", well, 2, k, k);
    }
    let barrier_exists = [Side::Left, Side::Right]
        .into_iter()
        .all(|s| pot.curvature_at_origin(s) <= 0.0);
    Ok(ConstraintReport {
        residuals,
        barrier_exists,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn defaults() -> DeviceParams {
        DeviceParams::default()
    }

    #[test]
    fn well_bottom_and_barrier_top() {
        let p = defaults().with_xi(0.0);
        let c = derive_constants(&p).unwrap().barrier_height_mev;
        assert_eq!(eval_potential(-100.0, 0.0, &p).unwrap(), 0.0);
        assert!((eval_potential(0.0, 0.0, &p).unwrap() - c).abs() < 1e-17);
        let p = p.with_xi(1.3);
        assert!((eval_potential(0.0, 0.0, &p).unwrap() - (c + 1.3)).abs() < 1e-15);
    }

    #[test]
    fn tilt_raises_dot_one() {
        let p = defaults().with_xi(0.0).with_epsilon(0.5);
        assert!((eval_potential(-100.0, 0.0, &p).unwrap() - 0.25).abs() < 1e-15);
        assert!((eval_potential(100.0, 0.0, &p).unwrap() + 0.25).abs() < 1e-15);
    }

    #[test]
    fn bare_curvature_at_origin_vanishes_when_level() {
        let pot = ConfinementPotential::new(&defaults().with_xi(0.0)).unwrap();
        for side in [Side::Left, Side::Right] {
            assert!(pot.curvature_at_origin(side).abs() < 1e-20);
        }
    }

    #[test]
    fn curvature_at_origin_closed_form() {
        let p = defaults().with_epsilon(0.3).with_xi(0.7);
        let pot = ConfinementPotential::new(&p).unwrap();
        let a = p.a_nm;
        for (side, mu) in [(Side::Left, pot.mu.0), (Side::Right, pot.mu.1)] {
            let expected = (a * a * pot.curvature
                - 12.0 * mu
                - 12.0 * pot.barrier_height_mev
                - 16.0 * p.xi_mev)
                / (a * a);
            let got = pot.curvature_at_origin(side);
            assert!((got - expected).abs() < 1e-15, "{side:?} {got} {expected}");
        }
    }

    #[test]
    fn constraint_table_holds_at_defaults() {
        let report = potential_constraint_report(&defaults()).unwrap();
        assert_eq!(report.residuals.len(), 10);
        assert!(report.max_relative() < 1e-12, "{report}");
        assert!(report.barrier_exists);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let pot = ConfinementPotential::new(&defaults().with_epsilon(0.4)).unwrap();
        let h = 1e-3;
        for x in [-170.0, -60.0, 35.0, 140.0] {
            let piece = pot.piece(Side::of(x));
            let fd = (piece.value(x + h) - piece.value(x - h)) / (2.0 * h);
            assert!((fd - piece.derivative(x, 1)).abs() < 1e-9);
            let fd2 = (piece.derivative(x + h, 1) - piece.derivative(x - h, 1)) / (2.0 * h);
            assert!((fd2 - piece.derivative(x, 2)).abs() < 1e-10);
        }
    }

    #[test]
    fn harmonic_near_wells() {
        let p = defaults();
        let pot = ConfinementPotential::new(&p).unwrap();
        let a = p.a_nm;
        for center in [-a, a] {
            for i in -10..=10 {
                let x = center + 0.005 * a * f64::from(i);
                let harmonic = 0.5 * pot.curvature * (x - center).powi(2);
                let tol = 1e-3 * 0.5 * pot.curvature * a * a + pot.gaussian(x, 0.0);
                assert!((pot.eval(x, 0.0) - harmonic).abs() <= tol);
            }
        }
    }

    proptest! {
        #[test]
        fn constraints_hold_for_random_controls(eps in -1.0f64..1.0, xi in 0.0f64..1.5) {
            let report = potential_constraint_report(&defaults().with_epsilon(eps).with_xi(xi)).unwrap();
            prop_assert!(report.max_relative() < 1e-12);
        }

        #[test]
        fn continuous_across_origin(eps in -1.0f64..1.0, y in -300.0f64..300.0) {
            let pot = ConfinementPotential::new(&defaults().with_epsilon(eps)).unwrap();
            let l = pot.left.value(0.0) + pot.transverse(y) + pot.gaussian(0.0, y);
            let r = pot.eval(0.0, y);
            prop_assert!((l - r).abs() <= 1e-14 * r.abs().max(1.0));
        }

        #[test]
        fn mirror_symmetric_when_level(x in -400.0f64..400.0, y in -300.0f64..300.0, xi in 0.0f64..1.5) {
            let pot = ConfinementPotential::new(&defaults().with_xi(xi)).unwrap();
            let (v, w) = (pot.eval(x, y), pot.eval(-x, y));
            prop_assert!((v - w).abs() <= 1e-12 * v.abs().max(1.0));
        }

        #[test]
        fn affine_in_detuning(x in -400.0f64..400.0, y in -200.0f64..200.0, eps in 0.01f64..1.0) {
            let v = |e: f64| ConfinementPotential::new(&defaults().with_epsilon(e)).unwrap().eval(x, y);
            let d1 = v(eps) - v(0.0);
            let d2 = v(2.0 * eps) - v(0.0);
            prop_assert!((d2 - 2.0 * d1).abs() <= 1e-9 * v(0.0).abs().max(1.0));
        }
    }
}
