//! Batch evaluation over control grids, matched-J targets and impurity
//! positions. Points run in parallel; results keep input order and each
//! point carries its own `Result`.

use std::fmt;

use rayon::prelude::*;

use super::quality::{quality_factor, QualityModel};
use super::{
    calibrate_barrier, calibrate_tilt, compare_at, delta_j, improvement_factor,
    starting_exchange_ghz, ImprovementPoint, NoiseRecord,
};
use crate::error::{DqdError, Result};
use crate::hamiltonian::HamiltonianOptions;
use crate::model::{ControlScheme, DeviceParams, Impurity};

/// Inclusive grid lo, lo + step, …, hi. The last point snaps to `hi` when
/// the span is a whole number of steps up to rounding.
pub fn control_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(DqdError::invalid("step", step, "must be finite and positive"));
    }
    if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
        return Err(DqdError::invalid("hi", hi, "range must be finite with hi >= lo"));
    }
    let span = (hi - lo) / step;
    let n = (span + 1e-9).floor() as usize;
    let mut out: Vec<f64> = (0..=n).map(|k| lo + step * k as f64).collect();
    if (span - n as f64).abs() < 1e-9 {
        if let Some(last) = out.last_mut() {
            *last = hi;
        }
    }
    Ok(out)
}

/// δJ at every control value of one scheme.
pub fn sweep(
    base: &DeviceParams,
    scheme: ControlScheme,
    controls: &[f64],
    impurity: Option<&Impurity>,
    options: &HamiltonianOptions,
) -> Vec<Result<NoiseRecord>> {
    controls
        .par_iter()
        .map(|&c| delta_j(base, scheme, c, impurity, options))
        .collect()
}

/// χ at each matched exchange target.
pub fn chi_curve(
    base: &DeviceParams,
    targets_ghz: &[f64],
    impurity: &Impurity,
    xi_fixed_mev: f64,
    options: &HamiltonianOptions,
) -> Vec<Result<ImprovementPoint>> {
    targets_ghz
        .par_iter()
        .map(|&jt| improvement_factor(base, jt, impurity, xi_fixed_mev, options))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityRow {
    pub j_ghz: f64,
    /// σ_rel = |δJ/J| of the tilt scheme.
    pub q_tilt: f64,
    pub q_barrier: f64,
    /// Absolute width fixed at |δJ/J|·J of the starting point.
    pub q_constmodel: f64,
}

/// Q of both schemes and of the constant-width model at matched targets.
pub fn qfactor_curve(
    base: &DeviceParams,
    targets_ghz: &[f64],
    impurity: &Impurity,
    xi_fixed_mev: f64,
    options: &HamiltonianOptions,
) -> Result<Vec<Result<QualityRow>>> {
    let j0 = starting_exchange_ghz(base, xi_fixed_mev, options)?;
    let start = compare_at(base, j0, 0.0, xi_fixed_mev, impurity, xi_fixed_mev, options)?;
    let floor = QualityModel::floor(start.barrier.rel_noise.abs() * j0);
    Ok(chi_curve(base, targets_ghz, impurity, xi_fixed_mev, options)
        .into_iter()
        .zip(targets_ghz)
        .map(|(point, &jt)| {
            let p = point?;
            Ok(QualityRow {
                j_ghz: jt,
                q_tilt: quality_factor(jt, &QualityModel::relative(p.tilt.rel_noise.abs()))?,
                q_barrier: quality_factor(jt, &QualityModel::relative(p.barrier.rel_noise.abs()))?,
                q_constmodel: quality_factor(jt, &floor)?,
            })
        })
        .collect())
}

/// Rays from the origin along which the impurity is moved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanDirection {
    /// Along −x̂, on the side of dot 1.
    X,
    /// Along +ŷ, equidistant from both dots.
    Y,
    /// Along (−x̂ + ŷ)/√2.
    Xy,
}

impl ScanDirection {
    pub const ALL: [ScanDirection; 3] = [ScanDirection::X, ScanDirection::Y, ScanDirection::Xy];

    pub fn unit(&self) -> [f64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            ScanDirection::X => [-1.0, 0.0],
            ScanDirection::Y => [0.0, 1.0],
            ScanDirection::Xy => [-h, h],
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ScanDirection::X => "x",
            ScanDirection::Y => "y",
            ScanDirection::Xy => "xy",
        }
    }

    pub fn impurity(&self, a_nm: f64, rc_over_a: f64, charge_e: f64) -> Impurity {
        let u = self.unit();
        Impurity::new(u[0] * rc_over_a * a_nm, u[1] * rc_over_a * a_nm, charge_e)
    }
}

impl fmt::Display for ScanDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpurityScanPoint {
    pub direction: ScanDirection,
    pub rc_over_a: f64,
    pub rel_tilt: f64,
    pub rel_barrier: f64,
}

/// Signed δJ/J of both schemes at a fixed matched target, for each
/// direction and distance |R_c|/a. The calibration is impurity-independent
/// and runs once.
pub fn impurity_scan(
    base: &DeviceParams,
    j_target_ghz: f64,
    directions: &[ScanDirection],
    radii_over_a: &[f64],
    charge_e: f64,
    xi_fixed_mev: f64,
    options: &HamiltonianOptions,
) -> Result<Vec<Result<ImpurityScanPoint>>> {
    let eps = calibrate_tilt(base, j_target_ghz, xi_fixed_mev, options)?;
    let xi = calibrate_barrier(base, j_target_ghz, options)?;
    let jobs: Vec<(ScanDirection, f64)> = directions
        .iter()
        .flat_map(|&d| radii_over_a.iter().map(move |&r| (d, r)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(direction, rc_over_a)| {
            let imp = direction.impurity(base.a_nm, rc_over_a, charge_e);
            let p = compare_at(base, j_target_ghz, eps, xi, &imp, xi_fixed_mev, options)?;
            Ok(ImpurityScanPoint {
                direction,
                rc_over_a,
                rel_tilt: p.tilt.rel_noise,
                rel_barrier: p.barrier.rel_noise,
            })
        })
        .collect())
}
