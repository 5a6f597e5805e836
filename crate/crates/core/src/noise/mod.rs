//! Charge noise from a single impurity: δJ, matched-J calibration of the two
//! control schemes, the improvement factor χ, and the perturbative estimate
//! of δJ/J from the Hubbard parameters.

pub mod quality;
pub mod sweep;

use crate::error::{DqdError, Result};
use crate::hamiltonian::{exchange_j, solve, HamiltonianOptions};
use crate::model::{mev_to_ghz, ControlScheme, DeviceParams, Impurity};
use crate::roots::brent;

pub use quality::{
    monte_carlo_quality, numeric_quality, quality_factor, QualityModel,
};
pub use sweep::{
    chi_curve, control_grid, impurity_scan, qfactor_curve, sweep, ImpurityScanPoint, QualityRow,
    ScanDirection,
};

/// Upper end of the detuning bracket used by tilt calibration.
pub const TILT_EPSILON_MAX_MEV: f64 = 1.5;
/// Barrier-amplitude bracket used by barrier calibration.
pub const BARRIER_XI_RANGE_MEV: (f64, f64) = (0.3, 1.3);
/// Calibration stops once |J − J_target| ≤ this fraction of J_target.
const CALIBRATION_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseRecord {
    pub scheme: ControlScheme,
    /// ε for tilt, ξ for barrier.
    pub control_mev: f64,
    pub j_clean_ghz: f64,
    pub j_imp_ghz: f64,
    pub delta_j_ghz: f64,
    /// (J_imp − J_clean)/J_clean, signed.
    pub rel_noise: f64,
    pub impurity: Option<Impurity>,
}

/// Runs the pipeline with and without the impurity at one control point.
pub fn delta_j(
    base: &DeviceParams,
    scheme: ControlScheme,
    control_mev: f64,
    impurity: Option<&Impurity>,
    options: &HamiltonianOptions,
) -> Result<NoiseRecord> {
    let params = scheme.device_at(base, control_mev);
    let clean = exchange_j(&params, None, options)?.j_mev;
    let dirty = match impurity {
        Some(imp) if imp.charge_e != 0.0 => exchange_j(&params, Some(imp), options)?.j_mev,
        _ => clean,
    };
    let delta = dirty - clean;
    Ok(NoiseRecord {
        scheme,
        control_mev,
        j_clean_ghz: mev_to_ghz(clean),
        j_imp_ghz: mev_to_ghz(dirty),
        delta_j_ghz: mev_to_ghz(delta),
        rel_noise: delta / clean,
        impurity: impurity.copied(),
    })
}

fn clean_j_ghz(params: &DeviceParams, options: &HamiltonianOptions) -> Result<f64> {
    Ok(exchange_j(params, None, options)?.j_ghz)
}

/// Root of J(control) = J_target on a bracket where J is monotone.
fn calibrate(
    base: &DeviceParams,
    scheme: ControlScheme,
    j_target_ghz: f64,
    bracket: (f64, f64),
    options: &HamiltonianOptions,
) -> Result<f64> {
    if !(j_target_ghz.is_finite() && j_target_ghz > 0.0) {
        return Err(DqdError::invalid("j_target_ghz", j_target_ghz, "must be finite and positive"));
    }
    let f = |c: f64| -> Result<f64> {
        Ok(clean_j_ghz(&scheme.device_at(base, c), options)? - j_target_ghz)
    };
    let (lo, hi) = bracket;
    let (j_lo, j_hi) = (f(lo)? + j_target_ghz, f(hi)? + j_target_ghz);
    let (j_min, j_max) = (j_lo.min(j_hi), j_lo.max(j_hi));
    let slack = CALIBRATION_RTOL * j_target_ghz;
    if j_target_ghz < j_min - slack || j_target_ghz > j_max + slack {
        return Err(DqdError::TargetOutOfRange {
            target_ghz: j_target_ghz,
            lo_ghz: j_min,
            hi_ghz: j_max,
        });
    }
    let root = brent(f, lo, hi, 1e-14, slack)?;
    Ok(root.x)
}

/// ε ≥ 0 at which the clean exchange equals the target, at fixed ξ.
pub fn calibrate_tilt(
    base: &DeviceParams,
    j_target_ghz: f64,
    xi_fixed_mev: f64,
    options: &HamiltonianOptions,
) -> Result<f64> {
    calibrate(
        base,
        ControlScheme::Tilt { xi_mev: xi_fixed_mev },
        j_target_ghz,
        (0.0, TILT_EPSILON_MAX_MEV),
        options,
    )
}

/// ξ at which the clean exchange of the level device equals the target.
pub fn calibrate_barrier(
    base: &DeviceParams,
    j_target_ghz: f64,
    options: &HamiltonianOptions,
) -> Result<f64> {
    let (lo, hi) = BARRIER_XI_RANGE_MEV;
    calibrate(base, ControlScheme::Barrier, j_target_ghz, (hi, lo), options)
}

/// Tilt and barrier noise compared at one matched exchange value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImprovementPoint {
    pub j_target_ghz: f64,
    pub epsilon_mev: f64,
    pub xi_mev: f64,
    pub tilt: NoiseRecord,
    pub barrier: NoiseRecord,
    /// |δJ/J|_tilt / |δJ/J|_barrier.
    pub chi: f64,
}

pub fn improvement_factor(
    base: &DeviceParams,
    j_target_ghz: f64,
    impurity: &Impurity,
    xi_fixed_mev: f64,
    options: &HamiltonianOptions,
) -> Result<ImprovementPoint> {
    let eps = calibrate_tilt(base, j_target_ghz, xi_fixed_mev, options)?;
    let xi = calibrate_barrier(base, j_target_ghz, options)?;
    compare_at(base, j_target_ghz, eps, xi, impurity, xi_fixed_mev, options)
}

pub(crate) fn compare_at(
    base: &DeviceParams,
    j_target_ghz: f64,
    epsilon_mev: f64,
    xi_mev: f64,
    impurity: &Impurity,
    xi_fixed_mev: f64,
    options: &HamiltonianOptions,
) -> Result<ImprovementPoint> {
    let tilt = delta_j(
        base,
        ControlScheme::Tilt { xi_mev: xi_fixed_mev },
        epsilon_mev,
        Some(impurity),
        options,
    )?;
    let barrier = delta_j(base, ControlScheme::Barrier, xi_mev, Some(impurity), options)?;
    if barrier.rel_noise == 0.0 {
        return Err(DqdError::InfiniteImprovement);
    }
    Ok(ImprovementPoint {
        j_target_ghz,
        epsilon_mev,
        xi_mev,
        tilt,
        barrier,
        chi: tilt.rel_noise.abs() / barrier.rel_noise.abs(),
    })
}

/// First-order estimate δJ/J ≈ 2δt/t + 2ε/(ΔU² − ε²)·δε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HubbardEstimate {
    /// 2δt/t.
    pub hopping_term: f64,
    /// 2ε/(ΔU² − ε²)·δε.
    pub detuning_term: f64,
    pub total: f64,
    /// t/ΔU.
    pub coupling_ratio: f64,
    /// ε/ΔU.
    pub detuning_ratio: f64,
}

/// The impurity enters the matrix as −t → −t + Z₁₂ and μ_i → μ_i − Z_i, so
/// δt = −Z₁₂ and δε = Z₁ − Z₂ with ε = μ₂ − μ₁.
pub fn hubbard_noise_estimate(
    params: &DeviceParams,
    impurity: &Impurity,
    options: &HamiltonianOptions,
) -> Result<HubbardEstimate> {
    let (hp, _) = solve(params, Some(impurity), options)?;
    let du = hp.delta_u();
    let eps = hp.detuning();
    if !(eps.abs() < du) {
        return Err(DqdError::OutsideHubbardValidity { epsilon: eps, delta_u: du });
    }
    let dt = -hp.z12;
    let de = hp.z1 - hp.z2;
    let hopping_term = 2.0 * dt / hp.t;
    let detuning_term = 2.0 * eps / (du * du - eps * eps) * de;
    Ok(HubbardEstimate {
        hopping_term,
        detuning_term,
        total: hopping_term + detuning_term,
        coupling_ratio: hp.t / du,
        detuning_ratio: eps / du,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweetSpot {
    /// Richardson-extrapolated dJ/dε at ε = 0, GHz/meV.
    pub derivative_ghz_per_mev: f64,
    pub error_estimate: f64,
    pub j_ghz: f64,
    /// Central-difference dJ/dε at ε = +h and ε = −h.
    pub derivative_at_plus_h: f64,
    pub derivative_at_minus_h: f64,
}

/// Step of the central difference; Richardson uses h and h/2.
pub const SWEET_SPOT_STEP_MEV: f64 = 1e-3;

pub fn sweet_spot_check(
    base: &DeviceParams,
    xi_mev: f64,
    options: &HamiltonianOptions,
) -> Result<SweetSpot> {
    let p = base.with_xi(xi_mev);
    let j = |e: f64| clean_j_ghz(&p.with_epsilon(e), options);
    let central = |e: f64, h: f64| -> Result<f64> { Ok((j(e + h)? - j(e - h)?) / (2.0 * h)) };
    let h = SWEET_SPOT_STEP_MEV;
    let coarse = central(0.0, h)?;
    let fine = central(0.0, 0.5 * h)?;
    Ok(SweetSpot {
        derivative_ghz_per_mev: (4.0 * fine - coarse) / 3.0,
        error_estimate: (fine - coarse).abs() / 3.0,
        j_ghz: j(0.0)?,
        derivative_at_plus_h: central(h, 0.5 * h)?,
        derivative_at_minus_h: central(-h, 0.5 * h)?,
    })
}

/// Clean J at the common starting point (ε = 0, ξ = ξ_fixed).
pub fn starting_exchange_ghz(
    base: &DeviceParams,
    xi_fixed_mev: f64,
    options: &HamiltonianOptions,
) -> Result<f64> {
    clean_j_ghz(&base.with_epsilon(0.0).with_xi(xi_fixed_mev), options)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> HamiltonianOptions {
        HamiltonianOptions::default()
    }

    fn reference(p: &DeviceParams) -> Impurity {
        Impurity::at_half_separations(p, -6.0, 6.0)
    }

    #[test]
    fn zero_charge_gives_zero_noise() {
        let p = DeviceParams::default();
        let imp = reference(&p).with_charge(0.0);
        let r = delta_j(&p, ControlScheme::Tilt { xi_mev: 1.3 }, 0.7, Some(&imp), &opts()).unwrap();
        assert_eq!(r.delta_j_ghz, 0.0);
        assert_eq!(r.rel_noise, 0.0);
    }

    #[test]
    fn rel_noise_definition() {
        let p = DeviceParams::default();
        let imp = reference(&p);
        let r = delta_j(&p, ControlScheme::Barrier, 0.9, Some(&imp), &opts()).unwrap();
        let from_ghz = (r.j_imp_ghz - r.j_clean_ghz) / r.j_clean_ghz;
        assert!((r.rel_noise - from_ghz).abs() < 1e-12);
    }

    #[test]
    fn calibration_fixed_points() {
        let p = DeviceParams::default();
        let j0 = starting_exchange_ghz(&p, 1.3, &opts()).unwrap();
        assert_eq!(calibrate_tilt(&p, j0, 1.3, &opts()).unwrap(), 0.0);
        assert_eq!(calibrate_barrier(&p, j0, &opts()).unwrap(), 1.3);
    }

    #[test]
    fn calibration_round_trips() {
        let p = DeviceParams::default();
        let mut prev_eps = 0.0;
        let mut prev_xi = f64::INFINITY;
        for jt in [0.15, 0.242, 0.5] {
            let eps = calibrate_tilt(&p, jt, 1.3, &opts()).unwrap();
            let j = clean_j_ghz(&p.with_epsilon(eps), &opts()).unwrap();
            assert!((j - jt).abs() <= 1e-6 * jt);
            assert!(eps > prev_eps);
            prev_eps = eps;
            let xi = calibrate_barrier(&p, jt, &opts()).unwrap();
            let j = clean_j_ghz(&p.with_xi(xi), &opts()).unwrap();
            assert!((j - jt).abs() <= 1e-6 * jt);
            assert!(xi < prev_xi);
            prev_xi = xi;
        }
    }

    #[test]
    fn calibration_rejects_unreachable_targets() {
        let p = DeviceParams::default();
        let err = calibrate_tilt(&p, 0.001, 1.3, &opts()).unwrap_err();
        assert!(matches!(err, DqdError::TargetOutOfRange { .. }));
        let err = calibrate_barrier(&p, 1e6, &opts()).unwrap_err();
        assert!(matches!(err, DqdError::TargetOutOfRange { .. }));
    }

    #[test]
    fn chi_is_one_at_starting_point() {
        let p = DeviceParams::default();
        let j0 = starting_exchange_ghz(&p, 1.3, &opts()).unwrap();
        let c = improvement_factor(&p, j0, &reference(&p), 1.3, &opts()).unwrap();
        assert_eq!(c.chi, 1.0);
    }

    #[test]
    fn y_axis_impurity_has_smaller_chi() {
        let p = DeviceParams::default();
        let diag = reference(&p);
        let y = Impurity::at_half_separations(&p, 0.0, diag.distance_nm() / p.a_nm);
        let a = improvement_factor(&p, 0.242, &diag, 1.3, &opts()).unwrap();
        let b = improvement_factor(&p, 0.242, &y, 1.3, &opts()).unwrap();
        assert!((b.chi - 1.0).abs() < (a.chi - 1.0).abs(), "{} {}", a.chi, b.chi);
    }

    #[test]
    fn estimate_at_zero_detuning_is_hopping_only() {
        let p = DeviceParams::default();
        let e = hubbard_noise_estimate(&p, &reference(&p), &opts()).unwrap();
        assert_eq!(e.detuning_term, 0.0);
        assert_eq!(e.total, e.hopping_term);
    }

    #[test]
    fn estimate_y_axis_has_no_detuning_shift() {
        let p = DeviceParams::default().with_epsilon(0.3);
        let imp = Impurity::at_half_separations(&p, 0.0, 8.0);
        let e = hubbard_noise_estimate(&p, &imp, &opts()).unwrap();
        assert!(e.detuning_term.abs() <= 1e-9 * e.hopping_term.abs());
    }

    #[test]
    fn estimate_rejects_resonance() {
        let p = DeviceParams::default().with_epsilon(2.0);
        let err = hubbard_noise_estimate(&p, &reference(&p), &opts()).unwrap_err();
        assert!(matches!(err, DqdError::OutsideHubbardValidity { .. }));
    }

    #[test]
    fn sweet_spot_is_flat_and_antisymmetric() {
        let p = DeviceParams::default();
        for xi in [0.6, 1.3] {
            let s = sweet_spot_check(&p, xi, &opts()).unwrap();
            assert!(s.derivative_ghz_per_mev.abs() <= 1e-6 * s.j_ghz);
            let sum = s.derivative_at_plus_h + s.derivative_at_minus_h;
            assert!(sum.abs() <= 1e-6 * s.derivative_at_plus_h.abs());
        }
    }
}
