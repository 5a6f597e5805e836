//! Physical parameters, unit conventions and derived constants.
//!
//! Energies are in meV, lengths in nm. Frequencies are reported in GHz via
//! `J[GHz] = J[meV] / h`.

use std::fmt;

use crate::error::{DqdError, Result};

/// ħ²/(2mₑ) in meV·nm².
pub const HBAR2_OVER_2ME: f64 = 38.099_821_114_859_62;
/// e²/(4πε₀) in meV·nm.
pub const COULOMB_VACUUM: f64 = 1_439.964_547_842_567;
/// 1/h in GHz per meV.
pub const GHZ_PER_MEV: f64 = 241.798_924_208_491_8;

pub fn mev_to_ghz(energy_mev: f64) -> f64 {
    energy_mev * GHZ_PER_MEV
}

pub fn ghz_to_mev(freq_ghz: f64) -> f64 {
    freq_ghz / GHZ_PER_MEV
}

/// One simulation point: geometry, material, and the two control knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    /// Half the inter-dot separation; the wells sit at x = ∓a.
    pub a_nm: f64,
    /// Confinement energy ħω₀.
    pub hbar_omega0_mev: f64,
    /// Effective mass in units of the bare electron mass.
    pub m_eff: f64,
    /// Relative permittivity.
    pub eps_r: f64,
    /// Detuning ε: well-bottom energy of dot 1 minus that of dot 2.
    pub epsilon_mev: f64,
    /// Amplitude ξ of the Gaussian barrier at the origin.
    pub xi_mev: f64,
}

impl Default for DeviceParams {
    /// GaAs material constants at the common starting point (ε = 0, ξ = 1.3 meV).
    fn default() -> Self {
        DeviceParams {
            a_nm: 100.0,
            hbar_omega0_mev: 0.1,
            m_eff: 0.067,
            eps_r: 13.1,
            epsilon_mev: 0.0,
            xi_mev: 1.3,
        }
    }
}

impl DeviceParams {
    pub fn with_epsilon(mut self, epsilon_mev: f64) -> Self {
        self.epsilon_mev = epsilon_mev;
        self
    }

    pub fn with_xi(mut self, xi_mev: f64) -> Self {
        self.xi_mev = xi_mev;
        self
    }

    /// Depths (μ₁, μ₂) entering the confinement potential as `−μ_i` at the
    /// well bottoms. Positive ε raises dot 1 by ε/2 and lowers dot 2 by ε/2.
    pub fn well_depths(&self) -> (f64, f64) {
        (-0.5 * self.epsilon_mev, 0.5 * self.epsilon_mev)
    }

    pub fn check(&self) -> Result<()> {
        let positive = [
            ("a_nm", self.a_nm),
            ("hbar_omega0_mev", self.hbar_omega0_mev),
            ("m_eff", self.m_eff),
            ("eps_r", self.eps_r),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(DqdError::invalid(name, value, "must be finite and positive"));
            }
        }
        for (name, value) in [("epsilon_mev", self.epsilon_mev), ("xi_mev", self.xi_mev)] {
            if !value.is_finite() {
                return Err(DqdError::invalid(name, value, "must be finite"));
            }
        }
        Ok(())
    }
}

/// Quantities that follow from [`DeviceParams`] alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// Fock-Darwin radius a_B = √(ħ/(m*ω₀)).
    pub fock_darwin_radius_nm: f64,
    /// Central barrier height C = a²m*ω₀²/12 (without the Gaussian).
    pub barrier_height_mev: f64,
    /// ħ²/(2m*).
    pub kinetic_scale_mev_nm2: f64,
    /// e²/(4πκ).
    pub coulomb_scale_mev_nm: f64,
    /// m*ω₀², the well curvature.
    pub curvature_mev_per_nm2: f64,
    pub ghz_per_mev: f64,
}

pub fn derive_constants(params: &DeviceParams) -> Result<DerivedConstants> {
    params.check()?;
    let kinetic = HBAR2_OVER_2ME / params.m_eff;
    let hw = params.hbar_omega0_mev;
    // a_B² = (ħ²/m*)/(ħω₀) and m*ω₀² = (ħω₀)²/(ħ²/m*)
    let radius = (2.0 * kinetic / hw).sqrt();
    let curvature = hw * hw / (2.0 * kinetic);
    Ok(DerivedConstants {
        fock_darwin_radius_nm: radius,
        barrier_height_mev: params.a_nm * params.a_nm * curvature / 12.0,
        kinetic_scale_mev_nm2: kinetic,
        coulomb_scale_mev_nm: COULOMB_VACUUM / params.eps_r,
        curvature_mev_per_nm2: curvature,
        ghz_per_mev: GHZ_PER_MEV,
    })
}

/// A point charge in the dot plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Impurity {
    pub x_nm: f64,
    pub y_nm: f64,
    /// Charge in units of the elementary charge (−1 for an extra electron).
    pub charge_e: f64,
}

impl Impurity {
    pub fn new(x_nm: f64, y_nm: f64, charge_e: f64) -> Self {
        Impurity {
            x_nm,
            y_nm,
            charge_e,
        }
    }

    /// Impurity at (x, y)·a with unit negative charge.
    pub fn at_half_separations(params: &DeviceParams, x_over_a: f64, y_over_a: f64) -> Self {
        Impurity::new(x_over_a * params.a_nm, y_over_a * params.a_nm, -1.0)
    }

    pub fn with_charge(mut self, charge_e: f64) -> Self {
        self.charge_e = charge_e;
        self
    }

    pub fn position(&self) -> [f64; 2] {
        [self.x_nm, self.y_nm]
    }

    pub fn distance_nm(&self) -> f64 {
        self.x_nm.hypot(self.y_nm)
    }
}

impl fmt::Display for Impurity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} nm, {} nm, q={}e)", self.x_nm, self.y_nm, self.charge_e)
    }
}

/// How the exchange interaction is tuned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlScheme {
    /// Vary ε at a fixed barrier amplitude.
    Tilt { xi_mev: f64 },
    /// Vary ξ with the wells kept level (ε = 0).
    Barrier,
}

impl ControlScheme {
    /// Device at the given control value: ε for tilt, ξ for barrier.
    pub fn device_at(&self, base: &DeviceParams, control_mev: f64) -> DeviceParams {
        match *self {
            ControlScheme::Tilt { xi_mev } => base.with_xi(xi_mev).with_epsilon(control_mev),
            ControlScheme::Barrier => base.with_epsilon(0.0).with_xi(control_mev),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ControlScheme::Tilt { .. } => "tilt",
            ControlScheme::Barrier => "barrier",
        }
    }
}

impl fmt::Display for ControlScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Signed residual of the inequality or equality being checked.
    pub residual: f64,
    /// Informational checks are reported but do not affect the overall flag.
    pub informational: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| !c.informational)
            .all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, residual: f64, informational: bool) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            residual,
            informational,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = match (c.passed, c.informational) {
                (true, _) => "pass",
                (false, true) => "info",
                (false, false) => "FAIL",
            };
            writeln!(f, "[{tag}] {} (residual {:e})", c.name, c.residual)?;
        }
        Ok(())
    }
}

/// Checks positivity and that a central barrier exists on both sides.
///
/// The barrier condition is that the one-sided curvature of V(x, 0) at the
/// origin is not positive. Including the Gaussian term it reads
/// `a²m*ω₀² − 12μ_i − 12C − 16ξ ≤ 0` per well; the ξ-free form is reported
/// alongside as an informational line.
pub fn validate_params(params: &DeviceParams) -> ValidationReport {
    let mut report = ValidationReport::default();
    let positive = [
        ("a > 0", params.a_nm),
        ("hbar_omega0 > 0", params.hbar_omega0_mev),
        ("m_eff > 0", params.m_eff),
        ("eps_r > 0", params.eps_r),
    ];
    for (name, value) in positive {
        report.push(name, value.is_finite() && value > 0.0, value, false);
    }
    let Ok(derived) = derive_constants(params) else {
        return report;
    };
    let curvature_a2 = params.a_nm * params.a_nm * derived.curvature_mev_per_nm2;
    let c = derived.barrier_height_mev;
    report.push(
        format!("barrier height C = {c:.6e} meV"),
        c > 0.0,
        c,
        true,
    );
    let (mu1, mu2) = params.well_depths();
    for (label, mu) in [("dot 1 (x<0)", mu1), ("dot 2 (x>=0)", mu2)] {
        let bare = curvature_a2 - 12.0 * mu - 12.0 * c;
        let with_gaussian = bare - 16.0 * params.xi_mev;
        report.push(
            format!("barrier exists on {label}: a^2 V''(0) <= 0"),
            with_gaussian <= 0.0,
            with_gaussian,
            false,
        );
        report.push(
            format!("bare quartic barrier on {label} (xi excluded)"),
            bare <= 0.0,
            bare,
            true,
        );
    }
    report
}
