//! `key = value` run configuration with `#` comments.

use std::fmt;
use std::str::FromStr;

use crate::error::{DqdError, Result};
use crate::model::{ControlScheme, DeviceParams, Impurity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchemeKind {
    #[default]
    Tilt,
    Barrier,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Tilt => "tilt",
            SchemeKind::Barrier => "barrier",
        }
    }

    /// The scheme with the tilt barrier pinned at `xi_mev`.
    pub fn scheme(&self, xi_mev: f64) -> ControlScheme {
        match self {
            SchemeKind::Tilt => ControlScheme::Tilt { xi_mev },
            SchemeKind::Barrier => ControlScheme::Barrier,
        }
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "tilt" => Ok(SchemeKind::Tilt),
            "barrier" => Ok(SchemeKind::Barrier),
            other => Err(format!("unknown scheme `{other}` (expected tilt or barrier)")),
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Resolved configuration. Impurity fields left unset fall back to
/// per-experiment defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunConfig {
    pub device: DeviceParams,
    pub scheme: SchemeKind,
    pub impurity_xy_nm: Option<[f64; 2]>,
    pub charge_e: Option<f64>,
}

pub const KEYS: [&str; 10] = [
    "device.a_nm",
    "device.hbar_omega0_mev",
    "device.m_eff",
    "device.eps_r",
    "control.scheme",
    "control.epsilon_mev",
    "control.xi_mev",
    "impurity.x_nm",
    "impurity.y_nm",
    "impurity.charge_e",
];

impl RunConfig {
    /// Parses config text over the defaults. Later lines override earlier
    /// ones; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut x = None;
        let mut y = None;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| DqdError::Config {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let number = || -> Result<f64> {
                value.parse::<f64>().map_err(|_| DqdError::Config {
                    line,
                    message: format!("`{key}` expects a number, found `{value}`"),
                })
            };
            match key {
                "device.a_nm" => cfg.device.a_nm = number()?,
                "device.hbar_omega0_mev" => cfg.device.hbar_omega0_mev = number()?,
                "device.m_eff" => cfg.device.m_eff = number()?,
                "device.eps_r" => cfg.device.eps_r = number()?,
                "control.scheme" => {
                    cfg.scheme = value
                        .parse()
                        .map_err(|message| DqdError::Config { line, message })?
                }
                "control.epsilon_mev" => cfg.device.epsilon_mev = number()?,
                "control.xi_mev" => cfg.device.xi_mev = number()?,
                "impurity.x_nm" => x = Some(number()?),
                "impurity.y_nm" => y = Some(number()?),
                "impurity.charge_e" => cfg.charge_e = Some(number()?),
                other => {
                    return Err(DqdError::Config {
                        line,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        cfg.impurity_xy_nm = match (x, y) {
            (Some(x), Some(y)) => Some([x, y]),
            (None, None) => None,
            _ => {
                return Err(DqdError::Config {
                    line: 0,
                    message: "impurity.x_nm and impurity.y_nm must be given together".into(),
                })
            }
        };
        cfg.device.check()?;
        Ok(cfg)
    }

    /// Impurity from the config, or at (x/a, y/a) with charge `q` when unset.
    pub fn impurity_or(&self, x_over_a: f64, y_over_a: f64, charge_e: f64) -> Impurity {
        let [x, y] = self
            .impurity_xy_nm
            .unwrap_or([x_over_a * self.device.a_nm, y_over_a * self.device.a_nm]);
        Impurity::new(x, y, self.charge_e.unwrap_or(charge_e))
    }

    /// Every key with its resolved value, in [`KEYS`] order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let d = &self.device;
        let opt = |v: Option<f64>| v.map_or_else(|| "default".to_string(), |v| v.to_string());
        vec![
            (KEYS[0], d.a_nm.to_string()),
            (KEYS[1], d.hbar_omega0_mev.to_string()),
            (KEYS[2], d.m_eff.to_string()),
            (KEYS[3], d.eps_r.to_string()),
            (KEYS[4], self.scheme.to_string()),
            (KEYS[5], d.epsilon_mev.to_string()),
            (KEYS[6], d.xi_mev.to_string()),
            (KEYS[7], opt(self.impurity_xy_nm.map(|p| p[0]))),
            (KEYS[8], opt(self.impurity_xy_nm.map(|p| p[1]))),
            (KEYS[9], opt(self.charge_e)),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let c = RunConfig::parse("# nothing\n\n").unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn all_keys() {
        let text = "device.a_nm = 80\ndevice.hbar_omega0_mev=0.2 # trailing\n\
                    device.m_eff = 0.19\ndevice.eps_r = 11.7\ncontrol.scheme = barrier\n\
                    control.epsilon_mev = 0.1\ncontrol.xi_mev = 0.9\nimpurity.x_nm = -600\n\
                    impurity.y_nm = 600\nimpurity.charge_e = -0.5\n";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.device.a_nm, 80.0);
        assert_eq!(c.device.hbar_omega0_mev, 0.2);
        assert_eq!(c.device.m_eff, 0.19);
        assert_eq!(c.device.eps_r, 11.7);
        assert_eq!(c.scheme, SchemeKind::Barrier);
        assert_eq!(c.device.epsilon_mev, 0.1);
        assert_eq!(c.device.xi_mev, 0.9);
        assert_eq!(c.impurity_or(1.0, 1.0, -1.0), Impurity::new(-600.0, 600.0, -0.5));
        let round: String = c
            .entries()
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        assert_eq!(RunConfig::parse(&round).unwrap(), c);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = RunConfig::parse("device.a_nm = 100\nfoo = 1\n").unwrap_err();
        assert_eq!(e, DqdError::Config { line: 2, message: "unknown key `foo`".into() });
        assert!(matches!(
            RunConfig::parse("device.m_eff = abc").unwrap_err(),
            DqdError::Config { line: 1, .. }
        ));
        assert!(RunConfig::parse("no equals sign").is_err());
        assert!(RunConfig::parse("impurity.x_nm = 3").is_err());
        assert!(RunConfig::parse("device.a_nm = -1").is_err());
        assert!(RunConfig::parse("control.scheme = sideways").is_err());
    }

    #[test]
    fn impurity_default_scales_with_a() {
        let c = RunConfig::parse("device.a_nm = 50").unwrap();
        assert_eq!(c.impurity_or(-6.0, 6.0, -1.0), Impurity::new(-300.0, 300.0, -1.0));
    }
}
