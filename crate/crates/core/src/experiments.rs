//! Figure-data experiments. An [`ExperimentSpec`] is fully resolved before it
//! runs and is written verbatim into the CSV provenance lines.

use std::fmt;
use std::str::FromStr;

use crate::config::{RunConfig, SchemeKind};
use crate::csv::{CsvDocument, Field};
use crate::error::{DqdError, Result};
use crate::hamiltonian::{exchange_j, AssemblyMode, HamiltonianOptions};
use crate::model::{ControlScheme, DeviceParams, Impurity};
use crate::noise::{
    chi_curve, control_grid, impurity_scan, monte_carlo_quality, qfactor_curve,
    starting_exchange_ghz, sweep, ImprovementPoint, QualityModel, ScanDirection,
};
use crate::potential::ConfinementPotential;
use crate::validation::matched_targets;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const NOISE_HEADER: &str = "scheme,control_mev,J_clean_ghz,J_imp_ghz,delta_J_ghz,rel_noise";
pub const CHI_HEADER: &str = "J_ghz,rel_tilt,rel_barrier,chi";
pub const QFACTOR_HEADER: &str = "J_ghz,Q_tilt,Q_barrier,Q_constmodel";
pub const SCAN_HEADER: &str = "direction,Rc_over_a,rel_tilt,rel_barrier";
pub const SPECTRUM_HEADER: &str = "epsilon_mev,xi_mev,E0_mev,E1_mev,J_mev,J_ghz";
pub const PROFILE_HEADER: &str = "x_nm,y_nm,V_meV";

/// Matched-J comparisons run from J₀ to the target over this many steps.
pub const MATCHED_STEPS: usize = 30;
/// Monte-Carlo ensemble size of the Q cross-check.
pub const MONTE_CARLO_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Spectrum,
    ExchangeTilt,
    ExchangeBarrier,
    NoiseCompare,
    Qfactor,
    ImpurityScan,
    NearImpurity,
    PotentialProfile,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Spectrum,
        Experiment::ExchangeTilt,
        Experiment::ExchangeBarrier,
        Experiment::NoiseCompare,
        Experiment::Qfactor,
        Experiment::ImpurityScan,
        Experiment::NearImpurity,
        Experiment::PotentialProfile,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::ExchangeTilt => "exchange-tilt",
            Experiment::ExchangeBarrier => "exchange-barrier",
            Experiment::NoiseCompare => "noise-compare",
            Experiment::Qfactor => "qfactor",
            Experiment::ImpurityScan => "impurity-scan",
            Experiment::NearImpurity => "near-impurity",
            Experiment::PotentialProfile => "potential-profile",
        }
    }

    pub fn header(&self) -> &'static str {
        match self {
            Experiment::Spectrum => SPECTRUM_HEADER,
            Experiment::ExchangeTilt | Experiment::ExchangeBarrier => NOISE_HEADER,
            Experiment::NoiseCompare | Experiment::NearImpurity => CHI_HEADER,
            Experiment::Qfactor => QFACTOR_HEADER,
            Experiment::ImpurityScan => SCAN_HEADER,
            Experiment::PotentialProfile => PROFILE_HEADER,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inclusive range `lo:hi:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridSpec {
    pub const fn new(lo: f64, hi: f64, step: f64) -> Self {
        GridSpec { lo, hi, step }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        control_grid(self.lo, self.hi, self.step)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts[..] else {
            return Err(format!("expected lo:hi:step, found `{s}`"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
        let g = GridSpec::new(num(lo)?, num(hi)?, num(step)?);
        g.values().map_err(|e| e.to_string())?;
        Ok(g)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}

/// A labelled grid of one control variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub label: String,
    pub grid: GridSpec,
}

impl Sweep {
    fn new(label: impl Into<String>, grid: GridSpec) -> Self {
        Sweep {
            label: label.into(),
            grid,
        }
    }
}

/// Command-line overrides applied on top of a [`RunConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Overrides {
    pub eps_range: Option<GridSpec>,
    pub xi_range: Option<GridSpec>,
    pub j_target_mhz: Option<f64>,
    pub mode: AssemblyMode,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub config: RunConfig,
    pub mode: AssemblyMode,
    /// Control grids. The meaning of a label depends on the experiment: a
    /// ξ value for spectrum cuts, a block tag otherwise.
    pub sweeps: Vec<Sweep>,
    pub impurity: Option<Impurity>,
    pub j_target_ghz: Option<f64>,
    pub seed: u64,
}

const EPS_DEFAULT: GridSpec = GridSpec::new(0.0, 1.0, 0.01);
const XI_DEFAULT: GridSpec = GridSpec::new(0.5, 1.3, 0.01);
const XI_ZOOM: GridSpec = GridSpec::new(0.5, 0.6, 0.001);
const SPECTRUM_XI_MEV: [f64; 2] = [1.3, 1.0];
const SCAN_RADII: GridSpec = GridSpec::new(5.0, 20.0, 0.5);
const PROFILE_HALF_WIDTH: f64 = 3.0;
const PROFILE_POINTS: f64 = 300.0;

impl ExperimentSpec {
    pub fn resolve(experiment: Experiment, config: RunConfig, o: &Overrides) -> Result<Self> {
        let a = config.device.a_nm;
        let reference = config.impurity_or(-6.0, 6.0, -1.0);
        let eps = o.eps_range.unwrap_or(EPS_DEFAULT);
        let (sweeps, impurity, j_target_mhz) = match experiment {
            Experiment::Spectrum => {
                let sweeps = match config.scheme {
                    SchemeKind::Tilt => {
                        let xis = match o.xi_range {
                            Some(g) => g.values()?,
                            None => SPECTRUM_XI_MEV.to_vec(),
                        };
                        xis.into_iter().map(|xi| Sweep::new(xi.to_string(), eps)).collect()
                    }
                    SchemeKind::Barrier => {
                        vec![Sweep::new("barrier", o.xi_range.unwrap_or(XI_DEFAULT))]
                    }
                };
                let imp = config.impurity_xy_nm.map(|_| reference);
                (sweeps, imp, None)
            }
            Experiment::ExchangeTilt => (vec![Sweep::new("tilt", eps)], Some(reference), None),
            Experiment::ExchangeBarrier => {
                let sweeps = match o.xi_range {
                    Some(g) => vec![Sweep::new("main", g)],
                    None => vec![Sweep::new("main", XI_DEFAULT), Sweep::new("zoom", XI_ZOOM)],
                };
                (sweeps, Some(reference), None)
            }
            Experiment::NoiseCompare | Experiment::Qfactor => {
                (Vec::new(), Some(reference), Some(o.j_target_mhz.unwrap_or(1000.0)))
            }
            Experiment::NearImpurity => (
                Vec::new(),
                Some(config.impurity_or(-1.5, 0.5, -0.01)),
                Some(o.j_target_mhz.unwrap_or(1000.0)),
            ),
            Experiment::ImpurityScan => {
                let sweeps = ScanDirection::ALL
                    .iter()
                    .map(|d| Sweep::new(d.label(), SCAN_RADII))
                    .collect();
                let imp = Impurity::new(0.0, 0.0, config.charge_e.unwrap_or(-1.0));
                (sweeps, Some(imp), Some(o.j_target_mhz.unwrap_or(242.0)))
            }
            Experiment::PotentialProfile => {
                let half = PROFILE_HALF_WIDTH * a;
                let g = GridSpec::new(-half, half, 2.0 * half / PROFILE_POINTS);
                (vec![Sweep::new("x", g), Sweep::new("y", g)], None, None)
            }
        };
        if let Some(j) = j_target_mhz {
            if !(j.is_finite() && j > 0.0) {
                return Err(DqdError::invalid("J_mhz", j, "must be finite and positive"));
            }
        }
        Ok(ExperimentSpec {
            experiment,
            config,
            mode: o.mode,
            sweeps,
            impurity,
            j_target_ghz: j_target_mhz.map(|j| j * 1e-3),
            seed: o.seed,
        })
    }

    pub fn options(&self) -> HamiltonianOptions {
        HamiltonianOptions::default().with_mode(self.mode)
    }

    fn device(&self) -> DeviceParams {
        self.config.device
    }

    pub fn provenance(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("dqdsim_version".to_string(), VERSION.to_string()),
            ("experiment".to_string(), self.experiment.to_string()),
            ("mode".to_string(), self.mode.to_string()),
            ("onsite".to_string(), format!("{:?}", self.options().onsite)),
        ];
        for (k, v) in self.config.entries() {
            // Impurity keys are reported once, resolved, below.
            if !k.starts_with("impurity.") {
                out.push((k.to_string(), v));
            }
        }
        for s in &self.sweeps {
            out.push((format!("sweep.{}", s.label), s.grid.to_string()));
        }
        let imp = match (self.experiment, self.impurity) {
            (Experiment::ImpurityScan, Some(i)) => format!("scanned,q={}", i.charge_e),
            (_, Some(i)) => format!("{},{},{}", i.x_nm, i.y_nm, i.charge_e),
            (_, None) => "none".to_string(),
        };
        out.push(("impurity".to_string(), imp));
        if let Some(j) = self.j_target_ghz {
            out.push(("J_target_ghz".to_string(), j.to_string()));
        }
        if self.matched() {
            out.push(("matched_steps".to_string(), MATCHED_STEPS.to_string()));
        }
        out.push(("seed".to_string(), self.seed.to_string()));
        out
    }

    fn matched(&self) -> bool {
        matches!(
            self.experiment,
            Experiment::NoiseCompare | Experiment::Qfactor | Experiment::NearImpurity
        )
    }
}

/// CSV text, a human-readable summary, and the per-point failures whose
/// rows were left out.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub csv: String,
    pub rows: usize,
    pub summary: Vec<String>,
    pub failures: Vec<String>,
}

impl Artifact {
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Fatal errors (invalid device, calibration targets out of range) abort the
/// run; per-point errors are collected in [`Artifact::failures`].
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Artifact> {
    spec.device().check()?;
    let mut doc = CsvDocument::new(spec.experiment.header());
    for (k, v) in spec.provenance() {
        doc.provenance(k, v);
    }
    let mut summary = Vec::new();
    let mut failures = Vec::new();
    match spec.experiment {
        Experiment::Spectrum => spectrum(spec, &mut doc, &mut summary, &mut failures)?,
        Experiment::ExchangeTilt | Experiment::ExchangeBarrier => {
            noise_sweeps(spec, &mut doc, &mut summary, &mut failures)?
        }
        Experiment::NoiseCompare | Experiment::NearImpurity => {
            matched(spec, &mut doc, &mut summary, &mut failures)?
        }
        Experiment::Qfactor => qfactor(spec, &mut doc, &mut summary, &mut failures)?,
        Experiment::ImpurityScan => scan(spec, &mut doc, &mut summary, &mut failures)?,
        Experiment::PotentialProfile => profile(spec, &mut doc)?,
    }
    summary.insert(0, format!("{}: {} rows", spec.experiment, doc.rows()));
    Ok(Artifact {
        csv: doc.render(),
        rows: doc.rows(),
        summary,
        failures,
    })
}

fn spectrum(
    spec: &ExperimentSpec,
    doc: &mut CsvDocument,
    summary: &mut Vec<String>,
    failures: &mut Vec<String>,
) -> Result<()> {
    use rayon::prelude::*;
    let options = spec.options();
    let base = spec.device();
    for s in &spec.sweeps {
        let scheme = match spec.config.scheme {
            SchemeKind::Tilt => ControlScheme::Tilt {
                xi_mev: s.label.parse().map_err(|_| DqdError::invalid("xi", f64::NAN, "bad label"))?,
            },
            SchemeKind::Barrier => ControlScheme::Barrier,
        };
        let controls = s.grid.values()?;
        let rows: Vec<_> = controls
            .par_iter()
            .map(|&c| {
                let p = scheme.device_at(&base, c);
                exchange_j(&p, spec.impurity.as_ref(), &options).map(|r| (p, r))
            })
            .collect();
        let mut j_range = (f64::INFINITY, f64::NEG_INFINITY);
        for (row, c) in rows.into_iter().zip(&controls) {
            match row {
                Ok((p, r)) => {
                    j_range = (j_range.0.min(r.j_ghz), j_range.1.max(r.j_ghz));
                    doc.row(&[
                        Field::Num(p.epsilon_mev),
                        Field::Num(p.xi_mev),
                        Field::Num(r.eigenvalues[0]),
                        Field::Num(r.eigenvalues[1]),
                        Field::Num(r.j_mev),
                        Field::Num(r.j_ghz),
                    ]);
                }
                Err(e) => failures.push(format!("{scheme} control {c}: {e}")),
            }
        }
        summary.push(format!(
            "{scheme} sweep {}: J from {} to {} GHz",
            s.label, j_range.0, j_range.1
        ));
    }
    Ok(())
}

fn noise_sweeps(
    spec: &ExperimentSpec,
    doc: &mut CsvDocument,
    summary: &mut Vec<String>,
    failures: &mut Vec<String>,
) -> Result<()> {
    let base = spec.device();
    let scheme = match spec.experiment {
        Experiment::ExchangeTilt => ControlScheme::Tilt { xi_mev: base.xi_mev },
        _ => ControlScheme::Barrier,
    };
    for s in &spec.sweeps {
        if spec.sweeps.len() > 1 {
            doc.block(&s.label);
        }
        let controls = s.grid.values()?;
        let mut worst: f64 = 0.0;
        for (rec, c) in sweep(&base, scheme, &controls, spec.impurity.as_ref(), &spec.options())
            .into_iter()
            .zip(&controls)
        {
            match rec {
                Ok(r) => {
                    worst = worst.max(r.rel_noise.abs());
                    doc.row(&[
                        Field::Text(scheme.name()),
                        Field::Num(r.control_mev),
                        Field::Num(r.j_clean_ghz),
                        Field::Num(r.j_imp_ghz),
                        Field::Num(r.delta_j_ghz),
                        Field::Num(r.rel_noise),
                    ]);
                }
                Err(e) => failures.push(format!("{scheme} control {c}: {e}")),
            }
        }
        summary.push(format!("{} block {}: max |dJ/J| = {worst}", scheme, s.label));
    }
    Ok(())
}

fn targets(spec: &ExperimentSpec) -> Result<(f64, Vec<f64>)> {
    let base = spec.device();
    let j0 = starting_exchange_ghz(&base, base.xi_mev, &spec.options())?;
    let jmax = spec.j_target_ghz.unwrap_or(1.0);
    if jmax <= j0 {
        return Err(DqdError::TargetOutOfRange {
            target_ghz: jmax,
            lo_ghz: j0,
            hi_ghz: f64::INFINITY,
        });
    }
    Ok((j0, matched_targets(j0, jmax, MATCHED_STEPS)))
}

fn reference_impurity(spec: &ExperimentSpec) -> Impurity {
    spec.impurity.unwrap_or_else(|| Impurity::at_half_separations(&spec.device(), -6.0, 6.0))
}

fn matched(
    spec: &ExperimentSpec,
    doc: &mut CsvDocument,
    summary: &mut Vec<String>,
    failures: &mut Vec<String>,
) -> Result<()> {
    let base = spec.device();
    let imp = reference_impurity(spec);
    let (j0, targets) = targets(spec)?;
    let mut ok: Vec<ImprovementPoint> = Vec::new();
    for (p, jt) in chi_curve(&base, &targets, &imp, base.xi_mev, &spec.options())
        .into_iter()
        .zip(&targets)
    {
        match p {
            Ok(p) => {
                doc.row(&[
                    Field::Num(p.j_target_ghz),
                    Field::Num(p.tilt.rel_noise),
                    Field::Num(p.barrier.rel_noise),
                    Field::Num(p.chi),
                ]);
                ok.push(p);
            }
            Err(e) => failures.push(format!("J = {jt} GHz: {e}")),
        }
    }
    summary.push(format!("J0 = {j0} GHz, impurity {imp}"));
    if let (Some(first), Some(last)) = (ok.first(), ok.last()) {
        let chi_max = ok.iter().map(|p| p.chi).fold(0.0, f64::max);
        summary.push(format!(
            "chi from {} to {} (max {chi_max}); barrier |dJ/J| from {} to {}",
            first.chi,
            last.chi,
            first.barrier.rel_noise.abs(),
            last.barrier.rel_noise.abs()
        ));
    }
    Ok(())
}

fn qfactor(
    spec: &ExperimentSpec,
    doc: &mut CsvDocument,
    summary: &mut Vec<String>,
    failures: &mut Vec<String>,
) -> Result<()> {
    let base = spec.device();
    let imp = reference_impurity(spec);
    let (_, targets) = targets(spec)?;
    let rows = qfactor_curve(&base, &targets, &imp, base.xi_mev, &spec.options())?;
    for (row, jt) in rows.into_iter().zip(&targets) {
        match row {
            Ok(r) => {
                doc.row(&[
                    Field::Num(r.j_ghz),
                    Field::Num(r.q_tilt),
                    Field::Num(r.q_barrier),
                    Field::Num(r.q_constmodel),
                ]);
            }
            Err(e) => failures.push(format!("J = {jt} GHz: {e}")),
        }
    }
    // Seeded ensemble cross-check of the closed form at the upper target.
    let jt = *targets.last().unwrap_or(&1.0);
    let model = QualityModel::relative(0.05);
    let mc = monte_carlo_quality(jt, &model, MONTE_CARLO_SAMPLES, spec.seed)?;
    let closed = crate::noise::quality_factor(jt, &model)?;
    summary.push(format!(
        "Monte-Carlo Q check ({MONTE_CARLO_SAMPLES} samples, seed {}): {mc} vs closed form {closed}",
        spec.seed
    ));
    Ok(())
}

fn scan(
    spec: &ExperimentSpec,
    doc: &mut CsvDocument,
    summary: &mut Vec<String>,
    failures: &mut Vec<String>,
) -> Result<()> {
    let base = spec.device();
    let charge = spec.impurity.map_or(-1.0, |i| i.charge_e);
    let jt = spec.j_target_ghz.unwrap_or(0.242);
    for (s, d) in spec.sweeps.iter().zip(ScanDirection::ALL) {
        doc.block(d.label());
        let radii = s.grid.values()?;
        let points = impurity_scan(&base, jt, &[d], &radii, charge, base.xi_mev, &spec.options())?;
        let mut ratios = Vec::new();
        for (p, r) in points.into_iter().zip(&radii) {
            match p {
                Ok(p) => {
                    ratios.push(p.rel_tilt.abs() / p.rel_barrier.abs());
                    doc.row(&[
                        Field::Text(d.label()),
                        Field::Num(p.rc_over_a),
                        Field::Num(p.rel_tilt),
                        Field::Num(p.rel_barrier),
                    ]);
                }
                Err(e) => failures.push(format!("direction {d}, Rc/a = {r}: {e}")),
            }
        }
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        summary.push(format!("direction {d}: tilt/barrier ratio in [{lo}, {hi}]"));
    }
    Ok(())
}

fn profile(spec: &ExperimentSpec, doc: &mut CsvDocument) -> Result<()> {
    let v = ConfinementPotential::new(&spec.device())?;
    for s in &spec.sweeps {
        doc.block(&s.label);
        for c in s.grid.values()? {
            let (x, y) = if s.label == "x" { (c, 0.0) } else { (0.0, c) };
            doc.row(&[Field::Num(x), Field::Num(y), Field::Num(v.eval(x, y))]);
        }
    }
    Ok(())
}
