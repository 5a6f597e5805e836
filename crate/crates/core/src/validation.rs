//! Self-test suites: closed forms against the quadrature oracle, potential
//! construction, orthonormality, spectral invariants, the sweet spot, and the
//! matched-J noise trends.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::hamiltonian::{eigen, exchange_j, frobenius, HamiltonianOptions};
use crate::integrals::oracle::{
    oracle_coulomb, oracle_impurity, oracle_kinetic, oracle_overlap, oracle_potential,
};
use crate::integrals::{
    coulomb_element_with_bessel, i0e, impurity_element_with_bessel, kinetic_element,
    potential_element, BesselFn,
};
use crate::model::{derive_constants, validate_params, DeviceParams, Impurity};
use crate::noise::{chi_curve, starting_exchange_ghz, sweet_spot_check, ImprovementPoint};
use crate::orbitals::{congruence, overlap_matrix, OrbitalBasis};
use crate::potential::{potential_constraint_report, ConfinementPotential};

/// Tolerance of closed forms against the oracle, relative to |oracle value|.
pub const ORACLE_RTOL: f64 = 1e-6;
/// Requested accuracy of the oracle itself.
const ORACLE_QUAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub label: String,
    pub passed: bool,
    /// Measured quantity (deviation, residual, slope, ...).
    pub value: f64,
    /// Bound the value is compared against.
    pub limit: f64,
}

impl CheckOutcome {
    fn at_most(label: impl Into<String>, value: f64, limit: f64) -> Self {
        CheckOutcome {
            label: label.into(),
            passed: value <= limit,
            value,
            limit,
        }
    }

    fn error(label: impl Into<String>, err: impl fmt::Display) -> Self {
        CheckOutcome {
            label: format!("{}: {err}", label.into()),
            passed: false,
            value: f64::NAN,
            limit: f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Largest value/limit ratio over the suite; > 1 means failure.
    pub fn worst(&self) -> Option<&CheckOutcome> {
        self.checks
            .iter()
            .max_by(|a, b| ratio(a).total_cmp(&ratio(b)))
    }
}

fn ratio(c: &CheckOutcome) -> f64 {
    if !c.passed {
        f64::INFINITY
    } else if c.limit == 0.0 {
        0.0
    } else {
        c.value / c.limit
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationOutcome {
    pub suites: Vec<SuiteOutcome>,
}

impl ValidationOutcome {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteOutcome::passed)
    }
}

impl fmt::Display for ValidationOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.suites {
            let n_fail = s.checks.iter().filter(|c| !c.passed).count();
            let tag = if n_fail == 0 { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {:<14} {} checks, {n_fail} failed", s.name, s.checks.len())?;
            for c in s.checks.iter().filter(|c| !c.passed) {
                writeln!(f, "     FAIL {} (value {:e}, limit {:e})", c.label, c.value, c.limit)?;
            }
            if n_fail == 0 {
                if let Some(w) = s.worst() {
                    writeln!(f, "     worst {} (value {:e}, limit {:e})", w.label, w.value, w.limit)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    pub quick: bool,
    pub seed: u64,
    /// Bessel routine handed to the closed forms under test; the oracle
    /// never uses it.
    pub bessel: BesselFn,
    pub hamiltonian: HamiltonianOptions,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            quick: false,
            seed: 0,
            bessel: i0e,
            hamiltonian: HamiltonianOptions::default(),
        }
    }
}

/// One randomized point of the oracle grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSample {
    pub params: DeviceParams,
    pub impurity: Impurity,
    pub a_over_ab: f64,
}

/// Samples a/a_B ∈ [0.5, 3], ε ∈ [0, 1], ξ ∈ [0, 1.5] meV and
/// |R_c| ∈ [1.5a, 20a] at a uniform angle; a_B is held at its base value.
pub fn oracle_samples(base: &DeviceParams, n: usize, seed: u64) -> Result<Vec<OracleSample>> {
    let ab = derive_constants(base)?.fock_darwin_radius_nm;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let a_over_ab = rng.random_range(0.5..=3.0);
            let mut params = base
                .with_epsilon(rng.random_range(0.0..=1.0))
                .with_xi(rng.random_range(0.0..=1.5));
            params.a_nm = a_over_ab * ab;
            let r = rng.random_range(1.5..=20.0) * params.a_nm;
            let theta = rng.random_range(0.0..2.0 * PI);
            let impurity = Impurity::new(r * theta.cos(), r * theta.sin(), -1.0);
            OracleSample {
                params,
                impurity,
                a_over_ab,
            }
        })
        .collect())
}

const COULOMB_CLASSES: [[usize; 4]; 7] = [
    [0, 0, 0, 0],
    [1, 1, 1, 1],
    [0, 1, 0, 1],
    [0, 1, 1, 0],
    [0, 0, 1, 1],
    [0, 0, 0, 1],
    [1, 1, 1, 0],
];

fn oracle_checks(sample: &OracleSample, index: usize, bessel: BesselFn) -> Vec<CheckOutcome> {
    let p = &sample.params;
    let mut out = Vec::new();
    let tag = |what: &str| format!("set {index} (a/aB={:.3}) {what}", sample.a_over_ab);
    let setup = (|| -> Result<_> {
        let basis = OrbitalBasis::new(p)?;
        let d = derive_constants(p)?;
        let pot = ConfinementPotential::new(p)?;
        Ok((basis, d, pot))
    })();
    let (basis, d, pot) = match setup {
        Ok(x) => x,
        Err(e) => return vec![CheckOutcome::error(tag("setup"), e)],
    };
    let cs = d.coulomb_scale_mev_nm;
    let mut push = |label: String, pair: Result<(f64, f64)>| match pair {
        Ok((closed, oracle)) => out.push(CheckOutcome::at_most(
            label,
            (closed - oracle).abs() / oracle.abs(),
            ORACLE_RTOL,
        )),
        Err(e) => out.push(CheckOutcome::error(label, e)),
    };
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        push(
            tag(&format!("T{i}{j}")),
            (|| {
                Ok((
                    kinetic_element(i, j, &basis, p.hbar_omega0_mev)?,
                    oracle_kinetic(i, j, &basis, d.kinetic_scale_mev_nm2, ORACLE_QUAD_TOL)?.value,
                ))
            })(),
        );
        push(
            tag(&format!("V{i}{j}")),
            (|| {
                Ok((
                    potential_element(i, j, &pot, &basis)?,
                    oracle_potential(i, j, &pot, &basis, ORACLE_QUAD_TOL)?.value,
                ))
            })(),
        );
        push(
            tag(&format!("W{i}{j}")),
            (|| {
                Ok((
                    impurity_element_with_bessel(i, j, &sample.impurity, &basis, cs, bessel)?,
                    oracle_impurity(i, j, &sample.impurity, &basis, cs, ORACLE_QUAD_TOL)?.value,
                ))
            })(),
        );
    }
    for [i, j, k, l] in COULOMB_CLASSES {
        push(
            tag(&format!("C{i}{j}{k}{l}")),
            (|| {
                Ok((
                    coulomb_element_with_bessel(i, j, k, l, &basis, cs, bessel)?,
                    oracle_coulomb(i, j, k, l, &basis, cs, ORACLE_QUAD_TOL)?.value,
                ))
            })(),
        );
    }
    out
}

/// Every closed-form element against the oracle on `n` random sets.
pub fn oracle_suite(base: &DeviceParams, n: usize, seed: u64, bessel: BesselFn) -> SuiteOutcome {
    let checks = match oracle_samples(base, n, seed) {
        Ok(samples) => samples
            .par_iter()
            .enumerate()
            .map(|(k, s)| oracle_checks(s, k, bessel))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect(),
        Err(e) => vec![CheckOutcome::error("sampling", e)],
    };
    SuiteOutcome {
        name: "oracle",
        checks,
    }
}

pub const POTENTIAL_RTOL: f64 = 1e-12;

/// Construction constraints on `n` random (ε, ξ) points plus the
/// barrier-existence gate.
pub fn potential_suite(base: &DeviceParams, n: usize, seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut checks = Vec::new();
    for k in 0..n {
        let p = base
            .with_epsilon(rng.random_range(-1.0..=1.0))
            .with_xi(rng.random_range(0.0..=1.5));
        match potential_constraint_report(&p) {
            Ok(r) => checks.push(CheckOutcome::at_most(
                format!("set {k} (eps={:.3}, xi={:.3}) constraints", p.epsilon_mev, p.xi_mev),
                r.max_relative(),
                POTENTIAL_RTOL,
            )),
            Err(e) => checks.push(CheckOutcome::error(format!("set {k}"), e)),
        }
    }
    let level = validate_params(&base.with_epsilon(0.0).with_xi(0.0));
    checks.push(CheckOutcome {
        label: "barrier exists for level wells".into(),
        passed: level.passed(),
        value: 0.0,
        limit: 0.0,
    });
    // A strong tilt with no Gaussian barrier must be rejected.
    let tilted = validate_params(&base.with_epsilon(2.0).with_xi(0.0));
    checks.push(CheckOutcome {
        label: "barrier-existence gate rejects eps=2, xi=0".into(),
        passed: !tilted.passed(),
        value: 0.0,
        limit: 0.0,
    });
    SuiteOutcome {
        name: "potential",
        checks,
    }
}

/// M·O·M = I in closed form and ⟨ψ_i|ψ_j⟩ = δ_ij by quadrature.
pub fn orthonormality_suite(base: &DeviceParams) -> SuiteOutcome {
    let mut checks = Vec::new();
    let ab = derive_constants(base).map(|d| d.fock_darwin_radius_nm);
    for ratio in [0.5, 1.0, 2.0, 3.0] {
        let basis = match ab.clone().and_then(|ab| OrbitalBasis::from_geometry(ratio * ab, ab)) {
            Ok(b) => b,
            Err(e) => {
                checks.push(CheckOutcome::error(format!("a/aB={ratio}"), e));
                continue;
            }
        };
        let ident = congruence(&basis.m, &overlap_matrix(&basis));
        let dev = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (ident[i][j] - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        checks.push(CheckOutcome::at_most(format!("a/aB={ratio} M O M = I"), dev, 1e-12));
        let quad = (|| -> Result<[[f64; 2]; 2]> {
            let mut o = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    o[i][j] = oracle_overlap(i, j, &basis, 1e-12)?.value;
                }
            }
            Ok(o)
        })();
        match quad {
            Ok(o) => {
                let psi = congruence(&basis.m, &o);
                let dev = (psi[0][0] - 1.0)
                    .abs()
                    .max((psi[1][1] - 1.0).abs())
                    .max(psi[0][1].abs());
                checks.push(CheckOutcome::at_most(
                    format!("a/aB={ratio} <psi_i|psi_j> by quadrature"),
                    dev,
                    1e-8,
                ));
            }
            Err(e) => checks.push(CheckOutcome::error(format!("a/aB={ratio} quadrature"), e)),
        }
    }
    SuiteOutcome {
        name: "orthonormal",
        checks,
    }
}

const T0: [f64; 4] = [0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0];

/// T₀ eigenvector, eigen-residuals and J(ε) = J(−ε) on random points.
pub fn spectral_suite(
    base: &DeviceParams,
    n: usize,
    seed: u64,
    options: &HamiltonianOptions,
) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xe16e);
    let points: Vec<(f64, f64, f64, f64)> = (0..n)
        .map(|_| {
            (
                rng.random_range(0.0..=1.0),
                rng.random_range(0.0..=1.5),
                rng.random_range(1.5..=20.0),
                rng.random_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let checks = points
        .par_iter()
        .enumerate()
        .map(|(k, &(eps, xi, r, theta))| {
            let p = base.with_epsilon(eps).with_xi(xi);
            let label = |what: &str| format!("set {k} (eps={eps:.3}, xi={xi:.3}) {what}");
            let imp = Impurity::new(
                r * p.a_nm * theta.cos(),
                r * p.a_nm * theta.sin(),
                -1.0,
            );
            let run = || -> Result<Vec<CheckOutcome>> {
                let dirty = exchange_j(&p, Some(&imp), options)?;
                let norm = frobenius(&dirty.matrix);
                let hv = eigen::mat_vec(&dirty.matrix, &T0);
                let lambda = dirty.matrix[1][1] - dirty.matrix[1][2];
                let t0_dev = (0..4)
                    .map(|i| (hv[i] - lambda * T0[i]).abs())
                    .fold(0.0, f64::max)
                    / norm;
                let plus = exchange_j(&p, None, options)?.j_mev;
                let minus = exchange_j(&p.with_epsilon(-eps), None, options)?.j_mev;
                Ok(vec![
                    CheckOutcome::at_most(label("T0 eigenvector"), t0_dev, 1e-10),
                    CheckOutcome::at_most(
                        label("eigen-residual / |H|"),
                        dirty.max_residual() / norm,
                        1e-12,
                    ),
                    CheckOutcome::at_most(
                        label("J(eps) = J(-eps)"),
                        (plus - minus).abs() / plus,
                        1e-10,
                    ),
                ])
            };
            run().unwrap_or_else(|e| vec![CheckOutcome::error(label("pipeline"), e)])
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    SuiteOutcome {
        name: "spectral",
        checks,
    }
}

/// |dJ/dε| at ε = 0 against 10⁻⁶·J per meV.
pub fn sweet_spot_suite(
    base: &DeviceParams,
    xis: &[f64],
    options: &HamiltonianOptions,
) -> SuiteOutcome {
    let checks = xis
        .iter()
        .map(|&xi| match sweet_spot_check(base, xi, options) {
            Ok(s) => CheckOutcome::at_most(
                format!("xi={xi} |dJ/deps|/J"),
                s.derivative_ghz_per_mev.abs() / s.j_ghz,
                1e-6,
            ),
            Err(e) => CheckOutcome::error(format!("xi={xi}"), e),
        })
        .collect();
    SuiteOutcome {
        name: "sweet-spot",
        checks,
    }
}

/// Geometric grid of `n` + 1 targets from J₀ to `j_max`.
pub fn matched_targets(j0: f64, j_max: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=n)
        .map(|k| j0 * (j_max / j0).powf(k as f64 / n as f64))
        .collect();
    v[0] = j0;
    v[n] = j_max;
    v
}

/// Evaluated trends of the matched-J comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendReport {
    pub points: Vec<ImprovementPoint>,
    pub chi_at_start: f64,
    /// Smallest χ(J_{k+1}) − χ(J_k).
    pub chi_min_step: f64,
    /// Smallest |δJ/J|_tilt step (positive when strictly increasing).
    pub tilt_min_step: f64,
    /// Largest |δJ/J|_barrier step (negative when strictly decreasing).
    pub barrier_max_step: f64,
    pub chi_max: f64,
}

pub fn trend_report(
    base: &DeviceParams,
    impurity: &Impurity,
    xi_fixed_mev: f64,
    j_max_ghz: f64,
    n: usize,
    options: &HamiltonianOptions,
) -> Result<TrendReport> {
    let j0 = starting_exchange_ghz(base, xi_fixed_mev, options)?;
    let targets = matched_targets(j0, j_max_ghz, n);
    let points = chi_curve(base, &targets, impurity, xi_fixed_mev, options)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let steps = |f: &dyn Fn(&ImprovementPoint) -> f64| -> Vec<f64> {
        points.windows(2).map(|w| f(&w[1]) - f(&w[0])).collect()
    };
    let min = |v: Vec<f64>| v.into_iter().fold(f64::INFINITY, f64::min);
    let max = |v: Vec<f64>| v.into_iter().fold(f64::NEG_INFINITY, f64::max);
    Ok(TrendReport {
        chi_at_start: points[0].chi,
        chi_min_step: min(steps(&|p| p.chi)),
        tilt_min_step: min(steps(&|p| p.tilt.rel_noise.abs())),
        barrier_max_step: max(steps(&|p| p.barrier.rel_noise.abs())),
        chi_max: points.iter().map(|p| p.chi).fold(0.0, f64::max),
        points,
    })
}

/// Matched-J trends for the reference impurity (−6a, 6a), q = −1, from J₀
/// to 1 GHz.
pub fn trend_suite(base: &DeviceParams, n: usize, options: &HamiltonianOptions) -> SuiteOutcome {
    let imp = Impurity::at_half_separations(base, -6.0, 6.0);
    let checks = match trend_report(base, &imp, base.xi_mev, 1.0, n, options) {
        Ok(r) => trend_checks(&r),
        Err(e) => vec![CheckOutcome::error("matched-J curve", e)],
    };
    SuiteOutcome {
        name: "trends",
        checks,
    }
}

pub fn trend_checks(r: &TrendReport) -> Vec<CheckOutcome> {
    vec![
        CheckOutcome::at_most("chi(J0) = 1", (r.chi_at_start - 1.0).abs(), 1e-6),
        CheckOutcome::at_most("chi nondecreasing (-min step)", -r.chi_min_step, 0.0),
        CheckOutcome {
            label: "tilt |dJ/J| strictly increasing (min step)".into(),
            passed: r.tilt_min_step > 0.0,
            value: r.tilt_min_step,
            limit: 0.0,
        },
        CheckOutcome {
            label: "barrier |dJ/J| strictly decreasing (max step)".into(),
            passed: r.barrier_max_step < 0.0,
            value: r.barrier_max_step,
            limit: 0.0,
        },
        CheckOutcome {
            label: "chi reaches 10".into(),
            passed: r.chi_max >= 10.0,
            value: r.chi_max,
            limit: 10.0,
        },
    ]
}

/// All suites. Quick mode subsamples every randomized suite.
pub fn run_validation(base: &DeviceParams, options: &ValidationOptions) -> ValidationOutcome {
    let (oracle_sets, random_sets, trend_points) = if options.quick {
        (6, 5, 8)
    } else {
        (50, 20, 30)
    };
    let h = &options.hamiltonian;
    ValidationOutcome {
        suites: vec![
            oracle_suite(base, oracle_sets, options.seed, options.bessel),
            potential_suite(base, random_sets, options.seed),
            orthonormality_suite(base),
            spectral_suite(base, random_sets, options.seed, h),
            sweet_spot_suite(base, &[0.6, 1.0, 1.3], h),
            trend_suite(base, trend_points, h),
        ],
    }
}
