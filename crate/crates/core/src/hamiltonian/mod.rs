//! Two-electron Hamiltonian in the orthonormal ψ basis, its Hubbard
//! parameters, and the exchange splitting J.
//!
//! Basis order is {|0,↑↓⟩, |↓↑⟩, |↑↓⟩, |↑↓,0⟩}, where the first slot is dot 1
//! (centre −a) and |↓↑⟩ puts the ↓ electron in dot 1.

pub mod eigen;
pub mod fock;

use std::fmt;

use crate::error::Result;
use crate::integrals::{i0e, BesselFn, IntegralTables, Tensor4};
use crate::model::{mev_to_ghz, DeviceParams, Impurity};
use crate::orbitals::{congruence, Mat2, OrbitalBasis};

pub use eigen::{frobenius, jacobi_eigen, max_residual, EigenPairs, Mat4};
pub use fock::second_quantized_matrix;

/// How the on-site energies μ_i of the Hubbard model are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OnsiteConvention {
    /// μ_i are the well-bottom depths of the confinement potential, so that
    /// μ₂ − μ₁ = ε exactly.
    #[default]
    WellBottom,
    /// μ_i = ħω₀ − ⟨ψ_i|h|ψ_i⟩, read off the transformed one-body matrix.
    MatrixElement,
}

/// Which terms of the two-electron problem enter the 4×4 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssemblyMode {
    /// Hopping, on-site and inter-site repulsion and the impurity shifts only;
    /// the |↓↑⟩–|↑↓⟩ element and the corner elements are zero.
    #[default]
    PaperLiteral,
    /// Every one- and two-body term among the four states.
    FullSlaterCondon,
}

impl AssemblyMode {
    pub fn name(&self) -> &'static str {
        match self {
            AssemblyMode::PaperLiteral => "paper",
            AssemblyMode::FullSlaterCondon => "full",
        }
    }
}

impl fmt::Display for AssemblyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HamiltonianOptions {
    pub mode: AssemblyMode,
    pub onsite: OnsiteConvention,
    /// Scaled Bessel routine used by the Coulomb kernels.
    pub bessel: BesselFn,
}

impl Default for HamiltonianOptions {
    fn default() -> Self {
        HamiltonianOptions {
            mode: AssemblyMode::default(),
            onsite: OnsiteConvention::default(),
            bessel: i0e,
        }
    }
}

impl HamiltonianOptions {
    pub fn with_mode(mut self, mode: AssemblyMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_onsite(mut self, onsite: OnsiteConvention) -> Self {
        self.onsite = onsite;
        self
    }
}

/// Parameters of the two-site Hubbard model, all in meV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HubbardParams {
    /// Hopping; the matrix carries −t.
    pub t: f64,
    pub u1: f64,
    pub u2: f64,
    /// Direct inter-site repulsion Ṽ₁₂₁₂.
    pub u12: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// W̃₁₁, W̃₂₂, W̃₁₂.
    pub z1: f64,
    pub z2: f64,
    pub z12: f64,
    /// Exchange integral Ṽ₁₂₂₁.
    pub exchange: f64,
    /// Pair hopping Ṽ₁₁₂₂.
    pub pair_hopping: f64,
    /// Correlated hopping Ṽ₁₁₁₂ and Ṽ₂₂₂₁.
    pub correlated_hopping: [f64; 2],
    /// Transformed Coulomb tensor, pairing as in [`IntegralTables::coulomb`].
    pub tensor: Tensor4,
}

impl HubbardParams {
    /// U₁ − U₁₂.
    pub fn delta_u(&self) -> f64 {
        self.u1 - self.u12
    }

    /// Effective detuning μ₂ − μ₁.
    pub fn detuning(&self) -> f64 {
        self.mu2 - self.mu1
    }

    /// Clean one-body matrix with diagonal −μ_i and off-diagonal −t.
    pub fn one_body(&self) -> Mat2 {
        [[-self.mu1, -self.t], [-self.t, -self.mu2]]
    }

    /// Impurity matrix W̃.
    pub fn impurity(&self) -> Mat2 {
        [[self.z1, self.z12], [self.z12, self.z2]]
    }

    /// Weak-coupling exchange 2t²/(ΔU+ε) + 2t²/(ΔU−ε), clean device.
    pub fn weak_coupling_exchange(&self) -> f64 {
        let du = self.delta_u();
        let e = self.detuning();
        2.0 * self.t * self.t * (1.0 / (du + e) + 1.0 / (du - e))
    }
}

fn transform_tensor(m: &Mat2, v: &Tensor4) -> Tensor4 {
    let mut cur = *v;
    for axis in 0..4 {
        let mut next = [[[[0.0; 2]; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let idx = [i, j, k, l];
                        let mut acc = 0.0;
                        for p in 0..2 {
                            let mut src = idx;
                            src[axis] = p;
                            acc += m[idx[axis]][p] * cur[src[0]][src[1]][src[2]][src[3]];
                        }
                        next[i][j][k][l] = acc;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

/// Transforms the φ-basis tables with M and identifies the Hubbard parameters.
pub fn hubbard_parameters(
    params: &DeviceParams,
    tables: &IntegralTables,
    basis: &OrbitalBasis,
    onsite: OnsiteConvention,
) -> HubbardParams {
    let m = &basis.m;
    let h = congruence(m, &tables.one_body());
    let w = congruence(m, &tables.impurity);
    let v = transform_tensor(m, &tables.coulomb);
    let (mu1, mu2) = match onsite {
        OnsiteConvention::WellBottom => params.well_depths(),
        OnsiteConvention::MatrixElement => {
            let hw = params.hbar_omega0_mev;
            (hw - h[0][0], hw - h[1][1])
        }
    };
    HubbardParams {
        t: -h[0][1],
        u1: v[0][0][0][0],
        u2: v[1][1][1][1],
        u12: v[0][1][0][1],
        mu1,
        mu2,
        z1: w[0][0],
        z2: w[1][1],
        z12: w[0][1],
        exchange: v[0][1][1][0],
        pair_hopping: v[0][0][1][1],
        correlated_hopping: [v[0][0][0][1], v[1][1][1][0]],
        tensor: v,
    }
}

/// The 4×4 Hamiltonian.
pub fn assemble_matrix(hp: &HubbardParams, mode: AssemblyMode) -> Mat4 {
    match mode {
        AssemblyMode::PaperLiteral => {
            let hop = -hp.t + hp.z12;
            let mid = hp.u12 - hp.mu1 - hp.mu2 + hp.z1 + hp.z2;
            [
                [hp.u2 - 2.0 * hp.mu2 + 2.0 * hp.z2, hop, hop, 0.0],
                [hop, mid, 0.0, hop],
                [hop, 0.0, mid, hop],
                [0.0, hop, hop, hp.u1 - 2.0 * hp.mu1 + 2.0 * hp.z1],
            ]
        }
        AssemblyMode::FullSlaterCondon => {
            let clean = hp.one_body();
            let w = hp.impurity();
            let mut h = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    h[i][j] = clean[i][j] + w[i][j];
                }
            }
            second_quantized_matrix(&h, &hp.tensor)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumResult {
    /// Ascending, meV.
    pub eigenvalues: [f64; 4],
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: [[f64; 4]; 4],
    /// E₁ − E₀.
    pub j_mev: f64,
    pub j_ghz: f64,
    pub matrix: Mat4,
}

impl SpectrumResult {
    pub fn max_residual(&self) -> f64 {
        max_residual(
            &self.matrix,
            &EigenPairs {
                values: self.eigenvalues,
                vectors: self.eigenvectors,
            },
        )
    }
}

/// E₁ − E₀ without cancellation between the two large eigenvalues, for
/// matrices in which (0, 1, −1, 0)/√2 decouples exactly.
///
/// In the basis {S(0,2), S(1,1), S(2,0), T₀} the matrix minus λ_T·I is
/// block diagonal with the T₀ entry exactly zero, and its small eigenvalues
/// are resolved to full relative precision.
fn splitting_from_blocks(h: &Mat4) -> Option<f64> {
    let decoupled = h[0][1] == h[0][2] && h[3][1] == h[3][2] && h[1][1] == h[2][2];
    if !decoupled {
        return None;
    }
    let lambda = h[1][1] - h[1][2];
    let r2 = std::f64::consts::SQRT_2;
    let shifted = [
        [h[0][0] - lambda, r2 * h[0][1], h[0][3], 0.0],
        [r2 * h[0][1], 2.0 * h[1][2], r2 * h[3][1], 0.0],
        [h[0][3], r2 * h[3][1], h[3][3] - lambda, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ];
    let v = jacobi_eigen(&shifted).values;
    Some(v[1] - v[0])
}

pub fn eigensolve(h: &Mat4) -> SpectrumResult {
    let pairs = jacobi_eigen(h);
    let j_mev = splitting_from_blocks(h).unwrap_or(pairs.values[1] - pairs.values[0]);
    SpectrumResult {
        eigenvalues: pairs.values,
        eigenvectors: pairs.vectors,
        j_mev,
        j_ghz: mev_to_ghz(j_mev),
        matrix: *h,
    }
}

/// Spectrum from prebuilt tables; lets callers perturb the tables directly.
pub fn spectrum_from_tables(
    params: &DeviceParams,
    tables: &IntegralTables,
    basis: &OrbitalBasis,
    options: &HamiltonianOptions,
) -> (HubbardParams, SpectrumResult) {
    let hp = hubbard_parameters(params, tables, basis, options.onsite);
    let spectrum = eigensolve(&assemble_matrix(&hp, options.mode));
    (hp, spectrum)
}

/// Full pipeline for one device point.
pub fn solve(
    params: &DeviceParams,
    impurity: Option<&Impurity>,
    options: &HamiltonianOptions,
) -> Result<(HubbardParams, SpectrumResult)> {
    let basis = OrbitalBasis::new(params)?;
    let tables = IntegralTables::build_with_bessel(params, &basis, impurity, options.bessel)?;
    Ok(spectrum_from_tables(params, &tables, &basis, options))
}

/// J = E₁ − E₀ for one device point.
pub fn exchange_j(
    params: &DeviceParams,
    impurity: Option<&Impurity>,
    options: &HamiltonianOptions,
) -> Result<SpectrumResult> {
    solve(params, impurity, options).map(|(_, s)| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    const T0: [f64; 4] = [0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0];

    fn opts() -> HamiltonianOptions {
        HamiltonianOptions::default()
    }

    fn full() -> HamiltonianOptions {
        opts().with_mode(AssemblyMode::FullSlaterCondon)
    }

    #[test]
    fn clean_symmetric_device() {
        let p = DeviceParams::default();
        let (hp, _) = solve(&p, None, &opts()).unwrap();
        assert_eq!(hp.u1, hp.u2);
        assert_eq!((hp.z1, hp.z2, hp.z12), (0.0, 0.0, 0.0));
        assert!(hp.delta_u() > 0.0);
        assert!(hp.t > 0.0);
    }

    #[test]
    fn impurity_on_y_axis_shifts_both_dots_equally() {
        let p = DeviceParams::default();
        let imp = Impurity::new(0.0, 700.0, -1.0);
        let (hp, _) = solve(&p, Some(&imp), &opts()).unwrap();
        assert!((hp.z1 - hp.z2).abs() <= 1e-12 * hp.z1.abs());
    }

    #[test]
    fn exchange_at_defaults() {
        // Frozen from the Python prototype.
        let s = exchange_j(&DeviceParams::default(), None, &opts()).unwrap();
        assert!((s.j_ghz - 0.0328).abs() < 5e-4, "{}", s.j_ghz);
        assert!(s.j_mev > 0.0);
    }

    #[test]
    fn block_splitting_matches_full_spectrum() {
        let p = DeviceParams::default().with_epsilon(0.4);
        let imp = Impurity::at_half_separations(&p, -6.0, 6.0);
        for o in [opts(), full()] {
            let s = exchange_j(&p, Some(&imp), &o).unwrap();
            let direct = s.eigenvalues[1] - s.eigenvalues[0];
            assert!((s.j_mev - direct).abs() <= 1e-14 * frobenius(&s.matrix));
        }
    }

    #[test]
    fn splitting_keeps_relative_precision_when_hopping_vanishes() {
        let hp = HubbardParams {
            t: 1e-7,
            u1: 1.3,
            u2: 1.3,
            u12: 0.5,
            mu1: 0.0,
            mu2: 0.0,
            z1: 0.0,
            z2: 0.0,
            z12: 0.0,
            exchange: 0.0,
            pair_hopping: 0.0,
            correlated_hopping: [0.0; 2],
            tensor: [[[[0.0; 2]; 2]; 2]; 2],
        };
        let s = eigensolve(&assemble_matrix(&hp, AssemblyMode::PaperLiteral));
        // Exact: (√(ΔU² + 16t²) − ΔU)/2 for the level device.
        let du: f64 = 0.8;
        let exact = 0.5 * ((du * du + 16.0 * 1e-14).sqrt() - du);
        let series = 4.0 * 1e-14 / du - 16.0 * 1e-28 / du.powi(3);
        assert!((s.j_mev - series).abs() <= 1e-12 * series, "{} {}", s.j_mev, exact);
    }

    #[test]
    fn paper_matrix_entries() {
        let hp = HubbardParams {
            t: 0.1,
            u1: 2.0,
            u2: 1.8,
            u12: 0.5,
            mu1: -0.2,
            mu2: 0.3,
            z1: 0.05,
            z2: 0.02,
            z12: 0.01,
            exchange: 0.0,
            pair_hopping: 0.0,
            correlated_hopping: [0.0; 2],
            tensor: [[[[0.0; 2]; 2]; 2]; 2],
        };
        let h = assemble_matrix(&hp, AssemblyMode::PaperLiteral);
        assert_eq!(h[0][0], 1.8 - 0.6 + 0.04);
        assert_eq!(h[3][3], 2.0 + 0.4 + 0.1);
        assert_eq!(h[1][1], 0.5 + 0.2 - 0.3 + 0.07);
        assert_eq!(h[1][2], 0.0);
        assert_eq!(h[0][3], 0.0);
        assert_eq!(h[0][1], -0.1 + 0.01);
        // T₀ eigenvalue is the (2,2) entry minus the (2,3) entry.
        let hv = eigen::mat_vec(&h, &T0);
        for k in 0..4 {
            assert!((hv[k] - (h[1][1] - h[1][2]) * T0[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn fock_restricted_to_hubbard_terms_is_paper_matrix() {
        let p = DeviceParams::default().with_epsilon(0.4);
        let imp = Impurity::at_half_separations(&p, -6.0, 6.0);
        let (hp, _) = solve(&p, Some(&imp), &opts()).unwrap();
        let mut v = [[[[0.0; 2]; 2]; 2]; 2];
        v[0][0][0][0] = hp.u1;
        v[1][1][1][1] = hp.u2;
        v[0][1][0][1] = hp.u12;
        v[1][0][1][0] = hp.u12;
        let mut h = hp.one_body();
        let w = hp.impurity();
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] += w[i][j];
            }
        }
        let fock = second_quantized_matrix(&h, &v);
        let paper = assemble_matrix(&hp, AssemblyMode::PaperLiteral);
        for i in 0..4 {
            for j in 0..4 {
                assert!((fock[i][j] - paper[i][j]).abs() < 1e-15, "({i},{j})");
            }
        }
    }

    #[test]
    fn full_mode_differs_by_exchange_terms() {
        let p = DeviceParams::default();
        let (hp, paper) = solve(&p, None, &opts()).unwrap();
        let (_, full) = solve(&p, None, &full()).unwrap();
        assert!(hp.exchange > 0.0);
        assert!((full.matrix[1][2].abs() - hp.exchange).abs() < 1e-15);
        assert!(full.j_mev != paper.j_mev);
    }

    #[test]
    fn weak_coupling_formula() {
        for eps in [0.0, 0.2] {
            let p = DeviceParams::default().with_epsilon(eps);
            let (hp, s) = solve(&p, None, &opts()).unwrap();
            assert!(hp.t / hp.delta_u() < 0.1);
            let est = hp.weak_coupling_exchange();
            assert!((s.j_mev - est).abs() <= 0.05 * s.j_mev, "{} {}", s.j_mev, est);
        }
    }

    #[test]
    fn gauge_shift_leaves_exchange_unchanged() {
        let p = DeviceParams::default().with_epsilon(0.3);
        let basis = OrbitalBasis::new(&p).unwrap();
        let tables = IntegralTables::build(&p, &basis, None).unwrap();
        let mut shifted = tables;
        let c = 0.75;
        for i in 0..2 {
            for j in 0..2 {
                shifted.potential[i][j] += c * basis.s(i, j);
            }
        }
        for onsite in [OnsiteConvention::WellBottom, OnsiteConvention::MatrixElement] {
            let o = opts().with_onsite(onsite);
            let (_, a) = spectrum_from_tables(&p, &tables, &basis, &o);
            let (hp_b, b) = spectrum_from_tables(&p, &shifted, &basis, &o);
            assert!((a.j_mev - b.j_mev).abs() <= 1e-12, "{onsite:?}");
            if onsite == OnsiteConvention::MatrixElement {
                let (hp_a, _) = spectrum_from_tables(&p, &tables, &basis, &o);
                assert!((hp_b.mu1 - hp_a.mu1 + c).abs() < 1e-12);
                for k in 0..4 {
                    assert!((b.eigenvalues[k] - a.eigenvalues[k] - 2.0 * c).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn matrix_element_convention_is_level_at_zero_detuning() {
        let p = DeviceParams::default();
        let o = opts().with_onsite(OnsiteConvention::MatrixElement);
        let (hp, _) = solve(&p, None, &o).unwrap();
        assert!((hp.mu1 - hp.mu2).abs() < 1e-12);
    }

    #[test]
    fn impurity_response_is_nearly_linear_in_charge() {
        let p = DeviceParams::default().with_epsilon(0.3);
        let j0 = exchange_j(&p, None, &opts()).unwrap().j_mev;
        let d = |q: f64| {
            let imp = Impurity::at_half_separations(&p, -6.0, 6.0).with_charge(q);
            exchange_j(&p, Some(&imp), &opts()).unwrap().j_mev - j0
        };
        let (d1, d2) = (d(-0.01), d(-0.02));
        assert!((d2 - 2.0 * d1).abs() <= 0.1 * d2.abs());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn triplet_is_exact_eigenvector(
            eps in -1.0f64..1.0,
            xi in 0.0f64..1.5,
            x in -15.0f64..15.0,
            y in 2.0f64..15.0,
            full_mode in any::<bool>(),
        ) {
            let p = DeviceParams::default().with_epsilon(eps).with_xi(xi);
            let imp = Impurity::at_half_separations(&p, x, y);
            let o = if full_mode { full() } else { opts() };
            let s = exchange_j(&p, Some(&imp), &o).unwrap();
            let norm = frobenius(&s.matrix);
            prop_assert!(s.max_residual() <= 1e-12 * norm);
            let hv = eigen::mat_vec(&s.matrix, &T0);
            let lambda = s.matrix[1][1] - s.matrix[1][2];
            for k in 0..4 {
                prop_assert!((hv[k] - lambda * T0[k]).abs() <= 1e-10 * norm);
            }
        }

        #[test]
        fn exchange_even_in_detuning(eps in 0.0f64..1.0, xi in 0.5f64..1.3, full_mode in any::<bool>()) {
            let o = if full_mode { full() } else { opts() };
            let p = DeviceParams::default().with_xi(xi);
            let plus = exchange_j(&p.with_epsilon(eps), None, &o).unwrap().j_mev;
            let minus = exchange_j(&p.with_epsilon(-eps), None, &o).unwrap().j_mev;
            prop_assert!((plus - minus).abs() <= 1e-10 * plus);
        }
    }

    #[test]
    fn exchange_monotone_in_controls() {
        let base = DeviceParams::default();
        let mut prev = 0.0;
        for k in 0..=20 {
            let j = exchange_j(&base.with_epsilon(0.05 * k as f64), None, &opts())
                .unwrap()
                .j_mev;
            assert!(j >= prev);
            prev = j;
        }
        let mut prev = f64::INFINITY;
        for k in 0..=16 {
            let j = exchange_j(&base.with_xi(0.5 + 0.05 * k as f64), None, &opts())
                .unwrap()
                .j_mev;
            assert!(j <= prev);
            prev = j;
        }
    }
}
