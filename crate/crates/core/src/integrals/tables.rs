use super::bessel::{i0e, BesselFn};
use super::one_body::{kinetic_element, potential_element};
use super::two_body::{coulomb_tensor, impurity_element_with_bessel};
use crate::error::Result;
use crate::model::{derive_constants, DeviceParams, Impurity};
use crate::orbitals::{Mat2, OrbitalBasis};
use crate::potential::ConfinementPotential;

pub type Tensor4 = [[[[f64; 2]; 2]; 2]; 2];

/// Matrix elements in the nonorthogonal φ basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralTables {
    pub kinetic: Mat2,
    pub potential: Mat2,
    /// Zero when no impurity is present.
    pub impurity: Mat2,
    /// ⟨ij|V|kl⟩ with (i, k) on electron 1 and (j, l) on electron 2.
    pub coulomb: Tensor4,
}

impl IntegralTables {
    pub fn build(
        params: &DeviceParams,
        basis: &OrbitalBasis,
        impurity: Option<&Impurity>,
    ) -> Result<Self> {
        Self::build_with_bessel(params, basis, impurity, i0e)
    }

    pub fn build_with_bessel(
        params: &DeviceParams,
        basis: &OrbitalBasis,
        impurity: Option<&Impurity>,
        bessel: BesselFn,
    ) -> Result<Self> {
        let d = derive_constants(params)?;
        let pot = ConfinementPotential::new(params)?;
        let mut kinetic = [[0.0; 2]; 2];
        let mut potential = [[0.0; 2]; 2];
        let mut w = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in i..2 {
                kinetic[i][j] = kinetic_element(i, j, basis, params.hbar_omega0_mev)?;
                potential[i][j] = potential_element(i, j, &pot, basis)?;
                if let Some(imp) = impurity {
                    w[i][j] = impurity_element_with_bessel(
                        i,
                        j,
                        imp,
                        basis,
                        d.coulomb_scale_mev_nm,
                        bessel,
                    )?;
                }
                kinetic[j][i] = kinetic[i][j];
                potential[j][i] = potential[i][j];
                w[j][i] = w[i][j];
            }
        }
        Ok(IntegralTables {
            kinetic,
            potential,
            impurity: w,
            coulomb: coulomb_tensor(basis, d.coulomb_scale_mev_nm, bessel)?,
        })
    }

    /// T + V.
    pub fn one_body(&self) -> Mat2 {
        let mut h = self.kinetic;
        for (row, vrow) in h.iter_mut().zip(self.potential.iter()) {
            for (x, v) in row.iter_mut().zip(vrow.iter()) {
                *x += v;
            }
        }
        h
    }

    pub fn all_finite(&self) -> bool {
        let flat2 = |m: &Mat2| m.iter().flatten().all(|x| x.is_finite());
        flat2(&self.kinetic)
            && flat2(&self.potential)
            && flat2(&self.impurity)
            && self.coulomb.iter().flatten().flatten().flatten().all(|x| x.is_finite())
    }
}
