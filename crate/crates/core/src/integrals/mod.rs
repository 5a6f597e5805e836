//! Matrix elements in the Fock-Darwin basis and their quadrature oracle.

pub mod bessel;
pub mod one_body;
pub mod oracle;
pub mod tables;
pub mod two_body;

pub use bessel::{i0e, BesselFn};
pub use one_body::{
    kinetic_element, lower_moments, potential_element, potential_terms, product_density,
    upper_moments, PotentialTerms, ProductDensity,
};
pub use oracle::{quadrature_oracle, OracleKind, OracleValue};
pub use tables::{IntegralTables, Tensor4};
pub use two_body::{
    coulomb_element, coulomb_element_with_bessel, coulomb_tensor, impurity_element,
    impurity_element_with_bessel,
};
