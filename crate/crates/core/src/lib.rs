//! Port-Hamiltonian model of two systems of conservation laws coupled at a
//! (moving) interface.
//!
//! The crate discretizes the coupled operator with summation-by-parts
//! differences on two panels that share a duplicated interface node,
//! computes boundary and interface port variables, certifies the
//! quasi-contractivity constant ω of the frozen-interface generators, checks
//! Kato-type resolvent bounds, simulates the moving-interface dynamics with
//! an energy audit, and reproduces the quadratic-form blow-up that occurs
//! when the coefficient ratio condition fails.
//!
//! All numerics are generic over [`Real`]; `*64` aliases fix `f64`.

// `!(x > 0)` guards are deliberate: they reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod counterexample;
pub mod discretization;
pub mod error;
pub mod linalg;
pub mod model;
pub mod ports;
pub mod quadrature;
pub mod scalar;
pub mod simulate;
pub mod stability;

pub use error::{Error, Result};
pub use scalar::Real;

pub type MaterialPair64 = model::MaterialPair<f64>;
pub type CoefficientProfile64 = model::CoefficientProfile<f64>;
pub type DomainSpec64 = model::DomainSpec<f64>;
pub type InterfacePath64 = model::InterfacePath<f64>;
pub type PanelGrid64 = discretization::PanelGrid<f64>;
pub type StateVector64 = discretization::StateVector<f64>;
pub type BoundarySpec64 = ports::BoundarySpec<f64>;
pub type StabilityCertificate64 = stability::StabilityCertificate<f64>;
pub type SimulationConfig64 = simulate::SimulationConfig<f64>;
pub type TimeSeries64 = simulate::TimeSeries<f64>;
pub type CounterexampleSpec64 = counterexample::CounterexampleSpec<f64>;
