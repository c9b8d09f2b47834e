//! Spectral-action interaction potential between the two constant diagonal
//! metrics of a doubled geometry on flat space.
//!
//! The central quantity is the potential `V̂(g1, g2)`, an integral over the unit
//! three-sphere of the symbol-trace term of the doubled Dirac operator. It is
//! available by tensor-product quadrature ([`quadrature`]) for any pair of
//! diagonal metrics, in closed form for Hopf-shaped pairs ([`hopf`]), and as a
//! near-diagonal series with exact combinatorial coefficients ([`matchings`]).
//! [`hypothesis`] tests the invariances a bimetric closed form must have.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod hopf;
pub mod hypothesis;
pub mod matchings;
pub mod quadrature;
pub mod summation;

pub use error::{Error, Result};
pub use geometry::{DiagonalMetric, DoubledGeometry, EffectiveParams, Kappa, UnitVector4};
pub use hopf::{potential_closed, potential_via_conjecture, script_v, HopfMetric};
pub use hypothesis::{run_hypothesis_suite, HypothesisReport, PairFamily};
pub use matchings::{compare_series, PerturbedForm, SeriesComparison};
pub use quadrature::{action_density, kinetic_term, potential_numeric, SphereRule, DEFAULT_LEVEL};
