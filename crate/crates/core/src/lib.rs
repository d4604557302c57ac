//! Polymer inference with two-layered descriptors, Lasso regression and
//! integer programming.
//!
//! The numeric layers are generic over the scalar type; the aliases below
//! fix the usual `f64` instantiation.

pub mod chemgraph;
pub mod features;
pub mod generate;
pub mod milp;
pub mod regress;
pub mod scalar;
pub mod topospec;
pub mod twolayer;

pub use scalar::Real;

pub type Hyperplane = regress::Hyperplane<f64>;
pub type LassoFit = regress::LassoFit<f64>;
pub type Standardizer = features::Standardizer<f64>;
pub type FeatureVector = features::FeatureVector<f64>;
pub type LpRow = milp::simplex::LpRow<f64>;
pub type LpOutcome = milp::simplex::LpOutcome<f64>;
