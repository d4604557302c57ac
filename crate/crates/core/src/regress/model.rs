use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Hyperplane, RegressError};
use crate::chemgraph::ChemicalGraph;
use crate::features::{featurize, DescriptorRegistry, FeatureVector, Standardizer};
use crate::twolayer::TwoLayerError;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model registry hash {stored} does not match its registry ({actual})")]
    HashMismatch { stored: String, actual: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Regress(#[from] RegressError),
    #[error(transparent)]
    TwoLayer(#[from] TwoLayerError),
}

/// A fitted predictor together with everything needed to apply it to a
/// new graph: registry, scaling and hyperplane (in standardized units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub registry_hash: String,
    pub registry: DescriptorRegistry,
    pub standardizer: Standardizer<f64>,
    pub hyperplane: Hyperplane<f64>,
    pub lambda: f64,
}

impl TrainedModel {
    pub fn new(
        registry: DescriptorRegistry,
        standardizer: Standardizer<f64>,
        hyperplane: Hyperplane<f64>,
        lambda: f64,
    ) -> Self {
        TrainedModel { registry_hash: registry.hash(), registry, standardizer, hyperplane, lambda }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ModelError> {
        let m: TrainedModel = serde_json::from_str(s)?;
        let actual = m.registry.hash();
        if actual != m.registry_hash {
            return Err(ModelError::HashMismatch { stored: m.registry_hash, actual });
        }
        Ok(m)
    }

    /// Prediction in original units from a raw feature vector.
    pub fn predict_raw(&self, x: &[f64]) -> Result<f64, RegressError> {
        let s = self.hyperplane.predict(&self.standardizer.forward(x))?;
        Ok(self.standardizer.inverse_value(s))
    }

    /// Feature vector of `g` and its prediction in original units.
    pub fn predict_graph(&self, g: &ChemicalGraph, covariates: &[f64]) -> Result<(FeatureVector<f64>, f64), ModelError> {
        let f = featurize::<f64>(g, &self.registry, covariates)?;
        let y = self.predict_raw(&f.values)?;
        Ok((f, y))
    }
}
