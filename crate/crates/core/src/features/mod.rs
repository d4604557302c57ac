//! Descriptor registry, feature vectors and min-max standardization.
//!
//! A graph's descriptor profile is a sparse map from [`Descriptor`] to value.
//! The registry is the sorted union of profile keys over a training set, so
//! the enum's variant order fixes the kind order of the coordinates.

mod dataset;
mod standardize;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::chemgraph::{rank, ChemicalGraph, Element};
use crate::twolayer::{decompose, AdjacencyConfig, CanonicalCode, DegreeSymbol, EdgeConfig, TwoLayerError};
use crate::Real;

pub use dataset::{eliminate, load_dataset, Dataset, Elimination, EliminationReason, LoadReport, Record};
pub use standardize::{standardize, Standardizer};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("no record has both a value and a graph")]
    EmptyDataset,
    #[error("record {id} has {got} covariates, expected {expected}")]
    Covariates { id: String, got: usize, expected: usize },
    #[error(transparent)]
    TwoLayer(#[from] TwoLayerError),
}

/// One coordinate of the feature function.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "key", rename_all = "snake_case")]
pub enum Descriptor {
    /// Number of non-hydrogen atoms.
    NonHCount,
    Rank,
    InteriorCount,
    /// Mean atomic mass over non-hydrogen atoms.
    MassAverage,
    ElementCount(Element),
    /// Interior vertices with this element and degree in the suppressed graph.
    DegreeSymbol(DegreeSymbol),
    InteriorEdgeConfig(EdgeConfig),
    LinkEdgeConfig(EdgeConfig),
    InteriorAdjacency(AdjacencyConfig),
    LinkAdjacency(AdjacencyConfig),
    LeafEdge(AdjacencyConfig),
    FringeTree(CanonicalCode),
    LinkCount,
    Covariate(String),
}

impl Descriptor {
    /// Whether the descriptor only takes integer values.
    pub fn is_integer(&self) -> bool {
        !matches!(self, Descriptor::MassAverage | Descriptor::Covariate(_))
    }

    pub fn is_nonnegative(&self) -> bool {
        !matches!(self, Descriptor::Covariate(_))
    }
}

/// Which optional families go into a registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryOptions {
    pub adjacency_families: bool,
}

impl Default for RegistryOptions {
    fn default() -> Self {
        RegistryOptions { adjacency_families: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "RegistryRepr")]
pub struct DescriptorRegistry {
    pub rho: u32,
    pub options: RegistryOptions,
    descriptors: Vec<Descriptor>,
    #[serde(skip)]
    index: BTreeMap<Descriptor, usize>,
}

#[derive(Deserialize)]
struct RegistryRepr {
    rho: u32,
    options: RegistryOptions,
    descriptors: Vec<Descriptor>,
}

impl From<RegistryRepr> for DescriptorRegistry {
    fn from(r: RegistryRepr) -> Self {
        DescriptorRegistry::from_descriptors(r.rho, r.options, r.descriptors)
    }
}

/// Descriptor values of a single graph, before any registry is applied.
pub type Profile = BTreeMap<Descriptor, f64>;

/// Structural profile of `g` (no covariates).
pub fn profile(g: &ChemicalGraph, rho: u32, options: RegistryOptions) -> Result<Profile, TwoLayerError> {
    let d = decompose(g, rho)?;
    let hs = d.suppressed();
    let mut p = Profile::new();
    let bump = |p: &mut Profile, k: Descriptor| *p.entry(k).or_insert(0.0) += 1.0;

    p.insert(Descriptor::NonHCount, hs.n() as f64);
    p.insert(Descriptor::Rank, rank(hs.graph()).map(|r| r as f64).unwrap_or(0.0));
    let interior = d.interior_vertices();
    p.insert(Descriptor::InteriorCount, interior.len() as f64);
    // summed per element so the result does not depend on atom order
    let mut per_element: BTreeMap<Element, usize> = BTreeMap::new();
    for &e in hs.elements() {
        *per_element.entry(e).or_default() += 1;
    }
    let mass: f64 = per_element.iter().map(|(e, &c)| e.mass() * c as f64).sum();
    p.insert(Descriptor::MassAverage, mass / hs.n() as f64);
    for &e in g.elements() {
        bump(&mut p, Descriptor::ElementCount(e));
    }
    for &v in &interior {
        bump(&mut p, Descriptor::DegreeSymbol(d.degree_symbol(v)));
    }
    for e in d.interior_edges() {
        let c = d.raw_edge_config(e);
        bump(&mut p, Descriptor::InteriorEdgeConfig(c));
        if options.adjacency_families {
            bump(&mut p, Descriptor::InteriorAdjacency(c.adjacency()));
        }
    }
    let links = d.link_edges();
    for &e in &links {
        let c = d.raw_edge_config(e);
        bump(&mut p, Descriptor::LinkEdgeConfig(c));
        if options.adjacency_families {
            bump(&mut p, Descriptor::LinkAdjacency(c.adjacency()));
        }
    }
    for c in d.leaf_edge_configs() {
        bump(&mut p, Descriptor::LeafEdge(c));
    }
    for f in d.fringe_trees() {
        bump(&mut p, Descriptor::FringeTree(f.code.clone()));
    }
    p.insert(Descriptor::LinkCount, links.len() as f64);
    Ok(p)
}

const SCALARS: [Descriptor; 4] =
    [Descriptor::NonHCount, Descriptor::Rank, Descriptor::InteriorCount, Descriptor::MassAverage];

impl DescriptorRegistry {
    pub fn from_descriptors(rho: u32, options: RegistryOptions, mut descriptors: Vec<Descriptor>) -> Self {
        descriptors.sort();
        descriptors.dedup();
        let index = descriptors.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
        DescriptorRegistry { rho, options, descriptors, index }
    }

    /// Registry over every key observed in `profiles` plus the scalar
    /// descriptors, the link count and the named covariates.
    pub fn from_profiles<'a>(
        rho: u32,
        options: RegistryOptions,
        profiles: impl IntoIterator<Item = &'a Profile>,
        covariates: &[String],
    ) -> Self {
        let mut keys: BTreeSet<Descriptor> = SCALARS.iter().cloned().collect();
        keys.insert(Descriptor::LinkCount);
        for p in profiles {
            keys.extend(p.keys().cloned());
        }
        keys.extend(covariates.iter().map(|c| Descriptor::Covariate(c.clone())));
        Self::from_descriptors(rho, options, keys.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    pub fn descriptors(&self) -> &[Descriptor] {
        &self.descriptors
    }

    pub fn get(&self, j: usize) -> &Descriptor {
        &self.descriptors[j]
    }

    pub fn index_of(&self, d: &Descriptor) -> Option<usize> {
        self.index.get(d).copied()
    }

    pub fn covariate_names(&self) -> Vec<String> {
        self.descriptors
            .iter()
            .filter_map(|d| match d {
                Descriptor::Covariate(s) => Some(s.clone()),
                _ => None,
            })
            .collect()
    }

    /// Count of descriptors in each family, keyed by the serialized kind name.
    pub fn family_sizes(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for d in &self.descriptors {
            let v = serde_json::to_value(d).expect("descriptor serializes");
            let kind = v["kind"].as_str().unwrap_or_default().to_string();
            *out.entry(kind).or_insert(0) += 1;
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("registry serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T> {
    pub values: Vec<T>,
    /// Observed descriptors that the registry does not know, with their counts.
    pub oov: Vec<(Descriptor, f64)>,
}

impl<T> FeatureVector<T> {
    pub fn has_oov(&self) -> bool {
        !self.oov.is_empty()
    }
}

/// Apply a registry to a precomputed profile.
pub fn vectorize<T: Real>(p: &Profile, reg: &DescriptorRegistry, covariates: &[f64]) -> FeatureVector<T> {
    let mut values = vec![T::zero(); reg.len()];
    let mut oov = Vec::new();
    for (k, &v) in p {
        match reg.index_of(k) {
            Some(j) => values[j] = T::lit(v),
            None if v != 0.0 => oov.push((k.clone(), v)),
            None => {}
        }
    }
    for (name, &v) in reg.covariate_names().iter().zip(covariates) {
        if let Some(j) = reg.index_of(&Descriptor::Covariate(name.clone())) {
            values[j] = T::lit(v);
        }
    }
    FeatureVector { values, oov }
}

/// Feature vector of `g` under `reg`; covariates are given in registry order.
pub fn featurize<T: Real>(
    g: &ChemicalGraph,
    reg: &DescriptorRegistry,
    covariates: &[f64],
) -> Result<FeatureVector<T>, TwoLayerError> {
    Ok(vectorize(&profile(g, reg.rho, reg.options)?, reg, covariates))
}

pub fn build_registry(d: &Dataset, rho: u32, options: RegistryOptions) -> Result<DescriptorRegistry, FeatureError> {
    let mut profiles = Vec::with_capacity(d.records.len());
    for r in &d.records {
        profiles.push(profile(&r.graph, rho, options)?);
    }
    Ok(DescriptorRegistry::from_profiles(rho, options, &profiles, &d.covariate_names))
}

/// Feature matrix and targets of a dataset, one row per record.
pub fn feature_matrix<T: Real>(d: &Dataset, reg: &DescriptorRegistry) -> Result<(Vec<Vec<T>>, Vec<T>), FeatureError> {
    use rayon::prelude::*;
    let rows: Result<Vec<Vec<T>>, TwoLayerError> = d
        .records
        .par_iter()
        .map(|r| featurize::<T>(&r.graph, reg, &r.covariates).map(|f| f.values))
        .collect();
    let targets = d.records.iter().map(|r| T::lit(r.value)).collect();
    Ok((rows?, targets))
}
