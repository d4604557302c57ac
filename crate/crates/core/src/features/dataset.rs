use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::chemgraph::{parse_pmg, ChemError, ChemicalGraph};

#[derive(Debug, Clone)]
pub struct Record {
    pub id: String,
    pub graph: ChemicalGraph,
    pub value: f64,
    /// Extra covariates in the order of [`Dataset::covariate_names`].
    pub covariates: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub records: Vec<Record>,
    pub covariate_names: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.value).collect()
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            records: idx.iter().map(|&i| self.records[i].clone()).collect(),
            covariate_names: self.covariate_names.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum EliminationReason {
    MissingGraph,
    Invalid { message: String },
    Disconnected,
    /// An atom with more than four non-hydrogen neighbors.
    TooManyNeighbors { atom: u32, count: usize },
    NoLinkEdges,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub id: String,
    #[serde(flatten)]
    pub reason: EliminationReason,
}

#[derive(Debug, Clone)]
pub struct LoadReport {
    pub dataset: Dataset,
    pub eliminated: Vec<Elimination>,
}

/// Screening rule applied to every candidate record.
pub fn eliminate(g: &ChemicalGraph) -> Option<EliminationReason> {
    for v in 0..g.n() {
        let c = g.non_h_neighbor_count(v);
        if c > 4 {
            return Some(EliminationReason::TooManyNeighbors { atom: g.id(v), count: c });
        }
    }
    if g.link_edges().is_empty() {
        return Some(EliminationReason::NoLinkEdges);
    }
    None
}

/// Load `<id>.pmg` files from `graph_dir` and values from a CSV with
/// columns `id,value[,covariate...]` (header row required).
pub fn load_dataset(graph_dir: &Path, values_csv: &Path) -> Result<LoadReport, FeatureError> {
    let io = |p: &Path, e| FeatureError::Io { path: p.display().to_string(), source: e };
    if !graph_dir.is_dir() {
        return Err(io(graph_dir, std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory")));
    }
    let text = fs::read_to_string(values_csv).map_err(|e| io(values_csv, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| FeatureError::Csv(e.to_string()))?.clone();
    if header.len() < 2 || &header[0] != "id" || &header[1] != "value" {
        return Err(FeatureError::Csv("header must start with `id,value`".into()));
    }
    let covariate_names: Vec<String> = header.iter().skip(2).map(str::to_string).collect();

    let mut rows: BTreeMap<String, (f64, Vec<f64>)> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| FeatureError::Csv(e.to_string()))?;
        let line = i + 2;
        if rec.len() != header.len() {
            return Err(FeatureError::Csv(format!("line {line}: expected {} fields", header.len())));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| FeatureError::Csv(format!("line {line}: bad number {s:?}")))
        };
        let value = num(&rec[1])?;
        let cov = rec.iter().skip(2).map(num).collect::<Result<Vec<_>, _>>()?;
        if rows.insert(rec[0].to_string(), (value, cov)).is_some() {
            return Err(FeatureError::Csv(format!("line {line}: duplicate id {:?}", &rec[0])));
        }
    }

    let mut dataset = Dataset { records: Vec::new(), covariate_names };
    let mut eliminated = Vec::new();
    for (id, (value, covariates)) in rows {
        let path = graph_dir.join(format!("{id}.pmg"));
        let reason = match fs::read_to_string(&path) {
            Err(_) => Some(EliminationReason::MissingGraph),
            Ok(text) => match parse_pmg(&text) {
                Err(ChemError::Disconnected) => Some(EliminationReason::Disconnected),
                Err(e) => Some(EliminationReason::Invalid { message: e.to_string() }),
                Ok(graph) => match eliminate(&graph) {
                    Some(r) => Some(r),
                    None => {
                        dataset.records.push(Record { id: id.clone(), graph, value, covariates });
                        None
                    }
                },
            },
        };
        if let Some(reason) = reason {
            eliminated.push(Elimination { id, reason });
        }
    }
    // no id has both a value and a graph
    if dataset.is_empty() && eliminated.iter().all(|e| e.reason == EliminationReason::MissingGraph) {
        return Err(FeatureError::EmptyDataset);
    }
    Ok(LoadReport { dataset, eliminated })
}
