//! `polyinv`: featurize polymer corpora, train and cross-validate Lasso
//! predictors, solve the inverse problem and generate polymers from a
//! topological specification.
//!
//! Exit codes: 0 success, 1 error or failed verification, 2 success with
//! eliminated records, 3 infeasible inverse problem.

mod config;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use polyinv::chemgraph::{parse_pmg, ChemError};
use polyinv::features::{
    build_registry, feature_matrix, load_dataset, standardize, Descriptor, DescriptorRegistry, FeatureError, LoadReport,
    RegistryOptions,
};
use polyinv::generate::{generate, verify_roundtrip, write_outputs, GenerateError, GenerateLimits};
use polyinv::milp::{build_inverse_milp, emit_lp, solve_inverse, InverseProblemSpec, MilpError, MilpStatus, SolveLimits};
use polyinv::regress::{
    cross_validate, default_lambda_grid, lasso_fit, select_lambda, CvOptions, CvReport, LassoOptions, ModelError,
    RegressError, TrainedModel,
};
use polyinv::topospec::{build_instance_ib, parse_catalog, placeholder_catalog, Property, TopoError, TopologicalSpec};
use polyinv::twolayer::TwoLayerError;

use config::{ConfigError, Settings};

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Regress(#[from] RegressError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Milp(#[from] MilpError),
    #[error(transparent)]
    Topo(#[from] TopoError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    TwoLayer(#[from] TwoLayerError),
    #[error("{path}: {source}")]
    Graph { path: String, source: ChemError },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "polyinv", version, about = "Polymer property prediction and inverse design")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

/// Shared settings; each can also come from `--config`.
#[derive(Debug, Args, Default)]
pub struct Flags {
    /// File of `key=value` lines (keys are the long flag names).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub rho: Option<u32>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Target interval `LO,HI` in property units.
    #[arg(long, global = true)]
    pub window: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long = "emit-lp", global = true)]
    pub emit_lp: Option<PathBuf>,
    #[arg(long = "limit-candidates", global = true)]
    pub limit_candidates: Option<usize>,
    #[arg(long = "limit-seconds", global = true)]
    pub limit_seconds: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a registry and feature matrix from a corpus.
    Featurize {
        #[command(flatten)]
        data: DataArgs,
        /// Output directory for registry.json, features.csv, eliminated.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a Lasso model; without --lambda the penalty is chosen by CV.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeated k-fold cross-validation, summarized as one CSV row.
    Cv {
        #[command(flatten)]
        data: DataArgs,
        /// CSV path; the full report goes next to it as JSON.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "dataset")]
        name: String,
    },
    /// Solve the inverse problem for a feature vector inside the window.
    Infer {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the inverse model in LP format.
    EmitLp {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a topological specification instance as JSON.
    Instance {
        /// Property tag (AmD, HcL, RfId, Tg, Prm).
        #[arg(long)]
        property: Property,
        #[arg(long = "n-lb")]
        n_lb: u32,
        /// Fringe-tree catalog, one canonical code per line.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Enumerate polymers satisfying a specification.
    Generate {
        #[arg(long)]
        spec: PathBuf,
        /// Without a model every satisfying polymer is emitted.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check PMG files against a specification and model.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Directory of `<id>.pmg` files.
    #[arg(long)]
    graphs: PathBuf,
    /// CSV with header `id,value[,covariate...]`.
    #[arg(long)]
    values: PathBuf,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
    }
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Short column name of a descriptor, e.g. `element_count:C`.
fn descriptor_name(d: &Descriptor) -> String {
    let v = serde_json::to_value(d).expect("descriptor serializes");
    let kind = v["kind"].as_str().unwrap_or_default();
    match &v["key"] {
        serde_json::Value::Null => kind.to_string(),
        serde_json::Value::String(s) => format!("{kind}:{s}"),
        other => format!("{kind}:{other}"),
    }
}

fn load(data: &DataArgs) -> Result<LoadReport, CliError> {
    let rep = load_dataset(&data.graphs, &data.values)?;
    for e in &rep.eliminated {
        eprintln!("eliminated {}: {}", e.id, serde_json::to_string(&e.reason).expect("reason serializes"));
    }
    if rep.dataset.is_empty() {
        return Err(FeatureError::EmptyDataset.into());
    }
    Ok(rep)
}

fn load_model(path: &Path) -> Result<TrainedModel, CliError> {
    Ok(TrainedModel::from_json(&read(path)?)?)
}

fn elimination_code(rep: &LoadReport) -> u8 {
    if rep.eliminated.is_empty() {
        0
    } else {
        2
    }
}

fn cmd_featurize(s: &Settings, data: &DataArgs, out: &Path) -> Result<u8, CliError> {
    let rep = load(data)?;
    let reg = build_registry(&rep.dataset, s.rho, RegistryOptions::default())?;
    let (rows, _) = feature_matrix::<f64>(&rep.dataset, &reg)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string(), "value".to_string()];
    header.extend(reg.descriptors().iter().map(descriptor_name));
    w.write_record(&header).map_err(|e| CliError::Usage(e.to_string()))?;
    for (r, x) in rep.dataset.records.iter().zip(&rows) {
        let mut line = vec![r.id.clone(), r.value.to_string()];
        line.extend(x.iter().map(f64::to_string));
        w.write_record(&line).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    write(&out.join("features.csv"), &String::from_utf8(bytes).expect("csv is utf-8"))?;
    write(&out.join("registry.json"), &reg.to_json())?;
    write(&out.join("eliminated.json"), &serde_json::to_string_pretty(&rep.eliminated).expect("serializes"))?;
    println!("{} records, {} descriptors, {} eliminated", rows.len(), reg.len(), rep.eliminated.len());
    Ok(elimination_code(&rep))
}

struct Prepared {
    report: LoadReport,
    registry: DescriptorRegistry,
    standardizer: polyinv::Standardizer,
    x: Vec<Vec<f64>>,
    a: Vec<f64>,
}

fn prepare(s: &Settings, data: &DataArgs) -> Result<Prepared, CliError> {
    let report = load(data)?;
    let registry = build_registry(&report.dataset, s.rho, RegistryOptions::default())?;
    let (rows, values) = feature_matrix::<f64>(&report.dataset, &registry)?;
    let (standardizer, x, a) = standardize(&rows, &values);
    Ok(Prepared { report, registry, standardizer, x, a })
}

fn cv_options(s: &Settings) -> CvOptions {
    CvOptions { runs: s.runs, folds: s.folds, seed: s.seed, ..CvOptions::default() }
}

fn run_cv(s: &Settings, p: &Prepared) -> Result<CvReport, CliError> {
    let opts = cv_options(s);
    Ok(match s.lambda {
        Some(lam) => cross_validate(&p.x, &p.a, lam, &opts)?,
        None => select_lambda(&p.x, &p.a, &default_lambda_grid(), &opts)?.best,
    })
}

fn cmd_train(s: &Settings, data: &DataArgs, out: &Path) -> Result<u8, CliError> {
    let p = prepare(s, data)?;
    let lambda = match s.lambda {
        Some(l) => l,
        None => run_cv(s, &p)?.lambda,
    };
    let fit = lasso_fit(&p.x, &p.a, lambda, &LassoOptions::default())?;
    let nonzero = fit.hyperplane.nonzero_count();
    let model = TrainedModel::new(p.registry, p.standardizer, fit.hyperplane, lambda);
    write(out, &model.to_json())?;
    println!("lambda {lambda}, {nonzero} of {} weights nonzero", model.registry.len());
    Ok(elimination_code(&p.report))
}

fn cmd_cv(s: &Settings, data: &DataArgs, out: &Path, name: &str) -> Result<u8, CliError> {
    let p = prepare(s, data)?;
    let rep = run_cv(s, &p)?;
    let d = &p.report.dataset;
    let sizes: Vec<usize> = d.records.iter().map(|r| r.graph.non_h_count()).collect();
    let values = d.values();
    let fam = p.registry.family_sizes();
    let fam = |k: &str| fam.get(k).copied().unwrap_or(0);
    let fmin = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let fmax = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut text = String::from("dataset,D,n_min,n_max,a_min,a_max,gamma,F,K,lambda,K_prime,test_R2\n");
    text.push_str(&format!(
        "{name},{},{},{},{},{},{},{},{},{},{},{}\n",
        d.len(),
        sizes.iter().min().expect("nonempty"),
        sizes.iter().max().expect("nonempty"),
        fmin(&values),
        fmax(&values),
        fam("interior_edge_config"),
        fam("fringe_tree"),
        p.registry.len(),
        rep.lambda,
        rep.k_prime,
        rep.median_r2,
    ));
    write(out, &text)?;
    write(&out.with_extension("json"), &serde_json::to_string_pretty(&rep).expect("report serializes"))?;
    print!("{text}");
    Ok(elimination_code(&p.report))
}

fn solve_limits(s: &Settings) -> SolveLimits {
    SolveLimits {
        max_nodes: s.limit_nodes,
        max_time: s.limit_seconds.map(Duration::from_secs_f64),
        ..SolveLimits::default()
    }
}

fn inverse_spec(s: &Settings, model: &TrainedModel) -> Result<InverseProblemSpec, CliError> {
    let window = s.window.ok_or_else(|| CliError::Usage("--window LO,HI is required".into()))?;
    Ok(InverseProblemSpec::from_model(model, window, s.epsilon))
}

fn cmd_infer(s: &Settings, model: &Path, out: &Path) -> Result<u8, CliError> {
    let model = load_model(model)?;
    let spec = inverse_spec(s, &model)?;
    if let Some(lp) = &s.emit_lp {
        write(lp, &emit_lp(&build_inverse_milp(&spec)?.0))?;
    }
    let sol = solve_inverse(&spec, &solve_limits(s))?;
    let st = &model.standardizer;
    let features: BTreeMap<String, f64> = model
        .registry
        .descriptors()
        .iter()
        .zip(&sol.x)
        .filter(|(_, &v)| v != 0.0)
        .map(|(d, &v)| (descriptor_name(d), v))
        .collect();
    let finite = |v: f64| if v.is_finite() { json!(v) } else { json!(null) };
    let doc = json!({
        "status": sol.status,
        "window": s.window,
        "epsilon": s.epsilon,
        "prediction": finite(st.inverse_value(sol.y_hat)),
        "prediction_of_x": finite(st.inverse_value(sol.y_of_x)),
        "slack_bound": sol.slack_bound,
        "nodes": sol.nodes,
        "features": features,
    });
    write(out, &serde_json::to_string_pretty(&doc).expect("serializes"))?;
    println!("{}", serde_json::to_string(&sol.status).expect("serializes").trim_matches('"'));
    Ok(match sol.status {
        MilpStatus::Feasible => 0,
        MilpStatus::Infeasible => 3,
        MilpStatus::BoundLimit => 1,
    })
}

fn cmd_emit_lp(s: &Settings, model: &Path, out: &Path) -> Result<u8, CliError> {
    let model = load_model(model)?;
    let (m, _) = build_inverse_milp(&inverse_spec(s, &model)?)?;
    write(out, &emit_lp(&m))?;
    Ok(0)
}

fn cmd_instance(pi: Property, n_lb: u32, catalog: Option<&Path>, out: &Path) -> Result<u8, CliError> {
    let catalog = match catalog {
        Some(p) => parse_catalog(&read(p)?)?,
        None => placeholder_catalog(),
    };
    let spec = build_instance_ib(pi, n_lb, &catalog)?;
    for name in spec.empty_bounds() {
        eprintln!("warning: bound {name} is empty");
    }
    write(out, &spec.to_json())?;
    Ok(0)
}

fn cmd_generate(s: &Settings, spec: &Path, model: Option<&Path>, out: &Path) -> Result<u8, CliError> {
    let spec = TopologicalSpec::from_json(&read(spec)?)?;
    if s.rho_given && s.rho != spec.rho {
        return Err(CliError::Usage(format!("--rho {} differs from the spec's rho {}", s.rho, spec.rho)));
    }
    let model = model.map(load_model).transpose()?;
    let window = match (&model, s.window) {
        (Some(_), None) => return Err(CliError::Usage("--window LO,HI is required with --model".into())),
        (_, w) => w.unwrap_or((f64::NEG_INFINITY, f64::INFINITY)),
    };
    let limits = GenerateLimits { max_candidates: s.limit_candidates, max_seconds: s.limit_seconds, max_leaves: None };
    let rep = generate(&spec, model.as_ref(), window, &limits)?;
    write_outputs(out, &rep.candidates)?;
    let summary = json!({ "status": rep.status, "candidates": rep.candidates.len(), "stats": rep.stats });
    write(&out.join("summary.json"), &serde_json::to_string_pretty(&summary).expect("serializes"))?;
    println!("{}", summary);
    Ok(0)
}

fn cmd_verify(s: &Settings, spec: &Path, model: &Path, inputs: &[PathBuf]) -> Result<u8, CliError> {
    let spec = TopologicalSpec::from_json(&read(spec)?)?;
    let model = load_model(model)?;
    let window = s.window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let mut all = true;
    for path in inputs {
        let g = parse_pmg(&read(path)?).map_err(|source| CliError::Graph { path: path.display().to_string(), source })?;
        let rep = verify_roundtrip(&g, &spec, &model, window);
        all &= rep.pass;
        let failed: Vec<String> = rep.checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
        let line = json!({
            "file": path.display().to_string(),
            "pass": rep.pass,
            "prediction": rep.prediction,
            "oov": rep.oov,
            "failed": failed,
        });
        println!("{line}");
    }
    Ok(if all { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let s = Settings::resolve(&cli.flags)?;
    match &cli.command {
        Command::Featurize { data, out } => cmd_featurize(&s, data, out),
        Command::Train { data, out } => cmd_train(&s, data, out),
        Command::Cv { data, out, name } => cmd_cv(&s, data, out, name),
        Command::Infer { model, out } => cmd_infer(&s, model, out),
        Command::EmitLp { model, out } => cmd_emit_lp(&s, model, out),
        Command::Instance { property, n_lb, catalog, out } => cmd_instance(*property, *n_lb, catalog.as_deref(), out),
        Command::Generate { spec, model, out } => cmd_generate(&s, spec, model.as_deref(), out),
        Command::Verify { spec, model, inputs } => cmd_verify(&s, spec, model, inputs),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
