//! Enumeration of graphs meeting a topological specification whose
//! prediction falls in a target window.
//!
//! A candidate is built in stages: path lengths for the seed edges, paths
//! attached to seed vertices and path interiors, elements, bond
//! multiplicities and finally one catalog fringe tree per interior vertex.
//! The depth-first search visits lengths in ascending order, then bonds,
//! then fringe trees in catalog order, and prunes with these admissible
//! rules:
//!
//! - non-hydrogen atoms placed so far, plus `length.lb - 1` for every seed
//!   path not yet sized, never exceed `n.ub`;
//! - per-element atom counts (hydrogens included) never exceed `na.ub`,
//!   and elements outside a closed `na` family are never placed;
//! - link-path interiors never exceed `n_lnk.ub`; attached-path counts and
//!   lengths per host stay within `bl.ub`/`ch.ub`;
//! - double and triple bonds per seed edge stay within `bd2.ub`/`bd3.ub`;
//! - bond sums never exceed valence, and a vertex whose bonds are complete
//!   must leave a residual valence matched by some catalog tree.
//!
//! Lower bounds of the construction (`length`, `bl`, `ch`, `bd2`, `bd3`,
//! `n_lnk`) are enforced once the corresponding decisions are complete.
//! Every leaf is realized, deduplicated by [`canonical_hash`], checked with
//! [`check_satisfies`] and, when a model is given, filtered by the window.

mod canon;

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::chemgraph::{serialize_pmg, ChemError, ChemicalGraph, Element, GraphSpec};
use crate::regress::{ModelError, TrainedModel};
use crate::topospec::{check_satisfies, EdgeClass, SatisfactionReport, TopoError, TopologicalSpec};
use crate::twolayer::RootedTree;

pub use canon::{canonical_hash, canonical_string};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Spec(#[from] TopoError),
    #[error("spec uses rho {spec}, model uses rho {model}")]
    RhoMismatch { spec: u32, model: u32 },
    #[error("empty window [{0}, {1}]")]
    BadWindow(f64, f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RealizeError {
    #[error("construction does not fit the seed graph")]
    Shape,
    #[error("fringe tree {tree} has root {root}, vertex {vertex} is {element}")]
    Root { vertex: usize, tree: usize, root: Element, element: Element },
    #[error(transparent)]
    Chem(#[from] ChemError),
}

/// Where an attached path may hang.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Host {
    Vertex(usize),
    /// Internal vertex `pos` (1-based) of the path for seed edge `edge`.
    Path { edge: usize, pos: u32 },
}

/// Attachment points for the given path lengths: seed vertices with
/// `ch.ub > 0`, then path interiors of seed edges with `ch.ub > 0`.
pub fn hosts(spec: &TopologicalSpec, lengths: &[u32]) -> Vec<Host> {
    let mut out: Vec<Host> =
        spec.seed.vertices.iter().enumerate().filter(|(_, v)| v.ch.ub > 0).map(|(u, _)| Host::Vertex(u)).collect();
    for (a, e) in spec.seed.edges.iter().enumerate() {
        if e.class == EdgeClass::Path && e.ch.ub > 0 {
            out.extend((1..lengths[a]).map(|pos| Host::Path { edge: a, pos }));
        }
    }
    out
}

/// Interior skeleton: seed vertices first, then path interiors in seed edge
/// order, then attached-path vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    pub n: usize,
    /// Seed vertex for the first vertices, `None` afterwards.
    pub seed_of: Vec<Option<usize>>,
    /// `(u, v, seed edge)`; attached-path edges have no seed edge.
    pub edges: Vec<(usize, usize, Option<usize>)>,
}

pub fn skeleton(spec: &TopologicalSpec, lengths: &[u32], attached: &[u32]) -> Result<Skeleton, RealizeError> {
    let nv = spec.seed.vertices.len();
    if lengths.len() != spec.seed.edges.len() {
        return Err(RealizeError::Shape);
    }
    let mut seed_of: Vec<Option<usize>> = (0..nv).map(Some).collect();
    let mut edges = Vec::new();
    let mut internal: Vec<Vec<usize>> = Vec::new();
    for (a, e) in spec.seed.edges.iter().enumerate() {
        let mut prev = e.u;
        let mut inner = Vec::new();
        for _ in 1..lengths[a] {
            let x = seed_of.len();
            seed_of.push(None);
            edges.push((prev, x, Some(a)));
            inner.push(x);
            prev = x;
        }
        edges.push((prev, e.v, Some(a)));
        internal.push(inner);
    }
    let hs = hosts(spec, lengths);
    if attached.len() != hs.len() {
        return Err(RealizeError::Shape);
    }
    for (h, &k) in hs.iter().zip(attached) {
        let mut prev = match *h {
            Host::Vertex(u) => u,
            Host::Path { edge, pos } => internal[edge][pos as usize - 1],
        };
        for _ in 0..k {
            let x = seed_of.len();
            seed_of.push(None);
            edges.push((prev, x, None));
            prev = x;
        }
    }
    Ok(Skeleton { n: seed_of.len(), seed_of, edges })
}

/// All decisions of one candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Construction {
    pub lengths: Vec<u32>,
    pub attached: Vec<u32>,
    pub elements: Vec<Element>,
    pub mults: Vec<u8>,
    /// Catalog index per skeleton vertex.
    pub fringes: Vec<usize>,
}

fn parsed_catalog(spec: &TopologicalSpec) -> Vec<RootedTree> {
    spec.fringes.iter().map(|f| f.code.parse_tree().expect("catalog codes parse")).collect()
}

/// Build the graph. Skeleton vertices get atom ids `1..`, fringe atoms
/// follow; link seed edges become link-edges and the first of them joins
/// the connecting-vertices.
pub fn realize(spec: &TopologicalSpec, c: &Construction) -> Result<ChemicalGraph, RealizeError> {
    realize_with(spec, &parsed_catalog(spec), c)
}

fn realize_with(spec: &TopologicalSpec, trees: &[RootedTree], c: &Construction) -> Result<ChemicalGraph, RealizeError> {
    let sk = skeleton(spec, &c.lengths, &c.attached)?;
    if c.elements.len() != sk.n || c.fringes.len() != sk.n || c.mults.len() != sk.edges.len() {
        return Err(RealizeError::Shape);
    }
    let mut gs = GraphSpec::default();
    for (v, &e) in c.elements.iter().enumerate() {
        gs.atoms.push((v as u32 + 1, e));
    }
    for (k, &(u, v, a)) in sk.edges.iter().enumerate() {
        let (iu, iv) = (u as u32 + 1, v as u32 + 1);
        gs.bonds.push((iu, iv, c.mults[k]));
        if a.is_some_and(|a| spec.seed.edges[a].link) {
            gs.links.push((iu, iv));
            gs.connect.get_or_insert((iu, iv));
        }
    }
    let mut next = sk.n as u32 + 1;
    for (v, &t) in c.fringes.iter().enumerate() {
        let tree = trees.get(t).ok_or(RealizeError::Shape)?;
        if tree.root_element() != c.elements[v] {
            return Err(RealizeError::Root { vertex: v, tree: t, root: tree.root_element(), element: c.elements[v] });
        }
        let mut id = vec![v as u32 + 1; tree.len()];
        for i in 1..tree.len() {
            let node = tree.node(i);
            id[i] = next;
            next += 1;
            gs.atoms.push((id[i], node.element));
            gs.bonds.push((id[node.parent.expect("non-root")], id[i], node.mult));
        }
    }
    Ok(ChemicalGraph::new(gs)?)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GenerateLimits {
    /// Stop after this many emitted graphs.
    pub max_candidates: Option<usize>,
    pub max_seconds: Option<f64>,
    /// Stop after this many complete constructions.
    pub max_leaves: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GenerateStatus {
    Exhausted,
    CandidateLimit,
    TimeLimit,
    LeafLimit,
}

#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub hash: String,
    #[serde(skip)]
    pub graph: ChemicalGraph,
    /// Prediction in original units; `NaN` without a model.
    pub prediction: f64,
    /// Descriptors of the graph missing from the model's registry.
    pub oov: Vec<String>,
    pub counters: BTreeMap<String, u32>,
    pub construction: Construction,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct GenerateStats {
    pub leaves: u64,
    pub invalid: u64,
    pub duplicates: u64,
    pub unsatisfied: u64,
    pub outside_window: u64,
}

#[derive(Debug, Clone)]
pub struct GenerateReport {
    pub status: GenerateStatus,
    pub candidates: Vec<Candidate>,
    pub stats: GenerateStats,
}

/// Collect every emitted candidate.
pub fn generate(
    spec: &TopologicalSpec,
    model: Option<&TrainedModel>,
    window: (f64, f64),
    limits: &GenerateLimits,
) -> Result<GenerateReport, GenerateError> {
    let mut candidates = Vec::new();
    let (status, stats) = generate_each(spec, model, window, limits, |c| {
        candidates.push(c);
        true
    })?;
    Ok(GenerateReport { status, candidates, stats })
}

/// Stream candidates into `sink` in search order; returning `false` from
/// the sink stops the search with [`GenerateStatus::CandidateLimit`].
pub fn generate_each(
    spec: &TopologicalSpec,
    model: Option<&TrainedModel>,
    window: (f64, f64),
    limits: &GenerateLimits,
    sink: impl FnMut(Candidate) -> bool,
) -> Result<(GenerateStatus, GenerateStats), GenerateError> {
    spec.validate()?;
    if let Some(m) = model {
        if m.registry.rho != spec.rho {
            return Err(GenerateError::RhoMismatch { spec: spec.rho, model: m.registry.rho });
        }
    }
    if !(window.0 <= window.1) {
        return Err(GenerateError::BadWindow(window.0, window.1));
    }
    let mut s = Search::new(spec, model, window, *limits, sink);
    let status = match s.lengths(0, &mut Vec::new()) {
        Ok(()) => GenerateStatus::Exhausted,
        Err(Stop(st)) => st,
    };
    if let Some(e) = s.error.take() {
        return Err(e);
    }
    Ok((status, s.stats))
}

struct Stop(GenerateStatus);

struct TreeInfo {
    root: Element,
    residual: u32,
    /// Atoms below the root, hydrogens included.
    counts: Vec<(Element, u32)>,
    non_h: u32,
}

struct Search<'a, F> {
    spec: &'a TopologicalSpec,
    model: Option<&'a TrainedModel>,
    window: (f64, f64),
    limits: GenerateLimits,
    sink: F,
    start: Instant,
    trees: Vec<RootedTree>,
    info: Vec<TreeInfo>,
    /// Interior elements allowed anywhere / per seed vertex.
    free_elements: Vec<Element>,
    seed_elements: Vec<Vec<Element>>,
    seen: HashSet<String>,
    emitted: usize,
    stats: GenerateStats,
    error: Option<GenerateError>,
}

fn na_ub(spec: &TopologicalSpec, e: Element) -> u32 {
    spec.na.bounds(&e).map_or(0, |b| b.ub)
}

impl<'a, F: FnMut(Candidate) -> bool> Search<'a, F> {
    fn new(
        spec: &'a TopologicalSpec,
        model: Option<&'a TrainedModel>,
        window: (f64, f64),
        limits: GenerateLimits,
        sink: F,
    ) -> Self {
        let trees = parsed_catalog(spec);
        let info = trees
            .iter()
            .map(|t| {
                let mut counts: BTreeMap<Element, u32> = BTreeMap::new();
                for node in &t.nodes()[1..] {
                    *counts.entry(node.element).or_default() += 1;
                }
                TreeInfo {
                    root: t.root_element(),
                    residual: t.root_residual_valence().max(0) as u32,
                    non_h: t.non_h_count() as u32 - 1,
                    counts: counts.into_iter().collect(),
                }
            })
            .collect();
        let usable = |e: &Element| !e.is_hydrogen() && spec.elements.contains(e) && na_ub(spec, *e) > 0;
        let free_elements: Vec<Element> = spec.elements.iter().copied().filter(usable).collect();
        let seed_elements = spec.seed.vertices.iter().map(|v| v.elements.iter().copied().filter(usable).collect()).collect();
        Search {
            spec,
            model,
            window,
            limits,
            sink,
            start: Instant::now(),
            trees,
            info,
            free_elements,
            seed_elements,
            seen: HashSet::new(),
            emitted: 0,
            stats: GenerateStats::default(),
            error: None,
        }
    }

    fn out_of_time(&self) -> bool {
        self.limits.max_seconds.is_some_and(|s| self.start.elapsed().as_secs_f64() > s)
    }

    fn lengths(&mut self, a: usize, chosen: &mut Vec<u32>) -> Result<(), Stop> {
        let edges = &self.spec.seed.edges;
        let base = self.spec.seed.vertices.len() as u32;
        let placed: u32 = base + chosen.iter().map(|l| l - 1).sum::<u32>();
        let lnk: u32 = chosen.iter().zip(edges).filter(|(_, e)| e.link).map(|(l, _)| l - 1).sum();
        if a == edges.len() {
            if !self.spec.n_lnk.contains(lnk) {
                return Ok(());
            }
            let hs = hosts(self.spec, chosen);
            let mut att = Vec::with_capacity(hs.len());
            return self.attach(chosen, &hs, &mut att);
        }
        let rest: u32 = edges[a + 1..].iter().map(|e| e.length.lb - 1).sum();
        let e = &edges[a];
        for len in e.length.lb..=e.length.ub {
            if placed + len - 1 + rest > self.spec.n.ub {
                break;
            }
            if e.link && lnk + len - 1 > self.spec.n_lnk.ub {
                break;
            }
            chosen.push(len);
            let r = self.lengths(a + 1, chosen);
            chosen.pop();
            r?;
        }
        Ok(())
    }

    /// `(count, max)` of attached paths per seed vertex and per seed edge.
    fn attach_tally(&self, hs: &[Host], att: &[u32]) -> (Vec<(u32, u32)>, Vec<(u32, u32)>) {
        let mut tv = vec![(0, 0); self.spec.seed.vertices.len()];
        let mut te = vec![(0, 0); self.spec.seed.edges.len()];
        for (h, &k) in hs.iter().zip(att) {
            if k == 0 {
                continue;
            }
            let t = match *h {
                Host::Vertex(u) => &mut tv[u],
                Host::Path { edge, .. } => &mut te[edge],
            };
            t.0 += 1;
            t.1 = t.1.max(k);
        }
        (tv, te)
    }

    fn attach(&mut self, lengths: &[u32], hs: &[Host], att: &mut Vec<u32>) -> Result<(), Stop> {
        let (tv, te) = self.attach_tally(hs, att);
        let size = self.spec.seed.vertices.len() as u32
            + lengths.iter().map(|l| l - 1).sum::<u32>()
            + att.iter().sum::<u32>();
        if size > self.spec.n.ub {
            return Ok(());
        }
        let spec = self.spec;
        if att.len() == hs.len() {
            let ok = spec.seed.vertices.iter().zip(&tv).all(|(v, t)| v.bl.contains(t.0) && v.ch.contains(t.1))
                && spec
                    .seed
                    .edges
                    .iter()
                    .zip(&te)
                    .all(|(e, t)| e.class == EdgeClass::Single || (e.bl.contains(t.0) && e.ch.contains(t.1)));
            if !ok {
                return Ok(());
            }
            let sk = skeleton(spec, lengths, att).expect("consistent shape");
            let mut st = Partial::new(&sk, lengths.to_vec(), att.clone());
            return self.elements(&sk, &mut st, 0);
        }
        let (max_len, full) = match hs[att.len()] {
            Host::Vertex(u) => (spec.seed.vertices[u].ch.ub, tv[u].0 >= spec.seed.vertices[u].bl.ub),
            Host::Path { edge, .. } => (spec.seed.edges[edge].ch.ub, te[edge].0 >= spec.seed.edges[edge].bl.ub),
        };
        let top = if full { 0 } else { max_len };
        for k in 0..=top {
            att.push(k);
            let r = self.attach(lengths, hs, att);
            att.pop();
            r?;
        }
        Ok(())
    }

    fn elements(&mut self, sk: &Skeleton, st: &mut Partial, v: usize) -> Result<(), Stop> {
        if v == sk.n {
            return self.bonds(sk, st, 0);
        }
        let choices = match sk.seed_of[v] {
            Some(u) => self.seed_elements[u].clone(),
            None => self.free_elements.clone(),
        };
        for e in choices {
            if st.count(e) + 1 > na_ub(self.spec, e) {
                continue;
            }
            st.elements.push(e);
            st.add(e, 1);
            let r = self.elements(sk, st, v + 1);
            st.add(e, -1);
            st.elements.pop();
            r?;
        }
        Ok(())
    }

    fn residual_possible(&self, e: Element, r: u32) -> bool {
        self.info.iter().any(|t| t.root == e && t.residual == r)
    }

    fn bonds(&mut self, sk: &Skeleton, st: &mut Partial, k: usize) -> Result<(), Stop> {
        if k == sk.edges.len() {
            return self.fringes(sk, st, 0);
        }
        let (u, v, owner) = sk.edges[k];
        let last_of_owner = owner.is_some() && sk.edges[k + 1..].iter().all(|x| x.2 != owner);
        for m in 1..=3u8 {
            let (eu, ev) = (st.elements[u], st.elements[v]);
            if st.sum[u] + m as u32 > eu.valence() as u32 || st.sum[v] + m as u32 > ev.valence() as u32 {
                break;
            }
            if let Some(a) = owner {
                let e = &self.spec.seed.edges[a];
                let (b2, b3) = (st.bd[a].0 + u32::from(m == 2), st.bd[a].1 + u32::from(m == 3));
                if b2 > e.bd2.ub || b3 > e.bd3.ub {
                    continue;
                }
                if last_of_owner && (b2 < e.bd2.lb || b3 < e.bd3.lb) {
                    continue;
                }
            }
            st.sum[u] += m as u32;
            st.sum[v] += m as u32;
            let done = |x: usize| sk.edges[k + 1..].iter().all(|y| y.0 != x && y.1 != x);
            let feasible = [u, v].iter().all(|&x| {
                !done(x) || self.residual_possible(st.elements[x], st.sum[x])
            });
            if feasible {
                if let Some(a) = owner {
                    st.bd[a].0 += u32::from(m == 2);
                    st.bd[a].1 += u32::from(m == 3);
                }
                st.mults.push(m);
                let r = self.bonds(sk, st, k + 1);
                st.mults.pop();
                if let Some(a) = owner {
                    st.bd[a].0 -= u32::from(m == 2);
                    st.bd[a].1 -= u32::from(m == 3);
                }
                st.sum[u] -= m as u32;
                st.sum[v] -= m as u32;
                r?;
            } else {
                st.sum[u] -= m as u32;
                st.sum[v] -= m as u32;
            }
        }
        Ok(())
    }

    fn fringes(&mut self, sk: &Skeleton, st: &mut Partial, v: usize) -> Result<(), Stop> {
        if v == sk.n {
            return self.leaf(st);
        }
        let e = st.elements[v];
        let need = st.sum[v];
        for t in 0..self.info.len() {
            let info = &self.info[t];
            if info.root != e || info.residual != need {
                continue;
            }
            if st.non_h + info.non_h > self.spec.n.ub {
                continue;
            }
            if info.counts.iter().any(|&(x, c)| st.count(x) + c > na_ub(self.spec, x)) {
                continue;
            }
            let counts = info.counts.clone();
            for &(x, c) in &counts {
                st.add(x, c as i64);
            }
            let nh = info.non_h;
            st.non_h += nh;
            st.fringes.push(t);
            let r = self.fringes(sk, st, v + 1);
            st.fringes.pop();
            st.non_h -= nh;
            for &(x, c) in &counts {
                st.add(x, -(c as i64));
            }
            r?;
        }
        Ok(())
    }

    fn leaf(&mut self, st: &Partial) -> Result<(), Stop> {
        self.stats.leaves += 1;
        if self.out_of_time() {
            return Err(Stop(GenerateStatus::TimeLimit));
        }
        let c = Construction {
            lengths: st.lengths.clone(),
            attached: st.attached.clone(),
            elements: st.elements.clone(),
            mults: st.mults.clone(),
            fringes: st.fringes.clone(),
        };
        let result = self.consider(c);
        if self.limits.max_leaves.is_some_and(|m| self.stats.leaves >= m) {
            result?;
            return Err(Stop(GenerateStatus::LeafLimit));
        }
        result
    }

    fn consider(&mut self, c: Construction) -> Result<(), Stop> {
        let g = match realize_with(self.spec, &self.trees, &c) {
            Ok(g) => g,
            Err(_) => {
                self.stats.invalid += 1;
                return Ok(());
            }
        };
        let hash = canonical_hash(&g);
        if !self.seen.insert(hash.clone()) {
            self.stats.duplicates += 1;
            return Ok(());
        }
        let report = check_satisfies(&g, self.spec, self.spec.rho);
        if !report.pass {
            self.stats.unsatisfied += 1;
            return Ok(());
        }
        let (prediction, oov) = match self.model {
            None => (f64::NAN, Vec::new()),
            Some(m) => match predict(m, &g) {
                Ok(p) => p,
                Err(e) => {
                    self.error = Some(e);
                    return Err(Stop(GenerateStatus::Exhausted));
                }
            },
        };
        if self.model.is_some() && !(self.window.0 <= prediction && prediction <= self.window.1) {
            self.stats.outside_window += 1;
            return Ok(());
        }
        let cand = Candidate { hash, graph: g, prediction, oov, counters: counters(&report), construction: c };
        self.emitted += 1;
        if !(self.sink)(cand) || self.limits.max_candidates.is_some_and(|m| self.emitted >= m) {
            return Err(Stop(GenerateStatus::CandidateLimit));
        }
        Ok(())
    }
}

fn counters(r: &SatisfactionReport) -> BTreeMap<String, u32> {
    r.checks.iter().map(|c| (c.name.clone(), c.measured)).collect()
}

/// Prediction in original units and the names of out-of-registry
/// descriptors. Covariates are taken as zero.
pub fn predict(model: &TrainedModel, g: &ChemicalGraph) -> Result<(f64, Vec<String>), GenerateError> {
    let cov = vec![0.0; model.registry.covariate_names().len()];
    let (fv, y) = model.predict_graph(g, &cov)?;
    let oov = fv.oov.iter().map(|(d, _)| serde_json::to_string(d).expect("descriptor serializes")).collect();
    Ok((y, oov))
}

/// Running state of one construction.
struct Partial {
    lengths: Vec<u32>,
    attached: Vec<u32>,
    elements: Vec<Element>,
    mults: Vec<u8>,
    fringes: Vec<usize>,
    sum: Vec<u32>,
    /// (double, triple) per seed edge.
    bd: Vec<(u32, u32)>,
    counts: BTreeMap<Element, u32>,
    non_h: u32,
}

impl Partial {
    fn new(sk: &Skeleton, lengths: Vec<u32>, attached: Vec<u32>) -> Self {
        Partial {
            bd: vec![(0, 0); lengths.len()],
            lengths,
            attached,
            elements: Vec::with_capacity(sk.n),
            mults: Vec::with_capacity(sk.edges.len()),
            fringes: Vec::with_capacity(sk.n),
            sum: vec![0; sk.n],
            counts: BTreeMap::new(),
            non_h: sk.n as u32,
        }
    }

    fn count(&self, e: Element) -> u32 {
        self.counts.get(&e).copied().unwrap_or(0)
    }

    fn add(&mut self, e: Element, d: i64) {
        let c = self.counts.entry(e).or_insert(0);
        *c = (*c as i64 + d) as u32;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundTripCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundTripReport {
    pub pass: bool,
    pub checks: Vec<RoundTripCheck>,
    pub prediction: Option<f64>,
    /// Out-of-registry descriptors make the prediction unreliable.
    pub oov: Vec<String>,
    pub satisfaction: SatisfactionReport,
}

/// Recompute decomposition, spec bounds, features and prediction for `g`.
pub fn verify_roundtrip(
    g: &ChemicalGraph,
    spec: &TopologicalSpec,
    model: &TrainedModel,
    window: (f64, f64),
) -> RoundTripReport {
    let mut checks = Vec::new();
    let mut add = |name: &str, pass: bool, detail: String| checks.push(RoundTripCheck { name: name.into(), pass, detail });
    let decomposed = crate::twolayer::decompose(g, spec.rho).is_ok();
    add("decomposition", decomposed, format!("rho {}", spec.rho));
    let sat = check_satisfies(g, spec, spec.rho);
    let failed: Vec<String> = sat.failures().map(|c| format!("{}={} not in [{}, {}]", c.name, c.measured, c.lb, c.ub)).collect();
    add("specification", sat.pass, failed.join("; "));
    let (prediction, oov) = match predict(model, g) {
        Ok((y, oov)) => {
            let inside = window.0 <= y && y <= window.1;
            add("window", inside, format!("{y} in [{}, {}]", window.0, window.1));
            (Some(y), oov)
        }
        Err(e) => {
            add("prediction", false, e.to_string());
            (None, Vec::new())
        }
    };
    add("registry coverage", oov.is_empty(), oov.join(", "));
    RoundTripReport { pass: checks.iter().all(|c| c.pass), checks, prediction, oov, satisfaction: sat }
}

#[derive(Serialize)]
struct ManifestLine<'a> {
    file: String,
    #[serde(flatten)]
    candidate: &'a Candidate,
}

/// Write `cand_00000.pmg, ...` and `manifest.jsonl` into `dir`.
pub fn write_outputs(dir: &Path, candidates: &[Candidate]) -> Result<(), GenerateError> {
    let io = |p: &Path| {
        let path = p.display().to_string();
        move |source| GenerateError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut manifest = String::new();
    for (i, c) in candidates.iter().enumerate() {
        let file = format!("cand_{i:05}.pmg");
        let path = dir.join(&file);
        fs::write(&path, serialize_pmg(&c.graph)).map_err(io(&path))?;
        let mut line = serde_json::to_value(ManifestLine { file, candidate: c }).expect("manifest serializes");
        if c.prediction.is_nan() {
            line["prediction"] = serde_json::Value::Null;
        }
        manifest.push_str(&line.to_string());
        manifest.push('\n');
    }
    let path = dir.join("manifest.jsonl");
    fs::write(&path, manifest).map_err(io(&path))
}
