//! Chemical graph data model.
//!
//! A [`ChemicalGraph`] is a simple connected graph whose vertices carry an
//! [`Element`] and whose edges carry a bond multiplicity in `1..=3`. Polymers
//! are stored in monomer representation: a circular set of link-edges and,
//! optionally, the two connecting-vertices at the ends of one link-edge.

mod element;
pub mod graph;
mod pmg;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use element::{Element, ElementEntry, ElementTable};
pub use graph::{core_edges, heights, is_circular_set, k_lean, rank, Core, GraphError, SimpleGraph};
pub use pmg::{parse_pmg, parse_pmg_with, serialize_pmg};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChemError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown element symbol {token:?}")]
    UnknownElement { line: usize, token: String },
    #[error("duplicate atom id {0}")]
    DuplicateAtom(u32),
    #[error("bond references unknown atom id {0}")]
    UnknownAtom(u32),
    #[error("self-loop on atom {0}")]
    SelfLoop(u32),
    #[error("duplicate bond {0}-{1}")]
    DuplicateBond(u32, u32),
    #[error("bond {0}-{1} has multiplicity {2}, expected 1..=3")]
    BadMultiplicity(u32, u32, u8),
    #[error("graph has no atoms")]
    Empty,
    #[error("graph contains only hydrogen")]
    HydrogenOnly,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("atom {id} ({element}) has bond sum {bond_sum}, valence {valence}")]
    Valence { id: u32, element: String, bond_sum: u32, valence: u8 },
    #[error("link {0}-{1} does not name a bond")]
    LinkNotBond(u32, u32),
    #[error("link-edge set is not circular")]
    NotCircular,
    #[error("connecting pair {0}-{1} is not a link-edge")]
    ConnectNotLink(u32, u32),
}

/// A bond between vertex indices `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bond {
    pub u: usize,
    pub v: usize,
    pub mult: u8,
}

impl Bond {
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Validation knobs. `allow_charge = k` accepts `|eledeg| <= k`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ValidationOptions {
    pub allow_charge: u8,
}

/// Raw description of a chemical graph in terms of external atom ids.
#[derive(Debug, Clone, Default)]
pub struct GraphSpec {
    pub atoms: Vec<(u32, Element)>,
    pub bonds: Vec<(u32, u32, u8)>,
    pub links: Vec<(u32, u32)>,
    pub connect: Option<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChemicalGraph {
    ids: Vec<u32>,
    elements: Vec<Element>,
    bonds: Vec<Bond>,
    link: Vec<bool>,
    connecting: Option<(usize, usize)>,
    graph: SimpleGraph,
}

impl ChemicalGraph {
    pub fn new(spec: GraphSpec) -> Result<Self, ChemError> {
        Self::with_options(spec, ValidationOptions::default())
    }

    /// Validate and build. Vertex indices follow ascending atom id; bonds are
    /// sorted lexicographically.
    pub fn with_options(spec: GraphSpec, opts: ValidationOptions) -> Result<Self, ChemError> {
        let mut atoms = spec.atoms;
        if atoms.is_empty() {
            return Err(ChemError::Empty);
        }
        atoms.sort_by_key(|a| a.0);
        for w in atoms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(ChemError::DuplicateAtom(w[0].0));
            }
        }
        let index: BTreeMap<u32, usize> = atoms.iter().enumerate().map(|(i, a)| (a.0, i)).collect();
        let ids: Vec<u32> = atoms.iter().map(|a| a.0).collect();
        let elements: Vec<Element> = atoms.iter().map(|a| a.1).collect();
        if elements.iter().all(|e| e.is_hydrogen()) {
            return Err(ChemError::HydrogenOnly);
        }
        let lookup = |id: u32| index.get(&id).copied().ok_or(ChemError::UnknownAtom(id));

        let mut seen = BTreeSet::new();
        let mut bonds = Vec::with_capacity(spec.bonds.len());
        for &(a, b, m) in &spec.bonds {
            let (u, v) = (lookup(a)?, lookup(b)?);
            if u == v {
                return Err(ChemError::SelfLoop(a));
            }
            if !(1..=3).contains(&m) {
                return Err(ChemError::BadMultiplicity(a, b, m));
            }
            let (u, v) = (u.min(v), u.max(v));
            if !seen.insert((u, v)) {
                return Err(ChemError::DuplicateBond(ids[u], ids[v]));
            }
            bonds.push(Bond { u, v, mult: m });
        }
        bonds.sort();
        let graph = SimpleGraph::new(ids.len(), bonds.iter().map(|b| (b.u, b.v)).collect());
        if !graph.is_connected() {
            return Err(ChemError::Disconnected);
        }

        let mut sums = vec![0u32; ids.len()];
        for b in &bonds {
            sums[b.u] += b.mult as u32;
            sums[b.v] += b.mult as u32;
        }
        for (i, &e) in elements.iter().enumerate() {
            let val = e.valence();
            if (sums[i] as i64 - val as i64).unsigned_abs() > opts.allow_charge as u64 {
                return Err(ChemError::Valence {
                    id: ids[i],
                    element: e.symbol(),
                    bond_sum: sums[i],
                    valence: val,
                });
            }
        }

        let mut link = vec![false; bonds.len()];
        for &(a, b) in &spec.links {
            let (u, v) = (lookup(a)?, lookup(b)?);
            let e = graph.edge_index(u, v).ok_or(ChemError::LinkNotBond(a, b))?;
            link[e] = true;
        }
        let link_set: Vec<usize> = (0..bonds.len()).filter(|&e| link[e]).collect();
        if !is_circular_set(&graph, &link_set) {
            return Err(ChemError::NotCircular);
        }

        let connecting = match spec.connect {
            None => None,
            Some((a, b)) => {
                let (u, v) = (lookup(a)?, lookup(b)?);
                match graph.edge_index(u, v) {
                    Some(e) if link[e] => Some((u.min(v), u.max(v))),
                    _ => return Err(ChemError::ConnectNotLink(a, b)),
                }
            }
        };

        Ok(ChemicalGraph { ids, elements, bonds, link, connecting, graph })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn id(&self, v: usize) -> u32 {
        self.ids[v]
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn element(&self, v: usize) -> Element {
        self.elements[v]
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn is_link(&self, e: usize) -> bool {
        self.link[e]
    }

    pub fn link_edges(&self) -> Vec<usize> {
        (0..self.bonds.len()).filter(|&e| self.link[e]).collect()
    }

    pub fn connecting(&self) -> Option<(usize, usize)> {
        self.connecting
    }

    /// Sum of bond multiplicities at `v`.
    pub fn bond_sum(&self, v: usize) -> u32 {
        self.graph.neighbors(v).iter().map(|&(_, e)| self.bonds[e].mult as u32).sum()
    }

    /// Number of non-hydrogen atoms.
    pub fn non_h_count(&self) -> usize {
        self.elements.iter().filter(|e| !e.is_hydrogen()).count()
    }

    pub fn non_h_neighbor_count(&self, v: usize) -> usize {
        self.graph
            .neighbors(v)
            .iter()
            .filter(|&&(w, _)| !self.elements[w].is_hydrogen())
            .count()
    }

    /// Back to a [`GraphSpec`] with the original atom ids.
    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            atoms: self.ids.iter().copied().zip(self.elements.iter().copied()).collect(),
            bonds: self.bonds.iter().map(|b| (self.ids[b.u], self.ids[b.v], b.mult)).collect(),
            links: self
                .link_edges()
                .into_iter()
                .map(|e| (self.ids[self.bonds[e].u], self.ids[self.bonds[e].v]))
                .collect(),
            connect: self.connecting.map(|(u, v)| (self.ids[u], self.ids[v])),
        }
    }

    /// Whether the link-edges form a circular set. Always true for a graph
    /// built through [`ChemicalGraph::new`].
    pub fn validate_link_edges(&self) -> bool {
        is_circular_set(&self.graph, &self.link_edges())
    }

    /// Remove every hydrogen, recording per-vertex hydrogen counts.
    pub fn hydrogen_suppress(&self) -> HydrogenSuppressed {
        let origin: Vec<usize> = (0..self.n()).filter(|&v| !self.elements[v].is_hydrogen()).collect();
        let mut pos = vec![usize::MAX; self.n()];
        for (i, &v) in origin.iter().enumerate() {
            pos[v] = i;
        }
        let mut hydrogens = vec![0u8; origin.len()];
        let mut bonds = Vec::new();
        let mut link = Vec::new();
        let mut bond_origin = Vec::new();
        for (e, b) in self.bonds.iter().enumerate() {
            match (pos[b.u], pos[b.v]) {
                (usize::MAX, usize::MAX) => {}
                (usize::MAX, x) | (x, usize::MAX) => hydrogens[x] += 1,
                (x, y) => {
                    bonds.push(Bond { u: x.min(y), v: x.max(y), mult: b.mult });
                    link.push(self.link[e]);
                    bond_origin.push(e);
                }
            }
        }
        let graph = SimpleGraph::new(origin.len(), bonds.iter().map(|b| (b.u, b.v)).collect());
        HydrogenSuppressed {
            elements: origin.iter().map(|&v| self.elements[v]).collect(),
            ids: origin.iter().map(|&v| self.ids[v]).collect(),
            bonds,
            link,
            graph,
            origin,
            bond_origin,
            hydrogens,
            connecting: self.connecting.map(|(u, v)| (pos[u], pos[v])),
        }
    }
}

/// The hydrogen-suppressed graph with a back-map to the original vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct HydrogenSuppressed {
    elements: Vec<Element>,
    ids: Vec<u32>,
    bonds: Vec<Bond>,
    link: Vec<bool>,
    graph: SimpleGraph,
    origin: Vec<usize>,
    bond_origin: Vec<usize>,
    hydrogens: Vec<u8>,
    connecting: Option<(usize, usize)>,
}

impl HydrogenSuppressed {
    pub fn n(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, v: usize) -> Element {
        self.elements[v]
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn degree(&self, v: usize) -> usize {
        self.graph.degree(v)
    }

    pub fn is_link(&self, e: usize) -> bool {
        self.link[e]
    }

    /// Original vertex index of suppressed-graph vertex `v`.
    pub fn origin(&self, v: usize) -> usize {
        self.origin[v]
    }

    pub fn bond_origin(&self, e: usize) -> usize {
        self.bond_origin[e]
    }

    /// Hydrogens attached to `v` in the original graph.
    pub fn hydrogens(&self, v: usize) -> u8 {
        self.hydrogens[v]
    }

    pub fn connecting(&self) -> Option<(usize, usize)> {
        self.connecting
    }

    pub fn bond_sum(&self, v: usize) -> u32 {
        self.graph.neighbors(v).iter().map(|&(_, e)| self.bonds[e].mult as u32).sum()
    }

    /// Re-attach the recorded hydrogens. Heavy atoms keep their ids;
    /// hydrogens get fresh ids above the largest heavy-atom id.
    pub fn reattach_hydrogens(&self) -> Result<ChemicalGraph, ChemError> {
        let mut next = self.ids.iter().copied().max().unwrap_or(0) + 1;
        let mut spec = GraphSpec {
            atoms: self.ids.iter().copied().zip(self.elements.iter().copied()).collect(),
            bonds: self.bonds.iter().map(|b| (self.ids[b.u], self.ids[b.v], b.mult)).collect(),
            links: (0..self.bonds.len())
                .filter(|&e| self.link[e])
                .map(|e| (self.ids[self.bonds[e].u], self.ids[self.bonds[e].v]))
                .collect(),
            connect: self.connecting.map(|(u, v)| (self.ids[u], self.ids[v])),
        };
        for v in 0..self.n() {
            for _ in 0..self.hydrogens[v] {
                spec.atoms.push((next, Element::hydrogen()));
                spec.bonds.push((self.ids[v], next, 1));
                next += 1;
            }
        }
        ChemicalGraph::new(spec)
    }
}
