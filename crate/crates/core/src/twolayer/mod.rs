//! Two-layered decomposition of a chemical graph.
//!
//! With branch-parameter `rho`, a vertex of the hydrogen-suppressed graph is
//! exterior when it is removed within the first `rho` rounds of leaf
//! stripping (height below `rho`); an edge is exterior when it touches an
//! exterior vertex. Everything else is interior. Each interior vertex `u`
//! owns the rho-fringe-tree `C[u]`: the exterior tree hanging at `u`, with
//! the original hydrogens put back.

mod canon;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::chemgraph::{heights, ChemicalGraph, Element, HydrogenSuppressed};

pub use canon::{CanonicalCode, CodeError, RootedTree, TreeNode};

pub const DEFAULT_RHO: u32 = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TwoLayerError {
    #[error("branch-parameter must be at least 1")]
    InvalidRho,
    #[error("edge {0} is not an interior edge")]
    NotInterior(usize),
    #[error("cannot parse configuration {0:?}")]
    BadConfig(String),
}

/// `(a d, b d', m)` for an interior edge, endpoint pairs ordered so that
/// `(a, d) <= (b, d')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeConfig {
    pub a: Element,
    pub d: u8,
    pub b: Element,
    pub d2: u8,
    pub m: u8,
}

/// `(a, b, m)` with `a <= b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AdjacencyConfig {
    pub a: Element,
    pub b: Element,
    pub m: u8,
}

impl EdgeConfig {
    pub fn new(a: Element, d: u8, b: Element, d2: u8, m: u8) -> Self {
        if (a, d) <= (b, d2) {
            EdgeConfig { a, d, b, d2, m }
        } else {
            EdgeConfig { a: b, d: d2, b: a, d2: d, m }
        }
    }

    pub fn adjacency(&self) -> AdjacencyConfig {
        AdjacencyConfig::new(self.a, self.b, self.m)
    }
}

impl AdjacencyConfig {
    pub fn new(a: Element, b: Element, m: u8) -> Self {
        AdjacencyConfig { a: a.min(b), b: a.max(b), m }
    }
}

impl fmt::Display for EdgeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{},{}{},{}", self.a, self.d, self.b, self.d2, self.m)
    }
}

impl fmt::Display for AdjacencyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.m)
    }
}

/// Split `S(6)4` into the element token and the trailing degree digits.
fn split_symbol(s: &str) -> Option<(Element, Option<u8>)> {
    let cut = if s.contains(')') {
        s.rfind(')')? + 1
    } else {
        s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len())
    };
    let el = Element::parse(&s[..cut])?;
    let rest = &s[cut..];
    if rest.is_empty() {
        Some((el, None))
    } else {
        Some((el, Some(rest.parse().ok()?)))
    }
}

impl FromStr for EdgeConfig {
    type Err = TwoLayerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TwoLayerError::BadConfig(s.to_string());
        let parts: Vec<&str> = s.split(',').collect();
        let [x, y, m] = parts.as_slice() else { return Err(bad()) };
        let (a, Some(d)) = split_symbol(x).ok_or_else(bad)? else { return Err(bad()) };
        let (b, Some(d2)) = split_symbol(y).ok_or_else(bad)? else { return Err(bad()) };
        let m: u8 = m.parse().map_err(|_| bad())?;
        Ok(EdgeConfig::new(a, d, b, d2, m))
    }
}

impl FromStr for AdjacencyConfig {
    type Err = TwoLayerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TwoLayerError::BadConfig(s.to_string());
        let parts: Vec<&str> = s.split(',').collect();
        let [x, y, m] = parts.as_slice() else { return Err(bad()) };
        let a = Element::parse(x).ok_or_else(bad)?;
        let b = Element::parse(y).ok_or_else(bad)?;
        let m: u8 = m.parse().map_err(|_| bad())?;
        Ok(AdjacencyConfig::new(a, b, m))
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(EdgeConfig);
string_serde!(AdjacencyConfig);

/// Element plus degree in the hydrogen-suppressed graph, e.g. `C3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DegreeSymbol {
    pub element: Element,
    pub degree: u8,
}

impl fmt::Display for DegreeSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.element, self.degree)
    }
}

impl FromStr for DegreeSymbol {
    type Err = TwoLayerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match split_symbol(s) {
            Some((element, Some(degree))) => Ok(DegreeSymbol { element, degree }),
            _ => Err(TwoLayerError::BadConfig(s.to_string())),
        }
    }
}

string_serde!(DegreeSymbol);

/// The rho-fringe-tree rooted at an interior vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeTree {
    /// Interior vertex (index in the hydrogen-suppressed graph).
    pub root: usize,
    /// Hydrogen-suppressed vertices of the tree, root first.
    pub members: Vec<usize>,
    pub tree: RootedTree,
    pub code: CanonicalCode,
}

#[derive(Debug, Clone)]
pub struct TwoLayered {
    rho: u32,
    hs: HydrogenSuppressed,
    height: Vec<Option<u32>>,
    interior: Vec<bool>,
    interior_edge: Vec<bool>,
    owner: Vec<Option<usize>>,
    fringes: Vec<FringeTree>,
}

/// Decompose `g` at branch-parameter `rho`.
pub fn decompose(g: &ChemicalGraph, rho: u32) -> Result<TwoLayered, TwoLayerError> {
    if rho == 0 {
        return Err(TwoLayerError::InvalidRho);
    }
    let hs = g.hydrogen_suppress();
    let sg = hs.graph();
    let (height, tree) = heights(sg, None);
    let interior: Vec<bool> = (0..hs.n()).map(|v| !(tree[v] && height[v].is_some_and(|h| h < rho))).collect();
    let interior_edge: Vec<bool> = hs.bonds().iter().map(|b| interior[b.u] && interior[b.v]).collect();

    let mut owner = vec![None; hs.n()];
    let mut fringes = Vec::new();
    for u in (0..hs.n()).filter(|&u| interior[u]) {
        let mut rt = RootedTree::new(hs.element(u));
        let mut members = vec![u];
        owner[u] = Some(u);
        // (hs vertex, tree node)
        let mut stack = vec![(u, 0usize)];
        let mut order = Vec::new();
        while let Some((v, node)) = stack.pop() {
            order.push((v, node));
            for &(w, e) in sg.neighbors(v) {
                if !interior[w] && owner[w].is_none() {
                    owner[w] = Some(u);
                    members.push(w);
                    let child = rt.add_child(node, hs.element(w), hs.bonds()[e].mult);
                    stack.push((w, child));
                }
            }
        }
        for (v, node) in order {
            for _ in 0..hs.hydrogens(v) {
                rt.add_child(node, Element::hydrogen(), 1);
            }
        }
        let code = rt.canonical_code();
        fringes.push(FringeTree { root: u, members, tree: rt, code });
    }
    Ok(TwoLayered { rho, hs, height, interior, interior_edge, owner, fringes })
}

impl TwoLayered {
    pub fn rho(&self) -> u32 {
        self.rho
    }

    pub fn suppressed(&self) -> &HydrogenSuppressed {
        &self.hs
    }

    pub fn height(&self, v: usize) -> Option<u32> {
        self.height[v]
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.interior[v]
    }

    pub fn is_interior_edge(&self, e: usize) -> bool {
        self.interior_edge[e]
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.hs.n()).filter(|&v| self.interior[v]).collect()
    }

    pub fn exterior_vertices(&self) -> Vec<usize> {
        (0..self.hs.n()).filter(|&v| !self.interior[v]).collect()
    }

    pub fn interior_edges(&self) -> Vec<usize> {
        (0..self.hs.bonds().len()).filter(|&e| self.interior_edge[e]).collect()
    }

    pub fn exterior_edges(&self) -> Vec<usize> {
        (0..self.hs.bonds().len()).filter(|&e| !self.interior_edge[e]).collect()
    }

    /// Link-edges of the suppressed graph (always interior for valid polymers).
    pub fn link_edges(&self) -> Vec<usize> {
        (0..self.hs.bonds().len()).filter(|&e| self.hs.is_link(e)).collect()
    }

    /// Fringe trees in ascending order of their interior root.
    pub fn fringe_trees(&self) -> &[FringeTree] {
        &self.fringes
    }

    /// Interior vertex whose fringe tree contains `v`.
    pub fn owner(&self, v: usize) -> Option<usize> {
        self.owner[v]
    }

    pub fn degree_symbol(&self, v: usize) -> DegreeSymbol {
        DegreeSymbol { element: self.hs.element(v), degree: self.hs.degree(v) as u8 }
    }

    /// Edge-configuration of interior edge `e` (index into the suppressed
    /// graph's bonds); degrees are taken in the suppressed graph.
    pub fn edge_config(&self, e: usize) -> Result<EdgeConfig, TwoLayerError> {
        if !self.interior_edge.get(e).copied().unwrap_or(false) {
            return Err(TwoLayerError::NotInterior(e));
        }
        Ok(self.raw_edge_config(e))
    }

    pub(crate) fn raw_edge_config(&self, e: usize) -> EdgeConfig {
        let b = self.hs.bonds()[e];
        EdgeConfig::new(
            self.hs.element(b.u),
            self.hs.degree(b.u) as u8,
            self.hs.element(b.v),
            self.hs.degree(b.v) as u8,
            b.mult,
        )
    }

    /// Adjacency-configurations of the leaf-edges of the suppressed graph.
    pub fn leaf_edge_configs(&self) -> Vec<AdjacencyConfig> {
        self.hs
            .bonds()
            .iter()
            .filter(|b| self.hs.degree(b.u) == 1 || self.hs.degree(b.v) == 1)
            .map(|b| AdjacencyConfig::new(self.hs.element(b.u), self.hs.element(b.v), b.mult))
            .collect()
    }
}
