//! Topological specifications: a seed graph, a fringe-tree catalog and
//! counting bounds on the graphs to be inferred.
//!
//! The JSON form stores every bound as evaluated numbers; nothing is
//! recomputed when a graph is checked.

mod check;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chemgraph::{Element, ElementTable};
use crate::twolayer::{AdjacencyConfig, CanonicalCode, CodeError, DegreeSymbol, EdgeConfig, DEFAULT_RHO};

pub use check::{check_satisfies, BoundCheck, SatisfactionReport, Witness};

#[derive(Debug, Error)]
pub enum TopoError {
    #[error("unknown property tag {0:?}")]
    UnknownProperty(String),
    #[error("n_LB must be at least 1")]
    BadLowerBound,
    #[error("bound {name}: lower {lb} exceeds upper {ub}")]
    Inverted { name: String, lb: u32, ub: u32 },
    #[error("seed graph: {0}")]
    Seed(String),
    #[error("catalog line {line}: {source}")]
    Catalog { line: usize, source: CodeError },
    #[error("duplicate fringe tree {0} in catalog")]
    DuplicateTree(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Closed integer interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub lb: u32,
    pub ub: u32,
}

impl Bounds {
    pub const fn new(lb: u32, ub: u32) -> Self {
        Bounds { lb, ub }
    }

    pub const fn exact(v: u32) -> Self {
        Bounds { lb: v, ub: v }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.lb <= v && v <= self.ub
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeClass {
    /// Replaced by a path whose length lies in `length`.
    Path,
    /// Kept as one edge.
    Single,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedVertex {
    pub name: String,
    /// Allowed elements.
    pub elements: Vec<Element>,
    /// Paths attached directly at this vertex.
    pub bl: Bounds,
    pub ch: Bounds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedEdge {
    pub name: String,
    pub u: usize,
    pub v: usize,
    pub class: EdgeClass,
    pub link: bool,
    /// Number of edges of the replacing path (`1..=1` for single edges).
    pub length: Bounds,
    /// Number of internal path vertices carrying an attached path.
    pub bl: Bounds,
    /// Largest number of vertices on an attached path.
    pub ch: Bounds,
    /// Double and triple bonds on the realized edges.
    pub bd2: Bounds,
    pub bd3: Bounds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedGraph {
    pub vertices: Vec<SeedVertex>,
    pub edges: Vec<SeedEdge>,
}

impl SeedGraph {
    pub fn validate(&self) -> Result<(), TopoError> {
        let n = self.vertices.len();
        if n == 0 {
            return Err(TopoError::Seed("no vertices".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for e in &self.edges {
            if e.u >= n || e.v >= n || e.u == e.v {
                return Err(TopoError::Seed(format!("edge {} has bad endpoints", e.name)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v), e.class == EdgeClass::Single)) && e.class == EdgeClass::Single {
                return Err(TopoError::Seed(format!("parallel single edge {}", e.name)));
            }
            if e.class == EdgeClass::Single && e.length != Bounds::exact(1) {
                return Err(TopoError::Seed(format!("single edge {} must have length 1", e.name)));
            }
            if e.class == EdgeClass::Path && e.length.lb < 2 {
                return Err(TopoError::Seed(format!("path edge {} needs length at least 2", e.name)));
            }
            for (k, b) in [("length", e.length), ("bl", e.bl), ("ch", e.ch), ("bd2", e.bd2), ("bd3", e.bd3)] {
                check_bounds(&format!("{k}({})", e.name), b)?;
            }
        }
        for v in &self.vertices {
            if v.elements.is_empty() {
                return Err(TopoError::Seed(format!("vertex {} allows no element", v.name)));
            }
            check_bounds(&format!("bl({})", v.name), v.bl)?;
            check_bounds(&format!("ch({})", v.name), v.ch)?;
        }
        Ok(())
    }
}

fn check_bounds(name: &str, b: Bounds) -> Result<(), TopoError> {
    if b.lb > b.ub {
        return Err(TopoError::Inverted { name: name.to_string(), lb: b.lb, ub: b.ub });
    }
    Ok(())
}

/// Bounds on a frequency family. A key in `entries` gets its own bounds;
/// other keys are forbidden when `closed` and bounded by `default`
/// otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(serialize = "K: Serialize + Ord", deserialize = "K: Deserialize<'de> + Ord"))]
pub struct Family<K> {
    pub entries: BTreeMap<K, Bounds>,
    pub closed: bool,
    pub default: Bounds,
}

impl<K: Ord> Family<K> {
    pub fn open(default: Bounds) -> Self {
        Family { entries: BTreeMap::new(), closed: false, default }
    }

    pub fn closed(entries: BTreeMap<K, Bounds>) -> Self {
        Family { entries, closed: true, default: Bounds::exact(0) }
    }

    /// Bounds for `k`; `None` when the key is outside a closed family.
    pub fn bounds(&self, k: &K) -> Option<Bounds> {
        match self.entries.get(k) {
            Some(b) => Some(*b),
            None if self.closed => None,
            None => Some(self.default),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FringeEntry {
    pub code: CanonicalCode,
    pub fc: Bounds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologicalSpec {
    pub name: String,
    pub rho: u32,
    /// Element set Λ.
    pub elements: Vec<Element>,
    pub seed: SeedGraph,
    /// The catalog F; every fringe tree must be one of these.
    pub fringes: Vec<FringeEntry>,
    /// Non-hydrogen atoms: `[n_LB, n*]`.
    pub n: Bounds,
    pub n_int: Bounds,
    /// Internal vertices of the paths replacing link seed edges.
    pub n_lnk: Bounds,
    pub na: Family<Element>,
    pub na_int: Family<Element>,
    pub ns_int: Family<DegreeSymbol>,
    /// Degree symbols of the connecting-vertices.
    pub ns_cnt: Family<DegreeSymbol>,
    pub ac_int: Family<AdjacencyConfig>,
    pub ac_lnk: Family<AdjacencyConfig>,
    pub ec_int: Family<EdgeConfig>,
    pub ec_lnk: Family<EdgeConfig>,
    pub ac_lf: Family<AdjacencyConfig>,
}

impl TopologicalSpec {
    /// Structural validity. Empty counting intervals are allowed; they make
    /// the spec unsatisfiable, see [`TopologicalSpec::empty_bounds`].
    pub fn validate(&self) -> Result<(), TopoError> {
        self.seed.validate()?;
        let mut codes: Vec<&CanonicalCode> = self.fringes.iter().map(|f| &f.code).collect();
        codes.sort();
        if let Some(w) = codes.windows(2).find(|w| w[0] == w[1]) {
            return Err(TopoError::DuplicateTree(w[0].to_string()));
        }
        Ok(())
    }

    /// Names of counting bounds with `lb > ub`.
    pub fn empty_bounds(&self) -> Vec<String> {
        let mut out: Vec<String> = [("n", self.n), ("n_int", self.n_int), ("n_lnk", self.n_lnk)]
            .iter()
            .filter(|(_, b)| b.lb > b.ub)
            .map(|(k, _)| k.to_string())
            .collect();
        out.extend(self.fringes.iter().filter(|f| f.fc.lb > f.fc.ub).map(|f| format!("fc({})", f.code)));
        out
    }

    pub fn fringe_index(&self, code: &CanonicalCode) -> Option<usize> {
        self.fringes.iter().position(|f| &f.code == code)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, TopoError> {
        let spec: TopologicalSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Property {
    AmD,
    HcL,
    RfId,
    Tg,
    Prm,
}

impl FromStr for Property {
    type Err = TopoError;

    fn from_str(s: &str) -> Result<Self, TopoError> {
        match s.to_ascii_lowercase().as_str() {
            "amd" => Ok(Property::AmD),
            "hcl" => Ok(Property::HcL),
            "rfid" => Ok(Property::RfId),
            "tg" => Ok(Property::Tg),
            "prm" => Ok(Property::Prm),
            _ => Err(TopoError::UnknownProperty(s.to_string())),
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Element set used for a property.
pub fn element_set(pi: Property) -> Vec<Element> {
    let tokens: &[&str] = match pi {
        Property::AmD => &["H", "C", "N", "O", "Cl", "S(2)"],
        Property::HcL | Property::Tg => &["H", "C", "O", "N", "Cl", "S(2)", "S(6)"],
        Property::RfId => &["H", "C", "O(1)", "O(2)", "N", "Cl", "Si(4)", "F"],
        Property::Prm => &["H", "C", "O", "N", "Cl"],
    };
    tokens.iter().map(|t| Element::of(t)).collect()
}

/// Seventeen small trees standing in for the catalog of the two-ring
/// instance. Tiers follow the index: 1-4, 5-12, 13-17.
pub const PLACEHOLDER_CATALOG: [&str; 17] = [
    "C(H)",
    "C",
    "C(H)(H)",
    "C(C(H)(H)(H))",
    "C(H)(C(H)(H)(H))",
    "C(=O)",
    "N(H)",
    "O",
    "N",
    "C(O(H))",
    "C(H)(O(H))",
    "C(C(H)(H)(H))(C(H)(H)(H))",
    "C(Cl)",
    "C(H)(Cl)",
    "C(=O)(O(C(H)(H)(H)))",
    "C(H)(H)(C(H)(H)(C(H)(H)(H)))",
    "C(F)",
];

pub fn placeholder_catalog() -> Vec<CanonicalCode> {
    PLACEHOLDER_CATALOG.iter().map(|s| s.parse().expect("placeholder trees parse")).collect()
}

/// One code per line; blank lines and `#` comments are skipped. Codes are
/// canonicalized on the way in.
pub fn parse_catalog(text: &str) -> Result<Vec<CanonicalCode>, TopoError> {
    let mut out: Vec<CanonicalCode> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let t = raw.split('#').next().unwrap_or("").trim();
        if t.is_empty() {
            continue;
        }
        let code: CanonicalCode = t.parse().map_err(|source| TopoError::Catalog { line: i + 1, source })?;
        if out.contains(&code) {
            return Err(TopoError::DuplicateTree(code.to_string()));
        }
        out.push(code);
    }
    Ok(out)
}

fn grow(n_lb: u32, div: i64) -> u32 {
    (n_lb as i64 - 15).div_euclid(div).max(0) as u32
}

/// The two-ring instance: rings `r1..r6` and `s1..s6` forced to benzene,
/// joined by the link seed edges `a1 = r1s1` and `a2 = r4s4`.
pub fn build_instance_ib(pi: Property, n_lb: u32, catalog: &[CanonicalCode]) -> Result<TopologicalSpec, TopoError> {
    if n_lb == 0 {
        return Err(TopoError::BadLowerBound);
    }
    let lambda = element_set(pi);
    let n_star = n_lb + 10;
    let ell_lb = 2 + grow(n_lb, 4);

    let mut vertices = Vec::new();
    for ring in ["r", "s"] {
        for i in 1..=6 {
            vertices.push(SeedVertex {
                name: format!("{ring}{i}"),
                elements: vec![Element::of("C")],
                bl: Bounds::exact(0),
                ch: Bounds::exact(0),
            });
        }
    }
    let mut edges = Vec::new();
    for (i, (u, v)) in [(0, 6), (3, 9)].into_iter().enumerate() {
        edges.push(SeedEdge {
            name: format!("a{}", i + 1),
            u,
            v,
            class: EdgeClass::Path,
            link: true,
            length: Bounds::new(ell_lb, ell_lb + 5),
            bl: Bounds::new(0, 3),
            ch: Bounds::new(0, 5),
            bd2: Bounds::new(0, ell_lb / 3),
            bd3: Bounds::exact(0),
        });
    }
    for k in 0..12 {
        let ring = k / 6;
        let (u, v) = (ring * 6 + k % 6, ring * 6 + (k + 1) % 6);
        let idx = k + 3;
        edges.push(SeedEdge {
            name: format!("a{idx}"),
            u,
            v,
            class: EdgeClass::Single,
            link: false,
            length: Bounds::exact(1),
            bl: Bounds::exact(0),
            ch: Bounds::exact(0),
            bd2: Bounds::exact(if idx % 2 == 0 { 1 } else { 0 }),
            bd3: Bounds::exact(0),
        });
    }

    let table = ElementTable::standard();
    let na = lambda
        .iter()
        .map(|&a| {
            let ub = match table.get(a).base {
                "H" | "C" => n_star,
                "O" | "N" => 5 + grow(n_lb, 1),
                _ => 2 + grow(n_lb, 4),
            };
            (a, Bounds::new(0, ub))
        })
        .collect();
    let upto = Bounds::new(0, n_star);
    let symbols: Vec<DegreeSymbol> =
        lambda.iter().flat_map(|&element| (1..=4).map(move |degree| DegreeSymbol { element, degree })).collect();
    let fringes = catalog
        .iter()
        .enumerate()
        .map(|(i, code)| {
            let ub = match i {
                0..=3 => 12 + grow(n_lb, 1),
                4..=11 => 8 + grow(n_lb, 2),
                _ => 5 + grow(n_lb, 4),
            };
            FringeEntry { code: code.clone(), fc: Bounds::new(0, ub) }
        })
        .collect();

    let spec = TopologicalSpec {
        name: format!("Ib-{pi}-{n_lb}"),
        rho: DEFAULT_RHO,
        elements: lambda.clone(),
        seed: SeedGraph { vertices, edges },
        fringes,
        n: Bounds::new(n_lb, n_star),
        n_int: Bounds::new(14, n_star),
        n_lnk: Bounds::new(2, 2 + grow(n_lb, 1)),
        na: Family::closed(na),
        na_int: Family::closed(lambda.iter().map(|&a| (a, upto)).collect()),
        ns_int: Family::closed(symbols.iter().map(|&s| (s, upto)).collect()),
        ns_cnt: Family::closed(symbols.iter().map(|&s| (s, Bounds::new(0, 2))).collect()),
        ac_int: Family::open(upto),
        ac_lnk: Family::open(upto),
        ec_int: Family::open(upto),
        ec_lnk: Family::open(upto),
        ac_lf: Family::open(upto),
    };
    spec.validate()?;
    Ok(spec)
}
