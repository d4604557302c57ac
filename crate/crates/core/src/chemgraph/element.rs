//! Chemical element tokens and the valence/mass table.
//!
//! An element token is a base symbol optionally followed by a valence
//! suffix, e.g. `C`, `O`, `S(2)`, `S(6)`, `Si(4)`. Tokens with a suffix are
//! distinct elements whose valence equals the suffix.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// One row of the element table.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementEntry {
    pub base: &'static str,
    pub suffix: Option<u8>,
    pub valence: u8,
    pub mass: f64,
}

impl ElementEntry {
    pub fn symbol(&self) -> String {
        match self.suffix {
            Some(v) => format!("{}({})", self.base, v),
            None => self.base.to_string(),
        }
    }
}

/// The element table: symbols, valences and atomic masses.
///
/// Entries are kept sorted by `(base symbol, valence suffix)` with the
/// unsuffixed form first, so the index order of [`Element`] is the total
/// order used for canonical edge orientation.
#[derive(Debug, Clone)]
pub struct ElementTable {
    entries: Vec<ElementEntry>,
}

const fn entry(base: &'static str, suffix: Option<u8>, valence: u8, mass: f64) -> ElementEntry {
    ElementEntry { base, suffix, valence, mass }
}

impl ElementTable {
    /// The built-in table.
    pub fn standard() -> &'static ElementTable {
        static TABLE: OnceLock<ElementTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            let mut entries = vec![
                entry("H", None, 1, 1.008),
                entry("C", None, 4, 12.011),
                entry("N", None, 3, 14.007),
                entry("O", None, 2, 15.999),
                entry("O", Some(1), 1, 15.999),
                entry("O", Some(2), 2, 15.999),
                entry("F", None, 1, 18.998),
                entry("Cl", None, 1, 35.45),
                entry("Br", None, 1, 79.904),
                entry("I", None, 1, 126.904),
                entry("S", Some(2), 2, 32.06),
                entry("S", Some(4), 4, 32.06),
                entry("S", Some(6), 6, 32.06),
                entry("Si", Some(4), 4, 28.085),
                entry("P", Some(5), 5, 30.974),
                entry("P", Some(3), 3, 30.974),
                entry("B", None, 3, 10.81),
            ];
            entries.sort_by(|a, b| (a.base, a.suffix).cmp(&(b.base, b.suffix)));
            ElementTable { entries }
        })
    }

    pub fn entries(&self) -> &[ElementEntry] {
        &self.entries
    }

    pub fn get(&self, e: Element) -> &ElementEntry {
        &self.entries[e.0 as usize]
    }

    /// Look up an element token such as `C` or `S(6)`.
    pub fn lookup(&self, token: &str) -> Option<Element> {
        let (base, suffix) = split_token(token)?;
        self.entries
            .iter()
            .position(|e| e.base == base && e.suffix == suffix)
            .map(|i| Element(i as u8))
    }
}

fn split_token(token: &str) -> Option<(&str, Option<u8>)> {
    match token.find('(') {
        None => Some((token, None)),
        Some(open) => {
            let rest = token[open + 1..].strip_suffix(')')?;
            let v: u8 = rest.parse().ok()?;
            Some((&token[..open], Some(v)))
        }
    }
}

/// An element of the built-in table. Ordered by `(base symbol, suffix)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(u8);

impl Element {
    pub fn parse(token: &str) -> Option<Element> {
        ElementTable::standard().lookup(token)
    }

    /// Panics if `token` is not in the table; for literals in code and tests.
    pub fn of(token: &str) -> Element {
        Self::parse(token).unwrap_or_else(|| panic!("unknown element token {token:?}"))
    }

    pub fn hydrogen() -> Element {
        Self::of("H")
    }

    pub fn is_hydrogen(self) -> bool {
        self == Self::hydrogen()
    }

    pub fn valence(self) -> u8 {
        ElementTable::standard().get(self).valence
    }

    pub fn mass(self) -> f64 {
        ElementTable::standard().get(self).mass
    }

    pub fn symbol(self) -> String {
        ElementTable::standard().get(self).symbol()
    }

    /// All elements of the built-in table in their total order.
    pub fn all() -> impl Iterator<Item = Element> {
        (0..ElementTable::standard().entries().len()).map(|i| Element(i as u8))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol())
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.symbol())
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Element::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown element {s:?}")))
    }
}
