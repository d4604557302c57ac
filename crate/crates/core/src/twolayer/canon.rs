//! Rooted chemical trees and their canonical codes.
//!
//! The code of a vertex is its element token followed by the codes of its
//! children, each wrapped in parentheses and prefixed by a bond marker
//! (none for single, `=` for double, `#` for triple). Children are sorted by
//! their wrapped code, so two rooted trees get the same code exactly when
//! they are rooted-isomorphic. Examples: `C(H)(H)(H)`, `C(=O)(O(H))`,
//! `S(6)(=O)(=O)`. An element suffix is a parenthesized number directly after
//! the base symbol, which is what separates it from a child group.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chemgraph::Element;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub element: Element,
    pub parent: Option<usize>,
    /// Multiplicity of the bond to the parent, 0 for the root.
    pub mult: u8,
    pub children: Vec<usize>,
}

/// A chemical rooted tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    nodes: Vec<TreeNode>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("bad canonical code at byte {pos}: {msg}")]
pub struct CodeError {
    pub pos: usize,
    pub msg: String,
}

/// Canonical code of a rooted chemical tree; compared as strings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalCode(String);

impl CanonicalCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn parse_tree(&self) -> Result<RootedTree, CodeError> {
        RootedTree::parse(&self.0)
    }
}

impl std::str::FromStr for CanonicalCode {
    type Err = CodeError;

    /// Parses any tree code and returns its canonical form.
    fn from_str(s: &str) -> Result<Self, CodeError> {
        Ok(RootedTree::parse(s)?.canonical_code())
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn bond_marker(m: u8) -> &'static str {
    match m {
        2 => "=",
        3 => "#",
        _ => "",
    }
}

impl RootedTree {
    pub fn new(root: Element) -> Self {
        RootedTree { nodes: vec![TreeNode { element: root, parent: None, mult: 0, children: Vec::new() }] }
    }

    pub fn add_child(&mut self, parent: usize, element: Element, mult: u8) -> usize {
        let id = self.nodes.len();
        self.nodes.push(TreeNode { element, parent: Some(parent), mult, children: Vec::new() });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> &TreeNode {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root_element(&self) -> Element {
        self.nodes[0].element
    }

    pub fn non_h_count(&self) -> usize {
        self.nodes.iter().filter(|n| !n.element.is_hydrogen()).count()
    }

    /// Depth of the deepest non-hydrogen node (0 for a bare root).
    pub fn height(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        let mut best = 0;
        for i in 1..self.nodes.len() {
            let p = self.nodes[i].parent.expect("non-root has a parent");
            depth[i] = depth[p] + 1;
            if !self.nodes[i].element.is_hydrogen() {
                best = best.max(depth[i]);
            }
        }
        best
    }

    /// Valence of the root left over after its bonds inside the tree.
    pub fn root_residual_valence(&self) -> i32 {
        let used: i32 = self.nodes[0].children.iter().map(|&c| self.nodes[c].mult as i32).sum();
        self.nodes[0].element.valence() as i32 - used
    }

    /// Whether every non-root node has a full valence shell.
    pub fn is_saturated_below_root(&self) -> bool {
        (1..self.nodes.len()).all(|i| {
            let n = &self.nodes[i];
            let sum: u32 = n.mult as u32 + n.children.iter().map(|&c| self.nodes[c].mult as u32).sum::<u32>();
            sum == n.element.valence() as u32
        })
    }

    pub fn canonical_code(&self) -> CanonicalCode {
        // children are appended after their parents, so a reverse sweep is bottom-up
        let mut codes: Vec<String> = vec![String::new(); self.nodes.len()];
        for i in (0..self.nodes.len()).rev() {
            let mut parts: Vec<String> = self.nodes[i]
                .children
                .iter()
                .map(|&c| format!("({}{})", bond_marker(self.nodes[c].mult), codes[c]))
                .collect();
            parts.sort();
            let mut s = self.nodes[i].element.symbol();
            for p in parts {
                s.push_str(&p);
            }
            codes[i] = s;
        }
        CanonicalCode(std::mem::take(&mut codes[0]))
    }

    /// Parse a code (canonical or not) back into a tree.
    pub fn parse(code: &str) -> Result<RootedTree, CodeError> {
        let bytes = code.as_bytes();
        let mut pos = 0;
        let root = parse_element(code, &mut pos)?;
        let mut tree = RootedTree::new(root);
        parse_children(code, bytes, &mut pos, &mut tree, 0)?;
        if pos != bytes.len() {
            return Err(CodeError { pos, msg: "trailing input".into() });
        }
        Ok(tree)
    }
}

fn parse_element(code: &str, pos: &mut usize) -> Result<Element, CodeError> {
    let bytes = code.as_bytes();
    let start = *pos;
    if *pos >= bytes.len() || !bytes[*pos].is_ascii_uppercase() {
        return Err(CodeError { pos: *pos, msg: "expected element symbol".into() });
    }
    *pos += 1;
    while *pos < bytes.len() && bytes[*pos].is_ascii_lowercase() {
        *pos += 1;
    }
    if *pos + 1 < bytes.len() && bytes[*pos] == b'(' && bytes[*pos + 1].is_ascii_digit() {
        let mut end = *pos + 1;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end >= bytes.len() || bytes[end] != b')' {
            return Err(CodeError { pos: end, msg: "unterminated valence suffix".into() });
        }
        *pos = end + 1;
    }
    let token = &code[start..*pos];
    Element::parse(token).ok_or_else(|| CodeError { pos: start, msg: format!("unknown element {token:?}") })
}

fn parse_children(
    code: &str,
    bytes: &[u8],
    pos: &mut usize,
    tree: &mut RootedTree,
    parent: usize,
) -> Result<(), CodeError> {
    while *pos < bytes.len() && bytes[*pos] == b'(' {
        *pos += 1;
        let mult = match bytes.get(*pos) {
            Some(b'=') => {
                *pos += 1;
                2
            }
            Some(b'#') => {
                *pos += 1;
                3
            }
            _ => 1,
        };
        let el = parse_element(code, pos)?;
        let child = tree.add_child(parent, el, mult);
        parse_children(code, bytes, pos, tree, child)?;
        if bytes.get(*pos) != Some(&b')') {
            return Err(CodeError { pos: *pos, msg: "expected `)`".into() });
        }
        *pos += 1;
    }
    Ok(())
}
