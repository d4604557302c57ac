//! The PMG text format.
//!
//! ```text
//! PMG 1
//! ATOM <id> <element-token>
//! BOND <id1> <id2> <mult>
//! LINK <id1> <id2>
//! CONNECT <id1> <id2>
//! ```
//!
//! `#` starts a comment that runs to the end of the line; blank lines are
//! ignored. The first non-blank line must be `PMG 1`. `LINK` marks an
//! existing bond as a link-edge and `CONNECT` (at most once) names the
//! connecting-vertices, which must be the ends of a link-edge.
//!
//! The serializer writes `PMG 1`, then atoms by ascending id, bonds sorted by
//! `(id1, id2)` with `id1 < id2`, link lines in the same order and finally the
//! optional `CONNECT` line, each terminated by `\n`.

use std::fmt::Write;

use super::{ChemError, ChemicalGraph, Element, GraphSpec, ValidationOptions};

pub fn parse_pmg(text: &str) -> Result<ChemicalGraph, ChemError> {
    parse_pmg_with(text, ValidationOptions::default())
}

pub fn parse_pmg_with(text: &str, opts: ValidationOptions) -> Result<ChemicalGraph, ChemError> {
    let mut spec = GraphSpec::default();
    let mut header = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let syntax = |msg: &str| ChemError::Syntax { line: line_no, msg: msg.to_string() };
        if !header {
            if toks != ["PMG", "1"] {
                return Err(syntax("expected header `PMG 1`"));
            }
            header = true;
            continue;
        }
        let id = |s: &str| s.parse::<u32>().map_err(|_| syntax(&format!("bad atom id {s:?}")));
        match toks.as_slice() {
            ["ATOM", a, el] => {
                let e = Element::parse(el).ok_or_else(|| ChemError::UnknownElement {
                    line: line_no,
                    token: el.to_string(),
                })?;
                spec.atoms.push((id(a)?, e));
            }
            ["BOND", a, b, m] => {
                let m: u8 = m.parse().map_err(|_| syntax(&format!("bad multiplicity {m:?}")))?;
                spec.bonds.push((id(a)?, id(b)?, m));
            }
            ["LINK", a, b] => spec.links.push((id(a)?, id(b)?)),
            ["CONNECT", a, b] => {
                if spec.connect.is_some() {
                    return Err(syntax("second CONNECT line"));
                }
                spec.connect = Some((id(a)?, id(b)?));
            }
            _ => return Err(syntax(&format!("unrecognized record {line:?}"))),
        }
    }
    if !header {
        return Err(ChemError::Syntax { line: 1, msg: "missing header `PMG 1`".into() });
    }
    ChemicalGraph::with_options(spec, opts)
}

pub fn serialize_pmg(g: &ChemicalGraph) -> String {
    let mut out = String::from("PMG 1\n");
    for v in 0..g.n() {
        let _ = writeln!(out, "ATOM {} {}", g.id(v), g.element(v));
    }
    for b in g.bonds() {
        let _ = writeln!(out, "BOND {} {} {}", g.id(b.u), g.id(b.v), b.mult);
    }
    for e in g.link_edges() {
        let b = g.bonds()[e];
        let _ = writeln!(out, "LINK {} {}", g.id(b.u), g.id(b.v));
    }
    if let Some((u, v)) = g.connecting() {
        let _ = writeln!(out, "CONNECT {} {}", g.id(u), g.id(v));
    }
    out
}
