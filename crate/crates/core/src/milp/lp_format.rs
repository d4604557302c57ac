//! CPLEX LP text for [`MilpModel`].
//!
//! ```text
//! \ Problem: <name>
//! Minimize
//!  obj: <terms>            (`0 <first var>` when there is no objective)
//! Subject To
//!  <name>: <terms> <= | = | >= <rhs>
//! Bounds
//!  <l> <= <var> <= <u>  |  <var> >= <l>  |  -inf <= <var> <= <u>  |  <var> free  |  <var> = <v>
//! Generals
//!  <integer vars, space separated>
//! End
//! ```
//!
//! Terms are `c name` joined by ` + ` / ` - `. Numbers use the shortest
//! decimal form that reads back to the same `f64`, so parsing the output
//! gives back the model exactly. Every variable gets a line in `Bounds`, in
//! index order; the parser uses that order.

use std::collections::HashMap;
use std::fmt::Write;

use thiserror::Error;

use super::{Constraint, MilpModel, Relation, VarKind, Variable};

#[derive(Debug, Error, PartialEq)]
#[error("LP line {line}: {msg}")]
pub struct LpParseError {
    pub line: usize,
    pub msg: String,
}

fn write_terms(out: &mut String, terms: &[(usize, f64)], vars: &[Variable]) {
    for (k, &(i, c)) in terms.iter().enumerate() {
        let name = &vars[i].name;
        match (k, c < 0.0 || (c == 0.0 && c.is_sign_negative())) {
            (0, false) => write!(out, "{c} {name}"),
            (0, true) => write!(out, "- {} {name}", -c),
            (_, false) => write!(out, " + {c} {name}"),
            (_, true) => write!(out, " - {} {name}", -c),
        }
        .unwrap();
    }
}

pub fn emit_lp(m: &MilpModel) -> String {
    let mut out = String::new();
    let name = if m.name.is_empty() { "model" } else { &m.name };
    writeln!(out, "\\ Problem: {name}").unwrap();
    out.push_str("Minimize\n obj: ");
    if m.objective.is_empty() {
        match m.vars.first() {
            Some(v) => write!(out, "0 {}", v.name).unwrap(),
            None => out.push('0'),
        }
    } else {
        write_terms(&mut out, &m.objective, &m.vars);
    }
    out.push_str("\nSubject To\n");
    for c in &m.constraints {
        write!(out, " {}: ", c.name).unwrap();
        if c.terms.is_empty() {
            write!(out, "0 {}", m.vars.first().map_or("x", |v| v.name.as_str())).unwrap();
        } else {
            write_terms(&mut out, &c.terms, &m.vars);
        }
        let rel = match c.rel {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        writeln!(out, " {rel} {}", c.rhs).unwrap();
    }
    out.push_str("Bounds\n");
    for v in &m.vars {
        let n = &v.name;
        match (v.lower, v.upper) {
            (Some(l), Some(u)) if l == u => writeln!(out, " {n} = {l}"),
            (Some(l), Some(u)) => writeln!(out, " {l} <= {n} <= {u}"),
            (Some(l), None) => writeln!(out, " {n} >= {l}"),
            (None, Some(u)) => writeln!(out, " -inf <= {n} <= {u}"),
            (None, None) => writeln!(out, " {n} free"),
        }
        .unwrap();
    }
    let ints: Vec<&str> = m.vars.iter().filter(|v| v.kind == VarKind::Integer).map(|v| v.name.as_str()).collect();
    if !ints.is_empty() {
        writeln!(out, "Generals\n {}", ints.join(" ")).unwrap();
    }
    out.push_str("End\n");
    out
}

#[derive(PartialEq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Generals,
    End,
}

struct Parser {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Parser {
    fn var(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }

    /// `[-] c name (+|- c name)*`
    fn terms(&mut self, s: &str, line: usize) -> Result<Vec<(usize, f64)>, LpParseError> {
        let err = |msg: String| LpParseError { line, msg };
        let toks: Vec<&str> = s.split_whitespace().collect();
        let mut out = Vec::new();
        let mut i = 0;
        let mut sign = 1.0;
        while i < toks.len() {
            match toks[i] {
                "+" => {
                    sign = 1.0;
                    i += 1;
                    continue;
                }
                "-" => {
                    sign = -1.0;
                    i += 1;
                    continue;
                }
                _ => {}
            }
            let (coef, name) = match toks[i].parse::<f64>() {
                Ok(c) => {
                    let name = toks.get(i + 1).ok_or_else(|| err(format!("coefficient {c} without variable")))?;
                    i += 2;
                    (c, *name)
                }
                Err(_) => {
                    i += 1;
                    (1.0, toks[i - 1])
                }
            };
            out.push((self.var(name), sign * coef));
            sign = 1.0;
        }
        Ok(out)
    }
}

fn num(s: &str, line: usize) -> Result<Option<f64>, LpParseError> {
    match s {
        "-inf" | "-infinity" => Ok(None),
        "+inf" | "inf" | "infinity" => Ok(None),
        _ => s.parse::<f64>().map(Some).map_err(|_| LpParseError { line, msg: format!("bad number {s:?}") }),
    }
}

pub fn parse_lp(text: &str) -> Result<MilpModel, LpParseError> {
    let mut p = Parser { names: Vec::new(), index: HashMap::new() };
    let mut name = String::new();
    let mut objective = Vec::new();
    let mut constraints: Vec<Constraint> = Vec::new();
    let mut bounds: HashMap<usize, (Option<f64>, Option<f64>)> = HashMap::new();
    let mut bound_order: Vec<usize> = Vec::new();
    let mut generals: Vec<usize> = Vec::new();
    let mut section = Section::None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let err = |msg: &str| LpParseError { line, msg: msg.to_string() };
        if let Some(rest) = raw.trim_start().strip_prefix('\\') {
            if let Some(n) = rest.trim().strip_prefix("Problem:") {
                name = n.trim().to_string();
            }
            continue;
        }
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        match t.to_ascii_lowercase().as_str() {
            "minimize" | "minimise" | "min" => {
                section = Section::Objective;
                continue;
            }
            "subject to" | "st" | "s.t." => {
                section = Section::Constraints;
                continue;
            }
            "bounds" => {
                section = Section::Bounds;
                continue;
            }
            "generals" | "general" | "integers" => {
                section = Section::Generals;
                continue;
            }
            "end" => {
                section = Section::End;
                continue;
            }
            _ => {}
        }
        match section {
            Section::None | Section::End => return Err(err("text outside any section")),
            Section::Objective => {
                let body = t.split_once(':').map_or(t, |(_, b)| b);
                objective.extend(p.terms(body, line)?.into_iter().filter(|t| t.1 != 0.0));
            }
            Section::Constraints => {
                let (cname, body) = t.split_once(':').ok_or_else(|| err("constraint without name"))?;
                let (lhs, rel, rhs) = ["<=", ">=", "="]
                    .iter()
                    .find_map(|op| body.split_once(op).map(|(l, r)| (l, *op, r)))
                    .ok_or_else(|| err("constraint without relation"))?;
                let rel = match rel {
                    "<=" => Relation::Le,
                    ">=" => Relation::Ge,
                    _ => Relation::Eq,
                };
                let rhs = num(rhs.trim(), line)?.ok_or_else(|| err("infinite right-hand side"))?;
                let mut terms = p.terms(lhs, line)?;
                // `0 x` stands for an empty row
                terms.retain(|t| t.1 != 0.0);
                constraints.push(Constraint { name: cname.trim().to_string(), terms, rel, rhs });
            }
            Section::Bounds => {
                let toks: Vec<&str> = t.split_whitespace().collect();
                let (v, b) = match toks.as_slice() {
                    [n, "free"] => (p.var(n), (None, None)),
                    [n, "=", x] => {
                        let x = num(x, line)?;
                        (p.var(n), (x, x))
                    }
                    [n, ">=", x] => (p.var(n), (num(x, line)?, None)),
                    [n, "<=", x] => (p.var(n), (Some(0.0), num(x, line)?)),
                    [l, "<=", n, "<=", u] => (p.var(n), (num(l, line)?, num(u, line)?)),
                    _ => return Err(err("unrecognized bound")),
                };
                if bounds.insert(v, b).is_none() {
                    bound_order.push(v);
                }
            }
            Section::Generals => {
                for n in t.split_whitespace() {
                    generals.push(p.var(n));
                }
            }
        }
    }
    if section != Section::End {
        return Err(LpParseError { line: text.lines().count(), msg: "missing End".into() });
    }
    // variables listed under Bounds keep that order, the rest follow
    let mut order = bound_order.clone();
    order.extend((0..p.names.len()).filter(|i| !bounds.contains_key(i)));
    let mut new_index = vec![0; p.names.len()];
    for (new, &old) in order.iter().enumerate() {
        new_index[old] = new;
    }
    let vars = order
        .iter()
        .map(|&old| {
            let (lower, upper) = bounds.get(&old).copied().unwrap_or((Some(0.0), None));
            let kind = if generals.contains(&old) { VarKind::Integer } else { VarKind::Continuous };
            Variable { name: p.names[old].clone(), lower, upper, kind }
        })
        .collect();
    let remap = |t: Vec<(usize, f64)>| t.into_iter().map(|(i, c)| (new_index[i], c)).collect::<Vec<_>>();
    Ok(MilpModel {
        name,
        vars,
        constraints: constraints.into_iter().map(|c| Constraint { terms: remap(c.terms), ..c }).collect(),
        objective: remap(objective),
    })
}
