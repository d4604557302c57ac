use std::collections::BTreeMap;

use serde::Serialize;

use super::{Bounds, EdgeClass, Family, TopologicalSpec};
use crate::chemgraph::ChemicalGraph;
use crate::twolayer::{decompose, TwoLayered};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub measured: u32,
    pub lb: u32,
    pub ub: u32,
    pub pass: bool,
}

/// How `g`'s interior expands the seed graph. Vertex indices refer to the
/// hydrogen-suppressed graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Image of each seed vertex.
    pub phi: Vec<usize>,
    /// Vertex sequence realizing each seed edge, endpoints included.
    pub paths: Vec<Vec<usize>>,
    /// Attached paths as (attachment vertex, path from the attachment outwards).
    pub attached: Vec<(usize, Vec<usize>)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SatisfactionReport {
    pub pass: bool,
    pub checks: Vec<BoundCheck>,
    pub witness: Option<Witness>,
}

impl SatisfactionReport {
    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn push(out: &mut Vec<BoundCheck>, name: String, measured: u32, b: Bounds) {
    out.push(BoundCheck { name, measured, lb: b.lb, ub: b.ub, pass: b.contains(measured) });
}

/// Keys with a nonzero count or a positive lower bound are reported; a key
/// outside a closed family is reported with bounds `[0, 0]`.
fn family<K: Ord + Clone + ToString>(
    out: &mut Vec<BoundCheck>,
    label: &str,
    fam: &Family<K>,
    counts: &BTreeMap<K, u32>,
) {
    let mut keys: Vec<&K> = counts.keys().collect();
    keys.extend(fam.entries.iter().filter(|(k, b)| b.lb > 0 && !counts.contains_key(k)).map(|(k, _)| k));
    keys.sort();
    for k in keys {
        let m = counts.get(k).copied().unwrap_or(0);
        let b = fam.bounds(k).unwrap_or(Bounds::exact(0));
        push(out, format!("{label}({})", k.to_string()), m, b);
    }
}

fn tally<K: Ord>(it: impl IntoIterator<Item = K>) -> BTreeMap<K, u32> {
    let mut m = BTreeMap::new();
    for k in it {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

/// Evaluate every bound of `spec` on `g` and search for a seed expansion.
pub fn check_satisfies(g: &ChemicalGraph, spec: &TopologicalSpec, rho: u32) -> SatisfactionReport {
    let mut checks = Vec::new();
    let d = match decompose(g, rho) {
        Ok(d) => d,
        Err(_) => {
            push(&mut checks, "decomposition".into(), 0, Bounds::exact(1));
            return SatisfactionReport { pass: false, checks, witness: None };
        }
    };
    let hs = d.suppressed();
    let interior = d.interior_vertices();
    push(&mut checks, "n".into(), hs.n() as u32, spec.n);
    push(&mut checks, "n_int".into(), interior.len() as u32, spec.n_int);

    family(&mut checks, "na", &spec.na, &tally(g.elements().iter().copied()));
    family(&mut checks, "na_int", &spec.na_int, &tally(interior.iter().map(|&v| hs.element(v))));
    family(&mut checks, "ns_int", &spec.ns_int, &tally(interior.iter().map(|&v| d.degree_symbol(v))));
    let cnt: Vec<usize> = hs.connecting().map(|(u, v)| vec![u, v]).unwrap_or_default();
    family(&mut checks, "ns_cnt", &spec.ns_cnt, &tally(cnt.iter().map(|&v| d.degree_symbol(v))));
    let int_cfg: Vec<_> = d.interior_edges().into_iter().map(|e| d.raw_edge_config(e)).collect();
    let lnk_cfg: Vec<_> = d.link_edges().into_iter().map(|e| d.raw_edge_config(e)).collect();
    family(&mut checks, "ec_int", &spec.ec_int, &tally(int_cfg.iter().copied()));
    family(&mut checks, "ac_int", &spec.ac_int, &tally(int_cfg.iter().map(|c| c.adjacency())));
    family(&mut checks, "ec_lnk", &spec.ec_lnk, &tally(lnk_cfg.iter().copied()));
    family(&mut checks, "ac_lnk", &spec.ac_lnk, &tally(lnk_cfg.iter().map(|c| c.adjacency())));
    family(&mut checks, "ac_lf", &spec.ac_lf, &tally(d.leaf_edge_configs()));

    let fc = tally(d.fringe_trees().iter().map(|f| f.code.clone()));
    for (i, f) in spec.fringes.iter().enumerate() {
        let m = fc.get(&f.code).copied().unwrap_or(0);
        if m > 0 || f.fc.lb > 0 {
            push(&mut checks, format!("fc(psi{}={})", i + 1, f.code), m, f.fc);
        }
    }
    for (code, &m) in &fc {
        if spec.fringe_index(code).is_none() {
            push(&mut checks, format!("fc({code}) outside catalog"), m, Bounds::exact(0));
        }
    }

    let witness = Search::new(&d, spec).run();
    match &witness {
        Some(w) => structural_checks(&mut checks, &d, spec, w),
        None => push(&mut checks, "seed expansion".into(), 0, Bounds::exact(1)),
    }
    SatisfactionReport { pass: checks.iter().all(|c| c.pass), checks, witness }
}

struct Measured {
    bd2: u32,
    bd3: u32,
    bl: u32,
    ch: u32,
}

fn path_bonds(d: &TwoLayered, path: &[usize]) -> (u32, u32) {
    let hs = d.suppressed();
    let mut out = (0, 0);
    for w in path.windows(2) {
        let e = hs.graph().edge_index(w[0], w[1]).expect("path follows edges");
        match hs.bonds()[e].mult {
            2 => out.0 += 1,
            3 => out.1 += 1,
            _ => {}
        }
    }
    out
}

fn attachments(spec: &TopologicalSpec, w: &Witness) -> (Vec<Measured>, Vec<Measured>) {
    let zero = || Measured { bd2: 0, bd3: 0, bl: 0, ch: 0 };
    let mut edges: Vec<Measured> = spec.seed.edges.iter().map(|_| zero()).collect();
    let mut verts: Vec<Measured> = spec.seed.vertices.iter().map(|_| zero()).collect();
    for (x, q) in &w.attached {
        let len = q.len() as u32 - 1;
        let slot = match w.phi.iter().position(|p| p == x) {
            Some(u) => &mut verts[u],
            None => {
                let a = w.paths.iter().position(|p| p[1..p.len() - 1].contains(x)).expect("attachment on a path");
                &mut edges[a]
            }
        };
        slot.bl += 1;
        slot.ch = slot.ch.max(len);
    }
    (edges, verts)
}

fn structural_checks(out: &mut Vec<BoundCheck>, d: &TwoLayered, spec: &TopologicalSpec, w: &Witness) {
    let (mut em, vm) = attachments(spec, w);
    let mut n_lnk = 0;
    for (a, e) in spec.seed.edges.iter().enumerate() {
        let len = w.paths[a].len() as u32 - 1;
        let (b2, b3) = path_bonds(d, &w.paths[a]);
        em[a].bd2 = b2;
        em[a].bd3 = b3;
        if e.class == EdgeClass::Path {
            push(out, format!("length({})", e.name), len, e.length);
            push(out, format!("bl({})", e.name), em[a].bl, e.bl);
            push(out, format!("ch({})", e.name), em[a].ch, e.ch);
        }
        push(out, format!("bd2({})", e.name), em[a].bd2, e.bd2);
        push(out, format!("bd3({})", e.name), em[a].bd3, e.bd3);
        if e.link {
            n_lnk += len - 1;
        }
    }
    for (u, v) in spec.seed.vertices.iter().enumerate() {
        if vm[u].bl > 0 || v.bl.lb > 0 || v.ch.lb > 0 {
            push(out, format!("bl({})", v.name), vm[u].bl, v.bl);
            push(out, format!("ch({})", v.name), vm[u].ch, v.ch);
        }
    }
    push(out, "n_lnk".into(), n_lnk, spec.n_lnk);
}

/// Backtracking search for a [`Witness`] meeting every structural bound.
struct Search<'a> {
    d: &'a TwoLayered,
    spec: &'a TopologicalSpec,
    interior: Vec<bool>,
    phi: Vec<Option<usize>>,
    used: Vec<bool>,
    paths: Vec<Option<Vec<usize>>>,
}

impl<'a> Search<'a> {
    fn new(d: &'a TwoLayered, spec: &'a TopologicalSpec) -> Self {
        let n = d.suppressed().n();
        Search {
            d,
            spec,
            interior: (0..n).map(|v| d.is_interior(v)).collect(),
            phi: vec![None; spec.seed.vertices.len()],
            used: vec![false; n],
            paths: vec![None; spec.seed.edges.len()],
        }
    }

    fn run(mut self) -> Option<Witness> {
        self.step()
    }

    fn allowed(&self, u: usize, x: usize) -> bool {
        self.interior[x] && !self.used[x] && self.spec.seed.vertices[u].elements.contains(&self.d.suppressed().element(x))
    }

    fn map_vertex(&mut self, u: usize, x: usize) -> Option<Witness> {
        self.phi[u] = Some(x);
        self.used[x] = true;
        let r = self.step();
        self.phi[u] = None;
        self.used[x] = false;
        r
    }

    fn step(&mut self) -> Option<Witness> {
        let spec = self.spec;
        let edges = &spec.seed.edges;
        let todo = |a: usize| self.paths[a].is_none();
        let mapped = |u: usize| self.phi[u].is_some();
        let next = (0..edges.len())
            .find(|&a| todo(a) && edges[a].class == EdgeClass::Single && (mapped(edges[a].u) || mapped(edges[a].v)))
            .or_else(|| (0..edges.len()).find(|&a| todo(a) && mapped(edges[a].u) && mapped(edges[a].v)))
            .or_else(|| (0..edges.len()).find(|&a| todo(a) && (mapped(edges[a].u) || mapped(edges[a].v))));
        let Some(a) = next else {
            // start a new seed component, or finish
            return match (0..self.phi.len()).find(|&u| self.phi[u].is_none()) {
                Some(u) => {
                    let cands: Vec<usize> = (0..self.used.len()).filter(|&x| self.allowed(u, x)).collect();
                    cands.into_iter().find_map(|x| self.map_vertex(u, x))
                }
                None => self.finish(),
            };
        };
        let e = &edges[a];
        let (from, to) = if mapped(e.u) { (e.u, e.v) } else { (e.v, e.u) };
        let start = self.phi[from].expect("mapped");
        let mut path = vec![start];
        self.extend(a, to, &mut path)
    }

    /// Grow `path` towards the image of seed vertex `to`.
    fn extend(&mut self, a: usize, to: usize, path: &mut Vec<usize>) -> Option<Witness> {
        let spec = self.spec;
        let e = &spec.seed.edges[a];
        let len = path.len() as u32 - 1;
        let (b2, b3) = path_bonds(self.d, path);
        if b2 > e.bd2.ub || b3 > e.bd3.ub {
            return None;
        }
        let hs = self.d.suppressed();
        let last = *path.last().expect("nonempty");
        let nbrs: Vec<(usize, usize)> = hs.graph().neighbors(last).to_vec();
        for (x, eid) in nbrs {
            if !self.interior[x] || hs.is_link(eid) != e.link {
                continue;
            }
            let end_ok = len + 1 >= e.length.lb;
            match self.phi[to] {
                Some(t) if x == t => {
                    if end_ok && !path.contains(&x) {
                        path.push(x);
                        let r = self.close(a, path);
                        path.pop();
                        if r.is_some() {
                            return r;
                        }
                    }
                    continue;
                }
                _ => {}
            }
            if self.phi[to].is_none() && end_ok && self.allowed(to, x) {
                path.push(x);
                self.phi[to] = Some(x);
                self.used[x] = true;
                let r = self.close(a, path);
                self.phi[to] = None;
                self.used[x] = false;
                path.pop();
                if r.is_some() {
                    return r;
                }
            }
            if len + 1 < e.length.ub && !self.used[x] {
                path.push(x);
                self.used[x] = true;
                let r = self.extend(a, to, path);
                self.used[x] = false;
                path.pop();
                if r.is_some() {
                    return r;
                }
            }
        }
        None
    }

    fn close(&mut self, a: usize, path: &[usize]) -> Option<Witness> {
        let spec = self.spec;
        let e = &spec.seed.edges[a];
        let (b2, b3) = path_bonds(self.d, path);
        if !e.bd2.contains(b2) || !e.bd3.contains(b3) {
            return None;
        }
        self.paths[a] = Some(path.to_vec());
        let r = self.step();
        self.paths[a] = None;
        r
    }

    fn finish(&self) -> Option<Witness> {
        let hs = self.d.suppressed();
        let g = hs.graph();
        let n = hs.n();
        let paths: Vec<Vec<usize>> = self.paths.iter().map(|p| p.clone().expect("all edges done")).collect();
        let phi: Vec<usize> = self.phi.iter().map(|p| p.expect("all mapped")).collect();

        // every link-edge lies on a realized link seed edge
        let on_link: u32 = self.spec.seed.edges.iter().zip(&paths).filter(|(e, _)| e.link).map(|(_, p)| p.len() as u32 - 1).sum();
        if on_link as usize != self.d.link_edges().len() {
            return None;
        }

        let mut seen = vec![false; n];
        let mut attached = Vec::new();
        let mut hosts = Vec::new();
        let mut q_vertices = 0;
        for s in 0..n {
            if !self.interior[s] || self.used[s] || seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            let mut outside = Vec::new();
            let mut inner_edges = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &(w, _) in g.neighbors(v) {
                    if !self.interior[w] {
                        continue;
                    }
                    if self.used[w] {
                        outside.push((w, v));
                    } else {
                        inner_edges += 1;
                        if !seen[w] {
                            seen[w] = true;
                            comp.push(w);
                        }
                    }
                }
            }
            inner_edges /= 2;
            if outside.len() != 1 || inner_edges + 1 != comp.len() {
                return None;
            }
            let (host, tip) = outside[0];
            let inner_deg = |v: usize| g.neighbors(v).iter().filter(|&&(w, _)| self.interior[w] && !self.used[w]).count();
            if comp.iter().any(|&v| inner_deg(v) > 2) || inner_deg(tip) > 1 || hosts.contains(&host) {
                return None;
            }
            hosts.push(host);
            // walk the path outwards from the tip
            let mut q = vec![host, tip];
            loop {
                let last = *q.last().expect("nonempty");
                let prev = q[q.len() - 2];
                match g.neighbors(last).iter().find(|&&(w, _)| w != prev && self.interior[w] && !self.used[w]) {
                    Some(&(w, _)) => q.push(w),
                    None => break,
                }
            }
            q_vertices += comp.len();
            attached.push((host, q));
        }
        let skeleton: usize = paths.iter().map(|p| p.len() - 1).sum::<usize>() + q_vertices;
        if skeleton != self.d.interior_edges().len() {
            return None;
        }
        let w = Witness { phi, paths, attached };
        let mut checks = Vec::new();
        structural_checks(&mut checks, self.d, self.spec, &w);
        checks.iter().all(|c| c.pass).then_some(w)
    }
}
