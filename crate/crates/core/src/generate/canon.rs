//! Canonical form of a whole chemical graph.
//!
//! Works on the hydrogen-suppressed graph with hydrogen counts as vertex
//! labels, which loses nothing. Colour refinement splits vertices by their
//! neighbourhoods; remaining ties are broken by individualizing each member
//! of the first non-singleton class in turn and keeping the smallest
//! encoding.

use sha2::{Digest, Sha256};

use crate::chemgraph::ChemicalGraph;

struct Labeled {
    labels: Vec<String>,
    /// (neighbour, bond label) per vertex.
    adj: Vec<Vec<(usize, u8)>>,
    edges: Vec<(usize, usize, u8)>,
}

fn refine(g: &Labeled, mut colors: Vec<usize>) -> Vec<usize> {
    let mut classes = distinct(&colors);
    loop {
        let sigs: Vec<(usize, Vec<(usize, u8)>)> = (0..colors.len())
            .map(|v| {
                let mut nb: Vec<(usize, u8)> = g.adj[v].iter().map(|&(w, b)| (colors[w], b)).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut sorted = sigs.clone();
        sorted.sort();
        sorted.dedup();
        colors = sigs.iter().map(|s| sorted.binary_search(s).expect("present")).collect();
        let now = sorted.len();
        if now == classes {
            return colors;
        }
        classes = now;
    }
}

fn distinct(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn encode(g: &Labeled, colors: &[usize]) -> String {
    // colours are a permutation of 0..n here
    let mut order = vec![0; colors.len()];
    for (v, &c) in colors.iter().enumerate() {
        order[c] = v;
    }
    let mut s: String = order.iter().map(|&v| format!("{};", g.labels[v])).collect();
    let mut es: Vec<(usize, usize, u8)> = g
        .edges
        .iter()
        .map(|&(u, v, b)| {
            let (a, c) = (colors[u], colors[v]);
            (a.min(c), a.max(c), b)
        })
        .collect();
    es.sort_unstable();
    for (a, c, b) in es {
        s.push_str(&format!("{a}-{c}:{b};"));
    }
    s
}

fn search(g: &Labeled, colors: Vec<usize>) -> String {
    let colors = refine(g, colors);
    let n = colors.len();
    if distinct(&colors) == n {
        return encode(g, &colors);
    }
    let mut size = vec![0usize; n];
    for &c in &colors {
        size[c] += 1;
    }
    let target = (0..n).find(|&c| size[c] > 1).expect("a tied class");
    let mut best: Option<String> = None;
    for v in (0..n).filter(|&v| colors[v] == target) {
        let split: Vec<usize> = colors.iter().enumerate().map(|(w, &c)| 2 * c + usize::from(w != v)).collect();
        let enc = search(g, split);
        if best.as_ref().map_or(true, |b| enc < *b) {
            best = Some(enc);
        }
    }
    best.expect("class is nonempty")
}

/// Canonical string of `g`: equal for isomorphic graphs (including link
/// flags and the connecting pair), different otherwise.
pub fn canonical_string(g: &ChemicalGraph) -> String {
    let hs = g.hydrogen_suppress();
    let n = hs.n();
    let cnt = hs.connecting();
    let labels: Vec<String> = (0..n)
        .map(|v| {
            let c = cnt.is_some_and(|(a, b)| a == v || b == v);
            format!("{}H{}{}", hs.element(v), hs.hydrogens(v), if c { "*" } else { "" })
        })
        .collect();
    let mut adj = vec![Vec::new(); n];
    let mut edges = Vec::new();
    for (e, b) in hs.bonds().iter().enumerate() {
        let lab = b.mult + if hs.is_link(e) { 8 } else { 0 };
        adj[b.u].push((b.v, lab));
        adj[b.v].push((b.u, lab));
        edges.push((b.u, b.v, lab));
    }
    let g = Labeled { labels, adj, edges };
    let mut sorted = g.labels.clone();
    sorted.sort();
    sorted.dedup();
    let init = g.labels.iter().map(|l| sorted.binary_search(l).expect("present")).collect();
    search(&g, init)
}

pub fn canonical_hash(g: &ChemicalGraph) -> String {
    hex::encode(Sha256::digest(canonical_string(g).as_bytes()))
}
