//! Structural primitives on simple undirected graphs: connectivity, bridges,
//! rank, core-edges, heights by iterated leaf removal, k-leanness and
//! circular edge sets.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph is acyclic, no core is defined")]
    Acyclic,
}

/// A simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl SimpleGraph {
    /// Build from an edge list. Callers guarantee no loops or parallel edges.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            debug_assert!(u != v && u < n && v < n);
            adj[u].push((v, i));
            adj[v].push((u, i));
        }
        SimpleGraph { n, edges, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(neighbor, edge index)` pairs incident to `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.adj[u].iter().find(|&&(w, _)| w == v).map(|&(_, e)| e)
    }

    /// Number of connected components, ignoring edges with `removed[e]`.
    pub fn component_count_without(&self, removed: &[bool]) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &(w, e) in &self.adj[v] {
                    if !removed[e] && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.component_count_without(&vec![false; self.m()]) == 1
    }

    /// Bridge flags per edge (iterative low-link), ignoring `skip` if given.
    pub fn bridges_without(&self, skip: Option<usize>) -> Vec<bool> {
        let mut is_bridge = vec![false; self.m()];
        let mut disc = vec![usize::MAX; self.n];
        let mut low = vec![0usize; self.n];
        let mut timer = 0;
        for s in 0..self.n {
            if disc[s] != usize::MAX {
                continue;
            }
            // (vertex, parent edge, next adjacency position)
            let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(s, None, 0)];
            disc[s] = timer;
            low[s] = timer;
            timer += 1;
            while let Some(&mut (v, pe, ref mut pos)) = stack.last_mut() {
                if *pos < self.adj[v].len() {
                    let (w, e) = self.adj[v][*pos];
                    *pos += 1;
                    if Some(e) == skip || Some(e) == pe {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, Some(e), 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let (Some(e), Some(&(p, _, _))) = (pe, stack.last()) {
                        low[p] = low[p].min(low[v]);
                        if low[v] > disc[p] {
                            is_bridge[e] = true;
                        }
                    }
                }
            }
        }
        is_bridge
    }

    pub fn bridges(&self) -> Vec<bool> {
        self.bridges_without(None)
    }

    /// Induced subgraph on `keep` (in the given order), with the map from new
    /// to old edge indices.
    pub fn induced(&self, keep: &[usize]) -> (SimpleGraph, Vec<usize>) {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let mut edges = Vec::new();
        let mut emap = Vec::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if pos[u] != usize::MAX && pos[v] != usize::MAX {
                edges.push((pos[u], pos[v]));
                emap.push(e);
            }
        }
        (SimpleGraph::new(keep.len(), edges), emap)
    }
}

/// Cycle rank `|E| - |V| + 1` of a connected graph.
pub fn rank(g: &SimpleGraph) -> Result<usize, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    Ok(g.m() + 1 - g.n().max(1))
}

/// Core-edges and core-vertices of a connected cyclic graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Core {
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
}

/// An edge is a core-edge iff it survives repeated removal of vertices of
/// degree at most one (the 2-core).
pub fn core_edges(g: &SimpleGraph) -> Result<Core, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let mut deg: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; g.n()];
    let mut queue: Vec<usize> = (0..g.n()).filter(|&v| deg[v] <= 1).collect();
    while let Some(v) = queue.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &(w, _) in g.neighbors(v) {
            if alive[w] {
                deg[w] -= 1;
                if deg[w] == 1 {
                    queue.push(w);
                }
            }
        }
    }
    let edges: Vec<usize> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| alive[u] && alive[v])
        .map(|(e, _)| e)
        .collect();
    if edges.is_empty() {
        return Err(GraphError::Acyclic);
    }
    let vertices = (0..g.n()).filter(|&v| alive[v]).collect();
    Ok(Core { edges, vertices })
}

/// Heights by iterated leaf removal.
///
/// A leaf is a non-root vertex of degree one in the current graph. Vertices
/// removed in round `i` get height `i`; a never-removed vertex adjacent to a
/// removed one gets one more than the largest such neighbor; all other
/// vertices have no height (`None`). Also returns which vertices were
/// removed (tree vertices).
pub fn heights(g: &SimpleGraph, root: Option<usize>) -> (Vec<Option<u32>>, Vec<bool>) {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut h: Vec<Option<u32>> = vec![None; n];
    let mut round = 0u32;
    loop {
        let leaves: Vec<usize> = (0..n)
            .filter(|&v| alive[v] && deg[v] == 1 && Some(v) != root)
            .collect();
        if leaves.is_empty() {
            break;
        }
        for &v in &leaves {
            alive[v] = false;
            h[v] = Some(round);
        }
        for &v in &leaves {
            for &(w, _) in g.neighbors(v) {
                if alive[w] {
                    deg[w] -= 1;
                }
            }
        }
        round += 1;
    }
    let tree: Vec<bool> = alive.iter().map(|a| !a).collect();
    for v in 0..n {
        if alive[v] {
            h[v] = g
                .neighbors(v)
                .iter()
                .filter(|&&(w, _)| tree[w])
                .filter_map(|&(w, _)| h[w])
                .max()
                .map(|x| x + 1);
        }
    }
    (h, tree)
}

/// Whether a graph is k-lean.
///
/// A rooted tree is k-lean when it has at most one vertex of height `k`.
/// For a cyclic graph, every tree induced by non-core-edges and rooted at its
/// core-vertex must be k-lean. An acyclic graph without a root is treated
/// as an unrooted tree.
pub fn k_lean(g: &SimpleGraph, k: u32, root: Option<usize>) -> Result<bool, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let count_k = |sub: &SimpleGraph, r: Option<usize>| {
        heights(sub, r).0.iter().filter(|&&x| x == Some(k)).count()
    };
    if g.m() + 1 == g.n() || g.n() == 0 {
        return Ok(count_k(g, root) <= 1);
    }
    let core = core_edges(g)?;
    let mut is_core_edge = vec![false; g.m()];
    for &e in &core.edges {
        is_core_edge[e] = true;
    }
    let mut is_core_vertex = vec![false; g.n()];
    for &v in &core.vertices {
        is_core_vertex[v] = true;
    }
    for &r in &core.vertices {
        // collect the non-core tree hanging at r
        let mut members = vec![r];
        let mut stack = vec![r];
        let mut seen = vec![false; g.n()];
        seen[r] = true;
        while let Some(v) = stack.pop() {
            for &(w, e) in g.neighbors(v) {
                if !is_core_edge[e] && !seen[w] {
                    debug_assert!(!is_core_vertex[w]);
                    seen[w] = true;
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        if members.len() == 1 {
            continue;
        }
        let (sub, _) = g.induced(&members);
        if count_k(&sub, Some(0)) > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `set` is a circular edge set: some cycle contains all of it and,
/// for every member `e`, all other members are bridges of `G - e`.
///
/// If every member lies on a cycle and each pair forms a 2-edge cut, every
/// cycle through one member crosses each cut an even number of times and so
/// passes all members; the two conditions below are therefore sufficient.
pub fn is_circular_set(g: &SimpleGraph, set: &[usize]) -> bool {
    if set.is_empty() {
        return true;
    }
    let base = g.bridges();
    if set.iter().any(|&e| base[e]) {
        return false;
    }
    for &e in set {
        let b = g.bridges_without(Some(e));
        if set.iter().any(|&f| f != e && !b[f]) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> SimpleGraph {
        SimpleGraph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
    }

    fn path(n: usize) -> SimpleGraph {
        SimpleGraph::new(n, (0..n - 1).map(|i| (i, i + 1)).collect())
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&cycle(6)), Ok(1));
        assert_eq!(rank(&path(5)), Ok(0));
        let bowtie = SimpleGraph::new(5, vec![(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]);
        assert_eq!(rank(&bowtie), Ok(2));
        let disc = SimpleGraph::new(3, vec![(0, 1)]);
        assert_eq!(rank(&disc), Err(GraphError::Disconnected));
    }

    #[test]
    fn core_of_cycle_with_tail() {
        let mut edges: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        edges.push((0, 6));
        edges.push((6, 7));
        let g = SimpleGraph::new(8, edges);
        let core = core_edges(&g).unwrap();
        assert_eq!(core.edges, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(core.vertices, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn bridge_between_cycles_is_core() {
        let g = SimpleGraph::new(
            6,
            vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)],
        );
        let core = core_edges(&g).unwrap();
        assert!(core.edges.contains(&6));
        assert_eq!(core.edges.len(), 7);
        assert_eq!(core_edges(&path(4)), Err(GraphError::Acyclic));
    }

    #[test]
    fn bridges_on_path_and_cycle() {
        assert!(path(4).bridges().iter().all(|&b| b));
        assert!(cycle(5).bridges().iter().all(|&b| !b));
        let b = cycle(5).bridges_without(Some(0));
        assert!(!b[0]);
        assert!(b[1..].iter().all(|&x| x));
    }

    #[test]
    fn heights_of_star_rooted_at_center() {
        let star = SimpleGraph::new(5, vec![(0, 1), (0, 2), (0, 3), (0, 4)]);
        let (h, _) = heights(&star, Some(0));
        assert_eq!(h, vec![Some(1), Some(0), Some(0), Some(0), Some(0)]);
        assert_eq!(k_lean(&star, 1, Some(0)), Ok(true));
        assert_eq!(k_lean(&star, 0, Some(0)), Ok(false));
    }

    #[test]
    fn path_is_lean() {
        for k in 0..5 {
            assert_eq!(k_lean(&path(7), k, Some(0)), Ok(true));
        }
    }

    #[test]
    fn two_deep_limbs_are_not_lean() {
        // 4-cycle; core vertex 0 carries two pendant paths of 3 vertices
        let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
        edges.extend([(0, 4), (4, 5), (5, 6), (0, 7), (7, 8), (8, 9)]);
        let g = SimpleGraph::new(10, edges);
        assert_eq!(k_lean(&g, 2, None), Ok(false));
        assert_eq!(k_lean(&g, 3, None), Ok(true));
        // same limbs on different core vertices
        let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
        edges.extend([(0, 4), (4, 5), (5, 6), (2, 7), (7, 8), (8, 9)]);
        let g = SimpleGraph::new(10, edges);
        assert_eq!(k_lean(&g, 2, None), Ok(true));
    }

    #[test]
    fn circular_sets() {
        // 6-cycle with a chord 0-3
        let mut edges: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        edges.push((0, 3));
        let g = SimpleGraph::new(6, edges);
        assert!(is_circular_set(&g, &[]));
        // edges 0-1 and 3-4 lie on different sides of the chord
        assert!(!is_circular_set(&g, &[0, 3]));
        // 0-1 and 1-2 are on the same side and every cycle through one passes both
        assert!(is_circular_set(&g, &[0, 1]));
        // adding the chord breaks it
        assert!(!is_circular_set(&g, &[0, 1, 6]));
        // a bridge is never in a circular set
        assert!(!is_circular_set(&path(3), &[0]));
    }
}
