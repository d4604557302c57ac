mod common;

use std::collections::{BTreeMap, BTreeSet};

use polyinv::chemgraph::{core_edges, is_circular_set, k_lean, parse_pmg, rank, serialize_pmg, SimpleGraph};
use polyinv::twolayer::{decompose, DEFAULT_RHO};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---- brute-force oracles -------------------------------------------------

fn connected_without(g: &SimpleGraph, removed: &BTreeSet<usize>) -> bool {
    let mask: Vec<bool> = (0..g.m()).map(|e| removed.contains(&e)).collect();
    g.component_count_without(&mask) == 1
}

fn is_forest(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// Smallest number of edges whose removal leaves no cycle.
fn rank_oracle(g: &SimpleGraph) -> usize {
    let m = g.m();
    (0..=m)
        .find(|&k| {
            (0u32..1 << m).filter(|s| s.count_ones() as usize == k).any(|s| {
                let kept: Vec<_> = (0..m).filter(|&e| s >> e & 1 == 0).map(|e| g.edges()[e]).collect();
                is_forest(g.n(), &kept)
            })
        })
        .unwrap()
}

/// Component of `start` in `g - removed` as (vertex count, edge count).
fn component_size(g: &SimpleGraph, start: usize, removed: usize) -> (usize, usize) {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![start];
    seen[start] = true;
    let mut verts = 0;
    let mut edges = BTreeSet::new();
    while let Some(v) = stack.pop() {
        verts += 1;
        for &(w, e) in g.neighbors(v) {
            if e == removed {
                continue;
            }
            edges.insert(e);
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    (verts, edges.len())
}

fn core_oracle(g: &SimpleGraph) -> Vec<usize> {
    (0..g.m())
        .filter(|&e| {
            let removed: BTreeSet<usize> = [e].into();
            if connected_without(g, &removed) {
                return true; // on a cycle
            }
            let (u, v) = g.edges()[e];
            let (nu, mu) = component_size(g, u, e);
            let (nv, mv) = component_size(g, v, e);
            mu >= nu && mv >= nv
        })
        .collect()
}

/// Literal iterated leaf removal on vertex sets.
fn heights_oracle(g: &SimpleGraph, alive0: &BTreeSet<usize>, root: Option<usize>) -> BTreeMap<usize, u32> {
    let mut alive = alive0.clone();
    let mut h = BTreeMap::new();
    let mut i = 0;
    loop {
        let leaves: Vec<usize> = alive
            .iter()
            .copied()
            .filter(|&v| Some(v) != root && g.neighbors(v).iter().filter(|(w, _)| alive.contains(w)).count() == 1)
            .collect();
        if leaves.is_empty() {
            break;
        }
        for v in leaves {
            alive.remove(&v);
            h.insert(v, i);
        }
        i += 1;
    }
    for &v in &alive {
        let best = g.neighbors(v).iter().filter_map(|(w, _)| h.get(w).copied()).max();
        if let Some(b) = best {
            h.insert(v, b + 1);
        }
    }
    h
}

fn k_lean_oracle(g: &SimpleGraph, k: u32) -> bool {
    let core: BTreeSet<usize> = core_oracle(g).into_iter().collect();
    let core_vertices: BTreeSet<usize> = core.iter().flat_map(|&e| [g.edges()[e].0, g.edges()[e].1]).collect();
    for &r in &core_vertices {
        // the non-core tree hanging at r, restricted induced on its vertex set
        let mut members = BTreeSet::from([r]);
        let mut stack = vec![r];
        while let Some(v) = stack.pop() {
            for &(w, e) in g.neighbors(v) {
                if !core.contains(&e) && members.insert(w) {
                    stack.push(w);
                }
            }
        }
        let sub = {
            let keep: Vec<usize> = members.iter().copied().collect();
            let pos = |x: usize| keep.iter().position(|&y| y == x).unwrap();
            let edges = g
                .edges()
                .iter()
                .filter(|(a, b)| members.contains(a) && members.contains(b))
                .map(|&(a, b)| (pos(a), pos(b)))
                .collect();
            (SimpleGraph::new(keep.len(), edges), pos(r))
        };
        let all: BTreeSet<usize> = (0..sub.0.n()).collect();
        let h = heights_oracle(&sub.0, &all, Some(sub.1));
        if h.values().filter(|&&x| x == k).count() > 1 {
            return false;
        }
    }
    true
}

/// All simple cycles as edge sets.
fn cycles_oracle(g: &SimpleGraph) -> Vec<BTreeSet<usize>> {
    let mut out: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    fn dfs(g: &SimpleGraph, start: usize, v: usize, vis: &mut Vec<bool>, path: &mut Vec<usize>, out: &mut BTreeSet<BTreeSet<usize>>) {
        for &(w, e) in g.neighbors(v) {
            if path.contains(&e) {
                continue;
            }
            if w == start && path.len() >= 2 {
                let mut c: BTreeSet<usize> = path.iter().copied().collect();
                c.insert(e);
                out.insert(c);
            } else if !vis[w] && w > start {
                vis[w] = true;
                path.push(e);
                dfs(g, start, w, vis, path, out);
                path.pop();
                vis[w] = false;
            }
        }
    }
    for s in 0..g.n() {
        let mut vis = vec![false; g.n()];
        vis[s] = true;
        dfs(g, s, s, &mut vis, &mut Vec::new(), &mut out);
    }
    out.into_iter().collect()
}

fn circular_oracle(g: &SimpleGraph, set: &[usize]) -> bool {
    if set.is_empty() {
        return true;
    }
    let f: BTreeSet<usize> = set.iter().copied().collect();
    if !cycles_oracle(g).iter().any(|c| f.is_subset(c)) {
        return false;
    }
    set.iter().all(|&e| {
        set.iter().filter(|&&x| x != e).all(|&x| {
            let removed: BTreeSet<usize> = [e, x].into();
            !connected_without(g, &removed)
        })
    })
}

// ---- tests ---------------------------------------------------------------

#[test]
fn replica_two_layered_counts() {
    let g = common::replica();
    assert_eq!(g.link_edges().len(), 6);
    assert!(g.validate_link_edges());
    let d = decompose(&g, DEFAULT_RHO).unwrap();
    let hs = d.suppressed();
    assert_eq!(hs.n(), 55);
    assert_eq!(d.interior_vertices().len(), 29);
    assert_eq!(d.exterior_vertices().len(), 26);
    let first: usize = d.exterior_vertices().iter().filter(|&&v| d.height(v) == Some(0)).count();
    let second: usize = d.exterior_vertices().iter().filter(|&&v| d.height(v) == Some(1)).count();
    assert_eq!((first, second), (19, 7));
    assert_eq!(rank(hs.graph()), Ok(4));
    assert!(d.link_edges().iter().all(|&e| d.is_interior_edge(e)));
}

#[test]
fn replica_interior_edge_configs_match_hand_count() {
    // enumerated edge by edge from the structure file
    let expected: BTreeMap<&str, usize> = [
        ("C2,C3,1", 6),
        ("C2,C3,2", 2),
        ("C3,C4,1", 5),
        ("C2,C4,1", 2),
        ("C3,N3,1", 3),
        ("C4,N3,1", 1),
        ("C3,O2,1", 1),
        ("N3,O2,1", 1),
        ("C3,C3,1", 8),
        ("C2,C2,2", 1),
        ("C3,C3,2", 1),
        ("C2,N3,1", 1),
    ]
    .into();
    let d = decompose(&common::replica(), 2).unwrap();
    let mut got: BTreeMap<String, usize> = BTreeMap::new();
    for e in d.interior_edges() {
        *got.entry(d.edge_config(e).unwrap().to_string()).or_default() += 1;
    }
    let got: BTreeMap<&str, usize> = got.iter().map(|(k, &v)| (k.as_str(), v)).collect();
    assert_eq!(got, expected);
}

#[test]
fn replica_bare_carbon_fringe_count() {
    let d = decompose(&common::replica(), 2).unwrap();
    let bare = d.fringe_trees().iter().filter(|f| f.code.as_str() == "C").count();
    assert_eq!(bare, 5);
    let covered: usize = d.fringe_trees().iter().map(|f| f.members.len()).sum();
    assert_eq!(covered, d.suppressed().n());
}

#[test]
fn rank_of_bowtie_matches_oracle() {
    let bowtie = SimpleGraph::new(5, vec![(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]);
    assert_eq!(rank(&bowtie), Ok(2));
    assert_eq!(rank_oracle(&bowtie), 2);
}

#[test]
fn core_edges_on_random_12_vertex_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    while checked < 50 {
        let g = common::random_connected(&mut rng, 12, 3);
        if g.m() < g.n() {
            continue;
        }
        assert_eq!(core_edges(&g).unwrap().edges, core_oracle(&g));
        checked += 1;
    }
}

#[test]
fn core_edges_exhaustive_small_graphs() {
    // every connected cyclic graph on up to 6 vertices (as edge subsets of K_n)
    for n in 3..=6usize {
        let all: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..1 << all.len() {
            let edges: Vec<_> = (0..all.len()).filter(|&i| mask >> i & 1 == 1).map(|i| all[i]).collect();
            if edges.len() < n {
                continue;
            }
            let g = SimpleGraph::new(n, edges);
            if !g.is_connected() {
                continue;
            }
            assert_eq!(core_edges(&g).unwrap().edges, core_oracle(&g));
        }
    }
}

#[test]
fn k_lean_matches_leaf_stripping_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 200 {
        let n = rng.gen_range(5..14);
        let g = common::random_connected(&mut rng, n, 2);
        if g.m() < g.n() {
            continue;
        }
        for k in 0..4 {
            assert_eq!(k_lean(&g, k, None).unwrap(), k_lean_oracle(&g, k), "k={k} {:?}", g.edges());
        }
        checked += 1;
    }
}

#[test]
fn circular_set_matches_cycle_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let n = rng.gen_range(3..8);
        let g = common::random_connected(&mut rng, n, 3);
        let k = rng.gen_range(0..=g.m().min(3));
        let mut set: Vec<usize> = (0..g.m()).collect();
        rand::seq::SliceRandom::shuffle(set.as_mut_slice(), &mut rng);
        set.truncate(k);
        assert_eq!(is_circular_set(&g, &set), circular_oracle(&g, &set), "{:?} {:?}", g.edges(), set);
    }
}

#[test]
fn hydrogen_round_trip_and_relabeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let (ring, tree) = (rng.gen_range(3..7), rng.gen_range(0..8));
        let g = common::random_polymer(&mut rng, ring, tree, true);
        let hs = g.hydrogen_suppress();
        assert_eq!(hs.n(), g.n() - g.elements().iter().filter(|e| e.is_hydrogen()).count());
        let back = hs.reattach_hydrogens().unwrap();
        assert_eq!(back.n(), g.n());
        let hs2 = back.hydrogen_suppress();
        assert_eq!(serialize_pmg(&hs2.reattach_hydrogens().unwrap()), serialize_pmg(&back));
        for v in 0..hs.n() {
            assert_eq!(hs.hydrogens(v), hs2.hydrogens(v));
            assert_eq!(hs.element(v), hs2.element(v));
        }
        assert_eq!(hs.bonds(), hs2.bonds());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn removing_non_separating_edges_lowers_rank(seed in any::<u64>(), n in 3usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_connected(&mut rng, n, 4);
        let r = rank(&g).unwrap();
        prop_assert_eq!(r, rank_oracle(&g));
        for mask in 0u32..1 << g.m() {
            let removed: BTreeSet<usize> = (0..g.m()).filter(|&e| mask >> e & 1 == 1).collect();
            if removed.len() > r || !connected_without(&g, &removed) {
                continue;
            }
            let kept: Vec<_> = (0..g.m()).filter(|e| !removed.contains(e)).map(|e| g.edges()[e]).collect();
            let h = SimpleGraph::new(g.n(), kept);
            prop_assert_eq!(rank(&h).unwrap(), r - removed.len());
        }
    }

    #[test]
    fn pmg_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ring, tree, links) = (rng.gen_range(3..7), rng.gen_range(0..6), rng.gen_bool(0.7));
        let g = common::random_polymer(&mut rng, ring, tree, links);
        let text = serialize_pmg(&g);
        let back = parse_pmg(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serialize_pmg(&back), text);
    }

    #[test]
    fn decomposition_partitions(seed in any::<u64>(), rho in 1u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ring, tree) = (rng.gen_range(3..7), rng.gen_range(0..10));
        let g = common::random_polymer(&mut rng, ring, tree, true);
        let d = decompose(&g, rho).unwrap();
        let hs = d.suppressed();
        prop_assert_eq!(d.interior_vertices().len() + d.exterior_vertices().len(), hs.n());
        prop_assert_eq!(d.interior_edges().len() + d.exterior_edges().len(), hs.bonds().len());
        let covered: usize = d.fringe_trees().iter().map(|f| f.members.len()).sum();
        prop_assert_eq!(covered, hs.n());
        for f in d.fringe_trees() {
            prop_assert!(f.tree.height() <= rho as usize);
        }
        // exterior at rho is contained in exterior at rho + 1
        let next = decompose(&g, rho + 1).unwrap();
        for v in d.exterior_vertices() {
            prop_assert!(!next.is_interior(v));
        }
        // exterior edges form a forest
        let ext: Vec<_> = d.exterior_edges().iter().map(|&e| (hs.bonds()[e].u, hs.bonds()[e].v)).collect();
        prop_assert!(is_forest(hs.n(), &ext));
    }
}
