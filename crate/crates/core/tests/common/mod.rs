#![allow(dead_code)]

pub mod oracles;

use std::path::PathBuf;

use polyinv::chemgraph::{parse_pmg, ChemicalGraph, Element, GraphSpec, SimpleGraph};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn replica() -> ChemicalGraph {
    parse_pmg(&std::fs::read_to_string(data_path("two_block_polymer.pmg")).unwrap()).unwrap()
}

/// Random connected simple graph with `n` vertices and about `extra` chords.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, extra: usize) -> SimpleGraph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && !edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u)) {
            edges.push((u, v));
        }
    }
    SimpleGraph::new(n, edges)
}

/// Random valid polymer: a ring of `ring` heavy atoms (ring edges are the
/// link-edges on request) with random trees attached, then hydrogens.
pub fn random_polymer<R: Rng>(rng: &mut R, ring: usize, tree: usize, links: bool) -> ChemicalGraph {
    let n = ring + tree;
    let mut edges: Vec<(usize, usize)> = (0..ring).map(|i| (i, (i + 1) % ring)).collect();
    let mut deg = vec![0usize; n];
    for &(u, v) in &edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    for v in ring..n {
        let p = loop {
            let p = rng.gen_range(0..v);
            if deg[p] < 4 {
                break p;
            }
        };
        edges.push((p, v));
        deg[p] += 1;
        deg[v] += 1;
    }
    let pool = ["C", "C", "C", "N", "O", "Cl", "S(6)", "Si(4)"];
    let elements: Vec<Element> = (0..n)
        .map(|v| loop {
            let e = Element::of(pool.choose(rng).unwrap());
            if e.valence() as usize >= deg[v] {
                break e;
            }
        })
        .collect();
    let mut spare: Vec<i32> = (0..n).map(|v| elements[v].valence() as i32 - deg[v] as i32).collect();
    let mut mult = vec![1u8; edges.len()];
    for (i, &(u, v)) in edges.iter().enumerate() {
        if spare[u] > 0 && spare[v] > 0 && rng.gen_bool(0.3) {
            mult[i] = 2;
            spare[u] -= 1;
            spare[v] -= 1;
        }
    }
    let id = |v: usize| (v + 1) as u32;
    let mut spec = GraphSpec::default();
    for v in 0..n {
        spec.atoms.push((id(v), elements[v]));
    }
    for (i, &(u, v)) in edges.iter().enumerate() {
        spec.bonds.push((id(u), id(v), mult[i]));
    }
    let mut next = 1000;
    for v in 0..n {
        for _ in 0..spare[v] {
            spec.atoms.push((next, Element::hydrogen()));
            spec.bonds.push((id(v), next, 1));
            next += 1;
        }
    }
    if links {
        let k = rng.gen_range(1..=ring);
        let start = rng.gen_range(0..ring);
        for j in 0..k {
            let i = (start + j) % ring;
            spec.links.push((id(i), id((i + 1) % ring)));
        }
    }
    ChemicalGraph::new(spec).unwrap()
}

/// The same graph with atom ids permuted at random.
pub fn relabel<R: Rng>(rng: &mut R, g: &ChemicalGraph) -> ChemicalGraph {
    let spec = g.to_spec();
    let mut ids: Vec<u32> = spec.atoms.iter().map(|a| a.0).collect();
    let mut shuffled: Vec<u32> = (1..=ids.len() as u32).map(|x| x * 7 + 3).collect();
    shuffled.shuffle(rng);
    ids.sort();
    let map = |x: u32| shuffled[ids.binary_search(&x).unwrap()];
    let mut atoms: Vec<_> = spec.atoms.iter().map(|&(a, e)| (map(a), e)).collect();
    atoms.shuffle(rng);
    let mut bonds: Vec<_> = spec.bonds.iter().map(|&(a, b, m)| (map(b), map(a), m)).collect();
    bonds.shuffle(rng);
    ChemicalGraph::new(GraphSpec {
        atoms,
        bonds,
        links: spec.links.iter().map(|&(a, b)| (map(a), map(b))).collect(),
        connect: spec.connect.map(|(a, b)| (map(a), map(b))),
    })
    .unwrap()
}

use polyinv::topospec::{
    Bounds, EdgeClass, Family, FringeEntry, SeedEdge, SeedGraph, SeedVertex, TopologicalSpec,
};

/// Two carbons joined by a plain edge and by a link path of length 2..=`len_ub`,
/// with at most one attached path of `ch_ub` vertices on the link path.
pub fn small_spec(len_ub: u32, ch_ub: u32, catalog: &[&str]) -> TopologicalSpec {
    let c = Element::of("C");
    let lambda: Vec<Element> = ["H", "C", "N", "O"].iter().map(|s| Element::of(s)).collect();
    let vertex = |name: &str| SeedVertex { name: name.into(), elements: vec![c], bl: Bounds::exact(0), ch: Bounds::exact(0) };
    let wide = Bounds::new(0, 100);
    TopologicalSpec {
        name: "small".into(),
        rho: 2,
        elements: lambda.clone(),
        seed: SeedGraph {
            vertices: vec![vertex("u"), vertex("v")],
            edges: vec![
                SeedEdge {
                    name: "a1".into(),
                    u: 0,
                    v: 1,
                    class: EdgeClass::Path,
                    link: true,
                    length: Bounds::new(2, len_ub),
                    bl: Bounds::new(0, 1),
                    ch: Bounds::new(0, ch_ub),
                    bd2: Bounds::new(0, 1),
                    bd3: Bounds::exact(0),
                },
                SeedEdge {
                    name: "a2".into(),
                    u: 0,
                    v: 1,
                    class: EdgeClass::Single,
                    link: false,
                    length: Bounds::exact(1),
                    bl: Bounds::exact(0),
                    ch: Bounds::exact(0),
                    bd2: Bounds::new(0, 1),
                    bd3: Bounds::exact(0),
                },
            ],
        },
        fringes: catalog.iter().map(|s| FringeEntry { code: s.parse().unwrap(), fc: Bounds::new(0, 10) }).collect(),
        n: Bounds::new(3, 12),
        n_int: Bounds::new(3, 12),
        n_lnk: Bounds::new(1, 10),
        na: Family::closed(lambda.iter().map(|&e| (e, Bounds::new(0, 30))).collect()),
        na_int: Family::open(wide),
        ns_int: Family::open(wide),
        ns_cnt: Family::open(wide),
        ac_int: Family::open(wide),
        ac_lnk: Family::open(wide),
        ec_int: Family::open(wide),
        ec_lnk: Family::open(wide),
        ac_lf: Family::open(wide),
    }
}

use polyinv::features::{featurize, DescriptorRegistry, RegistryOptions};
use polyinv::regress::{lasso_fit, LassoOptions, TrainedModel};

/// Registry over `graphs`, min-max scaling and a Lasso fit at `lambda`.
pub fn train_model(graphs: &[ChemicalGraph], y: &[f64], lambda: f64) -> TrainedModel {
    let profiles: Vec<_> =
        graphs.iter().map(|g| polyinv::features::profile(g, 2, RegistryOptions::default()).unwrap()).collect();
    let reg = DescriptorRegistry::from_profiles(2, RegistryOptions::default(), &profiles, &[]);
    let rows: Vec<Vec<f64>> = graphs.iter().map(|g| featurize::<f64>(g, &reg, &[]).unwrap().values).collect();
    let (st, x, a) = polyinv::features::standardize(&rows, y);
    let fit = lasso_fit(&x, &a, lambda, &LassoOptions::default()).unwrap();
    TrainedModel::new(reg, st, fit.hyperplane, lambda)
}
