//! Independent reference implementations shared by the test targets.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use polyinv::chemgraph::{ChemicalGraph, Element};
use polyinv::twolayer::RootedTree;
use polyinv::generate::{canonical_hash, generate, hosts, realize, skeleton, Construction, GenerateLimits, GenerateStatus, Host};
use polyinv::milp::{InverseProblemSpec, MilpModel, Relation, VarKind};
use polyinv::regress::TrainedModel;
use polyinv::topospec::{check_satisfies, EdgeClass, TopologicalSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_problem(rng: &mut ChaCha8Rng, n: usize, k: usize, noise: f64) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let w: Vec<f64> = (0..k).map(|j| if j % 2 == 0 { rng.gen_range(-2.0..2.0) } else { 0.0 }).collect();
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..k).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
    let a = x
        .iter()
        .map(|r| 0.3 + r.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + noise * rng.gen_range(-1.0..1.0))
        .collect();
    (x, a, w)
}

/// Least squares with intercept through the normal equations.
pub fn ols(x: &[Vec<f64>], a: &[f64]) -> (Vec<f64>, f64) {
    let (n, k) = (x.len(), x[0].len());
    let m = DMatrix::from_fn(n, k + 1, |i, j| if j < k { x[i][j] } else { 1.0 });
    let y = DVector::from_column_slice(a);
    let sol = (m.transpose() * &m).lu().solve(&(m.transpose() * y)).unwrap();
    (sol.iter().take(k).copied().collect(), sol[k])
}

pub fn random_int_model(rng: &mut ChaCha8Rng) -> MilpModel {
    let mut m = MilpModel::new("rand");
    let nv = rng.gen_range(1..=3);
    for i in 0..nv {
        let lo = rng.gen_range(-10..=5) as f64;
        let w = rng.gen_range(0..=20) as f64;
        m.add_var(&format!("v{i}"), Some(lo), Some(lo + w), VarKind::Integer);
    }
    for c in 0..rng.gen_range(1..=4) {
        let mut terms = Vec::new();
        for i in 0..nv {
            let a = rng.gen_range(-40..=40) as f64 / 4.0;
            if rng.gen_bool(0.8) && a != 0.0 {
                terms.push((i, a));
            }
        }
        let rel = [Relation::Le, Relation::Ge, Relation::Eq][rng.gen_range(0..3)];
        let rhs = (rng.gen_range(-200..=200) as f64) / 8.0;
        m.add_constraint(&format!("c{c}"), terms, rel, rhs);
    }
    m
}

/// Scan every integer point of the box.
pub fn enumerate_feasible(m: &MilpModel) -> bool {
    let ranges: Vec<(i64, i64)> =
        m.vars.iter().map(|v| (v.lower.unwrap() as i64, v.upper.unwrap() as i64)).collect();
    let mut x: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        let ok = m.constraints.iter().all(|c| {
            // coefficients are multiples of 1/4 and rhs of 1/8: exact in f64
            let lhs: f64 = c.terms.iter().map(|&(i, a)| a * x[i] as f64).sum();
            match c.rel {
                Relation::Le => lhs <= c.rhs,
                Relation::Ge => lhs >= c.rhs,
                Relation::Eq => lhs == c.rhs,
            }
        });
        if ok {
            return true;
        }
        let mut k = 0;
        loop {
            if k == x.len() {
                return false;
            }
            if x[k] < ranges[k].1 {
                x[k] += 1;
                break;
            }
            x[k] = ranges[k].0;
            k += 1;
        }
    }
}

/// Feasibility of the inverse model by scanning integer descriptor values:
/// for fixed x every x̂ ranges over an interval, so the prediction does too.
pub fn inverse_oracle(spec: &InverseProblemSpec) -> bool {
    let k = spec.hyperplane.w.len();
    let mut x: Vec<i64> = spec.lower.iter().map(|&l| l as i64).collect();
    loop {
        let (mut lo, mut hi) = (spec.hyperplane.b, spec.hyperplane.b);
        for j in 0..k {
            let w = spec.hyperplane.w[j];
            let r = spec.max[j] - spec.min[j];
            let t = (x[j] as f64 - spec.min[j]) / r;
            let (a, b) = ((1.0 - spec.epsilon) * t, (1.0 + spec.epsilon) * t);
            lo += (w * a).min(w * b);
            hi += (w * a).max(w * b);
        }
        if lo <= spec.window.1 && hi >= spec.window.0 {
            return true;
        }
        let mut j = 0;
        loop {
            if j == k {
                return false;
            }
            if (x[j] as f64) < spec.upper[j] {
                x[j] += 1;
                break;
            }
            x[j] = spec.lower[j] as i64;
            j += 1;
        }
    }
}

/// The bound formulas of the two-ring instance, one line each.
pub fn ib_oracle(n: i64) -> [i64; 10] {
    let q4 = ((n - 15) as f64 / 4.0).floor().max(0.0) as i64;
    let q2 = ((n - 15) as f64 / 2.0).floor().max(0.0) as i64;
    let d = (n - 15).max(0);
    let ell_lb = 2 + q4;
    [
        ell_lb,          // length lb
        ell_lb + 5,      // length ub
        2 + d,           // n_lnk ub
        ell_lb / 3,      // bd2 ub on a1, a2
        n + 10,          // n*
        5 + d,           // na ub for O and N
        2 + q4,          // na ub for the other heavy elements
        12 + d,          // fc ub, first tier
        8 + q2,          // fc ub, second tier
        5 + q4,          // fc ub, third tier
    ]
}

pub fn ib_measured(s: &TopologicalSpec) -> [i64; 10] {
    let a1 = &s.seed.edges[0];
    let na = |t: &str| s.na.bounds(&Element::of(t)).unwrap().ub as i64;
    [
        a1.length.lb as i64,
        a1.length.ub as i64,
        s.n_lnk.ub as i64,
        a1.bd2.ub as i64,
        s.n.ub as i64,
        na("N"),
        na("Cl"),
        s.fringes[0].fc.ub as i64,
        s.fringes[4].fc.ub as i64,
        s.fringes[12].fc.ub as i64,
    ]
}

pub const ORACLE_CATALOG: [&str; 5] = ["C(H)(H)", "C(H)", "N(H)", "N", "O"];

/// Small forcing spec over {H, C, N, O}.
pub fn oracle_spec() -> TopologicalSpec {
    super::small_spec(4, 0, &ORACLE_CATALOG)
}

pub fn product(radix: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = radix.iter().product();
    (0..total).map(move |mut k| {
        radix
            .iter()
            .map(|&r| {
                let d = k % r;
                k /= r;
                d
            })
            .collect()
    })
}

pub struct OracleResult {
    pub accepted: BTreeSet<String>,
    pub raw: usize,
    pub distinct: usize,
}

/// Every combination of decisions, filtered only at the end.
pub fn enumerate_unpruned(spec: &TopologicalSpec, model: &TrainedModel, window: (f64, f64)) -> OracleResult {
    let heavy: Vec<Element> = spec.elements.iter().copied().filter(|e| !e.is_hydrogen()).collect();
    let edges = &spec.seed.edges;
    let len_radix: Vec<usize> = edges.iter().map(|e| (e.length.ub - e.length.lb + 1) as usize).collect();
    let mut seen = BTreeSet::new();
    let mut out = OracleResult { accepted: BTreeSet::new(), raw: 0, distinct: 0 };
    for lsel in product(&len_radix) {
        let lengths: Vec<u32> = lsel.iter().zip(edges).map(|(&d, e)| e.length.lb + d as u32).collect();
        let lnk: u32 = lengths.iter().zip(edges).filter(|(_, e)| e.link).map(|(l, _)| l - 1).sum();
        if !spec.n_lnk.contains(lnk) {
            continue;
        }
        let hs = hosts(spec, &lengths);
        let ch_of = |h: &Host| match *h {
            Host::Vertex(u) => spec.seed.vertices[u].ch.ub,
            Host::Path { edge, .. } => edges[edge].ch.ub,
        };
        let att_radix: Vec<usize> = hs.iter().map(|h| ch_of(h) as usize + 1).collect();
        for asel in product(&att_radix) {
            let attached: Vec<u32> = asel.iter().map(|&d| d as u32).collect();
            let mut per_edge = vec![(0u32, 0u32); edges.len()];
            let mut per_vertex = vec![(0u32, 0u32); spec.seed.vertices.len()];
            for (h, &k) in hs.iter().zip(&attached) {
                let t = match *h {
                    Host::Vertex(u) => &mut per_vertex[u],
                    Host::Path { edge, .. } => &mut per_edge[edge],
                };
                if k > 0 {
                    t.0 += 1;
                    t.1 = t.1.max(k);
                }
            }
            let path_ok = edges.iter().zip(&per_edge).all(|(e, t)| {
                e.class == EdgeClass::Single || (e.bl.contains(t.0) && e.ch.contains(t.1))
            });
            let vert_ok = spec.seed.vertices.iter().zip(&per_vertex).all(|(v, t)| v.bl.contains(t.0) && v.ch.contains(t.1));
            if !path_ok || !vert_ok {
                continue;
            }
            let sk = skeleton(spec, &lengths, &attached).unwrap();
            let el_choices: Vec<Vec<Element>> = sk
                .seed_of
                .iter()
                .map(|s| match s {
                    Some(u) => spec.seed.vertices[*u].elements.clone(),
                    None => heavy.clone(),
                })
                .collect();
            let el_radix: Vec<usize> = el_choices.iter().map(Vec::len).collect();
            for esel in product(&el_radix) {
                let elements: Vec<Element> = esel.iter().enumerate().map(|(v, &d)| el_choices[v][d]).collect();
                for msel in product(&vec![3; sk.edges.len()]) {
                    let mults: Vec<u8> = msel.iter().map(|&d| d as u8 + 1).collect();
                    let bd_ok = edges.iter().enumerate().all(|(a, e)| {
                        let on = || sk.edges.iter().zip(&mults).filter(|(x, _)| x.2 == Some(a));
                        e.bd2.contains(on().filter(|(_, &m)| m == 2).count() as u32)
                            && e.bd3.contains(on().filter(|(_, &m)| m == 3).count() as u32)
                    });
                    for fsel in product(&vec![spec.fringes.len(); sk.n]) {
                        out.raw += 1;
                        if !bd_ok {
                            continue;
                        }
                        let c = Construction {
                            lengths: lengths.clone(),
                            attached: attached.clone(),
                            elements: elements.clone(),
                            mults: mults.clone(),
                            fringes: fsel,
                        };
                        let Ok(g) = realize(spec, &c) else { continue };
                        let h = canonical_hash(&g);
                        if !seen.insert(h.clone()) {
                            continue;
                        }
                        out.distinct += 1;
                        if !check_satisfies(&g, spec, spec.rho).pass {
                            continue;
                        }
                        let y = model.predict_graph(&g, &[]).unwrap().1;
                        if window.0 <= y && y <= window.1 {
                            out.accepted.insert(h);
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn count(g: &ChemicalGraph, sym: &str) -> f64 {
    g.elements().iter().filter(|e| e.symbol() == sym).count() as f64
}

pub fn synthetic_y(g: &ChemicalGraph) -> f64 {
    3.0 * count(g, "N") + count(g, "C") - 0.5 * count(g, "H") + 2.0 * count(g, "O")
}

pub fn all_structures(spec: &TopologicalSpec) -> Vec<ChemicalGraph> {
    let r = generate(spec, None, (0.0, 0.0), &GenerateLimits::default()).unwrap();
    assert_eq!(r.status, GenerateStatus::Exhausted);
    r.candidates.into_iter().map(|c| c.graph).collect()
}

pub fn oracle_model(spec: &TopologicalSpec) -> TrainedModel {
    let graphs = all_structures(spec);
    let y: Vec<f64> = graphs.iter().map(synthetic_y).collect();
    super::train_model(&graphs, &y, 1e-6)
}

/// Every rooted tree shape with at most `max_n` vertices (each shape at
/// least once, via breadth-first parent arrays), under all labelings from
/// `alphabet` and all bond multiplicities from `mults`.
pub fn all_small_trees(max_n: usize, alphabet: &[Element], mults: &[u8]) -> Vec<RootedTree> {
    let mut shapes: Vec<Vec<usize>> = vec![vec![]];
    let mut out = Vec::new();
    for n in 1..=max_n {
        if n > 1 {
            shapes = shapes
                .iter()
                .flat_map(|p| {
                    let lo = p.last().copied().unwrap_or(0);
                    (lo..n - 1).map(move |q| {
                        let mut v = p.clone();
                        v.push(q);
                        v
                    })
                })
                .collect();
        }
        for parents in &shapes {
            let labelings = alphabet.len().pow(n as u32);
            let bondings = mults.len().pow(n as u32 - 1);
            for l in 0..labelings {
                for b in 0..bondings {
                    let el = |i: usize| alphabet[l / alphabet.len().pow(i as u32) % alphabet.len()];
                    let mu = |i: usize| mults[b / mults.len().pow(i as u32) % mults.len()];
                    let mut t = RootedTree::new(el(0));
                    for (i, &p) in parents.iter().enumerate() {
                        t.add_child(p, el(i + 1), mu(i));
                    }
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Smallest encoding of `t` over every root-fixing relabeling: equal
/// exactly for rooted-isomorphic trees.
pub fn brute_rooted_key(t: &RootedTree, alphabet: &[Element]) -> (usize, u64) {
    let n = t.len();
    let label = |v: usize| alphabet.iter().position(|&e| e == t.node(v).element).unwrap() as u64;
    let mut perm: Vec<usize> = (1..n).collect();
    let mut pos = vec![0usize; n];
    let mut best = u64::MAX;
    let mut encode = |perm: &[usize]| {
        for (q, &v) in perm.iter().enumerate() {
            pos[v] = q + 1;
        }
        let mut code = label(0);
        for &v in perm {
            let node = t.node(v);
            let parent = pos[node.parent.unwrap()] as u64;
            code = code << 7 | label(v) << 6 | parent << 3 | node.mult as u64;
        }
        best = best.min(code);
    };
    // Heap's algorithm
    let k = perm.len();
    let mut c = vec![0usize; k];
    encode(&perm);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            encode(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    (n, best)
}
