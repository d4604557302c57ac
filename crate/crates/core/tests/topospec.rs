mod common;

use polyinv::chemgraph::Element;
use polyinv::generate::{realize, Construction};
use polyinv::topospec::{
    build_instance_ib, check_satisfies, element_set, placeholder_catalog, Bounds, Property, TopologicalSpec,
};
use proptest::prelude::*;

use common::oracles::{ib_measured, ib_oracle};

#[test]
fn formulas_for_listed_sizes() {
    for n in [14, 20, 27] {
        let s = build_instance_ib(Property::AmD, n, &placeholder_catalog()).unwrap();
        assert_eq!(ib_measured(&s), ib_oracle(n as i64), "n_LB={n}");
    }
    let s = build_instance_ib(Property::AmD, 14, &placeholder_catalog()).unwrap();
    assert_eq!(ib_measured(&s)[..5], [2, 7, 2, 0, 24]);
}

#[test]
fn growth_terms_vanish_up_to_fifteen() {
    let base = ib_measured(&build_instance_ib(Property::Prm, 15, &placeholder_catalog()).unwrap());
    for n in 1..=15 {
        let m = ib_measured(&build_instance_ib(Property::Prm, n, &placeholder_catalog()).unwrap());
        // everything but n* is constant
        assert_eq!([&m[..4], &m[5..]].concat(), [&base[..4], &base[5..]].concat(), "n_LB={n}");
    }
    // n* below the fixed interior lower bound of 14 leaves an empty interval
    let tiny = build_instance_ib(Property::Prm, 3, &placeholder_catalog()).unwrap();
    assert_eq!(tiny.empty_bounds(), vec!["n_int".to_string()]);
    assert!(build_instance_ib(Property::Prm, 4, &placeholder_catalog()).unwrap().empty_bounds().is_empty());
}

#[test]
fn fixed_parts_of_the_instance() {
    let s = build_instance_ib(Property::HcL, 22, &placeholder_catalog()).unwrap();
    assert_eq!(s.elements, element_set(Property::HcL));
    assert_eq!(s.n_int, Bounds::new(14, 32));
    for (i, e) in s.seed.edges.iter().enumerate().skip(2) {
        let want = if (i + 1) % 2 == 0 { 1 } else { 0 };
        assert_eq!(e.bd2, Bounds::exact(want), "{}", e.name);
    }
    assert!(s.seed.edges.iter().all(|e| e.bd3 == Bounds::exact(0)));
    assert!(s.seed.vertices.iter().all(|v| v.elements == vec![Element::of("C")] && v.ch.ub == 0));
    assert_eq!(s.seed.edges.iter().filter(|e| e.link).count(), 2);
}

/// Two benzene rings joined by two CH2 bridges.
fn minimal(spec: &TopologicalSpec, bridge: &str) -> Construction {
    let c = Element::of("C");
    let mut mults = vec![1u8; 4];
    for i in 3..=14 {
        mults.push(if i % 2 == 0 { 2 } else { 1 });
    }
    let idx = |code: &str| spec.fringe_index(&code.parse().unwrap()).unwrap();
    let mut fringes: Vec<usize> = (0..12).map(|v| if v % 6 == 0 || v % 6 == 3 { idx("C") } else { idx("C(H)") }).collect();
    fringes.extend([idx(bridge), idx(bridge)]);
    let bridge_el = bridge.parse::<polyinv::twolayer::CanonicalCode>().unwrap().parse_tree().unwrap().root_element();
    let mut elements = vec![c; 12];
    elements.extend([bridge_el, bridge_el]);
    let mut lengths = vec![2, 2];
    lengths.extend([1; 12]);
    Construction { lengths, attached: vec![0, 0], elements, mults, fringes }
}

#[test]
fn minimal_expansion_has_a_witness() {
    let spec = build_instance_ib(Property::AmD, 14, &placeholder_catalog()).unwrap();
    let g = realize(&spec, &minimal(&spec, "C(H)(H)")).unwrap();
    let r = check_satisfies(&g, &spec, 2);
    assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
    let w = r.witness.unwrap();
    assert_eq!(w.paths[0].len(), 3);
    assert!(w.attached.is_empty());
    // the oracle: phi must send each ring onto a 6-cycle of carbons
    let hs = g.hydrogen_suppress();
    for ring in [0..6, 6..12] {
        let img: Vec<usize> = ring.map(|u| w.phi[u]).collect();
        for i in 0..6 {
            assert!(hs.graph().edge_index(img[i], img[(i + 1) % 6]).is_some());
        }
    }
}

#[test]
fn violations_are_reported() {
    let mut spec = build_instance_ib(Property::AmD, 14, &placeholder_catalog()).unwrap();
    let g = realize(&spec, &minimal(&spec, "O")).unwrap();
    assert!(check_satisfies(&g, &spec, 2).pass);
    spec.na.entries.insert(Element::of("O"), Bounds::new(0, 1));
    let r = check_satisfies(&g, &spec, 2);
    let f: Vec<_> = r.failures().collect();
    assert_eq!(f.len(), 1);
    assert_eq!((f[0].name.as_str(), f[0].measured), ("na(O)", 2));

    let spec = build_instance_ib(Property::AmD, 14, &placeholder_catalog()).unwrap();
    let g = realize(&spec, &minimal(&spec, "C(H)(H)")).unwrap();
    let mut narrow = spec.clone();
    narrow.fringes.retain(|f| f.code.as_str() != "C(H)(H)");
    let r = check_satisfies(&g, &narrow, 2);
    assert!(!r.pass);
    assert!(r.failures().any(|c| c.name.contains("outside catalog") && c.measured == 2));
}

#[test]
fn overlong_link_path_has_no_witness() {
    let spec = build_instance_ib(Property::AmD, 14, &placeholder_catalog()).unwrap();
    let mut c = minimal(&spec, "C(H)(H)");
    // stretch a1 to length 8 with CH2 groups
    let extra = 6;
    c.lengths[0] = 8;
    c.attached = vec![0; 7 + 1];
    let ch2 = spec.fringe_index(&"C(H)(H)".parse().unwrap()).unwrap();
    for _ in 0..extra {
        c.elements.insert(12, Element::of("C"));
        c.fringes.insert(12, ch2);
        c.mults.insert(0, 1);
    }
    let g = realize(&spec, &c).unwrap();
    let r = check_satisfies(&g, &spec, 2);
    assert!(r.witness.is_none());
    assert!(r.failures().any(|c| c.name == "seed expansion"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn builder_is_pure(n in 1u32..60, p in 0usize..5) {
        let pi = [Property::AmD, Property::HcL, Property::RfId, Property::Tg, Property::Prm][p];
        let a = build_instance_ib(pi, n, &placeholder_catalog()).unwrap().to_json();
        let b = build_instance_ib(pi, n, &placeholder_catalog()).unwrap();
        prop_assert_eq!(&a, &b.to_json());
        prop_assert_eq!(ib_measured(&b), ib_oracle(n as i64));
        prop_assert_eq!(TopologicalSpec::from_json(&a).unwrap(), b);
    }
}
