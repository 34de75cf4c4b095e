//! Amalgamation checks against hand-computed oracles.

use std::collections::BTreeSet;

use smoothbench::amalgam::{check_property, free_amalgam, AmalgamInstance, Property};
use smoothbench::classes::builtins::{builtin_class, BuiltinParams};
use smoothbench::enumerate::structures_up_to;
use smoothbench::merge::{merge_amalgam, MergeSpec};
use smoothbench::structure::{sig, subsets};
use smoothbench::{ClassSpec, Elem, Structure};

fn class(name: &str) -> ClassSpec {
    builtin_class(name, BuiltinParams::default()).unwrap()
}

fn half() -> ClassSpec {
    builtin_class("shelah_spencer", BuiltinParams { alpha: Some(num_rational::Ratio::new(1, 2)), n: None }).unwrap()
}

/// 2δ for α = 1/2: twice the points minus the edges.
fn two_delta(s: &Structure, set: &BTreeSet<Elem>) -> i64 {
    let edges = s.tuples(0).iter().filter(|t| t.iter().all(|e| set.contains(e))).count();
    2 * set.len() as i64 - edges as i64
}

#[test]
fn graph_counts_up_to_four_vertices() {
    // Non-isomorphic graphs on 0..4 vertices: 1, 1, 2, 4, 11.
    assert_eq!(structures_up_to(&class("all_graphs"), 4).unwrap().len(), 19);
    assert_eq!(structures_up_to(&class("linear_orders"), 5).unwrap().len(), 6);
}

#[test]
fn half_strong_sets_match_the_delta_definition() {
    let k = half();
    let mut checked = 0;
    for b in structures_up_to(&k, 4).unwrap() {
        let elems = b.elems();
        let all: Vec<BTreeSet<Elem>> = subsets(&elems).collect();
        for a in &all {
            let oracle = all.iter().filter(|x| a.is_subset(x)).all(|x| two_delta(&b, x) >= two_delta(&b, a));
            assert_eq!(k.strong_set(a, &b), oracle, "{a:?} in {b:?}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn free_amalgam_glues_two_edges_into_a_path() {
    let a = Structure::discrete(sig::graph(), [0]);
    let b = Structure::from_named(sig::graph(), [0, 1], &[("E", vec![vec![0, 1]])]).unwrap();
    let c = Structure::from_named(sig::graph(), [0, 2], &[("E", vec![vec![0, 2]])]).unwrap();
    let d = free_amalgam(&a, &b, &c).unwrap();
    let path = Structure::from_named(sig::graph(), [0, 1, 2], &[("E", vec![vec![0, 1], vec![0, 2]])]).unwrap();
    assert_eq!(d, path);
}

#[test]
fn graph_and_triangle_free_classes_have_free_amalgamation() {
    for k in [class("all_graphs"), builtin_class("kn_free", BuiltinParams { n: Some(3), alpha: None }).unwrap()] {
        let r = check_property(&k, Property::Fap, 3).unwrap();
        assert!(r.holds && r.instances > 0, "{}", k.id);
    }
}

#[test]
fn initial_segments_fail_dap_on_two_points() {
    let r = check_property(&class("initial_segment_orders"), Property::Dap, 2).unwrap();
    let cex = r.counterexample.expect("counterexample");
    assert!(cex.b.size() <= 2 && cex.c.size() <= 2);
    assert!(check_property(&class("initial_segment_orders"), Property::Ap, 3).unwrap().holds);
}

#[test]
fn merge_amalgam_of_an_edge_and_a_point_below() {
    let m = MergeSpec::new(vec![(class("all_graphs"), "L1"), (class("linear_orders"), "L2")]).unwrap();
    let s = m.signature().clone();
    let a = Structure::discrete(s.clone(), [0]);
    // B: 0 < 1 joined by an edge. C: 2 < 0, no edge.
    let b = Structure::from_named(s.clone(), [0, 1], &[("E", vec![vec![0, 1]]), ("<", vec![vec![0, 1]])]).unwrap();
    let c = Structure::from_named(s, [0, 2], &[("<", vec![vec![2, 0]])]).unwrap();
    let inst = AmalgamInstance::inclusions(&a, &b, &c).unwrap();
    let am = merge_amalgam(&m, &inst, 4).unwrap().expect("amalgam");
    let d = &am.amalgam.d;
    assert_eq!(d.size(), 3);
    let (x, y, z) = (am.amalgam.f[&0], am.amalgam.f[&1], am.amalgam.g[&2]);
    assert_eq!(am.amalgam.g[&0], x);
    // The order is forced: z < x < y. The only edge is the one from B.
    assert!(d.holds_named("<", &[z, x]) && d.holds_named("<", &[x, y]) && d.holds_named("<", &[z, y]));
    assert_eq!(d.tuples(0).len(), 1);
}
