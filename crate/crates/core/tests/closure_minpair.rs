use std::collections::BTreeSet;

use num_rational::Ratio;
use smoothbench::classes::builtins::{builtin_class, BuiltinParams};
use smoothbench::closure::{
    check_closure_preserving, check_extended_claim, check_one_local, closure_set, extended_substructure, to_extended,
};
use smoothbench::enumerate::structures_up_to;
use smoothbench::merge::MergeSpec;
use smoothbench::minpair::{build_minpair_chain, check_many_minimal_pairs, find_minimal_pairs, is_minimal_pair};
use smoothbench::perm::SignaturePermutation;
use smoothbench::structure::{sig, subsets};
use smoothbench::{ClassSpec, Elem, Structure};

fn class(name: &str) -> ClassSpec {
    builtin_class(name, BuiltinParams::default()).unwrap()
}

fn alpha(p: i64, q: i64) -> ClassSpec {
    builtin_class("shelah_spencer", BuiltinParams { alpha: Some(Ratio::new(p, q)), n: None }).unwrap()
}

const ONE_LOCAL: [&str; 3] = ["one_local_no_edges_out", "one_local_all_edges_in", "one_local_ternary"];

#[test]
fn one_local_builtins_decompose_closures() {
    for name in ONE_LOCAL {
        let r = check_one_local(&class(name), 5).unwrap();
        assert!(r.holds(), "{name}: {r:?}");
    }
}

#[test]
fn half_graphs_are_not_pointwise_local() {
    let r = check_one_local(&alpha(1, 2), 4).unwrap();
    assert!(!r.decomposition_holds);
    let bad = r.first_decomposition_failure.unwrap();
    assert_eq!(bad.b.size(), 4);
}

#[test]
fn closures_are_extensive_monotone_and_idempotent() {
    for k in [class("one_local_no_edges_out"), class("one_local_ternary"), alpha(1, 2), alpha(2, 3)] {
        for b in structures_up_to(&k, 5).unwrap() {
            let elems = b.elems();
            let all: Vec<BTreeSet<Elem>> = subsets(&elems).collect();
            let cl: Vec<BTreeSet<Elem>> = all.iter().map(|a| closure_set(&k, &b, a).unwrap()).collect();
            for (i, a) in all.iter().enumerate() {
                assert!(a.is_subset(&cl[i]));
                assert_eq!(closure_set(&k, &b, &cl[i]).unwrap(), cl[i]);
                for (j, c) in all.iter().enumerate() {
                    if a.is_subset(c) {
                        assert!(cl[i].is_subset(&cl[j]), "{}", k.id);
                    }
                }
            }
        }
    }
}

#[test]
fn two_thirds_closure_grows_over_a_shared_neighbour() {
    let k = alpha(2, 3);
    let b = Structure::from_named(sig::graph(), 0..3, &[("E", vec![vec![0, 2], vec![1, 2]])]).unwrap();
    assert_eq!(closure_set(&k, &b, &[0, 1].into()).unwrap(), [0, 1, 2].into());
}

#[test]
fn extended_substructure_matches_strong() {
    for name in ONE_LOCAL {
        let r = check_extended_claim(&class(name), 5).unwrap();
        assert!(r.pairs > 0);
        assert_eq!(r.discrepancies, 0, "{name}: {r:?}");
    }
}

#[test]
fn strong_substructures_restrict_extended_encodings() {
    let k = class("one_local_no_edges_out");
    for b in structures_up_to(&k, 5).unwrap() {
        let bf = to_extended(&k, &b).unwrap();
        for d in subsets(&b.elems()).filter(|d| k.strong_set(d, &b)) {
            let df = to_extended(&k, &b.induced(&d).unwrap()).unwrap();
            let restricted: std::collections::BTreeMap<_, _> =
                bf.closures.iter().filter(|(a, _)| d.contains(a)).map(|(a, c)| (*a, c.clone())).collect();
            assert_eq!(df.closures, restricted);
            assert!(extended_substructure(&df, &bf));
        }
    }
}

#[test]
fn merged_one_local_factors_stay_one_local() {
    let m = MergeSpec::new(vec![(class("one_local_no_edges_out"), "L1"), (class("one_local_ternary"), "L2")]).unwrap();
    assert!(check_one_local(&m.merged_class(), 4).unwrap().holds());
}

#[test]
fn colour_swap_preserves_closures_and_inert_swap_does_not() {
    let two = class("one_local_two_colors");
    let swap = SignaturePermutation::swap(&two.signature, "E_r", "E_b").unwrap();
    let r = check_closure_preserving(&two, &[swap], 4).unwrap();
    assert!(r.holds && r.maps_checked > 0);

    let inert = class("one_local_inert");
    let swap = SignaturePermutation::swap(&inert.signature, "E", "I").unwrap();
    let r = check_closure_preserving(&inert, &[swap], 4).unwrap();
    assert!(!r.holds);
    assert!(r.counterexample.is_some());
}

#[test]
fn identity_group_takes_the_fast_path() {
    let k = class("one_local_ternary");
    let r = check_closure_preserving(&k, &[SignaturePermutation::identity(1)], 4).unwrap();
    assert!(r.fast_path && r.holds);
}

#[test]
fn minimal_pairs_lose_strength_only_at_the_top() {
    let k = alpha(1, 2);
    let a = Structure::discrete(sig::graph(), [0, 1]);
    let pairs = find_minimal_pairs(&k, &a, 2).unwrap();
    assert!(!pairs.is_empty());
    for p in pairs {
        for drop in p.b.universe().difference(a.universe()) {
            let mut keep = p.b.universe().clone();
            keep.remove(drop);
            assert!(k.strong_set(a.universe(), &p.b.induced(&keep).unwrap()));
        }
    }
}

#[test]
fn many_minimal_pairs_bounded() {
    let r = check_many_minimal_pairs(&alpha(1, 2), 2, 3, 2, 2).unwrap();
    assert!(r.holds, "{r:?}");
    let r = check_many_minimal_pairs(&class("one_local_no_edges_out"), 1, 3, 2, 1).unwrap();
    assert!(r.holds, "{r:?}");
    let r = check_many_minimal_pairs(&class("all_graphs"), 1, 2, 1, 2).unwrap();
    assert!(!r.holds);
}

#[test]
fn alternating_chain_over_two_half_graphs() {
    let m = MergeSpec::new(vec![(alpha(1, 2), "L1"), (alpha(1, 2), "L2")]).unwrap();
    let a0 = Structure::discrete(m.signature().clone(), [0, 1]);
    let c = build_minpair_chain(&m, &a0, 3, 2).unwrap();
    assert!(c.complete(3), "{:?}", c.diagnostic);
    let merged = m.merged_class();
    for w in c.chain.windows(2) {
        assert!(is_minimal_pair(&merged, &w[0], &w[1]));
    }
    for i in 0..c.chain.len() {
        for j in i + 2..c.chain.len() {
            assert!(!merged.strong_set(c.chain[i].universe(), &c.chain[j]));
        }
    }
    assert_eq!(c.steps.iter().map(|s| s.factor).collect::<Vec<_>>(), vec![0, 1, 0]);
}
