use smoothbench::classes::builtins::{builtin_class, BuiltinParams};
use smoothbench::ramsey::{check_order_equivalence_seed, order_equivalence_seed, ramsey_report, strong_copies};
use smoothbench::Structure;

#[test]
fn seed_has_two_copies_of_a_in_b() {
    let (m, a, b) = order_equivalence_seed().unwrap();
    let k = m.merged_class();
    assert_eq!(strong_copies(&k, &b, &a).len(), 2);
    // The copies x < y and y < z get opposite colours under the class colouring.
    let r = ramsey_report(&k, &b, &b, &a, 20).unwrap();
    assert!(!r.holds);
}

#[test]
fn no_small_order_equivalence_witness() {
    let r = check_order_equivalence_seed(6).unwrap();
    assert!(r.candidates > 0);
    assert_eq!(r.holding, 0);
}

#[test]
fn graphs_with_a_single_edge_copy() {
    let k = builtin_class("all_graphs", BuiltinParams::default()).unwrap();
    let sig = k.signature.clone();
    let edge = Structure::from_named(sig.clone(), [0, 1], &[("E", vec![vec![0, 1]])]).unwrap();
    let r = ramsey_report(&k, &edge, &edge, &edge, 20).unwrap();
    assert_eq!(r.colorings, 2);
    assert!(r.holds);
}
