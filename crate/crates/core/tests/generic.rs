use smoothbench::classes::builtins::{builtin_class, BuiltinParams};
use smoothbench::formula::{eval_formula, parse_formula};
use smoothbench::generic::{
    grow_generic, grow_generic_with, probe_definable_reduct, probe_reduct_generic, probe_richness,
    probe_richness_over, Chain, GrowthPlan,
};
use smoothbench::merge::MergeSpec;
use smoothbench::{ClassSpec, Structure};

fn class(name: &str) -> ClassSpec {
    builtin_class(name, BuiltinParams::default()).unwrap()
}

fn assert_strong_chain(k: &ClassSpec, c: &Chain) {
    for (i, s) in c.stages.iter().enumerate() {
        assert!(k.contains(s), "stage {i} left the class");
        for later in &c.stages[i + 1..] {
            assert!(s.is_induced_in(later) && k.strong_set(s.universe(), later), "stage {i} not strong in a later stage");
        }
    }
}

#[test]
fn graph_chain_becomes_rich_monotonically() {
    let k = class("all_graphs");
    let c = grow_generic(&k, 30, 2, None).unwrap();
    assert_strong_chain(&k, &c);
    let fr: Vec<f64> = c.stages.iter().map(|s| probe_richness(&k, s, 1, 2).unwrap().fraction).collect();
    assert!(fr.windows(2).all(|w| w[0] <= w[1]), "{fr:?}");
    assert_eq!(fr.last().copied(), Some(1.0));
    // Growth stops on its own once nothing up to the cap is missing.
    assert!(c.stopped.is_some() && c.stages.len() < 31);
}

#[test]
fn growth_is_deterministic() {
    let k = class("one_local_no_edges_out");
    let a = serde_json::to_string(&grow_generic(&k, 15, 2, None).unwrap()).unwrap();
    let b = serde_json::to_string(&grow_generic(&k, 15, 2, None).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn one_local_chain_is_strong() {
    let k = class("one_local_no_edges_out");
    let c = grow_generic(&k, 15, 2, None).unwrap();
    assert_strong_chain(&k, &c);
    assert!(c.last().size() > 2);
}

#[test]
fn linear_order_stages_lag_but_later_stages_catch_up() {
    let k = class("linear_orders");
    let c = grow_generic(&k, 30, 3, None).unwrap();
    assert_strong_chain(&k, &c);
    // A maximum has nothing above it at every finite stage.
    for s in c.stages.iter().filter(|s| !s.is_empty()) {
        assert!(!probe_richness(&k, s, 1, 2).unwrap().complete());
    }
    let early = &c.stages[3];
    let r = probe_richness_over(&k, early, c.last(), 2, 3).unwrap();
    assert!(r.complete(), "{:?}", r.unrealized);
}

/// Indices of stages whose factor-0 reduct is rich at (1, 2).
fn rich_reduct_stages(m: &MergeSpec, steps: usize) -> Vec<usize> {
    let c = grow_generic(&m.merged_class(), steps, 2, None).unwrap();
    (0..c.stages.len()).filter(|&i| probe_reduct_generic(m, &c.stages[i], 0, 1, 2).unwrap().complete()).collect()
}

// Tasks of the other factor add points that are fresh in this reduct, so
// the fraction dips and recovers; some stage reaches 100%.
#[test]
fn merged_reducts_become_rich() {
    let m = MergeSpec::new(vec![(class("all_graphs"), "L1"), (class("linear_orders"), "L2")]).unwrap();
    assert!(!rich_reduct_stages(&m, 40).is_empty());
}

// Every task adding a point outside a class can open a fresh singleton
// class, and its repair waits behind a queue that grows with the stage. So
// no stage is rich at (1, 2), but tasks over an early stage are all met.
#[test]
fn equivalence_reduct_is_rich_with_a_lag() {
    let m = MergeSpec::new(vec![(class("equivalence"), "L1"), (class("all_graphs"), "L2")]).unwrap();
    let c = grow_generic(&m.merged_class(), 60, 2, None).unwrap();
    let last = m.reduct(c.last(), 0);
    assert!(!probe_richness(&m.factors()[0].class, &last, 1, 2).unwrap().complete());
    let early = m.reduct(&c.stages[10], 0);
    assert!(probe_richness_over(&m.factors()[0].class, &early, &last, 1, 2).unwrap().complete());
}

#[test]
fn trivial_chain_probe_is_vacuous() {
    let m = MergeSpec::new(vec![(class("all_graphs"), "L1"), (class("equivalence"), "L2")]).unwrap();
    let empty = Structure::empty(m.signature().clone());
    let r = probe_reduct_generic(&m, &empty, 0, 0, 0).unwrap();
    assert_eq!((r.instances, r.realized), (1, 1));
}

fn class_of_m() -> (MergeSpec, Chain) {
    let m = MergeSpec::new(vec![(class("all_graphs"), "L1"), (class("equivalence"), "L2")]).unwrap();
    let k = m.merged_class();
    let plan = GrowthPlan {
        seed: Some(Structure::discrete(k.signature.clone(), [0])),
        focus: vec![0],
        region: Some(parse_formula("(fn (x m) (E_eq x m))", Some("L2")).unwrap()),
        focus_weight: 4,
    };
    let c = grow_generic_with(&k, 60, 3, &plan).unwrap();
    (m, c)
}

#[test]
fn definable_class_of_m_is_rich() {
    let (m, c) = class_of_m();
    assert_strong_chain(&m.merged_class(), &c);
    let phi = parse_formula("(fn (x m) (E_eq x m))", Some("L2")).unwrap();
    let r = probe_definable_reduct(&m, c.last(), 0, &phi, &[0], 1, 2).unwrap();
    assert!(r.defined.len() >= 10);
    assert!(r.richness.complete(), "{:?}", r.richness.unrealized);
    assert!(r.witnesses_verified);
}

#[test]
fn negation_free_extensions_grow_along_the_chain() {
    let (_, c) = class_of_m();
    let phi = parse_formula("(fn (x m) (exists (y) (and (E_eq y m) (E x y))))", None).unwrap();
    let ext: Vec<_> = c.stages.iter().map(|s| eval_formula(s, &phi, &[0]).unwrap()).collect();
    for (i, s) in c.stages.iter().enumerate() {
        for later in &ext[i + 1..] {
            let restricted: std::collections::BTreeSet<_> = later.intersection(s.universe()).copied().collect();
            assert!(ext[i].is_subset(&restricted));
        }
    }
}

#[test]
fn everything_formula_reduces_to_the_reduct_probe() {
    let m = MergeSpec::new(vec![(class("all_graphs"), "L1"), (class("equivalence"), "L2")]).unwrap();
    let c = grow_generic(&m.merged_class(), 20, 2, None).unwrap();
    let phi = parse_formula("(fn (x) (= x x))", None).unwrap();
    let d = probe_definable_reduct(&m, c.last(), 0, &phi, &[], 1, 2).unwrap();
    let g = probe_reduct_generic(&m, c.last(), 0, 1, 2).unwrap();
    assert_eq!((d.richness.instances, d.richness.realized), (g.instances, g.realized));
}

#[test]
fn empty_extension_is_vacuous() {
    let m = MergeSpec::new(vec![(class("all_graphs"), "L1"), (class("equivalence"), "L2")]).unwrap();
    let c = grow_generic(&m.merged_class(), 5, 2, None).unwrap();
    let phi = parse_formula("(fn (x) false)", None).unwrap();
    let d = probe_definable_reduct(&m, c.last(), 0, &phi, &[], 1, 2).unwrap();
    assert!(d.defined.is_empty());
    assert!(d.richness.diagnostic.is_some());
    assert!(d.witnesses_verified);
}

