//! The built-in class catalog.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_rational::Ratio;

use super::shelah_spencer::{ShelahSpencer, DEFAULT_SIZE_CAP};
use super::{ClassFlags, ClassRules, ClassSpec, DimensionParams};
use crate::enumerate::tuples_over;
use crate::error::{input, Result};
use crate::structure::{has_repeat, sig, Elem, Shape, Signature, Structure, Symbol, Tuple};

/// Strong substructure is plain inclusion; membership is unrestricted.
#[derive(Debug)]
pub struct Unrestricted;

impl ClassRules for Unrestricted {
    fn contains(&self, _: &Structure) -> bool {
        true
    }
    fn strong(&self, _: &BTreeSet<Elem>, _: &Structure) -> bool {
        true
    }
}

#[derive(Debug)]
pub struct KnFree {
    n: usize,
}

impl ClassRules for KnFree {
    fn contains(&self, s: &Structure) -> bool {
        let elems = s.elems();
        let clique = combinations(&elems, self.n).any(|c| {
            c.iter().enumerate().all(|(i, &x)| c[i + 1..].iter().all(|&y| s.holds(0, &[x, y])))
        });
        !clique
    }
    fn strong(&self, _: &BTreeSet<Elem>, _: &Structure) -> bool {
        true
    }
}

fn combinations<T: Copy>(items: &[T], k: usize) -> impl Iterator<Item = Vec<T>> + '_ {
    let n = items.len();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut first = k <= n;
    std::iter::from_fn(move || {
        if first {
            first = false;
            return Some(idx.iter().map(|&i| items[i]).collect());
        }
        if k == 0 || k > n {
            return None;
        }
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] != i + n - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                return Some(idx.iter().map(|&i| items[i]).collect());
            }
        }
        None
    })
}

pub(crate) fn is_linear_order(s: &Structure) -> bool {
    let elems = s.elems();
    for (i, &x) in elems.iter().enumerate() {
        for &y in &elems[i + 1..] {
            if s.holds(0, &[x, y]) == s.holds(0, &[y, x]) {
                return false;
            }
        }
    }
    s.tuples(0).iter().all(|t| {
        s.tuples(0).iter().filter(|u| u[0] == t[1]).all(|u| s.holds(0, &[t[0], u[1]]))
    })
}

#[derive(Debug)]
pub struct LinearOrders;

impl ClassRules for LinearOrders {
    fn contains(&self, s: &Structure) -> bool {
        is_linear_order(s)
    }
    fn strong(&self, _: &BTreeSet<Elem>, _: &Structure) -> bool {
        true
    }
}

/// Linear orders where A ≤ B iff A is an initial segment of B.
#[derive(Debug)]
pub struct InitialSegments;

impl ClassRules for InitialSegments {
    fn contains(&self, s: &Structure) -> bool {
        is_linear_order(s)
    }
    fn strong(&self, a: &BTreeSet<Elem>, b: &Structure) -> bool {
        a.iter().all(|&x| b.universe().iter().filter(|y| !a.contains(y)).all(|&y| b.holds(0, &[x, y])))
    }
}

/// Symmetric irreflexive binary relation, transitive on distinct elements.
#[derive(Debug)]
pub struct Equivalence;

impl ClassRules for Equivalence {
    fn contains(&self, s: &Structure) -> bool {
        let e = s.tuples(0);
        e.iter().all(|t| {
            e.iter().all(|u| {
                let shared: Vec<_> = t.iter().filter(|x| u.contains(x)).collect();
                if shared.len() != 1 {
                    return true;
                }
                let x = *t.iter().find(|x| !u.contains(x)).unwrap();
                let z = *u.iter().find(|z| !t.contains(z)).unwrap();
                s.holds(0, &[x, z])
            })
        })
    }
    fn strong(&self, _: &BTreeSet<Elem>, _: &Structure) -> bool {
        true
    }
}

/// A 2n-ary relation E_n read as an equivalence on n-element sets: both
/// halves repetition-free, halves with different underlying sets, closed
/// under permuting either half and under swapping halves, transitive.
#[derive(Debug)]
pub struct TupleEquivalence {
    pub n: usize,
}

impl TupleEquivalence {
    /// Set-level relation, or `None` if some tuple is malformed or an
    /// ordering is missing.
    pub fn set_pairs(&self, s: &Structure, sym: usize) -> Option<BTreeSet<(Tuple, Tuple)>> {
        let n = self.n;
        let mut pairs = BTreeSet::new();
        for t in s.tuples(sym) {
            let (a, b) = t.split_at(n);
            if has_repeat(a) || has_repeat(b) {
                return None;
            }
            let mut sa = a.to_vec();
            let mut sb = b.to_vec();
            sa.sort_unstable();
            sb.sort_unstable();
            if sa == sb {
                return None;
            }
            pairs.insert((sa, sb));
        }
        let expected: usize = pairs.len() * factorial(n) * factorial(n);
        if expected != s.tuples(sym).len() {
            return None;
        }
        for (a, b) in &pairs {
            for pa in permutations(a) {
                for pb in permutations(b) {
                    let mut t = pa.clone();
                    t.extend(&pb);
                    if !s.tuples(sym).contains(&t) {
                        return None;
                    }
                }
            }
        }
        Some(pairs)
    }

    pub fn is_valid(&self, s: &Structure, sym: usize) -> bool {
        let Some(pairs) = self.set_pairs(s, sym) else {
            return false;
        };
        pairs.iter().all(|(a, b)| {
            pairs.contains(&(b.clone(), a.clone()))
                && pairs.iter().filter(|(c, _)| c == b).all(|(_, d)| d == a || pairs.contains(&(a.clone(), d.clone())))
        })
    }
}

impl ClassRules for TupleEquivalence {
    fn contains(&self, s: &Structure) -> bool {
        self.is_valid(s, 0)
    }
    fn strong(&self, _: &BTreeSet<Elem>, _: &Structure) -> bool {
        true
    }
}

pub(crate) fn factorial(n: usize) -> usize {
    (1..=n).product()
}

pub(crate) fn permutations(items: &[Elem]) -> Vec<Vec<Elem>> {
    let mut v = items.to_vec();
    v.sort_unstable();
    let mut out = vec![v.clone()];
    while super::shelah_spencer::next_permutation(&mut v) {
        out.push(v.clone());
    }
    out
}

/// A ≤ B iff no tuple of the listed symbols meets both A and B − A.
#[derive(Debug)]
pub struct NoCrossing {
    pub symbols: Vec<usize>,
}

impl ClassRules for NoCrossing {
    fn contains(&self, _: &Structure) -> bool {
        true
    }
    fn strong(&self, a: &BTreeSet<Elem>, b: &Structure) -> bool {
        self.symbols.iter().all(|&sym| {
            b.tuples(sym).iter().all(|t| {
                let inside = t.iter().filter(|e| a.contains(e)).count();
                inside == 0 || inside == t.len()
            })
        })
    }
}

/// A ≤ B iff every a ∈ A and b ∈ B − A are adjacent.
#[derive(Debug)]
pub struct AllEdgesIn;

impl ClassRules for AllEdgesIn {
    fn contains(&self, _: &Structure) -> bool {
        true
    }
    fn strong(&self, a: &BTreeSet<Elem>, b: &Structure) -> bool {
        a.iter().all(|&x| b.universe().iter().filter(|y| !a.contains(y)).all(|&y| b.holds(0, &[x, y])))
    }
}

/// Pairwise disjoint predicates within each arity.
#[derive(Debug)]
pub struct DisjointPredicates;

impl ClassRules for DisjointPredicates {
    fn contains(&self, s: &Structure) -> bool {
        let sig = s.signature();
        let mut seen: BTreeSet<(usize, &Tuple)> = BTreeSet::new();
        for sym in 0..sig.len() {
            for t in s.tuples(sym) {
                if !seen.insert((sig.symbol(sym).arity, t)) {
                    return false;
                }
            }
        }
        true
    }
    fn strong(&self, _: &BTreeSet<Elem>, _: &Structure) -> bool {
        true
    }
}

/// Relation-wise complement over repetition-free tuples. Tuples with a
/// repeated element are left as they are.
pub fn complement_structure(a: &Structure) -> Structure {
    let sig = a.signature().clone();
    let elems = a.elems();
    let mut out = Structure::discrete(sig.clone(), elems.iter().copied());
    for sym in 0..sig.len() {
        let s = sig.symbol(sym);
        let injective_shape = if s.shape == Shape::Set { Shape::Set } else { Shape::Injective };
        for t in tuples_over(injective_shape, s.arity, &elems, &[]) {
            if !a.tuples(sym).contains(&t) {
                out.insert_raw(sym, t);
            }
        }
        for t in a.tuples(sym) {
            if has_repeat(t) {
                out.insert_raw(sym, t.clone());
            }
        }
    }
    out
}

#[derive(Debug)]
pub struct Complement {
    pub inner: Arc<dyn ClassRules>,
}

impl ClassRules for Complement {
    fn contains(&self, s: &Structure) -> bool {
        self.inner.contains(&complement_structure(s))
    }
    fn strong(&self, a: &BTreeSet<Elem>, b: &Structure) -> bool {
        self.inner.strong(a, &complement_structure(b))
    }
}

/// The complement class: members are complements of members, and
/// A∼ ≤∼ B∼ iff A ≤ B.
pub fn complement_class(k: &ClassSpec) -> ClassSpec {
    let flags = ClassFlags {
        free_amalgamation: false,
        fraisse: k.flags.fraisse,
        ..k.flags
    };
    let mut out = ClassSpec::new(
        &format!("complement({})", k.id),
        k.signature.clone(),
        Arc::new(Complement { inner: k.rules.clone() }),
        flags,
    );
    out.size_cap = k.size_cap;
    out
}

/// Parameters for parameterized built-ins.
#[derive(Clone, Copy, Debug, Default)]
pub struct BuiltinParams {
    pub alpha: Option<Ratio<i64>>,
    pub n: Option<usize>,
}

const FRAISSE_FREE: ClassFlags = ClassFlags {
    closed_under_substructure: true,
    one_local: true,
    fraisse: true,
    free_amalgamation: true,
    disjoint_amalgamation: true,
    disjoint_parallel_strongness: true,
    smooth_intersections: true,
};

const FRAISSE_NOT_FREE: ClassFlags = ClassFlags { free_amalgamation: false, ..FRAISSE_FREE };

const ONE_LOCAL_FREE: ClassFlags = ClassFlags { fraisse: false, ..FRAISSE_FREE };

pub const BUILTIN_NAMES: &[&str] = &[
    "shelah_spencer",
    "all_graphs",
    "kn_free",
    "linear_orders",
    "initial_segment_orders",
    "equivalence",
    "tuple_equivalence",
    "one_local_no_edges_out",
    "one_local_all_edges_in",
    "one_local_ternary",
    "one_local_two_colors",
    "one_local_inert",
];

fn two_binary(a: &str, b: &str) -> Arc<Signature> {
    Arc::new(
        Signature::new(vec![Symbol::new(a, 2, "L", Shape::Set), Symbol::new(b, 2, "L", Shape::Set)])
            .expect("distinct names"),
    )
}

pub fn builtin_class(name: &str, params: BuiltinParams) -> Result<ClassSpec> {
    let spec = match name {
        "shelah_spencer" => {
            let Some(alpha) = params.alpha else {
                return input("shelah_spencer needs alpha");
            };
            let p = DimensionParams::new(alpha)?;
            let flags = ClassFlags {
                one_local: false,
                fraisse: false,
                ..FRAISSE_FREE
            };
            let mut spec = ClassSpec::new(
                &format!("shelah_spencer:{}", alpha),
                sig::graph(),
                Arc::new(ShelahSpencer::new(p)),
                flags,
            );
            spec.size_cap = Some(DEFAULT_SIZE_CAP);
            spec
        }
        "all_graphs" => ClassSpec::new(name, sig::graph(), Arc::new(Unrestricted), FRAISSE_FREE),
        "kn_free" => {
            let n = params.n.unwrap_or(3);
            if n < 2 {
                return input("kn_free needs n >= 2");
            }
            ClassSpec::new(&format!("kn_free:{n}"), sig::graph(), Arc::new(KnFree { n }), FRAISSE_FREE)
        }
        "linear_orders" => ClassSpec::new(
            name,
            sig::single("<", 2, Shape::Injective, "L"),
            Arc::new(LinearOrders),
            FRAISSE_NOT_FREE,
        ),
        "initial_segment_orders" => ClassSpec::new(
            name,
            sig::single("<", 2, Shape::Injective, "L"),
            Arc::new(InitialSegments),
            ClassFlags {
                fraisse: false,
                disjoint_amalgamation: false,
                ..FRAISSE_NOT_FREE
            },
        ),
        "equivalence" => {
            ClassSpec::new(name, sig::single("E_eq", 2, Shape::Set, "L"), Arc::new(Equivalence), FRAISSE_NOT_FREE)
        }
        "tuple_equivalence" => {
            let n = params.n.unwrap_or(1);
            if n == 0 {
                return input("tuple_equivalence needs n >= 1");
            }
            ClassSpec::new(
                &format!("tuple_equivalence:{n}"),
                sig::single(&format!("E_{n}"), 2 * n, Shape::Any, "L"),
                Arc::new(TupleEquivalence { n }),
                FRAISSE_NOT_FREE,
            )
        }
        "one_local_no_edges_out" => {
            ClassSpec::new(name, sig::graph(), Arc::new(NoCrossing { symbols: vec![0] }), ONE_LOCAL_FREE)
        }
        "one_local_all_edges_in" => ClassSpec::new(
            name,
            sig::graph(),
            Arc::new(AllEdgesIn),
            ClassFlags { free_amalgamation: false, ..ONE_LOCAL_FREE },
        ),
        "one_local_ternary" => ClassSpec::new(
            name,
            sig::single("R", 3, Shape::Set, "L"),
            Arc::new(NoCrossing { symbols: vec![0] }),
            ONE_LOCAL_FREE,
        ),
        "one_local_two_colors" => ClassSpec::new(
            name,
            two_binary("E_r", "E_b"),
            Arc::new(NoCrossing { symbols: vec![0, 1] }),
            ONE_LOCAL_FREE,
        ),
        "one_local_inert" => {
            ClassSpec::new(name, two_binary("E", "I"), Arc::new(NoCrossing { symbols: vec![0] }), ONE_LOCAL_FREE)
        }
        _ => return input(format!("unknown class {name}")),
    };
    Ok(spec)
}

/// All structures over `signature`, ordered by inclusion.
pub fn all_structures(signature: Arc<Signature>) -> ClassSpec {
    ClassSpec::new("all_structures", signature, Arc::new(Unrestricted), FRAISSE_FREE)
}

/// Pairwise disjoint predicates per arity, ordered by inclusion.
pub fn disjoint_predicates(signature: Arc<Signature>) -> ClassSpec {
    ClassSpec::new("disjoint_predicates", signature, Arc::new(DisjointPredicates), FRAISSE_FREE)
}
