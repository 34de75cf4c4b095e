//! Embedding and isomorphism enumeration by backtracking, plus
//! isomorphism-class bookkeeping used for "up to isomorphism" enumeration.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{input, Result};
use crate::structure::{normalize, Elem, Structure, Tuple};

/// An injective element map, keyed by source element.
pub type Embedding = BTreeMap<Elem, Elem>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Injective, preserves and reflects every relation.
    Embedding,
    /// An embedding that is also surjective.
    Isomorphism,
}

type Incidence = HashMap<Elem, Vec<(usize, Tuple)>>;

fn incidence(s: &Structure) -> Incidence {
    let mut inc: Incidence = s.universe().iter().map(|&e| (e, Vec::new())).collect();
    for sym in 0..s.signature().len() {
        for t in s.tuples(sym) {
            let mut seen: Vec<Elem> = Vec::with_capacity(t.len());
            for &e in t {
                if !seen.contains(&e) {
                    seen.push(e);
                    inc.get_mut(&e).expect("tuple inside universe").push((sym, t.clone()));
                }
            }
        }
    }
    inc
}

/// Per-symbol, per-position occurrence counts of an element. Positions in
/// set-shaped tuples carry no meaning, so those count in a single slot.
fn degree_vector(s: &Structure, inc: &Incidence, e: Elem) -> Vec<u32> {
    let sig = s.signature();
    let mut offsets = Vec::with_capacity(sig.len());
    let mut total = 0;
    for sym in sig.symbols() {
        offsets.push(total);
        total += sym.arity;
    }
    let mut out = vec![0u32; total];
    for (sym, t) in &inc[&e] {
        let unordered = sig.symbol(*sym).shape == crate::structure::Shape::Set;
        for (pos, &x) in t.iter().enumerate() {
            if x == e {
                out[offsets[*sym] + if unordered { 0 } else { pos }] += 1;
            }
        }
    }
    out
}

/// Lazy stream of embeddings of `a` into `b`, in lexicographic order of the
/// images taken along `a`'s universe order.
pub struct Embeddings<'a> {
    a: &'a Structure,
    b: &'a Structure,
    mode: Mode,
    order: Vec<Elem>,
    cands: Vec<Elem>,
    inc_a: Incidence,
    inc_b: Incidence,
    deg_a: HashMap<Elem, Vec<u32>>,
    deg_b: HashMap<Elem, Vec<u32>>,
    map: Embedding,
    inverse: BTreeMap<Elem, Elem>,
    stack: Vec<usize>,
    next: Vec<usize>,
    done: bool,
    emitted_trivial: bool,
}

impl<'a> Embeddings<'a> {
    pub fn new(a: &'a Structure, b: &'a Structure, mode: Mode) -> Result<Self> {
        Self::with_prefix(a, b, mode, &Embedding::new())
    }

    /// Only maps extending `prefix` are produced.
    pub fn with_prefix(a: &'a Structure, b: &'a Structure, mode: Mode, prefix: &Embedding) -> Result<Self> {
        if !a.signature().compatible(b.signature()) {
            return input("embedding between structures of different signatures");
        }
        for (x, y) in prefix {
            if !a.contains_elem(*x) || !b.contains_elem(*y) {
                return input(format!("prefix pair {x}->{y} is outside the universes"));
            }
        }
        let inc_a = incidence(a);
        let inc_b = incidence(b);
        let deg_a = a.universe().iter().map(|&e| (e, degree_vector(a, &inc_a, e))).collect();
        let deg_b = b.universe().iter().map(|&e| (e, degree_vector(b, &inc_b, e))).collect();
        let order: Vec<Elem> = a.universe().iter().copied().filter(|e| !prefix.contains_key(e)).collect();
        let mut it = Embeddings {
            a,
            b,
            mode,
            order,
            cands: b.elems(),
            inc_a,
            inc_b,
            deg_a,
            deg_b,
            map: Embedding::new(),
            inverse: BTreeMap::new(),
            stack: Vec::new(),
            next: Vec::new(),
            done: false,
            emitted_trivial: false,
        };
        it.next = vec![0; it.order.len() + 1];
        let size_ok = match mode {
            Mode::Embedding => a.size() <= b.size(),
            Mode::Isomorphism => a.size() == b.size(),
        };
        if !size_ok {
            it.done = true;
            return Ok(it);
        }
        for (&x, &y) in prefix {
            if it.inverse.contains_key(&y) || !it.try_assign(x, y) {
                it.done = true;
                break;
            }
        }
        Ok(it)
    }

    fn degrees_ok(&self, x: Elem, y: Elem) -> bool {
        let (da, db) = (&self.deg_a[&x], &self.deg_b[&y]);
        match self.mode {
            Mode::Isomorphism => da == db,
            Mode::Embedding => da.iter().zip(db).all(|(p, q)| p <= q),
        }
    }

    /// Assigns x -> y if that keeps the partial map an embedding.
    fn try_assign(&mut self, x: Elem, y: Elem) -> bool {
        if !self.degrees_ok(x, y) {
            return false;
        }
        self.map.insert(x, y);
        self.inverse.insert(y, x);
        let sig = self.a.signature();
        let ok = self.inc_a[&x].iter().all(|(sym, t)| {
            if !t.iter().all(|e| self.map.contains_key(e)) {
                return true;
            }
            let img: Tuple = t.iter().map(|e| self.map[e]).collect();
            normalize(sig.symbol(*sym).shape, &img).is_some_and(|n| self.b.tuples(*sym).contains(&n))
        }) && self.inc_b[&y].iter().all(|(sym, t)| {
            if !t.iter().all(|e| self.inverse.contains_key(e)) {
                return true;
            }
            let pre: Tuple = t.iter().map(|e| self.inverse[e]).collect();
            normalize(sig.symbol(*sym).shape, &pre).is_some_and(|n| self.a.tuples(*sym).contains(&n))
        });
        if !ok {
            self.map.remove(&x);
            self.inverse.remove(&y);
        }
        ok
    }

    fn unassign(&mut self, x: Elem) {
        if let Some(y) = self.map.remove(&x) {
            self.inverse.remove(&y);
        }
    }
}

impl Iterator for Embeddings<'_> {
    type Item = Embedding;

    fn next(&mut self) -> Option<Embedding> {
        if self.done {
            return None;
        }
        let n = self.order.len();
        if n == 0 {
            if self.emitted_trivial {
                self.done = true;
                return None;
            }
            self.emitted_trivial = true;
            return Some(self.map.clone());
        }
        loop {
            let d = self.stack.len();
            if d == n {
                let out = self.map.clone();
                let x = self.order[d - 1];
                self.unassign(x);
                self.stack.pop();
                return Some(out);
            }
            let x = self.order[d];
            let mut chosen = None;
            let mut i = self.next[d];
            while i < self.cands.len() {
                let y = self.cands[i];
                i += 1;
                if !self.inverse.contains_key(&y) && self.try_assign(x, y) {
                    chosen = Some(i);
                    break;
                }
            }
            match chosen {
                Some(i) => {
                    self.next[d] = i;
                    self.stack.push(i - 1);
                    self.next[d + 1] = 0;
                }
                None => {
                    self.next[d] = 0;
                    if d == 0 {
                        self.done = true;
                        return None;
                    }
                    let prev = self.order[d - 1];
                    self.unassign(prev);
                    self.stack.pop();
                }
            }
        }
    }
}

/// First isomorphism from `a` onto `b` fixing every element of `fixed`.
pub fn isomorphism_over(a: &Structure, b: &Structure, fixed: &BTreeSet<Elem>) -> Option<Embedding> {
    let prefix: Embedding = fixed.iter().map(|&e| (e, e)).collect();
    Embeddings::with_prefix(a, b, Mode::Isomorphism, &prefix).ok()?.next()
}

pub fn are_isomorphic(a: &Structure, b: &Structure) -> bool {
    isomorphism_over(a, b, &BTreeSet::new()).is_some()
}

/// Isomorphism invariant relative to a pointwise fixed set: tuple counts plus
/// the sorted multiset of element degree vectors, fixed elements keyed by id.
pub fn invariant(s: &Structure, fixed: &BTreeSet<Elem>) -> Vec<u32> {
    let inc = incidence(s);
    let mut out = vec![s.size() as u32];
    for sym in 0..s.signature().len() {
        out.push(s.tuples(sym).len() as u32);
    }
    let mut rows: Vec<Vec<u32>> = s
        .universe()
        .iter()
        .map(|&e| {
            let mut row = vec![if fixed.contains(&e) { e } else { u32::MAX }];
            row.extend(degree_vector(s, &inc, e));
            row
        })
        .collect();
    rows.sort();
    for r in rows {
        out.push(u32::MAX - 1);
        out.extend(r);
    }
    out
}

/// Representatives of isomorphism classes over a fixed set, in insertion
/// order.
#[derive(Debug, Default)]
pub struct IsoSet {
    fixed: BTreeSet<Elem>,
    buckets: HashMap<Vec<u32>, Vec<usize>>,
    reps: Vec<Structure>,
}

impl IsoSet {
    pub fn new(fixed: BTreeSet<Elem>) -> Self {
        IsoSet { fixed, buckets: HashMap::new(), reps: Vec::new() }
    }

    /// Inserts `s` unless an isomorphic copy over the fixed set is present.
    pub fn insert(&mut self, s: Structure) -> bool {
        let key = invariant(&s, &self.fixed);
        let bucket = self.buckets.entry(key).or_default();
        if bucket.iter().any(|&i| isomorphism_over(&self.reps[i], &s, &self.fixed).is_some()) {
            return false;
        }
        bucket.push(self.reps.len());
        self.reps.push(s);
        true
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn into_vec(self) -> Vec<Structure> {
        self.reps
    }

    pub fn as_slice(&self) -> &[Structure] {
        &self.reps
    }
}

/// Composition `g ∘ f`.
pub fn compose(f: &Embedding, g: &Embedding) -> Embedding {
    f.iter().filter_map(|(x, y)| g.get(y).map(|z| (*x, *z))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{sig, Shape};

    #[test]
    fn vertex_into_edgeless_triple() {
        let a = Structure::discrete(sig::graph(), [0]);
        let b = Structure::discrete(sig::graph(), [0, 1, 2]);
        assert_eq!(Embeddings::new(&a, &b, Mode::Embedding).unwrap().count(), 3);
    }

    #[test]
    fn directed_edge_has_only_identity() {
        let s = sig::single("R", 2, Shape::Injective, "L");
        let a = Structure::from_named(s, [0, 1], &[("R", vec![vec![0, 1]])]).unwrap();
        let isos: Vec<_> = Embeddings::new(&a, &a, Mode::Isomorphism).unwrap().collect();
        assert_eq!(isos.len(), 1);
        assert_eq!(isos[0], [(0, 0), (1, 1)].into());
    }

    #[test]
    fn larger_source_gives_nothing() {
        let a = Structure::discrete(sig::graph(), [0, 1, 2]);
        let b = Structure::discrete(sig::graph(), [0, 1]);
        assert_eq!(Embeddings::new(&a, &b, Mode::Embedding).unwrap().count(), 0);
    }

    #[test]
    fn embeddings_reflect_relations() {
        let edge = Structure::from_named(sig::graph(), [0, 1], &[("E", vec![vec![0, 1]])]).unwrap();
        let non = Structure::discrete(sig::graph(), [0, 1]);
        let path = Structure::from_named(sig::graph(), 0..3, &[("E", vec![vec![0, 1], vec![1, 2]])]).unwrap();
        assert_eq!(Embeddings::new(&edge, &path, Mode::Embedding).unwrap().count(), 4);
        assert_eq!(Embeddings::new(&non, &path, Mode::Embedding).unwrap().count(), 2);
    }

    #[test]
    fn prefix_is_respected() {
        let path = Structure::from_named(sig::graph(), 0..3, &[("E", vec![vec![0, 1], vec![1, 2]])]).unwrap();
        let maps: Vec<_> =
            Embeddings::with_prefix(&path, &path, Mode::Isomorphism, &[(0, 2)].into()).unwrap().collect();
        assert_eq!(maps, vec![[(0, 2), (1, 1), (2, 0)].into()]);
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let a = Structure::discrete(sig::graph(), [0]);
        let b = Structure::discrete(sig::single("R", 3, Shape::Set, "L"), [0]);
        assert!(Embeddings::new(&a, &b, Mode::Embedding).is_err());
    }

    #[test]
    fn iso_set_dedups() {
        let mut set = IsoSet::new(BTreeSet::new());
        let e1 = Structure::from_named(sig::graph(), 0..3, &[("E", vec![vec![0, 1]])]).unwrap();
        let e2 = Structure::from_named(sig::graph(), 0..3, &[("E", vec![vec![1, 2]])]).unwrap();
        assert!(set.insert(e1.clone()));
        assert!(!set.insert(e2.clone()));
        let mut fixed = IsoSet::new([0].into());
        assert!(fixed.insert(e1));
        assert!(fixed.insert(e2));
    }
}
