//! Finite relational signatures and structures.
//!
//! Element ids are small integers; every collection is ordered so that all
//! enumerations built on top of these types are reproducible. Structures are
//! values: every operation returns a new structure.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

pub type Elem = u32;
pub type Tuple = Vec<Elem>;

/// Storage convention of a relation symbol.
///
/// `Set` symbols are symmetric and irreflexive: a tuple is identified with
/// its underlying set and stored sorted. `Injective` symbols hold ordered
/// tuples without repeated elements. `Any` places no restriction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[derive(Default)]
pub enum Shape {
    Set,
    Injective,
    #[default]
    Any,
}


#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    pub language: String,
    #[serde(default)]
    pub shape: Shape,
}

impl Symbol {
    pub fn new(name: &str, arity: usize, language: &str, shape: Shape) -> Self {
        Symbol { name: name.to_string(), arity, language: language.to_string(), shape }
    }
}

/// A finite relational vocabulary. Symbols are addressed by position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for s in &symbols {
            if s.arity == 0 {
                return input(format!("symbol {} has arity 0", s.name));
            }
            if s.name.is_empty() {
                return input("empty symbol name");
            }
            if !seen.insert(s.name.clone()) {
                return input(format!("duplicate symbol {}", s.name));
            }
        }
        Ok(Signature { symbols })
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, idx: usize) -> &Symbol {
        &self.symbols[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    /// Language tags in order of first appearance.
    pub fn languages(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for s in &self.symbols {
            if !out.contains(&s.language) {
                out.push(s.language.clone());
            }
        }
        out
    }

    /// Positions of the symbols carrying `tag`.
    pub fn language_indices(&self, tag: &str) -> Vec<usize> {
        (0..self.symbols.len()).filter(|&i| self.symbols[i].language == tag).collect()
    }

    /// Same symbols, every one moved into the language `tag`.
    pub fn retag(&self, tag: &str) -> Signature {
        Signature {
            symbols: self
                .symbols
                .iter()
                .map(|s| Symbol { language: tag.to_string(), ..s.clone() })
                .collect(),
        }
    }

    /// Sub-signature made of the given positions, in that order.
    pub fn select(&self, indices: &[usize]) -> Signature {
        Signature { symbols: indices.iter().map(|&i| self.symbols[i].clone()).collect() }
    }

    /// Concatenation of signatures; names must stay unique.
    pub fn concat(parts: &[&Signature]) -> Result<Signature> {
        Signature::new(parts.iter().flat_map(|p| p.symbols.iter().cloned()).collect())
    }

    /// Positional compatibility: same arities and shapes in the same order.
    /// Names and tags are ignored, so a renamed copy of a class signature is
    /// still understood by that class.
    pub fn compatible(&self, other: &Signature) -> bool {
        self.symbols.len() == other.symbols.len()
            && self
                .symbols
                .iter()
                .zip(&other.symbols)
                .all(|(a, b)| a.arity == b.arity && a.shape == b.shape)
    }
}

/// Normalizes a tuple for storage under `shape`, rejecting tuples the shape
/// does not admit.
pub(crate) fn normalize(shape: Shape, tuple: &[Elem]) -> Option<Tuple> {
    match shape {
        Shape::Any => Some(tuple.to_vec()),
        Shape::Injective => {
            if has_repeat(tuple) {
                None
            } else {
                Some(tuple.to_vec())
            }
        }
        Shape::Set => {
            let mut t = tuple.to_vec();
            t.sort_unstable();
            if t.windows(2).any(|w| w[0] == w[1]) {
                None
            } else {
                Some(t)
            }
        }
    }
}

pub(crate) fn has_repeat(tuple: &[Elem]) -> bool {
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            if tuple[i] == tuple[j] {
                return true;
            }
        }
    }
    false
}

/// A finite structure: a signature, an ordered universe and one tuple set
/// per symbol. Equality is literal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Structure {
    sig: Arc<Signature>,
    universe: BTreeSet<Elem>,
    rels: Vec<BTreeSet<Tuple>>,
}

impl Structure {
    pub fn empty(sig: Arc<Signature>) -> Self {
        let rels = vec![BTreeSet::new(); sig.len()];
        Structure { sig, universe: BTreeSet::new(), rels }
    }

    /// Structure on `universe` without any tuples.
    pub fn discrete(sig: Arc<Signature>, universe: impl IntoIterator<Item = Elem>) -> Self {
        let mut s = Structure::empty(sig);
        s.universe = universe.into_iter().collect();
        s
    }

    /// Builds a structure from named tuple lists, validating everything.
    pub fn from_named(
        sig: Arc<Signature>,
        universe: impl IntoIterator<Item = Elem>,
        relations: &[(&str, Vec<Tuple>)],
    ) -> Result<Self> {
        let mut s = Structure::discrete(sig, universe);
        for (name, tuples) in relations {
            let Some(idx) = s.sig.index_of(name) else {
                return input(format!("unknown symbol {name}"));
            };
            for t in tuples {
                s.insert(idx, t)?;
            }
        }
        Ok(s)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn universe(&self) -> &BTreeSet<Elem> {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn contains_elem(&self, e: Elem) -> bool {
        self.universe.contains(&e)
    }

    pub fn elems(&self) -> Vec<Elem> {
        self.universe.iter().copied().collect()
    }

    /// Largest element id, if any.
    pub fn max_elem(&self) -> Option<Elem> {
        self.universe.iter().next_back().copied()
    }

    pub fn tuples(&self, sym: usize) -> &BTreeSet<Tuple> {
        &self.rels[sym]
    }

    pub fn tuple_count(&self) -> usize {
        self.rels.iter().map(|r| r.len()).sum()
    }

    /// Whether `sym` holds on `tuple`, honoring the symbol's shape.
    pub fn holds(&self, sym: usize, tuple: &[Elem]) -> bool {
        let shape = self.sig.symbol(sym).shape;
        if shape == Shape::Set {
            match normalize(shape, tuple) {
                Some(t) => self.rels[sym].contains(&t),
                None => false,
            }
        } else {
            self.rels[sym].contains(tuple)
        }
    }

    pub fn holds_named(&self, name: &str, tuple: &[Elem]) -> bool {
        self.sig.index_of(name).is_some_and(|i| self.holds(i, tuple))
    }

    /// Validated insertion. Used while constructing values; the public
    /// surface otherwise only returns fresh structures.
    pub(crate) fn insert(&mut self, sym: usize, tuple: &[Elem]) -> Result<()> {
        let symbol = self.sig.symbol(sym);
        if tuple.len() != symbol.arity {
            return input(format!(
                "tuple {:?} has length {} but {} has arity {}",
                tuple,
                tuple.len(),
                symbol.name,
                symbol.arity
            ));
        }
        if let Some(e) = tuple.iter().find(|e| !self.universe.contains(e)) {
            return input(format!("element {e} of {:?} is outside the universe", tuple));
        }
        let Some(t) = normalize(symbol.shape, tuple) else {
            return input(format!("tuple {:?} is not admissible for {}", tuple, symbol.name));
        };
        self.rels[sym].insert(t);
        Ok(())
    }

    /// Insertion of an already normalized, in-universe tuple.
    pub(crate) fn insert_raw(&mut self, sym: usize, tuple: Tuple) {
        self.rels[sym].insert(tuple);
    }

    pub(crate) fn add_elem(&mut self, e: Elem) {
        self.universe.insert(e);
    }

    /// Returns a copy with extra tuples added (validated).
    pub fn with_tuples(&self, tuples: &[(usize, Tuple)]) -> Result<Structure> {
        let mut s = self.clone();
        for (sym, t) in tuples {
            s.insert(*sym, t)?;
        }
        Ok(s)
    }

    /// Returns a copy with additional isolated elements.
    pub fn with_elems(&self, extra: impl IntoIterator<Item = Elem>) -> Structure {
        let mut s = self.clone();
        s.universe.extend(extra);
        s
    }

    /// Induced substructure on `subset`.
    pub fn induced(&self, subset: &BTreeSet<Elem>) -> Result<Structure> {
        if let Some(e) = subset.iter().find(|e| !self.universe.contains(e)) {
            return input(format!("element {e} is not in the universe"));
        }
        Ok(self.induced_unchecked(subset))
    }

    pub(crate) fn induced_unchecked(&self, subset: &BTreeSet<Elem>) -> Structure {
        let rels = self
            .rels
            .iter()
            .map(|r| r.iter().filter(|t| t.iter().all(|e| subset.contains(e))).cloned().collect())
            .collect();
        Structure { sig: self.sig.clone(), universe: subset.clone(), rels }
    }

    /// Reduct to the symbols carrying the language tag `tag`.
    pub fn reduct(&self, tag: &str) -> Result<Structure> {
        let idx = self.sig.language_indices(tag);
        if idx.is_empty() {
            return input(format!("unknown language tag {tag}"));
        }
        let sub = Arc::new(self.sig.select(&idx));
        Ok(self.project(&idx, sub))
    }

    /// Keeps the listed symbols (in that order) under the compatible
    /// signature `target`.
    pub fn project(&self, indices: &[usize], target: Arc<Signature>) -> Structure {
        debug_assert_eq!(indices.len(), target.len());
        let rels = indices.iter().map(|&i| self.rels[i].clone()).collect();
        Structure { sig: target, universe: self.universe.clone(), rels }
    }

    /// Same relations under a positionally compatible signature.
    pub fn with_signature(&self, sig: Arc<Signature>) -> Result<Structure> {
        if !self.sig.compatible(&sig) {
            return input("signatures are not compatible");
        }
        Ok(Structure { sig, universe: self.universe.clone(), rels: self.rels.clone() })
    }

    /// Places the relations of `parts` side by side on a common universe.
    /// The signature of the result must be the concatenation of the parts'
    /// signatures (up to names and tags).
    pub fn combine(sig: Arc<Signature>, parts: &[&Structure]) -> Result<Structure> {
        let Some(first) = parts.first() else {
            return Ok(Structure::empty(sig));
        };
        if parts.iter().any(|p| p.universe != first.universe) {
            return input("parts have different universes");
        }
        let rels: Vec<_> = parts.iter().flat_map(|p| p.rels.iter().cloned()).collect();
        if rels.len() != sig.len() {
            return input("parts do not cover the signature");
        }
        for (i, p) in parts.iter().flat_map(|p| p.sig.symbols().iter()).enumerate() {
            let s = sig.symbol(i);
            if s.arity != p.arity || s.shape != p.shape {
                return input(format!("symbol {} does not match {}", s.name, p.name));
            }
        }
        Ok(Structure { sig, universe: first.universe.clone(), rels })
    }

    /// Whether `self` is an induced substructure of `other` (literal ids).
    pub fn is_induced_in(&self, other: &Structure) -> bool {
        if !self.sig.compatible(&other.sig) || !self.universe.is_subset(&other.universe) {
            return false;
        }
        self.rels.iter().zip(&other.rels).all(|(mine, theirs)| {
            mine.is_subset(theirs)
                && theirs
                    .iter()
                    .filter(|t| t.iter().all(|e| self.universe.contains(e)))
                    .count()
                    == mine.len()
        })
    }

    /// Renames elements through `map`, which must be injective on the
    /// universe.
    pub fn relabel(&self, map: &BTreeMap<Elem, Elem>) -> Result<Structure> {
        let mut image = BTreeSet::new();
        for e in &self.universe {
            let Some(&v) = map.get(e) else {
                return input(format!("relabeling misses element {e}"));
            };
            if !image.insert(v) {
                return input(format!("relabeling is not injective at {v}"));
            }
        }
        let mut out = Structure::discrete(self.sig.clone(), image);
        for (i, r) in self.rels.iter().enumerate() {
            let shape = self.sig.symbol(i).shape;
            for t in r {
                let mapped: Tuple = t.iter().map(|e| map[e]).collect();
                out.insert_raw(i, normalize(shape, &mapped).expect("injective relabeling"));
            }
        }
        Ok(out)
    }

    /// Tuples touching `e`, per symbol.
    pub fn incident(&self, sym: usize, e: Elem) -> impl Iterator<Item = &Tuple> {
        self.rels[sym].iter().filter(move |t| t.contains(&e))
    }

    /// Renders the binary symbols as a DOT graph. Symmetric symbols become
    /// undirected edges.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph structure {\n");
        for e in &self.universe {
            let _ = writeln!(out, "  {e};");
        }
        for (i, r) in self.rels.iter().enumerate() {
            let s = self.sig.symbol(i);
            if s.arity != 2 {
                continue;
            }
            for t in r {
                if s.shape == Shape::Set {
                    let _ = writeln!(out, "  {} -> {} [label=\"{}\", dir=none];", t[0], t[1], s.name);
                } else {
                    let _ = writeln!(out, "  {} -> {} [label=\"{}\"];", t[0], t[1], s.name);
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// All subsets of `items`, in order of increasing bitmask.
pub fn subsets<T: Clone + Ord>(items: &[T]) -> impl Iterator<Item = BTreeSet<T>> + '_ {
    assert!(items.len() < 32, "subset enumeration over {} items", items.len());
    (0u32..(1u32 << items.len())).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, x)| x.clone())
            .collect()
    })
}

/// Subsets of `items` with at most `k` elements, by size, then
/// lexicographically by position.
pub fn subsets_up_to<T: Clone + Ord>(items: &[T], k: usize) -> Vec<BTreeSet<T>> {
    fn rec<T: Clone + Ord>(items: &[T], size: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<BTreeSet<T>>) {
        if cur.len() == size {
            out.push(cur.iter().cloned().collect());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            rec(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in 0..=k.min(items.len()) {
        rec(items, size, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Convenience constructors for the common single-symbol signatures.
pub mod sig {
    use super::*;

    pub fn single(name: &str, arity: usize, shape: Shape, tag: &str) -> Arc<Signature> {
        Arc::new(Signature::new(vec![Symbol::new(name, arity, tag, shape)]).expect("valid"))
    }

    pub fn graph() -> Arc<Signature> {
        single("E", 2, Shape::Set, "L")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Structure {
        Structure::from_named(sig::graph(), 0..3, &[("E", vec![vec![0, 1], vec![1, 2], vec![2, 0]])]).unwrap()
    }

    fn two_lang() -> Structure {
        let sig = Arc::new(
            Signature::new(vec![
                Symbol::new("E", 2, "L1", Shape::Set),
                Symbol::new("<", 2, "L2", Shape::Injective),
            ])
            .unwrap(),
        );
        Structure::from_named(
            sig,
            0..3,
            &[("E", vec![vec![0, 1]]), ("<", vec![vec![0, 1], vec![1, 2], vec![0, 2]])],
        )
        .unwrap()
    }

    #[test]
    fn induced_triangle_gives_edge() {
        let t = triangle();
        let e = t.induced(&[0, 2].into()).unwrap();
        assert_eq!(e.size(), 2);
        assert_eq!(e.tuples(0).len(), 1);
        assert!(e.holds(0, &[2, 0]));
    }

    #[test]
    fn induced_identity_and_empty() {
        let t = triangle();
        assert_eq!(t.induced(t.universe()).unwrap(), t);
        let empty = t.induced(&BTreeSet::new()).unwrap();
        assert_eq!(empty.size(), 0);
        assert_eq!(empty.tuple_count(), 0);
    }

    #[test]
    fn induced_rejects_unknown_element() {
        assert!(triangle().induced(&[0, 7].into()).is_err());
    }

    #[test]
    fn reduct_keeps_tagged_relations() {
        let s = two_lang();
        let g = s.reduct("L1").unwrap();
        assert_eq!(g.signature().len(), 1);
        assert_eq!(g.signature().symbol(0).name, "E");
        assert_eq!(g.tuples(0).len(), 1);
        assert!(s.reduct("L9").is_err());
        let t = triangle();
        assert_eq!(t.reduct("L").unwrap(), t);
    }

    #[test]
    fn reduct_round_trip() {
        let s = two_lang();
        let parts = [s.reduct("L1").unwrap(), s.reduct("L2").unwrap()];
        let back = Structure::combine(s.signature().clone(), &[&parts[0], &parts[1]]).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn set_shape_normalizes_and_rejects_loops() {
        let s = Structure::from_named(sig::graph(), 0..2, &[("E", vec![vec![1, 0]])]).unwrap();
        assert_eq!(s.tuples(0).iter().next().unwrap(), &vec![0, 1]);
        assert!(Structure::from_named(sig::graph(), 0..2, &[("E", vec![vec![1, 1]])]).is_err());
        assert!(Structure::from_named(sig::graph(), 0..2, &[("E", vec![vec![1, 5]])]).is_err());
    }

    #[test]
    fn induced_in_detects_missing_tuples() {
        let t = triangle();
        let sub = t.induced(&[0, 1].into()).unwrap();
        assert!(sub.is_induced_in(&t));
        let bare = Structure::discrete(sig::graph(), [0, 1]);
        assert!(!bare.is_induced_in(&t));
    }

    #[test]
    fn dot_export_lists_edges() {
        let dot = triangle().to_dot();
        assert!(dot.contains("0 -> 1"));
        assert!(dot.contains("dir=none"));
    }
}
