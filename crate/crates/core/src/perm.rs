//! Signature permutations, partial maps and permorphisms.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::embed::Embedding;
use crate::error::{input, Result};
use crate::structure::{normalize, Elem, Signature, Structure};

/// A bijection on symbol positions preserving arity, shape and language tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignaturePermutation {
    mapping: Vec<usize>,
}

impl SignaturePermutation {
    pub fn identity(n: usize) -> Self {
        SignaturePermutation { mapping: (0..n).collect() }
    }

    pub fn new(sig: &Signature, mapping: Vec<usize>) -> Result<Self> {
        if mapping.len() != sig.len() {
            return input("permutation length does not match the signature");
        }
        let image: BTreeSet<usize> = mapping.iter().copied().collect();
        if image.len() != mapping.len() || image.iter().any(|&i| i >= sig.len()) {
            return input("mapping is not a bijection on symbols");
        }
        for (i, &j) in mapping.iter().enumerate() {
            let (a, b) = (sig.symbol(i), sig.symbol(j));
            if a.arity != b.arity || a.shape != b.shape {
                return input(format!("{} and {} differ in arity or shape", a.name, b.name));
            }
            if a.language != b.language {
                return input(format!("{} and {} carry different language tags", a.name, b.name));
            }
        }
        Ok(SignaturePermutation { mapping })
    }

    /// Builds a permutation from name pairs; unmentioned symbols are fixed.
    pub fn from_names(sig: &Signature, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut mapping: Vec<usize> = (0..sig.len()).collect();
        for (from, to) in pairs {
            let (Some(i), Some(j)) = (sig.index_of(from), sig.index_of(to)) else {
                return input(format!("unknown symbol in {from}->{to}"));
            };
            mapping[i] = j;
        }
        Self::new(sig, mapping)
    }

    /// Swap of two symbols.
    pub fn swap(sig: &Signature, a: &str, b: &str) -> Result<Self> {
        Self::from_names(sig, &[(a, b), (b, a)])
    }

    pub fn apply(&self, sym: usize) -> usize {
        self.mapping[sym]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &j) in self.mapping.iter().enumerate() {
            inv[j] = i;
        }
        SignaturePermutation { mapping: inv }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Self) -> Self {
        SignaturePermutation { mapping: self.mapping.iter().map(|&j| other.mapping[j]).collect() }
    }

    /// Whether every symbol in `fixed` is mapped to itself.
    pub fn fixes(&self, fixed: &[usize]) -> bool {
        fixed.iter().all(|&i| self.mapping[i] == i)
    }
}

/// The group generated by `gens`, identity first, in discovery order.
pub fn group_closure(n: usize, gens: &[SignaturePermutation]) -> Vec<SignaturePermutation> {
    let mut out = vec![SignaturePermutation::identity(n)];
    let mut seen: BTreeSet<SignaturePermutation> = out.iter().cloned().collect();
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let h = out[i].then(g);
            if seen.insert(h.clone()) {
                out.push(h);
            }
        }
        i += 1;
    }
    out
}

/// Structure whose tuple set at `γ(R)` is the tuple set of `R` in `a`.
pub fn apply_permutation(a: &Structure, gamma: &SignaturePermutation) -> Result<Structure> {
    let sig = a.signature();
    if gamma.mapping.len() != sig.len() {
        return input("permutation does not cover the signature");
    }
    for (i, &j) in gamma.mapping.iter().enumerate() {
        if sig.symbol(i).arity != sig.symbol(j).arity || sig.symbol(i).shape != sig.symbol(j).shape {
            return input("permutation does not preserve arity");
        }
    }
    let mut out = Structure::discrete(sig.clone(), a.universe().iter().copied());
    for i in 0..sig.len() {
        for t in a.tuples(i) {
            out.insert_raw(gamma.apply(i), t.clone());
        }
    }
    Ok(out)
}

/// An injective partial map between element sets, optionally twisted by a
/// signature permutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialMap {
    pub pairs: Embedding,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<SignaturePermutation>,
}

impl PartialMap {
    pub fn new(pairs: impl IntoIterator<Item = (Elem, Elem)>) -> Self {
        PartialMap { pairs: pairs.into_iter().collect(), twist: None }
    }

    pub fn twisted(pairs: impl IntoIterator<Item = (Elem, Elem)>, twist: SignaturePermutation) -> Self {
        PartialMap { pairs: pairs.into_iter().collect(), twist: Some(twist) }
    }

    pub fn domain(&self) -> BTreeSet<Elem> {
        self.pairs.keys().copied().collect()
    }

    pub fn range(&self) -> BTreeSet<Elem> {
        self.pairs.values().copied().collect()
    }

    /// Checks injectivity and that domain and range lie in the universes.
    pub fn validate(&self, source: &Structure, target: &Structure) -> Result<()> {
        let range = self.range();
        if range.len() != self.pairs.len() {
            return input("partial map is not injective");
        }
        if let Some(e) = self.pairs.keys().find(|e| !source.contains_elem(**e)) {
            return input(format!("domain element {e} is outside the source"));
        }
        if let Some(e) = range.iter().find(|e| !target.contains_elem(**e)) {
            return input(format!("range element {e} is outside the target"));
        }
        Ok(())
    }

    pub fn twist_or_identity(&self, n: usize) -> SignaturePermutation {
        self.twist.clone().unwrap_or_else(|| SignaturePermutation::identity(n))
    }
}

/// Whether `f` satisfies `R(ā) ⇔ γ(R)(f(ā))` for all symbols and all tuples
/// over its domain.
pub fn is_permorphism(a: &Structure, f: &PartialMap) -> bool {
    if f.validate(a, a).is_err() {
        return false;
    }
    let sig = a.signature();
    let gamma = f.twist_or_identity(sig.len());
    if gamma.mapping.len() != sig.len() {
        return false;
    }
    let dom = f.domain();
    let range = f.range();
    for r in 0..sig.len() {
        let target = gamma.apply(r);
        if sig.symbol(target).arity != sig.symbol(r).arity {
            return false;
        }
        let shape = sig.symbol(target).shape;
        let image: BTreeSet<_> = a
            .tuples(r)
            .iter()
            .filter(|t| t.iter().all(|e| dom.contains(e)))
            .filter_map(|t| {
                let m: Vec<Elem> = t.iter().map(|e| f.pairs[e]).collect();
                normalize(shape, &m)
            })
            .collect();
        let present: BTreeSet<_> =
            a.tuples(target).iter().filter(|t| t.iter().all(|e| range.contains(e))).cloned().collect();
        if image != present {
            return false;
        }
    }
    true
}

/// Whether `g` is a total γ-permorphism of `a` (a bijection of the universe).
pub fn is_total_permorphism(a: &Structure, g: &PartialMap) -> bool {
    g.pairs.len() == a.size() && g.domain() == *a.universe() && is_permorphism(a, g)
}

/// Whether `g` extends `f` as a map.
pub fn extends(g: &BTreeMap<Elem, Elem>, f: &BTreeMap<Elem, Elem>) -> bool {
    f.iter().all(|(x, y)| g.get(x) == Some(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{Shape, Symbol};
    use std::sync::Arc;

    fn pq() -> Arc<Signature> {
        Arc::new(
            Signature::new(vec![
                Symbol::new("P", 2, "L", Shape::Injective),
                Symbol::new("Q", 2, "L", Shape::Injective),
            ])
            .unwrap(),
        )
    }

    #[test]
    fn swap_moves_tuples() {
        let a = Structure::from_named(pq(), [0, 1], &[("P", vec![vec![0, 1]])]).unwrap();
        let g = SignaturePermutation::swap(a.signature(), "P", "Q").unwrap();
        let b = apply_permutation(&a, &g).unwrap();
        assert!(b.holds_named("Q", &[0, 1]));
        assert!(!b.holds_named("P", &[0, 1]));
        assert_eq!(apply_permutation(&b, &g).unwrap(), a);
        assert_eq!(apply_permutation(&a, &SignaturePermutation::identity(2)).unwrap(), a);
    }

    #[test]
    fn twisted_permorphism() {
        let a = Structure::from_named(pq(), 0..4, &[("P", vec![vec![0, 1]]), ("Q", vec![vec![2, 3]])]).unwrap();
        let g = SignaturePermutation::swap(a.signature(), "P", "Q").unwrap();
        assert!(is_permorphism(&a, &PartialMap::twisted([(0, 2), (1, 3)], g.clone())));
        assert!(!is_permorphism(&a, &PartialMap::new([(0, 2), (1, 3)])));
        assert!(!is_permorphism(&a, &PartialMap::twisted([(0, 3), (1, 2)], g)));
    }

    #[test]
    fn edge_to_non_edge_is_not_a_permorphism() {
        let g = crate::structure::sig::graph();
        let a = Structure::from_named(g, 0..3, &[("E", vec![vec![0, 1]])]).unwrap();
        assert!(!is_permorphism(&a, &PartialMap::new([(0, 0), (1, 2)])));
        assert!(is_permorphism(&a, &PartialMap::new([(0, 1), (1, 0)])));
    }

    #[test]
    fn permutation_rejects_arity_change() {
        let sig = Signature::new(vec![
            Symbol::new("P", 2, "L", Shape::Injective),
            Symbol::new("T", 3, "L", Shape::Injective),
        ])
        .unwrap();
        assert!(SignaturePermutation::swap(&sig, "P", "T").is_err());
    }

    #[test]
    fn closure_of_a_swap_has_two_elements() {
        let sig = pq();
        let g = SignaturePermutation::swap(&sig, "P", "Q").unwrap();
        assert_eq!(group_closure(2, &[g]).len(), 2);
    }
}
