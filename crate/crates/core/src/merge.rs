//! Merged classes K₁ ⊛ … ⊛ K_m over disjoint languages and the merge
//! amalgam built from equal-size factor amalgams.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::amalgam::{amalgam_defects, disjoint_amalgam_of_size, Amalgam, AmalgamInstance};
use crate::classes::{ClassFlags, ClassRules, ClassSpec};
use crate::embed::Embedding;
use crate::error::{input, Error, Result};
use crate::structure::{Elem, Signature, Structure, Symbol};

#[derive(Clone, Debug)]
pub struct Factor {
    pub class: ClassSpec,
    pub tag: String,
    /// Positions of this factor's symbols in the merged signature.
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct MergeSpec {
    factors: Vec<Factor>,
    signature: Arc<Signature>,
}

impl MergeSpec {
    /// Factors with pairwise distinct language tags. Each factor's symbols
    /// are moved into its tag; a symbol name used by several factors gets
    /// the suffix `_<tag>` in every one of them.
    pub fn new(factors: Vec<(ClassSpec, &str)>) -> Result<Self> {
        if factors.is_empty() {
            return input("a merge needs at least one factor");
        }
        let tags: BTreeSet<&str> = factors.iter().map(|(_, t)| *t).collect();
        if tags.len() != factors.len() {
            return input("factor language tags must be pairwise distinct");
        }
        let mut uses: BTreeMap<&str, usize> = BTreeMap::new();
        for (k, _) in &factors {
            for s in k.signature.symbols() {
                *uses.entry(s.name.as_str()).or_default() += 1;
            }
        }
        let mut symbols = Vec::new();
        let mut out = Vec::new();
        for (class, tag) in &factors {
            let mut indices = Vec::new();
            for s in class.signature.symbols() {
                let name = if uses[s.name.as_str()] > 1 { format!("{}_{tag}", s.name) } else { s.name.clone() };
                indices.push(symbols.len());
                symbols.push(Symbol { name, language: tag.to_string(), ..s.clone() });
            }
            out.push(Factor { class: class.clone(), tag: tag.to_string(), indices });
        }
        Ok(MergeSpec { factors: out, signature: Arc::new(Signature::new(symbols)?) })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn id(&self) -> String {
        self.factors.iter().map(|f| f.class.id.as_str()).collect::<Vec<_>>().join("*")
    }

    fn check_signature(&self, s: &Structure) -> Result<()> {
        if !self.signature.compatible(s.signature()) {
            return input("structure signature is not covered by the merge's language tags");
        }
        Ok(())
    }

    /// Reduct to factor `i`, read in that factor's own signature.
    pub fn reduct(&self, s: &Structure, i: usize) -> Structure {
        let f = &self.factors[i];
        s.project(&f.indices, f.class.signature.clone())
    }

    /// Reassembles a merged structure from factor structures on a common
    /// universe.
    pub fn assemble(&self, parts: &[Structure]) -> Result<Structure> {
        if parts.len() != self.factors.len() {
            return input("one part per factor is needed");
        }
        let refs: Vec<&Structure> = parts.iter().collect();
        Structure::combine(self.signature.clone(), &refs)
    }

    pub fn contains(&self, s: &Structure) -> Result<bool> {
        self.check_signature(s)?;
        Ok((0..self.factors.len()).all(|i| self.factors[i].class.contains(&self.reduct(s, i))))
    }

    /// A ≤* B iff every factor reduct of A is strong in that of B.
    pub fn strong(&self, a: &Structure, b: &Structure) -> Result<bool> {
        self.check_signature(b)?;
        if !a.is_induced_in(b) {
            return input("first argument is not an induced substructure of the second");
        }
        if !self.contains(b)? {
            return input("structure is not in the merged class");
        }
        Ok(self.merged_class().strong_set(a.universe(), b))
    }

    /// The merge as a class of its own.
    pub fn merged_class(&self) -> ClassSpec {
        let all = |f: fn(&ClassFlags) -> bool| self.factors.iter().all(|x| f(&x.class.flags));
        let flags = ClassFlags {
            closed_under_substructure: all(|f| f.closed_under_substructure),
            one_local: all(|f| f.one_local),
            fraisse: all(|f| f.fraisse),
            free_amalgamation: all(|f| f.free_amalgamation),
            disjoint_amalgamation: all(|f| f.disjoint_amalgamation),
            disjoint_parallel_strongness: all(|f| f.disjoint_parallel_strongness),
            smooth_intersections: all(|f| f.smooth_intersections),
        };
        let rules = MergedRules { factors: self.factors.clone() };
        let mut spec = ClassSpec::new(&self.id(), self.signature.clone(), Arc::new(rules), flags);
        spec.size_cap = self.factors.iter().filter_map(|f| f.class.size_cap).min();
        spec
    }
}

#[derive(Debug)]
struct MergedRules {
    factors: Vec<Factor>,
}

impl ClassRules for MergedRules {
    fn contains(&self, s: &Structure) -> bool {
        self.factors.iter().all(|f| f.class.contains(&s.project(&f.indices, f.class.signature.clone())))
    }

    fn strong(&self, a: &BTreeSet<Elem>, b: &Structure) -> bool {
        self.factors.iter().all(|f| f.class.strong_set(a, &b.project(&f.indices, f.class.signature.clone())))
    }
}

/// Outcome of the merge amalgam construction.
#[derive(Clone, Debug)]
pub struct MergeAmalgam {
    pub amalgam: Amalgam,
    /// Common size of the factor amalgams.
    pub size: usize,
    /// Per factor, the alignment h_i: N → D_i.
    pub alignments: Vec<Embedding>,
    pub factor_amalgams: Vec<Structure>,
}

/// The merge amalgam: for the smallest j up to `size_cap` at which every
/// factor has a disjoint amalgam D_i of exactly j elements, lay out
/// N = w ∪ d ∪ s ∪ e (images of C − A, B − A, A and the padding) and give
/// N the i-th reduct that makes h_i: N → D_i an isomorphism. The result is
/// re-verified in the merged class before it is returned.
pub fn merge_amalgam(m: &MergeSpec, inst: &AmalgamInstance, size_cap: usize) -> Result<Option<MergeAmalgam>> {
    let merged = m.merged_class();
    if !m.contains(&inst.a)? || !m.contains(&inst.b)? || !m.contains(&inst.c)? {
        return input("instance structures are not in the merged class");
    }
    let base = inst.b.size() + inst.c.size() - inst.a.size();
    let reducts: Vec<AmalgamInstance> =
        m.factors.iter().map(|f| inst.project(&f.indices, f.class.signature.clone())).collect();
    let cap = merged.size_cap.map_or(size_cap, |c| c.min(size_cap));
    for j in base..=cap {
        let mut found = Vec::new();
        for (f, r) in m.factors.iter().zip(&reducts) {
            match disjoint_amalgam_of_size(&f.class, r, j)? {
                Some(am) => found.push(am),
                None => break,
            }
        }
        if found.len() < m.factors.len() {
            continue;
        }
        let out = align(m, inst, &found, j)?;
        let defects = amalgam_defects(&merged, inst, &out.amalgam, true);
        if !defects.is_empty() {
            return Err(Error::Integrity(format!("merge amalgam failed verification: {}", defects.join("; "))));
        }
        return Ok(Some(out));
    }
    Ok(None)
}

fn align(m: &MergeSpec, inst: &AmalgamInstance, factor: &[Amalgam], j: usize) -> Result<MergeAmalgam> {
    let img_a_in_c: BTreeSet<Elem> = inst.h1.values().copied().collect();
    let img_a_in_b: BTreeSet<Elem> = inst.h2.values().copied().collect();
    let cs: Vec<Elem> = inst.c.elems().into_iter().filter(|e| !img_a_in_c.contains(e)).collect();
    let bs: Vec<Elem> = inst.b.elems().into_iter().filter(|e| !img_a_in_b.contains(e)).collect();
    let as_: Vec<Elem> = inst.a.elems();
    // N = {w_1..w_m} ∪ {d_1..d_n} ∪ {s_1..s_t} ∪ {e_1..}
    let (mlen, nlen, tlen) = (cs.len() as Elem, bs.len() as Elem, as_.len() as Elem);
    let w = |k: usize| k as Elem;
    let d = |k: usize| mlen + k as Elem;
    let s = |k: usize| mlen + nlen + k as Elem;
    let e = |k: usize| mlen + nlen + tlen + k as Elem;
    let mut alignments = Vec::new();
    let mut parts = Vec::new();
    for am in factor {
        let mut h = Embedding::new();
        for (k, c) in cs.iter().enumerate() {
            h.insert(w(k), am.g[c]);
        }
        for (k, b) in bs.iter().enumerate() {
            h.insert(d(k), am.f[b]);
        }
        for (k, a) in as_.iter().enumerate() {
            h.insert(s(k), am.g[&inst.h1[a]]);
        }
        let used: BTreeSet<Elem> = h.values().copied().collect();
        let padding: Vec<Elem> = am.d.elems().into_iter().filter(|x| !used.contains(x)).collect();
        for (k, p) in padding.iter().enumerate() {
            h.insert(e(k), *p);
        }
        debug_assert_eq!(h.len(), j);
        let back: Embedding = h.iter().map(|(x, y)| (*y, *x)).collect();
        let part = am.d.relabel(&back)?;
        parts.push(part);
        alignments.push(h);
    }
    let n = m.assemble(&parts)?;
    let mut g_map = Embedding::new();
    let mut f_map = Embedding::new();
    for (k, b) in bs.iter().enumerate() {
        f_map.insert(*b, d(k));
    }
    for (k, c) in cs.iter().enumerate() {
        g_map.insert(*c, w(k));
    }
    for (k, a) in as_.iter().enumerate() {
        f_map.insert(inst.h2[a], s(k));
        g_map.insert(inst.h1[a], s(k));
    }
    Ok(MergeAmalgam {
        amalgam: Amalgam { d: n, f: f_map, g: g_map },
        size: j,
        alignments,
        factor_amalgams: factor.iter().map(|a| a.d.clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::free_amalgam;
    use crate::classes::builtins::{builtin_class, BuiltinParams};

    fn class(name: &str) -> ClassSpec {
        builtin_class(name, BuiltinParams::default()).unwrap()
    }

    fn graphs_orders() -> MergeSpec {
        MergeSpec::new(vec![(class("all_graphs"), "L1"), (class("linear_orders"), "L2")]).unwrap()
    }

    #[test]
    fn tags_must_differ() {
        assert!(MergeSpec::new(vec![(class("all_graphs"), "L"), (class("linear_orders"), "L")]).is_err());
    }

    #[test]
    fn clashing_names_get_suffixed() {
        let m = MergeSpec::new(vec![(class("all_graphs"), "L1"), (class("all_graphs"), "L2")]).unwrap();
        let names: Vec<&str> = m.signature().symbols().iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, vec!["E_L1", "E_L2"]);
    }

    #[test]
    fn membership_is_the_conjunction_of_factors() {
        let m = graphs_orders();
        let sig = m.signature().clone();
        let good = Structure::from_named(sig.clone(), [0, 1], &[("E", vec![vec![0, 1]]), ("<", vec![vec![0, 1]])])
            .unwrap();
        assert!(m.contains(&good).unwrap());
        let partial = Structure::from_named(sig.clone(), [0, 1], &[("E", vec![vec![0, 1]])]).unwrap();
        assert!(!m.contains(&partial).unwrap());
        assert!(m.contains(&Structure::empty(sig)).unwrap());
        assert!(m.contains(&Structure::empty(crate::structure::sig::graph())).is_err());
    }

    #[test]
    fn singletons_amalgamate_into_an_ordered_pair() {
        let m = graphs_orders();
        let a = Structure::empty(m.signature().clone());
        let b = Structure::discrete(m.signature().clone(), [0]);
        let inst = AmalgamInstance::inclusions(&a, &b, &b).unwrap();
        let out = merge_amalgam(&m, &inst, 3).unwrap().unwrap();
        assert_eq!(out.size, 2);
        assert_eq!(out.amalgam.d.tuples(0).len(), 0);
        assert_eq!(out.amalgam.d.tuples(1).len(), 1);
    }

    #[test]
    fn free_factors_give_the_free_amalgam() {
        let m = MergeSpec::new(vec![(class("all_graphs"), "L1"), (class("one_local_no_edges_out"), "L2")]).unwrap();
        let sig = m.signature().clone();
        let a = Structure::discrete(sig.clone(), [0]);
        let b = Structure::from_named(sig.clone(), [0, 1], &[("E_L1", vec![vec![0, 1]])]).unwrap();
        let c = Structure::from_named(sig.clone(), [0, 2], &[("E_L1", vec![vec![0, 2]])]).unwrap();
        let inst = AmalgamInstance::inclusions(&a, &b, &c).unwrap();
        let out = merge_amalgam(&m, &inst, 4).unwrap().unwrap();
        assert_eq!(out.size, 3);
        let free = free_amalgam(&a, &b, &c).unwrap();
        assert!(crate::embed::are_isomorphic(&out.amalgam.d, &free));
    }
}
