//! Trading n-tuple equivalence relations E_n for partition predicates
//! P_{n,i}, and the EPPA pipeline that runs through that encoding.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::classes::builtins::{disjoint_predicates, permutations, TupleEquivalence};
use crate::classes::ClassSpec;
use crate::eppa::{eppa_search, DomainConstraint, EppaInstance};
use crate::error::{input, Result};
use crate::merge::MergeSpec;
use crate::perm::{extends, is_permorphism, is_total_permorphism, PartialMap, SignaturePermutation};
use crate::structure::{Elem, Shape, Signature, Structure, Symbol, Tuple};

/// Language tag of the partition predicates.
pub const PREDICATE_TAG: &str = "P";

/// P_{n,i}: the i-th class (from 1) of the E symbol `encodes`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
    pub encodes: String,
    pub index: usize,
}

/// An E symbol of the source language and the n it is read with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceSymbol {
    pub name: String,
    pub n: usize,
}

/// Predicates P_{n,i} first, in `predicates` order, then the symbols of the
/// source language outside the E language, unchanged. Within each arity the
/// predicates are pairwise disjoint; each holds on n-sets (Set shape), so
/// permutation closure and irreflexivity are built in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelanguagedStructure {
    pub structure: Structure,
    pub predicates: Vec<Predicate>,
    pub equivalences: Vec<EquivalenceSymbol>,
    /// Signature that decoding produces.
    pub source: Vec<Symbol>,
}

pub fn predicate_name(n: usize, i: usize) -> String {
    format!("P_{n}_{i}")
}

/// n-element subsets of `elems` (sorted), in lexicographic order.
fn n_sets(elems: &[Elem], n: usize) -> Vec<Tuple> {
    fn rec(elems: &[Elem], n: usize, start: usize, cur: &mut Tuple, out: &mut Vec<Tuple>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..elems.len() {
            cur.push(elems[i]);
            rec(elems, n, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(elems, n, 0, &mut Vec::new(), &mut out);
    out
}

/// E symbols of `sig` under `e_tag`, with positions.
fn equivalence_symbols(sig: &Signature, e_tag: &str) -> Result<Vec<(usize, EquivalenceSymbol)>> {
    let mut out: Vec<(usize, EquivalenceSymbol)> = Vec::new();
    for i in sig.language_indices(e_tag) {
        let s = sig.symbol(i);
        if s.shape != Shape::Any || !s.arity.is_multiple_of(2) {
            return input(format!("{} is not an even-arity tuple relation", s.name));
        }
        let n = s.arity / 2;
        if out.iter().any(|(_, e)| e.n == n) {
            return input(format!("two equivalence symbols of arity {}", s.arity));
        }
        out.push((i, EquivalenceSymbol { name: s.name.clone(), n }));
    }
    Ok(out)
}

fn assemble(
    universe: &BTreeSet<Elem>,
    blocks: &[(Predicate, Vec<Tuple>)],
    rest: &[(Symbol, BTreeSet<Tuple>)],
) -> Result<Structure> {
    let mut symbols: Vec<Symbol> =
        blocks.iter().map(|(p, _)| Symbol::new(&p.name, p.arity, PREDICATE_TAG, Shape::Set)).collect();
    symbols.extend(rest.iter().map(|(s, _)| s.clone()));
    let sig = Arc::new(Signature::new(symbols)?);
    let out = Structure::discrete(sig, universe.iter().copied());
    let mut tuples: Vec<(usize, Tuple)> = Vec::new();
    for (i, (_, block)) in blocks.iter().enumerate() {
        tuples.extend(block.iter().map(|t| (i, t.clone())));
    }
    for (i, (_, ts)) in rest.iter().enumerate() {
        tuples.extend(ts.iter().map(|t| (blocks.len() + i, t.clone())));
    }
    out.with_tuples(&tuples)
}

fn rest_of(s: &Structure, skip: &BTreeSet<usize>) -> Vec<(Symbol, BTreeSet<Tuple>)> {
    (0..s.signature().len())
        .filter(|i| !skip.contains(i))
        .map(|i| (s.signature().symbol(i).clone(), s.tuples(i).clone()))
        .collect()
}

/// One predicate per E_n-class, classes indexed in order of their least
/// n-set. Every n-set of the universe lies in some class; an n-set related
/// to nothing is a class of its own. Symbols outside `e_tag` are copied.
pub fn encode_equivalences(a: &Structure, e_tag: &str) -> Result<RelanguagedStructure> {
    let sig = a.signature();
    let eqs = equivalence_symbols(sig, e_tag)?;
    let elems = a.elems();
    let mut blocks: Vec<(Predicate, Vec<Tuple>)> = Vec::new();
    for (sym, e) in &eqs {
        let rules = TupleEquivalence { n: e.n };
        if !rules.is_valid(a, *sym) {
            return input(format!("{} is not an {}-tuple equivalence relation", e.name, e.n));
        }
        let pairs = rules.set_pairs(a, *sym).expect("valid relations have set pairs");
        let mut assigned: BTreeSet<Tuple> = BTreeSet::new();
        for x in n_sets(&elems, e.n) {
            if assigned.contains(&x) {
                continue;
            }
            let mut block = vec![x.clone()];
            block.extend(pairs.iter().filter(|(p, _)| *p == x).map(|(_, y)| y.clone()));
            block.sort();
            assigned.extend(block.iter().cloned());
            let index = blocks.iter().filter(|(p, _)| p.encodes == e.name).count() + 1;
            let p = Predicate { name: predicate_name(e.n, index), arity: e.n, encodes: e.name.clone(), index };
            blocks.push((p, block));
        }
    }
    let skip: BTreeSet<usize> = eqs.iter().map(|(i, _)| *i).collect();
    let structure = assemble(a.universe(), &blocks, &rest_of(a, &skip))?;
    Ok(RelanguagedStructure {
        structure,
        predicates: blocks.into_iter().map(|(p, _)| p).collect(),
        equivalences: eqs.into_iter().map(|(_, e)| e).collect(),
        source: sig.symbols().to_vec(),
    })
}

impl RelanguagedStructure {
    fn predicate_tuples(&self, p: &Predicate) -> Result<&BTreeSet<Tuple>> {
        match self.structure.signature().index_of(&p.name) {
            Some(i) => Ok(self.structure.tuples(i)),
            None => input(format!("predicate {} is missing from the structure", p.name)),
        }
    }

    /// Symbols after the predicates.
    fn rest(&self) -> Vec<(Symbol, BTreeSet<Tuple>)> {
        let skip: BTreeSet<usize> = self.structure.signature().language_indices(PREDICATE_TAG).into_iter().collect();
        rest_of(&self.structure, &skip)
    }

    /// Within each arity, no n-set lies in two predicates.
    pub fn check_disjoint(&self) -> Result<()> {
        let mut owner: BTreeMap<(usize, &Tuple), &str> = BTreeMap::new();
        for p in &self.predicates {
            for t in self.predicate_tuples(p)? {
                if let Some(q) = owner.insert((p.arity, t), &p.name) {
                    return input(format!("{:?} lies in both {q} and {}", t, p.name));
                }
            }
        }
        Ok(())
    }

    /// Same universe and predicates, with `structure` replaced (for
    /// witnesses found over the encoded signature).
    pub fn with_structure(&self, structure: Structure) -> Result<Self> {
        if !self.structure.signature().compatible(structure.signature()) {
            return input("structure does not fit the encoded signature");
        }
        let structure = structure.with_signature(self.structure.signature().clone())?;
        Ok(RelanguagedStructure { structure, ..self.clone() })
    }

    /// Gives every ℓ-set in no ℓ-ary predicate, for each encoded arity
    /// ℓ ≤ q, a fresh predicate of its own: the smallest unused P_{ℓ,r}.
    /// Returns the saturated structure and the fresh predicate of each set.
    pub fn saturate(&self, q: usize) -> Result<(Self, BTreeMap<Tuple, String>)> {
        self.check_disjoint()?;
        let elems = self.structure.elems();
        let mut blocks: Vec<(Predicate, Vec<Tuple>)> = Vec::new();
        let mut fresh = BTreeMap::new();
        for e in &self.equivalences {
            let own: Vec<&Predicate> = self.predicates.iter().filter(|p| p.encodes == e.name).collect();
            let mut covered = BTreeSet::new();
            for p in &own {
                let ts = self.predicate_tuples(p)?;
                covered.extend(ts.iter().cloned());
                blocks.push(((*p).clone(), ts.iter().cloned().collect()));
            }
            if e.n > q {
                continue;
            }
            let mut used: BTreeSet<usize> = own.iter().map(|p| p.index).collect();
            for x in n_sets(&elems, e.n).into_iter().filter(|x| !covered.contains(x)) {
                let index = (1..).find(|r| !used.contains(r)).expect("unbounded");
                used.insert(index);
                let p = Predicate { name: predicate_name(e.n, index), arity: e.n, encodes: e.name.clone(), index };
                fresh.insert(x.clone(), p.name.clone());
                blocks.push((p, vec![x]));
            }
        }
        let structure = assemble(self.structure.universe(), &blocks, &self.rest())?;
        let out = RelanguagedStructure {
            structure,
            predicates: blocks.into_iter().map(|(p, _)| p).collect(),
            equivalences: self.equivalences.clone(),
            source: self.source.clone(),
        };
        Ok((out, fresh))
    }
}

/// E_n(ā, b̄) iff ā and b̄ enumerate distinct n-sets in one predicate.
/// Other symbols are copied by name.
pub fn decode_predicates(r: &RelanguagedStructure) -> Result<Structure> {
    r.check_disjoint()?;
    let sig = Arc::new(Signature::new(r.source.clone())?);
    let mut tuples: Vec<(usize, Tuple)> = Vec::new();
    for e in &r.equivalences {
        let Some(sym) = sig.index_of(&e.name) else {
            return input(format!("{} is not in the source signature", e.name));
        };
        for p in r.predicates.iter().filter(|p| p.encodes == e.name) {
            let block: Vec<&Tuple> = r.predicate_tuples(p)?.iter().collect();
            for x in &block {
                for y in block.iter().filter(|y| *y != x) {
                    for px in permutations(x) {
                        for py in permutations(y) {
                            tuples.push((sym, px.iter().chain(&py).copied().collect()));
                        }
                    }
                }
            }
        }
    }
    for (s, ts) in r.rest() {
        let Some(sym) = sig.index_of(&s.name) else {
            return input(format!("{} is not in the source signature", s.name));
        };
        tuples.extend(ts.into_iter().map(|t| (sym, t)));
    }
    Structure::discrete(sig, r.structure.universe().iter().copied()).with_tuples(&tuples)
}

/// The signature permutation induced by `f` on the predicates: class i goes
/// to the class of the f-image of any of its n-sets inside dom(f). Classes
/// missed by dom(f) are paired with the unused targets of the same arity in
/// order. Other symbols are fixed.
pub fn induced_twist(r: &RelanguagedStructure, f: &PartialMap) -> Result<SignaturePermutation> {
    let sig = r.structure.signature();
    let dom = f.domain();
    let owner: BTreeMap<(usize, Tuple), usize> = r
        .predicates
        .iter()
        .map(|p| Ok((p, sig.index_of(&p.name).expect("predicate in signature"))))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flat_map(|(p, i)| r.structure.tuples(i).iter().map(move |t| ((p.arity, t.clone()), i)))
        .collect();
    let mut mapping: Vec<Option<usize>> = vec![None; sig.len()];
    for (i, m) in mapping.iter_mut().enumerate() {
        if sig.symbol(i).language != PREDICATE_TAG {
            *m = Some(i);
        }
    }
    for p in &r.predicates {
        let i = sig.index_of(&p.name).expect("predicate in signature");
        let Some(x) = r.structure.tuples(i).iter().find(|t| t.iter().all(|e| dom.contains(e))) else {
            continue;
        };
        let mut image: Tuple = x.iter().map(|e| f.pairs[e]).collect();
        image.sort_unstable();
        match owner.get(&(p.arity, image)) {
            Some(&j) => mapping[i] = Some(j),
            None => return input(format!("the image of {:?} lies in no predicate", x)),
        }
    }
    let taken: BTreeSet<usize> = mapping.iter().flatten().copied().collect();
    if taken.len() != mapping.iter().flatten().count() {
        return input("the map sends two classes to one");
    }
    for arity in r.predicates.iter().map(|p| p.arity).collect::<BTreeSet<_>>() {
        let of_arity = |i: &usize| sig.symbol(*i).language == PREDICATE_TAG && sig.symbol(*i).arity == arity;
        let mut free: Vec<usize> = (0..sig.len()).filter(of_arity).filter(|i| !taken.contains(i)).collect();
        free.reverse();
        for i in (0..sig.len()).filter(of_arity) {
            if mapping[i].is_none() {
                mapping[i] = free.pop();
            }
        }
    }
    SignaturePermutation::new(sig, mapping.into_iter().map(|m| m.expect("every symbol mapped")).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineWitness {
    /// Witness over the predicate language, before saturation.
    pub relanguaged: Structure,
    pub saturated: RelanguagedStructure,
    /// Extensions as permorphisms of the saturated structure, with twists
    /// extended to the fresh predicates.
    pub permorphisms: Vec<PartialMap>,
    pub b0: Structure,
    /// The same maps, read as automorphisms of B0.
    pub extensions: Vec<PartialMap>,
    /// Independent verification; empty when the witness is sound.
    pub defects: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub max_size: usize,
    /// Largest n with an E_n symbol.
    pub q: usize,
    pub candidates: usize,
    pub twists: Vec<SignaturePermutation>,
    pub witness: Option<PipelineWitness>,
}

/// Encode, search for permorphism extensions over the predicate language
/// merged with the other factor, saturate, decode, verify. `e_factor` is
/// the factor carrying the E symbols; the other factor must be declared
/// 1-local with free amalgamation.
pub fn eppa_merge_pipeline(
    m: &MergeSpec,
    e_factor: usize,
    a0: &Structure,
    maps: &[PartialMap],
    max_size: usize,
) -> Result<PipelineReport> {
    if m.factors().len() != 2 || e_factor > 1 {
        return input("the pipeline needs a two-factor merge and a factor index below 2");
    }
    let other = &m.factors()[1 - e_factor];
    if !(other.class.flags.one_local && other.class.flags.free_amalgamation) {
        return input(format!("{} is not declared 1-local with free amalgamation", other.class.id));
    }
    if !m.contains(a0)? {
        return input("A0 is not in the merged class");
    }
    let merged = m.merged_class();
    for (i, f) in maps.iter().enumerate() {
        if f.twist.is_some() {
            return input(format!("map {i} is twisted; the pipeline derives its own twists"));
        }
        if !is_permorphism(a0, f) {
            return input(format!("map {i} is not a partial automorphism of A0"));
        }
        if !(merged.strong_set(&f.domain(), a0) && merged.strong_set(&f.range(), a0)) {
            return input(format!("map {i} has a domain or range that is not strong in A0"));
        }
    }
    let encoded = encode_equivalences(a0, &m.factors()[e_factor].tag)?;
    let q = encoded.equivalences.iter().map(|e| e.n).max().unwrap_or(0);
    let twists: Vec<SignaturePermutation> = maps.iter().map(|f| induced_twist(&encoded, f)).collect::<Result<_>>()?;
    let search = search_class(&encoded, &other.class)?;
    let inst = EppaInstance {
        a: encoded.structure.clone(),
        maps: maps.iter().zip(&twists).map(|(f, g)| PartialMap::twisted(f.pairs.clone(), g.clone())).collect(),
        constraint: DomainConstraint::Strong,
    };
    let outcome = eppa_search(&search, &inst, max_size)?;
    let mut report = PipelineReport { max_size, q, candidates: outcome.candidates, twists, witness: None };
    let Some(w) = outcome.witness else {
        return Ok(report);
    };
    let (saturated, fresh) = encoded.with_structure(w.b.clone())?.saturate(q)?;
    let sig = saturated.structure.signature();
    let mut permorphisms = Vec::new();
    for g in &w.extensions {
        let base = g.twist.as_ref().expect("pipeline maps are twisted");
        let old = w.b.signature();
        let mut mapping = vec![usize::MAX; sig.len()];
        for i in 0..old.len() {
            let from = sig.index_of(&old.symbol(i).name).expect("old symbols survive saturation");
            let to = sig.index_of(&old.symbol(base.apply(i)).name).expect("old symbols survive saturation");
            mapping[from] = to;
        }
        for (x, name) in &fresh {
            let mut image: Tuple = x.iter().map(|e| g.pairs[e]).collect();
            image.sort_unstable();
            let target = fresh.get(&image).expect("g permutes the sets left uncovered");
            mapping[sig.index_of(name).expect("fresh symbol")] = sig.index_of(target).expect("fresh symbol");
        }
        permorphisms.push(PartialMap::twisted(g.pairs.clone(), SignaturePermutation::new(sig, mapping)?));
    }
    let b0 = decode_predicates(&saturated)?;
    let extensions: Vec<PartialMap> = w.extensions.iter().map(|g| PartialMap::new(g.pairs.clone())).collect();
    let mut defects = verify_pipeline_witness(m, e_factor, a0, maps, &b0, &extensions);
    for (i, g) in permorphisms.iter().enumerate() {
        if !is_total_permorphism(&saturated.structure, g) {
            defects.push(format!("extension {i} is not a permorphism of the saturated structure"));
        }
    }
    report.witness = Some(PipelineWitness {
        relanguaged: w.b,
        saturated,
        permorphisms,
        b0,
        extensions,
        defects,
    });
    Ok(report)
}

/// Pairwise disjoint predicates merged with the other factor, read in the
/// encoded signature.
fn search_class(encoded: &RelanguagedStructure, other: &ClassSpec) -> Result<ClassSpec> {
    let sig = encoded.structure.signature();
    let p_idx = sig.language_indices(PREDICATE_TAG);
    let psig = Arc::new(sig.select(&p_idx));
    let mp = MergeSpec::new(vec![(disjoint_predicates(psig), PREDICATE_TAG), (other.clone(), "L2")])?;
    mp.merged_class().with_signature(sig.clone())
}

/// Checks a decoded witness without reference to the encoding: B0 is in
/// the merge with A0 ≤* B0, each extension is a total automorphism of B0
/// extending its map, every E_n is an n-tuple equivalence, and
/// E_n(g(b̄), g(ā)) ⇔ E_n(ā, b̄) for all n-tuples.
pub fn verify_pipeline_witness(
    m: &MergeSpec,
    e_factor: usize,
    a0: &Structure,
    maps: &[PartialMap],
    b0: &Structure,
    extensions: &[PartialMap],
) -> Vec<String> {
    let mut out = Vec::new();
    if !matches!(m.contains(b0), Ok(true)) {
        out.push("B0 is not in the merged class".into());
    }
    if !a0.is_induced_in(b0) || !m.merged_class().strong_set(a0.universe(), b0) {
        out.push("A0 is not strong in B0".into());
    }
    if maps.len() != extensions.len() {
        out.push("one extension per map is required".into());
    }
    for (i, (f, g)) in maps.iter().zip(extensions).enumerate() {
        if g.twist.is_some() || !is_total_permorphism(b0, g) {
            out.push(format!("extension {i} is not an automorphism of B0"));
        }
        if !extends(&g.pairs, &f.pairs) {
            out.push(format!("extension {i} does not extend its map"));
        }
    }
    let sig = b0.signature();
    let elems = b0.elems();
    for &sym in &m.factors()[e_factor].indices {
        let s = sig.symbol(sym);
        let n = s.arity / 2;
        if !(TupleEquivalence { n }).is_valid(b0, sym) {
            out.push(format!("{} is not an {n}-tuple equivalence relation", s.name));
        }
        let tuples: Vec<Tuple> = n_sets(&elems, n).iter().flat_map(|x| permutations(x)).collect();
        for g in extensions.iter().filter(|g| g.pairs.len() == b0.size()) {
            let img = |t: &Tuple| -> Tuple { t.iter().map(|e| g.pairs[e]).collect() };
            for a in &tuples {
                for b in &tuples {
                    let ab: Tuple = a.iter().chain(b).copied().collect();
                    let gba: Tuple = img(b).into_iter().chain(img(a)).collect();
                    if b0.holds(sym, &gba) != b0.holds(sym, &ab) {
                        out.push(format!("{}: E(g b, g a) and E(a, b) disagree at {:?}", s.name, ab));
                    }
                }
            }
        }
    }
    out
}

/// Set partitions of `items`, blocks in order of first member.
fn set_partitions<T: Clone>(items: &[T]) -> Vec<Vec<Vec<T>>> {
    let Some((last, init)) = items.split_last() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for p in set_partitions(init) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            match q.get_mut(i) {
                Some(block) => block.push(last.clone()),
                None => q.push(vec![last.clone()]),
            }
            out.push(q);
        }
    }
    out
}

/// E_1 and E_2 in one language under tag `E`.
pub fn pair_equivalence_signature() -> Arc<Signature> {
    Arc::new(
        Signature::new(vec![Symbol::new("E_1", 2, "E", Shape::Any), Symbol::new("E_2", 4, "E", Shape::Any)])
            .expect("distinct names"),
    )
}

/// Every E_1/E_2 structure on {0..k} for k < `max_size`, one per pair of
/// partitions of the points and of the 2-sets.
pub fn pair_equivalence_structures(max_size: usize) -> Result<Vec<Structure>> {
    let sig = pair_equivalence_signature();
    let relation = |p: &[Vec<Tuple>]| -> Vec<Tuple> {
        let mut out = Vec::new();
        for block in p {
            for x in block {
                for y in block.iter().filter(|y| *y != x) {
                    for ox in permutations(x) {
                        for oy in permutations(y) {
                            out.push(ox.iter().chain(&oy).copied().collect());
                        }
                    }
                }
            }
        }
        out
    };
    let mut out = Vec::new();
    for size in 0..=max_size as Elem {
        let universe: Vec<Elem> = (0..size).collect();
        for p1 in set_partitions(&n_sets(&universe, 1)) {
            for p2 in set_partitions(&n_sets(&universe, 2)) {
                out.push(Structure::from_named(
                    sig.clone(),
                    universe.clone(),
                    &[("E_1", relation(&p1)), ("E_2", relation(&p2))],
                )?);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundTripReport {
    pub max_size: usize,
    pub structures: usize,
    /// Structures whose decoded encoding differs, up to ten.
    pub failures: Vec<Structure>,
}

pub fn round_trip_check(max_size: usize) -> Result<RoundTripReport> {
    let all = pair_equivalence_structures(max_size)?;
    let mut failures = Vec::new();
    for a in &all {
        if decode_predicates(&encode_equivalences(a, "E")?)? != *a && failures.len() < 10 {
            failures.push(a.clone());
        }
    }
    Ok(RoundTripReport { max_size, structures: all.len(), failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::sig;

    fn e1() -> Arc<Signature> {
        sig::single("E_1", 2, Shape::Any, "E")
    }

    #[test]
    fn empty_structure_encodes_to_nothing() {
        let a = Structure::empty(e1());
        let r = encode_equivalences(&a, "E").unwrap();
        assert!(r.predicates.is_empty());
        assert_eq!(decode_predicates(&r).unwrap(), a);
    }

    #[test]
    fn classes_are_indexed_by_least_member() {
        let a = Structure::from_named(e1(), [0, 1, 2], &[("E_1", vec![vec![1, 2], vec![2, 1]])]).unwrap();
        let r = encode_equivalences(&a, "E").unwrap();
        let names: Vec<&str> = r.predicates.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["P_1_1", "P_1_2"]);
        assert!(r.structure.holds_named("P_1_1", &[0]));
        assert!(r.structure.holds_named("P_1_2", &[1]) && r.structure.holds_named("P_1_2", &[2]));
    }

    #[test]
    fn invalid_relations_are_rejected() {
        let a = Structure::from_named(e1(), [0, 1], &[("E_1", vec![vec![0, 1]])]).unwrap();
        assert!(encode_equivalences(&a, "E").is_err());
    }

    #[test]
    fn overlapping_predicates_do_not_decode() {
        let a = Structure::discrete(e1(), [0, 1]);
        let mut r = encode_equivalences(&a, "E").unwrap();
        r.structure = r.structure.with_tuples(&[(0, vec![1])]).unwrap();
        assert!(decode_predicates(&r).is_err());
    }

    #[test]
    fn saturation_covers_every_set_without_new_pairs() {
        let a = Structure::from_named(e1(), [0, 1], &[("E_1", vec![vec![0, 1], vec![1, 0]])]).unwrap();
        let r = encode_equivalences(&a, "E").unwrap();
        let bigger = r.with_structure(r.structure.with_elems([2, 3])).unwrap();
        let (sat, fresh) = bigger.saturate(1).unwrap();
        assert_eq!(fresh.len(), 2);
        assert_eq!(fresh[&vec![2]], "P_1_2");
        assert_eq!(fresh[&vec![3]], "P_1_3");
        let decoded = decode_predicates(&sat).unwrap();
        assert_eq!(decoded.tuples(0).len(), 2);
    }

    #[test]
    fn single_block_decodes_to_a_total_relation() {
        let p = Predicate { name: "P_1_1".into(), arity: 1, encodes: "E_1".into(), index: 1 };
        let universe: BTreeSet<Elem> = [0, 1, 2].into();
        let r = RelanguagedStructure {
            structure: assemble(&universe, &[(p.clone(), vec![vec![0], vec![1], vec![2]])], &[]).unwrap(),
            predicates: vec![p],
            equivalences: vec![EquivalenceSymbol { name: "E_1".into(), n: 1 }],
            source: e1().symbols().to_vec(),
        };
        assert_eq!(decode_predicates(&r).unwrap().tuples(0).len(), 6);
    }
}
