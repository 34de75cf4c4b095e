//! Free and disjoint amalgams, and bounded checkers for the amalgamation
//! properties of a class.
//!
//! All searches work on a normalized copy of the instance: A on `0..t`,
//! B − A on the next ids, C − A after that, so that B ∩ C = A literally.
//! A candidate amalgam D is then a completion of B by the points of C − A
//! (plus optional padding points), with the tuples inside C fixed. The first
//! completion visited adds nothing, which is the free amalgam; relation
//! expansions of the disjoint union come next and padded universes last.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::ClassSpec;
use crate::embed::{compose, Embedding};
use crate::enumerate::{extensions, first_completion, structures_up_to};
use crate::error::{input, Error, Result};
use crate::structure::{Elem, Structure};

/// Whether `f` is an embedding of `a` into `b`: total on `a`, injective,
/// preserving and reflecting every relation.
pub fn is_embedding(a: &Structure, b: &Structure, f: &Embedding) -> bool {
    f.len() == a.size()
        && a.universe().iter().all(|e| f.contains_key(e))
        && a.relabel(f).is_ok_and(|img| img.is_induced_in(b))
}

fn image(f: &Embedding) -> BTreeSet<Elem> {
    f.values().copied().collect()
}

fn identity_on(s: &Structure) -> Embedding {
    s.universe().iter().map(|&e| (e, e)).collect()
}

/// A, B, C with embeddings h₁: A → C and h₂: A → B.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AmalgamInstance {
    pub a: Structure,
    pub b: Structure,
    pub c: Structure,
    pub h1: Embedding,
    pub h2: Embedding,
}

/// The normalized copy: `a ⊆ b`, `a ⊆ c` literally and `b ∩ c = a`, with
/// the renamings from the original B and C.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub a: Structure,
    pub b: Structure,
    pub c: Structure,
    pub to_b: Embedding,
    pub to_c: Embedding,
}

impl AmalgamInstance {
    pub fn new(a: Structure, b: Structure, c: Structure, h1: Embedding, h2: Embedding) -> Result<Self> {
        if !is_embedding(&a, &c, &h1) {
            return input("h1 is not an embedding of A into C");
        }
        if !is_embedding(&a, &b, &h2) {
            return input("h2 is not an embedding of A into B");
        }
        Ok(AmalgamInstance { a, b, c, h1, h2 })
    }

    /// Instance where A is an induced substructure of both B and C and the
    /// embeddings are inclusions.
    pub fn inclusions(a: &Structure, b: &Structure, c: &Structure) -> Result<Self> {
        let id = identity_on(a);
        Self::new(a.clone(), b.clone(), c.clone(), id.clone(), id)
    }

    /// Checks membership of A, B, C and strength of h₁(A) in C and h₂(A)
    /// in B.
    pub fn check_strong(&self, k: &ClassSpec) -> Result<()> {
        for (name, s) in [("A", &self.a), ("B", &self.b), ("C", &self.c)] {
            if !k.try_contains(s)? {
                return input(format!("{name} is not in class {}", k.id));
            }
        }
        if !k.strong_set(&image(&self.h1), &self.c) {
            return input("h1(A) is not strong in C");
        }
        if !k.strong_set(&image(&self.h2), &self.b) {
            return input("h2(A) is not strong in B");
        }
        Ok(())
    }

    pub fn normalized(&self) -> Normalized {
        let a_ids: BTreeMap<Elem, Elem> = self.a.elems().into_iter().zip(0..).collect();
        let t = a_ids.len() as Elem;
        let inv_h2: BTreeMap<Elem, Elem> = self.h2.iter().map(|(x, y)| (*y, *x)).collect();
        let inv_h1: BTreeMap<Elem, Elem> = self.h1.iter().map(|(x, y)| (*y, *x)).collect();
        let mut next = t;
        let mut to_b = Embedding::new();
        for e in self.b.elems() {
            let v = match inv_h2.get(&e) {
                Some(x) => a_ids[x],
                None => {
                    next += 1;
                    next - 1
                }
            };
            to_b.insert(e, v);
        }
        let mut to_c = Embedding::new();
        for e in self.c.elems() {
            let v = match inv_h1.get(&e) {
                Some(x) => a_ids[x],
                None => {
                    next += 1;
                    next - 1
                }
            };
            to_c.insert(e, v);
        }
        let a = self.a.relabel(&a_ids).expect("injective");
        let b = self.b.relabel(&to_b).expect("injective");
        let c = self.c.relabel(&to_c).expect("injective");
        Normalized { a, b, c, to_b, to_c }
    }

    /// Reduct of every structure to the given symbol positions.
    pub fn project(&self, indices: &[usize], target: std::sync::Arc<crate::structure::Signature>) -> Self {
        AmalgamInstance {
            a: self.a.project(indices, target.clone()),
            b: self.b.project(indices, target.clone()),
            c: self.c.project(indices, target),
            h1: self.h1.clone(),
            h2: self.h2.clone(),
        }
    }
}

/// D with embeddings f: B → D and g: C → D.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Amalgam {
    pub d: Structure,
    pub f: Embedding,
    pub g: Embedding,
}

/// Everything wrong with `am` as an amalgam of `inst` in `k`; empty when it
/// is a valid (disjoint, if asked) amalgam.
pub fn amalgam_defects(k: &ClassSpec, inst: &AmalgamInstance, am: &Amalgam, disjoint: bool) -> Vec<String> {
    let mut out = Vec::new();
    if !k.contains(&am.d) {
        out.push("D is not in the class".to_string());
    }
    if !is_embedding(&inst.b, &am.d, &am.f) {
        out.push("f is not an embedding of B".to_string());
    } else if !k.strong_set(&image(&am.f), &am.d) {
        out.push("f(B) is not strong in D".to_string());
    }
    if !is_embedding(&inst.c, &am.d, &am.g) {
        out.push("g is not an embedding of C".to_string());
    } else if !k.strong_set(&image(&am.g), &am.d) {
        out.push("g(C) is not strong in D".to_string());
    }
    if compose(&inst.h2, &am.f) != compose(&inst.h1, &am.g) {
        out.push("f∘h2 and g∘h1 differ".to_string());
    }
    if disjoint {
        let meet: BTreeSet<Elem> = image(&am.f).intersection(&image(&am.g)).copied().collect();
        if meet != image(&compose(&inst.h2, &am.f)) {
            out.push("f(B) ∩ g(C) is larger than the image of A".to_string());
        }
    }
    out
}

/// Fails with an integrity error unless `am` is a valid amalgam.
pub fn verify_amalgam(k: &ClassSpec, inst: &AmalgamInstance, am: &Amalgam, disjoint: bool) -> Result<()> {
    let defects = amalgam_defects(k, inst, am, disjoint);
    if defects.is_empty() {
        Ok(())
    } else {
        Err(Error::Integrity(defects.join("; ")))
    }
}

/// C ∗_A B on the union of the universes: the tuples of B and of C, nothing
/// else. Requires B ∩ C = A as induced substructures.
pub fn free_amalgam(a: &Structure, b: &Structure, c: &Structure) -> Result<Structure> {
    if !a.is_induced_in(b) || !a.is_induced_in(c) {
        return input("A is not an induced substructure of both B and C");
    }
    let meet: BTreeSet<Elem> = b.universe().intersection(c.universe()).copied().collect();
    if &meet != a.universe() {
        return input("B and C meet outside A");
    }
    let mut d = b.with_elems(c.universe().iter().copied());
    for sym in 0..c.signature().len() {
        for t in c.tuples(sym) {
            d.insert_raw(sym, t.clone());
        }
    }
    Ok(d)
}

/// Completions of `left` by the points of `right` outside `left` and
/// `padding` further points, keeping `right`'s relations fixed, that lie in
/// the class and pass `accept`.
pub(crate) fn search_over(
    k: &ClassSpec,
    left: &Structure,
    right: &Structure,
    padding: usize,
    accept: &mut dyn FnMut(&Structure) -> bool,
) -> Result<Option<Structure>> {
    let mut new: Vec<Elem> = right.universe().difference(left.universe()).copied().collect();
    let top = left.max_elem().into_iter().chain(right.max_elem()).max().map_or(0, |m| m + 1);
    new.extend((0..padding as Elem).map(|i| top + i));
    let oracle = |sym: usize, t: &[Elem]| -> Option<bool> {
        if t.iter().all(|e| right.contains_elem(*e)) {
            Some(right.tuples(sym).contains(t))
        } else {
            None
        }
    };
    let lead: Vec<Elem> = right.universe().intersection(left.universe()).copied().collect();
    first_completion(k, left, &new, Some(&oracle), &lead, accept)
}

fn effective_cap(k: &ClassSpec, size_cap: usize) -> usize {
    k.size_cap.map_or(size_cap, |c| c.min(size_cap))
}

fn wrap(n: &Normalized, d: Structure, c_map: &Embedding) -> Amalgam {
    Amalgam { d, f: n.to_b.clone(), g: compose(&n.to_c, c_map) }
}

/// A disjoint amalgam with exactly `size` elements, if one exists.
pub fn disjoint_amalgam_of_size(k: &ClassSpec, inst: &AmalgamInstance, size: usize) -> Result<Option<Amalgam>> {
    let n = inst.normalized();
    let base = n.b.size() + n.c.size() - n.a.size();
    if size < base {
        return Ok(None);
    }
    let (bu, cu) = (n.b.universe().clone(), n.c.universe().clone());
    let found = search_over(k, &n.b, &n.c, size - base, &mut |d| k.strong_set(&bu, d) && k.strong_set(&cu, d))?;
    Ok(found.map(|d| wrap(&n, d, &identity_on(&n.c))))
}

/// First disjoint amalgam in search order with at most `size_cap` elements
/// (further limited by the class cap). Absence is a legitimate answer.
pub fn disjoint_amalgam_search(k: &ClassSpec, inst: &AmalgamInstance, size_cap: usize) -> Result<Option<Amalgam>> {
    let base = inst.b.size() + inst.c.size() - inst.a.size();
    for size in base..=effective_cap(k, size_cap) {
        if let Some(am) = disjoint_amalgam_of_size(k, inst, size)? {
            debug_assert!(amalgam_defects(k, inst, &am, true).is_empty());
            return Ok(Some(am));
        }
    }
    Ok(None)
}

/// Injective partial maps from `from` into `to`, fewest pairs first.
pub(crate) fn partial_injections(from: &[Elem], to: &[Elem]) -> Vec<Embedding> {
    let mut out = Vec::new();
    fn rec(from: &[Elem], to: &[Elem], i: usize, cur: &mut Embedding, out: &mut Vec<Embedding>) {
        if i == from.len() {
            out.push(cur.clone());
            return;
        }
        rec(from, to, i + 1, cur, out);
        for &y in to {
            if !cur.values().any(|v| *v == y) {
                cur.insert(from[i], y);
                rec(from, to, i + 1, cur, out);
                cur.remove(&from[i]);
            }
        }
    }
    rec(from, to, 0, &mut Embedding::new(), &mut out);
    out.sort_by_key(|m| m.len());
    out
}

/// Amalgam in which C − A may be partly identified with B − A. Tries no
/// identification first, then one, and so on; within each, sizes up to the
/// cap.
pub fn amalgam_search(k: &ClassSpec, inst: &AmalgamInstance, size_cap: usize) -> Result<Option<Amalgam>> {
    let n = inst.normalized();
    let b_new: Vec<Elem> = n.b.universe().difference(n.a.universe()).copied().collect();
    let c_new: Vec<Elem> = n.c.universe().difference(n.a.universe()).copied().collect();
    let cap = effective_cap(k, size_cap);
    for ident in partial_injections(&c_new, &b_new) {
        let map: Embedding = n.c.elems().into_iter().map(|e| (e, *ident.get(&e).unwrap_or(&e))).collect();
        let right = n.c.relabel(&map)?;
        let overlap: BTreeSet<Elem> = right.universe().intersection(n.b.universe()).copied().collect();
        if n.b.induced_unchecked(&overlap) != right.induced_unchecked(&overlap) {
            continue;
        }
        let base = n.b.universe().union(right.universe()).count();
        let (bu, ru) = (n.b.universe().clone(), right.universe().clone());
        for size in base..=cap {
            let found =
                search_over(k, &n.b, &right, size - base, &mut |d| k.strong_set(&bu, d) && k.strong_set(&ru, d))?;
            if let Some(d) = found {
                let am = wrap(&n, d, &map);
                debug_assert!(amalgam_defects(k, inst, &am, false).is_empty());
                return Ok(Some(am));
            }
        }
    }
    Ok(None)
}

/// Witness for parallel strongness: D with g(C) strong, f(B) merely a
/// substructure, disjoint over A. Here B is the strong extension of A.
pub fn parallel_strong_search(k: &ClassSpec, inst: &AmalgamInstance, size_cap: usize) -> Result<Option<Amalgam>> {
    let n = inst.normalized();
    let base = n.b.size() + n.c.size() - n.a.size();
    let cu = n.c.universe().clone();
    for size in base..=effective_cap(k, size_cap) {
        if let Some(d) = search_over(k, &n.b, &n.c, size - base, &mut |d| k.strong_set(&cu, d))? {
            return Ok(Some(wrap(&n, d, &identity_on(&n.c))));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Property {
    #[serde(rename = "AP")]
    Ap,
    #[serde(rename = "dAP")]
    Dap,
    #[serde(rename = "fAP")]
    Fap,
    #[serde(rename = "dPS")]
    Dps,
    #[serde(rename = "smooth_intersections")]
    SmoothIntersections,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Ap => "AP",
            Property::Dap => "dAP",
            Property::Fap => "fAP",
            Property::Dps => "dPS",
            Property::SmoothIntersections => "smooth_intersections",
        })
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "ap" => Property::Ap,
            "dap" => Property::Dap,
            "fap" => Property::Fap,
            "dps" => Property::Dps,
            "smooth_intersections" | "si" => Property::SmoothIntersections,
            _ => return input(format!("unknown property {s}")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub a: Structure,
    pub b: Structure,
    pub c: Structure,
    pub reason: String,
}

/// Bounded evidence: `holds` means no counterexample among the instances
/// enumerated up to `max_size`, with witnesses searched up to the recorded
/// padding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub class: String,
    pub property: Property,
    pub max_size: usize,
    /// Extra points allowed beyond the disjoint union when searching for a
    /// witness; `None` means |A|, so |D| ≤ |B| + |C|.
    pub padding: Option<usize>,
    pub instances: usize,
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
}

/// Members of the class with their strong and arbitrary proper extensions,
/// all up to isomorphism over the base, with total size at most `n`.
pub struct InstanceFamily {
    pub base: Structure,
    pub strong: Vec<Structure>,
    pub all: Vec<Structure>,
}

pub fn instance_families(k: &ClassSpec, n: usize) -> Result<Vec<InstanceFamily>> {
    let mut out = Vec::new();
    for base in structures_up_to(k, n)? {
        let first = base.size() as Elem;
        let all: Vec<Structure> = extensions(k, &base, n - base.size(), first)?.into_iter().flatten().collect();
        let strong = all.iter().filter(|b| k.strong_set(base.universe(), b)).cloned().collect();
        out.push(InstanceFamily { base, strong, all });
    }
    Ok(out)
}

fn padding_for(padding: Option<usize>, inst: &AmalgamInstance) -> usize {
    inst.b.size() + inst.c.size() - inst.a.size() + padding.unwrap_or(inst.a.size())
}

/// Why `inst` fails `prop`, if it does.
fn instance_failure(k: &ClassSpec, prop: Property, inst: &AmalgamInstance, padding: Option<usize>) -> Result<Option<String>> {
    let cap = padding_for(padding, inst);
    Ok(match prop {
        Property::Ap => amalgam_search(k, inst, cap)?.is_none().then(|| "no amalgam within the cap".to_string()),
        Property::Dap => {
            disjoint_amalgam_search(k, inst, cap)?.is_none().then(|| "no disjoint amalgam within the cap".to_string())
        }
        Property::Dps => parallel_strong_search(k, inst, cap)?
            .is_none()
            .then(|| "no parallel-strong witness within the cap".to_string()),
        Property::Fap => {
            let n = inst.normalized();
            let d = free_amalgam(&n.a, &n.b, &n.c)?;
            if !k.contains(&d) {
                Some("free amalgam is not in the class".to_string())
            } else if !k.strong_set(n.b.universe(), &d) || !k.strong_set(n.c.universe(), &d) {
                Some("B or C is not strong in the free amalgam".to_string())
            } else {
                None
            }
        }
        Property::SmoothIntersections => unreachable!("handled separately"),
    })
}

/// Bounded exhaustive check of an amalgamation property over all instances
/// with |B|, |C| ≤ `max_size`, up to isomorphism.
pub fn check_property(k: &ClassSpec, prop: Property, max_size: usize) -> Result<PropertyReport> {
    check_property_with(k, prop, max_size, None)
}

pub fn check_property_with(
    k: &ClassSpec,
    prop: Property,
    max_size: usize,
    padding: Option<usize>,
) -> Result<PropertyReport> {
    if let Some(cap) = k.size_cap {
        if max_size > cap {
            return Err(Error::Cap(format!("class {} is capped at {cap} elements", k.id)));
        }
    }
    let mut report =
        PropertyReport { class: k.id.clone(), property: prop, max_size, padding, instances: 0, holds: true, counterexample: None };
    if prop == Property::SmoothIntersections {
        let (count, cex) = smooth_intersections(k, max_size)?;
        report.instances = count;
        report.holds = cex.is_none();
        report.counterexample = cex;
        return Ok(report);
    }
    let mut instances = Vec::new();
    for fam in instance_families(k, max_size)? {
        match prop {
            Property::Dps => {
                for b in &fam.strong {
                    for c in &fam.all {
                        instances.push(AmalgamInstance::inclusions(&fam.base, b, c)?);
                    }
                }
            }
            _ => {
                for (i, b) in fam.strong.iter().enumerate() {
                    for c in &fam.strong[i..] {
                        instances.push(AmalgamInstance::inclusions(&fam.base, b, c)?);
                    }
                }
            }
        }
    }
    report.instances = instances.len();
    let first = instances
        .par_iter()
        .map(|inst| instance_failure(k, prop, inst, padding).map(|r| r.map(|why| (inst, why))))
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    if let Some(r) = first {
        if let Some((inst, reason)) = r? {
            report.holds = false;
            report.counterexample =
                Some(Counterexample { a: inst.a.clone(), b: inst.b.clone(), c: inst.c.clone(), reason });
        }
    }
    Ok(report)
}

/// A ≤ B implies A ∩ S ≤ B|S for every S ⊆ B with B|S in the class.
fn smooth_intersections(k: &ClassSpec, n: usize) -> Result<(usize, Option<Counterexample>)> {
    let mut count = 0;
    for b in structures_up_to(k, n)? {
        let elems = b.elems();
        let subsets: Vec<BTreeSet<Elem>> = crate::structure::subsets(&elems).collect();
        let members: Vec<&BTreeSet<Elem>> = subsets.iter().filter(|s| k.contains(&b.induced_unchecked(s))).collect();
        for a in subsets.iter().filter(|a| k.strong_set(a, &b)) {
            for s in &members {
                count += 1;
                let meet: BTreeSet<Elem> = a.intersection(s).copied().collect();
                let part = b.induced_unchecked(s);
                if !k.strong_set(&meet, &part) {
                    return Ok((
                        count,
                        Some(Counterexample {
                            a: b.induced_unchecked(a),
                            b: b.clone(),
                            c: part,
                            reason: "A ≤ B but A ∩ C is not strong in B ∩ C".to_string(),
                        }),
                    ));
                }
            }
        }
    }
    Ok((count, None))
}

/// Uniform disjoint amalgamation over a family of classes, up to a bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformReport {
    pub classes: Vec<String>,
    pub max_size: usize,
    /// Every class is closed under substructure and passed the dAP check.
    pub fast_path: bool,
    /// Realizable cardinalities up to `max_size`, per class.
    pub cardinalities: Vec<Vec<usize>>,
    pub same_cardinalities: bool,
    /// `None` when the fast path applied.
    pub common_sizes: Option<bool>,
    /// (|A|, |B|, |C|) for which no common amalgam size was found.
    pub failing_triple: Option<(usize, usize, usize)>,
    pub holds: bool,
}

pub fn check_uniform_dap(family: &[ClassSpec], max_size: usize) -> Result<UniformReport> {
    let mut cardinalities = Vec::new();
    for k in family {
        let sizes: BTreeSet<usize> = structures_up_to(k, max_size)?.iter().map(Structure::size).collect();
        cardinalities.push(sizes.into_iter().collect::<Vec<_>>());
    }
    let same = cardinalities.windows(2).all(|w| w[0] == w[1]);
    let mut fast = family.iter().all(|k| k.flags.closed_under_substructure);
    if fast {
        for k in family {
            if !check_property(k, Property::Dap, max_size)?.holds {
                fast = false;
                break;
            }
        }
    }
    let mut report = UniformReport {
        classes: family.iter().map(|k| k.id.clone()).collect(),
        max_size,
        fast_path: fast,
        cardinalities,
        same_cardinalities: same,
        common_sizes: None,
        failing_triple: None,
        holds: same && fast,
    };
    if fast {
        return Ok(report);
    }
    // Working amalgam sizes j per size triple, intersected over every
    // instance of every class. Only j ≤ |B| + |C| is tried.
    let mut working: BTreeMap<(usize, usize, usize), BTreeSet<usize>> = BTreeMap::new();
    for k in family {
        for fam in instance_families(k, max_size)? {
            let mut strong = vec![fam.base.clone()];
            strong.extend(fam.strong.iter().cloned());
            for b in &strong {
                for c in &strong {
                    let inst = AmalgamInstance::inclusions(&fam.base, b, c)?;
                    let key = (fam.base.size(), b.size(), c.size());
                    let lo = b.size() + c.size() - fam.base.size();
                    let hi = effective_cap(k, b.size() + c.size());
                    let mut ok = BTreeSet::new();
                    for j in lo..=hi {
                        if disjoint_amalgam_of_size(k, &inst, j)?.is_some() {
                            ok.insert(j);
                        }
                    }
                    let entry = working.entry(key).or_insert_with(|| (lo..=b.size() + c.size()).collect());
                    entry.retain(|j| ok.contains(j));
                }
            }
        }
    }
    report.failing_triple = working.iter().find(|(_, js)| js.is_empty()).map(|(t, _)| *t);
    report.common_sizes = Some(report.failing_triple.is_none());
    report.holds = same && report.failing_triple.is_none();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::builtins::{builtin_class, BuiltinParams};
    use crate::structure::sig;

    fn class(name: &str) -> ClassSpec {
        builtin_class(name, BuiltinParams::default()).unwrap()
    }

    #[test]
    fn free_amalgam_of_two_edges_is_a_path() {
        let a = Structure::discrete(sig::graph(), [0]);
        let b = Structure::from_named(sig::graph(), [0, 1], &[("E", vec![vec![0, 1]])]).unwrap();
        let c = Structure::from_named(sig::graph(), [0, 2], &[("E", vec![vec![0, 2]])]).unwrap();
        let d = free_amalgam(&a, &b, &c).unwrap();
        assert!(d.holds_named("E", &[0, 1]) && d.holds_named("E", &[0, 2]));
        assert!(!d.holds_named("E", &[1, 2]));
        assert!(free_amalgam(&a, &b, &b).is_err());
    }

    #[test]
    fn free_amalgam_is_idempotent() {
        let b = Structure::from_named(sig::graph(), [0, 1], &[("E", vec![vec![0, 1]])]).unwrap();
        assert_eq!(free_amalgam(&b, &b, &b).unwrap(), b);
    }

    #[test]
    fn linear_order_singletons_amalgamate_into_a_chain() {
        let lo = class("linear_orders");
        let a = Structure::empty(lo.signature.clone());
        let b = Structure::discrete(lo.signature.clone(), [0]);
        let inst = AmalgamInstance::inclusions(&a, &b, &b).unwrap();
        let am = disjoint_amalgam_search(&lo, &inst, 2).unwrap().unwrap();
        assert_eq!(am.d.size(), 2);
        assert_eq!(am.d.tuples(0).len(), 1);
        verify_amalgam(&lo, &inst, &am, true).unwrap();
    }

    #[test]
    fn normalization_separates_b_and_c() {
        let g = class("all_graphs");
        let a = Structure::discrete(sig::graph(), [5]);
        let b = Structure::from_named(sig::graph(), [5, 6], &[("E", vec![vec![5, 6]])]).unwrap();
        let inst = AmalgamInstance::inclusions(&a, &b, &b).unwrap();
        let n = inst.normalized();
        assert_eq!(n.b.elems(), vec![0, 1]);
        assert_eq!(n.c.elems(), vec![0, 2]);
        let am = disjoint_amalgam_search(&g, &inst, 3).unwrap().unwrap();
        assert_eq!(am.d, free_amalgam(&n.a, &n.b, &n.c).unwrap());
    }

    #[test]
    fn property_names_parse() {
        assert_eq!("fAP".parse::<Property>().unwrap(), Property::Fap);
        assert!("xyz".parse::<Property>().is_err());
    }

    #[test]
    fn partial_injection_order() {
        let maps = partial_injections(&[5], &[1, 2]);
        assert_eq!(maps.len(), 3);
        assert!(maps[0].is_empty());
    }
}
