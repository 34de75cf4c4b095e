//! Bounded search for EPPA witnesses, including permorphism variants, and
//! the no-witness certificate for the edge-free-crossing class.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::builtins::{all_structures, builtin_class, BuiltinParams};
use crate::classes::ClassSpec;
use crate::embed::{Embeddings, Mode};
use crate::enumerate::Levels;
use crate::error::{input, Result};
use crate::merge::MergeSpec;
use crate::perm::{apply_permutation, extends, is_permorphism, is_total_permorphism, PartialMap};
use crate::structure::{sig, Elem, Shape, Structure};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainConstraint {
    /// Domains and ranges must be strong in A.
    #[default]
    Strong,
    Unrestricted,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EppaInstance {
    pub a: Structure,
    pub maps: Vec<PartialMap>,
    #[serde(default)]
    pub constraint: DomainConstraint,
}

impl EppaInstance {
    pub fn validate(&self, k: &ClassSpec) -> Result<()> {
        if !k.try_contains(&self.a)? {
            return input(format!("A is not in class {}", k.id));
        }
        for (i, f) in self.maps.iter().enumerate() {
            f.validate(&self.a, &self.a)?;
            if !is_permorphism(&self.a, f) {
                return input(format!("map {i} is not a partial permorphism of A"));
            }
            if self.constraint == DomainConstraint::Strong
                && !(k.strong_set(&f.domain(), &self.a) && k.strong_set(&f.range(), &self.a))
            {
                return input(format!("map {i} has a domain or range that is not strong in A"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EppaWitness {
    pub b: Structure,
    /// Total permorphisms of B, one per map, each extending it.
    pub extensions: Vec<PartialMap>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EppaOutcome {
    pub class: String,
    pub max_size: usize,
    /// Strong extensions of A examined.
    pub candidates: usize,
    pub witness: Option<EppaWitness>,
}

/// Total γ-permorphism of `b` extending `f`, if any.
pub fn extend_to_total(b: &Structure, f: &PartialMap) -> Result<Option<PartialMap>> {
    let gamma = f.twist_or_identity(b.signature().len());
    // g is a γ-permorphism of B iff g: B → γ⁻¹(B) is an isomorphism.
    let target = apply_permutation(b, &gamma.inverse())?;
    let g = Embeddings::with_prefix(b, &target, Mode::Isomorphism, &f.pairs)?.next();
    Ok(g.map(|pairs| PartialMap { pairs, twist: f.twist.clone() }))
}

fn witness_in(b: &Structure, maps: &[PartialMap]) -> Result<Option<Vec<PartialMap>>> {
    let mut out = Vec::with_capacity(maps.len());
    for f in maps {
        match extend_to_total(b, f)? {
            Some(g) => out.push(g),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Problems with a claimed witness; empty when it is sound.
pub fn witness_defects(k: &ClassSpec, inst: &EppaInstance, w: &EppaWitness) -> Vec<String> {
    let mut out = Vec::new();
    if !k.contains(&w.b) {
        out.push("B is not in the class".into());
    }
    if !inst.a.is_induced_in(&w.b) {
        out.push("A is not an induced substructure of B".into());
    } else if !k.strong_set(inst.a.universe(), &w.b) {
        out.push("A is not strong in B".into());
    }
    if w.extensions.len() != inst.maps.len() {
        out.push("one extension per map is required".into());
    }
    for (i, (f, g)) in inst.maps.iter().zip(&w.extensions).enumerate() {
        if g.twist != f.twist {
            out.push(format!("extension {i} changes the twist"));
        }
        if !is_total_permorphism(&w.b, g) {
            out.push(format!("extension {i} is not a total permorphism of B"));
        }
        if !extends(&g.pairs, &f.pairs) {
            out.push(format!("extension {i} does not extend its map"));
        }
    }
    out
}

/// First B ≥ A with at most `max_size` elements, in canonical order (A
/// itself, then extensions level by level up to isomorphism over A), on
/// which every map extends to a total permorphism.
pub fn eppa_search(k: &ClassSpec, inst: &EppaInstance, max_size: usize) -> Result<EppaOutcome> {
    inst.validate(k)?;
    let mut out = EppaOutcome { class: k.id.clone(), max_size, candidates: 0, witness: None };
    if inst.a.size() > max_size {
        return Ok(out);
    }
    out.candidates += 1;
    if let Some(ext) = witness_in(&inst.a, &inst.maps)? {
        out.witness = Some(EppaWitness { b: inst.a.clone(), extensions: ext });
        return Ok(out);
    }
    let first = inst.a.max_elem().map_or(0, |m| m + 1);
    for level in Levels::new(k, &inst.a, first).take(max_size - inst.a.size()) {
        let strong: Vec<Structure> = level?.into_iter().filter(|b| k.strong_set(inst.a.universe(), b)).collect();
        out.candidates += strong.len();
        let found = strong
            .par_iter()
            .map(|b| witness_in(b, &inst.maps).map(|w| w.map(|ext| EppaWitness { b: b.clone(), extensions: ext })))
            .find_map_first(|r| match r {
                Ok(Some(w)) => Some(Ok(w)),
                Ok(None) => None,
                Err(e) => Some(Err(e)),
            })
            .transpose()?;
        if let Some(w) = found {
            debug_assert!(witness_defects(k, inst, &w).is_empty());
            out.witness = Some(w);
            return Ok(out);
        }
    }
    Ok(out)
}

/// The fixed scenario: a₁–a₂ an edge, a₃ isolated, f: a₁ ↦ a₃, in the
/// class where A ≤ B forbids edges between A and B − A.
pub fn no_eppa_instance() -> Result<(ClassSpec, EppaInstance)> {
    let k = builtin_class("one_local_no_edges_out", BuiltinParams::default())?;
    let a = Structure::from_named(k.signature.clone(), [0, 1, 2], &[("E", vec![vec![0, 1]])])?;
    let inst = EppaInstance { a, maps: vec![PartialMap::new([(0, 2)])], constraint: DomainConstraint::Unrestricted };
    Ok((k, inst))
}

#[derive(Clone, Debug, Serialize)]
pub struct NoEppaCertificate {
    /// Extensions of A in the class up to the bound, strong or not.
    pub extensions: usize,
    pub strong_extensions: usize,
    /// Extensions in which a₃ has a neighbour outside A.
    pub with_a3_neighbour: usize,
    /// Of those, how many have A strong. The argument needs zero.
    pub with_a3_neighbour_strong: usize,
    /// In every strong extension a₃ is isolated while a₁ is not, so no
    /// automorphism can send a₁ to a₃.
    pub a3_isolated_in_every_strong_extension: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RestrictionCheck {
    /// Graph extensions B of A examined, each expanded by the total R.
    pub candidates: usize,
    /// Candidates lying in the forbidden-extension class.
    pub admissible: usize,
    /// Admissible candidates whose graph reduct does not have A strong.
    pub admissible_not_strong: usize,
    /// Admissible candidates carrying an automorphism that extends f.
    pub sharp_witnesses: usize,
    /// Sharp witnesses whose graph reduct is not a witness in the base
    /// class. The argument needs zero.
    pub reduct_failures: usize,
    /// The identity on {a₁} has a sharp witness whose reduct is a witness.
    pub identity_control: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NoEppaReport {
    pub max_size: usize,
    pub search: EppaOutcome,
    pub certificate: NoEppaCertificate,
    /// Witness for the identity on {a₁}, which must be A itself.
    pub identity_witness: Option<EppaWitness>,
    pub restriction: RestrictionCheck,
    pub holds: bool,
}

/// Exhausts the scenario up to `max_size`, checks the structural reason,
/// and re-runs the reduct argument for the expanded language with a binary
/// R total on A.
pub fn verify_no_eppa(max_size: usize) -> Result<NoEppaReport> {
    let (k, inst) = no_eppa_instance()?;
    let search = eppa_search(&k, &inst, max_size)?;
    let (a1, a3) = (0, 2);
    let mut cert = NoEppaCertificate {
        extensions: 0,
        strong_extensions: 0,
        with_a3_neighbour: 0,
        with_a3_neighbour_strong: 0,
        a3_isolated_in_every_strong_extension: true,
        holds: false,
    };
    let mut candidates = vec![inst.a.clone()];
    for level in Levels::new(&k, &inst.a, 3).take(max_size.saturating_sub(3)) {
        candidates.extend(level?);
    }
    let degree = |b: &Structure, x: Elem| b.incident(0, x).count();
    for b in &candidates {
        cert.extensions += 1;
        let strong = k.strong_set(inst.a.universe(), b);
        let outside = b.incident(0, a3).any(|t| t.iter().any(|e| !inst.a.contains_elem(*e)));
        if strong {
            cert.strong_extensions += 1;
            cert.a3_isolated_in_every_strong_extension &= degree(b, a3) == 0 && degree(b, a1) > 0;
        }
        if outside {
            cert.with_a3_neighbour += 1;
            cert.with_a3_neighbour_strong += usize::from(strong);
        }
    }
    cert.holds = cert.with_a3_neighbour_strong == 0 && cert.a3_isolated_in_every_strong_extension;

    let identity = EppaInstance { maps: vec![PartialMap::new([(a1, a1)])], ..inst.clone() };
    let identity_witness = eppa_search(&k, &identity, max_size)?.witness;
    let restriction = restriction_check(&k, &inst, &candidates)?;
    let holds = search.witness.is_none()
        && cert.holds
        && identity_witness.as_ref().is_some_and(|w| w.b == inst.a)
        && restriction.holds;
    Ok(NoEppaReport { max_size, search, certificate: cert, identity_witness, restriction, holds })
}

/// The expanded language adds a binary R, total on A. Forbidden are the
/// one-point extensions of A whose new point has an edge into A. Each graph
/// candidate B is expanded by the total R; R then never obstructs a
/// homomorphism, so membership in the forbidden-extension class depends on
/// the graph part only.
fn restriction_check(k: &ClassSpec, inst: &EppaInstance, candidates: &[Structure]) -> Result<RestrictionCheck> {
    let r_class = all_structures(sig::single("R", 2, Shape::Any, "R"));
    let m = MergeSpec::new(vec![(k.clone(), "L"), (r_class, "R")])?;
    let total_r = |s: &Structure| -> Result<Structure> {
        let r: Vec<Vec<Elem>> = s.elems().iter().flat_map(|&x| s.elems().into_iter().map(move |y| vec![x, y])).collect();
        let rs = Structure::from_named(sig::single("R", 2, Shape::Any, "R"), s.elems(), &[("R", r)])?;
        m.assemble(&[s.clone(), rs])
    };
    let a_sharp = total_r(&inst.a)?;
    // With R total every pair is irreducible, so "injective on irreducible
    // subsets" is plain injectivity.
    let fresh = inst.a.max_elem().map_or(0, |m| m + 1);
    let forbidden: Vec<Structure> = (1u32..1 << inst.a.size())
        .map(|mask| {
            let edges: Vec<(usize, Vec<Elem>)> = inst
                .a
                .elems()
                .into_iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, a)| (0, vec![a, fresh]))
                .collect();
            inst.a.with_elems([fresh]).with_tuples(&edges)
        })
        .collect::<Result<_>>()?;
    let mut check = RestrictionCheck {
        candidates: 0,
        admissible: 0,
        admissible_not_strong: 0,
        sharp_witnesses: 0,
        reduct_failures: 0,
        identity_control: false,
        holds: false,
    };
    let sharp_maps = |f: &PartialMap| vec![f.clone()];
    for b in candidates {
        check.candidates += 1;
        if forbidden.iter().any(|c| injective_homomorphism(c, b)) {
            continue;
        }
        check.admissible += 1;
        if !k.strong_set(inst.a.universe(), b) {
            check.admissible_not_strong += 1;
        }
        let b_sharp = total_r(b)?;
        for f in &inst.maps {
            if let Some(g) = witness_in(&b_sharp, &sharp_maps(f))? {
                check.sharp_witnesses += 1;
                let reduct = m.reduct(&b_sharp, 0);
                let w = EppaWitness { b: reduct, extensions: g };
                let base = EppaInstance { constraint: DomainConstraint::Unrestricted, ..inst.clone() };
                if !witness_defects(k, &base, &w).is_empty() {
                    check.reduct_failures += 1;
                }
            }
        }
    }
    let id = PartialMap::new([(0, 0)]);
    if let Some(g) = witness_in(&a_sharp, std::slice::from_ref(&id))? {
        let w = EppaWitness { b: m.reduct(&a_sharp, 0), extensions: g };
        let base = EppaInstance { a: inst.a.clone(), maps: vec![id], constraint: DomainConstraint::Unrestricted };
        check.identity_control = witness_defects(k, &base, &w).is_empty();
    }
    check.holds = check.admissible_not_strong == 0
        && check.sharp_witnesses == 0
        && check.reduct_failures == 0
        && check.identity_control;
    Ok(check)
}

/// Whether some injective map sends every relation of `c` into `b`.
fn injective_homomorphism(c: &Structure, b: &Structure) -> bool {
    fn rec(c: &Structure, b: &Structure, order: &[Elem], map: &mut Vec<(Elem, Elem)>, used: &mut BTreeSet<Elem>) -> bool {
        let Some((&x, rest)) = order.split_first() else {
            return true;
        };
        for y in b.elems() {
            if used.contains(&y) {
                continue;
            }
            map.push((x, y));
            let ok = (0..c.signature().len()).all(|sym| {
                c.tuples(sym).iter().all(|t| {
                    let image: Option<Vec<Elem>> =
                        t.iter().map(|e| map.iter().find(|(s, _)| s == e).map(|(_, v)| *v)).collect();
                    image.is_none_or(|im| b.holds(sym, &im))
                })
            });
            if ok {
                used.insert(y);
                if rec(c, b, rest, map, used) {
                    return true;
                }
                used.remove(&y);
            }
            map.pop();
        }
        false
    }
    rec(c, b, &c.elems(), &mut Vec::new(), &mut BTreeSet::new())
}

/// A witness instance in the class of all graphs, for contrast.
pub fn graph_contrast(max_size: usize) -> Result<EppaOutcome> {
    let k = builtin_class("all_graphs", BuiltinParams::default())?;
    let (_, mut inst) = no_eppa_instance()?;
    inst.a = inst.a.with_signature(Arc::clone(&k.signature))?;
    eppa_search(&k, &inst, max_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn automorphisms_need_no_extension() {
        let k = builtin_class("all_graphs", BuiltinParams::default()).unwrap();
        let a = Structure::from_named(k.signature.clone(), [0, 1], &[("E", vec![vec![0, 1]])]).unwrap();
        let inst = EppaInstance { a: a.clone(), maps: vec![PartialMap::new([(0, 1), (1, 0)])], constraint: DomainConstraint::Strong };
        let w = eppa_search(&k, &inst, 4).unwrap().witness.unwrap();
        assert_eq!(w.b, a);
    }

    #[test]
    fn empty_map_is_witnessed_by_a() {
        let k = builtin_class("linear_orders", BuiltinParams::default()).unwrap();
        let a = Structure::from_named(k.signature.clone(), [0, 1], &[("<", vec![vec![0, 1]])]).unwrap();
        let inst = EppaInstance { a: a.clone(), maps: vec![PartialMap::new([])], constraint: DomainConstraint::Strong };
        assert_eq!(eppa_search(&k, &inst, 2).unwrap().witness.unwrap().b, a);
    }

    #[test]
    fn graphs_extend_the_crossing_map() {
        let out = graph_contrast(8).unwrap();
        let w = out.witness.unwrap();
        assert_eq!(w.b.size(), 4);
    }

    #[test]
    fn strong_constraint_rejects_non_strong_domains() {
        let (k, mut inst) = no_eppa_instance().unwrap();
        inst.constraint = DomainConstraint::Strong;
        assert!(eppa_search(&k, &inst, 4).is_err());
    }

    #[test]
    fn homomorphism_check() {
        let k = builtin_class("all_graphs", BuiltinParams::default()).unwrap();
        let edge = Structure::from_named(k.signature.clone(), [0, 1], &[("E", vec![vec![0, 1]])]).unwrap();
        let empty = Structure::discrete(k.signature.clone(), [0, 1, 2]);
        assert!(!injective_homomorphism(&edge, &empty));
        assert!(injective_homomorphism(&empty, &edge.with_elems([2])));
    }
}
