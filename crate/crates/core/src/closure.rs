//! Closures under smooth intersections, 1-locality, extended structures and
//! closure-preserving signature permutations.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::classes::ClassSpec;
use crate::embed::{Embeddings, Mode};
use crate::enumerate::structures_up_to;
use crate::error::{input, Error, Result};
use crate::perm::{apply_permutation, SignaturePermutation};
use crate::structure::{Elem, Structure};

/// Largest structure closures are computed on; subsets are enumerated.
pub const CLOSURE_SIZE_LIMIT: usize = 20;

/// Strong subsets of a structure as bitmasks over its sorted universe.
struct StrongTable {
    elems: Vec<Elem>,
    strong: Vec<bool>,
}

impl StrongTable {
    fn new(k: &ClassSpec, b: &Structure) -> Result<Self> {
        if b.size() > CLOSURE_SIZE_LIMIT {
            return Err(Error::Cap(format!("closures are computed on at most {CLOSURE_SIZE_LIMIT} elements")));
        }
        let elems = b.elems();
        let strong = (0..1usize << elems.len())
            .map(|mask| {
                let set = Self::set_of(&elems, mask);
                k.contains(&b.induced_unchecked(&set)) && k.strong_set(&set, b)
            })
            .collect();
        Ok(StrongTable { elems, strong })
    }

    fn set_of(elems: &[Elem], mask: usize) -> BTreeSet<Elem> {
        elems.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, e)| *e).collect()
    }

    fn mask_of(&self, set: &BTreeSet<Elem>) -> usize {
        self.elems.iter().enumerate().filter(|(_, e)| set.contains(e)).map(|(i, _)| 1 << i).sum()
    }

    /// Intersection of the strong supersets of `mask`.
    fn closure(&self, mask: usize) -> Result<usize> {
        let full = (1usize << self.elems.len()) - 1;
        let mut acc = full;
        for (s, &ok) in self.strong.iter().enumerate() {
            if ok && s & mask == mask {
                acc &= s;
            }
        }
        if !self.strong[acc] {
            return Err(Error::Integrity(format!(
                "intersection {:?} of strong supersets is not strong",
                Self::set_of(&self.elems, acc)
            )));
        }
        Ok(acc)
    }
}

/// cl_B(A): the smallest strong subset of `b` containing `a`.
pub fn closure_set(k: &ClassSpec, b: &Structure, a: &BTreeSet<Elem>) -> Result<BTreeSet<Elem>> {
    if !a.is_subset(b.universe()) {
        return input("closure argument is not inside the structure");
    }
    if !k.try_contains(b)? {
        return input(format!("structure is not in class {}", k.id));
    }
    let table = StrongTable::new(k, b)?;
    Ok(StrongTable::set_of(&table.elems, table.closure(table.mask_of(a))?))
}

/// cl_B(A) as an induced substructure.
pub fn closure(k: &ClassSpec, b: &Structure, a: &BTreeSet<Elem>) -> Result<Structure> {
    Ok(b.induced_unchecked(&closure_set(k, b, a)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct OneLocalFailure {
    pub b: Structure,
    /// "union" or "decomposition".
    pub kind: String,
    pub sets: Vec<Vec<Elem>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OneLocalReport {
    pub class: String,
    pub max_size: usize,
    pub structures: usize,
    pub union_holds: bool,
    pub decomposition_holds: bool,
    pub first_union_failure: Option<OneLocalFailure>,
    pub first_decomposition_failure: Option<OneLocalFailure>,
}

impl OneLocalReport {
    pub fn holds(&self) -> bool {
        self.union_holds && self.decomposition_holds
    }
}

/// Exhaustive check, over every member of size ≤ `n`, that unions of strong
/// subsets are strong and that closures decompose pointwise.
pub fn check_one_local(k: &ClassSpec, n: usize) -> Result<OneLocalReport> {
    let mut report = OneLocalReport {
        class: k.id.clone(),
        max_size: n,
        structures: 0,
        union_holds: true,
        decomposition_holds: true,
        first_union_failure: None,
        first_decomposition_failure: None,
    };
    for b in structures_up_to(k, n)? {
        report.structures += 1;
        let t = StrongTable::new(k, &b)?;
        let size = 1usize << t.elems.len();
        if report.union_holds {
            'outer: for x in (0..size).filter(|&x| t.strong[x]) {
                for y in (x + 1..size).filter(|&y| t.strong[y]) {
                    if !t.strong[x | y] {
                        report.union_holds = false;
                        report.first_union_failure = Some(OneLocalFailure {
                            b: b.clone(),
                            kind: "union".into(),
                            sets: vec![set_vec(&t, x), set_vec(&t, y)],
                        });
                        break 'outer;
                    }
                }
            }
        }
        if report.decomposition_holds {
            let points: Vec<usize> = (0..t.elems.len()).map(|i| t.closure(1 << i)).collect::<Result<_>>()?;
            for mask in 0..size {
                let pointwise = (0..t.elems.len()).filter(|i| mask & (1 << i) != 0).fold(0, |acc, i| acc | points[i]);
                let whole = t.closure(mask)?;
                if whole != pointwise {
                    report.decomposition_holds = false;
                    report.first_decomposition_failure = Some(OneLocalFailure {
                        b: b.clone(),
                        kind: "decomposition".into(),
                        sets: vec![set_vec(&t, mask), set_vec(&t, whole), set_vec(&t, pointwise)],
                    });
                    break;
                }
            }
        }
        if !report.union_holds && !report.decomposition_holds {
            break;
        }
    }
    Ok(report)
}

fn set_vec(t: &StrongTable, mask: usize) -> Vec<Elem> {
    StrongTable::set_of(&t.elems, mask).into_iter().collect()
}

/// A structure with each point's closure attached; the point lies on f_k
/// for k the closure's size. Plain data: validity relative to a class is
/// checked separately.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendedStructure {
    #[serde(flatten)]
    pub base: Structure,
    pub closures: BTreeMap<Elem, BTreeSet<Elem>>,
}

impl ExtendedStructure {
    /// The k with `a` in the domain of f_k.
    pub fn level(&self, a: Elem) -> Option<usize> {
        self.closures.get(&a).map(BTreeSet::len)
    }

    pub fn points(&self) -> &BTreeSet<Elem> {
        self.base.universe()
    }

    /// Every point has a closure inside the universe that contains it.
    pub fn validate(&self) -> Result<()> {
        if self.closures.keys().ne(self.base.universe().iter()) {
            return input("closure map must cover exactly the points");
        }
        for (a, cl) in &self.closures {
            if !cl.contains(a) || !cl.is_subset(self.base.universe()) {
                return input(format!("closure of {a} must contain it and stay inside the universe"));
            }
        }
        Ok(())
    }

    pub fn forget(&self) -> Structure {
        self.base.clone()
    }
}

/// A^F for a member A of a 1-local class.
pub fn to_extended(k: &ClassSpec, a: &Structure) -> Result<ExtendedStructure> {
    if !k.try_contains(a)? {
        return input(format!("structure is not in class {}", k.id));
    }
    let t = StrongTable::new(k, a)?;
    let closures = t
        .elems
        .iter()
        .enumerate()
        .map(|(i, &e)| Ok((e, StrongTable::set_of(&t.elems, t.closure(1 << i)?))))
        .collect::<Result<_>>()?;
    Ok(ExtendedStructure { base: a.clone(), closures })
}

/// Whether the identity on Af's points is an extended embedding into Bf:
/// relations agree and every f_k value is the same on both sides.
pub fn extended_substructure(af: &ExtendedStructure, bf: &ExtendedStructure) -> bool {
    af.base.is_induced_in(&bf.base) && af.closures.iter().all(|(a, cl)| bf.closures.get(a) == Some(cl))
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendedClaimReport {
    pub class: String,
    pub max_size: usize,
    pub pairs: usize,
    pub discrepancies: usize,
    pub first_discrepancy: Option<(Structure, Vec<Elem>)>,
}

/// Compares A^F ⪯ B^F with A ≤ B for every member B of size ≤ `n` and every
/// A ⊆ B in the class.
pub fn check_extended_claim(k: &ClassSpec, n: usize) -> Result<ExtendedClaimReport> {
    let mut report =
        ExtendedClaimReport { class: k.id.clone(), max_size: n, pairs: 0, discrepancies: 0, first_discrepancy: None };
    for b in structures_up_to(k, n)? {
        let bf = to_extended(k, &b)?;
        for a in crate::structure::subsets(&b.elems()) {
            let sub = b.induced_unchecked(&a);
            if !k.contains(&sub) {
                continue;
            }
            report.pairs += 1;
            let af = to_extended(k, &sub)?;
            if extended_substructure(&af, &bf) != k.strong_set(&a, &b) {
                report.discrepancies += 1;
                report.first_discrepancy.get_or_insert((b.clone(), a.into_iter().collect()));
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct PreservationFailure {
    pub a: Structure,
    pub gamma: SignaturePermutation,
    pub map: BTreeMap<Elem, Elem>,
    pub point: Elem,
}

#[derive(Clone, Debug, Serialize)]
pub struct PreservationReport {
    pub class: String,
    pub max_size: usize,
    /// Every permutation is the identity, where preservation is automatic.
    pub fast_path: bool,
    pub maps_checked: usize,
    pub holds: bool,
    pub counterexample: Option<PreservationFailure>,
}

/// Checks f[cl_A({d})] = cl_A({f(d)}) for every member A of size ≤ `n`,
/// every γ in `gammas` and every partial γ-permorphism f with strong domain
/// and range.
pub fn check_closure_preserving(k: &ClassSpec, gammas: &[SignaturePermutation], n: usize) -> Result<PreservationReport> {
    check_closure_preserving_with(k, gammas, n, true)
}

pub fn check_closure_preserving_with(
    k: &ClassSpec,
    gammas: &[SignaturePermutation],
    n: usize,
    fast_path: bool,
) -> Result<PreservationReport> {
    let mut report = PreservationReport {
        class: k.id.clone(),
        max_size: n,
        fast_path: false,
        maps_checked: 0,
        holds: true,
        counterexample: None,
    };
    if fast_path && gammas.iter().all(SignaturePermutation::is_identity) {
        report.fast_path = true;
        return Ok(report);
    }
    for a in structures_up_to(k, n)? {
        let t = StrongTable::new(k, &a)?;
        let cl: BTreeMap<Elem, BTreeSet<Elem>> = t
            .elems
            .iter()
            .enumerate()
            .map(|(i, &e)| Ok((e, StrongTable::set_of(&t.elems, t.closure(1 << i)?))))
            .collect::<Result<_>>()?;
        let strong: Vec<BTreeSet<Elem>> = (0..1usize << t.elems.len())
            .filter(|&m| t.strong[m])
            .map(|m| StrongTable::set_of(&t.elems, m))
            .collect();
        for gamma in gammas {
            // f is a γ-permorphism from A|D onto A|R iff it is an isomorphism
            // from A|D onto the γ⁻¹-retagged structure restricted to R.
            let twisted = apply_permutation(&a, &gamma.inverse())?;
            for d in &strong {
                let ad = a.induced_unchecked(d);
                for r in strong.iter().filter(|r| r.len() == d.len()) {
                    let tr = twisted.induced_unchecked(r);
                    for f in Embeddings::new(&ad, &tr, Mode::Isomorphism)? {
                        report.maps_checked += 1;
                        for &x in d {
                            let image: BTreeSet<Elem> = cl[&x].iter().map(|y| f[y]).collect();
                            if image != cl[&f[&x]] {
                                report.holds = false;
                                report.counterexample =
                                    Some(PreservationFailure { a, gamma: gamma.clone(), map: f, point: x });
                                return Ok(report);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}
