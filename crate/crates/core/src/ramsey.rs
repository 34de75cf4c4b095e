//! Bounded structural Ramsey checks: 2-colourings of the strong copies of A
//! in a given C, against monochromatic strong copies of B.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::classes::builtins::{builtin_class, BuiltinParams};
use crate::classes::ClassSpec;
use crate::embed::are_isomorphic;
use crate::enumerate::structures_up_to;
use crate::error::{input, Error, Result};
use crate::merge::MergeSpec;
use crate::structure::{subsets, Elem, Structure};

pub const DEFAULT_COLOR_CAP: usize = 20;

/// Copies of `a` in `c`: images, not embeddings, so a non-rigid A counts
/// once per subset.
pub fn strong_copies(k: &ClassSpec, c: &Structure, a: &Structure) -> Vec<BTreeSet<Elem>> {
    let elems = c.elems();
    subsets(&elems)
        .filter(|s| s.len() == a.size())
        .filter(|s| k.strong_set(s, c) && are_isomorphic(&c.induced_unchecked(s), a))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RamseyReport {
    pub a_copies: Vec<BTreeSet<Elem>>,
    pub b_copies: Vec<BTreeSet<Elem>>,
    pub colorings: u64,
    pub holds: bool,
    /// Colour of each A-copy in the first colouring with no monochromatic
    /// B-copy.
    pub bad_coloring: Option<Vec<bool>>,
}

/// Whether every 2-colouring of the strong copies of A in C leaves some
/// strong copy of B with all its strong A-copies one colour. Refuses when C
/// has more than `color_cap` copies of A.
pub fn ramsey_report(k: &ClassSpec, c: &Structure, b: &Structure, a: &Structure, color_cap: usize) -> Result<RamseyReport> {
    for (name, s) in [("A", a), ("B", b), ("C", c)] {
        if !k.try_contains(s)? {
            return input(format!("{name} is not in class {}", k.id));
        }
    }
    let color_cap = color_cap.min(63);
    let a_copies = strong_copies(k, c, a);
    if a_copies.len() > color_cap {
        return Err(Error::Cap(format!(
            "C has {} strong copies of A; the colouring cap is {color_cap}",
            a_copies.len()
        )));
    }
    let b_copies = strong_copies(k, c, b);
    // A-copies strong in a B-copy are strong in C, so they are indexed.
    let masks: Vec<u64> = b_copies
        .iter()
        .map(|bc| {
            let inner = c.induced_unchecked(bc);
            strong_copies(k, &inner, a)
                .iter()
                .map(|s| 1u64 << a_copies.iter().position(|x| x == s).expect("strong in B, strong in C"))
                .fold(0, |m, bit| m | bit)
        })
        .collect();
    let colorings = 1u64 << a_copies.len();
    let bad = (0..colorings)
        .into_par_iter()
        .find_first(|x| !masks.iter().any(|m| x & m == 0 || x & m == *m));
    Ok(RamseyReport {
        bad_coloring: bad.map(|x| (0..a_copies.len()).map(|i| x >> i & 1 == 1).collect()),
        holds: bad.is_none(),
        a_copies,
        b_copies,
        colorings,
    })
}

pub fn ramsey_witness_check(k: &ClassSpec, c: &Structure, b: &Structure, a: &Structure, color_cap: usize) -> Result<bool> {
    Ok(ramsey_report(k, c, b, a, color_cap)?.holds)
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateOutcome {
    pub c: Structure,
    /// `None` when the candidate was refused at the colouring cap.
    pub holds: Option<bool>,
}

/// Runs the check on each supplied C. This gathers evidence only; the
/// quantifier over all C is unbounded.
pub fn check_candidates(
    k: &ClassSpec,
    candidates: &[Structure],
    b: &Structure,
    a: &Structure,
    color_cap: usize,
) -> Result<Vec<CandidateOutcome>> {
    candidates
        .iter()
        .map(|c| match ramsey_witness_check(k, c, b, a, color_cap) {
            Ok(h) => Ok(CandidateOutcome { c: c.clone(), holds: Some(h) }),
            Err(Error::Cap(_)) => Ok(CandidateOutcome { c: c.clone(), holds: None }),
            Err(e) => Err(e),
        })
        .collect()
}

/// Linear orders merged with equivalences. A is a pair in different
/// classes; B is x < y < z with x ~ z and y in another class. Colouring
/// each A-copy u < v by whether u's class has the smaller least element
/// gives x < y and y < z opposite colours in every B-copy, so no C works.
pub fn order_equivalence_seed() -> Result<(MergeSpec, Structure, Structure)> {
    let lo = builtin_class("linear_orders", BuiltinParams::default())?;
    let eq = builtin_class("equivalence", BuiltinParams::default())?;
    let m = MergeSpec::new(vec![(lo, "LO"), (eq, "EQ")])?;
    let sig = m.signature().clone();
    let a = Structure::from_named(sig.clone(), [0, 1], &[("<", vec![vec![0, 1]])])?;
    let b = Structure::from_named(
        sig,
        [0, 1, 2],
        &[("<", vec![vec![0, 1], vec![0, 2], vec![1, 2]]), ("E_eq", vec![vec![0, 2]])],
    )?;
    Ok((m, a, b))
}

#[derive(Clone, Debug, Serialize)]
pub struct SeedReport {
    pub max_size: usize,
    /// Candidates containing a copy of B.
    pub candidates: usize,
    pub holding: usize,
    pub refused: usize,
}

/// Every C of the merged class up to `max_size` that contains B, checked.
pub fn check_order_equivalence_seed(max_size: usize) -> Result<SeedReport> {
    let (m, a, b) = order_equivalence_seed()?;
    let k = m.merged_class();
    let cs: Vec<Structure> =
        structures_up_to(&k, max_size)?.into_iter().filter(|c| !strong_copies(&k, c, &b).is_empty()).collect();
    let out = check_candidates(&k, &cs, &b, &a, DEFAULT_COLOR_CAP)?;
    Ok(SeedReport {
        max_size,
        candidates: out.len(),
        holding: out.iter().filter(|o| o.holds == Some(true)).count(),
        refused: out.iter().filter(|o| o.holds.is_none()).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: u32) -> Structure {
        let k = builtin_class("linear_orders", BuiltinParams::default()).unwrap();
        let lt: Vec<Vec<Elem>> = (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect();
        Structure::from_named(k.signature.clone(), 0..n, &[("<", lt)]).unwrap()
    }

    fn lo() -> ClassSpec {
        builtin_class("linear_orders", BuiltinParams::default()).unwrap()
    }

    #[test]
    fn pigeonhole_on_three_points() {
        let r = ramsey_report(&lo(), &chain(3), &chain(2), &chain(1), 20).unwrap();
        assert_eq!(r.colorings, 8);
        assert!(r.holds);
    }

    #[test]
    fn two_points_do_not_force_a_pair() {
        let r = ramsey_report(&lo(), &chain(2), &chain(2), &chain(1), 20).unwrap();
        assert!(!r.holds);
        assert_eq!(r.bad_coloring.unwrap().len(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let e = ramsey_report(&lo(), &chain(6), &chain(3), &chain(2), 10);
        assert!(matches!(e, Err(Error::Cap(_))));
    }
}
