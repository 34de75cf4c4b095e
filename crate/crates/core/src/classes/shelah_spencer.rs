//! Shelah–Spencer α-graphs: the predimension δ_α(A) = |A| − α·Σ N_R(A),
//! membership "δ ≥ 0 on every subset" and strong substructure "δ never
//! drops below δ(A) above A". All arithmetic is exact.

use std::collections::BTreeSet;

use num_rational::Ratio;

use super::ClassRules;
use crate::error::{input, Error, Result};
use crate::structure::{has_repeat, Elem, Shape, Structure};

pub const DEFAULT_SIZE_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimensionParams {
    pub alpha: Ratio<i64>,
}

impl DimensionParams {
    pub fn new(alpha: Ratio<i64>) -> Result<Self> {
        if alpha <= Ratio::from_integer(0) || alpha >= Ratio::from_integer(1) {
            return input(format!("alpha must lie strictly between 0 and 1, got {alpha}"));
        }
        Ok(DimensionParams { alpha })
    }

    pub fn from_pair(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return input("alpha has zero denominator");
        }
        Self::new(Ratio::new(p, q))
    }
}

/// Underlying sets of the relation instances, one bitmask per distinct set
/// and relation. Bits follow the universe order.
fn set_masks(s: &Structure) -> Vec<u64> {
    let index = |e: &Elem| s.universe().iter().position(|x| x == e).expect("element in universe");
    let mut out = Vec::new();
    for sym in 0..s.signature().len() {
        let mut masks: BTreeSet<u64> = BTreeSet::new();
        for t in s.tuples(sym) {
            masks.insert(t.iter().fold(0u64, |m, e| m | (1 << index(e))));
        }
        out.extend(masks);
    }
    out
}

fn count_inside(masks: &[u64], sub: u64) -> i64 {
    masks.iter().filter(|&&m| m & !sub == 0).count() as i64
}

fn mask_of(s: &Structure, a: &BTreeSet<Elem>) -> u64 {
    s.universe().iter().enumerate().filter(|(_, e)| a.contains(e)).fold(0, |m, (i, _)| m | (1 << i))
}

pub fn delta(a: &Structure, p: &DimensionParams) -> Ratio<i64> {
    let n = count_inside(&set_masks(a), u64::MAX);
    Ratio::from_integer(a.size() as i64) - p.alpha * Ratio::from_integer(n)
}

fn check_symmetric(a: &Structure) -> Result<()> {
    let sig = a.signature();
    for sym in 0..sig.len() {
        if sig.symbol(sym).shape == Shape::Set {
            continue;
        }
        for t in a.tuples(sym) {
            if has_repeat(t) {
                return input(format!("{} holds on {:?}, which repeats an element", sig.symbol(sym).name, t));
            }
            let mut perm = t.clone();
            perm.sort_unstable();
            loop {
                if !a.tuples(sym).contains(&perm) {
                    return input(format!("{} is not symmetric at {:?}", sig.symbol(sym).name, t));
                }
                if !next_permutation(&mut perm) {
                    break;
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn next_permutation(v: &mut [Elem]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn check_cap(size: usize) -> Result<()> {
    if size > DEFAULT_SIZE_CAP {
        return Err(Error::Cap(format!("predimension checks are capped at {DEFAULT_SIZE_CAP} elements, got {size}")));
    }
    Ok(())
}

/// Membership in K_α for an arbitrary structure; relations must be symmetric
/// and irreflexive.
pub fn shelah_spencer_contains(a: &Structure, p: &DimensionParams) -> Result<bool> {
    check_symmetric(a)?;
    check_cap(a.size())?;
    Ok(ShelahSpencer::new(*p).contains(a))
}

pub fn shelah_spencer_strong(a: &Structure, b: &Structure, p: &DimensionParams) -> Result<bool> {
    if !a.is_induced_in(b) {
        return input("first argument is not an induced substructure of the second");
    }
    check_symmetric(b)?;
    check_cap(b.size())?;
    Ok(ShelahSpencer::new(*p).strong(a.universe(), b))
}

/// Integer form of the predimension: with α = p/q, q·δ = q·|A| − p·N(A).
#[derive(Clone, Copy, Debug)]
pub struct ShelahSpencer {
    p: i64,
    q: i64,
}

impl ShelahSpencer {
    pub fn new(params: DimensionParams) -> Self {
        ShelahSpencer { p: *params.alpha.numer(), q: *params.alpha.denom() }
    }

    fn scaled(&self, masks: &[u64], sub: u64) -> i64 {
        self.q * sub.count_ones() as i64 - self.p * count_inside(masks, sub)
    }
}

impl ClassRules for ShelahSpencer {
    fn contains(&self, s: &Structure) -> bool {
        let n = s.size();
        assert!(n < 64, "predimension over {n} elements");
        let masks = set_masks(s);
        if self.scaled(&masks, (1u64 << n) - 1) < 0 {
            return false;
        }
        (0..(1u64 << n)).all(|sub| self.scaled(&masks, sub) >= 0)
    }

    fn strong(&self, a: &BTreeSet<Elem>, b: &Structure) -> bool {
        let n = b.size();
        assert!(n < 64, "predimension over {n} elements");
        let masks = set_masks(b);
        let base = mask_of(b, a);
        let floor = self.scaled(&masks, base);
        let rest = !base & ((1u64 << n) - 1);
        // Enumerate supersets of `base` as base | (submask of rest).
        let mut sub = rest;
        loop {
            if self.scaled(&masks, base | sub) < floor {
                return false;
            }
            if sub == 0 {
                return true;
            }
            sub = (sub - 1) & rest;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{sig, Structure};

    fn half() -> DimensionParams {
        DimensionParams::from_pair(1, 2).unwrap()
    }

    fn complete(n: u32) -> Structure {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push(vec![i, j]);
            }
        }
        Structure::from_named(sig::graph(), 0..n, &[("E", edges)]).unwrap()
    }

    #[test]
    fn delta_values() {
        let p = half();
        assert_eq!(delta(&Structure::empty(sig::graph()), &p), Ratio::from_integer(0));
        assert_eq!(delta(&Structure::discrete(sig::graph(), [0]), &p), Ratio::from_integer(1));
        assert_eq!(delta(&complete(3), &p), Ratio::new(3, 2));
    }

    #[test]
    fn delta_is_affine_in_alpha() {
        let t = complete(3);
        let values: Vec<_> = [(1, 3), (1, 2), (2, 3)]
            .iter()
            .map(|&(p, q)| delta(&t, &DimensionParams::from_pair(p, q).unwrap()))
            .collect();
        assert_eq!(values, vec![Ratio::from_integer(2), Ratio::new(3, 2), Ratio::from_integer(1)]);
    }

    #[test]
    fn membership() {
        let p = half();
        assert!(shelah_spencer_contains(&complete(3), &p).unwrap());
        assert!(!shelah_spencer_contains(&complete(6), &p).unwrap());
        assert!(shelah_spencer_contains(&Structure::empty(sig::graph()), &p).unwrap());
    }

    #[test]
    fn strong_boundary_cases() {
        let b = Structure::from_named(sig::graph(), 0..3, &[("E", vec![vec![0, 2], vec![1, 2]])]).unwrap();
        let a = b.induced(&[0, 1].into()).unwrap();
        assert!(shelah_spencer_strong(&a, &b, &half()).unwrap());
        let two_thirds = DimensionParams::from_pair(2, 3).unwrap();
        assert!(!shelah_spencer_strong(&a, &b, &two_thirds).unwrap());
        assert!(shelah_spencer_strong(&Structure::empty(sig::graph()), &b, &half()).unwrap());
    }

    #[test]
    fn non_symmetric_input_is_rejected() {
        let s = sig::single("R", 2, Shape::Injective, "L");
        let a = Structure::from_named(s, [0, 1], &[("R", vec![vec![0, 1]])]).unwrap();
        assert!(shelah_spencer_contains(&a, &half()).is_err());
    }

    #[test]
    fn alpha_range_is_checked() {
        assert!(DimensionParams::from_pair(1, 1).is_err());
        assert!(DimensionParams::from_pair(0, 3).is_err());
    }

    #[test]
    fn permutations_are_enumerated() {
        let mut v = vec![1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut v) {
            count += 1;
        }
        assert_eq!(count, 6);
    }
}
