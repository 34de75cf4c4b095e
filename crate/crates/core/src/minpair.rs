//! Minimal pairs, the many-minimal-pairs condition, and alternating chains
//! of minimal pairs in a two-factor merge.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::classes::ClassSpec;
use crate::enumerate::{Completion, Levels};
use crate::error::{input, Result};
use crate::merge::MergeSpec;
use crate::structure::{subsets, Elem, Structure};

/// (A, B) with A ≤ B′ for every A ⊆ B′ ⊊ B but A ≰ B.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalPair {
    pub a: Structure,
    pub b: Structure,
}

/// The minimal-pair predicate, checked over every intermediate set.
pub fn is_minimal_pair(k: &ClassSpec, a: &Structure, b: &Structure) -> bool {
    if !a.is_induced_in(b) || a.size() == b.size() || !k.contains(b) || k.strong_set(a.universe(), b) {
        return false;
    }
    let rest: Vec<Elem> = b.universe().difference(a.universe()).copied().collect();
    let all_strong = subsets(&rest).filter(|extra| extra.len() < rest.len()).all(|extra| {
        let mid: BTreeSet<Elem> = a.universe().union(&extra).copied().collect();
        let mid = b.induced_unchecked(&mid);
        k.contains(&mid) && k.strong_set(a.universe(), &mid)
    });
    all_strong
}

fn fresh_id(a: &Structure) -> Elem {
    a.max_elem().map_or(0, |m| m + 1)
}

/// Minimal pairs over `a` adding at most `extension_cap` points, up to
/// isomorphism over `a`, smallest first.
pub fn find_minimal_pairs(k: &ClassSpec, a: &Structure, extension_cap: usize) -> Result<Vec<MinimalPair>> {
    let mut out = Vec::new();
    if k.flags.fraisse {
        return Ok(out);
    }
    for level in Levels::new(k, a, fresh_id(a)).take(extension_cap) {
        for b in level? {
            if is_minimal_pair(k, a, &b) {
                out.push(MinimalPair { a: a.clone(), b });
            }
        }
    }
    Ok(out)
}

/// First minimal pair over `a` within the cap. Labelled completions are
/// scanned without isomorphism reduction so the search can stop early.
pub fn first_minimal_pair(k: &ClassSpec, a: &Structure, extension_cap: usize) -> Result<Option<MinimalPair>> {
    if k.flags.fraisse {
        return Ok(None);
    }
    let first = fresh_id(a);
    for extra in 1..=extension_cap {
        let new: Vec<Elem> = (0..extra as Elem).map(|i| first + i).collect();
        let r = Completion::new(k).run(a, &new, &mut |b| {
            if is_minimal_pair(k, a, b) {
                ControlFlow::Break(b.clone())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        if let ControlFlow::Break(b) = r {
            return Ok(Some(MinimalPair { a: a.clone(), b }));
        }
    }
    Ok(None)
}

/// Bounded check of the many-minimal-pairs condition with threshold `m`:
/// for every A with m ≤ |A| ≤ `a_max` and every 1 ≤ n ≤ `n_max` there is
/// A′ ≥ A with |A′| = |A| + n carrying a minimal pair of at most
/// `pair_cap` extra points.
#[derive(Clone, Debug, Serialize)]
pub struct ManyMinimalPairsReport {
    pub class: String,
    pub m: usize,
    pub a_max: usize,
    pub n_max: usize,
    pub pair_cap: usize,
    pub instances: usize,
    pub holds: bool,
    /// First (A, n) without a witness.
    pub failure: Option<(Structure, usize)>,
}

pub fn check_many_minimal_pairs(
    k: &ClassSpec,
    m: usize,
    a_max: usize,
    n_max: usize,
    pair_cap: usize,
) -> Result<ManyMinimalPairsReport> {
    let mut report = ManyMinimalPairsReport {
        class: k.id.clone(),
        m,
        a_max,
        n_max,
        pair_cap,
        instances: 0,
        holds: true,
        failure: None,
    };
    for a in crate::enumerate::structures_up_to(k, a_max)?.into_iter().filter(|a| a.size() >= m) {
        for (i, level) in Levels::new(k, &a, fresh_id(&a)).take(n_max).enumerate() {
            report.instances += 1;
            let mut found = false;
            for grown in level?.iter().filter(|g| k.strong_set(a.universe(), g)) {
                if first_minimal_pair(k, grown, pair_cap)?.is_some() {
                    found = true;
                    break;
                }
            }
            if !found {
                report.holds = false;
                report.failure = Some((a, i + 1));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// One step of an alternating chain.
#[derive(Clone, Debug, Serialize)]
pub struct ChainStep {
    /// Factor whose reduct forms the minimal pair at this step.
    pub factor: usize,
    pub added: Vec<Elem>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinpairChain {
    pub chain: Vec<Structure>,
    pub steps: Vec<ChainStep>,
    /// Why the chain stopped short, if it did.
    pub diagnostic: Option<String>,
}

impl MinpairChain {
    pub fn complete(&self, length: usize) -> bool {
        self.chain.len() == length + 1 && self.diagnostic.is_none()
    }
}

/// Alternating chain A₀ ⊆ A₁ ⊆ … of ≤*-minimal pairs. Step i (from 0) uses
/// factor ℓ = i mod 2: extend the ℓ-reduct to an ℓ-minimal pair Y, then on
/// the same universe find an other-factor reduct Z with the current
/// other-reduct strong in Z and, unless this is the last step, some minimal
/// pair over Z within the cap. The merged step is re-verified as a minimal
/// pair of the merged class before it is accepted.
pub fn build_minpair_chain(m: &MergeSpec, a0: &Structure, length: usize, cap: usize) -> Result<MinpairChain> {
    if m.factors().len() != 2 {
        return input("alternating chains need exactly two factors");
    }
    if !m.contains(a0)? {
        return input("A0 is not in the merged class");
    }
    let merged = m.merged_class();
    let mut out = MinpairChain { chain: vec![a0.clone()], steps: Vec::new(), diagnostic: None };
    for step in 0..length {
        let l = step % 2;
        let o = 1 - l;
        let (kl, ko) = (&m.factors()[l].class, &m.factors()[o].class);
        let cur = out.chain.last().expect("chain starts with A0").clone();
        let cur_l = m.reduct(&cur, l);
        let cur_o = m.reduct(&cur, o);
        let last = step + 1 == length;
        let mut next = None;
        for pair in find_minimal_pairs(kl, &cur_l, cap)? {
            let new: Vec<Elem> = pair.b.universe().difference(cur.universe()).copied().collect();
            let z = crate::enumerate::first_completion(ko, &cur_o, &new, None, &[], &mut |z| {
                ko.strong_set(cur_o.universe(), z) && (last || matches!(first_minimal_pair(ko, z, cap), Ok(Some(_))))
            })?;
            let Some(z) = z else { continue };
            let parts = if l == 0 { [pair.b.clone(), z] } else { [z, pair.b.clone()] };
            let candidate = m.assemble(&parts)?;
            if is_minimal_pair(&merged, &cur, &candidate) {
                next = Some((candidate, new));
                break;
            }
        }
        match next {
            Some((s, added)) => {
                out.chain.push(s);
                out.steps.push(ChainStep { factor: l, added });
            }
            None => {
                out.diagnostic = Some(format!(
                    "step {}: no {}-minimal pair over the current stage with a matching {} reduct within {cap} extra points",
                    step + 1,
                    m.factors()[l].tag,
                    m.factors()[o].tag
                ));
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::builtins::{builtin_class, BuiltinParams};
    use crate::structure::sig;
    use num_rational::Ratio;

    fn half() -> ClassSpec {
        builtin_class("shelah_spencer", BuiltinParams { alpha: Some(Ratio::new(1, 2)), n: None }).unwrap()
    }

    fn class(name: &str) -> ClassSpec {
        builtin_class(name, BuiltinParams::default()).unwrap()
    }

    #[test]
    fn fraisse_classes_have_no_minimal_pairs() {
        let k = class("all_graphs");
        let a = Structure::discrete(sig::graph(), [0, 1]);
        assert!(find_minimal_pairs(&k, &a, 2).unwrap().is_empty());
    }

    #[test]
    fn edge_in_is_minimal_for_no_edges_out() {
        let k = class("one_local_no_edges_out");
        let a = Structure::discrete(sig::graph(), [0]);
        let pairs = find_minimal_pairs(&k, &a, 1).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!(pairs[0].b.holds_named("E", &[0, 1]));
    }

    #[test]
    fn half_graphs_need_two_points_over_an_isolated_pair() {
        let k = half();
        let a = Structure::discrete(sig::graph(), [0, 1]);
        let pairs = find_minimal_pairs(&k, &a, 2).unwrap();
        assert!(!pairs.is_empty());
        for p in &pairs {
            assert_eq!(p.b.size(), 4);
            assert_eq!(p.b.tuple_count(), 5);
        }
    }

    #[test]
    fn length_zero_chain_is_the_seed() {
        let m = MergeSpec::new(vec![(half(), "L1"), (half(), "L2")]).unwrap();
        let a0 = Structure::discrete(m.signature().clone(), [0, 1]);
        let c = build_minpair_chain(&m, &a0, 0, 2).unwrap();
        assert_eq!(c.chain, vec![a0]);
        assert!(c.complete(0));
    }

    #[test]
    fn fraisse_factor_fails_at_step_one() {
        let m = MergeSpec::new(vec![(class("all_graphs"), "L1"), (half(), "L2")]).unwrap();
        let a0 = Structure::discrete(m.signature().clone(), [0, 1]);
        let c = build_minpair_chain(&m, &a0, 2, 2).unwrap();
        assert_eq!(c.chain.len(), 1);
        assert!(c.diagnostic.unwrap().starts_with("step 1"));
    }
}
