//! Point-by-point structure completion and extension enumeration.
//!
//! New points are placed one at a time. For a new point `p`, the tuples
//! containing `p` are decided in rounds: first those whose only element is
//! `p`, then for each earlier element `q` (in placement order) the tuples
//! containing both `p` and `q` and otherwise only elements before `q`.
//! Within a round, free tuples are chosen by ascending bitmask, so the
//! "add nothing" branch always comes first. When the class is closed under
//! substructure, every round ends with a membership test of the induced
//! structure on the decided elements, which prunes dead branches early.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use crate::classes::ClassSpec;
use crate::embed::IsoSet;
use crate::error::{Error, Result};
use crate::structure::{normalize, Elem, Shape, Structure, Tuple};

/// Free tuples allowed in a single round before the search refuses.
pub const MAX_FREE_PER_ROUND: usize = 24;

/// All admissible tuples of the given shape and arity over `elems` that
/// contain every element of `must`, in lexicographic order.
pub fn tuples_over(shape: Shape, arity: usize, elems: &[Elem], must: &[Elem]) -> Vec<Tuple> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(arity);
    fn rec(
        shape: Shape,
        arity: usize,
        elems: &[Elem],
        must: &[Elem],
        cur: &mut Vec<Elem>,
        out: &mut Vec<Tuple>,
    ) {
        if cur.len() == arity {
            if must.iter().all(|m| cur.contains(m)) {
                out.push(cur.clone());
            }
            return;
        }
        let missing = must.iter().filter(|m| !cur.contains(m)).count();
        if missing > arity - cur.len() {
            return;
        }
        for &e in elems {
            match shape {
                Shape::Set => {
                    if cur.last().is_some_and(|&l| l >= e) {
                        continue;
                    }
                }
                Shape::Injective => {
                    if cur.contains(&e) {
                        continue;
                    }
                }
                Shape::Any => {}
            }
            cur.push(e);
            rec(shape, arity, elems, must, cur, out);
            cur.pop();
        }
    }
    let mut sorted = elems.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    rec(shape, arity, &sorted, must, &mut cur, &mut out);
    out
}

/// Decides a tuple before the search: `Some(b)` fixes it, `None` leaves it
/// free.
pub type Oracle<'a> = dyn Fn(usize, &[Elem]) -> Option<bool> + 'a;

pub struct Completion<'a> {
    pub class: &'a ClassSpec,
    pub oracle: Option<&'a Oracle<'a>>,
    /// Prune with membership tests on decided parts. Only sound for classes
    /// closed under substructure.
    pub prune: bool,
    /// Base elements decided against first, in this order. Putting the
    /// elements an oracle constrains up front lets pruning see conflicts
    /// before the free choices pile up.
    pub lead: Vec<Elem>,
}

impl<'a> Completion<'a> {
    pub fn new(class: &'a ClassSpec) -> Self {
        Completion { class, oracle: None, prune: class.flags.closed_under_substructure, lead: Vec::new() }
    }

    pub fn with_oracle(mut self, oracle: &'a Oracle<'a>) -> Self {
        self.oracle = Some(oracle);
        self
    }

    /// Calls `visit` on every completion of `base` by the points `new`, in
    /// search order, until `visit` breaks.
    pub fn run<B>(
        &self,
        base: &Structure,
        new: &[Elem],
        visit: &mut dyn FnMut(&Structure) -> ControlFlow<B>,
    ) -> Result<ControlFlow<B>> {
        let mut order: Vec<Elem> = self.lead.iter().copied().filter(|e| base.contains_elem(*e)).collect();
        order.extend(base.elems().into_iter().filter(|e| !self.lead.contains(e)));
        let mut s = base.clone();
        self.place(&mut s, &mut order, new, visit)
    }

    fn place<B>(
        &self,
        s: &mut Structure,
        order: &mut Vec<Elem>,
        new: &[Elem],
        visit: &mut dyn FnMut(&Structure) -> ControlFlow<B>,
    ) -> Result<ControlFlow<B>> {
        let Some((&p, rest)) = new.split_first() else {
            return Ok(visit(s));
        };
        s.add_elem(p);
        
        self.round(s, order, p, 0, rest, visit)
    }

    /// Round `j`: decide tuples containing `p` and `order[j - 1]` (or only
    /// `p` when `j == 0`).
    fn round<B>(
        &self,
        s: &mut Structure,
        order: &mut Vec<Elem>,
        p: Elem,
        j: usize,
        rest: &[Elem],
        visit: &mut dyn FnMut(&Structure) -> ControlFlow<B>,
    ) -> Result<ControlFlow<B>> {
        if j > order.len() {
            order.push(p);
            let r = self.place(s, order, rest, visit);
            order.pop();
            return r;
        }
        let (pool, must): (Vec<Elem>, Vec<Elem>) = if j == 0 {
            (vec![p], vec![p])
        } else {
            let mut pool = order[..j].to_vec();
            pool.push(p);
            (pool, vec![p, order[j - 1]])
        };
        let sig = s.signature().clone();
        let mut fixed: Vec<(usize, Tuple)> = Vec::new();
        let mut free: Vec<(usize, Tuple)> = Vec::new();
        for sym in 0..sig.len() {
            let symbol = sig.symbol(sym);
            for t in tuples_over(symbol.shape, symbol.arity, &pool, &must) {
                match self.oracle.and_then(|o| o(sym, &t)) {
                    Some(true) => fixed.push((sym, t)),
                    Some(false) => {}
                    None => free.push((sym, t)),
                }
            }
        }
        if free.len() > MAX_FREE_PER_ROUND {
            return Err(Error::Cap(format!(
                "{} free tuples in one placement round (limit {MAX_FREE_PER_ROUND})",
                free.len()
            )));
        }
        let decided: BTreeSet<Elem> = pool.iter().copied().collect();
        for mask in 0u64..(1u64 << free.len()) {
            let mut next = s.clone();
            for (sym, t) in &fixed {
                next.insert_raw(*sym, t.clone());
            }
            for (i, (sym, t)) in free.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    next.insert_raw(*sym, t.clone());
                }
            }
            if self.prune && !self.class.contains(&next.induced_unchecked(&decided)) {
                continue;
            }
            if let ControlFlow::Break(b) = self.round(&mut next, order, p, j + 1, rest, visit)? {
                return Ok(ControlFlow::Break(b));
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// Extensions of `base` by one more point per step (ids from `first_id`),
/// up to isomorphism fixing `base` pointwise. Each item holds the members
/// at that size; non-members are kept internally as seeds for later levels,
/// since classes need not be closed under substructure.
pub struct Levels<'a> {
    class: &'a ClassSpec,
    fixed: BTreeSet<Elem>,
    frontier: Vec<Structure>,
    next_id: Elem,
}

impl<'a> Levels<'a> {
    pub fn new(class: &'a ClassSpec, base: &Structure, first_id: Elem) -> Self {
        Levels { class, fixed: base.universe().clone(), frontier: vec![base.clone()], next_id: first_id }
    }
}

impl Iterator for Levels<'_> {
    type Item = Result<Vec<Structure>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.frontier.is_empty() {
            return None;
        }
        let p = self.next_id;
        self.next_id += 1;
        let completion = Completion::new(self.class);
        let mut set = IsoSet::new(self.fixed.clone());
        for rep in &self.frontier {
            let r = completion.run::<()>(rep, &[p], &mut |s| {
                set.insert(s.clone());
                ControlFlow::Continue(())
            });
            if let Err(e) = r {
                self.frontier.clear();
                return Some(Err(e));
            }
        }
        self.frontier = set.into_vec();
        Some(Ok(self.frontier.iter().filter(|s| self.class.contains(s)).cloned().collect()))
    }
}

/// Extensions of `base` by 1..=`extra` new points (ids from `first_id`),
/// members of the class, up to isomorphism fixing `base` pointwise.
/// Entry `k` holds the extensions by `k + 1` points.
pub fn extensions(class: &ClassSpec, base: &Structure, extra: usize, first_id: Elem) -> Result<Vec<Vec<Structure>>> {
    Levels::new(class, base, first_id).take(extra).collect()
}

/// Members of the class with at most `max_size` elements on universes
/// `0..n`, up to isomorphism, ordered by size.
pub fn structures_up_to(class: &ClassSpec, max_size: usize) -> Result<Vec<Structure>> {
    let empty = Structure::empty(class.signature.clone());
    let mut out = Vec::new();
    if class.contains(&empty) {
        out.push(empty.clone());
    }
    for level in extensions(class, &empty, max_size, 0)? {
        out.extend(level);
    }
    Ok(out)
}

/// First member completion of `base` by `new` points satisfying `accept`.
pub fn first_completion(
    class: &ClassSpec,
    base: &Structure,
    new: &[Elem],
    oracle: Option<&Oracle<'_>>,
    lead: &[Elem],
    accept: &mut dyn FnMut(&Structure) -> bool,
) -> Result<Option<Structure>> {
    let mut completion = Completion::new(class);
    completion.oracle = oracle;
    completion.lead = lead.to_vec();
    let r = completion.run(base, new, &mut |s| {
        if class.contains(s) && accept(s) {
            ControlFlow::Break(s.clone())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(match r {
        ControlFlow::Break(s) => Some(s),
        ControlFlow::Continue(()) => None,
    })
}

/// Whether `s` already follows the normal form of its shapes. Used in tests.
pub fn is_normalized(s: &Structure) -> bool {
    (0..s.signature().len()).all(|sym| {
        let shape = s.signature().symbol(sym).shape;
        s.tuples(sym).iter().all(|t| normalize(shape, t).as_ref() == Some(t))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::builtins::{builtin_class, BuiltinParams};

    fn class(name: &str) -> ClassSpec {
        builtin_class(name, BuiltinParams::default()).unwrap()
    }

    #[test]
    fn tuple_generation() {
        assert_eq!(tuples_over(Shape::Set, 2, &[0, 1, 2], &[2]), vec![vec![0, 2], vec![1, 2]]);
        assert_eq!(tuples_over(Shape::Injective, 2, &[0, 1], &[]).len(), 2);
        assert_eq!(tuples_over(Shape::Any, 2, &[0, 1], &[1]).len(), 3);
        assert_eq!(tuples_over(Shape::Set, 3, &[0, 1, 2, 3], &[]).len(), 4);
    }

    #[test]
    fn graph_counts_up_to_iso() {
        let g = class("all_graphs");
        let counts: Vec<usize> = (0..=4)
            .map(|n| structures_up_to(&g, 4).unwrap().iter().filter(|s| s.size() == n).count())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 11]);
    }

    #[test]
    fn orders_and_equivalences_up_to_iso() {
        let lo = class("linear_orders");
        let all = structures_up_to(&lo, 4).unwrap();
        assert_eq!(all.len(), 5);
        let eq = class("equivalence");
        let all = structures_up_to(&eq, 4).unwrap();
        // partitions of n up to isomorphism: 1, 1, 2, 3, 5
        assert_eq!(all.len(), 12);
        assert!(all.iter().all(is_normalized));
    }

    #[test]
    fn extensions_fix_the_base() {
        let g = class("all_graphs");
        let base = Structure::discrete(crate::structure::sig::graph(), [0, 1]);
        let levels = extensions(&g, &base, 1, 2).unwrap();
        // new point adjacent to none, to 0 or 1 (isomorphic over the base? no), both
        assert_eq!(levels[0].len(), 4);
    }
}
