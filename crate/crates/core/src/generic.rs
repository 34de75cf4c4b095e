//! Stagewise approximations of generic limits and richness probes.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amalgam::{partial_injections, search_over};
use crate::classes::ClassSpec;
use crate::embed::{Embedding, Embeddings, Mode};
use crate::enumerate::extensions;
use crate::error::{input, Error, Result};
use crate::formula::{eval_formula, ExistentialFormula};
use crate::merge::MergeSpec;
use crate::structure::{subsets_up_to, Elem, Structure};

/// Ids of task points outside the stage start here, so tasks never collide
/// with stage elements.
pub const TASK_ID_BASE: Elem = 1 << 30;

/// A strong extension B of a strong subset A of some stage. A keeps its
/// stage ids; the other points of B use ids from [`TASK_ID_BASE`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionTask {
    pub a: Vec<Elem>,
    pub b: Structure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Growth {
    /// Disjoint amalgam of the stage and B over A.
    Disjoint,
    /// Amalgam identifying some points of B − A with stage points.
    Identified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Index of the stage the task was realized in.
    pub stage: usize,
    pub task: ExtensionTask,
    pub growth: Growth,
    /// Embedding of the task's B into the new stage, identity on A.
    pub witness: Embedding,
    /// Tasks found already realized while looking for this one.
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub class: String,
    pub size_cap: usize,
    pub stages: Vec<Structure>,
    pub log: Vec<StepRecord>,
    /// Set when growth stopped before the requested number of steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stopped: Option<String>,
}

impl Chain {
    pub fn last(&self) -> &Structure {
        self.stages.last().expect("a chain has at least one stage")
    }
}

/// Embedding of `b` into `stage` fixing `a` pointwise with strong image.
pub fn realization(k: &ClassSpec, stage: &Structure, a: &[Elem], b: &Structure) -> Result<Option<Embedding>> {
    let prefix: Embedding = a.iter().map(|&e| (e, e)).collect();
    for f in Embeddings::with_prefix(b, stage, Mode::Embedding, &prefix)? {
        let image: BTreeSet<Elem> = f.values().copied().collect();
        if k.strong_set(&image, stage) {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// Strong extensions of every strong A ⊆ `stage` with |A| < `size_cap`,
/// by at most `size_cap − |A|` points, up to isomorphism over A. Ordered by
/// (|A|, |B|, A, enumeration order). `include_trivial` adds B = A.
fn tasks_of(
    k: &ClassSpec,
    stage: &Structure,
    a_cap: usize,
    b_cap: usize,
    include_trivial: bool,
    skip: &dyn Fn(&BTreeSet<Elem>) -> bool,
) -> Result<Vec<ExtensionTask>> {
    let elems = stage.elems();
    let subs: Vec<BTreeSet<Elem>> =
        subsets_up_to(&elems, a_cap.min(b_cap)).into_iter().filter(|a| !skip(a)).collect();
    let per_a: Vec<Vec<ExtensionTask>> = subs
        .par_iter()
        .map(|a| -> Result<Vec<ExtensionTask>> {
            let base = stage.induced_unchecked(a);
            if !k.contains(&base) || !k.strong_set(a, stage) {
                return Ok(Vec::new());
            }
            let av: Vec<Elem> = a.iter().copied().collect();
            let mut out = Vec::new();
            if include_trivial {
                out.push(ExtensionTask { a: av.clone(), b: base.clone() });
            }
            for level in extensions(k, &base, b_cap - a.len(), TASK_ID_BASE)? {
                for b in level.into_iter().filter(|b| k.strong_set(a, b)) {
                    out.push(ExtensionTask { a: av.clone(), b });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut all: Vec<ExtensionTask> = per_a.into_iter().flatten().collect();
    all.sort_by_key(|t| (t.a.len(), t.b.size()));
    Ok(all)
}

/// Where growth starts and which elements it keeps returning to.
#[derive(Clone, Debug, Default)]
pub struct GrowthPlan {
    /// Stage 0; the empty structure when absent.
    pub seed: Option<Structure>,
    /// Elements of the seed whose tasks get a lane of their own: tasks with
    /// A ⊇ focus alternate with all other tasks, so both stay fair.
    pub focus: Vec<Elem>,
    /// Narrows the focus lane to A ⊆ focus ∪ region(stage), with the focus
    /// as parameters. Tasks are assigned to a lane when first enqueued.
    pub region: Option<ExistentialFormula>,
    /// Focus-lane steps per general step; 0 is read as 1.
    pub focus_weight: usize,
}

/// Grows a chain from the empty structure; see [`grow_generic_with`].
pub fn grow_generic(k: &ClassSpec, steps: usize, size_cap: usize, seed: Option<Structure>) -> Result<Chain> {
    grow_generic_with(k, steps, size_cap, &GrowthPlan { seed, ..GrowthPlan::default() })
}

/// Grows a chain by realizing extension tasks in FIFO order. Each step
/// takes the next unrealized task and amalgamates its B with the current
/// stage over A: disjointly when possible, otherwise with identifications.
/// New stages contain the old ones literally.
pub fn grow_generic_with(k: &ClassSpec, steps: usize, size_cap: usize, plan: &GrowthPlan) -> Result<Chain> {
    let seed = plan.seed.clone().unwrap_or_else(|| Structure::empty(k.signature.clone()));
    if !k.try_contains(&seed)? {
        return input("seed is not in the class");
    }
    if size_cap == 0 {
        return input("size cap must be positive");
    }
    if let Some(e) = plan.focus.iter().find(|e| !seed.contains_elem(**e)) {
        return input(format!("focus element {e} is not in the seed"));
    }
    let focus: BTreeSet<Elem> = plan.focus.iter().copied().collect();
    let mut chain =
        Chain { class: k.id.clone(), size_cap, stages: vec![seed.clone()], log: Vec::new(), stopped: None };
    let mut seen: BTreeSet<Vec<Elem>> = BTreeSet::new();
    // lanes[0] holds focus tasks, lanes[1] the rest.
    let mut lanes: [VecDeque<ExtensionTask>; 2] = [VecDeque::new(), VecDeque::new()];
    let enqueue = |stage: &Structure, lanes: &mut [VecDeque<ExtensionTask>; 2], seen: &mut BTreeSet<Vec<Elem>>| {
        let region = match &plan.region {
            Some(phi) => Some(eval_formula(stage, phi, &plan.focus)?),
            None => None,
        };
        let fresh = tasks_of(k, stage, size_cap - 1, size_cap, false, &|a| {
            seen.contains(&a.iter().copied().collect::<Vec<_>>())
        })?;
        for t in fresh {
            seen.insert(t.a.clone());
            let focused = !focus.is_empty()
                && focus.iter().all(|f| t.a.contains(f))
                && region.as_ref().is_none_or(|r| t.a.iter().all(|e| focus.contains(e) || r.contains(e)));
            let lane = if focused { 0 } else { 1 };
            lanes[lane].push_back(t);
        }
        Ok::<(), Error>(())
    };
    enqueue(&seed, &mut lanes, &mut seen)?;
    let cycle = plan.focus_weight.max(1) + 1;
    while chain.log.len() < steps {
        let stage = chain.last().clone();
        let mut skipped = 0;
        let mut grown = None;
        'search: for pass in 0..2 {
            let preferred = usize::from(chain.log.len() % cycle + 1 == cycle);
            let lane = (preferred + pass) % 2;
            while let Some(task) = lanes[lane].pop_front() {
                if realization(k, &stage, &task.a, &task.b)?.is_some() {
                    skipped += 1;
                    continue;
                }
                grown = Some((grow_once(k, &stage, &task)?, task));
                break 'search;
            }
        }
        let Some(((next, growth, witness), task)) = grown else {
            chain.stopped = Some("every task up to the size cap is realized".into());
            break;
        };
        debug_assert!(k.strong_set(stage.universe(), &next));
        chain.log.push(StepRecord { stage: chain.stages.len(), task, growth, witness, skipped });
        enqueue(&next, &mut lanes, &mut seen)?;
        chain.stages.push(next);
    }
    Ok(chain)
}

fn grow_once(k: &ClassSpec, stage: &Structure, task: &ExtensionTask) -> Result<(Structure, Growth, Embedding)> {
    let top = stage.max_elem().map_or(0, |m| m + 1);
    let a: BTreeSet<Elem> = task.a.iter().copied().collect();
    let b_new: Vec<Elem> = task.b.universe().difference(&a).copied().collect();
    let stage_new: Vec<Elem> = stage.universe().difference(&a).copied().collect();
    let attempt = |ident: &Embedding| -> Result<Option<(Structure, Growth, Embedding)>> {
        let mut next_id = top;
        let map: Embedding = task
            .b
            .elems()
            .into_iter()
            .map(|e| {
                let image = if a.contains(&e) {
                    e
                } else if let Some(&s) = ident.get(&e) {
                    s
                } else {
                    next_id += 1;
                    next_id - 1
                };
                (e, image)
            })
            .collect();
        let right = task.b.relabel(&map)?;
        let overlap: BTreeSet<Elem> = right.universe().intersection(stage.universe()).copied().collect();
        if stage.induced_unchecked(&overlap) != right.induced_unchecked(&overlap) {
            return Ok(None);
        }
        let (su, ru) = (stage.universe().clone(), right.universe().clone());
        let found = search_over(k, stage, &right, 0, &mut |d| k.strong_set(&su, d) && k.strong_set(&ru, d))?;
        let growth = if ident.is_empty() { Growth::Disjoint } else { Growth::Identified };
        Ok(found.map(|d| (d, growth, map)))
    };
    // The disjoint amalgam almost always exists; identifications are only
    // enumerated when it does not.
    if let Some(hit) = attempt(&Embedding::new())? {
        return Ok(hit);
    }
    for ident in partial_injections(&b_new, &stage_new).iter().filter(|i| !i.is_empty()) {
        if let Some(hit) = attempt(ident)? {
            return Ok(hit);
        }
    }
    Err(Error::Integrity(format!(
        "no amalgam of the stage with a {}-point extension of {:?}: amalgamation fails at this size",
        task.b.size(),
        task.a
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RichnessReport {
    pub class: String,
    pub a_cap: usize,
    pub b_cap: usize,
    pub stage_size: usize,
    pub instances: usize,
    pub realized: usize,
    pub fraction: f64,
    /// Up to ten unrealized instances, in enumeration order.
    pub unrealized: Vec<ExtensionTask>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl RichnessReport {
    pub fn complete(&self) -> bool {
        self.realized == self.instances
    }
}

/// For every strong A ⊆ `stage` with |A| ≤ `a_cap` and every strong B ⊇ A
/// with |B| ≤ `b_cap` (including B = A), whether B embeds over A with
/// strong image.
pub fn probe_richness(k: &ClassSpec, stage: &Structure, a_cap: usize, b_cap: usize) -> Result<RichnessReport> {
    probe_richness_over(k, stage, stage, a_cap, b_cap)
}

/// Tasks over `source` realized in `target`, where `source` ≤ `target`.
/// A later stage always realizes the tasks of an earlier one once growth
/// has reached them, even in classes such as linear orders where no stage
/// realizes its own tasks (an endpoint has nothing beyond it).
pub fn probe_richness_over(
    k: &ClassSpec,
    source: &Structure,
    target: &Structure,
    a_cap: usize,
    b_cap: usize,
) -> Result<RichnessReport> {
    if !source.is_induced_in(target) || !k.strong_set(source.universe(), target) {
        return input("the source stage is not strong in the target");
    }
    let tasks = tasks_of(k, source, a_cap, b_cap, true, &|_| false)?;
    let hits: Vec<bool> = tasks
        .par_iter()
        .map(|t| realization(k, target, &t.a, &t.b).map(|r| r.is_some()))
        .collect::<Result<_>>()?;
    let realized = hits.iter().filter(|h| **h).count();
    let unrealized = tasks.iter().zip(&hits).filter(|(_, h)| !**h).map(|(t, _)| t.clone()).take(10).collect();
    Ok(RichnessReport {
        class: k.id.clone(),
        a_cap,
        b_cap,
        stage_size: target.size(),
        instances: tasks.len(),
        realized,
        fraction: if tasks.is_empty() { 1.0 } else { realized as f64 / tasks.len() as f64 },
        unrealized,
        diagnostic: None,
    })
}

/// Richness of factor `i`'s reduct of the stage against factor `i`'s class.
pub fn probe_reduct_generic(m: &MergeSpec, stage: &Structure, i: usize, a_cap: usize, b_cap: usize) -> Result<RichnessReport> {
    if i >= m.factors().len() {
        return input(format!("merge has no factor {i}"));
    }
    probe_richness(&m.factors()[i].class, &m.reduct(stage, i), a_cap, b_cap)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefinableReport {
    pub formula: String,
    pub params: Vec<Elem>,
    /// C* = φ(stage, params).
    pub defined: Vec<Elem>,
    pub richness: RichnessReport,
    /// Every witness found lies in C* and has strong image in the reduct.
    pub witnesses_verified: bool,
}

/// Richness of factor `i` inside C* = φ(stage, params): instances and
/// witnesses range over C*'s induced factor-`i` structure.
pub fn probe_definable_reduct(
    m: &MergeSpec,
    stage: &Structure,
    i: usize,
    phi: &ExistentialFormula,
    params: &[Elem],
    a_cap: usize,
    b_cap: usize,
) -> Result<DefinableReport> {
    if i >= m.factors().len() {
        return input(format!("merge has no factor {i}"));
    }
    let defined = eval_formula(stage, phi, params)?;
    let k = &m.factors()[i].class;
    let inside = m.reduct(stage, i).induced_unchecked(&defined);
    let mut richness = probe_richness(k, &inside, a_cap, b_cap)?;
    if defined.len() < b_cap {
        richness.diagnostic = Some(format!("C* has {} elements, fewer than the b cap {b_cap}", defined.len()));
    }
    let tasks = tasks_of(k, &inside, a_cap, b_cap, true, &|_| false)?;
    let mut verified = true;
    for t in &tasks {
        if let Some(f) = realization(k, &inside, &t.a, &t.b)? {
            let image: BTreeSet<Elem> = f.values().copied().collect();
            verified &= image.is_subset(&defined) && k.strong_set(&image, &inside);
        }
    }
    Ok(DefinableReport {
        formula: phi.to_string(),
        params: params.to_vec(),
        defined: defined.into_iter().collect(),
        richness,
        witnesses_verified: verified,
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
    fn zero_steps_is_the_empty_chain() {
        let c = grow_generic(&class("all_graphs"), 0, 2, None).unwrap();
        assert_eq!(c.stages.len(), 1);
        assert!(c.last().is_empty());
    }

    #[test]
    fn empty_stage_realizes_only_the_empty_task() {
        let k = class("all_graphs");
        let r = probe_richness(&k, &Structure::empty(k.signature.clone()), 1, 2).unwrap();
        assert_eq!(r.realized, 1);
        assert!(r.instances > 1);
    }

    #[test]
    fn stages_extend_literally_and_strongly() {
        let k = class("one_local_no_edges_out");
        let c = grow_generic(&k, 6, 2, None).unwrap();
        for w in c.stages.windows(2) {
            assert!(w[0].is_induced_in(&w[1]));
            assert!(k.strong_set(w[0].universe(), &w[1]));
        }
    }
}
