//! The worked scenarios behind `demo` and the acceptance target. Each run
//! is a deterministic function of the code: no clock or seed reaches a
//! report, except that scenario 1 fails when it overruns its time budget.

use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::{json, Value};

use crate::amalgam::{check_property, disjoint_amalgam_search, instance_families, verify_amalgam, AmalgamInstance, Property};
use crate::classes::builtins::{builtin_class, BuiltinParams};
use crate::closure::{check_extended_claim, check_one_local};
use crate::eppa::{graph_contrast, verify_no_eppa};
use crate::error::Result;
use crate::formula::parse_formula;
use crate::generic::{grow_generic, grow_generic_with, probe_definable_reduct, probe_richness, GrowthPlan};
use crate::merge::{merge_amalgam, MergeSpec};
use crate::minpair::{build_minpair_chain, find_minimal_pairs, is_minimal_pair};
use crate::perm::PartialMap;
use crate::ramsey::{ramsey_report, RamseyReport};
use crate::relanguage::{eppa_merge_pipeline, round_trip_check, verify_pipeline_witness};
use crate::structure::Elem;
use crate::{ClassSpec, Structure};

const ONE_LOCAL: [&str; 3] = ["one_local_no_edges_out", "one_local_all_edges_in", "one_local_ternary"];
const SHELAH_SPENCER_BUDGET: Duration = Duration::from_secs(60);

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub summary: String,
    /// The exact bounds the verdict was established under.
    pub bounds: Value,
    pub payload: Value,
}

pub struct Scenario {
    pub id: usize,
    pub name: &'static str,
    run: fn() -> Result<Outcome>,
}

struct Outcome {
    passed: bool,
    summary: String,
    bounds: Value,
    payload: Value,
}

pub const DETERMINISM: usize = 12;

pub fn scenarios() -> Vec<Scenario> {
    vec![
        Scenario { id: 1, name: "shelah-spencer-properties", run: shelah_spencer_properties },
        Scenario { id: 2, name: "merge-dap", run: merge_dap },
        Scenario { id: 3, name: "initial-segment-orders", run: initial_segment_orders },
        Scenario { id: 4, name: "extended-encoding", run: extended_encoding },
        Scenario { id: 5, name: "one-locality", run: one_locality },
        Scenario { id: 6, name: "no-eppa", run: no_eppa },
        Scenario { id: 7, name: "eppa-pipeline", run: eppa_pipeline },
        Scenario { id: 8, name: "minimal-pairs", run: minimal_pairs },
        Scenario { id: 9, name: "generic-richness", run: generic_richness },
        Scenario { id: 10, name: "definable-reduct", run: definable_reduct },
        Scenario { id: 11, name: "ramsey-sanity", run: ramsey_sanity },
        // Runs the others twice; handled by the suite.
        Scenario { id: DETERMINISM, name: "determinism", run: || unreachable!() },
    ]
}

/// Resolves a filter by id or name.
pub fn find(filter: &str) -> Option<Scenario> {
    scenarios().into_iter().find(|s| s.name == filter || s.id.to_string() == filter)
}

impl Scenario {
    pub fn run(&self) -> Result<ScenarioReport> {
        if self.id == DETERMINISM {
            return determinism(&scenarios().iter().filter(|s| s.id != DETERMINISM).collect::<Vec<_>>());
        }
        let o = (self.run)()?;
        Ok(ScenarioReport {
            id: self.id,
            name: self.name.to_string(),
            passed: o.passed,
            summary: o.summary,
            bounds: o.bounds,
            payload: o.payload,
        })
    }
}

/// Reruns `others` twice and compares the serialized reports byte for byte.
pub fn determinism(others: &[&Scenario]) -> Result<ScenarioReport> {
    let render = || -> Result<Vec<String>> {
        others.iter().map(|s| Ok(serde_json::to_string(&s.run()?)?)).collect()
    };
    let (first, second) = (render()?, render()?);
    let differing: Vec<usize> =
        others.iter().zip(first.iter().zip(&second)).filter(|(_, (a, b))| a != b).map(|(s, _)| s.id).collect();
    Ok(ScenarioReport {
        id: DETERMINISM,
        name: "determinism".into(),
        passed: differing.is_empty(),
        summary: format!("{} scenario reports rerun, {} differ", others.len(), differing.len()),
        bounds: json!({ "reruns": 2, "scenarios": others.iter().map(|s| s.id).collect::<Vec<_>>() }),
        payload: json!({ "differing": differing }),
    })
}

fn class(name: &str) -> Result<ClassSpec> {
    builtin_class(name, BuiltinParams::default())
}

fn alpha_half() -> Result<ClassSpec> {
    builtin_class("shelah_spencer", BuiltinParams { alpha: Some(num_rational::Ratio::new(1, 2)), n: None })
}

fn shelah_spencer_properties() -> Result<Outcome> {
    let k = alpha_half()?;
    let start = Instant::now();
    let reports = [Property::Fap, Property::Dps, Property::SmoothIntersections]
        .into_iter()
        .map(|p| check_property(&k, p, 4))
        .collect::<Result<Vec<_>>>()?;
    let in_budget = start.elapsed() <= SHELAH_SPENCER_BUDGET;
    let holds = reports.iter().all(|r| r.holds);
    let line: Vec<String> = reports.iter().map(|r| format!("{} {} ({})", r.property, verdict(r.holds), r.instances)).collect();
    Ok(Outcome {
        passed: holds && in_budget,
        summary: format!("{}: {}{}", k.id, line.join(", "), if in_budget { "" } else { "; over the time budget" }),
        bounds: json!({ "max_size": 4, "time_budget_s": SHELAH_SPENCER_BUDGET.as_secs() }),
        payload: serde_json::to_value(&reports)?,
    })
}

fn verdict(holds: bool) -> &'static str {
    if holds {
        "holds"
    } else {
        "fails"
    }
}

/// Merge amalgams on every strong instance up to `n`, each re-verified,
/// against a direct disjoint amalgam search in the merged class.
fn merge_dap_for(m: &MergeSpec, n: usize) -> Result<Value> {
    let merged = m.merged_class();
    let (mut instances, mut built, mut agree) = (0usize, 0usize, 0usize);
    for fam in instance_families(&merged, n)? {
        for (i, b) in fam.strong.iter().enumerate() {
            for c in &fam.strong[i..] {
                let inst = AmalgamInstance::inclusions(&fam.base, b, c)?;
                let cap = b.size() + c.size();
                let ours = merge_amalgam(m, &inst, cap)?;
                if let Some(am) = &ours {
                    verify_amalgam(&merged, &inst, &am.amalgam, true)?;
                    if m.contains(&am.amalgam.d)? {
                        built += 1;
                    }
                }
                let direct = disjoint_amalgam_search(&merged, &inst, cap)?;
                instances += 1;
                agree += usize::from(ours.is_some() == direct.is_some());
            }
        }
    }
    Ok(json!({ "merge": m.id(), "instances": instances, "built": built, "agree": agree }))
}

fn merge_dap() -> Result<Outcome> {
    let merges = [
        MergeSpec::new(vec![(class("all_graphs")?, "L1"), (class("linear_orders")?, "L2")])?,
        MergeSpec::new(vec![(alpha_half()?, "L1"), (class("equivalence")?, "L2")])?,
    ];
    let rows = merges.iter().map(|m| merge_dap_for(m, 3)).collect::<Result<Vec<_>>>()?;
    let passed = rows.iter().all(|r| r["instances"] == r["built"] && r["instances"] == r["agree"]);
    let line: Vec<String> =
        rows.iter().map(|r| format!("{}: {}/{} built, {} agree", r["merge"].as_str().unwrap_or_default(), r["built"], r["instances"], r["agree"])).collect();
    Ok(Outcome { passed, summary: line.join("; "), bounds: json!({ "max_size": 3 }), payload: json!(rows) })
}

fn initial_segment_orders() -> Result<Outcome> {
    let k = class("initial_segment_orders")?;
    let dap = check_property(&k, Property::Dap, 2)?;
    let ap = check_property(&k, Property::Ap, 3)?;
    Ok(Outcome {
        passed: !dap.holds && dap.counterexample.is_some() && ap.holds,
        summary: format!("dAP {} at 2, AP {} at 3 ({} instances)", verdict(dap.holds), verdict(ap.holds), ap.instances),
        bounds: json!({ "dap_max_size": 2, "ap_max_size": 3 }),
        payload: json!({ "dap": dap, "ap": ap }),
    })
}

fn extended_encoding() -> Result<Outcome> {
    let reports = ONE_LOCAL.iter().map(|n| check_extended_claim(&class(n)?, 5)).collect::<Result<Vec<_>>>()?;
    let pairs: usize = reports.iter().map(|r| r.pairs).sum();
    let bad: usize = reports.iter().map(|r| r.discrepancies).sum();
    Ok(Outcome {
        passed: bad == 0 && reports.iter().all(|r| r.pairs > 0),
        summary: format!("{pairs} pairs over three classes, {bad} discrepancies"),
        bounds: json!({ "max_size": 5 }),
        payload: serde_json::to_value(&reports)?,
    })
}

fn one_locality() -> Result<Outcome> {
    let local = ONE_LOCAL.iter().map(|n| check_one_local(&class(n)?, 5)).collect::<Result<Vec<_>>>()?;
    let half = check_one_local(&alpha_half()?, 4)?;
    let ok = local.iter().all(|r| r.decomposition_holds);
    let cex = half.first_decomposition_failure.is_some();
    Ok(Outcome {
        passed: ok && cex,
        summary: format!(
            "pointwise decomposition {} for the 1-local classes; {} counterexample for {}",
            verdict(ok),
            if cex { "found a" } else { "no" },
            half.class
        ),
        bounds: json!({ "one_local_max_size": 5, "shelah_spencer_max_size": 4 }),
        payload: json!({ "one_local": local, "shelah_spencer": half }),
    })
}

fn no_eppa() -> Result<Outcome> {
    let r = verify_no_eppa(6)?;
    let g = graph_contrast(8)?;
    let contrast = g.witness.as_ref().map(|w| w.b.size());
    Ok(Outcome {
        passed: r.holds && r.search.witness.is_none() && contrast.is_some_and(|n| n <= 8),
        summary: format!(
            "no witness among {} strong extensions, certificate {}; graphs: witness of size {}",
            r.certificate.strong_extensions,
            verdict(r.certificate.holds),
            contrast.map_or("none".into(), |n| n.to_string())
        ),
        bounds: json!({ "max_size": 6, "contrast_max_size": 8 }),
        payload: json!({ "no_edges_out": r, "all_graphs": g }),
    })
}

/// Tuple equivalence E_1 merged with the no-edges-out class; A₀ has the
/// classes {0, 1} and {2}.
pub fn pipeline_instance() -> Result<(MergeSpec, Structure, PartialMap)> {
    let e = builtin_class("tuple_equivalence", BuiltinParams { n: Some(1), alpha: None })?;
    let m = MergeSpec::new(vec![(e, "E"), (class("one_local_no_edges_out")?, "L2")])?;
    let a0 = Structure::from_named(m.signature().clone(), [0, 1, 2], &[("E_1", vec![vec![0, 1], vec![1, 0]])])?;
    Ok((m, a0, PartialMap::new([(0, 2)])))
}

fn eppa_pipeline() -> Result<Outcome> {
    let (m, a0, f) = pipeline_instance()?;
    let maps = [f];
    let r = eppa_merge_pipeline(&m, 0, &a0, &maps, 5)?;
    let defects = match &r.witness {
        Some(w) => verify_pipeline_witness(&m, 0, &a0, &maps, &w.b0, &w.extensions),
        None => vec!["no witness".into()],
    };
    let rt = round_trip_check(4)?;
    Ok(Outcome {
        passed: defects.is_empty() && rt.failures.is_empty(),
        summary: format!(
            "witness of size {}, {} defects; round trip on {} structures, {} failures",
            r.witness.as_ref().map_or(0, |w| w.b0.size()),
            defects.len(),
            rt.structures,
            rt.failures.len()
        ),
        bounds: json!({ "max_size": 5, "round_trip_max_size": 4 }),
        payload: json!({ "pipeline": r, "independent_defects": defects, "round_trip": rt }),
    })
}

fn minimal_pairs() -> Result<Outcome> {
    let k = alpha_half()?;
    let a = Structure::discrete(k.signature.clone(), [0, 1]);
    let pairs = find_minimal_pairs(&k, &a, 2)?;
    let pairs_ok = !pairs.is_empty() && pairs.iter().all(|p| is_minimal_pair(&k, &p.a, &p.b));
    let m = MergeSpec::new(vec![(alpha_half()?, "L1"), (alpha_half()?, "L2")])?;
    let a0 = Structure::discrete(m.signature().clone(), [0, 1]);
    let chain = build_minpair_chain(&m, &a0, 3, 2)?;
    let merged = m.merged_class();
    let steps_ok = chain.chain.windows(2).all(|w| is_minimal_pair(&merged, &w[0], &w[1]));
    Ok(Outcome {
        passed: pairs_ok && chain.complete(3) && steps_ok,
        summary: format!(
            "{} minimal pairs over a 2-point set; chain of length {}, steps re-verified: {}",
            pairs.len(),
            chain.chain.len().saturating_sub(1),
            steps_ok
        ),
        bounds: json!({ "extension_cap": 2, "chain_length": 3 }),
        payload: json!({ "pairs": pairs.len(), "first_pair": pairs.first(), "chain": chain }),
    })
}

fn generic_richness() -> Result<Outcome> {
    let k = class("all_graphs")?;
    let c = grow_generic(&k, 30, 2, None)?;
    let fractions = c.stages.iter().map(|s| Ok(probe_richness(&k, s, 1, 2)?.fraction)).collect::<Result<Vec<f64>>>()?;
    let monotone = fractions.windows(2).all(|w| w[0] <= w[1]);
    let first_full = fractions.iter().position(|&f| f == 1.0);
    Ok(Outcome {
        passed: monotone && first_full.is_some(),
        summary: format!(
            "{} stages, monotone: {monotone}, first fully rich stage: {}",
            c.stages.len(),
            first_full.map_or("none".into(), |i| i.to_string())
        ),
        bounds: json!({ "steps": 30, "size_cap": 2, "a_cap": 1, "b_cap": 2 }),
        payload: json!({ "fractions": fractions, "final_size": c.last().size() }),
    })
}

pub const CLASS_OF_M: &str = "(fn (x m) (E_eq x m))";

/// Growth aimed at tasks over m and its class: seed {m}, focus m, region
/// the E_eq-class of m.
pub fn class_of_m_plan(k: &ClassSpec) -> Result<GrowthPlan> {
    Ok(GrowthPlan {
        seed: Some(Structure::discrete(k.signature.clone(), [0])),
        focus: vec![0],
        region: Some(parse_formula(CLASS_OF_M, Some("L2"))?),
        focus_weight: 4,
    })
}

fn definable_reduct() -> Result<Outcome> {
    let m = MergeSpec::new(vec![(class("all_graphs")?, "L1"), (class("equivalence")?, "L2")])?;
    let k = m.merged_class();
    let c = grow_generic_with(&k, 60, 3, &class_of_m_plan(&k)?)?;
    let phi = parse_formula(CLASS_OF_M, Some("L2"))?;
    let params: [Elem; 1] = [0];
    let r = probe_definable_reduct(&m, c.last(), 0, &phi, &params, 1, 2)?;
    Ok(Outcome {
        passed: r.richness.complete() && r.witnesses_verified,
        summary: format!(
            "|C*| = {}, {}/{} tasks realized, witnesses verified: {}",
            r.defined.len(),
            r.richness.realized,
            r.richness.instances,
            r.witnesses_verified
        ),
        bounds: json!({ "steps": 60, "size_cap": 3, "focus_weight": 4, "a_cap": 1, "b_cap": 2 }),
        payload: serde_json::to_value(&r)?,
    })
}

fn chain(k: &ClassSpec, n: Elem) -> Result<Structure> {
    let lt: Vec<Vec<Elem>> = (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect();
    Structure::from_named(k.signature.clone(), 0..n, &[("<", lt)])
}

fn ramsey_sanity() -> Result<Outcome> {
    let lo = class("linear_orders")?;
    let pigeon = ramsey_report(&lo, &chain(&lo, 3)?, &chain(&lo, 2)?, &chain(&lo, 1)?, 20)?;
    let single = ramsey_report(&lo, &chain(&lo, 2)?, &chain(&lo, 2)?, &chain(&lo, 2)?, 20)?;
    let point = ramsey_report(&lo, &chain(&lo, 1)?, &chain(&lo, 1)?, &chain(&lo, 1)?, 20)?;
    let two = ramsey_report(&lo, &chain(&lo, 2)?, &chain(&lo, 2)?, &chain(&lo, 1)?, 20)?;
    let cases: [(&str, &RamseyReport, bool); 4] = [
        ("3-chain, 2-chain, point", &pigeon, true),
        ("single copy of a pair", &single, true),
        ("single copy of a point", &point, true),
        ("C = B with two points", &two, false),
    ];
    let passed = pigeon.colorings == 8 && cases.iter().all(|(_, r, want)| r.holds == *want);
    let line: Vec<String> =
        cases.iter().map(|(name, r, _)| format!("{name}: {} over {} colourings", r.holds, r.colorings)).collect();
    Ok(Outcome {
        passed,
        summary: line.join("; "),
        bounds: json!({ "color_cap": 20 }),
        payload: json!(cases.iter().map(|(name, r, _)| json!({ "case": name, "report": r })).collect::<Vec<_>>()),
    })
}
