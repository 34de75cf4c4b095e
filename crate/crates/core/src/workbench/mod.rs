//! Experiment configs, dispatch to the library, and report emission.
//!
//! A report's serialized form depends only on the config and the input
//! files; wall-clock time is kept beside it, never inside it.

pub mod scenarios;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::amalgam::{amalgam_search, check_property_with, disjoint_amalgam_search, AmalgamInstance, Property};
use crate::classes::registry::Registry;
use crate::eppa::{eppa_search, no_eppa_instance, verify_no_eppa, EppaInstance};
use crate::error::{input, Error, Result};
use crate::formula::parse_formula;
use crate::generic::{
    grow_generic_with, probe_definable_reduct, probe_reduct_generic, probe_richness, GrowthPlan,
};
use crate::io::{read_json, read_structure, to_dot, write_structure};
use crate::merge::merge_amalgam;
use crate::minpair::build_minpair_chain;
use crate::ramsey::ramsey_report;
use crate::structure::Elem;
use crate::Structure;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Exchange-format JSON only.
    #[default]
    Json,
    /// JSON plus a Graphviz rendering of every emitted structure.
    Dot,
}

#[derive(Clone, Debug, Serialize, Deserialize, clap::Subcommand)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Operation {
    /// Bounded check of AP, dAP, fAP, dPS or smooth intersections.
    CheckClass {
        #[arg(long)]
        class: String,
        #[arg(long)]
        prop: Property,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        /// Extra witness points beyond |B| + |C| - |A|; defaults to |A|.
        #[arg(long)]
        #[serde(default)]
        padding: Option<usize>,
    },
    /// Amalgam search on an instance file (A, B, C, h1, h2).
    Amalgamate {
        #[arg(long)]
        class: String,
        #[arg(long)]
        instance: PathBuf,
        /// Largest amalgam searched.
        #[arg(long)]
        #[serde(default)]
        cap: Option<usize>,
        /// Allow identifications between B and C.
        #[arg(long)]
        #[serde(default)]
        identify: bool,
    },
    /// Merge amalgam of an instance, built from factor amalgams.
    Merge {
        /// A merge id such as `all_graphs*linear_orders`.
        #[arg(long)]
        merge: String,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        #[serde(default)]
        cap: Option<usize>,
    },
    /// Grows a strong chain towards the generic.
    Grow {
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 30)]
        steps: usize,
        /// Largest B in an extension task.
        #[arg(long, default_value_t = 2)]
        cap: usize,
        #[arg(long)]
        #[serde(default)]
        seed: Option<PathBuf>,
        /// Seed elements whose tasks get their own lane.
        #[arg(long, value_delimiter = ',')]
        #[serde(default)]
        focus: Vec<Elem>,
        /// Existential formula narrowing the focus lane.
        #[arg(long)]
        #[serde(default)]
        region: Option<String>,
        /// Language tag resolving the region's symbol names.
        #[arg(long)]
        #[serde(default)]
        tag: Option<String>,
        #[arg(long, default_value_t = 1)]
        #[serde(default)]
        focus_weight: usize,
    },
    /// Richness of a stage or of a factor reduct, optionally cut down by a formula.
    Probe {
        #[arg(long)]
        class: String,
        #[arg(long)]
        stage: PathBuf,
        #[arg(long, default_value_t = 1)]
        a_cap: usize,
        #[arg(long, default_value_t = 2)]
        b_cap: usize,
        /// Factor of a merge whose reduct is probed.
        #[arg(long)]
        #[serde(default)]
        factor: Option<usize>,
        /// Restricts the reduct to the set this formula defines.
        #[arg(long)]
        #[serde(default)]
        formula: Option<String>,
        #[arg(long)]
        #[serde(default)]
        tag: Option<String>,
        #[arg(long, value_delimiter = ',')]
        #[serde(default)]
        params: Vec<Elem>,
    },
    /// EPPA witness search on an instance file (A, maps).
    Eppa {
        #[arg(long)]
        class: String,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
    },
    /// Alternating chain of minimal pairs in a two-factor merge.
    MinpairChain {
        #[arg(long)]
        merge: String,
        /// A₀; two isolated points when absent.
        #[arg(long)]
        #[serde(default)]
        start: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        length: usize,
        /// Extension cap for each minimal pair.
        #[arg(long, default_value_t = 2)]
        cap: usize,
    },
    /// Every 2-colouring of the A-copies in C against monochromatic B-copies.
    RamseyCheck {
        #[arg(long)]
        class: String,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        c: PathBuf,
        /// Most A-copies coloured.
        #[arg(long, default_value_t = crate::ramsey::DEFAULT_COLOR_CAP)]
        cap: usize,
    },
    /// The worked scenarios, or one of them by id or name.
    Demo {
        #[arg(long)]
        #[serde(default)]
        scenario: Option<String>,
    },
}

impl Operation {
    pub fn name(&self) -> &'static str {
        match self {
            Operation::CheckClass { .. } => "check-class",
            Operation::Amalgamate { .. } => "amalgamate",
            Operation::Merge { .. } => "merge",
            Operation::Grow { .. } => "grow",
            Operation::Probe { .. } => "probe",
            Operation::Eppa { .. } => "eppa",
            Operation::MinpairChain { .. } => "minpair-chain",
            Operation::RamseyCheck { .. } => "ramsey-check",
            Operation::Demo { .. } => "demo",
        }
    }

    fn inputs(&self) -> Vec<&Path> {
        match self {
            Operation::Amalgamate { instance, .. } | Operation::Merge { instance, .. } | Operation::Eppa { instance, .. } => {
                vec![instance]
            }
            Operation::Grow { seed, .. } => seed.iter().map(PathBuf::as_path).collect(),
            Operation::Probe { stage, .. } => vec![stage],
            Operation::MinpairChain { start, .. } => start.iter().map(PathBuf::as_path).collect(),
            Operation::RamseyCheck { a, b, c, .. } => vec![a, b, c],
            Operation::CheckClass { .. } | Operation::Demo { .. } => Vec::new(),
        }
    }

    fn check_caps(&self) -> Result<()> {
        let positive = |what: &str, v: usize| if v == 0 { input(format!("{what} must be positive")) } else { Ok(()) };
        match self {
            Operation::CheckClass { max_size, .. } | Operation::Eppa { max_size, .. } => positive("--max-size", *max_size),
            Operation::Amalgamate { cap: Some(c), .. } | Operation::Merge { cap: Some(c), .. } => positive("--cap", *c),
            Operation::Grow { cap, .. } | Operation::MinpairChain { cap, .. } | Operation::RamseyCheck { cap, .. } => {
                positive("--cap", *cap)
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Class-definition file; its names resolve alongside the built-ins.
    #[serde(default)]
    pub classes: Option<PathBuf>,
    /// Directory for reports and emitted structures.
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    pub operation: Operation,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub operation: String,
    /// SHA-256 over the operation and the contents of every input file.
    pub inputs_digest: String,
    pub verdict: String,
    /// The exact bounds the verdict was established under.
    pub bounds: Value,
    pub payload: Value,
    /// Emitted exchange-format files, relative to the output directory.
    pub files: Vec<String>,
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl Report {
    pub fn summary(&self) -> String {
        format!("{}: {} {}", self.operation, self.verdict, self.bounds)
    }
}

/// Structures queued for emission, written only when an output directory
/// is configured.
struct Emitter<'a> {
    out: Option<&'a Path>,
    format: Format,
    files: Vec<String>,
}

impl Emitter<'_> {
    fn emit(&mut self, name: &str, s: &Structure) -> Result<()> {
        let Some(dir) = self.out else { return Ok(()) };
        let file = format!("{name}.json");
        write_structure(&dir.join(&file), s)?;
        if self.format == Format::Dot {
            fs::write(dir.join(format!("{name}.dot")), to_dot(s, name))?;
        }
        self.files.push(file);
        Ok(())
    }
}

fn digest(op: &Operation, registry_text: Option<&str>) -> Result<String> {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(op)?);
    if let Some(t) = registry_text {
        h.update(t.as_bytes());
    }
    for p in op.inputs() {
        h.update(fs::read(p)?);
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

fn verdict(holds: bool, yes: &str, no: &str) -> String {
    (if holds { yes } else { no }).to_string()
}

/// Runs one config. Reports are written to `out` when set; the caller
/// decides what to print.
pub fn run(config: &ExperimentConfig) -> Result<Vec<Report>> {
    let op = &config.operation;
    op.check_caps()?;
    let registry_text = config.classes.as_deref().map(fs::read_to_string).transpose()?;
    let registry = match &registry_text {
        Some(t) => Registry::parse(t)?,
        None => Registry::new(),
    };
    if let Some(dir) = &config.out {
        fs::create_dir_all(dir)?;
    }
    let inputs_digest = digest(op, registry_text.as_deref())?;
    let mut em = Emitter { out: config.out.as_deref(), format: config.format, files: Vec::new() };
    let start = Instant::now();
    let reports = match op {
        Operation::Demo { scenario } => demo(scenario.as_deref(), &inputs_digest)?,
        _ => {
            let (verdict, bounds, payload) = dispatch(op, &registry, &mut em)?;
            vec![Report {
                operation: op.name().to_string(),
                inputs_digest,
                verdict,
                bounds,
                payload,
                files: em.files,
                wall_clock: start.elapsed(),
            }]
        }
    };
    if let Some(dir) = &config.out {
        write_reports(dir, &reports)?;
    }
    Ok(reports)
}

/// `reports.jsonl` holds one report per line; `timing.jsonl` holds the
/// wall-clock times, line for line.
pub fn write_reports(dir: &Path, reports: &[Report]) -> Result<()> {
    let mut body = String::new();
    let mut timing = String::new();
    for r in reports {
        body += &serde_json::to_string(r)?;
        body.push('\n');
        timing += &serde_json::to_string(&json!({ "operation": r.operation, "wall_clock_ms": r.wall_clock.as_millis() as u64 }))?;
        timing.push('\n');
    }
    fs::write(dir.join("reports.jsonl"), body)?;
    fs::write(dir.join("timing.jsonl"), timing)?;
    Ok(())
}

/// One report per scenario, in id order.
pub fn demo(filter: Option<&str>, inputs_digest: &str) -> Result<Vec<Report>> {
    let chosen = match filter {
        Some(f) => vec![scenarios::find(f).ok_or_else(|| Error::Input(format!("unknown scenario {f}")))?],
        None => scenarios::scenarios(),
    };
    let mut out = Vec::new();
    for s in &chosen {
        let start = Instant::now();
        let r = s.run()?;
        out.push(Report {
            operation: format!("demo:{}", r.name),
            inputs_digest: inputs_digest.to_string(),
            verdict: verdict(r.passed, "pass", "fail"),
            bounds: r.bounds.clone(),
            payload: json!({ "id": r.id, "summary": r.summary, "detail": r.payload }),
            files: Vec::new(),
            wall_clock: start.elapsed(),
        });
    }
    Ok(out)
}

fn dispatch(op: &Operation, reg: &Registry, em: &mut Emitter) -> Result<(String, Value, Value)> {
    Ok(match op {
        Operation::CheckClass { class, prop, max_size, padding } => {
            let k = reg.resolve(class)?;
            let r = check_property_with(&k, *prop, *max_size, *padding)?;
            if let Some(c) = &r.counterexample {
                em.emit("counterexample_a", &c.a)?;
                em.emit("counterexample_b", &c.b)?;
                em.emit("counterexample_c", &c.c)?;
            }
            let bounds = json!({ "max_size": max_size, "padding": padding, "instances": r.instances });
            (verdict(r.holds, "holds", "fails"), bounds, serde_json::to_value(&r)?)
        }
        Operation::Amalgamate { class, instance, cap, identify } => {
            let k = reg.resolve(class)?;
            let inst: AmalgamInstance = read_json(instance)?;
            inst.check_strong(&k)?;
            let cap = cap.unwrap_or(inst.b.size() + inst.c.size());
            let am = if *identify { amalgam_search(&k, &inst, cap)? } else { disjoint_amalgam_search(&k, &inst, cap)? };
            if let Some(am) = &am {
                em.emit("amalgam", &am.d)?;
            }
            let bounds = json!({ "cap": cap, "disjoint": !identify });
            (verdict(am.is_some(), "found", "none"), bounds, json!({ "amalgam": am }))
        }
        Operation::Merge { merge, instance, cap } => {
            let m = reg.resolve_merge(merge)?;
            let inst: AmalgamInstance = read_json(instance)?;
            let cap = cap.unwrap_or(inst.b.size() + inst.c.size());
            let am = merge_amalgam(&m, &inst, cap)?;
            if let Some(am) = &am {
                em.emit("merge_amalgam", &am.amalgam.d)?;
                for (i, d) in am.factor_amalgams.iter().enumerate() {
                    em.emit(&format!("factor_{i}_amalgam"), d)?;
                }
            }
            let payload = json!({
                "merge": m.id(),
                "amalgam": am.as_ref().map(|a| &a.amalgam),
                "size": am.as_ref().map(|a| a.size),
                "alignments": am.as_ref().map(|a| &a.alignments),
            });
            (verdict(am.is_some(), "found", "none"), json!({ "cap": cap }), payload)
        }
        Operation::Grow { class, steps, cap, seed, focus, region, tag, focus_weight } => {
            let k = reg.resolve(class)?;
            let plan = GrowthPlan {
                seed: seed.as_deref().map(read_structure).transpose()?,
                focus: focus.clone(),
                region: region.as_deref().map(|r| parse_formula(r, tag.as_deref())).transpose()?,
                focus_weight: *focus_weight,
            };
            let c = grow_generic_with(&k, *steps, *cap, &plan)?;
            for (i, s) in c.stages.iter().enumerate() {
                em.emit(&format!("stage_{i:03}"), s)?;
            }
            let rich = probe_richness(&k, c.last(), 1, 2)?;
            let bounds = json!({ "steps": steps, "size_cap": cap, "probe": [1, 2] });
            let payload = json!({
                "stages": c.stages.len(),
                "final_size": c.last().size(),
                "stopped": c.stopped,
                "log": c.log,
                "final_stage": c.last(),
                "final_richness": rich,
            });
            (verdict(rich.complete(), "rich", "partial"), bounds, payload)
        }
        Operation::Probe { class, stage, a_cap, b_cap, factor, formula, tag, params } => {
            let s = read_structure(stage)?;
            let bounds = json!({ "a_cap": a_cap, "b_cap": b_cap, "factor": factor, "formula": formula });
            match (factor, formula) {
                (None, None) => {
                    let r = probe_richness(&reg.resolve(class)?, &s, *a_cap, *b_cap)?;
                    (verdict(r.complete(), "rich", "partial"), bounds, serde_json::to_value(&r)?)
                }
                (Some(i), None) => {
                    let r = probe_reduct_generic(&reg.resolve_merge(class)?, &s, *i, *a_cap, *b_cap)?;
                    (verdict(r.complete(), "rich", "partial"), bounds, serde_json::to_value(&r)?)
                }
                (i, Some(f)) => {
                    let phi = parse_formula(f, tag.as_deref())?;
                    let m = reg.resolve_merge(class)?;
                    let r = probe_definable_reduct(&m, &s, i.unwrap_or(0), &phi, params, *a_cap, *b_cap)?;
                    let ok = r.richness.complete() && r.witnesses_verified;
                    (verdict(ok, "rich", "partial"), bounds, serde_json::to_value(&r)?)
                }
            }
        }
        Operation::Eppa { class, instance, max_size } => {
            let k = reg.resolve(class)?;
            let inst: EppaInstance = read_json(instance)?;
            inst.validate(&k)?;
            let out = eppa_search(&k, &inst, *max_size)?;
            if let Some(w) = &out.witness {
                em.emit("eppa_witness", &w.b)?;
            }
            // The no-edges-out scenario gets its structural certificate.
            let (fixed_k, fixed) = no_eppa_instance()?;
            let certificate = (out.witness.is_none()
                && k.id == fixed_k.id
                && inst.a == fixed.a
                && inst.maps == fixed.maps
                && inst.constraint == fixed.constraint)
                .then(|| verify_no_eppa(*max_size))
                .transpose()?;
            let payload = json!({ "search": out, "certificate": certificate.map(|c| json!({
                "certificate": c.certificate,
                "restriction": c.restriction,
                "holds": c.holds,
            })) });
            (verdict(out.witness.is_some(), "witness", "none"), json!({ "max_size": max_size }), payload)
        }
        Operation::MinpairChain { merge, start, length, cap } => {
            let m = reg.resolve_merge(merge)?;
            let a0 = match start {
                Some(p) => read_structure(p)?,
                None => Structure::discrete(m.signature().clone(), [0, 1]),
            };
            let c = build_minpair_chain(&m, &a0, *length, *cap)?;
            for (i, s) in c.chain.iter().enumerate() {
                em.emit(&format!("chain_{i}"), s)?;
            }
            let bounds = json!({ "length": length, "extension_cap": cap });
            (verdict(c.complete(*length), "complete", "short"), bounds, serde_json::to_value(&c)?)
        }
        Operation::RamseyCheck { class, a, b, c, cap } => {
            let k = reg.resolve(class)?;
            let (a, b, c) = (read_structure(a)?, read_structure(b)?, read_structure(c)?);
            let r = ramsey_report(&k, &c, &b, &a, *cap)?;
            let bounds = json!({ "color_cap": cap, "colorings": r.colorings });
            (verdict(r.holds, "holds", "fails"), bounds, serde_json::to_value(&r)?)
        }
        Operation::Demo { .. } => unreachable!("handled by run"),
    })
}
