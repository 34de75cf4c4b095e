//! Exchange format.
//!
//! A structure is a JSON object
//!
//! ```json
//! {
//!   "signature": [{"name": "E", "arity": 2, "language": "L", "shape": "set"}],
//!   "universe": [0, 1, 2],
//!   "relations": {"E": [[0, 1], [1, 2]]}
//! }
//! ```
//!
//! `shape` is one of `set`, `injective`, `any` and defaults to `any`.
//! Relations are keyed by symbol name, tuples listed in ascending order;
//! symbols without tuples may be omitted. Set-shaped tuples may be given in
//! any order and are stored sorted. Readers reject tuples that leave the
//! universe, have the wrong length, or that the shape does not admit.
//! Extended structures add a `"closures"` object mapping each point (as a
//! string key) to its sorted closure.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{input, Result};
use crate::structure::{Elem, Signature, Structure, Symbol, Tuple};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureDoc {
    pub signature: Vec<Symbol>,
    pub universe: Vec<Elem>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Tuple>>,
}

impl From<&Structure> for StructureDoc {
    fn from(s: &Structure) -> Self {
        let sig = s.signature();
        let relations = (0..sig.len())
            .map(|i| (sig.symbol(i).name.clone(), s.tuples(i).iter().cloned().collect()))
            .collect();
        StructureDoc { signature: sig.symbols().to_vec(), universe: s.elems(), relations }
    }
}

impl TryFrom<StructureDoc> for Structure {
    type Error = crate::error::Error;

    fn try_from(doc: StructureDoc) -> Result<Structure> {
        let sig = Arc::new(Signature::new(doc.signature)?);
        let mut seen = std::collections::BTreeSet::new();
        for e in &doc.universe {
            if !seen.insert(*e) {
                return input(format!("element {e} listed twice in the universe"));
            }
        }
        for name in doc.relations.keys() {
            if sig.index_of(name).is_none() {
                return input(format!("relation {name} is not in the signature"));
            }
        }
        let named: Vec<(&str, Vec<Tuple>)> = doc.relations.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
        Structure::from_named(sig, doc.universe, &named)
    }
}

impl Serialize for Structure {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        StructureDoc::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Structure {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let doc = StructureDoc::deserialize(de)?;
        Structure::try_from(doc).map_err(serde::de::Error::custom)
    }
}

pub fn to_json(s: &Structure) -> String {
    serde_json::to_string_pretty(s).expect("structures always serialize")
}

pub fn from_json(text: &str) -> Result<Structure> {
    let doc: StructureDoc = serde_json::from_str(text)?;
    Structure::try_from(doc)
}

pub fn read_structure(path: &Path) -> Result<Structure> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn write_structure(path: &Path, s: &Structure) -> Result<()> {
    std::fs::write(path, to_json(s) + "\n")?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// Graphviz rendering. Unary symbols label their points, binary symbols
/// are edges (undirected for Set shape), wider tuples hang off a small
/// box node per tuple. Write-only: the JSON file is the exchange format.
pub fn to_dot(s: &Structure, name: &str) -> String {
    let sig = s.signature();
    let mut labels: BTreeMap<Elem, Vec<String>> = s.elems().into_iter().map(|e| (e, vec![e.to_string()])).collect();
    let mut body = String::new();
    let mut boxes = 0;
    for i in 0..sig.len() {
        let sym = sig.symbol(i);
        for t in s.tuples(i) {
            match t.len() {
                1 => labels.entry(t[0]).or_default().push(sym.name.clone()),
                2 => {
                    let dir = if sym.shape == crate::structure::Shape::Set { ", dir=none" } else { "" };
                    body += &format!("  {} -> {} [label=\"{}\"{dir}];\n", t[0], t[1], sym.name);
                }
                _ => {
                    body += &format!("  t{boxes} [shape=box, width=0.1, height=0.1, label=\"{}\"];\n", sym.name);
                    for (pos, e) in t.iter().enumerate() {
                        body += &format!("  t{boxes} -> {e} [label=\"{pos}\"];\n");
                    }
                    boxes += 1;
                }
            }
        }
    }
    let mut out = format!("digraph \"{name}\" {{\n");
    for (e, l) in labels {
        out += &format!("  {e} [label=\"{}\"];\n", l.join("\\n"));
    }
    out + &body + "}\n"
}
