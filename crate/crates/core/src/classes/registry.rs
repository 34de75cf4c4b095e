//! Name resolution for classes and merges, and the class-definition file.
//!
//! Class ids:
//!
//! - a built-in name, optionally with a parameter: `all_graphs`,
//!   `shelah_spencer:1/2`, `kn_free:4`, `tuple_equivalence:2`;
//! - short aliases such as `no_edges_out` or `ternary`;
//! - `complement(<id>)`;
//! - a merge `<id>*<id>*...`, whose factors get the tags `L1`, `L2`, ...;
//! - any name defined in a loaded class file.
//!
//! Class files hold blocks of `key = value;` pairs:
//!
//! ```text
//! # comment
//! class k12 { kind = shelah_spencer; alpha = 1/2; }
//! class star { kind = merge; factors = all_graphs, linear_orders; tags = G, O; }
//! class co { kind = complement; of = no_edges_out; }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::Ratio;

use super::builtins::{builtin_class, complement_class, BuiltinParams, BUILTIN_NAMES};
use super::ClassSpec;
use crate::error::{input, Error, Result};
use crate::merge::MergeSpec;

const ALIASES: &[(&str, &str)] = &[
    ("graphs", "all_graphs"),
    ("orders", "linear_orders"),
    ("initial_segments", "initial_segment_orders"),
    ("no_edges_out", "one_local_no_edges_out"),
    ("all_edges_in", "one_local_all_edges_in"),
    ("ternary", "one_local_ternary"),
    ("two_colors", "one_local_two_colors"),
    ("inert", "one_local_inert"),
    ("ss", "shelah_spencer"),
];

#[derive(Clone, Debug)]
pub enum Definition {
    Class(ClassSpec),
    Merge(MergeSpec),
}

#[derive(Clone, Debug, Default)]
pub struct Registry {
    defs: BTreeMap<String, Definition>,
}

fn parse_ratio(text: &str) -> Result<Ratio<i64>> {
    let (p, q) = text.split_once('/').unwrap_or((text, "1"));
    let p: i64 = p.trim().parse().map_err(|_| Error::Input(format!("bad rational {text}")))?;
    let q: i64 = q.trim().parse().map_err(|_| Error::Input(format!("bad rational {text}")))?;
    if q == 0 {
        return input(format!("bad rational {text}"));
    }
    Ok(Ratio::new(p, q))
}

/// Splits at `sep` outside parentheses.
fn split_top(text: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(text[start..].trim());
    out
}

fn canonical(name: &str) -> &str {
    ALIASES.iter().find(|(a, _)| *a == name).map_or(name, |(_, b)| b)
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn define(&mut self, name: &str, def: Definition) {
        self.defs.insert(name.to_string(), def);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.keys().map(String::as_str)
    }

    /// The class named by `id`; merges resolve to their merged class.
    pub fn resolve(&self, id: &str) -> Result<ClassSpec> {
        let id = id.trim();
        if split_top(id, '*').len() > 1 {
            return Ok(self.resolve_merge(id)?.merged_class());
        }
        match self.defs.get(id) {
            Some(Definition::Class(k)) => return Ok(k.clone()),
            Some(Definition::Merge(m)) => return Ok(m.merged_class()),
            None => {}
        }
        if let Some(inner) = id.strip_prefix("complement(").and_then(|r| r.strip_suffix(')')) {
            return Ok(complement_class(&self.resolve(inner)?));
        }
        let (name, param) = match id.split_once(':') {
            Some((n, p)) => (canonical(n), Some(p)),
            None => (canonical(id), None),
        };
        let mut params = BuiltinParams::default();
        if let Some(p) = param {
            if name == "shelah_spencer" {
                params.alpha = Some(parse_ratio(p)?);
            } else {
                params.n = Some(p.parse().map_err(|_| Error::Input(format!("bad parameter in {id}")))?);
            }
        }
        if !BUILTIN_NAMES.contains(&name) {
            return input(format!("unknown class id {id}"));
        }
        builtin_class(name, params)
    }

    /// A merge given as `a*b*...` or by a defined name.
    pub fn resolve_merge(&self, id: &str) -> Result<MergeSpec> {
        let id = id.trim();
        if let Some(Definition::Merge(m)) = self.defs.get(id) {
            return Ok(m.clone());
        }
        let parts = split_top(id, '*');
        if parts.len() < 2 {
            return input(format!("{id} is not a merge"));
        }
        let tags: Vec<String> = (1..=parts.len()).map(|i| format!("L{i}")).collect();
        let mut factors = Vec::new();
        for (p, tag) in parts.iter().zip(&tags) {
            factors.push((self.resolve(p)?, tag.as_str()));
        }
        MergeSpec::new(factors)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Parses a class file. Later definitions may refer to earlier ones.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reg = Registry::new();
        for block in parse_blocks(text)? {
            let def = reg.build(&block)?;
            reg.define(&block.name, def);
        }
        Ok(reg)
    }

    fn build(&self, block: &Block) -> Result<Definition> {
        let err = |msg: String| Error::Parse { line: block.line, col: block.col, msg };
        let get = |key: &str| block.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        for (k, _) in &block.fields {
            if !["kind", "alpha", "n", "of", "factors", "tags"].contains(&k.as_str()) {
                return Err(err(format!("unknown key {k} in class {}", block.name)));
            }
        }
        let kind = get("kind").ok_or_else(|| err(format!("class {} has no kind", block.name)))?;
        let mut spec = match kind {
            "merge" => {
                let factors = get("factors").ok_or_else(|| err("merge needs factors".into()))?;
                let ids = split_top(factors, ',');
                let tags: Vec<String> = match get("tags") {
                    Some(t) => t.split(',').map(|s| s.trim().to_string()).collect(),
                    None => (1..=ids.len()).map(|i| format!("L{i}")).collect(),
                };
                if tags.len() != ids.len() {
                    return Err(err("tags and factors differ in number".into()));
                }
                let mut parts = Vec::new();
                for (id, tag) in ids.iter().zip(&tags) {
                    parts.push((self.resolve(id)?, tag.as_str()));
                }
                return Ok(Definition::Merge(MergeSpec::new(parts)?));
            }
            "complement" => {
                let of = get("of").ok_or_else(|| err("complement needs of".into()))?;
                complement_class(&self.resolve(of)?)
            }
            name => {
                let name = canonical(name);
                if !BUILTIN_NAMES.contains(&name) {
                    return Err(err(format!("unknown kind {name}")));
                }
                let params = BuiltinParams {
                    alpha: get("alpha").map(parse_ratio).transpose()?,
                    n: get("n")
                        .map(|v| v.parse().map_err(|_| err(format!("bad n = {v}"))))
                        .transpose()?,
                };
                builtin_class(name, params)?
            }
        };
        spec.id = block.name.clone();
        Ok(Definition::Class(spec))
    }
}

struct Block {
    name: String,
    line: usize,
    col: usize,
    fields: Vec<(String, String)>,
}

struct Scanner<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Scanner<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_blank(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == '#' {
                while self.chars.peek().is_some_and(|&c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, col: self.col, msg: msg.into() }
    }

    fn word(&mut self) -> Result<String> {
        self.skip_blank();
        let mut out = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_alphanumeric() || c == '_' {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if out.is_empty() {
            return Err(self.error("expected a name"));
        }
        Ok(out)
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_blank();
        match self.bump() {
            Some(c) if c == want => Ok(()),
            Some(c) => Err(self.error(format!("expected '{want}', found '{c}'"))),
            None => Err(self.error(format!("expected '{want}', found end of input"))),
        }
    }

    fn value(&mut self) -> Result<String> {
        let mut out = String::new();
        loop {
            match self.chars.peek() {
                Some(';') => {
                    self.bump();
                    break;
                }
                Some('}') | Some('\n') | None => return Err(self.error("expected ';' after value")),
                Some(&c) => {
                    out.push(c);
                    self.bump();
                }
            }
        }
        let out = out.trim().to_string();
        if out.is_empty() {
            return Err(self.error("empty value"));
        }
        Ok(out)
    }
}

fn parse_blocks(text: &str) -> Result<Vec<Block>> {
    let mut sc = Scanner { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        sc.skip_blank();
        if sc.chars.peek().is_none() {
            return Ok(out);
        }
        let (line, col) = (sc.line, sc.col);
        let kw = sc.word()?;
        if kw != "class" {
            return Err(Error::Parse { line, col, msg: format!("expected 'class', found '{kw}'") });
        }
        let name = sc.word()?;
        if out.iter().any(|b: &Block| b.name == name) {
            return Err(Error::Parse { line, col, msg: format!("class {name} defined twice") });
        }
        sc.expect('{')?;
        let mut fields = Vec::new();
        loop {
            sc.skip_blank();
            if sc.chars.peek() == Some(&'}') {
                sc.bump();
                break;
            }
            let key = sc.word()?;
            sc.expect('=')?;
            let value = sc.value()?;
            fields.push((key, value));
        }
        out.push(Block { name, line, col, fields });
    }
}
