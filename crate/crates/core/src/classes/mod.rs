//! Smooth classes as pairs of decidable predicates.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::structure::{Elem, Signature, Structure};

pub mod builtins;
pub mod registry;
pub mod shelah_spencer;

pub use builtins::{builtin_class, complement_class};
pub use registry::Registry;
pub use shelah_spencer::{delta, shelah_spencer_contains, shelah_spencer_strong, DimensionParams};

/// Membership and strong substructure for one class.
///
/// `strong(a, b)` is only ever asked for `a ⊆ b.universe()` with `b` in the
/// class; the substructure on `a` is the induced one.
pub trait ClassRules: Send + Sync + fmt::Debug {
    fn contains(&self, s: &Structure) -> bool;
    fn strong(&self, a: &BTreeSet<Elem>, b: &Structure) -> bool;
}

/// Declared metadata. Declarations are claims, spot-checked by the
/// property checkers, never trusted as proofs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassFlags {
    pub closed_under_substructure: bool,
    pub one_local: bool,
    /// Strong substructure coincides with induced substructure.
    pub fraisse: bool,
    pub free_amalgamation: bool,
    pub disjoint_amalgamation: bool,
    pub disjoint_parallel_strongness: bool,
    pub smooth_intersections: bool,
}

#[derive(Clone)]
pub struct ClassSpec {
    pub id: String,
    pub signature: Arc<Signature>,
    pub rules: Arc<dyn ClassRules>,
    pub flags: ClassFlags,
    /// Size above which public membership queries are refused.
    pub size_cap: Option<usize>,
}

impl fmt::Debug for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassSpec").field("id", &self.id).field("flags", &self.flags).finish()
    }
}

impl ClassSpec {
    pub fn new(id: &str, signature: Arc<Signature>, rules: Arc<dyn ClassRules>, flags: ClassFlags) -> Self {
        ClassSpec { id: id.to_string(), signature, rules, flags, size_cap: None }
    }

    /// Membership; structures over an incompatible signature are not members.
    pub fn contains(&self, s: &Structure) -> bool {
        self.signature.compatible(s.signature()) && self.rules.contains(s)
    }

    /// Strong substructure on an element subset of `b`. Presumes `b` is a
    /// member.
    pub fn strong_set(&self, a: &BTreeSet<Elem>, b: &Structure) -> bool {
        if self.flags.fraisse {
            return true;
        }
        self.rules.strong(a, b)
    }

    /// Validated membership query.
    pub fn try_contains(&self, s: &Structure) -> Result<bool> {
        if !self.signature.compatible(s.signature()) {
            return input(format!("structure signature does not match class {}", self.id));
        }
        self.check_cap(s)?;
        Ok(self.rules.contains(s))
    }

    /// Validated strong-substructure query: `a` must be an induced
    /// substructure of `b` and both must be members.
    pub fn strong(&self, a: &Structure, b: &Structure) -> Result<bool> {
        if !a.is_induced_in(b) {
            return input("first argument is not an induced substructure of the second");
        }
        if !self.try_contains(b)? {
            return input(format!("structure is not in class {}", self.id));
        }
        Ok(self.strong_set(a.universe(), b))
    }

    fn check_cap(&self, s: &Structure) -> Result<()> {
        match self.size_cap {
            Some(cap) if s.size() > cap => {
                Err(Error::Cap(format!("class {} is capped at {cap} elements, got {}", self.id, s.size())))
            }
            _ => Ok(()),
        }
    }

    /// The same class read under a positionally compatible signature, e.g.
    /// with renamed symbols or a different language tag.
    pub fn with_signature(&self, signature: Arc<Signature>) -> Result<ClassSpec> {
        if !self.signature.compatible(&signature) {
            return input("signatures are not compatible");
        }
        Ok(ClassSpec { signature, ..self.clone() })
    }

    /// Renames symbols (positionally) keeping the class predicates.
    pub fn renamed(&self, names: &[&str]) -> Result<ClassSpec> {
        if names.len() != self.signature.len() {
            return input("wrong number of symbol names");
        }
        let symbols = self
            .signature
            .symbols()
            .iter()
            .zip(names)
            .map(|(s, n)| crate::structure::Symbol { name: n.to_string(), ..s.clone() })
            .collect();
        let mut out = self.with_signature(Arc::new(Signature::new(symbols)?))?;
        out.id = format!("{}[{}]", self.id, names.join(","));
        Ok(out)
    }
}
