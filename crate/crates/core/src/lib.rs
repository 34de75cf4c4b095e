//! Smooth classes of finite relational structures at desk scale.
//!
//! Every property checker here is a bounded exhaustive search. A report
//! saying a property holds means it holds up to the stated bound.

pub mod amalgam;
pub mod classes;
pub mod closure;
pub mod embed;
pub mod eppa;
pub mod enumerate;
pub mod error;
pub mod formula;
pub mod generic;
pub mod io;
pub mod merge;
pub mod minpair;
pub mod perm;
pub mod ramsey;
pub mod relanguage;
pub mod structure;
pub mod workbench;

pub use classes::{ClassFlags, ClassRules, ClassSpec};
pub use error::{Error, Result};
pub use structure::{Elem, Shape, Signature, Structure, Symbol, Tuple};
