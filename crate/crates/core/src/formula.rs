//! Existential formulas in prefix notation and their evaluation.
//!
//! Grammar (whitespace separated, `;` starts a comment to end of line):
//!
//! ```text
//! formula := "(" "fn" "(" var var* ")" body ")"
//! body    := "true" | "false"
//!          | "(" "exists" "(" var+ ")" body ")"
//!          | "(" "and" body* ")" | "(" "or" body* ")" | "(" "not" body ")"
//!          | "(" "=" var var ")" | "(" SYMBOL var* ")"
//! ```
//!
//! The first variable after `fn` is the output variable x; the remaining
//! ones are parameters, bound positionally at evaluation. `exists` may only
//! occur under an even number of `not`s, so every formula is equivalent to
//! an existential one. Negated atoms are allowed; sets they define are
//! relative to the stage they are evaluated in.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::structure::{Elem, Structure};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Formula {
    True,
    False,
    Atom(String, Vec<String>),
    Eq(String, String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Vec<String>, Box<Formula>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExistentialFormula {
    /// Output variable followed by parameters.
    pub free: Vec<String>,
    pub body: Formula,
    /// When set, atoms must use symbols of this language tag.
    pub tag: Option<String>,
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, items: &[Formula]| {
            write!(f, "({head}")?;
            for i in items {
                write!(f, " {i}")?;
            }
            write!(f, ")")
        };
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(r, vs) if vs.is_empty() => write!(f, "({r})"),
            Formula::Atom(r, vs) => write!(f, "({r} {})", vs.join(" ")),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Not(x) => write!(f, "(not {x})"),
            Formula::And(xs) => list(f, "and", xs),
            Formula::Or(xs) => list(f, "or", xs),
            Formula::Exists(vs, x) => write!(f, "(exists ({}) {x})", vs.join(" ")),
        }
    }
}

impl fmt::Display for ExistentialFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(fn ({}) {})", self.free.join(" "), self.body)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Sexp {
    Atom(String, usize, usize),
    List(Vec<Sexp>, usize, usize),
}

impl Sexp {
    fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom(_, l, c) | Sexp::List(_, l, c) => (*l, *c),
        }
    }
}

fn err<T>(pos: (usize, usize), msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line: pos.0, col: pos.1, msg: msg.into() })
}

fn read_sexps(text: &str) -> Result<Vec<Sexp>> {
    let mut stack: Vec<(Vec<Sexp>, usize, usize)> = vec![(Vec::new(), 1, 1)];
    let mut token = String::new();
    let mut token_pos = (1, 1);
    let flush = |token: &mut String, pos: (usize, usize), stack: &mut Vec<(Vec<Sexp>, usize, usize)>| {
        if !token.is_empty() {
            stack.last_mut().expect("root frame").0.push(Sexp::Atom(std::mem::take(token), pos.0, pos.1));
        }
    };
    for (ln, line) in text.lines().enumerate() {
        let line = line.split(';').next().unwrap_or("");
        for (cn, ch) in line.chars().enumerate() {
            let pos = (ln + 1, cn + 1);
            match ch {
                '(' => {
                    flush(&mut token, token_pos, &mut stack);
                    stack.push((Vec::new(), pos.0, pos.1));
                }
                ')' => {
                    flush(&mut token, token_pos, &mut stack);
                    if stack.len() == 1 {
                        return err(pos, "unbalanced ')'");
                    }
                    let (items, l, c) = stack.pop().expect("checked depth");
                    stack.last_mut().expect("root frame").0.push(Sexp::List(items, l, c));
                }
                c if c.is_whitespace() => flush(&mut token, token_pos, &mut stack),
                c => {
                    if token.is_empty() {
                        token_pos = pos;
                    }
                    token.push(c);
                }
            }
        }
        flush(&mut token, token_pos, &mut stack);
    }
    if stack.len() != 1 {
        let (_, l, c) = stack.last().expect("nonempty");
        return err((*l, *c), "unclosed '('");
    }
    Ok(stack.pop().expect("root").0)
}

fn var_list(s: &Sexp) -> Result<Vec<String>> {
    match s {
        Sexp::List(items, ..) => items
            .iter()
            .map(|i| match i {
                Sexp::Atom(v, ..) if is_var(v) => Ok(v.clone()),
                other => err(other.pos(), "expected a variable"),
            })
            .collect(),
        Sexp::Atom(..) => err(s.pos(), "expected a variable list"),
    }
}

fn is_var(v: &str) -> bool {
    v.chars().next().is_some_and(|c| c.is_ascii_lowercase()) && v.chars().all(|c| c.is_alphanumeric() || c == '_')
}

fn body(s: &Sexp, positive: bool, bound: &mut Vec<String>) -> Result<Formula> {
    let check = |v: &Sexp, bound: &Vec<String>| -> Result<String> {
        match v {
            Sexp::Atom(name, ..) if bound.contains(name) => Ok(name.clone()),
            Sexp::Atom(name, ..) => err(v.pos(), format!("unbound variable {name}")),
            Sexp::List(..) => err(v.pos(), "expected a variable"),
        }
    };
    match s {
        Sexp::Atom(a, ..) if a == "true" => Ok(Formula::True),
        Sexp::Atom(a, ..) if a == "false" => Ok(Formula::False),
        Sexp::Atom(a, ..) => err(s.pos(), format!("unexpected atom {a}")),
        Sexp::List(items, ..) => {
            let Some(Sexp::Atom(head, ..)) = items.first() else {
                return err(s.pos(), "expected a connective or relation symbol");
            };
            let args = &items[1..];
            match head.as_str() {
                "exists" => {
                    if !positive {
                        return err(s.pos(), "exists under negation makes the formula non-existential");
                    }
                    if args.len() != 2 {
                        return err(s.pos(), "exists takes a variable list and a body");
                    }
                    let vars = var_list(&args[0])?;
                    if vars.is_empty() {
                        return err(args[0].pos(), "exists binds at least one variable");
                    }
                    let depth = bound.len();
                    bound.extend(vars.iter().cloned());
                    let inner = body(&args[1], positive, bound);
                    bound.truncate(depth);
                    Ok(Formula::Exists(vars, Box::new(inner?)))
                }
                "forall" => err(s.pos(), "universal quantifiers are not allowed"),
                "and" | "or" => {
                    let parts = args.iter().map(|a| body(a, positive, bound)).collect::<Result<Vec<_>>>()?;
                    Ok(if head == "and" { Formula::And(parts) } else { Formula::Or(parts) })
                }
                "not" => {
                    if args.len() != 1 {
                        return err(s.pos(), "not takes one argument");
                    }
                    Ok(Formula::Not(Box::new(body(&args[0], !positive, bound)?)))
                }
                "=" => {
                    if args.len() != 2 {
                        return err(s.pos(), "= takes two variables");
                    }
                    Ok(Formula::Eq(check(&args[0], bound)?, check(&args[1], bound)?))
                }
                sym => {
                    let vars = args.iter().map(|a| check(a, bound)).collect::<Result<Vec<_>>>()?;
                    Ok(Formula::Atom(sym.to_string(), vars))
                }
            }
        }
    }
}

/// Parses `(fn (x p…) body)`. When `tag` is given, evaluation insists that
/// every atom uses a symbol of that language.
pub fn parse_formula(text: &str, tag: Option<&str>) -> Result<ExistentialFormula> {
    let sexps = read_sexps(text)?;
    let [top] = sexps.as_slice() else {
        return err((1, 1), "expected exactly one (fn ...) form");
    };
    let Sexp::List(items, ..) = top else {
        return err(top.pos(), "expected (fn ...)");
    };
    match items.as_slice() {
        [Sexp::Atom(f, ..), vars, b] if f == "fn" => {
            let free = var_list(vars)?;
            if free.is_empty() {
                return err(vars.pos(), "fn needs an output variable");
            }
            let mut bound = free.clone();
            let body = body(b, true, &mut bound)?;
            Ok(ExistentialFormula { free, body, tag: tag.map(str::to_string) })
        }
        _ => err(top.pos(), "expected (fn (vars) body)"),
    }
}

impl std::str::FromStr for ExistentialFormula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_formula(s, None)
    }
}

fn resolve_atoms(f: &Formula, m: &Structure, tag: Option<&str>, out: &mut BTreeMap<String, usize>) -> Result<()> {
    match f {
        Formula::Atom(r, vs) => {
            let sig = m.signature();
            let Some(i) = sig.index_of(r) else {
                return input(format!("relation {r} is not in the signature"));
            };
            if sig.symbol(i).arity != vs.len() {
                return input(format!("relation {r} has arity {}, used with {}", sig.symbol(i).arity, vs.len()));
            }
            if let Some(t) = tag {
                if sig.symbol(i).language != t {
                    return input(format!("relation {r} is not in language {t}"));
                }
            }
            out.insert(r.clone(), i);
            Ok(())
        }
        Formula::Not(x) | Formula::Exists(_, x) => resolve_atoms(x, m, tag, out),
        Formula::And(xs) | Formula::Or(xs) => xs.iter().try_for_each(|x| resolve_atoms(x, m, tag, out)),
        Formula::True | Formula::False | Formula::Eq(..) => Ok(()),
    }
}

struct Eval<'a> {
    m: &'a Structure,
    syms: BTreeMap<String, usize>,
    elems: Vec<Elem>,
}

impl Eval<'_> {
    fn sat(&self, f: &Formula, env: &mut BTreeMap<String, Elem>) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(r, vs) => {
                let t: Vec<Elem> = vs.iter().map(|v| env[v]).collect();
                self.m.holds(self.syms[r], &t)
            }
            Formula::Eq(a, b) => env[a] == env[b],
            Formula::Not(x) => !self.sat(x, env),
            Formula::And(xs) => xs.iter().all(|x| self.sat(x, env)),
            Formula::Or(xs) => xs.iter().any(|x| self.sat(x, env)),
            Formula::Exists(vs, x) => {
                let saved: Vec<Option<Elem>> = vs.iter().map(|v| env.get(v).copied()).collect();
                let found = self.assign(vs, x, env);
                for (v, old) in vs.iter().zip(saved) {
                    match old {
                        Some(e) => env.insert(v.clone(), e),
                        None => env.remove(v),
                    };
                }
                found
            }
        }
    }

    fn assign(&self, vs: &[String], body: &Formula, env: &mut BTreeMap<String, Elem>) -> bool {
        let Some((v, rest)) = vs.split_first() else {
            return self.sat(body, env);
        };
        self.elems.iter().any(|&e| {
            env.insert(v.clone(), e);
            self.assign(rest, body, env)
        })
    }
}

/// {c : M ⊨ φ(c, params)}.
pub fn eval_formula(m: &Structure, phi: &ExistentialFormula, params: &[Elem]) -> Result<BTreeSet<Elem>> {
    if params.len() + 1 != phi.free.len() {
        return input(format!("formula takes {} parameters, got {}", phi.free.len() - 1, params.len()));
    }
    if let Some(p) = params.iter().find(|p| !m.contains_elem(**p)) {
        return input(format!("parameter {p} is outside the universe"));
    }
    let mut syms = BTreeMap::new();
    resolve_atoms(&phi.body, m, phi.tag.as_deref(), &mut syms)?;
    let ev = Eval { m, syms, elems: m.elems() };
    let mut env: BTreeMap<String, Elem> = phi.free[1..].iter().cloned().zip(params.iter().copied()).collect();
    let mut out = BTreeSet::new();
    for &c in &ev.elems {
        env.insert(phi.free[0].clone(), c);
        if ev.sat(&phi.body, &mut env) {
            out.insert(c);
        }
    }
    Ok(out)
}

/// Whether the formula contains no negation.
pub fn is_negation_free(f: &Formula) -> bool {
    match f {
        Formula::Not(_) => false,
        Formula::Exists(_, x) => is_negation_free(x),
        Formula::And(xs) | Formula::Or(xs) => xs.iter().all(is_negation_free),
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::sig;

    fn path3() -> Structure {
        Structure::from_named(sig::graph(), 0..3, &[("E", vec![vec![0, 1], vec![1, 2]])]).unwrap()
    }

    #[test]
    fn neighbours_of_something() {
        let phi = parse_formula("(fn (x) (exists (y) (E x y)))", None).unwrap();
        assert_eq!(eval_formula(&path3(), &phi, &[]).unwrap(), [0, 1, 2].into());
    }

    #[test]
    fn equality_selects_the_parameter() {
        let phi = parse_formula("(fn (x m) (= x m))", None).unwrap();
        assert_eq!(eval_formula(&path3(), &phi, &[1]).unwrap(), [1].into());
        assert!(eval_formula(&path3(), &phi, &[]).is_err());
    }

    #[test]
    fn distance_two() {
        let g = Structure::from_named(sig::graph(), 0..4, &[("E", vec![vec![0, 1], vec![1, 2], vec![0, 3]])]).unwrap();
        let phi = parse_formula("(fn (x m) (exists (y) (and (E m y) (E y x) (not (E m x)))))", Some("L")).unwrap();
        assert_eq!(eval_formula(&g, &phi, &[0]).unwrap(), [0, 2].into());
        assert!(!is_negation_free(&phi.body));
    }

    #[test]
    fn non_existential_prefixes_are_rejected() {
        assert!(parse_formula("(fn (x) (forall (y) (E x y)))", None).is_err());
        assert!(parse_formula("(fn (x) (not (exists (y) (E x y))))", None).is_err());
        assert!(parse_formula("(fn (x) (not (not (exists (y) (E x y)))))", None).is_ok());
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_formula("(fn (x)\n  (E x z))", None) {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 8)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn display_round_trips() {
        let text = "(fn (x m) (exists (y) (and (E m y) (not (= x y)))))";
        let phi = parse_formula(text, None).unwrap();
        assert_eq!(phi.to_string(), text);
        assert_eq!(parse_formula(&phi.to_string(), None).unwrap(), phi);
    }

    #[test]
    fn language_tag_is_enforced() {
        let phi = parse_formula("(fn (x) (exists (y) (E x y)))", Some("L2")).unwrap();
        assert!(eval_formula(&path3(), &phi, &[]).is_err());
    }
}
