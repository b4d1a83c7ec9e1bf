//! Untyped lambda terms for logical forms.
//!
//! The term language is variables, constants, application, abstraction, and
//! two logical constructions that the grammar builds directly: binary
//! conjunction and existential quantification. Surface syntax:
//!
//! ```text
//! \x. body          abstraction (also \x y. body)
//! exists x. body    existential
//! a & b             conjunction, right associative, binds looser than
//!                   application; the right operand may be a binder
//! f a b             application by juxtaposition, left associative
//! (t)               grouping
//! ```
//!
//! An identifier is a variable when bound by an enclosing binder and a
//! constant otherwise, so closed terms round-trip through print and parse.
//! Normalization is beta reduction under a normal-order strategy followed by
//! eta reduction, with a step budget so untypable divergent inputs surface
//! as an error instead of a hang.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Default beta-step budget for [`Term::normalize`].
pub const DEFAULT_STEP_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    App(Box<Term>, Box<Term>),
    Abs(String, Box<Term>),
    And(Box<Term>, Box<Term>),
    Exists(String, Box<Term>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("normalization exceeded the {0}-step budget")]
    BudgetExceeded(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("term syntax error at byte {offset}: {message}")]
pub struct TermParseError {
    pub offset: usize,
    pub message: String,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn apply(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn abs(v: impl Into<String>, body: Term) -> Term {
        Term::Abs(v.into(), Box::new(body))
    }

    pub fn and(l: Term, r: Term) -> Term {
        Term::And(Box::new(l), Box::new(r))
    }

    pub fn exists(v: impl Into<String>, body: Term) -> Term {
        Term::Exists(v.into(), Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn walk(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match t {
                Term::Var(v) => {
                    if !bound.iter().any(|b| b == v) {
                        out.insert(v.clone());
                    }
                }
                Term::Const(_) => {}
                Term::App(f, a) | Term::And(f, a) => {
                    walk(f, bound, out);
                    walk(a, bound, out);
                }
                Term::Abs(v, b) | Term::Exists(v, b) => {
                    bound.push(v.clone());
                    walk(b, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// True when every `Var` is bound by an enclosing binder.
    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// All constant names occurring anywhere in the term.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn walk(t: &Term, out: &mut BTreeSet<String>) {
            match t {
                Term::Const(c) => {
                    out.insert(c.clone());
                }
                Term::Var(_) => {}
                Term::App(f, a) | Term::And(f, a) => {
                    walk(f, out);
                    walk(a, out);
                }
                Term::Abs(_, b) | Term::Exists(_, b) => walk(b, out),
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn node_count(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(f, a) | Term::And(f, a) => 1 + f.node_count() + a.node_count(),
            Term::Abs(_, b) | Term::Exists(_, b) => 1 + b.node_count(),
        }
    }

    /// Beta-then-eta normal form under the default step budget.
    pub fn normalize(&self) -> Result<Term, NormalizeError> {
        self.normalize_with_budget(DEFAULT_STEP_BUDGET)
    }

    pub fn normalize_with_budget(&self, budget: usize) -> Result<Term, NormalizeError> {
        let mut steps = budget;
        let mut fresh = 0u64;
        let beta = beta_normalize(self.clone(), &mut steps, &mut fresh, budget)?;
        Ok(eta_normalize(beta))
    }

    /// Structural equality modulo bound-variable names.
    pub fn alpha_equal(&self, other: &Term) -> bool {
        fn go(a: &Term, b: &Term, ea: &mut Vec<String>, eb: &mut Vec<String>) -> bool {
            match (a, b) {
                (Term::Var(x), Term::Var(y)) => {
                    let ia = ea.iter().rposition(|v| v == x);
                    let ib = eb.iter().rposition(|v| v == y);
                    match (ia, ib) {
                        (Some(i), Some(j)) => i == j,
                        (None, None) => x == y,
                        _ => false,
                    }
                }
                (Term::Const(x), Term::Const(y)) => x == y,
                (Term::App(f1, a1), Term::App(f2, a2)) | (Term::And(f1, a1), Term::And(f2, a2)) => {
                    go(f1, f2, ea, eb) && go(a1, a2, ea, eb)
                }
                (Term::Abs(x, b1), Term::Abs(y, b2))
                | (Term::Exists(x, b1), Term::Exists(y, b2)) => {
                    ea.push(x.clone());
                    eb.push(y.clone());
                    let r = go(b1, b2, ea, eb);
                    ea.pop();
                    eb.pop();
                    r
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new(), &mut Vec::new())
    }

    /// Renames bound variables to the scheme x, y, z, x1, y1, z1, x2, ...
    /// skipping names already taken by free variables or constants. The
    /// result is alpha-equal to the input and prints deterministically.
    pub fn canonicalize(&self) -> Term {
        let mut taken: BTreeSet<String> = self.free_vars();
        taken.extend(self.constants());
        let mut supply = NameSupply::new(taken);
        fn walk(t: &Term, env: &mut Vec<(String, String)>, supply: &mut NameSupply) -> Term {
            match t {
                Term::Var(v) => {
                    let name = env
                        .iter()
                        .rev()
                        .find(|(old, _)| old == v)
                        .map(|(_, new)| new.clone())
                        .unwrap_or_else(|| v.clone());
                    Term::Var(name)
                }
                Term::Const(c) => Term::Const(c.clone()),
                Term::App(f, a) => Term::apply(walk(f, env, supply), walk(a, env, supply)),
                Term::And(l, r) => Term::and(walk(l, env, supply), walk(r, env, supply)),
                Term::Abs(v, b) => {
                    let new = supply.next_name();
                    env.push((v.clone(), new.clone()));
                    let body = walk(b, env, supply);
                    env.pop();
                    Term::abs(new, body)
                }
                Term::Exists(v, b) => {
                    let new = supply.next_name();
                    env.push((v.clone(), new.clone()));
                    let body = walk(b, env, supply);
                    env.pop();
                    Term::exists(new, body)
                }
            }
        }
        walk(self, &mut Vec::new(), &mut supply)
    }
}

struct NameSupply {
    taken: BTreeSet<String>,
    next: usize,
}

impl NameSupply {
    fn new(taken: BTreeSet<String>) -> Self {
        NameSupply { taken, next: 0 }
    }

    fn next_name(&mut self) -> String {
        loop {
            let i = self.next;
            self.next += 1;
            let letter = ["x", "y", "z"][i % 3];
            let round = i / 3;
            let name = if round == 0 {
                letter.to_owned()
            } else {
                format!("{letter}{round}")
            };
            if !self.taken.contains(&name) {
                self.taken.insert(name.clone());
                return name;
            }
        }
    }
}

/// Capture-avoiding substitution of `s` for free `x` in `t`. Binders that
/// would capture a free variable of `s` are renamed with a counter suffix.
fn substitute(t: &Term, x: &str, s: &Term, fresh: &mut u64) -> Term {
    match t {
        Term::Var(v) => {
            if v == x {
                s.clone()
            } else {
                t.clone()
            }
        }
        Term::Const(_) => t.clone(),
        Term::App(f, a) => Term::apply(substitute(f, x, s, fresh), substitute(a, x, s, fresh)),
        Term::And(l, r) => Term::and(substitute(l, x, s, fresh), substitute(r, x, s, fresh)),
        Term::Abs(v, b) => {
            let (v2, b2) = subst_under_binder(v, b, x, s, fresh);
            Term::Abs(v2, Box::new(b2))
        }
        Term::Exists(v, b) => {
            let (v2, b2) = subst_under_binder(v, b, x, s, fresh);
            Term::Exists(v2, Box::new(b2))
        }
    }
}

fn subst_under_binder(v: &str, body: &Term, x: &str, s: &Term, fresh: &mut u64) -> (String, Term) {
    if v == x {
        // Inner binder shadows the substituted variable.
        return (v.to_owned(), body.clone());
    }
    let body_free = body.free_vars();
    if !body_free.contains(x) {
        return (v.to_owned(), body.clone());
    }
    let s_free = s.free_vars();
    if s_free.contains(v) {
        // Rename the binder away from the incoming free variables.
        let mut avoid = s_free;
        avoid.extend(body_free);
        avoid.insert(x.to_owned());
        let v2 = loop {
            *fresh += 1;
            let cand = format!("{v}_{fresh}");
            if !avoid.contains(&cand) {
                break cand;
            }
        };
        let renamed = substitute(body, v, &Term::Var(v2.clone()), fresh);
        (v2.clone(), substitute(&renamed, x, s, fresh))
    } else {
        (v.to_owned(), substitute(body, x, s, fresh))
    }
}

/// Normal-order reduction: the term is first brought to head normal form,
/// then the remaining subterms are normalized recursively. Leftmost
/// outermost contraction finds a normal form whenever one exists.
fn beta_normalize(
    t: Term,
    steps: &mut usize,
    fresh: &mut u64,
    budget: usize,
) -> Result<Term, NormalizeError> {
    let t = beta_head(t, steps, fresh, budget)?;
    match t {
        Term::Var(_) | Term::Const(_) => Ok(t),
        Term::Abs(v, b) => Ok(Term::Abs(v, Box::new(beta_normalize(*b, steps, fresh, budget)?))),
        Term::Exists(v, b) => Ok(Term::Exists(
            v,
            Box::new(beta_normalize(*b, steps, fresh, budget)?),
        )),
        Term::And(l, r) => Ok(Term::and(
            beta_normalize(*l, steps, fresh, budget)?,
            beta_normalize(*r, steps, fresh, budget)?,
        )),
        // Head-normal application: the spine head is a variable or constant
        // and stays one, so the parts normalize independently.
        Term::App(f, a) => Ok(Term::apply(
            beta_normalize(*f, steps, fresh, budget)?,
            beta_normalize(*a, steps, fresh, budget)?,
        )),
    }
}

/// Contracts head redexes iteratively until none remains at the spine head.
/// A loop rather than recursion on the contractum keeps stack depth bounded
/// by term structure, not by the length of the reduction sequence.
fn beta_head(
    mut t: Term,
    steps: &mut usize,
    fresh: &mut u64,
    budget: usize,
) -> Result<Term, NormalizeError> {
    loop {
        match t {
            Term::App(f, a) => {
                let f = beta_head(*f, steps, fresh, budget)?;
                if let Term::Abs(v, b) = f {
                    if *steps == 0 {
                        return Err(NormalizeError::BudgetExceeded(budget));
                    }
                    *steps -= 1;
                    t = substitute(&b, &v, &a, fresh);
                } else {
                    return Ok(Term::App(Box::new(f), a));
                }
            }
            other => return Ok(other),
        }
    }
}

/// Post-order eta reduction; on beta-normal input the result is beta-eta
/// normal because eliminating `\x. f x` cannot create a new beta redex
/// (an applied abstraction would already have been a redex).
fn eta_normalize(t: Term) -> Term {
    match t {
        Term::Var(_) | Term::Const(_) => t,
        Term::App(f, a) => Term::apply(eta_normalize(*f), eta_normalize(*a)),
        Term::And(l, r) => Term::and(eta_normalize(*l), eta_normalize(*r)),
        Term::Exists(v, b) => Term::Exists(v, Box::new(eta_normalize(*b))),
        Term::Abs(v, b) => {
            let b = eta_normalize(*b);
            if let Term::App(f, a) = &b {
                if matches!(a.as_ref(), Term::Var(x) if *x == v) && !f.free_vars().contains(&v) {
                    return eta_normalize((**f).clone());
                }
            }
            Term::Abs(v, Box::new(b))
        }
    }
}

// ---------------------------------------------------------------------------
// Surface syntax
// ---------------------------------------------------------------------------

pub fn parse_term(input: &str) -> Result<Term, TermParseError> {
    let mut p = TermParser::new(input);
    let t = p.term(&mut Vec::new())?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(t)
}

struct TermParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> TermParser<'a> {
    fn new(src: &'a str) -> Self {
        TermParser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, message: &str) -> TermParseError {
        TermParseError {
            offset: self.pos,
            message: message.to_owned(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        let mut end = start;
        while end < self.src.len() {
            let c = self.src[end];
            let ok_start = c.is_ascii_alphabetic() || c == b'_';
            let ok_rest = ok_start || c.is_ascii_digit();
            if end == start && !ok_start {
                break;
            }
            if end > start && !ok_rest {
                break;
            }
            end += 1;
        }
        if end == start {
            return None;
        }
        self.pos = end;
        Some(String::from_utf8_lossy(&self.src[start..end]).into_owned())
    }

    fn term(&mut self, bound: &mut Vec<String>) -> Result<Term, TermParseError> {
        match self.peek() {
            Some(b'\\') => {
                self.pos += 1;
                let mut vars = Vec::new();
                while let Some(v) = self.ident() {
                    if v == "exists" {
                        return Err(self.err("`exists` cannot be a binder name"));
                    }
                    vars.push(v);
                    if self.peek() == Some(b'.') {
                        break;
                    }
                }
                if vars.is_empty() {
                    return Err(self.err("expected binder variable after `\\`"));
                }
                if !self.eat(b'.') {
                    return Err(self.err("expected `.` after binder variables"));
                }
                for v in &vars {
                    bound.push(v.clone());
                }
                let body = self.term(bound)?;
                for _ in &vars {
                    bound.pop();
                }
                Ok(vars
                    .into_iter()
                    .rev()
                    .fold(body, |acc, v| Term::abs(v, acc)))
            }
            _ => {
                // `exists x. body` or a conjunction level.
                let save = self.pos;
                if let Some(word) = self.ident() {
                    if word == "exists" {
                        let v = self
                            .ident()
                            .ok_or_else(|| self.err("expected variable after `exists`"))?;
                        if !self.eat(b'.') {
                            return Err(self.err("expected `.` after `exists` variable"));
                        }
                        bound.push(v.clone());
                        let body = self.term(bound)?;
                        bound.pop();
                        return Ok(Term::exists(v, body));
                    }
                    self.pos = save;
                } else {
                    self.pos = save;
                }
                self.conj(bound)
            }
        }
    }

    fn conj(&mut self, bound: &mut Vec<String>) -> Result<Term, TermParseError> {
        let left = self.app(bound)?;
        if self.eat(b'&') {
            let right = self.term(bound)?;
            Ok(Term::and(left, right))
        } else {
            Ok(left)
        }
    }

    fn app(&mut self, bound: &mut Vec<String>) -> Result<Term, TermParseError> {
        let mut t = self
            .atom(bound)?
            .ok_or_else(|| self.err("expected a term"))?;
        while let Some(next) = self.atom(bound)? {
            t = Term::apply(t, next);
        }
        Ok(t)
    }

    fn atom(&mut self, bound: &mut Vec<String>) -> Result<Option<Term>, TermParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let t = self.term(bound)?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(Some(t))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let save = self.pos;
                let name = self.ident().expect("peeked identifier start");
                if name == "exists" {
                    // Not an atom; let the caller handle a fresh term.
                    self.pos = save;
                    return Ok(None);
                }
                if bound.contains(&name) {
                    Ok(Some(Term::Var(name)))
                } else {
                    Ok(Some(Term::Const(name)))
                }
            }
            _ => Ok(None),
        }
    }
}

// Precedence levels for printing: 0 term, 1 conjunction, 2 application, 3 atom.
fn fmt_prec(t: &Term, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let level = match t {
        Term::Abs(..) | Term::Exists(..) => 0,
        Term::And(..) => 1,
        Term::App(..) => 2,
        Term::Var(_) | Term::Const(_) => 3,
    };
    let parens = level < prec;
    if parens {
        f.write_str("(")?;
    }
    match t {
        Term::Var(v) => f.write_str(v)?,
        Term::Const(c) => f.write_str(c)?,
        Term::Abs(v, b) => {
            write!(f, "\\{v}. ")?;
            fmt_prec(b, 0, f)?;
        }
        Term::Exists(v, b) => {
            write!(f, "exists {v}. ")?;
            fmt_prec(b, 0, f)?;
        }
        Term::And(l, r) => {
            fmt_prec(l, 2, f)?;
            f.write_str(" & ")?;
            fmt_prec(r, 0, f)?;
        }
        Term::App(g, a) => {
            fmt_prec(g, 2, f)?;
            f.write_str(" ")?;
            fmt_prec(a, 3, f)?;
        }
    }
    if parens {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}
