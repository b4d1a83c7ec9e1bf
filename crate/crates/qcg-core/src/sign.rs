//! Signs and qualia structures.
//!
//! A sign bundles a category with a lambda term and a qualia structure. The
//! qualia structure of a basic category is a set of sorts; the structure of
//! a slash category is a pair of a result-side structure and an
//! argument-restriction structure. Metavariables stand for structures that
//! are filled in during proof search (hypothetical arguments adopt the
//! restrictions of whatever consumes them).
//!
//! Application combines the argument's qualia with the functor's
//! argument-restriction slot. At a basic argument category the combination
//! is sort-set unification and yields a coercion record; at a complex
//! argument category it recurses component-wise so embedded restrictions
//! are refined too. Derived signs accumulate `[functor-side, combined]`
//! pairs, so reading a functor slot out of a derived sign descends into the
//! first component until it matches the result category.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::category::Category;
use crate::lambda::Term;
use crate::sorts::{Sort, SortError, SortLattice};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum QualiaStructure {
    /// Sort set of a basic category; may be empty after a failed coercion.
    Leaf(BTreeSet<Sort>),
    /// Result-side structure and argument-restriction structure of a slash
    /// category.
    Pair(Box<QualiaStructure>, Box<QualiaStructure>),
    /// Placeholder bound at most once per derivation branch; identity lives
    /// in a [`QualiaStore`].
    MetaVar(u64),
}

impl QualiaStructure {
    pub fn leaf<I, S>(sorts: I) -> QualiaStructure
    where
        I: IntoIterator<Item = S>,
        S: Into<Sort>,
    {
        QualiaStructure::Leaf(sorts.into_iter().map(Into::into).collect())
    }

    pub fn pair(f: QualiaStructure, a: QualiaStructure) -> QualiaStructure {
        QualiaStructure::Pair(Box::new(f), Box::new(a))
    }

    /// True when some leaf in the structure is the empty sort set.
    pub fn has_empty_leaf(&self) -> bool {
        match self {
            QualiaStructure::Leaf(s) => s.is_empty(),
            QualiaStructure::Pair(f, a) => f.has_empty_leaf() || a.has_empty_leaf(),
            QualiaStructure::MetaVar(_) => false,
        }
    }

    /// All sorts mentioned in leaves.
    pub fn sorts(&self) -> BTreeSet<Sort> {
        let mut out = BTreeSet::new();
        fn walk(q: &QualiaStructure, out: &mut BTreeSet<Sort>) {
            match q {
                QualiaStructure::Leaf(s) => out.extend(s.iter().cloned()),
                QualiaStructure::Pair(f, a) => {
                    walk(f, out);
                    walk(a, out);
                }
                QualiaStructure::MetaVar(_) => {}
            }
        }
        walk(self, &mut out);
        out
    }
}

impl fmt::Display for QualiaStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QualiaStructure::Leaf(sorts) => {
                f.write_str("{")?;
                for (i, s) in sorts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str("}")
            }
            QualiaStructure::Pair(func, arg) => write!(f, "[{func}, {arg}]"),
            QualiaStructure::MetaVar(_) => f.write_str("?"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("qualia syntax error at byte {offset}: {message}")]
pub struct QualiaParseError {
    pub offset: usize,
    pub message: String,
}

/// Parses `{s1, s2}`, `[QS_f, QS_a]`, or `?`. Each `?` becomes its own
/// metavariable; ids are local to the call and renamed on instantiation.
pub fn parse_qualia(input: &str) -> Result<QualiaStructure, QualiaParseError> {
    let mut p = QsParser {
        src: input.as_bytes(),
        pos: 0,
        next_id: 0,
    };
    let q = p.structure()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(q)
}

struct QsParser<'a> {
    src: &'a [u8],
    pos: usize,
    next_id: u64,
}

impl<'a> QsParser<'a> {
    fn err(&self, message: &str) -> QualiaParseError {
        QualiaParseError {
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

    fn structure(&mut self) -> Result<QualiaStructure, QualiaParseError> {
        match self.peek() {
            Some(b'?') => {
                self.pos += 1;
                let id = self.next_id;
                self.next_id += 1;
                Ok(QualiaStructure::MetaVar(id))
            }
            Some(b'{') => {
                self.pos += 1;
                let mut sorts = BTreeSet::new();
                if self.peek() == Some(b'}') {
                    self.pos += 1;
                    return Ok(QualiaStructure::Leaf(sorts));
                }
                loop {
                    let name = self.ident().ok_or_else(|| self.err("expected sort name"))?;
                    sorts.insert(Sort::new(name));
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b'}') => {
                            self.pos += 1;
                            return Ok(QualiaStructure::Leaf(sorts));
                        }
                        _ => return Err(self.err("expected `,` or `}` in sort set")),
                    }
                }
            }
            Some(b'[') => {
                self.pos += 1;
                let f = self.structure()?;
                if self.peek() != Some(b',') {
                    return Err(self.err("expected `,` between pair components"));
                }
                self.pos += 1;
                let a = self.structure()?;
                if self.peek() != Some(b']') {
                    return Err(self.err("expected `]`"));
                }
                self.pos += 1;
                Ok(QualiaStructure::pair(f, a))
            }
            _ => Err(self.err("expected `{`, `[`, or `?`")),
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let ok = if self.pos == start {
                c.is_ascii_lowercase() || c == b'_'
            } else {
                c.is_ascii_lowercase() || c.is_ascii_digit() || c == b'_'
            };
            if !ok {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
        }
    }
}

/// Branch-local metavariable bindings. Cloned at search branch points so a
/// binding made on one branch never leaks into another; a metavariable is
/// bound at most once per store.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QualiaStore {
    bindings: BTreeMap<u64, QualiaStructure>,
    next_id: u64,
}

impl QualiaStore {
    pub fn new() -> QualiaStore {
        QualiaStore::default()
    }

    pub fn fresh(&mut self) -> QualiaStructure {
        let id = self.next_id;
        self.next_id += 1;
        QualiaStructure::MetaVar(id)
    }

    pub fn bind(&mut self, id: u64, value: QualiaStructure) {
        debug_assert!(
            !self.bindings.contains_key(&id),
            "metavariable {id} is single-assignment"
        );
        debug_assert!(
            !matches!(&value, QualiaStructure::MetaVar(other) if *other == id),
            "metavariable {id} must not alias itself"
        );
        self.bindings.insert(id, value);
    }

    /// Follows metavariable chains until a non-metavariable or an unbound
    /// metavariable is reached; does not descend into pairs.
    pub fn resolve_shallow(&self, q: &QualiaStructure) -> QualiaStructure {
        let mut cur = q.clone();
        while let QualiaStructure::MetaVar(id) = cur {
            match self.bindings.get(&id) {
                Some(next) => cur = next.clone(),
                None => return QualiaStructure::MetaVar(id),
            }
        }
        cur
    }

    /// Resolves through pairs too; unbound metavariables remain.
    pub fn resolve_deep(&self, q: &QualiaStructure) -> QualiaStructure {
        match self.resolve_shallow(q) {
            QualiaStructure::Pair(f, a) => {
                QualiaStructure::pair(self.resolve_deep(&f), self.resolve_deep(&a))
            }
            other => other,
        }
    }

    /// Bumps the fresh-id counter past every metavariable in `q`, so signs
    /// built against another store can safely enter this one.
    pub fn accommodate(&mut self, q: &QualiaStructure) {
        match q {
            QualiaStructure::Leaf(_) => {}
            QualiaStructure::Pair(f, a) => {
                self.accommodate(f);
                self.accommodate(a);
            }
            QualiaStructure::MetaVar(id) => self.next_id = self.next_id.max(id + 1),
        }
    }

    /// Replaces every metavariable occurrence in `q` with a fresh one from
    /// this store. Used when a lexicon sign enters a parse job.
    pub fn instantiate(&mut self, q: &QualiaStructure) -> QualiaStructure {
        match q {
            QualiaStructure::Leaf(_) => q.clone(),
            QualiaStructure::Pair(f, a) => {
                QualiaStructure::pair(self.instantiate(f), self.instantiate(a))
            }
            QualiaStructure::MetaVar(_) => self.fresh(),
        }
    }
}

/// Shape discipline: a leaf fits a basic category, a pair fits a slash
/// category component-wise, and a metavariable (or a metavariable bound to
/// a fitting structure) fits anything it resolves into.
pub fn mirrors(q: &QualiaStructure, cat: &Category, store: &QualiaStore) -> bool {
    match store.resolve_shallow(q) {
        QualiaStructure::MetaVar(_) => true,
        QualiaStructure::Leaf(_) => cat.is_basic(),
        QualiaStructure::Pair(f, a) => match cat.parts() {
            Some((result, argument)) => mirrors(&f, result, store) && mirrors(&a, argument, store),
            None => false,
        },
    }
}

/// True when `id` occurs anywhere in `q` after resolution. Guards adoption
/// against cyclic bindings (a metavariable must never end up containing
/// itself, or resolution would not terminate).
fn occurs(store: &QualiaStore, id: u64, q: &QualiaStructure) -> bool {
    match store.resolve_shallow(q) {
        QualiaStructure::MetaVar(m) => m == id,
        QualiaStructure::Leaf(_) => false,
        QualiaStructure::Pair(f, a) => occurs(store, id, &f) || occurs(store, id, &a),
    }
}

/// Binds the unbound metavariable `id` to `value`, skipping the binding
/// when it would be cyclic; returns the adopted structure either way.
fn adopt(store: &mut QualiaStore, id: u64, value: &QualiaStructure) -> QualiaStructure {
    if !occurs(store, id, value) {
        store.bind(id, value.clone());
    }
    value.clone()
}

/// Sort-set combination: every pairwise unification that succeeds, i.e. the
/// more specific sort of every comparable pair. The result may be empty;
/// emptiness is data for the interpretability flag, not an error.
pub fn qs_combine(
    arg: &BTreeSet<Sort>,
    restr: &BTreeSet<Sort>,
    lattice: &SortLattice,
) -> Result<BTreeSet<Sort>, SortError> {
    let mut out = BTreeSet::new();
    for q in arg {
        for r in restr {
            if let Some(u) = lattice.unify(q, r)? {
                out.insert(u);
            }
        }
    }
    Ok(out)
}

/// One coercion at an application step with a basic argument category: the
/// argument's sorts, the functor's restriction sorts, and the combined
/// result. An empty result marks a failed interpretation. Fields are
/// structures rather than bare sets so adoption steps involving
/// metavariables can be recorded before they resolve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoercionRecord {
    pub argument: QualiaStructure,
    pub restriction: QualiaStructure,
    pub result: QualiaStructure,
}

impl CoercionRecord {
    pub fn resolve(&self, store: &QualiaStore) -> CoercionRecord {
        CoercionRecord {
            argument: store.resolve_deep(&self.argument),
            restriction: store.resolve_deep(&self.restriction),
            result: store.resolve_deep(&self.result),
        }
    }

    /// A record fails when its combined result is the empty sort set.
    pub fn is_empty_result(&self) -> bool {
        matches!(&self.result, QualiaStructure::Leaf(s) if s.is_empty())
    }
}

impl fmt::Display for CoercionRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} |> {} = {}",
            self.argument, self.restriction, self.result
        )
    }
}

/// Combines a derived argument's qualia with a functor's restriction slot,
/// directed by the argument category.
///
/// At a basic category the combination is [`qs_combine`] and produces the
/// step's coercion record; adoption handles metavariables (the unknown side
/// takes on the known side) and accumulated pairs are combined through
/// their first component, carrying the appendix along. At a complex
/// category the combination recurses component-wise when both sides mirror
/// the category; records are never produced there (coercion is local to
/// basic argument positions), so an embedded empty set surfaces only in the
/// output structure.
pub fn combine_structural(
    arg: &QualiaStructure,
    restr: &QualiaStructure,
    arg_cat: &Category,
    store: &mut QualiaStore,
    lattice: &SortLattice,
) -> Result<(QualiaStructure, Option<CoercionRecord>), SortError> {
    let a = store.resolve_shallow(arg);
    let r = store.resolve_shallow(restr);
    if arg_cat.is_basic() {
        return combine_at_basic(&a, &r, arg_cat, store, lattice);
    }
    let (result, argument) = arg_cat.parts().expect("non-basic category has parts");
    let combined = match (&a, &r) {
        (QualiaStructure::MetaVar(m), _) => adopt(store, *m, &r),
        (_, QualiaStructure::MetaVar(n)) => adopt(store, *n, &a),
        (QualiaStructure::Pair(a1, a2), QualiaStructure::Pair(r1, r2))
            if mirrors(&a, arg_cat, store) && mirrors(&r, arg_cat, store) =>
        {
            let (c1, _) = combine_structural(a1, r1, result, store, lattice)?;
            let (c2, _) = combine_structural(a2, r2, argument, store, lattice)?;
            QualiaStructure::pair(c1, c2)
        }
        (QualiaStructure::Pair(a1, a2), _) if !mirrors(&a, arg_cat, store) => {
            let (c, _) = combine_structural(a1, &r, arg_cat, store, lattice)?;
            QualiaStructure::pair(c, (**a2).clone())
        }
        (_, QualiaStructure::Pair(r1, r2)) => {
            let (c, _) = combine_structural(&a, r1, arg_cat, store, lattice)?;
            QualiaStructure::pair(c, (**r2).clone())
        }
        (QualiaStructure::Leaf(sa), QualiaStructure::Leaf(sr)) => {
            QualiaStructure::Leaf(qs_combine(sa, sr, lattice)?)
        }
        // Shapes with no common refinement; keep the argument (selection
        // never invents structure).
        _ => a,
    };
    Ok((combined, None))
}

fn combine_at_basic(
    a: &QualiaStructure,
    r: &QualiaStructure,
    arg_cat: &Category,
    store: &mut QualiaStore,
    lattice: &SortLattice,
) -> Result<(QualiaStructure, Option<CoercionRecord>), SortError> {
    match (a, r) {
        (QualiaStructure::Leaf(sa), QualiaStructure::Leaf(sr)) => {
            let combined = QualiaStructure::Leaf(qs_combine(sa, sr, lattice)?);
            let record = CoercionRecord {
                argument: a.clone(),
                restriction: r.clone(),
                result: combined.clone(),
            };
            Ok((combined, Some(record)))
        }
        // Unknown argument adopts the restriction (hypotheses take on the
        // requirements of whatever consumes them); trivially satisfied.
        (QualiaStructure::MetaVar(m), _) => {
            let adopted = adopt(store, *m, r);
            let record = CoercionRecord {
                argument: adopted.clone(),
                restriction: adopted.clone(),
                result: adopted.clone(),
            };
            Ok((adopted, Some(record)))
        }
        // Unconstrained restriction adopts the argument.
        (_, QualiaStructure::MetaVar(n)) => {
            let adopted = adopt(store, *n, a);
            let record = CoercionRecord {
                argument: adopted.clone(),
                restriction: adopted.clone(),
                result: adopted.clone(),
            };
            Ok((adopted, Some(record)))
        }
        // Accumulated argument: combine through the first component, keep
        // the appendix.
        (QualiaStructure::Pair(a1, a2), _) => {
            let (c, rec) = combine_structural(a1, r, arg_cat, store, lattice)?;
            Ok((QualiaStructure::pair(c, (**a2).clone()), rec))
        }
        // Accumulated restriction, symmetric.
        (_, QualiaStructure::Pair(r1, r2)) => {
            let (c, rec) = combine_structural(a, r1, arg_cat, store, lattice)?;
            Ok((QualiaStructure::pair(c, (**r2).clone()), rec))
        }
    }
}

/// Result of one application step's qualia bookkeeping.
#[derive(Debug, Clone)]
pub struct ApplyOutcome {
    /// Qualia for the derived sign: `[functor-side, combined]`.
    pub conclusion: QualiaStructure,
    /// Present exactly when the cancelled argument category is basic.
    pub record: Option<CoercionRecord>,
}

/// Qualia side of cancelling `arg_cat` from a functor of result `result_cat`.
///
/// The functor's qualia is split into a result-side part and a restriction
/// slot. On a lexical functor the split is the pair itself; on a derived
/// functor whose first component no longer mirrors the result category the
/// split descends into that component, carrying accumulated slots along
/// unchanged. A metavariable functor is forced to a pair of fresh
/// metavariables first, so the operation is total and search is never
/// pruned by qualia.
pub fn apply_qualia(
    functor_q: &QualiaStructure,
    result_cat: &Category,
    arg_cat: &Category,
    arg_q: &QualiaStructure,
    store: &mut QualiaStore,
    lattice: &SortLattice,
) -> Result<ApplyOutcome, SortError> {
    let f = store.resolve_shallow(functor_q);
    match f {
        QualiaStructure::MetaVar(id) => {
            let forced = QualiaStructure::pair(store.fresh(), store.fresh());
            store.bind(id, forced.clone());
            apply_qualia(&forced, result_cat, arg_cat, arg_q, store, lattice)
        }
        QualiaStructure::Leaf(_) => {
            // Degenerate functor qualia: no restriction slot, so synthesize
            // an unconstrained one.
            let slot = store.fresh();
            let (combined, record) =
                combine_structural(arg_q, &slot, arg_cat, store, lattice)?;
            Ok(ApplyOutcome {
                conclusion: QualiaStructure::pair(f, combined),
                record,
            })
        }
        QualiaStructure::Pair(pf, pa) => {
            if mirrors(&pf, result_cat, store) {
                let (combined, record) =
                    combine_structural(arg_q, &pa, arg_cat, store, lattice)?;
                Ok(ApplyOutcome {
                    conclusion: QualiaStructure::pair((*pf).clone(), combined),
                    record,
                })
            } else {
                // Derived functor: the real pair sits deeper; accumulated
                // slots stay attached on the way out.
                let inner = apply_qualia(&pf, result_cat, arg_cat, arg_q, store, lattice)?;
                Ok(ApplyOutcome {
                    conclusion: QualiaStructure::pair(inner.conclusion, (*pa).clone()),
                    record: inner.record,
                })
            }
        }
    }
}

/// A category paired with its lambda-term semantics and qualia structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sign {
    pub category: Category,
    pub semantics: Term,
    pub qualia: QualiaStructure,
}

impl Sign {
    pub fn new(category: Category, semantics: Term, qualia: QualiaStructure) -> Sign {
        Sign {
            category,
            semantics,
            qualia,
        }
    }

    /// Copy with every metavariable replaced by a fresh one from `store`.
    pub fn instantiate(&self, store: &mut QualiaStore) -> Sign {
        Sign {
            category: self.category.clone(),
            semantics: self.semantics.clone(),
            qualia: store.instantiate(&self.qualia),
        }
    }

    pub fn resolve(&self, store: &QualiaStore) -> Sign {
        Sign {
            category: self.category.clone(),
            semantics: self.semantics.clone(),
            qualia: store.resolve_deep(&self.qualia),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{} : ({}, {})>", self.category, self.semantics, self.qualia)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::parse_category;
    use crate::sorts::SortLattice;

    fn lattice() -> SortLattice {
        SortLattice::build(
            ["prop", "artifact", "info", "company", "address", "human", "event"]
                .iter()
                .map(|s| Sort::new(*s)),
            [
                (Sort::new("read"), Sort::new("event")),
                (Sort::new("write"), Sort::new("event")),
                (Sort::new("spokesperson"), Sort::new("human")),
            ],
        )
        .unwrap()
    }

    fn set(names: &[&str]) -> BTreeSet<Sort> {
        names.iter().map(|s| Sort::new(*s)).collect()
    }

    fn cat(s: &str) -> Category {
        parse_category(s).unwrap()
    }

    fn qs(s: &str) -> QualiaStructure {
        parse_qualia(s).unwrap()
    }

    #[test]
    fn qs_combine_selects_refining_sorts() {
        let l = lattice();
        assert_eq!(
            qs_combine(&set(&["artifact", "read", "write"]), &set(&["event"]), &l).unwrap(),
            set(&["read", "write"])
        );
        assert_eq!(
            qs_combine(&set(&["company", "spokesperson"]), &set(&["human"]), &l).unwrap(),
            set(&["spokesperson"])
        );
        assert_eq!(qs_combine(&set(&["human"]), &set(&["human"]), &l).unwrap(), set(&["human"]));
        assert_eq!(qs_combine(&set(&["address"]), &set(&["human"]), &l).unwrap(), set(&[]));
    }

    #[test]
    fn qs_combine_is_commutative_here() {
        let l = lattice();
        for (a, b) in [
            (set(&["artifact", "read", "write"]), set(&["event"])),
            (set(&["company", "spokesperson"]), set(&["human"])),
            (set(&["address"]), set(&["human"])),
            (set(&[]), set(&["event"])),
        ] {
            assert_eq!(
                qs_combine(&a, &b, &l).unwrap(),
                qs_combine(&b, &a, &l).unwrap()
            );
        }
    }

    #[test]
    fn qualia_surface_round_trips() {
        for src in [
            "{human}",
            "{}",
            "{read, write}",
            "[{prop}, {human}]",
            "[[{prop}, {human}], {event}]",
            "[{prop}, ?]",
            "?",
        ] {
            let parsed = qs(src);
            assert_eq!(parsed.to_string(), src);
        }
        assert!(parse_qualia("{Caps}").is_err());
        assert!(parse_qualia("[{a}]").is_err());
    }

    #[test]
    fn distinct_placeholders_get_distinct_ids() {
        match qs("[?, ?]") {
            QualiaStructure::Pair(f, a) => assert_ne!(*f, *a),
            other => panic!("unexpected parse: {other}"),
        }
    }

    #[test]
    fn mirrors_follows_category_shape() {
        let store = QualiaStore::new();
        assert!(mirrors(&qs("{human}"), &cat("NP"), &store));
        assert!(!mirrors(&qs("{human}"), &cat("S/NP"), &store));
        assert!(mirrors(&qs("[{prop}, {human}]"), &cat("NP\\S"), &store));
        assert!(!mirrors(&qs("[{prop}, {human}]"), &cat("NP"), &store));
        assert!(mirrors(&qs("?"), &cat("(NP\\S)/NP"), &store));
        assert!(mirrors(
            &qs("[[{prop}, {human}], [{prop}, [{prop}, {event}]]]"),
            &cat("(NP\\S)/(S/(NP\\S))"),
            &store
        ));
        let mut store = QualiaStore::new();
        let mv = store.fresh();
        if let QualiaStructure::MetaVar(id) = mv {
            store.bind(id, qs("{human}"));
        }
        assert!(mirrors(&mv, &cat("NP"), &store));
        assert!(!mirrors(&mv, &cat("NP\\S"), &store));
    }

    #[test]
    fn adoption_binds_hypothesis_to_restriction() {
        let l = lattice();
        let mut store = QualiaStore::new();
        let hyp = store.fresh();
        let (combined, rec) =
            combine_structural(&hyp, &qs("{event}"), &cat("NP"), &mut store, &l).unwrap();
        assert_eq!(combined, qs("{event}"));
        assert_eq!(store.resolve_shallow(&hyp), qs("{event}"));
        let rec = rec.expect("basic argument category records the step");
        assert_eq!(rec.result, qs("{event}"));
        assert!(!rec.is_empty_result());
    }

    #[test]
    fn unconstrained_restriction_adopts_argument() {
        let l = lattice();
        let mut store = QualiaStore::new();
        let slot = store.fresh();
        let (combined, rec) =
            combine_structural(&qs("{info}"), &slot, &cat("NP"), &mut store, &l).unwrap();
        assert_eq!(combined, qs("{info}"));
        assert_eq!(store.resolve_shallow(&slot), qs("{info}"));
        assert!(rec.is_some());
    }

    #[test]
    fn empty_combination_is_recorded_not_errored() {
        let l = lattice();
        let mut store = QualiaStore::new();
        let (combined, rec) =
            combine_structural(&qs("{address}"), &qs("{human}"), &cat("NP"), &mut store, &l)
                .unwrap();
        assert_eq!(combined, qs("{}"));
        let rec = rec.unwrap();
        assert!(rec.is_empty_result());
        assert_eq!(rec.argument, qs("{address}"));
        assert_eq!(rec.restriction, qs("{human}"));
    }

    #[test]
    fn complex_argument_combines_component_wise_without_record() {
        let l = lattice();
        let mut store = QualiaStore::new();
        // Embedded restriction refinement: the {artifact, read, write} slot
        // meets {event} inside a complex argument category.
        let arg = qs("[{prop}, [{prop}, {artifact, read, write}]]");
        let restr = qs("[{prop}, [{prop}, {event}]]");
        let (combined, rec) =
            combine_structural(&arg, &restr, &cat("S/(NP\\S)"), &mut store, &l).unwrap();
        assert_eq!(combined, qs("[{prop}, [{prop}, {read, write}]]"));
        assert!(rec.is_none(), "no record at a complex argument category");
    }

    #[test]
    fn apply_reads_lexical_functor_pairs_directly() {
        let l = lattice();
        let mut store = QualiaStore::new();
        // Transitive verb consuming an object hypothesis: the hypothesis
        // adopts {event} and the derived sign accumulates the pair.
        let verb = qs("[[{prop}, {human}], {event}]");
        let hyp = store.fresh();
        let out = apply_qualia(&verb, &cat("NP\\S"), &cat("NP"), &hyp, &mut store, &l).unwrap();
        assert_eq!(
            store.resolve_deep(&out.conclusion),
            qs("[[{prop}, {human}], {event}]")
        );
        assert!(out.record.is_some());
        assert_eq!(store.resolve_shallow(&hyp), qs("{event}"));
    }

    #[test]
    fn apply_descends_into_accumulated_functors() {
        let l = lattice();
        let mut store = QualiaStore::new();
        // Derived predicate [[{prop}, {human}], {event}] of category NP\S:
        // the first component is the real pair, {event} is an accumulated
        // slot. Consuming the subject coerces against {human} and leaves
        // {event} untouched.
        let derived = qs("[[{prop}, {human}], {event}]");
        let subject = qs("{company, spokesperson}");
        let out = apply_qualia(&derived, &cat("S"), &cat("NP"), &subject, &mut store, &l).unwrap();
        assert_eq!(
            store.resolve_deep(&out.conclusion),
            qs("[[{prop}, {spokesperson}], {event}]")
        );
        let rec = out.record.unwrap().resolve(&store);
        assert_eq!(rec.argument, qs("{company, spokesperson}"));
        assert_eq!(rec.restriction, qs("{human}"));
        assert_eq!(rec.result, qs("{spokesperson}"));
    }

    #[test]
    fn apply_forces_metavar_functors_to_pairs() {
        let l = lattice();
        let mut store = QualiaStore::new();
        let f = store.fresh();
        let arg = store.fresh();
        let out = apply_qualia(&f, &cat("S"), &cat("NP"), &arg, &mut store, &l).unwrap();
        assert!(matches!(
            store.resolve_shallow(&f),
            QualiaStructure::Pair(..)
        ));
        assert!(out.record.is_some(), "basic argument still records");
        match store.resolve_shallow(&out.conclusion) {
            QualiaStructure::Pair(..) => {}
            other => panic!("expected pair conclusion, got {other}"),
        }
    }

    #[test]
    fn instantiation_freshens_every_metavar() {
        let mut store = QualiaStore::new();
        let a = store.instantiate(&qs("[?, ?]"));
        let b = store.instantiate(&qs("[?, ?]"));
        let ids = |q: &QualiaStructure| match q {
            QualiaStructure::Pair(f, a) => match (f.as_ref(), a.as_ref()) {
                (QualiaStructure::MetaVar(x), QualiaStructure::MetaVar(y)) => (*x, *y),
                _ => panic!("expected metavar pair"),
            },
            _ => panic!("expected pair"),
        };
        let (a1, a2) = ids(&a);
        let (b1, b2) = ids(&b);
        let all = BTreeSet::from([a1, a2, b1, b2]);
        assert_eq!(all.len(), 4, "all instantiated metavars distinct");
    }

    #[test]
    fn empty_leaf_detection_sees_through_structure() {
        assert!(qs("{}").has_empty_leaf());
        assert!(qs("[[{prop}, {}], {event}]").has_empty_leaf());
        assert!(!qs("[[{prop}, {human}], {event}]").has_empty_leaf());
        assert!(!qs("?").has_empty_leaf());
    }
}
