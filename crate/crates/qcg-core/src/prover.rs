//! Backward-chaining sequent proof search.
//!
//! Rules, tried in this order at every node:
//!
//! ```text
//! [Ax]  singleton antecedent, both categories basic and compatible;
//!       semantics and qualia transfer verbatim (no coercion here)
//! [R/]  goal X/Y: append a hypothetical Y on the right, derive X,
//!       abstract the hypothesis variable
//! [R\]  goal Y\X: hypothetical Y on the left, mirror image
//! [L/]  functor X/Y in the antecedent: some non-empty span T directly to
//!       its right derives Y (premise 1); the functor and T are replaced by
//!       a derived X sign (premise 2)
//! [L\]  functor Y\X: span to its left, mirror image
//! ```
//!
//! Functor occurrences are tried left to right and spans shortest first, so
//! output order is reproducible. Every premise strictly decreases the total
//! slash count of the sequent, which bounds the search with no memoization
//! or depth limit. Qualia combination is total (metavariables adopt, never
//! clash), so it cannot prune the search; derivability depends on
//! categories alone.
//!
//! Metavariable bindings live in branch-local stores cloned at choice
//! points. Once search finishes, every returned derivation is rewritten
//! against its branch's final store, so the trees expose concrete qualia
//! and records, with `?` only where nothing ever constrained a slot.

use std::collections::BTreeMap;
use std::fmt;

use crate::category::{match_basic, Category};
use crate::lambda::Term;
use crate::lexicon::{Lexicon, LookupError};
use crate::sign::{apply_qualia, CoercionRecord, QualiaStore, QualiaStructure, Sign};
use crate::sorts::SortLattice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleName {
    LSlash,
    LBackslash,
    RSlash,
    RBackslash,
    Axiom,
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleName::LSlash => "[L/]",
            RuleName::LBackslash => "[L\\]",
            RuleName::RSlash => "[R/]",
            RuleName::RBackslash => "[R\\]",
            RuleName::Axiom => "[Ax]",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequent {
    pub antecedent: Vec<Sign>,
    pub succedent: Sign,
}

impl Sequent {
    /// Compact category-only rendering for proof trees.
    pub fn categories_line(&self) -> String {
        let left: Vec<String> = self
            .antecedent
            .iter()
            .map(|s| s.category.to_string())
            .collect();
        format!("{} => {}", left.join(", "), self.succedent.category)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.antecedent.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, " => {}", self.succedent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub rule: RuleName,
    pub conclusion: Sequent,
    pub premises: Vec<Derivation>,
    /// Present exactly on application steps whose cancelled argument
    /// category is basic.
    pub coercion: Option<CoercionRecord>,
}

impl Derivation {
    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(Derivation::node_count).sum::<usize>()
    }

    /// All coercion records in the tree, premise order.
    pub fn records(&self) -> Vec<&CoercionRecord> {
        let mut out = Vec::new();
        fn walk<'a>(d: &'a Derivation, out: &mut Vec<&'a CoercionRecord>) {
            for p in &d.premises {
                walk(p, out);
            }
            if let Some(r) = &d.coercion {
                out.push(r);
            }
        }
        walk(self, &mut out);
        out
    }

    /// Rule and category skeleton, ignoring semantics and qualia. Two
    /// derivations with equal skeletons applied the same rules to the same
    /// categories.
    pub fn skeleton(&self) -> String {
        let mut out = String::new();
        fn walk(d: &Derivation, depth: usize, out: &mut String) {
            out.push_str(&"  ".repeat(depth));
            out.push_str(&d.rule.to_string());
            out.push(' ');
            out.push_str(&d.conclusion.categories_line());
            out.push('\n');
            for p in &d.premises {
                walk(p, depth + 1, out);
            }
        }
        walk(self, 0, &mut out);
        out
    }
}

/// Indented text proof tree: rule, category-only sequent, and the coercion
/// record of the step when there is one.
pub fn render_derivation(d: &Derivation) -> String {
    let mut out = String::new();
    fn walk(d: &Derivation, depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&d.rule.to_string());
        out.push(' ');
        out.push_str(&d.conclusion.categories_line());
        if let Some(rec) = &d.coercion {
            out.push_str(&format!("   coerce: {rec}"));
        }
        out.push('\n');
        for p in &d.premises {
            walk(p, depth + 1, out);
        }
    }
    walk(d, 0, &mut out);
    out
}

/// One distinct result of proof search: normalized semantics, the
/// succedent's resolved qualia, a representative derivation, and whether
/// every coercion along the way (and every embedded combination) succeeded.
#[derive(Debug, Clone)]
pub struct Reading {
    pub semantics: Term,
    pub qualia: QualiaStructure,
    pub derivation: Derivation,
    pub interpretable: bool,
}

struct Searcher<'a> {
    lattice: &'a SortLattice,
    hyp_counter: u64,
    nodes: u64,
    prune: bool,
}

struct Solution {
    sem: Term,
    qualia: QualiaStructure,
    deriv: Derivation,
    store: QualiaStore,
}

impl<'a> Searcher<'a> {
    fn fresh_hyp_var(&mut self) -> String {
        let n = self.hyp_counter;
        self.hyp_counter += 1;
        format!("u{n}")
    }

    fn search(
        &mut self,
        antecedent: &[Sign],
        goal: &Category,
        store: &QualiaStore,
    ) -> Vec<Solution> {
        self.nodes += 1;
        let mut out = Vec::new();

        // [Ax]
        if antecedent.len() == 1 && match_basic(goal, &antecedent[0].category) {
            let conclusion = Sequent {
                antecedent: antecedent.to_vec(),
                succedent: Sign::new(
                    goal.clone(),
                    antecedent[0].semantics.clone(),
                    antecedent[0].qualia.clone(),
                ),
            };
            out.push(Solution {
                sem: antecedent[0].semantics.clone(),
                qualia: antecedent[0].qualia.clone(),
                deriv: Derivation {
                    rule: RuleName::Axiom,
                    conclusion,
                    premises: Vec::new(),
                    coercion: None,
                },
                store: store.clone(),
            });
        }

        // [R/] and [R\]
        if let Category::RightSlash { result, argument } = goal {
            out.extend(self.right_rule(antecedent, goal, result, argument, false, store));
        }
        if let Category::LeftSlash { argument, result } = goal {
            out.extend(self.right_rule(antecedent, goal, result, argument, true, store));
        }

        // [L/] and [L\]
        for i in 0..antecedent.len() {
            match &antecedent[i].category {
                Category::RightSlash { result, argument } => {
                    for j in i + 1..antecedent.len() {
                        out.extend(self.left_rule(
                            antecedent,
                            goal,
                            i,
                            (i + 1, j + 1),
                            result,
                            argument,
                            RuleName::LSlash,
                            store,
                        ));
                    }
                }
                Category::LeftSlash { argument, result } => {
                    for j in (0..i).rev() {
                        out.extend(self.left_rule(
                            antecedent,
                            goal,
                            i,
                            (j, i),
                            result,
                            argument,
                            RuleName::LBackslash,
                            store,
                        ));
                    }
                }
                Category::Basic { .. } => {}
            }
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn right_rule(
        &mut self,
        antecedent: &[Sign],
        goal: &Category,
        result: &Category,
        argument: &Category,
        hyp_on_left: bool,
        store: &QualiaStore,
    ) -> Vec<Solution> {
        let mut store = store.clone();
        let var = self.fresh_hyp_var();
        let hyp = Sign::new(argument.clone(), Term::var(var.clone()), store.fresh());
        let mut extended = Vec::with_capacity(antecedent.len() + 1);
        if hyp_on_left {
            extended.push(hyp);
            extended.extend_from_slice(antecedent);
        } else {
            extended.extend_from_slice(antecedent);
            extended.push(hyp);
        }
        let rule = if hyp_on_left {
            RuleName::RBackslash
        } else {
            RuleName::RSlash
        };
        self.search(&extended, result, &store)
            .into_iter()
            .map(|sub| {
                let sem = Term::abs(var.clone(), sub.sem);
                // Qualia pass through unchanged: the hypothesis's slot was
                // filled (or left open) inside the sub-derivation.
                let qualia = sub.qualia.clone();
                let conclusion = Sequent {
                    antecedent: antecedent.to_vec(),
                    succedent: Sign::new(goal.clone(), sem.clone(), qualia.clone()),
                };
                Solution {
                    sem,
                    qualia,
                    deriv: Derivation {
                        rule,
                        conclusion,
                        premises: vec![sub.deriv],
                        coercion: None,
                    },
                    store: sub.store,
                }
            })
            .collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn left_rule(
        &mut self,
        antecedent: &[Sign],
        goal: &Category,
        functor_at: usize,
        span: (usize, usize),
        result: &Category,
        argument: &Category,
        rule: RuleName,
        store: &QualiaStore,
    ) -> Vec<Solution> {
        let t = &antecedent[span.0..span.1];
        if self.prune && !counts_balance(t, argument) {
            return Vec::new();
        }
        let mut out = Vec::new();
        for p1 in self.search(t, argument, store) {
            let mut st = p1.store;
            let functor = &antecedent[functor_at];
            let outcome = match apply_qualia(
                &functor.qualia,
                result,
                argument,
                &p1.qualia,
                &mut st,
                self.lattice,
            ) {
                Ok(o) => o,
                // Unknown sort; unreachable for validated lexica, and the
                // search contract is to never fail, so drop the branch.
                Err(_) => continue,
            };
            debug_assert_eq!(
                outcome.record.is_some(),
                argument.is_basic(),
                "coercion records appear exactly at basic argument categories"
            );
            let derived = Sign::new(
                result.clone(),
                Term::apply(functor.semantics.clone(), p1.sem.clone()),
                outcome.conclusion,
            );
            let lo = functor_at.min(span.0);
            let hi = functor_at.max(span.1 - 1);
            let mut reduced = Vec::with_capacity(antecedent.len() - (hi - lo));
            reduced.extend_from_slice(&antecedent[..lo]);
            reduced.push(derived);
            reduced.extend_from_slice(&antecedent[hi + 1..]);
            for p2 in self.search(&reduced, goal, &st) {
                let conclusion = Sequent {
                    antecedent: antecedent.to_vec(),
                    succedent: Sign::new(goal.clone(), p2.sem.clone(), p2.qualia.clone()),
                };
                out.push(Solution {
                    sem: p2.sem,
                    qualia: p2.qualia,
                    deriv: Derivation {
                        rule,
                        conclusion,
                        premises: vec![p1.deriv.clone(), p2.deriv],
                        coercion: outcome.record.clone(),
                    },
                    store: p2.store,
                });
            }
        }
        out
    }
}

/// Signed basic-name counts must balance between a span and the category it
/// is supposed to derive; mismatches cannot be derivable, so the split is
/// skipped. Checked by name only (features ignored), which keeps it sound.
fn counts_balance(span: &[Sign], target: &Category) -> bool {
    let mut totals: BTreeMap<String, i64> = BTreeMap::new();
    for sign in span {
        for (name, n) in sign.category.basic_counts() {
            *totals.entry(name).or_insert(0) += n;
        }
    }
    for (name, n) in target.basic_counts() {
        *totals.entry(name).or_insert(0) -= n;
    }
    totals.values().all(|n| *n == 0)
}

fn resolve_derivation(d: &Derivation, store: &QualiaStore) -> Derivation {
    Derivation {
        rule: d.rule,
        conclusion: Sequent {
            antecedent: d.conclusion.antecedent.iter().map(|s| s.resolve(store)).collect(),
            succedent: d.conclusion.succedent.resolve(store),
        },
        premises: d.premises.iter().map(|p| resolve_derivation(p, store)).collect(),
        coercion: d.coercion.as_ref().map(|r| r.resolve(store)),
    }
}

fn prove_impl(
    antecedent: &[Sign],
    goal: &Category,
    lattice: &SortLattice,
    mut store: QualiaStore,
    prune: bool,
) -> (Vec<Derivation>, u64) {
    assert!(!antecedent.is_empty(), "antecedent must be non-empty");
    for sign in antecedent {
        store.accommodate(&sign.qualia);
    }
    let mut searcher = Searcher {
        lattice,
        hyp_counter: 0,
        nodes: 0,
        prune,
    };
    let solutions = searcher.search(antecedent, goal, &store);
    let derivs = solutions
        .into_iter()
        .map(|sol| resolve_derivation(&sol.deriv, &sol.store))
        .collect();
    (derivs, searcher.nodes)
}

/// All cut-free derivations of `antecedent => goal`. Never errors; an
/// unprovable sequent yields an empty list.
pub fn prove(antecedent: &[Sign], goal: &Category, lattice: &SortLattice) -> Vec<Derivation> {
    prove_impl(antecedent, goal, lattice, QualiaStore::new(), true).0
}

/// Like [`prove`], also reporting how many search nodes were visited.
pub fn prove_counting(
    antecedent: &[Sign],
    goal: &Category,
    lattice: &SortLattice,
) -> (Vec<Derivation>, u64) {
    prove_impl(antecedent, goal, lattice, QualiaStore::new(), true)
}

#[cfg(test)]
pub(crate) fn prove_unpruned(
    antecedent: &[Sign],
    goal: &Category,
    lattice: &SortLattice,
) -> Vec<Derivation> {
    prove_impl(antecedent, goal, lattice, QualiaStore::new(), false).0
}

/// Extracts distinct readings: normalized canonical semantics, resolved
/// succedent qualia, and the interpretability verdict. Ordered by
/// derivation size (then discovery order) and deduplicated by the
/// (semantics, qualia) display pair, keeping the first representative.
pub fn readings(derivs: &[Derivation]) -> Vec<Reading> {
    let mut all: Vec<(usize, usize, Reading)> = derivs
        .iter()
        .enumerate()
        .map(|(idx, d)| {
            let raw = &d.conclusion.succedent.semantics;
            // The step budget is unreachable for terms composed from a
            // validated lexicon; fall back to the raw term if it ever is.
            let semantics = raw
                .normalize()
                .map(|t| t.canonicalize())
                .unwrap_or_else(|_| raw.clone());
            let qualia = d.conclusion.succedent.qualia.clone();
            let interpretable = !d.records().iter().any(|r| r.is_empty_result())
                && !qualia.has_empty_leaf();
            let reading = Reading {
                semantics,
                qualia,
                derivation: d.clone(),
                interpretable,
            };
            (d.node_count(), idx, reading)
        })
        .collect();
    all.sort_by_key(|a| (a.0, a.1));
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for (_, _, r) in all {
        let key = (r.semantics.to_string(), r.qualia.to_string());
        if seen.insert(key) {
            out.push(r);
        }
    }
    out
}

/// Looks the tokens up, proves each lexical choice against the goal
/// category, and merges the readings. Order: derivation size, then lexical
/// choice index, then display strings; duplicates across choices collapse.
pub fn parse(
    lex: &Lexicon,
    tokens: &[String],
    goal: &Category,
) -> Result<Vec<Reading>, LookupError> {
    let mut store = QualiaStore::new();
    let choices = lex.lookup(tokens, &mut store)?;
    let mut merged: Vec<(usize, usize, String, String, Reading)> = Vec::new();
    for (choice_idx, choice) in choices.iter().enumerate() {
        let signs: Vec<Sign> = choice.iter().map(|(_, s)| s.clone()).collect();
        let derivs = prove_impl(&signs, goal, lex.lattice(), store.clone(), true).0;
        for r in readings(&derivs) {
            merged.push((
                r.derivation.node_count(),
                choice_idx,
                r.semantics.to_string(),
                r.qualia.to_string(),
                r,
            ));
        }
    }
    merged.sort_by(|a, b| (a.0, a.1, &a.2, &a.3).cmp(&(b.0, b.1, &b.2, &b.3)));
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for (_, _, sem, qs, r) in merged {
        if seen.insert((sem, qs)) {
            out.push(r);
        }
    }
    Ok(out)
}

/// Signs for bare-category sequents: semantics are fresh constants t1, t2,
/// ..., qualia fresh metavariables (anonymous premises for prove mode).
pub fn signs_from_categories(cats: &[Category], store: &mut QualiaStore) -> Vec<Sign> {
    cats.iter()
        .enumerate()
        .map(|(i, c)| Sign::new(c.clone(), Term::constant(format!("t{}", i + 1)), store.fresh()))
        .collect()
}
