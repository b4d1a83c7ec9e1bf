//! Sort atoms and the subsumption lattice that licenses coercion.
//!
//! A lattice is built from declared `sub < super` pairs plus any number of
//! isolated sorts. Queries run against the reflexive-transitive closure of
//! the declared pairs; the closure is computed once at construction and
//! cyclic declarations are rejected there. No implicit top or bottom element
//! exists: two sorts unify only when one subsumes the other, and the result
//! is the more specific of the two.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A semantic subtype atom (`human`, `event`, `read`, ...).
///
/// Equality is name equality. The `Ord` impl is lexicographic so that sort
/// sets iterate and print deterministically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sort(String);

impl Sort {
    /// Wraps a name verbatim. Name validation happens when a lattice is
    /// built, so `Sort` values can be formed freely for queries.
    pub fn new(name: impl Into<String>) -> Self {
        Sort(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Sort {
    fn from(name: &str) -> Self {
        Sort(name.to_owned())
    }
}

impl From<String> for Sort {
    fn from(name: String) -> Self {
        Sort(name)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SortError {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("sort order contains a cycle through `{0}` and `{1}`")]
    Cycle(String, String),
    #[error("invalid sort name `{0}`: expected a lowercase identifier")]
    InvalidName(String),
}

/// Returns true for a lowercase identifier: `[a-z_][a-z0-9_]*`.
pub fn is_valid_sort_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// A finite set of sorts partially ordered by declared subsumption pairs.
///
/// Immutable after construction, so it can be shared freely across threads.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SortLattice {
    sorts: BTreeSet<Sort>,
    declared: BTreeSet<(Sort, Sort)>,
    // Reflexive-transitive closure: sort -> every supersort including itself.
    supers: BTreeMap<Sort, BTreeSet<Sort>>,
}

impl SortLattice {
    /// Builds a lattice from isolated sort names and `(sub, super)` pairs.
    /// Members of pairs are added to the sort set automatically.
    pub fn build<S, P>(sorts: S, pairs: P) -> Result<SortLattice, SortError>
    where
        S: IntoIterator<Item = Sort>,
        P: IntoIterator<Item = (Sort, Sort)>,
    {
        let mut all: BTreeSet<Sort> = BTreeSet::new();
        for s in sorts {
            if !is_valid_sort_name(s.name()) {
                return Err(SortError::InvalidName(s.name().to_owned()));
            }
            all.insert(s);
        }
        let mut declared = BTreeSet::new();
        for (sub, sup) in pairs {
            for s in [&sub, &sup] {
                if !is_valid_sort_name(s.name()) {
                    return Err(SortError::InvalidName(s.name().to_owned()));
                }
            }
            all.insert(sub.clone());
            all.insert(sup.clone());
            declared.insert((sub, sup));
        }

        // Direct-successor adjacency, then closure by BFS from each sort.
        let mut adj: BTreeMap<&Sort, Vec<&Sort>> = BTreeMap::new();
        for (sub, sup) in &declared {
            adj.entry(sub).or_default().push(sup);
        }
        let mut supers: BTreeMap<Sort, BTreeSet<Sort>> = BTreeMap::new();
        for s in &all {
            let mut seen: BTreeSet<Sort> = BTreeSet::new();
            seen.insert(s.clone());
            let mut queue: Vec<&Sort> = vec![s];
            while let Some(cur) = queue.pop() {
                if let Some(nexts) = adj.get(cur) {
                    for n in nexts {
                        if seen.insert((*n).clone()) {
                            queue.push(n);
                        }
                    }
                }
            }
            supers.insert(s.clone(), seen);
        }

        // Antisymmetry: distinct sorts must not subsume each other.
        for a in &all {
            for b in supers[a].iter() {
                if a != b && supers[b].contains(a) {
                    let (x, y) = if a < b { (a, b) } else { (b, a) };
                    return Err(SortError::Cycle(x.name().to_owned(), y.name().to_owned()));
                }
            }
        }

        Ok(SortLattice {
            sorts: all,
            declared,
            supers,
        })
    }

    pub fn contains(&self, s: &Sort) -> bool {
        self.sorts.contains(s)
    }

    pub fn sorts(&self) -> impl Iterator<Item = &Sort> {
        self.sorts.iter()
    }

    /// Declared pairs as given (not the closure).
    pub fn declared_pairs(&self) -> impl Iterator<Item = &(Sort, Sort)> {
        self.declared.iter()
    }

    /// Sorts that never occur in a declared pair.
    pub fn isolated_sorts(&self) -> impl Iterator<Item = &Sort> {
        self.sorts.iter().filter(|s| {
            !self
                .declared
                .iter()
                .any(|(a, b)| a == *s || b == *s)
        })
    }

    fn check_known(&self, s: &Sort) -> Result<(), SortError> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(SortError::UnknownSort(s.name().to_owned()))
        }
    }

    /// `x` is at least as specific as `y` (reflexive, transitive).
    pub fn leq(&self, x: &Sort, y: &Sort) -> Result<bool, SortError> {
        self.check_known(x)?;
        self.check_known(y)?;
        Ok(self.supers[x].contains(y))
    }

    /// The more specific of two comparable sorts; `None` when incomparable.
    pub fn unify(&self, x: &Sort, y: &Sort) -> Result<Option<Sort>, SortError> {
        if self.leq(x, y)? {
            Ok(Some(x.clone()))
        } else if self.leq(y, x)? {
            Ok(Some(y.clone()))
        } else {
            Ok(None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(name: &str) -> Sort {
        Sort::from(name)
    }

    fn example() -> SortLattice {
        SortLattice::build(
            [s("artifact"), s("prop")],
            [
                (s("read"), s("event")),
                (s("write"), s("event")),
                (s("spokesperson"), s("human")),
            ],
        )
        .unwrap()
    }

    /// Independent closure oracle: boolean adjacency matrix iterated to a
    /// fixpoint, used to freeze the expected `leq` table.
    fn closure_oracle(sorts: &[&str], pairs: &[(&str, &str)]) -> BTreeMap<(String, String), bool> {
        let n = sorts.len();
        let idx: BTreeMap<&str, usize> = sorts.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut m = vec![vec![false; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in pairs {
            m[idx[a]][idx[b]] = true;
        }
        loop {
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    if !m[i][j] {
                        let via = (0..n).any(|k| m[i][k] && m[k][j]);
                        if via {
                            m[i][j] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                out.insert((sorts[i].to_owned(), sorts[j].to_owned()), m[i][j]);
            }
        }
        out
    }

    #[test]
    fn leq_matches_closure_oracle_on_example_lattice() {
        let names = [
            "read",
            "write",
            "event",
            "spokesperson",
            "human",
            "artifact",
            "prop",
        ];
        let pairs = [
            ("read", "event"),
            ("write", "event"),
            ("spokesperson", "human"),
        ];
        let oracle = closure_oracle(&names, &pairs);
        let lat = example();
        for a in names {
            for b in names {
                assert_eq!(
                    lat.leq(&s(a), &s(b)).unwrap(),
                    oracle[&(a.to_owned(), b.to_owned())],
                    "leq({a}, {b})"
                );
            }
        }
    }

    #[test]
    fn leq_is_reflexive_and_directed() {
        let lat = example();
        assert!(lat.leq(&s("read"), &s("read")).unwrap());
        assert!(lat.leq(&s("read"), &s("event")).unwrap());
        assert!(!lat.leq(&s("event"), &s("read")).unwrap());
        assert!(!lat.leq(&s("artifact"), &s("event")).unwrap());
    }

    #[test]
    fn leq_is_transitive_through_chains() {
        let lat = SortLattice::build(
            [],
            [(s("a"), s("b")), (s("b"), s("c")), (s("c"), s("d"))],
        )
        .unwrap();
        assert!(lat.leq(&s("a"), &s("d")).unwrap());
        assert!(!lat.leq(&s("d"), &s("a")).unwrap());
    }

    #[test]
    fn unify_returns_more_specific_side() {
        let lat = example();
        assert_eq!(lat.unify(&s("read"), &s("event")).unwrap(), Some(s("read")));
        assert_eq!(lat.unify(&s("event"), &s("read")).unwrap(), Some(s("read")));
        assert_eq!(lat.unify(&s("human"), &s("human")).unwrap(), Some(s("human")));
        assert_eq!(lat.unify(&s("read"), &s("write")).unwrap(), None);
        assert_eq!(lat.unify(&s("artifact"), &s("human")).unwrap(), None);
    }

    #[test]
    fn unknown_sorts_are_reported() {
        let lat = example();
        assert_eq!(
            lat.leq(&s("ghost"), &s("event")),
            Err(SortError::UnknownSort("ghost".into()))
        );
        assert_eq!(
            lat.unify(&s("event"), &s("ghost")),
            Err(SortError::UnknownSort("ghost".into()))
        );
    }

    #[test]
    fn cycles_are_rejected_at_construction() {
        let err = SortLattice::build([], [(s("a"), s("b")), (s("b"), s("a"))]).unwrap_err();
        assert_eq!(err, SortError::Cycle("a".into(), "b".into()));

        let err = SortLattice::build(
            [],
            [(s("a"), s("b")), (s("b"), s("c")), (s("c"), s("a"))],
        )
        .unwrap_err();
        assert!(matches!(err, SortError::Cycle(_, _)));
    }

    #[test]
    fn self_pair_is_harmless_reflexivity() {
        let lat = SortLattice::build([], [(s("a"), s("a"))]).unwrap();
        assert!(lat.leq(&s("a"), &s("a")).unwrap());
    }

    #[test]
    fn invalid_names_are_rejected() {
        assert!(matches!(
            SortLattice::build([s("Bad")], []),
            Err(SortError::InvalidName(_))
        ));
        assert!(matches!(
            SortLattice::build([s("")], []),
            Err(SortError::InvalidName(_))
        ));
        assert!(SortLattice::build([s("ok_name2")], []).is_ok());
    }

    #[test]
    fn pair_members_join_the_sort_set() {
        let lat = SortLattice::build([], [(s("read"), s("event"))]).unwrap();
        assert!(lat.contains(&s("read")));
        assert!(lat.contains(&s("event")));
        assert_eq!(lat.isolated_sorts().count(), 0);
    }
}
