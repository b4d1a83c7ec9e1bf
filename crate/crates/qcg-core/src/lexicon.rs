//! Lexicon: the sort lattice, basic category names, and surface entries.
//!
//! File format, line oriented, `#` starts a comment:
//!
//! ```text
//! sorts: read < event          # one subsumption pair per line
//! sorts: prop                  # order-isolated sort
//! basic: N NP S                # basic category names
//! entry "a novel" S/(NP{case=nom}\S) :: \p. exists z. novel z & p z :: [{prop}, [{prop}, {artifact, read, write}]]
//! ```
//!
//! Every entry is validated on load: the category uses declared basic
//! names, the lambda term is closed, qualia sorts exist in the lattice, and
//! the qualia structure mirrors the category shape (metavariables fit
//! anywhere). Surface keys are whitespace-tokenized and lowercased; a key
//! may span several tokens and may map to several signs.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::category::{parse_category, Category};
use crate::lambda::parse_term;
use crate::sign::{mirrors, parse_qualia, QualiaStore, Sign};
use crate::sorts::{Sort, SortLattice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct LexiconError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl LexiconError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> LexiconError {
        LexiconError {
            line,
            col,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown token `{token}` at position {position}")]
pub struct LookupError {
    pub token: String,
    /// Zero-based index into the token sequence.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    /// Surface form as written in the file, for display.
    pub surface: String,
    /// Lowercased token key used for lookup.
    pub key: Vec<String>,
    pub sign: Sign,
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    lattice: SortLattice,
    basic_names: BTreeSet<String>,
    entries: Vec<LexiconEntry>,
    max_key_len: usize,
}

/// Whitespace tokenization with lowercase folding, shared by lookup and the
/// command-line front end.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(|t| t.to_lowercase()).collect()
}

impl Lexicon {
    pub fn lattice(&self) -> &SortLattice {
        &self.lattice
    }

    pub fn basic_names(&self) -> &BTreeSet<String> {
        &self.basic_names
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    /// True when every basic name in `cat` is declared.
    pub fn category_declared(&self, cat: &Category) -> bool {
        cat.basic_names()
            .iter()
            .all(|n| self.basic_names.contains(*n))
    }

    fn entries_for(&self, key: &[String]) -> Vec<&LexiconEntry> {
        self.entries.iter().filter(|e| e.key == key).collect()
    }

    /// All ways to segment `tokens` into lexicon keys, with every entry
    /// choice expanded. Longer keys are tried before shorter ones at each
    /// position; entry alternatives keep file order. Signs come back with
    /// fresh metavariables drawn from `store`.
    pub fn lookup(
        &self,
        tokens: &[String],
        store: &mut QualiaStore,
    ) -> Result<Vec<Vec<(String, Sign)>>, LookupError> {
        assert!(!tokens.is_empty(), "lookup needs at least one token");
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        let mut furthest = 0usize;
        self.segment(tokens, 0, &mut prefix, &mut out, &mut furthest, store);
        if out.is_empty() {
            return Err(LookupError {
                token: tokens[furthest].clone(),
                position: furthest,
            });
        }
        Ok(out)
    }

    fn segment(
        &self,
        tokens: &[String],
        at: usize,
        prefix: &mut Vec<(String, Sign)>,
        out: &mut Vec<Vec<(String, Sign)>>,
        furthest: &mut usize,
        store: &mut QualiaStore,
    ) {
        if at == tokens.len() {
            out.push(prefix.clone());
            return;
        }
        *furthest = (*furthest).max(at);
        let longest = self.max_key_len.min(tokens.len() - at);
        for len in (1..=longest).rev() {
            let key = &tokens[at..at + len];
            for entry in self.entries_for(key) {
                prefix.push((entry.surface.clone(), entry.sign.instantiate(store)));
                self.segment(tokens, at + len, prefix, out, furthest, store);
                prefix.pop();
            }
        }
    }
}

pub fn load_lexicon(text: &str) -> Result<Lexicon, LexiconError> {
    // First pass: declarations, so entries may precede them in the file.
    let mut sorts: BTreeSet<Sort> = BTreeSet::new();
    let mut pairs: Vec<(Sort, Sort)> = Vec::new();
    let mut basic_names: BTreeSet<String> = BTreeSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = strip_comment(raw);
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("sorts:") {
            let col = col_of(raw, rest);
            match rest.split('<').collect::<Vec<_>>().as_slice() {
                [one] => {
                    let name = one.trim();
                    sorts.insert(parse_sort_name(name, line, col)?);
                }
                [sub, sup] => {
                    let sub = parse_sort_name(sub.trim(), line, col)?;
                    let sup = parse_sort_name(sup.trim(), line, col)?;
                    pairs.push((sub, sup));
                }
                _ => {
                    return Err(LexiconError::new(
                        line,
                        col,
                        "expected `sorts: a` or `sorts: a < b`",
                    ))
                }
            }
        } else if let Some(rest) = trimmed.strip_prefix("basic:") {
            let col = col_of(raw, rest);
            for name in rest.split_whitespace() {
                if !name
                    .chars()
                    .enumerate()
                    .all(|(i, c)| c == '_' || if i == 0 { c.is_ascii_alphabetic() } else { c.is_ascii_alphanumeric() })
                    || name.is_empty()
                {
                    return Err(LexiconError::new(
                        line,
                        col,
                        format!("invalid basic category name `{name}`"),
                    ));
                }
                basic_names.insert(name.to_owned());
            }
        } else if !trimmed.starts_with("entry") {
            return Err(LexiconError::new(
                line,
                1,
                format!("unrecognized directive: `{trimmed}`"),
            ));
        }
    }
    if basic_names.is_empty() {
        basic_names = ["N", "NP", "S"].iter().map(|s| s.to_string()).collect();
    }
    // Incremental lattice build so the line introducing a cycle is blamed.
    let mut lattice = SortLattice::build(sorts.iter().cloned(), [])
        .map_err(|e| LexiconError::new(1, 1, e.to_string()))?;
    let mut built: Vec<(Sort, Sort)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = strip_comment(raw);
        let trimmed = trimmed.trim();
        if let Some(rest) = trimmed.strip_prefix("sorts:") {
            if rest.contains('<') {
                built.push(pairs[built.len()].clone());
                lattice = SortLattice::build(sorts.iter().cloned(), built.iter().cloned())
                    .map_err(|e| LexiconError::new(line, col_of(raw, rest), e.to_string()))?;
            }
        }
    }

    // Second pass: entries, validated against the finished declarations.
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = strip_comment(raw);
        let trimmed = content.trim();
        if let Some(rest) = trimmed.strip_prefix("entry") {
            let entry = parse_entry(raw, rest, line, &lattice, &basic_names)?;
            entries.push(entry);
        }
    }
    let max_key_len = entries.iter().map(|e| e.key.len()).max().unwrap_or(0);
    Ok(Lexicon {
        lattice,
        basic_names,
        entries,
        max_key_len,
    })
}

/// Canonical text form; loading it yields an equal lexicon.
pub fn save_lexicon(lex: &Lexicon) -> String {
    let mut out = String::new();
    for (sub, sup) in lex.lattice.declared_pairs() {
        let _ = writeln!(out, "sorts: {sub} < {sup}");
    }
    for s in lex.lattice.isolated_sorts() {
        let _ = writeln!(out, "sorts: {s}");
    }
    let names: Vec<&str> = lex.basic_names.iter().map(String::as_str).collect();
    let _ = writeln!(out, "basic: {}", names.join(" "));
    for e in &lex.entries {
        let _ = writeln!(
            out,
            "entry \"{}\" {} :: {} :: {}",
            e.surface, e.sign.category, e.sign.semantics, e.sign.qualia
        );
    }
    out
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// 1-based column of `rest` (a slice of `raw`) within `raw`.
fn col_of(raw: &str, rest: &str) -> usize {
    let raw_ptr = raw.as_ptr() as usize;
    let rest_ptr = rest.as_ptr() as usize;
    rest_ptr.saturating_sub(raw_ptr) + 1
}

fn parse_sort_name(name: &str, line: usize, col: usize) -> Result<Sort, LexiconError> {
    if name.is_empty() || !crate::sorts::is_valid_sort_name(name) {
        return Err(LexiconError::new(
            line,
            col,
            format!("invalid sort name `{name}`"),
        ));
    }
    Ok(Sort::new(name))
}

fn parse_entry(
    raw: &str,
    rest: &str,
    line: usize,
    lattice: &SortLattice,
    basic_names: &BTreeSet<String>,
) -> Result<LexiconEntry, LexiconError> {
    let base_col = col_of(raw, rest);
    let rest_trim = rest.trim_start();
    let col0 = base_col + (rest.len() - rest_trim.len());
    let Some(stripped) = rest_trim.strip_prefix('"') else {
        return Err(LexiconError::new(line, col0, "expected quoted surface form"));
    };
    let Some(close) = stripped.find('"') else {
        return Err(LexiconError::new(line, col0, "unterminated surface form"));
    };
    let surface = &stripped[..close];
    let key = tokenize(surface);
    if key.is_empty() {
        return Err(LexiconError::new(line, col0, "empty surface form"));
    }
    let tail = &stripped[close + 1..];
    let segments: Vec<&str> = tail.split("::").collect();
    if segments.len() != 3 {
        return Err(LexiconError::new(
            line,
            col_of(raw, tail),
            "expected `CATEGORY :: LAMBDA :: QUALIA` after the surface form",
        ));
    }
    let (cat_src, term_src, qs_src) = (segments[0], segments[1], segments[2]);

    let category = parse_category(cat_src.trim()).map_err(|e| {
        LexiconError::new(line, col_of(raw, cat_src) + e.offset, e.to_string())
    })?;
    for name in category.basic_names() {
        if !basic_names.contains(name) {
            return Err(LexiconError::new(
                line,
                col_of(raw, cat_src),
                format!("undeclared basic category `{name}`"),
            ));
        }
    }

    let semantics = parse_term(term_src.trim()).map_err(|e| {
        LexiconError::new(line, col_of(raw, term_src) + e.offset, e.to_string())
    })?;
    let free = semantics.free_vars();
    if let Some(v) = free.iter().next() {
        return Err(LexiconError::new(
            line,
            col_of(raw, term_src),
            format!("lambda term must be closed; `{v}` is unbound"),
        ));
    }

    let qualia = parse_qualia(qs_src.trim()).map_err(|e| {
        LexiconError::new(line, col_of(raw, qs_src) + e.offset, e.to_string())
    })?;
    for sort in qualia.sorts() {
        if !lattice.contains(&sort) {
            return Err(LexiconError::new(
                line,
                col_of(raw, qs_src),
                format!("undeclared sort `{sort}` in qualia"),
            ));
        }
    }
    if !mirrors(&qualia, &category, &QualiaStore::new()) {
        return Err(LexiconError::new(
            line,
            col_of(raw, qs_src),
            format!("qualia shape mismatch: `{qualia}` does not mirror `{category}`"),
        ));
    }

    Ok(LexiconEntry {
        surface: surface.to_owned(),
        key,
        sign: Sign::new(category, semantics, qualia),
    })
}
