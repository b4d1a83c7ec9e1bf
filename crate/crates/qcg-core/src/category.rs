//! Syntactic categories for the sequent calculus.
//!
//! A category is a basic symbol with optional features, or one of two slash
//! forms: `X/Y` (seeks `Y` to the right, yields `X`) and `Y\X` (seeks `Y` to
//! the left, yields `X`). In both forms `X` is the result and `Y` the
//! argument. Surface syntax requires explicit parentheses for nesting;
//! `A/B/C` is rejected rather than silently associated.
//!
//! Features are written `NP{case=acc}` and matched permissively: two basic
//! categories are compatible when their names agree and no shared attribute
//! carries conflicting values. A missing attribute matches anything.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Attribute-value pairs on a basic category. Stored sorted so printing is
/// canonical.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Features(pub BTreeMap<String, String>);

impl Features {
    pub fn empty() -> Features {
        Features(BTreeMap::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// No attribute present in both carries different values.
    pub fn compatible(&self, other: &Features) -> bool {
        self.0
            .iter()
            .all(|(k, v)| other.0.get(k).is_none_or(|w| w == v))
    }
}

impl fmt::Display for Features {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return Ok(());
        }
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Basic { name: String, features: Features },
    /// `X/Y`: result X, argument Y expected on the right.
    RightSlash { result: Box<Category>, argument: Box<Category> },
    /// `Y\X`: argument Y expected on the left, result X.
    LeftSlash { argument: Box<Category>, result: Box<Category> },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("category syntax error at byte {offset}: {message}")]
pub struct CategoryParseError {
    pub offset: usize,
    pub message: String,
}

impl Category {
    pub fn basic(name: impl Into<String>) -> Category {
        Category::Basic {
            name: name.into(),
            features: Features::empty(),
        }
    }

    pub fn basic_with(name: impl Into<String>, features: Features) -> Category {
        Category::Basic {
            name: name.into(),
            features,
        }
    }

    pub fn right_slash(result: Category, argument: Category) -> Category {
        Category::RightSlash {
            result: Box::new(result),
            argument: Box::new(argument),
        }
    }

    pub fn left_slash(argument: Category, result: Category) -> Category {
        Category::LeftSlash {
            argument: Box::new(argument),
            result: Box::new(result),
        }
    }

    pub fn is_basic(&self) -> bool {
        matches!(self, Category::Basic { .. })
    }

    /// Result and argument parts of a slash category.
    pub fn parts(&self) -> Option<(&Category, &Category)> {
        match self {
            Category::Basic { .. } => None,
            Category::RightSlash { result, argument } => Some((result, argument)),
            Category::LeftSlash { argument, result } => Some((result, argument)),
        }
    }

    /// Number of slash connectives; the sequent rules strictly decrease the
    /// total over a sequent, which is what bounds proof search.
    pub fn connective_count(&self) -> usize {
        match self {
            Category::Basic { .. } => 0,
            Category::RightSlash { result, argument }
            | Category::LeftSlash { argument, result } => {
                1 + result.connective_count() + argument.connective_count()
            }
        }
    }

    /// Basic-symbol names mentioned anywhere in the category.
    pub fn basic_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        fn walk<'a>(c: &'a Category, out: &mut Vec<&'a str>) {
            match c {
                Category::Basic { name, .. } => out.push(name),
                Category::RightSlash { result, argument }
                | Category::LeftSlash { argument, result } => {
                    walk(result, out);
                    walk(argument, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// Signed occurrence counts per basic name: results count positively,
    /// arguments flip polarity. A derivable sequent needs the antecedent
    /// total to equal the succedent total for every name, so mismatched
    /// splits can be pruned before recursing. Features are ignored here;
    /// the check stays sound because it only ever rules splits out.
    pub fn basic_counts(&self) -> BTreeMap<String, i64> {
        fn walk(c: &Category, sign: i64, out: &mut BTreeMap<String, i64>) {
            match c {
                Category::Basic { name, .. } => {
                    *out.entry(name.clone()).or_insert(0) += sign;
                }
                Category::RightSlash { result, argument }
                | Category::LeftSlash { argument, result } => {
                    walk(result, sign, out);
                    walk(argument, -sign, out);
                }
            }
        }
        let mut out = BTreeMap::new();
        walk(self, 1, &mut out);
        out
    }
}

/// Axiom-level compatibility: names equal and features non-conflicting in
/// both directions (attribute sets may differ).
pub fn match_basic(required: &Category, given: &Category) -> bool {
    match (required, given) {
        (
            Category::Basic { name: n1, features: f1 },
            Category::Basic { name: n2, features: f2 },
        ) => n1 == n2 && f1.compatible(f2),
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Surface syntax
// ---------------------------------------------------------------------------

pub fn parse_category(input: &str) -> Result<Category, CategoryParseError> {
    let mut p = CatParser {
        src: input.as_bytes(),
        pos: 0,
    };
    let c = p.category()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(c)
}

struct CatParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> CatParser<'a> {
    fn err(&self, message: &str) -> CategoryParseError {
        CategoryParseError {
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

    fn category(&mut self) -> Result<Category, CategoryParseError> {
        let first = self.operand()?;
        match self.peek() {
            Some(b'/') => {
                self.pos += 1;
                let arg = self.operand()?;
                self.reject_chain()?;
                Ok(Category::right_slash(first, arg))
            }
            Some(b'\\') => {
                self.pos += 1;
                let result = self.operand()?;
                self.reject_chain()?;
                Ok(Category::left_slash(first, result))
            }
            _ => Ok(first),
        }
    }

    /// `A/B/C` and `A/B\C` have no conventional reading here; require parens.
    fn reject_chain(&mut self) -> Result<(), CategoryParseError> {
        if matches!(self.peek(), Some(b'/') | Some(b'\\')) {
            return Err(self.err("ambiguous slash chain; parenthesize explicitly"));
        }
        Ok(())
    }

    fn operand(&mut self) -> Result<Category, CategoryParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let c = self.category()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(c)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let name = self.ident().expect("peeked identifier start");
                let features = if self.src.get(self.pos) == Some(&b'{') {
                    self.features()?
                } else {
                    Features::empty()
                };
                Ok(Category::basic_with(name, features))
            }
            Some(_) => Err(self.err("expected a category")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let ok = if self.pos == start {
                c.is_ascii_alphabetic() || c == b'_'
            } else {
                c.is_ascii_alphanumeric() || c == b'_'
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

    fn features(&mut self) -> Result<Features, CategoryParseError> {
        // At `{`.
        self.pos += 1;
        let mut map = BTreeMap::new();
        loop {
            let key = self
                .ident()
                .ok_or_else(|| self.err("expected feature name"))?;
            if self.peek() != Some(b'=') {
                return Err(self.err("expected `=` in feature"));
            }
            self.pos += 1;
            let value = self
                .ident()
                .ok_or_else(|| self.err("expected feature value"))?;
            if map.insert(key.clone(), value).is_some() {
                return Err(self.err("duplicate feature name"));
            }
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b'}') => {
                    self.pos += 1;
                    return Ok(Features(map));
                }
                _ => return Err(self.err("expected `,` or `}` in features")),
            }
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(c: &Category, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if c.is_basic() {
                write!(f, "{c}")
            } else {
                write!(f, "({c})")
            }
        }
        match self {
            Category::Basic { name, features } => write!(f, "{name}{features}"),
            Category::RightSlash { result, argument } => {
                operand(result, f)?;
                f.write_str("/")?;
                operand(argument, f)
            }
            Category::LeftSlash { argument, result } => {
                operand(argument, f)?;
                f.write_str("\\")?;
                operand(result, f)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Category {
        parse_category(s).unwrap()
    }

    #[test]
    fn slash_orientation_keeps_result_and_argument_straight() {
        let (res, arg) = c("S/NP").parts().map(|(r, a)| (r.clone(), a.clone())).unwrap();
        assert_eq!(res, Category::basic("S"));
        assert_eq!(arg, Category::basic("NP"));
        let (res, arg) = c("NP\\S").parts().map(|(r, a)| (r.clone(), a.clone())).unwrap();
        assert_eq!(res, Category::basic("S"));
        assert_eq!(arg, Category::basic("NP"));
    }

    #[test]
    fn nested_categories_round_trip() {
        for src in [
            "NP",
            "S/NP",
            "NP\\S",
            "(NP\\S)/NP",
            "S/(NP\\S)",
            "(NP\\S)/(S/(NP\\S))",
            "NP{case=acc}",
            "(NP{case=nom}\\S)/NP{case=acc}",
            "S\\S",
        ] {
            let parsed = c(src);
            assert_eq!(parsed.to_string(), src);
            assert_eq!(parse_category(&parsed.to_string()).unwrap(), parsed);
        }
    }

    #[test]
    fn unparenthesized_chains_are_rejected() {
        assert!(parse_category("A/B/C").is_err());
        assert!(parse_category("A\\B\\C").is_err());
        assert!(parse_category("A/B\\C").is_err());
        assert!(parse_category("(A/B)/C").is_ok());
    }

    #[test]
    fn features_print_sorted_and_parse_back() {
        let parsed = c("NP{num=sg,case=nom}");
        assert_eq!(parsed.to_string(), "NP{case=nom,num=sg}");
        assert!(parse_category("NP{case=nom,case=acc}").is_err());
    }

    #[test]
    fn match_basic_is_permissive_on_missing_attributes() {
        assert!(match_basic(&c("NP"), &c("NP{case=acc}")));
        assert!(match_basic(&c("NP{case=acc}"), &c("NP")));
        assert!(match_basic(&c("NP{case=acc}"), &c("NP{case=acc,num=sg}")));
        assert!(!match_basic(&c("NP{case=acc}"), &c("NP{case=nom}")));
        assert!(!match_basic(&c("NP"), &c("N")));
        assert!(!match_basic(&c("S/NP"), &c("S/NP")), "complex never axiom-matches");
    }

    #[test]
    fn connective_count_sums_over_structure() {
        assert_eq!(c("NP").connective_count(), 0);
        assert_eq!(c("S/NP").connective_count(), 1);
        assert_eq!(c("(NP\\S)/(S/(NP\\S))").connective_count(), 4);
    }

    #[test]
    fn basic_counts_track_polarity() {
        let counts = c("(NP\\S)/NP").basic_counts();
        assert_eq!(counts.get("S"), Some(&1));
        assert_eq!(counts.get("NP"), Some(&-2));
        let counts = c("S/(NP\\S)").basic_counts();
        assert_eq!(counts.get("S"), Some(&0));
        assert_eq!(counts.get("NP"), Some(&1));
    }
}
