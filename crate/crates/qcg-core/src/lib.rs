//! Categorial grammar engine with qualia-tracking proof search.
//!
//! The crate parses token sequences against a lexicon by backward-chaining
//! sequent proof search, producing normalized lambda-term logical forms
//! paired with qualia structures whose sort sets are refined by a
//! subsumption lattice at every functor application.
//!
//! ```
//! use qcg_core::{load_lexicon, parse, parse_category, tokenize};
//!
//! let lex = load_lexicon(
//!     "sorts: dog < animal\n\
//!      entry \"rex\" NP :: rex :: {dog}\n\
//!      entry \"barks\" NP\\S :: \\x. bark x :: [{prop}, {animal}]\n\
//!      sorts: prop\n",
//! )?;
//! let goal = parse_category("S")?;
//! let readings = parse(&lex, &tokenize("rex barks"), &goal)?;
//! assert_eq!(readings[0].semantics.to_string(), "bark rex");
//! assert_eq!(readings[0].qualia.to_string(), "[{prop}, {dog}]");
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod category;
pub mod lambda;
pub mod lexicon;
pub mod prover;
pub mod sign;
pub mod sorts;

pub use category::{match_basic, parse_category, Category, CategoryParseError, Features};
pub use lambda::{parse_term, NormalizeError, Term, TermParseError, DEFAULT_STEP_BUDGET};
pub use lexicon::{
    load_lexicon, save_lexicon, tokenize, Lexicon, LexiconEntry, LexiconError, LookupError,
};
pub use prover::{
    parse, prove, prove_counting, readings, render_derivation, signs_from_categories, Derivation,
    Reading, RuleName, Sequent,
};
pub use sign::{
    apply_qualia, combine_structural, mirrors, parse_qualia, qs_combine, ApplyOutcome,
    CoercionRecord, QualiaParseError, QualiaStore, QualiaStructure, Sign,
};
pub use sorts::{Sort, SortError, SortLattice};
