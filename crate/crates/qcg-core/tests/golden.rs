//! End-to-end checks against the lexicon shipped at the repository root.

use qcg_core::{
    load_lexicon, parse, parse_category, parse_term, prove, readings, save_lexicon,
    signs_from_categories, tokenize, Lexicon, QualiaStore, Reading,
};

fn shipped() -> Lexicon {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../paper.lex");
    let text = std::fs::read_to_string(path).expect("shipped lexicon is readable");
    load_lexicon(&text).expect("shipped lexicon loads")
}

fn parse_sentence(lex: &Lexicon, sentence: &str, goal: &str) -> Vec<Reading> {
    let goal = parse_category(goal).unwrap();
    parse(lex, &tokenize(sentence), &goal).unwrap()
}

fn record_strings(reading: &Reading) -> Vec<String> {
    reading.derivation.records().iter().map(|r| r.to_string()).collect()
}

#[test]
fn shipped_lexicon_saves_to_a_fixpoint() {
    let lex = shipped();
    let saved = save_lexicon(&lex);
    let reloaded = load_lexicon(&saved).expect("canonical form loads");
    assert_eq!(save_lexicon(&reloaded), saved);
    assert_eq!(reloaded.entries().len(), lex.entries().len());
}

#[test]
fn quantified_transitive_sentence_has_exactly_one_reading() {
    let lex = shipped();
    let all = parse_sentence(&lex, "a speaker explained an example", "S");
    assert_eq!(all.len(), 1, "spurious ambiguity must collapse");
    let want = parse_term("exists x. speaker x & exists y. example y & explain x y").unwrap();
    assert!(all[0].semantics.alpha_equal(&want));
    assert!(all[0].interpretable);
    assert_eq!(all[0].qualia.to_string(), "[{prop}, [[{prop}, {human}], {info}]]");
}

#[test]
fn aspectual_verb_refines_the_embedded_object_restriction() {
    let lex = shipped();
    let mut store = QualiaStore::new();
    let signs: Vec<_> = ["begin", "a novel"]
        .iter()
        .map(|key| {
            lex.entries()
                .iter()
                .find(|e| e.key.join(" ") == *key)
                .expect("entry is shipped")
                .sign
                .instantiate(&mut store)
        })
        .collect();
    let goal = parse_category(r"NP\S").unwrap();
    let derivations = prove(&signs, &goal, lex.lattice());
    assert!(!derivations.is_empty());
    let all = readings(&derivations);
    assert_eq!(all.len(), 1);
    assert_eq!(
        all[0].qualia.to_string(),
        "[[{prop}, {human}], [{prop}, [{prop}, {read, write}]]]"
    );
    assert!(all[0].interpretable);
}

#[test]
fn subject_coercion_selects_the_compatible_subsort() {
    let lex = shipped();
    let all = parse_sentence(&lex, "bmw announced", "S/NP");
    assert_eq!(all.len(), 1);
    let want = parse_term(r"\u. exists e. announce e bmw u").unwrap();
    assert!(all[0].semantics.alpha_equal(&want));
    assert_eq!(all[0].qualia.to_string(), "[[{prop}, {spokesperson}], {event}]");
    let shown = record_strings(&all[0]);
    assert!(shown.contains(&"{company, spokesperson} |> {human} = {spokesperson}".to_string()));
    assert!(shown.contains(&"{event} |> {event} = {event}".to_string()));
}

#[test]
fn metonymic_subject_is_derivable_but_uninterpretable() {
    let lex = shipped();
    let all = parse_sentence(&lex, "downing street denied all knowledge today", "S");
    assert!(!all.is_empty());
    for reading in &all {
        assert!(!reading.interpretable);
        let records = reading.derivation.records();
        let empty = records
            .iter()
            .find(|r| r.is_empty_result())
            .expect("an emptied coercion record is reported");
        assert_eq!(empty.argument.to_string(), "{address}");
        assert_eq!(empty.restriction.to_string(), "{human}");
    }
}

#[test]
fn prove_mode_accepts_bare_category_sequents() {
    let lex = shipped();
    let cats: Vec<_> = ["NP/N", "N"].iter().map(|s| parse_category(s).unwrap()).collect();
    let mut store = QualiaStore::new();
    let signs = signs_from_categories(&cats, &mut store);
    let goal = parse_category("NP").unwrap();
    let derivations = prove(&signs, &goal, lex.lattice());
    assert_eq!(derivations.len(), 1);
}
