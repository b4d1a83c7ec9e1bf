//! Command line front end for the categorial grammar prover.
//!
//! Three modes share one lexicon:
//!
//! * `parse` derives sentences and reports each distinct reading with its
//!   normalized semantics, resolved qualia, and coercion records,
//! * `prove` checks bare category sequents like `NP/N, N => NP`,
//! * `check-lexicon` loads and validates the lexicon, nothing else.
//!
//! The exit code is the worst outcome over all inputs: 0 every input had an
//! interpretable reading, 1 something was derivable only with an emptied
//! coercion, 2 something was underivable, 3 a lexicon, goal, or input error.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use qcg_core::{
    parse, parse_category, prove, readings, render_derivation, signs_from_categories, tokenize,
    Category, Lexicon, QualiaStore, Reading,
};

#[derive(Parser)]
#[command(name = "qcg", version, about = "Categorial grammar prover with sort-driven coercion")]
struct Args {
    /// Lexicon file: sort lattice, basic categories, and entries.
    #[arg(long, value_name = "FILE")]
    lexicon: PathBuf,

    /// Goal category for inputs that do not carry their own.
    #[arg(long, default_value = "S")]
    goal: String,

    #[arg(long, value_enum, default_value_t = Mode::Parse)]
    mode: Mode,

    #[arg(long, value_enum, default_value_t = Output::Text)]
    output: Output,

    /// Include the full derivation tree of every reading.
    #[arg(long)]
    derivations: bool,

    /// Report at most this many readings per input.
    #[arg(long, value_name = "N")]
    max_readings: Option<usize>,

    /// Sentences, or sequents like "NP/N, N => NP" in prove mode. Lines are
    /// read from stdin when absent; blank lines and # comments are skipped.
    inputs: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Parse,
    Prove,
    CheckLexicon,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Structured,
}

/// Outcome of one input line, ordered from best to worst.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Interpretable,
    Uninterpretable,
    Underivable,
    Error,
}

impl Status {
    fn exit_code(self) -> u8 {
        match self {
            Status::Interpretable => 0,
            Status::Uninterpretable => 1,
            Status::Underivable => 2,
            Status::Error => 3,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Interpretable => "interpretable",
            Status::Uninterpretable => "uninterpretable",
            Status::Underivable => "underivable",
            Status::Error => "error",
        }
    }
}

struct Report {
    input: String,
    goal: String,
    status: Status,
    error: Option<String>,
    shown: Vec<Reading>,
    total: usize,
}

fn main() -> ExitCode {
    let args = Args::parse();
    ExitCode::from(run(&args))
}

fn run(args: &Args) -> u8 {
    let text = match std::fs::read_to_string(&args.lexicon) {
        Ok(text) => text,
        Err(err) => {
            eprintln!("error: {}: {err}", args.lexicon.display());
            return 3;
        }
    };
    let lex = match qcg_core::load_lexicon(&text) {
        Ok(lex) => lex,
        Err(err) => {
            eprintln!("error: {}: {err}", args.lexicon.display());
            return 3;
        }
    };

    if args.mode == Mode::CheckLexicon {
        return check_lexicon(args, &lex);
    }

    let goal = match parse_category(&args.goal) {
        Ok(goal) => goal,
        Err(err) => {
            eprintln!("error: goal category: {err}");
            return 3;
        }
    };

    let inputs = match gather_inputs(args) {
        Ok(inputs) => inputs,
        Err(err) => {
            eprintln!("error: {err}");
            return 3;
        }
    };
    if inputs.is_empty() {
        eprintln!("error: no input");
        return 3;
    }

    let reports: Vec<Report> = inputs
        .iter()
        .map(|line| match args.mode {
            Mode::Parse => parse_line(line, &lex, &goal, args.max_readings),
            Mode::Prove => prove_line(line, &lex, &goal, args.max_readings),
            Mode::CheckLexicon => unreachable!("handled above"),
        })
        .collect();

    match args.output {
        Output::Text => {
            let blocks: Vec<String> = reports
                .iter()
                .map(|r| render_text(r, args.derivations))
                .collect();
            print!("{}", blocks.join("\n"));
        }
        Output::Structured => {
            let items: Vec<Value> = reports
                .iter()
                .map(|r| render_json(r, args.derivations))
                .collect();
            let doc = json!({
                "schema": "qcg/1",
                "mode": mode_name(args.mode),
                "items": items,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("value serializes"));
        }
    }

    reports.iter().map(|r| r.status.exit_code()).max().unwrap_or(0)
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Parse => "parse",
        Mode::Prove => "prove",
        Mode::CheckLexicon => "check-lexicon",
    }
}

fn check_lexicon(args: &Args, lex: &Lexicon) -> u8 {
    let sorts = lex.lattice().sorts().count();
    let basics: Vec<String> = lex.basic_names().iter().cloned().collect();
    match args.output {
        Output::Text => {
            println!(
                "lexicon ok: {} entries, {} sorts, basics {}",
                lex.entries().len(),
                sorts,
                basics.join(" ")
            );
        }
        Output::Structured => {
            let doc = json!({
                "schema": "qcg/1",
                "mode": "check-lexicon",
                "lexicon": {
                    "entries": lex.entries().len(),
                    "sorts": sorts,
                    "basics": basics,
                },
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("value serializes"));
        }
    }
    0
}

fn gather_inputs(args: &Args) -> std::io::Result<Vec<String>> {
    let raw: Vec<String> = if args.inputs.is_empty() {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf.lines().map(str::to_owned).collect()
    } else {
        args.inputs.clone()
    };
    Ok(raw
        .iter()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect())
}

fn finish(input: &str, goal: &Category, all: Vec<Reading>, cap: Option<usize>) -> Report {
    let status = if all.iter().any(|r| r.interpretable) {
        Status::Interpretable
    } else if !all.is_empty() {
        Status::Uninterpretable
    } else {
        Status::Underivable
    };
    let total = all.len();
    let mut shown = all;
    if let Some(cap) = cap {
        shown.truncate(cap);
    }
    Report {
        input: input.to_owned(),
        goal: goal.to_string(),
        status,
        error: None,
        shown,
        total,
    }
}

fn error_report(input: &str, goal: &Category, message: String) -> Report {
    Report {
        input: input.to_owned(),
        goal: goal.to_string(),
        status: Status::Error,
        error: Some(message),
        shown: Vec::new(),
        total: 0,
    }
}

fn parse_line(line: &str, lex: &Lexicon, goal: &Category, cap: Option<usize>) -> Report {
    match parse(lex, &tokenize(line), goal) {
        Ok(all) => finish(line, goal, all, cap),
        Err(err) => error_report(line, goal, err.to_string()),
    }
}

fn prove_line(line: &str, lex: &Lexicon, default_goal: &Category, cap: Option<usize>) -> Report {
    let (left, goal) = match line.split_once("=>") {
        Some((left, right)) => match parse_category(right.trim()) {
            Ok(goal) => (left, goal),
            Err(err) => return error_report(line, default_goal, format!("goal category: {err}")),
        },
        None => (line, default_goal.clone()),
    };
    let mut cats = Vec::new();
    for part in left.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return error_report(line, &goal, "empty category in antecedent".to_owned());
        }
        match parse_category(part) {
            Ok(cat) => cats.push(cat),
            Err(err) => return error_report(line, &goal, format!("`{part}`: {err}")),
        }
    }
    let mut store = QualiaStore::new();
    let signs = signs_from_categories(&cats, &mut store);
    let derivations = prove(&signs, &goal, lex.lattice());
    finish(line, &goal, readings(&derivations), cap)
}

fn render_text(report: &Report, derivations: bool) -> String {
    let mut out = String::new();
    out.push_str(&format!("> {}\n", report.input));
    match report.status {
        Status::Error => {
            out.push_str(&format!("error: {}\n", report.error.as_deref().unwrap_or("")));
            return out;
        }
        Status::Underivable => {
            out.push_str(&format!("no derivation of {}\n", report.goal));
            return out;
        }
        _ => {}
    }
    let noun = if report.total == 1 { "reading" } else { "readings" };
    if report.shown.len() < report.total {
        out.push_str(&format!(
            "{} {noun} of {} (showing {})\n",
            report.total,
            report.goal,
            report.shown.len()
        ));
    } else {
        out.push_str(&format!("{} {noun} of {}\n", report.total, report.goal));
    }
    for (i, reading) in report.shown.iter().enumerate() {
        let label = if reading.interpretable { "interpretable" } else { "uninterpretable" };
        out.push_str(&format!("reading {} [{label}]\n", i + 1));
        out.push_str(&format!("  semantics: {}\n", reading.semantics));
        out.push_str(&format!("  qualia: {}\n", reading.qualia));
        for record in reading.derivation.records() {
            out.push_str(&format!("  coercion: {record}\n"));
        }
        if !reading.interpretable {
            for record in reading.derivation.records() {
                if record.is_empty_result() {
                    out.push_str(&format!(
                        "  blocked: {} does not meet {}\n",
                        record.argument, record.restriction
                    ));
                }
            }
        }
        if derivations {
            out.push_str("  derivation:\n");
            for line in render_derivation(&reading.derivation).lines() {
                out.push_str(&format!("    {line}\n"));
            }
        }
    }
    out
}

fn render_json(report: &Report, derivations: bool) -> Value {
    if report.status == Status::Error {
        return json!({
            "input": report.input,
            "goal": report.goal,
            "status": report.status.label(),
            "error": report.error.as_deref().unwrap_or(""),
        });
    }
    let readings: Vec<Value> = report
        .shown
        .iter()
        .map(|reading| {
            let coercions: Vec<Value> = reading
                .derivation
                .records()
                .iter()
                .map(|r| {
                    json!({
                        "argument": r.argument.to_string(),
                        "restriction": r.restriction.to_string(),
                        "result": r.result.to_string(),
                        "empty": r.is_empty_result(),
                    })
                })
                .collect();
            let mut item = json!({
                "semantics": reading.semantics.to_string(),
                "qualia": reading.qualia.to_string(),
                "interpretable": reading.interpretable,
                "coercions": coercions,
            });
            if derivations {
                item["derivation"] = Value::String(render_derivation(&reading.derivation));
            }
            item
        })
        .collect();
    json!({
        "input": report.input,
        "goal": report.goal,
        "status": report.status.label(),
        "total_readings": report.total,
        "readings": readings,
    })
}
