use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fcrs::confluence::{check_local_confluence, completeness_verdict, TerminationEvidence, Verdict};
use fcrs::constructions::{
    adjoin_zero, check_completeness, ideal_extension_from_table, rees_semigroup, rees_simple, rees_zero,
    regular_pipeline, verify_against_table, ConstructionError, ConstructionOutput, PipelineOptions, ReesDatum,
    SubgroupSystem, TableCheck, VerifyOptions,
};
use fcrs::order::{verify_decrease_on_ball, Certificate};
use fcrs::semigroup::FiniteSemigroup;
use fcrs::{RewriteError, RewritingSystem};

/// Longest words allowed in a termination ball.
const MAX_BALL_LEN: usize = 8;
/// Most words a ball may enumerate.
const MAX_BALL_WORDS: usize = 1_000_000;

#[derive(Parser)]
#[command(name = "fcrs", version, about = "Finite complete rewriting systems for finite semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    AdjoinZero,
    IdealExtension,
    ReesZero,
    ReesSimple,
    Regular,
}

#[derive(Subcommand)]
enum Command {
    /// Rewrite a word to normal form, printing every step.
    Normalize {
        presentation: PathBuf,
        /// Space-separated letters.
        word: String,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Check local confluence and/or termination on a word ball.
    Check {
        presentation: PathBuf,
        #[arg(long)]
        confluence: bool,
        /// Check that every rewrite decreases the order on words up to this length.
        #[arg(long, value_name = "L")]
        termination_ball: Option<usize>,
        /// length, adjoin-zero, ideal-extension or rees.
        #[arg(long, default_value = "length")]
        certificate: String,
        /// Small alphabet for the ideal-extension and rees orders (space-separated).
        #[arg(long, default_value = "")]
        small: String,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value_t = MAX_BALL_WORDS)]
        word_limit: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Build a complete system and check it.
    Construct {
        #[arg(value_enum)]
        kind: Kind,
        /// Presentation (adjoin-zero), Cayley table (ideal-extension, regular) or Rees datum.
        input: PathBuf,
        /// Word for the zero element (adjoin-zero).
        #[arg(long)]
        zero: Option<String>,
        /// Elements of the ideal, space-separated (ideal-extension).
        #[arg(long)]
        ideal: Option<String>,
        /// Subgroup system for an idempotent, as NAME=PATH (regular; repeatable).
        #[arg(long = "subgroup", value_name = "NAME=PATH")]
        subgroups: Vec<String>,
        /// Longest words in the termination ball.
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long)]
        no_verify: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Compare a construction's witness multiplication with a Cayley table.
    Verify { construction: PathBuf, table: PathBuf },
}

/// Exit status paired with a message for standard error.
struct Failure(u8, String);

impl Failure {
    fn input(msg: impl std::fmt::Display) -> Self {
        Failure(2, msg.to_string())
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::SelfCheck(_) => Failure(1, e.to_string()),
            ConstructionError::Rewrite(RewriteError::BudgetExhausted { .. }) => Failure(1, e.to_string()),
            _ => Failure(2, e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_presentation(path: &Path) -> Result<RewritingSystem, Failure> {
    RewritingSystem::parse(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_table(path: &Path) -> Result<FiniteSemigroup, Failure> {
    FiniteSemigroup::from_json(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    let result = match cli.command {
        Command::Normalize {
            presentation,
            word,
            budget,
        } => normalize(&mut out, &presentation, &word, budget),
        Command::Check {
            presentation,
            confluence,
            termination_ball,
            certificate,
            small,
            budget,
            word_limit,
            format,
        } => check(
            &mut out,
            &presentation,
            CheckFlags {
                confluence,
                termination_ball,
                certificate,
                small,
                budget,
                word_limit,
                format,
            },
        ),
        Command::Construct {
            kind,
            input,
            zero,
            ideal,
            subgroups,
            max_len,
            no_verify,
            output,
        } => construct(
            &mut out,
            kind,
            &input,
            ConstructFlags {
                zero,
                ideal,
                subgroups,
                max_len,
                no_verify,
                output,
            },
        ),
        Command::Verify { construction, table } => verify(&mut out, &construction, &table),
    };
    let _ = out.flush();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn normalize(out: &mut impl std::io::Write, path: &Path, word: &str, budget: usize) -> Result<u8, Failure> {
    let sys = load_presentation(path)?;
    let w = sys.parse_word(word).map_err(Failure::input)?;
    let (trace, code) = match sys.normalize(&w, budget) {
        Ok(trace) => (trace, 0),
        Err(RewriteError::BudgetExhausted { partial, budget }) => {
            eprintln!("step budget of {budget} exhausted");
            (*partial, 1)
        }
        Err(e) => return Err(Failure::input(e)),
    };
    for (k, step) in trace.steps.iter().enumerate() {
        let next = trace.steps.get(k + 1).map_or(&trace.final_word, |s| &s.word);
        let _ = writeln!(
            out,
            "{} →[rule {} @ pos {}] {}",
            sys.render(&step.word),
            step.rule,
            step.position,
            sys.render(next)
        );
    }
    let _ = writeln!(out, "final: {}", sys.render(&trace.final_word));
    Ok(code)
}

struct CheckFlags {
    confluence: bool,
    termination_ball: Option<usize>,
    certificate: String,
    small: String,
    budget: usize,
    word_limit: usize,
    format: Format,
}

fn check(out: &mut impl std::io::Write, path: &Path, flags: CheckFlags) -> Result<u8, Failure> {
    if let Some(l) = flags.termination_ball {
        if l == 0 || l > MAX_BALL_LEN {
            return Err(Failure::input(format!("--termination-ball must be between 1 and {MAX_BALL_LEN}")));
        }
    }
    if flags.word_limit == 0 || flags.word_limit > MAX_BALL_WORDS {
        return Err(Failure::input(format!("--word-limit must be between 1 and {MAX_BALL_WORDS}")));
    }
    if flags.budget == 0 {
        return Err(Failure::input("--budget must be positive"));
    }
    let sys = load_presentation(path)?;
    let certificate = Certificate::parse(&format!("{} small: {}", flags.certificate, flags.small))
        .map_err(Failure::input)?;
    if !matches!(certificate, Certificate::IdealExtension { .. } | Certificate::Rees { .. }) && !flags.small.is_empty() {
        return Err(Failure::input("--small only applies to the ideal-extension and rees certificates"));
    }
    let comparator = certificate.comparator(&sys).map_err(Failure::input)?;
    let run_confluence = flags.confluence || flags.termination_ball.is_none();
    let json = flags.format == Format::Json;
    let mut ok = true;
    let report = run_confluence.then(|| check_local_confluence(&sys, flags.budget));
    if let Some(report) = &report {
        let text = if json { report.to_json_lines(&sys) } else { report.render(&sys) };
        let _ = write!(out, "{text}");
        ok &= report.all_resolved();
    }
    if let Some(l) = flags.termination_ball {
        let ball = verify_decrease_on_ball(&sys, &comparator, l, flags.word_limit);
        let text = if json { ball.to_json_lines(&sys) } else { ball.render(&sys) };
        let _ = write!(out, "{text}");
        ok &= ball.holds() && !ball.truncated;
        if let Some(report) = &report {
            let verdict = completeness_verdict(&TerminationEvidence::Ball(ball), report);
            write_verdict(out, verdict, json);
            ok &= verdict == Verdict::CompleteCertifiedAtScale;
        }
    }
    Ok(if ok { 0 } else { 1 })
}

fn write_verdict(out: &mut impl std::io::Write, verdict: Verdict, json: bool) {
    if json {
        let rec = serde_json::json!({"type": "verdict", "verdict": verdict.to_string()});
        let _ = writeln!(out, "{rec}");
    } else {
        let _ = writeln!(out, "verdict: {verdict}");
    }
}

struct ConstructFlags {
    zero: Option<String>,
    ideal: Option<String>,
    subgroups: Vec<String>,
    max_len: usize,
    no_verify: bool,
    output: Option<PathBuf>,
}

fn construct(out: &mut impl std::io::Write, kind: Kind, input: &Path, flags: ConstructFlags) -> Result<u8, Failure> {
    if flags.max_len == 0 || flags.max_len > MAX_BALL_LEN {
        return Err(Failure::input(format!("--max-len must be between 1 and {MAX_BALL_LEN}")));
    }
    if kind != Kind::AdjoinZero && flags.zero.is_some() {
        return Err(Failure::input("--zero only applies to adjoin-zero"));
    }
    if kind != Kind::IdealExtension && flags.ideal.is_some() {
        return Err(Failure::input("--ideal only applies to ideal-extension"));
    }
    if kind != Kind::Regular && !flags.subgroups.is_empty() {
        return Err(Failure::input("--subgroup only applies to regular"));
    }
    let verify_options = VerifyOptions {
        max_len: flags.max_len,
        ..VerifyOptions::default()
    };
    // the table the witness must reproduce, when one exists
    let (built, table): (ConstructionOutput, Option<FiniteSemigroup>) = match kind {
        Kind::AdjoinZero => {
            let sys = load_presentation(input)?;
            let zero = flags.zero.ok_or_else(|| Failure::input("adjoin-zero needs --zero"))?;
            let z = sys.parse_word(&zero).map_err(Failure::input)?;
            (adjoin_zero(&sys, &z, &[])?, None)
        }
        Kind::IdealExtension => {
            let s = load_table(input)?;
            let ideal = flags.ideal.ok_or_else(|| Failure::input("ideal-extension needs --ideal"))?;
            let elements = ideal
                .split_whitespace()
                .map(|n| s.index_of(n))
                .collect::<Result<Vec<_>, _>>()
                .map_err(Failure::input)?;
            if elements.is_empty() {
                return Err(Failure::input("--ideal lists no elements"));
            }
            (ideal_extension_from_table(&s, &elements)?, Some(s))
        }
        Kind::ReesZero | Kind::ReesSimple => {
            let base = input.parent().unwrap_or(Path::new("."));
            let datum = ReesDatum::from_json(&read(input)?, base)?;
            if kind == Kind::ReesZero {
                (rees_zero(&datum)?, Some(rees_semigroup(&datum, true)?))
            } else {
                (rees_simple(&datum)?, Some(rees_semigroup(&datum, false)?))
            }
        }
        Kind::Regular => {
            let s = load_table(input)?;
            let mut options = PipelineOptions {
                verify: verify_options,
                ..PipelineOptions::default()
            };
            for spec in &flags.subgroups {
                let (name, path) = spec
                    .split_once('=')
                    .ok_or_else(|| Failure::input(format!("--subgroup {spec:?} is not NAME=PATH")))?;
                let sub = SubgroupSystem::parse(&read(Path::new(path))?)?;
                options.overrides.insert(name.to_string(), sub);
            }
            let (built, _) = regular_pipeline(&s, &options)?;
            (built, Some(s))
        }
    };
    let text = built.to_text();
    match &flags.output {
        Some(path) => fs::write(path, &text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
        None => {
            let _ = write!(out, "{text}");
        }
    }
    if flags.no_verify {
        return Ok(0);
    }
    let completeness = check_completeness(&built.system, &built.certificate, &verify_options)?;
    let mut ok = completeness.verdict == Verdict::CompleteCertifiedAtScale;
    eprintln!("verdict: {}", completeness.verdict);
    if !ok {
        eprint!("{}", completeness.confluence.render(&built.system));
        if let TerminationEvidence::Ball(ball) = &completeness.termination {
            eprint!("{}", ball.render(&built.system));
        }
    }
    if let Some(s) = &table {
        let table_check = verify_against_table(&built, s)?;
        eprint!("{}", render_table_check(&table_check));
        ok &= table_check.holds();
    } else {
        let (reducible, shared) = built.witness_defects();
        ok &= reducible.is_empty() && shared.is_empty();
    }
    Ok(if ok { 0 } else { 1 })
}

fn render_table_check(check: &TableCheck) -> String {
    let mut text = String::new();
    for name in &check.missing {
        text.push_str(&format!("MISSING {name}\n"));
    }
    for name in &check.reducible {
        text.push_str(&format!("REDUCIBLE {name}\n"));
    }
    for (a, b) in &check.shared {
        text.push_str(&format!("SHARED {a} {b}\n"));
    }
    for (x, y, expected, got) in &check.failures {
        text.push_str(&format!("FAIL {x} * {y}: expected {expected} got {got}\n"));
    }
    text.push_str(&format!(
        "products={} passed={}\n",
        check.checked,
        check.checked - check.failures.len()
    ));
    text
}

fn verify(out: &mut impl std::io::Write, construction: &Path, table: &Path) -> Result<u8, Failure> {
    let built = ConstructionOutput::parse(&read(construction)?)
        .map_err(|e| Failure::input(format!("{}: {e}", construction.display())))?;
    let s = load_table(table)?;
    let check = verify_against_table(&built, &s)?;
    if !check.missing.is_empty() {
        return Err(Failure::input(format!("witness lacks elements: {}", check.missing.join(" "))));
    }
    let _ = write!(out, "{}", render_table_check(&check));
    Ok(if check.holds() { 0 } else { 1 })
}
