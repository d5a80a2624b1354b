//! The `proofgram` command line.
//!
//! Exit status: 0 success, 1 semantic failure (invalid proof, lemma
//! violation, failed end-to-end check), 2 input error, 3 resource limit.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::analysis::{
    canonicity_checks, check_redex, end_to_end_check, show_tuple, CanonicityCheck, EndToEnd, Expected,
    PreservationCheck, Verdict,
};
use crate::error::Error;
use crate::formula::Sequent;
use crate::grammar::{extract_grammar, language_of, Language, Mode};
use crate::instance::{corpus_files, Instance};
use crate::kernel::{check_proof, print_problem};
use crate::reduce::{applicable_reductions, eliminate_cuts, Elimination, Strategy};

pub const DEFAULT_LIMIT: usize = 100_000;
/// Random first arguments tried per proof by `verify`.
pub const CANONICITY_SAMPLES: usize = 20;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SEMANTIC: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "proofgram", version, about = "Proof grammars for LK proofs with Pi2/Sigma2 cuts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a proof file.
    Check(Opts),
    /// Print the grammar of a proof.
    Grammar(Opts),
    /// Print the language of a proof.
    Language(Opts),
    /// Eliminate all cuts, printing the reduction trace.
    #[command(alias = "reduce")]
    Eliminate(Opts),
    /// Check every reduction of a proof, or of each proof in a directory,
    /// against the language relation it should preserve.
    Verify(Opts),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// Newline-delimited JSON records.
    #[value(alias = "json")]
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    #[value(alias = "cs")]
    ContextSensitive,
    #[value(alias = "cf")]
    ContextFree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    WeakFirst,
    Restricted,
    Unrestricted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExpectArg {
    Equal,
    SubsetOrEqual,
    NoGuarantee,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// A proof file, or for `verify` also a directory of `.proof` files.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "context-sensitive")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "weak-first")]
    strategy: StrategyArg,
    /// Maximum number of reduction steps.
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where `eliminate` writes the cut-free proof.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the expected relation of every redex (`verify` only).
    #[arg(long, value_enum, hide = true)]
    expect: Option<ExpectArg>,
}

impl Opts {
    fn mode(&self) -> Mode {
        match self.mode {
            ModeArg::ContextSensitive => Mode::ContextSensitive,
            ModeArg::ContextFree => Mode::ContextFree,
        }
    }

    fn strategy(&self) -> Strategy {
        match self.strategy {
            StrategyArg::WeakFirst => Strategy::WeakFirst,
            StrategyArg::Restricted => Strategy::Restricted,
            StrategyArg::Unrestricted => Strategy::Unrestricted,
        }
    }

    fn expect(&self) -> Option<Expected> {
        self.expect.map(|e| match e {
            ExpectArg::Equal => Expected::Equal,
            ExpectArg::SubsetOrEqual => Expected::SubsetOrEqual,
            ExpectArg::NoGuarantee => Expected::NoGuarantee,
        })
    }

    fn structured(&self) -> bool {
        self.format == Format::Structured
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Io(_) | Error::Signature(_) => EXIT_INPUT,
        Error::RewriteBudget(_) | Error::StepLimit(_) => EXIT_LIMIT,
        _ => EXIT_SEMANTIC,
    }
}

/// What a command produced: text for stdout, diagnostics and a status.
struct Outcome {
    out: String,
    err: String,
    code: i32,
}

impl Outcome {
    fn new() -> Self {
        Outcome { out: String::new(), err: String::new(), code: EXIT_OK }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    fn record(&mut self, v: Value) {
        self.line(v.to_string());
    }

    fn fail(&mut self, e: &Error) {
        let _ = writeln!(self.err, "error: {e}");
        self.code = self.code.max(exit_code(e));
    }
}

/// Runs the command line `args` (program name first), writing to `out` and
/// `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Check(o) => cmd_check(o),
        Command::Grammar(o) => cmd_grammar(o),
        Command::Language(o) => cmd_language(o),
        Command::Eliminate(o) => cmd_eliminate(o),
        Command::Verify(o) => cmd_verify(o),
    };
    let _ = out.write_all(outcome.out.as_bytes());
    let _ = err.write_all(outcome.err.as_bytes());
    outcome.code
}

fn load_valid(path: &Path) -> Result<Instance, Error> {
    Instance::load(path)?.validated()
}

fn cmd_check(o: &Opts) -> Outcome {
    let mut r = Outcome::new();
    let inst = match Instance::load(&o.input) {
        Ok(i) => i,
        Err(e) => {
            r.fail(&e);
            return r;
        }
    };
    let p = &inst.proof;
    let violations = check_proof(p, Some(&inst.signature));
    if o.structured() {
        r.record(json!({
            "proof": inst.name,
            "valid": violations.is_empty(),
            "end_sequent": p.conclusion.to_string(),
            "size": p.size(),
            "cuts": p.cut_count(),
            "violations": violations,
        }));
    } else if violations.is_empty() {
        r.line(format!("{}: valid, {} inference(s), {} cut(s)", inst.name, p.size(), p.cut_count()));
        r.line(format!("  ⊢ {}", p.conclusion));
    } else {
        r.line(format!("{}: INVALID, {} violation(s)", inst.name, violations.len()));
        for v in &violations {
            r.line(format!("  {v}"));
        }
    }
    if !violations.is_empty() {
        r.code = EXIT_SEMANTIC;
    }
    r
}

fn cmd_grammar(o: &Opts) -> Outcome {
    let mut r = Outcome::new();
    let g = match load_valid(&o.input).and_then(|i| extract_grammar(&i.proof, o.mode())) {
        Ok(g) => g,
        Err(e) => {
            r.fail(&e);
            return r;
        }
    };
    for prods in g.productions.values() {
        for p in prods {
            if o.structured() {
                let params: Vec<String> = p.params.iter().map(ToString::to_string).collect();
                r.record(json!({
                    "nonterminal": p.lhs.to_string(),
                    "params": params,
                    "rhs": p.rhs.to_string(),
                    "type": g.nonterminals[&p.lhs].ty().to_string(),
                }));
            } else {
                r.line(p.to_string());
            }
        }
    }
    r
}

fn cmd_language(o: &Opts) -> Outcome {
    let mut r = Outcome::new();
    let result = load_valid(&o.input).and_then(|i| Ok((language_of(&i.proof, o.mode())?, i)));
    let (lang, inst) = match result {
        Ok(x) => x,
        Err(e) => {
            r.fail(&e);
            return r;
        }
    };
    r.out.push_str(&render_language(&inst.proof.conclusion, &lang, o.structured()));
    r
}

/// One block per end formula, its tuples sorted; an index without tuples is
/// shown as `(empty)`, or as an `"empty": true` record.
pub fn render_language(end_sequent: &Sequent, lang: &Language, structured: bool) -> String {
    let mut r = Outcome::new();
    for (i, f) in end_sequent.0.iter().enumerate() {
        let tuples: Vec<&Vec<_>> = lang.iter().filter(|(k, _)| *k == i).map(|(_, t)| t).collect();
        if structured {
            if tuples.is_empty() {
                r.record(json!({ "index": i, "terms": Value::Null, "empty": true }));
            }
            for t in tuples {
                r.record(json!({ "index": i, "terms": t }));
            }
        } else {
            r.line(format!("{i}: {f}"));
            if tuples.is_empty() {
                r.line("  (empty)");
            }
            for t in tuples {
                r.line(format!("  {}", show_tuple(&(i, t.clone()))));
            }
        }
    }
    r.out
}

fn report_elimination(r: &mut Outcome, o: &Opts, run: &Elimination) {
    let mut skipped = run.skipped.iter().peekable();
    for step in &run.trace {
        while let Some(s) = skipped.next_if(|s| s.step <= step.step) {
            if o.structured() {
                r.record(json!({ "skipped": s }));
            } else {
                r.line(format!("      skipped {}: {}", s.redex, s.reason));
            }
        }
        if o.structured() {
            r.record(json!({
                "step": step.step,
                "path": step.redex.path,
                "kind": step.redex.kind,
                "side": step.redex.side,
                "size": step.size,
                "cuts": step.cuts,
            }));
        } else {
            r.line(step.to_string());
        }
    }
    for s in skipped {
        if o.structured() {
            r.record(json!({ "skipped": s }));
        } else {
            r.line(format!("      skipped {}: {}", s.redex, s.reason));
        }
    }
}

fn cmd_eliminate(o: &Opts) -> Outcome {
    let mut r = Outcome::new();
    let inst = match load_valid(&o.input) {
        Ok(i) => i,
        Err(e) => {
            r.fail(&e);
            return r;
        }
    };
    let run = match eliminate_cuts(&inst.proof, o.strategy(), o.limit) {
        Ok(run) => run,
        Err(stop) => {
            report_elimination(&mut r, o, &stop.partial);
            r.fail(&stop.error);
            return r;
        }
    };
    report_elimination(&mut r, o, &run);
    let text = print_problem(&inst.name, &inst.signature, &run.proof);
    if o.structured() {
        r.record(json!({
            "result": inst.name,
            "strategy": run.strategy,
            "steps": run.trace.len(),
            "skipped": run.skipped.len(),
            "size": run.proof.size(),
            "cuts": run.proof.cut_count(),
        }));
    } else {
        r.line(format!(
            "{}: cut-free after {} step(s) under {}, size {}",
            inst.name,
            run.trace.len(),
            run.strategy,
            run.proof.size()
        ));
    }
    match &o.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                r.fail(&Error::Io(format!("{}: {e}", path.display())));
            }
        }
        None if !o.structured() => r.out.push_str(&text),
        None => {}
    }
    r
}

/// Everything `verify` found for one file.
struct FileReport {
    name: String,
    checks: Vec<PreservationCheck>,
    end_to_end: Option<EndToEnd>,
    canonicity: Vec<CanonicityCheck>,
    error: Option<Error>,
}

fn verify_file(path: &Path, o: &Opts) -> FileReport {
    let mut rep = FileReport {
        name: path.display().to_string(),
        checks: Vec::new(),
        end_to_end: None,
        canonicity: Vec::new(),
        error: None,
    };
    let result = (|| -> Result<(), Error> {
        let inst = load_valid(path)?;
        rep.name = inst.name.clone();
        let p = &inst.proof;
        let before = language_of(p, o.mode())?;
        for redex in applicable_reductions(p) {
            rep.checks.push(check_redex(&inst.name, p, &before, &redex, o.mode(), o.expect())?);
        }
        rep.end_to_end = Some(end_to_end_check(&inst.name, p, o.strategy(), o.limit, o.mode())?);
        rep.canonicity = canonicity_checks(&inst.name, p, o.mode(), o.seed, CANONICITY_SAMPLES)?;
        Ok(())
    })();
    rep.error = result.err();
    rep
}

fn cmd_verify(o: &Opts) -> Outcome {
    let mut r = Outcome::new();
    let files = if o.input.is_dir() {
        match corpus_files(&o.input) {
            Ok(f) => f,
            Err(e) => {
                r.fail(&e);
                return r;
            }
        }
    } else {
        vec![o.input.clone()]
    };
    if files.is_empty() {
        let _ = writeln!(r.err, "warning: no .proof files in {}; zero checks run", o.input.display());
    }
    let reports: Vec<FileReport> = files.par_iter().map(|f| verify_file(f, o)).collect();
    let (mut checks, mut violations, mut e2e_failures, mut canon_failures) = (0, 0, 0, 0);
    for rep in &reports {
        for c in &rep.checks {
            checks += 1;
            if c.verdict == Verdict::Violation {
                violations += 1;
            }
            if o.structured() {
                r.record(json!({ "check": c }));
            } else {
                r.line(c.to_string());
            }
        }
        if let Some(e) = &rep.end_to_end {
            if !e.passed() {
                e2e_failures += 1;
            }
            if o.structured() {
                r.record(json!({ "end_to_end": e }));
            } else {
                r.line(e.to_string());
            }
        }
        if !rep.canonicity.is_empty() {
            let bad: Vec<&CanonicityCheck> = rep.canonicity.iter().filter(|c| !c.equal).collect();
            canon_failures += bad.len();
            if o.structured() {
                r.record(json!({
                    "canonicity": { "proof": rep.name, "samples": rep.canonicity.len(), "failures": bad },
                }));
            } else {
                r.line(format!(
                    "{}  canonicity: {}/{} random first argument(s) agree",
                    rep.name,
                    rep.canonicity.len() - bad.len(),
                    rep.canonicity.len()
                ));
                for c in bad {
                    r.line(format!("  MISMATCH at σ[{}:{}] with {}", c.node, c.index, c.first));
                }
            }
        }
        if let Some(e) = &rep.error {
            let _ = writeln!(r.err, "error: {}: {e}", rep.name);
            r.code = r.code.max(exit_code(e));
        }
    }
    let errors = reports.iter().filter(|rep| rep.error.is_some()).count();
    if o.structured() {
        r.record(json!({
            "summary": {
                "proofs": reports.len(),
                "checks": checks,
                "violations": violations,
                "end_to_end_failures": e2e_failures,
                "canonicity_failures": canon_failures,
                "errors": errors,
            }
        }));
    } else {
        r.line(format!(
            "summary: {} proof(s), {checks} redex check(s), {violations} violation(s), \
             {e2e_failures} end-to-end failure(s), {canon_failures} canonicity failure(s), {errors} error(s)",
            reports.len()
        ));
    }
    if violations + e2e_failures + canon_failures > 0 {
        r.code = r.code.max(EXIT_SEMANTIC);
    }
    r
}
