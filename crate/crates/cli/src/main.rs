//! Command line front end: checking, elaboration, meta-level lemma
//! verification, finite-model interpretation, and corpus dumping.
//!
//! Machine-readable output goes to stdout; human diagnostics go to stderr.
//! Exit codes: 0 success, 1 failed check or lemma, 2 parse error, 3 usage
//! error (bad arguments, missing files, unknown names or models).

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use cohcheck::check::{
    check_program_with, CheckReport, SymbolTable, Verdict,
};
use cohcheck::corpus;
use cohcheck::glob::{check_decl_semantics, Model};
use cohcheck::mltt::check_diagonal_lemmas;
use cohcheck::parse::parse_program;
use cohcheck::syntax::Name;
use serde_json::json;

const EXIT_CHECK: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_USAGE: u8 = 3;

/// Environment budget for the exhaustive interpreter.
const ENV_BUDGET: usize = 10_000;

#[derive(Parser)]
#[command(name = "cohcheck", version, about = "Type checker for coherence operations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Typecheck declarations (the embedded corpus when no files are given).
    Check {
        files: Vec<PathBuf>,
        /// Emit one JSON report array on stdout.
        #[arg(long)]
        json: bool,
        /// Stop at the first failing declaration.
        #[arg(long)]
        fail_fast: bool,
        /// Restrict output to one declaration.
        #[arg(long)]
        decl: Option<String>,
    },
    /// Elaborate coherences and print their normal forms at the diagonal.
    Elaborate {
        files: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        decl: Option<String>,
    },
    /// Verify the diagonal lemmas and print a summary table.
    Meta {
        files: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        decl: Option<String>,
    },
    /// Interpret declarations in a finite model and check the semantic
    /// lemmas exhaustively.
    Interp {
        /// Model descriptor, e.g. discrete:2 or codiscrete:3.
        #[arg(long)]
        model: String,
        files: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        decl: Option<String>,
    },
    /// Write the embedded corpus to stdout.
    DumpCorpus,
}

/// Writes machine output to stdout; a closed pipe ends the process quietly.
fn emit(s: std::fmt::Arguments<'_>) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if out.write_fmt(s).is_err() {
        std::process::exit(0);
    }
}

macro_rules! outln {
    () => { emit(format_args!("\n")) };
    ($($arg:tt)*) => { emit(format_args!("{}\n", format!($($arg)*))) };
}

macro_rules! out {
    ($($arg:tt)*) => { emit(format_args!($($arg)*)) };
}

fn color_enabled() -> bool {
    std::env::var("COHCHECK_COLOR").is_ok_and(|v| v == "1")
}

fn paint(s: &str, code: &str) -> String {
    if color_enabled() {
        format!("\x1b[{code}m{s}\x1b[0m")
    } else {
        s.to_string()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                out!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

/// Parses and checks the given files, or loads the embedded corpus.
fn load(
    files: &[PathBuf],
    fail_fast: bool,
) -> Result<(SymbolTable, Vec<CheckReport>), u8> {
    if files.is_empty() {
        return Ok(corpus::load());
    }
    let mut table = SymbolTable::new();
    let mut reports = Vec::new();
    for path in files {
        let text = std::fs::read_to_string(path).map_err(|e| {
            eprintln!("{}: {}: {e}", paint("error", "31"), path.display());
            EXIT_USAGE
        })?;
        let name = path.display().to_string();
        let program = parse_program(&text, &name).map_err(|e| {
            eprintln!("{}: {e}", paint("parse error", "31"));
            EXIT_PARSE
        })?;
        reports.extend(check_program_with(&mut table, &program, fail_fast));
        if fail_fast && reports.last().is_some_and(|r| r.status == Verdict::Error) {
            break;
        }
    }
    Ok((table, reports))
}

/// Applies `--decl`, verifying that the name exists.
fn select<'a, T>(
    items: &'a [T],
    decl: &Option<String>,
    name_of: impl Fn(&T) -> &Name,
) -> Result<Vec<&'a T>, u8> {
    match decl {
        None => Ok(items.iter().collect()),
        Some(wanted) => {
            let picked: Vec<&T> = items
                .iter()
                .filter(|i| name_of(i).as_str() == wanted)
                .collect();
            if picked.is_empty() {
                eprintln!("{}: unknown declaration {wanted}", paint("error", "31"));
                return Err(EXIT_USAGE);
            }
            Ok(picked)
        }
    }
}

fn report_errors_to_stderr(reports: &[&CheckReport]) {
    for r in reports {
        match r.status {
            Verdict::Ok => eprintln!(
                "{} {} (dim {}, depth {})",
                paint("ok", "32"),
                r.decl,
                r.dim,
                r.depth
            ),
            Verdict::Error => {
                for d in &r.diagnostics {
                    match &d.span {
                        Some(span) => eprintln!(
                            "{} {}: [{}] {} at {span}",
                            paint("error", "31"),
                            r.decl,
                            d.code,
                            d.message
                        ),
                        None => eprintln!(
                            "{} {}: [{}] {}",
                            paint("error", "31"),
                            r.decl,
                            d.code,
                            d.message
                        ),
                    }
                }
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), u8> {
    match cli.cmd {
        Cmd::Check {
            files,
            json,
            fail_fast,
            decl,
        } => {
            let (_, reports) = load(&files, fail_fast)?;
            let picked = select(&reports, &decl, |r| &r.decl)?;
            if json {
                let owned: Vec<&CheckReport> = picked.clone();
                outln!("{}", serde_json::to_string(&owned).unwrap());
            }
            report_errors_to_stderr(&picked);
            if picked.iter().any(|r| r.status == Verdict::Error) {
                return Err(EXIT_CHECK);
            }
            Ok(())
        }

        Cmd::Elaborate { files, json, decl } => {
            let (table, reports) = load(&files, false)?;
            fail_on_errors(&reports)?;
            let entries: Vec<_> = table
                .iter()
                .filter(|e| matches!(e.kind, cohcheck::check::DeclKind::Coh))
                .cloned()
                .collect();
            let picked = select(&entries, &decl, |e| &e.name)?;
            let mut rows = Vec::new();
            for entry in picked {
                let report =
                    check_diagonal_lemmas(&entry.ctx, &entry.ty, &entry.name).map_err(|e| {
                        eprintln!("{}: {e}", paint("error", "31"));
                        EXIT_CHECK
                    })?;
                rows.push(report);
            }
            if json {
                let arr: Vec<_> = rows
                    .iter()
                    .map(|r| {
                        json!({
                            "decl": r.decl.as_str(),
                            "dim": r.dim,
                            "term": r.term_nf,
                            "type": r.type_nf,
                            "terms_checked": r.terms_checked,
                            "morphisms_checked": r.mors_checked,
                        })
                    })
                    .collect();
                outln!("{}", serde_json::to_string(&arr).unwrap());
            } else {
                for r in &rows {
                    outln!(
                        "{}: {} : {} ({} terms, {} morphisms)",
                        r.decl, r.term_nf, r.type_nf, r.terms_checked, r.mors_checked
                    );
                }
            }
            Ok(())
        }

        Cmd::Meta { files, json, decl } => {
            let (table, reports) = load(&files, false)?;
            fail_on_errors(&reports)?;
            let entries: Vec<_> = table
                .iter()
                .filter(|e| matches!(e.kind, cohcheck::check::DeclKind::Coh))
                .cloned()
                .collect();
            let picked = select(&entries, &decl, |e| &e.name)?;
            let mut rows = Vec::new();
            for entry in picked {
                let report =
                    check_diagonal_lemmas(&entry.ctx, &entry.ty, &entry.name).map_err(|e| {
                        eprintln!("{}: {e}", paint("error", "31"));
                        EXIT_CHECK
                    })?;
                rows.push(report);
            }
            if json {
                let arr: Vec<_> = rows
                    .iter()
                    .map(|r| {
                        json!({
                            "decl": r.decl.as_str(),
                            "dim": r.dim,
                            "normal-form": r.term_nf,
                        })
                    })
                    .collect();
                outln!("{}", serde_json::to_string(&arr).unwrap());
            } else {
                outln!("decl\tdim\tnormal-form");
                for r in &rows {
                    outln!("{}\t{}\t{}", r.decl, r.dim, r.term_nf);
                }
            }
            Ok(())
        }

        Cmd::Interp {
            model,
            files,
            json,
            decl,
        } => {
            let model = Model::from_str(&model).map_err(|e| {
                eprintln!("{}: {e}", paint("error", "31"));
                EXIT_USAGE
            })?;
            let (table, reports) = load(&files, false)?;
            fail_on_errors(&reports)?;
            let entries: Vec<_> = table.iter().cloned().collect();
            let picked = select(&entries, &decl, |e| &e.name)?;
            let mut rows = Vec::new();
            for entry in picked {
                let report = check_decl_semantics(model, entry, ENV_BUDGET).map_err(|e| {
                    eprintln!("{}: {e}", paint("error", "31"));
                    EXIT_CHECK
                })?;
                rows.push(report);
            }
            if json {
                let arr: Vec<_> = rows
                    .iter()
                    .map(|r| {
                        json!({
                            "decl": r.decl.as_str(),
                            "model": r.model.to_string(),
                            "envs": r.envs,
                            "checks": r.checks,
                        })
                    })
                    .collect();
                outln!("{}", serde_json::to_string(&arr).unwrap());
            } else {
                for r in &rows {
                    outln!(
                        "{} [{}]: {} environments, {} checks",
                        r.decl, r.model, r.envs, r.checks
                    );
                }
            }
            Ok(())
        }

        Cmd::DumpCorpus => {
            for (i, (name, text)) in corpus::FILES.iter().enumerate() {
                if i > 0 {
                    outln!();
                }
                outln!("-- file: {name}");
                out!("{text}");
            }
            Ok(())
        }
    }
}

/// Prints failing reports and aborts if the check phase found errors.
fn fail_on_errors(reports: &[CheckReport]) -> Result<(), u8> {
    let bad: Vec<&CheckReport> = reports
        .iter()
        .filter(|r| r.status == Verdict::Error)
        .collect();
    if bad.is_empty() {
        return Ok(());
    }
    report_errors_to_stderr(&bad);
    Err(EXIT_CHECK)
}
