//! The `xmlkr` command line: validate, query, export and stats.
//!
//! Exit codes: 0 success, 1 semantic error, 2 input or I/O error. Data goes
//! to stdout and diagnostics to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::Stats;
use crate::codec::{self, SerializationMode};
use crate::model::{validate, KnowledgeBase};
use crate::query;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SEMANTIC: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "xmlkr", version, about = "Inspect and convert XMLKR knowledge bases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report undefined references and cycles, self-loops included.
    Validate {
        file: PathBuf,
        /// Treat objects that are referenced but never defined as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Run one query and print the result rows.
    Query {
        file: PathBuf,
        #[arg(long = "q", value_name = "QUERY")]
        q: String,
    },
    /// Write the knowledge base back out in canonical form.
    Export {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Object to expand from; required for nested mode.
        #[arg(long)]
        root: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print object, attribute, edge and cycle counts.
    Stats { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Flat,
    Nested,
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli.command, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ =
                if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            code
        }
    }
}

fn load(path: &Path, err: &mut dyn Write) -> Result<KnowledgeBase, i32> {
    let bytes = std::fs::read(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
        EXIT_INPUT
    })?;
    codec::parse_document_bytes(&bytes).map(|(kb, _)| kb).map_err(|e| {
        let _ = writeln!(err, "error: {}: {e}", path.display());
        EXIT_INPUT
    })
}

pub fn run(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match command {
        Command::Validate { file, strict } => cmd_validate(&file, strict, out, err),
        Command::Query { file, q } => cmd_query(&file, &q, out, err),
        Command::Export { file, mode, root, out: path } => {
            cmd_export(&file, mode, root.as_deref(), path.as_deref(), out, err)
        }
        Command::Stats { file } => cmd_stats(&file, out, err),
    };
    match result {
        Ok(code) | Err(code) => code,
    }
}

fn write_out(out: &mut dyn Write, text: &str, err: &mut dyn Write) -> Result<(), i32> {
    out.write_all(text.as_bytes()).and_then(|()| out.flush()).map_err(|e| {
        let _ = writeln!(err, "error: cannot write output: {e}");
        EXIT_INPUT
    })
}

pub fn cmd_validate(file: &Path, strict: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, i32> {
    let kb = load(file, err)?;
    let report = validate(&kb, strict);
    let text: String = report.findings.iter().map(|f| format!("{f}\n")).collect();
    write_out(out, &text, err)?;
    Ok(if report.has_errors() { EXIT_SEMANTIC } else { EXIT_OK })
}

pub fn cmd_query(file: &Path, text: &str, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, i32> {
    let kb = load(file, err)?;
    match query::run(&kb, text) {
        Ok(result) => {
            write_out(out, &result.to_string(), err)?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            Err(EXIT_SEMANTIC)
        }
    }
}

pub fn cmd_export(
    file: &Path,
    mode: Mode,
    root: Option<&str>,
    out_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, i32> {
    let mode = match (mode, root) {
        (Mode::Flat, _) => SerializationMode::Flat,
        (Mode::Nested, Some(root)) => SerializationMode::Nested { root: root.to_owned() },
        (Mode::Nested, None) => {
            let _ = writeln!(err, "error: --mode nested requires --root <name>");
            return Err(EXIT_INPUT);
        }
    };
    let kb = load(file, err)?;
    let doc = codec::serialize(&kb, &mode).map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_SEMANTIC
    })?;
    match out_path {
        Some(path) => std::fs::write(path, doc).map_err(|e| {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            EXIT_INPUT
        })?,
        None => write_out(out, &doc, err)?,
    }
    Ok(EXIT_OK)
}

pub fn cmd_stats(file: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, i32> {
    let kb = load(file, err)?;
    write_out(out, &format!("{}\n", Stats::collect(&kb)), err)?;
    Ok(EXIT_OK)
}
