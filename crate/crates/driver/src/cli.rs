//! `natprog` command line.
//!
//! Exit status is 0 on success, 1 when language diagnostics or a runtime
//! error were reported, and 2 for usage and I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use natprog_core::interpreter::{run_with_sink, InputProvider, OutputSink, ScriptedInput, DEFAULT_STEP_LIMIT};
use natprog_core::templates::{self, TemplateInstance};
use natprog_core::{codegen, format_diagnostic, Diagnostic};

pub const EXIT_OK: u8 = 0;
pub const EXIT_DIAGNOSTICS: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "natprog", version, about = "Compile, run and generate natural-language programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a program and print its C# translation.
    Compile {
        file: PathBuf,
        /// Write the translation here instead of standard output.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Interpret a program.
    Run {
        file: PathBuf,
        /// Input values, one per line. Defaults to standard input.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_STEP_LIMIT, value_parser = clap::value_parser!(u64).range(1..))]
        step_limit: u64,
    },
    /// Fill in a statement template and print the generated sentence.
    Generate {
        #[arg(long)]
        template: String,
        /// Slot values as a JSON object.
        #[arg(long)]
        slots: String,
        /// Check against this program and append the sentence to it.
        #[arg(long)]
        append_to: Option<PathBuf>,
    },
    /// Print the template catalog as JSON.
    Templates,
    /// Start the HTTP service.
    Serve {
        #[arg(long, env = "NATPROG_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

/// Failure that ends a command with a non-zero status.
enum Failure {
    Usage(String),
    Diagnostics(Vec<Diagnostic>),
}

impl From<Vec<Diagnostic>> for Failure {
    fn from(d: Vec<Diagnostic>) -> Self {
        Failure::Diagnostics(d)
    }
}

fn io_failure(path: &Path, action: &str, err: io::Error) -> Failure {
    Failure::Usage(format!("cannot {action} {}: {err}", path.display()))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, "read", e))
}

pub fn main<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            EXIT_USAGE
        }
        Err(Failure::Diagnostics(diags)) => {
            let stderr = io::stderr();
            let mut err = stderr.lock();
            for d in &diags {
                let _ = writeln!(err, "{}", format_diagnostic(d));
            }
            EXIT_DIAGNOSTICS
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Compile { file, emit } => {
            let checked = natprog_core::compile(&read_file(&file)?)?;
            let unit = codegen::emit_target(&checked);
            match emit {
                Some(out) => fs::write(&out, unit.source_text).map_err(|e| io_failure(&out, "write", e)),
                None => write_stdout(&unit.source_text),
            }
        }
        Command::Run {
            file,
            input,
            step_limit,
        } => {
            let checked = natprog_core::compile(&read_file(&file)?)?;
            let mut sink = StdoutSink;
            let result = match input {
                Some(path) => {
                    let text = read_file(&path)?;
                    let lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l).to_string());
                    run_with_sink(&checked, &mut ScriptedInput::new(lines), step_limit, &mut sink)
                }
                None => run_with_sink(&checked, &mut StdinInput, step_limit, &mut sink),
            };
            match result.runtime_error {
                Some(e) => Err(Failure::Diagnostics(vec![e])),
                None => Ok(()),
            }
        }
        Command::Generate {
            template,
            slots,
            append_to,
        } => {
            let slots: serde_json::Value = serde_json::from_str(&slots)
                .map_err(|e| Failure::Usage(format!("--slots is not valid JSON: {e}")))?;
            let instance: TemplateInstance =
                serde_json::from_value(serde_json::json!({ "templateId": template, "slots": slots }))
                    .map_err(|e| Failure::Usage(format!("--slots must be an object of scalar values: {e}")))?;
            let context = match &append_to {
                Some(path) if path.exists() => read_file(path)?,
                _ => String::new(),
            };
            let text = templates::generate_in_source(&instance, &context)?;
            if let Some(path) = &append_to {
                let mut updated = context;
                if !updated.is_empty() && !updated.ends_with('\n') {
                    updated.push('\n');
                }
                updated.push_str(&text);
                updated.push('\n');
                fs::write(path, updated).map_err(|e| io_failure(path, "write", e))?;
            }
            write_stdout(&format!("{text}\n"))
        }
        Command::Templates => write_stdout(&format!("{}\n", templates::catalog().to_json())),
        Command::Serve { port, host } => {
            let runtime = tokio::runtime::Runtime::new()
                .map_err(|e| Failure::Usage(format!("cannot start runtime: {e}")))?;
            runtime
                .block_on(crate::api::serve(&host, port))
                .map_err(|e| Failure::Usage(format!("cannot serve on {host}:{port}: {e}")))
        }
    }
}

fn write_stdout(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
}

struct StdoutSink;

impl OutputSink for StdoutSink {
    fn write_line(&mut self, line: &str) {
        let mut out = io::stdout().lock();
        let _ = writeln!(out, "{line}");
        let _ = out.flush();
    }
}

/// Reads one stdin line per Read statement; prompts go to stderr.
struct StdinInput;

impl InputProvider for StdinInput {
    fn next_input(&mut self, prompt: Option<&str>) -> Option<String> {
        if let Some(p) = prompt {
            eprint!("{p}");
        }
        let mut line = String::new();
        match io::stdin().lock().read_line(&mut line) {
            Ok(0) | Err(_) => None,
            Ok(_) => {
                let trimmed = line.strip_suffix('\n').unwrap_or(&line);
                Some(trimmed.strip_suffix('\r').unwrap_or(trimmed).to_string())
            }
        }
    }
}
