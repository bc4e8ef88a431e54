//! Toolchain for a small English-like programming language.
//!
//! Programs are sequences of sentences such as
//! `Declare a variable called Radius of type Number.` The crate lexes and
//! parses them, checks names and types, realizes ASTs back into canonical
//! English, instantiates statement templates, interprets programs, and emits
//! equivalent C# source.
//!
//! ```
//! use natprog_core::{compile, interpreter::{run, ScriptedInput}};
//!
//! let program = compile("Display \"Age: \" & 20 + 5 on the screen.").unwrap();
//! let result = run(&program, &mut ScriptedInput::default(), 1_000);
//! assert_eq!(result.outputs, ["Age: 25"]);
//! ```

pub mod ast;
pub mod codegen;
pub mod diagnostic;
pub mod interpreter;
pub mod lexer;
pub mod nlg;
pub mod parser;
pub mod semantics;
pub mod span;
pub mod templates;
pub mod token;

pub use diagnostic::{format_diagnostic, Code, Diagnostic, Severity};
pub use semantics::CheckedProgram;
pub use span::SourceSpan;

/// Parses and analyzes `source`. All syntax diagnostics are reported
/// together; analysis only runs on a syntactically clean program.
pub fn compile(source: &str) -> Result<CheckedProgram, Vec<Diagnostic>> {
    let parsed = parser::parse_source(source);
    if diagnostic::has_errors(&parsed.diagnostics) {
        return Err(parsed.diagnostics);
    }
    semantics::analyze(parsed.program)
}
