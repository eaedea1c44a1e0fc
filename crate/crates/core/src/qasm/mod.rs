//! OpenQASM 2.0 front end: parsing with positioned diagnostics, lowering to [`Circuit`], and
//! emission back to text.
//!
//! `include "qelib1.inc"` resolves to a bundled copy of the standard library; no other include is
//! available. Qubits of several `qreg`s are numbered consecutively in declaration order.
//!
//! [`Circuit`]: crate::circuit::Circuit

pub mod ast;
mod emit;
mod lexer;
mod lower;
mod parser;

use std::fmt;

pub use ast::QasmAst;
pub use emit::emit_qasm;
pub use lower::{lower_to_circuit, pack, LowerError, MAX_LOWERED_GATES};
pub use parser::MAX_REGISTER_SIZE;

use ast::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A message tied to a 1-based line and column of the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseDiagnostic {
    pub(crate) fn error(span: Span, message: impl Into<String>) -> Self {
        Self { severity: Severity::Error, line: span.line, col: span.col, message: message.into() }
    }

    pub(crate) fn warning(span: Span, message: impl Into<String>) -> Self {
        Self { severity: Severity::Warning, line: span.line, col: span.col, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `file:line:col: severity: message`
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{self}")
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.col, self.severity, self.message)
    }
}

/// Parses OpenQASM 2.0 source. On failure every collected diagnostic is returned, warnings
/// included; on success warnings are kept in [`QasmAst::warnings`].
pub fn parse_qasm(source: &str) -> Result<QasmAst, Vec<ParseDiagnostic>> {
    parser::parse(source)
}

/// Parse and lower in one step.
pub fn circuit_from_qasm(source: &str) -> Result<crate::circuit::Circuit, QasmError> {
    let ast = parse_qasm(source).map_err(QasmError::Parse)?;
    Ok(lower_to_circuit(&ast)?)
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum QasmError {
    #[error("{}", render_all(.0))]
    Parse(Vec<ParseDiagnostic>),
    #[error(transparent)]
    Lower(#[from] LowerError),
}

fn render_all(diags: &[ParseDiagnostic]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}
