//! Symbol table construction and static checking.
//!
//! There is a single global scope; control blocks do not open scopes. A name
//! is usable from the statement after its declaration onward, in source
//! order, regardless of which block the declaration sits in.

use std::collections::HashMap;

use crate::ast::{BinaryOp, Condition, Expression, Ident, Place, Program, Statement, TypeTag};
use crate::diagnostic::{has_errors, Code, Diagnostic};
use crate::span::SourceSpan;
use crate::token::is_reserved;

pub const MAX_IDENTIFIER_LEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolType {
    Scalar(TypeTag),
    Array { element: TypeTag, size: u32 },
}

impl SymbolType {
    pub fn element_type(self) -> TypeTag {
        match self {
            SymbolType::Scalar(t) | SymbolType::Array { element: t, .. } => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    /// Spelling used at the declaration.
    pub name: String,
    pub ty: SymbolType,
    pub span: SourceSpan,
    /// Pre-order index of the declaring statement.
    pub index: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymbolTable {
    entries: HashMap<String, Symbol>,
    order: Vec<String>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, name: &str) -> Option<&Symbol> {
        self.entries.get(&name.to_lowercase())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup(name).is_some()
    }

    /// Adds a symbol unless the name is already taken; returns whether it
    /// was inserted.
    pub fn insert(&mut self, symbol: Symbol) -> bool {
        let key = symbol.name.to_lowercase();
        if self.entries.contains_key(&key) {
            return false;
        }
        self.order.push(key.clone());
        self.entries.insert(key, symbol);
        true
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Symbols in declaration order.
    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.order.iter().map(|k| &self.entries[k])
    }
}

/// A program that passed analysis. Expression types are available through
/// [`CheckedProgram::expr_type`].
#[derive(Debug, Clone, PartialEq)]
pub struct CheckedProgram {
    program: Program,
    symbols: SymbolTable,
}

impl CheckedProgram {
    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn into_program(self) -> Program {
        self.program
    }

    /// Type of an expression taken from this program.
    pub fn expr_type(&self, expr: &Expression) -> TypeTag {
        type_of(expr, &self.symbols).expect("expression of a checked program is well-typed")
    }
}

/// Result of analysis: the symbols that could be collected plus every
/// diagnostic found. Useful for tooling that needs symbols from a program
/// with errors.
#[derive(Debug, Clone, Default)]
pub struct Analysis {
    pub symbols: SymbolTable,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn analyze(program: Program) -> Result<CheckedProgram, Vec<Diagnostic>> {
    let Analysis {
        symbols,
        diagnostics,
    } = analyze_collect(&program);
    if has_errors(&diagnostics) {
        Err(diagnostics)
    } else {
        Ok(CheckedProgram { program, symbols })
    }
}

pub fn analyze_collect(program: &Program) -> Analysis {
    analyze_in_context(program, SymbolTable::new())
}

/// Analyzes `program` as a continuation of code that declared `symbols`.
pub fn analyze_in_context(program: &Program, symbols: SymbolTable) -> Analysis {
    let mut checker = Checker {
        index: symbols.len(),
        symbols,
        diagnostics: Vec::new(),
    };
    checker.statements(&program.statements);
    Analysis {
        symbols: checker.symbols,
        diagnostics: checker.diagnostics,
    }
}

/// Checks a declared name: a letter followed by letters, digits or
/// underscores, at most 64 characters, and not a reserved word.
pub fn check_identifier(name: &str) -> Result<(), Diagnostic> {
    check_identifier_at(name, SourceSpan::origin())
}

fn check_identifier_at(name: &str, span: SourceSpan) -> Result<(), Diagnostic> {
    let mut chars = name.chars();
    let problem = match chars.next() {
        None => Some("must not be empty".to_string()),
        Some(c) if !c.is_ascii_alphabetic() => Some("must start with a letter".to_string()),
        _ => chars
            .find(|c| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map(|c| format!("contains the illegal character '{c}'")),
    };
    let problem = problem.or_else(|| {
        (name.chars().count() > MAX_IDENTIFIER_LEN)
            .then(|| format!("is longer than {MAX_IDENTIFIER_LEN} characters"))
    });
    if let Some(p) = problem {
        return Err(
            Diagnostic::error(Code::E003, span, format!("identifier '{name}' {p}")).with_name(name),
        );
    }
    if is_reserved(name) {
        return Err(Diagnostic::error(
            Code::E006,
            span,
            format!("'{name}' is a reserved word and cannot be used as a name"),
        )
        .with_name(name));
    }
    Ok(())
}

/// Type of `expr` under `symbols`; the first violation found is returned.
pub fn type_of(expr: &Expression, symbols: &SymbolTable) -> Result<TypeTag, Diagnostic> {
    let mut checker = Checker {
        symbols: symbols.clone(),
        diagnostics: Vec::new(),
        index: 0,
    };
    match checker.expression(expr) {
        Some(t) => Ok(t),
        None => Err(checker.diagnostics.remove(0)),
    }
}

struct Checker {
    symbols: SymbolTable,
    diagnostics: Vec<Diagnostic>,
    index: usize,
}

impl Checker {
    fn report(&mut self, d: Diagnostic) {
        self.diagnostics.push(d);
    }

    fn mismatch(&mut self, span: SourceSpan, message: String) {
        self.report(Diagnostic::error(Code::E002, span, message));
    }

    fn statements(&mut self, stmts: &[Statement]) {
        for s in stmts {
            self.statement(s);
        }
    }

    fn declare(&mut self, name: &Ident, ty: SymbolType, index: usize) {
        let span = name.span.0;
        if let Err(d) = check_identifier_at(&name.name, span) {
            self.report(d);
        }
        if let Some(prev) = self.symbols.lookup(&name.name) {
            let message = format!(
                "{} '{}' is already declared",
                match prev.ty {
                    SymbolType::Scalar(_) => "variable",
                    SymbolType::Array { .. } => "array",
                },
                name.name
            );
            self.report(Diagnostic::error(Code::E001, span, message).with_name(&name.name));
            return;
        }
        self.symbols.insert(Symbol {
            name: name.name.clone(),
            ty,
            span,
            index,
        });
    }

    fn statement(&mut self, stmt: &Statement) {
        let index = self.index;
        self.index += 1;
        match stmt {
            Statement::DeclareVariable {
                name, ty, initial, ..
            } => {
                if let Some(init) = initial {
                    if let Some(actual) = self.expression(init) {
                        if actual != *ty {
                            self.mismatch(
                                init.span(),
                                format!(
                                    "initial value of '{}' must be a {ty}, found a {actual}",
                                    name.name
                                ),
                            );
                        }
                    }
                }
                self.declare(name, SymbolType::Scalar(*ty), index);
            }
            Statement::DeclareArray {
                name, element, size, ..
            } => {
                self.declare(
                    name,
                    SymbolType::Array {
                        element: *element,
                        size: *size,
                    },
                    index,
                );
            }
            Statement::Assign { target, value, .. } => {
                let target_ty = self.place(target);
                let value_ty = self.expression(value);
                if let (Some(t), Some(v)) = (target_ty, value_ty) {
                    if t != v {
                        self.mismatch(
                            value.span(),
                            format!(
                                "cannot assign a {v} to '{}', which holds a {t}",
                                target.name().name
                            ),
                        );
                    }
                }
            }
            Statement::Display { value, .. } => {
                self.expression(value);
            }
            Statement::Read { target, .. } => {
                self.place(target);
            }
            Statement::If {
                arms, otherwise, ..
            } => {
                for arm in arms {
                    self.condition(&arm.condition);
                    self.statements(&arm.body);
                }
                if let Some(body) = otherwise {
                    self.statements(body);
                }
            }
            Statement::RepeatWhile {
                condition, body, ..
            } => {
                self.condition(condition);
                self.statements(body);
            }
            Statement::RepeatTimes { count, body, .. } => {
                if let Some(t) = self.expression(count) {
                    if t != TypeTag::Number {
                        self.mismatch(
                            count.span(),
                            format!("repeat count must be a Number, found a {t}"),
                        );
                    }
                }
                self.statements(body);
            }
            Statement::Select {
                scrutinee,
                cases,
                other,
                ..
            } => {
                let scrutinee_ty = self.expression(scrutinee);
                for case in cases {
                    match (case.label.literal_type(), scrutinee_ty) {
                        (None, _) => self.report(Diagnostic::error(
                            Code::E007,
                            case.label.span(),
                            "case label must be a number or string literal",
                        )),
                        (Some(label), Some(expected)) if label != expected => {
                            self.report(Diagnostic::error(
                                Code::E007,
                                case.label.span(),
                                format!("case label must be a {expected} literal, found a {label}"),
                            ))
                        }
                        _ => {}
                    }
                    self.statements(&case.body);
                }
                if let Some(body) = other {
                    self.statements(body);
                }
            }
        }
    }

    fn resolve(&mut self, name: &Ident) -> Option<SymbolType> {
        match self.symbols.lookup(&name.name) {
            Some(sym) => Some(sym.ty),
            None => {
                self.report(
                    Diagnostic::error(
                        Code::E004,
                        name.span.0,
                        format!("'{}' has not been declared", name.name),
                    )
                    .with_name(&name.name),
                );
                None
            }
        }
    }

    /// Type stored at a place, or `None` after reporting a problem.
    fn place(&mut self, place: &Place) -> Option<TypeTag> {
        match place {
            Place::Var(id) => match self.resolve(id)? {
                SymbolType::Scalar(t) => Some(t),
                SymbolType::Array { .. } => {
                    self.mismatch(
                        id.span.0,
                        format!(
                            "'{}' is an array; use 'element <index> of {}'",
                            id.name, id.name
                        ),
                    );
                    None
                }
            },
            Place::Element { index, array, .. } => {
                let index_ty = self.expression(index);
                if let Some(t) = index_ty {
                    if t != TypeTag::Number {
                        self.mismatch(
                            index.span(),
                            format!("array index must be a Number, found a {t}"),
                        );
                    }
                }
                match self.resolve(array)? {
                    SymbolType::Array { element, .. } => Some(element),
                    SymbolType::Scalar(_) => {
                        self.mismatch(
                            array.span.0,
                            format!("'{}' is not an array", array.name),
                        );
                        None
                    }
                }
            }
        }
    }

    fn expression(&mut self, expr: &Expression) -> Option<TypeTag> {
        match expr {
            Expression::Number { .. } => Some(TypeTag::Number),
            Expression::Text { .. } => Some(TypeTag::String),
            Expression::Place(p) => self.place(p),
            Expression::Neg { operand, span } => {
                let t = self.expression(operand)?;
                if t != TypeTag::Number {
                    self.mismatch(span.0, format!("'-' needs a Number, found a {t}"));
                    return None;
                }
                Some(TypeTag::Number)
            }
            Expression::Binary {
                op,
                left,
                right,
                span,
            } => {
                let l = self.expression(left);
                let r = self.expression(right);
                let (l, r) = (l?, r?);
                if *op == BinaryOp::Concat {
                    return Some(TypeTag::String);
                }
                if l != TypeTag::Number || r != TypeTag::Number {
                    self.mismatch(
                        span.0,
                        format!("'{}' needs Number operands, found {l} and {r}", op.symbol()),
                    );
                    return None;
                }
                Some(TypeTag::Number)
            }
        }
    }

    fn condition(&mut self, cond: &Condition) {
        match cond {
            Condition::Compare {
                op,
                left,
                right,
                span,
            } => {
                let l = self.expression(left);
                let r = self.expression(right);
                if let (Some(l), Some(r)) = (l, r) {
                    if op.is_ordering() && (l != TypeTag::Number || r != TypeTag::Number) {
                        self.mismatch(
                            span.0,
                            format!("ordering comparisons need Number operands, found {l} and {r}"),
                        );
                    } else if l != r {
                        self.mismatch(
                            span.0,
                            format!("cannot compare a {l} with a {r}"),
                        );
                    }
                }
            }
            Condition::Logical { left, right, .. } => {
                self.condition(left);
                self.condition(right);
            }
        }
    }
}
