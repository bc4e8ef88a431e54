//! Recursive-descent parser.
//!
//! The grammar is predictive except for one point: a `(` at the start of a
//! comparison may open either a grouped condition or a parenthesized
//! arithmetic expression. The parser tries the grouped condition first and
//! falls back to the expression. Results of the speculative attempt are
//! memoized per token position so nested parentheses stay linear.
//!
//! Statement-level errors are recorded as E005 diagnostics; the parser then
//! skips past the next period and carries on.

use std::collections::HashMap;

use crate::ast::{
    BinaryOp, Condition, Expression, Ident, IfArm, LogicOp, NodeSpan, Place, Program, RelOp,
    SelectCase, Statement, TypeTag,
};
use crate::diagnostic::{Code, Diagnostic};
use crate::lexer::tokenize;
use crate::span::SourceSpan;
use crate::token::{is_reserved, unescape_string, Token, TokenKind};

/// Largest accepted array size.
pub const MAX_ARRAY_SIZE: u32 = 1_000_000;

/// Maximum nesting of blocks, parentheses and negations.
pub const MAX_NESTING: usize = 48;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParseOutput {
    pub program: Program,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone)]
struct ParseError {
    span: SourceSpan,
    message: String,
}

impl From<ParseError> for Diagnostic {
    fn from(e: ParseError) -> Self {
        Diagnostic::error(Code::E005, e.span, e.message)
    }
}

type PResult<T> = Result<T, ParseError>;

pub fn parse_program(tokens: &[Token]) -> ParseOutput {
    let mut parser = Parser::new(tokens);
    let statements = parser.statement_list(false);
    ParseOutput {
        program: Program::new(statements),
        diagnostics: parser.diagnostics,
    }
}

/// Tokenizes and parses `source`; lexical diagnostics come first.
pub fn parse_source(source: &str) -> ParseOutput {
    let lexed = tokenize(source);
    let mut out = parse_program(&lexed.tokens);
    let mut diagnostics = lexed.diagnostics;
    diagnostics.append(&mut out.diagnostics);
    out.diagnostics = diagnostics;
    out
}

/// Parses a standalone condition fragment that must span all `tokens`.
pub fn parse_condition(tokens: &[Token]) -> Result<Condition, Vec<Diagnostic>> {
    let mut parser = Parser::new(tokens);
    parser
        .condition()
        .and_then(|c| parser.expect_end("condition").map(|_| c))
        .map_err(|e| vec![e.into()])
}

/// Parses a standalone expression fragment that must span all `tokens`.
pub fn parse_expression(tokens: &[Token]) -> Result<Expression, Vec<Diagnostic>> {
    let mut parser = Parser::new(tokens);
    parser
        .expression()
        .and_then(|e| parser.expect_end("expression").map(|_| e))
        .map_err(|e| vec![e.into()])
}

fn lex_fragment(text: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let lexed = tokenize(text);
    if lexed.diagnostics.is_empty() {
        Ok(lexed.tokens)
    } else {
        Err(lexed.diagnostics)
    }
}

pub fn parse_condition_text(text: &str) -> Result<Condition, Vec<Diagnostic>> {
    parse_condition(&lex_fragment(text)?)
}

pub fn parse_expression_text(text: &str) -> Result<Expression, Vec<Diagnostic>> {
    parse_expression(&lex_fragment(text)?)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    depth: usize,
    diagnostics: Vec<Diagnostic>,
    grouped: HashMap<usize, Option<(Condition, usize)>>,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token]) -> Self {
        Self {
            tokens,
            pos: 0,
            depth: 0,
            diagnostics: Vec::new(),
            grouped: HashMap::new(),
        }
    }

    // ----- token helpers -------------------------------------------------

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&'t Token> {
        self.tokens.get(self.pos + offset)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn at_word(&self, word: &str) -> bool {
        self.peek().is_some_and(|t| t.is_word(word))
    }

    fn at_word_at(&self, offset: usize, word: &str) -> bool {
        self.peek_at(offset).is_some_and(|t| t.is_word(word))
    }

    fn bump(&mut self) -> &'t Token {
        let tok = &self.tokens[self.pos];
        self.pos += 1;
        tok
    }

    fn eat_word(&mut self, word: &str) -> bool {
        if self.at_word(word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Zero-width span just after the last token.
    fn eof_span(&self) -> SourceSpan {
        match self.tokens.last() {
            Some(t) => SourceSpan::new(
                t.span.end,
                t.span.end,
                t.span.line,
                t.span.column + t.lexeme.chars().count() as u32,
            ),
            None => SourceSpan::origin(),
        }
    }

    fn current_span(&self) -> SourceSpan {
        self.peek().map_or_else(|| self.eof_span(), |t| t.span)
    }

    fn prev_span(&self) -> SourceSpan {
        self.tokens[self.pos - 1].span
    }

    fn describe_current(&self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some(t) if t.kind == TokenKind::Period => "'.'".to_string(),
            Some(t) => format!("'{}'", t.lexeme),
        }
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(ParseError {
            span: self.current_span(),
            message: format!("expected {expected}, found {}", self.describe_current()),
        })
    }

    fn expect_word(&mut self, word: &str) -> PResult<SourceSpan> {
        if self.eat_word(word) {
            Ok(self.prev_span())
        } else {
            self.error(&format!("'{word}'"))
        }
    }

    fn expect_words(&mut self, words: &[&str]) -> PResult<SourceSpan> {
        let mut last = self.current_span();
        for w in words {
            last = self.expect_word(w)?;
        }
        Ok(last)
    }

    fn expect_kind(&mut self, kind: TokenKind, what: &str) -> PResult<&'t Token> {
        match self.peek() {
            Some(t) if t.kind == kind => Ok(self.bump()),
            _ => self.error(what),
        }
    }

    fn expect_period(&mut self) -> PResult<SourceSpan> {
        self.expect_kind(TokenKind::Period, "'.' at the end of the sentence")
            .map(|t| t.span)
    }

    fn expect_end(&self, what: &str) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(ParseError {
                span: self.current_span(),
                message: format!("unexpected {} after {what}", self.describe_current()),
            })
        }
    }

    fn enter(&mut self) -> PResult<()> {
        if self.depth >= MAX_NESTING {
            return Err(ParseError {
                span: self.current_span(),
                message: format!("nesting is deeper than {MAX_NESTING} levels"),
            });
        }
        self.depth += 1;
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.enter()?;
        let r = f(self);
        self.leave();
        r
    }

    /// Skips to just past the next period. Always consumes at least one
    /// token unless at end of input.
    fn recover(&mut self) {
        while let Some(t) = self.peek() {
            self.pos += 1;
            if t.kind == TokenKind::Period {
                break;
            }
        }
    }

    // ----- statements ----------------------------------------------------

    fn at_block_end(&self) -> bool {
        ["end", "otherwise", "when"].iter().any(|w| self.at_word(w))
    }

    /// Parses statements until end of input or, when `in_block` is set, a
    /// block terminator word (`End`, `Otherwise`, `When`).
    fn statement_list(&mut self, in_block: bool) -> Vec<Statement> {
        let mut out = Vec::new();
        while !self.at_end() {
            if in_block && self.at_block_end() {
                break;
            }
            let start = self.pos;
            match self.statement() {
                Ok(stmt) => out.push(stmt),
                Err(e) => {
                    self.diagnostics.push(e.into());
                    if self.pos == start || self.tokens[self.pos - 1].kind != TokenKind::Period {
                        self.recover();
                    }
                }
            }
        }
        out
    }

    fn block(&mut self, closer: &str) -> PResult<Vec<Statement>> {
        self.enter()?;
        let body = self.statement_list(true);
        self.leave();
        if self.at_end() {
            return self.error(&format!("'End of {closer}'"));
        }
        Ok(body)
    }

    fn statement(&mut self) -> PResult<Statement> {
        let Some(first) = self.peek() else {
            return self.error("a statement");
        };
        let start = first.span;
        if first.kind != TokenKind::Word {
            return self.error("a statement");
        }
        let word = first.lexeme.to_ascii_lowercase();
        match word.as_str() {
            "declare" => self.declaration(start),
            "set" => self.assignment(start),
            "display" => self.display(start),
            "read" => self.read(start),
            "if" => self.if_statement(start),
            "repeat" => self.repeat(start),
            "select" => self.select(start),
            _ => self.error("a statement"),
        }
    }

    fn declaration(&mut self, start: SourceSpan) -> PResult<Statement> {
        self.bump();
        if self.eat_word("a") {
            self.expect_words(&["variable", "called"])?;
            let name = self.declared_name()?;
            self.expect_words(&["of", "type"])?;
            let ty = self.type_name()?;
            let initial = if self.eat_word("with") {
                self.expect_words(&["initial", "value"])?;
                Some(self.expression()?)
            } else {
                None
            };
            let end = self.expect_period()?;
            Ok(Statement::DeclareVariable {
                name,
                ty,
                initial,
                span: start.merge(end).into(),
            })
        } else if self.eat_word("an") {
            self.expect_words(&["array", "called"])?;
            let name = self.declared_name()?;
            self.expect_words(&["of", "type"])?;
            let element = self.type_name()?;
            self.expect_words(&["with", "size"])?;
            let size = self.array_size()?;
            let end = self.expect_period()?;
            Ok(Statement::DeclareArray {
                name,
                element,
                size,
                span: start.merge(end).into(),
            })
        } else {
            self.error("'a variable' or 'an array'")
        }
    }

    /// Any word is accepted as a declared name; legality and reserved words
    /// are the analyzer's concern.
    fn declared_name(&mut self) -> PResult<Ident> {
        let tok = self.expect_kind(TokenKind::Word, "a name")?;
        Ok(Ident::new(&tok.lexeme, tok.span))
    }

    fn type_name(&mut self) -> PResult<TypeTag> {
        match self.peek().and_then(|t| TypeTag::from_keyword(&t.lexeme)) {
            Some(ty) if self.peek().is_some_and(|t| t.kind == TokenKind::Word) => {
                self.bump();
                Ok(ty)
            }
            _ => self.error("a type ('Number' or 'String')"),
        }
    }

    fn array_size(&mut self) -> PResult<u32> {
        let tok = self.expect_kind(TokenKind::NumberLiteral, "a whole-number array size")?;
        match tok.lexeme.parse::<u32>() {
            Ok(n) if (1..=MAX_ARRAY_SIZE).contains(&n) => Ok(n),
            _ => Err(ParseError {
                span: tok.span,
                message: format!(
                    "array size must be a whole number from 1 to {MAX_ARRAY_SIZE}, found '{}'",
                    tok.lexeme
                ),
            }),
        }
    }

    fn assignment(&mut self, start: SourceSpan) -> PResult<Statement> {
        self.bump();
        let target = self.place()?;
        self.expect_word("to")?;
        let value = self.expression()?;
        let end = self.expect_period()?;
        Ok(Statement::Assign {
            target,
            value,
            span: start.merge(end).into(),
        })
    }

    fn display(&mut self, start: SourceSpan) -> PResult<Statement> {
        self.bump();
        let value = self.expression()?;
        self.expect_words(&["on", "the", "screen"])?;
        let end = self.expect_period()?;
        Ok(Statement::Display {
            value,
            span: start.merge(end).into(),
        })
    }

    fn read(&mut self, start: SourceSpan) -> PResult<Statement> {
        self.bump();
        let target = self.place()?;
        self.expect_words(&["from", "the", "keyboard"])?;
        let prompt = if self.eat_word("with") {
            self.expect_word("prompt")?;
            let tok = self.expect_kind(TokenKind::StringLiteral, "a quoted prompt")?;
            Some(string_value(tok)?)
        } else {
            None
        };
        let end = self.expect_period()?;
        Ok(Statement::Read {
            target,
            prompt,
            span: start.merge(end).into(),
        })
    }

    fn if_statement(&mut self, start: SourceSpan) -> PResult<Statement> {
        self.bump();
        let condition = self.condition()?;
        self.expect_word("then")?;
        let body = self.block("condition")?;
        let mut arms = vec![IfArm { condition, body }];
        let mut otherwise = None;
        while self.at_word("otherwise") {
            let line = self.bump().span.line;
            // `Otherwise` alone on its line opens a plain branch, even when
            // that branch starts with a nested If.
            if self.at_word("if") && self.peek().is_some_and(|t| t.span.line == line) {
                self.bump();
                let condition = self.condition()?;
                self.expect_word("then")?;
                let body = self.block("condition")?;
                arms.push(IfArm { condition, body });
            } else {
                otherwise = Some(self.block("condition")?);
                break;
            }
        }
        let end = self.block_end("condition")?;
        Ok(Statement::If {
            arms,
            otherwise,
            span: start.merge(end).into(),
        })
    }

    fn block_end(&mut self, closer: &str) -> PResult<SourceSpan> {
        if !self.at_word("end") {
            return self.error(&format!("'End of {closer}'"));
        }
        self.expect_words(&["end", "of", closer])?;
        self.expect_period()
    }

    fn repeat(&mut self, start: SourceSpan) -> PResult<Statement> {
        self.bump();
        if self.eat_word("while") {
            let condition = self.condition()?;
            let body = self.block("repeat")?;
            let end = self.block_end("repeat")?;
            Ok(Statement::RepeatWhile {
                condition,
                body,
                span: start.merge(end).into(),
            })
        } else {
            let count = self.expression()?;
            self.expect_word("times")?;
            let body = self.block("repeat")?;
            let end = self.block_end("repeat")?;
            Ok(Statement::RepeatTimes {
                count,
                body,
                span: start.merge(end).into(),
            })
        }
    }

    fn select(&mut self, start: SourceSpan) -> PResult<Statement> {
        self.bump();
        self.expect_word("on")?;
        let scrutinee = self.expression()?;
        let mut cases = Vec::new();
        let mut other = None;
        while self.at_word("when") {
            if self.at_word_at(1, "other") {
                if cases.is_empty() {
                    return self.error("at least one 'When <value> then' case");
                }
                self.bump();
                self.bump();
                self.expect_word("then")?;
                other = Some(self.block("select")?);
                break;
            }
            self.bump();
            let label = self.expression()?;
            self.expect_word("then")?;
            let body = self.block("select")?;
            cases.push(SelectCase { label, body });
        }
        if cases.is_empty() {
            return self.error("at least one 'When <value> then' case");
        }
        let end = self.block_end("select")?;
        Ok(Statement::Select {
            scrutinee,
            cases,
            other,
            span: start.merge(end).into(),
        })
    }

    // ----- places and expressions ----------------------------------------

    fn variable_name(&mut self) -> PResult<Ident> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Word && !is_reserved(&t.lexeme) => {
                let t = self.bump();
                Ok(Ident::new(&t.lexeme, t.span))
            }
            _ => self.error("a variable name"),
        }
    }

    fn place(&mut self) -> PResult<Place> {
        if self.at_word("element") {
            let start = self.bump().span;
            let index = self.nested(|p| p.expression())?;
            self.expect_word("of")?;
            let array = self.variable_name()?;
            Ok(Place::Element {
                index: Box::new(index),
                span: start.merge(array.span.0).into(),
                array,
            })
        } else {
            self.variable_name().map(Place::Var)
        }
    }

    fn expression(&mut self) -> PResult<Expression> {
        let mut left = self.additive()?;
        while self.peek().is_some_and(|t| t.kind == TokenKind::Ampersand) {
            self.bump();
            let right = self.additive()?;
            left = binary(BinaryOp::Concat, left, right);
        }
        Ok(left)
    }

    fn additive(&mut self) -> PResult<Expression> {
        let mut left = self.term()?;
        loop {
            let op = match self.peek() {
                Some(t) if t.is_operator('+') => BinaryOp::Add,
                Some(t) if t.is_operator('-') => BinaryOp::Sub,
                _ => break,
            };
            self.bump();
            let right = self.term()?;
            left = binary(op, left, right);
        }
        Ok(left)
    }

    fn term(&mut self) -> PResult<Expression> {
        let mut left = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(t) if t.is_operator('*') => BinaryOp::Mul,
                Some(t) if t.is_operator('/') => BinaryOp::Div,
                Some(t) if t.is_operator('%') => BinaryOp::Rem,
                _ => break,
            };
            self.bump();
            let right = self.unary()?;
            left = binary(op, left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Expression> {
        if self.peek().is_some_and(|t| t.is_operator('-')) {
            let start = self.bump().span;
            let operand = self.nested(|p| p.primary())?;
            Ok(Expression::Neg {
                span: start.merge(operand.span()).into(),
                operand: Box::new(operand),
            })
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> PResult<Expression> {
        let Some(tok) = self.peek() else {
            return self.error("an expression");
        };
        match tok.kind {
            TokenKind::NumberLiteral => {
                self.bump();
                let value: f64 = tok.lexeme.parse().unwrap_or(f64::INFINITY);
                if !value.is_finite() {
                    return Err(ParseError {
                        span: tok.span,
                        message: format!("number '{}' is too large", tok.lexeme),
                    });
                }
                Ok(Expression::Number {
                    value,
                    span: tok.span.into(),
                })
            }
            TokenKind::StringLiteral => {
                self.bump();
                Ok(Expression::Text {
                    value: string_value(tok)?,
                    span: tok.span.into(),
                })
            }
            TokenKind::LeftParen => {
                let open = self.bump().span;
                let mut inner = self.nested(|p| p.expression())?;
                let close = self.expect_kind(TokenKind::RightParen, "')'")?.span;
                inner.set_span(open.merge(close));
                Ok(inner)
            }
            TokenKind::Word if tok.is_word("element") || !is_reserved(&tok.lexeme) => {
                self.place().map(Expression::Place)
            }
            _ => self.error("an expression"),
        }
    }

    // ----- conditions ----------------------------------------------------

    fn condition(&mut self) -> PResult<Condition> {
        let mut left = self.and_condition()?;
        while self.eat_word("or") {
            let right = self.and_condition()?;
            left = logical(LogicOp::Or, left, right);
        }
        Ok(left)
    }

    fn and_condition(&mut self) -> PResult<Condition> {
        let mut left = self.comparison()?;
        while self.eat_word("and") {
            let right = self.comparison()?;
            left = logical(LogicOp::And, left, right);
        }
        Ok(left)
    }

    fn comparison(&mut self) -> PResult<Condition> {
        if self
            .peek()
            .is_some_and(|t| t.kind == TokenKind::LeftParen)
        {
            if let Some(cond) = self.grouped_condition()? {
                return Ok(cond);
            }
        }
        let left = self.expression()?;
        let op = self.relop()?;
        let right = self.expression()?;
        Ok(Condition::Compare {
            op,
            span: left.span().merge(right.span()).into(),
            left,
            right,
        })
    }

    /// The single backtracking point. Returns `Ok(None)` with the position
    /// unchanged when the parenthesis does not open a grouped condition.
    fn grouped_condition(&mut self) -> PResult<Option<Condition>> {
        let start = self.pos;
        if let Some(memo) = self.grouped.get(&start) {
            return Ok(memo.clone().map(|(cond, end)| {
                self.pos = end;
                cond
            }));
        }
        self.enter()?;
        let open = self.bump().span;
        let attempt = self.condition().and_then(|mut cond| {
            let close = self.expect_kind(TokenKind::RightParen, "')'")?.span;
            cond.set_span(open.merge(close));
            Ok(cond)
        });
        self.leave();
        match attempt {
            Ok(cond) => {
                self.grouped.insert(start, Some((cond.clone(), self.pos)));
                Ok(Some(cond))
            }
            Err(_) => {
                self.grouped.insert(start, None);
                self.pos = start;
                Ok(None)
            }
        }
    }

    fn relop(&mut self) -> PResult<RelOp> {
        if !self.eat_word("is") {
            return self.error("a comparison such as 'is Greater than'");
        }
        let op = if self.eat_word("greater") {
            if self.at_word("or") && self.at_word_at(1, "equal") {
                self.pos += 2;
                self.eat_word("to");
                RelOp::GreaterOrEqual
            } else {
                self.eat_word("than");
                RelOp::Greater
            }
        } else if self.eat_word("smaller") {
            if self.at_word("or") && self.at_word_at(1, "equal") {
                self.pos += 2;
                self.eat_word("to");
                RelOp::SmallerOrEqual
            } else {
                self.eat_word("than");
                RelOp::Smaller
            }
        } else if self.eat_word("equal") {
            self.eat_word("to");
            RelOp::Equal
        } else if self.eat_word("not") {
            self.expect_word("equal")?;
            self.eat_word("to");
            RelOp::NotEqual
        } else {
            return self.error("'Greater', 'Smaller', 'Equal' or 'Not Equal'");
        };
        Ok(op)
    }
}

fn string_value(tok: &Token) -> PResult<String> {
    unescape_string(&tok.lexeme).ok_or_else(|| ParseError {
        span: tok.span,
        message: "malformed string literal".to_string(),
    })
}

fn binary(op: BinaryOp, left: Expression, right: Expression) -> Expression {
    Expression::Binary {
        op,
        span: NodeSpan(left.span().merge(right.span())),
        left: Box::new(left),
        right: Box::new(right),
    }
}

fn logical(op: LogicOp, left: Condition, right: Condition) -> Condition {
    Condition::Logical {
        op,
        span: NodeSpan(left.span().merge(right.span())),
        left: Box::new(left),
        right: Box::new(right),
    }
}
