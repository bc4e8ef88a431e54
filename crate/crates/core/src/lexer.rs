//! Lexical analysis.
//!
//! Lexing never aborts: malformed fragments produce an E005 diagnostic and
//! the scanner resumes at the next whitespace character.

use crate::diagnostic::{Code, Diagnostic};
use crate::span::LineIndex;
use crate::token::{unescape_string, Token, TokenKind};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LexOutput {
    pub tokens: Vec<Token>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn tokenize(source: &str) -> LexOutput {
    Lexer::new(source).run()
}

fn is_word_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    lines: LineIndex<'a>,
    out: LexOutput,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            pos: 0,
            lines: LineIndex::new(src),
            out: LexOutput::default(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat_while(&mut self, pred: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
    }

    fn push(&mut self, kind: TokenKind, start: usize) {
        let span = self.lines.span(start, self.pos);
        self.out
            .tokens
            .push(Token::new(kind, &self.src[start..self.pos], span));
    }

    fn error(&mut self, start: usize, end: usize, message: String) {
        let span = self.lines.span(start, end);
        self.out
            .diagnostics
            .push(Diagnostic::error(Code::E005, span, message));
    }

    fn skip_to_whitespace(&mut self) {
        self.eat_while(|c| !c.is_whitespace());
    }

    fn run(mut self) -> LexOutput {
        while let Some(c) = self.peek() {
            let start = self.pos;
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                c if c.is_ascii_digit() => self.number(start),
                c if is_word_start(c) => {
                    self.eat_while(is_word_char);
                    self.push(TokenKind::Word, start);
                }
                '"' => self.string(start),
                '(' | ')' | '&' | '.' | '+' | '-' | '*' | '/' | '%' => {
                    self.bump();
                    let kind = match c {
                        '(' => TokenKind::LeftParen,
                        ')' => TokenKind::RightParen,
                        '&' => TokenKind::Ampersand,
                        '.' => TokenKind::Period,
                        _ => TokenKind::Operator,
                    };
                    self.push(kind, start);
                }
                other => {
                    self.bump();
                    let end = self.pos;
                    self.error(start, end, format!("unexpected character '{other}'"));
                    self.skip_to_whitespace();
                }
            }
        }
        self.out
    }

    fn number(&mut self, start: usize) {
        self.eat_while(|c| c.is_ascii_digit());
        if self.peek() == Some('.') && self.peek_second().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            self.eat_while(|c| c.is_ascii_digit());
        } else if self.peek().is_some_and(is_word_char) {
            // `2cool`: keep it as one word so the analyzer can report the
            // whole identifier as illegal.
            self.eat_while(is_word_char);
            self.push(TokenKind::Word, start);
            return;
        }
        self.push(TokenKind::NumberLiteral, start);
    }

    fn string(&mut self, start: usize) {
        self.bump();
        loop {
            match self.peek() {
                None | Some('\n') => {
                    let end = self.pos;
                    self.error(start, end, "unterminated string literal".to_string());
                    self.pos = start;
                    self.skip_to_whitespace();
                    return;
                }
                Some('\\') => {
                    self.bump();
                    if self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                Some('"') => {
                    self.bump();
                    break;
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
        if unescape_string(&self.src[start..self.pos]).is_some() {
            self.push(TokenKind::StringLiteral, start);
        } else {
            let end = self.pos;
            self.error(
                start,
                end,
                "invalid escape sequence in string literal (allowed: \\\" \\\\ \\n)".to_string(),
            );
        }
    }
}
