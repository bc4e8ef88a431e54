use serde::Serialize;

use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TokenKind {
    Word,
    NumberLiteral,
    StringLiteral,
    /// One of `+ - * / %`.
    Operator,
    LeftParen,
    RightParen,
    Ampersand,
    /// Statement terminator.
    Period,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub kind: TokenKind,
    /// Exact source text, quotes and escapes included.
    pub lexeme: String,
    pub span: SourceSpan,
}

impl Token {
    pub fn new(kind: TokenKind, lexeme: impl Into<String>, span: SourceSpan) -> Self {
        Self {
            kind,
            lexeme: lexeme.into(),
            span,
        }
    }

    pub fn is_word(&self, keyword: &str) -> bool {
        self.kind == TokenKind::Word && self.lexeme.eq_ignore_ascii_case(keyword)
    }

    pub fn is_operator(&self, op: char) -> bool {
        self.kind == TokenKind::Operator && self.lexeme.len() == 1 && self.lexeme.starts_with(op)
    }
}

/// Words that can never name a variable. Matched case-insensitively.
pub const RESERVED_WORDS: &[&str] = &[
    "a", "an", "and", "array", "called", "condition", "declare", "display", "element", "end",
    "equal", "from", "greater", "if", "initial", "is", "keyboard", "not", "number", "of", "on",
    "or", "other", "otherwise", "prompt", "read", "repeat", "screen", "select", "set", "size",
    "smaller", "string", "than", "the", "then", "times", "to", "type", "value", "variable", "when",
    "while", "with",
];

pub fn is_reserved(word: &str) -> bool {
    RESERVED_WORDS.iter().any(|r| r.eq_ignore_ascii_case(word))
}

/// Decodes the body of a string literal lexeme (including its quotes).
/// Returns `None` for a malformed literal.
pub fn unescape_string(lexeme: &str) -> Option<String> {
    let body = lexeme.strip_prefix('"')?.strip_suffix('"')?;
    let mut out = String::with_capacity(body.len());
    let mut chars = body.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next()? {
                '"' => out.push('"'),
                '\\' => out.push('\\'),
                'n' => out.push('\n'),
                _ => return None,
            },
            '"' | '\n' => return None,
            c => out.push(c),
        }
    }
    Some(out)
}

/// Inverse of [`unescape_string`]: quotes `text` as a literal lexeme.
pub fn escape_string(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
