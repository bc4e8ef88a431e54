//! Source positions.
//!
//! Spans are byte ranges into UTF-8 source text. Line and column are 1-based
//! and derived from the start offset; columns count characters, not bytes.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize, line: u32, column: u32) -> Self {
        debug_assert!(start <= end);
        debug_assert!(line >= 1 && column >= 1);
        Self {
            start,
            end,
            line,
            column,
        }
    }

    /// Zero-width span at the beginning of a text. Used for diagnostics that
    /// have no source of their own, such as template slot errors.
    pub fn origin() -> Self {
        Self::new(0, 0, 1, 1)
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Smallest span covering both inputs. Line and column come from
    /// whichever span starts first.
    pub fn merge(self, other: SourceSpan) -> SourceSpan {
        let first = if other.start < self.start { other } else { self };
        SourceSpan {
            start: first.start,
            end: self.end.max(other.end),
            line: first.line,
            column: first.column,
        }
    }

    /// The covered slice of `source`, if the span lies within it.
    pub fn slice<'a>(&self, source: &'a str) -> Option<&'a str> {
        source.get(self.start..self.end)
    }
}

impl Default for SourceSpan {
    fn default() -> Self {
        Self::origin()
    }
}

pub fn span_merge(a: SourceSpan, b: SourceSpan) -> SourceSpan {
    a.merge(b)
}

/// Maps byte offsets to line/column pairs.
#[derive(Debug, Clone)]
pub struct LineIndex<'a> {
    source: &'a str,
    line_starts: Vec<usize>,
}

impl<'a> LineIndex<'a> {
    pub fn new(source: &'a str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(
            source
                .bytes()
                .enumerate()
                .filter(|&(_, b)| b == b'\n')
                .map(|(i, _)| i + 1),
        );
        Self {
            source,
            line_starts,
        }
    }

    pub fn position(&self, offset: usize) -> (u32, u32) {
        let line = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.line_starts[line];
        let column = self.source[start..offset].chars().count() + 1;
        (line as u32 + 1, column as u32)
    }

    pub fn span(&self, start: usize, end: usize) -> SourceSpan {
        let (line, column) = self.position(start);
        SourceSpan::new(start, end, line, column)
    }
}
