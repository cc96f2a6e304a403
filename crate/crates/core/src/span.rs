use std::fmt;

use serde::Serialize;

/// A region of a source file. Lines and columns are 1-based; columns count
/// characters, and `end_col` points one past the last character of the region.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SourceSpan {
    pub file: String,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(file: &str, start: (u32, u32), end: (u32, u32)) -> Self {
        SourceSpan {
            file: file.to_string(),
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }

    /// Smallest span covering both `self` and `other` (same file assumed).
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        let start = (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let end = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        SourceSpan::new(&self.file, start, end)
    }

    pub fn is_empty(&self) -> bool {
        self.start_line == 0
    }

    /// Cuts the text covered by this span out of `source`.
    pub fn slice<'a>(&self, source: &'a str) -> Option<&'a str> {
        let start = offset_of(source, self.start_line, self.start_col)?;
        let end = offset_of(source, self.end_line, self.end_col)?;
        source.get(start..end)
    }
}

fn offset_of(source: &str, line: u32, col: u32) -> Option<usize> {
    let (mut cur_line, mut cur_col) = (1u32, 1u32);
    for (idx, ch) in source.char_indices() {
        if cur_line == line && cur_col == col {
            return Some(idx);
        }
        if ch == '\n' {
            cur_line += 1;
            cur_col = 1;
        } else {
            cur_col += 1;
        }
    }
    (cur_line == line && cur_col == col).then_some(source.len())
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start_line, self.start_col)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slice_multiline() {
        let src = "ab\ncdef\ng";
        let span = SourceSpan::new("x", (1, 2), (2, 3));
        assert_eq!(span.slice(src), Some("b\ncd"));
        let tail = SourceSpan::new("x", (3, 1), (3, 2));
        assert_eq!(tail.slice(src), Some("g"));
    }

    #[test]
    fn join_orders_endpoints() {
        let a = SourceSpan::new("f", (2, 5), (2, 9));
        let b = SourceSpan::new("f", (1, 1), (1, 4));
        assert_eq!(a.to(&b), SourceSpan::new("f", (1, 1), (2, 9)));
        assert_eq!(a.to(&b).to_string(), "f:1:1");
    }
}
