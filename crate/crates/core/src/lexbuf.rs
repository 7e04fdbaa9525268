//! Source positions and the lexing buffer.

use core::fmt;

/// Line (1-based), column (0-based) and absolute symbol offset (0-based).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Position {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

impl Position {
    pub const START: Position = Position {
        line: 1,
        column: 0,
        offset: 0,
    };

    pub fn new(line: usize, column: usize, offset: usize) -> Self {
        Position {
            line,
            column,
            offset,
        }
    }
}

impl Default for Position {
    fn default() -> Self {
        Position::START
    }
}

/// Renders as `line:column`.
impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// The lexing buffer: current lexeme, remaining input and the lexeme's
/// start/end positions.
///
/// The buffer is a view on the whole input. The lexeme is the input between
/// the start and end offsets and the remaining input begins at the end
/// offset, so no update ever copies input.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Lexbuf<'a> {
    input: &'a [u8],
    start: Position,
    end: Position,
}

impl<'a> Lexbuf<'a> {
    /// Empty lexeme, the whole input remaining, both positions at `1:0`.
    pub fn new(input: &'a [u8]) -> Self {
        Lexbuf {
            input,
            start: Position::START,
            end: Position::START,
        }
    }

    pub fn lexeme(&self) -> &'a [u8] {
        &self.input[self.start.offset..self.end.offset]
    }

    pub fn remaining(&self) -> &'a [u8] {
        &self.input[self.end.offset..]
    }

    pub fn start_pos(&self) -> Position {
        self.start
    }

    pub fn end_pos(&self) -> Position {
        self.end
    }

    pub fn input(&self) -> &'a [u8] {
        self.input
    }

    /// Buffer after a match of length `n`: the lexeme becomes the first `n`
    /// remaining symbols, the new start is the old end, and the new end is
    /// the old end with column and offset advanced by `n`.
    ///
    /// # Panics
    ///
    /// If `n` exceeds the remaining input.
    pub fn advance(&self, n: usize) -> Lexbuf<'a> {
        assert!(
            n <= self.remaining().len(),
            "match length {} exceeds remaining input {}",
            n,
            self.remaining().len()
        );
        Lexbuf {
            input: self.input,
            start: self.end,
            end: Position {
                line: self.end.line,
                column: self.end.column + n,
                offset: self.end.offset + n,
            },
        }
    }

    /// Next line: end line incremented, end column reset to 0.
    pub fn new_line(&self) -> Lexbuf<'a> {
        Lexbuf {
            end: Position {
                line: self.end.line + 1,
                column: 0,
                offset: self.end.offset,
            },
            ..*self
        }
    }
}

/// Free-function form of [`Lexbuf::advance`].
pub fn update_lexbuf<'a>(b: &Lexbuf<'a>, n: usize) -> Lexbuf<'a> {
    b.advance(n)
}
