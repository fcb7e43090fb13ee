//! Position-tracking S-expression reader shared by the PDDL front end and the
//! plain-text dump formats.

use std::fmt;

use crate::error::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sexpr {
    /// Symbols are lower-cased on read; PDDL names are case-insensitive.
    Atom(String, Pos),
    List(Vec<Sexpr>, Pos),
}

impl Sexpr {
    pub fn pos(&self) -> Pos {
        match self {
            Sexpr::Atom(_, p) | Sexpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(s, _) => Some(s),
            Sexpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items, _) => Some(items),
            Sexpr::Atom(..) => None,
        }
    }

    /// Head symbol of a list, if the first element is an atom.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(Sexpr::as_atom)
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        let p = self.pos();
        ParseError::new(p.line, p.col, message)
    }
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Atom(s, _) => f.write_str(s),
            Sexpr::List(items, _) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexpr>, ParseError> {
        self.skip_trivia();
        let start = self.pos();
        match self.chars.peek() {
            None => Ok(None),
            Some(')') => Err(ParseError::new(start.line, start.col, "unbalanced `)`")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(ParseError::new(start.line, start.col, "unterminated list: missing `)`")),
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexpr::List(items, start)));
                        }
                        Some(_) => items.push(self.read()?.expect("peeked a character")),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.extend(c.to_lowercase());
                    self.bump();
                }
                Ok(Some(Sexpr::Atom(s, start)))
            }
        }
    }
}

/// Reads every top-level expression in `text`.
pub fn parse_all(text: &str) -> Result<Vec<Sexpr>, ParseError> {
    let mut reader = Reader::new(text);
    let mut out = Vec::new();
    while let Some(e) = reader.read()? {
        out.push(e);
    }
    Ok(out)
}

/// Reads exactly one top-level expression.
pub fn parse_one(text: &str) -> Result<Sexpr, ParseError> {
    let mut all = parse_all(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(ParseError::new(1, 1, "empty input")),
        _ => Err(all[1].error("trailing input after first expression")),
    }
}
