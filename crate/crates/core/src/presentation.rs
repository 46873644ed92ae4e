//! Finite presentations and their text grammar.
//!
//! ```text
//! presentation := "<" gens "|" relators ">"
//! gens         := ident ("," ident)*
//! relators     := (word ("," word)*)?
//! word         := factor+
//! factor       := atom ("^" integer)?
//! atom         := ident | "1" | "[" word "," word "]" | "(" word ")"
//! ```
//!
//! Whitespace is insignificant and `#` starts a comment running to the end
//! of the line. Identifiers are `[A-Za-z][A-Za-z0-9_]*`, matched greedily,
//! so adjacent generators must be separated (`a b`, not `ab`).

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::words::{cyclic_reduce, Generator, Word, WordDisplay};

/// Longest word the parser will expand a relator to.
pub const MAX_EXPANDED_LENGTH: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<Generator>,
    relators: Vec<Word>,
    prime_hint: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("a presentation needs at least one generator")]
    NoGenerators,
    #[error("duplicate generator name {0:?}")]
    DuplicateGenerator(String),
    #[error("invalid generator name {0:?}")]
    InvalidName(String),
    #[error("relator {index} uses generator {generator}, but only {count} generators exist")]
    GeneratorOutOfRange { index: usize, generator: usize, count: usize },
}

impl Presentation {
    /// Builds a presentation, freely and cyclically reducing every relator.
    pub fn new<S: AsRef<str>>(names: &[S], relators: Vec<Word>) -> Result<Self, PresentationError> {
        if names.is_empty() {
            return Err(PresentationError::NoGenerators);
        }
        let mut generators = Vec::with_capacity(names.len());
        for (index, name) in names.iter().enumerate() {
            let name = name.as_ref();
            if !is_identifier(name) {
                return Err(PresentationError::InvalidName(name.to_string()));
            }
            if generators.iter().any(|g: &Generator| g.name == name) {
                return Err(PresentationError::DuplicateGenerator(name.to_string()));
            }
            generators.push(Generator { index, name: name.to_string() });
        }
        let count = generators.len();
        let mut reduced = Vec::with_capacity(relators.len());
        for (index, r) in relators.iter().enumerate() {
            if let Some(generator) = r.max_generator().filter(|&g| g >= count) {
                return Err(PresentationError::GeneratorOutOfRange { index, generator, count });
            }
            reduced.push(cyclic_reduce(r));
        }
        Ok(Presentation { generators, relators: reduced, prime_hint: None })
    }

    /// Free group on `count` generators named `x1, x2, ...` (or `x, y` for
    /// two generators).
    pub fn free(count: usize) -> Self {
        let names: Vec<String> = match count {
            1 => vec!["x".into()],
            2 => vec!["x".into(), "y".into()],
            3 => vec!["x".into(), "y".into(), "z".into()],
            _ => (1..=count).map(|i| format!("x{i}")).collect(),
        };
        Presentation::new(&names, Vec::new()).expect("generated names are valid")
    }

    /// Surface group `< a1, b1, ..., ag, bg | [a1,b1]...[ag,bg] >`.
    pub fn surface(genus: usize) -> Self {
        assert!(genus >= 1, "surface genus must be positive");
        let mut names = Vec::new();
        let mut rel = Word::identity();
        for i in 1..=genus {
            names.push(format!("a{i}"));
            names.push(format!("b{i}"));
            let a = Word::generator(2 * i - 2);
            let b = Word::generator(2 * i - 1);
            rel = rel.mul(&Word::commutator(&a, &b));
        }
        Presentation::new(&names, vec![rel]).expect("generated names are valid")
    }

    pub fn with_prime_hint(mut self, p: Option<u64>) -> Self {
        self.prime_hint = p;
        self
    }

    pub fn prime_hint(&self) -> Option<u64> {
        self.prime_hint
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator_names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Number of generators, `d`.
    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Number of declared relators, `r`.
    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    /// Returns a copy with extra relators appended (reduced on the way in).
    pub fn with_relators<I: IntoIterator<Item = Word>>(&self, extra: I) -> Self {
        let mut out = self.clone();
        for r in extra {
            debug_assert!(r.max_generator().map_or(true, |g| g < self.generator_count()));
            out.relators.push(cyclic_reduce(&r));
        }
        out
    }

    pub fn display_word<'a>(&'a self, word: &'a Word) -> impl fmt::Display + 'a {
        WordDisplayOwned { word, names: self.generator_names() }
    }

    /// Parses a word over this presentation's generators.
    pub fn parse_word(&self, text: &str) -> Result<Word, ParseError> {
        let mut parser = Parser::new(text);
        parser.names = self
            .generators
            .iter()
            .map(|g| (g.name.clone(), g.index))
            .collect();
        parser.skip_ws();
        let w = parser.word()?;
        parser.skip_ws();
        if let Some(c) = parser.peek() {
            return Err(parser.error(ParseErrorKind::Unexpected(c)));
        }
        Ok(w)
    }
}

struct WordDisplayOwned<'a> {
    word: &'a Word,
    names: Vec<String>,
}

impl fmt::Display for WordDisplayOwned<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        WordDisplay { word: self.word, names: &self.names }.fmt(f)
    }
}

/// Canonical printer: `< x, y | x y x^-1 y^-1 >`.
impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.generator_names();
        write!(f, "< {} |", names.join(", "))?;
        for (i, r) in self.relators.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { ", " })?;
            WordDisplay { word: r, names: &names }.fmt(f)?;
        }
        f.write_str(" >")
    }
}

impl std::str::FromStr for Presentation {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_presentation(s)
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unterminated presentation (missing '>')")]
    Unterminated,
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(&'static str),
    #[error("unexpected character {0:?}")]
    Unexpected(char),
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("duplicate generator {0:?}")]
    DuplicateGenerator(String),
    #[error("exponent out of range")]
    ExponentOutOfRange,
    #[error("relator expands beyond {MAX_EXPANDED_LENGTH} letters")]
    TooLong,
}

/// Parses a presentation in the grammar described at module level.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut p = Parser::new(text);
    p.skip_ws();
    p.expect('<', "'<'")?;
    let mut names = Vec::new();
    loop {
        p.skip_ws();
        let (line, column) = p.position();
        let name = p.ident()?;
        if names.contains(&name) {
            return Err(ParseError { line, column, kind: ParseErrorKind::DuplicateGenerator(name) });
        }
        p.names.insert(name.clone(), names.len());
        names.push(name);
        p.skip_ws();
        match p.peek() {
            Some(',') => {
                p.bump();
            }
            Some('|') => {
                p.bump();
                break;
            }
            Some(c) => return Err(p.error(ParseErrorKind::Unexpected(c))),
            None => return Err(p.error(ParseErrorKind::Unterminated)),
        }
    }
    let mut relators = Vec::new();
    p.skip_ws();
    if p.peek() != Some('>') {
        loop {
            if p.peek().is_none() {
                return Err(p.error(ParseErrorKind::Unterminated));
            }
            relators.push(p.word()?);
            p.skip_ws();
            match p.peek() {
                Some(',') => {
                    p.bump();
                    p.skip_ws();
                }
                Some('>') => break,
                Some(c) => return Err(p.error(ParseErrorKind::Unexpected(c))),
                None => return Err(p.error(ParseErrorKind::Unterminated)),
            }
        }
    }
    p.expect('>', "'>'")?;
    p.skip_ws();
    if let Some(c) = p.peek() {
        return Err(p.error(ParseErrorKind::Unexpected(c)));
    }
    Ok(Presentation::new(&names, relators).expect("parser validated generator names"))
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    names: HashMap<String, usize>,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser { chars: text.chars().collect(), pos: 0, names: HashMap::new() }
    }

    fn position(&self) -> (usize, usize) {
        let mut line = 1;
        let mut column = 1;
        for &c in &self.chars[..self.pos] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        (line, column)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let (line, column) = self.position();
        ParseError { line, column, kind }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, want: char, what: &'static str) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(_) => Err(self.error(ParseErrorKind::Expected(what))),
            None if want == '>' => Err(self.error(ParseErrorKind::Unterminated)),
            None => Err(self.error(ParseErrorKind::UnexpectedEnd(what))),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {}
            Some(_) => return Err(self.error(ParseErrorKind::Expected("generator name"))),
            None => return Err(self.error(ParseErrorKind::Unterminated)),
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == '[' || c == '(' || c == '1')
    }

    fn word(&mut self) -> Result<Word, ParseError> {
        self.skip_ws();
        if !self.starts_factor() {
            return Err(match self.peek() {
                None => self.error(ParseErrorKind::Unterminated),
                Some(_) => self.error(ParseErrorKind::Expected("word")),
            });
        }
        let mut out = Word::identity();
        while self.starts_factor() {
            let f = self.factor()?;
            out = out.mul(&f);
            if out.len() > MAX_EXPANDED_LENGTH {
                return Err(self.error(ParseErrorKind::TooLong));
            }
            self.skip_ws();
        }
        Ok(out)
    }

    fn factor(&mut self) -> Result<Word, ParseError> {
        let atom = self.atom()?;
        self.skip_ws();
        if self.peek() != Some('^') {
            return Ok(atom);
        }
        self.bump();
        self.skip_ws();
        let exp = self.integer()?;
        if (atom.len() as u128) * (exp.unsigned_abs() as u128) > MAX_EXPANDED_LENGTH as u128 {
            return Err(self.error(ParseErrorKind::TooLong));
        }
        Ok(atom.pow(exp))
    }

    fn atom(&mut self) -> Result<Word, ParseError> {
        match self.peek() {
            Some('[') => {
                self.bump();
                let u = self.word()?;
                self.expect(',', "','")?;
                let v = self.word()?;
                self.expect(']', "']'")?;
                Ok(Word::commutator(&u, &v))
            }
            Some('(') => {
                self.bump();
                let w = self.word()?;
                self.expect(')', "')'")?;
                Ok(w)
            }
            Some('1') => {
                self.bump();
                Ok(Word::identity())
            }
            _ => {
                let (line, column) = self.position();
                let name = self.ident()?;
                match self.names.get(&name) {
                    Some(&g) => Ok(Word::generator(g)),
                    None => Err(ParseError { line, column, kind: ParseErrorKind::UnknownGenerator(name) }),
                }
            }
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        let negative = match self.peek() {
            Some('-') => {
                self.bump();
                true
            }
            Some('+') => {
                self.bump();
                false
            }
            _ => false,
        };
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if start == self.pos {
            return Err(match self.peek() {
                None => self.error(ParseErrorKind::Unterminated),
                Some(_) => self.error(ParseErrorKind::Expected("integer exponent")),
            });
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        let value: i64 = digits
            .parse()
            .map_err(|_| self.error(ParseErrorKind::ExponentOutOfRange))?;
        Ok(if negative { -value } else { value })
    }
}
