//! External symbols and finite words over them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Token used for the empty word.
pub const EMPTY_WORD: &str = "^";

/// An external symbol: a nonempty token without whitespace.
///
/// Tokens starting with `^` are reserved for the empty word and the
/// approximation's bookkeeping states.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(token: impl Into<String>) -> Result<Self> {
        let token = token.into();
        if token.is_empty() {
            return Err(Error::Invalid("empty symbol token".into()));
        }
        if token.chars().any(char::is_whitespace) {
            return Err(Error::Invalid(format!("symbol `{token}` contains whitespace")));
        }
        if token.starts_with('^') {
            return Err(Error::Invalid(format!("symbol `{token}` uses the reserved prefix `^`")));
        }
        Ok(Symbol(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Symbol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Symbol::new(s)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        Symbol::new(raw).map_err(serde::de::Error::custom)
    }
}

/// A finite word. The empty word is written `^`; otherwise symbols are
/// joined by single spaces.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// `w|[i, j]` with inclusive bounds; empty when `j < i`.
    pub fn restrict(&self, i: usize, j: usize) -> Word {
        if j < i || i >= self.0.len() {
            return Word::empty();
        }
        let end = (j + 1).min(self.0.len());
        Word(self.0[i..end].to_vec())
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len.min(self.0.len())].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut symbols = self.0.clone();
        symbols.extend_from_slice(&other.0);
        Word(symbols)
    }

    pub fn push(&self, symbol: Symbol) -> Word {
        let mut symbols = self.0.clone();
        symbols.push(symbol);
        Word(symbols)
    }

    /// Drops the first symbol.
    pub fn tail(&self) -> Word {
        if self.0.is_empty() {
            Word::empty()
        } else {
            Word(self.0[1..].to_vec())
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(EMPTY_WORD);
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(s.as_str())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == EMPTY_WORD {
            return Ok(Word::empty());
        }
        trimmed.split_whitespace().map(Symbol::new).collect::<Result<Vec<_>>>().map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a space-separated word, panicking on bad tokens. Test helper.
pub fn w(s: &str) -> Word {
    s.parse().expect("valid word")
}
