//! Words over a finite alphabet.
//!
//! A [`Word`] is stored as a persistent singly linked list of symbols with
//! shared tails. Prepending a symbol (`suc0`/`suc1`), dropping the first
//! symbol (`pred`) and cloning are all O(1), which keeps the interpreter's
//! cost proportional to the number of rule applications rather than to the
//! length of the values it shuffles around.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

struct Node {
    sym: u8,
    len: usize,
    tail: Option<Arc<Node>>,
}

/// A finite string of symbols. The empty word is `ε`.
#[derive(Clone, Default)]
pub struct Word {
    head: Option<Arc<Node>>,
}

impl Word {
    pub const fn empty() -> Self {
        Word { head: None }
    }

    /// `1ⁿ`, the unary encoding of `n`.
    pub fn unary(n: usize) -> Self {
        let mut w = Word::empty();
        for _ in 0..n {
            w = w.prepend(b'1');
        }
        w
    }

    pub fn from_symbols(symbols: &[u8]) -> Self {
        symbols
            .iter()
            .rev()
            .fold(Word::empty(), |w, &s| w.prepend(s))
    }

    pub fn len(&self) -> usize {
        self.head.as_ref().map_or(0, |n| n.len)
    }

    pub fn is_empty(&self) -> bool {
        self.head.is_none()
    }

    pub fn first(&self) -> Option<u8> {
        self.head.as_ref().map(|n| n.sym)
    }

    /// `a.v`
    pub fn prepend(&self, sym: u8) -> Word {
        let len = self.len() + 1;
        Word {
            head: Some(Arc::new(Node {
                sym,
                len,
                tail: self.head.clone(),
            })),
        }
    }

    /// The word without its first symbol; `ε` stays `ε`.
    pub fn tail(&self) -> Word {
        match &self.head {
            None => Word::empty(),
            Some(n) => Word {
                head: n.tail.clone(),
            },
        }
    }

    pub fn symbols(&self) -> Symbols<'_> {
        Symbols {
            cur: self.head.as_deref(),
        }
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.symbols().collect()
    }

    /// `v.w`
    pub fn concat(&self, other: &Word) -> Word {
        let prefix = self.to_vec();
        prefix
            .iter()
            .rev()
            .fold(other.clone(), |w, &s| w.prepend(s))
    }

    /// The first `min(n, |w|)` symbols.
    pub fn prefix(&self, n: usize) -> Word {
        let v: Vec<u8> = self.symbols().take(n).collect();
        Word::from_symbols(&v)
    }

    /// `self ⊴ other`: `other = u.self.u'` for some `u`, `u'`.
    pub fn is_subword_of(&self, other: &Word) -> bool {
        if self.len() > other.len() {
            return false;
        }
        if self.is_empty() {
            return true;
        }
        let needle = self.to_vec();
        let hay = other.to_vec();
        hay.windows(needle.len()).any(|w| w == needle.as_slice())
    }

    pub fn is_bit(&self) -> bool {
        self.len() == 1 && matches!(self.first(), Some(b'0') | Some(b'1'))
    }

    pub fn zero() -> Word {
        Word::empty().prepend(b'0')
    }

    pub fn one() -> Word {
        Word::empty().prepend(b'1')
    }

    pub fn is_zero(&self) -> bool {
        self.len() == 1 && self.first() == Some(b'0')
    }

    pub fn is_one(&self) -> bool {
        self.len() == 1 && self.first() == Some(b'1')
    }

    /// Renders `ε` for the empty word, the raw symbols otherwise.
    pub fn display_epsilon(&self) -> String {
        if self.is_empty() {
            "ε".to_string()
        } else {
            self.to_string()
        }
    }
}

impl Drop for Word {
    fn drop(&mut self) {
        // unlink iteratively; long words would otherwise overflow the stack
        let mut cur = self.head.take();
        while let Some(node) = cur {
            match Arc::try_unwrap(node) {
                Ok(mut n) => cur = n.tail.take(),
                Err(_) => break,
            }
        }
    }
}

pub struct Symbols<'a> {
    cur: Option<&'a Node>,
}

impl Iterator for Symbols<'_> {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        let n = self.cur?;
        self.cur = n.tail.as_deref();
        Some(n.sym)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let len = self.cur.map_or(0, |n| n.len);
        (len, Some(len))
    }
}

impl ExactSizeIterator for Symbols<'_> {}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let (mut a, mut b) = (self.head.as_ref(), other.head.as_ref());
        loop {
            match (a, b) {
                (None, None) => return true,
                (Some(x), Some(y)) => {
                    if Arc::ptr_eq(x, y) {
                        return true;
                    }
                    if x.sym != y.sym {
                        return false;
                    }
                    a = x.tail.as_ref();
                    b = y.tail.as_ref();
                }
                _ => return false,
            }
        }
    }
}

impl Eq for Word {}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.len().hash(state);
        for s in self.symbols() {
            s.hash(state);
        }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.symbols().cmp(other.symbols())
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.symbols().map(char::from).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({:?})", self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("symbol {symbol:?} is not in the alphabet {alphabet}")]
pub struct AlphabetError {
    pub symbol: char,
    pub alphabet: String,
}

impl FromStr for Word {
    type Err = AlphabetError;

    /// Parses a word over the binary alphabet.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Alphabet::binary().word(s)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The alphabet `Σ`. Always contains `0` and `1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: BTreeSet<u8>,
}

impl Alphabet {
    pub fn binary() -> Self {
        Alphabet {
            symbols: b"01".iter().copied().collect(),
        }
    }

    /// `{0,1}` extended with the given ASCII graphic symbols.
    pub fn with_symbols(extra: &str) -> Self {
        let mut a = Alphabet::binary();
        a.symbols
            .extend(extra.bytes().filter(|b| b.is_ascii_graphic() && *b != b'"'));
        a
    }

    pub fn contains(&self, sym: u8) -> bool {
        self.symbols.contains(&sym)
    }

    pub fn symbols(&self) -> impl Iterator<Item = u8> + '_ {
        self.symbols.iter().copied()
    }

    pub fn word(&self, s: &str) -> Result<Word, AlphabetError> {
        for c in s.chars() {
            if !c.is_ascii() || !self.contains(c as u8) {
                return Err(AlphabetError {
                    symbol: c,
                    alphabet: self.to_string(),
                });
            }
        }
        Ok(Word::from_symbols(s.as_bytes()))
    }

    pub fn admits(&self, w: &Word) -> bool {
        w.symbols().all(|s| self.contains(s))
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::binary()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.symbols.iter().map(|&b| (b as char).to_string()).collect();
        write!(f, "{{{}}}", s.join(","))
    }
}
