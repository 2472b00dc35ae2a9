//! Finite words over the branch alphabet {1, 2}.
//!
//! A word names both a product of branch derivative matrices and an itinerary
//! through the partition regions. The convention throughout the crate: a word
//! is read left to right as a matrix product, so the **leftmost symbol is the
//! last map applied** in time (the word `122` denotes the matrix product
//! `D1*D2*D2`, realized by applying branch 2 twice and then branch 1).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A nonempty word over {1, 2}; supports the canonical run form
/// `D1^n D2^m ...` via [`SymbolBlock::from_runs`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SymbolBlock {
    symbols: Vec<u8>,
}

impl SymbolBlock {
    /// Parse from a string of `1`/`2` characters, e.g. `"1222"`.
    pub fn from_word(word: &str) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::Domain("empty word".into()));
        }
        let mut symbols = Vec::with_capacity(word.len());
        for c in word.chars() {
            match c {
                '1' => symbols.push(1),
                '2' => symbols.push(2),
                other => {
                    return Err(Error::Domain(format!(
                        "invalid symbol {other:?} in word {word:?}"
                    )))
                }
            }
        }
        Ok(SymbolBlock { symbols })
    }

    /// Build from run pairs `(n, m)` in written (left-to-right) order: each
    /// pair contributes `1` repeated `n` times then `2` repeated `m` times.
    /// `from_runs(&[(1, 3)])` is the word `1222`.
    pub fn from_runs(runs: &[(u32, u32)]) -> Result<Self> {
        let mut symbols = Vec::new();
        for &(n, m) in runs {
            symbols.extend(std::iter::repeat(1u8).take(n as usize));
            symbols.extend(std::iter::repeat(2u8).take(m as usize));
        }
        if symbols.is_empty() {
            return Err(Error::Domain("runs produce an empty word".into()));
        }
        Ok(SymbolBlock { symbols })
    }

    /// The symbols, values 1 or 2, in written order (leftmost applied last).
    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Word length.
    #[allow(clippy::len_without_is_empty)] // words are never empty
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    /// The word as a string of `1`/`2` characters.
    pub fn word(&self) -> String {
        self.symbols
            .iter()
            .map(|&s| if s == 1 { '1' } else { '2' })
            .collect()
    }

    /// If the word is exactly `1^n 2^m` (single run pair, `n, m >= 0`,
    /// at least one positive), return `(n, m)`.
    pub fn single_run_form(&self) -> Option<(u32, u32)> {
        let runs = self.run_decomposition();
        match runs.len() {
            1 => Some(runs[0]),
            _ => None,
        }
    }

    /// Maximal-run decomposition in written order. Each pair is a (possibly
    /// empty) `1`-run followed by a (possibly empty) `2`-run; only the first
    /// pair may have `n = 0` and only the last may have `m = 0`.
    pub fn run_decomposition(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        let mut i = 0;
        let s = &self.symbols;
        while i < s.len() {
            let mut n = 0u32;
            while i < s.len() && s[i] == 1 {
                n += 1;
                i += 1;
            }
            let mut m = 0u32;
            while i < s.len() && s[i] == 2 {
                m += 1;
                i += 1;
            }
            out.push((n, m));
        }
        out
    }

    /// The word reversed (time order <-> written order).
    pub fn reversed(&self) -> SymbolBlock {
        let mut symbols = self.symbols.clone();
        symbols.reverse();
        SymbolBlock { symbols }
    }

    /// Concatenation `self` then `other` in written order.
    pub fn concat(&self, other: &SymbolBlock) -> SymbolBlock {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        SymbolBlock { symbols }
    }
}

impl std::fmt::Display for SymbolBlock {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.word())
    }
}

impl std::str::FromStr for SymbolBlock {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SymbolBlock::from_word(s)
    }
}

impl TryFrom<String> for SymbolBlock {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        SymbolBlock::from_word(&s)
    }
}

impl From<SymbolBlock> for String {
    fn from(b: SymbolBlock) -> String {
        b.word()
    }
}
