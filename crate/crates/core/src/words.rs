//! Freely reduced words over `a, b, c, ...` and their formal inverses.
//!
//! Text syntax: generator `i` is the `i`-th lowercase ASCII letter, its
//! inverse is the matching uppercase letter, and the empty word is `1`.
//! So `aBA` is `a b⁻¹ a⁻¹`.
//!
//! Words do not carry their alphabet. Containers that do (automorphisms,
//! multi-cylinders) check that every letter they are handed fits their rank.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 26;

/// The generating set `{a₁, …, aₙ}`; names are fixed to `a, b, c, …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    rank: usize,
}

impl Alphabet {
    pub fn new(rank: usize) -> Result<Self> {
        if (2..=MAX_RANK).contains(&rank) {
            Ok(Alphabet { rank })
        } else {
            Err(Error::InvalidRank(rank))
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of letters in `A ∪ A⁻¹`.
    pub fn degree(&self) -> usize {
        2 * self.rank
    }

    pub fn generator(&self, index: usize) -> Letter {
        assert!(
            index < self.rank,
            "generator {index} outside rank {}",
            self.rank
        );
        Letter::new(index, false)
    }

    /// All letters of `A ∪ A⁻¹` in canonical order `a, A, b, B, …`.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + Clone {
        (0..2 * self.rank as u8).map(Letter)
    }

    pub fn contains_letter(&self, letter: Letter) -> bool {
        letter.generator() < self.rank
    }

    pub fn check(&self, w: &Word) -> Result<()> {
        if w.letters.iter().all(|&l| self.contains_letter(l)) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch {
                word: w.to_string(),
                rank: self.rank,
            })
        }
    }

    /// Parses a word and checks it against this alphabet.
    pub fn parse(&self, s: &str) -> Result<Word> {
        let w: Word = s.parse()?;
        self.check(&w)?;
        Ok(w)
    }

    /// Number of reduced words of length exactly `len`.
    pub fn words_of_length(&self, len: usize) -> u64 {
        if len == 0 {
            1
        } else {
            self.degree() as u64 * (self.degree() as u64 - 1).saturating_pow(len as u32 - 1)
        }
    }

    /// All reduced words of length exactly `len`, in lexicographic order.
    pub fn all_words(&self, len: usize) -> Vec<Word> {
        self.extend(&Word::empty(), len)
    }

    /// `#(w|^k)`.
    pub fn extend_count(&self, w: &Word, k: usize) -> u64 {
        let branching = self.degree() as u64 - 1;
        if k == 0 {
            1
        } else if w.is_empty() {
            self.degree() as u64 * branching.pow(k as u32 - 1)
        } else {
            branching.pow(k as u32)
        }
    }

    /// `w|^k`: every reduced word of length `|w| + k` with prefix `w`,
    /// listed in lexicographic order.
    pub fn extend(&self, w: &Word, k: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut buf = w.letters.clone();
        self.extend_into(&mut buf, w.len() + k, &mut out);
        out
    }

    fn extend_into(&self, buf: &mut Vec<Letter>, target: usize, out: &mut Vec<Word>) {
        if buf.len() == target {
            out.push(Word {
                letters: buf.clone(),
            });
            return;
        }
        let forbidden = buf.last().map(|l| l.inverse());
        for letter in self.letters() {
            if Some(letter) == forbidden {
                continue;
            }
            buf.push(letter);
            self.extend_into(buf, target, out);
            buf.pop();
        }
    }

    /// `w|^1`, the children of `w` in the prefix tree.
    pub fn children(&self, w: &Word) -> Vec<Word> {
        self.extend(w, 1)
    }

    /// Letters that may follow `w` without cancelling.
    pub fn successors(&self, w: &Word) -> impl Iterator<Item = Letter> + '_ {
        let forbidden = w.last().map(|l| l.inverse());
        self.letters().filter(move |&l| Some(l) != forbidden)
    }
}

/// A letter of `A ∪ A⁻¹`, stored as `2·generator + (1 if inverse)`.
///
/// The derived order is the canonical one: generator first, positive before
/// negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        assert!(generator < MAX_RANK);
        Letter((2 * generator) as u8 | inverse as u8)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + self.generator() as u8) as char
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a'..='z' => Some(Letter::new(c as usize - 'a' as usize, false)),
            'A'..='Z' => Some(Letter::new(c as usize - 'A' as usize, true)),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A freely reduced word. Immutable; every operation returns a new value.
///
/// Ordered shortlex: shorter words first, then lexicographically by letter.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    /// Builds a word from letters that must already be freely reduced.
    pub fn from_letters(letters: Vec<Letter>) -> Result<Self> {
        let w = Word { letters };
        if w.letters.windows(2).any(|p| p[1] == p[0].inverse()) {
            return Err(Error::NotReduced {
                word: w.to_string(),
            });
        }
        Ok(w)
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            push_reducing(&mut stack, l);
        }
        Word { letters: stack }
    }

    /// Parses and freely reduces, accepting non-reduced input.
    pub fn parse_reducing(s: &str) -> Result<Self> {
        Ok(Word::reduce(parse_letters(s)?))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    /// Free reduction of the product `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let cancel = self
            .letters
            .iter()
            .rev()
            .zip(&other.letters)
            .take_while(|(a, b)| a.inverse() == **b)
            .count();
        let mut letters = Vec::with_capacity(self.len() + other.len() - 2 * cancel);
        letters.extend_from_slice(&self.letters[..self.len() - cancel]);
        letters.extend_from_slice(&other.letters[cancel..]);
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn common_prefix_len(&self, other: &Word) -> usize {
        self.letters
            .iter()
            .zip(&other.letters)
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// `w₁ ∧ w₂`, the longest common prefix.
    pub fn common_prefix(&self, other: &Word) -> Word {
        self.prefix(self.common_prefix_len(other))
    }

    /// `self ≤ other`.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.letters.starts_with(&self.letters)
    }

    /// `self < other`: a prefix and strictly shorter.
    pub fn is_strict_prefix_of(&self, other: &Word) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    /// Neither word is a prefix of the other.
    pub fn anti_prefix(&self, other: &Word) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }

    /// The first `len` letters.
    pub fn prefix(&self, len: usize) -> Word {
        Word {
            letters: self.letters[..len].to_vec(),
        }
    }

    /// `w|_k`: erase the last `k` letters.
    pub fn trim(&self, k: usize) -> Result<Word> {
        if k > self.len() {
            return Err(Error::TrimTooLong {
                amount: k,
                len: self.len(),
            });
        }
        Ok(self.prefix(self.len() - k))
    }

    /// Like [`Word::trim`] but yields the empty word when `k ≥ |w|`.
    pub fn trim_saturating(&self, k: usize) -> Word {
        self.prefix(self.len().saturating_sub(k))
    }

    /// Appends a letter, or returns `None` if it would cancel.
    pub fn push(&self, l: Letter) -> Option<Word> {
        if self.last() == Some(l.inverse()) {
            return None;
        }
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.extend_from_slice(&self.letters);
        letters.push(l);
        Some(Word { letters })
    }

    /// `w|_1`; `None` for the empty word.
    pub fn parent(&self) -> Option<Word> {
        (!self.is_empty()).then(|| self.prefix(self.len() - 1))
    }
}

pub(crate) fn push_reducing(stack: &mut Vec<Letter>, l: Letter) {
    if stack.last() == Some(&l.inverse()) {
        stack.pop();
    } else {
        stack.push(l);
    }
}

fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    let s = s.trim();
    if s == "1" {
        return Ok(Vec::new());
    }
    if s.is_empty() {
        return Err(Error::Parse {
            input: s.to_string(),
            reason: "empty input; the empty word is spelled 1".into(),
        });
    }
    s.chars()
        .map(|c| {
            Letter::from_char(c).ok_or_else(|| Error::Parse {
                input: s.to_string(),
                reason: format!("unexpected character {c:?}"),
            })
        })
        .collect()
}

impl FromStr for Word {
    type Err = Error;

    /// Strict parse: rejects input that is not freely reduced.
    fn from_str(s: &str) -> Result<Self> {
        Word::from_letters(parse_letters(s)?)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}
