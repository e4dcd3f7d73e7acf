//! Finite unions of cylinders, the `↘` move calculus and minimal
//! representatives.
//!
//! A word set `U` stands for `C¹_U`, the boundary points with a prefix in
//! `U`. Two moves shrink `U` without changing `C¹_U`: dropping a word that
//! has a strict prefix in `U`, and replacing a full sibling family `u|¹` by
//! `u`. Every set reaches the same minimal set whatever the move order.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::words::{Alphabet, Word};

#[derive(Clone)]
pub struct MultiCylinder {
    alphabet: Alphabet,
    words: BTreeSet<Word>,
    minimal: bool,
}

impl PartialEq for MultiCylinder {
    /// Equality of index sets, not of the cylinders they denote; see
    /// [`MultiCylinder::cylinders_equal`].
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.words == other.words
    }
}

impl Eq for MultiCylinder {}

/// A single `↘` move.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Move {
    /// Drop this word; it has a strict prefix in the set.
    RemoveRedundant(Word),
    /// Replace the full child family of this word by the word itself.
    CollapseSiblings(Word),
}

impl MultiCylinder {
    pub fn new<I: IntoIterator<Item = Word>>(alphabet: Alphabet, words: I) -> Result<Self> {
        let words: BTreeSet<Word> = words.into_iter().collect();
        for w in &words {
            alphabet.check(w)?;
        }
        Ok(MultiCylinder {
            alphabet,
            words,
            minimal: false,
        })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        MultiCylinder {
            alphabet,
            words: BTreeSet::new(),
            minimal: true,
        }
    }

    pub fn singleton(alphabet: Alphabet, w: Word) -> Result<Self> {
        Self::new(alphabet, [w])
    }

    /// Parses `{w1, w2, ...}` and checks the words against `alphabet`.
    pub fn parse(alphabet: Alphabet, s: &str) -> Result<Self> {
        Self::new(alphabet, parse_word_set(s)?)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// The index words in shortlex order.
    pub fn words(&self) -> impl ExactSizeIterator<Item = &Word> + Clone {
        self.words.iter()
    }

    /// The index words in plain lexicographic order, as displayed.
    pub fn words_lex(&self) -> Vec<&Word> {
        let mut words: Vec<&Word> = self.words.iter().collect();
        words.sort_by(|a, b| a.letters().cmp(b.letters()));
        words
    }

    pub fn to_vec(&self) -> Vec<Word> {
        self.words.iter().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.contains(w)
    }

    /// Set once the set is known to admit no `↘` move.
    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Whether some word of the set is a prefix of `w`.
    pub fn has_prefix_of(&self, w: &Word) -> bool {
        (0..=w.len()).any(|i| self.words.contains(&w.prefix(i)))
    }

    /// Whether `C¹_w ⊆ C¹_U`. The highest covered ancestor-or-self of `w`
    /// belongs to `U*`, so this is a prefix test against the minimal set.
    pub fn covers(&self, w: &Word) -> bool {
        self.minimize().has_prefix_of(w)
    }

    pub fn union(&self, other: &MultiCylinder) -> Result<MultiCylinder> {
        self.same_alphabet(other)?;
        let words = self.words.union(&other.words).cloned().collect();
        Ok(MultiCylinder {
            alphabet: self.alphabet,
            words,
            minimal: false,
        })
    }

    fn same_alphabet(&self, other: &MultiCylinder) -> Result<()> {
        if self.alphabet == other.alphabet {
            Ok(())
        } else {
            Err(Error::RankMismatch {
                left: self.alphabet.rank(),
                right: other.alphabet.rank(),
            })
        }
    }

    fn with_words(&self, words: BTreeSet<Word>) -> MultiCylinder {
        MultiCylinder {
            alphabet: self.alphabet,
            words,
            minimal: false,
        }
    }

    fn has_strict_prefix_in_set(&self, w: &Word) -> bool {
        (0..w.len()).any(|i| self.words.contains(&w.prefix(i)))
    }

    /// Number of children of `u` in the prefix tree.
    fn child_count(&self, u: &Word) -> usize {
        if u.is_empty() {
            self.alphabet.degree()
        } else {
            self.alphabet.degree() - 1
        }
    }

    /// Parents `u ∉ U` whose whole child family lies in `U`.
    fn collapsible_parents(&self) -> Vec<Word> {
        let mut counts: BTreeMap<Word, usize> = BTreeMap::new();
        for w in &self.words {
            if let Some(p) = w.parent() {
                *counts.entry(p).or_default() += 1;
            }
        }
        counts
            .into_iter()
            .filter(|(p, n)| *n == self.child_count(p) && !self.words.contains(p))
            .map(|(p, _)| p)
            .collect()
    }

    /// Drops the first (shortlex) word having a strict prefix in the set.
    pub fn move_remove_redundant(&self) -> Option<MultiCylinder> {
        let w = self
            .words
            .iter()
            .find(|w| self.has_strict_prefix_in_set(w))?;
        Some(self.apply_move(&Move::RemoveRedundant(w.clone())))
    }

    /// Collapses the full child family of the first (shortlex) eligible parent.
    pub fn move_collapse_siblings(&self) -> Option<MultiCylinder> {
        let u = self.collapsible_parents().into_iter().next()?;
        Some(self.apply_move(&Move::CollapseSiblings(u)))
    }

    /// Every `↘` move available from this set.
    pub fn applicable_moves(&self) -> Vec<Move> {
        let mut moves: Vec<Move> = self
            .words
            .iter()
            .filter(|w| self.has_strict_prefix_in_set(w))
            .map(|w| Move::RemoveRedundant(w.clone()))
            .collect();
        moves.extend(
            self.collapsible_parents()
                .into_iter()
                .map(Move::CollapseSiblings),
        );
        moves
    }

    /// Applies a move without checking that it is applicable.
    pub fn apply_move(&self, m: &Move) -> MultiCylinder {
        let mut words = self.words.clone();
        match m {
            Move::RemoveRedundant(w) => {
                words.remove(w);
            }
            Move::CollapseSiblings(u) => {
                for c in self.alphabet.children(u) {
                    words.remove(&c);
                }
                words.insert(u.clone());
            }
        }
        self.with_words(words)
    }

    /// `U_min`: applies `↘` moves until none is left.
    pub fn minimize(&self) -> MultiCylinder {
        if self.minimal {
            return self.clone();
        }
        let mut current = self.clone();
        loop {
            let redundant: Vec<Word> = current
                .words
                .iter()
                .filter(|w| current.has_strict_prefix_in_set(w))
                .cloned()
                .collect();
            for w in &redundant {
                current.words.remove(w);
            }
            let parents = current.collapsible_parents();
            if redundant.is_empty() && parents.is_empty() {
                break;
            }
            for u in &parents {
                if current.words.contains(u) || current.has_strict_prefix_in_set(u) {
                    continue;
                }
                for c in self.alphabet.children(u) {
                    current.words.remove(&c);
                }
                current.words.insert(u.clone());
            }
        }
        current.minimal = true;
        current
    }

    /// `U* = {u : C¹_u ⊆ C¹_U, C¹_{u|₁} ⊄ C¹_U}`, computed on the prefix
    /// trie of `U` independently of the move calculus.
    pub fn u_star(&self) -> MultiCylinder {
        let depth = self.max_len();
        let prefixes: HashSet<Word> = self
            .words
            .iter()
            .flat_map(|w| (0..=w.len()).map(move |i| w.prefix(i)))
            .collect();
        let mut memo: HashMap<Word, bool> = HashMap::new();
        let mut out = BTreeSet::new();
        if !self.words.is_empty() {
            self.collect_star(&Word::empty(), depth, &prefixes, &mut memo, &mut out);
        }
        MultiCylinder {
            alphabet: self.alphabet,
            words: out,
            minimal: true,
        }
    }

    fn collect_star(
        &self,
        node: &Word,
        depth: usize,
        prefixes: &HashSet<Word>,
        memo: &mut HashMap<Word, bool>,
        out: &mut BTreeSet<Word>,
    ) {
        if self.covered(node, depth, prefixes, memo) {
            out.insert(node.clone());
            return;
        }
        for c in self.alphabet.children(node) {
            if prefixes.contains(&c) {
                self.collect_star(&c, depth, prefixes, memo, out);
            }
        }
    }

    // Only called on nodes without a covered strict ancestor.
    fn covered(
        &self,
        node: &Word,
        depth: usize,
        prefixes: &HashSet<Word>,
        memo: &mut HashMap<Word, bool>,
    ) -> bool {
        if let Some(&c) = memo.get(node) {
            return c;
        }
        let c = self.words.contains(node)
            || (node.len() < depth
                && self
                    .alphabet
                    .children(node)
                    .iter()
                    .all(|c| prefixes.contains(c) && self.covered(c, depth, prefixes, memo)));
        memo.insert(node.clone(), c);
        c
    }

    /// `C¹_U = C¹_V`.
    pub fn cylinders_equal(&self, other: &MultiCylinder) -> Result<bool> {
        self.same_alphabet(other)?;
        Ok(self.minimize().words == other.minimize().words)
    }

    /// Rewrites the set with `↗` moves so that every word has length `k`.
    /// Redundant words are dropped first.
    pub fn normalize_to_depth(&self, k: usize) -> Result<MultiCylinder> {
        let longest = self.max_len();
        if k < longest {
            return Err(Error::DepthTooSmall { depth: k, longest });
        }
        let words = self
            .words
            .iter()
            .filter(|w| !self.has_strict_prefix_in_set(w))
            .flat_map(|w| self.alphabet.extend(w, k - w.len()))
            .collect();
        Ok(self.with_words(words))
    }

    /// Whether `C¹_U ∩ C¹_V = ∅`, i.e. every cross pair is anti-prefix.
    pub fn disjoint(&self, other: &MultiCylinder) -> Result<bool> {
        self.same_alphabet(other)?;
        Ok(self
            .words
            .iter()
            .all(|u| other.words.iter().all(|v| u.anti_prefix(v))))
    }
}

/// Parses `{w1, w2, ...}` without an alphabet check.
pub fn parse_word_set(s: &str) -> Result<Vec<Word>> {
    let t = s.trim();
    let inner = t
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| Error::Parse {
            input: s.to_string(),
            reason: "word set must be written as {w1, w2, ...}".into(),
        })?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|w| w.trim().parse()).collect()
}

impl fmt::Display for MultiCylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, w) in self.words_lex().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for MultiCylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiCylinder{self}")
    }
}
