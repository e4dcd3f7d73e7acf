//! Double cylinders `C²_{[u,v]}`: pairs of distinct boundary points whose
//! connecting geodesic in the Cayley tree passes through `u` and then `v`.
//!
//! When `u` and `v` are anti-prefix the double cylinder is the rectangle
//! `C¹_u × C¹_v`, and its image under `φ` is the product of the dual maps.
//! Comparable pairs are first translated and split into rectangles.

use std::collections::BTreeSet;
use std::fmt;

use crate::automorphism::{tight_cancellation, Automorphism, Defects};
use crate::error::{Error, Result};
use crate::exec::Budget;
use crate::image::dual_map_with;
use crate::words::{Alphabet, Letter, Word};

/// The pair `[u, v]` with `u ≠ v`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RectanglePair {
    left: Word,
    right: Word,
}

impl RectanglePair {
    pub fn new(left: Word, right: Word) -> Result<Self> {
        if left == right {
            return Err(Error::DegeneratePair(left));
        }
        Ok(RectanglePair { left, right })
    }

    pub fn left(&self) -> &Word {
        &self.left
    }

    pub fn right(&self) -> &Word {
        &self.right
    }

    /// Parses `[u, v]`.
    pub fn parse(s: &str) -> Result<Self> {
        let (u, v) = parse_pair(s)?;
        RectanglePair::new(u, v)
    }
}

/// Parses `[u, v]` into its two words, allowing `u = v`.
pub fn parse_pair(s: &str) -> Result<(Word, Word)> {
    let err = || Error::Parse {
        input: s.to_string(),
        reason: "pair must be written as [u, v]".into(),
    };
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(err)?;
    let (u, v) = inner.split_once(',').ok_or_else(err)?;
    Ok((u.trim().parse()?, v.trim().parse()?))
}

impl fmt::Display for RectanglePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.left, self.right)
    }
}

/// A finite union of double cylinders, kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RectangleUnion {
    pairs: BTreeSet<RectanglePair>,
}

impl RectangleUnion {
    pub fn new<I: IntoIterator<Item = RectanglePair>>(pairs: I) -> Self {
        RectangleUnion {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn pairs(&self) -> impl ExactSizeIterator<Item = &RectanglePair> + Clone {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn extend(&mut self, other: RectangleUnion) {
        self.pairs.extend(other.pairs);
    }
}

impl fmt::Display for RectangleUnion {
    /// One pair per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.pairs {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Whether `C²_{[u,v]} = C¹_u × C¹_v`, i.e. `u`, `v` anti-prefix.
pub fn is_rectangle(u: &Word, v: &Word) -> Result<bool> {
    if u == v {
        return Err(Error::DegeneratePair(u.clone()));
    }
    Ok(u.anti_prefix(v))
}

/// `w·C²_{[u,v]} = C²_{[wu,wv]}`, applied to every pair.
pub fn translate(w: &Word, union: &RectangleUnion) -> RectangleUnion {
    RectangleUnion::new(union.pairs().map(|p| RectanglePair {
        left: w.concat(&p.left),
        right: w.concat(&p.right),
    }))
}

/// `C²_{[1,x]} = ⋃ C²_{[y,x]}` over the letters `y ≠ x`.
pub fn split_unit(alphabet: Alphabet, x: Letter) -> RectangleUnion {
    RectangleUnion::new(
        alphabet
            .letters()
            .filter(|&y| y != x)
            .map(|y| RectanglePair {
                left: Word::letter(y),
                right: Word::letter(x),
            }),
    )
}

/// `C²_{[x,1]} = ⋃ C²_{[x,y]}` over the letters `y ≠ x`.
fn split_unit_mirrored(alphabet: Alphabet, x: Letter) -> RectangleUnion {
    RectangleUnion::new(
        alphabet
            .letters()
            .filter(|&y| y != x)
            .map(|y| RectanglePair {
                left: Word::letter(x),
                right: Word::letter(y),
            }),
    )
}

/// Computes dual maps with one set of cancellation bounds.
struct Duals<'a> {
    phi: &'a Automorphism,
    bounds: Defects,
    budget: Budget,
}

impl Duals<'_> {
    fn of(&self, u: &Word) -> Result<Vec<Word>> {
        Ok(dual_map_with(self.phi, u, self.bounds, self.budget)?.to_vec())
    }

    fn product(&self, u: &Word, v: &Word) -> Result<RectangleUnion> {
        let (left, right) = (self.of(u)?, self.of(v)?);
        let mut pairs = Vec::with_capacity(left.len() * right.len());
        for a in &left {
            for b in &right {
                pairs.push(RectanglePair::new(a.clone(), b.clone())?);
            }
        }
        Ok(RectangleUnion::new(pairs))
    }

    fn image(&self, u: &Word, v: &Word) -> Result<RectangleUnion> {
        let alphabet = self.phi.alphabet();
        alphabet.check(u)?;
        alphabet.check(v)?;
        if u == v {
            return Err(Error::DegeneratePair(u.clone()));
        }
        if u.anti_prefix(v) {
            return self.product(u, v);
        }
        let (short, long) = if u.len() < v.len() { (u, v) } else { (v, u) };
        let step = long.letters()[short.len()];
        if long.len() - short.len() >= 2 {
            // One step from the shorter word towards the longer one; the
            // translated pair starts with different letters.
            let w = long.prefix(short.len() + 1);
            let w_inv = w.inverse();
            let inner = self.product(&w_inv.concat(u), &w_inv.concat(v))?;
            return Ok(translate(&self.phi.apply(&w), &inner));
        }
        let pieces = if u.len() < v.len() {
            split_unit(alphabet, step)
        } else {
            split_unit_mirrored(alphabet, step)
        };
        let mut out = RectangleUnion::default();
        for p in pieces.pairs() {
            out.extend(self.product(&p.left, &p.right)?);
        }
        Ok(translate(&self.phi.apply(short), &out))
    }

    fn closed(&self, u: &Word, v: &Word) -> Result<RectangleUnion> {
        let alphabet = self.phi.alphabet();
        alphabet.check(u)?;
        alphabet.check(v)?;
        if u == v {
            return Err(Error::DegeneratePair(u.clone()));
        }
        let shift = |a: &Word, b: &Word| -> Result<Vec<Word>> {
            let base = self.phi.apply(a);
            Ok(self
                .of(&a.inverse().concat(b))?
                .iter()
                .map(|x| base.concat(x))
                .collect())
        };
        let left = shift(v, u)?;
        let right = shift(u, v)?;
        let mut pairs = Vec::new();
        for a in &left {
            for b in &right {
                pairs.push(RectanglePair::new(a.clone(), b.clone()).map_err(|_| {
                    Error::Internal(format!(
                        "closed formula produced the degenerate pair [{a}, {a}]"
                    ))
                })?);
            }
        }
        Ok(RectangleUnion::new(pairs))
    }
}

/// `φ(C²_{[u,v]})` as a disjoint union of double cylinders, with certified
/// cancellation bounds.
pub fn double_image(phi: &Automorphism, u: &Word, v: &Word) -> Result<RectangleUnion> {
    double_image_with(
        phi,
        u,
        v,
        tight_cancellation(phi).certified(),
        Budget::default(),
    )
}

pub fn double_image_with(
    phi: &Automorphism,
    u: &Word,
    v: &Word,
    bounds: Defects,
    budget: Budget,
) -> Result<RectangleUnion> {
    Duals {
        phi,
        bounds,
        budget,
    }
    .image(u, v)
}

/// All pairs from `φ(v)·φ*(v⁻¹u) × φ(u)·φ*(u⁻¹v)`, valid without assuming
/// `u`, `v` anti-prefix.
pub fn double_image_closed(phi: &Automorphism, u: &Word, v: &Word) -> Result<RectangleUnion> {
    double_image_closed_with(
        phi,
        u,
        v,
        tight_cancellation(phi).certified(),
        Budget::default(),
    )
}

pub fn double_image_closed_with(
    phi: &Automorphism,
    u: &Word,
    v: &Word,
    bounds: Defects,
    budget: Budget,
) -> Result<RectangleUnion> {
    Duals {
        phi,
        bounds,
        budget,
    }
    .closed(u, v)
}
