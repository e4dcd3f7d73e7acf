//! Brute-force semantics for cylinders and double cylinders, used to certify
//! the results of the other modules.
//!
//! Nothing here calls the image or minimization code. Single cylinders are
//! compared through depth slices, images through trimmed images (a reduced
//! product `φ(w)·φ(ξ)` cancels at most `C/2` letters of `φ(w)`), and double
//! cylinders through geodesics in the Cayley tree.

use std::collections::{BTreeSet, HashSet};

use crate::automorphism::{Automorphism, Defects};
use crate::double::{RectanglePair, RectangleUnion};
use crate::error::{Error, Result};
use crate::exec::{Budget, Meter};
use crate::multicyl::MultiCylinder;
use crate::words::{Alphabet, Word};

/// All length-`depth` words with a prefix in a word set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthSlice {
    pub depth: usize,
    pub words: BTreeSet<Word>,
}

fn check_depth(set: &MultiCylinder, depth: usize) -> Result<()> {
    let longest = set.max_len();
    if depth < longest {
        Err(Error::DepthTooSmall { depth, longest })
    } else {
        Ok(())
    }
}

pub fn depth_slice(set: &MultiCylinder, depth: usize) -> Result<DepthSlice> {
    check_depth(set, depth)?;
    let alphabet = set.alphabet();
    let words = set
        .words()
        .flat_map(|u| alphabet.extend(u, depth - u.len()))
        .collect();
    Ok(DepthSlice { depth, words })
}

// Length-`depth` words as base-2r integers, most significant letter first, so
// that numeric order is lexicographic order and a prefix is a code range.
struct SliceCodes {
    degree: u64,
    depth: usize,
    codes: Vec<u64>,
}

impl SliceCodes {
    fn build(set: &MultiCylinder, depth: usize) -> Self {
        let alphabet = set.alphabet();
        let degree = alphabet.degree() as u64;
        let mut codes = Vec::new();
        for u in set.words() {
            let code = Self::encode(degree, u);
            Self::extend(
                alphabet,
                degree,
                code,
                u.last().map(|l| l.inverse()),
                depth - u.len(),
                &mut codes,
            );
        }
        codes.sort_unstable();
        codes.dedup();
        SliceCodes {
            degree,
            depth,
            codes,
        }
    }

    fn encode(degree: u64, w: &Word) -> u64 {
        w.letters().iter().fold(0, |acc, l| {
            acc * degree + (l.generator() * 2 + l.is_inverse() as usize) as u64
        })
    }

    fn extend(
        alphabet: Alphabet,
        degree: u64,
        code: u64,
        forbidden: Option<crate::words::Letter>,
        remaining: usize,
        out: &mut Vec<u64>,
    ) {
        if remaining == 0 {
            out.push(code);
            return;
        }
        for l in alphabet.letters() {
            if Some(l) != forbidden {
                let digit = (l.generator() * 2 + l.is_inverse() as usize) as u64;
                Self::extend(
                    alphabet,
                    degree,
                    code * degree + digit,
                    Some(l.inverse()),
                    remaining - 1,
                    out,
                );
            }
        }
    }

    /// Number of slice words with prefix `x`.
    fn count_below(&self, x: &Word) -> u64 {
        let shift = self.degree.pow((self.depth - x.len()) as u32);
        let lo = Self::encode(self.degree, x) * shift;
        let hi = lo + shift;
        let start = self.codes.partition_point(|&c| c < lo);
        let end = self.codes.partition_point(|&c| c < hi);
        (end - start) as u64
    }
}

/// `U*` read off the depth-`depth` slice: a node is covered when the slice
/// contains every length-`depth` word below it.
pub fn brute_minimize(set: &MultiCylinder, depth: usize) -> Result<MultiCylinder> {
    let alphabet = set.alphabet();
    let longest = set.max_len();
    if depth <= longest {
        return Err(Error::DepthTooSmall {
            depth,
            longest: longest + 1,
        });
    }
    let slice = SliceCodes::build(set, depth);
    let covered = |x: &Word| slice.count_below(x) == alphabet.extend_count(x, depth - x.len());
    // Nodes of U* have a word of the set at or below them.
    let nodes: BTreeSet<Word> = set
        .words()
        .flat_map(|u| (0..=u.len()).map(move |i| u.prefix(i)))
        .collect();
    let star = nodes
        .into_iter()
        .filter(|x| covered(x) && x.parent().is_none_or(|p| !covered(&p)));
    MultiCylinder::new(alphabet, star)
}

fn prefix_set(words: &[Word], strict: bool) -> HashSet<Word> {
    words
        .iter()
        .flat_map(|w| {
            let top = if strict { w.len() } else { w.len() + 1 };
            (0..top).map(move |i| w.prefix(i))
        })
        .collect()
}

/// Decides `φ(C¹_u) = C¹_claim` exactly, given true upper bounds on the
/// cancellation defects of `φ` and `φ⁻¹`.
pub fn verify_image(
    phi: &Automorphism,
    u: &Word,
    claim: &MultiCylinder,
    bounds: Defects,
    budget: Budget,
) -> Result<bool> {
    let alphabet = phi.alphabet();
    alphabet.check(u)?;
    if claim.alphabet() != alphabet {
        return Err(Error::RankMismatch {
            left: alphabet.rank(),
            right: claim.alphabet().rank(),
        });
    }
    let meter = budget.meter("image verification");
    let claims: Vec<Word> = claim.words().cloned().collect();
    let claim_set: HashSet<Word> = claims.iter().cloned().collect();
    let strict_prefixes = prefix_set(&claims, true);
    let cf = bounds.fwd_letters();
    let cb = bounds.bwd_letters();

    // φ(C¹_u) ⊆ C¹_claim: every φ(C¹_w) ⊆ C¹_p lands inside a claim cylinder.
    let mut stack = vec![u.clone()];
    while let Some(w) = stack.pop() {
        meter.tick(1)?;
        let p = phi.apply(&w).trim_saturating(cf);
        if (0..=p.len()).any(|i| claim_set.contains(&p.prefix(i))) {
            continue;
        }
        if strict_prefixes.contains(&p) {
            stack.extend(alphabet.children(&w));
        } else {
            return Ok(false);
        }
    }

    // C¹_claim ⊆ φ(C¹_u), checked through φ⁻¹.
    verify_preimages(phi, u, &claims, cb, &meter)
}

fn verify_preimages(
    phi: &Automorphism,
    u: &Word,
    claims: &[Word],
    cb: usize,
    meter: &Meter,
) -> Result<bool> {
    let alphabet = phi.alphabet();
    for v in claims {
        let mut stack = vec![v.clone()];
        while let Some(x) = stack.pop() {
            meter.tick(1)?;
            let q = phi.apply_inverse(&x).trim_saturating(cb);
            if u.is_prefix_of(&q) {
                continue;
            }
            if q.is_strict_prefix_of(u) {
                stack.extend(alphabet.children(&x));
            } else {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Yes,
    No,
    /// The prefixes are too short to decide.
    Insufficient,
}

enum Vertex {
    /// On the geodesic at this signed offset from the meeting vertex.
    On(isize),
    Off,
    NeedLeft,
    NeedRight,
}

fn locate(u: &Word, m: usize, x: &Word, y: &Word) -> Vertex {
    if u.len() <= m {
        return if u.len() == m && u.is_prefix_of(x) {
            Vertex::On(0)
        } else {
            Vertex::Off
        };
    }
    let offset = (u.len() - m) as isize;
    let (side, sign, need) = if u.common_prefix_len(x) > m {
        (x, -1, Vertex::NeedLeft)
    } else if u.common_prefix_len(y) > m {
        (y, 1, Vertex::NeedRight)
    } else {
        return Vertex::Off;
    };
    if u.is_prefix_of(side) {
        Vertex::On(sign * offset)
    } else if side.is_strict_prefix_of(u) {
        need
    } else {
        Vertex::Off
    }
}

/// Whether the geodesic from a boundary point starting with `x` to one
/// starting with `y` passes through `u` and then `v`.
pub fn double_membership(u: &Word, v: &Word, x: &Word, y: &Word) -> Result<Membership> {
    Ok(match membership_detail(u, v, x, y)? {
        Detail::Decided(true) => Membership::Yes,
        Detail::Decided(false) => Membership::No,
        _ => Membership::Insufficient,
    })
}

enum Detail {
    Decided(bool),
    /// `x` and `y` are comparable, so their meeting point is unknown.
    Comparable,
    NeedLeft,
    NeedRight,
}

fn membership_detail(u: &Word, v: &Word, x: &Word, y: &Word) -> Result<Detail> {
    if x == y {
        return Err(Error::DegeneratePair(x.clone()));
    }
    if !x.anti_prefix(y) {
        return Ok(Detail::Comparable);
    }
    let m = x.common_prefix_len(y);
    let a = locate(u, m, x, y);
    let b = locate(v, m, x, y);
    Ok(match (a, b) {
        (Vertex::Off, _) | (_, Vertex::Off) => Detail::Decided(false),
        (Vertex::NeedLeft, _) | (_, Vertex::NeedLeft) => Detail::NeedLeft,
        (Vertex::NeedRight, _) | (_, Vertex::NeedRight) => Detail::NeedRight,
        (Vertex::On(p), Vertex::On(q)) => Detail::Decided(p < q),
    })
}

/// A pair of prefix cylinders `C¹_x × C¹_y` with `x`, `y` anti-prefix.
type Cell = (Word, Word);

/// All cells whose prefixes meet below depth `depth`: these partition the
/// pairs of boundary points whose geodesic comes within `depth` of `1`.
fn initial_cells(alphabet: Alphabet, depth: usize) -> Vec<Cell> {
    let mut cells = Vec::new();
    for len in 0..depth {
        for m in alphabet.all_words(len) {
            for x in alphabet.successors(&m) {
                for y in alphabet.successors(&m) {
                    if x != y {
                        cells.push((m.push(x).unwrap(), m.push(y).unwrap()));
                    }
                }
            }
        }
    }
    cells
}

fn split(alphabet: Alphabet, cell: &Cell, left: bool) -> Vec<Cell> {
    let (x, y) = cell;
    if left {
        alphabet
            .children(x)
            .into_iter()
            .map(|c| (c, y.clone()))
            .collect()
    } else {
        alphabet
            .children(y)
            .into_iter()
            .map(|c| (x.clone(), c))
            .collect()
    }
}

/// Outcome of testing one cell: decided counts, or which side to refine.
enum CellVerdict {
    Decided { lhs: bool, hits: usize },
    Refine(bool),
}

fn refine_cells<F>(
    alphabet: Alphabet,
    depth: usize,
    budget: Budget,
    what: &'static str,
    mut judge: F,
) -> Result<bool>
where
    F: FnMut(&Cell) -> Result<CellVerdict>,
{
    let meter = budget.meter(what);
    let mut stack = initial_cells(alphabet, depth);
    meter.tick(stack.len() as u64)?;
    while let Some(cell) = stack.pop() {
        meter.tick(1)?;
        match judge(&cell)? {
            CellVerdict::Decided { lhs, hits } => {
                if hits != lhs as usize {
                    return Ok(false);
                }
            }
            CellVerdict::Refine(left) => stack.extend(split(alphabet, &cell, left)),
        }
    }
    Ok(true)
}

/// Checks, for every pair of boundary points whose prefixes of length
/// `depth` differ, that the pair lies in `C²_{[u,v]}` exactly when its image
/// lies in exactly one rectangle of `claim`.
pub fn verify_double_image(
    phi: &Automorphism,
    u: &Word,
    v: &Word,
    claim: &RectangleUnion,
    bounds: Defects,
    depth: usize,
    budget: Budget,
) -> Result<bool> {
    if u == v {
        return Err(Error::DegeneratePair(u.clone()));
    }
    let alphabet = phi.alphabet();
    alphabet.check(u)?;
    alphabet.check(v)?;
    let cf = bounds.fwd_letters();
    let pairs: Vec<&RectanglePair> = claim.pairs().collect();
    refine_cells(
        alphabet,
        depth,
        budget,
        "double image verification",
        |(x, y)| {
            let lhs = match membership_detail(u, v, x, y)? {
                Detail::Decided(b) => b,
                Detail::NeedLeft => return Ok(CellVerdict::Refine(true)),
                Detail::NeedRight | Detail::Comparable => return Ok(CellVerdict::Refine(false)),
            };
            let ix = phi.apply(x).trim_saturating(cf);
            let iy = phi.apply(y).trim_saturating(cf);
            if !ix.anti_prefix(&iy) {
                return Ok(CellVerdict::Refine(ix.len() <= iy.len()));
            }
            let mut hits = 0;
            for p in &pairs {
                match membership_detail(p.left(), p.right(), &ix, &iy)? {
                    Detail::Decided(b) => hits += b as usize,
                    Detail::NeedLeft => return Ok(CellVerdict::Refine(true)),
                    Detail::NeedRight | Detail::Comparable => {
                        return Ok(CellVerdict::Refine(false))
                    }
                }
            }
            Ok(CellVerdict::Decided { lhs, hits })
        },
    )
}

/// Whether two rectangle unions contain the same pairs of boundary points
/// among those whose prefixes of length `depth` differ.
pub fn double_unions_agree(
    alphabet: Alphabet,
    left: &RectangleUnion,
    right: &RectangleUnion,
    depth: usize,
    budget: Budget,
) -> Result<bool> {
    let a: Vec<&RectanglePair> = left.pairs().collect();
    let b: Vec<&RectanglePair> = right.pairs().collect();
    refine_cells(
        alphabet,
        depth,
        budget,
        "double union comparison",
        |(x, y)| {
            let mut hits = [0usize; 2];
            for (i, side) in [&a, &b].into_iter().enumerate() {
                for p in side {
                    match membership_detail(p.left(), p.right(), x, y)? {
                        Detail::Decided(yes) => hits[i] += yes as usize,
                        Detail::NeedLeft => return Ok(CellVerdict::Refine(true)),
                        Detail::NeedRight | Detail::Comparable => {
                            return Ok(CellVerdict::Refine(false))
                        }
                    }
                }
            }
            Ok(CellVerdict::Decided {
                lhs: hits[0] > 0,
                hits: (hits[1] > 0) as usize,
            })
        },
    )
}
