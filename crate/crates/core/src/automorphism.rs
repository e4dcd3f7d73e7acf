//! Automorphisms of a free group given by the images of the generators under
//! both `φ` and `φ⁻¹`, plus the size and cancellation constants.
//!
//! File format, one statement per line, `#` starts a comment:
//!
//! ```text
//! rank 2
//! phi a -> aba
//! phi b -> ba
//! inv a -> aB
//! inv b -> bbA
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::exec::{self, Budget};
use crate::words::{push_reducing, Alphabet, Letter, Word};

#[derive(Clone, PartialEq, Eq)]
pub struct Automorphism {
    alphabet: Alphabet,
    fwd: Vec<Word>,
    bwd: Vec<Word>,
    // Images of all 2·rank letters, indexed by letter code.
    fwd_letters: Vec<Word>,
    bwd_letters: Vec<Word>,
}

fn letter_table(images: &[Word]) -> Vec<Word> {
    images
        .iter()
        .flat_map(|w| [w.clone(), w.inverse()])
        .collect()
}

fn image_under(table: &[Word], w: &Word) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(w.len() * 2);
    for &l in w.letters() {
        for &x in table[l.generator() * 2 + l.is_inverse() as usize].letters() {
            push_reducing(&mut stack, x);
        }
    }
    Word::reduce(stack)
}

impl Automorphism {
    /// Builds and validates an automorphism from the images of the
    /// generators under `φ` (`fwd`) and `φ⁻¹` (`bwd`).
    pub fn new(alphabet: Alphabet, fwd: Vec<Word>, bwd: Vec<Word>) -> Result<Self> {
        for images in [&fwd, &bwd] {
            if images.len() != alphabet.rank() {
                return Err(Error::Parse {
                    input: format!("{} images", images.len()),
                    reason: format!("expected one image per generator ({})", alphabet.rank()),
                });
            }
            for (i, w) in images.iter().enumerate() {
                alphabet.check(w)?;
                if w.is_empty() {
                    return Err(Error::EmptyImage {
                        generator: alphabet.generator(i).to_char(),
                    });
                }
            }
        }
        let phi = Automorphism {
            alphabet,
            fwd_letters: letter_table(&fwd),
            bwd_letters: letter_table(&bwd),
            fwd,
            bwd,
        };
        phi.validate()?;
        Ok(phi)
    }

    /// Checks that the two image tables are mutually inverse on every
    /// generator, reporting the first failing round trip.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.alphabet.rank() {
            let a = Word::letter(self.alphabet.generator(i));
            let there_and_back = self.apply(&self.apply_inverse(&a));
            if there_and_back != a {
                return Err(Error::NotInverse {
                    generator: a.letters()[0].to_char(),
                    got: there_and_back,
                });
            }
            let back_and_there = self.apply_inverse(&self.apply(&a));
            if back_and_there != a {
                return Err(Error::NotInverse {
                    generator: a.letters()[0].to_char(),
                    got: back_and_there,
                });
            }
        }
        Ok(())
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        let gens: Vec<Word> = (0..alphabet.rank())
            .map(|i| Word::letter(alphabet.generator(i)))
            .collect();
        Automorphism::new(alphabet, gens.clone(), gens).expect("identity is an automorphism")
    }

    /// Elementary Nielsen map `aᵢ ↦ aᵢ·x` (or `x·aᵢ`), fixing the other
    /// generators. `x` must involve a different generator.
    pub fn nielsen(alphabet: Alphabet, target: usize, x: Letter, on_right: bool) -> Result<Self> {
        if x.generator() == target || !alphabet.contains_letter(x) || target >= alphabet.rank() {
            return Err(Error::Parse {
                input: format!("nielsen {target} {x}"),
                reason: "multiplier must be a different generator of the alphabet".into(),
            });
        }
        let a = alphabet.generator(target);
        let build = |y: Letter| {
            let (p, q) = if on_right { (a, y) } else { (y, a) };
            Word::from_letters(vec![p, q]).expect("distinct generators")
        };
        let mut fwd = Self::identity(alphabet).fwd;
        let mut bwd = fwd.clone();
        fwd[target] = build(x);
        bwd[target] = build(x.inverse());
        Automorphism::new(alphabet, fwd, bwd)
    }

    /// Relabelling `aᵢ ↦ a_{perm[i]}`.
    pub fn permutation(alphabet: Alphabet, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; alphabet.rank()];
        if perm.len() != alphabet.rank()
            || perm
                .iter()
                .any(|&p| p >= alphabet.rank() || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Parse {
                input: format!("{perm:?}"),
                reason: "not a permutation of the generators".into(),
            });
        }
        let fwd = perm
            .iter()
            .map(|&p| Word::letter(alphabet.generator(p)))
            .collect();
        let mut bwd = vec![Word::empty(); alphabet.rank()];
        for (i, &p) in perm.iter().enumerate() {
            bwd[p] = Word::letter(alphabet.generator(i));
        }
        Automorphism::new(alphabet, fwd, bwd)
    }

    /// `aᵢ ↦ aᵢ⁻¹`, fixing the other generators.
    pub fn inversion(alphabet: Alphabet, target: usize) -> Result<Self> {
        let mut fwd = Self::identity(alphabet).fwd;
        if target >= alphabet.rank() {
            return Err(Error::InvalidRank(target));
        }
        fwd[target] = fwd[target].inverse();
        Automorphism::new(alphabet, fwd.clone(), fwd)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// `φ(aᵢ)` for each generator.
    pub fn images(&self) -> &[Word] {
        &self.fwd
    }

    /// `φ⁻¹(aᵢ)` for each generator.
    pub fn inverse_images(&self) -> &[Word] {
        &self.bwd
    }

    /// Freely reduced `φ(w)`.
    ///
    /// Panics if `w` uses a generator outside the alphabet; see
    /// [`Automorphism::try_apply`].
    pub fn apply(&self, w: &Word) -> Word {
        image_under(&self.fwd_letters, w)
    }

    pub fn apply_inverse(&self, w: &Word) -> Word {
        image_under(&self.bwd_letters, w)
    }

    pub fn try_apply(&self, w: &Word) -> Result<Word> {
        self.alphabet.check(w)?;
        Ok(self.apply(w))
    }

    pub fn try_apply_inverse(&self, w: &Word) -> Result<Word> {
        self.alphabet.check(w)?;
        Ok(self.apply_inverse(w))
    }

    /// `φ⁻¹` as an automorphism (the two tables swapped).
    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            alphabet: self.alphabet,
            fwd: self.bwd.clone(),
            bwd: self.fwd.clone(),
            fwd_letters: self.bwd_letters.clone(),
            bwd_letters: self.fwd_letters.clone(),
        }
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        if self.alphabet != other.alphabet {
            return Err(Error::RankMismatch {
                left: self.alphabet.rank(),
                right: other.alphabet.rank(),
            });
        }
        let fwd = other.fwd.iter().map(|w| self.apply(w)).collect();
        let bwd = self.bwd.iter().map(|w| other.apply_inverse(w)).collect();
        Automorphism::new(self.alphabet, fwd, bwd)
    }

    /// `S(φ)`: the longest generator image under `φ` or `φ⁻¹`.
    pub fn size(&self) -> usize {
        self.fwd
            .iter()
            .chain(&self.bwd)
            .map(Word::len)
            .max()
            .unwrap_or(1)
    }

    /// Parses the line-oriented file format and validates the result.
    pub fn parse(text: &str) -> Result<Self> {
        let parse_err = |line: &str, reason: &str| Error::Parse {
            input: line.to_string(),
            reason: reason.to_string(),
        };
        let mut alphabet: Option<Alphabet> = None;
        let mut fwd: Vec<Option<Word>> = Vec::new();
        let mut bwd: Vec<Option<Word>> = Vec::new();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            match tokens.next() {
                Some("rank") => {
                    if alphabet.is_some() {
                        return Err(parse_err(line, "duplicate rank header"));
                    }
                    let n = tokens
                        .next()
                        .and_then(|t| t.parse::<usize>().ok())
                        .ok_or_else(|| parse_err(line, "expected `rank N`"))?;
                    if tokens.next().is_some() {
                        return Err(parse_err(line, "trailing tokens"));
                    }
                    let a = Alphabet::new(n)?;
                    fwd = vec![None; n];
                    bwd = vec![None; n];
                    alphabet = Some(a);
                }
                Some(kind @ ("phi" | "inv")) => {
                    let a = alphabet.ok_or_else(|| parse_err(line, "`rank N` must come first"))?;
                    let (generator, arrow, image) =
                        match (tokens.next(), tokens.next(), tokens.next(), tokens.next()) {
                            (Some(g), Some(arrow), Some(img), None) => (g, arrow, img),
                            _ => return Err(parse_err(line, "expected `phi <gen> -> <word>`")),
                        };
                    if arrow != "->" {
                        return Err(parse_err(line, "expected `->`"));
                    }
                    let g = match generator.chars().collect::<Vec<_>>()[..] {
                        [c] => Letter::from_char(c)
                            .filter(|l| !l.is_inverse() && a.contains_letter(*l))
                            .ok_or_else(|| parse_err(line, "unknown generator"))?,
                        _ => return Err(parse_err(line, "generator must be one lowercase letter")),
                    };
                    let w = a.parse(image)?;
                    let table = if kind == "phi" { &mut fwd } else { &mut bwd };
                    if table[g.generator()].replace(w).is_some() {
                        return Err(parse_err(line, "generator image given twice"));
                    }
                }
                Some(_) => return Err(parse_err(line, "expected `rank`, `phi` or `inv`")),
                None => unreachable!(),
            }
        }
        let alphabet = alphabet.ok_or_else(|| parse_err(text, "missing `rank N` header"))?;
        let collect = |table: Vec<Option<Word>>, kind: &str| -> Result<Vec<Word>> {
            table
                .into_iter()
                .enumerate()
                .map(|(i, w)| {
                    w.ok_or_else(|| {
                        parse_err(
                            &format!("{kind} {}", alphabet.generator(i)),
                            "missing generator image",
                        )
                    })
                })
                .collect()
        };
        Automorphism::new(alphabet, collect(fwd, "phi")?, collect(bwd, "inv")?)
    }

    /// Upper bound on the number of letters that cancel in a reduced product
    /// `φ(s)·φ(t)`, from a finite search over the preimages of the tree map.
    ///
    /// Realise `φ` as the map from the rose whose `i`-th petal is subdivided
    /// and labelled by `φ(aᵢ)` to the standard rose, and lift it to a
    /// label-preserving morphism `F` of universal covers. Letters cancel in
    /// `φ(s)·φ(t)` only up to a common prefix `P` of `φ(s⁻¹)` and `φ(t)`,
    /// and since paths map to paths, `F⁻¹(P)` then meets two different
    /// branches at the base vertex. The set of such `P` is prefix-closed and
    /// finite, so a depth-first walk over it terminates; its deepest node is
    /// the bound. Each vertex of the subdivided rose has exactly one lift in
    /// `F⁻¹(P)`, computed with `φ⁻¹`.
    fn cancellation_letters_bound(&self) -> usize {
        let s = self.size();
        let cap = s * s * s + s + 1;
        let mut best = 0;
        let mut stack = vec![Word::empty()];
        while let Some(p) = stack.pop() {
            for l in self.alphabet.successors(&p) {
                let child = p.push(l).expect("successor letters do not cancel");
                if self.preimage_meets_two_branches(&child) {
                    if child.len() > cap {
                        // Cannot happen for a valid automorphism; fall back
                        // to the classical bound.
                        return s * s;
                    }
                    best = best.max(child.len());
                    stack.push(child);
                }
            }
        }
        best
    }

    fn preimage_meets_two_branches(&self, p: &Word) -> bool {
        let junction = self.apply_inverse(p);
        let first = junction
            .first()
            .expect("nonempty words have nonempty preimages");
        for (i, img) in self.fwd.iter().enumerate() {
            let a = self.alphabet.generator(i);
            for j in 1..img.len() {
                let g = self.apply_inverse(&p.concat(&img.prefix(j).inverse()));
                let direction = if g.last() == Some(a.inverse()) {
                    // The geodesic arrives through g·aᵢ and walks the petal backwards.
                    if g.len() == 1 {
                        a.inverse()
                    } else {
                        g.letters()[0]
                    }
                } else {
                    g.first().unwrap_or(a)
                };
                if direction != first {
                    return true;
                }
            }
        }
        false
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank {}", self.alphabet.rank())?;
        for (kind, table) in [("phi", &self.fwd), ("inv", &self.bwd)] {
            for (i, w) in table.iter().enumerate() {
                writeln!(f, "{kind} {} -> {w}", self.alphabet.generator(i))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |t: &[Word]| {
            t.iter()
                .map(|w| w.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(
            f,
            "Automorphism[{}; inv {}]",
            show(&self.fwd),
            show(&self.bwd)
        )
    }
}

/// Bounds on the cancellation defect `|φ(u)| + |φ(v)| − |φ(uv)|` for `φ`
/// (`fwd`) and `φ⁻¹` (`bwd`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Defects {
    pub fwd: usize,
    pub bwd: usize,
}

impl Defects {
    /// Letters that can cancel at a junction under `φ`. The defect counts
    /// each cancelled letter twice.
    pub fn fwd_letters(&self) -> usize {
        self.fwd / 2
    }

    pub fn bwd_letters(&self) -> usize {
        self.bwd / 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmpiricalDefects {
    pub fwd: usize,
    pub bwd: usize,
    /// Word length searched to obtain the values.
    pub depth: usize,
}

/// `S(φ)` together with certified upper bounds on `C(φ)`, `C(φ⁻¹)` and,
/// optionally, searched lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CancellationBounds {
    pub size: usize,
    pub certified_fwd: usize,
    pub certified_bwd: usize,
    /// Largest defect actually observed; a lower bound, never a certificate.
    pub empirical: Option<EmpiricalDefects>,
}

impl CancellationBounds {
    pub fn certified(&self) -> Defects {
        Defects {
            fwd: self.certified_fwd,
            bwd: self.certified_bwd,
        }
    }

    pub fn empirical(&self) -> Option<Defects> {
        self.empirical.map(|e| Defects {
            fwd: e.fwd,
            bwd: e.bwd,
        })
    }
}

/// Cooper's bound: `C(φ), C(φ⁻¹) ≤ S(φ)²`.
pub fn certified_cancellation(phi: &Automorphism) -> CancellationBounds {
    let s = phi.size();
    CancellationBounds {
        size: s,
        certified_fwd: s * s,
        certified_bwd: s * s,
        empirical: None,
    }
}

/// Certified bounds from the preimage search, capped by `S(φ)²`. Usually far
/// below the square bound, which keeps cylinder images tractable.
pub fn tight_cancellation(phi: &Automorphism) -> CancellationBounds {
    let s = phi.size();
    let fwd = 2 * phi.cancellation_letters_bound();
    let bwd = 2 * phi.inverse().cancellation_letters_bound();
    CancellationBounds {
        size: s,
        certified_fwd: fwd.min(s * s),
        certified_bwd: bwd.min(s * s),
        empirical: None,
    }
}

/// Largest defect over all pairs `u, v` with `|u|, |v| ≤ depth` and `uv`
/// reduced, for `φ` and for `φ⁻¹`. Certified fields are the square bound.
pub fn empirical_cancellation(
    phi: &Automorphism,
    depth: usize,
    budget: Budget,
) -> Result<CancellationBounds> {
    let alphabet = phi.alphabet();
    let words: Vec<Word> = (1..=depth)
        .flat_map(|len| alphabet.all_words(len))
        .collect();
    let n = words.len() as u64;
    budget.check(
        "empirical cancellation search",
        n.saturating_mul(n).saturating_mul(2),
    )?;
    let max_defect = |psi: &Automorphism| -> usize {
        let images: Vec<Word> = words.iter().map(|w| psi.apply(w)).collect();
        let inverted: Vec<Word> = images.iter().map(Word::inverse).collect();
        let rows: Vec<usize> = (0..words.len()).collect();
        exec::map(budget.execution, rows, |i| {
            let last = words[i].last().expect("nonempty");
            words
                .iter()
                .zip(&images)
                .filter(|(v, _)| v.first() != Some(last.inverse()))
                .map(|(_, img)| 2 * inverted[i].common_prefix_len(img))
                .max()
                .unwrap_or(0)
        })
        .into_iter()
        .max()
        .unwrap_or(0)
    };
    let mut bounds = certified_cancellation(phi);
    bounds.empirical = Some(EmpiricalDefects {
        fwd: max_defect(phi),
        bwd: max_defect(&phi.inverse()),
        depth,
    });
    Ok(bounds)
}
