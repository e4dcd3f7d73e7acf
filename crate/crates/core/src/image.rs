//! Images `φ(C¹_u)` of cylinders as finite multi-cylinders, and the dual map
//! `φ*_A`.
//!
//! Two methods are provided. [`image_formula`] extends `u` uniformly by `k`
//! letters and trims the images; it is exact but only feasible for small
//! constants. [`image_adaptive`] refines branch by branch: it first covers
//! `φ(C¹_u)` by cylinders `C¹_p`, then splits each `C¹_p` until every piece
//! is either inside `φ(C¹_u)` or disjoint from it, as read off the trimmed
//! preimage.

use std::collections::BTreeSet;

use crate::automorphism::{tight_cancellation, Automorphism, Defects};
use crate::error::{Error, Result};
use crate::exec::{self, Budget};
use crate::multicyl::MultiCylinder;
use crate::words::Word;

/// Constants of the closed image formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageConstants {
    /// `S(φ)`.
    pub size: usize,
    pub c_fwd: usize,
    pub c_bwd: usize,
    pub k1: usize,
    pub k2: usize,
    /// Extension depth `k = k1 + k2`.
    pub k: usize,
    /// Letters erased from each extended image.
    pub trim: usize,
}

/// Derives the formula constants from cancellation bounds. Both cancellation
/// slots of `k2` take `max(C(φ), C(φ⁻¹))`, which only makes `k` larger.
pub fn plan(phi: &Automorphism, bounds: Defects) -> ImageConstants {
    let s = phi.size();
    let (cf, cb) = (bounds.fwd, bounds.bwd);
    let c = cf.max(cb);
    let k1 = s * s * cb - cb;
    let k2 = s * c + c;
    ImageConstants {
        size: s,
        c_fwd: cf,
        c_bwd: cb,
        k1,
        k2,
        k: k1 + k2,
        trim: cf,
    }
}

/// `{φ(u')|_trim : u' ∈ u|^k}`, not minimized.
pub fn image_formula(
    phi: &Automorphism,
    u: &Word,
    consts: &ImageConstants,
    budget: Budget,
) -> Result<MultiCylinder> {
    let alphabet = phi.alphabet();
    alphabet.check(u)?;
    let branching = alphabet.degree() as u64 - 1;
    let count = if u.is_empty() && consts.k > 0 {
        (alphabet.degree() as u64).saturating_mul(branching.saturating_pow(consts.k as u32 - 1))
    } else {
        branching.saturating_pow(consts.k as u32)
    };
    budget.check("closed image formula (use the adaptive method)", count)?;
    let extensions = alphabet.extend(u, consts.k);
    let trimmed = exec::try_map(budget.execution, extensions, |w| {
        let img = phi.apply(&w);
        img.trim(consts.trim).map_err(|_| {
            Error::Internal(format!(
                "image {img} of {w} is shorter than the trim amount {}",
                consts.trim
            ))
        })
    })?;
    MultiCylinder::new(alphabet, trimmed)
}

/// Adaptive image of `C¹_u` under `φ`, given upper bounds on the
/// cancellation defects of `φ` and `φ⁻¹`. Not minimized.
pub fn image_adaptive(
    phi: &Automorphism,
    u: &Word,
    bounds: Defects,
    budget: Budget,
) -> Result<MultiCylinder> {
    let alphabet = phi.alphabet();
    alphabet.check(u)?;
    let cf = bounds.fwd_letters();
    let cb = bounds.bwd_letters();
    let meter = budget.meter("adaptive image");

    // Cover φ(C¹_u) by cylinders of trimmed images. Appending letters to w
    // cancels at most `cf` letters of φ(w).
    let mut covers: Vec<Word> = Vec::new();
    let mut stack = vec![u.clone()];
    while let Some(w) = stack.pop() {
        meter.tick(1)?;
        let img = phi.apply(&w);
        if img.len() > cf {
            covers.push(img.trim_saturating(cf));
        } else {
            stack.extend(alphabet.children(&w));
        }
    }
    covers.sort();
    covers.dedup();
    let covers: Vec<Word> = {
        let all: BTreeSet<&Word> = covers.iter().collect();
        covers
            .iter()
            .filter(|p| !(0..p.len()).any(|i| all.contains(&p.prefix(i))))
            .cloned()
            .collect()
    };

    // Split each cover until the trimmed preimage decides the piece.
    let pieces = exec::try_map(budget.execution, covers, |p| {
        let mut kept = Vec::new();
        let mut stack = vec![p];
        while let Some(v) = stack.pop() {
            meter.tick(1)?;
            let q = phi.apply_inverse(&v).trim_saturating(cb);
            if u.is_prefix_of(&q) {
                kept.push(v);
            } else if q.is_strict_prefix_of(u) {
                stack.extend(alphabet.children(&v));
            }
        }
        Ok(kept)
    })?;
    MultiCylinder::new(alphabet, pieces.into_iter().flatten())
}

/// `φ*_A(u)`: the minimal index set of `φ(C¹_u)`, computed with certified
/// cancellation bounds.
pub fn dual_map(phi: &Automorphism, u: &Word) -> Result<MultiCylinder> {
    dual_map_with(
        phi,
        u,
        tight_cancellation(phi).certified(),
        Budget::default(),
    )
}

/// [`dual_map`] with explicit bounds and budget. The bounds must be true
/// upper bounds for the result to be correct.
pub fn dual_map_with(
    phi: &Automorphism,
    u: &Word,
    bounds: Defects,
    budget: Budget,
) -> Result<MultiCylinder> {
    Ok(image_adaptive(phi, u, bounds, budget)?.minimize())
}

/// `φ*_A(U)`: the minimal index set of `φ(C¹_U)`.
pub fn dual_map_set(phi: &Automorphism, set: &MultiCylinder) -> Result<MultiCylinder> {
    dual_map_set_with(
        phi,
        set,
        tight_cancellation(phi).certified(),
        Budget::default(),
    )
}

pub fn dual_map_set_with(
    phi: &Automorphism,
    set: &MultiCylinder,
    bounds: Defects,
    budget: Budget,
) -> Result<MultiCylinder> {
    let alphabet = phi.alphabet();
    if set.alphabet() != alphabet {
        return Err(Error::RankMismatch {
            left: alphabet.rank(),
            right: set.alphabet().rank(),
        });
    }
    let mut words = Vec::new();
    for u in set.words() {
        words.extend(image_adaptive(phi, u, bounds, budget)?.to_vec());
    }
    Ok(MultiCylinder::new(alphabet, words)?.minimize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::{certified_cancellation, empirical_cancellation};
    use crate::words::{Alphabet, Letter};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn r2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn phi0() -> Automorphism {
        Automorphism::new(r2(), vec![w("aba"), w("ba")], vec![w("aB"), w("bbA")]).unwrap()
    }

    fn d(fwd: usize, bwd: usize) -> Defects {
        Defects { fwd, bwd }
    }

    #[test]
    fn plan_examples() {
        let id = Automorphism::identity(r2());
        let c = plan(&id, d(0, 0));
        assert_eq!((c.k1, c.k2, c.k, c.trim), (0, 0, 0, 0));
        let n = Automorphism::nielsen(r2(), 0, Letter::new(1, false), true).unwrap();
        let c = plan(&n, d(4, 4));
        assert_eq!((c.k1, c.k2, c.k, c.trim), (12, 12, 24, 4));
        let c = plan(&phi0(), d(9, 9));
        assert_eq!((c.k1, c.k2, c.k, c.trim), (72, 36, 108, 9));
    }

    #[test]
    fn formula_identity() {
        let id = Automorphism::identity(r2());
        let consts = plan(&id, d(0, 0));
        let m = image_formula(&id, &w("ab"), &consts, Budget::default()).unwrap();
        assert_eq!(m.to_string(), "{ab}");
    }

    #[test]
    fn formula_budget_guard() {
        let consts = plan(&phi0(), certified_cancellation(&phi0()).certified());
        let err = image_formula(&phi0(), &w("ba"), &consts, Budget::default()).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn adaptive_identity() {
        let id = Automorphism::identity(r2());
        for u in ["ab", "1", "BaB"] {
            assert_eq!(dual_map(&id, &w(u)).unwrap().to_vec(), vec![w(u)]);
        }
    }

    #[test]
    fn phi0_image_is_not_a_single_cylinder() {
        let m = dual_map(&phi0(), &w("ba")).unwrap();
        assert_ne!(m.to_vec(), vec![w("baaba")]);
        assert!(m.is_minimal());
        // Same answer with the square bound.
        let square = dual_map_with(&phi0(), &w("ba"), d(9, 9), Budget::default()).unwrap();
        assert_eq!(square, m);
    }

    #[test]
    fn phi0_snapshot() {
        let m = dual_map(&phi0(), &w("ba")).unwrap();
        assert_eq!(m.to_string(), "{baa, baB}");
    }

    #[test]
    fn dual_map_set_examples() {
        let id = Automorphism::identity(r2());
        let ab = MultiCylinder::parse(r2(), "{a, b}").unwrap();
        assert_eq!(dual_map_set(&id, &ab).unwrap(), ab.minimize());
        assert!(dual_map_set(&phi0(), &MultiCylinder::empty(r2()))
            .unwrap()
            .is_empty());
        let single = MultiCylinder::parse(r2(), "{ba}").unwrap();
        assert_eq!(
            dual_map_set(&phi0(), &single).unwrap(),
            dual_map(&phi0(), &w("ba")).unwrap()
        );
    }

    #[test]
    fn involution_phi0() {
        for u in ["ba", "a", "B", "abA", "1"] {
            let img = dual_map(&phi0(), &w(u)).unwrap();
            let back = dual_map_set(&phi0().inverse(), &img).unwrap();
            assert_eq!(back.to_vec(), vec![w(u)], "u = {u}, image {img}");
        }
    }

    #[test]
    fn anti_prefix_images_are_disjoint() {
        let phi = phi0();
        let a = dual_map(&phi, &w("ab")).unwrap();
        let b = dual_map(&phi, &w("aB")).unwrap();
        assert!(a.disjoint(&b).unwrap());
    }

    #[test]
    fn formula_matches_adaptive_for_nielsen() {
        let n = Automorphism::nielsen(r2(), 0, Letter::new(1, false), true).unwrap();
        let e = empirical_cancellation(&n, 3, Budget::default())
            .unwrap()
            .empirical()
            .unwrap();
        let consts = plan(&n, e);
        for u in ["a", "ba", "B"] {
            let f = image_formula(&n, &w(u), &consts, Budget::default())
                .unwrap()
                .minimize();
            assert_eq!(f, dual_map(&n, &w(u)).unwrap(), "u = {u}");
        }
    }

    #[test]
    fn sequential_matches_parallel() {
        let b = tight_cancellation(&phi0()).certified();
        for u in ["ba", "abA"] {
            let p = dual_map_with(&phi0(), &w(u), b, Budget::default()).unwrap();
            let s = dual_map_with(&phi0(), &w(u), b, Budget::sequential()).unwrap();
            assert_eq!(p, s);
        }
    }
}
