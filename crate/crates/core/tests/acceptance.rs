//! Acceptance criteria. Runs without the libtest harness so that the one
//! `PASS`/`FAIL` line per criterion is always shown.

use std::time::{Duration, Instant};

use freecyl::automorphism::{certified_cancellation, empirical_cancellation, tight_cancellation};
use freecyl::double::{
    double_image, double_image_closed, split_unit, RectanglePair, RectangleUnion,
};
use freecyl::image::{dual_map, dual_map_set, image_formula, plan};
use freecyl::oracle::{
    brute_minimize, double_membership, double_unions_agree, verify_double_image, verify_image,
    Membership,
};
use freecyl::{Alphabet, Automorphism, Budget, Defects, Error, Letter, MultiCylinder, Word};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn report(
    n: u32,
    title: &str,
    limit: Duration,
    check: impl FnOnce() -> Result<String, String>,
) -> bool {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
        .unwrap_or_else(|_| Err("panicked".to_string()));
    let elapsed = start.elapsed();
    let outcome = match outcome {
        Ok(detail) if elapsed > limit => {
            Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"))
        }
        other => other,
    };
    match outcome {
        Ok(detail) => {
            println!("criterion {n} PASS: {title} ({detail}; {elapsed:.2?})");
            true
        }
        Err(why) => {
            println!("criterion {n} FAIL: {title}: {why}");
            false
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn rank2() -> Alphabet {
    Alphabet::new(2).unwrap()
}

fn phi0() -> Automorphism {
    Automorphism::new(rank2(), vec![w("aba"), w("ba")], vec![w("aB"), w("bbA")]).unwrap()
}

fn random_word(rng: &mut StdRng, alphabet: Alphabet, len: usize) -> Word {
    let letters: Vec<Letter> = alphabet.letters().collect();
    let mut out: Vec<Letter> = Vec::with_capacity(len);
    while out.len() < len {
        let l = *letters.choose(rng).unwrap();
        if out.last() != Some(&l.inverse()) {
            out.push(l);
        }
    }
    Word::from_letters(out).unwrap()
}

fn random_elementary(rng: &mut StdRng, alphabet: Alphabet) -> Automorphism {
    let r = alphabet.rank();
    let target = rng.gen_range(0..r);
    let other = (target + rng.gen_range(1..r)) % r;
    match rng.gen_range(0..3) {
        0 => Automorphism::nielsen(alphabet, target, Letter::new(other, rng.gen()), rng.gen())
            .unwrap(),
        1 => {
            let mut perm: Vec<usize> = (0..r).collect();
            perm.shuffle(rng);
            Automorphism::permutation(alphabet, &perm).unwrap()
        }
        _ => Automorphism::inversion(alphabet, target).unwrap(),
    }
}

fn random_automorphism(rng: &mut StdRng, alphabet: Alphabet, max_factors: usize) -> Automorphism {
    let n = rng.gen_range(1..=max_factors);
    let mut phi = random_elementary(rng, alphabet);
    for _ in 1..n {
        phi = phi.compose(&random_elementary(rng, alphabet)).unwrap();
    }
    phi
}

fn criterion_1_single_cylinder_image_is_not_a_cylinder() -> bool {
    report(
        1,
        "phi0(C_ba) differs from C_baaba",
        Duration::from_secs(1),
        || {
            let phi = phi0();
            let claim = MultiCylinder::parse(rank2(), "{baaba}").unwrap();
            let bounds = certified_cancellation(&phi).certified();
            let verdict = verify_image(&phi, &w("ba"), &claim, bounds, Budget::default())
                .map_err(|e| e.to_string())?;
            ensure(!verdict, || "oracle accepted {baaba}".into())?;
            let img = phi.apply(&w("baBAAA"));
            ensure(w("baBAABAAB").is_prefix_of(&img), || {
                format!("phi0(baBAAA) = {img}")
            })?;
            Ok(format!("verify_image = false, phi0(baBAAA) = {img}"))
        },
    )
}

fn criterion_2_reduction_suite() -> bool {
    report(
        2,
        "minimal representatives of the reduction examples",
        Duration::from_secs(1),
        || {
            for (input, expected) in [
                ("{aba, abab, bba, bbb, bbA}", "{aba, bb}"),
                ("{ab, abA}", "{ab}"),
                ("{abA, aba, abb}", "{ab}"),
            ] {
                let got = MultiCylinder::parse(rank2(), input)
                    .unwrap()
                    .minimize()
                    .to_string();
                ensure(got == expected, || {
                    format!("{input} minimized to {got}, expected {expected}")
                })?;
            }
            Ok("3/3 exact".into())
        },
    )
}

fn random_set(rng: &mut StdRng) -> MultiCylinder {
    let alphabet = Alphabet::new(rng.gen_range(2..=3)).unwrap();
    let n = rng.gen_range(0..=12);
    let mut words = Vec::new();
    while words.len() < n {
        let len = rng.gen_range(0..=6);
        let base = random_word(rng, alphabet, len);
        // Complete child families make collapses common.
        if len < 6 && rng.gen_bool(0.3) && words.len() + alphabet.degree() <= n {
            words.extend(alphabet.children(&base));
        } else {
            words.push(base);
        }
    }
    MultiCylinder::new(alphabet, words).unwrap()
}

fn criterion_3_confluence_and_uniqueness() -> bool {
    report(
        3,
        "random move order = u_star = brute_minimize on 1000 sets",
        Duration::from_secs(60),
        || {
            let mut rng = StdRng::seed_from_u64(3);
            let mut moves_taken = 0usize;
            for i in 0..1000 {
                let set = random_set(&mut rng);
                let mut current = set.clone();
                loop {
                    let moves = current.applicable_moves();
                    let Some(m) = moves.choose(&mut rng) else {
                        break;
                    };
                    current = current.apply_move(m);
                    moves_taken += 1;
                }
                let star = set.u_star();
                let brute = brute_minimize(&set, 8).map_err(|e| e.to_string())?;
                ensure(
                    current == star && star == brute && set.minimize() == star,
                    || format!("instance {i} {set}: moves {current}, u_star {star}, brute {brute}"),
                )?;
            }
            Ok(format!("1000/1000 agree, {moves_taken} random moves"))
        },
    )
}

fn criterion_4_image_certification() -> bool {
    report(
        4,
        "verify_image(phi, u, dual_map(phi, u)) and involution on 200 cases",
        Duration::from_secs(300),
        || {
            let mut rng = StdRng::seed_from_u64(4);
            let mut square_checked = 0;
            let mut max_claim = 0;
            for i in 0..200 {
                let alphabet = Alphabet::new(rng.gen_range(2..=3)).unwrap();
                let phi = random_automorphism(&mut rng, alphabet, 4);
                let len = rng.gen_range(0..=5);
                let u = random_word(&mut rng, alphabet, len);
                let image = dual_map(&phi, &u).map_err(|e| format!("case {i}: {e}"))?;
                max_claim = max_claim.max(image.len());
                let tight = tight_cancellation(&phi).certified();
                let ok = verify_image(&phi, &u, &image, tight, Budget::default())
                    .map_err(|e| format!("case {i}: {e}"))?;
                ensure(ok, || {
                    format!("case {i}: {phi:?}, u = {u}, claim {image} rejected")
                })?;
                if phi.size() <= 4 {
                    let square = certified_cancellation(&phi).certified();
                    let ok = verify_image(&phi, &u, &image, square, Budget::default())
                        .map_err(|e| format!("case {i}: {e}"))?;
                    ensure(ok, || {
                        format!("case {i}: {phi:?}, u = {u}, rejected under the square bound")
                    })?;
                    square_checked += 1;
                }
                let back =
                    dual_map_set(&phi.inverse(), &image).map_err(|e| format!("case {i}: {e}"))?;
                ensure(back.to_vec() == vec![u.clone()], || {
                    format!("case {i}: {phi:?}, u = {u}, back {back}")
                })?;
            }
            Ok(format!("200/200 certified ({square_checked} also under S^2), involution 200/200, largest image {max_claim} words"))
        },
    )
}

fn criterion_5_formula_matches_adaptive() -> bool {
    report(
        5,
        "closed formula = dual map on feasible instances",
        Duration::from_secs(300),
        || {
            let a = rank2();
            let mut maps = Vec::new();
            for target in 0..2 {
                for sign in [false, true] {
                    for right in [false, true] {
                        maps.push(
                            Automorphism::nielsen(a, target, Letter::new(1 - target, sign), right)
                                .unwrap(),
                        );
                    }
                }
            }
            let mut checked = 0;
            let mut largest_k = 0;
            for phi in &maps {
                let empirical = empirical_cancellation(phi, 4, Budget::default())
                    .map_err(|e| e.to_string())?
                    .empirical()
                    .unwrap();
                let consts = plan(phi, empirical);
                largest_k = largest_k.max(consts.k);
                ensure(a.extend_count(&w("a"), consts.k) < 1_000_000, || {
                    format!("{phi:?}: k = {}", consts.k)
                })?;
                for u in ["a", "B", "ba"] {
                    let u = w(u);
                    let formula = image_formula(phi, &u, &consts, Budget::default())
                        .map_err(|e| e.to_string())?
                        .minimize();
                    let adaptive = dual_map(phi, &u).map_err(|e| e.to_string())?;
                    ensure(formula == adaptive, || {
                        format!("{phi:?}, u = {u}: formula {formula} vs adaptive {adaptive}")
                    })?;
                    let square = certified_cancellation(phi).certified();
                    let ok = verify_image(phi, &u, &formula, square, Budget::default())
                        .map_err(|e| e.to_string())?;
                    ensure(ok, || {
                        format!("{phi:?}, u = {u}: formula output {formula} rejected")
                    })?;
                    checked += 1;
                }
            }
            // k = 0 instances: relabellings.
            let mut rng = StdRng::seed_from_u64(5);
            for _ in 0..20 {
                let alphabet = Alphabet::new(rng.gen_range(2..=3)).unwrap();
                let r = alphabet.rank();
                let phi = if rng.gen_bool(0.5) {
                    let mut perm: Vec<usize> = (0..r).collect();
                    perm.shuffle(&mut rng);
                    Automorphism::permutation(alphabet, &perm).unwrap()
                } else {
                    Automorphism::inversion(alphabet, rng.gen_range(0..r)).unwrap()
                };
                let consts = plan(&phi, Defects { fwd: 0, bwd: 0 });
                ensure(consts.k == 0, || format!("k = {}", consts.k))?;
                let len = rng.gen_range(0..=5);
                let u = random_word(&mut rng, alphabet, len);
                let formula = image_formula(&phi, &u, &consts, Budget::default())
                    .map_err(|e| e.to_string())?
                    .minimize();
                let adaptive = dual_map(&phi, &u).map_err(|e| e.to_string())?;
                ensure(
                    formula == adaptive && formula.to_vec() == vec![phi.apply(&u)],
                    || format!("{phi:?}, u = {u}: {formula} vs {adaptive}"),
                )?;
                checked += 1;
            }
            // The certified instantiation is out of reach, as expected.
            let n = &maps[0];
            let certified = plan(n, certified_cancellation(n).certified());
            let refused = matches!(
                image_formula(n, &w("a"), &certified, Budget::default()),
                Err(Error::BudgetExceeded { .. })
            );
            ensure(refused && certified.k == 24, || {
                format!("certified k = {}", certified.k)
            })?;
            Ok(format!(
            "{checked} instances agree, empirical k up to {largest_k}; certified k = 24 refused by the budget"
        ))
        },
    )
}

fn criterion_6_double_cylinders() -> bool {
    report(6, "double cylinder suite", Duration::from_secs(600), || {
        let a = rank2();
        let pair = |u: &str, v: &str| RectanglePair::new(w(u), w(v)).unwrap();
        let expected = RectangleUnion::new([pair("b", "a"), pair("B", "a"), pair("A", "a")]);
        ensure(split_unit(a, Letter::new(0, false)) == expected, || {
            "split_unit(a) mismatch".into()
        })?;

        // The unit splits partition the depth-3 pairs through 1.
        let splits: Vec<RectangleUnion> = a.letters().map(|x| split_unit(a, x)).collect();
        let words = a.all_words(3);
        let mut through_one = 0;
        for x in &words {
            for y in &words {
                if x == y {
                    continue;
                }
                let mut hits = 0;
                for p in splits.iter().flat_map(|s| s.pairs()) {
                    match double_membership(p.left(), p.right(), x, y).map_err(|e| e.to_string())? {
                        Membership::Yes => hits += 1,
                        Membership::No => {}
                        Membership::Insufficient => {
                            return Err(format!("{p} undecided on ({x}, {y})"))
                        }
                    }
                }
                let expected = (x.first() != y.first()) as usize;
                through_one += expected;
                ensure(hits == expected, || {
                    format!("({x}, {y}) lies in {hits} rectangles")
                })?;
            }
        }

        let mut rng = StdRng::seed_from_u64(6);
        let mut branches = [0usize; 3];
        let depth = 5;
        for i in 0..50 {
            let phi = random_automorphism(&mut rng, a, 3);
            let branch = i % 3;
            let (u, v) = loop {
                let len = rng.gen_range(0..=2);
                let u = random_word(&mut rng, a, len);
                let v = match branch {
                    0 => {
                        let len = rng.gen_range(1..=3);
                        random_word(&mut rng, a, len)
                    }
                    1 => {
                        let gap = rng.gen_range(2..=3);
                        let tail = random_word(&mut rng, a, gap + 1);
                        u.concat(&tail)
                            .prefix((u.len() + gap).min(u.concat(&tail).len()))
                    }
                    _ => {
                        let tail = random_word(&mut rng, a, 2);
                        u.concat(&tail)
                            .prefix((u.len() + 1).min(u.concat(&tail).len()))
                    }
                };
                let ok = match branch {
                    0 => u.anti_prefix(&v),
                    1 => u.is_prefix_of(&v) && v.len() >= u.len() + 2,
                    _ => u.is_prefix_of(&v) && v.len() == u.len() + 1,
                };
                if ok {
                    break if rng.gen_bool(0.5) { (u, v) } else { (v, u) };
                }
            };
            branches[branch] += 1;
            let bounds = tight_cancellation(&phi).certified();
            let image = double_image(&phi, &u, &v).map_err(|e| format!("case {i}: {e}"))?;
            let ok = verify_double_image(&phi, &u, &v, &image, bounds, depth, Budget::default())
                .map_err(|e| format!("case {i}: {e}"))?;
            ensure(ok, || format!("case {i}: {phi:?} [{u}, {v}] -> {image}"))?;
            let closed = double_image_closed(&phi, &u, &v).map_err(|e| format!("case {i}: {e}"))?;
            let same = double_unions_agree(a, &image, &closed, depth, Budget::default())
                .map_err(|e| format!("case {i}: {e}"))?;
            ensure(same, || {
                format!("case {i}: {phi:?} [{u}, {v}] closed formula differs")
            })?;
        }
        Ok(format!(
            "split exact, partition of {through_one} pairs, 50/50 certified and closed formula agrees (anti-prefix {}, gap >= 2 {}, gap 1 {})",
            branches[0], branches[1], branches[2]
        ))
    })
}

fn criterion_7_bounded_cancellation() -> bool {
    report(
        7,
        "cancellation defect within [0, S^2]",
        Duration::from_secs(60),
        || {
            let mut rng = StdRng::seed_from_u64(7);
            let mut maps = vec![
                phi0(),
                Automorphism::nielsen(rank2(), 0, Letter::new(1, false), true).unwrap(),
            ];
            for _ in 0..8 {
                let alphabet = Alphabet::new(rng.gen_range(2..=3)).unwrap();
                maps.push(random_automorphism(&mut rng, alphabet, 4));
            }
            let mut worst = 0;
            for phi in &maps {
                let s = phi.size();
                for _ in 0..500 {
                    let (lu, lv) = (rng.gen_range(0..=10), rng.gen_range(0..=10));
                    let u = random_word(&mut rng, phi.alphabet(), lu);
                    let v = loop {
                        let v = random_word(&mut rng, phi.alphabet(), lv);
                        if v.is_empty() || u.last() != Some(v.first().unwrap().inverse()) {
                            break v;
                        }
                    };
                    let total = phi.apply(&u).len() + phi.apply(&v).len();
                    let joined = phi.apply(&u.concat(&v)).len();
                    ensure(joined <= total && total - joined <= s * s, || {
                        format!(
                            "{phi:?}: defect {} for ({u}, {v}), S^2 = {}",
                            total as i64 - joined as i64,
                            s * s
                        )
                    })?;
                    worst = worst.max(total - joined);
                }
            }
            let e = empirical_cancellation(&phi0(), 2, Budget::default())
                .map_err(|e| e.to_string())?
                .empirical()
                .unwrap();
            ensure(e.fwd >= 4, || format!("empirical forward defect {}", e.fwd))?;
            Ok(format!(
                "{} maps x 500 pairs, worst defect {worst}; phi0 empirical depth 2: fwd {} bwd {}",
                maps.len(),
                e.fwd,
                e.bwd
            ))
        },
    )
}

fn main() {
    let criteria: [fn() -> bool; 7] = [
        criterion_1_single_cylinder_image_is_not_a_cylinder,
        criterion_2_reduction_suite,
        criterion_3_confluence_and_uniqueness,
        criterion_4_image_certification,
        criterion_5_formula_matches_adaptive,
        criterion_6_double_cylinders,
        criterion_7_bounded_cancellation,
    ];
    let failed = criteria.iter().filter(|run| !run()).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
