use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use freecyl::automorphism::{certified_cancellation, empirical_cancellation, tight_cancellation};
use freecyl::double::{
    double_image_closed_with, double_image_with, parse_pair, RectanglePair, RectangleUnion,
};
use freecyl::image::{dual_map_with, image_adaptive, image_formula, plan};
use freecyl::multicyl::parse_word_set;
use freecyl::oracle::{verify_double_image, verify_image};
use freecyl::{
    split_unit, Alphabet, Automorphism, Budget, Defects, Execution, Letter, MultiCylinder, Word,
};
use serde_json::{json, Value};

/// Images of boundary cylinders of free groups under automorphisms.
///
/// Words use `a, b, c, ...` for generators, uppercase for inverses and `1`
/// for the empty word. Automorphism files list `rank N`, then
/// `phi <gen> -> <word>` and `inv <gen> -> <word>` for every generator.
#[derive(Parser)]
#[command(name = "freecyl", version)]
struct Cli {
    /// Emit a versioned JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Limit on enumerated words and search nodes.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    max_nodes: u64,

    /// Run enumerations on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Image of the cylinder of a word.
    Image {
        #[command(flatten)]
        auto: AutoArg,
        #[arg(long)]
        word: String,
        #[arg(long, value_enum, default_value_t = Method::Adaptive)]
        method: Method,
        /// Print the covering set before minimization.
        #[arg(long)]
        raw: bool,
        #[arg(long, value_enum, default_value_t = Bounds::Tight)]
        bounds: Bounds,
        /// Drive the closed formula with cancellation constants found by
        /// searching words up to this length (not certified).
        #[arg(long)]
        empirical_depth: Option<usize>,
    },
    /// Minimal representative of a word set.
    Reduce {
        #[arg(long)]
        set: String,
        #[command(flatten)]
        rank: RankArg,
    },
    /// Exit 0 if two word sets define the same multi-cylinder, 1 otherwise.
    Equal {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[command(flatten)]
        rank: RankArg,
    },
    /// Dual map: minimal index set of the image of a cylinder.
    Dual {
        #[command(flatten)]
        auto: AutoArg,
        #[arg(long)]
        word: String,
        #[arg(long, value_enum, default_value_t = Bounds::Tight)]
        bounds: Bounds,
    },
    /// Image of a double cylinder as a union of double cylinders.
    DoubleImage {
        #[command(flatten)]
        auto: AutoArg,
        /// The pair as `[u, v]`.
        #[arg(long)]
        pair: String,
        /// Use the closed formula instead of the case analysis.
        #[arg(long)]
        closed: bool,
        #[arg(long, value_enum, default_value_t = Bounds::Tight)]
        bounds: Bounds,
    },
    /// Decomposition of the double cylinder `[1, x]` into rectangles.
    Split {
        #[arg(long)]
        letter: char,
        /// Take the rank from an automorphism file.
        #[arg(long, conflicts_with = "rank")]
        auto: Option<PathBuf>,
        #[command(flatten)]
        rank: RankArg,
    },
    /// Size and cancellation constants of an automorphism.
    Constants {
        #[command(flatten)]
        auto: AutoArg,
        /// Also search all words up to this length for the largest defect.
        #[arg(long)]
        empirical_depth: Option<usize>,
    },
    /// Exit 0 if the claimed set is exactly the image of the cylinder.
    Verify {
        #[command(flatten)]
        auto: AutoArg,
        #[arg(long)]
        word: String,
        /// Claimed image as `{w1, w2, ...}`.
        #[arg(long)]
        claim: String,
        #[arg(long, value_enum, default_value_t = Bounds::Tight)]
        bounds: Bounds,
    },
    /// Exit 0 if the claimed rectangles are exactly the image of the
    /// double cylinder, checked on all pairs meeting below `--depth`.
    VerifyDouble {
        #[command(flatten)]
        auto: AutoArg,
        #[arg(long)]
        pair: String,
        /// Claimed pairs, e.g. `[a, b] [A, b]`, or `@FILE` to read them.
        #[arg(long)]
        claim: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Bounds::Tight)]
        bounds: Bounds,
    },
}

#[derive(Args)]
struct AutoArg {
    /// Automorphism file.
    #[arg(long = "auto", value_name = "FILE")]
    path: PathBuf,
}

#[derive(Args)]
struct RankArg {
    /// Rank of the free group; defaults to the highest generator used, at
    /// least 2.
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Adaptive,
    Formula,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bounds {
    /// Certified bound from the preimage search.
    Tight,
    /// Certified bound `S(φ)²`.
    Square,
}

/// What a command produced: text for the terminal, JSON for machines, and
/// whether a yes/no question was answered yes.
struct Output {
    text: String,
    json: Value,
    success: bool,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            success: true,
        }
    }

    fn verdict(answer: bool, json: Value) -> Self {
        Output {
            text: answer.to_string(),
            json,
            success: answer,
        }
    }
}

fn load_auto(path: &Path) -> Result<Automorphism> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Automorphism::parse(&text)
        .with_context(|| format!("invalid automorphism file {}", path.display()))
}

fn word_in(alphabet: Alphabet, s: &str) -> Result<Word> {
    alphabet
        .parse(s.trim())
        .with_context(|| format!("invalid word {s:?}"))
}

fn bounds_for(phi: &Automorphism, bounds: Bounds) -> Defects {
    match bounds {
        Bounds::Tight => tight_cancellation(phi).certified(),
        Bounds::Square => certified_cancellation(phi).certified(),
    }
}

fn inferred_alphabet(rank: Option<usize>, words: &[&Word]) -> Result<Alphabet> {
    let used = words
        .iter()
        .flat_map(|w| w.letters())
        .map(|l| l.generator() + 1)
        .max()
        .unwrap_or(0);
    let rank = rank.unwrap_or(used.max(2));
    Ok(Alphabet::new(rank)?)
}

fn set_json(set: &MultiCylinder) -> Value {
    json!(set
        .words_lex()
        .iter()
        .map(|w| w.to_string())
        .collect::<Vec<_>>())
}

fn union_json(union: &RectangleUnion) -> Value {
    json!(union
        .pairs()
        .map(|p| json!([p.left().to_string(), p.right().to_string()]))
        .collect::<Vec<_>>())
}

fn defects_json(d: Defects) -> Value {
    json!({ "fwd": d.fwd, "bwd": d.bwd })
}

fn parse_claim_pairs(arg: &str) -> Result<RectangleUnion> {
    let text = match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?,
        None => arg.to_string(),
    };
    let mut pairs = Vec::new();
    let mut rest = text.as_str();
    while let Some(start) = rest.find('[') {
        let end = rest[start..]
            .find(']')
            .with_context(|| format!("unterminated pair in {:?}", &rest[start..]))?
            + start;
        pairs.push(RectanglePair::parse(&rest[start..=end])?);
        rest = &rest[end + 1..];
    }
    if !rest.trim().is_empty() {
        bail!("unexpected text {:?} in the claimed pairs", rest.trim());
    }
    Ok(RectangleUnion::new(pairs))
}

fn run(cli: &Cli) -> Result<Output> {
    let budget = Budget::default()
        .with_max_nodes(cli.max_nodes)
        .with_execution(if cli.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        });
    Ok(match &cli.command {
        Command::Image {
            auto,
            word,
            method,
            raw,
            bounds,
            empirical_depth,
        } => {
            let phi = load_auto(&auto.path)?;
            let u = word_in(phi.alphabet(), word)?;
            let (set, extra) = match method {
                Method::Adaptive => {
                    if empirical_depth.is_some() {
                        bail!("--empirical-depth only applies to --method formula");
                    }
                    let b = bounds_for(&phi, *bounds);
                    (
                        image_adaptive(&phi, &u, b, budget)?,
                        json!({ "bounds": defects_json(b) }),
                    )
                }
                Method::Formula => {
                    let b = match empirical_depth {
                        Some(d) => {
                            eprintln!("note: constants from a finite search are not certified; check the result with `verify`");
                            empirical_cancellation(&phi, *d, budget)?
                                .empirical()
                                .expect("search ran")
                        }
                        None => bounds_for(&phi, *bounds),
                    };
                    let consts = plan(&phi, b);
                    let set = image_formula(&phi, &u, &consts, budget)?;
                    (
                        set,
                        json!({ "k1": consts.k1, "k2": consts.k2, "k": consts.k, "trim": consts.trim }),
                    )
                }
            };
            let set = if *raw { set } else { set.minimize() };
            Output::new(
                set.to_string(),
                json!({ "command": "image", "word": u.to_string(), "minimal": !raw, "set": set_json(&set), "constants": extra }),
            )
        }
        Command::Reduce { set, rank } => {
            let words = parse_word_set(set)?;
            let alphabet = inferred_alphabet(rank.rank, &words.iter().collect::<Vec<_>>())?;
            let m = MultiCylinder::new(alphabet, words)?.minimize();
            Output::new(
                m.to_string(),
                json!({ "command": "reduce", "rank": alphabet.rank(), "set": set_json(&m) }),
            )
        }
        Command::Equal { left, right, rank } => {
            let (l, r) = (parse_word_set(left)?, parse_word_set(right)?);
            let alphabet = inferred_alphabet(rank.rank, &l.iter().chain(&r).collect::<Vec<_>>())?;
            let (l, r) = (
                MultiCylinder::new(alphabet, l)?,
                MultiCylinder::new(alphabet, r)?,
            );
            let equal = l.cylinders_equal(&r)?;
            Output::verdict(
                equal,
                json!({ "command": "equal", "equal": equal, "left": set_json(&l.minimize()), "right": set_json(&r.minimize()) }),
            )
        }
        Command::Dual { auto, word, bounds } => {
            let phi = load_auto(&auto.path)?;
            let u = word_in(phi.alphabet(), word)?;
            let b = bounds_for(&phi, *bounds);
            let m = dual_map_with(&phi, &u, b, budget)?;
            Output::new(
                m.to_string(),
                json!({ "command": "dual", "word": u.to_string(), "set": set_json(&m), "bounds": defects_json(b) }),
            )
        }
        Command::DoubleImage {
            auto,
            pair,
            closed,
            bounds,
        } => {
            let phi = load_auto(&auto.path)?;
            let (u, v) = parse_pair(pair)?;
            let b = bounds_for(&phi, *bounds);
            let r = if *closed {
                double_image_closed_with(&phi, &u, &v, b, budget)?
            } else {
                double_image_with(&phi, &u, &v, b, budget)?
            };
            Output::new(
                r.to_string().trim_end().to_string(),
                json!({ "command": "double-image", "pair": [u.to_string(), v.to_string()], "closed": closed, "pairs": union_json(&r) }),
            )
        }
        Command::Split { letter, auto, rank } => {
            let alphabet = match auto {
                Some(path) => load_auto(path)?.alphabet(),
                None => Alphabet::new(rank.rank.unwrap_or(2))?,
            };
            let x = Letter::from_char(*letter)
                .filter(|l| alphabet.contains_letter(*l))
                .with_context(|| {
                    format!("invalid letter {letter:?} for rank {}", alphabet.rank())
                })?;
            let r = split_unit(alphabet, x);
            Output::new(
                r.to_string().trim_end().to_string(),
                json!({ "command": "split", "letter": x.to_string(), "pairs": union_json(&r) }),
            )
        }
        Command::Constants {
            auto,
            empirical_depth,
        } => {
            let phi = load_auto(&auto.path)?;
            let square = certified_cancellation(&phi);
            let tight = tight_cancellation(&phi).certified();
            let empirical = match empirical_depth {
                Some(d) => empirical_cancellation(&phi, *d, budget)?.empirical,
                None => None,
            };
            let mut text = format!(
                "size {}\ncertified {} {}\ntight {} {}",
                square.size, square.certified_fwd, square.certified_bwd, tight.fwd, tight.bwd
            );
            if let Some(e) = empirical {
                text.push_str(&format!(
                    "\nempirical {} {} (depth {})",
                    e.fwd, e.bwd, e.depth
                ));
            }
            Output::new(
                text,
                json!({
                    "command": "constants",
                    "size": square.size,
                    "certified": defects_json(square.certified()),
                    "tight": defects_json(tight),
                    "empirical": empirical.map(|e| json!({ "fwd": e.fwd, "bwd": e.bwd, "depth": e.depth })),
                }),
            )
        }
        Command::Verify {
            auto,
            word,
            claim,
            bounds,
        } => {
            let phi = load_auto(&auto.path)?;
            let u = word_in(phi.alphabet(), word)?;
            let claim = MultiCylinder::parse(phi.alphabet(), claim)?;
            let ok = verify_image(&phi, &u, &claim, bounds_for(&phi, *bounds), budget)?;
            Output::verdict(
                ok,
                json!({ "command": "verify", "word": u.to_string(), "claim": set_json(&claim), "equal": ok }),
            )
        }
        Command::VerifyDouble {
            auto,
            pair,
            claim,
            depth,
            bounds,
        } => {
            let phi = load_auto(&auto.path)?;
            let (u, v) = parse_pair(pair)?;
            let claim = parse_claim_pairs(claim)?;
            let ok = verify_double_image(
                &phi,
                &u,
                &v,
                &claim,
                bounds_for(&phi, *bounds),
                *depth,
                budget,
            )?;
            Output::verdict(
                ok,
                json!({ "command": "verify-double", "pair": [u.to_string(), v.to_string()], "depth": depth, "equal": ok }),
            )
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                let mut doc = json!({ "schema": 1 });
                if let (Some(doc), Value::Object(fields)) = (doc.as_object_mut(), out.json) {
                    doc.extend(fields);
                }
                println!("{doc}");
            } else {
                println!("{}", out.text);
            }
            if out.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            let budget = err.chain().any(|e| {
                matches!(
                    e.downcast_ref(),
                    Some(freecyl::Error::BudgetExceeded { .. })
                )
            });
            ExitCode::from(if budget { 3 } else { 2 })
        }
    }
}
