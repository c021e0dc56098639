//! The elementary Andrews-Curtis move set and everything built from it:
//! move application and inversion, deterministic neighbor enumeration, the
//! handle-slide operation with its decomposition into elementary moves,
//! macro moves realizing the canonicalization symmetries, and Nielsen
//! generator automorphisms.
//!
//! Three move kinds act on a balanced presentation, all preserving the
//! normal closure of the relator set:
//!
//! * `I i`: invert relator `i`, `r_i <- r_i^-1`
//! * `R i j s`: multiply by another relator, `r_i <- r_i * r_j^s`
//! * `C i k s`: conjugate by a generator letter, `r_i <- x_k^s * r_i * x_k^-s`
//!
//! Indices are 1-based everywhere, matching the certificate text syntax.
//! Conjugation is restricted to single letters so the branching factor
//! stays `O(n^2)`; arbitrary conjugations arise by composition.
//! Left-multiplication is intentionally absent: it equals
//! invert/right-multiply/invert and would only duplicate search edges.

use std::fmt;

use thiserror::Error;

use crate::presentation::Presentation;
use crate::word::{Letter, Sign, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("relator index {index} out of 1..={rank}")]
    RelatorOutOfRange { index: u16, rank: u16 },
    #[error("generator index {index} out of 1..={rank}")]
    GeneratorOutOfRange { index: u16, rank: u16 },
    #[error("relator indices must differ, both are {0}")]
    EqualRelators(u16),
    #[error("rotation amount {amount} exceeds relator length {len}")]
    RotationTooLong { amount: usize, len: usize },
    #[error("slide word uses letter x{index} outside rank {rank}")]
    WordOutOfRank { index: u16, rank: u16 },
}

/// One elementary Andrews-Curtis transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    /// `r_i <- r_i^-1`
    Invert { relator: u16 },
    /// `r_i <- r_i * r_j^sign`, `j != i`
    RightMultiply { relator: u16, by: u16, sign: Sign },
    /// `r_i <- x_k^sign * r_i * x_k^-sign`
    Conjugate { relator: u16, generator: u16, sign: Sign },
}

impl Move {
    /// 1-based index of the relator this move rewrites.
    pub fn target(&self) -> u16 {
        match *self {
            Move::Invert { relator } => relator,
            Move::RightMultiply { relator, .. } => relator,
            Move::Conjugate { relator, .. } => relator,
        }
    }

    pub fn validate(&self, rank: u16) -> Result<(), MoveError> {
        let check_relator = |index: u16| {
            if index == 0 || index > rank {
                Err(MoveError::RelatorOutOfRange { index, rank })
            } else {
                Ok(())
            }
        };
        match *self {
            Move::Invert { relator } => check_relator(relator),
            Move::RightMultiply { relator, by, .. } => {
                check_relator(relator)?;
                check_relator(by)?;
                if relator == by {
                    return Err(MoveError::EqualRelators(relator));
                }
                Ok(())
            }
            Move::Conjugate { relator, generator, .. } => {
                check_relator(relator)?;
                if generator == 0 || generator > rank {
                    return Err(MoveError::GeneratorOutOfRange {
                        index: generator,
                        rank,
                    });
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Move::Invert { relator } => write!(f, "I {relator}"),
            Move::RightMultiply { relator, by, sign } => {
                write!(f, "R {relator} {by} {sign}")
            }
            Move::Conjugate { relator, generator, sign } => {
                write!(f, "C {relator} {generator} {sign}")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveParseError {
    #[error("empty move line")]
    Empty,
    #[error("unknown move kind {0:?} (expected I, R, or C)")]
    BadKind(String),
    #[error("move {kind}: expected {expected} fields, got {got}")]
    FieldCount { kind: char, expected: usize, got: usize },
    #[error("invalid index {0:?}")]
    BadIndex(String),
    #[error("invalid sign {0:?} (expected +1 or -1)")]
    BadSign(String),
}

impl Move {
    /// Parses the certificate line syntax: `I <i>`, `R <i> <j> <s>`,
    /// `C <i> <k> <s>` with `s` one of `+1`, `-1`.
    pub fn parse(line: &str) -> Result<Move, MoveParseError> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some((&kind, rest)) = fields.split_first() else {
            return Err(MoveParseError::Empty);
        };
        let index = |s: &str| -> Result<u16, MoveParseError> {
            match s.parse::<u16>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(MoveParseError::BadIndex(s.to_string())),
            }
        };
        let sign = |s: &str| -> Result<Sign, MoveParseError> {
            match s {
                "+1" => Ok(Sign::Plus),
                "-1" => Ok(Sign::Minus),
                _ => Err(MoveParseError::BadSign(s.to_string())),
            }
        };
        match kind {
            "I" => {
                if rest.len() != 1 {
                    return Err(MoveParseError::FieldCount {
                        kind: 'I',
                        expected: 1,
                        got: rest.len(),
                    });
                }
                Ok(Move::Invert { relator: index(rest[0])? })
            }
            "R" => {
                if rest.len() != 3 {
                    return Err(MoveParseError::FieldCount {
                        kind: 'R',
                        expected: 3,
                        got: rest.len(),
                    });
                }
                Ok(Move::RightMultiply {
                    relator: index(rest[0])?,
                    by: index(rest[1])?,
                    sign: sign(rest[2])?,
                })
            }
            "C" => {
                if rest.len() != 3 {
                    return Err(MoveParseError::FieldCount {
                        kind: 'C',
                        expected: 3,
                        got: rest.len(),
                    });
                }
                Ok(Move::Conjugate {
                    relator: index(rest[0])?,
                    generator: index(rest[1])?,
                    sign: sign(rest[2])?,
                })
            }
            other => Err(MoveParseError::BadKind(other.to_string())),
        }
    }
}

/// Applies one move; exactly one relator changes and the result is reduced.
pub fn apply_move(p: &Presentation, m: &Move) -> Result<Presentation, MoveError> {
    m.validate(p.rank())?;
    Ok(p.with_relator(m.target(), rewritten_relator(p, m)))
}

/// The one relator a valid move rewrites, already reduced. Lets the search
/// dedup children without cloning the untouched relators.
pub(crate) fn rewritten_relator(p: &Presentation, m: &Move) -> Word {
    match *m {
        Move::Invert { relator } => p.relator(relator).invert(),
        Move::RightMultiply { relator, by, sign } => {
            p.relator(relator).concat(&p.relator(by).signed(sign))
        }
        Move::Conjugate { relator, generator, sign } => {
            let by = Word::letter(match sign {
                Sign::Plus => Letter::generator(generator),
                Sign::Minus => Letter::generator(generator).inverse(),
            });
            p.relator(relator).conjugate(&by)
        }
    }
}

/// The move undoing `m`: `apply(apply(p, m), invert_move(m)) == p`.
///
/// Right-multiplication inverts to the opposite sign because the factor
/// relator `r_j` is itself untouched by the move.
pub fn invert_move(m: &Move) -> Move {
    match *m {
        Move::Invert { relator } => Move::Invert { relator },
        Move::RightMultiply { relator, by, sign } => Move::RightMultiply {
            relator,
            by,
            sign: sign.flip(),
        },
        Move::Conjugate { relator, generator, sign } => Move::Conjugate {
            relator,
            generator,
            sign: sign.flip(),
        },
    }
}

/// Every legal move on a rank-`n` presentation, in the fixed order that
/// search and scramble rely on:
///
/// 1. `I i` for `i = 1..n`;
/// 2. `R i j s` for `i = 1..n`, `j = 1..n` with `j != i`, `s = +1` then `-1`;
/// 3. `C i k s` for `i = 1..n`, `k = 1..n`, `s = +1` then `-1`.
///
/// Total count: `n + 2n(n-1) + 2n^2`.
pub fn enumerate_moves(p: &Presentation) -> Vec<Move> {
    let n = p.rank();
    let mut moves = Vec::with_capacity(move_count(n));
    for i in 1..=n {
        moves.push(Move::Invert { relator: i });
    }
    for i in 1..=n {
        for j in 1..=n {
            if j == i {
                continue;
            }
            for sign in [Sign::Plus, Sign::Minus] {
                moves.push(Move::RightMultiply { relator: i, by: j, sign });
            }
        }
    }
    for i in 1..=n {
        for k in 1..=n {
            for sign in [Sign::Plus, Sign::Minus] {
                moves.push(Move::Conjugate { relator: i, generator: k, sign });
            }
        }
    }
    moves
}

/// Closed form for the length of [`enumerate_moves`].
pub fn move_count(rank: u16) -> usize {
    let n = rank as usize;
    n + 2 * n * n.saturating_sub(1) + 2 * n * n
}

/// Replays a move sequence from a starting presentation.
pub fn replay(p: &Presentation, moves: &[Move]) -> Result<Presentation, MoveError> {
    let mut cur = p.clone();
    for m in moves {
        cur = apply_move(&cur, m)?;
    }
    Ok(cur)
}

// ---------------------------------------------------------------------------
// Handle slide.
// ---------------------------------------------------------------------------

/// A handle slide: relator `target` is replaced by
/// `c * (r_target^target_sign * g * r_other^other_sign * g^-1) * c^-1`,
/// the general form a trace curve takes after one disc replacement. The
/// path word `g` and outer conjugator `c` are free parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlideSpec {
    pub target: u16,
    pub other: u16,
    pub path: Word,
    pub target_sign: Sign,
    pub other_sign: Sign,
    pub conjugator: Word,
}

impl SlideSpec {
    pub fn validate(&self, rank: u16) -> Result<(), MoveError> {
        for index in [self.target, self.other] {
            if index == 0 || index > rank {
                return Err(MoveError::RelatorOutOfRange { index, rank });
            }
        }
        if self.target == self.other {
            return Err(MoveError::EqualRelators(self.target));
        }
        for word in [&self.path, &self.conjugator] {
            if word.max_index() > rank {
                return Err(MoveError::WordOutOfRank {
                    index: word.max_index(),
                    rank,
                });
            }
        }
        Ok(())
    }
}

/// Applies a slide in one step.
pub fn slide(p: &Presentation, spec: &SlideSpec) -> Result<Presentation, MoveError> {
    spec.validate(p.rank())?;
    let core = p
        .relator(spec.target)
        .signed(spec.target_sign)
        .concat(&p.relator(spec.other).signed(spec.other_sign).conjugate(&spec.path));
    Ok(p.with_relator(spec.target, core.conjugate(&spec.conjugator)))
}

/// Decomposes a slide into elementary moves. Replaying the result on any
/// presentation equals [`slide`] with the same spec, and every relator
/// other than the target is restored.
///
/// The order is fixed (certificates depend on it):
///
/// 1. `I target` when `target_sign` is `-1`;
/// 2. conjugate the *other* relator letterwise into `g * r_other * g^-1`
///    (letters of `g` from last to first);
/// 3. `R target other other_sign`;
/// 4. undo step 2 (inverted letters of `g`, first to last);
/// 5. conjugate the target by the letters of `c`, last to first.
pub fn slide_decomposition(spec: &SlideSpec, rank: u16) -> Result<Vec<Move>, MoveError> {
    spec.validate(rank)?;
    let mut moves = Vec::new();
    if spec.target_sign == Sign::Minus {
        moves.push(Move::Invert { relator: spec.target });
    }
    moves.extend(conjugation_moves(spec.other, &spec.path));
    moves.push(Move::RightMultiply {
        relator: spec.target,
        by: spec.other,
        sign: spec.other_sign,
    });
    let undo: Vec<Move> = conjugation_moves(spec.other, &spec.path)
        .iter()
        .rev()
        .map(invert_move)
        .collect();
    moves.extend(undo);
    moves.extend(conjugation_moves(spec.target, &spec.conjugator));
    Ok(moves)
}

/// Letter moves that conjugate relator `target` by the word `by`:
/// applying them in order yields `by * r_target * by^-1`.
fn conjugation_moves(target: u16, by: &Word) -> Vec<Move> {
    by.letters()
        .iter()
        .rev()
        .map(|l| Move::Conjugate {
            relator: target,
            generator: l.index(),
            sign: l.sign(),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Macro moves: the canonicalization symmetries as elementary moves.
//
// These are what make canonical-form dedup sound: any two presentations
// with the same canonical form are connected by replayable elementary
// moves, so collapsing them loses no reachability.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacroMove {
    /// Exchange relators `i` and `j` exactly.
    Swap { first: u16, second: u16 },
    /// Replace relator `i` by its cyclic rotation by `amount` letters
    /// (a conjugate by its own length-`amount` prefix).
    Rotate { relator: u16, amount: usize },
    /// Invert relator `i`.
    Invert { relator: u16 },
}

/// Expands a macro into elementary moves for the given presentation.
pub fn macro_moves(p: &Presentation, m: &MacroMove) -> Result<Vec<Move>, MoveError> {
    let rank = p.rank();
    let check = |index: u16| {
        if index == 0 || index > rank {
            Err(MoveError::RelatorOutOfRange { index, rank })
        } else {
            Ok(())
        }
    };
    match *m {
        MacroMove::Invert { relator } => {
            check(relator)?;
            Ok(vec![Move::Invert { relator }])
        }
        MacroMove::Rotate { relator, amount } => {
            check(relator)?;
            let word = p.relator(relator);
            if amount > word.len() {
                return Err(MoveError::RotationTooLong {
                    amount,
                    len: word.len(),
                });
            }
            // Rotation by m is conjugation by the inverse of the length-m
            // prefix: peel prefix letters onto the tail one at a time.
            Ok(word.letters()[..amount]
                .iter()
                .map(|l| Move::Conjugate {
                    relator,
                    generator: l.index(),
                    sign: l.sign().flip(),
                })
                .collect())
        }
        MacroMove::Swap { first, second } => {
            check(first)?;
            check(second)?;
            if first == second {
                return Err(MoveError::EqualRelators(first));
            }
            // (a, b) -> (ab, b) -> (b^-1 a^-1, b) -> (b^-1 a^-1, a^-1)
            //        -> (b^-1, a^-1) -> (b, a^-1) -> (b, a)
            Ok(vec![
                Move::RightMultiply { relator: first, by: second, sign: Sign::Plus },
                Move::Invert { relator: first },
                Move::RightMultiply { relator: second, by: first, sign: Sign::Plus },
                Move::RightMultiply { relator: first, by: second, sign: Sign::Minus },
                Move::Invert { relator: first },
                Move::Invert { relator: second },
            ])
        }
    }
}

// ---------------------------------------------------------------------------
// Generator automorphisms.
// ---------------------------------------------------------------------------

/// One elementary Nielsen automorphism of the free generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NielsenAut {
    /// `x_a -> x_a^-1`
    InvertGen { gen: u16 },
    /// `x_a -> x_a * x_b^sign`, `a != b`
    MultiplyGen { gen: u16, by: u16, sign: Sign },
    /// `x_a <-> x_b`
    SwapGens { first: u16, second: u16 },
}

impl NielsenAut {
    fn validate(&self, rank: u16) -> Result<(), MoveError> {
        let check = |index: u16| {
            if index == 0 || index > rank {
                Err(MoveError::GeneratorOutOfRange { index, rank })
            } else {
                Ok(())
            }
        };
        match *self {
            NielsenAut::InvertGen { gen } => check(gen),
            NielsenAut::MultiplyGen { gen, by, .. } => {
                check(gen)?;
                check(by)?;
                if gen == by {
                    return Err(MoveError::EqualRelators(gen));
                }
                Ok(())
            }
            NielsenAut::SwapGens { first, second } => {
                check(first)?;
                check(second)
            }
        }
    }

    /// Image of a single letter under this automorphism.
    fn image(&self, letter: Letter) -> Vec<Letter> {
        match *self {
            NielsenAut::InvertGen { gen } => {
                if letter.index() == gen {
                    vec![letter.inverse()]
                } else {
                    vec![letter]
                }
            }
            NielsenAut::MultiplyGen { gen, by, sign } => {
                if letter.index() != gen {
                    return vec![letter];
                }
                let factor = match sign {
                    Sign::Plus => Letter::generator(by),
                    Sign::Minus => Letter::generator(by).inverse(),
                };
                match letter.sign() {
                    // x_a -> x_a x_b^s
                    Sign::Plus => vec![letter, factor],
                    // x_a^-1 -> x_b^-s x_a^-1
                    Sign::Minus => vec![factor.inverse(), letter],
                }
            }
            NielsenAut::SwapGens { first, second } => {
                let index = if letter.index() == first {
                    second
                } else if letter.index() == second {
                    first
                } else {
                    return vec![letter];
                };
                vec![Letter::new(index, letter.sign())]
            }
        }
    }

    pub fn apply_word(&self, w: &Word) -> Word {
        Word::reduce(w.letters().iter().flat_map(|&l| self.image(l)))
    }
}

/// A composition of elementary Nielsen automorphisms, applied left to
/// right. Arbitrary endomorphisms are not expressible -- every spec is an
/// automorphism by construction, so the abelianization determinant and
/// trivializability of any presentation it is applied to are preserved.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AutomorphismSpec {
    pub steps: Vec<NielsenAut>,
}

impl AutomorphismSpec {
    pub fn new(steps: Vec<NielsenAut>) -> AutomorphismSpec {
        AutomorphismSpec { steps }
    }

    pub fn validate(&self, rank: u16) -> Result<(), MoveError> {
        self.steps.iter().try_for_each(|s| s.validate(rank))
    }

    pub fn apply_word(&self, w: &Word) -> Word {
        self.steps.iter().fold(w.clone(), |acc, s| s.apply_word(&acc))
    }
}

/// Rewrites every relator through the automorphism and reduces.
pub fn apply_automorphism(
    p: &Presentation,
    spec: &AutomorphismSpec,
) -> Result<Presentation, MoveError> {
    spec.validate(p.rank())?;
    let relators = p.relators().iter().map(|r| spec.apply_word(r)).collect();
    Ok(Presentation::new(p.rank(), relators).expect("automorphism preserves rank"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::rng::SplitMix64;
    use num_bigint::BigInt;

    fn p(text: &str) -> Presentation {
        Presentation::parse(text).unwrap()
    }

    fn det(pres: &Presentation) -> BigInt {
        crate::abelian::AbelianMatrix::from_presentation(pres).determinant()
    }

    #[test]
    fn apply_examples() {
        let m = Move::RightMultiply { relator: 1, by: 2, sign: Sign::Minus };
        assert_eq!(apply_move(&p("xy;y"), &m).unwrap(), p("x;y"));
        let m = Move::Invert { relator: 1 };
        assert_eq!(apply_move(&p("x;y"), &m).unwrap(), p("X;y"));
        let m = Move::Conjugate { relator: 1, generator: 2, sign: Sign::Plus };
        assert_eq!(apply_move(&p("x;y"), &m).unwrap(), p("yxY;y"));
    }

    #[test]
    fn apply_rejects_bad_moves() {
        let m = Move::RightMultiply { relator: 1, by: 1, sign: Sign::Plus };
        assert_eq!(
            apply_move(&p("x;y"), &m),
            Err(MoveError::EqualRelators(1))
        );
        let m = Move::Invert { relator: 3 };
        assert!(matches!(
            apply_move(&p("x;y"), &m),
            Err(MoveError::RelatorOutOfRange { index: 3, rank: 2 })
        ));
        let m = Move::Conjugate { relator: 1, generator: 0, sign: Sign::Plus };
        assert!(matches!(
            apply_move(&p("x;y"), &m),
            Err(MoveError::GeneratorOutOfRange { index: 0, .. })
        ));
    }

    #[test]
    fn invert_move_examples() {
        let m = Move::Invert { relator: 1 };
        assert_eq!(invert_move(&m), m);
        let m = Move::RightMultiply { relator: 1, by: 2, sign: Sign::Plus };
        let there = apply_move(&p("x;y"), &m).unwrap();
        assert_eq!(there, p("xy;y"));
        assert_eq!(apply_move(&there, &invert_move(&m)).unwrap(), p("x;y"));
    }

    #[test]
    fn move_roundtrip_random() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..1000 {
            let rank = rng.range(1, 4) as u16;
            let pres = gen::presentation(&mut rng, rank, 8);
            let moves = enumerate_moves(&pres);
            let m = moves[rng.below(moves.len() as u64) as usize];
            let there = apply_move(&pres, &m).unwrap();
            assert_eq!(apply_move(&there, &invert_move(&m)).unwrap(), pres);
        }
    }

    #[test]
    fn det_invariance_random() {
        let mut rng = SplitMix64::new(32);
        for _ in 0..1000 {
            let rank = rng.range(1, 4) as u16;
            let pres = gen::presentation(&mut rng, rank, 10);
            let moves = enumerate_moves(&pres);
            let m = moves[rng.below(moves.len() as u64) as usize];
            let before = det(&pres);
            let after = det(&apply_move(&pres, &m).unwrap());
            assert!(
                before == after || before == -after.clone(),
                "{pres:?} {m} changed |det|: {before} -> {after}"
            );
        }
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(enumerate_moves(&Presentation::trivial(2)).len(), 14);
        assert_eq!(enumerate_moves(&Presentation::trivial(1)).len(), 3);
        assert_eq!(enumerate_moves(&Presentation::trivial(0)).len(), 0);
        for n in 0..6u16 {
            let moves = enumerate_moves(&Presentation::trivial(n));
            assert_eq!(moves.len(), move_count(n));
            let expect = n as usize
                + 2 * n as usize * (n as usize).saturating_sub(1)
                + 2 * n as usize * n as usize;
            assert_eq!(moves.len(), expect);
            for m in &moves {
                assert!(m.validate(n).is_ok());
            }
        }
    }

    #[test]
    fn enumerate_order_is_documented() {
        let moves = enumerate_moves(&Presentation::trivial(2));
        assert_eq!(moves[0], Move::Invert { relator: 1 });
        assert_eq!(moves[1], Move::Invert { relator: 2 });
        assert_eq!(
            moves[2],
            Move::RightMultiply { relator: 1, by: 2, sign: Sign::Plus }
        );
        assert_eq!(
            moves[3],
            Move::RightMultiply { relator: 1, by: 2, sign: Sign::Minus }
        );
        assert_eq!(
            moves[6],
            Move::Conjugate { relator: 1, generator: 1, sign: Sign::Plus }
        );
    }

    fn spec(
        target: u16,
        other: u16,
        path: &str,
        target_sign: Sign,
        other_sign: Sign,
        conjugator: &str,
    ) -> SlideSpec {
        SlideSpec {
            target,
            other,
            path: Word::parse(path, 26).unwrap(),
            target_sign,
            other_sign,
            conjugator: Word::parse(conjugator, 26).unwrap(),
        }
    }

    #[test]
    fn slide_examples() {
        let s = spec(1, 2, "y", Sign::Plus, Sign::Minus, "1");
        assert_eq!(slide(&p("x;y"), &s).unwrap(), p("xY;y"));
        let s = spec(1, 2, "1", Sign::Plus, Sign::Plus, "1");
        assert_eq!(slide(&p("x;y"), &s).unwrap(), p("xy;y"));
        let s = spec(1, 1, "1", Sign::Plus, Sign::Plus, "1");
        assert_eq!(slide(&p("x;y"), &s), Err(MoveError::EqualRelators(1)));
    }

    #[test]
    fn decomposition_examples() {
        let s = spec(1, 2, "1", Sign::Plus, Sign::Plus, "1");
        assert_eq!(
            slide_decomposition(&s, 2).unwrap(),
            vec![Move::RightMultiply { relator: 1, by: 2, sign: Sign::Plus }]
        );
        let s = spec(1, 2, "1", Sign::Minus, Sign::Plus, "1");
        assert_eq!(
            slide_decomposition(&s, 2).unwrap(),
            vec![
                Move::Invert { relator: 1 },
                Move::RightMultiply { relator: 1, by: 2, sign: Sign::Plus },
            ]
        );
    }

    #[test]
    fn decomposition_matches_slide_random() {
        let mut rng = SplitMix64::new(33);
        for _ in 0..500 {
            let rank = rng.range(2, 4) as u16;
            let pres = gen::presentation(&mut rng, rank, 8);
            let s = gen::slide_spec(&mut rng, rank, 4);
            let direct = slide(&pres, &s).unwrap();
            let moves = slide_decomposition(&s, rank).unwrap();
            let replayed = replay(&pres, &moves).unwrap();
            assert_eq!(replayed, direct, "spec {s:?} on {pres:?}");
        }
    }

    #[test]
    fn macro_swap_and_rotate() {
        let pres = p("x;y");
        let moves = macro_moves(&pres, &MacroMove::Swap { first: 1, second: 2 }).unwrap();
        assert_eq!(replay(&pres, &moves).unwrap(), p("y;x"));

        let pres = p("xy;y");
        let moves = macro_moves(&pres, &MacroMove::Rotate { relator: 1, amount: 1 }).unwrap();
        assert_eq!(replay(&pres, &moves).unwrap(), p("yx;y"));
        assert_eq!(
            replay(&pres, &moves).unwrap().canonicalize(),
            pres.canonicalize()
        );

        let moves = macro_moves(&pres, &MacroMove::Invert { relator: 1 }).unwrap();
        assert_eq!(replay(&pres, &moves).unwrap(), p("YX;y"));

        assert!(matches!(
            macro_moves(&pres, &MacroMove::Rotate { relator: 1, amount: 9 }),
            Err(MoveError::RotationTooLong { amount: 9, len: 2 })
        ));
    }

    #[test]
    fn macro_soundness_random() {
        let mut rng = SplitMix64::new(34);
        for _ in 0..100 {
            let rank = rng.range(2, 4) as u16;
            let pres = gen::presentation(&mut rng, rank, 8);

            let i = rng.range(1, rank as u64) as u16;
            let mut j = rng.range(1, rank as u64) as u16;
            if j == i {
                j = if i == rank { 1 } else { i + 1 };
            }

            // Swap against direct exchange.
            let moves = macro_moves(&pres, &MacroMove::Swap { first: i, second: j }).unwrap();
            let mut relators = pres.relators().to_vec();
            relators.swap(i as usize - 1, j as usize - 1);
            let direct = Presentation::new(rank, relators).unwrap();
            assert_eq!(replay(&pres, &moves).unwrap(), direct);

            // Rotate against direct rotation.
            let len = pres.relator(i).len();
            let amount = if len == 0 { 0 } else { rng.below(len as u64 + 1) as usize };
            let moves =
                macro_moves(&pres, &MacroMove::Rotate { relator: i, amount }).unwrap();
            let letters = pres.relator(i).letters();
            let rotated = Word::reduce(
                letters[amount..]
                    .iter()
                    .chain(&letters[..amount])
                    .copied(),
            );
            let direct = pres.clone();
            let direct = Presentation::new(
                rank,
                direct
                    .relators()
                    .iter()
                    .enumerate()
                    .map(|(pos, r)| if pos == i as usize - 1 { rotated.clone() } else { r.clone() })
                    .collect(),
            )
            .unwrap();
            let replayed = replay(&pres, &moves).unwrap();
            assert_eq!(replayed.canonicalize(), direct.canonicalize());
            assert_eq!(replayed, direct);

            // Invert.
            let moves = macro_moves(&pres, &MacroMove::Invert { relator: i }).unwrap();
            let replayed = replay(&pres, &moves).unwrap();
            assert_eq!(replayed.relator(i), &pres.relator(i).invert());
            assert_eq!(replayed.canonicalize(), pres.canonicalize());
        }
    }

    #[test]
    fn automorphism_examples() {
        let aut = AutomorphismSpec::new(vec![NielsenAut::MultiplyGen {
            gen: 1,
            by: 2,
            sign: Sign::Plus,
        }]);
        assert_eq!(apply_automorphism(&p("x;y"), &aut).unwrap(), p("xy;y"));

        let aut = AutomorphismSpec::new(vec![NielsenAut::InvertGen { gen: 1 }]);
        assert_eq!(apply_automorphism(&p("x;y"), &aut).unwrap(), p("X;y"));

        let aut = AutomorphismSpec::new(vec![NielsenAut::SwapGens { first: 1, second: 2 }]);
        assert_eq!(apply_automorphism(&p("xy;y"), &aut).unwrap(), p("yx;x"));

        let aut = AutomorphismSpec::new(vec![NielsenAut::MultiplyGen {
            gen: 1,
            by: 1,
            sign: Sign::Plus,
        }]);
        assert!(apply_automorphism(&p("x;y"), &aut).is_err());
    }

    #[test]
    fn automorphism_preserves_det_and_inverse_letters() {
        let mut rng = SplitMix64::new(35);
        for _ in 0..300 {
            let rank = rng.range(2, 4) as u16;
            let pres = gen::presentation(&mut rng, rank, 8);
            let aut = gen::automorphism(&mut rng, rank, 3);
            let image = apply_automorphism(&pres, &aut).unwrap();
            let before = det(&pres);
            let after = det(&image);
            assert!(before == after || before == -after.clone());
            // An automorphism respects inversion: phi(w)^-1 == phi(w^-1).
            for r in pres.relators() {
                assert_eq!(aut.apply_word(&r.invert()), aut.apply_word(r).invert());
            }
        }
    }
}
