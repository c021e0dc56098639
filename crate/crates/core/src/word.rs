//! Free-group word algebra.
//!
//! Elements of a free group of rank `n` are stored as freely reduced
//! sequences of signed generator letters. Every operation returns a new
//! value; nothing here mutates in place, so words are safe to share across
//! threads. Conjugacy classes (what a curve on a surface actually
//! determines) are represented by [`CyclicWord`], a canonical rotation of
//! the cyclically reduced core, quotiented by inversion.

use std::fmt;

use thiserror::Error;

/// Largest supported generator index. Letters pack into an `i16`, which is
/// what keeps hashing and dedup keys cheap during search.
pub const MAX_RANK: u16 = i16::MAX as u16;

/// Sign of a letter, a move multiplier, or a slide exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+1"),
            Sign::Minus => write!(f, "-1"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("letter x{index} outside rank {rank}")]
    IndexOutOfRank { index: u16, rank: u16 },
}

/// One signed generator letter: `x_k` or its inverse.
///
/// Packed as a nonzero `i16`: `+k` is the generator, `-k` its inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i16);

impl Letter {
    /// Builds a letter. Panics on index 0 or index beyond [`MAX_RANK`];
    /// parsers validate before calling.
    pub fn new(index: u16, sign: Sign) -> Letter {
        assert!(
            (1..=MAX_RANK).contains(&index),
            "generator index {index} out of 1..={MAX_RANK}"
        );
        match sign {
            Sign::Plus => Letter(index as i16),
            Sign::Minus => Letter(-(index as i16)),
        }
    }

    pub fn generator(index: u16) -> Letter {
        Letter::new(index, Sign::Plus)
    }

    pub fn index(self) -> u16 {
        self.0.unsigned_abs()
    }

    pub fn sign(self) -> Sign {
        if self.0 > 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    pub(crate) fn code(self) -> i16 {
        self.0
    }

    pub(crate) fn from_code(code: i16) -> Option<Letter> {
        if code == 0 {
            None
        } else {
            Some(Letter(code))
        }
    }

    /// Total order used everywhere words are compared:
    /// x1 < x1^-1 < x2 < x2^-1 < ...
    fn order_key(self) -> u32 {
        ((self.index() as u32) << 1) | matches!(self.sign(), Sign::Minus) as u32
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Letter) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Letter) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index() <= 26 {
            write!(f, "{}", compact_char(self.index(), self.sign()))
        } else {
            match self.sign() {
                Sign::Plus => write!(f, "+{}", self.index()),
                Sign::Minus => write!(f, "-{}", self.index()),
            }
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A freely reduced word; the empty word is the identity.
///
/// Constructors reduce, so a `Word` never contains an adjacent
/// letter/inverse pair.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    pub fn letter(l: Letter) -> Word {
        Word { letters: vec![l] }
    }

    /// Free reduction of an arbitrary letter sequence. Idempotent; the
    /// result is the unique reduced word equal to the input in F.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Word {
        let iter = letters.into_iter();
        let mut out: Vec<Letter> = Vec::with_capacity(iter.size_hint().0);
        for l in iter {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
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

    /// Largest generator index appearing in the word; 0 for the identity.
    pub fn max_index(&self) -> u16 {
        self.letters.iter().map(|l| l.index()).max().unwrap_or(0)
    }

    pub fn check_rank(&self, rank: u16) -> Result<(), WordError> {
        match self.letters.iter().find(|l| l.index() > rank) {
            Some(l) => Err(WordError::IndexOutOfRank {
                index: l.index(),
                rank,
            }),
            None => Ok(()),
        }
    }

    pub fn invert(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Reduced product `self * other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.letters.clone();
        for &l in &other.letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    /// `self` raised to a sign: the word itself or its inverse.
    pub fn signed(&self, sign: Sign) -> Word {
        match sign {
            Sign::Plus => self.clone(),
            Sign::Minus => self.invert(),
        }
    }

    /// Reduced form of `by * self * by^-1`.
    pub fn conjugate(&self, by: &Word) -> Word {
        by.concat(self).concat(&by.invert())
    }

    /// Splits off matched ends: returns `(core, conjugator)` with
    /// `self = conjugator * core * conjugator^-1` and the core cyclically
    /// reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let core = self.cyclic_core();
        let peel = (self.letters.len() - core.len()) / 2;
        (
            Word { letters: core.to_vec() },
            Word { letters: self.letters[..peel].to_vec() },
        )
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(a), Some(b)) => *a != b.inverse(),
            _ => true,
        }
    }

    /// The cyclically reduced core as a subslice; allocation-free version
    /// of [`Word::cyclic_reduce`] for hot paths.
    pub fn cyclic_core(&self) -> &[Letter] {
        let mut lo = 0usize;
        let mut hi = self.letters.len();
        while hi - lo >= 2 && self.letters[lo] == self.letters[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        &self.letters[lo..hi]
    }

    /// Canonical representative of the conjugacy-and-inversion class of
    /// `self`: the order-least rotation over the cyclically reduced core
    /// and its inverse.
    pub fn canonical_cyclic(&self, rank: u16) -> Result<CyclicWord, WordError> {
        self.check_rank(rank)?;
        let (core, _) = self.cyclic_reduce();
        if core.is_empty() {
            return Ok(CyclicWord {
                representative: core,
                rank,
            });
        }
        let fwd = rotate_to_least(&core.letters);
        let inv = rotate_to_least(&core.invert().letters);
        let representative = if compare_letters(&fwd, &inv).is_le() {
            Word { letters: fwd }
        } else {
            Word { letters: inv }
        };
        Ok(CyclicWord {
            representative,
            rank,
        })
    }

    /// Abelianized image: entry `k-1` is the signed count of letter `k`.
    pub fn exponent_vector(&self, rank: u16) -> Result<Vec<i64>, WordError> {
        self.check_rank(rank)?;
        let mut v = vec![0i64; rank as usize];
        for l in &self.letters {
            v[l.index() as usize - 1] += l.sign().as_i8() as i64;
        }
        Ok(v)
    }

    /// Length-first, then letterwise under the letter order. This is the
    /// order behind every canonical form and witness enumeration.
    pub fn word_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| compare_letters(&self.letters, &other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Word) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.word_cmp(other)
    }
}

fn compare_letters(a: &[Letter], b: &[Letter]) -> std::cmp::Ordering {
    a.iter()
        .map(|l| l.order_key())
        .cmp(b.iter().map(|l| l.order_key()))
}

/// Least rotation of a nonempty letter sequence, returned already rotated.
/// Two-pointer duel in O(n); the naive all-rotations scan lives in the
/// tests as an oracle.
fn rotate_to_least(s: &[Letter]) -> Vec<Letter> {
    let n = s.len();
    debug_assert!(n > 0);
    let key = |i: usize| s[i % n].order_key();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = key(i + k);
        let b = key(j + k);
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    let start = i.min(j);
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&s[start..]);
    out.extend_from_slice(&s[..start]);
    out
}

/// Commutator `a b a^-1 b^-1`.
pub fn commutator(a: &Word, b: &Word) -> Word {
    a.concat(b).concat(&a.invert()).concat(&b.invert())
}

/// Reduced form of the ordered product of commutators of the given pairs.
pub fn commutator_product(pairs: &[(Word, Word)]) -> Word {
    let mut acc = Word::identity();
    for (a, b) in pairs {
        acc = acc.concat(&commutator(a, b));
    }
    acc
}

/// Canonical representative of a conjugacy class, quotiented by inversion.
///
/// Equal for `w`, every conjugate of `w`, and `w^-1`; this is what makes
/// presentation dedup keys sound.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclicWord {
    representative: Word,
    rank: u16,
}

impl CyclicWord {
    pub fn representative(&self) -> &Word {
        &self.representative
    }

    pub fn rank(&self) -> u16 {
        self.rank
    }
}

impl PartialOrd for CyclicWord {
    fn partial_cmp(&self, other: &CyclicWord) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CyclicWord {
    fn cmp(&self, other: &CyclicWord) -> std::cmp::Ordering {
        self.representative.word_cmp(&other.representative)
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}]", self.representative)
    }
}

// ---------------------------------------------------------------------------
// Text forms.
//
// Compact: one lowercase letter per generator, following the usual naming of
// free-group generators -- x, y, z for generators 1..3, then a..w for 4..26.
// Uppercase letters are the inverses and "1" is the identity. Indexed:
// whitespace-separated signed indices, "+3 -1 +3". The parser takes either;
// emitters pick compact when the ambient rank allows it.
// ---------------------------------------------------------------------------

/// Compact letter for a generator index (1-based, index <= 26).
fn compact_char(index: u16, sign: Sign) -> char {
    debug_assert!((1..=26).contains(&index));
    let base = match (index, sign) {
        (1..=3, Sign::Plus) => b'x' + (index - 1) as u8,
        (1..=3, Sign::Minus) => b'X' + (index - 1) as u8,
        (_, Sign::Plus) => b'a' + (index - 4) as u8,
        (_, Sign::Minus) => b'A' + (index - 4) as u8,
    };
    base as char
}

/// Generator index and sign for a compact letter, if it is one.
fn compact_index(ch: char) -> Option<(u16, Sign)> {
    match ch {
        'x'..='z' => Some((ch as u16 - 'x' as u16 + 1, Sign::Plus)),
        'X'..='Z' => Some((ch as u16 - 'X' as u16 + 1, Sign::Minus)),
        'a'..='w' => Some((ch as u16 - 'a' as u16 + 4, Sign::Plus)),
        'A'..='W' => Some((ch as u16 - 'A' as u16 + 4, Sign::Minus)),
        _ => None,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordParseError {
    #[error("empty word text (use \"1\" for the identity)")]
    Empty,
    #[error("invalid character {ch:?} at column {column}")]
    BadChar { ch: char, column: usize },
    #[error("invalid index token {token:?} at column {column}")]
    BadIndex { token: String, column: usize },
    #[error("letter x{index} at column {column} outside rank {rank}")]
    OutOfRank {
        index: u16,
        column: usize,
        rank: u16,
    },
}

impl Word {
    /// Parses either text form and reduces. Columns in errors are 1-based
    /// offsets into `text`.
    pub fn parse(text: &str, rank: u16) -> Result<Word, WordParseError> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(WordParseError::Empty);
        }
        if trimmed == "1" {
            return Ok(Word::identity());
        }
        let first = trimmed.chars().next().unwrap();
        if first.is_ascii_alphabetic() {
            Self::parse_compact(text, rank)
        } else {
            Self::parse_indexed(text, rank)
        }
    }

    fn parse_compact(text: &str, rank: u16) -> Result<Word, WordParseError> {
        let mut letters = Vec::new();
        for (pos, ch) in text.char_indices() {
            let column = pos + 1;
            if ch.is_whitespace() {
                continue;
            }
            let Some((index, sign)) = compact_index(ch) else {
                return Err(WordParseError::BadChar { ch, column });
            };
            if index > rank {
                return Err(WordParseError::OutOfRank {
                    index,
                    column,
                    rank,
                });
            }
            letters.push(Letter::new(index, sign));
        }
        Ok(Word::reduce(letters))
    }

    fn parse_indexed(text: &str, rank: u16) -> Result<Word, WordParseError> {
        let mut letters = Vec::new();
        let mut offset = 0usize;
        for token in text.split_whitespace() {
            let column = text[offset..].find(token).map(|p| offset + p + 1).unwrap_or(1);
            offset = column - 1 + token.len();
            let value: i64 = token
                .parse()
                .map_err(|_| WordParseError::BadIndex {
                    token: token.to_string(),
                    column,
                })?;
            if value == 0 || value.unsigned_abs() > MAX_RANK as u64 {
                return Err(WordParseError::BadIndex {
                    token: token.to_string(),
                    column,
                });
            }
            let index = value.unsigned_abs() as u16;
            if index > rank {
                return Err(WordParseError::OutOfRank {
                    index,
                    column,
                    rank,
                });
            }
            let sign = if value > 0 { Sign::Plus } else { Sign::Minus };
            letters.push(Letter::new(index, sign));
        }
        if letters.is_empty() {
            return Err(WordParseError::Empty);
        }
        Ok(Word::reduce(letters))
    }

    /// Compact text form; callers guarantee `max_index() <= 26`.
    pub fn format_compact(&self) -> String {
        if self.is_empty() {
            return "1".to_string();
        }
        self.letters
            .iter()
            .map(|l| compact_char(l.index(), l.sign()))
            .collect()
    }

    /// Indexed text form, valid for any rank.
    pub fn format_indexed(&self) -> String {
        if self.is_empty() {
            return "1".to_string();
        }
        self.letters
            .iter()
            .map(|l| match l.sign() {
                Sign::Plus => format!("+{}", l.index()),
                Sign::Minus => format!("-{}", l.index()),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Text form selected by ambient rank, as emitters must do.
    pub fn format_for_rank(&self, rank: u16) -> String {
        if rank <= 26 {
            self.format_compact()
        } else {
            self.format_indexed()
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.max_index() <= 26 {
            write!(f, "{}", self.format_compact())
        } else {
            write!(f, "{}", self.format_indexed())
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
