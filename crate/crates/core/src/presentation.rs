//! Balanced presentations and their canonical forms.
//!
//! A presentation here always has exactly as many relators as generators:
//! the algebraic trace of `n` disjoint curves on a genus-`n` surface. Two
//! presentations that differ only by relator permutation, relator
//! inversion, or conjugation of relators are interchangeable for
//! trivialization purposes (each of those symmetries is realizable by
//! elementary Andrews-Curtis moves, see [`crate::moves::macro_moves`]), so
//! [`CanonicalPresentation`] quotients all three and serves as the search
//! dedup key and goal test.

use std::fmt;

use thiserror::Error;

use crate::word::{CyclicWord, Word, MAX_RANK};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("rank {rank} presentation needs {rank} relators, got {count}")]
    NotBalanced { rank: u16, count: usize },
    #[error("relator {relator}: letter x{index} outside rank {rank}")]
    LetterOutOfRank { relator: usize, index: u16, rank: u16 },
    #[error("rank {0} exceeds maximum supported rank {MAX_RANK}")]
    RankTooLarge(u32),
}

/// A balanced presentation: `rank` generators and exactly `rank` reduced
/// relator words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    rank: u16,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(rank: u16, relators: Vec<Word>) -> Result<Presentation, PresentationError> {
        if relators.len() != rank as usize {
            return Err(PresentationError::NotBalanced {
                rank,
                count: relators.len(),
            });
        }
        for (pos, relator) in relators.iter().enumerate() {
            if relator.max_index() > rank {
                return Err(PresentationError::LetterOutOfRank {
                    relator: pos + 1,
                    index: relator.max_index(),
                    rank,
                });
            }
        }
        Ok(Presentation { rank, relators })
    }

    /// The canonical trivial presentation: relators `x1, ..., xn`.
    pub fn trivial(rank: u16) -> Presentation {
        Presentation {
            rank,
            relators: (1..=rank)
                .map(|k| Word::letter(crate::word::Letter::generator(k)))
                .collect(),
        }
    }

    pub fn rank(&self) -> u16 {
        self.rank
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Relator by 1-based position.
    pub fn relator(&self, pos: u16) -> &Word {
        &self.relators[pos as usize - 1]
    }

    /// Same presentation with one relator (1-based) replaced. The word must
    /// already respect the rank; move application guarantees that.
    pub(crate) fn with_relator(&self, pos: u16, word: Word) -> Presentation {
        debug_assert!(word.max_index() <= self.rank);
        let mut relators = self.relators.clone();
        relators[pos as usize - 1] = word;
        Presentation {
            rank: self.rank,
            relators,
        }
    }

    /// Dedup key: sorted canonical conjugacy classes of the relators.
    pub fn canonicalize(&self) -> CanonicalPresentation {
        let mut classes: Vec<CyclicWord> = self
            .relators
            .iter()
            .map(|r| {
                r.canonical_cyclic(self.rank)
                    .expect("relators are validated against rank")
            })
            .collect();
        classes.sort();
        CanonicalPresentation {
            rank: self.rank,
            classes,
        }
    }

    /// Goal test: equal, as canonical forms, to the trivial presentation of
    /// the same rank.
    pub fn is_trivial(&self) -> bool {
        self.canonicalize() == Presentation::trivial(self.rank).canonicalize()
    }

    pub fn metrics(&self) -> Metrics {
        Metrics {
            total_length: self.relators.iter().map(Word::len).sum(),
            max_relator_length: self.relators.iter().map(Word::len).max().unwrap_or(0),
        }
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}| ", self.rank)?;
        for (pos, r) in self.relators.iter().enumerate() {
            if pos > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{r:?}")?;
        }
        write!(f, ">")
    }
}

/// Relator length summary used by search pruning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    pub total_length: usize,
    pub max_relator_length: usize,
}

/// Canonical form of a presentation under relator permutation, inversion,
/// and conjugation. Deterministic and idempotent; byte serialization is
/// stable and used for both exact dedup and fingerprinting.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CanonicalPresentation {
    rank: u16,
    classes: Vec<CyclicWord>,
}

impl CanonicalPresentation {
    pub fn rank(&self) -> u16 {
        self.rank
    }

    pub fn classes(&self) -> &[CyclicWord] {
        &self.classes
    }

    /// A presentation whose relators are the class representatives, in
    /// canonical order.
    pub fn to_presentation(&self) -> Presentation {
        Presentation {
            rank: self.rank,
            relators: self
                .classes
                .iter()
                .map(|c| c.representative().clone())
                .collect(),
        }
    }

    /// Stable little-endian serialization of the canonical form.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 + self.classes.len() * 8);
        out.extend_from_slice(&self.rank.to_le_bytes());
        for class in &self.classes {
            let word = class.representative();
            out.extend_from_slice(&(word.len() as u32).to_le_bytes());
            for l in word.letters() {
                out.extend_from_slice(&l.code().to_le_bytes());
            }
        }
        out
    }
}

impl fmt::Debug for CanonicalPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "canon")?;
        f.debug_list().entries(self.classes.iter()).finish()
    }
}

// ---------------------------------------------------------------------------
// Text format.
//
// Multi-line: `rank <n>` on the first line, then one relator per line
// (compact or indexed word form; blank lines ignored). Single-line: relators
// joined by `;`, e.g. `xy;y`, with the rank inferred from the relator count.
// Emitters always produce the multi-line form, compact when rank <= 26.
// ---------------------------------------------------------------------------

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected `rank <n>`")]
    ExpectedRank { line: usize },
    #[error("line {line}: invalid rank {text:?}")]
    BadRank { line: usize, text: String },
    #[error("line {line}, column {column}: {source}")]
    Word {
        line: usize,
        column: usize,
        source: crate::word::WordParseError,
    },
    #[error("expected {expected} relator lines, found {found}")]
    RelatorCount { expected: u16, found: usize },
    #[error("single-line form cannot express a rank-0 presentation")]
    EmptySingleLine,
    #[error(transparent)]
    Invalid(#[from] PresentationError),
}

impl Presentation {
    /// Parses either text form. Relators are reduced on the way in.
    pub fn parse(text: &str) -> Result<Presentation, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(idx, l)| (idx + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let Some((first_no, first)) = lines.next() else {
            return Err(ParseError::ExpectedRank { line: 1 });
        };
        if let Some(rest) = first.strip_prefix("rank") {
            let rank: u32 = rest
                .trim()
                .parse()
                .map_err(|_| ParseError::BadRank {
                    line: first_no,
                    text: rest.trim().to_string(),
                })?;
            if rank > MAX_RANK as u32 {
                return Err(PresentationError::RankTooLarge(rank).into());
            }
            let rank = rank as u16;
            let mut relators = Vec::with_capacity(rank as usize);
            for (line_no, line) in lines.by_ref() {
                if relators.len() == rank as usize {
                    return Err(ParseError::RelatorCount {
                        expected: rank,
                        found: rank as usize + 1 + lines.count(),
                    });
                }
                let word = Word::parse(line, rank).map_err(|e| ParseError::Word {
                    line: line_no,
                    column: word_error_column(&e),
                    source: e,
                })?;
                relators.push(word);
            }
            if relators.len() != rank as usize {
                return Err(ParseError::RelatorCount {
                    expected: rank,
                    found: relators.len(),
                });
            }
            Ok(Presentation::new(rank, relators)?)
        } else {
            if lines.next().is_some() {
                return Err(ParseError::ExpectedRank { line: first_no });
            }
            Presentation::parse_single_line(first, first_no)
        }
    }

    /// Parses the `;`-joined single-line form; rank = number of relators.
    pub fn parse_single_line(line: &str, line_no: usize) -> Result<Presentation, ParseError> {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            return Err(ParseError::EmptySingleLine);
        }
        let fields: Vec<&str> = trimmed.split(';').collect();
        let rank = fields.len();
        if rank > MAX_RANK as usize {
            return Err(PresentationError::RankTooLarge(rank as u32).into());
        }
        let rank = rank as u16;
        let mut relators = Vec::with_capacity(fields.len());
        for field in fields {
            let word = Word::parse(field, rank).map_err(|e| ParseError::Word {
                line: line_no,
                column: word_error_column(&e),
                source: e,
            })?;
            relators.push(word);
        }
        Ok(Presentation::new(rank, relators)?)
    }

    /// Multi-line text form; `parse(format(p)) == p` for any valid `p`.
    pub fn format(&self) -> String {
        let mut out = format!("rank {}", self.rank);
        for relator in &self.relators {
            out.push('\n');
            out.push_str(&relator.format_for_rank(self.rank));
        }
        out
    }

    /// Single-line `;`-joined form used inside certificates. Empty string
    /// for rank 0.
    pub fn format_single_line(&self) -> String {
        self.relators
            .iter()
            .map(|r| r.format_for_rank(self.rank))
            .collect::<Vec<_>>()
            .join(";")
    }
}

fn word_error_column(e: &crate::word::WordParseError) -> usize {
    use crate::word::WordParseError::*;
    match e {
        Empty => 1,
        BadChar { column, .. } | BadIndex { column, .. } | OutOfRank { column, .. } => *column,
    }
}
