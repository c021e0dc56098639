//! Complete-set checking and the end-to-end analysis pipeline.
//!
//! An n-tuple of free-group elements is *complete* when, after replacing
//! each entry by a conjugate, there are witness elements `b_1..b_n` such
//! that the combined 2n-tuple generates the whole group and the product of
//! commutators `[a_i, b_i]` is trivial -- the algebraic shadow of a system
//! of curves that embeds as a Heegaard diagram. Completeness is existential
//! and undecidable-in-practice, so the checker is bounded: it either
//! produces a verified witness or answers `UnknownWithinBound`, which
//! claims nothing.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use thiserror::Error;

use crate::abelian::AbelianMatrix;
use crate::presentation::{Presentation, PresentationError};
use crate::search::{search_trivialization, SearchConfig, SearchError, SearchOutcome};
use crate::subgroup::{fold, SubgroupError};
use crate::word::{commutator, commutator_product, Letter, Sign, Word};

#[derive(Debug, Error)]
pub enum CompleteError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Subgroup(#[from] SubgroupError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// A verified completeness witness: `conjugated[i]` is a conjugate of the
/// i-th input element, and together with `witnesses` it satisfies both
/// defining conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessWitness {
    pub conjugated: Vec<Word>,
    pub witnesses: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompletenessVerdict {
    CompleteWithWitness(CompletenessWitness),
    /// No witness found within the bound. Says nothing about completeness
    /// itself; the definition is existential and this checker does not
    /// attempt disproof.
    UnknownWithinBound(u32),
}

impl CompletenessVerdict {
    pub fn is_complete(&self) -> bool {
        matches!(self, CompletenessVerdict::CompleteWithWitness(_))
    }
}

/// Trace of the canonical genus-n diagram: the standard basis
/// `x_1, ..., x_n`.
pub fn canonical_trace(rank: u16) -> Vec<Word> {
    (1..=rank).map(|k| Word::letter(Letter::generator(k))).collect()
}

/// Bounded completeness check.
///
/// Fast path: a tuple that is, up to permutation, inversion, and
/// conjugation, the standard basis is complete with identity witnesses and
/// its cyclically reduced cores as the conjugated tuple.
///
/// Bounded search: conjugator tuples (each word of length <= `bound`) and
/// witness tuples (total length <= `bound`) are enumerated by total length
/// and then lexicographically under the word order; the first candidate
/// satisfying both conditions is returned. A witness entry that merely
/// commutes with its conjugated partner is skipped unless it is the
/// identity: such entries contribute nothing to the commutator product and
/// are treated as inessential, a deliberate narrowing of the enumeration
/// that keeps every returned verdict verified while leaving some tuples at
/// `UnknownWithinBound`.
pub fn is_complete_set(tuple: &[Word], bound: u32) -> Result<CompletenessVerdict, CompleteError> {
    let rank = tuple.len() as u16;
    let p = Presentation::new(rank, tuple.to_vec())?;

    if rank == 0 {
        return Ok(CompletenessVerdict::CompleteWithWitness(CompletenessWitness {
            conjugated: Vec::new(),
            witnesses: Vec::new(),
        }));
    }

    // Fast path: conjugate-permuted-inverted basis.
    if p.is_trivial() {
        let conjugated: Vec<Word> = tuple.iter().map(|w| w.cyclic_reduce().0).collect();
        let witnesses = vec![Word::identity(); rank as usize];
        let witness = CompletenessWitness { conjugated, witnesses };
        assert!(verify_witness(tuple, &witness), "fast-path witness failed replay");
        return Ok(CompletenessVerdict::CompleteWithWitness(witness));
    }

    let n = rank as usize;
    let bound = bound as usize;
    let words = words_by_length(rank, bound);
    let mut found: Option<CompletenessWitness> = None;
    // Outer loop: conjugator tuples, each entry of length <= bound.
    // Inner loop: witness tuples of total length <= bound.
    for_each_tuple(&words, n, n * bound, bound, &mut |conjugators| {
        let conjugated: Vec<Word> = tuple
            .iter()
            .zip(conjugators)
            .map(|(w, u)| w.conjugate(u))
            .collect();
        let mut inner_found = false;
        for_each_tuple(&words, n, bound, bound, &mut |witnesses| {
            let essential = conjugated
                .iter()
                .zip(witnesses)
                .all(|(a, b)| b.is_empty() || !commutator(a, b).is_empty());
            if !essential {
                return true;
            }
            let pairs: Vec<(Word, Word)> = conjugated
                .iter()
                .cloned()
                .zip(witnesses.iter().cloned())
                .collect();
            if !commutator_product(&pairs).is_empty() {
                return true;
            }
            let mut all: Vec<Word> = conjugated.clone();
            all.extend(witnesses.iter().cloned());
            let graph = fold(&all, rank).expect("words validated against rank");
            if graph.generates_full_group().expect("graph is folded") {
                found = Some(CompletenessWitness {
                    conjugated: conjugated.clone(),
                    witnesses: witnesses.to_vec(),
                });
                inner_found = true;
                return false;
            }
            true
        });
        !inner_found
    });

    match found {
        Some(witness) => {
            assert!(verify_witness(tuple, &witness), "search witness failed replay");
            Ok(CompletenessVerdict::CompleteWithWitness(witness))
        }
        None => Ok(CompletenessVerdict::UnknownWithinBound(bound as u32)),
    }
}

/// Independent replay check of a witness against the original tuple:
/// conjugacy of each entry, trivial commutator product, and full-group
/// generation of the 2n-tuple.
pub fn verify_witness(tuple: &[Word], witness: &CompletenessWitness) -> bool {
    let rank = tuple.len() as u16;
    if witness.conjugated.len() != tuple.len() || witness.witnesses.len() != tuple.len() {
        return false;
    }
    for (original, conj) in tuple.iter().zip(&witness.conjugated) {
        // True conjugacy in F: the cyclically reduced cores are rotations
        // of one another (no inversion quotient here).
        let (core_a, _) = original.cyclic_reduce();
        let (core_b, _) = conj.cyclic_reduce();
        if !rotations_equal(&core_a, &core_b) {
            return false;
        }
    }
    let pairs: Vec<(Word, Word)> = witness
        .conjugated
        .iter()
        .cloned()
        .zip(witness.witnesses.iter().cloned())
        .collect();
    if !commutator_product(&pairs).is_empty() {
        return false;
    }
    let mut all = witness.conjugated.clone();
    all.extend(witness.witnesses.iter().cloned());
    match fold(&all, rank) {
        Ok(graph) => graph.generates_full_group().unwrap_or(false),
        Err(_) => false,
    }
}

/// True when `b` is a cyclic rotation of `a` (equal conjugacy classes
/// without quotienting by inversion).
fn rotations_equal(a: &Word, b: &Word) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let letters = a.letters();
    (0..letters.len()).any(|start| {
        letters[start..]
            .iter()
            .chain(&letters[..start])
            .copied()
            .eq(b.letters().iter().copied())
    })
}

/// Reduced words grouped by exact length, each group sorted in word order.
fn words_by_length(rank: u16, max_len: usize) -> Vec<Vec<Word>> {
    let mut by_len: Vec<Vec<Word>> = vec![vec![Word::identity()]];
    for len in 1..=max_len {
        let mut next = Vec::new();
        for w in &by_len[len - 1] {
            for index in 1..=rank {
                for sign in [Sign::Plus, Sign::Minus] {
                    let l = Letter::new(index, sign);
                    if w.letters().last() == Some(&l.inverse()) {
                        continue;
                    }
                    let mut letters = w.letters().to_vec();
                    letters.push(l);
                    next.push(Word::reduce(letters));
                }
            }
        }
        next.sort();
        by_len.push(next);
    }
    by_len
}

/// Enumerates `n`-tuples of reduced words with total length at most
/// `total_budget` and each entry at most `per_cap` letters, ordered by
/// total length and then lexicographically under the word order. The
/// callback returns `false` to stop early.
fn for_each_tuple(
    words: &[Vec<Word>],
    n: usize,
    total_budget: usize,
    per_cap: usize,
    f: &mut impl FnMut(&[Word]) -> bool,
) -> bool {
    fn fill(
        words: &[Vec<Word>],
        slot: usize,
        n: usize,
        remaining: usize,
        per_cap: usize,
        current: &mut Vec<Word>,
        f: &mut impl FnMut(&[Word]) -> bool,
    ) -> bool {
        if slot == n {
            debug_assert_eq!(remaining, 0);
            return f(current);
        }
        let max_here = remaining.min(per_cap).min(words.len() - 1);
        // Enough capacity must remain for the later slots to absorb the
        // exact total.
        let later_cap = per_cap.saturating_mul(n - slot - 1);
        let min_here = remaining.saturating_sub(later_cap);
        for len in min_here..=max_here {
            for word in &words[len] {
                current.push(word.clone());
                let keep = fill(words, slot + 1, n, remaining - len, per_cap, current, f);
                current.pop();
                if !keep {
                    return false;
                }
            }
        }
        true
    }

    let mut current = Vec::with_capacity(n);
    for total in 0..=total_budget {
        if !fill(words, 0, n, total, per_cap, &mut current, f) {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Necessary condition and the analysis pipeline.
// ---------------------------------------------------------------------------

/// Verdict of the abelianized necessary condition for normal generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnnihilatingVerdict {
    /// `|det| = 1`: the tuple may normally generate (not a proof).
    Pass,
    /// `|det| != 1`: the tuple certainly does not normally generate.
    Fail { determinant: BigInt },
}

pub fn annihilating_necessary(p: &Presentation) -> AnnihilatingVerdict {
    let det = AbelianMatrix::from_presentation(p).determinant();
    if det.magnitude() == &BigUint::from(1u32) {
        AnnihilatingVerdict::Pass
    } else {
        AnnihilatingVerdict::Fail { determinant: det }
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeConfig {
    pub completeness_bound: u32,
    pub search: SearchConfig,
}

/// Aggregated result of the full pipeline. Each field reports exactly what
/// its sub-check proved; in particular `search` is `None` when the
/// determinant obstruction already rules trivialization out.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub rank: u16,
    pub determinant: BigInt,
    pub annihilating: AnnihilatingVerdict,
    pub completeness: CompletenessVerdict,
    pub search: Option<SearchOutcome>,
    pub completeness_bound: u32,
    pub max_relator_len: usize,
    pub max_depth: usize,
    pub max_nodes: u64,
}

impl AnalysisReport {
    /// Stable `key: value` rendering. Wall time is deliberately absent so
    /// reruns are byte-identical.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "rank: {}", self.rank);
        let _ = writeln!(out, "determinant: {}", self.determinant);
        let _ = writeln!(
            out,
            "annihilating: {}",
            match self.annihilating {
                AnnihilatingVerdict::Pass => "pass",
                AnnihilatingVerdict::Fail { .. } => "fail",
            }
        );
        let _ = writeln!(out, "completeness_bound: {}", self.completeness_bound);
        match &self.completeness {
            CompletenessVerdict::CompleteWithWitness(witness) => {
                let _ = writeln!(out, "completeness: complete");
                for (pos, (a, b)) in witness
                    .conjugated
                    .iter()
                    .zip(&witness.witnesses)
                    .enumerate()
                {
                    let _ = writeln!(
                        out,
                        "conjugated_{}: {}",
                        pos + 1,
                        a.format_for_rank(self.rank)
                    );
                    let _ = writeln!(out, "witness_{}: {}", pos + 1, b.format_for_rank(self.rank));
                }
            }
            CompletenessVerdict::UnknownWithinBound(bound) => {
                let _ = writeln!(out, "completeness: unknown_within_bound_{bound}");
            }
        }
        match &self.search {
            None => {
                let _ = writeln!(out, "search: skipped");
            }
            Some(outcome) => {
                let _ = writeln!(out, "search: {}", outcome.class_name());
                let stats = outcome.stats();
                let _ = writeln!(out, "nodes_expanded: {}", stats.nodes_expanded);
                let _ = writeln!(out, "nodes_deduplicated: {}", stats.nodes_deduplicated);
                let _ = writeln!(out, "peak_frontier: {}", stats.peak_frontier);
                if let Some(cert) = outcome.certificate() {
                    let _ = writeln!(out, "certificate_moves: {}", cert.moves.len());
                }
            }
        }
        out
    }
}

/// Runs, in order: the determinant necessary condition, the bounded
/// completeness check, and -- when the determinant does not already rule it
/// out -- the trivialization search.
pub fn analyze(tuple: &[Word], cfg: &AnalyzeConfig) -> Result<AnalysisReport, CompleteError> {
    let rank = tuple.len() as u16;
    let p = Presentation::new(rank, tuple.to_vec())?;
    let determinant = AbelianMatrix::from_presentation(&p).determinant();
    let annihilating = annihilating_necessary(&p);
    let completeness = is_complete_set(tuple, cfg.completeness_bound)?;
    let search = match annihilating {
        AnnihilatingVerdict::Fail { .. } => None,
        AnnihilatingVerdict::Pass => {
            let mut search_cfg = cfg.search.clone();
            if search_cfg.max_relator_len < p.metrics().max_relator_length {
                search_cfg.max_relator_len = p.metrics().max_relator_length;
            }
            Some(search_trivialization(&p, &search_cfg)?)
        }
    };
    Ok(AnalysisReport {
        rank,
        determinant,
        annihilating,
        completeness,
        search,
        completeness_bound: cfg.completeness_bound,
        max_relator_len: cfg.search.max_relator_len,
        max_depth: cfg.search.max_depth,
        max_nodes: cfg.search.max_nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::scramble;

    fn w(text: &str) -> Word {
        Word::parse(text, 26).unwrap()
    }

    #[test]
    fn canonical_trace_examples() {
        assert_eq!(canonical_trace(1), vec![w("x")]);
        assert!(canonical_trace(0).is_empty());
        assert_eq!(
            canonical_trace(3),
            Presentation::trivial(3).relators().to_vec()
        );
    }

    #[test]
    fn canonical_traces_accepted_with_identity_witnesses() {
        for n in 0..=6u16 {
            let verdict = is_complete_set(&canonical_trace(n), 0).unwrap();
            match verdict {
                CompletenessVerdict::CompleteWithWitness(witness) => {
                    assert!(witness.witnesses.iter().all(Word::is_empty));
                    assert!(verify_witness(&canonical_trace(n), &witness));
                }
                other => panic!("rank {n}: expected complete, got {other:?}"),
            }
        }
    }

    #[test]
    fn conjugated_basis_fast_path() {
        let tuple = vec![w("yxY"), w("y")];
        let verdict = is_complete_set(&tuple, 0).unwrap();
        match verdict {
            CompletenessVerdict::CompleteWithWitness(witness) => {
                assert_eq!(witness.conjugated, vec![w("x"), w("y")]);
                assert!(verify_witness(&tuple, &witness));
            }
            other => panic!("expected complete, got {other:?}"),
        }
    }

    #[test]
    fn doubled_basis_stays_unknown_at_bound_two() {
        let tuple = vec![w("xx"), w("yy")];
        assert_eq!(
            is_complete_set(&tuple, 2).unwrap(),
            CompletenessVerdict::UnknownWithinBound(2)
        );
    }

    #[test]
    fn annihilating_examples() {
        let p = |t: &str| Presentation::parse(t).unwrap();
        assert_eq!(annihilating_necessary(&p("x;y")), AnnihilatingVerdict::Pass);
        assert_eq!(
            annihilating_necessary(&p("xx;y")),
            AnnihilatingVerdict::Fail { determinant: BigInt::from(2) }
        );
        assert_eq!(annihilating_necessary(&p("xy;y")), AnnihilatingVerdict::Pass);
    }

    fn analyze_cfg(max_len: usize, depth: usize) -> AnalyzeConfig {
        AnalyzeConfig {
            completeness_bound: 2,
            search: SearchConfig {
                max_relator_len: max_len,
                max_depth: depth,
                ..SearchConfig::default()
            },
        }
    }

    #[test]
    fn analyze_basis() {
        let report = analyze(&[w("x"), w("y")], &analyze_cfg(4, 3)).unwrap();
        assert_eq!(report.annihilating, AnnihilatingVerdict::Pass);
        assert!(report.completeness.is_complete());
        assert!(report.render().contains("search: trivialized"));
        let outcome = report.search.expect("search ran");
        let cert = outcome.certificate().expect("trivialized");
        assert!(cert.moves.is_empty());
    }

    #[test]
    fn analyze_skips_search_on_det_failure() {
        let report = analyze(&[w("xx"), w("y")], &analyze_cfg(4, 3)).unwrap();
        assert_eq!(
            report.annihilating,
            AnnihilatingVerdict::Fail { determinant: BigInt::from(2) }
        );
        assert!(report.search.is_none());
        let text = report.render();
        assert!(text.contains("determinant: 2"));
        assert!(text.contains("annihilating: fail"));
        assert!(text.contains("search: skipped"));
    }

    #[test]
    fn analyze_scrambled_basis() {
        let (pres, _) = scramble(2, 3, 5, 71);
        let cfg = AnalyzeConfig {
            completeness_bound: 1,
            search: SearchConfig {
                max_relator_len: pres.metrics().max_relator_length + 4,
                max_depth: 3,
                ..SearchConfig::default()
            },
        };
        let report = analyze(pres.relators(), &cfg).unwrap();
        assert_eq!(report.annihilating, AnnihilatingVerdict::Pass);
        let outcome = report.search.expect("search ran");
        let cert = outcome.certificate().expect("trivialized");
        assert!(cert.moves.len() <= 3);
    }

    #[test]
    fn witness_verification_rejects_forgeries() {
        let good = match is_complete_set(&[w("yxY"), w("y")], 0).unwrap() {
            CompletenessVerdict::CompleteWithWitness(witness) => witness,
            other => panic!("{other:?}"),
        };
        // Wrong conjugacy class.
        let mut bad = good.clone();
        bad.conjugated[0] = w("y");
        assert!(!verify_witness(&[w("yxY"), w("y")], &bad));
        // Non-generating 2n-tuple.
        let bad = CompletenessWitness {
            conjugated: vec![w("xx"), w("y")],
            witnesses: vec![Word::identity(), Word::identity()],
        };
        assert!(!verify_witness(&[w("xx"), w("y")], &bad));
    }

    #[test]
    fn tuple_enumeration_order() {
        let words = words_by_length(2, 1);
        let mut seen: Vec<Vec<Word>> = Vec::new();
        for_each_tuple(&words, 2, 1, 1, &mut |t| {
            seen.push(t.to_vec());
            true
        });
        // Total 0 first, then total 1 with the shorter word leading.
        assert_eq!(seen[0], vec![Word::identity(), Word::identity()]);
        assert_eq!(seen[1], vec![Word::identity(), w("x")]);
        assert!(seen.contains(&vec![w("y"), Word::identity()]));
        assert_eq!(seen.len(), 1 + 4 + 4);

        // Total length then lex: every total-1 tuple precedes every total-2
        // tuple.
        let words = words_by_length(2, 2);
        let mut totals: Vec<usize> = Vec::new();
        for_each_tuple(&words, 2, 2, 2, &mut |t| {
            totals.push(t.iter().map(Word::len).sum());
            true
        });
        assert!(totals.windows(2).all(|w| w[0] <= w[1]));
    }
}
