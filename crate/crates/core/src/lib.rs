//! Andrews-Curtis toolkit for balanced presentations of free groups.
//!
//! The crate covers the algebra a Heegaard-diagram trace carries: exact
//! free-group words ([`word`]), balanced presentations with canonical
//! forms and conserved abelianized determinants ([`presentation`],
//! [`abelian`]), the elementary Andrews-Curtis move set with handle slides
//! and their decompositions ([`moves`]), a bounded certificate-producing
//! trivialization search with checkpointing ([`search`], [`checkpoint`]),
//! Stallings foldings for subgroup generation tests ([`subgroup`]), and
//! the bounded complete-set checker plus end-to-end analysis pipeline
//! ([`complete`]).
//!
//! All domain values are immutable; every operation returns a new value
//! and is safe to call from any number of threads.

pub mod abelian;
pub mod checkpoint;
pub mod complete;
pub mod gen;
pub mod moves;
pub mod presentation;
pub mod rng;
pub mod search;
pub mod subgroup;
pub mod word;

pub use abelian::AbelianMatrix;
pub use complete::{
    analyze, annihilating_necessary, canonical_trace, is_complete_set, AnalysisReport,
    AnalyzeConfig, AnnihilatingVerdict, CompletenessVerdict, CompletenessWitness,
};
pub use moves::{
    apply_automorphism, apply_move, enumerate_moves, invert_move, macro_moves, replay, slide,
    slide_decomposition, AutomorphismSpec, MacroMove, Move, NielsenAut, SlideSpec,
};
pub use presentation::{CanonicalPresentation, Metrics, Presentation};
pub use search::{
    scramble, search_trivialization, verify_certificate, BfsSearcher, Certificate, IdSearcher,
    SearchConfig, SearchOutcome, SearchStats, Strategy, VerificationReport,
};
pub use subgroup::{fold, SubgroupGraph};
pub use word::{commutator, commutator_product, CyclicWord, Letter, Sign, Word, MAX_RANK};
