//! Bounded, certificate-producing search for Andrews-Curtis trivialization.
//!
//! Edges are the elementary moves in [`crate::moves::enumerate_moves`]
//! order. A child is pruned when any relator exceeds the length cap after
//! reduction, depth counts elementary moves, and the goal test is
//! [`Presentation::is_trivial`]: landing anywhere in the conjugacy class
//! of the trivial presentation counts. Every `Trivialized` outcome is
//! replay-verified before it is returned, so a fingerprint collision in
//! the dedup store can at worst hide states (documented incompleteness),
//! never produce a wrong answer.
//!
//! State identity for dedup quotients by relator *order* only: a permuted
//! presentation admits exactly the permuted moves, so collapsing the two
//! loses no path and no depth. Stronger quotients do not share that
//! property. Two presentations whose relators differ by conjugation have
//! different multiplication children (`r_i * r_j` versus
//! `r_i * c r_j c^-1` land in different conjugacy classes), so deduping a
//! state against a conjugate seen earlier can cut every depth-bounded
//! route to the goal. The full canonical form therefore serves as the
//! goal test and as a reporting normal form, while the visited store keys
//! on the sorted relator words.
//!
//! Single-threaded runs are fully deterministic for a fixed config. With
//! `threads > 1` the frontier is expanded in batches whose results are
//! merged in pop order, which keeps outcomes deterministic in practice;
//! the contract only promises that the outcome class matches the
//! single-threaded run and that any certificate verifies.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use thiserror::Error;

use crate::abelian::AbelianMatrix;
use crate::moves::{self, Move, MoveError, MoveParseError};
use crate::presentation::{ParseError, Presentation};
use crate::rng::SplitMix64;
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    BreadthFirst,
    IterativeDeepening,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::BreadthFirst => write!(f, "breadth_first"),
            Strategy::IterativeDeepening => write!(f, "iterative_deepening"),
        }
    }
}

/// Search budgets and policy. `max_relator_len` must cover the start
/// presentation; `max_nodes` caps expansions.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub max_relator_len: usize,
    pub max_depth: usize,
    pub max_nodes: u64,
    pub strategy: Strategy,
    /// `true`: the visited store keeps full state keys and no state is
    /// ever expanded twice. `false` (default): 128-bit fingerprints;
    /// collisions may prune reachable states but can never yield an
    /// unverified result.
    pub exact_dedup: bool,
    pub threads: usize,
    /// Autosave target; also written when the node budget runs out so the
    /// search can be resumed with a larger budget.
    pub checkpoint_path: Option<PathBuf>,
    /// Expansions between periodic autosaves; 0 saves only on budget
    /// exhaustion.
    pub checkpoint_every: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_relator_len: 0,
            max_depth: 8,
            max_nodes: 1_000_000,
            strategy: Strategy::BreadthFirst,
            exact_dedup: false,
            threads: 1,
            checkpoint_path: None,
            checkpoint_every: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("start presentation has a relator of length {start}, exceeding max_relator_len {cap}")]
    StartTooLong { start: usize, cap: usize },
    #[error("max_nodes must be at least 1")]
    ZeroNodeBudget,
    #[error("thread count must be at least 1")]
    ZeroThreads,
    #[error("checkpoint: {0}")]
    Checkpoint(#[from] crate::checkpoint::CheckpointError),
    #[error("move replay failed: {0}")]
    Move(#[from] MoveError),
}

/// Counters reported with every outcome. `wall_time` accumulates across
/// checkpoint resumes and is the one field that is not deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub nodes_deduplicated: u64,
    pub peak_frontier: u64,
    pub wall_time: Duration,
    /// Set when the determinant short-circuit fired: no trivialization can
    /// exist because `|det|` is conserved by every move and differs from 1.
    pub det_obstruction: Option<BigInt>,
}

/// A replayable witness that `start` transforms into `end` by the listed
/// elementary moves. For a trivialization certificate `end.is_trivial()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub rank: u16,
    pub start: Presentation,
    pub moves: Vec<Move>,
    pub end: Presentation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Trivialized { certificate: Certificate, stats: SearchStats },
    /// Every state within the length and depth bounds was visited without
    /// reaching the goal (or the determinant obstruction fired).
    Exhausted { stats: SearchStats },
    BudgetExceeded { stats: SearchStats },
}

impl SearchOutcome {
    pub fn stats(&self) -> &SearchStats {
        match self {
            SearchOutcome::Trivialized { stats, .. } => stats,
            SearchOutcome::Exhausted { stats } => stats,
            SearchOutcome::BudgetExceeded { stats } => stats,
        }
    }

    fn set_stats(&mut self, new: SearchStats) {
        match self {
            SearchOutcome::Trivialized { stats, .. } => *stats = new,
            SearchOutcome::Exhausted { stats } => *stats = new,
            SearchOutcome::BudgetExceeded { stats } => *stats = new,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            SearchOutcome::Trivialized { certificate, .. } => Some(certificate),
            _ => None,
        }
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            SearchOutcome::Trivialized { .. } => "trivialized",
            SearchOutcome::Exhausted { .. } => "exhausted",
            SearchOutcome::BudgetExceeded { .. } => "budget_exceeded",
        }
    }
}

// ---------------------------------------------------------------------------
// Dedup store.
// ---------------------------------------------------------------------------

/// Relator rows sorted as letter-code strings; `replace` substitutes one
/// row (0-based) before sorting, which is how children are identified
/// without materializing their presentations.
fn sorted_rows<'a>(p: &'a Presentation, replace: Option<(usize, &'a Word)>) -> Vec<&'a Word> {
    let mut order: Vec<&Word> = p.relators().iter().collect();
    if let Some((idx, w)) = replace {
        order[idx] = w;
    }
    order.sort_unstable_by(|a, b| {
        a.letters()
            .iter()
            .map(|l| l.code())
            .cmp(b.letters().iter().map(|l| l.code()))
    });
    order
}

fn serialize_rows(rank: u16, rows: &[&Word]) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 + rows.iter().map(|r| 4 + 2 * r.len()).sum::<usize>());
    out.extend_from_slice(&rank.to_le_bytes());
    for row in rows {
        out.extend_from_slice(&(row.len() as u32).to_le_bytes());
        for l in row.letters() {
            out.extend_from_slice(&l.code().to_le_bytes());
        }
    }
    out
}

/// Streamed FNV over the same byte sequence as [`serialize_rows`]; the two
/// must stay byte-compatible because checkpoint files persist fingerprints
/// (guarded by a unit test).
fn fingerprint_rows(rank: u16, rows: &[&Word]) -> u128 {
    let mut h = Fnv128::new();
    h.write(&rank.to_le_bytes());
    for row in rows {
        h.write(&(row.len() as u32).to_le_bytes());
        for l in row.letters() {
            h.write(&l.code().to_le_bytes());
        }
    }
    h.finish()
}

/// Dedup key: the relator words sorted as letter strings, serialized.
/// Quotients by relator order only; see the module docs for why stronger
/// quotients would break bounded completeness.
pub(crate) fn search_key(p: &Presentation) -> Vec<u8> {
    serialize_rows(p.rank(), &sorted_rows(p, None))
}

/// Allocation-free equivalent of [`Presentation::is_trivial`] on a parent
/// with one relator (0-based) substituted: every relator cyclically
/// reduces to a single letter and the letter indices are pairwise
/// distinct.
fn is_goal_with(p: &Presentation, replace: Option<(usize, &Word)>) -> bool {
    let rank = p.rank();
    if rank > 128 {
        let state = match replace {
            Some((idx, w)) => p.with_relator(idx as u16 + 1, w.clone()),
            None => p.clone(),
        };
        return state.is_trivial();
    }
    let mut mask = 0u128;
    for (pos, r) in p.relators().iter().enumerate() {
        let row = match replace {
            Some((idx, w)) if idx == pos => w,
            _ => r,
        };
        let core = row.cyclic_core();
        if core.len() != 1 {
            return false;
        }
        let bit = 1u128 << (core[0].index() - 1);
        if mask & bit != 0 {
            return false;
        }
        mask |= bit;
    }
    true
}

fn is_goal(p: &Presentation) -> bool {
    is_goal_with(p, None)
}

/// FNV-1a widened to 128 bits; stable across platforms and releases, which
/// checkpoint files rely on.
struct Fnv128(u128);

impl Fnv128 {
    const OFFSET: u128 = 0x6c62272e07bb014262b821756295c58d;
    const PRIME: u128 = 0x0000000001000000000000000000013b;

    fn new() -> Fnv128 {
        Fnv128(Self::OFFSET)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u128;
            self.0 = self.0.wrapping_mul(Self::PRIME);
        }
    }

    fn finish(&self) -> u128 {
        self.0
    }
}


/// Per-state identity in the mode the visited store runs in.
enum DedupToken {
    Exact(Vec<u8>),
    Fingerprint(u128),
}

fn dedup_token(p: &Presentation, replace: Option<(usize, &Word)>, exact: bool) -> DedupToken {
    let rows = sorted_rows(p, replace);
    if exact {
        DedupToken::Exact(serialize_rows(p.rank(), &rows))
    } else {
        DedupToken::Fingerprint(fingerprint_rows(p.rank(), &rows))
    }
}

#[derive(Debug, Clone)]
pub(crate) enum VisitedSet {
    Exact(HashSet<Vec<u8>>),
    Fingerprint(HashSet<u128>),
}

impl VisitedSet {
    fn new(exact: bool) -> VisitedSet {
        if exact {
            VisitedSet::Exact(HashSet::new())
        } else {
            VisitedSet::Fingerprint(HashSet::new())
        }
    }

    /// True if the state was new. Tokens always match the store's mode.
    fn insert(&mut self, token: DedupToken) -> bool {
        match (self, token) {
            (VisitedSet::Exact(set), DedupToken::Exact(key)) => set.insert(key),
            (VisitedSet::Fingerprint(set), DedupToken::Fingerprint(fp)) => set.insert(fp),
            _ => unreachable!("dedup token mode mismatch"),
        }
    }
}

// ---------------------------------------------------------------------------
// Breadth-first searcher.
// ---------------------------------------------------------------------------

pub(crate) struct NodeRecord {
    pub(crate) parent: u32,
    pub(crate) step: Option<Move>,
}

pub(crate) struct FrontierEntry {
    pub(crate) node: u32,
    pub(crate) depth: u32,
    pub(crate) state: Presentation,
}

/// Explicit BFS state machine; [`run`](BfsSearcher::run) drives it to an
/// outcome, and checkpointing snapshots/restores it mid-flight.
pub struct BfsSearcher {
    pub(crate) cfg: SearchConfig,
    pub(crate) start: Presentation,
    pub(crate) arena: Vec<NodeRecord>,
    pub(crate) frontier: VecDeque<FrontierEntry>,
    pub(crate) visited: VisitedSet,
    pub(crate) stats: SearchStats,
    pub(crate) finished: Option<SearchOutcome>,
    #[cfg(debug_assertions)]
    expanded_keys: HashSet<Vec<u8>>,
}

impl BfsSearcher {
    pub fn new(start: &Presentation, cfg: &SearchConfig) -> Result<BfsSearcher, SearchError> {
        validate_config(start, cfg)?;
        let mut searcher = BfsSearcher {
            cfg: cfg.clone(),
            start: start.clone(),
            arena: vec![NodeRecord { parent: u32::MAX, step: None }],
            frontier: VecDeque::new(),
            visited: VisitedSet::new(cfg.exact_dedup),
            stats: SearchStats::default(),
            finished: None,
            #[cfg(debug_assertions)]
            expanded_keys: HashSet::new(),
        };
        searcher.seed();
        Ok(searcher)
    }

    /// Goal/obstruction handling for the start state and initial enqueue.
    fn seed(&mut self) {
        let token = dedup_token(&self.start, None, self.cfg.exact_dedup);
        self.visited.insert(token);
        if is_goal(&self.start) {
            self.finished = Some(SearchOutcome::Trivialized {
                certificate: Certificate {
                    rank: self.start.rank(),
                    start: self.start.clone(),
                    moves: Vec::new(),
                    end: self.start.clone(),
                },
                stats: self.stats.clone(),
            });
            return;
        }
        let det = AbelianMatrix::from_presentation(&self.start).determinant();
        if det.magnitude() != &num_bigint::BigUint::from(1u32) {
            self.stats.det_obstruction = Some(det);
            self.finished = Some(SearchOutcome::Exhausted { stats: self.stats.clone() });
            return;
        }
        if self.cfg.max_depth > 0 {
            self.frontier.push_back(FrontierEntry {
                node: 0,
                depth: 0,
                state: self.start.clone(),
            });
            self.stats.peak_frontier = 1;
        } else {
            self.finished = Some(SearchOutcome::Exhausted { stats: self.stats.clone() });
        }
    }

    /// Reassembles a searcher from checkpointed parts; the loader has
    /// already validated them.
    pub(crate) fn from_checkpoint_parts(
        cfg: SearchConfig,
        start: Presentation,
        arena: Vec<NodeRecord>,
        frontier: VecDeque<FrontierEntry>,
        visited: VisitedSet,
        stats: SearchStats,
    ) -> BfsSearcher {
        BfsSearcher {
            cfg,
            start,
            arena,
            frontier,
            visited,
            stats,
            finished: None,
            #[cfg(debug_assertions)]
            expanded_keys: HashSet::new(),
        }
    }

    pub fn is_finished(&self) -> bool {
        self.finished.is_some()
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    /// Expands one batch of frontier nodes (at most `threads` of them).
    /// Returns the outcome once the search is decided.
    pub fn step_batch(&mut self) -> Option<SearchOutcome> {
        if let Some(outcome) = &self.finished {
            return Some(outcome.clone());
        }
        let started = Instant::now();
        let result = self.step_batch_inner();
        self.stats.wall_time += started.elapsed();
        result.map(|mut outcome| {
            outcome.set_stats(self.stats.clone());
            self.finished = Some(outcome.clone());
            outcome
        })
    }

    fn step_batch_inner(&mut self) -> Option<SearchOutcome> {
        if self.frontier.is_empty() {
            return Some(SearchOutcome::Exhausted { stats: self.stats.clone() });
        }
        if self.stats.nodes_expanded >= self.cfg.max_nodes {
            return Some(SearchOutcome::BudgetExceeded { stats: self.stats.clone() });
        }
        let budget_left = (self.cfg.max_nodes - self.stats.nodes_expanded) as usize;
        // Oversize parallel batches so thread spawns amortize; the merge
        // below runs in pop order either way, so the schedule stays the one
        // a single thread would produce.
        let want = if self.cfg.threads == 1 { 1 } else { self.cfg.threads * 16 };
        let batch_size = want.min(self.frontier.len()).min(budget_left).max(1);
        let mut batch = Vec::with_capacity(batch_size);
        for _ in 0..batch_size {
            match self.frontier.pop_front() {
                Some(e) => batch.push(e),
                None => break,
            }
        }

        let cap = self.cfg.max_relator_len;
        let exact = self.cfg.exact_dedup;
        let move_table = moves::enumerate_moves(&self.start);
        let expanded: Vec<Vec<Child>> = if batch.len() > 1 {
            let chunk = batch.len().div_ceil(self.cfg.threads);
            std::thread::scope(|scope| {
                let handles: Vec<_> = batch
                    .chunks(chunk)
                    .map(|entries| {
                        let move_table = &move_table;
                        scope.spawn(move || {
                            entries
                                .iter()
                                .map(|e| expand(&e.state, cap, exact, move_table))
                                .collect::<Vec<_>>()
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .flat_map(|h| h.join().expect("worker panicked"))
                    .collect()
            })
        } else {
            batch
                .iter()
                .map(|entry| expand(&entry.state, cap, exact, &move_table))
                .collect()
        };

        for (entry, children) in batch.iter().zip(expanded) {
            self.stats.nodes_expanded += 1;
            #[cfg(debug_assertions)]
            if matches!(self.visited, VisitedSet::Exact(_)) {
                debug_assert!(
                    self.expanded_keys.insert(search_key(&entry.state)),
                    "state expanded twice under exact dedup"
                );
            }
            let depth = entry.depth + 1;
            for child in children {
                if !self.visited.insert(child.token) {
                    self.stats.nodes_deduplicated += 1;
                    continue;
                }
                if child.goal {
                    let node = self.arena.len() as u32;
                    self.arena.push(NodeRecord { parent: entry.node, step: Some(child.step) });
                    let state = entry.state.with_relator(child.step.target(), child.relator);
                    let certificate = self.certificate_for(node, state);
                    // Goals are always confirmed by replay before being
                    // reported, so dedup fingerprint collisions can hide
                    // states but never forge a result.
                    let audit = verify_certificate(&certificate);
                    assert!(
                        audit.pass && audit.end_is_trivial,
                        "internal error: unverifiable certificate\n{}",
                        audit.render()
                    );
                    return Some(SearchOutcome::Trivialized {
                        certificate,
                        stats: self.stats.clone(),
                    });
                }
                // Depth-capped children stay visited-marked but are never
                // expanded, so they need neither a presentation nor an
                // arena node.
                if (depth as usize) < self.cfg.max_depth {
                    let node = self.arena.len() as u32;
                    self.arena.push(NodeRecord { parent: entry.node, step: Some(child.step) });
                    let state = entry.state.with_relator(child.step.target(), child.relator);
                    self.frontier.push_back(FrontierEntry { node, depth, state });
                    self.stats.peak_frontier =
                        self.stats.peak_frontier.max(self.frontier.len() as u64);
                }
            }
        }

        if self.frontier.is_empty() {
            return Some(SearchOutcome::Exhausted { stats: self.stats.clone() });
        }
        None
    }

    /// Path of moves from the root to `node`.
    pub(crate) fn path_to(&self, node: u32) -> Vec<Move> {
        let mut moves = Vec::new();
        let mut cur = node;
        while cur != 0 {
            let record = &self.arena[cur as usize];
            moves.push(record.step.expect("non-root nodes carry a move"));
            cur = record.parent;
        }
        moves.reverse();
        moves
    }

    fn certificate_for(&self, node: u32, end: Presentation) -> Certificate {
        Certificate {
            rank: self.start.rank(),
            start: self.start.clone(),
            moves: self.path_to(node),
            end,
        }
    }

    /// Runs to completion, autosaving per config.
    pub fn run(&mut self) -> Result<SearchOutcome, SearchError> {
        self.run_with_progress(0, |_, _| {})
    }

    /// Runs with a progress callback invoked roughly every
    /// `progress_every` expansions; used by the CLI to stream stats.
    pub fn run_with_progress(
        &mut self,
        progress_every: u64,
        mut on_progress: impl FnMut(&SearchStats, usize),
    ) -> Result<SearchOutcome, SearchError> {
        let mut since_report = 0u64;
        let mut since_save = 0u64;
        loop {
            let before = self.stats.nodes_expanded;
            if let Some(outcome) = self.step_batch() {
                // Leave a resumable file behind only when resuming makes
                // sense: a bigger node budget can continue the search.
                if let Some(path) = self.cfg.checkpoint_path.clone() {
                    if matches!(outcome, SearchOutcome::BudgetExceeded { .. }) {
                        self.save_checkpoint(&path)?;
                    }
                }
                return Ok(outcome);
            }
            let delta = self.stats.nodes_expanded - before;
            if progress_every > 0 {
                since_report += delta;
                if since_report >= progress_every {
                    on_progress(&self.stats, self.frontier.len());
                    since_report = 0;
                }
            }
            if let Some(path) = self.cfg.checkpoint_path.clone() {
                if self.cfg.checkpoint_every > 0 {
                    since_save += delta;
                    if since_save >= self.cfg.checkpoint_every {
                        self.save_checkpoint(&path)?;
                        since_save = 0;
                    }
                }
            }
        }
    }

    /// Raises the expansion budget, the one config change that is sound on
    /// a resumed search.
    pub fn raise_node_budget(&mut self, max_nodes: u64) {
        if max_nodes > self.cfg.max_nodes {
            self.cfg.max_nodes = max_nodes;
            if matches!(self.finished, Some(SearchOutcome::BudgetExceeded { .. }))
                && !self.frontier.is_empty()
            {
                self.finished = None;
            }
        }
    }

    pub fn set_threads(&mut self, threads: usize) {
        self.cfg.threads = threads.max(1);
    }

    pub fn set_checkpoint_policy(&mut self, path: Option<PathBuf>, every: u64) {
        self.cfg.checkpoint_path = path;
        self.cfg.checkpoint_every = every;
    }

    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }
}

fn validate_config(start: &Presentation, cfg: &SearchConfig) -> Result<(), SearchError> {
    if cfg.max_nodes == 0 {
        return Err(SearchError::ZeroNodeBudget);
    }
    if cfg.threads == 0 {
        return Err(SearchError::ZeroThreads);
    }
    let start_max = start.metrics().max_relator_length;
    if start_max > cfg.max_relator_len {
        return Err(SearchError::StartTooLong {
            start: start_max,
            cap: cfg.max_relator_len,
        });
    }
    Ok(())
}

/// A surviving child, identified by its move and the one relator that
/// move rewrote. The full presentation is materialized only after dedup,
/// which skips the cloning cost for the duplicate majority.
struct Child {
    step: Move,
    relator: Word,
    token: DedupToken,
    goal: bool,
}

/// All surviving children of one state: applies every legal move, prunes
/// by the relator length cap, and pairs each child with its dedup token
/// and goal flag. The move table depends only on the rank, so callers pass
/// it in rather than rebuilding it per node.
fn expand(state: &Presentation, cap: usize, exact: bool, move_table: &[Move]) -> Vec<Child> {
    move_table
        .iter()
        .filter_map(|mv| {
            let relator = moves::rewritten_relator(state, mv);
            // Only the rewritten relator can exceed the cap; the rest were
            // within it in the parent.
            if relator.len() > cap {
                return None;
            }
            let replace = Some((mv.target() as usize - 1, &relator));
            Some(Child {
                step: *mv,
                token: dedup_token(state, replace, exact),
                goal: is_goal_with(state, replace),
                relator,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Iterative deepening.
// ---------------------------------------------------------------------------

/// Depth-first search with a hard depth limit, restarted with limits
/// `0..=max_depth`. States carry the shallowest depth at which they were
/// seen in the current iteration and are re-expanded when reached more
/// shallowly, which keeps the strategy complete within the bounds.
pub struct IdSearcher {
    cfg: SearchConfig,
    start: Presentation,
    pub(crate) current_limit: u32,
    pub(crate) stats: SearchStats,
}

impl IdSearcher {
    pub fn new(start: &Presentation, cfg: &SearchConfig) -> Result<IdSearcher, SearchError> {
        validate_config(start, cfg)?;
        Ok(IdSearcher {
            cfg: cfg.clone(),
            start: start.clone(),
            current_limit: 0,
            stats: SearchStats::default(),
        })
    }

    pub(crate) fn resume_at(start: Presentation, cfg: SearchConfig, limit: u32, stats: SearchStats) -> IdSearcher {
        IdSearcher { cfg, start, current_limit: limit, stats }
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }

    pub(crate) fn start(&self) -> &Presentation {
        &self.start
    }

    pub fn run(&mut self) -> Result<SearchOutcome, SearchError> {
        let started = Instant::now();
        let result = self.run_inner();
        self.stats.wall_time += started.elapsed();
        // Attach final timing.
        Ok(match result? {
            SearchOutcome::Trivialized { certificate, .. } => SearchOutcome::Trivialized {
                certificate,
                stats: self.stats.clone(),
            },
            SearchOutcome::Exhausted { .. } => SearchOutcome::Exhausted { stats: self.stats.clone() },
            SearchOutcome::BudgetExceeded { .. } => {
                SearchOutcome::BudgetExceeded { stats: self.stats.clone() }
            }
        })
    }

    fn run_inner(&mut self) -> Result<SearchOutcome, SearchError> {
        if is_goal(&self.start) {
            return Ok(SearchOutcome::Trivialized {
                certificate: Certificate {
                    rank: self.start.rank(),
                    start: self.start.clone(),
                    moves: Vec::new(),
                    end: self.start.clone(),
                },
                stats: self.stats.clone(),
            });
        }
        let det = AbelianMatrix::from_presentation(&self.start).determinant();
        if det.magnitude() != &num_bigint::BigUint::from(1u32) {
            self.stats.det_obstruction = Some(det);
            return Ok(SearchOutcome::Exhausted { stats: self.stats.clone() });
        }
        // Iterative deepening persists only the depth counter; save at
        // each iteration boundary when a checkpoint target is configured.
        while (self.current_limit as usize) <= self.cfg.max_depth {
            if let Some(path) = self.cfg.checkpoint_path.clone() {
                self.save_checkpoint(&path)?;
            }
            let mut best_depth: std::collections::HashMap<u128, u32> = Default::default();
            let mut path: Vec<Move> = Vec::new();
            match self.dfs(&self.start.clone(), 0, &mut best_depth, &mut path) {
                DfsResult::Found(end) => {
                    let certificate = Certificate {
                        rank: self.start.rank(),
                        start: self.start.clone(),
                        moves: path,
                        end,
                    };
                    let audit = verify_certificate(&certificate);
                    assert!(
                        audit.pass && audit.end_is_trivial,
                        "internal error: unverifiable certificate\n{}",
                        audit.render()
                    );
                    return Ok(SearchOutcome::Trivialized {
                        certificate,
                        stats: self.stats.clone(),
                    });
                }
                DfsResult::Budget => {
                    return Ok(SearchOutcome::BudgetExceeded { stats: self.stats.clone() })
                }
                DfsResult::NotFound => {}
            }
            self.current_limit += 1;
        }
        Ok(SearchOutcome::Exhausted { stats: self.stats.clone() })
    }

    fn dfs(
        &mut self,
        state: &Presentation,
        depth: u32,
        best_depth: &mut std::collections::HashMap<u128, u32>,
        path: &mut Vec<Move>,
    ) -> DfsResult {
        if depth >= self.current_limit {
            return DfsResult::NotFound;
        }
        if self.stats.nodes_expanded >= self.cfg.max_nodes {
            return DfsResult::Budget;
        }
        self.stats.nodes_expanded += 1;
        self.stats.peak_frontier = self
            .stats
            .peak_frontier
            .max(path.len() as u64 + 1);
        let move_table = moves::enumerate_moves(state);
        for child in expand(state, self.cfg.max_relator_len, false, &move_table) {
            if child.goal {
                path.push(child.step);
                return DfsResult::Found(state.with_relator(child.step.target(), child.relator));
            }
            let DedupToken::Fingerprint(fp) = child.token else {
                unreachable!("depth-first search always fingerprints");
            };
            match best_depth.get(&fp) {
                Some(&seen) if seen <= depth + 1 => {
                    self.stats.nodes_deduplicated += 1;
                    continue;
                }
                _ => {
                    best_depth.insert(fp, depth + 1);
                }
            }
            path.push(child.step);
            let next = state.with_relator(child.step.target(), child.relator);
            match self.dfs(&next, depth + 1, best_depth, path) {
                DfsResult::NotFound => {
                    path.pop();
                }
                found => return found,
            }
        }
        DfsResult::NotFound
    }
}

enum DfsResult {
    Found(Presentation),
    NotFound,
    Budget,
}

/// Entry point selecting the configured strategy.
pub fn search_trivialization(
    p: &Presentation,
    cfg: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    match cfg.strategy {
        Strategy::BreadthFirst => BfsSearcher::new(p, cfg)?.run(),
        Strategy::IterativeDeepening => IdSearcher::new(p, cfg)?.run(),
    }
}

// ---------------------------------------------------------------------------
// Scramble: solvable instances with a known solution length.
// ---------------------------------------------------------------------------

/// Applies `k` random moves to the trivial presentation, rejecting a move
/// that would push a relator past `max_len` or that immediately undoes the
/// previous move. Returns the scrambled presentation and the generating
/// certificate; replaying the inverted moves in reverse order is a
/// solution, so the instance is trivializable in at most `k` moves through
/// intermediate presentations no longer than `max_len`. A search is
/// guaranteed to find that solution only when its own length cap is at
/// least `max_len`.
pub fn scramble(rank: u16, k: usize, max_len: usize, seed: u64) -> (Presentation, Certificate) {
    assert!(rank >= 1, "scramble needs rank >= 1");
    assert!(max_len >= 1);
    let mut rng = SplitMix64::new(seed);
    let start = Presentation::trivial(rank);
    let mut state = start.clone();
    let mut applied: Vec<Move> = Vec::with_capacity(k);
    let all_moves = moves::enumerate_moves(&start);
    let mut prev: Option<Move> = None;
    for _ in 0..k {
        // Every rank >= 1 presentation has a legal non-undoing move within
        // any cap >= 1 (some Invert or a no-op conjugation), so this loop
        // terminates; the attempt bound is a tripwire, not a policy.
        let mut attempts = 0u32;
        loop {
            attempts += 1;
            assert!(attempts < 100_000, "no legal scramble move found");
            let mv = all_moves[rng.below(all_moves.len() as u64) as usize];
            if prev.map(|p| invert_eq(&mv, &p)).unwrap_or(false) {
                continue;
            }
            let child = moves::apply_move(&state, &mv).expect("enumerated moves are valid");
            if child.metrics().max_relator_length > max_len {
                continue;
            }
            state = child;
            applied.push(mv);
            prev = Some(mv);
            break;
        }
    }
    let certificate = Certificate {
        rank,
        start,
        moves: applied,
        end: state.clone(),
    };
    (state, certificate)
}

fn invert_eq(a: &Move, b: &Move) -> bool {
    *a == moves::invert_move(b)
}

// ---------------------------------------------------------------------------
// Certificate verification and text format.
// ---------------------------------------------------------------------------

/// Replay audit of a certificate. Verification trusts nothing: every move
/// is validity-checked against the current state, and both the claimed end
/// and its triviality are re-derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub pass: bool,
    pub steps_applied: usize,
    /// 1-based index of the move that failed to apply, if any.
    pub failed_step: Option<usize>,
    pub failure: Option<String>,
    pub end_matches: bool,
    pub end_is_trivial: bool,
}

impl VerificationReport {
    /// Stable `key: value` rendering for scripting.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("pass: {}\n", self.pass));
        out.push_str(&format!("steps_applied: {}\n", self.steps_applied));
        match self.failed_step {
            Some(step) => out.push_str(&format!("failed_step: {step}\n")),
            None => out.push_str("failed_step: none\n"),
        }
        if let Some(failure) = &self.failure {
            out.push_str(&format!("error: {failure}\n"));
        }
        out.push_str(&format!("end_matches: {}\n", self.end_matches));
        out.push_str(&format!("end_trivial: {}\n", self.end_is_trivial));
        out
    }
}

pub fn verify_certificate(c: &Certificate) -> VerificationReport {
    let mut report = VerificationReport {
        pass: false,
        steps_applied: 0,
        failed_step: None,
        failure: None,
        end_matches: false,
        end_is_trivial: false,
    };
    if c.start.rank() != c.rank || c.end.rank() != c.rank {
        report.failure = Some(format!(
            "rank mismatch: header {}, start {}, end {}",
            c.rank,
            c.start.rank(),
            c.end.rank()
        ));
        return report;
    }
    let mut state = c.start.clone();
    for (pos, mv) in c.moves.iter().enumerate() {
        match moves::apply_move(&state, mv) {
            Ok(next) => {
                state = next;
                report.steps_applied += 1;
            }
            Err(e) => {
                report.failed_step = Some(pos + 1);
                report.failure = Some(format!("move {mv} rejected: {e}"));
                return report;
            }
        }
    }
    report.end_matches = state == c.end;
    report.end_is_trivial = state.is_trivial();
    if !report.end_matches {
        report.failure = Some(format!(
            "replay ends at {:?}, certificate claims {:?}",
            state, c.end
        ));
        return report;
    }
    report.pass = true;
    report
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateParseError {
    #[error("line 1: expected header `ACCERT 1`")]
    BadHeader,
    #[error("unsupported certificate version {0}")]
    BadVersion(String),
    #[error("line {line}: expected `{expected}`")]
    Expected { line: usize, expected: &'static str },
    #[error("line {line}: {source}")]
    Presentation { line: usize, source: ParseError },
    #[error("line {line}: {source}")]
    Move { line: usize, source: MoveParseError },
    #[error("missing `end` line")]
    MissingEnd,
    #[error("certificate body rank {found} does not match header rank {header}")]
    RankMismatch { header: u16, found: u16 },
}

impl Certificate {
    /// Text form:
    ///
    /// ```text
    /// ACCERT 1
    /// rank 2
    /// start xy;y
    /// R 1 2 -1
    /// end x;y
    /// ```
    pub fn format(&self) -> String {
        let keyword_line = |keyword: &str, p: &Presentation| {
            let body = p.format_single_line();
            if body.is_empty() {
                format!("{keyword}\n")
            } else {
                format!("{keyword} {body}\n")
            }
        };
        let mut out = String::from("ACCERT 1\n");
        out.push_str(&format!("rank {}\n", self.rank));
        out.push_str(&keyword_line("start", &self.start));
        for mv in &self.moves {
            out.push_str(&format!("{mv}\n"));
        }
        out.push_str(&keyword_line("end", &self.end));
        out
    }

    pub fn parse(text: &str) -> Result<Certificate, CertificateParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(idx, l)| (idx + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (_, header) = lines.next().ok_or(CertificateParseError::BadHeader)?;
        match header.strip_prefix("ACCERT") {
            Some(version) if version.trim() == "1" => {}
            Some(version) => {
                return Err(CertificateParseError::BadVersion(version.trim().to_string()))
            }
            None => return Err(CertificateParseError::BadHeader),
        }

        let (rank_line, rank_text) = lines
            .next()
            .ok_or(CertificateParseError::Expected { line: 2, expected: "rank <n>" })?;
        let rank: u16 = rank_text
            .strip_prefix("rank")
            .and_then(|r| r.trim().parse().ok())
            .ok_or(CertificateParseError::Expected {
                line: rank_line,
                expected: "rank <n>",
            })?;

        let (start_line, start_text) = lines
            .next()
            .ok_or(CertificateParseError::Expected { line: 3, expected: "start <presentation>" })?;
        let start_body = start_text.strip_prefix("start").ok_or(
            CertificateParseError::Expected {
                line: start_line,
                expected: "start <presentation>",
            },
        )?;
        let start = parse_single_line_rank(start_body, rank, start_line)?;

        let mut moves = Vec::new();
        let mut end = None;
        for (line_no, line) in lines {
            if let Some(end_body) = line.strip_prefix("end") {
                end = Some(parse_single_line_rank(end_body, rank, line_no)?);
                continue;
            }
            if end.is_some() {
                return Err(CertificateParseError::Expected {
                    line: line_no,
                    expected: "no content after `end`",
                });
            }
            let mv = Move::parse(line)
                .map_err(|source| CertificateParseError::Move { line: line_no, source })?;
            moves.push(mv);
        }
        let end = end.ok_or(CertificateParseError::MissingEnd)?;
        Ok(Certificate { rank, start, moves, end })
    }
}

fn parse_single_line_rank(
    body: &str,
    rank: u16,
    line: usize,
) -> Result<Presentation, CertificateParseError> {
    let trimmed = body.trim();
    let p = if trimmed.is_empty() {
        Presentation::trivial(0)
    } else {
        Presentation::parse_single_line(trimmed, line)
            .map_err(|source| CertificateParseError::Presentation { line, source })?
    };
    if p.rank() != rank {
        return Err(CertificateParseError::RankMismatch {
            header: rank,
            found: p.rank(),
        });
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::Move;
    use crate::word::Sign;

    fn p(text: &str) -> Presentation {
        Presentation::parse(text).unwrap()
    }

    fn cfg(max_len: usize, max_depth: usize) -> SearchConfig {
        SearchConfig {
            max_relator_len: max_len,
            max_depth,
            max_nodes: 1_000_000,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn trivial_input_needs_no_moves() {
        let outcome = search_trivialization(&p("x;y"), &cfg(1, 4)).unwrap();
        let cert = outcome.certificate().expect("trivialized");
        assert!(cert.moves.is_empty());
        assert_eq!(cert.start, cert.end);
        assert_eq!(outcome.stats().nodes_expanded, 0);
    }

    #[test]
    fn one_move_instance() {
        let outcome = search_trivialization(&p("xy;y"), &cfg(2, 1)).unwrap();
        let cert = outcome.certificate().expect("trivialized");
        assert_eq!(
            cert.moves,
            vec![Move::RightMultiply { relator: 1, by: 2, sign: Sign::Minus }]
        );
        assert!(verify_certificate(cert).pass);
    }

    #[test]
    fn det_obstruction_short_circuits() {
        let outcome = search_trivialization(&p("xx;y"), &cfg(2, 6)).unwrap();
        match outcome {
            SearchOutcome::Exhausted { stats } => {
                assert_eq!(stats.nodes_expanded, 0);
                assert_eq!(stats.det_obstruction, Some(BigInt::from(2)));
            }
            other => panic!("expected Exhausted, got {other:?}"),
        }
    }

    #[test]
    fn start_beyond_cap_is_rejected() {
        assert!(matches!(
            search_trivialization(&p("xyxy;y"), &cfg(3, 2)),
            Err(SearchError::StartTooLong { start: 4, cap: 3 })
        ));
    }

    #[test]
    fn exhaustion_within_bounds() {
        // Depth 1 cannot solve a distance-2 instance.
        let start = p("xyy;y");
        let outcome = search_trivialization(&start, &cfg(3, 1)).unwrap();
        assert!(matches!(outcome, SearchOutcome::Exhausted { .. }));
        let outcome = search_trivialization(&start, &cfg(3, 2)).unwrap();
        assert!(matches!(outcome, SearchOutcome::Trivialized { .. }));
    }

    #[test]
    fn budget_exceeded_reports() {
        // Distance two from trivial, so one expansion cannot reach the goal.
        let outcome = search_trivialization(
            &p("xyy;y"),
            &SearchConfig {
                max_relator_len: 3,
                max_depth: 5,
                max_nodes: 1,
                ..SearchConfig::default()
            },
        )
        .unwrap();
        match outcome {
            SearchOutcome::BudgetExceeded { stats } => assert_eq!(stats.nodes_expanded, 1),
            other => panic!("expected BudgetExceeded, got {other:?}"),
        }
    }

    #[test]
    fn scramble_examples() {
        let (pres, cert) = scramble(2, 0, 4, 7);
        assert_eq!(pres, Presentation::trivial(2));
        assert!(cert.moves.is_empty());

        let (pres, cert) = scramble(2, 1, 4, 7);
        assert_eq!(cert.moves.len(), 1);
        assert_eq!(moves::replay(&cert.start, &cert.moves).unwrap(), pres);
        // Distance at most one from trivial.
        let outcome = search_trivialization(
            &pres,
            &cfg(pres.metrics().max_relator_length.max(1) + 4, 1),
        )
        .unwrap();
        assert!(matches!(outcome, SearchOutcome::Trivialized { .. }));
    }

    #[test]
    fn scramble_inversion_solves() {
        for seed in 0..20 {
            let (pres, cert) = scramble(3, 5, 8, seed);
            assert!(verify_certificate(&cert).pass);
            assert_eq!(cert.end, pres);
            // Replay the inverted moves in reverse: must land on trivial.
            let inverted: Vec<Move> =
                cert.moves.iter().rev().map(moves::invert_move).collect();
            let back = moves::replay(&pres, &inverted).unwrap();
            assert_eq!(back, Presentation::trivial(3));
        }
    }

    #[test]
    fn scramble_is_seed_deterministic() {
        assert_eq!(scramble(2, 6, 8, 41), scramble(2, 6, 8, 41));
        assert_ne!(scramble(2, 6, 8, 41).0, scramble(2, 6, 8, 42).0);
    }

    #[test]
    fn verify_detects_tampering() {
        let (_, cert) = scramble(2, 3, 6, 9);
        assert!(verify_certificate(&cert).pass);

        // Out-of-range index fails at that step.
        let mut bad = cert.clone();
        bad.moves[1] = Move::Invert { relator: 9 };
        let report = verify_certificate(&bad);
        assert!(!report.pass);
        assert_eq!(report.failed_step, Some(2));

        // Correct moves, wrong claimed end.
        let mut bad = cert.clone();
        bad.end = Presentation::trivial(2);
        let report = verify_certificate(&bad);
        assert!(!report.pass);
        assert!(!report.end_matches);
        assert!(report.failed_step.is_none());
    }

    #[test]
    fn certificate_text_roundtrip() {
        let (_, cert) = scramble(3, 4, 8, 10);
        let text = cert.format();
        assert_eq!(Certificate::parse(&text).unwrap(), cert);

        // Rank-0 certificates survive the trip too.
        let cert0 = Certificate {
            rank: 0,
            start: Presentation::trivial(0),
            moves: vec![],
            end: Presentation::trivial(0),
        };
        assert_eq!(Certificate::parse(&cert0.format()).unwrap(), cert0);

        assert!(Certificate::parse("ACCERT 2\nrank 0\nstart\nend").is_err());
        assert!(Certificate::parse("rank 0\nstart\nend").is_err());
        let mangled = text.replace("R ", "Q ");
        if mangled != text {
            assert!(Certificate::parse(&mangled).is_err());
        }
    }

    #[test]
    fn iterative_deepening_agrees_with_bfs() {
        for seed in 0..10 {
            let (pres, _) = scramble(2, 3, 5, 100 + seed);
            let bfs = search_trivialization(
                &pres,
                &SearchConfig {
                    max_relator_len: pres.metrics().max_relator_length + 4,
                    max_depth: 3,
                    ..SearchConfig::default()
                },
            )
            .unwrap();
            let id = search_trivialization(
                &pres,
                &SearchConfig {
                    max_relator_len: pres.metrics().max_relator_length + 4,
                    max_depth: 3,
                    strategy: Strategy::IterativeDeepening,
                    ..SearchConfig::default()
                },
            )
            .unwrap();
            assert_eq!(bfs.class_name(), id.class_name(), "seed {seed}");
            if let Some(cert) = id.certificate() {
                assert!(verify_certificate(cert).pass);
                assert!(cert.moves.len() <= 3);
            }
        }
    }

    #[test]
    fn exact_and_fingerprint_agree() {
        for seed in 0..10 {
            let (pres, _) = scramble(2, 4, 5, 200 + seed);
            let base = SearchConfig {
                max_relator_len: pres.metrics().max_relator_length + 4,
                max_depth: 4,
                ..SearchConfig::default()
            };
            let fp = search_trivialization(&pres, &base).unwrap();
            let exact = search_trivialization(
                &pres,
                &SearchConfig { exact_dedup: true, ..base },
            )
            .unwrap();
            assert_eq!(fp.class_name(), exact.class_name());
            assert_eq!(
                fp.stats().nodes_expanded,
                exact.stats().nodes_expanded,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn parallel_outcome_class_matches() {
        for seed in 0..6 {
            let (pres, _) = scramble(3, 4, 5, 300 + seed);
            let base = SearchConfig {
                max_relator_len: pres.metrics().max_relator_length + 4,
                max_depth: 4,
                ..SearchConfig::default()
            };
            let single = search_trivialization(&pres, &base).unwrap();
            let multi = search_trivialization(
                &pres,
                &SearchConfig { threads: 4, ..base },
            )
            .unwrap();
            assert_eq!(single.class_name(), multi.class_name());
            if let Some(cert) = multi.certificate() {
                assert!(verify_certificate(cert).pass);
            }
        }
    }

    #[test]
    fn goal_test_matches_is_trivial() {
        use crate::gen;
        use crate::rng::SplitMix64;
        let mut rng = SplitMix64::new(90);
        for _ in 0..500 {
            let rank = rng.range(1, 4) as u16;
            let pres = gen::presentation(&mut rng, rank, 4);
            assert_eq!(is_goal(&pres), pres.is_trivial(), "{pres:?}");
        }
        // Conjugates and inverses of the basis count as goals.
        assert!(is_goal(&p("yxY;y")));
        assert!(is_goal(&p("X;y")));
        assert!(!is_goal(&p("x;x")));
        assert!(is_goal(&Presentation::trivial(0)));
    }

    #[test]
    fn dedup_key_quotients_relator_order_only() {
        assert_eq!(search_key(&p("x;y")), search_key(&p("y;x")));
        assert_ne!(search_key(&p("x;y")), search_key(&p("X;y")));
        assert_ne!(search_key(&p("x;y")), search_key(&p("yxY;y")));
    }

    #[test]
    fn streamed_fingerprint_matches_key_hash() {
        // Checkpoint files persist fingerprints, so the streamed hash must
        // track the key serialization byte for byte.
        fn reference_fnv(bytes: &[u8]) -> u128 {
            let mut h = Fnv128::new();
            h.write(bytes);
            h.finish()
        }
        use crate::gen;
        use crate::rng::SplitMix64;
        let mut rng = SplitMix64::new(91);
        for _ in 0..300 {
            let rank = rng.range(0, 5) as u16;
            let pres = gen::presentation(&mut rng, rank, 10);
            let DedupToken::Fingerprint(fp) = dedup_token(&pres, None, false) else {
                panic!("requested fingerprint mode");
            };
            assert_eq!(fp, reference_fnv(&search_key(&pres)));
        }
    }

    #[test]
    fn class_duplicates_in_depth_do_not_hide_solutions() {
        // (Yx; yxY) is two moves from trivial but its second relator is a
        // conjugate of x, so a conjugacy-quotient dedup would collapse the
        // crucial intermediate into the start state and miss the solution.
        let outcome = search_trivialization(&p("Yx;yxY"), &cfg(7, 2)).unwrap();
        let cert = outcome.certificate().expect("trivialized within depth 2");
        assert!(cert.moves.len() <= 2);
        assert!(verify_certificate(cert).pass);
    }

    #[test]
    fn single_threaded_runs_are_identical() {
        let (pres, _) = scramble(2, 5, 6, 77);
        let config = SearchConfig {
            max_relator_len: pres.metrics().max_relator_length + 4,
            max_depth: 5,
            ..SearchConfig::default()
        };
        let a = search_trivialization(&pres, &config).unwrap();
        let b = search_trivialization(&pres, &config).unwrap();
        assert_eq!(a.certificate(), b.certificate());
        assert_eq!(a.stats().nodes_expanded, b.stats().nodes_expanded);
        assert_eq!(a.stats().nodes_deduplicated, b.stats().nodes_deduplicated);
        assert_eq!(a.stats().peak_frontier, b.stats().peak_frontier);
    }
}
