//! Binary checkpoint files for long searches.
//!
//! Layout: an 8-byte magic (`ACCHKPT\n`) followed by framed records. Each
//! frame is `tag: u8, len: u32 LE, payload, crc32: u32 LE` where the
//! checksum covers tag, length, and payload. All integers are fixed-width
//! little-endian. Frames appear in a fixed order and the file ends with an
//! `END` frame, so truncation is always detectable:
//!
//! ```text
//! VERSION  format version (currently 1)
//! CONFIG   search budgets, strategy, dedup mode
//! START    the start presentation
//! ARENA    parent pointers + moves (breadth-first only)
//! FRONTIER node ids + depths, FIFO order (breadth-first only)
//! VISITED  dedup store: fingerprints or exact canonical keys
//! DEPTH    current depth limit (iterative deepening only)
//! STATS    counters incl. accumulated wall time
//! END      empty terminator
//! ```
//!
//! Frontier presentations are not stored; they are rebuilt by replaying
//! each node's move path from the start, which keeps files small. A resumed
//! single-threaded search explores exactly the states the uninterrupted
//! run would have explored.

use std::collections::{HashSet, VecDeque};
use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::moves::{self, Move};
use crate::presentation::Presentation;
use crate::search::{
    BfsSearcher, FrontierEntry, IdSearcher, NodeRecord, SearchConfig, SearchStats, Strategy,
    VisitedSet,
};
use crate::word::{Letter, Sign, Word};

pub const MAGIC: &[u8; 8] = b"ACCHKPT\n";
pub const FORMAT_VERSION: u32 = 1;

const TAG_VERSION: u8 = 0x01;
const TAG_CONFIG: u8 = 0x02;
const TAG_START: u8 = 0x03;
const TAG_ARENA: u8 = 0x04;
const TAG_FRONTIER: u8 = 0x05;
const TAG_VISITED: u8 = 0x06;
const TAG_DEPTH: u8 = 0x07;
const TAG_STATS: u8 = 0x08;
const TAG_END: u8 = 0xFF;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a checkpoint file (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {found} (expected {FORMAT_VERSION})")]
    Version { found: u32 },
    #[error("truncated checkpoint file")]
    Truncated,
    #[error("frame checksum mismatch (tag {tag:#04x})")]
    Checksum { tag: u8 },
    #[error("malformed checkpoint: {0}")]
    Corrupt(String),
    #[error("cannot checkpoint a finished search")]
    SearchFinished,
    #[error("replay of checkpointed path failed: {0}")]
    Replay(#[from] crate::moves::MoveError),
    #[error("checkpointed start presentation invalid: {0}")]
    Start(#[from] crate::presentation::PresentationError),
}

// --- encoding helpers ------------------------------------------------------

struct FrameWriter {
    out: Vec<u8>,
}

impl FrameWriter {
    fn new() -> FrameWriter {
        FrameWriter { out: MAGIC.to_vec() }
    }

    fn frame(&mut self, tag: u8, payload: &[u8]) {
        let mut head = Vec::with_capacity(5 + payload.len());
        head.push(tag);
        head.extend_from_slice(&(payload.len() as u32).to_le_bytes());
        head.extend_from_slice(payload);
        let crc = crc32fast::hash(&head);
        self.out.extend_from_slice(&head);
        self.out.extend_from_slice(&crc.to_le_bytes());
    }
}

struct FrameReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> FrameReader<'a> {
    fn new(data: &'a [u8]) -> Result<FrameReader<'a>, CheckpointError> {
        if data.len() < MAGIC.len() || &data[..MAGIC.len()] != MAGIC {
            return Err(CheckpointError::BadMagic);
        }
        Ok(FrameReader { data, pos: MAGIC.len() })
    }

    fn next_frame(&mut self) -> Result<(u8, &'a [u8]), CheckpointError> {
        if self.data.len() - self.pos < 5 {
            return Err(CheckpointError::Truncated);
        }
        let tag = self.data[self.pos];
        let len = u32::from_le_bytes(
            self.data[self.pos + 1..self.pos + 5].try_into().unwrap(),
        ) as usize;
        let body_end = self.pos + 5 + len;
        if self.data.len() < body_end + 4 {
            return Err(CheckpointError::Truncated);
        }
        let framed = &self.data[self.pos..body_end];
        let crc_stored = u32::from_le_bytes(self.data[body_end..body_end + 4].try_into().unwrap());
        if crc32fast::hash(framed) != crc_stored {
            return Err(CheckpointError::Checksum { tag });
        }
        let payload = &self.data[self.pos + 5..body_end];
        self.pos = body_end + 4;
        Ok((tag, payload))
    }

    fn expect(&mut self, want: u8) -> Result<&'a [u8], CheckpointError> {
        let (tag, payload) = self.next_frame()?;
        if tag != want {
            return Err(CheckpointError::Corrupt(format!(
                "expected frame {want:#04x}, found {tag:#04x}"
            )));
        }
        Ok(payload)
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(data: &'a [u8]) -> Cursor<'a> {
        Cursor { data, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        if self.data.len() - self.pos < n {
            return Err(CheckpointError::Corrupt("frame payload too short".into()));
        }
        let slice = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8, CheckpointError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, CheckpointError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn i16(&mut self) -> Result<i16, CheckpointError> {
        Ok(i16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, CheckpointError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u128(&mut self) -> Result<u128, CheckpointError> {
        Ok(u128::from_le_bytes(self.take(16)?.try_into().unwrap()))
    }

    fn done(&self) -> Result<(), CheckpointError> {
        if self.pos != self.data.len() {
            return Err(CheckpointError::Corrupt("trailing bytes in frame".into()));
        }
        Ok(())
    }
}

fn encode_word(out: &mut Vec<u8>, w: &Word) {
    out.extend_from_slice(&(w.len() as u32).to_le_bytes());
    for l in w.letters() {
        out.extend_from_slice(&l.code().to_le_bytes());
    }
}

fn decode_word(cur: &mut Cursor<'_>) -> Result<Word, CheckpointError> {
    let len = cur.u32()? as usize;
    let mut letters = Vec::with_capacity(len);
    for _ in 0..len {
        let code = cur.i16()?;
        letters.push(
            Letter::from_code(code)
                .ok_or_else(|| CheckpointError::Corrupt("zero letter code".into()))?,
        );
    }
    Ok(Word::reduce(letters))
}

fn encode_presentation(out: &mut Vec<u8>, p: &Presentation) {
    out.extend_from_slice(&p.rank().to_le_bytes());
    for r in p.relators() {
        encode_word(out, r);
    }
}

fn decode_presentation(cur: &mut Cursor<'_>) -> Result<Presentation, CheckpointError> {
    let rank = cur.u16()?;
    let mut relators = Vec::with_capacity(rank as usize);
    for _ in 0..rank {
        relators.push(decode_word(cur)?);
    }
    Ok(Presentation::new(rank, relators)?)
}

fn encode_move(out: &mut Vec<u8>, m: Option<Move>) {
    match m {
        None => {
            out.push(0);
            out.extend_from_slice(&0u16.to_le_bytes());
            out.extend_from_slice(&0u16.to_le_bytes());
            out.push(0);
        }
        Some(Move::Invert { relator }) => {
            out.push(1);
            out.extend_from_slice(&relator.to_le_bytes());
            out.extend_from_slice(&0u16.to_le_bytes());
            out.push(0);
        }
        Some(Move::RightMultiply { relator, by, sign }) => {
            out.push(2);
            out.extend_from_slice(&relator.to_le_bytes());
            out.extend_from_slice(&by.to_le_bytes());
            out.push(sign.as_i8() as u8);
        }
        Some(Move::Conjugate { relator, generator, sign }) => {
            out.push(3);
            out.extend_from_slice(&relator.to_le_bytes());
            out.extend_from_slice(&generator.to_le_bytes());
            out.push(sign.as_i8() as u8);
        }
    }
}

fn decode_move(cur: &mut Cursor<'_>) -> Result<Option<Move>, CheckpointError> {
    let kind = cur.u8()?;
    let a = cur.u16()?;
    let b = cur.u16()?;
    let sign_raw = cur.u8()? as i8;
    let sign = || {
        Sign::from_i8(sign_raw)
            .ok_or_else(|| CheckpointError::Corrupt(format!("bad sign byte {sign_raw}")))
    };
    Ok(match kind {
        0 => None,
        1 => Some(Move::Invert { relator: a }),
        2 => Some(Move::RightMultiply { relator: a, by: b, sign: sign()? }),
        3 => Some(Move::Conjugate { relator: a, generator: b, sign: sign()? }),
        other => {
            return Err(CheckpointError::Corrupt(format!("bad move kind {other}")));
        }
    })
}

fn encode_config(cfg: &SearchConfig) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(cfg.max_relator_len as u64).to_le_bytes());
    out.extend_from_slice(&(cfg.max_depth as u64).to_le_bytes());
    out.extend_from_slice(&cfg.max_nodes.to_le_bytes());
    out.push(match cfg.strategy {
        Strategy::BreadthFirst => 0,
        Strategy::IterativeDeepening => 1,
    });
    out.push(cfg.exact_dedup as u8);
    out
}

fn decode_config(payload: &[u8]) -> Result<SearchConfig, CheckpointError> {
    let mut cur = Cursor::new(payload);
    let max_relator_len = cur.u64()? as usize;
    let max_depth = cur.u64()? as usize;
    let max_nodes = cur.u64()?;
    let strategy = match cur.u8()? {
        0 => Strategy::BreadthFirst,
        1 => Strategy::IterativeDeepening,
        other => {
            return Err(CheckpointError::Corrupt(format!("bad strategy byte {other}")));
        }
    };
    let exact_dedup = cur.u8()? != 0;
    cur.done()?;
    Ok(SearchConfig {
        max_relator_len,
        max_depth,
        max_nodes,
        strategy,
        exact_dedup,
        ..SearchConfig::default()
    })
}

fn encode_stats(stats: &SearchStats) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&stats.nodes_expanded.to_le_bytes());
    out.extend_from_slice(&stats.nodes_deduplicated.to_le_bytes());
    out.extend_from_slice(&stats.peak_frontier.to_le_bytes());
    out.extend_from_slice(&(stats.wall_time.as_nanos() as u64).to_le_bytes());
    out
}

fn decode_stats(payload: &[u8]) -> Result<SearchStats, CheckpointError> {
    let mut cur = Cursor::new(payload);
    let stats = SearchStats {
        nodes_expanded: cur.u64()?,
        nodes_deduplicated: cur.u64()?,
        peak_frontier: cur.u64()?,
        wall_time: std::time::Duration::from_nanos(cur.u64()?),
        det_obstruction: None,
    };
    cur.done()?;
    Ok(stats)
}

// --- breadth-first ---------------------------------------------------------

impl BfsSearcher {
    /// Serializes the live search state to `path` (atomic rename). A
    /// search that ran out of node budget is still resumable and may be
    /// saved; one that found a certificate or exhausted its bounds has
    /// nothing left to resume.
    pub fn save_checkpoint(&self, path: &Path) -> Result<(), CheckpointError> {
        match &self.finished {
            None | Some(crate::search::SearchOutcome::BudgetExceeded { .. }) => {}
            Some(_) => return Err(CheckpointError::SearchFinished),
        }
        let mut w = FrameWriter::new();
        w.frame(TAG_VERSION, &FORMAT_VERSION.to_le_bytes());
        w.frame(TAG_CONFIG, &encode_config(&self.cfg));

        let mut start = Vec::new();
        encode_presentation(&mut start, &self.start);
        w.frame(TAG_START, &start);

        let mut arena = Vec::new();
        arena.extend_from_slice(&(self.arena.len() as u32).to_le_bytes());
        for record in &self.arena {
            arena.extend_from_slice(&record.parent.to_le_bytes());
            encode_move(&mut arena, record.step);
        }
        w.frame(TAG_ARENA, &arena);

        let mut frontier = Vec::new();
        frontier.extend_from_slice(&(self.frontier.len() as u32).to_le_bytes());
        for entry in &self.frontier {
            frontier.extend_from_slice(&entry.node.to_le_bytes());
            frontier.extend_from_slice(&entry.depth.to_le_bytes());
        }
        w.frame(TAG_FRONTIER, &frontier);

        let mut visited = Vec::new();
        match &self.visited {
            VisitedSet::Fingerprint(set) => {
                visited.push(0u8);
                visited.extend_from_slice(&(set.len() as u64).to_le_bytes());
                let mut sorted: Vec<u128> = set.iter().copied().collect();
                sorted.sort_unstable();
                for fp in sorted {
                    visited.extend_from_slice(&fp.to_le_bytes());
                }
            }
            VisitedSet::Exact(set) => {
                visited.push(1u8);
                visited.extend_from_slice(&(set.len() as u64).to_le_bytes());
                let mut sorted: Vec<&Vec<u8>> = set.iter().collect();
                sorted.sort_unstable();
                for key in sorted {
                    visited.extend_from_slice(&(key.len() as u32).to_le_bytes());
                    visited.extend_from_slice(key);
                }
            }
        }
        w.frame(TAG_VISITED, &visited);

        w.frame(TAG_STATS, &encode_stats(&self.stats));
        w.frame(TAG_END, &[]);

        let tmp = path.with_extension("tmp");
        let mut file = fs::File::create(&tmp)?;
        file.write_all(&w.out)?;
        file.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Restores a breadth-first search from a checkpoint file. Thread count
    /// and checkpoint policy are runtime settings, not part of the file;
    /// they default to 1 / none and can be adjusted on the returned value.
    pub fn load_checkpoint(path: &Path) -> Result<BfsSearcher, CheckpointError> {
        let data = fs::read(path)?;
        let mut reader = FrameReader::new(&data)?;

        let version_payload = reader.expect(TAG_VERSION)?;
        let mut cur = Cursor::new(version_payload);
        let found = cur.u32()?;
        cur.done()?;
        if found != FORMAT_VERSION {
            return Err(CheckpointError::Version { found });
        }

        let cfg = decode_config(reader.expect(TAG_CONFIG)?)?;
        if cfg.strategy != Strategy::BreadthFirst {
            return Err(CheckpointError::Corrupt(
                "breadth-first loader given an iterative-deepening checkpoint".into(),
            ));
        }

        let mut cur = Cursor::new(reader.expect(TAG_START)?);
        let start = decode_presentation(&mut cur)?;
        cur.done()?;

        let mut cur = Cursor::new(reader.expect(TAG_ARENA)?);
        let count = cur.u32()? as usize;
        let mut arena = Vec::with_capacity(count);
        for _ in 0..count {
            let parent = cur.u32()?;
            let step = decode_move(&mut cur)?;
            arena.push(NodeRecord { parent, step });
        }
        cur.done()?;
        if arena.is_empty() {
            return Err(CheckpointError::Corrupt("empty arena".into()));
        }

        let mut cur = Cursor::new(reader.expect(TAG_FRONTIER)?);
        let count = cur.u32()? as usize;
        let mut frontier_ids = Vec::with_capacity(count);
        for _ in 0..count {
            let node = cur.u32()?;
            let depth = cur.u32()?;
            if node as usize >= arena.len() {
                return Err(CheckpointError::Corrupt(format!(
                    "frontier node {node} outside arena"
                )));
            }
            frontier_ids.push((node, depth));
        }
        cur.done()?;

        let mut cur = Cursor::new(reader.expect(TAG_VISITED)?);
        let visited = match cur.u8()? {
            0 => {
                let count = cur.u64()? as usize;
                let mut set = HashSet::with_capacity(count);
                for _ in 0..count {
                    set.insert(cur.u128()?);
                }
                VisitedSet::Fingerprint(set)
            }
            1 => {
                let count = cur.u64()? as usize;
                let mut set = HashSet::with_capacity(count);
                for _ in 0..count {
                    let len = cur.u32()? as usize;
                    set.insert(cur.take(len)?.to_vec());
                }
                VisitedSet::Exact(set)
            }
            other => {
                return Err(CheckpointError::Corrupt(format!("bad visited mode {other}")));
            }
        };
        cur.done()?;

        let stats = decode_stats(reader.expect(TAG_STATS)?)?;
        reader.expect(TAG_END)?;

        // Rebuild frontier presentations by replaying each node's path.
        let path_of = |node: u32| -> Vec<Move> {
            let mut moves_rev = Vec::new();
            let mut cur = node;
            while cur != 0 {
                let record = &arena[cur as usize];
                moves_rev.push(record.step.expect("non-root arena nodes carry a move"));
                cur = record.parent;
            }
            moves_rev.reverse();
            moves_rev
        };
        let mut frontier = VecDeque::with_capacity(frontier_ids.len());
        for (node, depth) in frontier_ids {
            let state = moves::replay(&start, &path_of(node))?;
            frontier.push_back(FrontierEntry { node, depth, state });
        }

        Ok(BfsSearcher::from_checkpoint_parts(cfg, start, arena, frontier, visited, stats))
    }
}

// --- iterative deepening ---------------------------------------------------

impl IdSearcher {
    /// Iterative deepening checkpoints carry only the config, start, depth
    /// counter, and stats; resuming restarts the current depth iteration.
    pub fn save_checkpoint(&self, path: &Path) -> Result<(), CheckpointError> {
        let mut w = FrameWriter::new();
        w.frame(TAG_VERSION, &FORMAT_VERSION.to_le_bytes());
        w.frame(TAG_CONFIG, &encode_config(self.config()));
        let mut start = Vec::new();
        encode_presentation(&mut start, self.start());
        w.frame(TAG_START, &start);
        w.frame(TAG_DEPTH, &self.current_limit.to_le_bytes());
        w.frame(TAG_STATS, &encode_stats(&self.stats));
        w.frame(TAG_END, &[]);
        let tmp = path.with_extension("tmp");
        let mut file = fs::File::create(&tmp)?;
        file.write_all(&w.out)?;
        file.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load_checkpoint(path: &Path) -> Result<IdSearcher, CheckpointError> {
        let data = fs::read(path)?;
        let mut reader = FrameReader::new(&data)?;
        let mut cur = Cursor::new(reader.expect(TAG_VERSION)?);
        let found = cur.u32()?;
        cur.done()?;
        if found != FORMAT_VERSION {
            return Err(CheckpointError::Version { found });
        }
        let cfg = decode_config(reader.expect(TAG_CONFIG)?)?;
        if cfg.strategy != Strategy::IterativeDeepening {
            return Err(CheckpointError::Corrupt(
                "iterative-deepening loader given a breadth-first checkpoint".into(),
            ));
        }
        let mut cur = Cursor::new(reader.expect(TAG_START)?);
        let start = decode_presentation(&mut cur)?;
        cur.done()?;
        let mut cur = Cursor::new(reader.expect(TAG_DEPTH)?);
        let limit = cur.u32()?;
        cur.done()?;
        let stats = decode_stats(reader.expect(TAG_STATS)?)?;
        reader.expect(TAG_END)?;
        Ok(IdSearcher::resume_at(start, cfg, limit, stats))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{scramble, search_trivialization, SearchOutcome};

    fn cfg_for(p: &Presentation, depth: usize) -> SearchConfig {
        SearchConfig {
            max_relator_len: p.metrics().max_relator_length + 4,
            max_depth: depth,
            ..SearchConfig::default()
        }
    }

    /// First scramble from `seed0` on that is not already canonically
    /// trivial, so the searcher has actual work to checkpoint.
    fn nontrivial_scramble(rank: u16, k: usize, seed0: u64) -> Presentation {
        (seed0..)
            .map(|s| scramble(rank, k, 5, s).0)
            .find(|p| !p.is_trivial())
            .unwrap()
    }

    #[test]
    fn save_at_start_then_resume_matches_uninterrupted() {
        let pres = nontrivial_scramble(2, 4, 500);
        let cfg = cfg_for(&pres, 4);
        let dir = std::env::temp_dir().join("ac-ckpt-test-start");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("start.ckpt");

        let reference = search_trivialization(&pres, &cfg).unwrap();

        let searcher = BfsSearcher::new(&pres, &cfg).unwrap();
        searcher.save_checkpoint(&path).unwrap();
        let mut resumed = BfsSearcher::load_checkpoint(&path).unwrap();
        let outcome = resumed.run().unwrap();

        assert_eq!(outcome.class_name(), reference.class_name());
        assert_eq!(outcome.certificate(), reference.certificate());
        assert_eq!(
            outcome.stats().nodes_expanded,
            reference.stats().nodes_expanded
        );
    }

    #[test]
    fn mid_search_resume_matches_uninterrupted() {
        let pres = nontrivial_scramble(2, 4, 501);
        let cfg = cfg_for(&pres, 4);
        let dir = std::env::temp_dir().join("ac-ckpt-test-mid");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("mid.ckpt");

        let reference = search_trivialization(&pres, &cfg).unwrap();
        assert!(matches!(reference, SearchOutcome::Trivialized { .. }));

        let mut searcher = BfsSearcher::new(&pres, &cfg).unwrap();
        for _ in 0..10 {
            if searcher.step_batch().is_some() {
                break;
            }
        }
        if searcher.is_finished() {
            // Finished inside 10 steps; nothing left to checkpoint. Very
            // short searches are covered by the save-at-start test.
            return;
        }
        searcher.save_checkpoint(&path).unwrap();
        let mut resumed = BfsSearcher::load_checkpoint(&path).unwrap();
        let outcome = resumed.run().unwrap();

        assert_eq!(outcome.class_name(), reference.class_name());
        assert_eq!(outcome.certificate(), reference.certificate());
        assert_eq!(
            outcome.stats().nodes_expanded,
            reference.stats().nodes_expanded
        );
        assert_eq!(
            outcome.stats().nodes_deduplicated,
            reference.stats().nodes_deduplicated
        );
    }

    #[test]
    fn resume_is_exact_from_every_prefix() {
        let pres = nontrivial_scramble(2, 4, 700);
        let cfg = cfg_for(&pres, 4);
        let dir = std::env::temp_dir().join("ac-ckpt-test-prefix");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("prefix.ckpt");

        let reference = search_trivialization(&pres, &cfg).unwrap();

        for steps in 0..12 {
            let mut searcher = BfsSearcher::new(&pres, &cfg).unwrap();
            let mut done = false;
            for _ in 0..steps {
                if searcher.step_batch().is_some() {
                    done = true;
                    break;
                }
            }
            if done {
                break;
            }
            searcher.save_checkpoint(&path).unwrap();
            let mut resumed = BfsSearcher::load_checkpoint(&path).unwrap();
            let outcome = resumed.run().unwrap();
            assert_eq!(outcome.certificate(), reference.certificate(), "after {steps} steps");
            assert_eq!(
                outcome.stats().nodes_expanded,
                reference.stats().nodes_expanded,
                "after {steps} steps"
            );
            assert_eq!(
                outcome.stats().nodes_deduplicated,
                reference.stats().nodes_deduplicated,
                "after {steps} steps"
            );
            assert_eq!(
                outcome.stats().peak_frontier,
                reference.stats().peak_frontier,
                "after {steps} steps"
            );
        }
    }

    #[test]
    fn iterative_deepening_checkpoint_roundtrip() {
        let pres = nontrivial_scramble(2, 3, 503);
        let cfg = SearchConfig {
            strategy: crate::search::Strategy::IterativeDeepening,
            ..cfg_for(&pres, 3)
        };
        let dir = std::env::temp_dir().join("ac-ckpt-test-id");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("id.ckpt");

        let mut reference = IdSearcher::new(&pres, &cfg).unwrap();
        let reference = reference.run().unwrap();

        let searcher = IdSearcher::new(&pres, &cfg).unwrap();
        searcher.save_checkpoint(&path).unwrap();
        let mut resumed = IdSearcher::load_checkpoint(&path).unwrap();
        let outcome = resumed.run().unwrap();
        assert_eq!(outcome.class_name(), reference.class_name());
        assert_eq!(outcome.certificate(), reference.certificate());

        // Strategy mismatch between file and loader is rejected.
        assert!(BfsSearcher::load_checkpoint(&path).is_err());
    }

    #[test]
    fn corrupted_files_are_rejected() {
        let pres = nontrivial_scramble(2, 3, 502);
        let cfg = cfg_for(&pres, 3);
        let dir = std::env::temp_dir().join("ac-ckpt-test-corrupt");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.ckpt");
        let searcher = BfsSearcher::new(&pres, &cfg).unwrap();
        searcher.save_checkpoint(&path).unwrap();

        let good = std::fs::read(&path).unwrap();

        // Bad magic.
        let mut bad = good.clone();
        bad[0] ^= 0xFF;
        std::fs::write(&path, &bad).unwrap();
        assert!(matches!(
            BfsSearcher::load_checkpoint(&path),
            Err(CheckpointError::BadMagic)
        ));

        // Truncation.
        std::fs::write(&path, &good[..good.len() - 6]).unwrap();
        match BfsSearcher::load_checkpoint(&path) {
            Err(CheckpointError::Truncated) | Err(CheckpointError::Checksum { .. }) => {}
            Err(other) => panic!("expected framing error, got {other:?}"),
            Ok(_) => panic!("expected framing error, got a searcher"),
        }

        // Flipped payload byte: checksum catches it.
        let mut bad = good.clone();
        let mid = good.len() / 2;
        bad[mid] ^= 0x01;
        std::fs::write(&path, &bad).unwrap();
        assert!(BfsSearcher::load_checkpoint(&path).is_err());

        // Version bump.
        let mut bad = good.clone();
        // VERSION frame payload starts right after magic + tag + len.
        let version_pos = MAGIC.len() + 5;
        bad[version_pos] = 9;
        // Re-seal the frame checksum so only the version check can object.
        let framed_end = version_pos + 4;
        let crc = crc32fast::hash(&bad[MAGIC.len()..framed_end]);
        bad[framed_end..framed_end + 4].copy_from_slice(&crc.to_le_bytes());
        std::fs::write(&path, &bad).unwrap();
        assert!(matches!(
            BfsSearcher::load_checkpoint(&path),
            Err(CheckpointError::Version { found: 9 })
        ));
    }
}
