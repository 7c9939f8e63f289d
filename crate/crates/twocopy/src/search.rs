//! Exhaustive search over pairs of deduplicated party wirings.
//!
//! Alice's behavior classes are split into fixed blocks. Workers pull block
//! ids from a shared counter and send results to the calling thread, which is
//! the only one that merges and writes the checkpoint.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use twocopy_core::wirings::{counts_to_coeffs, BlockResult, QuadCoeffs, SearchKernel, PARTY_WIRING_COUNT};

use crate::report::hex32;

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;
pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_BLOCK_SIZE: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("checkpoint {path} is corrupt: {reason}")]
    CorruptCheckpoint { path: PathBuf, reason: String },
    #[error("checkpoint {path} was written by a different search configuration: {reason}")]
    CheckpointMismatch { path: PathBuf, reason: String },
    #[error("checkpoint {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub grid_points: usize,
    pub workers: usize,
    pub block_size: usize,
    /// Scan only the first `n` Alice classes (against every Bob class).
    pub alice_limit: Option<usize>,
    pub checkpoint: Option<PathBuf>,
    /// Stop after this many newly finished blocks, leaving a checkpoint.
    pub max_new_blocks: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_points: 101,
            workers: 1,
            block_size: DEFAULT_BLOCK_SIZE,
            alice_limit: None,
            checkpoint: None,
            max_new_blocks: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Party wirings as `0x`-prefixed 32-bit hexadecimal encodings.
    pub alice: String,
    pub bob: String,
    pub coeffs: QuadCoeffs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Progress {
    pub blocks_done: usize,
    pub blocks_total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub schema_version: u32,
    pub enumerated_party_count: usize,
    pub deduped_party_count: usize,
    pub alice_classes: usize,
    pub total_pairs: u64,
    /// `sup (Q(p) − p)` over `(3/4, 1]` and over all scanned pairs, including
    /// the limit at `3/4`.
    pub max_gap: f64,
    pub witness: Witness,
    /// `max (Q(3/4) − 3/4)`, reported on its own.
    pub max_boundary_gap: f64,
    pub boundary_violations: u64,
    pub range_violations: u64,
    pub grid: Vec<f64>,
    pub checkpoint: Progress,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SearchReport {
    pub fn no_purification(&self, tol: f64) -> bool {
        self.max_gap <= tol && self.boundary_violations == 0 && self.range_violations == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Complete(SearchReport),
    Interrupted(Progress),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Checkpoint {
    schema_version: u32,
    grid: Vec<f64>,
    block_size: usize,
    alice_classes: usize,
    /// One character per block, `1` when finished.
    completed: String,
    /// Merge of all finished blocks; absent while none are finished.
    partial: Option<BlockResult>,
}

struct Plan {
    alice_classes: usize,
    block_size: usize,
    blocks: usize,
}

impl Plan {
    fn range(&self, block: usize) -> std::ops::Range<usize> {
        let start = block * self.block_size;
        start..(start + self.block_size).min(self.alice_classes)
    }
}

pub fn search_all_wirings(config: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    if config.grid_points < 2 {
        return Err(SearchError::InvalidConfig("grid_points must be at least 2".into()));
    }
    if config.workers == 0 {
        return Err(SearchError::InvalidConfig("workers must be at least 1".into()));
    }
    if config.block_size == 0 {
        return Err(SearchError::InvalidConfig("block_size must be at least 1".into()));
    }
    let start = Instant::now();
    let kernel = SearchKernel::new(config.grid_points);
    let parties = kernel.party_count();
    let alice_classes = config.alice_limit.unwrap_or(parties).min(parties);
    let plan = Plan {
        alice_classes,
        block_size: config.block_size,
        blocks: alice_classes.div_ceil(config.block_size),
    };

    let mut done = vec![false; plan.blocks];
    let mut merged = BlockResult::empty();
    if let Some(path) = &config.checkpoint {
        if path.exists() {
            let cp = load_checkpoint(path)?;
            validate_checkpoint(path, &cp, &kernel, &plan)?;
            for (flag, c) in done.iter_mut().zip(cp.completed.chars()) {
                *flag = c == '1';
            }
            if let Some(p) = &cp.partial {
                merged = *p;
            }
        }
    }

    let pending: Vec<usize> = (0..plan.blocks).filter(|&b| !done[b]).collect();
    let budget = config.max_new_blocks.unwrap_or(usize::MAX);
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<(usize, BlockResult)>();

    let mut write_error = None;
    std::thread::scope(|scope| {
        for _ in 0..config.workers.min(pending.len().max(1)) {
            let tx = tx.clone();
            let (kernel, plan, pending, next, stop) = (&kernel, &plan, &pending, &next, &stop);
            scope.spawn(move || loop {
                if stop.load(Ordering::Acquire) {
                    break;
                }
                let k = next.fetch_add(1, Ordering::AcqRel);
                if k >= pending.len() || k >= budget {
                    break;
                }
                let block = pending[k];
                if tx.send((block, kernel.run_block(plan.range(block)))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (block, res) in rx {
            merged.merge(&res);
            done[block] = true;
            if let Some(path) = &config.checkpoint {
                if let Err(e) = write_checkpoint(path, &kernel, &plan, &done, &merged) {
                    write_error.get_or_insert(e);
                    stop.store(true, Ordering::Release);
                }
            }
        }
    });
    if let Some(e) = write_error {
        return Err(e);
    }

    let blocks_done = done.iter().filter(|&&d| d).count();
    let progress = Progress {
        blocks_done,
        blocks_total: plan.blocks,
    };
    if blocks_done < plan.blocks {
        return Ok(SearchOutcome::Interrupted(progress));
    }

    let catalog = kernel.catalog();
    let (wa, wb) = (merged.witness.0 as usize, merged.witness.1 as usize);
    let witness = if merged.pairs == 0 {
        Witness {
            alice: String::new(),
            bob: String::new(),
            coeffs: counts_to_coeffs([0; 4]),
        }
    } else {
        Witness {
            alice: hex32(catalog.party_encoding(wa)),
            bob: hex32(catalog.party_encoding(wb)),
            coeffs: kernel.coeffs(wa, wb),
        }
    };
    Ok(SearchOutcome::Complete(SearchReport {
        schema_version: REPORT_SCHEMA_VERSION,
        enumerated_party_count: PARTY_WIRING_COUNT,
        deduped_party_count: parties,
        alice_classes,
        total_pairs: merged.pairs,
        max_gap: merged.max_gap,
        witness,
        max_boundary_gap: merged.max_boundary_gap,
        boundary_violations: merged.boundary_violations,
        range_violations: merged.range_violations,
        grid: kernel.grid().to_vec(),
        checkpoint: progress,
        elapsed: start.elapsed(),
    }))
}

fn load_checkpoint(path: &Path) -> Result<Checkpoint, SearchError> {
    let text = fs::read_to_string(path).map_err(|source| SearchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| SearchError::CorruptCheckpoint {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

fn validate_checkpoint(path: &Path, cp: &Checkpoint, kernel: &SearchKernel, plan: &Plan) -> Result<(), SearchError> {
    let corrupt = |reason: String| SearchError::CorruptCheckpoint {
        path: path.to_path_buf(),
        reason,
    };
    let mismatch = |reason: String| SearchError::CheckpointMismatch {
        path: path.to_path_buf(),
        reason,
    };
    if cp.schema_version != CHECKPOINT_SCHEMA_VERSION {
        return Err(mismatch(format!("schema version {}", cp.schema_version)));
    }
    if cp.grid != kernel.grid() {
        return Err(mismatch("grid differs".into()));
    }
    if cp.block_size != plan.block_size || cp.alice_classes != plan.alice_classes {
        return Err(mismatch(format!(
            "block size {} over {} classes",
            cp.block_size, cp.alice_classes
        )));
    }
    if cp.completed.len() != plan.blocks || cp.completed.chars().any(|c| c != '0' && c != '1') {
        return Err(corrupt(format!(
            "completion bitmap must be {} characters of 0/1",
            plan.blocks
        )));
    }
    let bob_classes = kernel.party_count() as u64;
    let expected_pairs: u64 = cp
        .completed
        .chars()
        .enumerate()
        .filter(|(_, c)| *c == '1')
        .map(|(b, _)| plan.range(b).len() as u64 * bob_classes)
        .sum();
    match &cp.partial {
        None if expected_pairs == 0 => Ok(()),
        Some(p) if p.pairs == expected_pairs && p.max_gap.is_finite() => Ok(()),
        _ => Err(corrupt("partial result does not match the completion bitmap".into())),
    }
}

fn write_checkpoint(
    path: &Path,
    kernel: &SearchKernel,
    plan: &Plan,
    done: &[bool],
    merged: &BlockResult,
) -> Result<(), SearchError> {
    let cp = Checkpoint {
        schema_version: CHECKPOINT_SCHEMA_VERSION,
        grid: kernel.grid().to_vec(),
        block_size: plan.block_size,
        alice_classes: plan.alice_classes,
        completed: done.iter().map(|&d| if d { '1' } else { '0' }).collect(),
        partial: (merged.pairs > 0).then_some(*merged),
    };
    let io = |source| SearchError::Io {
        path: path.to_path_buf(),
        source,
    };
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(io)?;
    serde_json::to_writer_pretty(&mut f, &cp).map_err(|e| io(e.into()))?;
    f.write_all(b"\n").map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}
