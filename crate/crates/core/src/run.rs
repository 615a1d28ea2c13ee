//! Parallel, checkpointed region pipeline for the magic problems.
//!
//! The region tree is cut at `split_depth` into subproblems, which are
//! walked on a pool of `worker_budget` threads. Each subproblem folds its
//! regions into an [`Accumulator`]; accumulators are merged in lineage
//! order, so the result does not depend on scheduling.
//!
//! With a checkpoint path, progress is appended to a JSON-lines file by a
//! single writer thread: a header carrying the configuration hash, then
//! one record per flushed subproblem state. A rerun with the same
//! configuration picks up each subproblem after its last recorded region.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arrangement::{subproblems, walk, with_workers, ReducedIop, Region, Subproblem, WalkStats};
use crate::ehrhart::{region_quasipolynomial, LatticeCounter};
use crate::error::{Error, Result};
use crate::exact::Integer;
use crate::gfun::Quasipolynomial;
use crate::magic::{build_magic_iop, MagicSpec};

/// The parameters that determine a run's result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub spec: MagicSpec,
    pub split_depth: usize,
    /// Stop each subproblem after this many regions.
    pub max_regions: Option<u64>,
    /// Accumulate region counts at this single dilation instead of
    /// quasipolynomials.
    pub count_at: Option<u64>,
}

impl RunConfig {
    pub fn new(spec: MagicSpec, split_depth: usize) -> Self {
        Self {
            spec,
            split_depth,
            max_regions: None,
            count_at: None,
        }
    }

    /// SHA-256 of the configuration's JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// How a run executes; none of this changes the result.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub worker_budget: usize,
    pub checkpoint: Option<PathBuf>,
    /// Regions between checkpoint records of one subproblem.
    pub checkpoint_every: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            worker_budget: 1,
            checkpoint: None,
            checkpoint_every: 64,
        }
    }
}

/// Partial sum over the regions of one subproblem, in reduced dilation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accumulator {
    pub regions: u64,
    pub quasipolynomial: Option<Quasipolynomial>,
    #[serde(with = "opt_int")]
    pub count: Option<Integer>,
}

mod opt_int {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::exact::Integer;

    pub fn serialize<S: Serializer>(v: &Option<Integer>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|x| x.to_string()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Integer>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl Accumulator {
    fn empty(config: &RunConfig) -> Self {
        Self {
            regions: 0,
            quasipolynomial: config.count_at.is_none().then(Quasipolynomial::zero),
            count: config.count_at.map(|_| Integer::zero()),
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        self.regions += other.regions;
        if let (Some(a), Some(b)) = (&mut self.quasipolynomial, &other.quasipolynomial) {
            *a = (&*a + b).normalize();
        }
        if let (Some(a), Some(b)) = (&mut self.count, &other.count) {
            *a += b;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Record {
    Header {
        config_hash: String,
        config: RunConfig,
    },
    Progress {
        subproblem: String,
        /// Lineage of the last region folded into `acc`.
        frontier: Option<String>,
        complete: bool,
        acc: Accumulator,
    },
}

/// Latest recorded state per subproblem lineage.
type Resume = HashMap<String, (Option<String>, bool, Accumulator)>;

/// Reads a checkpoint, rejecting a different configuration. Lines that do
/// not parse (a torn final write) are ignored.
pub fn read_checkpoint(path: &Path, config: &RunConfig) -> Result<Resume> {
    let mut out = Resume::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
        Err(e) => return Err(Error::Checkpoint(format!("{}: {e}", path.display()))),
    };
    let mut saw_header = false;
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::Checkpoint(e.to_string()))?;
        let Ok(record) = serde_json::from_str::<Record>(&line) else {
            continue;
        };
        match record {
            Record::Header { config_hash, .. } => {
                if config_hash != config.hash() {
                    return Err(Error::Checkpoint(format!(
                        "{} was written for a different configuration",
                        path.display()
                    )));
                }
                saw_header = true;
            }
            Record::Progress {
                subproblem,
                frontier,
                complete,
                acc,
            } => {
                if saw_header {
                    out.insert(subproblem, (frontier, complete, acc));
                }
            }
        }
    }
    Ok(out)
}

struct Writer {
    tx: mpsc::Sender<Record>,
    handle: thread::JoinHandle<Result<()>>,
}

impl Writer {
    fn start(path: &Path, config: &RunConfig, fresh: bool) -> Result<Self> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
        let text = std::fs::read(path).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if text.last().is_some_and(|&b| b != b'\n') {
            file.write_all(b"\n")
                .map_err(|e| Error::Checkpoint(e.to_string()))?;
        }
        if fresh {
            let header = Record::Header {
                config_hash: config.hash(),
                config: config.clone(),
            };
            write_record(&mut file, &header)?;
        }
        let (tx, rx) = mpsc::channel::<Record>();
        let handle = thread::spawn(move || {
            for record in rx {
                write_record(&mut file, &record)?;
            }
            Ok(())
        });
        Ok(Self { tx, handle })
    }

    fn finish(self) -> Result<()> {
        drop(self.tx);
        self.handle
            .join()
            .map_err(|_| Error::Checkpoint("checkpoint writer panicked".into()))?
    }
}

fn write_record(file: &mut File, record: &Record) -> Result<()> {
    let mut line = serde_json::to_string(record).expect("record serializes");
    line.push('\n');
    file.write_all(line.as_bytes())
        .and_then(|_| file.sync_data())
        .map_err(|e| Error::Checkpoint(e.to_string()))
}

/// Result of a pipeline run, in the original dilation parameter.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub hyperplanes: usize,
    pub reduced_dim: usize,
    pub step: u64,
    pub subproblems: usize,
    pub regions: u64,
    pub peak_live: usize,
    /// Regions taken from the checkpoint instead of being walked again.
    pub restored: u64,
    pub quasipolynomial: Option<Quasipolynomial>,
    pub count: Option<Integer>,
    pub timings: Vec<(&'static str, Duration)>,
}

fn fold_region(region: &Region, config: &RunConfig, step: u64, acc: &mut Accumulator) -> Result<()> {
    acc.regions += 1;
    if let Some(q) = &mut acc.quasipolynomial {
        *q = (&*q + &region_quasipolynomial(region)?).normalize();
    }
    if let (Some(c), Some(t)) = (&mut acc.count, config.count_at) {
        if t % step == 0 {
            *c += LatticeCounter::new(&region.polytope)?.count(t / step)?;
        }
    }
    Ok(())
}

fn run_subproblem(
    reduced: &ReducedIop,
    sub: Subproblem,
    config: &RunConfig,
    step: u64,
    prior: Option<&(Option<String>, bool, Accumulator)>,
    every: u64,
    tx: Option<&mpsc::Sender<Record>>,
) -> Result<(Accumulator, WalkStats)> {
    let mut stats = WalkStats::default();
    let (frontier, complete, mut acc) = match prior {
        Some((f, c, a)) => (f.clone(), *c, a.clone()),
        None => (None, false, Accumulator::empty(config)),
    };
    if complete {
        return Ok((acc, stats));
    }
    let key = sub.lineage.clone();
    let send = |frontier: Option<String>, complete: bool, acc: &Accumulator| {
        if let Some(tx) = tx {
            let _ = tx.send(Record::Progress {
                subproblem: key.clone(),
                frontier,
                complete,
                acc: acc.clone(),
            });
        }
    };
    let mut last = frontier.clone();
    let mut since = 0u64;
    let limit = config.max_regions;
    if limit.is_some_and(|m| acc.regions >= m) {
        send(last, true, &acc);
        return Ok((acc, stats));
    }
    let _ = walk(
        &reduced.iop.hyperplanes,
        sub,
        frontier.as_deref(),
        &mut stats,
        |region| {
            fold_region(&region, config, step, &mut acc)?;
            last = Some(region.lineage);
            since += 1;
            if limit.is_some_and(|m| acc.regions >= m) {
                return Ok(ControlFlow::Break(()));
            }
            if since >= every {
                since = 0;
                send(last.clone(), false, &acc);
            }
            Ok(ControlFlow::Continue(()))
        },
    )?;
    send(last, true, &acc);
    Ok((acc, stats))
}

/// Runs the region pipeline for a magic problem.
pub fn run_magic(config: &RunConfig, options: &RunOptions) -> Result<RunOutcome> {
    let mut timings = Vec::new();
    if config.spec.n <= 2 {
        let empty = Accumulator::empty(config);
        return Ok(RunOutcome {
            config: config.clone(),
            hyperplanes: 0,
            reduced_dim: 0,
            step: 1,
            subproblems: 0,
            regions: 0,
            peak_live: 0,
            restored: 0,
            quasipolynomial: empty.quasipolynomial,
            count: empty.count,
            timings,
        });
    }
    let clock = Instant::now();
    let iop = build_magic_iop(&config.spec);
    let reduced = iop.reduce()?;
    let step = reduced.embedding.step.to_u64().ok_or(Error::Overflow)?;
    timings.push(("reduce", clock.elapsed()));

    let clock = Instant::now();
    let depth = config.split_depth.min(reduced.iop.hyperplanes.len());
    let subs = subproblems(&reduced.iop, depth)?;
    let resume = match &options.checkpoint {
        Some(path) => read_checkpoint(path, config)?,
        None => Resume::new(),
    };
    let fresh = options
        .checkpoint
        .as_ref()
        .is_some_and(|p| std::fs::metadata(p).map(|m| m.len() == 0).unwrap_or(true))
        || resume.is_empty();
    let writer = match &options.checkpoint {
        Some(path) => Some(Writer::start(path, config, fresh)?),
        None => None,
    };
    let tx = writer.as_ref().map(|w| w.tx.clone());
    let n_subs = subs.len();
    let restored = subs
        .iter()
        .filter_map(|s| resume.get(&s.lineage))
        .map(|(_, _, acc)| acc.regions)
        .sum();
    let every = options.checkpoint_every.max(1);
    let results: Vec<Result<(Accumulator, WalkStats)>> = with_workers(options.worker_budget, || {
        subs.into_par_iter()
            .map_with(tx, |tx, sub| {
                let prior = resume.get(&sub.lineage);
                run_subproblem(&reduced, sub, config, step, prior, every, tx.as_ref())
            })
            .collect()
    })?;
    if let Some(w) = writer {
        w.finish()?;
    }
    let mut total = Accumulator::empty(config);
    let mut peak_live = 0;
    for r in results {
        let (acc, stats) = r?;
        total.merge(&acc);
        peak_live = peak_live.max(stats.peak_live);
    }
    timings.push(("regions", clock.elapsed()));

    let step_usize = step as usize;
    Ok(RunOutcome {
        config: config.clone(),
        hyperplanes: reduced.iop.hyperplanes.len(),
        reduced_dim: reduced.iop.polytope.dim(),
        step,
        subproblems: n_subs,
        regions: total.regions,
        peak_live,
        restored,
        quasipolynomial: total
            .quasipolynomial
            .map(|q| q.stretch(step_usize).normalize()),
        count: total.count,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magic::Variant;

    fn affine3() -> RunConfig {
        RunConfig::new(MagicSpec::new(3, Variant::Affine), 3)
    }

    #[test]
    fn worker_budget_does_not_change_the_result() {
        let one = run_magic(&affine3(), &RunOptions::default()).unwrap();
        let four = run_magic(
            &affine3(),
            &RunOptions {
                worker_budget: 4,
                ..RunOptions::default()
            },
        )
        .unwrap();
        assert_eq!(one.quasipolynomial, four.quasipolynomial);
        assert_eq!(one.regions, four.regions);
        assert_eq!(one.quasipolynomial.unwrap().period(), 18);
    }

    #[test]
    fn truncated_runs_resume_to_the_same_sums() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.jsonl");
        let mut config = affine3();
        config.max_regions = Some(5);
        config.count_at = Some(21);
        let opts = RunOptions {
            checkpoint: Some(path.clone()),
            checkpoint_every: 1,
            ..RunOptions::default()
        };
        let fresh = run_magic(&config, &RunOptions::default()).unwrap();
        let first = run_magic(&config, &opts).unwrap();
        assert_eq!(first.count, fresh.count);

        // Keep the header and a few progress lines, then tear the last one.
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let keep = lines.len().min(4);
        let mut torn = lines[..keep].join("\n");
        torn.push_str("\n{\"kind\":\"progr");
        std::fs::write(&path, torn).unwrap();
        let resumed = run_magic(&config, &opts).unwrap();
        assert!(resumed.restored > 0);
        assert_eq!(resumed.count, fresh.count);
        assert_eq!(resumed.regions, fresh.regions);
    }

    #[test]
    fn mismatched_checkpoint_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.jsonl");
        let mut config = affine3();
        config.max_regions = Some(2);
        config.count_at = Some(15);
        let opts = RunOptions {
            checkpoint: Some(path),
            ..RunOptions::default()
        };
        run_magic(&config, &opts).unwrap();
        config.count_at = Some(18);
        assert!(matches!(run_magic(&config, &opts), Err(Error::Checkpoint(_))));
    }
}
