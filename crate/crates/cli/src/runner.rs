//! Seeded replicate pipelines.
//!
//! Replicate `rep` at size `n` always draws from the stream
//! `replicate_stream(master, n, rep)`, and results are collected in
//! `(n, rep)` order, so every output is independent of the worker count.

use std::io::Write;
use std::time::Instant;

use fppcm_core::config_model::{bfs_distance, sample_degree_sequence, MultiGraph};
use fppcm_core::limit_laws::{LimitError, LimitLawSamplers};
use fppcm_core::oracle::{assign_weights, shortest_path, PathSummary};
use fppcm_core::rng::{index, replicate_stream, RngStream};
use fppcm_core::stats::a_n;
use fppcm_core::swg::{realized, BilateralResult, StubPool, SwgError};
use fppcm_core::tree_flow::{sample_hat_gm_coupled, simulate_construction};
use fppcm_core::{par, DegreeDistribution};

use crate::config::{ExperimentConfig, Mode};
use crate::record::{float, Kept, ReplicateRecord};

/// One of the two growth modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthMode {
    Process,
    Realized,
}

impl GrowthMode {
    pub fn name(self) -> &'static str {
        match self {
            GrowthMode::Process => "process",
            GrowthMode::Realized => "realized",
        }
    }
}

/// Settings shared by all replicates of one batch.
#[derive(Debug, Clone)]
pub struct Batch<'a> {
    pub dist: &'a DegreeDistribution,
    pub label: String,
    pub master: u64,
    pub mode: GrowthMode,
    /// Record graph distances (realized mode only).
    pub bfs: bool,
    /// Also run Dijkstra on the realized graph.
    pub oracle: bool,
    pub timing: bool,
}

/// A replicate record plus the Dijkstra answer when requested.
#[derive(Debug, Clone)]
pub struct ReplicateOutput {
    pub record: ReplicateRecord,
    pub oracle: Option<Option<PathSummary>>,
}

/// Two distinct uniform vertices.
pub fn source_pair(n: usize, rng: &mut RngStream) -> (usize, usize) {
    let u = index(rng, n);
    let v = (u + 1 + index(rng, n - 1)) % n;
    (u, v)
}

impl Batch<'_> {
    pub fn replicate(&self, n: u64, rep: u64) -> ReplicateOutput {
        let start = self.timing.then(Instant::now);
        let (seed, mut rng) = replicate_stream(self.master, n, rep);
        let a = a_n(self.dist, n);
        let seq = sample_degree_sequence(n as usize, self.dist, &mut rng);
        let (u, v) = source_pair(n as usize, &mut rng);
        let mut bfs = None;
        let mut oracle = None;
        let result: Result<BilateralResult, SwgError> = match self.mode {
            GrowthMode::Process => StubPool::new(&seq)
                .map_err(SwgError::from)
                .and_then(|mut p| p.grow_bilateral(u, v, a as usize, &mut rng)),
            GrowthMode::Realized => match MultiGraph::build(&seq, &mut rng) {
                Ok(g) => {
                    let wg = assign_weights(g, &mut rng);
                    if self.bfs {
                        bfs = bfs_distance(wg.graph(), u, v);
                    }
                    if self.oracle {
                        oracle = Some(shortest_path(&wg, u, v));
                    }
                    realized::grow_bilateral(&wg, u, v, a as usize)
                }
                Err(e) => Err(e.into()),
            },
        };
        let outcome = result
            .map(|r| Kept {
                ce_n: r.ce as u64,
                h1: r.h1,
                h2: r.h2,
                hn: r.hn,
                wn: r.wn,
                r_overshoot: r.r_overshoot as u64,
            })
            .map_err(|e| e.reason().to_string());
        let ms = start.map(|t| t.elapsed().as_secs_f64() * 1e3);
        ReplicateOutput {
            record: ReplicateRecord { n, dist: self.label.clone(), rep, seed, a_n: a, outcome, bfs_dist: bfs, ms },
            oracle,
        }
    }

    /// All replicates over the grid, in `(n, rep)` order.
    pub fn run(&self, grid: &[u64], replicates: u64) -> Vec<ReplicateOutput> {
        let jobs: Vec<(u64, u64)> = grid.iter().flat_map(|&n| (0..replicates).map(move |r| (n, r))).collect();
        par::map(jobs.len(), |i| self.replicate(jobs[i].0, jobs[i].1))
    }
}

/// The bilateral runs of an `fpp` suite.
pub fn run_fpp(cfg: &ExperimentConfig) -> Vec<ReplicateRecord> {
    let label = cfg.dist.label();
    let modes: Vec<(GrowthMode, String)> = match cfg.mode {
        Mode::Process => vec![(GrowthMode::Process, label)],
        Mode::Realized => vec![(GrowthMode::Realized, label)],
        Mode::Both => {
            vec![(GrowthMode::Process, format!("{label}#process")), (GrowthMode::Realized, format!("{label}#realized"))]
        }
    };
    let batches: Vec<Vec<ReplicateOutput>> = modes
        .into_iter()
        .map(|(mode, label)| {
            let b = Batch {
                dist: &cfg.dist,
                label,
                master: cfg.master_seed,
                mode,
                bfs: cfg.bfs && mode == GrowthMode::Realized,
                oracle: false,
                timing: cfg.timing,
            };
            b.run(&cfg.n_grid, cfg.replicates)
        })
        .collect();
    // Interleave so rows stay ordered by (n, rep) with modes adjacent.
    let len = batches[0].len();
    (0..len).flat_map(|i| batches.iter().map(move |b| b[i].record.clone())).collect()
}

/// One tree-flow replicate: forward degrees `D, B_2, …, B_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeRecord {
    pub m: usize,
    pub rep: u64,
    pub seed: u64,
    pub generation: u64,
    pub weight: f64,
    pub hat_generation: u64,
}

pub const TREE_COLUMNS: [&str; 7] = ["m", "dist", "rep", "seed", "generation", "weight", "hat_generation"];

pub fn run_tree(cfg: &ExperimentConfig) -> Vec<TreeRecord> {
    let m = cfg.tree_length;
    let g = cfg.dist.size_biased();
    par::map(cfg.replicates as usize, |rep| {
        let (seed, mut rng) = replicate_stream(cfg.master_seed, m as u64, rep as u64);
        let mut degrees = Vec::with_capacity(m);
        degrees.push(cfg.dist.sample(&mut rng));
        degrees.extend((1..m).map(|_| g.sample(&mut rng)));
        let (generation, times) =
            simulate_construction(&degrees, m, &mut rng).expect("forward degrees keep the tree alive");
        let b: Vec<u64> = (0..m).map(|_| g.sample(&mut rng)).collect();
        let (hat, _) = sample_hat_gm_coupled(&b, m, &mut rng).expect("forward degrees keep the tree alive");
        TreeRecord { m, rep: rep as u64, seed, generation, weight: times[m - 1], hat_generation: hat }
    })
}

pub fn write_tree_csv<W: Write>(out: W, label: &str, rows: &[TreeRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TREE_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.m.to_string(),
            label.to_string(),
            r.rep.to_string(),
            r.seed.to_string(),
            r.generation.to_string(),
            float(r.weight),
            r.hat_generation.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Limit-law draws of one replicate. For finite `ν`: `W`, `Λ` and `V`; for
/// `τ ∈ (2, 3)`: two explosion times and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitRecord {
    pub rep: u64,
    pub seed: u64,
    pub values: Result<Vec<f64>, String>,
}

pub fn limit_columns(dist: &DegreeDistribution) -> Vec<&'static str> {
    let mut cols = vec!["dist", "rep", "seed"];
    if dist.nu().is_infinite() {
        cols.extend(["x1", "x2", "x_sum"]);
    } else {
        cols.extend(["w", "lambda", "v"]);
    }
    cols.push("reason");
    cols
}

pub fn run_limits(cfg: &ExperimentConfig) -> Result<Vec<LimitRecord>, LimitError> {
    let s = LimitLawSamplers::new(&cfg.dist).with_population_cap(cfg.population_cap)?;
    let infinite = cfg.dist.nu().is_infinite();
    Ok(par::map(cfg.replicates as usize, |rep| {
        let (seed, mut rng) = replicate_stream(cfg.master_seed, 0, rep as u64);
        let values = if infinite {
            s.sample_x(&mut rng).and_then(|a| s.sample_x(&mut rng).map(|b| vec![a.value, b.value, a.value + b.value]))
        } else {
            (|| Ok(vec![s.sample_w(&mut rng)?, s.sample_lambda(&mut rng)?, s.sample_v_tau_gt3(&mut rng)?]))()
        };
        LimitRecord { rep: rep as u64, seed, values: values.map_err(|e: LimitError| e.to_string()) }
    }))
}

pub fn write_limits_csv<W: Write>(out: W, dist: &DegreeDistribution, rows: &[LimitRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(limit_columns(dist))?;
    let label = dist.label();
    for r in rows {
        let mut fields = vec![label.clone(), r.rep.to_string(), r.seed.to_string()];
        match &r.values {
            Ok(v) => {
                fields.extend(v.iter().map(|&x| float(x)));
                fields.push(String::new());
            }
            Err(e) => {
                fields.extend(std::iter::repeat_n(String::new(), 3));
                fields.push(e.clone());
            }
        }
        w.write_record(fields)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a weighted graph of size `n` as `u v weight` lines.
pub fn write_graph<W: Write>(
    mut out: W,
    dist: &DegreeDistribution,
    n: u64,
    master: u64,
) -> std::io::Result<GraphSummary> {
    let (seed, mut rng) = replicate_stream(master, n, 0);
    let seq = sample_degree_sequence(n as usize, dist, &mut rng);
    let g = MultiGraph::build(&seq, &mut rng).map_err(std::io::Error::other)?;
    let wg = assign_weights(g, &mut rng);
    let mut self_loops = 0;
    for e in 0..wg.graph().edge_count() {
        let (a, b) = wg.graph().endpoints(e);
        self_loops += usize::from(a == b);
        writeln!(out, "{a} {b} {}", float(wg.weight(e)))?;
    }
    Ok(GraphSummary { n, seed, edges: wg.graph().edge_count(), self_loops, parity_fixed: seq.parity_fixed() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphSummary {
    pub n: u64,
    pub seed: u64,
    pub edges: usize,
    pub self_loops: usize,
    pub parity_fixed: bool,
}
