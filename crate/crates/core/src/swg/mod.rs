//! Growth of shortest-weight graphs (SWGs) with artificial stubs.
//!
//! A SWG is grown one stub at a time. Each step draws an allowed stub (a stub
//! incident to the SWG that has not been paired yet, or an artificial stub):
//!
//! 1. a real stub whose partner is outside the SWG adds a new real vertex with
//!    forward degree `D_v − 1`;
//! 2. a real stub whose partner is itself allowed closes a cycle: the partner
//!    is turned into an artificial stub and the step has forward degree 0;
//! 3. an artificial stub is consumed with forward degree 0.
//!
//! In [`process`] mode pairings are drawn lazily from the pool of free stubs
//! and the allowed stub is chosen uniformly, which by memorylessness has the
//! law of the minimal-weight stub. In [`realized`] mode the weighted graph is
//! fixed up front and the stub completing the lightest tentative path is taken.

pub mod process;
pub mod realized;

use thiserror::Error;

use crate::config_model::GraphError;
use crate::degree_model::{DegreeDistribution, Nu};
use crate::stats::{self, StatsError};

pub use process::StubPool;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SwgError {
    #[error("allowed stubs ran out after {completed} steps")]
    Exhausted { completed: usize },
    #[error("sources lie in different components")]
    NotConnected,
    #[error("the two sources must differ")]
    SameSource,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl SwgError {
    /// Short tag for output files.
    pub fn reason(&self) -> &'static str {
        match self {
            SwgError::Exhausted { .. } => "exhausted",
            SwgError::NotConnected => "not_connected",
            SwgError::SameSource => "same_source",
            SwgError::VertexOutOfRange(_) => "vertex_out_of_range",
            SwgError::Graph(GraphError::TooManyStubs(_)) => "too_many_stubs",
            SwgError::Graph(_) => "graph_error",
        }
    }
}

/// Which of the three growth cases a step fell into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepCase {
    NewVertex,
    CycleClosed,
    ArtificialConsumed,
}

/// Vertex attached at one growth step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexRecord {
    /// `None` for artificial vertices.
    pub vertex: Option<usize>,
    /// Hop distance from the source.
    pub hop: u32,
    /// Weight distance from the source (the growth time of the step).
    pub weight: f64,
}

/// Trace of a single SWG.
///
/// Index 0 of `forward_degrees`, `alive_counts` and `records` describes the
/// source; index `m ≥ 1` describes step `m`. Thus `forward_degrees` is
/// `[D_source, B_2, …]` and `alive_counts` equals
/// `tree_flow::s_values(forward_degrees)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwgState {
    pub source: usize,
    pub forward_degrees: Vec<u64>,
    pub alive_counts: Vec<u64>,
    pub records: Vec<VertexRecord>,
    pub cases: Vec<StepCase>,
    /// `r_steps[k-1] = R_k`, the step at which the SWG first holds `k+1` real vertices.
    pub r_steps: Vec<usize>,
    /// Current number of artificial stubs.
    pub artificial: usize,
    /// Largest number of artificial stubs seen.
    pub max_artificial: usize,
}

impl SwgState {
    pub(crate) fn new(source: usize, degree: u64) -> Self {
        Self {
            source,
            forward_degrees: vec![degree],
            alive_counts: vec![degree],
            records: vec![VertexRecord { vertex: Some(source), hop: 0, weight: 0.0 }],
            cases: Vec::new(),
            r_steps: Vec::new(),
            artificial: 0,
            max_artificial: 0,
        }
    }

    /// Number of growth steps taken.
    pub fn steps(&self) -> usize {
        self.cases.len()
    }

    /// Current `S_m`.
    pub fn alive(&self) -> u64 {
        *self.alive_counts.last().expect("source recorded")
    }

    /// Current growth time.
    pub fn time(&self) -> f64 {
        self.records.last().expect("source recorded").weight
    }

    /// Number of real vertices, the source included.
    pub fn real_vertices(&self) -> usize {
        self.r_steps.len() + 1
    }

    pub(crate) fn push(&mut self, case: StepCase, record: VertexRecord, forward: u64) {
        let step = self.cases.len() + 1;
        self.cases.push(case);
        self.records.push(record);
        self.forward_degrees.push(forward);
        let s = self.alive() + forward - 1;
        self.alive_counts.push(s);
        match case {
            StepCase::NewVertex => self.r_steps.push(step),
            StepCase::CycleClosed => {
                self.artificial += 1;
                self.max_artificial = self.max_artificial.max(self.artificial);
            }
            StepCase::ArtificialConsumed => self.artificial -= 1,
        }
    }

    /// Steps that did not add a real vertex.
    pub fn overshoot(&self) -> usize {
        self.steps() + 1 - self.real_vertices()
    }
}

/// Outcome of one bilateral growth.
#[derive(Debug, Clone, PartialEq)]
pub struct BilateralResult {
    pub src1: usize,
    pub src2: usize,
    pub a_n: usize,
    /// Steps of the second SWG up to and including the connecting one; 0 when
    /// the second source already lies in the first SWG.
    pub ce: usize,
    /// Hop distance of the connecting edge's first endpoint from `src1`.
    pub h1: u32,
    /// Hop distance from `src2` to the connecting edge, the edge itself included.
    pub h2: u32,
    pub hn: u32,
    pub wn: f64,
    /// Time of the first SWG after `a_n` steps.
    pub t1: f64,
    /// Endpoints `(u, v)` of the connecting edge, `u` in the first SWG; for
    /// `ce = 0` both equal `src2`.
    pub collision: (usize, usize),
    /// Steps of both SWGs that did not add a real vertex.
    pub r_overshoot: usize,
}

impl BilateralResult {
    /// True when the second source was already inside the first SWG.
    pub fn direct_containment(&self) -> bool {
        self.ce == 0
    }
}

/// `CE_n / a_n` for every result together with, when `ν` is finite, the KS
/// distance to the exponential law with mean `μ/(ν−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionStats {
    pub ratios: Vec<f64>,
    pub reference_mean: Option<f64>,
    pub ks: Option<stats::KsResult>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConnectionError {
    #[error("no results")]
    EmptyInput,
    #[error("ν is infinite, no exponential reference")]
    InfiniteNu,
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Law of `CE_n/a_n`. With `require_reference` set, laws with infinite `ν`
/// are rejected instead of returning ratios only.
pub fn connection_time_stats(
    results: &[BilateralResult],
    dist: &DegreeDistribution,
    require_reference: bool,
) -> Result<ConnectionStats, ConnectionError> {
    if results.is_empty() {
        return Err(ConnectionError::EmptyInput);
    }
    let ratios: Vec<f64> = results.iter().map(|r| r.ce as f64 / r.a_n as f64).collect();
    match dist.nu() {
        Nu::Finite(nu) if nu > 1.0 => {
            let mean = dist.mu() / (nu - 1.0);
            let ks = stats::ks_one_sample(&ratios, |x| if x <= 0.0 { 0.0 } else { 1.0 - (-x / mean).exp() })?;
            Ok(ConnectionStats { ratios, reference_mean: Some(mean), ks: Some(ks) })
        }
        _ if require_reference => Err(ConnectionError::InfiniteNu),
        _ => Ok(ConnectionStats { ratios, reference_mean: None, ks: None }),
    }
}
