//! Configuration-model multigraphs built by uniform stub matching.

use std::collections::VecDeque;
use std::io::{self, Write};
use std::ops::Range;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::degree_model::DegreeDistribution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("stub total {0} is odd")]
    OddStubTotal(u64),
    #[error("stub total {0} does not fit in 32-bit stub indices")]
    TooManyStubs(u64),
    #[error("degree {degree} at vertex {vertex} is below 2")]
    DegreeBelowTwo { vertex: usize, degree: u64 },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
}

/// Degrees `D_1, …, D_n` of a configuration model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<u64>,
    parity_fixed: bool,
}

impl DegreeSequence {
    /// Wraps a degree vector; every entry must be at least 2. No parity fix
    /// is applied.
    pub fn new(degrees: Vec<u64>) -> Result<Self, GraphError> {
        if let Some((vertex, &degree)) = degrees.iter().enumerate().find(|(_, &d)| d < 2) {
            return Err(GraphError::DegreeBelowTwo { vertex, degree });
        }
        Ok(Self { degrees, parity_fixed: false })
    }

    /// Wraps any degree vector, including degrees 0 and 1. For small
    /// hand-built test graphs.
    pub fn new_test_only(degrees: Vec<u64>) -> Self {
        Self { degrees, parity_fixed: false }
    }

    /// Increments the last entry when the total is odd.
    pub fn fix_parity(&mut self) {
        if self.total_stubs() % 2 == 1 {
            *self.degrees.last_mut().expect("nonempty") += 1;
            self.parity_fixed = true;
        }
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn parity_fixed(&self) -> bool {
        self.parity_fixed
    }

    /// `L_n = Σ D_i`, saturating.
    pub fn total_stubs(&self) -> u64 {
        self.degrees.iter().fold(0u64, |a, &d| a.saturating_add(d))
    }

    /// Prefix offsets: stubs of vertex `v` are `offsets[v]..offsets[v+1]`.
    pub fn offsets(&self) -> Result<Vec<u32>, GraphError> {
        let total = self.total_stubs();
        if total > u32::MAX as u64 - 1 {
            return Err(GraphError::TooManyStubs(total));
        }
        let mut off = Vec::with_capacity(self.degrees.len() + 1);
        let mut acc = 0u32;
        off.push(0);
        for &d in &self.degrees {
            acc += d as u32;
            off.push(acc);
        }
        Ok(off)
    }
}

/// Draws `n` i.i.d. degrees and applies the parity fix.
pub fn sample_degree_sequence<R: Rng + ?Sized>(n: usize, dist: &DegreeDistribution, rng: &mut R) -> DegreeSequence {
    assert!(n >= 1, "degree sequence needs at least one vertex");
    let degrees = (0..n).map(|_| dist.sample(rng)).collect();
    let mut seq = DegreeSequence { degrees, parity_fixed: false };
    seq.fix_parity();
    seq
}

/// A realized configuration-model multigraph.
///
/// Stubs of vertex `v` are the contiguous range `offsets[v]..offsets[v+1]`;
/// the pairing is an involution without fixed points. Edge `e` joins stubs
/// `edges[e].0` and `edges[e].1`.
#[derive(Debug, Clone)]
pub struct MultiGraph {
    offsets: Vec<u32>,
    owner: Vec<u32>,
    partner: Vec<u32>,
    edge_of: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl MultiGraph {
    /// Uniform perfect matching of the stubs: shuffle, then pair positions
    /// `(2k, 2k+1)` into edge `k`.
    pub fn build<R: Rng + ?Sized>(seq: &DegreeSequence, rng: &mut R) -> Result<Self, GraphError> {
        let total = seq.total_stubs();
        if total % 2 == 1 {
            return Err(GraphError::OddStubTotal(total));
        }
        let offsets = seq.offsets()?;
        let mut perm: Vec<u32> = (0..total as u32).collect();
        perm.shuffle(rng);
        let pairs: Vec<(u32, u32)> = perm.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        Ok(Self::assemble(offsets, pairs))
    }

    /// Builds a graph from an explicit edge list over vertices `0..n`.
    pub fn from_edges(n: usize, edge_list: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut deg = vec![0u64; n];
        for &(u, v) in edge_list {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange(w));
                }
                deg[w] += 1;
            }
        }
        let seq = DegreeSequence::new_test_only(deg);
        let offsets = seq.offsets()?;
        let mut next: Vec<u32> = offsets[..n].to_vec();
        let mut pairs = Vec::with_capacity(edge_list.len());
        for &(u, v) in edge_list {
            let a = next[u];
            next[u] += 1;
            let b = next[v];
            next[v] += 1;
            pairs.push((a, b));
        }
        Ok(Self::assemble(offsets, pairs))
    }

    fn assemble(offsets: Vec<u32>, pairs: Vec<(u32, u32)>) -> Self {
        let total = *offsets.last().unwrap_or(&0) as usize;
        let mut owner = vec![0u32; total];
        for v in 0..offsets.len() - 1 {
            for s in offsets[v]..offsets[v + 1] {
                owner[s as usize] = v as u32;
            }
        }
        let mut partner = vec![0u32; total];
        let mut edge_of = vec![0u32; total];
        for (e, &(a, b)) in pairs.iter().enumerate() {
            partner[a as usize] = b;
            partner[b as usize] = a;
            edge_of[a as usize] = e as u32;
            edge_of[b as usize] = e as u32;
        }
        Self { offsets, owner, partner, edge_of, edges: pairs }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_stubs(&self) -> usize {
        self.owner.len()
    }

    pub fn degree(&self, v: usize) -> u64 {
        (self.offsets[v + 1] - self.offsets[v]) as u64
    }

    pub fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    pub fn stubs_of(&self, v: usize) -> Range<u32> {
        self.offsets[v]..self.offsets[v + 1]
    }

    #[inline]
    pub fn owner(&self, stub: u32) -> usize {
        self.owner[stub as usize] as usize
    }

    #[inline]
    pub fn partner(&self, stub: u32) -> u32 {
        self.partner[stub as usize]
    }

    #[inline]
    pub fn edge_of(&self, stub: u32) -> usize {
        self.edge_of[stub as usize] as usize
    }

    /// Endpoint vertices of edge `e`.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let (a, b) = self.edges[e];
        (self.owner(a), self.owner(b))
    }

    /// `(neighbor, edge id)` for every stub of `v`; self-loops appear twice.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.stubs_of(v).map(move |s| (self.owner(self.partner(s)), self.edge_of(s)))
    }

    /// Recomputed degree of every vertex, counting self-loops twice.
    pub fn recomputed_degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.n()];
        for e in 0..self.edges.len() {
            let (u, v) = self.endpoints(e);
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Writes `u v edge_id` lines in edge-id order.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for e in 0..self.edges.len() {
            let (u, v) = self.endpoints(e);
            writeln!(out, "{u} {v} {e}")?;
        }
        Ok(())
    }
}

/// Number of edges on a shortest path from `u` to `v`, or `None` when they
/// lie in different components.
pub fn bfs_distance(g: &MultiGraph, u: usize, v: usize) -> Option<u32> {
    if u == v {
        return Some(0);
    }
    let mut dist = vec![u32::MAX; g.n()];
    let mut queue = VecDeque::new();
    dist[u] = 0;
    queue.push_back(u);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x];
        for (y, _) in g.neighbors(x) {
            if dist[y] == u32::MAX {
                if y == v {
                    return Some(dx + 1);
                }
                dist[y] = dx + 1;
                queue.push_back(y);
            }
        }
    }
    None
}
