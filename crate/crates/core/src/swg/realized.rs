//! Growth on a fixed weighted multigraph.
//!
//! Every allowed stub carries the tentative weight `d(owner) + w(edge)` and the
//! lightest one is taken at each step, which is Dijkstra's algorithm run over
//! stubs. The second SWG sees stubs whose partner is a real allowed stub of
//! the first SWG with the reduced key `d₂(v) + w − (T₁ − d₁(u))`: the edge is
//! split so that the part beyond time `T₁` is charged to the second SWG. The
//! first such stub to be taken then yields the exact shortest path.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::oracle::WeightedGraph;

use super::{BilateralResult, StepCase, SwgError, SwgState, VertexRecord};

#[derive(Debug, Clone, Copy)]
struct Entry {
    key: f64,
    stub: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.total_cmp(&self.key).then(other.stub.cmp(&self.stub))
    }
}

enum Outcome {
    Grew,
    Connected { u: usize, v: usize, weight: f64, hop_v: u32 },
}

struct Growth<'a> {
    wg: &'a WeightedGraph,
    // 0: not allowed, 1 or 2: allowed stub of that SWG.
    side_of: Vec<u8>,
    artificial: Vec<bool>,
    dist: [Vec<f64>; 2],
    hop: [Vec<u32>; 2],
    t1: f64,
}

struct Side {
    k: u8,
    heap: BinaryHeap<Entry>,
    state: SwgState,
}

impl<'a> Growth<'a> {
    fn new(wg: &'a WeightedGraph) -> Self {
        let g = wg.graph();
        Self {
            wg,
            side_of: vec![0; g.total_stubs()],
            artificial: vec![false; g.total_stubs()],
            dist: [vec![f64::INFINITY; g.n()], vec![f64::INFINITY; g.n()]],
            hop: [vec![u32::MAX; g.n()], vec![u32::MAX; g.n()]],
            t1: 0.0,
        }
    }

    fn explore(&mut self, side: &mut Side, v: usize, skip: Option<u32>) {
        let g = self.wg.graph();
        let d = self.dist[side.k as usize - 1][v];
        for q in g.stubs_of(v) {
            if Some(q) == skip {
                continue;
            }
            self.side_of[q as usize] = side.k;
            let mut key = d + self.wg.stub_weight(q);
            if side.k == 2 {
                let pq = g.partner(q);
                if self.side_of[pq as usize] == 1 && !self.artificial[pq as usize] {
                    key -= self.t1 - self.dist[0][g.owner(pq)];
                }
            }
            side.heap.push(Entry { key, stub: q });
        }
    }

    fn start(&mut self, source: usize, k: u8) -> Side {
        let degree = self.wg.graph().degree(source);
        let mut side = Side { k, heap: BinaryHeap::new(), state: SwgState::new(source, degree) };
        self.dist[k as usize - 1][source] = 0.0;
        self.hop[k as usize - 1][source] = 0;
        self.explore(&mut side, source, None);
        side
    }

    fn step(&mut self, side: &mut Side) -> Result<Outcome, SwgError> {
        let Some(Entry { key, stub: c }) = side.heap.pop() else {
            return Err(SwgError::Exhausted { completed: side.state.steps() });
        };
        let g = self.wg.graph();
        let ki = side.k as usize - 1;
        let owner = g.owner(c);
        let hop = self.hop[ki][owner] + 1;
        self.side_of[c as usize] = 0;
        if self.artificial[c as usize] {
            side.state.push(StepCase::ArtificialConsumed, VertexRecord { vertex: None, hop, weight: key }, 0);
            return Ok(Outcome::Grew);
        }
        let p = g.partner(c);
        let ps = self.side_of[p as usize];
        if ps == side.k {
            self.artificial[p as usize] = true;
            side.state.push(StepCase::CycleClosed, VertexRecord { vertex: None, hop, weight: key }, 0);
            return Ok(Outcome::Grew);
        }
        if ps == 1 {
            return Ok(Outcome::Connected { u: g.owner(p), v: owner, weight: self.wg.stub_weight(c), hop_v: hop - 1 });
        }
        let v = g.owner(p);
        self.dist[ki][v] = key;
        self.hop[ki][v] = hop;
        side.state.push(StepCase::NewVertex, VertexRecord { vertex: Some(v), hop, weight: key }, g.degree(v) - 1);
        self.explore(side, v, Some(p));
        Ok(Outcome::Grew)
    }
}

/// Grows one SWG from `source` for `steps` steps on a fixed weighted graph.
pub fn grow_single(wg: &WeightedGraph, source: usize, steps: usize) -> Result<SwgState, SwgError> {
    if source >= wg.graph().n() {
        return Err(SwgError::VertexOutOfRange(source));
    }
    let mut gr = Growth::new(wg);
    let mut side = gr.start(source, 1);
    for _ in 0..steps {
        gr.step(&mut side)?;
    }
    Ok(side.state)
}

/// Bilateral growth on a fixed weighted graph; `wn` equals the shortest-path
/// weight between the sources.
pub fn grow_bilateral(wg: &WeightedGraph, src1: usize, src2: usize, a_n: usize) -> Result<BilateralResult, SwgError> {
    let (r, _, _) = grow_bilateral_traced(wg, src1, src2, a_n)?;
    Ok(r)
}

/// Like [`grow_bilateral`] but also returns both SWG traces.
pub fn grow_bilateral_traced(
    wg: &WeightedGraph,
    src1: usize,
    src2: usize,
    a_n: usize,
) -> Result<(BilateralResult, SwgState, SwgState), SwgError> {
    if src1 == src2 {
        return Err(SwgError::SameSource);
    }
    let n = wg.graph().n();
    if src1.max(src2) >= n {
        return Err(SwgError::VertexOutOfRange(src1.max(src2)));
    }
    let mut gr = Growth::new(wg);
    let mut one = gr.start(src1, 1);
    let mut exhausted = false;
    for _ in 0..a_n {
        match gr.step(&mut one) {
            Ok(_) => {}
            Err(SwgError::Exhausted { .. }) => {
                exhausted = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let t1 = one.state.time();
    gr.t1 = t1;
    if gr.dist[0][src2].is_finite() {
        let result = BilateralResult {
            src1,
            src2,
            a_n,
            ce: 0,
            h1: gr.hop[0][src2],
            h2: 0,
            hn: gr.hop[0][src2],
            wn: gr.dist[0][src2],
            t1,
            collision: (src2, src2),
            r_overshoot: one.state.overshoot(),
        };
        let empty = SwgState::new(src2, wg.graph().degree(src2));
        return Ok((result, one.state, empty));
    }
    if exhausted {
        return Err(SwgError::Exhausted { completed: one.state.steps() });
    }
    let mut two = gr.start(src2, 2);
    loop {
        match gr.step(&mut two) {
            Ok(Outcome::Grew) => {}
            Ok(Outcome::Connected { u, v, weight, hop_v }) => {
                let h1 = gr.hop[0][u];
                let h2 = hop_v + 1;
                let wn = gr.dist[0][u] + weight + gr.dist[1][v];
                let result = BilateralResult {
                    src1,
                    src2,
                    a_n,
                    ce: two.state.steps() + 1,
                    h1,
                    h2,
                    hn: h1 + h2,
                    wn,
                    t1,
                    collision: (u, v),
                    r_overshoot: one.state.overshoot() + two.state.overshoot(),
                };
                return Ok((result, one.state, two.state));
            }
            Err(SwgError::Exhausted { .. }) => return Err(SwgError::NotConnected),
            Err(e) => return Err(e),
        }
    }
}
