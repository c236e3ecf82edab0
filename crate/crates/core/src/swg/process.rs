//! Annealed growth: stubs are paired lazily while the SWGs grow.

use rand::Rng;

use crate::config_model::{DegreeSequence, GraphError};
use crate::rng::{exp1, index};

use super::{BilateralResult, StepCase, SwgError, SwgState, VertexRecord};

const NONE: u32 = u32::MAX;
const ARTIFICIAL: u32 = u32::MAX;
const SIDE_BIT: u32 = 1 << 31;

/// Pool of unpaired stubs for one degree sequence.
///
/// Free stubs live in a permutation array with a position map, so removal of
/// a specific stub and removal of a uniform stub are both O(1). The pool can
/// be reset in time proportional to the work done since the last reset, which
/// makes many growths on one degree sequence cheap. Each growth samples a
/// fresh pairing, independent of earlier growths on the same pool.
#[derive(Debug, Clone)]
pub struct StubPool {
    offsets: Vec<u32>,
    free_val: Vec<u32>,
    free_pos: Vec<u32>,
    free_len: u32,
    // Per stub: NONE, or side bit | index into that side's allowed list.
    slot: Vec<u32>,
    // Per vertex: NONE, or side bit | record index.
    mark: Vec<u32>,
    touched_stubs: Vec<u32>,
    touched_vertices: Vec<u32>,
}

#[derive(Debug, Clone, Copy)]
struct Allowed {
    stub: u32,
    owner: u32,
    hop: u32,
}

struct Side {
    bit: u32,
    allowed: Vec<Allowed>,
    state: SwgState,
}

enum Outcome {
    Grew,
    Connected { own: Allowed, other_slot: u32, time: f64 },
}

impl StubPool {
    pub fn new(seq: &DegreeSequence) -> Result<Self, GraphError> {
        let total = seq.total_stubs();
        if total % 2 == 1 {
            return Err(GraphError::OddStubTotal(total));
        }
        let offsets = seq.offsets()?;
        let total = total as u32;
        Ok(Self {
            free_val: (0..total).collect(),
            free_pos: (0..total).collect(),
            free_len: total,
            slot: vec![NONE; total as usize],
            mark: vec![NONE; seq.n()],
            touched_stubs: Vec::new(),
            touched_vertices: Vec::new(),
            offsets,
        })
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn total_stubs(&self) -> u32 {
        self.free_val.len() as u32
    }

    pub fn degree(&self, v: usize) -> u64 {
        (self.offsets[v + 1] - self.offsets[v]) as u64
    }

    /// Marks every stub free again. Every growth starts with a reset, so
    /// calling this by hand is never required.
    pub fn reset(&mut self) {
        for &s in &self.touched_stubs {
            self.slot[s as usize] = NONE;
        }
        for &v in &self.touched_vertices {
            self.mark[v as usize] = NONE;
        }
        self.touched_stubs.clear();
        self.touched_vertices.clear();
        self.free_len = self.free_val.len() as u32;
    }

    #[inline]
    fn owner(&self, stub: u32) -> usize {
        self.offsets.partition_point(|&o| o <= stub) - 1
    }

    #[inline]
    fn remove_free(&mut self, stub: u32) {
        let p = self.free_pos[stub as usize];
        let last = self.free_len - 1;
        let y = self.free_val[last as usize];
        self.free_val[p as usize] = y;
        self.free_pos[y as usize] = p;
        self.free_val[last as usize] = stub;
        self.free_pos[stub as usize] = last;
        self.free_len = last;
    }

    #[inline]
    fn take_uniform<R: Rng + ?Sized>(&mut self, rng: &mut R) -> u32 {
        let p = index(rng, self.free_len as usize);
        let stub = self.free_val[p];
        self.remove_free(stub);
        stub
    }

    #[inline]
    fn set_slot(&mut self, stub: u32, value: u32) {
        if self.slot[stub as usize] == NONE {
            self.touched_stubs.push(stub);
        }
        self.slot[stub as usize] = value;
    }

    fn explore(&mut self, side: &mut Side, v: usize, hop: u32, skip: u32) {
        self.touched_vertices.push(v as u32);
        self.mark[v] = side.bit | (side.state.records.len() as u32 - 1);
        for s in self.offsets[v]..self.offsets[v + 1] {
            if s == skip {
                continue;
            }
            let idx = side.allowed.len() as u32;
            self.set_slot(s, side.bit | idx);
            side.allowed.push(Allowed { stub: s, owner: v as u32, hop });
        }
    }

    fn start(&mut self, source: usize, bit: u32) -> Side {
        let mut side = Side { bit, allowed: Vec::new(), state: SwgState::new(source, self.degree(source)) };
        self.explore(&mut side, source, 0, NONE);
        side
    }

    fn step<R: Rng + ?Sized>(&mut self, side: &mut Side, rng: &mut R) -> Result<Outcome, SwgError> {
        let s = side.allowed.len();
        if s == 0 {
            return Err(SwgError::Exhausted { completed: side.state.steps() });
        }
        let time = side.state.time() + exp1(rng) / s as f64;
        let i = index(rng, s);
        let entry = side.allowed.swap_remove(i);
        if i < side.allowed.len() {
            let moved = side.allowed[i].stub;
            if moved != ARTIFICIAL {
                self.slot[moved as usize] = side.bit | i as u32;
            }
        }
        let hop = entry.hop + 1;
        if entry.stub == ARTIFICIAL {
            side.state.push(StepCase::ArtificialConsumed, VertexRecord { vertex: None, hop, weight: time }, 0);
            return Ok(Outcome::Grew);
        }
        let chosen = entry.stub;
        self.slot[chosen as usize] = NONE;
        self.remove_free(chosen);
        let paired = self.take_uniform(rng);
        let ps = self.slot[paired as usize];
        if ps != NONE {
            if ps & SIDE_BIT == side.bit {
                self.slot[paired as usize] = NONE;
                side.allowed[(ps & !SIDE_BIT) as usize].stub = ARTIFICIAL;
                side.state.push(StepCase::CycleClosed, VertexRecord { vertex: None, hop, weight: time }, 0);
                return Ok(Outcome::Grew);
            }
            return Ok(Outcome::Connected { own: entry, other_slot: ps & !SIDE_BIT, time });
        }
        let v = self.owner(paired);
        debug_assert_eq!(self.mark[v], NONE, "unexplored vertex expected");
        let forward = self.degree(v) - 1;
        side.state.push(StepCase::NewVertex, VertexRecord { vertex: Some(v), hop, weight: time }, forward);
        self.explore(side, v, hop, paired);
        Ok(Outcome::Grew)
    }

    /// Grows one SWG from `source` for `steps` steps.
    pub fn grow_single<R: Rng + ?Sized>(
        &mut self,
        source: usize,
        steps: usize,
        rng: &mut R,
    ) -> Result<SwgState, SwgError> {
        if source >= self.n() {
            return Err(SwgError::VertexOutOfRange(source));
        }
        self.reset();
        let mut side = self.start(source, 0);
        for _ in 0..steps {
            self.step(&mut side, rng)?;
        }
        Ok(side.state)
    }

    /// Grows the SWG of `src1` for `a_n` steps, then the SWG of `src2` on the
    /// shared pool until it pairs with a real allowed stub of the first.
    pub fn grow_bilateral<R: Rng + ?Sized>(
        &mut self,
        src1: usize,
        src2: usize,
        a_n: usize,
        rng: &mut R,
    ) -> Result<BilateralResult, SwgError> {
        let (result, _, _) = self.grow_bilateral_traced(src1, src2, a_n, rng)?;
        Ok(result)
    }

    /// Like [`StubPool::grow_bilateral`] but also returns both SWG traces.
    pub fn grow_bilateral_traced<R: Rng + ?Sized>(
        &mut self,
        src1: usize,
        src2: usize,
        a_n: usize,
        rng: &mut R,
    ) -> Result<(BilateralResult, SwgState, SwgState), SwgError> {
        if src1 == src2 {
            return Err(SwgError::SameSource);
        }
        if src1.max(src2) >= self.n() {
            return Err(SwgError::VertexOutOfRange(src1.max(src2)));
        }
        self.reset();
        let mut one = self.start(src1, 0);
        let mut exhausted = false;
        for _ in 0..a_n {
            match self.step(&mut one, rng) {
                Ok(_) => {}
                Err(SwgError::Exhausted { .. }) => {
                    exhausted = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let t1 = one.state.time();
        let m2 = self.mark[src2];
        if m2 != NONE {
            let rec = one.state.records[m2 as usize];
            let result = BilateralResult {
                src1,
                src2,
                a_n,
                ce: 0,
                h1: rec.hop,
                h2: 0,
                hn: rec.hop,
                wn: rec.weight,
                t1,
                collision: (src2, src2),
                r_overshoot: one.state.overshoot(),
            };
            let empty = SwgState::new(src2, self.degree(src2));
            return Ok((result, one.state, empty));
        }
        if exhausted {
            return Err(SwgError::Exhausted { completed: one.state.steps() });
        }
        let mut two = self.start(src2, SIDE_BIT);
        loop {
            match self.step(&mut two, rng) {
                Ok(Outcome::Grew) => {}
                Ok(Outcome::Connected { own, other_slot, time: t2 }) => {
                    let other = one.allowed[other_slot as usize];
                    let ce = two.state.steps() + 1;
                    let h1 = other.hop;
                    let h2 = own.hop + 1;
                    let result = BilateralResult {
                        src1,
                        src2,
                        a_n,
                        ce,
                        h1,
                        h2,
                        hn: h1 + h2,
                        wn: t1 + t2,
                        t1,
                        collision: (other.owner as usize, own.owner as usize),
                        r_overshoot: one.state.overshoot() + two.state.overshoot(),
                    };
                    return Ok((result, one.state, two.state));
                }
                Err(SwgError::Exhausted { .. }) => return Err(SwgError::NotConnected),
                Err(e) => return Err(e),
            }
        }
    }
}
