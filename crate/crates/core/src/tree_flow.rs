//! Flow on a tree with a prescribed degree sequence.
//!
//! At step `i` a uniformly chosen alive vertex dies and is replaced by `d_i`
//! children one generation deeper. After `m` steps there are
//! `s_m = d_1 + … + d_m − (m − 1)` alive vertices. The generation `G_m` of a
//! uniformly chosen alive vertex is a sum of independent Bernoulli(`d_i/s_i`)
//! indicators and the split time is `T_m = Σ E_i / s_i` with `E_i ~ Exp(1)`.

use rand::Rng;
use thiserror::Error;

use crate::rng::{exp1, index, open_unit};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("process dies at step {step}: alive count {alive} < 1")]
    DeadProcess { step: usize, alive: i64 },
    #[error("requested {m} steps but only {len} degrees were given")]
    TooFewDegrees { m: usize, len: usize },
    #[error("at least one step is required")]
    NoSteps,
}

/// Alive counts `s_i = d_1 + … + d_i − (i − 1)`.
pub fn s_values(degrees: &[u64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(degrees.len());
    let mut s = 1i64;
    for &d in degrees {
        s += d as i64 - 1;
        out.push(s);
    }
    out
}

fn checked_s_values(degrees: &[u64], m: usize) -> Result<Vec<i64>, TreeError> {
    if m == 0 {
        return Err(TreeError::NoSteps);
    }
    if m > degrees.len() {
        return Err(TreeError::TooFewDegrees { m, len: degrees.len() });
    }
    let s = s_values(&degrees[..m]);
    if let Some((i, &alive)) = s.iter().enumerate().find(|(_, &a)| a < 1) {
        return Err(TreeError::DeadProcess { step: i + 1, alive });
    }
    Ok(s)
}

/// Full record of one tree-flow sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeFlowTrace {
    pub degrees: Vec<u64>,
    pub alive_counts: Vec<i64>,
    pub indicators: Vec<bool>,
    pub exponentials: Vec<f64>,
    pub generation: u64,
    pub weight: f64,
}

impl TreeFlowTrace {
    /// CSV rows `i,d_i,s_i,I_i,E_i` (1-based `i`).
    pub fn csv_rows(&self) -> Vec<String> {
        (0..self.degrees.len())
            .map(|i| {
                format!(
                    "{},{},{},{},{:.16e}",
                    i + 1,
                    self.degrees[i],
                    self.alive_counts[i],
                    u8::from(self.indicators[i]),
                    self.exponentials[i]
                )
            })
            .collect()
    }
}

/// Samples the indicators and exponentials for the first `m` degrees.
pub fn trace<R: Rng + ?Sized>(degrees: &[u64], m: usize, rng: &mut R) -> Result<TreeFlowTrace, TreeError> {
    let s = checked_s_values(degrees, m)?;
    let mut indicators = Vec::with_capacity(m);
    let mut exponentials = Vec::with_capacity(m);
    let mut generation = 0;
    let mut weight = 0.0;
    for i in 0..m {
        let p = degrees[i] as f64 / s[i] as f64;
        let hit = i == 0 || open_unit(rng) <= p;
        let e = exp1(rng);
        generation += u64::from(hit);
        weight += e / s[i] as f64;
        indicators.push(hit);
        exponentials.push(e);
    }
    Ok(TreeFlowTrace { degrees: degrees[..m].to_vec(), alive_counts: s, indicators, exponentials, generation, weight })
}

/// `(G_m, T_m)` for the first `m` degrees.
pub fn sample_gm_tm<R: Rng + ?Sized>(degrees: &[u64], m: usize, rng: &mut R) -> Result<(u64, f64), TreeError> {
    let t = trace(degrees, m, rng)?;
    Ok((t.generation, t.weight))
}

/// Law of `G_m` via `P(G_{i+1}=k) = p P(G_i=k−1) + (1−p) P(G_i=k)` with
/// `p = d_{i+1}/s_{i+1}`. Entry `k` of the result is `P(G_m = k)`.
pub fn exact_generation_pmf(degrees: &[u64], m: usize) -> Result<Vec<f64>, TreeError> {
    let s = checked_s_values(degrees, m)?;
    let mut pmf = vec![0.0; m + 1];
    pmf[1] = 1.0;
    for i in 1..m {
        let p = degrees[i] as f64 / s[i] as f64;
        for k in (1..=i + 1).rev() {
            pmf[k] = p * pmf[k - 1] + (1.0 - p) * pmf[k];
        }
    }
    Ok(pmf)
}

/// Law of `G_m` by enumerating all indicator patterns. Exponential in `m`;
/// used as an independent check of [`exact_generation_pmf`] for `m ≤ 20`.
pub fn generation_pmf_enumerated(degrees: &[u64], m: usize) -> Result<Vec<f64>, TreeError> {
    let s = checked_s_values(degrees, m)?;
    assert!(m <= 20, "enumeration is limited to 20 steps");
    let p: Vec<f64> = (1..m).map(|i| degrees[i] as f64 / s[i] as f64).collect();
    let mut pmf = vec![0.0; m + 1];
    for mask in 0u32..(1 << (m - 1)) {
        let mut prob = 1.0;
        let mut ones = 1;
        for (b, &pi) in p.iter().enumerate() {
            if mask >> b & 1 == 1 {
                prob *= pi;
                ones += 1;
            } else {
                prob *= 1.0 - pi;
            }
        }
        pmf[ones] += prob;
    }
    Ok(pmf)
}

/// `Σ_{i≤m} 1/s_i = E[T_m]`.
pub fn expected_weight(degrees: &[u64], m: usize) -> Result<f64, TreeError> {
    Ok(checked_s_values(degrees, m)?.iter().map(|&s| 1.0 / s as f64).sum())
}

/// Explicit simulation of the tree. Returns the generation of a uniformly
/// chosen alive vertex after `m` splits together with the split times
/// `T_1, …, T_m`, where `T_i − T_{i−1} = E_i / (number alive after step i)`.
pub fn simulate_construction<R: Rng + ?Sized>(
    degrees: &[u64],
    m: usize,
    rng: &mut R,
) -> Result<(u64, Vec<f64>), TreeError> {
    checked_s_values(degrees, m)?;
    let mut alive: Vec<u64> = vec![0];
    let mut times = Vec::with_capacity(m);
    let mut t = 0.0;
    for &d in &degrees[..m] {
        let idx = index(rng, alive.len());
        let gen = alive.swap_remove(idx);
        alive.extend(std::iter::repeat_n(gen + 1, d as usize));
        t += exp1(rng) / alive.len() as f64;
        times.push(t);
    }
    let pick = alive[index(rng, alive.len())];
    Ok((pick, times))
}

/// Coupled draw of `(Ĝ_m, G_m)` from forward degrees `b_1, …, b_m`.
///
/// Both use the same uniforms: `G_m` adds `b_i / s_i` indicators while `Ĝ_m`
/// uses the smaller success probability `b_i / (b_1 + … + b_i)`, hence
/// `Ĝ_m ≤ G_m` pathwise. When the `b_i` are exchangeable,
/// `E[Ĝ_m] = Σ_{i≤m} 1/i`.
pub fn sample_hat_gm_coupled<R: Rng + ?Sized>(b: &[u64], m: usize, rng: &mut R) -> Result<(u64, u64), TreeError> {
    let s = checked_s_values(b, m)?;
    let mut hat = 1;
    let mut full = 1;
    let mut sum = b[0] as f64;
    for i in 1..m {
        sum += b[i] as f64;
        let u = open_unit(rng);
        let bi = b[i] as f64;
        hat += u64::from(u <= bi / sum);
        full += u64::from(u <= bi / s[i] as f64);
    }
    Ok((hat, full))
}

const SWEEP_CAPACITY: usize = 64;

#[derive(Clone, Copy)]
struct AliveSet {
    gens: [u8; SWEEP_CAPACITY],
    len: usize,
}

/// One node of the prefix tree of degree vectors.
#[derive(Debug, Clone)]
pub struct SweepNode {
    pub degrees: Vec<u64>,
}

/// Runs [`simulate_construction`]'s dynamics for every degree vector up to a
/// given length over a small alphabet, sharing simulated prefixes.
///
/// Each run walks the whole prefix tree once: the state reached for a vector
/// is extended independently by every admissible next degree, so every node
/// receives exactly one sample per run. Samples of distinct nodes within one
/// run are dependent; each node's samples across runs are i.i.d.
#[derive(Debug, Clone)]
pub struct ConstructionSweep {
    nodes: Vec<SweepNode>,
    roots: Vec<u32>,
    max_len: usize,
    last: Vec<u8>,
    child_range: Vec<(u32, u32)>,
    children: Vec<u32>,
    count_offset: Vec<usize>,
    counts: Vec<u64>,
    t_sum: Vec<f64>,
    t_sumsq: Vec<f64>,
    runs: u64,
}

impl ConstructionSweep {
    /// Enumerates all vectors of length `1..=max_len` over `alphabet` whose
    /// process stays alive.
    pub fn new(alphabet: &[u64], max_len: usize) -> Self {
        let max_d = alphabet.iter().copied().max().unwrap_or(0) as usize;
        assert!(max_d * max_len < SWEEP_CAPACITY, "alphabet or length too large for the sweep");
        let mut nodes: Vec<SweepNode> = Vec::new();
        let mut kids: Vec<Vec<u32>> = Vec::new();
        fn expand(
            nodes: &mut Vec<SweepNode>,
            kids: &mut Vec<Vec<u32>>,
            prefix: Vec<u64>,
            alive: i64,
            alphabet: &[u64],
            max_len: usize,
        ) -> Option<u32> {
            if alive < 1 {
                return None;
            }
            let id = nodes.len();
            nodes.push(SweepNode { degrees: prefix.clone() });
            kids.push(Vec::new());
            if prefix.len() < max_len {
                for &d in alphabet {
                    let mut next = prefix.clone();
                    next.push(d);
                    if let Some(c) = expand(nodes, kids, next, alive + d as i64 - 1, alphabet, max_len) {
                        kids[id].push(c);
                    }
                }
            }
            Some(id as u32)
        }
        let mut roots = Vec::new();
        for &d in alphabet {
            if let Some(r) = expand(&mut nodes, &mut kids, vec![d], d as i64, alphabet, max_len) {
                roots.push(r);
            }
        }
        let mut children = Vec::new();
        let mut child_range = Vec::with_capacity(nodes.len());
        for k in &kids {
            let start = children.len() as u32;
            children.extend_from_slice(k);
            child_range.push((start, children.len() as u32));
        }
        let mut count_offset = Vec::with_capacity(nodes.len() + 1);
        let mut total = 0;
        for nd in &nodes {
            count_offset.push(total);
            total += nd.degrees.len() + 1;
        }
        count_offset.push(total);
        let last = nodes.iter().map(|nd| *nd.degrees.last().expect("nonempty") as u8).collect();
        let k = nodes.len();
        Self {
            nodes,
            roots,
            max_len,
            last,
            child_range,
            children,
            count_offset,
            counts: vec![0; total],
            t_sum: vec![0.0; k],
            t_sumsq: vec![0.0; k],
            runs: 0,
        }
    }

    pub fn nodes(&self) -> &[SweepNode] {
        &self.nodes
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn runs(&self) -> u64 {
        self.runs
    }

    /// Generation counts of node `id`, indexed by generation.
    pub fn counts(&self, id: usize) -> &[u64] {
        &self.counts[self.count_offset[id]..self.count_offset[id + 1]]
    }

    /// Sample mean and standard error of `T_m` at node `id`.
    pub fn weight_mean_se(&self, id: usize) -> (f64, f64) {
        let n = self.runs as f64;
        let mean = self.t_sum[id] / n;
        let var = (self.t_sumsq[id] / n - mean * mean).max(0.0) * n / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    /// Adds the tallies of another sweep over the same alphabet and length.
    pub fn merge(&mut self, other: &ConstructionSweep) {
        assert_eq!(self.counts.len(), other.counts.len(), "sweeps differ in shape");
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
        self.t_sum.iter_mut().zip(&other.t_sum).for_each(|(a, b)| *a += b);
        self.t_sumsq.iter_mut().zip(&other.t_sumsq).for_each(|(a, b)| *a += b);
        self.runs += other.runs;
    }

    /// Adds `runs` passes over the prefix tree.
    pub fn run<R: Rng + ?Sized>(&mut self, runs: u64, rng: &mut R) {
        let start = AliveSet { gens: [0; SWEEP_CAPACITY], len: 1 };
        for _ in 0..runs {
            for i in 0..self.roots.len() {
                let r = self.roots[i] as usize;
                self.visit(r, &start, 0.0, rng);
            }
        }
        self.runs += runs;
    }

    fn visit<R: Rng + ?Sized>(&mut self, id: usize, parent: &AliveSet, t: f64, rng: &mut R) {
        let (a, b) = self.child_range[id];
        let d = self.last[id] as usize;
        if a == b {
            self.visit_leaf(id, parent, d, t, rng);
            return;
        }
        let mut state = *parent;
        let idx = index(rng, state.len);
        let gen = state.gens[idx];
        state.len -= 1;
        state.gens[idx] = state.gens[state.len];
        state.gens[state.len..state.len + d].fill(gen + 1);
        state.len += d;
        let t = t + exp1(rng) / state.len as f64;
        let pick = state.gens[index(rng, state.len)] as usize;
        self.counts[self.count_offset[id] + pick] += 1;
        self.t_sum[id] += t;
        self.t_sumsq[id] += t * t;
        for c in a..b {
            let child = self.children[c as usize] as usize;
            self.visit(child, &state, t, rng);
        }
    }

    /// Same dynamics as [`Self::visit`] without materialising the new state.
    fn visit_leaf<R: Rng + ?Sized>(&mut self, id: usize, parent: &AliveSet, d: usize, t: f64, rng: &mut R) {
        let len = parent.len;
        let idx = index(rng, len);
        let gen = parent.gens[idx];
        let new_len = len - 1 + d;
        let t = t + exp1(rng) / new_len as f64;
        let j = index(rng, new_len);
        let pick = if j + 1 >= len {
            gen + 1
        } else if j == idx {
            parent.gens[len - 1]
        } else {
            parent.gens[j]
        };
        self.counts[self.count_offset[id] + pick as usize] += 1;
        self.t_sum[id] += t;
        self.t_sumsq[id] += t * t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn s_values_examples() {
        assert_eq!(s_values(&[3, 2, 2]), vec![3, 4, 5]);
        assert_eq!(s_values(&[2]), vec![2]);
        assert_eq!(s_values(&[2, 0]), vec![2, 1]);
    }

    #[test]
    fn dead_process_detected() {
        let mut r = stream(0);
        assert_eq!(sample_gm_tm(&[1, 0], 2, &mut r).unwrap_err(), TreeError::DeadProcess { step: 2, alive: 0 });
        assert!(exact_generation_pmf(&[0], 1).is_err());
        assert!(simulate_construction(&[2, 0, 0], 3, &mut r).is_err());
    }

    #[test]
    fn exact_pmf_examples() {
        let p = exact_generation_pmf(&[2, 2], 2).unwrap();
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-15 && (p[2] - 2.0 / 3.0).abs() < 1e-15);
        let a = exact_generation_pmf(&[3, 2, 2], 3).unwrap();
        let b = generation_pmf_enumerated(&[3, 2, 2], 3).unwrap();
        for k in 0..=3 {
            assert!((a[k] - b[k]).abs() < 1e-14);
        }
        assert!((a[1] - 0.5 * 0.6).abs() < 1e-15);
        assert!((expected_weight(&[3, 2, 2], 3).unwrap() - 47.0 / 60.0).abs() < 1e-15);
    }

    #[test]
    fn first_step_is_generation_one() {
        let mut r = stream(9);
        for _ in 0..100 {
            assert_eq!(sample_gm_tm(&[5, 2], 1, &mut r).unwrap().0, 1);
            assert_eq!(simulate_construction(&[5, 2], 1, &mut r).unwrap().0, 1);
        }
    }

    #[test]
    fn sweep_enumerates_live_vectors() {
        let sweep = ConstructionSweep::new(&[0, 2, 3], 3);
        for node in sweep.nodes() {
            assert!(s_values(&node.degrees).iter().all(|&s| s >= 1));
        }
        // length-1: [2],[3]; length 2: 6 vectors, all alive
        assert_eq!(sweep.nodes().iter().filter(|n| n.degrees.len() == 2).count(), 6);
        assert!(!sweep.nodes().iter().any(|n| n.degrees[0] == 0));
    }
}
