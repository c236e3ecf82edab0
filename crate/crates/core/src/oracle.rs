//! Exponential edge weights and a textbook shortest-path oracle.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;

use crate::config_model::MultiGraph;
use crate::rng::exp1;

/// A multigraph with one positive weight per edge id.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    graph: MultiGraph,
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// Attaches explicit weights; panics unless there is one positive weight
    /// per edge.
    pub fn new(graph: MultiGraph, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), graph.edge_count(), "one weight per edge");
        assert!(weights.iter().all(|&w| w > 0.0), "weights must be positive");
        Self { graph, weights }
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, edge: usize) -> f64 {
        self.weights[edge]
    }

    /// Weight of the edge carrying `stub`.
    #[inline]
    pub fn stub_weight(&self, stub: u32) -> f64 {
        self.weights[self.graph.edge_of(stub)]
    }
}

/// I.i.d. Exp(1) weights, one per edge id, drawn in edge-id order.
pub fn assign_weights<R: Rng + ?Sized>(graph: MultiGraph, rng: &mut R) -> WeightedGraph {
    let weights = (0..graph.edge_count()).map(|_| exp1(rng)).collect();
    WeightedGraph { graph, weights }
}

/// Weight and hop count of a minimal-weight path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSummary {
    pub weight: f64,
    pub hops: u32,
}

#[derive(Debug, Clone, Copy)]
struct Label {
    weight: f64,
    hops: u32,
    vertex: u32,
}

impl Label {
    fn key(&self) -> (f64, u32, u32) {
        (self.weight, self.hops, self.vertex)
    }
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Label {}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Label {
    // Reversed so that BinaryHeap pops the smallest label.
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.key(), other.key());
        b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)).then(b.2.cmp(&a.2))
    }
}

fn better(w: f64, h: u32, bw: f64, bh: u32) -> bool {
    w < bw || (w == bw && h < bh)
}

/// Dijkstra with lazy re-insertion. Labels are compared by weight, then hop
/// count, then vertex id, which makes ties deterministic. Self-loops are
/// skipped; among parallel edges the lightest wins automatically.
pub fn shortest_path(wg: &WeightedGraph, src: usize, dst: usize) -> Option<PathSummary> {
    let g = wg.graph();
    if src == dst {
        return Some(PathSummary { weight: 0.0, hops: 0 });
    }
    let n = g.n();
    let mut best_w = vec![f64::INFINITY; n];
    let mut best_h = vec![u32::MAX; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    best_w[src] = 0.0;
    best_h[src] = 0;
    heap.push(Label { weight: 0.0, hops: 0, vertex: src as u32 });
    while let Some(Label { weight, hops, vertex }) = heap.pop() {
        let x = vertex as usize;
        if settled[x] {
            continue;
        }
        settled[x] = true;
        if x == dst {
            return Some(PathSummary { weight, hops });
        }
        for s in g.stubs_of(x) {
            let y = g.owner(g.partner(s));
            if y == x || settled[y] {
                continue;
            }
            let w = weight + wg.stub_weight(s);
            let h = hops + 1;
            if better(w, h, best_w[y], best_h[y]) {
                best_w[y] = w;
                best_h[y] = h;
                heap.push(Label { weight: w, hops: h, vertex: y as u32 });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn hand_examples() {
        let g = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let wg = WeightedGraph::new(g, vec![0.7, 0.3]);
        assert_eq!(shortest_path(&wg, 0, 1), Some(PathSummary { weight: 0.3, hops: 1 }));
        assert_eq!(shortest_path(&wg, 1, 1), Some(PathSummary { weight: 0.0, hops: 0 }));
        let g = MultiGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let wg = WeightedGraph::new(g, vec![0.2, 0.2, 0.5]);
        let p = shortest_path(&wg, 0, 2).unwrap();
        assert!((p.weight - 0.4).abs() < 1e-15);
        assert_eq!(p.hops, 2);
    }

    #[test]
    fn self_loops_ignored_and_unreachable() {
        let g = MultiGraph::from_edges(3, &[(0, 0), (1, 2)]).unwrap();
        let wg = WeightedGraph::new(g, vec![0.1, 1.0]);
        assert_eq!(shortest_path(&wg, 0, 2), None);
    }

    #[test]
    fn empty_graph_has_no_weights() {
        let g = MultiGraph::from_edges(2, &[]).unwrap();
        let wg = assign_weights(g, &mut stream(2));
        assert!(wg.weights().is_empty());
    }

    #[test]
    fn ties_prefer_fewer_hops() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let wg = WeightedGraph::new(g, vec![0.5, 0.5, 1.0]);
        assert_eq!(shortest_path(&wg, 0, 2).unwrap().hops, 1);
    }
}
