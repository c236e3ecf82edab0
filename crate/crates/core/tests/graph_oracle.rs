use fppcm_core::config_model::{bfs_distance, sample_degree_sequence, GraphError};
use fppcm_core::oracle::{assign_weights, shortest_path, PathSummary};
use fppcm_core::rng::{index, stream};
use fppcm_core::{DegreeDistribution, DegreeSequence, MultiGraph, WeightedGraph};
use proptest::prelude::*;

#[test]
fn degree_sequence_examples() {
    let mut rng = stream(1);
    let two = DegreeDistribution::explicit([(2, 1.0)]).unwrap();
    let s = sample_degree_sequence(3, &two, &mut rng);
    assert_eq!(s.degrees(), &[2, 2, 2]);
    assert!(!s.parity_fixed());
    let three = DegreeDistribution::explicit([(3, 1.0)]).unwrap();
    let s = sample_degree_sequence(3, &three, &mut rng);
    assert_eq!(s.degrees(), &[3, 3, 4]);
    assert!(s.parity_fixed());
}

#[test]
fn max_degree_scales_like_n_two_thirds() {
    let d = DegreeDistribution::pareto(2.5).unwrap();
    let n = 10_000;
    let mut maxima: Vec<u64> = (0..100)
        .map(|r| {
            let mut rng = stream(100 + r);
            *sample_degree_sequence(n, &d, &mut rng).degrees().iter().max().unwrap()
        })
        .collect();
    maxima.sort_unstable();
    let median = (maxima[49] + maxima[50]) as f64 / 2.0;
    let scale = (n as f64).powf(2.0 / 3.0);
    assert!(median >= 0.2 * scale && median <= 5.0 * scale, "median {median}");
}

#[test]
fn build_rejects_odd_total() {
    let seq = DegreeSequence::new_test_only(vec![2, 3]);
    let mut rng = stream(2);
    assert_eq!(MultiGraph::build(&seq, &mut rng).unwrap_err(), GraphError::OddStubTotal(5));
    assert!(matches!(DegreeSequence::new(vec![2, 1]), Err(GraphError::DegreeBelowTwo { vertex: 1, degree: 1 })));
}

#[test]
fn single_vertex_forms_self_loop() {
    let seq = DegreeSequence::new(vec![2]).unwrap();
    let g = MultiGraph::build(&seq, &mut stream(3)).unwrap();
    assert_eq!(g.edge_count(), 1);
    assert_eq!(g.endpoints(0), (0, 0));
}

#[test]
fn parallel_pair_frequency_is_two_thirds() {
    let seq = DegreeSequence::new(vec![2, 2]).unwrap();
    let mut rng = stream(4);
    let runs = 100_000;
    let parallel = (0..runs)
        .filter(|_| {
            let g = MultiGraph::build(&seq, &mut rng).unwrap();
            (0..2).all(|e| {
                let (a, b) = g.endpoints(e);
                a != b
            })
        })
        .count() as f64;
    let p = parallel / runs as f64;
    let se = (2.0 / 9.0 / runs as f64).sqrt();
    assert!((p - 2.0 / 3.0).abs() < 3.0 * se, "p = {p}");
}

#[test]
fn bfs_examples() {
    let g = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
    assert_eq!(bfs_distance(&g, 0, 0), Some(0));
    assert_eq!(bfs_distance(&g, 0, 1), Some(1));
    let path = MultiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    assert_eq!(path.recomputed_degrees(), vec![1, 2, 1]);
    assert_eq!(bfs_distance(&path, 0, 2), Some(2));
    let split = MultiGraph::from_edges(4, &[(0, 0), (1, 1), (2, 3)]).unwrap();
    assert_eq!(bfs_distance(&split, 0, 2), None);
}

#[test]
fn edge_list_export() {
    let g = MultiGraph::from_edges(3, &[(0, 1), (2, 2)]).unwrap();
    let mut out = Vec::new();
    g.write_edge_list(&mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "0 1 0\n2 2 1\n");
}

#[test]
fn connectivity_fraction_increases_with_n() {
    let d = DegreeDistribution::pareto(4.0).unwrap();
    let reps = 2000;
    let fractions: Vec<f64> = [100usize, 1000, 10_000]
        .iter()
        .map(|&n| {
            let connected = (0..reps)
                .filter(|&r| {
                    let mut rng = stream(1_000_000 + n as u64 * 10_000 + r);
                    let seq = sample_degree_sequence(n, &d, &mut rng);
                    let g = MultiGraph::build(&seq, &mut rng).unwrap();
                    let u = index(&mut rng, n);
                    let v = (u + 1 + index(&mut rng, n - 1)) % n;
                    bfs_distance(&g, u, v).is_some()
                })
                .count();
            connected as f64 / reps as f64
        })
        .collect();
    assert!(fractions.windows(2).all(|w| w[1] >= w[0]), "{fractions:?}");
    assert!(fractions[2] > 0.95, "{fractions:?}");
}

#[test]
fn exponential_weights() {
    let empty = MultiGraph::from_edges(2, &[]).unwrap();
    assert!(assign_weights(empty, &mut stream(5)).weights().is_empty());
    let n = 1_000_000;
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i % 100, (i + 1) % 100)).collect();
    let g = MultiGraph::from_edges(100, &edges).unwrap();
    let wg = assign_weights(g, &mut stream(6));
    let w = wg.weights();
    assert!(w.iter().all(|&x| x > 0.0));
    let mean = w.iter().sum::<f64>() / n as f64;
    assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt(), "mean {mean}");
    let p = w.iter().filter(|&&x| x > 1.0).count() as f64 / n as f64;
    let q = (-1.0f64).exp();
    assert!((p - q).abs() < 3.0 * (q * (1.0 - q) / n as f64).sqrt(), "p {p}");
}

#[test]
fn shortest_path_hand_examples() {
    let g = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
    let wg = WeightedGraph::new(g, vec![0.3, 0.7]);
    assert_eq!(shortest_path(&wg, 0, 1), Some(PathSummary { weight: 0.3, hops: 1 }));
    assert_eq!(shortest_path(&wg, 0, 0), Some(PathSummary { weight: 0.0, hops: 0 }));
    let g = MultiGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    let wg = WeightedGraph::new(g, vec![0.2, 0.2, 0.5]);
    let p = shortest_path(&wg, 0, 2).unwrap();
    assert!((p.weight - 0.4).abs() < 1e-15);
    assert_eq!(p.hops, 2);
}

/// Minimum over all simple paths of (weight, hops), by exhaustive DFS.
fn brute_force(n: usize, edges: &[(usize, usize)], w: &[f64], src: usize, dst: usize) -> Option<(f64, u32)> {
    fn dfs(
        x: usize,
        dst: usize,
        edges: &[(usize, usize)],
        w: &[f64],
        seen: &mut Vec<bool>,
        acc: (f64, u32),
        best: &mut Option<(f64, u32)>,
    ) {
        if x == dst {
            if best.is_none_or(|b| acc.0 < b.0 || (acc.0 == b.0 && acc.1 < b.1)) {
                *best = Some(acc);
            }
            return;
        }
        for (e, &(a, b)) in edges.iter().enumerate() {
            let y = if a == x {
                b
            } else if b == x {
                a
            } else {
                continue;
            };
            if seen[y] {
                continue;
            }
            seen[y] = true;
            dfs(y, dst, edges, w, seen, (acc.0 + w[e], acc.1 + 1), best);
            seen[y] = false;
        }
    }
    let mut seen = vec![false; n];
    seen[src] = true;
    let mut best = None;
    dfs(src, dst, edges, w, &mut seen, (0.0, 0), &mut best);
    best
}

fn small_weighted_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<f64>)> {
    (2usize..=6).prop_flat_map(|n| {
        prop::collection::vec(((0..n), (0..n), 0.01f64..5.0), 0..=9).prop_map(move |es| {
            let edges = es.iter().map(|&(a, b, _)| (a, b)).collect();
            let w = es.iter().map(|&(_, _, x)| x).collect();
            (n, edges, w)
        })
    })
}

proptest! {
    #[test]
    fn dijkstra_matches_path_enumeration((n, edges, w) in small_weighted_graph(), s in 0usize..6, t in 0usize..6) {
        let (s, t) = (s % n, t % n);
        let g = MultiGraph::from_edges(n, &edges).unwrap();
        let wg = WeightedGraph::new(g, w.clone());
        let fast = shortest_path(&wg, s, t);
        let slow = brute_force(n, &edges, &w, s, t);
        match (fast, slow) {
            (None, None) => {}
            (Some(p), Some((bw, bh))) => {
                prop_assert!((p.weight - bw).abs() <= 1e-12 * bw.max(1.0));
                prop_assert_eq!(p.hops, bh);
            }
            other => prop_assert!(false, "mismatch {:?}", other),
        }
        prop_assert_eq!(fast.is_some(), bfs_distance(wg.graph(), s, t).is_some());
    }

    #[test]
    fn built_graph_preserves_degrees(degrees in prop::collection::vec(2u64..8, 1..40), seed in any::<u64>()) {
        let mut seq = DegreeSequence::new(degrees).unwrap();
        seq.fix_parity();
        let g = MultiGraph::build(&seq, &mut stream(seed)).unwrap();
        prop_assert_eq!(g.recomputed_degrees(), seq.degrees().to_vec());
        prop_assert_eq!(g.total_stubs() as u64, seq.total_stubs());
        for s in 0..g.total_stubs() as u32 {
            let p = g.partner(s);
            prop_assert_ne!(p, s);
            prop_assert_eq!(g.partner(p), s);
            prop_assert_eq!(g.edge_of(p), g.edge_of(s));
        }
    }

    #[test]
    fn triangle_inequality(seed in any::<u64>(), tau in prop::sample::select(vec![2.5f64, 4.0])) {
        let mut rng = stream(seed);
        let d = DegreeDistribution::pareto(tau).unwrap();
        let n = 60;
        let seq = sample_degree_sequence(n, &d, &mut rng);
        let wg = assign_weights(MultiGraph::build(&seq, &mut rng).unwrap(), &mut rng);
        for _ in 0..10 {
            let (u, v, x) = (index(&mut rng, n), index(&mut rng, n), index(&mut rng, n));
            if let (Some(a), Some(b)) = (shortest_path(&wg, u, v), shortest_path(&wg, v, x)) {
                let c = shortest_path(&wg, u, x).expect("same component");
                prop_assert!(c.weight <= a.weight + b.weight + 1e-12);
            }
            let fwd = shortest_path(&wg, u, v).map(|p| p.weight);
            let back = shortest_path(&wg, v, u).map(|p| p.weight);
            match (fwd, back) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0)),
                (None, None) => {}
                _ => prop_assert!(false),
            }
        }
    }
}
