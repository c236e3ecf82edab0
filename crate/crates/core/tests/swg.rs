use fppcm_core::config_model::{sample_degree_sequence, MultiGraph};
use fppcm_core::oracle::{assign_weights, shortest_path};
use fppcm_core::rng::{index, stream};
use fppcm_core::stats::{a_n, chi_square_gof, ks_two_sample, weighted_line_fit};
use fppcm_core::swg::{connection_time_stats, realized, ConnectionError, StepCase, StubPool, SwgError, SwgState};
use fppcm_core::tree_flow::s_values;
use fppcm_core::{DegreeDistribution, DegreeSequence, WeightedGraph};
use proptest::prelude::*;

fn check_state(st: &SwgState) {
    let s: Vec<u64> = s_values(&st.forward_degrees).iter().map(|&x| x as u64).collect();
    assert_eq!(s, st.alive_counts);
    assert_eq!(st.records.len(), st.steps() + 1);
    let mut art = 0i64;
    for (k, (case, rec)) in st.cases.iter().zip(&st.records[1..]).enumerate() {
        match case {
            StepCase::NewVertex => assert!(rec.vertex.is_some()),
            StepCase::CycleClosed => {
                assert!(rec.vertex.is_none());
                assert_eq!(st.forward_degrees[k + 1], 0);
                art += 1;
            }
            StepCase::ArtificialConsumed => {
                assert!(rec.vertex.is_none());
                assert_eq!(st.forward_degrees[k + 1], 0);
                art -= 1;
            }
        }
        assert!(art >= 0);
    }
    assert_eq!(art as usize, st.artificial);
    for (m, &r) in st.r_steps.iter().enumerate() {
        assert!(r > m);
    }
    let no_cycle = st.cases.iter().all(|c| *c == StepCase::NewVertex);
    assert_eq!(no_cycle, st.r_steps.len() == st.steps());
    let times: Vec<f64> = st.records.iter().map(|r| r.weight).collect();
    assert!(times.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn parallel_pair_hand_trace() {
    let g = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
    let wg = WeightedGraph::new(g, vec![0.4, 0.9]);
    let st = realized::grow_single(&wg, 0, 2).unwrap();
    assert_eq!(st.forward_degrees, vec![2, 1, 0]);
    assert_eq!(st.alive_counts, vec![2, 2, 1]);
    assert_eq!(st.cases, vec![StepCase::NewVertex, StepCase::CycleClosed]);
    assert_eq!(st.r_steps, vec![1]);
    assert_eq!(st.artificial, 1);
    assert_eq!(st.real_vertices(), 2);
    check_state(&st);
    assert_eq!(realized::grow_single(&wg, 0, 4), Err(SwgError::Exhausted { completed: 3 }));
}

#[test]
fn acyclic_realization_has_no_artificial_stubs() {
    // A binary tree in test-only mode: every pairing reaches a fresh vertex.
    let edges: Vec<(usize, usize)> = (1..15).map(|v| ((v - 1) / 2, v)).collect();
    let g = MultiGraph::from_edges(15, &edges).unwrap();
    let mut rng = stream(1);
    let wg = assign_weights(g, &mut rng);
    let st = realized::grow_single(&wg, 0, 14).unwrap();
    assert_eq!(st.r_steps, (1..=14).collect::<Vec<_>>());
    assert_eq!(st.max_artificial, 0);
    check_state(&st);
}

#[test]
fn same_source_rejected() {
    let g = MultiGraph::from_edges(2, &[(0, 1)]).unwrap();
    let wg = WeightedGraph::new(g, vec![1.0]);
    assert_eq!(realized::grow_bilateral(&wg, 1, 1, 1), Err(SwgError::SameSource));
    let seq = DegreeSequence::new(vec![2, 2]).unwrap();
    let mut pool = StubPool::new(&seq).unwrap();
    assert_eq!(pool.grow_bilateral(0, 0, 1, &mut stream(0)).unwrap_err(), SwgError::SameSource);
}

#[test]
fn single_edge_bilateral() {
    let g = MultiGraph::from_edges(2, &[(0, 1)]).unwrap();
    let wg = WeightedGraph::new(g, vec![0.61]);
    let r = realized::grow_bilateral(&wg, 0, 1, 1).unwrap();
    assert!(r.ce <= 1);
    assert_eq!((r.hn, r.h1 + r.h2), (1, 1));
    assert!((r.wn - 0.61).abs() < 1e-15);
    let seq = DegreeSequence::new_test_only(vec![1, 1]);
    let mut pool = StubPool::new(&seq).unwrap();
    let r = pool.grow_bilateral(0, 1, 1, &mut stream(3)).unwrap();
    assert!(r.ce <= 1);
    assert_eq!(r.hn, 1);
    assert!(r.wn > 0.0);
}

#[test]
fn disconnected_sources() {
    let g = MultiGraph::from_edges(4, &[(0, 0), (1, 1), (2, 3), (2, 3)]).unwrap();
    let wg = WeightedGraph::new(g, vec![1.0; 4]);
    let err = realized::grow_bilateral(&wg, 0, 2, 5).unwrap_err();
    assert!(matches!(err, SwgError::NotConnected | SwgError::Exhausted { .. }));
    assert!(matches!(realized::grow_bilateral(&wg, 2, 0, 1).unwrap_err(), SwgError::NotConnected));
}

#[test]
fn connection_stats_errors_and_steps() {
    let d4 = DegreeDistribution::pareto(4.0).unwrap();
    assert!(matches!(connection_time_stats(&[], &d4, true), Err(ConnectionError::EmptyInput)));
    let g = MultiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    let wg = WeightedGraph::new(g, vec![0.5, 0.5]);
    let r = realized::grow_bilateral(&wg, 0, 2, 1).unwrap();
    let rs = vec![r.clone(); 10];
    let d25 = DegreeDistribution::pareto(2.5).unwrap();
    assert!(matches!(connection_time_stats(&rs, &d25, true), Err(ConnectionError::InfiniteNu)));
    let st = connection_time_stats(&rs, &d25, false).unwrap();
    let c = r.ce as f64 / r.a_n as f64;
    assert!(st.ratios.iter().all(|&x| x == c));
    assert!(st.ks.is_none());
    assert!(connection_time_stats(&rs, &d4, true).unwrap().ks.is_some());
}

fn random_weighted(n: usize, tau: f64, seed: u64) -> WeightedGraph {
    let d = DegreeDistribution::pareto(tau).unwrap();
    let mut rng = stream(seed);
    let seq = sample_degree_sequence(n, &d, &mut rng);
    assign_weights(MultiGraph::build(&seq, &mut rng).unwrap(), &mut rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn realized_bilateral_matches_dijkstra(
        n in 3usize..400,
        tau in prop::sample::select(vec![2.5f64, 4.0]),
        seed in any::<u64>(),
        a in 1usize..30,
    ) {
        let wg = random_weighted(n, tau, seed);
        let mut rng = stream(seed ^ 0xABCD);
        let s1 = index(&mut rng, n);
        let s2 = (s1 + 1 + index(&mut rng, n - 1)) % n;
        let oracle = shortest_path(&wg, s1, s2);
        match realized::grow_bilateral(&wg, s1, s2, a) {
            Ok(r) => {
                let p = oracle.expect("connected");
                prop_assert!((r.wn - p.weight).abs() <= 1e-12 * p.weight.max(1.0), "{:?} vs {:?}", r, p);
                prop_assert_eq!(r.hn, p.hops);
                prop_assert_eq!(r.hn, r.h1 + r.h2);
                prop_assert!(r.hn >= 1 && r.wn > 0.0);
            }
            Err(SwgError::NotConnected) | Err(SwgError::Exhausted { .. }) => prop_assert!(oracle.is_none()),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn realized_single_records_are_shortest_paths(n in 3usize..200, seed in any::<u64>(), steps in 1usize..60) {
        let wg = random_weighted(n, 2.5, seed);
        let src = (seed % n as u64) as usize;
        if let Ok(st) = realized::grow_single(&wg, src, steps) {
            check_state(&st);
            for rec in &st.records {
                if let Some(v) = rec.vertex {
                    let p = shortest_path(&wg, src, v).unwrap();
                    prop_assert!((rec.weight - p.weight).abs() <= 1e-12 * p.weight.max(1.0));
                    prop_assert_eq!(rec.hop, p.hops);
                }
            }
        }
    }

    #[test]
    fn process_growth_invariants(n in 2usize..300, tau in prop::sample::select(vec![2.5f64, 4.0]), seed in any::<u64>(), steps in 1usize..80) {
        let d = DegreeDistribution::pareto(tau).unwrap();
        let mut rng = stream(seed);
        let seq = sample_degree_sequence(n, &d, &mut rng);
        let mut pool = StubPool::new(&seq).unwrap();
        for _ in 0..3 {
            let src = index(&mut rng, n);
            if let Ok(st) = pool.grow_single(src, steps, &mut rng) {
                check_state(&st);
                prop_assert_eq!(st.forward_degrees[0], seq.degrees()[src]);
            }
            let s2 = (src + 1) % n;
            if let Ok(r) = pool.grow_bilateral(src, s2, steps, &mut rng) {
                prop_assert_eq!(r.hn, r.h1 + r.h2);
                prop_assert!(r.hn >= 1 && r.wn > 0.0);
                if r.ce > 0 {
                    prop_assert!(r.wn >= r.t1);
                } else {
                    prop_assert_eq!(r.h2, 0);
                }
            }
        }
    }
}

#[test]
fn modes_agree_in_law() {
    let d = DegreeDistribution::pareto(4.0).unwrap();
    let n = 2000;
    let an = a_n(&d, n as u64) as usize;
    let reps = 3000;
    let (mut hp, mut wp, mut hr, mut wr) = (vec![], vec![], vec![], vec![]);
    for rep in 0..reps {
        let mut rng = stream(50_000 + rep);
        let seq = sample_degree_sequence(n, &d, &mut rng);
        let s1 = index(&mut rng, n);
        let s2 = (s1 + 1 + index(&mut rng, n - 1)) % n;
        if let Ok(r) = StubPool::new(&seq).unwrap().grow_bilateral(s1, s2, an, &mut rng) {
            hp.push(r.hn as f64);
            wp.push(r.wn);
        }
        let wg = assign_weights(MultiGraph::build(&seq, &mut rng).unwrap(), &mut rng);
        if let Ok(r) = realized::grow_bilateral(&wg, s1, s2, an) {
            hr.push(r.hn as f64);
            wr.push(r.wn);
        }
    }
    let kh = ks_two_sample(&hp, &hr).unwrap();
    let kw = ks_two_sample(&wp, &wr).unwrap();
    assert!(kh.p_value > 0.001, "{kh:?}");
    assert!(kw.p_value > 0.001, "{kw:?}");
}

#[test]
fn first_real_vertex_marginal() {
    let d = DegreeDistribution::pareto(2.5).unwrap();
    let n = 1000;
    let mut rng = stream(7);
    let seq = sample_degree_sequence(n, &d, &mut rng);
    let degs = seq.degrees();
    let src = 0;
    let denom = (seq.total_stubs() - degs[src]) as f64;
    let max = *degs.iter().max().unwrap() as usize;
    let mut probs = vec![0.0; max];
    for (i, &di) in degs.iter().enumerate() {
        if i != src {
            probs[di as usize - 1] += di as f64 / denom;
        }
    }
    let mut pool = StubPool::new(&seq).unwrap();
    let mut counts = vec![0u64; max];
    let mut draws = 0;
    while draws < 100_000 {
        let Ok(st) = pool.grow_single(src, 3, &mut rng) else { continue };
        if let Some(k) = st.cases.iter().position(|c| *c == StepCase::NewVertex) {
            counts[st.forward_degrees[k + 1] as usize] += 1;
            draws += 1;
        }
    }
    let r = chi_square_gof(&counts, &probs, 5.0).unwrap();
    assert!(r.p_value > 0.001, "{r:?}");
}

#[test]
fn cycle_closures_grow_like_m_squared_over_n() {
    let d = DegreeDistribution::pareto(4.0).unwrap();
    let n = 100_000usize;
    let mut rng = stream(8);
    let ms: Vec<usize> = [0.3f64, 0.4, 0.5].iter().map(|e| (n as f64).powf(*e).round() as usize).collect();
    let reps = 2000;
    let (mut x, mut y, mut se) = (vec![], vec![], vec![]);
    for &m in &ms {
        let mut excess = Vec::with_capacity(reps);
        let mut seq = sample_degree_sequence(n, &d, &mut rng);
        let mut pool = StubPool::new(&seq).unwrap();
        while excess.len() < reps {
            if excess.len() % 200 == 0 {
                seq = sample_degree_sequence(n, &d, &mut rng);
                pool = StubPool::new(&seq).unwrap();
            }
            let src = index(&mut rng, n);
            if let Ok(st) = pool.grow_single(src, m + 50, &mut rng) {
                if st.r_steps.len() >= m {
                    excess.push((st.r_steps[m - 1] - m) as f64);
                }
            }
        }
        let mean = excess.iter().sum::<f64>() / reps as f64;
        let var = excess.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0);
        x.push((m * m) as f64 / n as f64);
        y.push(mean);
        se.push((var / reps as f64).sqrt().max(1e-3));
    }
    assert!(y.windows(2).all(|w| w[1] >= w[0]), "{y:?}");
    let fit = weighted_line_fit(&x, &y, &se).unwrap();
    assert!(fit.slope > 0.0 && fit.slope < 10.0, "{fit:?} {y:?}");
}
