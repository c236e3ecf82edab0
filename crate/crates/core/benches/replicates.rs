use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fppcm_core::config_model::{sample_degree_sequence, MultiGraph};
use fppcm_core::oracle::assign_weights;
use fppcm_core::par;
use fppcm_core::rng::{index, replicate_stream};
use fppcm_core::stats::a_n;
use fppcm_core::swg::{realized, StubPool};
use fppcm_core::DegreeDistribution;

const REPLICATES: usize = 64;

fn process_replicate(dist: &DegreeDistribution, n: usize, rep: usize) -> u32 {
    let (_, mut rng) = replicate_stream(1, n as u64, rep as u64);
    let mut seq = sample_degree_sequence(n, dist, &mut rng);
    seq.fix_parity();
    let mut pool = StubPool::new(&seq).expect("even stub total");
    let u = index(&mut rng, n);
    let v = (u + 1 + index(&mut rng, n - 1)) % n;
    pool.grow_bilateral(u, v, a_n(dist, n as u64) as usize, &mut rng).map(|r| r.hn).unwrap_or(0)
}

fn realized_replicate(dist: &DegreeDistribution, n: usize, rep: usize) -> u32 {
    let (_, mut rng) = replicate_stream(2, n as u64, rep as u64);
    let mut seq = sample_degree_sequence(n, dist, &mut rng);
    seq.fix_parity();
    let g = MultiGraph::build(&seq, &mut rng).expect("even stub total");
    let wg = assign_weights(g, &mut rng);
    let u = index(&mut rng, n);
    let v = (u + 1 + index(&mut rng, n - 1)) % n;
    realized::grow_bilateral(&wg, u, v, a_n(dist, n as u64) as usize).map(|r| r.hn).unwrap_or(0)
}

type Kernel = fn(&DegreeDistribution, usize, usize) -> u32;

fn bench(c: &mut Criterion) {
    let dist = DegreeDistribution::pareto(4.0).expect("valid tau");
    let kernels: [(&str, Kernel); 2] = [("process", process_replicate), ("realized", realized_replicate)];
    for (name, kernel) in kernels {
        let mut group = c.benchmark_group(format!("{name}_replicates"));
        group.sample_size(10);
        for n in [1_000usize, 10_000] {
            group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
                b.iter(|| par::map_sequential(REPLICATES, |r| kernel(&dist, n, r)))
            });
            #[cfg(feature = "parallel")]
            group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
                b.iter(|| par::map_parallel(REPLICATES, |r| kernel(&dist, n, r)))
            });
        }
        group.finish();
    }
}

criterion_group!(benches, bench);
criterion_main!(benches);
