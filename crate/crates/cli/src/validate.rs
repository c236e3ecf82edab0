//! The twelve-criterion validation suite.
//!
//! Criterion `k` draws all of its randomness from `derive_seed(seed, [k])`,
//! so each criterion's output does not depend on which others are selected
//! or on the worker count.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use fppcm_core::config_model::sample_degree_sequence;
use fppcm_core::limit_laws::{LimitError, LimitLawSamplers, RootLaw};
use fppcm_core::rng::{derive_seed, index, replicate_stream, stream};
use fppcm_core::special::{bisect, harmonic, normal_cdf};
use fppcm_core::stats::{
    self, chi_square_gof, clt_report, distance_contrast, ks_one_sample, ks_two_sample, theory_constants, trend, Trend,
};
use fppcm_core::swg::{StepCase, StubPool};
use fppcm_core::tree_flow::{exact_generation_pmf, expected_weight, sample_hat_gm_coupled, ConstructionSweep};
use fppcm_core::{par, DegreeDistribution};

use crate::config::Profile;
use crate::record::{float, write_csv, ReplicateRecord};
use crate::report::hop_samples;
use crate::runner::{Batch, GrowthMode, ReplicateOutput};
use crate::CliError;

/// Short names, indexed by criterion number minus one.
pub const CRITERIA: [&str; 12] = [
    "tree-flow exactness",
    "harmonic identity",
    "growth matches Dijkstra",
    "mode equivalence",
    "hopcount CLT, finite variance",
    "hopcount CLT, infinite variance",
    "connection time",
    "weight limit, finite variance",
    "weight limit, infinite variance",
    "martingale limit consistency",
    "structural invariants",
    "determinism",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub pass: bool,
    pub detail: String,
    pub kv: Vec<(String, String)>,
    /// Wall time in seconds; kept out of the written files.
    pub seconds: f64,
}

impl CriterionResult {
    pub fn name(&self) -> &'static str {
        CRITERIA[self.id as usize - 1]
    }

    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        format!("criterion {:>2} {verdict} {}: {}", self.id, self.name(), self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationRun {
    pub results: Vec<CriterionResult>,
    /// Replicate records of the criteria that run bilateral growth.
    pub records: Vec<ReplicateRecord>,
}

impl ValidationRun {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    /// Summary text without timings.
    pub fn text(&self) -> String {
        self.results.iter().map(|r| r.line() + "\n").collect()
    }

    pub fn kv_text(&self) -> String {
        let mut s = String::new();
        for r in &self.results {
            let _ = writeln!(s, "c{}.pass={}", r.id, u8::from(r.pass));
            for (k, v) in &r.kv {
                let _ = writeln!(s, "c{}.{k}={v}", r.id);
            }
        }
        s
    }

    /// Writes `validate.csv`, `validation.txt` and `validation.kv`.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let csv_path = dir.join("validate.csv");
        let file = std::fs::File::create(&csv_path).map_err(|e| CliError::io(&csv_path, e))?;
        write_csv(std::io::BufWriter::new(file), &self.records)?;
        for (name, body) in [("validation.txt", self.text()), ("validation.kv", self.kv_text())] {
            let p = dir.join(name);
            std::fs::write(&p, body).map_err(|e| CliError::io(&p, e))?;
        }
        Ok(())
    }
}

/// Sample sizes for one profile.
#[derive(Debug, Clone)]
struct Sizes {
    c1_len: usize,
    c1_runs: u64,
    c2_reps: u64,
    c3_reps: u64,
    c4_n: u64,
    c4_reps: u64,
    clt_grid: Vec<u64>,
    clt_reps: u64,
    c7_n: u64,
    c7_reps: u64,
    c8_draws: usize,
    c9_n: u64,
    c9_reps: u64,
    c10_draws: usize,
    c10_laplace: usize,
    c10_boot: usize,
    c11_draws: u64,
    c11_growths: [u64; 3],
}

impl Sizes {
    fn of(profile: Profile) -> Self {
        match profile {
            Profile::Full => Self {
                c1_len: 8,
                c1_runs: 1_000_000,
                c2_reps: 100_000,
                c3_reps: 1000,
                c4_n: 10_000,
                c4_reps: 10_000,
                clt_grid: (10..=17).map(|k| 1u64 << k).collect(),
                clt_reps: 2000,
                c7_n: 100_000,
                c7_reps: 2000,
                c8_draws: 2000,
                c9_n: 100_000,
                c9_reps: 2000,
                c10_draws: 10_000,
                c10_laplace: 100_000,
                c10_boot: 200,
                c11_draws: 100_000,
                c11_growths: [500_000, 200_000, 110_000],
            },
            Profile::Quick => Self {
                c1_len: 5,
                c1_runs: 10_000,
                c2_reps: 10_000,
                c3_reps: 100,
                c4_n: 1000,
                c4_reps: 500,
                clt_grid: vec![1 << 10, 1 << 11, 1 << 12],
                clt_reps: 200,
                c7_n: 10_000,
                c7_reps: 200,
                c8_draws: 200,
                c9_n: 10_000,
                c9_reps: 200,
                c10_draws: 200,
                c10_laplace: 2000,
                c10_boot: 50,
                c11_draws: 10_000,
                c11_growths: [50_000, 20_000, 11_000],
            },
        }
    }
}

const C10_CAP: u64 = 10_000;
const LAPLACE_T: [f64; 3] = [0.5, 1.0, 2.0];
const C1_CHUNKS: u64 = 100;
const GROWTHS_PER_GRAPH: u64 = 1000;

fn pareto(tau: f64) -> DegreeDistribution {
    DegreeDistribution::pareto(tau).expect("valid exponent")
}

/// Callback for finished criteria.
pub type ResultHook = Box<dyn FnMut(&CriterionResult)>;

/// Runs the selected criteria. Criterion 12 reruns 1 to 11 with the quick
/// profile under one and three workers and writes both runs below
/// `out_dir/determinism`.
pub struct Validator {
    seed: u64,
    sizes: Sizes,
    out_dir: std::path::PathBuf,
    /// The τ = 4 bilateral batch shared by criteria 7 and 8.
    shared: Option<Vec<ReplicateRecord>>,
    records: Vec<ReplicateRecord>,
    /// Called with each finished result.
    pub on_result: Option<ResultHook>,
}

impl Validator {
    pub fn new(seed: u64, profile: Profile, out_dir: &Path) -> Self {
        Self {
            seed,
            sizes: Sizes::of(profile),
            out_dir: out_dir.into(),
            shared: None,
            records: Vec::new(),
            on_result: None,
        }
    }

    pub fn run(mut self, criteria: &[u8]) -> Result<ValidationRun, CliError> {
        let mut results = Vec::new();
        for &id in criteria {
            let start = Instant::now();
            let mut r = self.criterion(id)?;
            r.seconds = start.elapsed().as_secs_f64();
            if let Some(cb) = self.on_result.as_mut() {
                cb(&r);
            }
            results.push(r);
        }
        Ok(ValidationRun { results, records: self.records })
    }

    fn master(&self, id: u8) -> u64 {
        derive_seed(self.seed, &[id as u64])
    }

    fn criterion(&mut self, id: u8) -> Result<CriterionResult, CliError> {
        let (pass, detail, kv) = match id {
            1 => self.c1(),
            2 => self.c2(),
            3 => self.c3(),
            4 => self.c4(),
            5 => self.c5(),
            6 => self.c6(),
            7 => self.c7(),
            8 => self.c8()?,
            9 => self.c9()?,
            10 => self.c10()?,
            11 => self.c11(),
            12 => self.c12()?,
            other => return Err(CliError::Criterion(other)),
        };
        Ok(CriterionResult { id, pass, detail, kv, seconds: 0.0 })
    }

    fn batch(&self, dist: &DegreeDistribution, tag: &str, master: u64, mode: GrowthMode) -> BatchSpec {
        BatchSpec {
            dist: dist.clone(),
            label: format!("{}#{tag}", dist.label()),
            master,
            mode,
            bfs: false,
            oracle: false,
        }
    }

    fn c1(&mut self) -> Outcome {
        let master = self.master(1);
        let len = self.sizes.c1_len;
        let runs = self.sizes.c1_runs;
        let chunks = C1_CHUNKS.min(runs);
        let parts = par::map(chunks as usize, |c| {
            let mut s = ConstructionSweep::new(&[0, 2, 3], len);
            let share = runs / chunks + u64::from((c as u64) < runs % chunks);
            s.run(share, &mut stream(derive_seed(master, &[c as u64])));
            s
        });
        let mut sweep = parts[0].clone();
        for p in &parts[1..] {
            sweep.merge(p);
        }
        let nodes = sweep.nodes().len();
        let level = 0.001 / nodes as f64;
        let z = bisect(|x| 1.0 - normal_cdf(x) - level / 2.0, 0.0, 40.0, 1e-10).expect("bracketed");
        let (mut chi_fail, mut t_fail, mut beyond3) = (0, 0, 0);
        let mut min_p = 1.0f64;
        let mut max_z = 0.0f64;
        for id in 0..nodes {
            let deg = &sweep.nodes()[id].degrees;
            let pmf = exact_generation_pmf(deg, deg.len()).expect("alive vectors");
            let p = chi_square_gof(sweep.counts(id), &pmf, 5.0).map_or(0.0, |r| r.p_value);
            min_p = min_p.min(p);
            chi_fail += usize::from(p <= level);
            let (mean, se) = sweep.weight_mean_se(id);
            let exact = expected_weight(deg, deg.len()).expect("alive vectors");
            let zi = (mean - exact).abs() / se;
            max_z = max_z.max(zi);
            t_fail += usize::from(zi > z);
            beyond3 += usize::from(zi > 3.0);
        }
        let pass = chi_fail == 0 && t_fail == 0;
        let detail = format!(
            "{nodes} vectors, {runs} runs; min chi-square p {min_p:.3e} (threshold {level:.2e}), max |z| of E[T] {max_z:.2} \
             (threshold {z:.2}); {beyond3} beyond 3 SE, {:.1} expected by chance",
            nodes as f64 * 0.0027
        );
        let kv = vec![
            ("vectors".into(), nodes.to_string()),
            ("min_chi_p".into(), float(min_p)),
            ("max_weight_z".into(), float(max_z)),
            ("beyond_3se".into(), beyond3.to_string()),
        ];
        (pass, detail, kv)
    }

    fn c2(&mut self) -> Outcome {
        let master = self.master(2);
        let g = pareto(2.5).size_biased();
        let m = 100;
        let hats = par::map(self.sizes.c2_reps as usize, |rep| {
            let (_, mut rng) = replicate_stream(master, m as u64, rep as u64);
            let b: Vec<u64> = (0..m).map(|_| g.sample(&mut rng)).collect();
            sample_hat_gm_coupled(&b, m, &mut rng).expect("forward degrees are positive").0 as f64
        });
        let mo = stats::moments(&hats).expect("many replicates");
        let target = harmonic(m as u64);
        let z = (mo.mean - target) / mo.se_mean;
        let pass = z.abs() <= 3.0;
        let detail = format!("mean {:.4} ± {:.4} vs H_100 = {target:.4} (z = {z:.2})", mo.mean, mo.se_mean);
        (pass, detail, vec![("mean".into(), float(mo.mean)), ("z".into(), float(z))])
    }

    fn c3(&mut self) -> Outcome {
        let master = self.master(3);
        let mut agree = 0;
        let mut total = 0;
        let mut kept = 0;
        let mut kv = Vec::new();
        for (i, (n, tau)) in [(100u64, 2.5), (100, 4.0), (1000, 2.5), (1000, 4.0)].into_iter().enumerate() {
            let dist = pareto(tau);
            let mut spec = self.batch(&dist, "dijkstra", derive_seed(master, &[i as u64]), GrowthMode::Realized);
            spec.oracle = true;
            let out = spec.run(&[n], self.sizes.c3_reps);
            let ok = out.iter().filter(|o| agrees(o)).count();
            kv.push((format!("n{n}.tau{tau}.agree"), format!("{ok}/{}", out.len())));
            agree += ok;
            total += out.len();
            kept += out.iter().filter(|o| o.record.kept().is_some()).count();
            self.records.extend(out.into_iter().map(|o| o.record));
        }
        let pass = agree == total;
        (pass, format!("{agree}/{total} replicates agree ({kept} connected)"), kv)
    }

    fn c4(&mut self) -> Outcome {
        let master = self.master(4);
        let dist = pareto(4.0);
        let grid = [self.sizes.c4_n];
        let reps = self.sizes.c4_reps;
        let p = self.batch(&dist, "process", derive_seed(master, &[0]), GrowthMode::Process).records(&grid, reps);
        let r = self.batch(&dist, "realized", derive_seed(master, &[1]), GrowthMode::Realized).records(&grid, reps);
        let (hp, wp) = columns(&p);
        let (hr, wr) = columns(&r);
        let kh = ks_two_sample(&hp, &hr);
        let kw = ks_two_sample(&wp, &wr);
        self.records.extend(p);
        self.records.extend(r);
        match (kh, kw) {
            (Ok(kh), Ok(kw)) => {
                let pass = kh.p_value > 0.001 && kw.p_value > 0.001;
                let detail = format!(
                    "n = {}, {} vs {} kept; Hn KS {:.4} (p {:.3}), Wn KS {:.4} (p {:.3})",
                    grid[0],
                    hp.len(),
                    hr.len(),
                    kh.statistic,
                    kh.p_value,
                    kw.statistic,
                    kw.p_value
                );
                (pass, detail, vec![("hn_p".into(), float(kh.p_value)), ("wn_p".into(), float(kw.p_value))])
            }
            (Err(e), _) | (_, Err(e)) => (false, format!("no kept replicates: {e}"), Vec::new()),
        }
    }

    fn clt(&mut self, id: u8, tau: f64, mode: GrowthMode) -> Outcome {
        let dist = pareto(tau);
        let mut spec = self.batch(&dist, &format!("clt-{}", mode.name()), self.master(id), mode);
        spec.bfs = mode == GrowthMode::Realized;
        let recs = spec.records(&self.sizes.clt_grid, self.sizes.clt_reps);
        let samples = hop_samples(&recs);
        self.records.extend(recs);
        let constants = theory_constants(&dist).expect("non-critical exponent");
        let clt = match clt_report(&samples, &constants) {
            Ok(c) => c,
            Err(e) => return (false, format!("no fit: {e}"), Vec::new()),
        };
        let (me, ve) = (clt.mean_slope_rel_error(), clt.variance_slope_rel_error());
        let mut pass = me <= 0.15 && ve <= 0.25 && clt.ks_at_largest <= 0.1;
        let ks: Vec<String> = clt.ks_trend().iter().map(|k| format!("{k:.3}")).collect();
        let mut detail = format!(
            "alpha {:.4}; mean slope {:.4} ({:.1}% off, limit 15%), variance slope {:.4} ({:.1}% off, limit 25%), \
             KS at n = {} {:.4} (limit 0.1); KS along grid {}",
            clt.alpha,
            clt.mean_fit.slope,
            100.0 * me,
            clt.variance_fit.slope,
            100.0 * ve,
            clt.sizes.last().map_or(0, |s| s.n),
            clt.ks_at_largest,
            ks.join(" ")
        );
        let mut kv = vec![
            ("mean_slope".into(), float(clt.mean_fit.slope)),
            ("variance_slope".into(), float(clt.variance_fit.slope)),
            ("ks_at_largest".into(), float(clt.ks_at_largest)),
        ];
        if spec.bfs {
            match distance_contrast(&samples, &dist) {
                Ok(c) => {
                    let ratios: Vec<String> = c.rows.iter().map(|r| format!("{:.3}", r.ratio)).collect();
                    pass &= c.ratio_trend == Trend::Increasing;
                    let _ = write!(detail, "; Hn/H~ ratios {} ({})", ratios.join(" "), c.ratio_trend.label());
                    kv.push(("ratio_trend".into(), c.ratio_trend.label().into()));
                }
                Err(e) => {
                    pass = false;
                    let _ = write!(detail, "; no distance contrast: {e}");
                }
            }
        }
        (pass, detail, kv)
    }

    fn c5(&mut self) -> Outcome {
        self.clt(5, 4.0, GrowthMode::Process)
    }

    fn c6(&mut self) -> Outcome {
        self.clt(6, 2.5, GrowthMode::Realized)
    }

    fn shared_tau4(&mut self) -> Vec<ReplicateRecord> {
        if self.shared.is_none() {
            let dist = pareto(4.0);
            let recs = self
                .batch(&dist, "weight", self.master(7), GrowthMode::Process)
                .records(&[self.sizes.c7_n], self.sizes.c7_reps);
            self.records.extend(recs.iter().cloned());
            self.shared = Some(recs);
        }
        self.shared.clone().expect("just filled")
    }

    fn c7(&mut self) -> Outcome {
        let dist = pareto(4.0);
        let recs = self.shared_tau4();
        let nu = dist.nu().finite().expect("finite");
        let mean = dist.mu() / (nu - 1.0);
        let ratios: Vec<f64> = hop_samples(&recs).iter().map(|s| s.ce_ratio).collect();
        match ks_one_sample(&ratios, |x| if x <= 0.0 { 0.0 } else { 1.0 - (-x / mean).exp() }) {
            Ok(k) => (
                k.statistic <= 0.05,
                format!("{} kept; KS {:.4} against Exp(mean {mean:.4}) (limit 0.05)", ratios.len(), k.statistic),
                vec![("ks".into(), float(k.statistic))],
            ),
            Err(e) => (false, e.to_string(), Vec::new()),
        }
    }

    fn c8(&mut self) -> Result<Outcome, CliError> {
        let dist = pareto(4.0);
        let recs = self.shared_tau4();
        let nu = dist.nu().finite().expect("finite");
        let shift = (self.sizes.c7_n as f64).ln() / (nu - 1.0);
        let centred: Vec<f64> = hop_samples(&recs).iter().map(|s| s.wn - shift).collect();
        let s = LimitLawSamplers::new(&dist);
        let master = derive_seed(self.master(8), &[1]);
        let v: Vec<f64> = par::map(self.sizes.c8_draws, |i| {
            let (_, mut rng) = replicate_stream(master, 0, i as u64);
            s.sample_v_tau_gt3(&mut rng)
        })
        .into_iter()
        .collect::<Result<_, _>>()?;
        Ok(match ks_two_sample(&centred, &v) {
            Ok(k) => (
                k.statistic <= 0.1,
                format!("{} kept vs {} V draws; KS {:.4} (limit 0.1)", centred.len(), v.len(), k.statistic),
                vec![("ks".into(), float(k.statistic))],
            ),
            Err(e) => (false, e.to_string(), Vec::new()),
        })
    }

    fn c9(&mut self) -> Result<Outcome, CliError> {
        let dist = pareto(2.5);
        let master = self.master(9);
        let recs = self
            .batch(&dist, "weight", derive_seed(master, &[0]), GrowthMode::Process)
            .records(&[self.sizes.c9_n], self.sizes.c9_reps);
        let w: Vec<f64> = hop_samples(&recs).iter().map(|s| s.wn).collect();
        self.records.extend(recs);
        let s = LimitLawSamplers::new(&dist);
        let xm = derive_seed(master, &[1]);
        let x: Vec<f64> = par::map(self.sizes.c9_reps as usize, |i| {
            let (_, mut rng) = replicate_stream(xm, 0, i as u64);
            Ok::<_, LimitError>(s.sample_x(&mut rng)?.value + s.sample_x(&mut rng)?.value)
        })
        .into_iter()
        .collect::<Result<_, _>>()?;
        Ok(match ks_two_sample(&w, &x) {
            Ok(k) => (
                k.statistic <= 0.1,
                format!("{} kept vs {} draws of X1 + X2; KS {:.4} (limit 0.1)", w.len(), x.len(), k.statistic),
                vec![("ks".into(), float(k.statistic))],
            ),
            Err(e) => (false, e.to_string(), Vec::new()),
        })
    }

    fn c10(&mut self) -> Result<Outcome, CliError> {
        let dist = pareto(4.0);
        let s = LimitLawSamplers::new(&dist).with_population_cap(C10_CAP)?;
        let master = self.master(10);
        let draw = |tag: u64,
                    len: usize,
                    f: &(dyn Fn(&mut fppcm_core::RngStream) -> Result<f64, LimitError> + Sync)| {
            let m = derive_seed(master, &[tag]);
            par::map(len, |i| f(&mut replicate_stream(m, 0, i as u64).1)).into_iter().collect::<Result<Vec<f64>, _>>()
        };
        let direct = draw(0, self.sizes.c10_draws, &|r| s.sample_w(r))?;
        let decomposed = draw(1, self.sizes.c10_draws, &|r| s.sample_w_decomposed(r))?;
        let single = draw(2, self.sizes.c10_laplace, &|r| s.sample_w_rooted(RootLaw::SingleAncestor, r))?;
        let ks = ks_two_sample(&direct, &decomposed).map_err(|e| CliError::Stats(e.to_string()))?;
        let mut rng = stream(derive_seed(master, &[3]));
        let lap = s.laplace_check(&single, &LAPLACE_T, self.sizes.c10_boot, &mut rng)?;
        let pass = ks.p_value > 0.001 && lap.within(3.0);
        let rows: Vec<String> = lap
            .rows
            .iter()
            .map(|r| {
                format!("t={} {:.5} vs {:.5} ({:.2} SE)", r.t, r.numeric, r.empirical, r.discrepancy() / r.bootstrap_se)
            })
            .collect();
        let detail = format!(
            "tau 4, cap {C10_CAP}; decomposed vs direct KS {:.4} (p {:.3}); Laplace {}",
            ks.statistic,
            ks.p_value,
            rows.join(", ")
        );
        let mut kv = vec![("decomposition_p".into(), float(ks.p_value))];
        for r in &lap.rows {
            kv.push((format!("laplace.t{}.numeric", r.t), float(r.numeric)));
            kv.push((format!("laplace.t{}.empirical", r.t), float(r.empirical)));
        }
        Ok((pass, detail, kv))
    }

    fn c11(&mut self) -> Outcome {
        let master = self.master(11);
        let mut kv = Vec::new();

        let mut dev = 0.0f64;
        let laws = [pareto(2.5), pareto(4.0), DegreeDistribution::explicit([(2, 0.5), (3, 0.5)]).expect("valid")];
        for d in &laws {
            let g = d.size_biased();
            for k in [3u64, 10, 100, 1000] {
                let f: f64 = (0..k).map(|j| d.pmf(j)).sum::<f64>() + d.survival(k);
                dev = dev.max((f - 1.0).abs()).max((g.total_mass(k) - 1.0).abs());
            }
        }
        let sweep = ConstructionSweep::new(&[0, 2, 3], self.sizes.c1_len);
        for nd in sweep.nodes() {
            let p = exact_generation_pmf(&nd.degrees, nd.degrees.len()).expect("alive vectors");
            dev = dev.max((p.iter().sum::<f64>() - 1.0).abs());
        }
        let norm_ok = dev <= 1e-12;
        kv.push(("normalization_deviation".into(), float(dev)));

        let exch = exchangeability(derive_seed(master, &[0]), self.sizes.c11_draws);
        let exch_ok = exch.is_some_and(|p| p > 0.001);
        kv.push(("exchangeability_p".into(), exch.map_or("-".into(), float)));

        let sizes = [1000u64, 10_000, 100_000];
        let tv: Vec<f64> = sizes
            .iter()
            .zip(self.sizes.c11_growths)
            .map(|(&n, growths)| forward_degree_tv(derive_seed(master, &[1, n]), n, growths))
            .collect();
        let tv_trend = trend(&tv);
        for (n, t) in sizes.iter().zip(&tv) {
            kv.push((format!("tv.n{n}"), float(*t)));
        }
        let pass = norm_ok && exch_ok && tv_trend == Trend::Decreasing;
        let tvs: Vec<String> = tv.iter().map(|t| format!("{t:.4}")).collect();
        let detail = format!(
            "max normalization error {dev:.1e} (limit 1e-12); exchangeability chi-square p {}; \
             forward-degree TV at n = 1e3, 1e4, 1e5: {} ({})",
            exch.map_or("-".into(), |p| format!("{p:.3}")),
            tvs.join(" "),
            tv_trend.label()
        );
        (pass, detail, kv)
    }

    fn c12(&mut self) -> Result<Outcome, CliError> {
        let base = self.out_dir.join("determinism");
        let mut outputs = Vec::new();
        for workers in [1usize, 3] {
            let dir = base.join(format!("workers-{workers}"));
            let seed = self.seed;
            let run = par::with_workers(workers, || {
                Validator::new(seed, Profile::Quick, &dir).run(&(1..=11).collect::<Vec<_>>())
            })?;
            run.write(&dir)?;
            let mut files = Vec::new();
            for name in ["validate.csv", "validation.kv"] {
                let p = dir.join(name);
                files.push(std::fs::read(&p).map_err(|e| CliError::io(&p, e))?);
            }
            outputs.push(files);
        }
        let same = outputs[0] == outputs[1];
        let bytes = outputs[0][0].len();
        let detail = format!(
            "quick suite 1-11 under 1 and 3 workers: CSV ({bytes} bytes) and key-value output {}",
            if same { "byte-identical" } else { "differ" }
        );
        Ok((same, detail, vec![("csv_bytes".into(), bytes.to_string())]))
    }
}

type Outcome = (bool, String, Vec<(String, String)>);

/// An owned [`Batch`] description.
struct BatchSpec {
    dist: DegreeDistribution,
    label: String,
    master: u64,
    mode: GrowthMode,
    bfs: bool,
    oracle: bool,
}

impl BatchSpec {
    fn run(&self, grid: &[u64], reps: u64) -> Vec<ReplicateOutput> {
        Batch {
            dist: &self.dist,
            label: self.label.clone(),
            master: self.master,
            mode: self.mode,
            bfs: self.bfs,
            oracle: self.oracle,
            timing: false,
        }
        .run(grid, reps)
    }

    fn records(&self, grid: &[u64], reps: u64) -> Vec<ReplicateRecord> {
        self.run(grid, reps).into_iter().map(|o| o.record).collect()
    }
}

fn agrees(o: &ReplicateOutput) -> bool {
    match (&o.record.outcome, &o.oracle) {
        (Ok(k), Some(Some(p))) => (k.wn - p.weight).abs() <= 1e-12 * p.weight.max(1.0) && k.hn == p.hops,
        (Err(_), Some(None)) => true,
        _ => false,
    }
}

fn columns(recs: &[ReplicateRecord]) -> (Vec<f64>, Vec<f64>) {
    hop_samples(recs).iter().map(|s| (s.hn, s.wn)).unzip()
}

/// Chi-square p-value of the forward degree of the first vertex found by
/// the growth against the size-biased empirical law of the sequence.
fn exchangeability(seed: u64, draws: u64) -> Option<f64> {
    let d = pareto(2.5);
    let mut rng = stream(seed);
    let seq = sample_degree_sequence(1000, &d, &mut rng);
    let degs = seq.degrees();
    let src = 0;
    let denom = (seq.total_stubs() - degs[src]) as f64;
    let max = *degs.iter().max()? as usize;
    let mut probs = vec![0.0; max];
    for (i, &di) in degs.iter().enumerate() {
        if i != src {
            probs[di as usize - 1] += di as f64 / denom;
        }
    }
    let mut pool = StubPool::new(&seq).ok()?;
    let mut counts = vec![0u64; max];
    let mut got = 0;
    while got < draws {
        let Ok(st) = pool.grow_single(src, 3, &mut rng) else { continue };
        if let Some(k) = st.cases.iter().position(|c| *c == StepCase::NewVertex) {
            counts[st.forward_degrees[k + 1] as usize] += 1;
            got += 1;
        }
    }
    chi_square_gof(&counts, &probs, 5.0).ok().map(|r| r.p_value)
}

/// Total variation between the forward degrees met in the first
/// `⌊n^{1/5}⌋` growth steps and the size-biased law, at `τ = 2.5`.
fn forward_degree_tv(seed: u64, n: u64, growths: u64) -> f64 {
    let d = pareto(2.5);
    let g = d.size_biased();
    let m = (n as f64).powf(0.2).floor() as usize;
    let graphs = growths.div_ceil(GROWTHS_PER_GRAPH);
    let parts: Vec<Vec<u64>> = par::map(graphs as usize, |c| {
        let mut rng = stream(derive_seed(seed, &[c as u64]));
        let seq = sample_degree_sequence(n as usize, &d, &mut rng);
        let Ok(mut pool) = StubPool::new(&seq) else { return Vec::new() };
        let mut out = Vec::new();
        for _ in 0..GROWTHS_PER_GRAPH {
            let src = index(&mut rng, n as usize);
            if let Ok(st) = pool.grow_single(src, m, &mut rng) {
                let end = st.forward_degrees.len().min(m + 1);
                out.extend_from_slice(&st.forward_degrees[1.min(end)..end]);
            }
        }
        out
    });
    let all: Vec<u64> = parts.concat();
    let emp = stats::empirical_pmf(&all);
    let len = emp.len() as u64;
    let head: f64 = emp.iter().enumerate().map(|(k, p)| (p - g.pmf(k as u64)).abs()).sum();
    0.5 * (head + g.survival(len))
}
