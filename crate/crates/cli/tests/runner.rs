use std::process::Command;

use fppcm::config::{ConfigError, Mode};
use fppcm::record::{float, read_csv, write_csv, Kept, CSV_COLUMNS};
use fppcm::report::summarize;
use fppcm::runner::run_fpp;
use fppcm::{csv_schema, ExperimentConfig, ReplicateRecord};
use fppcm_core::par;
use proptest::prelude::*;

fn small(mode: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(&format!(
        "distribution = \"pareto:2.5\"\nn_grid = [500, 200]\nreplicates = 40\nmaster_seed = 9\nmode = \"{mode}\"\nbfs = true"
    ))
    .unwrap()
}

fn csv_bytes(records: &[ReplicateRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(&mut buf, records).unwrap();
    buf
}

#[test]
fn header_is_the_fixed_schema() {
    assert_eq!(csv_schema().join(","), "n,dist,rep,seed,a_n,ce_n,h1,h2,hn,wn,bfs_dist,r_overshoot,discarded,reason,ms");
    let text = String::from_utf8(csv_bytes(&[])).unwrap();
    assert_eq!(text.trim_end(), CSV_COLUMNS.join(","));
}

#[test]
fn zero_replicates_is_a_config_error() {
    assert!(matches!(ExperimentConfig::from_toml_str("replicates = 0"), Err(ConfigError::NoReplicates)));
}

#[test]
fn discarded_rows_have_empty_path_fields() {
    let r = ReplicateRecord {
        n: 10,
        dist: "pareto:4".into(),
        rep: 3,
        seed: 1,
        a_n: 4,
        outcome: Err("not_connected".into()),
        bfs_dist: None,
        ms: None,
    };
    let text = String::from_utf8(csv_bytes(&[r])).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 15);
    assert!(row[8].is_empty() && row[9].is_empty());
    assert_eq!((row[12], row[13]), ("1", "not_connected"));
}

#[test]
fn every_replicate_is_accounted_and_paths_split() {
    for mode in ["process", "realized", "both"] {
        let cfg = small(mode);
        let recs = run_fpp(&cfg);
        let copies = if cfg.mode == Mode::Both { 2 } else { 1 };
        assert_eq!(recs.len() as u64, copies * cfg.replicates * cfg.n_grid.len() as u64);
        let mut last = (0, 0);
        for r in &recs {
            assert!((r.n, r.rep) >= last, "rows ordered by (n, rep)");
            last = (r.n, r.rep);
            if let Some(k) = r.kept() {
                assert_eq!(k.hn, k.h1 + k.h2);
                assert!(k.wn > 0.0);
            }
            let realized = mode == "realized" || r.dist.ends_with("#realized");
            if !realized {
                assert_eq!(r.bfs_dist, None);
            } else if let Some(k) = r.kept() {
                assert!(r.bfs_dist.is_some_and(|d| d <= k.hn));
            }
        }
    }
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let cfg = small("both");
    let one = par::with_workers(1, || csv_bytes(&run_fpp(&cfg)));
    let three = par::with_workers(3, || csv_bytes(&run_fpp(&cfg)));
    let again = par::with_workers(1, || csv_bytes(&run_fpp(&cfg)));
    assert_eq!(one, three);
    assert_eq!(one, again);
}

#[test]
fn seeds_change_the_output() {
    let a = small("process");
    let mut b = a.clone();
    b.master_seed += 1;
    assert_ne!(csv_bytes(&run_fpp(&a)), csv_bytes(&run_fpp(&b)));
}

#[test]
fn report_survives_a_csv_round_trip() {
    let recs = run_fpp(&small("realized"));
    let back = read_csv(csv_bytes(&recs).as_slice()).unwrap();
    assert_eq!(back, recs);
    let rep = summarize(&back);
    assert_eq!(rep, summarize(&recs));
    assert!(rep.text.contains("mean Hn / mean H~"));
    assert!(rep.kv_text().contains("pareto:2.5.n500.kept="));
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fppcm"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "replicates = 0\n").unwrap();
    let st = bin().args(["--config", bad.to_str().unwrap(), "fpp"]).status().unwrap();
    assert_eq!(st.code(), Some(2));

    let out = dir.path().join("v");
    let run = bin()
        .args(["--seed", "3", "--workers", "2", "--out", out.to_str().unwrap()])
        .args(["validate", "--profile", "quick", "--criteria", "2,3,11"])
        .output()
        .unwrap();
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.starts_with("criterion")).count(), 3, "{stdout}");
    assert_eq!(run.status.code(), Some(if stdout.contains(" FAIL ") { 1 } else { 0 }));
    assert!(out.join("validate.csv").exists() && out.join("validation.kv").exists());

    let st = bin().args(["validate", "--criteria", "13"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn report_subcommand_reads_fpp_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(bin().args(["--seed", "5", "--out", out, "fpp"]).status().unwrap().success());
    let csv = dir.path().join("replicates.csv");
    let rep = dir.path().join("again");
    let o = bin().args(["--out", rep.to_str().unwrap(), "report", csv.to_str().unwrap()]).output().unwrap();
    assert!(o.status.success());
    let first = std::fs::read_to_string(dir.path().join("report.kv")).unwrap();
    assert_eq!(std::fs::read_to_string(rep.join("report.kv")).unwrap(), first);
}

proptest! {
    #[test]
    fn floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(float(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn grid_is_sorted_and_unique(grid in prop::collection::vec(2u64..100_000, 1..20)) {
        let text = format!("n_grid = {grid:?}");
        let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
        prop_assert!(cfg.n_grid.windows(2).all(|w| w[0] < w[1]));
        for n in &grid {
            prop_assert!(cfg.n_grid.contains(n));
        }
    }

    #[test]
    fn records_round_trip(n in 2u64..1_000_000, rep in 0u64..1000, wn in 0.0f64..100.0, h1 in 0u32..50, h2 in 0u32..50, keep in any::<bool>()) {
        let outcome = if keep {
            Ok(Kept { ce_n: 7, h1, h2, hn: h1 + h2, wn, r_overshoot: 2 })
        } else {
            Err("too_many_stubs".to_string())
        };
        let r = ReplicateRecord { n, dist: "explicit:2=0.5;3=0.5".into(), rep, seed: n ^ rep, a_n: 3, outcome, bfs_dist: keep.then_some(h1), ms: None };
        let back = read_csv(csv_bytes(std::slice::from_ref(&r)).as_slice()).unwrap();
        prop_assert_eq!(back, vec![r]);
    }
}
