//! Summaries of replicate records: a plain-text report and `key=value` lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use fppcm_core::stats::{self, clt_report, distance_contrast, theory_constants, HopSample};

use crate::config::parse_distribution;
use crate::record::{float, ReplicateRecord};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub text: String,
    pub kv: Vec<(String, String)>,
}

impl Report {
    fn put(&mut self, key: String, value: impl ToString) {
        self.kv.push((key, value.to_string()));
    }

    /// The machine-readable part, one `key=value` per line.
    pub fn kv_text(&self) -> String {
        self.kv.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

/// Kept records as the samples the statistics expect.
pub fn hop_samples(records: &[ReplicateRecord]) -> Vec<HopSample> {
    records
        .iter()
        .filter_map(|r| {
            r.kept().map(|k| HopSample {
                n: r.n,
                hn: k.hn as f64,
                wn: k.wn,
                ce_ratio: k.ce_n as f64 / r.a_n as f64,
                bfs: r.bfs_dist.map(f64::from),
            })
        })
        .collect()
}

/// Groups by the `dist` column in order of first appearance.
fn groups(records: &[ReplicateRecord]) -> Vec<(String, Vec<ReplicateRecord>)> {
    let mut out: Vec<(String, Vec<ReplicateRecord>)> = Vec::new();
    for r in records {
        match out.iter_mut().find(|(l, _)| *l == r.dist) {
            Some((_, v)) => v.push(r.clone()),
            None => out.push((r.dist.clone(), vec![r.clone()])),
        }
    }
    out
}

pub fn summarize(records: &[ReplicateRecord]) -> Report {
    let mut rep = Report::default();
    rep.put("records".into(), records.len());
    for (label, recs) in groups(records) {
        summarize_group(&mut rep, &label, &recs);
    }
    rep
}

fn summarize_group(rep: &mut Report, label: &str, recs: &[ReplicateRecord]) {
    let t = &mut rep.text;
    let _ = writeln!(t, "== {label} ==");
    let mut by_n: BTreeMap<u64, Vec<&ReplicateRecord>> = BTreeMap::new();
    for r in recs {
        by_n.entry(r.n).or_default().push(r);
    }
    let _ = writeln!(
        t,
        "{:>9} {:>6} {:>6} {:>10} {:>10} {:>10} {:>10} {:>8}",
        "n", "kept", "disc", "mean Hn", "var Hn", "mean Wn", "CE/a_n", "mean H~"
    );
    let mut rows = Vec::new();
    for (&n, v) in &by_n {
        let kept = hop_samples(&v.iter().map(|r| (*r).clone()).collect::<Vec<_>>());
        let discarded = v.len() - kept.len();
        let mut reasons: BTreeMap<&str, usize> = BTreeMap::new();
        for r in v {
            if let Err(reason) = &r.outcome {
                *reasons.entry(reason.as_str()).or_default() += 1;
            }
        }
        let h: Vec<f64> = kept.iter().map(|s| s.hn).collect();
        let w: Vec<f64> = kept.iter().map(|s| s.wn).collect();
        let hm = stats::moments(&h).ok();
        let wm = stats::moments(&w).ok();
        let ce = mean(kept.iter().map(|s| s.ce_ratio));
        let bfs = mean(kept.iter().filter_map(|s| s.bfs));
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
        let line = format!(
            "{n:>9} {:>6} {discarded:>6} {:>10} {:>10} {:>10} {:>10} {:>8}",
            kept.len(),
            fmt(hm.map(|m| m.mean)),
            fmt(hm.map(|m| m.variance)),
            fmt(wm.map(|m| m.mean)),
            fmt(ce),
            fmt(bfs)
        );
        rows.push(line);
        let key = format!("{label}.n{n}");
        rows_kv(
            &mut rep.kv,
            &key,
            kept.len(),
            discarded,
            hm.map(|m| (m.mean, m.variance)),
            wm.map(|m| m.mean),
            ce,
            bfs,
        );
        for (reason, c) in reasons {
            rep.kv.push((format!("{key}.discarded.{reason}"), c.to_string()));
        }
    }
    for line in rows {
        let _ = writeln!(rep.text, "{line}");
    }
    let dist = match parse_distribution(label) {
        Ok(d) => d,
        Err(e) => {
            let _ = writeln!(rep.text, "no theory comparison: {e}\n");
            return;
        }
    };
    let samples = hop_samples(recs);
    match theory_constants(&dist) {
        Ok(c) => {
            let _ = writeln!(rep.text, "alpha = {:.6}, gamma = {:.6}", c.alpha, c.gamma);
            rep.put(format!("{label}.alpha"), float(c.alpha));
            match clt_report(&samples, &c) {
                Ok(clt) => {
                    let _ = writeln!(
                        rep.text,
                        "mean slope {:.4} ± {:.4} (rel. error {:.3}), variance slope {:.4} ± {:.4} (rel. error {:.3})",
                        clt.mean_fit.slope,
                        clt.mean_fit.slope_se,
                        clt.mean_slope_rel_error(),
                        clt.variance_fit.slope,
                        clt.variance_fit.slope_se,
                        clt.variance_slope_rel_error()
                    );
                    let ks: Vec<String> = clt.ks_trend().iter().map(|k| format!("{k:.4}")).collect();
                    let _ = writeln!(rep.text, "standardized hopcount KS by n: {}", ks.join(" "));
                    rep.put(format!("{label}.mean_slope"), float(clt.mean_fit.slope));
                    rep.put(format!("{label}.variance_slope"), float(clt.variance_fit.slope));
                    rep.put(format!("{label}.ks_at_largest"), float(clt.ks_at_largest));
                    for s in &clt.sizes {
                        rep.put(format!("{label}.n{}.recentered_wn", s.n), float(s.recentered_weight_mean));
                    }
                }
                Err(e) => {
                    let _ = writeln!(rep.text, "no slope fit: {e}");
                }
            }
        }
        Err(e) => {
            let _ = writeln!(rep.text, "no theory constants: {e}");
        }
    }
    if samples.iter().any(|s| s.bfs.is_some()) {
        match distance_contrast(&samples, &dist) {
            Ok(c) => {
                let ratios: Vec<String> = c.rows.iter().map(|r| format!("{:.4}", r.ratio)).collect();
                let norm: Vec<String> = c.rows.iter().map(|r| format!("{:.4}", r.normalized_distance)).collect();
                let _ = writeln!(rep.text, "mean Hn / mean H~ by n: {} ({})", ratios.join(" "), c.ratio_trend.label());
                let _ = writeln!(
                    rep.text,
                    "normalized graph distance by n: {} (reference {:.4})",
                    norm.join(" "),
                    c.reference
                );
                rep.put(format!("{label}.ratio_trend"), c.ratio_trend.label());
                rep.put(format!("{label}.distance_reference"), float(c.reference));
            }
            Err(e) => {
                let _ = writeln!(rep.text, "no distance contrast: {e}");
            }
        }
    }
    rep.text.push('\n');
}

#[allow(clippy::too_many_arguments)]
fn rows_kv(
    kv: &mut Vec<(String, String)>,
    key: &str,
    kept: usize,
    discarded: usize,
    hop: Option<(f64, f64)>,
    wn: Option<f64>,
    ce: Option<f64>,
    bfs: Option<f64>,
) {
    kv.push((format!("{key}.kept"), kept.to_string()));
    kv.push((format!("{key}.discarded"), discarded.to_string()));
    if let Some((m, v)) = hop {
        kv.push((format!("{key}.mean_hn"), float(m)));
        kv.push((format!("{key}.var_hn"), float(v)));
    }
    for (name, value) in [("mean_wn", wn), ("mean_ce_ratio", ce), ("mean_bfs", bfs)] {
        if let Some(x) = value {
            kv.push((format!("{key}.{name}"), float(x)));
        }
    }
}

fn mean(it: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, c) = it.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (c > 0).then(|| s / c as f64)
}
