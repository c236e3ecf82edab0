//! Theory constants, goodness-of-fit tests and experiment summaries.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::degree_model::{DegreeDistribution, DegreeLaw, Nu};
use crate::special::{kolmogorov_sf, normal_cdf};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("empty input")]
    EmptyInput,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("τ = 3 is a critical case without theory constants")]
    CriticalTau,
    #[error("degree law is not supercritical (ν ≤ 1)")]
    Degenerate,
}

/// Asymptotic constants of the hopcount and weight limit theorems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryConstants {
    /// Hopcount CLT: mean and variance grow like `α log n`.
    pub alpha: f64,
    /// Generation growth rate of the tree flow.
    pub beta: f64,
    /// Weight centring: `W_n − γ log n` converges.
    pub gamma: f64,
    /// `a_n = ⌈n^{exponent}⌉`.
    pub a_n_exponent: f64,
    /// True for `τ ∈ (2, 3)`.
    pub infinite_variance: bool,
}

/// Constants for finite `ν` (`τ > 3` or explicit laws) and for `τ ∈ (2, 3)`.
pub fn theory_constants(dist: &DegreeDistribution) -> Result<TheoryConstants, StatsError> {
    if let Some(tau) = dist.tau() {
        if tau == 3.0 {
            return Err(StatsError::CriticalTau);
        }
        if tau < 3.0 {
            return Ok(TheoryConstants {
                alpha: 2.0 * (tau - 2.0) / (tau - 1.0),
                beta: 1.0,
                gamma: 0.0,
                a_n_exponent: (tau - 2.0) / (tau - 1.0),
                infinite_variance: true,
            });
        }
    }
    let nu = match dist.nu() {
        Nu::Finite(v) if v > 1.0 => v,
        _ => return Err(StatsError::Degenerate),
    };
    Ok(TheoryConstants {
        alpha: nu / (nu - 1.0),
        beta: nu / (nu - 1.0),
        gamma: 1.0 / (nu - 1.0),
        a_n_exponent: 0.5,
        infinite_variance: false,
    })
}

/// `a_n = ⌈n^{(τ∧3−2)/(τ∧3−1)}⌉`, with exponent `1/2` for explicit laws.
/// Powers that land within relative `1e-12` of an integer are snapped to it
/// before rounding up.
pub fn a_n(dist: &DegreeDistribution, n: u64) -> u64 {
    let e = match dist.law() {
        DegreeLaw::DiscretePareto { tau } => {
            let t = tau.min(3.0);
            (t - 2.0) / (t - 1.0)
        }
        DegreeLaw::Explicit { .. } => 0.5,
    };
    let x = (n as f64).powf(e);
    let r = x.round();
    let v = if (x - r).abs() <= 1e-12 * r.max(1.0) { r } else { x.ceil() };
    (v as u64).max(1)
}

/// Kolmogorov–Smirnov statistic with its asymptotic p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

fn ks_p(d: f64, ne: f64) -> f64 {
    let s = ne.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

/// One-sample KS test against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsResult, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        let f = cdf(xi);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(KsResult { statistic: d, p_value: ks_p(d, n) })
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = if x[i] <= y[j] { x[i] } else { y[j] };
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    let ne = n1 * n2 / (n1 + n2);
    Ok(KsResult { statistic: d, p_value: ks_p(d, ne) })
}

/// Total variation distance between two pmfs on `0, 1, 2, …`; missing
/// entries count as zero.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (at(p, i) - at(q, i)).abs()).sum::<f64>()
}

/// Empirical pmf of integer samples.
pub fn empirical_pmf(samples: &[u64]) -> Vec<f64> {
    let max = samples.iter().copied().max().unwrap_or(0) as usize;
    let mut counts = vec![0.0; max + 1];
    for &s in samples {
        counts[s as usize] += 1.0;
    }
    let n = samples.len() as f64;
    counts.iter_mut().for_each(|c| *c /= n);
    counts
}

/// Chi-square goodness-of-fit result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Chi-square test of counts against cell probabilities. Adjacent cells are
/// pooled left to right until each pooled cell expects at least
/// `min_expected` observations; a short remainder joins the last pool.
pub fn chi_square_gof(observed: &[u64], probs: &[f64], min_expected: f64) -> Result<ChiSquareResult, StatsError> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(StatsError::InsufficientData("observed and expected cells must match".into()));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(StatsError::EmptyInput);
    }
    let n = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&obs, &p) in observed.iter().zip(probs) {
        o += obs as f64;
        e += p * n;
        if e >= min_expected {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    let mut stat = 0.0;
    for &(o, e) in &cells {
        if e > 0.0 {
            stat += (o - e) * (o - e) / e;
        } else if o > 0.0 {
            stat = f64::INFINITY;
        }
    }
    let df = cells.len().saturating_sub(1);
    let p_value = if df == 0 {
        1.0
    } else if stat.is_infinite() {
        0.0
    } else {
        ChiSquared::new(df as f64).expect("positive df").sf(stat)
    };
    Ok(ChiSquareResult { statistic: stat, df, p_value })
}

/// Mean, unbiased variance and standard errors of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    /// Standard error of the sample variance from the fourth central moment.
    pub se_variance: f64,
}

pub fn moments(x: &[f64]) -> Result<Moments, StatsError> {
    if x.len() < 2 {
        return Err(StatsError::InsufficientData("need at least two observations".into()));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let variance = m2 * n / (n - 1.0);
    let var_of_var = (m4 - variance * variance * (n - 3.0) / (n - 1.0)) / n;
    let se_variance = if var_of_var > 0.0 { var_of_var.sqrt() } else { variance * (2.0 / (n - 1.0)).sqrt() };
    Ok(Moments { count: x.len(), mean, variance, se_mean: (variance / n).sqrt(), se_variance })
}

/// Straight-line fit `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
}

/// Weighted least squares with weights `1/se²`. Falls back to ordinary least
/// squares when any standard error is zero.
pub fn weighted_line_fit(x: &[f64], y: &[f64], se: &[f64]) -> Result<LineFit, StatsError> {
    if x.len() < 2 || x.len() != y.len() || x.len() != se.len() {
        return Err(StatsError::InsufficientData("line fit needs two or more points".into()));
    }
    let ols = se.iter().any(|&s| !s.is_finite() || s <= 0.0);
    let w: Vec<f64> = se.iter().map(|&s| if ols { 1.0 } else { 1.0 / (s * s) }).collect();
    let sw: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let sxy: f64 = w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum();
    let det = sw * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return Err(StatsError::InsufficientData("all x values coincide".into()));
    }
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let (slope_se, intercept_se) = if ols {
        let k = x.len() as f64;
        let rss: f64 = x.iter().zip(y).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        let s2 = if k > 2.0 { rss / (k - 2.0) } else { 0.0 };
        ((s2 * sw / det).sqrt(), (s2 * sxx / det).sqrt())
    } else {
        ((sw / det).sqrt(), (sxx / det).sqrt())
    };
    Ok(LineFit { slope, intercept, slope_se, intercept_se })
}

/// One kept replicate as seen by the summaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopSample {
    pub n: u64,
    pub hn: f64,
    pub wn: f64,
    pub ce_ratio: f64,
    pub bfs: Option<f64>,
}

/// Per-size summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeSummary {
    pub n: u64,
    pub hop: Moments,
    pub weight: Moments,
    pub ce_ratio_mean: f64,
    pub bfs_mean: Option<f64>,
    /// KS distance of `(H_n − α log n)/√(α log n)` to the standard normal.
    pub standardized_hop_ks: f64,
    /// Mean of `W_n − γ log n`.
    pub recentered_weight_mean: f64,
}

/// Regression of hopcount mean and variance on `log n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CltReport {
    pub alpha: f64,
    pub sizes: Vec<SizeSummary>,
    pub mean_fit: LineFit,
    pub variance_fit: LineFit,
    pub ks_at_largest: f64,
}

impl CltReport {
    pub fn mean_slope_rel_error(&self) -> f64 {
        (self.mean_fit.slope - self.alpha).abs() / self.alpha
    }

    pub fn variance_slope_rel_error(&self) -> f64 {
        (self.variance_fit.slope - self.alpha).abs() / self.alpha
    }

    /// Standardized KS statistics along the grid.
    pub fn ks_trend(&self) -> Vec<f64> {
        self.sizes.iter().map(|s| s.standardized_hop_ks).collect()
    }
}

fn group_by_n(samples: &[HopSample]) -> BTreeMap<u64, Vec<HopSample>> {
    let mut by_n: BTreeMap<u64, Vec<HopSample>> = BTreeMap::new();
    for s in samples {
        by_n.entry(s.n).or_default().push(*s);
    }
    by_n
}

/// Hopcount CLT summary over a grid of sizes.
pub fn clt_report(samples: &[HopSample], constants: &TheoryConstants) -> Result<CltReport, StatsError> {
    let by_n = group_by_n(samples);
    if by_n.len() < 2 {
        return Err(StatsError::InsufficientData("need at least two grid sizes".into()));
    }
    if let Some((n, v)) = by_n.iter().find(|(_, v)| v.len() < 100) {
        return Err(StatsError::InsufficientData(format!("only {} replicates at n = {n}", v.len())));
    }
    let alpha = constants.alpha;
    let mut sizes = Vec::new();
    for (&n, v) in &by_n {
        let ln = (n as f64).ln();
        let h: Vec<f64> = v.iter().map(|s| s.hn).collect();
        let w: Vec<f64> = v.iter().map(|s| s.wn).collect();
        let sd = (alpha * ln).sqrt();
        let z: Vec<f64> = h.iter().map(|x| (x - alpha * ln) / sd).collect();
        let ks = ks_one_sample(&z, normal_cdf)?.statistic;
        let bfs: Vec<f64> = v.iter().filter_map(|s| s.bfs).collect();
        let weight = moments(&w)?;
        sizes.push(SizeSummary {
            n,
            hop: moments(&h)?,
            weight,
            ce_ratio_mean: v.iter().map(|s| s.ce_ratio).sum::<f64>() / v.len() as f64,
            bfs_mean: (!bfs.is_empty()).then(|| bfs.iter().sum::<f64>() / bfs.len() as f64),
            standardized_hop_ks: ks,
            recentered_weight_mean: weight.mean - constants.gamma * ln,
        });
    }
    let x: Vec<f64> = sizes.iter().map(|s| (s.n as f64).ln()).collect();
    let mean_fit = weighted_line_fit(
        &x,
        &sizes.iter().map(|s| s.hop.mean).collect::<Vec<_>>(),
        &sizes.iter().map(|s| s.hop.se_mean).collect::<Vec<_>>(),
    )?;
    let variance_fit = weighted_line_fit(
        &x,
        &sizes.iter().map(|s| s.hop.variance).collect::<Vec<_>>(),
        &sizes.iter().map(|s| s.hop.se_variance).collect::<Vec<_>>(),
    )?;
    let ks_at_largest = sizes.last().expect("nonempty").standardized_hop_ks;
    Ok(CltReport { alpha, sizes, mean_fit, variance_fit, ks_at_largest })
}

/// Shape of a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Increasing,
    Decreasing,
    Flat,
    Mixed,
}

impl Trend {
    pub fn label(self) -> &'static str {
        match self {
            Trend::Increasing => "increasing",
            Trend::Decreasing => "decreasing",
            Trend::Flat => "flat",
            Trend::Mixed => "mixed",
        }
    }
}

/// Classifies a sequence as strictly increasing, strictly decreasing, flat
/// (all steps within relative `1e-12`) or mixed.
pub fn trend(values: &[f64]) -> Trend {
    let steps: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let eps = 1e-12 * scale;
    if steps.iter().all(|d| d.abs() <= eps) {
        Trend::Flat
    } else if steps.iter().all(|&d| d > eps) {
        Trend::Increasing
    } else if steps.iter().all(|&d| d < -eps) {
        Trend::Decreasing
    } else {
        Trend::Mixed
    }
}

/// Per-size comparison of weighted hopcount and graph distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastRow {
    pub n: u64,
    pub mean_hop: f64,
    pub mean_graph_distance: f64,
    /// `mean(H_n) / mean(H̃_n)`.
    pub ratio: f64,
    /// `mean(H̃_n)` divided by `log log n` (τ < 3) or `log n` (finite ν).
    pub normalized_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContrastReport {
    pub rows: Vec<ContrastRow>,
    /// `2/|log(τ−2)|` for τ < 3 and `1/log ν` for finite ν.
    pub reference: f64,
    pub ratio_trend: Trend,
}

/// Graph-distance versus hopcount contrast.
pub fn distance_contrast(samples: &[HopSample], dist: &DegreeDistribution) -> Result<ContrastReport, StatsError> {
    let ultra_small = dist.tau().is_some_and(|t| t < 3.0);
    let reference = if ultra_small {
        2.0 / (dist.tau().expect("pareto") - 2.0).ln().abs()
    } else {
        match dist.nu() {
            Nu::Finite(nu) if nu > 1.0 => 1.0 / nu.ln(),
            Nu::Finite(_) => return Err(StatsError::Degenerate),
            Nu::Infinite => return Err(StatsError::CriticalTau),
        }
    };
    let by_n = group_by_n(samples);
    let mut rows = Vec::new();
    for (&n, v) in &by_n {
        let bfs: Vec<f64> = v.iter().filter_map(|s| s.bfs).collect();
        if bfs.is_empty() {
            continue;
        }
        let mean_hop = v.iter().map(|s| s.hn).sum::<f64>() / v.len() as f64;
        let mean_d = bfs.iter().sum::<f64>() / bfs.len() as f64;
        let ln = (n as f64).ln();
        let scale = if ultra_small { ln.ln() } else { ln };
        rows.push(ContrastRow {
            n,
            mean_hop,
            mean_graph_distance: mean_d,
            ratio: mean_hop / mean_d,
            normalized_distance: mean_d / scale,
        });
    }
    if rows.len() < 2 {
        return Err(StatsError::InsufficientData("need graph distances at two or more sizes".into()));
    }
    let ratio_trend = trend(&rows.iter().map(|r| r.ratio).collect::<Vec<_>>());
    Ok(ContrastReport { rows, reference, ratio_trend })
}
