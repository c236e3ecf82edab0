//! Degree laws `F`, their size-biased companions `g`, moments and exact
//! inverse-CDF samplers.
//!
//! Two families are supported. [`DegreeLaw::DiscretePareto`] has survival
//! `P(D ≥ k) = (2/k)^{τ-1}` for integers `k ≥ 2`, which admits a closed-form
//! inverse CDF and closed-form moments through the Hurwitz zeta function.
//! [`DegreeLaw::Explicit`] is a finite-support pmf, for which every constant is
//! computable exactly.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::rng::open_unit;
use crate::special::hurwitz_zeta;

/// Default truncation bound for series evaluations.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Number of size-biased survival values precomputed for Pareto laws.
const SIZE_BIASED_TABLE: usize = 4096;

/// The two supported families of degree laws.
#[derive(Debug, Clone, PartialEq)]
pub enum DegreeLaw {
    /// `P(D ≥ k) = (2/k)^{τ-1}` for `k ≥ 2`, with `τ > 2`.
    DiscretePareto { tau: f64 },
    /// Finite-support pmf keyed by degree.
    Explicit { pmf: BTreeMap<u64, f64> },
}

/// Mean forward degree `ν = E[D(D-1)]/E[D]`, which is infinite for `τ ≤ 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nu {
    Finite(f64),
    Infinite,
}

impl Nu {
    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            Nu::Finite(v) => Some(v),
            Nu::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Nu::Infinite)
    }
}

impl fmt::Display for Nu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nu::Finite(v) => write!(f, "{v}"),
            Nu::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DegreeError {
    #[error("tail exponent must be finite and exceed 2, got {0}")]
    InvalidTau(f64),
    #[error("explicit pmf has no support")]
    EmptyPmf,
    #[error("explicit pmf has invalid mass {mass} at degree {degree}")]
    InvalidMass { degree: u64, mass: f64 },
    #[error("explicit pmf sums to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("degree {degree} is below 2; only test-only laws may use it")]
    DegreeBelowTwo { degree: u64 },
    #[error("degree law has zero mean")]
    ZeroMean,
}

/// A validated degree law with cached moments.
#[derive(Debug, Clone)]
pub struct DegreeDistribution {
    law: DegreeLaw,
    mu: f64,
    nu: Nu,
    tail_tolerance: f64,
    // Explicit laws: sorted support and P(D >= support[i]).
    support: Vec<u64>,
    survival: Vec<f64>,
    test_only: bool,
}

impl DegreeDistribution {
    /// Discrete Pareto law with tail exponent `tau > 2`.
    pub fn pareto(tau: f64) -> Result<Self, DegreeError> {
        if !tau.is_finite() || tau <= 2.0 {
            return Err(DegreeError::InvalidTau(tau));
        }
        let c = 2f64.powf(tau - 1.0);
        let z1 = hurwitz_zeta(tau - 1.0, 3.0);
        let mu = 2.0 + c * z1;
        let nu = if tau > 3.0 {
            let fact2 = 2.0 + 2.0 * c * (hurwitz_zeta(tau - 2.0, 3.0) - z1);
            Nu::Finite(fact2 / mu)
        } else {
            Nu::Infinite
        };
        Ok(Self {
            law: DegreeLaw::DiscretePareto { tau },
            mu,
            nu,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            support: Vec::new(),
            survival: Vec::new(),
            test_only: false,
        })
    }

    /// Finite-support law; every degree must be at least 2 and the masses
    /// must sum to one within the tail tolerance.
    pub fn explicit<I: IntoIterator<Item = (u64, f64)>>(pmf: I) -> Result<Self, DegreeError> {
        Self::build_explicit(pmf, false)
    }

    /// Like [`DegreeDistribution::explicit`] but admits degrees 0 and 1.
    /// Meant for hand-built graphs and extinction tests.
    pub fn explicit_test_only<I: IntoIterator<Item = (u64, f64)>>(pmf: I) -> Result<Self, DegreeError> {
        Self::build_explicit(pmf, true)
    }

    fn build_explicit<I: IntoIterator<Item = (u64, f64)>>(pmf: I, test_only: bool) -> Result<Self, DegreeError> {
        let mut map: BTreeMap<u64, f64> = BTreeMap::new();
        for (k, p) in pmf {
            if !p.is_finite() || p < 0.0 {
                return Err(DegreeError::InvalidMass { degree: k, mass: p });
            }
            if k < 2 && !test_only {
                return Err(DegreeError::DegreeBelowTwo { degree: k });
            }
            *map.entry(k).or_insert(0.0) += p;
        }
        map.retain(|_, p| *p > 0.0);
        if map.is_empty() {
            return Err(DegreeError::EmptyPmf);
        }
        let sum: f64 = map.values().sum();
        if (sum - 1.0).abs() > DEFAULT_TAIL_TOLERANCE.max(1e-9) {
            return Err(DegreeError::NotNormalized { sum });
        }
        for p in map.values_mut() {
            *p /= sum;
        }
        let mu: f64 = map.iter().map(|(&k, &p)| k as f64 * p).sum();
        if mu <= 0.0 {
            return Err(DegreeError::ZeroMean);
        }
        let fact2: f64 = map.iter().map(|(&k, &p)| (k as f64) * (k as f64 - 1.0) * p).sum();
        let support: Vec<u64> = map.keys().copied().collect();
        let mut survival = vec![0.0; support.len()];
        let mut acc = 0.0;
        for (i, &k) in support.iter().enumerate().rev() {
            acc += map[&k];
            survival[i] = acc;
        }
        Ok(Self {
            law: DegreeLaw::Explicit { pmf: map },
            mu,
            nu: Nu::Finite(fact2 / mu),
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            support,
            survival,
            test_only,
        })
    }

    /// Replaces the series truncation bound.
    pub fn with_tail_tolerance(mut self, tol: f64) -> Self {
        self.tail_tolerance = tol;
        self
    }

    pub fn law(&self) -> &DegreeLaw {
        &self.law
    }

    /// The tail exponent of a Pareto law.
    pub fn tau(&self) -> Option<f64> {
        match self.law {
            DegreeLaw::DiscretePareto { tau } => Some(tau),
            DegreeLaw::Explicit { .. } => None,
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> Nu {
        self.nu
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    pub fn is_test_only(&self) -> bool {
        self.test_only
    }

    /// True when `ν ≤ 1`, i.e. the forward process is not supercritical.
    pub fn is_degenerate(&self) -> bool {
        matches!(self.nu, Nu::Finite(v) if v <= 1.0 + 1e-12)
    }

    /// `f_k = P(D = k)`.
    pub fn pmf(&self, k: u64) -> f64 {
        match &self.law {
            DegreeLaw::DiscretePareto { tau } => {
                if k < 2 {
                    0.0
                } else {
                    let e = tau - 1.0;
                    (2.0 / k as f64).powf(e) - (2.0 / (k as f64 + 1.0)).powf(e)
                }
            }
            DegreeLaw::Explicit { pmf } => pmf.get(&k).copied().unwrap_or(0.0),
        }
    }

    /// `P(D ≥ k)`.
    pub fn survival(&self, k: u64) -> f64 {
        match &self.law {
            DegreeLaw::DiscretePareto { tau } => {
                if k <= 2 {
                    1.0
                } else {
                    (2.0 / k as f64).powf(tau - 1.0)
                }
            }
            DegreeLaw::Explicit { .. } => {
                let i = self.support.partition_point(|&d| d < k);
                self.survival.get(i).copied().unwrap_or(0.0)
            }
        }
    }

    /// Draws one degree by inversion.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let v = open_unit(rng);
        match self.law {
            DegreeLaw::DiscretePareto { tau } => pareto_inverse(tau, v),
            DegreeLaw::Explicit { .. } => {
                // smallest support point whose successor survival is < v
                let i = self.survival.partition_point(|&s| s >= v);
                self.support[i.max(1) - 1]
            }
        }
    }

    /// The size-biased forward-degree law.
    pub fn size_biased(&self) -> SizeBiasedDistribution {
        SizeBiasedDistribution::new(self.clone())
    }

    /// Short identifier used in output files, e.g. `pareto:2.5`.
    pub fn label(&self) -> String {
        match &self.law {
            DegreeLaw::DiscretePareto { tau } => format!("pareto:{tau}"),
            DegreeLaw::Explicit { pmf } => {
                let parts: Vec<String> = pmf.iter().map(|(k, p)| format!("{k}={p}")).collect();
                format!("explicit:{}", parts.join(";"))
            }
        }
    }
}

/// Exact inverse of `P(D ≥ k) = (2/k)^{τ-1}` evaluated at `v ∈ (0, 1]`.
pub fn pareto_inverse(tau: f64, v: f64) -> u64 {
    let x = 2.0 * v.powf(-1.0 / (tau - 1.0));
    // `as` saturates for huge values.
    (x.floor() as u64).max(2)
}

/// `(μ, ν)` of a degree law.
pub fn moments(dist: &DegreeDistribution) -> (f64, Nu) {
    (dist.mu(), dist.nu())
}

/// Draws `D ~ F`.
pub fn sample_degree<R: Rng + ?Sized>(dist: &DegreeDistribution, rng: &mut R) -> u64 {
    dist.sample(rng)
}

/// Draws `B ~ g`.
pub fn sample_size_biased<R: Rng + ?Sized>(sb: &SizeBiasedDistribution, rng: &mut R) -> u64 {
    sb.sample(rng)
}

/// Forward-degree law `g_j = (j+1) f_{j+1} / μ`.
#[derive(Debug, Clone)]
pub struct SizeBiasedDistribution {
    base: DegreeDistribution,
    // survival[j] = P(B >= j); covers the whole support for explicit laws.
    survival: Vec<f64>,
}

impl SizeBiasedDistribution {
    fn new(base: DegreeDistribution) -> Self {
        let survival = match &base.law {
            DegreeLaw::DiscretePareto { tau } => {
                (0..=SIZE_BIASED_TABLE as u64 + 1).map(|j| pareto_size_biased_survival(*tau, base.mu, j)).collect()
            }
            DegreeLaw::Explicit { pmf } => {
                let max_b = *pmf.keys().next_back().expect("nonempty") as usize;
                let mut g = vec![0.0; max_b + 2];
                for (&k, &p) in pmf {
                    if k >= 1 {
                        g[k as usize - 1] += k as f64 * p / base.mu;
                    }
                }
                let mut s = vec![0.0; max_b + 2];
                let mut acc = 0.0;
                for j in (0..=max_b).rev() {
                    acc += g[j];
                    s[j] = acc;
                }
                s[0] = 1.0;
                s
            }
        };
        Self { base, survival }
    }

    pub fn base(&self) -> &DegreeDistribution {
        &self.base
    }

    /// `g_j`.
    pub fn pmf(&self, j: u64) -> f64 {
        (j as f64 + 1.0) * self.base.pmf(j + 1) / self.base.mu
    }

    /// `P(B ≥ j)`.
    pub fn survival(&self, j: u64) -> f64 {
        if (j as usize) < self.survival.len() {
            return self.survival[j as usize];
        }
        match self.base.law {
            DegreeLaw::DiscretePareto { tau } => pareto_size_biased_survival(tau, self.base.mu, j),
            DegreeLaw::Explicit { .. } => 0.0,
        }
    }

    /// `E[B] = ν`.
    pub fn mean(&self) -> Nu {
        self.base.nu
    }

    /// Sum of `g_j` over `j < k` plus the exact tail `P(B ≥ k)`; equals one up
    /// to rounding for any cut-off `k`.
    pub fn total_mass(&self, k: u64) -> f64 {
        let head: f64 = (0..k).map(|j| self.pmf(j)).sum();
        head + self.survival(k)
    }

    /// Probability generating function `h(s) = Σ g_j s^j` for `s ∈ [0, 1]`,
    /// summed until the tail bound `s^J P(B ≥ J)` drops below the tolerance.
    /// Returns `None` when that needs more than `max_terms` terms.
    pub fn pgf(&self, s: f64, max_terms: u64) -> Option<f64> {
        if s >= 1.0 {
            return Some(1.0);
        }
        let tol = self.base.tail_tolerance * 1e-3;
        let mut acc = 0.0;
        let mut pow = 1.0;
        let mut j = 0u64;
        loop {
            acc += self.pmf(j) * pow;
            pow *= s;
            j += 1;
            let tail = pow * self.survival(j);
            if tail <= tol {
                return Some(acc + 0.5 * tail);
            }
            if j >= max_terms {
                return None;
            }
        }
    }

    /// Draws `B ~ g` by inversion, `B = min{j : P(B ≥ j+1) < V}` for
    /// `V ∈ (0, 1]`. Precomputed survival values cover the bulk; heavy Pareto
    /// tails use exponential search and bisection on the closed form. Draws
    /// beyond `u64::MAX` saturate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let v = open_unit(rng);
        self.inverse(v)
    }

    /// The inverse CDF at `v ∈ (0, 1]`.
    pub fn inverse(&self, v: f64) -> u64 {
        let table = &self.survival;
        let last = table.len() - 1;
        if table[last] < v {
            // first i >= 1 with table[i] < v
            let scan_end = last.min(16);
            if let Some(i) = table[1..=scan_end].iter().position(|&s| s < v) {
                return i as u64;
            }
            let i = scan_end + 1 + table[scan_end + 1..].partition_point(|&s| s >= v);
            return i as u64 - 1;
        }
        // Only Pareto laws reach here: survival(last) >= v.
        let mut lo = last as u64;
        let mut hi = lo.saturating_mul(2);
        while self.survival(hi) >= v {
            if hi >= 1 << 62 {
                return u64::MAX;
            }
            lo = hi;
            hi = hi.saturating_mul(2);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.survival(mid) >= v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi - 1
    }
}

/// `P(B ≥ j)` for the Pareto law, by summation by parts:
/// `2^{τ-1} [(j+1)^{2-τ} + ζ(τ-1, j+2)] / μ` for `j ≥ 1`.
fn pareto_size_biased_survival(tau: f64, mu: f64, j: u64) -> f64 {
    if j <= 1 {
        return 1.0;
    }
    let c = 2f64.powf(tau - 1.0);
    let x = j as f64;
    (c * ((x + 1.0).powf(2.0 - tau) + hurwitz_zeta(tau - 1.0, x + 2.0)) / mu).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn explicit_two_point_moments() {
        let d = DegreeDistribution::explicit([(2, 0.5), (3, 0.5)]).unwrap();
        assert!((d.mu() - 2.5).abs() < 1e-15);
        assert!((d.nu().finite().unwrap() - 1.6).abs() < 1e-15);
        let p = DegreeDistribution::explicit([(2, 1.0)]).unwrap();
        assert_eq!(p.nu(), Nu::Finite(1.0));
        assert!(p.is_degenerate());
    }

    #[test]
    fn explicit_validation() {
        assert_eq!(DegreeDistribution::explicit([(1, 1.0)]).unwrap_err(), DegreeError::DegreeBelowTwo { degree: 1 });
        assert!(matches!(DegreeDistribution::explicit([(2, 0.5)]).unwrap_err(), DegreeError::NotNormalized { .. }));
        assert!(DegreeDistribution::explicit_test_only([(1, 0.5), (2, 0.5)]).is_ok());
        assert!(DegreeDistribution::pareto(2.0).is_err());
    }

    #[test]
    fn pareto_inverse_examples() {
        assert_eq!(pareto_inverse(3.0, 0.25), 4);
        assert_eq!(pareto_inverse(3.0, 1.0), 2);
        assert_eq!(pareto_inverse(2.5, 1.0 - 1e-12), 2);
        assert!(pareto_inverse(2.1, 1e-300) > 1 << 60);
    }

    #[test]
    fn pareto_tau4_constants() {
        let d = DegreeDistribution::pareto(4.0).unwrap();
        // μ = 2 + 8 ζ(3, 3)
        assert!((d.mu() - 2.616_455_225_276_754).abs() < 1e-12, "{}", d.mu());
        let nu = d.nu().finite().unwrap();
        assert!((nu - 2.708_2).abs() < 1e-3, "{nu}");
        assert!(DegreeDistribution::pareto(2.5).unwrap().nu().is_infinite());
        assert!(DegreeDistribution::pareto(3.0).unwrap().nu().is_infinite());
    }

    #[test]
    fn size_biased_explicit_pmf() {
        let d = DegreeDistribution::explicit([(2, 0.5), (3, 0.5)]).unwrap();
        let g = d.size_biased();
        assert!((g.pmf(1) - 0.4).abs() < 1e-15);
        assert!((g.pmf(2) - 0.6).abs() < 1e-15);
        assert_eq!(g.pmf(0), 0.0);
        assert_eq!(g.inverse(1.0), 1);
        assert_eq!(g.inverse(0.6000001), 1);
        assert_eq!(g.inverse(0.6), 2);
        assert_eq!(g.inverse(1e-300), 2);
        let point = DegreeDistribution::explicit([(2, 1.0)]).unwrap().size_biased();
        let mut r = stream(3);
        assert!((0..1000).all(|_| point.sample(&mut r) == 1));
    }

    #[test]
    fn size_biased_survival_matches_pmf_sums() {
        for &tau in &[2.5, 3.5, 4.0] {
            let d = DegreeDistribution::pareto(tau).unwrap();
            let g = d.size_biased();
            let mut acc = 0.0;
            for j in 0..10_000u64 {
                let s = g.survival(j);
                let direct = 1.0 - acc;
                assert!((s - direct).abs() < 1e-11, "tau={tau} j={j} {s} {direct}");
                acc += g.pmf(j);
            }
            // beyond the table the closed form continues smoothly
            let j = SIZE_BIASED_TABLE as u64;
            let lhs = g.survival(j + 5) - g.survival(j + 6);
            assert!((lhs - g.pmf(j + 5)).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_is_consistent_with_survival() {
        let g = DegreeDistribution::pareto(2.5).unwrap().size_biased();
        assert_eq!(g.inverse(1e-300), u64::MAX);
        for &v in &[0.9, 0.5, 0.1, 1e-3, 1e-5, 1e-8, 1e-9] {
            let j = g.inverse(v);
            assert!(g.survival(j + 1) < v, "v={v} j={j}");
            assert!(j == 0 || g.survival(j) >= v, "v={v} j={j}");
        }
    }

    #[test]
    fn pgf_values() {
        let g = DegreeDistribution::explicit([(2, 0.5), (3, 0.5)]).unwrap().size_biased();
        let h = g.pgf(0.5, 1000).unwrap();
        assert!((h - (0.4 * 0.5 + 0.6 * 0.25)).abs() < 1e-15);
        let p = DegreeDistribution::pareto(4.0).unwrap().size_biased();
        let h = p.pgf(0.3, 1_000_000).unwrap();
        let direct: f64 = (0..200).map(|j| p.pmf(j) * 0.3f64.powi(j as i32)).sum();
        assert!((h - direct).abs() < 1e-13);
    }
}
