//! Samplers for the limiting random variables of the weight and hopcount.
//!
//! * `W`: martingale limit of `Z(t) e^{−(ν−1)t}` for the continuous-time
//!   branching process whose root has `D ~ F` children at time 0 and whose
//!   other individuals live an Exp(1) time and leave `B ~ g` children.
//! * `Λ = log((ν−1)M/μ)` with `M ~ Exp(mean μ/(ν−1))`.
//! * `V`, the limit of `W_n − log n/(ν−1)` for finite `ν`.
//! * `X = Σ E_i/S_i`, the explosion time for `τ ∈ (2, 3)`.

use rand::Rng;
use thiserror::Error;

use crate::degree_model::{DegreeDistribution, Nu, SizeBiasedDistribution};
use crate::rng::{exp1, index};
use crate::special::{bisect, NumericError};

mod laplace;
use laplace::LaplaceKernel;

pub const DEFAULT_POPULATION_CAP: u64 = 100_000;
pub const MIN_POPULATION_CAP: u64 = 1_000;
/// Increment threshold of the explosion-time truncation rule.
pub const X_INCREMENT_THRESHOLD: f64 = 1e-9;
/// Consecutive small increments required before truncating.
pub const X_CONSECUTIVE: u32 = 100;
/// Target for the estimated truncation bias of `X`.
pub const X_TAIL_TARGET: f64 = 1e-6;
const X_MAX_TERMS: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitError {
    #[error("ν is infinite for this law")]
    InfiniteNu,
    #[error("ν ≤ 1: the branching process is not supercritical")]
    Degenerate,
    #[error("explosion times need τ ∈ (2, 3)")]
    FiniteNuMisuse,
    #[error("population cap {0} is below the minimum {MIN_POPULATION_CAP}")]
    CapTooSmall(u64),
    #[error("laplace transform evaluation failed: {0}")]
    IntegrationFailure(#[from] NumericError),
    #[error("no samples")]
    EmptyInput,
}

/// Number of children of the root of the branching process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootLaw {
    /// `D ~ F`: the process seen from a uniform vertex.
    Degree,
    /// `B ~ g`: the process below a vertex reached through a stub.
    SizeBiased,
    /// One individual alive at time 0.
    SingleAncestor,
}

/// One explosion-time draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XSample {
    pub value: f64,
    /// Number of summed terms.
    pub terms: u64,
    /// Estimated expected remainder of the truncated series.
    pub tail_bound: f64,
}

/// Limit-law samplers bound to one degree law.
#[derive(Debug, Clone)]
pub struct LimitLawSamplers {
    dist: DegreeDistribution,
    sb: SizeBiasedDistribution,
    population_cap: u64,
    laplace: std::sync::OnceLock<Result<LaplaceKernel, NumericError>>,
}

impl LimitLawSamplers {
    pub fn new(dist: &DegreeDistribution) -> Self {
        Self {
            dist: dist.clone(),
            sb: dist.size_biased(),
            population_cap: DEFAULT_POPULATION_CAP,
            laplace: std::sync::OnceLock::new(),
        }
    }

    pub fn with_population_cap(mut self, cap: u64) -> Result<Self, LimitError> {
        if cap < MIN_POPULATION_CAP {
            return Err(LimitError::CapTooSmall(cap));
        }
        self.population_cap = cap;
        Ok(self)
    }

    pub fn population_cap(&self) -> u64 {
        self.population_cap
    }

    pub fn distribution(&self) -> &DegreeDistribution {
        &self.dist
    }

    pub fn mu(&self) -> f64 {
        self.dist.mu()
    }

    fn malthusian(&self) -> Result<f64, LimitError> {
        match self.dist.nu() {
            Nu::Infinite => Err(LimitError::InfiniteNu),
            Nu::Finite(nu) if nu <= 1.0 + 1e-12 => Err(LimitError::Degenerate),
            Nu::Finite(nu) => Ok(nu - 1.0),
        }
    }

    /// Martingale limit `W` with root `D ~ F`.
    pub fn sample_w<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, LimitError> {
        self.sample_w_rooted(RootLaw::Degree, rng)
    }

    /// Runs the embedded tree flow until the alive count reaches the cap and
    /// returns `s_m e^{−(ν−1)T_m}`, or 0 on extinction.
    pub fn sample_w_rooted<R: Rng + ?Sized>(&self, root: RootLaw, rng: &mut R) -> Result<f64, LimitError> {
        let r = self.malthusian()?;
        let mut alive = match root {
            RootLaw::Degree => self.dist.sample(rng),
            RootLaw::SizeBiased => self.sb.sample(rng),
            RootLaw::SingleAncestor => 1,
        } as f64;
        let cap = self.population_cap as f64;
        let mut t = 0.0;
        if alive == 0.0 {
            return Ok(0.0);
        }
        while alive < cap {
            t += exp1(rng) / alive;
            alive += self.sb.sample(rng) as f64 - 1.0;
            if alive <= 0.0 {
                return Ok(0.0);
            }
        }
        Ok(alive * (-r * t).exp())
    }

    /// `W` through the root decomposition `Σ_{j≤D} e^{−(ν−1)ξ_j} W'_j`, with
    /// `ξ_j ~ Exp(1)` the lifetimes of the root's children and `W'_j` the limit
    /// of the process started from the `B_j ~ g` grandchildren.
    pub fn sample_w_decomposed<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, LimitError> {
        let r = self.malthusian()?;
        let d = self.dist.sample(rng);
        let mut w = 0.0;
        for _ in 0..d {
            let xi = exp1(rng);
            w += (-r * xi).exp() * self.sample_w_rooted(RootLaw::SizeBiased, rng)?;
        }
        Ok(w)
    }

    /// `W` conditioned to be positive.
    fn sample_w_positive<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, LimitError> {
        loop {
            let w = self.sample_w(rng)?;
            if w > 0.0 {
                return Ok(w);
            }
        }
    }

    /// `M ~ Exp(mean μ/(ν−1))`.
    pub fn sample_m<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, LimitError> {
        let r = self.malthusian()?;
        Ok(exp1(rng) * self.mu() / r)
    }

    /// `Λ = log((ν−1)M/μ)`, the logarithm of a unit exponential.
    pub fn sample_lambda<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, LimitError> {
        let r = self.malthusian()?;
        let m = self.sample_m(rng)?;
        Ok((r * m / self.mu()).ln())
    }

    /// `V = −log W₁/(ν−1) − log W₂/(ν−1) + Λ/(ν−1) + log(μ(ν−1))/(ν−1)`.
    pub fn sample_v_tau_gt3<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, LimitError> {
        let nu = self.malthusian()? + 1.0;
        let w1 = self.sample_w_positive(rng)?;
        let w2 = self.sample_w_positive(rng)?;
        let m = self.sample_m(rng)?;
        Ok(compose_v(w1, w2, m, self.mu(), nu))
    }

    /// Explosion time `X = Σ_i E_i/S_i` with `S_1 = D ~ F` and
    /// `S_i = S_{i−1} + B_i − 1`, `B_i ~ g`.
    ///
    /// Summation stops once [`X_CONSECUTIVE`] successive increments fall below
    /// [`X_INCREMENT_THRESHOLD`] and the estimated remainder is below
    /// [`X_TAIL_TARGET`]. The remainder estimate extrapolates the walk's
    /// growth `S_j ≈ S_i (j/i)^{1/(τ−2)}`, giving `i (τ−2) / ((3−τ) S_i)`.
    pub fn sample_x<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<XSample, LimitError> {
        let tau = match self.dist.tau() {
            Some(t) if t > 2.0 && t < 3.0 => t,
            _ => return Err(LimitError::FiniteNuMisuse),
        };
        let mut s = self.dist.sample(rng) as f64;
        let mut x = 0.0;
        let mut run = 0u32;
        let mut i = 0u64;
        let slope = (tau - 2.0) / (3.0 - tau);
        loop {
            i += 1;
            let inc = exp1(rng) / s;
            x += inc;
            if inc < X_INCREMENT_THRESHOLD {
                run += 1;
            } else {
                run = 0;
            }
            let tail = i as f64 * slope / s;
            if (run >= X_CONSECUTIVE && tail <= X_TAIL_TARGET) || i >= X_MAX_TERMS {
                return Ok(XSample { value: x, terms: i, tail_bound: tail });
            }
            s += self.sb.sample(rng) as f64 - 1.0;
        }
    }

    /// Increments `E_i/S_i` of one explosion-time path for `i = 1..=terms`.
    pub fn x_increments<R: Rng + ?Sized>(&self, terms: usize, rng: &mut R) -> Vec<f64> {
        let mut s = self.dist.sample(rng) as f64;
        let mut out = Vec::with_capacity(terms);
        for _ in 0..terms {
            out.push(exp1(rng) / s);
            s += self.sb.sample(rng) as f64 - 1.0;
        }
        out
    }

    /// `φ(t) = E[e^{−tW̃}]` for the single-ancestor limit, by inverting
    /// `φ^{−1}(x) = (1−x) exp(∫_1^x ((ν−1)/(h(s)−s) + 1/(1−s)) ds)`.
    /// Laws with `P(B = 0) > 0` are rejected with a bracketing error.
    pub fn laplace_transform(&self, t: f64) -> Result<f64, LimitError> {
        self.malthusian()?;
        if t <= 0.0 {
            return Ok(1.0);
        }
        if self.sb.pmf(0) > 0.0 {
            // φ then decreases to the extinction probability, not to 0.
            return Err(NumericError::NoBracket { lo: 0.0, hi: 1.0 }.into());
        }
        let kernel = self.laplace.get_or_init(|| LaplaceKernel::new(&self.sb)).as_ref().map_err(|e| e.clone())?;
        let inverse = |x: f64| -> Result<f64, LimitError> { Ok((1.0 - x) * kernel.log_integral(x)?.exp()) };
        // φ^{-1} decreases from +∞ at 0 to 0 at 1; bracket the root.
        let mut lo = 0.5;
        while inverse(lo)? < t {
            lo *= 0.5;
            if lo < 1e-12 {
                return Err(NumericError::NoBracket { lo, hi: 1.0 }.into());
            }
        }
        let mut failure = None;
        let root = bisect(
            |x| match inverse(x) {
                Ok(v) => v - t,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            },
            lo,
            1.0,
            1e-13,
        )?;
        match failure {
            Some(e) => Err(e),
            None => Ok(root),
        }
    }

    /// Compares the numerical transform with the empirical transform of the
    /// given single-ancestor samples at each `t`.
    pub fn laplace_check<R: Rng + ?Sized>(
        &self,
        samples: &[f64],
        t_values: &[f64],
        bootstrap: usize,
        rng: &mut R,
    ) -> Result<LaplaceReport, LimitError> {
        if samples.is_empty() {
            return Err(LimitError::EmptyInput);
        }
        let mut rows = Vec::new();
        for &t in t_values {
            let numeric = self.laplace_transform(t)?;
            let terms: Vec<f64> = samples.iter().map(|w| (-t * w).exp()).collect();
            let empirical = terms.iter().sum::<f64>() / terms.len() as f64;
            let mut means = Vec::with_capacity(bootstrap);
            for _ in 0..bootstrap {
                let mut acc = 0.0;
                for _ in 0..terms.len() {
                    acc += terms[index(rng, terms.len())];
                }
                means.push(acc / terms.len() as f64);
            }
            let bm = means.iter().sum::<f64>() / means.len().max(1) as f64;
            let se = if means.len() > 1 {
                (means.iter().map(|m| (m - bm).powi(2)).sum::<f64>() / (means.len() - 1) as f64).sqrt()
            } else {
                0.0
            };
            rows.push(LaplaceRow { t, numeric, empirical, bootstrap_se: se });
        }
        Ok(LaplaceReport { rows })
    }
}

/// Composition of `V` from its ingredients.
pub fn compose_v(w1: f64, w2: f64, m: f64, mu: f64, nu: f64) -> f64 {
    let r = nu - 1.0;
    let lambda = (r * m / mu).ln();
    (-w1.ln() - w2.ln() + lambda + (mu * r).ln()) / r
}

/// One evaluation point of the Laplace comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceRow {
    pub t: f64,
    pub numeric: f64,
    pub empirical: f64,
    pub bootstrap_se: f64,
}

impl LaplaceRow {
    pub fn discrepancy(&self) -> f64 {
        (self.numeric - self.empirical).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceReport {
    pub rows: Vec<LaplaceRow>,
}

impl LaplaceReport {
    /// Largest absolute discrepancy over the evaluated points.
    pub fn max_discrepancy(&self) -> f64 {
        self.rows.iter().map(LaplaceRow::discrepancy).fold(0.0, f64::max)
    }

    /// True when every discrepancy is within `k` bootstrap standard errors.
    pub fn within(&self, k: f64) -> bool {
        self.rows.iter().all(|r| r.discrepancy() <= k * r.bootstrap_se)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn compose_plug_in() {
        let (mu, nu) = (2.5, 1.6);
        let r = nu - 1.0;
        let v = compose_v(r, r, mu / r, mu, nu);
        let expected = (mu * r).ln() / r - 2.0 * r.ln() / r;
        assert!((v - expected).abs() < 1e-12);
        let c: f64 = 3.0;
        let scaled = compose_v(c * r, c * r, mu / r, mu, nu);
        assert!((v - scaled - 2.0 * c.ln() / r).abs() < 1e-12);
    }

    #[test]
    fn guards() {
        let point = DegreeDistribution::explicit([(2, 1.0)]).unwrap();
        let s = LimitLawSamplers::new(&point);
        assert_eq!(s.sample_w(&mut stream(1)), Err(LimitError::Degenerate));
        let heavy = DegreeDistribution::pareto(2.5).unwrap();
        assert_eq!(LimitLawSamplers::new(&heavy).sample_w(&mut stream(1)), Err(LimitError::InfiniteNu));
        let light = DegreeDistribution::pareto(4.0).unwrap();
        assert_eq!(LimitLawSamplers::new(&light).sample_x(&mut stream(1)), Err(LimitError::FiniteNuMisuse));
        assert!(LimitLawSamplers::new(&light).with_population_cap(10).is_err());
    }

    #[test]
    fn extinction_gives_zero() {
        // forward degree 0 with probability 1/2: a single ancestor dies out half the time
        let d = DegreeDistribution::explicit_test_only([(1, 0.5), (4, 0.5)]).unwrap();
        let s = LimitLawSamplers::new(&d).with_population_cap(1000).unwrap();
        let mut r = stream(4);
        let zeros = (0..400).filter(|_| s.sample_w_rooted(RootLaw::SingleAncestor, &mut r).unwrap() == 0.0).count();
        assert!(zeros > 0);
    }

    #[test]
    fn yule_transform() {
        // every individual leaves two children: W̃ ~ Exp(1), φ(t) = 1/(1+t)
        let d = DegreeDistribution::explicit([(3, 1.0)]).unwrap();
        let s = LimitLawSamplers::new(&d);
        for &t in &[0.25, 1.0, 3.0] {
            let phi = s.laplace_transform(t).unwrap();
            assert!((phi - 1.0 / (1.0 + t)).abs() < 1e-7, "t={t} phi={phi}");
        }
    }
}
