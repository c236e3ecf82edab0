//! Cancellation-free evaluation of the inverse Laplace transform of `W̃`.
//!
//! With `q(s) = Σ_k s^k P(B ≥ k+1)` and `r(s) = Σ_k s^k E[(B−k−1)^+]` one has
//! `h(s) − s = (1−s)(1 − q(s))` and `ν − q(s) = (1−s) r(s)`, so
//!
//! `(ν−1)/(h(s)−s) + 1/(1−s) = r(s) / (1 − q(s))`.
//!
//! Both series have nonnegative coefficients, so nothing cancels near `s = 1`.
//! For Pareto laws the coefficients beyond a table are summed by
//! Euler–Maclaurin against their closed forms, and the integral over
//! `u = 1 − s ∈ (0, 1/2]` is cached on dyadic segments.

use crate::degree_model::{DegreeLaw, SizeBiasedDistribution};
use crate::special::{hurwitz_zeta, integrate, NumericError};

const TABLE: usize = 4096;
const MAX_SEGMENTS: usize = 1000;
const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
struct ParetoTail {
    tau: f64,
    scale: f64,
}

impl ParetoTail {
    // P(B ≥ x+1) extended to real x ≥ 1.
    fn q_coef(&self, x: f64) -> f64 {
        let t = self.tau;
        self.scale * ((x + 2.0).powf(2.0 - t) + hurwitz_zeta(t - 1.0, x + 3.0))
    }

    // E[(B−x−1)^+] = Σ_{j ≥ x+2} P(B ≥ j), extended to real x ≥ 0.
    fn r_coef(&self, x: f64) -> f64 {
        let t = self.tau;
        self.scale
            * (hurwitz_zeta(t - 2.0, x + 3.0) + hurwitz_zeta(t - 2.0, x + 4.0)
                - (x + 3.0) * hurwitz_zeta(t - 1.0, x + 4.0))
    }

    /// `Σ_{k ≥ TABLE} e^{−λk} c(k)` by Euler–Maclaurin with two correction terms.
    fn tail_sum(&self, lambda: f64, c: impl Fn(f64) -> f64) -> Result<f64, NumericError> {
        let k = TABLE as f64;
        let decay = (-lambda * k).exp();
        if decay == 0.0 {
            return Ok(0.0);
        }
        let ck = c(k);
        let scale = c(k + 1.0 / lambda);
        // ∫_K^∞ e^{−λx} c(x) dx with x = K + z/λ.
        let inner = integrate(|z| (-z).exp() * c(k + z / lambda), 0.0, 45.0, REL_TOL * scale)?;
        let integral = decay * inner / lambda;
        let dc = 0.5 * (c(k + 1.0) - c(k - 1.0));
        let derivative = decay * (dc - lambda * ck);
        Ok(integral + 0.5 * decay * ck - derivative / 12.0)
    }
}

#[derive(Debug, Clone)]
pub(super) struct LaplaceKernel {
    p0: f64,
    q_coef: Vec<f64>,
    r_coef: Vec<f64>,
    tail: Option<ParetoTail>,
    // ladder[j] = ∫_0^{2^{-j}} g(u) du for j ≥ 1.
    ladder: Vec<f64>,
}

impl LaplaceKernel {
    pub(super) fn new(sb: &SizeBiasedDistribution) -> Result<Self, NumericError> {
        let (q_coef, r_coef, tail) = match sb.base().law() {
            DegreeLaw::DiscretePareto { tau } => {
                let tail = ParetoTail { tau: *tau, scale: 2f64.powf(tau - 1.0) / sb.base().mu() };
                let q = (0..TABLE as u64).map(|k| sb.survival(k + 1)).collect();
                let r = (0..TABLE).map(|k| tail.r_coef(k as f64)).collect();
                (q, r, Some(tail))
            }
            DegreeLaw::Explicit { pmf } => {
                let top = *pmf.keys().next_back().expect("nonempty") as usize;
                let q: Vec<f64> = (0..top as u64).map(|k| sb.survival(k + 1)).collect();
                let mut r = vec![0.0; top];
                let mut acc = 0.0;
                for k in (0..top).rev() {
                    acc += sb.survival(k as u64 + 2);
                    r[k] = acc;
                }
                (q, r, None)
            }
        };
        let mut kernel = Self { p0: sb.pmf(0), q_coef, r_coef, tail, ladder: Vec::new() };
        kernel.ladder = kernel.build_ladder()?;
        Ok(kernel)
    }

    /// `g(u) = r(1−u) / (q(1−u) − 1)`, nonnegative on `(0, 1)` when `P(B = 0) = 0`.
    fn g(&self, u: f64) -> Result<f64, NumericError> {
        let s = 1.0 - u;
        let mut q = -self.p0;
        let mut r = self.r_coef[0];
        let mut pow = 1.0;
        for k in 1..self.q_coef.len() {
            pow *= s;
            q += pow * self.q_coef[k];
            r += pow * self.r_coef[k];
        }
        if let Some(t) = &self.tail {
            let lambda = -(-u).ln_1p();
            q += t.tail_sum(lambda, |x| t.q_coef(x))?;
            r += t.tail_sum(lambda, |x| t.r_coef(x))?;
        }
        Ok(r / q)
    }

    fn integrate_g(&self, a: f64, b: f64) -> Result<f64, NumericError> {
        let failure = std::cell::Cell::new(None);
        let f = |u: f64| match self.g(u) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        };
        let guess = (b - a) * f(0.5 * (a + b)).abs();
        let v = integrate(f, a, b, REL_TOL * guess.max(f64::MIN_POSITIVE))?;
        match failure.take() {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }

    fn build_ladder(&self) -> Result<Vec<f64>, NumericError> {
        let mut segments = Vec::new();
        let mut total = 0.0;
        let mut remainder = None;
        for j in 1..=MAX_SEGMENTS {
            let hi = 0.5f64.powi(j as i32);
            let s = self.integrate_g(0.5 * hi, hi)?;
            segments.push(s);
            total += s;
            if let [.., prev, last] = segments[..] {
                let rho: f64 = last / prev;
                if rho < 1.0 {
                    let rem = last * rho / (1.0 - rho);
                    if rem <= REL_TOL * total || (j >= 60 && segments.len() >= 3 && stable(&segments)) {
                        remainder = Some(rem);
                        break;
                    }
                }
            }
        }
        let Some(rem) = remainder else {
            return Err(NumericError::QuadratureDiverged { tol: REL_TOL, estimate: total, error: f64::INFINITY });
        };
        // ladder[j] for j = 0..=segments.len(); index 0 is unused.
        let mut ladder = vec![0.0; segments.len() + 2];
        let mut acc = rem;
        for j in (1..=segments.len()).rev() {
            acc += segments[j - 1];
            ladder[j] = acc;
        }
        ladder[segments.len() + 1] = rem;
        Ok(ladder)
    }

    /// `∫_x^1 r(s)/(q(s) − 1) ds` for `x ∈ (0, 1)`.
    pub(super) fn log_integral(&self, x: f64) -> Result<f64, NumericError> {
        let u = 1.0 - x;
        if u <= 0.0 {
            return Ok(0.0);
        }
        if u > 0.5 {
            return Ok(self.ladder[1] + self.integrate_g(0.5, u)?);
        }
        let mut j = (-u.log2()).floor() as usize;
        while 0.5f64.powi(j as i32) < u {
            j -= 1;
        }
        while 0.5f64.powi(j as i32 + 1) >= u {
            j += 1;
        }
        let deepest = self.ladder.len() - 1;
        if j + 1 > deepest {
            // Inside the extrapolated remainder: scale it linearly.
            return Ok(self.ladder[deepest] * u / 0.5f64.powi(deepest as i32));
        }
        Ok(self.ladder[j + 1] + self.integrate_g(0.5f64.powi(j as i32 + 1), u)?)
    }
}

// Ratios of the last three segments agree to 1e-4.
fn stable(s: &[f64]) -> bool {
    let n = s.len();
    let a = s[n - 2] / s[n - 3];
    let b = s[n - 1] / s[n - 2];
    (a - b).abs() <= 1e-4 * b
}
