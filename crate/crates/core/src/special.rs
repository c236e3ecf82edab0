//! Special functions and small numerical routines.

use thiserror::Error;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Failure of an adaptive numerical routine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("adaptive quadrature did not reach tolerance {tol:e} (estimate {estimate}, error {error:e})")]
    QuadratureDiverged { tol: f64, estimate: f64, error: f64 },
    #[error("root bracket [{lo}, {hi}] does not change sign")]
    NoBracket { lo: f64, hi: f64 },
}

// B_{2j} / (2j)! for j = 1..8.
const BERNOULLI_OVER_FACT: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
];

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (a+k)^{-s}` for `s > 1`, `a > 0`.
///
/// Euler–Maclaurin summation: explicit terms until `a + N ≥ 12`, then the
/// integral, the half term and eight Bernoulli corrections. Relative accuracy
/// is close to machine precision for the exponents used here.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta needs s > 1 and a > 0");
    const SHIFT: f64 = 12.0;
    let mut sum = 0.0;
    let mut x = a;
    while x < SHIFT {
        sum += x.powf(-s);
        x += 1.0;
    }
    let xs = x.powf(-s);
    let mut tail = x * xs / (s - 1.0) + 0.5 * xs;
    // Rising factorial s(s+1)...(s+2j-2) times x^{-s-2j+1}.
    let mut poch = s;
    let mut pow = xs / x;
    let inv_x2 = 1.0 / (x * x);
    for (j, c) in BERNOULLI_OVER_FACT.iter().enumerate() {
        let term = c * poch * pow;
        tail += term;
        if term.abs() < 1e-18 * (sum + tail).abs() {
            break;
        }
        let k = 2.0 * j as f64;
        poch *= (s + k + 1.0) * (s + k + 2.0);
        pow *= inv_x2;
    }
    sum + tail
}

/// Riemann zeta for `s > 1`.
pub fn riemann_zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

/// Harmonic number `H_m`.
pub fn harmonic(m: u64) -> f64 {
    (1..=m).map(|i| 1.0 / i as f64).sum()
}

/// Survival function of the Kolmogorov distribution, `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi theta form converges fast for small λ.
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for k in 1..=20 {
            let odd = (2 * k - 1) as f64;
            cdf += (-odd * odd * c).exp();
        }
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * cdf).clamp(0.0, 1.0)
    } else {
        let mut sf = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sf += if k % 2 == 1 { term } else { -term };
            if term < 1e-300 {
                break;
            }
        }
        (2.0 * sf).clamp(0.0, 1.0)
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]`:
/// the subinterval with the largest error estimate is bisected until the
/// summed estimate drops below the absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, NumericError> {
    const MAX_INTERVALS: usize = 5000;
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(NumericError::QuadratureDiverged { tol, estimate: total, error: err });
        }
        if err <= tol {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(NumericError::QuadratureDiverged { tol, estimate: total, error: err });
        }
        let worst = (0..parts.len()).max_by(|&i, &j| parts[i].3.total_cmp(&parts[j].3)).expect("nonempty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Bisection root finder on a sign-changing bracket.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64, NumericError> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(NumericError::NoBracket { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_known_values() {
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((riemann_zeta(2.0) - pi2 / 6.0).abs() < 1e-14);
        assert!((riemann_zeta(4.0) - pi2 * pi2 / 90.0).abs() < 1e-14);
        assert!((riemann_zeta(1.5) - 2.612_375_348_685_488).abs() < 1e-13);
        // ζ(2, 1/2) = 3ζ(2)
        assert!((hurwitz_zeta(2.0, 0.5) - pi2 / 2.0).abs() < 1e-13);
    }

    #[test]
    fn zeta_shift_identity() {
        for &s in &[1.2, 1.5, 2.0, 3.7] {
            for &a in &[1.0, 2.5, 30.0, 1e6] {
                let z = hurwitz_zeta(s, a);
                let lhs = z - hurwitz_zeta(s, a + 1.0);
                let rhs = a.powf(-s);
                assert!((lhs - rhs).abs() < 1e-14 * z, "s={s} a={a}");
            }
        }
    }

    #[test]
    fn kolmogorov_reference_points() {
        assert!((kolmogorov_sf(1.36) - 0.0495).abs() < 5e-4);
        assert!((kolmogorov_sf(1.63) - 0.0098).abs() < 5e-4);
        assert!((kolmogorov_sf(0.5) - 0.9639).abs() < 5e-4);
        // continuity across the two branches
        assert!((kolmogorov_sf(1.1799999) - kolmogorov_sf(1.1800001)).abs() < 1e-6);
    }

    #[test]
    fn quadrature_and_bisection() {
        let v = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let v = integrate(|x| 1.0 / x.sqrt(), 1e-12, 1.0, 1e-8).unwrap();
        assert!((v - 2.0).abs() < 1e-5);
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-14).is_err());
    }

    #[test]
    fn harmonic_100() {
        assert!((harmonic(100) - 5.187_377_517_639_621).abs() < 1e-12);
    }
}
