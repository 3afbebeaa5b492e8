use crate::error::{Error, Result};
use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of Γ(x) for x > 0 via the Lanczos approximation (g = 7, 9 terms).
///
/// Below 1/2 the reflection formula is used.
pub fn log_gamma<S: Real>(x: S) -> Result<S> {
    if !(x > S::zero()) || !x.is_finite() {
        return Err(Error::DomainError {
            function: "log_gamma",
            value: x.to_f64_lossy(),
        });
    }
    Ok(log_gamma_positive(x))
}

fn log_gamma_positive<S: Real>(x: S) -> S {
    let half = S::lit(0.5);
    if x < half {
        // Γ(x)Γ(1-x) = π / sin(πx), sin(πx) > 0 on (0, 1/2)
        let pi = S::PI();
        return (pi / (pi * x).sin()).ln() - log_gamma_positive(S::one() - x);
    }
    let z = x - S::one();
    let mut sum = S::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += S::lit(c) / (z + S::from_usize_lossy(i));
    }
    let t = z + S::lit(LANCZOS_G) + half;
    half * (S::lit(2.0) * S::PI()).ln() + (z + half) * t.ln() - t + sum.ln()
}

pub fn gamma<S: Real>(x: S) -> Result<S> {
    Ok(log_gamma(x)?.exp())
}

/// ln C(n, k) by summing ln((n-k'+i)/i) over the shorter side.
pub fn ln_binomial<S: Real>(n: u64, k: u64) -> Option<S> {
    if k > n {
        return None;
    }
    let k = k.min(n - k);
    let mut acc = S::zero();
    for i in 1..=k {
        let num = S::from_u64(n - k + i)?;
        let den = S::from_u64(i)?;
        acc += (num / den).ln();
    }
    Some(acc)
}

/// Exact C(n, k) when it fits in a `u64`.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return None;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc * (n as u128 - k as u128 + i) / i;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// ln(Σ exp(xᵢ)), stable for large magnitudes. Empty input gives −∞.
pub fn log_sum_exp<S: Real>(terms: impl IntoIterator<Item = S>) -> S {
    let terms: Vec<S> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(S::neg_infinity(), S::max);
    if max == S::neg_infinity() {
        return max;
    }
    max + terms.iter().map(|&t| (t - max).exp()).sum::<S>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Γ(x) = ∫₀^∞ t^{x-1} e^{-t} dt; substitute t = u² to remove the endpoint singularity at
    /// x = 1/2 and integrate with composite Simpson.
    fn gamma_by_quadrature(x: f64) -> f64 {
        let f = |u: f64| 2.0 * u.powf(2.0 * x - 1.0) * (-u * u).exp();
        let (a, b, n) = (0.0, 12.0, 200_000);
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn known_values() {
        assert!(log_gamma(1.0f64).unwrap().abs() < 1e-14);
        assert!((log_gamma(5.0f64).unwrap() - 24f64.ln()).abs() < 1e-13);
        let half = std::f64::consts::PI.sqrt().ln();
        assert!((log_gamma(0.5f64).unwrap() - half).abs() < 1e-13);
    }

    #[test]
    fn half_matches_quadrature() {
        let q = gamma_by_quadrature(0.5);
        assert!((q - std::f64::consts::PI.sqrt()).abs() < 1e-9);
        assert!((log_gamma(0.5f64).unwrap() - q.ln()).abs() < 1e-9);
    }

    #[test]
    fn factorial_range_accuracy() {
        // ln((n-1)!) for integer arguments up to 50
        let mut ln_fact = 0.0f64;
        for n in 1..=50u32 {
            if n > 1 {
                ln_fact += ((n - 1) as f64).ln();
            }
            let got = log_gamma(n as f64).unwrap();
            assert!((got - ln_fact).abs() < 1e-10, "n={n}: {got} vs {ln_fact}");
        }
    }

    #[test]
    fn recurrence_on_fine_grid() {
        // ln Γ(x+1) − ln Γ(x) = ln x across [0.1, 50]
        let mut x = 0.1f64;
        while x < 50.0 {
            let d = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap();
            assert!((d - x.ln()).abs() < 1e-10, "x={x}");
            x += 0.37;
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(log_gamma(0.0f64), Err(Error::DomainError { .. })));
        assert!(log_gamma(-1.5f64).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), Some(6));
        assert_eq!(binomial(16, 8), Some(12870));
        assert_eq!(binomial(3, 4), None);
        assert_eq!(binomial(200, 100), None);
        let l: f64 = ln_binomial(100, 50).unwrap();
        assert!((l - 1.008_913_445_455_641_9e29f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_handles_overflow() {
        let v = log_sum_exp([1000.0f64, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(Vec::<f64>::new()), f64::NEG_INFINITY);
    }
}
