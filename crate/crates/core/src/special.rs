//! Log-factorials, the Stirling remainder and compensated summation.

use std::f64::consts::PI;

/// `ln(2π)/2`.
pub(crate) const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Exact factorials that fit in a `u64` (up to `20!`).
const SMALL_FACTORIAL_MAX: u64 = 20;

fn small_factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// The Stirling remainder `r(n) = ln n! - (n ln n - n + ln(2πn)/2)`.
///
/// Small `n` use the exact factorial; larger `n` use the alternating
/// Stirling series, whose truncation error is below the first omitted term
/// (under `1e-19` relative for `n > 20`).
pub fn stirling_remainder(n: u64) -> f64 {
    assert!(n >= 1, "stirling remainder is defined for n >= 1");
    if n <= SMALL_FACTORIAL_MAX {
        let nf = n as f64;
        return (small_factorial(n) as f64).ln() - (nf * nf.ln() - nf + HALF_LN_2PI + 0.5 * nf.ln());
    }
    let x = n as f64;
    let x2 = x * x;
    // 1/12x - 1/360x^3 + 1/1260x^5 - 1/1680x^7 + 1/1188x^9 - 691/360360x^11
    let mut term = 1.0 / x;
    let mut acc = 0.0;
    for (num, den) in [
        (1.0, 12.0),
        (-1.0, 360.0),
        (1.0, 1260.0),
        (-1.0, 1680.0),
        (1.0, 1188.0),
        (-691.0, 360_360.0),
    ] {
        acc += num / den * term;
        term /= x2;
    }
    acc
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    if n <= SMALL_FACTORIAL_MAX {
        return (small_factorial(n) as f64).ln();
    }
    let x = n as f64;
    x * x.ln() - x + HALF_LN_2PI + 0.5 * x.ln() + stirling_remainder(n)
}

/// `ln P[Poisson(mean) = a]`; `-inf` for impossible outcomes.
pub fn poisson_ln_pmf(mean: f64, a: u64) -> f64 {
    if mean == 0.0 {
        return if a == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -mean + a as f64 * mean.ln() - ln_factorial(a)
}

/// `1/sqrt(2π m)`, or 1 when `m == 0` (the `min{1, ·}` convention).
pub(crate) fn inv_sqrt_2pi_floor(m: u64) -> f64 {
    if m == 0 {
        1.0
    } else {
        (1.0 / (2.0 * PI * m as f64).sqrt()).min(1.0)
    }
}

/// Kahan–Babuška (Neumaier) compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_direct_sum() {
        for n in 0..400u64 {
            let direct: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
            let got = ln_factorial(n);
            assert!(
                (got - direct).abs() <= 1e-12 * direct.max(1.0),
                "n={n}: {got} vs {direct}"
            );
        }
    }

    #[test]
    fn stirling_series_is_continuous_at_the_switch() {
        // r(20) exact vs series evaluated at 20
        let x = 20.0f64;
        let series =
            1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3)) + 1.0 / (1260.0 * x.powi(5)) - 1.0 / (1680.0 * x.powi(7));
        assert!((stirling_remainder(20) - series).abs() < 1e-13);
    }

    #[test]
    fn poisson_pmf_point_values() {
        assert!((poisson_ln_pmf(1.0, 0).exp() - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(poisson_ln_pmf(0.0, 0), 0.0);
        assert_eq!(poisson_ln_pmf(0.0, 3), f64::NEG_INFINITY);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: CompensatedSum = [1.0, 1e-16, 1e-16, -1.0].into_iter().collect();
        assert!((s.value() - 2e-16).abs() < 1e-30);
    }
}
