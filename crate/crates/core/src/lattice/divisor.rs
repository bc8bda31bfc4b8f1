use crate::error::{invalid, overflow, Result};

use super::int::{floor_u64, iroot_floor};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `D(x) = Σ_{n<=x} d(n)`, the number of lattice points `(a, b)` with
/// `a, b >= 1` and `ab <= x`.
///
/// Uses the hyperbola identity `D(x) = 2 Σ_{a<=√x} ⌊x/a⌋ - ⌊√x⌋²`, which
/// counts the points under the hyperbola twice by symmetry and removes the
/// doubly counted square; `O(√x)` divisions.
pub fn divisor_summatory(x: f64) -> Result<u128> {
    if !(x >= 1.0) {
        return Err(invalid(format!("divisor summatory needs x >= 1, got {x}")));
    }
    let n = floor_u64(x)?;
    let r = iroot_floor(n as u128, 2) as u64;
    let mut sum = 0u128;
    for a in 1..=r {
        sum += (n / a) as u128;
    }
    (2 * sum)
        .checked_sub((r as u128) * (r as u128))
        .ok_or_else(|| overflow("divisor summatory underflow"))
}

/// `Δ(x) = D(x) - x ln x - (2γ - 1) x`.
pub fn divisor_error(x: f64) -> Result<f64> {
    let d = divisor_summatory(x)?;
    Ok(d as f64 - x * x.ln() - (2.0 * EULER_GAMMA - 1.0) * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(divisor_summatory(1.0).unwrap(), 1);
        assert_eq!(divisor_summatory(10.0).unwrap(), 27);
        assert_eq!(divisor_summatory(10.9).unwrap(), 27);
        assert!(divisor_summatory(0.5).is_err());
    }

    #[test]
    fn error_term_at_one_and_hundred() {
        let e1 = divisor_error(1.0).unwrap();
        assert!((e1 - (1.0 - (2.0 * EULER_GAMMA - 1.0))).abs() < 1e-15);
        assert!((e1 - 0.845_568_670_196_934).abs() < 1e-12);
        // D(100) by direct divisor counting
        let d100: u64 = (1..=100u64)
            .map(|n| (1..=n).filter(|k| n % k == 0).count() as u64)
            .sum();
        assert_eq!(divisor_summatory(100.0).unwrap(), d100 as u128);
        let e100 = divisor_error(100.0).unwrap();
        let expected = d100 as f64 - 100.0 * 100f64.ln() - (2.0 * EULER_GAMMA - 1.0) * 100.0;
        assert!((e100 - expected).abs() < 1e-9);
        assert!(e100.abs() <= 20.0);
    }
}
