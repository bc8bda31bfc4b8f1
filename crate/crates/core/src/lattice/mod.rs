//! Exact lattice-point counting.
//!
//! Divisor summatory function, shells around `k^d - j^d = E`, the
//! higher-power divisor analogue `R_d(x)`, representation counts for sums of
//! `d`-th powers, and Green–Ruzsa digit sets. All counts are exact in
//! overflow-checked 128-bit integers.

mod divisor;
mod greenruzsa;
mod int;
mod shell;
mod waring;

pub use divisor::{divisor_error, divisor_summatory, EULER_GAMMA};
pub use greenruzsa::{greenruzsa_generate, sparsity_bound, sparsity_count, GreenRuzsaSpec, GREEN_RUZSA_GUARD};
pub use int::{iroot_floor, open_interval};
pub use shell::{
    far_shell_bound, far_shell_split, hyperbolic_count, shell_count_brute, shell_count_fast, shell_level_grid,
    shell_sup_ratio, CountMethod, CountResult, ShellQuery, ShellSup, SHELL_LIMIT,
};
pub use waring::{diophantine_count, representation_count, REPRESENTATION_GUARD};

use crate::error::{invalid, Result};

/// Both sides of the domination inequality for decreasing weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domination {
    /// `Σ_{j<k ∈ A} φ(k^d - j^d)`.
    pub lhs: f64,
    /// `Σ_{b<=j<k<=b+|A|-1} φ(k^d - j^d)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Compare the pair sum of a decreasing weight over a set `A` with the same
/// sum over the interval of `|A|` consecutive integers starting at `b`.
///
/// Spreading points apart only increases `k^d - j^d`, so for decreasing
/// `φ` the packed interval dominates. `φ` must be positive and
/// nonincreasing on every argument it is queried at; violations are
/// reported as errors.
pub fn domination_check(phi: impl Fn(u128) -> f64, set: &[u64], b: u64, d: u32) -> Result<Domination> {
    if d < 2 {
        return Err(invalid(format!("degree must be >= 2, got {d}")));
    }
    if set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("set must be strictly increasing"));
    }
    if let Some(&min) = set.first() {
        if b == 0 || b > min {
            return Err(invalid(format!("need 0 < b <= min A = {min}, got b={b}")));
        }
    }
    let mut queried: Vec<(u128, f64)> = Vec::new();
    let mut pair_sum = |points: &mut dyn Iterator<Item = u128>| -> Result<f64> {
        let pts: Vec<u128> = points.collect();
        let mut total = 0.0;
        for (i, &j) in pts.iter().enumerate() {
            for &k in &pts[i + 1..] {
                let diff = int::pow(k, d)? - int::pow(j, d)?;
                let w = phi(diff);
                if !(w > 0.0) {
                    return Err(invalid(format!("phi({diff}) = {w} is not positive")));
                }
                queried.push((diff, w));
                total += w;
            }
        }
        Ok(total)
    };
    let lhs = pair_sum(&mut set.iter().map(|&v| v as u128))?;
    let n = set.len() as u128;
    let rhs = pair_sum(&mut (b as u128..b as u128 + n))?;
    queried.sort_by_key(|q| q.0);
    if queried.windows(2).any(|w| w[1].1 > w[0].1) {
        return Err(invalid("phi is not nonincreasing on the queried differences"));
    }
    Ok(Domination {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12 * rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_set_gives_equality() {
        let set: Vec<u64> = (7..15).collect();
        let r = domination_check(|x| 1.0 / x as f64, &set, 7, 3).unwrap();
        assert_eq!(r.lhs, r.rhs);
        assert!(r.holds);
    }

    #[test]
    fn spread_set_is_dominated() {
        let r = domination_check(|x| 1.0 / (x as f64).powi(2), &[10, 20, 35], 10, 2).unwrap();
        assert!(r.holds);
        assert!(r.lhs < r.rhs);
        let expected_lhs = 1.0 / 300f64.powi(2) + 1.0 / 1125f64.powi(2) + 1.0 / 825f64.powi(2);
        assert!((r.lhs - expected_lhs).abs() < 1e-18);
    }

    #[test]
    fn singleton_and_errors() {
        let r = domination_check(|_| 1.0, &[5], 3, 2).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(domination_check(|_| 1.0, &[5, 6], 6, 2).is_err());
        assert!(domination_check(|_| 1.0, &[5, 6], 0, 2).is_err());
        assert!(domination_check(|x| x as f64, &[5, 6, 9], 5, 2).is_err());
        assert!(domination_check(|_| -1.0, &[5, 6], 5, 2).is_err());
    }
}
