//! Lattice points near the level sets of `k^d - j^d`.
//!
//! The shell count is `#{(j, k) ∈ N², j < k : |k^d - j^d - E| < D}` with
//! `N = {1, 2, …}` and a strict inequality. Two independent routes compute
//! it: a brute scan over `j`, and a scan over the gap `b = k - j` that
//! inverts the strictly increasing `g(j) = (j + b)^d - j^d - b^d` by binary
//! search. The second route touches only `O((E + D)^{1/d})` gaps.

use rayon::prelude::*;

use crate::error::{invalid, Result};

use super::int::{checked_pow, iroot_floor, open_interval, pow};

/// Largest level-plus-radius accepted by the shell counters.
pub const SHELL_LIMIT: f64 = 9_223_372_036_854_775_808.0; // 2^63

/// Parameters of a shell count: exponent `d`, level `E`, half-width `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellQuery {
    pub degree: u32,
    pub level: f64,
    pub radius: f64,
}

impl ShellQuery {
    pub fn new(degree: u32, level: f64, radius: f64) -> Result<Self> {
        if degree < 2 {
            return Err(invalid(format!("shell degree must be >= 2, got {degree}")));
        }
        if !(level >= 1.0) || !(radius >= 1.0) {
            return Err(invalid(format!("shell needs E, D >= 1, got E={level}, D={radius}")));
        }
        if !(level + radius <= SHELL_LIMIT) {
            return Err(invalid(format!("E + D = {} exceeds 2^63", level + radius)));
        }
        Ok(Self { degree, level, radius })
    }

    /// Integer differences admitted by the shell, as `lo..=hi` with `lo >= 1`.
    fn window(&self) -> Result<(u128, u128)> {
        let (lo, hi) = open_interval(self.level, self.radius)?;
        Ok((lo.max(1) as u128, hi.max(0) as u128))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    Brute,
    Fast,
}

/// An exact count with a record of how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountResult {
    pub count: u128,
    pub method: CountMethod,
    /// Loop iterations plus binary-search probes.
    pub work: u64,
}

/// Smallest `x` in `[lo, hi]` with `pred(x)`, or `hi + 1`; `pred` monotone.
fn first_true(mut lo: u128, mut hi: u128, work: &mut u64, pred: impl Fn(u128) -> bool) -> u128 {
    hi += 1;
    while lo < hi {
        *work += 1;
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Shell count by scanning `j = 1, 2, …` while `d·j^{d-1} < E + D` and
/// locating the admissible `k` by binary search on `k ↦ k^d`.
pub fn shell_count_brute(q: &ShellQuery) -> Result<CountResult> {
    let d = q.degree;
    let (lo, hi) = q.window()?;
    let mut work = 0u64;
    let mut count = 0u128;
    if lo > hi {
        return Ok(CountResult {
            count,
            method: CountMethod::Brute,
            work,
        });
    }
    let mut j = 1u128;
    while d as u128 * pow(j, d - 1)? <= hi {
        work += 1;
        let jd = pow(j, d)?;
        let k_hi = iroot_floor(jd + hi, d) + 1;
        let power_at_least = |target: u128| move |k: u128| checked_pow(k, d).is_none_or(|v| v >= target);
        let first = first_true(j + 1, k_hi, &mut work, power_at_least(jd + lo));
        let past = first_true(j + 1, k_hi, &mut work, power_at_least(jd + hi + 1));
        count += past - first;
        j += 1;
    }
    Ok(CountResult {
        count,
        method: CountMethod::Brute,
        work,
    })
}

/// `g(x) = (x + b)^d - x^d - b^d`, saturating at `u128::MAX`.
fn gap_poly(x: u128, b: u128, d: u32) -> u128 {
    match (checked_pow(x + b, d), checked_pow(x, d), checked_pow(b, d)) {
        (Some(s), Some(xd), Some(bd)) => s - xd - bd,
        _ => u128::MAX,
    }
}

/// Number of `j >= 1` with `lo <= (j + b)^d - j^d <= hi`, by two binary
/// searches on `g`.
fn count_for_gap(b: u128, d: u32, lo: u128, hi: u128, work: &mut u64) -> Result<u128> {
    let bd = pow(b, d)?;
    if hi < bd {
        return Ok(0);
    }
    let g_lo = lo.saturating_sub(bd);
    let g_hi = hi - bd;
    // g(j) >= d·b·j^{d-1}, so every admissible j is below this root + 1
    let j_max = iroot_floor(g_hi / (d as u128 * b), d - 1) + 1;
    let first = first_true(1, j_max, work, |j| gap_poly(j, b, d) >= g_lo);
    let past = first_true(1, j_max, work, |j| gap_poly(j, b, d) > g_hi);
    Ok(past - first)
}

/// Shell count by enumerating gaps `1 <= b <= ⌊(E + D)^{1/d}⌋`.
pub fn shell_count_fast(q: &ShellQuery) -> Result<CountResult> {
    let d = q.degree;
    let (lo, hi) = q.window()?;
    let mut work = 0u64;
    let mut count = 0u128;
    if lo <= hi {
        for b in 1..=iroot_floor(hi, d) {
            work += 1;
            count += count_for_gap(b, d, lo, hi, &mut work)?;
        }
    }
    Ok(CountResult {
        count,
        method: CountMethod::Fast,
        work,
    })
}

/// `R_d(x) = #{(j, k) ∈ Z² : 0 < |k|^d - |j|^d <= x}`.
///
/// By symmetry this is four times the count over `N²` plus the
/// `2⌊x^{1/d}⌋` points on the axis `j = 0`.
pub fn hyperbolic_count(d: u32, x: f64) -> Result<u128> {
    if d < 2 {
        return Err(invalid(format!("degree must be >= 2, got {d}")));
    }
    if !(x >= 1.0) {
        return Err(invalid(format!("hyperbolic count needs x >= 1, got {x}")));
    }
    let cap = super::int::floor_u64(x)? as u128;
    let mut work = 0u64;
    let mut quadrant = 0u128;
    for b in 1..=iroot_floor(cap, d) {
        quadrant += count_for_gap(b, d, 1, cap, &mut work)?;
    }
    let axis = iroot_floor(cap, d);
    Ok(4 * quadrant + 2 * axis)
}

/// Largest shell count over a grid of levels `E ∈ [D, D²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellSup {
    pub count: u128,
    /// `count / D^{2/d}`.
    pub ratio: f64,
    pub argmax_level: f64,
    pub levels_evaluated: usize,
}

/// Levels at which [`shell_sup_ratio`] evaluates the shell count.
pub fn shell_level_grid(d: u32, radius: f64, samples: usize) -> Result<Vec<f64>> {
    if samples == 0 {
        return Err(invalid("need at least one level sample"));
    }
    let lo = radius;
    let hi = radius * radius;
    let first_int = lo.ceil() as u64;
    let last_int = hi.floor() as u64;
    let n_ints = last_int.saturating_sub(first_int) + u64::from(last_int >= first_int);
    let mut grid: Vec<f64> = if n_ints as usize <= samples {
        (first_int..=last_int).map(|e| e as f64).collect()
    } else {
        let mut g: Vec<f64> = (0..samples)
            .map(|i| {
                let t = if samples == 1 {
                    0.0
                } else {
                    i as f64 / (samples - 1) as f64
                };
                lo * (hi / lo).powf(t)
            })
            .collect();
        g.push(lo);
        g.push(hi);
        // actual differences near the bottom of the range
        let j_cap = (2.0 * radius.powf(1.0 / d as f64)).floor() as u128;
        for j in 1..=j_cap.max(1) {
            let jd = pow(j, d)?;
            let mut k = j + 1;
            loop {
                let diff = pow(k, d)? - jd;
                if diff as f64 > hi {
                    break;
                }
                if diff as f64 >= lo {
                    g.push(diff as f64);
                }
                k += 1;
            }
        }
        g
    };
    grid.retain(|e| *e >= lo && *e <= hi);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.is_empty() {
        grid.push(lo);
    }
    Ok(grid)
}

/// `sup_{D <= E <= D²}` of the shell count over a level grid, and its ratio
/// against `D^{2/d}`. Ties resolve toward the smaller level.
pub fn shell_sup_ratio(d: u32, radius: f64, samples: usize) -> Result<ShellSup> {
    let grid = shell_level_grid(d, radius, samples)?;
    let counts: Vec<u128> = grid
        .par_iter()
        .map(|&e| shell_count_fast(&ShellQuery::new(d, e, radius)?).map(|r| r.count))
        .collect::<Result<_>>()?;
    let (best_idx, &count) = counts
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &u128)>, (i, c)| match best {
            Some((_, bc)) if bc >= c => best,
            _ => Some((i, c)),
        })
        .expect("level grid is nonempty");
    Ok(ShellSup {
        count,
        ratio: count as f64 / radius.powf(2.0 / d as f64),
        argmax_level: grid[best_idx],
        levels_evaluated: grid.len(),
    })
}

/// The shape `D^{1+s(2/d-1)}` (for `s <= d²/(d²-d-1)`) or `D^{(s/d)(1-1/d)}`
/// of the bound on shells centred at `E = D^s`, with unit constant.
pub fn far_shell_bound(d: u32, radius: f64, s: f64) -> Result<f64> {
    if d < 3 {
        return Err(invalid(format!("degree must be >= 3, got {d}")));
    }
    if !(s > 1.0 && s <= 2.0) {
        return Err(invalid(format!("exponent s must lie in (1, 2], got {s}")));
    }
    if !(radius >= 1.0) {
        return Err(invalid(format!("radius must be >= 1, got {radius}")));
    }
    let df = d as f64;
    let split = df * df / (df * df - df - 1.0);
    let exponent = if s <= split {
        1.0 + s * (2.0 / df - 1.0)
    } else {
        (s / df) * (1.0 - 1.0 / df)
    };
    Ok(radius.powf(exponent))
}

/// The `s` at which the two branches of [`far_shell_bound`] meet.
pub fn far_shell_split(d: u32) -> f64 {
    let df = d as f64;
    df * df / (df * df - df - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_pairs(d: u32, lo: i128, hi: i128, bound: i128) -> u128 {
        let mut n = 0;
        for j in 1..=bound {
            for k in j + 1..=bound {
                let diff = k.pow(d) - j.pow(d);
                if diff >= lo && diff <= hi {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn shell_examples() {
        let q = ShellQuery::new(2, 5.0, 2.0).unwrap();
        assert_eq!(shell_count_brute(&q).unwrap().count, 1);
        assert_eq!(shell_count_fast(&q).unwrap().count, 1);
        let q = ShellQuery::new(3, 1.0, 1.0).unwrap();
        assert_eq!(shell_count_brute(&q).unwrap().count, 0);
        assert_eq!(shell_count_fast(&q).unwrap().count, 0);
        let q = ShellQuery::new(3, 7.0, 1.0).unwrap();
        assert_eq!(shell_count_brute(&q).unwrap().count, 1);
        assert_eq!(shell_count_fast(&q).unwrap().count, 1);
    }

    #[test]
    fn shell_boundaries_are_strict() {
        // 2^3 - 1^3 = 7 sits exactly on E - D for E = 8, D = 1
        let q = ShellQuery::new(3, 8.0, 1.0).unwrap();
        assert_eq!(shell_count_brute(&q).unwrap().count, 0);
        assert_eq!(shell_count_fast(&q).unwrap().count, 0);
        // and on E + D for E = 6, D = 1
        let q = ShellQuery::new(3, 6.0, 1.0).unwrap();
        assert_eq!(shell_count_fast(&q).unwrap().count, 0);
        // nudging the radius past the boundary admits it
        let q = ShellQuery::new(3, 8.0, 1.0 + f64::EPSILON * 4.0).unwrap();
        assert_eq!(shell_count_fast(&q).unwrap().count, 1);
    }

    #[test]
    fn fast_matches_double_loop_with_real_bounds() {
        for d in 2..=4u32 {
            for &(e, r) in &[(10.5, 3.25), (100.0, 1.0), (333.3, 40.0), (1000.0, 10.0), (77.0, 76.5)] {
                let q = ShellQuery::new(d, e, r).unwrap();
                let (lo, hi) = open_interval(e, r).unwrap();
                let expected = brute_pairs(d, lo, hi, (e + r) as i128 + 2);
                assert_eq!(shell_count_fast(&q).unwrap().count, expected, "d={d} E={e} D={r}");
                assert_eq!(shell_count_brute(&q).unwrap().count, expected, "d={d} E={e} D={r}");
            }
        }
    }

    #[test]
    fn fast_matches_brute_on_large_instance() {
        let q = ShellQuery::new(4, 1e6, 1e3).unwrap();
        let fast = shell_count_fast(&q).unwrap();
        let brute = shell_count_brute(&q).unwrap();
        assert_eq!(fast.count, brute.count);
        assert!(fast.work < brute.work);
    }

    #[test]
    fn query_validation() {
        assert!(ShellQuery::new(1, 5.0, 1.0).is_err());
        assert!(ShellQuery::new(2, 0.5, 1.0).is_err());
        assert!(ShellQuery::new(2, 5.0, 0.0).is_err());
        assert!(ShellQuery::new(2, 9.3e18, 1.0).is_err());
        // near the top of the range, 128-bit intermediates must not overflow
        let q = ShellQuery::new(5, 4.0e18, 1.0e15).unwrap();
        let r = shell_count_fast(&q).unwrap();
        assert!(r.work < 1_000_000);
    }

    #[test]
    fn hyperbolic_examples() {
        assert_eq!(hyperbolic_count(3, 7.0).unwrap(), 6);
        assert_eq!(hyperbolic_count(2, 3.0).unwrap(), 6);
        for d in 2..=5 {
            assert_eq!(hyperbolic_count(d, 1.0).unwrap(), 2);
        }
        assert!(hyperbolic_count(2, 0.5).is_err());
        assert!(hyperbolic_count(1, 5.0).is_err());
    }

    #[test]
    fn sup_ratio_small_cases() {
        let sup = shell_sup_ratio(3, 8.0, 1000).unwrap();
        assert_eq!(sup.levels_evaluated, 57);
        assert!((sup.ratio - sup.count as f64 / 4.0).abs() < 1e-12);
        let one = shell_sup_ratio(4, 1.0, 10).unwrap();
        assert_eq!(one.levels_evaluated, 1);
        assert_eq!(one.argmax_level, 1.0);
        assert_eq!(one.ratio, one.count as f64);
    }

    #[test]
    fn sup_ratio_sampled_grid_includes_differences() {
        let grid = shell_level_grid(3, 1000.0, 50).unwrap();
        assert!(grid.contains(&1000.0) && grid.contains(&1e6));
        // 11^3 - 1^3 = 1330 is an actual difference inside the range
        assert!(grid.contains(&1330.0));
    }

    #[test]
    fn far_shell_branches() {
        let v = far_shell_bound(3, 100.0, 2.0).unwrap();
        assert!((v - 100f64.powf(4.0 / 9.0)).abs() < 1e-12);
        let v = far_shell_bound(3, 100.0, 1.0 + 1e-12).unwrap();
        assert!((v / 100f64.powf(2.0 / 3.0) - 1.0).abs() < 1e-9);
        for d in 3..=8 {
            let s = far_shell_split(d);
            let df = d as f64;
            let a = 1.0 + s * (2.0 / df - 1.0);
            let b = (s / df) * (1.0 - 1.0 / df);
            assert!((a - b).abs() < 1e-14);
        }
        assert!(far_shell_bound(2, 10.0, 1.5).is_err());
        assert!(far_shell_bound(3, 10.0, 1.0).is_err());
        assert!(far_shell_bound(3, 10.0, 2.5).is_err());
    }
}
