//! Executable probability inequalities for the Poisson process.
//!
//! Each check computes an exact (or tightly controlled) probability on one
//! side and a closed-form bound on the other, returning a [`BoundCheck`].
//! Grid runners sweep fixed parameter grids and report failures by name.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::moments::{signed_sum_probability, truncated_poisson, SignedTimeMultiset};
use crate::processes::poisson_pmf;
use crate::rng::SeedSpec;
use crate::special::{inv_sqrt_2pi_floor, ln_factorial, poisson_ln_pmf, stirling_remainder, CompensatedSum};

/// Relative slack allowed when comparing an exact value to its bound.
pub const BOUND_SLACK: f64 = 1e-12;

/// An exact quantity against its bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub exact: f64,
    pub bound: f64,
    pub holds: bool,
    /// `bound - exact`.
    pub slack: f64,
}

impl BoundCheck {
    pub fn new(exact: f64, bound: f64) -> Self {
        Self {
            exact,
            bound,
            holds: exact <= bound + BOUND_SLACK * bound.max(1.0),
            slack: bound - exact,
        }
    }
}

/// Mass of `Poisson(m)` on `{a : beyond(a)}`, where `beyond` marks the two
/// tails `a < lo_edge` and `a > hi_edge` around `m`.
///
/// Each tail is summed outward from its edge until 50 consecutive terms fall
/// below `1e-18` of the running mass; the rest is bounded by a geometric
/// series, since pmf ratios are below one away from the mean.
fn two_tail_mass(m: u64, beyond: impl Fn(u64) -> bool) -> f64 {
    let mean = m as f64;
    let mut total = CompensatedSum::default();

    // upper tail: first a > m in the tail, then upward
    let mut a = m;
    while !beyond(a) {
        a += 1;
    }
    total.add(sum_outward(mean, a, |a| Some(a + 1), |a| mean / (a + 1) as f64));

    // lower tail: last a < m in the tail, then downward
    let mut a = m;
    loop {
        if beyond(a) && a < m {
            total.add(sum_outward(mean, a, |a| a.checked_sub(1), |a| a as f64 / mean));
            break;
        }
        match a.checked_sub(1) {
            Some(b) => a = b,
            None => break,
        }
    }
    total.value()
}

fn sum_outward(mean: f64, start: u64, step: impl Fn(u64) -> Option<u64>, ratio: impl Fn(u64) -> f64) -> f64 {
    let mut sum = CompensatedSum::default();
    let mut a = start;
    let mut quiet = 0;
    loop {
        let term = poisson_ln_pmf(mean, a).exp();
        sum.add(term);
        quiet = if term < 1e-18 * sum.value() || term == 0.0 {
            quiet + 1
        } else {
            0
        };
        if quiet >= 50 {
            let r = ratio(a);
            if r < 1.0 {
                sum.add(term * r / (1.0 - r));
            }
            return sum.value();
        }
        match step(a) {
            Some(next) => a = next,
            None => return sum.value(),
        }
    }
}

/// `P[|N(m) - m| > λ√m]` against `2e^{-λ²/4}`, for `0 < λ <= √m`.
pub fn poisson_concentration_check(m: u64, lam: f64) -> Result<BoundCheck> {
    let root = (m as f64).sqrt();
    if m == 0 || !(lam > 0.0 && lam <= root) {
        return Err(invalid(format!(
            "need m >= 1 and 0 < lam <= sqrt(m), got m={m}, lam={lam}"
        )));
    }
    let edge = lam * root;
    let exact = two_tail_mass(m, |a| (a as f64 - m as f64).abs() > edge);
    Ok(BoundCheck::new(exact, 2.0 * (-lam * lam / 4.0).exp()))
}

/// The same check with `λ = k/10`, deciding tail membership in integers.
fn concentration_check_tenths(m: u64, k: u64) -> BoundCheck {
    let (m_i, k_i) = (m as i128, k as i128);
    let exact = two_tail_mass(m, |a| {
        let gap = a as i128 - m_i;
        100 * gap * gap > k_i * k_i * m_i
    });
    let lam = k as f64 / 10.0;
    BoundCheck::new(exact, 2.0 * (-lam * lam / 4.0).exp())
}

/// `sup_t P[N(t) = a] = a^a e^{-a} / a!` against `1/√(2πa)`.
pub fn pmf_sup_over_t(a: u64) -> Result<BoundCheck> {
    if a == 0 {
        return Err(invalid("a must be >= 1"));
    }
    let af = a as f64;
    let exact = (af * af.ln() - af - ln_factorial(a)).exp();
    Ok(BoundCheck::new(exact, 1.0 / (2.0 * std::f64::consts::PI * af).sqrt()))
}

/// The most likely value of `N(t)` and how it compares to its bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmfMode {
    /// `⌊t⌋`.
    pub argmax: u64,
    /// `P[N(t) = ⌊t⌋]`.
    pub value: f64,
    /// `min{1, 1/√(2π⌊t⌋)}`.
    pub bound: f64,
    /// Largest pmf value found scanning `a ∈ [0, t + 10√t + 10]`.
    pub scan_max: f64,
    /// No scanned value exceeds `value` beyond rounding.
    pub scan_confirms: bool,
}

impl PmfMode {
    pub fn check(&self) -> BoundCheck {
        BoundCheck::new(self.value, self.bound)
    }

    pub fn holds(&self) -> bool {
        self.scan_confirms && self.check().holds
    }
}

/// `sup_a P[N(t) = a]`, attained at `a = ⌊t⌋`, confirmed by a scan.
pub fn pmf_sup_over_a(t: f64) -> Result<PmfMode> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("t must be finite and >= 0, got {t}")));
    }
    let argmax = t.floor() as u64;
    let value = poisson_pmf(t, argmax);
    let limit = (t + 10.0 * t.sqrt() + 10.0).floor() as u64;
    let scan_max = (0..=limit).map(|a| poisson_pmf(t, a)).fold(0.0, f64::max);
    Ok(PmfMode {
        argmax,
        value,
        bound: inv_sqrt_2pi_floor(argmax),
        scan_max,
        scan_confirms: scan_max <= value * (1.0 + BOUND_SLACK),
    })
}

/// Both sides of `e^{-1/(12n)} <= √(2πn) · n^n / (n! e^n) <= e^{-1/(12n+1)}`.
///
/// Taking logs, the middle term is `e^{-r_n}` with `r_n` the Stirling
/// remainder, so the checks compare `1/(12n+1) <= r_n` (upper inequality,
/// returned second) and `r_n <= 1/(12n)` (lower inequality, returned first).
/// Comparing remainders avoids the cancellation of `e^{-x}` near one.
pub fn robbins_check(n: u64) -> Result<(BoundCheck, BoundCheck)> {
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    let r = stirling_remainder(n);
    let nf = n as f64;
    Ok((
        BoundCheck::new(r, 1.0 / (12.0 * nf)),
        BoundCheck::new(1.0 / (12.0 * nf + 1.0), r),
    ))
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= 1e-3 {
        Ok(())
    } else {
        Err(invalid(format!("tolerance must lie in (0, 1e-3], got {tol}")))
    }
}

fn check_combo(means: &[f64], coeffs: &[u64]) -> Result<()> {
    if means.is_empty() || means.len() != coeffs.len() {
        return Err(invalid("means and coefficients must be nonempty and of equal length"));
    }
    if let Some(m) = means.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
        return Err(invalid(format!("means must be positive, got {m}")));
    }
    if coeffs.contains(&0) {
        return Err(invalid("coefficients must be positive integers"));
    }
    Ok(())
}

/// The law of `Σ d_i N_i` on `0..=upto` for independent `N_i ~ Poisson(μ_i)`.
///
/// Coefficients are positive, so values above `upto` never feed back and
/// the table is exact up to rounding.
pub fn combo_pmf(means: &[f64], coeffs: &[u64], upto: u64) -> Result<Vec<f64>> {
    check_combo(means, coeffs)?;
    let len = upto as usize + 1;
    let mut dist = vec![0.0; len];
    dist[0] = 1.0;
    for (&mu, &d) in means.iter().zip(coeffs) {
        let pmf: Vec<f64> = (0..=upto / d).map(|k| poisson_pmf(mu, k)).collect();
        let mut next = vec![0.0; len];
        for (s, &w) in dist.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (k, &q) in pmf.iter().enumerate() {
                let slot = s + d as usize * k;
                if slot >= len {
                    break;
                }
                next[slot] += w * q;
            }
        }
        dist = next;
    }
    Ok(dist)
}

/// A value `T` with `P[Σ d_i N_i > T] < tol`.
pub fn combo_truncation(means: &[f64], coeffs: &[u64], tol: f64) -> Result<u64> {
    check_combo(means, coeffs)?;
    check_tol(tol)?;
    let budget = tol / means.len() as f64;
    Ok(means
        .iter()
        .zip(coeffs)
        .map(|(&mu, &d)| d * (truncated_poisson(mu, budget).0.len() as u64 - 1))
        .sum())
}

/// `P[Σ d_i N_i = a]` against `min{1, 1/√(2π⌊max μ_i⌋)}`.
pub fn combo_pmf_bound_check(means: &[f64], coeffs: &[u64], a: u64, tol: f64) -> Result<BoundCheck> {
    check_tol(tol)?;
    let exact = combo_pmf(means, coeffs, a)?[a as usize];
    let top = means.iter().copied().fold(0.0, f64::max);
    Ok(BoundCheck::new(exact, inv_sqrt_2pi_floor(top.floor() as u64)))
}

fn check_intervals(intervals: &[(f64, f64)]) -> Result<()> {
    if intervals.is_empty() {
        return Err(invalid("need at least one interval"));
    }
    if let Some(iv) = intervals.iter().find(|(j, k)| !(*j >= 0.0 && j < k && k.is_finite())) {
        return Err(invalid(format!("interval {iv:?} must satisfy 0 <= j < k")));
    }
    Ok(())
}

/// The intervals as `(plus = right ends, minus = left ends)`.
fn interval_multiset(intervals: &[(f64, f64)]) -> Result<SignedTimeMultiset> {
    SignedTimeMultiset::new(
        intervals.iter().map(|iv| iv.1).collect(),
        intervals.iter().map(|iv| iv.0).collect(),
    )
}

/// `P[Σ (N(k_i) - N(j_i)) = a]` against `min{1, 1/√(2π⌊(k_m - j_m)/2n⌋)}`,
/// `m` the longest interval.
///
/// The sum is rewritten over disjoint elementary pieces with positive
/// multiplicities and evaluated exactly by [`combo_pmf`].
pub fn interval_sum_bound_check(intervals: &[(f64, f64)], a: u64, tol: f64) -> Result<BoundCheck> {
    check_tol(tol)?;
    check_intervals(intervals)?;
    let pieces = interval_multiset(intervals)?.elementary_intervals();
    let means: Vec<f64> = pieces.iter().map(|p| p.0).collect();
    let coeffs: Vec<u64> = pieces.iter().map(|p| p.1 as u64).collect();
    let exact = combo_pmf(&means, &coeffs, a)?[a as usize];
    let longest = intervals.iter().map(|(j, k)| k - j).fold(0.0, f64::max);
    let floor = (longest / (2 * intervals.len()) as f64).floor() as u64;
    Ok(BoundCheck::new(exact, inv_sqrt_2pi_floor(floor)))
}

/// The same probability through the signed truncated dynamic program.
pub fn interval_sum_probability_signed(intervals: &[(f64, f64)], a: u64, tol: f64) -> Result<f64> {
    check_intervals(intervals)?;
    signed_sum_probability(&interval_multiset(intervals)?, a as i64, tol)
}

/// Outcome of the two gap-transfer implications between `x` and `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapTransfer {
    /// `x > e^50` and `|x - y| <= C√(x ln x)`.
    pub antecedent_a: bool,
    /// The antecedent fails or `|x - y| <= 2C√(y ln y)`.
    pub implication_a: bool,
    /// `y > e^50` and `|x - y| >= 2C√(x ln x)`.
    pub antecedent_b: bool,
    /// The antecedent fails or `|x - y| >= C√(y ln y)`.
    pub implication_b: bool,
}

/// `ln(c·√(z ln z))`; `-∞` at `z = 1`.
fn ln_sqrt_z_ln_z(c: f64, z: f64) -> f64 {
    c.ln() + 0.5 * (z.ln() + z.ln().ln())
}

/// Transfer of a `√(z ln z)`-sized gap between `x` and `y`, evaluated in
/// log space, for `x, y >= 1` and `C ∈ [1, 10]`.
pub fn sqrt_log_gap_check(x: f64, y: f64, c: f64) -> Result<GapTransfer> {
    if !(x >= 1.0 && y >= 1.0 && x.is_finite() && y.is_finite()) {
        return Err(invalid(format!("need finite x, y >= 1, got x={x}, y={y}")));
    }
    if !(1.0..=10.0).contains(&c) {
        return Err(invalid(format!("C must lie in [1, 10], got {c}")));
    }
    let threshold = 50f64.exp();
    let gap = (x - y).abs().ln();
    let antecedent_a = x > threshold && gap <= ln_sqrt_z_ln_z(c, x);
    let antecedent_b = y > threshold && gap >= ln_sqrt_z_ln_z(2.0 * c, x);
    Ok(GapTransfer {
        antecedent_a,
        implication_a: !antecedent_a || gap <= ln_sqrt_z_ln_z(2.0 * c, y),
        antecedent_b,
        implication_b: !antecedent_b || gap >= ln_sqrt_z_ln_z(c, y),
    })
}

/// Result of one grid sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub name: &'static str,
    pub checks: u64,
    /// Identifiers of failing grid points.
    pub failures: Vec<String>,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn report<T: Sync>(
    name: &'static str,
    points: Vec<T>,
    run: impl Fn(&T) -> Result<Option<String>> + Sync + Send,
) -> Result<GridReport> {
    let outcomes: Vec<Option<String>> = points.par_iter().map(run).collect::<Result<_>>()?;
    Ok(GridReport {
        name,
        checks: outcomes.len() as u64,
        failures: outcomes.into_iter().flatten().collect(),
    })
}

fn fail_if(ok: bool, id: impl FnOnce() -> String) -> Option<String> {
    (!ok).then(id)
}

/// `m ∈ 1..=200`, `λ ∈ {0.1, 0.2, …, ⌊10√m⌋/10}`.
pub fn concentration_grid() -> Result<GridReport> {
    let points: Vec<(u64, u64)> = (1..=200u64)
        .flat_map(|m| (1..=crate::lattice::iroot_floor(100 * m as u128, 2) as u64).map(move |k| (m, k)))
        .collect();
    report("concentration", points, |&(m, k)| {
        let c = concentration_check_tenths(m, k);
        Ok(fail_if(c.holds, || {
            format!("concentration m={m} lam={}", k as f64 / 10.0)
        }))
    })
}

/// `a ∈ 1..=10^4`.
pub fn pmf_sup_over_t_grid() -> Result<GridReport> {
    report("pmf-sup-over-t", (1..=10_000u64).collect(), |&a| {
        Ok(fail_if(pmf_sup_over_t(a)?.holds, || format!("pmf-sup-over-t a={a}")))
    })
}

/// `t = k/10`, `k ∈ 0..=10^3`.
pub fn pmf_sup_over_a_grid() -> Result<GridReport> {
    report("pmf-sup-over-a", (0..=1000u64).collect(), |&k| {
        let t = k as f64 / 10.0;
        Ok(fail_if(pmf_sup_over_a(t)?.holds(), || format!("pmf-sup-over-a t={t}")))
    })
}

/// `n ∈ 1..=10^4`, both inequalities.
pub fn robbins_grid() -> Result<GridReport> {
    report("stirling-robbins", (1..=10_000u64).collect(), |&n| {
        let (lo, hi) = robbins_check(n)?;
        Ok(fail_if(lo.holds && hi.holds, || format!("stirling-robbins n={n}")))
    })
}

/// 300 seeded instances: up to 4 variables, means in `(0, 30)`,
/// coefficients in `1..=4`, `a ∈ 0..=80`.
pub fn combo_grid(seed: SeedSpec) -> Result<GridReport> {
    let mut rng = seed.rng();
    let points: Vec<(Vec<f64>, Vec<u64>, u64)> = (0..300)
        .map(|_| {
            let n = rng.random_range(1..=4);
            let means = (0..n).map(|_| rng.random_range(0.05..30.0)).collect();
            let coeffs = (0..n).map(|_| rng.random_range(1..=4)).collect();
            (means, coeffs, rng.random_range(0..=80))
        })
        .collect();
    report("combination-pmf", points, |(means, coeffs, a)| {
        let c = combo_pmf_bound_check(means, coeffs, *a, 1e-10)?;
        Ok(fail_if(c.holds, || {
            format!("combination-pmf means={means:?} coeffs={coeffs:?} a={a}")
        }))
    })
}

/// 300 seeded instances: up to 4 intervals with integer ends in `0..=60`,
/// `a ∈ 0..=80`.
pub fn interval_grid(seed: SeedSpec) -> Result<GridReport> {
    let mut rng = seed.rng();
    let points: Vec<(Vec<(f64, f64)>, u64)> = (0..300)
        .map(|_| {
            let n = rng.random_range(1..=4);
            let ivs = (0..n)
                .map(|_| {
                    let j = rng.random_range(0..60u32);
                    let k = rng.random_range(j + 1..=60);
                    (j as f64, k as f64)
                })
                .collect();
            (ivs, rng.random_range(0..=80))
        })
        .collect();
    report("interval-sum", points, |(ivs, a)| {
        let c = interval_sum_bound_check(ivs, *a, 1e-10)?;
        Ok(fail_if(c.holds, || format!("interval-sum intervals={ivs:?} a={a}")))
    })
}

/// `10^4` seeded triples with `ln x ∈ [50, 80]`, `C ∈ [1, 10]`; half with
/// `ln y ∈ [50, 80]` independently, half with `y = x + s√(x ln x)`,
/// `|s| <= 4C`, so both antecedents are exercised.
pub fn gap_transfer_grid(seed: SeedSpec) -> Result<GridReport> {
    let mut rng = seed.rng();
    let points: Vec<(f64, f64, f64)> = (0..10_000)
        .map(|i| {
            let x = rng.random_range(50.0..=80.0f64).exp();
            let c = rng.random_range(1.0..=10.0);
            let y = if i % 2 == 0 {
                rng.random_range(50.0..=80.0f64).exp()
            } else {
                x + rng.random_range(-4.0 * c..=4.0 * c) * (x * x.ln()).sqrt()
            };
            (x, y, c)
        })
        .collect();
    report("gap-transfer", points, |&(x, y, c)| {
        let g = sqrt_log_gap_check(x, y, c)?;
        Ok(fail_if(g.implication_a && g.implication_b, || {
            format!("gap-transfer x={x:e} y={y:e} C={c}")
        }))
    })
}

/// Every grid above, in a fixed order.
pub fn run_all_grids(seed: SeedSpec) -> Result<Vec<GridReport>> {
    Ok(vec![
        concentration_grid()?,
        pmf_sup_over_t_grid()?,
        pmf_sup_over_a_grid()?,
        robbins_grid()?,
        combo_grid(seed.derive(1))?,
        interval_grid(seed.derive(2))?,
        gap_transfer_grid(seed.derive(3))?,
    ])
}
