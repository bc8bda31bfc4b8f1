//! Expectations `E‖Σ_{j∈A} e^{2πi y X_j}‖_p^p` over random frequency paths.
//!
//! Monte Carlo estimators evaluate each sampled path exactly (even `p`,
//! via representation counts) or by quadrature (any `p >= 1`). Per-sample
//! seeds come from `(master_seed, sample_index)` and results are reduced in
//! sample order, so estimates do not depend on the thread count.
//!
//! For the Poisson process the even moments also have an exact form: the
//! `2n`-th moment is the sum over index tuples of the probability that
//! `N(t_{j_1}) + … + N(t_{j_n}) = N(t_{k_1}) + … + N(t_{k_n})`. Each such
//! coincidence probability is computed by splitting `[0, max t]` into
//! elementary intervals with independent Poisson increments and running a
//! truncated dynamic program over the signed sum.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::expsum::{default_nodes, even_moment, lp_norm_quadrature, FrequencySpectrum};
use crate::processes::{sample_iid, sample_poisson_path, sample_random_walk, Pmf, TimeGrid};
use crate::rng::SeedSpec;
use crate::special::CompensatedSum;

/// Largest `|A|^{2n}` accepted by [`exact_even_moment_poisson`].
pub const EXACT_TUPLE_GUARD: f64 = 1e7;

/// A Monte Carlo estimate with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√n_samples`; NaN for a single sample.
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: SeedSpec,
    pub p: f64,
    pub descriptor: String,
    /// Quadrature nodes (largest used, when chosen per sample).
    pub nodes: Option<u64>,
}

impl MomentEstimate {
    /// Mean and standard error of per-sample values, summed in index order.
    pub fn from_samples(values: &[f64], seed: SeedSpec, p: f64, descriptor: impl Into<String>) -> Self {
        let n = values.len();
        let mean = values.iter().copied().collect::<CompensatedSum>().value() / n as f64;
        let std_error = if n >= 2 {
            let ss = values
                .iter()
                .map(|v| (v - mean) * (v - mean))
                .collect::<CompensatedSum>()
                .value();
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            f64::NAN
        };
        Self {
            mean,
            std_error,
            n_samples: n as u64,
            seed,
            p,
            descriptor: descriptor.into(),
            nodes: None,
        }
    }
}

/// Which process generates the frequencies.
#[derive(Debug, Clone, PartialEq)]
pub enum ProcessKind {
    /// Independent draws from a pmf (a stationary process).
    Iid(Pmf),
    /// Unit-intensity Poisson process.
    Poisson,
    /// Simple random walk.
    Walk,
}

/// How an index `j ∈ A` becomes an observation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeMap {
    /// `t = j`.
    Identity,
    /// `t = j^d`.
    Power(u32),
    /// `t = j · M^r`.
    Arithmetic { m: f64, r: f64 },
}

impl TimeMap {
    pub fn apply(&self, j: u64) -> f64 {
        match *self {
            TimeMap::Identity => j as f64,
            TimeMap::Power(d) => (j as f64).powi(d as i32),
            TimeMap::Arithmetic { m, r } => j as f64 * m.powf(r),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            TimeMap::Identity => Ok(()),
            TimeMap::Power(d) if d >= 1 => Ok(()),
            TimeMap::Power(d) => Err(invalid(format!("power map needs d >= 1, got {d}"))),
            TimeMap::Arithmetic { m, r } if m > 0.0 && r > 0.0 => Ok(()),
            TimeMap::Arithmetic { m, r } => Err(invalid(format!("arithmetic map needs M, r > 0, got M={m}, r={r}"))),
        }
    }
}

/// One Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub process: ProcessKind,
    /// The index set `A`, strictly increasing positive integers.
    pub index_set: Vec<u64>,
    pub time_map: TimeMap,
    pub p: f64,
    pub samples: u64,
    pub seed: SeedSpec,
}

impl ExperimentSpec {
    pub fn new(
        process: ProcessKind,
        index_set: Vec<u64>,
        time_map: TimeMap,
        p: f64,
        samples: u64,
        seed: SeedSpec,
    ) -> Result<Self> {
        let spec = Self {
            process,
            index_set,
            time_map,
            p,
            samples,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.index_set.is_empty() {
            return Err(invalid("index set A must be nonempty"));
        }
        if self.index_set[0] == 0 || self.index_set.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("index set A must be strictly increasing positive integers"));
        }
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(invalid(format!("moment order p must be >= 1, got {}", self.p)));
        }
        if self.samples == 0 {
            return Err(invalid("need at least one sample"));
        }
        self.time_map.validate()
    }

    /// A short tag naming the experiment.
    pub fn descriptor(&self) -> String {
        let process = match &self.process {
            ProcessKind::Iid(pmf) => format!("iid[{}]", pmf.entries().len()),
            ProcessKind::Poisson => "poisson".to_string(),
            ProcessKind::Walk => "walk".to_string(),
        };
        let map = match self.time_map {
            TimeMap::Identity => "identity".to_string(),
            TimeMap::Power(d) => format!("power:{d}"),
            TimeMap::Arithmetic { m, r } => format!("arith:{m}:{r}"),
        };
        format!("{process}/{map}/|A|={}/p={}", self.index_set.len(), self.p)
    }

    fn times(&self) -> Vec<f64> {
        self.index_set.iter().map(|&j| self.time_map.apply(j)).collect()
    }

    /// The realized frequencies `X_{t(j)}, j ∈ A` for sample `index`.
    pub fn realize(&self, index: u64) -> Result<Vec<i64>> {
        let seed = self.seed.sample(index);
        match &self.process {
            ProcessKind::Iid(pmf) => Ok(sample_iid(pmf, self.index_set.len(), seed).values),
            ProcessKind::Poisson => {
                let grid = TimeGrid::new(self.times())?;
                Ok(sample_poisson_path(&grid, seed).values)
            }
            ProcessKind::Walk => {
                let times = self.times();
                if let Some(t) = times.iter().find(|t| t.fract() != 0.0 || **t > 2f64.powi(40)) {
                    return Err(invalid(format!("random walk needs integer times below 2^40, got {t}")));
                }
                let last = *times.last().expect("nonempty index set") as u64;
                let path = sample_random_walk(last, seed)?;
                Ok(times.iter().map(|&t| path.values[t as usize]).collect())
            }
        }
    }
}

fn moment_order(p: f64) -> Result<u32> {
    if p >= 2.0 && p.fract() == 0.0 && (p as u64).is_multiple_of(2) && p <= 64.0 {
        Ok((p / 2.0) as u32)
    } else {
        Err(invalid(format!(
            "exact evaluation needs an even integer p >= 2, got {p}"
        )))
    }
}

/// Per-sample values `‖Σ e(y X_j)‖_{2n}^{2n}`, each exact.
pub fn even_moment_samples(spec: &ExperimentSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = moment_order(spec.p)?;
    (0..spec.samples)
        .into_par_iter()
        .map(|i| {
            let freqs = spec.realize(i)?;
            Ok(even_moment(&FrequencySpectrum::unit(&freqs), n)? as f64)
        })
        .collect()
}

/// Monte Carlo estimate of `E‖Σ e(y X_j)‖_{2n}^{2n}`, exact per sample.
pub fn mc_even_moment(spec: &ExperimentSpec) -> Result<MomentEstimate> {
    let values = even_moment_samples(spec)?;
    Ok(MomentEstimate::from_samples(
        &values,
        spec.seed,
        spec.p,
        spec.descriptor(),
    ))
}

/// Per-sample quadrature values of `∫|Σ e(y X_j)|^p`, with the node count
/// each sample used.
pub fn quadrature_samples(spec: &ExperimentSpec, nodes: Option<u64>) -> Result<Vec<(f64, u64)>> {
    spec.validate()?;
    (0..spec.samples)
        .into_par_iter()
        .map(|i| {
            let spectrum = FrequencySpectrum::unit(&spec.realize(i)?);
            let k = nodes.unwrap_or_else(|| default_nodes(&spectrum, spec.p));
            Ok((lp_norm_quadrature(&spectrum, spec.p, k)?, k))
        })
        .collect()
}

/// Monte Carlo estimate of `E‖Σ e(y X_j)‖_p^p` for any `p >= 1`.
///
/// `nodes = None` picks the default node count per sample (exact for even
/// `p`); the largest count used is recorded.
pub fn mc_general_moment(spec: &ExperimentSpec, nodes: Option<u64>) -> Result<MomentEstimate> {
    let samples = quadrature_samples(spec, nodes)?;
    let values: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let mut est = MomentEstimate::from_samples(&values, spec.seed, spec.p, spec.descriptor());
    est.nodes = samples.iter().map(|s| s.1).max();
    Ok(est)
}

/// `Σ_{j,k} e^{-|t_j - t_k|}`, the exact second moment for the Poisson
/// process observed at `times`.
pub fn exact_second_moment_poisson(times: &[f64]) -> f64 {
    let mut sum = CompensatedSum::default();
    for &a in times {
        for &b in times {
            sum.add((-(a - b).abs()).exp());
        }
    }
    sum.value()
}

/// `|A| + (|A|² - |A|) Σ_k μ_k²`, the exact second moment for `|A|`
/// independent draws from `pmf`.
pub fn exact_second_moment_iid(pmf: &Pmf, size: u64) -> f64 {
    let m = size as f64;
    m + (m * m - m) * pmf.collision_probability()
}

/// `(|A|² Σμ_k², |A|²)`, which bracket the second moment of `|A|`
/// independent draws from `pmf`.
pub fn second_moment_sandwich(pmf: &Pmf, size: u64) -> (f64, f64) {
    let m2 = (size as f64).powi(2);
    (m2 * pmf.collision_probability(), m2)
}

/// Two multisets of observation times; the event of interest is
/// `Σ_{t∈plus} N(t) = Σ_{t∈minus} N(t)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignedTimeMultiset {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl SignedTimeMultiset {
    pub fn new(plus: Vec<f64>, minus: Vec<f64>) -> Result<Self> {
        if let Some(t) = plus.iter().chain(&minus).find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(invalid(format!("time {t} is not finite and nonnegative")));
        }
        Ok(Self { plus, minus })
    }

    /// Elementary intervals `(τ_{i-1}, τ_i]` as `(length, signed coefficient)`,
    /// dropping intervals whose increment cancels.
    pub fn elementary_intervals(&self) -> Vec<(f64, i64)> {
        let mut cuts: Vec<f64> = self
            .plus
            .iter()
            .chain(&self.minus)
            .copied()
            .filter(|&t| t > 0.0)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut prev = 0.0;
        cuts.into_iter()
            .filter_map(|tau| {
                let covered = |set: &[f64]| set.iter().filter(|&&t| t >= tau).count() as i64;
                let coeff = covered(&self.plus) - covered(&self.minus);
                let length = tau - prev;
                prev = tau;
                (coeff != 0).then_some((length, coeff))
            })
            .collect()
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= 1e-3 {
        Ok(())
    } else {
        Err(invalid(format!("tolerance must lie in (0, 1e-3], got {tol}")))
    }
}

/// Poisson(mean) probabilities for `0..=K`, with `K` large enough that the
/// upper tail has mass below `tail_budget`. Returns the pmf and the tail.
pub(crate) fn truncated_poisson(mean: f64, tail_budget: f64) -> (Vec<f64>, f64) {
    let mut cutoff = (mean + (12.0 * mean.sqrt()).max(20.0)).ceil() as usize;
    loop {
        let pmf: Vec<f64> = (0..=cutoff as u64)
            .map(|a| crate::processes::poisson_pmf(mean, a))
            .collect();
        let tail = poisson_upper_tail(mean, cutoff as u64);
        if tail < tail_budget {
            return (pmf, tail);
        }
        cutoff = cutoff * 2 + 10;
    }
}

/// `P[Poisson(mean) > k]`, summed upward from `k + 1` (accurate for tiny tails).
pub(crate) fn poisson_upper_tail(mean: f64, k: u64) -> f64 {
    let mut a = k + 1;
    let mut term = crate::processes::poisson_pmf(mean, a);
    let mut sum = CompensatedSum::default();
    loop {
        sum.add(term);
        a += 1;
        let ratio = mean / a as f64;
        term *= ratio;
        if ratio < 0.5 && term <= 1e-18 * sum.value().max(1e-300) {
            // remaining geometric tail is below term · ratio / (1 - ratio)
            sum.add(term * 2.0);
            return sum.value().min(1.0);
        }
        if term == 0.0 {
            return sum.value().min(1.0);
        }
    }
}

/// `P[Σ_{t∈plus} N(t) = Σ_{t∈minus} N(t)]` for the unit-intensity Poisson
/// process, within `tol` of the exact value.
pub fn coincidence_probability_poisson(s: &SignedTimeMultiset, tol: f64) -> Result<f64> {
    signed_sum_probability(s, 0, tol)
}

/// `P[Σ_{t∈plus} N(t) - Σ_{t∈minus} N(t) = target]`, within `tol`.
pub fn signed_sum_probability(s: &SignedTimeMultiset, target: i64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let intervals = s.elementary_intervals();
    if intervals.is_empty() {
        return Ok(if target == 0 { 1.0 } else { 0.0 });
    }
    let budget = tol / intervals.len() as f64;
    // distribution of the partial signed sum on [offset, offset + len)
    let mut dist = vec![1.0f64];
    let mut offset = 0i64;
    for &(length, coeff) in &intervals {
        let (pmf, _) = truncated_poisson(length, budget);
        let reach = coeff.unsigned_abs() as usize * (pmf.len() - 1);
        let mut next = vec![0.0f64; dist.len() + reach];
        let next_offset = offset + (coeff.min(0)) * (pmf.len() as i64 - 1);
        for (i, &w) in dist.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let base = offset + i as i64;
            for (a, &q) in pmf.iter().enumerate() {
                let slot = base + coeff * a as i64 - next_offset;
                next[slot as usize] += w * q;
            }
        }
        dist = next;
        offset = next_offset;
    }
    let slot = target - offset;
    Ok(if slot >= 0 && (slot as usize) < dist.len() {
        dist[slot as usize].clamp(0.0, 1.0)
    } else {
        0.0
    })
}

/// Sorted index multisets of size `n` from `0..t`, with the number of
/// ordered tuples each represents.
fn multisets(t: usize, n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(t: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..t {
            cur.push(i);
            rec(t, n, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(t, n, 0, &mut Vec::with_capacity(n), &mut out);
    let ln_fact = |k: usize| crate::special::ln_factorial(k as u64);
    out.into_iter()
        .map(|ms| {
            let mut counts: HashMap<usize, usize> = HashMap::new();
            for &i in &ms {
                *counts.entry(i).or_default() += 1;
            }
            let ln_w = ln_fact(n) - counts.values().map(|&c| ln_fact(c)).sum::<f64>();
            (ms, ln_w.exp().round())
        })
        .collect()
}

/// `E‖Σ_j e^{2πi y N(t_j)}‖_{2n}^{2n}` for the Poisson process, as a sum of
/// coincidence probabilities; within `|times|^{2n} · tol` of the truth.
pub fn exact_even_moment_poisson(times: &[f64], n: u32, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if n == 0 {
        return Err(invalid("moment order n must be >= 1"));
    }
    if times.is_empty() {
        return Ok(0.0);
    }
    let tuples = (times.len() as f64).powi(2 * n as i32);
    if tuples > EXACT_TUPLE_GUARD {
        return Err(Error::Guard(format!(
            "|A|^(2n) = {tuples} exceeds the {EXACT_TUPLE_GUARD} tuple guard"
        )));
    }
    let sets = multisets(times.len(), n as usize);
    let pairs: Vec<(usize, usize)> = (0..sets.len())
        .flat_map(|a| (0..sets.len()).map(move |b| (a, b)))
        .collect();
    let terms: Vec<f64> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (plus, wa) = &sets[a];
            let (minus, wb) = &sets[b];
            let s = SignedTimeMultiset::new(
                plus.iter().map(|&i| times[i]).collect(),
                minus.iter().map(|&i| times[i]).collect(),
            )?;
            Ok(wa * wb * coincidence_probability_poisson(&s, tol)?)
        })
        .collect::<Result<_>>()?;
    Ok(terms.into_iter().collect::<CompensatedSum>().value())
}

/// `p - 1 + α`: the growth exponent in `M` expected when the process takes
/// values of size about `j^{1-α}`.
pub fn heuristic_exponent(p: f64, alpha: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid(format!("p must be >= 1, got {p}")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(p - 1.0 + alpha)
}

/// Least-squares line through `(ln M, ln estimate)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    /// Largest absolute residual in log space.
    pub max_residual: f64,
}

pub fn slope_fit(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(invalid(format!(
            "slope fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(p) = points.iter().find(|(m, v)| !(*m > 0.0 && *v > 0.0)) {
        return Err(invalid(format!("slope fit needs positive data, got {p:?}")));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("slope fit needs at least two distinct scales"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    Ok(SlopeFit {
        slope,
        intercept,
        residual: (resid.iter().map(|r| r * r).sum::<f64>() / n).sqrt(),
        max_residual: resid.iter().fold(0.0, |m, r| m.max(r.abs())),
    })
}
