//! Exact samplers for the three integer-valued processes: i.i.d. draws from
//! a probability mass function, the unit-intensity Poisson process observed
//! on a time grid, and the simple random walk.

use rand::{Rng, RngCore};

use crate::error::{invalid, Result};
use crate::rng::SeedSpec;
use crate::special::poisson_ln_pmf;

/// Tolerance on the total mass of a [`Pmf`].
pub const PMF_MASS_TOLERANCE: f64 = 1e-12;

/// Means above this use the transformed-rejection sampler.
pub const INVERSION_MAX_MEAN: f64 = 10.0;

/// An integer-supported probability mass function in canonical form:
/// strictly increasing support, no zero-probability duplicates merged away.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    entries: Vec<(i64, f64)>,
}

impl Pmf {
    /// Build a pmf, merging repeated values and sorting the support.
    pub fn new(entries: impl IntoIterator<Item = (i64, f64)>) -> Result<Self> {
        let mut entries: Vec<(i64, f64)> = entries.into_iter().collect();
        if entries.is_empty() {
            return Err(invalid("pmf must have at least one support point"));
        }
        if let Some(&(v, p)) = entries.iter().find(|(_, p)| !(p.is_finite() && *p >= 0.0)) {
            return Err(invalid(format!("pmf probability at {v} is {p}")));
        }
        entries.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(i64, f64)> = Vec::with_capacity(entries.len());
        for (v, p) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += p,
                _ => merged.push((v, p)),
            }
        }
        let mass: f64 = merged.iter().map(|e| e.1).sum();
        if (mass - 1.0).abs() > PMF_MASS_TOLERANCE {
            return Err(invalid(format!("pmf mass is {mass}, expected 1")));
        }
        Ok(Self { entries: merged })
    }

    pub fn point_mass(value: i64) -> Self {
        Self {
            entries: vec![(value, 1.0)],
        }
    }

    /// Uniform distribution on the given values (duplicates are merged).
    pub fn uniform(values: &[i64]) -> Result<Self> {
        let w = 1.0 / values.len().max(1) as f64;
        Self::new(values.iter().map(|&v| (v, w)))
    }

    pub fn entries(&self) -> &[(i64, f64)] {
        &self.entries
    }

    /// `Σ_k μ_k²`, the probability that two independent draws coincide.
    pub fn collision_probability(&self) -> f64 {
        self.entries.iter().map(|&(_, p)| p * p).sum()
    }

    /// Inverse-CDF draw on the canonical ordering.
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.random();
        let mut cumulative = 0.0;
        for &(v, p) in &self.entries {
            cumulative += p;
            if u < cumulative {
                return v;
            }
        }
        // u landed in the rounding slack above the accumulated mass
        self.entries.last().map(|e| e.0).unwrap_or_default()
    }
}

/// Strictly increasing, nonnegative observation times.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if let Some(&t) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(invalid(format!(
                "time grid entry {t} is not a finite nonnegative number"
            )));
        }
        if let Some(w) = times.windows(2).find(|w| w[0] >= w[1]) {
            return Err(invalid(format!(
                "time grid not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Self { times })
    }

    /// The grid `start, start+1, …, end` (inclusive).
    pub fn integers(start: u64, end: u64) -> Self {
        Self {
            times: (start..=end).map(|t| t as f64).collect(),
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Which process produced a [`ProcessPath`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Iid,
    Poisson,
    RandomWalk,
    /// Values supplied by the caller (e.g. a correlated stationary process).
    External,
}

/// One realization of a process on a finite grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessPath {
    pub kind: PathKind,
    pub grid: TimeGrid,
    pub values: Vec<i64>,
}

impl ProcessPath {
    /// Wrap externally generated values.
    pub fn external(grid: TimeGrid, values: Vec<i64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(invalid(format!(
                "path has {} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            kind: PathKind::External,
            grid,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `P[Poisson(mean) = a] = e^{-mean} mean^a / a!`, evaluated in log space.
pub fn poisson_pmf(mean: f64, a: u64) -> f64 {
    assert!(mean >= 0.0, "poisson mean must be nonnegative, got {mean}");
    poisson_ln_pmf(mean, a).exp()
}

/// Draw one Poisson(mean) variate exactly.
///
/// Sequential inversion for `mean <= 10`; Hörmann's transformed rejection
/// with squeeze (PTRS) above that. Both are exact in distribution.
pub fn sample_poisson<R: RngCore + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    assert!(
        mean >= 0.0 && mean.is_finite(),
        "poisson mean must be finite and nonnegative"
    );
    if mean == 0.0 {
        0
    } else if mean <= INVERSION_MAX_MEAN {
        poisson_inversion(mean, rng)
    } else {
        poisson_ptrs(mean, rng)
    }
}

fn poisson_inversion<R: RngCore + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u >= cdf {
        k += 1;
        p *= mean / k as f64;
        if p == 0.0 {
            break;
        }
        cdf += p;
    }
    k
}

fn poisson_ptrs<R: RngCore + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    let smu = mean.sqrt();
    let b = 0.931 + 2.53 * smu;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let v_r = 0.9277 - 3.6224 / (b - 2.0);
    let ln_mean = mean.ln();
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= v_r {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let k_int = k as u64;
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -mean + k * ln_mean - crate::special::ln_factorial(k_int);
        if lhs <= rhs {
            return k_int;
        }
    }
}

/// `count` independent draws from `pmf`, indexed by times `1..=count`.
pub fn sample_iid(pmf: &Pmf, count: usize, seed: SeedSpec) -> ProcessPath {
    let mut rng = seed.rng();
    let values = (0..count).map(|_| pmf.draw(&mut rng)).collect();
    ProcessPath {
        kind: PathKind::Iid,
        grid: TimeGrid::integers(1, count as u64),
        values,
    }
}

/// A unit-intensity Poisson process observed at the grid times: independent
/// Poisson(Δt) increments between consecutive grid points, starting from
/// `N(0) = 0`.
pub fn sample_poisson_path(grid: &TimeGrid, seed: SeedSpec) -> ProcessPath {
    let mut rng = seed.rng();
    let mut prev_t = 0.0;
    let mut level = 0u64;
    let values = grid
        .times()
        .iter()
        .map(|&t| {
            level += sample_poisson(t - prev_t, &mut rng);
            prev_t = t;
            level as i64
        })
        .collect();
    ProcessPath {
        kind: PathKind::Poisson,
        grid: grid.clone(),
        values,
    }
}

/// A simple random walk `R(0), …, R(n_max)` with `R(0) = 0`.
pub fn sample_random_walk(n_max: u64, seed: SeedSpec) -> Result<ProcessPath> {
    if n_max == 0 {
        return Err(invalid("random walk length must be at least 1"));
    }
    let mut rng = seed.rng();
    let mut values = Vec::with_capacity(n_max as usize + 1);
    values.push(0i64);
    let mut level = 0i64;
    let mut bits = 0u64;
    for n in 0..n_max {
        if n % 64 == 0 {
            bits = rng.next_u64();
        }
        level += if bits & 1 == 1 { 1 } else { -1 };
        bits >>= 1;
        values.push(level);
    }
    Ok(ProcessPath {
        kind: PathKind::RandomWalk,
        grid: TimeGrid::integers(0, n_max),
        values,
    })
}
