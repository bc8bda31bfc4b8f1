//! Majorant ratios: how far unimodular coefficients can push
//! `‖Σ a_j e(f_j y)‖_p` above the all-ones sum.
//!
//! The supremum over `|a_j| <= 1` of a convex function is attained at
//! extreme points, so only phases `a_j = e^{iθ_j}` are searched. The search
//! is coordinate ascent with multiple starts; the result is the best value
//! found, a lower bound on the true supremum.
//!
//! For even `p = 2n` the objective is exact (via convolution), and as a
//! function of one phase it is a trigonometric polynomial of degree `n`, so
//! `2n + 1` evaluations pin it down. Each coordinate step maximizes that
//! polynomial by a scan followed by golden-section refinement, and is kept
//! only if the exact objective confirms the gain.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::expsum::{default_nodes, even_norm_coeff, lp_norm_quadrature, FrequencySpectrum};
use crate::moments::{ExperimentSpec, ProcessKind, TimeMap};
use crate::rng::SeedSpec;

/// Relative gain below which a sweep counts as converged.
pub const SWEEP_TOLERANCE: f64 = 1e-10;
/// Bracket width at which golden-section refinement stops.
pub const GOLDEN_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;
const SCAN_POINTS: usize = 64;

/// Best phases found and the ratio they achieve.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorantResult {
    /// `‖Σ e(f_j y)‖_p^p`.
    pub base_moment: f64,
    /// Largest `‖Σ e^{iθ_j} e(f_j y)‖_p^p` found.
    pub best_moment: f64,
    /// `(best_moment / base_moment)^{1/p}`.
    pub ratio: f64,
    /// Phases in `[0, 2π)` attaining `best_moment`.
    pub best_phases: Vec<f64>,
    pub restarts: u32,
    pub p: f64,
    /// False when the objective is a quadrature approximation.
    pub exact: bool,
}

trait Objective: Sync {
    fn value(&self, phases: &[f64]) -> Result<f64>;
    /// Maximize over one coordinate, returning the proposed phase.
    fn propose(&self, phases: &mut [f64], j: usize) -> Result<f64>;
}

struct EvenObjective<'a> {
    freqs: &'a [i64],
    n: u32,
}

impl Objective for EvenObjective<'_> {
    fn value(&self, phases: &[f64]) -> Result<f64> {
        even_norm_coeff(&FrequencySpectrum::with_phases(self.freqs, phases), self.n)
    }

    fn propose(&self, phases: &mut [f64], j: usize) -> Result<f64> {
        let k = 2 * self.n as usize + 1;
        let saved = phases[j];
        let mut samples = Vec::with_capacity(k);
        for i in 0..k {
            phases[j] = TAU * i as f64 / k as f64;
            samples.push(self.value(phases)?);
        }
        phases[j] = saved;
        // F(θ) = c_0 + 2 Σ_{m=1}^n Re(c_m e^{imθ})
        let coeffs: Vec<Complex64> = (0..=self.n as usize)
            .map(|m| {
                samples
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| v * Complex64::from_polar(1.0, -TAU * (m * i) as f64 / k as f64))
                    .sum::<Complex64>()
                    / k as f64
            })
            .collect();
        let poly = |t: f64| {
            coeffs[0].re
                + 2.0
                    * coeffs[1..]
                        .iter()
                        .enumerate()
                        .map(|(m, c)| (c * Complex64::from_polar(1.0, (m + 1) as f64 * t)).re)
                        .sum::<f64>()
        };
        Ok(maximize_on_circle(poly))
    }
}

struct QuadratureObjective<'a> {
    freqs: &'a [i64],
    p: f64,
    nodes: u64,
}

impl Objective for QuadratureObjective<'_> {
    fn value(&self, phases: &[f64]) -> Result<f64> {
        lp_norm_quadrature(&FrequencySpectrum::with_phases(self.freqs, phases), self.p, self.nodes)
    }

    fn propose(&self, phases: &mut [f64], j: usize) -> Result<f64> {
        let saved = phases[j];
        let mut failure = None;
        let best = maximize_on_circle(|t| {
            phases[j] = t;
            self.value(phases).unwrap_or_else(|e| {
                failure = Some(e);
                f64::NEG_INFINITY
            })
        });
        phases[j] = saved;
        match failure {
            Some(e) => Err(e),
            None => Ok(best),
        }
    }
}

/// Coarse scan of the circle, then golden section inside the bracket
/// around the best scanned point.
fn maximize_on_circle(mut f: impl FnMut(f64) -> f64) -> f64 {
    let step = TAU / SCAN_POINTS as f64;
    let (best_i, _) = (0..SCAN_POINTS)
        .map(|i| (i, f(i as f64 * step)))
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
        );
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = ((best_i as f64 - 1.0) * step, (best_i as f64 + 1.0) * step);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > GOLDEN_TOLERANCE {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    (0.5 * (lo + hi)).rem_euclid(TAU)
}

/// Coordinate ascent from `start`; returns the final value and phases.
fn ascend(obj: &dyn Objective, mut phases: Vec<f64>) -> Result<(f64, Vec<f64>)> {
    let mut current = obj.value(&phases)?;
    for _ in 0..MAX_SWEEPS {
        let before = current;
        for j in 0..phases.len() {
            let proposal = obj.propose(&mut phases, j)?;
            let saved = phases[j];
            phases[j] = proposal;
            let value = obj.value(&phases)?;
            if value > current {
                current = value;
            } else {
                phases[j] = saved;
            }
        }
        if current - before <= SWEEP_TOLERANCE * before.abs() {
            break;
        }
    }
    Ok((current, phases))
}

fn multi_start(obj: &dyn Objective, len: usize, restarts: u32, seed: SeedSpec) -> Result<(f64, Vec<f64>)> {
    let runs: Vec<(f64, Vec<f64>)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                vec![0.0; len]
            } else {
                let mut rng = seed.sample(r as u64).rng();
                (0..len).map(|_| rng.random_range(0.0..TAU)).collect()
            };
            ascend(obj, start)
        })
        .collect::<Result<_>>()?;
    // strict comparison keeps the lowest restart index on ties
    Ok(runs
        .into_iter()
        .reduce(|best, run| if run.0 > best.0 { run } else { best })
        .expect("at least one restart"))
}

fn validate(freqs: &[i64], restarts: u32) -> Result<()> {
    if freqs.is_empty() {
        return Err(invalid("frequency list must be nonempty"));
    }
    if restarts == 0 {
        return Err(invalid("need at least one restart"));
    }
    Ok(())
}

/// Majorant ratio for even `p`, with the exact objective.
///
/// Restart 0 starts from all phases zero; restarts `r >= 1` start from
/// phases drawn with `seed.sample(r)`.
pub fn majorant_ratio(freqs: &[i64], p: u32, restarts: u32, seed: SeedSpec) -> Result<MajorantResult> {
    validate(freqs, restarts)?;
    if p < 2 || !p.is_multiple_of(2) {
        return Err(invalid(format!("exact majorant search needs an even p >= 2, got {p}")));
    }
    let obj = EvenObjective { freqs, n: p / 2 };
    let base = obj.value(&vec![0.0; freqs.len()])?;
    let (best, phases) = multi_start(&obj, freqs.len(), restarts, seed)?;
    Ok(MajorantResult {
        base_moment: base,
        best_moment: best,
        ratio: (best / base).powf(1.0 / p as f64),
        best_phases: phases,
        restarts,
        p: p as f64,
        exact: true,
    })
}

/// Majorant ratio for any `p >= 1`, with a rectangle-rule objective on
/// `nodes` points (default node count when `None`). Approximate.
pub fn majorant_ratio_quadrature(
    freqs: &[i64],
    p: f64,
    nodes: Option<u64>,
    restarts: u32,
    seed: SeedSpec,
) -> Result<MajorantResult> {
    validate(freqs, restarts)?;
    let nodes = nodes.unwrap_or_else(|| default_nodes(&FrequencySpectrum::unit(freqs), p));
    let obj = QuadratureObjective { freqs, p, nodes };
    let base = obj.value(&vec![0.0; freqs.len()])?;
    let (best, phases) = multi_start(&obj, freqs.len(), restarts, seed)?;
    Ok(MajorantResult {
        base_moment: base,
        best_moment: best,
        ratio: (best / base).powf(1.0 / p),
        best_phases: phases,
        restarts,
        p,
        exact: false,
    })
}

/// Empirical frequency of `ratio >= |A|^ε` at one set size.
///
/// The optimizer under-reports the supremum, so `probability` is a lower
/// estimate of the true exceedance probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericityPoint {
    pub size: u64,
    pub samples: u64,
    pub exceedances: u64,
    pub probability: f64,
    /// Binomial standard error `√(q(1-q)/samples)`.
    pub std_error: f64,
    /// Largest ratio observed.
    pub max_ratio: f64,
}

/// Exceedance frequencies for index sets `{1, …, size}` of each size.
///
/// Size `s` uses the frequency streams of `seed.derive(s)`; the phase
/// restarts of sample `i` use `seed.derive(s).sample(i).derive(1)`.
#[allow(clippy::too_many_arguments)]
pub fn genericity_experiment(
    process: &ProcessKind,
    time_map: TimeMap,
    sizes: &[u64],
    p: u32,
    epsilon: f64,
    samples: u64,
    restarts: u32,
    seed: SeedSpec,
) -> Result<Vec<GenericityPoint>> {
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    sizes
        .iter()
        .map(|&size| {
            let size_seed = seed.derive(size);
            let spec = ExperimentSpec::new(
                process.clone(),
                (1..=size).collect(),
                time_map,
                p as f64,
                samples,
                size_seed,
            )?;
            let ratios: Vec<f64> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let freqs = spec.realize(i)?;
                    Ok(majorant_ratio(&freqs, p, restarts, size_seed.sample(i).derive(1))?.ratio)
                })
                .collect::<Result<_>>()?;
            let threshold = (size as f64).powf(epsilon);
            let exceedances = ratios.iter().filter(|&&r| r >= threshold).count() as u64;
            let q = exceedances as f64 / samples as f64;
            Ok(GenericityPoint {
                size,
                samples,
                exceedances,
                probability: q,
                std_error: (q * (1.0 - q) / samples as f64).sqrt(),
                max_ratio: ratios.iter().copied().fold(0.0, f64::max),
            })
        })
        .collect()
}
