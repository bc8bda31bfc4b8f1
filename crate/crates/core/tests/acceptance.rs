//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::time::{Duration, Instant};

use expsum::bounds::run_all_grids;
use expsum::expsum::{default_nodes, even_norm_coeff, lp_norm_quadrature, FrequencySpectrum};
use expsum::lattice::{
    divisor_summatory, greenruzsa_generate, shell_count_brute, shell_count_fast, shell_sup_ratio, sparsity_bound,
    sparsity_count, GreenRuzsaSpec, ShellQuery, EULER_GAMMA,
};
use expsum::majorant::{genericity_experiment, majorant_ratio};
use expsum::moments::{
    exact_even_moment_poisson, mc_even_moment, slope_fit, ExperimentSpec, MomentEstimate, ProcessKind, TimeMap,
};
use expsum::{Result, SeedSpec};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

/// Threshold on `sup count / D^{2/3}` for the d = 3 shell shape.
const SHELL_SUP_CONSTANT: f64 = 50.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn seed(criterion: u64) -> SeedSpec {
    SeedSpec::new(20_240_601, 0).derive(criterion)
}

fn shell_oracle() -> Result<Outcome> {
    let cases: Vec<(u32, u64, u64)> = (2..=5u32)
        .flat_map(|d| (1..=50u64).flat_map(move |r| (r..=(r * r).min(5000)).map(move |e| (d, r, e))))
        .collect();
    let mismatches: Vec<String> = cases
        .par_iter()
        .map(|&(d, r, e)| {
            let q = ShellQuery::new(d, e as f64, r as f64)?;
            let (b, f) = (shell_count_brute(&q)?.count, shell_count_fast(&q)?.count);
            Ok((b != f).then(|| format!("d={d} D={r} E={e}: brute {b} fast {f}")))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    outcome(
        mismatches.is_empty(),
        format!(
            "{} cases, {} mismatches{}",
            cases.len(),
            mismatches.len(),
            mismatches.first().map(|m| format!(", first {m}")).unwrap_or_default()
        ),
    )
}

fn shell_shape() -> Result<Outcome> {
    let mut points = Vec::new();
    let mut worst = 0.0f64;
    for r in [10.0, 20.0, 50.0, 100.0, 200.0] {
        let sup = shell_sup_ratio(3, r, 50_000)?;
        worst = worst.max(sup.ratio);
        points.push((r, sup.count as f64));
    }
    let fit = slope_fit(&points)?;
    let target = 2.0 / 3.0;
    outcome(
        (fit.slope - target).abs() <= 0.15 && worst < SHELL_SUP_CONSTANT,
        format!(
            "slope {:.4} (target {target:.4} ± 0.15), max ratio {worst:.3} < {SHELL_SUP_CONSTANT}, counts {points:?}",
            fit.slope
        ),
    )
}

fn sweep(process: ProcessKind, criterion: u64) -> Result<Vec<MomentEstimate>> {
    [16u64, 32, 64, 128, 256]
        .iter()
        .map(|&m| {
            let spec = ExperimentSpec::new(
                process.clone(),
                (1..=m).collect(),
                TimeMap::Identity,
                4.0,
                400,
                seed(criterion).derive(m),
            )?;
            mc_even_moment(&spec)
        })
        .collect()
}

fn slope_criterion(process: ProcessKind, criterion: u64, lo: f64, hi: f64) -> Result<Outcome> {
    let ests = sweep(process, criterion)?;
    let points: Vec<(f64, f64)> = ests
        .iter()
        .zip([16.0, 32.0, 64.0, 128.0, 256.0])
        .map(|(e, m)| (m, e.mean))
        .collect();
    let fit = slope_fit(&points)?;
    outcome(
        (lo..=hi).contains(&fit.slope),
        format!("slope {:.4} in [{lo}, {hi}], 400 samples per M", fit.slope),
    )
}

fn squares_on_average() -> Result<Outcome> {
    let mut rng = seed(5).rng();
    let mut sets: Vec<Vec<u64>> = vec![(1..=64).collect()];
    for _ in 0..20 {
        let mut pool: Vec<u64> = (1..=256).collect();
        for i in 0..64 {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        let mut a = pool[..64].to_vec();
        a.sort_unstable();
        sets.push(a);
    }
    let size = 64.0f64;
    let scale = size * size * (1.0 + size).ln().powf(1.5);
    let mut constant = 0.0f64;
    let mut failures = 0;
    for (i, a) in sets.into_iter().enumerate() {
        let spec = ExperimentSpec::new(
            ProcessKind::Poisson,
            a,
            TimeMap::Power(2),
            4.0,
            200,
            seed(5).derive(i as u64),
        )?;
        let est = mc_even_moment(&spec)?;
        constant = constant.max(est.mean / scale);
        if !(size * size <= est.mean + 5.0 * est.std_error && est.mean <= 10.0 * scale) {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("21 sets, {failures} outside [|A|², 10·|A|²·log^1.5(1+|A|)], fitted constant {constant:.4}"),
    )
}

fn spaced_powers() -> Result<Outcome> {
    let r = 2.0;
    let mut failures = Vec::new();
    for m in [16u64, 32, 64, 128, 256] {
        let mf = m as f64;
        let spec = ExperimentSpec::new(
            ProcessKind::Poisson,
            (1..=m).collect(),
            TimeMap::Arithmetic { m: mf, r },
            4.0,
            200,
            seed(6).derive(m),
        )?;
        let est = mc_even_moment(&spec)?;
        let (lo, hi) = (0.5 * mf * mf, 10.0 * (mf * mf * mf.ln() + mf.powf(3.0 - r)));
        if !(lo <= est.mean + 5.0 * est.std_error && est.mean - 5.0 * est.std_error <= hi) {
            failures.push(format!("M={m}: {} ± {} vs [{lo}, {hi}]", est.mean, est.std_error));
        }
    }
    outcome(
        failures.is_empty(),
        format!("r = 2, M ∈ 16..256, failures {failures:?}"),
    )
}

fn exact_vs_sampled() -> Result<Outcome> {
    let times = [1.0, 2.0, 3.0];
    let exact = exact_even_moment_poisson(&times, 2, 1e-8)?;
    let spec = ExperimentSpec::new(
        ProcessKind::Poisson,
        vec![1, 2, 3],
        TimeMap::Identity,
        4.0,
        100_000,
        seed(7),
    )?;
    let est = mc_even_moment(&spec)?;
    let z = (est.mean - exact) / est.std_error;
    outcome(
        z.abs() <= 5.0,
        format!(
            "exact {exact:.8}, sampled {:.6} ± {:.6} (z = {z:.3})",
            est.mean, est.std_error
        ),
    )
}

fn bounds_grids() -> Result<Outcome> {
    let reports = run_all_grids(seed(8))?;
    let checks: u64 = reports.iter().map(|r| r.checks).sum();
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
    outcome(
        failed.is_empty(),
        format!("{checks} checks over {} grids, failing grids {failed:?}", reports.len()),
    )
}

fn divisor() -> Result<Outcome> {
    const N: usize = 1_000_000;
    let mut d = vec![0u32; N + 1];
    for a in 1..=N {
        for m in (a..=N).step_by(a) {
            d[m] += 1;
        }
    }
    let mut cumulative = vec![0u128; N + 1];
    for n in 1..=N {
        cumulative[n] = cumulative[n - 1] + d[n] as u128;
    }
    let mismatches = (1..=100_000usize)
        .into_par_iter()
        .filter(|&x| divisor_summatory(x as f64).map(|v| v != cumulative[x]).unwrap_or(true))
        .count();
    // Δ is largest just at integers and smallest just before them
    let main = |x: f64| x * x.ln() + (2.0 * EULER_GAMMA - 1.0) * x;
    let mut worst = 0.0f64;
    let mut violations = 0;
    for n in 1..=N {
        let x = n as f64;
        let at = cumulative[n] as f64 - main(x);
        let before = if n > 1 { cumulative[n - 1] as f64 - main(x) } else { 0.0 };
        for delta in [at, before] {
            let ratio = delta.abs() / x.sqrt();
            worst = worst.max(ratio);
            if ratio > 2.0 {
                violations += 1;
            }
        }
    }
    outcome(
        mismatches == 0 && violations == 0,
        format!("{mismatches} mismatches for x ≤ 1e5; max |Δ(x)|/√x = {worst:.4} for x ≤ 1e6"),
    )
}

fn quadrature() -> Result<Outcome> {
    let mut rng = seed(10).rng();
    let mut worst = 0.0f64;
    for i in 0..200 {
        let n = 1 + (i % 3) as u32;
        let len = rng.random_range(1..=12);
        let terms: Vec<(i64, Complex64)> = (0..len)
            .map(|_| {
                let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                (rng.random_range(-60..=60), c)
            })
            .collect();
        let spec = FrequencySpectrum::new(terms);
        let p = 2.0 * n as f64;
        let quad = lp_norm_quadrature(&spec, p, default_nodes(&spec, p))?;
        let exact = even_norm_coeff(&spec, n)?;
        worst = worst.max((quad - exact).abs() / exact.max(f64::MIN_POSITIVE));
    }
    outcome(
        worst < 1e-9,
        format!("200 spectra, p ∈ {{2, 4, 6}}, max relative error {worst:.3e}"),
    )
}

fn sparsity() -> Result<Outcome> {
    let mut rng = seed(11).rng();
    let mut violations = 0;
    let mut checks = 0;
    for base in [5u64, 7, 10] {
        for k in 1..=8 {
            let set = greenruzsa_generate(&GreenRuzsaSpec::new(base, k)?)?;
            let top = *set.last().unwrap() as f64;
            for _ in 0..1000 {
                let radius = (rng.random_range(0.0..=(top + 1.0).ln())).exp().floor().max(1.0) as u64;
                let center = if rng.random_bool(0.5) {
                    set[rng.random_range(0..set.len())] as i64 + rng.random_range(-(radius as i64)..=radius as i64)
                } else {
                    rng.random_range(-(radius as i64)..=top as i64 + radius as i64)
                };
                checks += 1;
                if sparsity_count(&set, center, radius)? as f64 > sparsity_bound(base, radius) {
                    violations += 1;
                }
            }
        }
    }
    outcome(violations == 0, format!("{checks} windows, {violations} violations"))
}

fn majorant() -> Result<Outcome> {
    let mut rng = seed(12).rng();
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let len = rng.random_range(1..=10);
        let freqs: Vec<i64> = (0..len).map(|_| rng.random_range(-50..=50)).collect();
        let p = 2 * (1 + (i % 3) as u32);
        let r = majorant_ratio(&freqs, p, 3, seed(12).derive(i))?;
        worst = worst.max((r.ratio - 1.0).abs());
    }
    let points = genericity_experiment(
        &ProcessKind::Poisson,
        TimeMap::Identity,
        &[8, 16, 32, 64],
        4,
        0.2,
        40,
        2,
        seed(12),
    )?;
    let trend = points
        .windows(2)
        .all(|w| w[1].probability <= w[0].probability + 2.0 * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt());
    let probs: Vec<f64> = points.iter().map(|p| p.probability).collect();
    let max_ratio = points.iter().map(|p| p.max_ratio).fold(0.0, f64::max);
    outcome(
        worst <= 1e-6 && trend,
        format!("max |ratio - 1| = {worst:.2e} on 50 sets; exceedance {probs:?} (largest ratio {max_ratio:.6}), nonincreasing: {trend}"),
    )
}

type Criterion = (u32, &'static str, Option<Duration>, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 12] = [
        (
            1,
            "shell count fast == brute",
            Some(Duration::from_secs(120)),
            shell_oracle,
        ),
        (2, "cubic shell sup shape", None, shell_shape),
        (
            3,
            "poisson fourth-moment exponent",
            Some(Duration::from_secs(300)),
            || slope_criterion(ProcessKind::Poisson, 3, 2.8, 3.2),
        ),
        (4, "random-walk fourth-moment exponent", None, || {
            slope_criterion(ProcessKind::Walk, 4, 3.3, 3.7)
        }),
        (5, "squares on average", None, squares_on_average),
        (6, "spaced powers r = 2", None, spaced_powers),
        (7, "exact vs sampled fourth moment", None, exact_vs_sampled),
        (
            8,
            "probability bound grids",
            Some(Duration::from_secs(60)),
            bounds_grids,
        ),
        (9, "divisor summatory and error size", None, divisor),
        (10, "quadrature exactness", None, quadrature),
        (11, "digit-set sparsity", None, sparsity),
        (12, "majorant ratio and genericity", None, majorant),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => {
                let in_time = limit.is_none_or(|l| elapsed <= l);
                let detail = if in_time {
                    o.detail
                } else {
                    format!("{} (over time limit {:?})", o.detail, limit.unwrap())
                };
                (o.pass && in_time, detail)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:02} {}: {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
