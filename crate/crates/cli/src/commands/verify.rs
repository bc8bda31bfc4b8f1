use clap::Args;
use expsum::bounds::{run_all_grids, GridReport};
use expsum::expsum::{default_nodes, even_norm_coeff, lp_norm_quadrature, FrequencySpectrum};
use expsum::lattice::{divisor_summatory, hyperbolic_count, shell_count_brute, shell_count_fast, ShellQuery};
use expsum::SeedSpec;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::config::Settings;
use crate::table::Table;
use crate::CliError;

/// Run every probability-bound grid and the counting oracles.
///
/// Columns: check, cases, failures, status. Failing case identifiers go
/// to standard error; the exit code is 3 if any check fails.
#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Failing identifiers printed per check
    #[arg(long, default_value_t = 10)]
    pub show: usize,
}

fn collect(
    name: &'static str,
    failures: impl ParallelIterator<Item = Result<Option<String>, expsum::Error>>,
) -> Result<GridReport, CliError> {
    let outcomes: Vec<Option<String>> = failures.collect::<Result<_, _>>()?;
    Ok(GridReport {
        name,
        checks: outcomes.len() as u64,
        failures: outcomes.into_iter().flatten().collect(),
    })
}

fn shell_oracle() -> Result<GridReport, CliError> {
    let cases: Vec<(u32, u64, u64)> = (2..=5u32)
        .flat_map(|d| (1..=20u64).flat_map(move |r| (r..=r * r).map(move |e| (d, r, e))))
        .collect();
    collect(
        "shell-fast-vs-brute",
        cases.into_par_iter().map(|(d, r, e)| {
            let q = ShellQuery::new(d, e as f64, r as f64)?;
            let (b, f) = (shell_count_brute(&q)?.count, shell_count_fast(&q)?.count);
            Ok((b != f).then(|| format!("shell-fast-vs-brute d={d} D={r} E={e}")))
        }),
    )
}

fn divisor_oracle() -> Result<GridReport, CliError> {
    const N: usize = 20_000;
    let mut d = vec![0u128; N + 1];
    for a in 1..=N {
        for m in (a..=N).step_by(a) {
            d[m] += 1;
        }
    }
    for n in 1..=N {
        d[n] += d[n - 1];
    }
    collect(
        "divisor-vs-sieve",
        (1..=N)
            .into_par_iter()
            .map(|x| Ok((divisor_summatory(x as f64)? != d[x]).then(|| format!("divisor-vs-sieve x={x}")))),
    )
}

/// `|{(j, k) ∈ Z²: 0 < |k|^d - |j|^d <= x}|` by a double loop.
fn hyperbolic_brute(d: u32, x: u64) -> u128 {
    let mut count = 0u128;
    let mut k = 1u64;
    while k.pow(d) - (k - 1).pow(d) <= x {
        for j in 0..k {
            let diff = k.pow(d) - j.pow(d);
            if diff <= x {
                count += if j == 0 { 2 } else { 4 };
            }
        }
        k += 1;
    }
    count
}

fn hyperbolic_oracle() -> Result<GridReport, CliError> {
    let cases: Vec<(u32, u64)> = (2..=4u32).flat_map(|d| (1..=3000u64).map(move |x| (d, x))).collect();
    collect(
        "hyperbolic-vs-double-loop",
        cases.into_par_iter().map(|(d, x)| {
            Ok((hyperbolic_count(d, x as f64)? != hyperbolic_brute(d, x))
                .then(|| format!("hyperbolic-vs-double-loop d={d} x={x}")))
        }),
    )
}

fn quadrature_oracle(seed: SeedSpec) -> Result<GridReport, CliError> {
    let mut rng = seed.rng();
    let spectra: Vec<(u32, FrequencySpectrum)> = (0..100u32)
        .map(|i| {
            let len = rng.random_range(1..=10);
            let terms = (0..len)
                .map(|_| {
                    (
                        rng.random_range(-40..=40),
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    )
                })
                .collect();
            (1 + i % 3, FrequencySpectrum::new(terms))
        })
        .collect();
    collect(
        "quadrature-vs-counting",
        spectra.into_par_iter().enumerate().map(|(i, (n, s))| {
            let p = 2.0 * n as f64;
            let quad = lp_norm_quadrature(&s, p, default_nodes(&s, p))?;
            let exact = even_norm_coeff(&s, n)?;
            Ok(((quad - exact).abs() > 1e-9 * exact.max(1e-300))
                .then(|| format!("quadrature-vs-counting spectrum={i} p={p}")))
        }),
    )
}

/// Checks in reporting order.
pub fn all_checks(seed: SeedSpec) -> Result<Vec<GridReport>, CliError> {
    let mut reports = run_all_grids(seed)?;
    reports.push(shell_oracle()?);
    reports.push(divisor_oracle()?);
    reports.push(hyperbolic_oracle()?);
    reports.push(quadrature_oracle(seed.derive(10))?);
    Ok(reports)
}

/// Table of reports, printing failures to standard error; `Err` when any failed.
pub fn summarize(reports: &[GridReport], show: usize) -> Result<Table, CliError> {
    let mut table = Table::new(&["check", "cases", "failures", "status"]);
    let mut failed = false;
    for r in reports {
        for id in r.failures.iter().take(show) {
            eprintln!("verify: FAIL {id}");
        }
        if r.failures.len() > show {
            eprintln!("verify: FAIL {} ({} more)", r.name, r.failures.len() - show);
        }
        failed |= !r.passed();
        table.push(vec![
            r.name.into(),
            r.checks.into(),
            r.failures.len().into(),
            (if r.passed() { "pass" } else { "FAIL" }).into(),
        ]);
    }
    if failed {
        Err(CliError::Verify(table))
    } else {
        Ok(table)
    }
}

pub fn run(args: &VerifyArgs, settings: &Settings) -> Result<Table, CliError> {
    summarize(&all_checks(SeedSpec::new(settings.seed, 0))?, args.show)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_loop_small_values() {
        // d = 3, x = 7: (0, ±1) and (±1, ±2)
        assert_eq!(hyperbolic_brute(3, 7), 6);
        assert_eq!(hyperbolic_brute(2, 3), 6);
    }

    #[test]
    fn any_failure_maps_to_verify_error() {
        let ok = GridReport {
            name: "a",
            checks: 3,
            failures: vec![],
        };
        let bad = GridReport {
            name: "b",
            checks: 3,
            failures: vec!["b case=1".into()],
        };
        assert!(summarize(std::slice::from_ref(&ok), 10).is_ok());
        match summarize(&[ok, bad], 10) {
            Err(e @ CliError::Verify(_)) => {
                assert_eq!(e.exit_code(), crate::EXIT_VERIFY);
                let CliError::Verify(t) = e else { unreachable!() };
                assert_eq!(t.rows[1][3], "FAIL".into());
            }
            other => panic!("expected a verify failure, got {other:?}"),
        }
    }
}
