use clap::Args;
use expsum::lattice::{
    diophantine_count, divisor_error, divisor_summatory, greenruzsa_generate, representation_count, sparsity_bound,
    sparsity_count, GreenRuzsaSpec,
};
use expsum::SeedSpec;
use rand::Rng;

use crate::config::Settings;
use crate::table::Table;
use crate::CliError;

/// Divisor summatory function D(x) = Σ_{n<=x} d(n) and its error term
/// Δ(x) = D(x) - x ln x - (2γ - 1)x.
///
/// Columns: x, D, delta, delta_over_sqrt_x.
#[derive(Debug, Args)]
pub struct DivisorArgs {
    /// Points x >= 1
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    /// Integer range start:end[:step], inclusive
    #[arg(long)]
    pub range: Option<String>,
}

fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "range {s:?}: expected start:end[:step] with 1 <= start <= end, step >= 1"
        ))
    };
    let parts: Vec<u64> = s
        .split(':')
        .map(|p| p.parse().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let (start, end, step) = match parts[..] {
        [a, b] => (a, b, 1),
        [a, b, c] => (a, b, c),
        _ => return Err(bad()),
    };
    if start == 0 || start > end || step == 0 {
        return Err(bad());
    }
    Ok((start..=end).step_by(step as usize).map(|v| v as f64).collect())
}

pub fn divisor(args: &DivisorArgs) -> Result<Table, CliError> {
    let mut xs = args.x.clone();
    if let Some(r) = &args.range {
        xs.extend(parse_range(r)?);
    }
    if xs.is_empty() {
        return Err(CliError::Usage("give --x or --range".into()));
    }
    let mut table = Table::new(&["x", "D", "delta", "delta_over_sqrt_x"]);
    for x in xs {
        let d = divisor_summatory(x)?;
        let delta = divisor_error(x)?;
        table.push(vec![x.into(), d.into(), delta.into(), (delta / x.sqrt()).into()]);
    }
    Ok(table)
}

/// Representation counts R(m) for sums of n d-th powers of 1..=M, and the
/// number Σ_m R(m)² of solutions to x_1^d+…+x_n^d = y_1^d+…+y_n^d.
///
/// Columns: n, d, M, solutions; with --table: m, R.
#[derive(Debug, Args)]
pub struct RepcountArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub d: u32,
    #[arg(long = "M")]
    pub m_max: u64,
    /// Emit the full table R(m)
    #[arg(long)]
    pub table: bool,
}

pub fn repcount(args: &RepcountArgs) -> Result<Table, CliError> {
    if args.table {
        let reps = representation_count(args.n, args.d, args.m_max)?;
        let mut table = Table::new(&["m", "R"]);
        for &(m, r) in reps.entries() {
            table.push(vec![m.into(), r.into()]);
        }
        Ok(table)
    } else {
        let mut table = Table::new(&["n", "d", "M", "solutions"]);
        let count = diophantine_count(args.n, args.d, args.m_max)?;
        table.push(vec![args.n.into(), args.d.into(), args.m_max.into(), count.into()]);
        Ok(table)
    }
}

/// Integers with k base-D digits, all in {0, 1, 3}, and the sparsity of
/// the set in windows [n - M, n + M].
///
/// Columns: index, value; with --scan: center, radius, count, bound, holds
/// for `--samples` seeded windows (bound 24·M^{ln 3 / ln D}).
#[derive(Debug, Args)]
pub struct GreenRuzsaArgs {
    /// Base D >= 5
    #[arg(long = "D")]
    pub base: u64,
    /// Digit count k >= 1
    #[arg(long)]
    pub k: u32,
    /// Scan random windows instead of listing the set
    #[arg(long)]
    pub scan: bool,
}

pub fn greenruzsa(args: &GreenRuzsaArgs, settings: &Settings) -> Result<Table, CliError> {
    let set = greenruzsa_generate(&GreenRuzsaSpec::new(args.base, args.k)?)?;
    if !args.scan {
        let mut table = Table::new(&["index", "value"]);
        for (i, &v) in set.iter().enumerate() {
            table.push(vec![i.into(), v.into()]);
        }
        return Ok(table);
    }
    let mut rng = SeedSpec::new(settings.seed, 0).rng();
    let top = *set.last().expect("digit sets are nonempty") as f64;
    let mut table = Table::new(&["center", "radius", "count", "bound", "holds"]);
    for _ in 0..settings.samples {
        let radius = rng.random_range(0.0..=(top + 1.0).ln()).exp().floor().max(1.0) as u64;
        let center = if rng.random_bool(0.5) {
            set[rng.random_range(0..set.len())] as i64 + rng.random_range(-(radius as i64)..=radius as i64)
        } else {
            rng.random_range(-(radius as i64)..=top as i64 + radius as i64)
        };
        let count = sparsity_count(&set, center, radius)?;
        let bound = sparsity_bound(args.base, radius);
        table.push(vec![
            center.into(),
            radius.into(),
            count.into(),
            bound.into(),
            (count as f64 <= bound).into(),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1:5:2").unwrap(), vec![1.0, 3.0, 5.0]);
        assert_eq!(parse_range("3:3").unwrap(), vec![3.0]);
        assert!(parse_range("0:3").is_err());
        assert!(parse_range("5:3").is_err());
        assert!(parse_range("1:3:0").is_err());
    }
}
