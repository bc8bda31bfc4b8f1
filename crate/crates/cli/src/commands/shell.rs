use clap::{Args, ValueEnum};
use expsum::lattice::{
    hyperbolic_count, shell_count_brute, shell_count_fast, shell_level_grid, shell_sup_ratio, CountResult, ShellQuery,
};
use rayon::prelude::*;

use crate::config::Settings;
use crate::table::Table;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShellMode {
    /// Columns E, brute, fast, equal
    Both,
    /// Columns E, count, work
    Brute,
    /// Columns E, count, work
    Fast,
    /// Columns D, count, ratio, argmax_E, levels: sup over D <= E <= D²
    Sup,
    /// Columns x, count, normalized: |{(j,k) ∈ Z²: 0 < |k|^d - |j|^d <= x}| and count / x^{2/d}
    Hyperbolic,
}

/// Shell counts #{(j, k) ∈ N², j < k: |k^d - j^d - E| < D}.
///
/// Count modes take one --D and evaluate --E (default: every integer in
/// [D, D²], or a geometric grid when there are more than --max-levels).
#[derive(Debug, Args)]
pub struct ShellArgs {
    /// Degree d >= 2
    #[arg(long)]
    pub d: u32,
    /// Shell half-width D (several allowed in sup mode)
    #[arg(long = "D", value_delimiter = ',')]
    pub radius: Vec<f64>,
    /// Levels E
    #[arg(long = "E", value_delimiter = ',')]
    pub level: Vec<f64>,
    /// Bounds x for hyperbolic mode
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ShellMode,
    /// Largest level grid evaluated exhaustively
    #[arg(long, default_value_t = 100_000)]
    pub max_levels: usize,
}

pub fn run(args: &ShellArgs, _settings: &Settings) -> Result<Table, CliError> {
    match args.mode {
        ShellMode::Hyperbolic => {
            if args.x.is_empty() {
                return Err(CliError::Usage("hyperbolic mode needs --x".into()));
            }
            let mut table = Table::new(&["x", "count", "normalized"]);
            for &x in &args.x {
                let count = hyperbolic_count(args.d, x)?;
                table.push(vec![
                    x.into(),
                    count.into(),
                    (count as f64 / x.powf(2.0 / args.d as f64)).into(),
                ]);
            }
            Ok(table)
        }
        ShellMode::Sup => {
            if args.radius.is_empty() {
                return Err(CliError::Usage("sup mode needs --D".into()));
            }
            let mut table = Table::new(&["D", "count", "ratio", "argmax_E", "levels"]);
            for &r in &args.radius {
                let sup = shell_sup_ratio(args.d, r, args.max_levels)?;
                table.push(vec![
                    r.into(),
                    sup.count.into(),
                    sup.ratio.into(),
                    sup.argmax_level.into(),
                    sup.levels_evaluated.into(),
                ]);
            }
            Ok(table)
        }
        mode => {
            let [r] = args.radius[..] else {
                return Err(CliError::Usage("count modes need exactly one --D".into()));
            };
            let levels = if args.level.is_empty() {
                shell_level_grid(args.d, r, args.max_levels)?
            } else {
                args.level.clone()
            };
            let counts: Vec<(f64, Option<CountResult>, Option<CountResult>)> = levels
                .par_iter()
                .map(|&e| {
                    let q = ShellQuery::new(args.d, e, r)?;
                    let brute = matches!(mode, ShellMode::Both | ShellMode::Brute)
                        .then(|| shell_count_brute(&q))
                        .transpose()?;
                    let fast = matches!(mode, ShellMode::Both | ShellMode::Fast)
                        .then(|| shell_count_fast(&q))
                        .transpose()?;
                    Ok((e, brute, fast))
                })
                .collect::<Result<_, expsum::Error>>()?;
            let mut table = if mode == ShellMode::Both {
                Table::new(&["E", "brute", "fast", "equal"])
            } else {
                Table::new(&["E", "count", "work"])
            };
            for (e, brute, fast) in counts {
                table.push(match (brute, fast) {
                    (Some(b), Some(f)) => vec![e.into(), b.count.into(), f.count.into(), (b.count == f.count).into()],
                    (Some(c), None) | (None, Some(c)) => vec![e.into(), c.count.into(), c.work.into()],
                    (None, None) => unreachable!("count modes evaluate at least one method"),
                });
            }
            Ok(table)
        }
    }
}
