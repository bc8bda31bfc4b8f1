use clap::Args;
use expsum::majorant::{genericity_experiment, majorant_ratio, majorant_ratio_quadrature};
use expsum::SeedSpec;

use super::{parse_map, parse_process};
use crate::config::Settings;
use crate::table::Table;
use crate::CliError;

/// Majorant ratio (sup over phases of ‖Σ e^{iθ_j} e(f_j y)‖_p) / ‖Σ e(f_j y)‖_p.
///
/// The search is multi-start coordinate ascent, so ratios are lower bounds.
/// Columns: p, size, base_moment, best_moment, ratio, exact, restarts.
/// With --genericity: size, samples, exceedances, probability, std_error,
/// max_ratio, the frequency of ratio >= size^epsilon over sampled paths.
#[derive(Debug, Args)]
pub struct MajorantArgs {
    /// Frequencies f_j
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub freqs: Vec<i64>,
    /// Moment order; odd or fractional p uses the approximate quadrature objective
    #[arg(long, default_value_t = 4.0)]
    pub p: f64,
    #[arg(long, default_value_t = 8)]
    pub restarts: u32,
    /// Quadrature nodes for non-even p
    #[arg(long)]
    pub nodes: Option<u64>,
    /// Run the genericity experiment over --sizes instead
    #[arg(long)]
    pub genericity: bool,
    #[arg(long, default_value = "poisson")]
    pub process: String,
    #[arg(long, default_value = "identity")]
    pub map: String,
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<u64>,
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,
}

fn even_order(p: f64) -> Option<u32> {
    (p >= 2.0 && p.fract() == 0.0 && (p as u64).is_multiple_of(2) && p <= 64.0).then_some(p as u32)
}

pub fn run(args: &MajorantArgs, settings: &Settings) -> Result<Table, CliError> {
    let seed = SeedSpec::new(settings.seed, 0);
    if args.genericity {
        let p = even_order(args.p).ok_or_else(|| CliError::Usage("genericity runs need an even p".into()))?;
        if args.sizes.is_empty() {
            return Err(CliError::Usage("genericity runs need --sizes".into()));
        }
        let process = parse_process(&args.process)?;
        let map = parse_map(&args.map)?;
        let mut table = Table::new(&[
            "size",
            "samples",
            "exceedances",
            "probability",
            "std_error",
            "max_ratio",
        ]);
        for &size in &args.sizes {
            let pts = genericity_experiment(
                &process,
                map.for_size(size),
                &[size],
                p,
                args.epsilon,
                settings.samples,
                args.restarts,
                seed,
            )?;
            for g in pts {
                table.push(vec![
                    g.size.into(),
                    g.samples.into(),
                    g.exceedances.into(),
                    g.probability.into(),
                    g.std_error.into(),
                    g.max_ratio.into(),
                ]);
            }
        }
        return Ok(table);
    }
    if args.freqs.is_empty() {
        return Err(CliError::Usage("give --freqs, or --genericity with --sizes".into()));
    }
    let r = match even_order(args.p) {
        Some(p) if args.nodes.is_none() => majorant_ratio(&args.freqs, p, args.restarts, seed)?,
        _ => majorant_ratio_quadrature(&args.freqs, args.p, args.nodes, args.restarts, seed)?,
    };
    let mut table = Table::new(&["p", "size", "base_moment", "best_moment", "ratio", "exact", "restarts"]);
    table.push(vec![
        r.p.into(),
        args.freqs.len().into(),
        r.base_moment.into(),
        r.best_moment.into(),
        r.ratio.into(),
        r.exact.into(),
        r.restarts.into(),
    ]);
    Ok(table)
}
