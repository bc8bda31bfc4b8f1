use clap::Args;
use expsum::moments::{exact_even_moment_poisson, mc_even_moment, mc_general_moment, ExperimentSpec, ProcessKind};
use expsum::SeedSpec;

use super::{parse_index, parse_map, parse_process};
use crate::config::Settings;
use crate::table::{Cell, Table};
use crate::CliError;

/// Expected moments E‖Σ_{j∈A} e(y X_{t(j)})‖_p^p for each set size.
///
/// Columns: process, map, index, size, p, method, samples, mean, std_error,
/// nodes. Even p is evaluated exactly per sample; other p (or --nodes) use
/// quadrature. Size s draws its samples from seed stream derive(s).
#[derive(Debug, Args)]
pub struct MomentArgs {
    /// poisson, walk, iid:v=p,… or uniform:v,…
    #[arg(long, default_value = "poisson")]
    pub process: String,
    /// identity, power:d, or arith:r (t = j·M^r, M the set size)
    #[arg(long, default_value = "identity")]
    pub map: String,
    /// full ({1..size}), random:U (size-subset of 1..U) or greenruzsa:D (size = digit count)
    #[arg(long, default_value = "full")]
    pub index: String,
    /// Moment order p >= 1
    #[arg(long, default_value_t = 4.0)]
    pub p: f64,
    /// Set sizes
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<u64>,
    /// Quadrature node count (forces quadrature)
    #[arg(long)]
    pub nodes: Option<u64>,
    /// Also compute the exact value (Poisson, even p, small sets)
    #[arg(long)]
    pub exact: bool,
}

pub fn run(args: &MomentArgs, settings: &Settings) -> Result<Table, CliError> {
    let process = parse_process(&args.process)?;
    let map = parse_map(&args.map)?;
    let index = parse_index(&args.index)?;
    let even = args.p >= 2.0 && args.p.fract() == 0.0 && (args.p as u64).is_multiple_of(2);
    if args.exact && !(even && process == ProcessKind::Poisson) {
        return Err(CliError::Usage(
            "--exact needs the poisson process and an even p".into(),
        ));
    }
    let base = SeedSpec::new(settings.seed, 0);
    let mut table = Table::new(&[
        "process",
        "map",
        "index",
        "size",
        "p",
        "method",
        "samples",
        "mean",
        "std_error",
        "nodes",
    ]);
    for &size in &args.sizes {
        let set = index.build(size, base.derive(u64::MAX - size))?;
        let time_map = map.for_size(size);
        let spec = ExperimentSpec::new(
            process.clone(),
            set.clone(),
            time_map,
            args.p,
            settings.samples,
            base.derive(size),
        )?;
        let est = if even && args.nodes.is_none() {
            mc_even_moment(&spec)?
        } else {
            mc_general_moment(&spec, args.nodes)?
        };
        let label = |method: &str| -> Vec<Cell> {
            vec![
                args.process.as_str().into(),
                args.map.as_str().into(),
                args.index.as_str().into(),
                size.into(),
                args.p.into(),
                method.into(),
            ]
        };
        let mut row = label(if est.nodes.is_some() { "quadrature" } else { "counting" });
        row.extend([
            est.n_samples.into(),
            est.mean.into(),
            est.std_error.into(),
            est.nodes.into(),
        ]);
        table.push(row);
        if args.exact {
            let times: Vec<f64> = set.iter().map(|&j| time_map.apply(j)).collect();
            let value = exact_even_moment_poisson(&times, (args.p / 2.0) as u32, settings.tol)?;
            let mut row = label("exact");
            row.extend([Cell::Empty, value.into(), Cell::Empty, Cell::Empty]);
            table.push(row);
        }
    }
    Ok(table)
}
