use std::path::PathBuf;

use clap::Args;
use expsum::moments::{heuristic_exponent, slope_fit};

use crate::table::Table;
use crate::CliError;

/// Log-log least-squares fits over a `moment` CSV file.
///
/// Rows are grouped by process, map, index, p and method (when present).
/// Columns: group, points, slope, intercept, rms_residual, heuristic
/// (p - 1 + alpha when --alpha is given).
#[derive(Debug, Args)]
pub struct SlopeArgs {
    /// CSV written by `moment`
    #[arg(long)]
    pub input: PathBuf,
    /// Column used as the scale variable
    #[arg(long, default_value = "size")]
    pub x_column: String,
    /// Column fitted against the scale
    #[arg(long, default_value = "mean")]
    pub y_column: String,
    /// Repetition exponent alpha for the heuristic growth rate
    #[arg(long)]
    pub alpha: Option<f64>,
}

type Group = (String, Option<f64>, Vec<(f64, f64)>);

const GROUP_COLUMNS: [&str; 5] = ["process", "map", "index", "p", "method"];

pub fn run(args: &SlopeArgs) -> Result<Table, CliError> {
    let mut reader = csv::Reader::from_path(&args.input)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.input.display())))?;
    let headers = reader.headers().map_err(|e| CliError::Usage(e.to_string()))?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let x_at = find(&args.x_column).ok_or_else(|| CliError::Usage(format!("no column {:?}", args.x_column)))?;
    let y_at = find(&args.y_column).ok_or_else(|| CliError::Usage(format!("no column {:?}", args.y_column)))?;
    let group_at: Vec<(usize, &str)> = GROUP_COLUMNS.iter().filter_map(|c| find(c).map(|i| (i, *c))).collect();
    let p_at = find("p");

    // (key, p, points) in first-seen order
    let mut groups: Vec<Group> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Usage(e.to_string()))?;
        let number = |i: usize| -> Result<f64, CliError> {
            record[i]
                .parse()
                .map_err(|_| CliError::Usage(format!("not a number: {:?}", &record[i])))
        };
        let key = group_at
            .iter()
            .map(|&(i, c)| format!("{c}={}", &record[i]))
            .collect::<Vec<_>>()
            .join(" ");
        let p = p_at.map(&number).transpose()?;
        let point = (number(x_at)?, number(y_at)?);
        match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => g.2.push(point),
            None => groups.push((key, p, vec![point])),
        }
    }
    if groups.is_empty() {
        return Err(CliError::Usage("input has no data rows".into()));
    }
    let mut table = Table::new(&["group", "points", "slope", "intercept", "rms_residual", "heuristic"]);
    for (key, p, points) in groups {
        let fit = slope_fit(&points)?;
        let heuristic = match (p, args.alpha) {
            (Some(p), Some(alpha)) => Some(heuristic_exponent(p, alpha)?),
            _ => None,
        };
        table.push(vec![
            key.into(),
            points.len().into(),
            fit.slope.into(),
            fit.intercept.into(),
            fit.residual.into(),
            heuristic.into(),
        ]);
    }
    Ok(table)
}
