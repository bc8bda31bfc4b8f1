//! One module per subcommand; each returns a [`Table`](crate::table::Table).

pub mod arith;
pub mod majorant;
pub mod moment;
pub mod shell;
pub mod slope;
pub mod verify;

use expsum::lattice::{greenruzsa_generate, GreenRuzsaSpec};
use expsum::moments::{ProcessKind, TimeMap};
use expsum::processes::Pmf;
use expsum::SeedSpec;
use rand::Rng;

use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// `poisson`, `walk`, `iid:v=p,v=p,…` or `uniform:v,v,…`.
pub fn parse_process(s: &str) -> Result<ProcessKind, CliError> {
    let bad = |what: &str| usage(format!("process {s:?}: {what}"));
    match s.split_once(':') {
        None if s == "poisson" => Ok(ProcessKind::Poisson),
        None if s == "walk" => Ok(ProcessKind::Walk),
        Some(("iid", rest)) => {
            let entries = rest
                .split(',')
                .map(|kv| {
                    let (v, p) = kv
                        .split_once('=')
                        .ok_or_else(|| bad("expected value=probability pairs"))?;
                    Ok((
                        v.trim().parse().map_err(|_| bad("bad value"))?,
                        p.trim().parse().map_err(|_| bad("bad probability"))?,
                    ))
                })
                .collect::<Result<Vec<(i64, f64)>, CliError>>()?;
            Ok(ProcessKind::Iid(Pmf::new(entries)?))
        }
        Some(("uniform", rest)) => {
            let values = rest
                .split(',')
                .map(|v| v.trim().parse().map_err(|_| bad("bad value")))
                .collect::<Result<Vec<i64>, CliError>>()?;
            Ok(ProcessKind::Iid(Pmf::uniform(&values)?))
        }
        _ => Err(bad("expected poisson, walk, iid:v=p,… or uniform:v,…")),
    }
}

/// How indices become times; `arith:r` means `t = j·M^r` with `M` the set size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapSpec {
    Identity,
    Power(u32),
    Arith(f64),
}

impl MapSpec {
    pub fn for_size(&self, size: u64) -> TimeMap {
        match *self {
            MapSpec::Identity => TimeMap::Identity,
            MapSpec::Power(d) => TimeMap::Power(d),
            MapSpec::Arith(r) => TimeMap::Arithmetic { m: size as f64, r },
        }
    }
}

/// `identity`, `power:d` or `arith:r`.
pub fn parse_map(s: &str) -> Result<MapSpec, CliError> {
    let bad = || usage(format!("map {s:?}: expected identity, power:d or arith:r"));
    match s.split_once(':') {
        None if s == "identity" => Ok(MapSpec::Identity),
        Some(("power", d)) => Ok(MapSpec::Power(d.parse().map_err(|_| bad())?)),
        Some(("arith", r)) => Ok(MapSpec::Arith(r.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

/// Which index set `A` a size selects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndexSpec {
    /// `{1, …, size}`.
    Full,
    /// A uniform `size`-subset of `{1, …, universe}`.
    Random(u64),
    /// Nonzero elements of the `size`-digit set in base `D` with digits {0,1,3}.
    DigitSet(u64),
}

/// `full`, `random:U` or `greenruzsa:D`.
pub fn parse_index(s: &str) -> Result<IndexSpec, CliError> {
    let bad = || usage(format!("index {s:?}: expected full, random:U or greenruzsa:D"));
    match s.split_once(':') {
        None if s == "full" => Ok(IndexSpec::Full),
        Some(("random", u)) => Ok(IndexSpec::Random(u.parse().map_err(|_| bad())?)),
        Some(("greenruzsa", d)) => Ok(IndexSpec::DigitSet(d.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

impl IndexSpec {
    pub fn build(&self, size: u64, seed: SeedSpec) -> Result<Vec<u64>, CliError> {
        match *self {
            IndexSpec::Full => Ok((1..=size).collect()),
            IndexSpec::Random(universe) => {
                if size > universe {
                    return Err(usage(format!("cannot draw {size} indices from 1..={universe}")));
                }
                let mut rng = seed.rng();
                let mut pool: Vec<u64> = (1..=universe).collect();
                for i in 0..size as usize {
                    let j = rng.random_range(i..pool.len());
                    pool.swap(i, j);
                }
                let mut a = pool[..size as usize].to_vec();
                a.sort_unstable();
                Ok(a)
            }
            IndexSpec::DigitSet(base) => {
                let digits = u32::try_from(size).map_err(|_| usage("digit count too large"))?;
                let set = greenruzsa_generate(&GreenRuzsaSpec::new(base, digits)?)?;
                Ok(set.into_iter().filter(|&v| v > 0).collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsers() {
        assert_eq!(parse_process("poisson").unwrap(), ProcessKind::Poisson);
        assert_eq!(parse_process("walk").unwrap(), ProcessKind::Walk);
        assert!(matches!(parse_process("iid:0=0.5,1=0.5").unwrap(), ProcessKind::Iid(_)));
        assert!(matches!(parse_process("uniform:1,2,3").unwrap(), ProcessKind::Iid(_)));
        assert!(parse_process("iid:0=0.5").is_err());
        assert!(parse_process("cauchy").is_err());
        assert_eq!(parse_map("power:2").unwrap(), MapSpec::Power(2));
        assert_eq!(
            parse_map("arith:2").unwrap().for_size(16),
            TimeMap::Arithmetic { m: 16.0, r: 2.0 }
        );
        assert!(parse_map("log").is_err());
        assert_eq!(parse_index("random:256").unwrap(), IndexSpec::Random(256));
    }

    #[test]
    fn index_sets() {
        let s = SeedSpec::new(1, 0);
        assert_eq!(IndexSpec::Full.build(3, s).unwrap(), vec![1, 2, 3]);
        let r = IndexSpec::Random(20).build(5, s).unwrap();
        assert_eq!(r.len(), 5);
        assert!(r.windows(2).all(|w| w[0] < w[1]) && r[4] <= 20);
        assert_eq!(
            IndexSpec::DigitSet(5).build(2, s).unwrap(),
            vec![1, 3, 5, 6, 8, 15, 16, 18]
        );
        assert!(IndexSpec::Random(3).build(5, s).is_err());
    }
}
