use crate::error::{invalid, Error, Result};
use crate::expsum::{representation_table, FrequencySpectrum, RepresentationTable};

use super::int::pow;

/// Largest `n · M^d` accepted by [`representation_count`].
pub const REPRESENTATION_GUARD: u128 = 1 << 40;

/// `R_{n,d,M}(m)`: ordered `n`-tuples from `{1^d, …, M^d}` summing to `m`.
pub fn representation_count(n: u32, d: u32, m_max: u64) -> Result<RepresentationTable> {
    if n == 0 || d == 0 || m_max == 0 {
        return Err(invalid(format!("need n, d, M >= 1, got n={n}, d={d}, M={m_max}")));
    }
    let top = pow(m_max as u128, d).map_err(|_| guard(n, d, m_max))?;
    if top.saturating_mul(n as u128) > REPRESENTATION_GUARD {
        return Err(guard(n, d, m_max));
    }
    let powers: Vec<i64> = (1..=m_max as u128).map(|j| j.pow(d) as i64).collect();
    representation_table(&FrequencySpectrum::unit(&powers), n)
}

fn guard(n: u32, d: u32, m_max: u64) -> Error {
    Error::Guard(format!("n·M^d for n={n}, d={d}, M={m_max} exceeds 2^40"))
}

/// `Σ_m R_{n,d,M}(m)²`: solutions of `j_1^d + … + j_n^d = k_1^d + … + k_n^d`
/// with all variables in `1..=M`.
pub fn diophantine_count(n: u32, d: u32, m_max: u64) -> Result<u128> {
    representation_count(n, d, m_max)?.sum_of_squares()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(representation_count(2, 2, 5).unwrap().get(25), 2);
        assert_eq!(representation_count(2, 1, 3).unwrap().get(4), 3);
        assert_eq!(representation_count(3, 2, 7).unwrap().total().unwrap(), 343);
        for d in 1..=4 {
            assert_eq!(diophantine_count(1, d, 9).unwrap(), 9);
        }
        assert_eq!(diophantine_count(2, 1, 2).unwrap(), 6);
    }

    #[test]
    fn guard_is_enforced() {
        assert!(matches!(representation_count(2, 3, 10_000), Err(Error::Guard(_))));
        assert!(matches!(representation_count(2, 40, 10), Err(Error::Guard(_))));
        assert!(representation_count(0, 2, 3).is_err());
    }
}
