use crate::error::{invalid, Error, Result};

/// Largest set size produced by [`greenruzsa_generate`].
pub const GREEN_RUZSA_GUARD: u64 = 1 << 24;

/// Digits allowed in a Green–Ruzsa set.
pub const DIGITS: [u64; 3] = [0, 1, 3];

/// Base `D >= 5` and digit count `k >= 1` of a Green–Ruzsa set `Λ_{D,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreenRuzsaSpec {
    pub base: u64,
    pub digits: u32,
}

impl GreenRuzsaSpec {
    pub fn new(base: u64, digits: u32) -> Result<Self> {
        if base < 5 {
            return Err(invalid(format!("Green–Ruzsa base must be >= 5, got {base}")));
        }
        if digits == 0 {
            return Err(invalid("Green–Ruzsa digit count must be >= 1"));
        }
        Ok(Self { base, digits })
    }

    /// `3^k`.
    pub fn size(&self) -> Option<u64> {
        3u64.checked_pow(self.digits)
    }

    /// Whether every base-`D` digit of `value` is 0, 1 or 3.
    pub fn contains(&self, mut value: u64) -> bool {
        for _ in 0..self.digits {
            if !DIGITS.contains(&(value % self.base)) {
                return false;
            }
            value /= self.base;
        }
        value == 0
    }
}

/// All `Σ_{j<k} d_j D^j` with `d_j ∈ {0, 1, 3}`, sorted ascending.
pub fn greenruzsa_generate(spec: &GreenRuzsaSpec) -> Result<Vec<u64>> {
    let size = spec
        .size()
        .filter(|&s| s <= GREEN_RUZSA_GUARD)
        .ok_or_else(|| Error::Guard(format!("3^{} exceeds 2^24", spec.digits)))?;
    let top = spec
        .base
        .checked_pow(spec.digits - 1)
        .and_then(|p| p.checked_mul(4))
        .ok_or_else(|| Error::Overflow(format!("{}^{} exceeds 64 bits", spec.base, spec.digits)))?;
    debug_assert!(top > 0);
    // digits enumerated most significant first, so the output is sorted
    let mut set = vec![0u64];
    for _ in 0..spec.digits {
        set = set
            .iter()
            .flat_map(|&prefix| DIGITS.iter().map(move |&d| prefix * spec.base + d))
            .collect();
    }
    debug_assert_eq!(set.len() as u64, size);
    Ok(set)
}

/// `|set ∩ [n - M, n + M]|` for a sorted set.
pub fn sparsity_count(set: &[u64], center: i64, radius: u64) -> Result<usize> {
    if radius == 0 {
        return Err(invalid("sparsity radius M must be >= 1"));
    }
    let lo = center as i128 - radius as i128;
    let hi = center as i128 + radius as i128;
    let start = set.partition_point(|&v| (v as i128) < lo);
    let end = set.partition_point(|&v| (v as i128) <= hi);
    Ok(end - start)
}

/// `24 · M^{ln 3 / ln D}`.
pub fn sparsity_bound(base: u64, radius: u64) -> f64 {
    24.0 * (radius as f64).powf(3f64.ln() / (base as f64).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_examples() {
        let s = GreenRuzsaSpec::new(5, 1).unwrap();
        assert_eq!(greenruzsa_generate(&s).unwrap(), vec![0, 1, 3]);
        let s = GreenRuzsaSpec::new(5, 2).unwrap();
        assert_eq!(greenruzsa_generate(&s).unwrap(), vec![0, 1, 3, 5, 6, 8, 15, 16, 18]);
    }

    #[test]
    fn generation_size_and_digits() {
        for base in [5u64, 7, 10, 13] {
            for k in 1..=7 {
                let spec = GreenRuzsaSpec::new(base, k).unwrap();
                let set = greenruzsa_generate(&spec).unwrap();
                assert_eq!(set.len() as u64, 3u64.pow(k));
                assert!(set.windows(2).all(|w| w[0] < w[1]));
                assert!(set.iter().all(|&v| spec.contains(v)));
            }
        }
    }

    #[test]
    fn guards() {
        assert!(GreenRuzsaSpec::new(4, 2).is_err());
        assert!(GreenRuzsaSpec::new(5, 0).is_err());
        let big = GreenRuzsaSpec::new(5, 16).unwrap();
        assert!(matches!(greenruzsa_generate(&big), Err(Error::Guard(_))));
    }

    #[test]
    fn sparsity_examples() {
        let set = greenruzsa_generate(&GreenRuzsaSpec::new(5, 2).unwrap()).unwrap();
        assert_eq!(sparsity_count(&set, 2, 2).unwrap(), 3);
        assert!(3.0 <= sparsity_bound(5, 2));
        assert!((sparsity_bound(5, 2) - 24.0 * 2f64.powf(3f64.ln() / 5f64.ln())).abs() < 1e-12);
        assert_eq!(sparsity_count(&[], 10, 3).unwrap(), 0);
        assert_eq!(sparsity_count(&set, -100, 3).unwrap(), 0);
        assert!(sparsity_count(&set, 0, 0).is_err());
    }
}
