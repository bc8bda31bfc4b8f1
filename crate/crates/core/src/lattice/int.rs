//! Exact integer helpers: checked powers, integer roots, and exact
//! classification of integers against real (f64) bounds.

use crate::error::{invalid, overflow, Result};

pub(crate) fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    base.checked_pow(exp)
}

pub(crate) fn pow(base: u128, exp: u32) -> Result<u128> {
    checked_pow(base, exp).ok_or_else(|| overflow(format!("{base}^{exp} exceeds 128 bits")))
}

/// Largest `r` with `r^d <= x`, by binary search.
pub fn iroot_floor(x: u128, d: u32) -> u128 {
    assert!(d >= 1);
    if d == 1 || x < 2 {
        return x;
    }
    // r <= 2^(128/d)
    let mut lo = 1u128;
    let mut hi = 1u128 << (128 / d + 1).min(127);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        match checked_pow(mid, d) {
            Some(v) if v <= x => lo = mid,
            _ => hi = mid - 1,
        }
    }
    lo
}

const SCALE_BITS: u32 = 52;

/// `v · 2^52` as an exact integer; valid for finite `v >= 1` below `2^75`.
fn scaled(v: f64) -> Result<i128> {
    if !(v >= 1.0) || !v.is_finite() || v >= 2f64.powi(75) {
        return Err(invalid(format!("bound {v} outside the exact range [1, 2^75)")));
    }
    Ok((v * 2f64.powi(SCALE_BITS as i32)) as i128)
}

/// The integers strictly inside `(center - radius, center + radius)`, as an
/// inclusive range `lo..=hi` (empty when `lo > hi`).
///
/// Both endpoints are resolved exactly from the binary values of the
/// floats, so a difference landing on `center ± radius` is never
/// misclassified.
pub fn open_interval(center: f64, radius: f64) -> Result<(i128, i128)> {
    let c = scaled(center)?;
    let r = scaled(radius)?;
    let unit = 1i128 << SCALE_BITS;
    let lo = (c - r).div_euclid(unit) + 1;
    let upper = c + r;
    let hi = upper.div_euclid(unit) - if upper.rem_euclid(unit) == 0 { 1 } else { 0 };
    Ok((lo, hi))
}

/// `⌊x⌋` for finite `x >= 0` below `2^64`.
pub fn floor_u64(x: f64) -> Result<u64> {
    if !(x >= 0.0) || !x.is_finite() || x >= 2f64.powi(64) {
        return Err(invalid(format!("{x} outside [0, 2^64)")));
    }
    Ok(x.floor() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_are_exact() {
        for d in 1..=6u32 {
            for r in 0u128..200 {
                let p = r.pow(d);
                assert_eq!(iroot_floor(p, d), r);
                if p > 0 {
                    assert_eq!(iroot_floor(p - 1, d), r - 1, "d={d} r={r}");
                }
                assert_eq!(
                    iroot_floor(p + 1, d),
                    if d == 1 {
                        p + 1
                    } else if r == 0 && d > 1 {
                        1
                    } else {
                        r
                    }
                );
            }
        }
        assert_eq!(iroot_floor(u128::MAX, 2), u64::MAX as u128);
        assert_eq!(iroot_floor(u128::MAX, 3), 6_981_463_658_331);
    }

    #[test]
    fn open_interval_excludes_endpoints() {
        assert_eq!(open_interval(8.0, 1.0).unwrap(), (8, 8));
        assert_eq!(open_interval(5.0, 2.0).unwrap(), (4, 6));
        assert_eq!(open_interval(5.5, 1.0).unwrap(), (5, 6));
        assert_eq!(open_interval(1.0, 1.0).unwrap(), (1, 1));
        // 0.1 is not dyadic: 7.1 - 0.1 in binary is slightly different from 7
        let (lo, hi) = open_interval(7.1, 0.1 + 1.0).unwrap();
        assert_eq!((lo, hi), (6, 8));
        assert!(open_interval(0.5, 1.0).is_err());
    }
}
