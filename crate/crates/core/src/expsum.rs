//! Exponential sums with integer frequencies and their `L^p(T)` norms.
//!
//! For unit coefficients the even moments are integer counts: the
//! `2n`-th power of the `L^{2n}` norm of `Σ_j e(f_j y)` equals `Σ_m R(m)²`,
//! where `R(m)` counts ordered `n`-tuples of terms whose frequencies sum to
//! `m`. Those counts are computed by exact integer convolution. General
//! coefficients go through the same convolution over complex numbers, and
//! the rectangle rule on `nodes` equispaced points gives arbitrary `p`
//! (exact for even `p` once `nodes` exceeds `p · span`).

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{invalid, overflow, Result};

/// Convolutions whose result spans at most this many frequencies are
/// accumulated in a dense buffer; wider ones are sorted and merged.
pub const DENSE_SPAN_LIMIT: u64 = 1 << 20;

/// A finite exponential sum `Σ_j a_j e^{2πi f_j y}`.
///
/// The raw term list is kept with multiplicity; [`FrequencySpectrum::merged`]
/// collapses equal frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySpectrum {
    terms: Vec<(i64, Complex64)>,
}

impl FrequencySpectrum {
    pub fn new(terms: Vec<(i64, Complex64)>) -> Self {
        Self { terms }
    }

    /// All coefficients equal to one.
    pub fn unit(freqs: &[i64]) -> Self {
        Self {
            terms: freqs.iter().map(|&f| (f, Complex64::new(1.0, 0.0))).collect(),
        }
    }

    /// Unit-modulus coefficients `e^{iθ_j}`.
    pub fn with_phases(freqs: &[i64], phases: &[f64]) -> Self {
        assert_eq!(freqs.len(), phases.len());
        Self {
            terms: freqs
                .iter()
                .zip(phases)
                .map(|(&f, &t)| (f, Complex64::from_polar(1.0, t)))
                .collect(),
        }
    }

    pub fn terms(&self) -> &[(i64, Complex64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.terms.iter().all(|(_, c)| *c == Complex64::new(1.0, 0.0))
    }

    pub fn frequencies(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.iter().map(|t| t.0)
    }

    /// `max f - min f`, or 0 for an empty spectrum.
    pub fn span(&self) -> u64 {
        let (lo, hi) = self
            .frequencies()
            .fold((i64::MAX, i64::MIN), |(lo, hi), f| (lo.min(f), hi.max(f)));
        if lo > hi {
            0
        } else {
            hi.abs_diff(lo)
        }
    }

    /// Coefficients summed per distinct frequency, sorted by frequency.
    pub fn merged(&self) -> Vec<(i64, Complex64)> {
        let mut terms = self.terms.clone();
        terms.sort_by_key(|t| t.0);
        let mut out: Vec<(i64, Complex64)> = Vec::with_capacity(terms.len());
        for (f, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == f => last.1 += c,
                _ => out.push((f, c)),
            }
        }
        out
    }

    /// Multiplicity of each distinct frequency, sorted by frequency.
    pub fn multiplicities(&self) -> Vec<(i64, u128)> {
        let mut freqs: Vec<i64> = self.frequencies().collect();
        freqs.sort_unstable();
        let mut out: Vec<(i64, u128)> = Vec::new();
        for f in freqs {
            match out.last_mut() {
                Some(last) if last.0 == f => last.1 += 1,
                _ => out.push((f, 1)),
            }
        }
        out
    }

    /// `S(y) = Σ_j a_j e^{2πi f_j y}`.
    pub fn eval(&self, y: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(f, c)| c * Complex64::from_polar(1.0, TAU * (f as f64 * y).fract()))
            .sum()
    }
}

/// Exact representation counts `m ↦ R(m)` (only nonzero entries stored).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RepresentationTable {
    entries: Vec<(i64, u128)>,
}

impl RepresentationTable {
    pub(crate) fn from_sorted(entries: Vec<(i64, u128)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Self { entries }
    }

    /// `R(m)`, zero when `m` has no representation.
    pub fn get(&self, m: i64) -> u128 {
        self.entries
            .binary_search_by_key(&m, |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// Nonzero entries in increasing order of `m`.
    pub fn entries(&self) -> &[(i64, u128)] {
        &self.entries
    }

    /// `Σ_m R(m)`.
    pub fn total(&self) -> Result<u128> {
        self.entries
            .iter()
            .try_fold(0u128, |acc, e| acc.checked_add(e.1))
            .ok_or_else(|| overflow("representation table total exceeds 128 bits"))
    }

    /// `Σ_m R(m)²`.
    pub fn sum_of_squares(&self) -> Result<u128> {
        self.entries
            .iter()
            .try_fold(0u128, |acc, &(_, r)| {
                r.checked_mul(r).and_then(|sq| acc.checked_add(sq))
            })
            .ok_or_else(|| overflow("sum of squared representation counts exceeds 128 bits"))
    }
}

/// Multiply-accumulate for convolution weights.
pub(crate) trait Weight: Copy {
    const ZERO: Self;
    fn mul_add(acc: Self, a: Self, b: Self) -> Result<Self>;
    fn add(self, other: Self) -> Result<Self>;
    fn is_zero(&self) -> bool;
}

impl Weight for u128 {
    const ZERO: Self = 0;

    fn mul_add(acc: Self, a: Self, b: Self) -> Result<Self> {
        a.checked_mul(b)
            .and_then(|p| acc.checked_add(p))
            .ok_or_else(|| overflow("representation count exceeds 128 bits"))
    }

    fn add(self, other: Self) -> Result<Self> {
        self.checked_add(other)
            .ok_or_else(|| overflow("representation count exceeds 128 bits"))
    }

    fn is_zero(&self) -> bool {
        *self == 0
    }
}

impl Weight for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);

    fn mul_add(acc: Self, a: Self, b: Self) -> Result<Self> {
        Ok(acc + a * b)
    }

    fn add(self, other: Self) -> Result<Self> {
        Ok(self + other)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

/// Exact convolution of two sparse sequences sorted by index.
///
/// The summation order is fixed by the input order, so complex results are
/// bitwise reproducible.
pub(crate) fn convolve<T: Weight>(a: &[(i64, T)], b: &[(i64, T)]) -> Result<Vec<(i64, T)>> {
    let (Some(a_first), Some(b_first)) = (a.first(), b.first()) else {
        return Ok(Vec::new());
    };
    let a_last = a.last().unwrap();
    let b_last = b.last().unwrap();
    let lo = a_first
        .0
        .checked_add(b_first.0)
        .ok_or_else(|| overflow("frequency sum exceeds 64 bits"))?;
    let hi = a_last
        .0
        .checked_add(b_last.0)
        .ok_or_else(|| overflow("frequency sum exceeds 64 bits"))?;
    let span = hi.abs_diff(lo);
    if span < DENSE_SPAN_LIMIT {
        let mut dense = vec![T::ZERO; span as usize + 1];
        for &(fa, ca) in a {
            for &(fb, cb) in b {
                let slot = &mut dense[(fa + fb - lo) as usize];
                *slot = T::mul_add(*slot, ca, cb)?;
            }
        }
        Ok(dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (lo + i as i64, c))
            .collect())
    } else {
        let mut products = Vec::with_capacity(a.len() * b.len());
        for &(fa, ca) in a {
            for &(fb, cb) in b {
                products.push((fa + fb, T::mul_add(T::ZERO, ca, cb)?));
            }
        }
        // stable sort keeps the (a, b) accumulation order within each index
        products.sort_by_key(|p| p.0);
        let mut out: Vec<(i64, T)> = Vec::new();
        for (f, c) in products {
            match out.last_mut() {
                Some(last) if last.0 == f => last.1 = last.1.add(c)?,
                _ => out.push((f, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Ok(out)
    }
}

/// `n`-fold convolution power of a sparse sequence.
pub(crate) fn convolution_power<T: Weight>(base: &[(i64, T)], n: u32) -> Result<Vec<(i64, T)>> {
    assert!(n >= 1);
    let mut acc = base.to_vec();
    for _ in 1..n {
        acc = convolve(&acc, base)?;
    }
    Ok(acc)
}

fn require_unit(spectrum: &FrequencySpectrum) -> Result<()> {
    if spectrum.is_unit() {
        Ok(())
    } else {
        Err(invalid("operation requires a unit-coefficient spectrum"))
    }
}

/// `R(m)`: ordered `n`-tuples of terms whose frequencies sum to `m`.
pub fn representation_table(spectrum: &FrequencySpectrum, n: u32) -> Result<RepresentationTable> {
    require_unit(spectrum)?;
    if n == 0 {
        return Err(invalid("tuple length n must be at least 1"));
    }
    let base = spectrum.multiplicities();
    Ok(RepresentationTable::from_sorted(convolution_power(&base, n)?))
}

/// `‖Σ_j e(f_j y)‖_{2n}^{2n} = Σ_m R(m)²`, exactly.
pub fn even_moment(spectrum: &FrequencySpectrum, n: u32) -> Result<u128> {
    representation_table(spectrum, n)?.sum_of_squares()
}

/// `‖Σ_j a_j e(f_j y)‖_{2n}^{2n}` for arbitrary complex coefficients.
pub fn even_norm_coeff(spectrum: &FrequencySpectrum, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(invalid("tuple length n must be at least 1"));
    }
    let merged = spectrum.merged();
    let power = convolution_power(&merged, n)?;
    Ok(power.iter().map(|(_, c)| c.norm_sqr()).sum())
}

/// Default rectangle-rule node count for moment order `p`:
/// `4·n·span + 7` with `n = ⌈p/2⌉`.
pub fn default_nodes(spectrum: &FrequencySpectrum, p: f64) -> u64 {
    let n = (p / 2.0).ceil().max(1.0) as u64;
    4 * n * spectrum.span().max(1) + 7
}

/// `(1/N) Σ_{i<N} |S(i/N)|^p`, the rectangle-rule value of `∫_T |S|^p`.
///
/// Phases are reduced modulo `N` in integer arithmetic, so large
/// frequencies lose no accuracy.
pub fn lp_norm_quadrature(spectrum: &FrequencySpectrum, p: f64, nodes: u64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("moment order p must be finite and >= 1, got {p}")));
    }
    if nodes == 0 {
        return Err(invalid("quadrature needs at least one node"));
    }
    let merged = spectrum.merged();
    let roots: Vec<Complex64> = (0..nodes)
        .map(|r| Complex64::from_polar(1.0, TAU * r as f64 / nodes as f64))
        .collect();
    let residues: Vec<(u128, Complex64)> = merged
        .iter()
        .map(|&(f, c)| (f.rem_euclid(nodes as i64) as u128, c))
        .collect();
    let n = nodes as u128;
    let total: f64 = (0..nodes)
        .map(|i| {
            let s: Complex64 = residues
                .iter()
                .map(|&(r, c)| c * roots[(r * i as u128 % n) as usize])
                .sum();
            s.norm().powf(p)
        })
        .sum();
    Ok(total / nodes as f64)
}

/// `max_i |S(i/N)|`, a lower estimate of the sup norm.
pub fn sup_norm_grid(spectrum: &FrequencySpectrum, nodes: u64) -> Result<f64> {
    if nodes == 0 {
        return Err(invalid("grid needs at least one node"));
    }
    let merged = spectrum.merged();
    Ok((0..nodes)
        .map(|i| {
            merged
                .iter()
                .map(|&(f, c)| {
                    let phase = (f.rem_euclid(nodes as i64) as u128 * i as u128 % nodes as u128) as f64;
                    c * Complex64::from_polar(1.0, TAU * phase / nodes as f64)
                })
                .sum::<Complex64>()
                .norm()
        })
        .fold(0.0, f64::max))
}

/// `Σ_j |a_j|`, an upper bound for the sup norm, attained at `y = 0` for
/// unit coefficients.
pub fn sup_norm_upper(spectrum: &FrequencySpectrum) -> f64 {
    spectrum.terms.iter().map(|(_, c)| c.norm()).sum()
}
