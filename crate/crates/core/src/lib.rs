//! Moments of exponential sums with random frequencies, and the exact
//! lattice-point counts behind them.
//!
//! - [`processes`]: seeded samplers for i.i.d., Poisson and random-walk paths.
//! - [`expsum`]: exact even moments by convolution, `L^p` norms by quadrature.
//! - [`moments`]: Monte Carlo and exact expectations over random paths.
//! - [`lattice`]: shell counts, divisor sums, Waring counts, digit sets.
//! - [`bounds`]: executable probability inequalities with grid sweeps.
//! - [`majorant`]: majorant ratios and genericity experiments.
//!
//! Every random quantity is a function of a [`SeedSpec`]; results do not
//! depend on the number of threads.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x >= a)` also rejects NaN

pub mod bounds;
pub mod error;
pub mod expsum;
pub mod lattice;
pub mod majorant;
pub mod moments;
pub mod processes;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use rng::SeedSpec;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/processes.md")]
    mod processes {}
    #[doc = include_str!("../../../book/src/exponential-sums.md")]
    mod exponential_sums {}
    #[doc = include_str!("../../../book/src/moments.md")]
    mod moments {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/majorant.md")]
    mod majorant {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
