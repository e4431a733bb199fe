//! Binary-input channels through their Blackwell measures.
//!
//! The crate represents a binary-input channel by the law of the posterior
//! `S = P(X = 0 | Y)` under a uniform input, or, for symmetric channels, by
//! its decomposition into binary symmetric subchannels. On top of these it
//! provides:
//!
//! * [`polar`]: the one-step polar transforms and successive polarization,
//!   exact on measures and on BSC mixtures;
//! * [`quantize`]: dyadic quantization with a provable capacity-loss bound
//!   and full quantized code construction;
//! * [`functional`]: capacity, information-density moments, Hellinger and
//!   Bhattacharyya affinities, the Gallager `exp(-E0)` form, Bayes gain and
//!   ML agreement;
//! * [`np_region`]: Neyman-Pearson regions and Blackwell dominance;
//! * [`analysis`]: f-relation scans, the `M_2` gap function, seeded
//!   polarization processes and inequality checks.
//!
//! ```
//! use blackwell_polar::{channel::make_bsc, functional::{eval_mixture, Functional}, polar::*};
//!
//! let w = make_bsc(0.05).unwrap();
//! let bad = polar_minus_mixture(&w, &w);
//! let good = polar_plus_mixture(&w, &w);
//! let i = |c| eval_mixture(c, &Functional::Capacity);
//! assert!((i(&bad) + i(&good) - 2.0 * i(&w)).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod error;
pub mod functional;
mod grid;
pub mod math;
pub mod np_region;
pub mod polar;
pub mod quantize;

pub use error::{Error, Result};
