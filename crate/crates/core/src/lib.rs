//! Classical, quantum and non-signalling values of nonlocal computation
//! tasks and XOR games.
//!
//! * [`bitcore`]: bit strings, Boolean functions, priors and their spectrum.
//! * [`nlvalue`]: closed-form optimum, brute force and multi-party strategies.
//! * [`xorgame`]: game matrices, the no-advantage certificate, see-saw and
//!   Bell export.
//! * [`boxes`]: correlation boxes, box protocols and Monte Carlo.
//! * [`lpsolve`]: dense simplex, worst-case values and non-signalling values.
//!
//! ```
//! use nonlocal::bitcore::{BooleanFunction, PriorDistribution};
//! use nonlocal::nlvalue::{classical_optimum, quantum_bound};
//!
//! let p = PriorDistribution::uniform(2)?;
//! let report = classical_optimum(&BooleanFunction::and(), &p)?;
//! assert_eq!(report.value, 0.75);
//! assert_eq!(quantum_bound(&BooleanFunction::and(), &p)?, report.value);
//! # Ok::<(), nonlocal::Error>(())
//! ```

pub mod bitcore;
pub mod boxes;
pub mod error;
pub mod lpsolve;
pub mod nlvalue;
pub mod rng;
pub mod xorgame;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/values.md")]
    mod values {}
    #[doc = include_str!("../../../book/src/xor_games.md")]
    mod xor_games {}
    #[doc = include_str!("../../../book/src/bell.md")]
    mod bell {}
    #[doc = include_str!("../../../book/src/boxes.md")]
    mod boxes {}
    #[doc = include_str!("../../../book/src/minimax.md")]
    mod minimax {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
