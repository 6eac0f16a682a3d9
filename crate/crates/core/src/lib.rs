//! Function-space toolkit on the unit square.
//!
//! Everything is built on dyadic step functions ([`stepfun::DyadicStep2D`]),
//! for which decreasing rearrangements, anisotropic Lorentz and grand Lorentz
//! norms, Walsh/trigonometric Fourier coefficients and the four-piece
//! K-functional decomposition all reduce to finite closed-form sums.
//!
//! The [`verify`] module turns the inequality chains relating these quantities
//! into deterministic, reportable checks over generated corpora.

pub mod error;
pub mod fourier;
pub mod interpolation;
pub mod norms;
pub mod rearrange;
pub mod stepfun;
pub mod verify;

pub use error::{Error, Result};
pub use fourier::{CoeffMatrix, OrthonormalSystem, SystemKind};
pub use norms::{ApproxDirection, Exponents, GrandParams, GrandValue, SeqSign};
pub use rearrange::{RearrangeOrder, Sequence2D};
pub use stepfun::{DyadicStep1D, DyadicStep2D};
