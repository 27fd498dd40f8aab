//! Exact admissibility checks and numerical sharpness probes for weighted
//! convolution and multiplication estimates on Lebesgue, Fourier–Lebesgue
//! and modulation spaces.
//!
//! * [`exponent`] decides admissibility of exponent/weight tuples exactly.
//! * [`grid`] discretizes functions on centered boxes and computes the
//!   relevant norms and transforms.
//! * [`kernel`] implements the weight kernel, its region decomposition and
//!   the bilinear maps built from it.
//! * [`probes`] runs the test-function families that witness necessity and
//!   boundedness numerically.

pub mod error;
pub mod exponent;
pub mod grid;
pub mod kernel;
pub mod probes;
pub mod stats;

pub use error::{Error, Result};
pub use exponent::{Exponent, ParamTuple, Rational, Weight};
