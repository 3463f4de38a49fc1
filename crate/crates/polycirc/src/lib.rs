//! Differentiable polynomial circuits over commutative semirings.
//!
//! This crate implements a small typed circuit language whose generators are
//! semiring addition, multiplication, constants, copying, deletion, wire
//! crossings, and (optionally) an equality comparator and additive inverse.
//! Circuits denote tuples of polynomials; on top of that denotation the crate
//! provides:
//!
//! * [`semiring`] — the coefficient semirings (`zmod:n`, `zp:p`, `sat:n`,
//!   `nat`, `bool`) with exhaustive law checking;
//! * [`circuit`] — the IR plus canonical wiring combinators;
//! * [`dsl`] / [`json`] — a textual surface syntax and a JSON interchange
//!   format, both round-tripping structurally;
//! * [`eval`] — pointwise evaluation, function tables, extensional equality;
//! * [`polynormal`] — polynomial normal forms, formal partial derivatives,
//!   and the Jacobian-transpose evaluation they induce;
//! * [`rdiff`] — the reverse-derivative circuit transformation and the
//!   forward derivative derived from applying it twice;
//! * [`synth`] — synthesis of circuits from function tables (functional
//!   completeness over finite carriers) and a polynomial comparator for
//!   prime fields;
//! * [`verify`] — executable checks for the derivative axioms, the
//!   presentation equations, and candidate generator extensions;
//! * [`learn`] — gradient-style training by reverse-derivative ascent;
//! * [`random`] — seeded samplers for circuits and inputs, used by the
//!   verification and test suites.
//!
//! ```
//! use polycirc::prelude::*;
//!
//! let desc = Semiring::parse("zmod:2")?;
//! // x^2 + x as a circuit: copy x, multiply, then add another copy of x.
//! let named = polycirc::dsl::parse(&desc, "let f = copy ; (copy ; mul) * id ; add")?;
//! let (_, f) = &named[0];
//! assert_eq!(polycirc::eval::eval(&desc, f, &[1])?, vec![0]);
//! # Ok::<(), polycirc::Error>(())
//! ```

pub mod circuit;
pub mod dsl;
pub mod error;
pub mod eval;
mod interp;
pub mod json;
pub mod learn;
pub mod polynormal;
pub mod random;
pub mod rdiff;
pub mod semiring;
pub mod synth;
pub mod verify;
mod vm;

pub use circuit::{Circuit, Generator, Shape};
pub use error::{Error, Result};
pub use semiring::Semiring;

/// The handful of names almost every consumer wants.
pub mod prelude {
    pub use crate::circuit::{Circuit, Generator, Shape};
    pub use crate::error::{Error, Result};
    pub use crate::semiring::Semiring;
}
