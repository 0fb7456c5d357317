//! Exact arithmetic kernel.
//!
//! Everything above this module works with exact values only: rationals are
//! [`num_rational::BigRational`], polynomials over ℚ are dense coefficient
//! vectors, and polynomials over prime fields carry their modulus with them.
//! There is no floating point anywhere on a decision path.

mod fp;
mod int;
mod parse;
mod poly;
mod quotient;
mod resultant;
mod sturm;

pub use fp::{factor_mod_p, FpPoly, Lcg};
pub use int::{factor_integer, is_prime, primes_up_to, IntegerFactorization};
pub use parse::parse_poly;
pub use poly::{poly_gcd, Poly};
pub use quotient::{evaluate_in_quotient, FpQuotientElem};
pub use resultant::{discriminant, resultant};
pub use sturm::{eval_interval, sturm_real_root_count, sturm_sequence, RealRoot, RootIsolation};

use thiserror::Error;

/// Exact rational number. The canonical-form invariants (reduced, positive
/// denominator) are maintained by `num-rational`.
pub type Rat = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("polynomial has degree zero or is zero")]
    ConstantPolynomial,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("a coefficient denominator is divisible by {0}")]
    DenominatorDivisible(u64),
    #[error("cannot reduce modulo {p}: {reason}")]
    BadModulus { p: u64, reason: &'static str },
    #[error("could not parse polynomial at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}
