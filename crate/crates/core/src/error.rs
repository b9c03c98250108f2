//! Crate-wide error type.
//!
//! Everything here is exact arithmetic over GF(2), so there are no tolerance
//! failures; errors are either domain violations (asking for a coefficient
//! outside a series window, a basis index not coprime to 10, a prime we refuse
//! to touch), precision shortfalls that the caller may retry at a larger
//! window, or internal consistency violations.  The latter are the serious
//! ones: they fire when a computation contradicts a structural fact the whole
//! engine is built on (e.g. a Hecke image failing to lie below its source
//! index), and they are never caught internally.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Coefficient of x^n requested from a series whose window ends at `prec`.
    #[error("coefficient {n} is outside the precision window (prec = {prec})")]
    OutOfWindow { n: usize, prec: usize },

    /// An operation would produce a series with an empty window.
    #[error("operation would produce an empty precision window")]
    EmptyWindow,

    /// Division attempted by a series with no nonzero coefficient in window.
    #[error("divisor vanishes identically on its window (prec = {prec})")]
    DivisorVanishes { prec: usize },

    /// Division f/g with val(g) > val(f): the quotient is not a power series.
    #[error("valuation mismatch in division: val(f) = {val_f}, val(g) = {val_g}")]
    Valuation { val_f: usize, val_g: usize },

    /// Inexact division detected at a specific exponent.  Unreachable for
    /// series over a field once the valuation test passes; kept so the
    /// division contract is explicit.
    #[error("inexact division: first failing exponent {exponent}")]
    NotDivisible { exponent: usize },

    /// A basis index k must satisfy k >= 1 and gcd(k, 10) = 1 (D-family),
    /// or k odd (J-family).
    #[error("invalid basis index {k}: {why}")]
    BadIndex { k: u64, why: &'static str },

    /// Greedy reduction hit a leading exponent not coprime to 10, so the
    /// input is not in the span of the D_k.
    #[error("series is not in W: reduction stuck at exponent {exponent}")]
    NotInW { exponent: usize },

    /// Reduction found an index suspiciously close to the window edge; the
    /// decomposition cannot be trusted at this precision.
    #[error("window too small to certify decomposition: found index {index} at prec {prec}")]
    InsufficientPrecision { index: usize, prec: usize },

    /// Hecke operators are defined here for primes p with p != 2, 5.
    #[error("invalid Hecke prime {p}")]
    BadPrime { p: u64 },

    /// Operation requires a prime with the stated character value.
    #[error("prime {p} has chi = {found}, operation needs chi = {needed}")]
    WrongCharacter { p: u64, needed: i8, found: i8 },

    /// k is not the code of any pair: codes are exactly k = 1, 3, 7, 9 mod 20.
    #[error("{k} is not a coded index (needs k = 1, 3, 7, 9 mod 20)")]
    NotCoded { k: u64 },

    /// A principal ideal generator outside the ideal class machinery's
    /// domain: Gauss classes only contain ideals of norm prime to 10.
    #[error("ideal generator {b} + {c}*sqrt(-10) is not of type a")]
    NotTypeA { b: i64, c: i64 },

    /// Class index out of range for the current discriminant parameter.
    #[error("class index {i} out of range for q = {q}")]
    BadClassIndex { i: u32, q: u32 },

    /// Text deserialization failure.
    #[error("parse error: {0}")]
    Parse(String),

    /// A structural fact the engine relies on failed to hold.  This is a
    /// falsification event, not a recoverable error.
    #[error("internal consistency violation: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Shorthand used at the sites where a structural theorem is checked.
    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::Inconsistent(msg.into())
    }
}
