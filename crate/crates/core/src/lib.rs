//! Exact mod-2 arithmetic for the space W of level-5 modular forms.
//!
//! The objects: theta-like generating series F, G, H, r, D, Cbar over GF(2),
//! the basis family D_k (k >= 1, gcd(k, 10) = 1) spanning W = W_a + W_b,
//! formal Hecke operators T_p acting on them, a pair coding (a, b) <-> k for
//! the W_a basis, the ideal-class side of the story in Z[sqrt(-10)] (Gauss
//! classes, theta series, dihedral kernels), and the structure layer that
//! assembles the completed shallow Hecke algebra Z/2[[X, Y]][eps] acting on W
//! — adapted bases, nilpotent operator matrices, expressions of every T_p in
//! X = T_3 and Y = T_7, and the series lambda with T_11 = lambda + eps.
//!
//! Everything is computed over GF(2) at explicit finite precision with
//! pessimistic window tracking, so any coefficient or basis index the crate
//! reports is exact; there are no floating-point values anywhere.

pub mod error;

pub(crate) mod bits;
pub(crate) mod gf2mat;

pub mod code;
pub mod forms;
pub mod hecke;
pub mod quadideals;
pub mod series;
pub mod structure;
pub mod verify;
pub mod xypoly;

pub use error::{Error, Result};
pub use forms::{Combination, Family, GenName};
pub use series::BitSeries;
