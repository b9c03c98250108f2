//! The pair coding (a, b) <-> k for the W_a index set.
//!
//! Indices k = 1, 3, 7, 9 mod 20 are in bijection with pairs of naturals
//! (a, b) via a two-step code.  First the digit spread
//!
//!   spread4(n) = the binary digits of n read as base-4 digits
//!
//! (so spread4(11) = spread4(0b1011) = 4^3 + 4 + 1 = 69), then
//!
//!   e = 1 + 2 spread4(a) + 4 spread4(b),   e = 16 m + s,  s odd in 1..16,
//!   k = 40 m + phi(s)
//!
//! with the residue table phi: 1,3,5,7,9,11,13,15 -> 1,3,7,21,9,27,23,29.
//! Note (e - 1)/2 is exactly the bit interleave of a (even slots) and b (odd
//! slots), which is what the inverse decodes.
//!
//! The coding is compatible with the X = T_3 action: X((a,b)*) has leading
//! term (a-1,b)* in the precedence order, which compares by a+b first and b
//! second.  `PairCode`'s `Ord` implements that precedence.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Binary digits of n, read in base 4.  Equivalently: interleave the bits of
/// n with zero bits.  n must fit in 32 bits so the result fits in 64.
pub fn spread4(n: u32) -> u64 {
    let mut out = 0u64;
    let mut bit = 0;
    let mut m = n as u64;
    while m > 0 {
        out |= (m & 1) << (2 * bit);
        m >>= 1;
        bit += 1;
    }
    out
}

/// Inverse of `spread4` when every base-4 digit of v is 0 or 1.
fn unspread4(mut v: u64) -> u32 {
    let mut out = 0u32;
    let mut bit = 0;
    while v > 0 {
        out |= ((v & 1) as u32) << bit;
        v >>= 2;
        bit += 1;
    }
    out
}

/// s odd -> k mod 40 for the coded residues.
const PHI: [u64; 8] = [1, 3, 7, 21, 9, 27, 23, 29];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairCode {
    pub a: u32,
    pub b: u32,
}

impl PairCode {
    pub fn new(a: u32, b: u32) -> Self {
        assert!(a < 1 << 16 && b < 1 << 16, "pair entries must fit 16 bits");
        PairCode { a, b }
    }

    /// Total degree a + b — the leading key of the precedence order.
    pub fn degree(&self) -> u32 {
        self.a + self.b
    }
}

/// Precedence: (c, d) earlier than (a, b) iff c+d < a+b, ties broken by the
/// second entry.
impl Ord for PairCode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.degree(), self.b).cmp(&(other.degree(), other.b))
    }
}

impl PartialOrd for PairCode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PairCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// The W_a index coded by (a, b).
pub fn pair_to_k(pc: PairCode) -> u64 {
    assert!(pc.a < 1 << 16 && pc.b < 1 << 16);
    let e = 1 + 2 * spread4(pc.a) + 4 * spread4(pc.b);
    let m = e / 16;
    let s = e % 16;
    debug_assert!(s % 2 == 1);
    40 * m + PHI[(s / 2) as usize]
}

/// The pair coded by k; errors unless k = 1, 3, 7, 9 mod 20.
pub fn k_to_pair(k: u64) -> Result<PairCode> {
    if !matches!(k % 20, 1 | 3 | 7 | 9) {
        return Err(Error::NotCoded { k });
    }
    let m = k / 40;
    let res = k % 40;
    let s_half = PHI
        .iter()
        .position(|&r| r == res)
        .expect("k = 1,3,7,9 mod 20 always hits the residue table");
    let e = 16 * m + (2 * s_half as u64 + 1);
    let h = (e - 1) / 2; // interleaved bits of a and b
    let a = unspread4(h);
    let b = unspread4(h >> 1);
    Ok(PairCode::new(a, b))
}

/// Strict precedence test between coded pairs.
pub fn precedes(earlier: PairCode, later: PairCode) -> bool {
    earlier < later
}
