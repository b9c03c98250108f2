//! Formal Hecke operators on mod-2 series.
//!
//! For an odd prime p other than 5, acting on f = sum c_n x^n:
//!
//!   T_p f = sum c_{pn} x^n + sum c_n x^(pn),
//!
//! i.e. coefficient n of T_p f is c_{pn} + c_{n/p} (second term only when
//! p | n).  A window [0, N) on f supports a window [0, ceil(N/p)) on T_p f.
//!
//! The quadratic character chi with conductor 20 grades everything:
//! chi(n) = +1 for n = 1, 3, 7, 9 mod 20, -1 for n = 11, 13, 17, 19 mod 20,
//! 0 otherwise.  W splits accordingly (W_a where exponents have chi = +1 plus
//! multiples of 5, W_b likewise for chi = -1), and T_p preserves the pieces
//! when chi(p) = +1 and swaps them when chi(p) = -1.
//!
//! `tp_on_dk` is the workhorse: T_p applied to a basis element D_k, returned
//! as an exact index combination.  Results are memoized by (p, k) — they are
//! window-independent facts — and every computed column is checked against
//! the descent property (all output indices strictly below k) before being
//! cached; a violation would falsify the structure theory this crate
//! reproduces and is reported as an internal inconsistency.

use crate::error::{Error, Result};
use crate::forms::{self, Combination};
use crate::series::BitSeries;
use std::collections::HashMap;
use std::sync::{LazyLock, Mutex};

/// The mod-20 character: +1 on 1,3,7,9; -1 on 11,13,17,19; 0 otherwise.
pub fn chi(n: u64) -> i8 {
    match n % 20 {
        1 | 3 | 7 | 9 => 1,
        11 | 13 | 17 | 19 => -1,
        _ => 0,
    }
}

/// Deterministic Miller-Rabin, valid for all u64.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Legendre symbol (a/p) for odd prime p, in {-1, 0, +1}.
pub(crate) fn legendre(a: i64, p: u64) -> i8 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    match pow_mod(a, (p - 1) / 2, p) {
        1 => 1,
        r if r == p - 1 => -1,
        _ => unreachable!("Euler criterion on a prime modulus"),
    }
}

/// A prime admissible for the Hecke action here: p odd, p != 5, with its
/// character value and its splitting behaviour in Z[sqrt(-10)].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HeckePrime {
    p: u64,
    chi: i8,
    splits: bool,
}

impl HeckePrime {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 || p == 5 || !is_prime(p) {
            return Err(Error::BadPrime { p });
        }
        Ok(HeckePrime {
            p,
            chi: chi(p),
            splits: legendre(-10, p) == 1,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn chi(&self) -> i8 {
        self.chi
    }

    /// True when -10 is a square mod p, i.e. p splits in Z[sqrt(-10)].
    pub fn splits(&self) -> bool {
        self.splits
    }
}

/// T_p f on the window [0, ceil(prec / p)).
pub fn apply_tp(f: &BitSeries, p: &HeckePrime) -> BitSeries {
    let p = p.p() as usize;
    let out_prec = f.prec().div_ceil(p);
    let mut exps = Vec::new();
    for n in 0..out_prec {
        // p(out_prec - 1) <= prec - 1, so both lookups stay in window.
        let mut bit = f.coeff(p * n).expect("pn < prec by window arithmetic");
        if n % p == 0 {
            bit ^= f.coeff(n / p).expect("n/p < out_prec <= prec");
        }
        if bit {
            exps.push(n);
        }
    }
    BitSeries::from_exponents(exps, out_prec).expect("exponents < out_prec")
}

/// Exponent filters cutting W into its graded pieces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// Drop exponents divisible by 5.
    Pr,
    /// Keep exponents with chi = +1.
    Pa,
    /// Keep exponents with chi = -1.
    Pb,
}

/// Coefficientwise projection; the window is unchanged.
pub fn project(f: &BitSeries, which: Projection) -> BitSeries {
    let keep = |n: usize| match which {
        Projection::Pr => n % 5 != 0,
        Projection::Pa => chi(n as u64) == 1,
        Projection::Pb => chi(n as u64) == -1,
    };
    let exps: Vec<usize> = f.iter_exponents().filter(|&n| keep(n)).collect();
    BitSeries::from_exponents(exps, f.prec()).expect("filtered exponents stay in window")
}

static TP_MEMO: LazyLock<Mutex<HashMap<(u64, u64), Combination>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// How many doublings of the working window to attempt before giving up.
const MAX_RETRIES: u32 = 4;

/// T_p(D_k) as an exact combination of D_i, memoized by (p, k).
///
/// The working window starts at 8pk so the output window comfortably exceeds
/// twice any index that can appear (descent bounds them by k); if the
/// decomposition still reports a tight window the computation retries doubled.
pub fn tp_on_dk(p: u64, k: u64) -> Result<Combination> {
    let prime = HeckePrime::new(p)?;
    if let Some(c) = TP_MEMO.lock().unwrap().get(&(p, k)) {
        return Ok(c.clone());
    }
    let mut prec = (8 * p as usize * k as usize).max(1024);
    let mut attempt = 0;
    let combo = loop {
        let f = forms::gen_dk(k, prec)?;
        match forms::decompose_w(&apply_tp(&f, &prime)) {
            Ok(c) => break c,
            Err(Error::InsufficientPrecision { .. }) if attempt < MAX_RETRIES => {
                attempt += 1;
                prec *= 2;
            }
            Err(e) => return Err(e),
        }
    };
    if let Some(max) = combo.max_index() {
        if max >= k {
            return Err(Error::inconsistent(format!(
                "T_{p}(D_{k}) produced index {max} >= {k}, violating descent"
            )));
        }
    }
    TP_MEMO
        .lock()
        .unwrap()
        .insert((p, k), combo.clone());
    Ok(combo)
}

/// T_p applied to a combination of basis elements, column by column.
///
/// Linearity over GF(2) makes this a symmetric difference of memoized
/// `tp_on_dk` columns, so no series window ever has to cover the whole
/// combination at once.
pub fn tp_on_combination(p: u64, f: &Combination) -> Result<Combination> {
    let mut acc = Combination::empty(f.family());
    for k in f.indices() {
        acc ^= &tp_on_dk(p, k)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{gen, GenName};

    #[test]
    fn chi_has_period_twenty() {
        assert_eq!(chi(1), 1);
        assert_eq!(chi(3), 1);
        assert_eq!(chi(7), 1);
        assert_eq!(chi(9), 1);
        assert_eq!(chi(11), -1);
        assert_eq!(chi(13), -1);
        assert_eq!(chi(17), -1);
        assert_eq!(chi(19), -1);
        assert_eq!(chi(5), 0);
        assert_eq!(chi(2), 0);
        for n in 0..200 {
            assert_eq!(chi(n), chi(n + 20));
        }
    }

    #[test]
    fn hecke_prime_constructor_validates() {
        assert!(HeckePrime::new(2).is_err());
        assert!(HeckePrime::new(5).is_err());
        assert!(HeckePrime::new(9).is_err());
        assert!(HeckePrime::new(1).is_err());
        let p3 = HeckePrime::new(3).unwrap();
        assert_eq!(p3.chi(), 1);
        assert!(!p3.splits()); // -10 = 2 mod 3 is not a square
        let p7 = HeckePrime::new(7).unwrap();
        assert_eq!(p7.chi(), 1);
        assert!(p7.splits()); // -10 = 4 mod 7
        let p11 = HeckePrime::new(11).unwrap();
        assert_eq!(p11.chi(), -1);
        let p23 = HeckePrime::new(23).unwrap();
        assert_eq!(p23.chi(), 1);
        assert!(p23.splits()); // 6^2 = 13 = -10 mod 23
        let p29 = HeckePrime::new(29).unwrap();
        assert_eq!(p29.chi(), 1);
        assert!(!p29.splits());
    }

    #[test]
    fn apply_tp_matches_direct_definition() {
        // f = x + x^3 + x^6 + x^9 + x^14, T_3: c_{3n} + c_{n/3}.
        let f = BitSeries::from_exponents([1, 3, 6, 9, 14], 15).unwrap();
        let p3 = HeckePrime::new(3).unwrap();
        let t = apply_tp(&f, &p3);
        assert_eq!(t.prec(), 5);
        // n=1: c_3=1; n=2: c_6=1; n=3: c_9 + c_1 = 0; n=4: c_12=0.
        assert_eq!(t.exponents(), vec![1, 2]);
    }

    #[test]
    fn t3_annihilates_f() {
        // T_3 F = 0: 3 is inert for the level-1 theta side.
        let f = gen(GenName::F, 10_000);
        let t = apply_tp(&f, &HeckePrime::new(3).unwrap());
        assert!(t.is_zero());
        assert_eq!(t.prec(), 3334);
    }

    #[test]
    fn projections_partition_w_exponents() {
        let d7 = forms::gen_dk(7, 2048).unwrap();
        let pa = project(&d7, Projection::Pa);
        let pb = project(&d7, Projection::Pb);
        let pr = project(&d7, Projection::Pr);
        assert!(pa.add(&pb).eq_window(&pr));
        // D_7 sits entirely in the chi = +1 part.
        assert!(pb.is_zero());
        assert!(pa.eq_window(&d7));
    }

    #[test]
    fn tp_on_dk_small_columns() {
        assert_eq!(tp_on_dk(3, 1).unwrap(), Combination::d([]));
        assert_eq!(tp_on_dk(3, 3).unwrap(), Combination::d([1]));
        assert_eq!(tp_on_dk(3, 49).unwrap(), Combination::d([43, 27]));
        assert_eq!(tp_on_dk(7, 7).unwrap(), Combination::d([1]));
        assert_eq!(tp_on_dk(11, 93).unwrap(), Combination::d([87, 47]));
    }

    #[test]
    fn tp_on_dk_memo_is_stable() {
        let first = tp_on_dk(7, 111).unwrap();
        let second = tp_on_dk(7, 111).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn tp_on_combination_is_columnwise() {
        // T_3(D_1 + D_3 + D_49) = 0 + D_1 + (D_43 + D_27).
        let f = Combination::d([1, 3, 49]);
        let t = tp_on_combination(3, &f).unwrap();
        assert_eq!(t, Combination::d([1, 43, 27]));
        assert!(tp_on_combination(3, &Combination::d([])).unwrap().is_empty());
    }

    #[test]
    fn character_grading_of_columns() {
        // Indices of T_p(D_k) are = pk or 9pk mod 40.
        for (p, k) in [(3u64, 63u64), (7, 93), (11, 119), (13, 47), (19, 91)] {
            let c = tp_on_dk(p, k).unwrap();
            let x = p * k % 40;
            let y = 9 * p * k % 40;
            for i in c.indices() {
                assert!(
                    i % 40 == x || i % 40 == y,
                    "T_{p}(D_{k}) index {i} outside classes {x}, {y} mod 40"
                );
            }
        }
    }
}
