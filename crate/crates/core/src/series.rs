//! Truncated power series over GF(2).
//!
//! A `BitSeries` is a window [0, prec) of coefficients of a formal power
//! series sum c_n x^n with c_n in {0,1}, packed 64 per word.  Every operation
//! tracks the window pessimistically, so a coefficient inside the window of a
//! result is always the true coefficient of the corresponding infinite-series
//! computation:
//!
//!   add              prec = min(prec_f, prec_g)
//!   mul              prec = min(prec_f + val g, prec_g + val f)
//!   square           prec = 2 * prec_f          (Frobenius: no cross terms)
//!   substitute x^k   prec = k * prec_f
//!   divide_exact     prec = prec_f - val g
//!
//! where `val` is the first set bit, read as the window length when the
//! series vanishes on its window (a sound lower bound for the true
//! valuation).  Values are immutable: operations return fresh series.
//!
//! Multiplication is carry-less comb multiplication: shift the denser operand
//! by each set bit of the sparser one and xor.  Quadratic in the window, but
//! with word-level inner loops this covers every window used here (up to a
//! few times 10^5) in milliseconds; the generating series in this crate are
//! lacunary, which helps further.

use crate::bits::BitVec;
use crate::error::{Error, Result};
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSeries {
    coeffs: BitVec,
}

impl BitSeries {
    /// The zero series on a window of length `prec` (> 0).
    pub fn zero(prec: usize) -> Self {
        assert!(prec > 0, "series window must be nonempty");
        BitSeries {
            coeffs: BitVec::zeros(prec),
        }
    }

    pub fn one(prec: usize) -> Self {
        let mut s = BitSeries::zero(prec);
        s.coeffs.set(0, true);
        s
    }

    pub fn monomial(n: usize, prec: usize) -> Result<Self> {
        let mut s = BitSeries::zero(prec);
        if n >= prec {
            return Err(Error::OutOfWindow { n, prec });
        }
        s.coeffs.set(n, true);
        Ok(s)
    }

    /// GF(2) sum of monomials; repeated exponents cancel in pairs.
    pub fn from_exponents<I: IntoIterator<Item = usize>>(exps: I, prec: usize) -> Result<Self> {
        let mut s = BitSeries::zero(prec);
        for n in exps {
            if n >= prec {
                return Err(Error::OutOfWindow { n, prec });
            }
            s.coeffs.toggle(n);
        }
        Ok(s)
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of x^n, which must lie inside the window.
    pub fn coeff(&self, n: usize) -> Result<bool> {
        if n >= self.prec() {
            return Err(Error::OutOfWindow {
                n,
                prec: self.prec(),
            });
        }
        Ok(self.coeffs.get(n))
    }

    /// True iff every coefficient in the window is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    /// Exponent of the first nonzero coefficient, None when zero on window.
    pub fn val(&self) -> Option<usize> {
        self.coeffs.first_set()
    }

    /// `val` as a window-sound lower bound on the true valuation.
    fn val_or_prec(&self) -> usize {
        self.val().unwrap_or_else(|| self.prec())
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.count_ones()
    }

    pub fn exponents(&self) -> Vec<usize> {
        self.coeffs.iter_ones().collect()
    }

    pub fn iter_exponents(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.iter_ones()
    }

    /// Shrink the window.  new_prec must be in 1..=prec.
    pub fn truncated(&self, new_prec: usize) -> Self {
        assert!(
            new_prec >= 1 && new_prec <= self.prec(),
            "truncated: bad window {new_prec} for prec {}",
            self.prec()
        );
        BitSeries {
            coeffs: self.coeffs.truncated(new_prec),
        }
    }

    pub fn add(&self, other: &BitSeries) -> BitSeries {
        let prec = self.prec().min(other.prec());
        let mut out = self.truncated(prec);
        out.coeffs.xor_assign(&other.coeffs.truncated(prec));
        out
    }

    pub fn mul(&self, other: &BitSeries) -> BitSeries {
        let prec = (self.prec() + other.val_or_prec()).min(other.prec() + self.val_or_prec());
        let (outer, inner) = if self.term_count() <= other.term_count() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = BitVec::zeros(prec);
        for i in outer.coeffs.iter_ones() {
            acc.xor_shifted_assign(&inner.coeffs, i);
        }
        BitSeries { coeffs: acc }
    }

    /// f^2 over GF(2) is f with exponents doubled, exact out to 2*prec.
    pub fn square(&self) -> BitSeries {
        BitSeries {
            coeffs: self.coeffs.spread(2, 2 * self.prec()),
        }
    }

    /// f(x) -> f(x^k), exact out to k*prec.  k >= 1.
    pub fn substitute_power(&self, k: usize) -> BitSeries {
        assert!(k >= 1, "substitute_power needs k >= 1");
        BitSeries {
            coeffs: self.coeffs.spread(k, k * self.prec()),
        }
    }

    /// f^e by square-and-multiply; e = 0 gives 1 on the same window.
    pub fn pow(&self, e: u32) -> BitSeries {
        if e == 0 {
            return BitSeries::one(self.prec());
        }
        let mut acc = self.clone();
        for i in (0..31 - e.leading_zeros()).rev() {
            acc = acc.square();
            if (e >> i) & 1 == 1 {
                acc = acc.mul(self);
            }
        }
        acc
    }

    /// Exact quotient f/g in GF(2)[[x]].
    ///
    /// Over a field the only obstruction is the valuation: once
    /// val(g) <= val(f) the quotient exists and back-substitution never
    /// meets an inexact step, so `Error::NotDivisible` cannot actually fire
    /// here; it documents the general division contract.
    pub fn divide_exact(&self, g: &BitSeries) -> Result<BitSeries> {
        let v = g.val().ok_or(Error::DivisorVanishes { prec: g.prec() })?;
        if let Some(vf) = self.val() {
            if vf < v {
                return Err(Error::Valuation { val_f: vf, val_g: v });
            }
        }
        if self.prec() <= v {
            return Err(Error::EmptyWindow);
        }
        let prec = self.prec() - v;
        // Shift both down by v; the divisor becomes a unit u with u_0 = 1.
        let mut unit = BitVec::zeros(g.prec() - v);
        unit.xor_shifted_assign(&shifted_down(&g.coeffs, v), 0);
        let mut rem = shifted_down(&self.coeffs, v).truncated(prec);
        let mut quot = BitVec::zeros(prec);
        while let Some(n) = rem.first_set() {
            quot.set(n, true);
            rem.xor_shifted_assign(&unit, n);
        }
        Ok(BitSeries { coeffs: quot })
    }

    /// f * (1 + x^n), window preserved (the factor is globally exact).
    pub(crate) fn mul_one_plus_power(&self, n: usize) -> BitSeries {
        let mut out = self.clone();
        let src = self.coeffs.clone();
        out.coeffs.xor_shifted_assign(&src, n);
        out
    }

    /// Equality of the two series on their shared window.
    pub fn eq_window(&self, other: &BitSeries) -> bool {
        self.first_difference(other).is_none()
    }

    /// First exponent (inside the shared window) where the series differ.
    pub fn first_difference(&self, other: &BitSeries) -> Option<usize> {
        let w = self.prec().min(other.prec());
        let mut d = self.coeffs.truncated(w);
        d.xor_assign(&other.coeffs.truncated(w));
        d.first_set()
    }
}

/// Bits of v from position `shift` upward, as a fresh vector.
fn shifted_down(v: &BitVec, shift: usize) -> BitVec {
    let mut out = BitVec::zeros(v.len() - shift);
    for n in v.iter_ones() {
        if n >= shift {
            out.set(n - shift, true);
        }
    }
    out
}

impl fmt::Display for BitSeries {
    /// Text form `prec=N; exps=e1,e2,...` (exponents ascending).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prec={}; exps=", self.prec())?;
        for (i, n) in self.iter_exponents().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exps = self.exponents();
        write!(f, "BitSeries(prec={}, {} terms", self.prec(), exps.len())?;
        if exps.len() <= 12 {
            write!(f, ", exps={exps:?}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for BitSeries {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let rest = compact
            .strip_prefix("prec=")
            .ok_or_else(|| Error::Parse(format!("expected 'prec=', got {s:?}")))?;
        let (prec_str, exp_part) = rest
            .split_once(';')
            .ok_or_else(|| Error::Parse("missing ';' after prec".into()))?;
        let prec: usize = prec_str
            .parse()
            .map_err(|e| Error::Parse(format!("bad prec: {e}")))?;
        if prec == 0 {
            return Err(Error::Parse("prec must be positive".into()));
        }
        let exp_list = exp_part
            .strip_prefix("exps=")
            .ok_or_else(|| Error::Parse("expected 'exps='".into()))?;
        let mut exps = Vec::new();
        if !exp_list.is_empty() {
            for tok in exp_list.split(',') {
                exps.push(
                    tok.parse::<usize>()
                        .map_err(|e| Error::Parse(format!("bad exponent {tok:?}: {e}")))?,
                );
            }
        }
        BitSeries::from_exponents(exps, prec)
    }
}

impl Serialize for BitSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BitSeries", 2)?;
        st.serialize_field("prec", &self.prec())?;
        st.serialize_field("exps", &self.exponents())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for BitSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            prec: usize,
            exps: Vec<usize>,
        }
        let raw = Raw::deserialize(d)?;
        if raw.prec == 0 {
            return Err(D::Error::custom("prec must be positive"));
        }
        BitSeries::from_exponents(raw.exps, raw.prec).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_window_is_enforced() {
        let f = BitSeries::monomial(3, 8).unwrap();
        assert_eq!(f.coeff(3), Ok(true));
        assert_eq!(f.coeff(7), Ok(false));
        assert!(matches!(f.coeff(8), Err(Error::OutOfWindow { n: 8, prec: 8 })));
        assert!(BitSeries::monomial(8, 8).is_err());
    }

    #[test]
    fn mul_window_follows_valuations() {
        // f = 1 + x at prec 10, g = x^3 at prec 5: window = min(10+3, 5+0) = 5.
        let f = BitSeries::from_exponents([0, 1], 10).unwrap();
        let g = BitSeries::monomial(3, 5).unwrap();
        let h = f.mul(&g);
        assert_eq!(h.prec(), 5);
        assert_eq!(h.exponents(), vec![3, 4]);
        // Zero on window acts as val = prec: min(10+7, 7+0) = 7.
        let z = BitSeries::zero(7);
        let h = f.mul(&z);
        assert_eq!(h.prec(), 7);
        assert!(h.is_zero());
    }

    #[test]
    fn square_is_frobenius() {
        let f = BitSeries::from_exponents([1, 4, 9], 16).unwrap();
        let s = f.square();
        assert_eq!(s.prec(), 32);
        assert_eq!(s.exponents(), vec![2, 8, 18]);
        assert!(s.eq_window(&f.mul(&f)));
    }

    #[test]
    fn substitution_composes() {
        let f = BitSeries::from_exponents([1, 2, 5], 9).unwrap();
        let a = f.substitute_power(2).substitute_power(3);
        let b = f.substitute_power(6);
        assert_eq!(a.prec(), 54);
        assert!(a.eq_window(&b));
        assert!(f.substitute_power(1).eq_window(&f));
    }

    #[test]
    fn division_inverts_multiplication() {
        let f = BitSeries::from_exponents([2, 3, 7, 11], 64).unwrap();
        let g = BitSeries::from_exponents([1, 4, 6], 64).unwrap();
        let h = f.mul(&g).divide_exact(&g).unwrap();
        assert!(h.eq_window(&f));
        assert_eq!(h.prec(), f.mul(&g).prec() - 1);
    }

    #[test]
    fn division_errors() {
        let f = BitSeries::monomial(1, 16).unwrap();
        let g = BitSeries::monomial(3, 16).unwrap();
        assert_eq!(
            f.divide_exact(&g),
            Err(Error::Valuation { val_f: 1, val_g: 3 })
        );
        let z = BitSeries::zero(16);
        assert_eq!(f.divide_exact(&z), Err(Error::DivisorVanishes { prec: 16 }));
        // Window shorter than the divisor valuation leaves nothing to report.
        let short = BitSeries::from_exponents([2], 3).unwrap();
        assert_eq!(short.divide_exact(&BitSeries::monomial(2, 8).unwrap())
            .unwrap()
            .prec(), 1);
        assert_eq!(
            BitSeries::zero(2).divide_exact(&BitSeries::monomial(2, 8).unwrap()),
            Err(Error::EmptyWindow)
        );
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let f = BitSeries::from_exponents([0, 1, 3], 40).unwrap();
        let mut acc = BitSeries::one(40);
        for _ in 0..6 {
            acc = acc.mul(&f);
        }
        assert!(f.pow(6).eq_window(&acc));
        assert!(f.pow(0).eq_window(&BitSeries::one(40)));
        assert!(f.pow(1).eq_window(&f));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let f = BitSeries::from_exponents([1, 9, 25], 30).unwrap();
        let text = f.to_string();
        assert_eq!(text, "prec=30; exps=1,9,25");
        let back: BitSeries = text.parse().unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_string(), text);
        let z = BitSeries::zero(5);
        assert_eq!(z.to_string().parse::<BitSeries>().unwrap(), z);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let f = BitSeries::from_exponents([0, 2, 17], 20).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"prec":20,"exps":[0,2,17]}"#);
        let back: BitSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<BitSeries>(r#"{"prec":4,"exps":[9]}"#).is_err());
    }

    #[test]
    fn one_plus_power_helper() {
        let f = BitSeries::from_exponents([0, 5], 12).unwrap();
        let g = f.mul_one_plus_power(3);
        let explicit = f.mul(&BitSeries::from_exponents([0, 3], 12).unwrap());
        assert!(g.eq_window(&explicit));
        assert_eq!(g.prec(), 12);
    }
}
