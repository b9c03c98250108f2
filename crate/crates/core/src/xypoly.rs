//! Truncated GF(2) polynomials in the Hecke coordinates X, Y, and elements
//! of the completed shallow Hecke algebra O = Z/2[[X, Y]][eps].
//!
//! X and Y stand for the operators T_3 and T_7.  Acting on the spaces built
//! from the D_k they are commuting, locally nilpotent operators, so power
//! series in X and Y act without convergence questions, and the operators
//! T_p with chi(p) = +1 are such series.  The T_p with chi(p) = -1 are not:
//! they involve one further generator eps, with eps^2 = 0 and
//! T_11 = lambda(X, Y) + eps; a general element of O is r(X, Y) + t(X, Y)eps.
//!
//! Every polynomial here carries the power of the maximal ideal (X, Y) it is
//! known modulo, in the field `trunc`: the terms of total degree < trunc are
//! exact, everything above is unknown.  Arithmetic propagates truncation
//! pessimistically, exactly like the one-variable windows in `series`:
//! addition takes the min, multiplication min(a.trunc + val(b),
//! b.trunc + val(a)), squaring doubles (char 2 kills the cross terms).

use crate::error::{Error, Result};
use crate::forms::Combination;
use crate::hecke;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;
use std::fmt;

/// A polynomial in X and Y over GF(2), known modulo (X, Y)^trunc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XyPoly {
    trunc: u32,
    terms: BTreeSet<(u32, u32)>,
}

impl XyPoly {
    pub fn zero(trunc: u32) -> Self {
        assert!(trunc > 0, "truncation order must be positive");
        XyPoly {
            trunc,
            terms: BTreeSet::new(),
        }
    }

    pub fn one(trunc: u32) -> Self {
        Self::monomial(0, 0, trunc)
    }

    pub fn x(trunc: u32) -> Self {
        Self::monomial(1, 0, trunc)
    }

    pub fn y(trunc: u32) -> Self {
        Self::monomial(0, 1, trunc)
    }

    /// X^i Y^j.
    pub fn monomial(i: u32, j: u32, trunc: u32) -> Self {
        let mut p = Self::zero(trunc);
        assert!(i + j < trunc, "monomial of degree {} above trunc {trunc}", i + j);
        p.terms.insert((i, j));
        p
    }

    /// XOR of the given monomials.
    pub fn from_terms<I: IntoIterator<Item = (u32, u32)>>(terms: I, trunc: u32) -> Self {
        let mut p = Self::zero(trunc);
        for (i, j) in terms {
            assert!(i + j < trunc, "term of degree {} above trunc {trunc}", i + j);
            p.toggle(i, j);
        }
        p
    }

    fn toggle(&mut self, i: u32, j: u32) {
        if !self.terms.remove(&(i, j)) {
            self.terms.insert((i, j));
        }
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest total degree of a term.
    pub fn val(&self) -> Option<u32> {
        self.terms.iter().map(|&(i, j)| i + j).min()
    }

    fn val_or_trunc(&self) -> u32 {
        self.val().unwrap_or(self.trunc)
    }

    /// Coefficient of X^i Y^j; asking above the truncation order is an error,
    /// not a zero.
    pub fn coeff(&self, i: u32, j: u32) -> Result<bool> {
        if i + j >= self.trunc {
            return Err(Error::OutOfWindow {
                n: (i + j) as usize,
                prec: self.trunc as usize,
            });
        }
        Ok(self.terms.contains(&(i, j)))
    }

    pub fn constant_term(&self) -> bool {
        self.terms.contains(&(0, 0))
    }

    /// Whether the element lies in the maximal ideal (X, Y).
    pub fn in_maximal_ideal(&self) -> bool {
        !self.constant_term()
    }

    /// Terms in the graded order used for display and serialization:
    /// by total degree, then by Y-exponent.
    pub fn graded_terms(&self) -> Vec<(u32, u32)> {
        let mut v: Vec<(u32, u32)> = self.terms.iter().copied().collect();
        v.sort_by_key(|&(i, j)| (i + j, j));
        v
    }

    pub fn add(&self, other: &XyPoly) -> XyPoly {
        let trunc = self.trunc.min(other.trunc);
        let mut out = XyPoly::zero(trunc);
        for &(i, j) in self.terms.iter().chain(&other.terms) {
            if i + j < trunc {
                out.toggle(i, j);
            }
        }
        out
    }

    pub fn mul(&self, other: &XyPoly) -> XyPoly {
        let trunc = (self.trunc + other.val_or_trunc())
            .min(other.trunc + self.val_or_trunc());
        let mut out = XyPoly::zero(trunc.max(1));
        for &(a, b) in &self.terms {
            for &(c, d) in &other.terms {
                if a + c + b + d < trunc {
                    out.toggle(a + c, b + d);
                }
            }
        }
        out
    }

    /// Frobenius: doubles every exponent and the truncation order.
    pub fn square(&self) -> XyPoly {
        let mut out = XyPoly::zero(2 * self.trunc);
        for &(i, j) in &self.terms {
            out.terms.insert((2 * i, 2 * j));
        }
        out
    }

    /// Forget terms of total degree >= new_trunc.
    pub fn truncated(&self, new_trunc: u32) -> XyPoly {
        assert!(new_trunc > 0 && new_trunc <= self.trunc);
        let mut out = XyPoly::zero(new_trunc);
        for &(i, j) in &self.terms {
            if i + j < new_trunc {
                out.terms.insert((i, j));
            }
        }
        out
    }

    /// Equality below the smaller of the two truncation orders.
    pub fn eq_truncated(&self, other: &XyPoly) -> bool {
        let t = self.trunc.min(other.trunc);
        self.truncated(t).terms == other.truncated(t).terms
    }

    /// The polynomial evaluated on a combination, with X acting as T_3 and
    /// Y as T_7 through the memoized basis columns.
    pub fn apply(&self, f: &Combination) -> Result<Combination> {
        let mut acc = Combination::empty(f.family());
        for &(i, j) in &self.terms {
            let mut cur = f.clone();
            for _ in 0..i {
                cur = hecke::tp_on_combination(3, &cur)?;
            }
            for _ in 0..j {
                cur = hecke::tp_on_combination(7, &cur)?;
            }
            acc ^= &cur;
        }
        Ok(acc)
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, i: u32, j: u32) -> fmt::Result {
    if i == 0 && j == 0 {
        return write!(f, "1");
    }
    match i {
        0 => {}
        1 => write!(f, "X")?,
        _ => write!(f, "X^{i}")?,
    }
    match j {
        0 => Ok(()),
        1 => write!(f, "Y"),
        _ => write!(f, "Y^{j}"),
    }
}

impl fmt::Display for XyPoly {
    /// `0`, `X`, `X + Y`, `1 + XY + X^2Y`, in graded order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, &(i, j)) in self.graded_terms().iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write_term(f, i, j)?;
        }
        Ok(())
    }
}

impl Serialize for XyPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("XyPoly", 2)?;
        s.serialize_field("trunc", &self.trunc)?;
        s.serialize_field("terms", &self.graded_terms())?;
        s.end()
    }
}

/// An element r(X, Y) + t(X, Y) eps of O = Z/2[[X, Y]][eps], eps^2 = 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OElement {
    r: XyPoly,
    t: XyPoly,
}

impl OElement {
    pub fn new(r: XyPoly, t: XyPoly) -> Self {
        OElement { r, t }
    }

    /// A pure power-series element.
    pub fn poly(r: XyPoly) -> Self {
        let trunc = r.trunc();
        OElement {
            r,
            t: XyPoly::zero(trunc),
        }
    }

    pub fn eps(trunc: u32) -> Self {
        OElement {
            r: XyPoly::zero(trunc),
            t: XyPoly::one(trunc),
        }
    }

    pub fn r(&self) -> &XyPoly {
        &self.r
    }

    pub fn t(&self) -> &XyPoly {
        &self.t
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.t.is_zero()
    }

    pub fn add(&self, o: &OElement) -> OElement {
        OElement {
            r: self.r.add(&o.r),
            t: self.t.add(&o.t),
        }
    }

    /// (r1 + t1 eps)(r2 + t2 eps) = r1 r2 + (r1 t2 + t1 r2) eps.
    pub fn mul(&self, o: &OElement) -> OElement {
        OElement {
            r: self.r.mul(&o.r),
            t: self.r.mul(&o.t).add(&self.t.mul(&o.r)),
        }
    }
}

impl fmt::Display for OElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r = {}; t = {}", self.r, self.t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Combination;
    use crate::hecke::tp_on_dk;

    #[test]
    fn display_uses_graded_order() {
        let p = XyPoly::from_terms([(0, 0), (1, 0), (0, 1), (2, 1), (1, 1)], 8);
        assert_eq!(format!("{p}"), "1 + X + Y + XY + X^2Y");
        assert_eq!(format!("{}", XyPoly::zero(3)), "0");
        assert_eq!(format!("{}", XyPoly::monomial(0, 3, 8)), "Y^3");
    }

    #[test]
    fn ring_laws_in_characteristic_two() {
        let x = XyPoly::x(8);
        let y = XyPoly::y(8);
        let xy = x.add(&y);
        assert!(xy.add(&xy).is_zero());
        // (X + Y)^2 = X^2 + Y^2.
        assert_eq!(
            xy.mul(&xy).graded_terms(),
            vec![(2, 0), (0, 2)]
        );
        assert_eq!(xy.square().graded_terms(), vec![(2, 0), (0, 2)]);
        assert_eq!(xy.square().trunc(), 16);
        // (X + Y)(1 + X + Y) = X + Y + X^2 + Y^2.
        let p = xy.mul(&XyPoly::one(8).add(&xy));
        assert_eq!(p.graded_terms(), vec![(1, 0), (0, 1), (2, 0), (0, 2)]);
    }

    #[test]
    fn truncation_propagates_pessimistically() {
        let f = XyPoly::x(5);
        let g = XyPoly::y(3);
        let fg = f.mul(&g);
        assert_eq!(fg.trunc(), 4); // min(5 + 1, 3 + 1)
        assert_eq!(fg.graded_terms(), vec![(1, 1)]);
        assert_eq!(f.add(&g).trunc(), 3);
        // A zero factor contributes its whole window as valuation.
        let z = XyPoly::zero(5);
        let zg = z.mul(&g);
        assert!(zg.is_zero());
        assert_eq!(zg.trunc(), 6); // min(5 + val(Y), 3 + 5), the zero window counting as valuation 5
        // Products drop terms that fall outside the combined window.
        let h = XyPoly::from_terms([(0, 0), (2, 0)], 3);
        let hh = h.mul(&h);
        assert_eq!(hh.trunc(), 3);
        assert_eq!(hh.graded_terms(), vec![(0, 0)]); // X^4 truncated away
    }

    #[test]
    fn coefficient_window_is_enforced() {
        let p = XyPoly::monomial(1, 1, 4);
        assert!(p.coeff(1, 1).unwrap());
        assert!(!p.coeff(0, 2).unwrap());
        assert!(matches!(
            p.coeff(2, 2),
            Err(Error::OutOfWindow { n: 4, prec: 4 })
        ));
        assert!(p.in_maximal_ideal());
        assert!(!XyPoly::one(4).in_maximal_ideal());
    }

    #[test]
    fn apply_matches_hecke_columns() {
        // X D_21 = T_3 D_21 = D_7.
        let x = XyPoly::x(4);
        assert_eq!(
            x.apply(&Combination::d([21])).unwrap(),
            Combination::d([7])
        );
        // XY and YX agree: the operators commute column by column.
        let xy = XyPoly::monomial(1, 1, 4);
        let via_x_then_y = crate::hecke::tp_on_combination(
            7,
            &crate::hecke::tp_on_combination(3, &Combination::d([93])).unwrap(),
        )
        .unwrap();
        assert_eq!(xy.apply(&Combination::d([93])).unwrap(), via_x_then_y);
        // Linearity: (X + Y) f = X f + Y f.
        let f = Combination::d([47, 63]);
        let sum = XyPoly::x(4).add(&XyPoly::y(4));
        let lhs = sum.apply(&f).unwrap();
        let mut rhs = x.apply(&f).unwrap();
        rhs ^= &tp_on_dk(7, 47).unwrap();
        rhs ^= &tp_on_dk(7, 63).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn o_is_a_square_zero_extension() {
        let eps = OElement::eps(6);
        assert!(eps.mul(&eps).is_zero());
        // (lambda + eps)^2 = lambda^2.
        let lambda = XyPoly::x(6).add(&XyPoly::y(6));
        let el = OElement::poly(lambda.clone()).add(&eps);
        let sq = el.mul(&el);
        assert!(sq.t().is_zero());
        assert!(sq.r().eq_truncated(&lambda.mul(&lambda)));
        assert_eq!(format!("{}", OElement::poly(XyPoly::y(4))), "r = Y; t = 0");
        assert_eq!(format!("{el}"), "r = X + Y; t = 1");
    }

    #[test]
    fn json_form_is_stable() {
        let p = XyPoly::from_terms([(1, 0), (0, 1)], 5);
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"trunc":5,"terms":[[1,0],[0,1]]}"#
        );
        let el = OElement::new(p.clone(), XyPoly::zero(5));
        assert_eq!(
            serde_json::to_string(&el).unwrap(),
            r#"{"r":{"trunc":5,"terms":[[1,0],[0,1]]},"t":{"trunc":5,"terms":[]}}"#
        );
    }
}
