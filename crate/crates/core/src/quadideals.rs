//! Ideal classes in Z[sqrt(-10)] and the dihedral series they contribute.
//!
//! The ring Z[sqrt(-10)] has class number 2, with P = (7, 2 - sqrt(-10))
//! representing the nonprincipal class.  Fix a power of two q.  Principal
//! ideals (alpha), (beta) whose norms have chi = +1 ("type a": generator
//! b + c*sqrt(-10) with b prime to 10 and c even) are declared equivalent
//! when N*alpha = beta mod 4q for some integer N prime to 10; each class
//! contains a unique (1 + 2d*sqrt(-10)) with d mod 2q, which names it.  A
//! nonprincipal ideal I is classified through the principal ideal I*P.  The
//! resulting Gauss classes form a cyclic group of order 4q generated by the
//! class C of P, whose square is the class of P^2 = (3 + 2*sqrt(-10)).
//!
//! Each class R carries a theta series theta(R) = sum x^norm(I) over the
//! ideals I in R.  Writing alpha_i for the mod-2 reduction of theta(C^i):
//! alpha_0 = D, alpha_i = alpha_{4q-i}, and alpha_{2q} = 0 because the
//! ambiguous class AMB = C^{2q} is closed under conjugation with no fixed
//! ideal; half of theta(AMB) survives instead and reduces to D_{40q^2+1}.
//! The span DI(q) of alpha_0 .. alpha_{2q-1} is 2q-dimensional, sits inside
//! W_a(q), is annihilated by T_p for every inert p with chi(p) = 1 (such as
//! 3), and T_7 walks the ladder: T_7 alpha_i = alpha_{i-1} + alpha_{i+1}.
//! Consequently alpha_{2q-i} = U_i(T_7) D_{40q^2+1}, where the U_n are the
//! GF(2) Chebyshev-like polynomials with U_n(t + 1/t) = t^n + t^-n.
//!
//! Enumeration is pure integer arithmetic.  Units are +-1, so a principal
//! ideal has a unique generator with b > 0 (or b = 0, c > 0); a nonprincipal
//! ideal I of norm n corresponds to the canonical generator alpha of I*P, of
//! norm 7n, lying in P — membership is the test 7 | b + 2c, since
//! sqrt(-10) = 2 mod P.  An independent Hermite-normal-form enumeration of
//! all ideal lattices of a given norm cross-checks completeness and
//! deduplication, and the classification is re-run through conj(P) to check
//! that the choice of auxiliary prime is immaterial.

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::forms::{self, Combination, GenName};
use crate::gf2mat::Gf2Mat;
use crate::hecke;
use crate::series::BitSeries;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt;

/// An element b + c*sqrt(-10) of Z[sqrt(-10)].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadInt {
    pub b: i64,
    pub c: i64,
}

impl QuadInt {
    pub fn new(b: i64, c: i64) -> Self {
        QuadInt { b, c }
    }

    pub fn norm(self) -> i64 {
        self.b * self.b + 10 * self.c * self.c
    }

    pub fn conj(self) -> Self {
        QuadInt::new(self.b, -self.c)
    }

    pub fn mul(self, o: Self) -> Self {
        QuadInt::new(
            self.b * o.b - 10 * self.c * o.c,
            self.b * o.c + self.c * o.b,
        )
    }

    /// Membership in P = (7, 2 - sqrt(-10)): reduce mod P, where
    /// sqrt(-10) = 2, so b + c*sqrt(-10) = b + 2c in Z/7.
    pub fn in_p(self) -> bool {
        (self.b + 2 * self.c).rem_euclid(7) == 0
    }

    /// Reduce both coordinates into [0, m).  Parities survive (m is always
    /// even here), and so does the class label.
    fn reduce_mod(self, m: i64) -> Self {
        QuadInt::new(self.b.rem_euclid(m), self.c.rem_euclid(m))
    }

    /// Exact division by a rational integer.
    fn div_int(self, m: i64) -> Self {
        assert!(
            self.b % m == 0 && self.c % m == 0,
            "{self} is not divisible by {m}"
        );
        QuadInt::new(self.b / m, self.c / m)
    }

    /// The representative of {alpha, -alpha} with positive leading coefficient.
    fn canonical(self) -> Self {
        if self.b < 0 || (self.b == 0 && self.c < 0) {
            QuadInt::new(-self.b, -self.c)
        } else {
            self
        }
    }
}

impl fmt::Display for QuadInt {
    /// `s` stands for sqrt(-10): `7`, `3+2s`, `11-2s`, `-1+4s`, `2s`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn coeff(f: &mut fmt::Formatter<'_>, c: i64) -> fmt::Result {
            match c.abs() {
                1 => write!(f, "s"),
                a => write!(f, "{a}s"),
            }
        }
        match (self.b, self.c) {
            (b, 0) => write!(f, "{b}"),
            (0, c) => {
                if c < 0 {
                    write!(f, "-")?;
                }
                coeff(f, c)
            }
            (b, c) => {
                write!(f, "{b}")?;
                write!(f, "{}", if c < 0 { "-" } else { "+" })?;
                coeff(f, c)
            }
        }
    }
}

/// Which ideal class of Z[sqrt(-10)] an ideal belongs to.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Principal,
    Nonprincipal,
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sector::Principal => write!(f, "principal"),
            Sector::Nonprincipal => write!(f, "nonprincipal"),
        }
    }
}

/// A concrete ideal, stored through a single generator.
///
/// A principal ideal stores its canonical generator.  A nonprincipal ideal I
/// stores the canonical generator alpha of I*P, which pins I = (alpha)/P
/// down uniquely; then norm(alpha) = 7*norm(I) and alpha lies in P.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IdealRep {
    sector: Sector,
    alpha: QuadInt,
    norm: u64,
}

impl IdealRep {
    pub fn principal(alpha: QuadInt) -> Self {
        assert!(alpha != QuadInt::new(0, 0), "the zero ideal has no norm");
        let alpha = alpha.canonical();
        IdealRep {
            sector: Sector::Principal,
            alpha,
            norm: alpha.norm() as u64,
        }
    }

    pub fn nonprincipal(alpha: QuadInt) -> Self {
        let alpha = alpha.canonical();
        assert!(alpha.in_p(), "generator of I*P must lie in P");
        let n = alpha.norm();
        assert!(n > 0 && n % 7 == 0, "norm of I*P must be a positive multiple of 7");
        IdealRep {
            sector: Sector::Nonprincipal,
            alpha,
            norm: (n / 7) as u64,
        }
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn alpha(&self) -> QuadInt {
        self.alpha
    }

    pub fn norm(&self) -> u64 {
        self.norm
    }

    /// chi(norm) = +1: the graded piece the Gauss classes live on.
    pub fn is_type_a(&self) -> bool {
        hecke::chi(self.norm) == 1
    }

    /// The conjugate ideal.  For nonprincipal I, conj(I)*P =
    /// (conj(alpha)*(3 + 2*sqrt(-10))/7), since P^2 = (3 + 2*sqrt(-10)).
    pub fn conj(&self) -> IdealRep {
        match self.sector {
            Sector::Principal => IdealRep::principal(self.alpha.conj()),
            Sector::Nonprincipal => {
                let beta = self.alpha.conj().mul(QuadInt::new(3, 2)).div_int(7);
                IdealRep::nonprincipal(beta)
            }
        }
    }
}

impl fmt::Display for IdealRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.sector, self.alpha)
    }
}

/// Solutions (b, c) of b^2 + 10c^2 = n, one per pair {alpha, -alpha}
/// (b > 0, or b = 0 and c > 0), ordered by c.
fn norm_solutions(n: i64) -> Vec<(i64, i64)> {
    debug_assert!(n >= 1);
    let mut v = Vec::new();
    let cmax = ((n / 10) as u64).isqrt() as i64;
    for c in -cmax..=cmax {
        let r = n - 10 * c * c;
        if r < 0 {
            continue;
        }
        if r == 0 {
            if c > 0 {
                v.push((0, c));
            }
            continue;
        }
        let b = (r as u64).isqrt() as i64;
        if b * b == r {
            v.push((b, c));
        }
    }
    v
}

/// Every ideal of norm n, principal and nonprincipal, in canonical order.
pub fn ideals_of_norm(n: u64) -> Vec<IdealRep> {
    assert!(n >= 1);
    let mut out: Vec<IdealRep> = norm_solutions(n as i64)
        .into_iter()
        .map(|(b, c)| IdealRep::principal(QuadInt::new(b, c)))
        .collect();
    for (b, c) in norm_solutions(7 * n as i64) {
        let alpha = QuadInt::new(b, c);
        if alpha.in_p() {
            out.push(IdealRep::nonprincipal(alpha));
        }
    }
    out.sort();
    out
}

/// One of the 4q Gauss classes: a sector plus a residue d mod 2q.  The
/// principal class d contains (1 + 2d*sqrt(-10)); a nonprincipal ideal I
/// carries the label of I*P.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GaussClass {
    pub q: u64,
    pub sector: Sector,
    pub d: u64,
}

impl fmt::Display for GaussClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.sector, self.d)
    }
}

fn require_power_of_two(q: u64) -> Result<()> {
    if q == 0 || !q.is_power_of_two() {
        return Err(Error::BadIndex {
            k: q,
            why: "q must be a power of two",
        });
    }
    Ok(())
}

/// Extended gcd: (g, s, t) with s*x + t*y = g = gcd(x, y) >= 0.
fn ext_gcd(x: i64, y: i64) -> (i64, i64, i64) {
    if y == 0 {
        if x < 0 {
            (-x, -1, 0)
        } else {
            (x, 1, 0)
        }
    } else {
        let (g, s, t) = ext_gcd(y, x % y);
        (g, t, s - (x / y) * t)
    }
}

fn inv_mod(x: i64, m: i64) -> i64 {
    let (g, s, _) = ext_gcd(x.rem_euclid(m), m);
    debug_assert_eq!(g, 1, "{x} is not invertible mod {m}");
    s.rem_euclid(m)
}

/// Class label of a principal generator: for alpha = b + 2c'*sqrt(-10),
/// d = (b^-1 mod 4q) * c' mod 2q.  Only oddness of b is needed for the
/// inversion (4q is a 2-power), which matters for power-table entries that
/// have been reduced mod 4q and may have picked up a factor of 5; the label
/// is invariant under alpha -> -alpha and under reduction mod 4q.
fn raw_label(alpha: QuadInt, q: u64) -> u64 {
    debug_assert!(alpha.b % 2 != 0, "label needs an odd leading coefficient");
    debug_assert!(alpha.c % 2 == 0, "label needs an even sqrt(-10) coefficient");
    let m4 = 4 * q as i64;
    let binv = inv_mod(alpha.b, m4);
    (binv * (alpha.c / 2)).rem_euclid(2 * q as i64) as u64
}

/// The Gauss class of a type-a ideal with respect to the modulus 4q.
pub fn gauss_class(rep: &IdealRep, q: u64) -> Result<GaussClass> {
    require_power_of_two(q)?;
    if !rep.is_type_a() {
        return Err(Error::NotTypeA {
            b: rep.alpha.b,
            c: rep.alpha.c,
        });
    }
    Ok(GaussClass {
        q,
        sector: rep.sector,
        d: raw_label(rep.alpha, q),
    })
}

/// The classes of C^0 .. C^{4q-1}, where C is the class of P.
///
/// Even powers: C^{2j} is the class of (3 + 2*sqrt(-10))^j, reduced mod 4q
/// as we go.  Odd powers: C^{2j+1} consists of nonprincipal ideals I with
/// I*P in C^{2j+2}, so it carries that label.  Three structural facts are
/// checked rather than assumed: P^2 has order exactly 2q among principal
/// classes (the scan returns to the identity and not before), the 4q entries
/// exhaust all labels, and the half-way entry is the ambiguous class of
/// (1 + 2q*sqrt(-10)).
pub fn class_power_table(q: u64) -> Result<Vec<GaussClass>> {
    require_power_of_two(q)?;
    let m4 = 4 * q as i64;
    let g = QuadInt::new(3, 2);
    let mut table = Vec::with_capacity(4 * q as usize);
    let mut acc = QuadInt::new(1, 0);
    for _ in 0..2 * q {
        table.push(GaussClass {
            q,
            sector: Sector::Principal,
            d: raw_label(acc, q),
        });
        acc = acc.mul(g).reduce_mod(m4);
        table.push(GaussClass {
            q,
            sector: Sector::Nonprincipal,
            d: raw_label(acc, q),
        });
    }
    if raw_label(acc, q) != 0 {
        return Err(Error::inconsistent(format!(
            "P^2 does not have order 2q = {} among principal classes",
            2 * q
        )));
    }
    let distinct: BTreeSet<(Sector, u64)> = table.iter().map(|g| (g.sector, g.d)).collect();
    if distinct.len() != 4 * q as usize {
        return Err(Error::inconsistent(format!(
            "power table for q = {q} is not a bijection: the class of P has order < 4q"
        )));
    }
    let amb = table[2 * q as usize];
    if amb.sector != Sector::Principal || amb.d != q {
        return Err(Error::inconsistent(format!(
            "half-way power C^{} is {amb}, not the ambiguous class (principal, {q})",
            2 * q
        )));
    }
    Ok(table)
}

/// Visit every type-a generator b + c*sqrt(-10) with b > 0 and norm < bound.
fn for_each_type_a(bound: i64, mut visit: impl FnMut(QuadInt)) {
    let mut cmax = (((bound - 1).max(0) / 10) as u64).isqrt() as i64;
    if cmax % 2 != 0 {
        cmax -= 1;
    }
    let mut c = -cmax;
    while c <= cmax {
        let rest = bound - 10 * c * c;
        let mut b = 1;
        while b * b < rest {
            if b % 5 != 0 {
                visit(QuadInt::new(b, c));
            }
            b += 2;
        }
        c += 2;
    }
}

/// Integer ideal counts per Gauss class on a norm window [0, prec).
///
/// counts(i)[n] is the number of ideals of norm n in C^i.  This one table is
/// the common source for the mod-2 series alpha_i, the all-even structure of
/// theta(AMB), and the integral Hecke checks (tridiagonality of T_7, inert
/// annihilation, split-prime translation).
pub struct ThetaTable {
    q: u64,
    prec: usize,
    table: Vec<GaussClass>,
    index_of: HashMap<(Sector, u64), usize>,
    counts: Vec<Vec<i64>>,
}

impl ThetaTable {
    pub fn new(q: u64, prec: usize) -> Result<ThetaTable> {
        assert!(prec >= 2, "window must contain at least x^1");
        let table = class_power_table(q)?;
        let index_of: HashMap<(Sector, u64), usize> = table
            .iter()
            .enumerate()
            .map(|(i, g)| ((g.sector, g.d), i))
            .collect();
        let mut counts = vec![vec![0i64; prec]; 4 * q as usize];
        for_each_type_a(prec as i64, |alpha| {
            let i = index_of[&(Sector::Principal, raw_label(alpha, q))];
            counts[i][alpha.norm() as usize] += 1;
        });
        for_each_type_a(7 * prec as i64, |alpha| {
            if alpha.in_p() {
                let nn = alpha.norm();
                debug_assert_eq!(nn % 7, 0);
                let i = index_of[&(Sector::Nonprincipal, raw_label(alpha, q))];
                counts[i][(nn / 7) as usize] += 1;
            }
        });
        Ok(ThetaTable {
            q,
            prec,
            table,
            index_of,
            counts,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn class_count(&self) -> usize {
        4 * self.q as usize
    }

    pub fn classes(&self) -> &[GaussClass] {
        &self.table
    }

    /// Position of the class of the given ideal in the power table.
    pub fn class_index(&self, rep: &IdealRep) -> Result<usize> {
        let g = gauss_class(rep, self.q)?;
        Ok(self.index_of[&(g.sector, g.d)])
    }

    /// The integer theta series of C^i (i taken mod 4q).
    pub fn theta_counts(&self, i: u64) -> &[i64] {
        &self.counts[(i % (4 * self.q)) as usize]
    }

    /// alpha_i: the mod-2 reduction of theta(C^i).
    pub fn alpha(&self, i: u64) -> BitSeries {
        let row = self.theta_counts(i);
        BitSeries::from_exponents(
            row.iter()
                .enumerate()
                .filter(|(_, &v)| v % 2 != 0)
                .map(|(n, _)| n),
            self.prec,
        )
        .expect("norms lie in the window by construction")
    }

    /// The mod-2 reduction of theta(AMB)/2, after checking that every
    /// coefficient of theta(AMB) is even.  Conjugation fixes the ambiguous
    /// class and pairs its ideals off two by two, so an odd coefficient
    /// would falsify the structure this table encodes.
    pub fn amb_halved(&self) -> Result<BitSeries> {
        let row = self.theta_counts(2 * self.q);
        let mut exps = Vec::new();
        for (n, &v) in row.iter().enumerate() {
            if v % 2 != 0 {
                return Err(Error::inconsistent(format!(
                    "theta(AMB) has odd coefficient {v} at x^{n}"
                )));
            }
            if (v / 2) % 2 != 0 {
                exps.push(n);
            }
        }
        Ok(BitSeries::from_exponents(exps, self.prec)
            .expect("norms lie in the window by construction"))
    }
}

/// The mod-2 series attached to C^i on [0, prec): alpha_i away from the
/// ambiguous class, and the halved ambiguous series (equal to D_{40q^2+1})
/// at i = 2q mod 4q.
pub fn theta(i: u64, q: u64, prec: usize) -> Result<BitSeries> {
    let t = ThetaTable::new(q, prec)?;
    if i % (4 * q) == 2 * q {
        t.amb_halved()
    } else {
        Ok(t.alpha(i))
    }
}

fn combination_row(c: &Combination, ncols: usize) -> BitVec {
    let mut v = BitVec::zeros(ncols);
    for k in c.indices() {
        v.set(k as usize, true);
    }
    v
}

/// alpha_0 .. alpha_{2q-1} decomposed in the D_k basis: a basis of the
/// 2q-dimensional space DI(q) inside W_a(q).
///
/// The window must reach past 2*40q^2 so every decomposition is certified
/// exact.  The support bound k < 40q^2 and the linear independence of the
/// result are checked, not assumed.
pub fn di_basis(q: u64, prec: usize) -> Result<Vec<Combination>> {
    require_power_of_two(q)?;
    let bound = (40 * q * q) as usize;
    if prec < 2 * bound + 64 {
        return Err(Error::InsufficientPrecision { index: bound, prec });
    }
    let t = ThetaTable::new(q, prec)?;
    let mut basis = Vec::with_capacity(2 * q as usize);
    for i in 0..2 * q {
        let comb = forms::decompose_w(&t.alpha(i))?;
        if let Some(mx) = comb.max_index() {
            if mx >= bound as u64 {
                return Err(Error::inconsistent(format!(
                    "alpha_{i} contains D_{mx}, outside W_a(q) for q = {q}"
                )));
            }
        }
        basis.push(comb);
    }
    let rows: Vec<BitVec> = basis.iter().map(|c| combination_row(c, bound)).collect();
    if Gf2Mat::from_rows(bound, rows).rank() != 2 * q as usize {
        return Err(Error::inconsistent(format!(
            "alpha_0 .. alpha_{} are linearly dependent",
            2 * q - 1
        )));
    }
    Ok(basis)
}

/// The GF(2) polynomial U_n with U_n(t + 1/t) = t^n + t^-n:
/// U_0 = 0, U_1 = Y, U_{n+2} = Y*U_{n+1} + U_n.  Squaring doubles the index
/// (U_{2n} = U_n^2), so U_n = Y^n exactly when n is 0, 1 or a power of two,
/// and Y divides every U_n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChebPoly {
    n: u64,
    coeffs: BitVec,
}

/// U_n, built by running the recursion.
pub fn cheb_u(n: u64) -> ChebPoly {
    let len = n as usize + 1;
    let mut prev = BitVec::zeros(len.max(2)); // U_0 = 0
    let mut cur = BitVec::zeros(len.max(2)); // U_1 = Y
    cur.set(1, true);
    if n == 0 {
        return ChebPoly {
            n,
            coeffs: BitVec::zeros(1),
        };
    }
    for _ in 2..=n {
        // next = Y*cur + prev
        let mut next = prev.clone();
        next.xor_shifted_assign(&cur, 1);
        prev = cur;
        cur = next;
    }
    ChebPoly {
        n,
        coeffs: cur.truncated(len.max(2)),
    }
}

impl ChebPoly {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn coeff(&self, j: usize) -> bool {
        j < self.coeffs.len() && self.coeffs.get(j)
    }

    /// Exponents with coefficient 1, ascending.
    pub fn exponents(&self) -> Vec<usize> {
        self.coeffs.iter_ones().collect()
    }

    /// U_n(Y) applied to a combination, with Y acting as T_7 column by
    /// column.
    pub fn apply(&self, f: &Combination) -> Result<Combination> {
        let mut acc = Combination::empty(f.family());
        let mut cur = f.clone();
        let top = self.coeffs.last_set().unwrap_or(0);
        for j in 0..=top {
            if self.coeff(j) {
                acc ^= &cur;
            }
            if j < top {
                cur = hecke::tp_on_combination(7, &cur)?;
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for ChebPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exps = self.exponents();
        if exps.is_empty() {
            return write!(f, "0");
        }
        for (i, j) in exps.iter().rev().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            match j {
                0 => write!(f, "1")?,
                1 => write!(f, "Y")?,
                j => write!(f, "Y^{j}")?,
            }
        }
        Ok(())
    }
}

/// The integral Hecke operator at a prime with chi(p) = +1, acting on an
/// integer coefficient window: out[n] = a(pn) + (-10/p) a(n/p), the second
/// term only when p | n.  Mod 2 this is the usual T_p; over Z the sign
/// (+1 when p splits in Z[sqrt(-10)], -1 when inert) is what makes an inert
/// prime annihilate every theta(R) on the nose.
pub fn apply_tp_int(p: u64, counts: &[i64]) -> Result<Vec<i64>> {
    let prime = hecke::HeckePrime::new(p)?;
    if prime.chi() != 1 {
        return Err(Error::WrongCharacter {
            p,
            needed: 1,
            found: prime.chi(),
        });
    }
    let sign: i64 = if prime.splits() { 1 } else { -1 };
    let p = p as usize;
    let out_len = counts.len().div_ceil(p);
    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len {
        let mut v = counts[p * n];
        if n % p == 0 {
            v += sign * counts[n / p];
        }
        out.push(v);
    }
    Ok(out)
}

fn is_square(n: u64) -> bool {
    let r = n.isqrt();
    r * r == n
}

fn is_odd_square(n: u64) -> bool {
    let r = n.isqrt();
    r * r == n && r % 2 == 1
}

/// Counts lattice points on x^2 + 5y^2 = 6n two ways and ties them to Cbar.
///
/// For every n <= nmax: the number of integer points with x = y mod 3 must
/// be 2 mod 4 when n is a square or five times a square and 0 mod 4
/// otherwise; the count restricted to x = y = 1 mod 6 must be odd exactly
/// when n is an odd square or five times one; and that parity must equal the
/// coefficient of x^n in Cbar = r^2 + r.
pub fn lattice_parity_check(nmax: usize) -> Result<()> {
    assert!(nmax >= 1);
    let cbar = forms::gen(GenName::Cbar, nmax + 1);
    for n in 1..=nmax {
        let m = 6 * n as i64;
        let mut residue3 = 0u64;
        let mut unit6 = 0u64;
        let ymax = ((m / 5) as u64).isqrt() as i64;
        for y in -ymax..=ymax {
            let r = m - 5 * y * y;
            if r < 0 {
                continue;
            }
            let x0 = (r as u64).isqrt() as i64;
            if x0 * x0 != r {
                continue;
            }
            let xs: &[i64] = if x0 == 0 { &[0] } else { &[x0, -x0] };
            for &x in xs {
                if (x - y).rem_euclid(3) == 0 {
                    residue3 += 1;
                }
                if x.rem_euclid(6) == 1 && y.rem_euclid(6) == 1 {
                    unit6 += 1;
                }
            }
        }
        let sq5 = is_square(n as u64) || (n % 5 == 0 && is_square(n as u64 / 5));
        let odd_sq5 =
            is_odd_square(n as u64) || (n % 5 == 0 && is_odd_square(n as u64 / 5));
        let want = if sq5 { 2 } else { 0 };
        if residue3 % 4 != want {
            return Err(Error::inconsistent(format!(
                "x = y mod 3 count on x^2+5y^2 = 6n is {residue3} = {} mod 4 at n = {n}, expected {want}",
                residue3 % 4
            )));
        }
        if (unit6 % 2 == 1) != odd_sq5 {
            return Err(Error::inconsistent(format!(
                "x = y = 1 mod 6 count on x^2+5y^2 = 6n has parity {} at n = {n}, expected {}",
                unit6 % 2,
                u64::from(odd_sq5)
            )));
        }
        if cbar.coeff(n)? != (unit6 % 2 == 1) {
            return Err(Error::inconsistent(format!(
                "Cbar coefficient at x^{n} disagrees with the lattice parity"
            )));
        }
    }
    Ok(())
}

/// Hermite-form enumeration of every ideal lattice of norm n, independent of
/// the generator search: triples (a, b, c) for the lattice
/// Za + Z(b + c*sqrt(-10)) with 0 <= b < a and ac = n.  Writing a = cm and
/// b = cb', stability under multiplication by sqrt(-10) is exactly
/// m | b'^2 + 10, so c runs over divisors with c^2 | n.
pub fn hnf_ideals_of_norm(n: u64) -> BTreeSet<(u64, u64, u64)> {
    assert!(n >= 1);
    let mut out = BTreeSet::new();
    for c in 1..=n.isqrt() {
        if n % (c * c) != 0 {
            continue;
        }
        let m = n / (c * c);
        for bp in 0..m {
            if (bp * bp + 10) % m == 0 {
                out.insert((c * m, c * bp, c));
            }
        }
    }
    out
}

/// The Hermite triple of the lattice underlying an ideal representative.
/// A principal (alpha) is spanned by {alpha, alpha*sqrt(-10)}; a
/// nonprincipal I = (alpha)/P by {alpha, alpha*(2 + sqrt(-10))/7}, because
/// conj(P) = (7, 2 + sqrt(-10)) and P*conj(P) = (7).
pub fn hnf_of(rep: &IdealRep) -> (u64, u64, u64) {
    let a = rep.alpha;
    let (v1, v2) = match rep.sector {
        Sector::Principal => (a, a.mul(QuadInt::new(0, 1))),
        Sector::Nonprincipal => (a, a.mul(QuadInt::new(2, 1)).div_int(7)),
    };
    let (g, s, t) = ext_gcd(v1.c, v2.c);
    assert!(g > 0, "ideal lattice must have full rank");
    let wb = s * v1.b + t * v2.b;
    let det = (v1.b * v2.c - v2.b * v1.c).unsigned_abs();
    let a0 = det / g as u64;
    assert_eq!(a0 * g as u64, rep.norm, "lattice index must equal the norm");
    let b0 = wb.rem_euclid(a0 as i64) as u64;
    (a0, b0, g as u64)
}

/// Cross-check the generator enumeration against the Hermite enumeration
/// for every norm up to nmax: same ideals, no duplicates, none missing.
pub fn enumeration_matches_hnf(nmax: u64) -> Result<()> {
    for n in 1..=nmax {
        let reps = ideals_of_norm(n);
        let from_reps: BTreeSet<(u64, u64, u64)> = reps.iter().map(hnf_of).collect();
        if from_reps.len() != reps.len() {
            return Err(Error::inconsistent(format!(
                "two representatives of norm {n} describe the same lattice"
            )));
        }
        if from_reps != hnf_ideals_of_norm(n) {
            return Err(Error::inconsistent(format!(
                "ideal enumeration disagrees with the Hermite enumeration at norm {n}"
            )));
        }
    }
    Ok(())
}

/// Classifying nonprincipal ideals through P is a convention; classifying
/// through conj(P) must split them into the same classes.  If I*P = (alpha)
/// then I*conj(P) = (alpha*(3 - 2*sqrt(-10))/7), so the two labelings differ
/// by a fixed permutation of Z/2q: we scan all nonprincipal type-a ideals of
/// norm <= nmax and check the relabeling map is a well-defined bijection
/// covering every label.
pub fn label_choice_is_immaterial(q: u64, nmax: u64) -> Result<()> {
    require_power_of_two(q)?;
    let mut forward: HashMap<u64, u64> = HashMap::new();
    let mut backward: HashMap<u64, u64> = HashMap::new();
    for n in 1..=nmax {
        for rep in ideals_of_norm(n) {
            if rep.sector != Sector::Nonprincipal || !rep.is_type_a() {
                continue;
            }
            let d_p = raw_label(rep.alpha, q);
            let beta = rep.alpha.mul(QuadInt::new(3, -2)).div_int(7);
            let d_pbar = raw_label(beta, q);
            if *forward.entry(d_p).or_insert(d_pbar) != d_pbar
                || *backward.entry(d_pbar).or_insert(d_p) != d_p
            {
                return Err(Error::inconsistent(format!(
                    "classes through P and conj(P) partition ideals differently at norm {n}"
                )));
            }
        }
    }
    if forward.len() != 2 * q as usize {
        return Err(Error::inconsistent(format!(
            "scan to norm {nmax} met only {} of {} nonprincipal labels",
            forward.len(),
            2 * q
        )));
    }
    Ok(())
}
