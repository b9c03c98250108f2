//! The mod-2 modular generating series and the basis family D_k.
//!
//! Generators (all exact GF(2) series, exponents listed up to the window):
//!
//!   F    = sum x^(n^2),  n odd           (theta-like, level 1 side)
//!   G    = F(x^5) = sum x^(5 n^2)
//!   H    = F(x^25) = sum x^(25 n^2)
//!   D    = F + H = sum x^(n^2), gcd(n, 10) = 1
//!   r    = sum_{n>=1} x^(n^2) + x^(2 n^2) + x^(5 n^2) + x^(10 n^2)
//!   Cbar = x * prod (1+x^n)^4 (1+x^(5n))^4
//!        = x * prod (1+x^(4n)) (1+x^(20n))   over GF(2)
//!
//! The space W is spanned by the family D_k (k >= 1, gcd(k, 10) = 1):
//!
//!   D_1 = D,   D_3 = D^8/G,   D_7 = D^2 G,   D_9 = D^4 G,
//!   D_{k+10} = G^2 * D_k,
//!
//! so D_k = x^k + (higher terms), and the indices split by character into
//! W_a (k = 1, 3, 7, 9 mod 20) and W_b (k = 11, 13, 17, 19 mod 20).  Exponents
//! appearing in D_k are always k or 9k mod 40.  A companion family J_k (k odd)
//! with J_5 = G and J_{k+10} = G^2 J_k projects onto D_k when exponents
//! divisible by 5 are dropped.
//!
//! `decompose_w` inverts the spanning: greedy reduction by leading (lowest)
//! exponent, since D_k is the only family member starting at x^k.  The D_k
//! themselves are memoized in a process-wide cache keyed by index, each entry
//! kept at the largest window computed so far; the chain D_k -> D_{k+10} is a
//! multiplication by the sparse series G^2 = sum x^(10 n^2), so warming a
//! whole residue class costs one pass.

use crate::error::{Error, Result};
use crate::hecke::{self, Projection};
use crate::series::BitSeries;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{LazyLock, Mutex};

/// Named generating series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenName {
    F,
    G,
    H,
    R,
    D,
    Cbar,
}

impl fmt::Display for GenName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GenName::F => "F",
            GenName::G => "G",
            GenName::H => "H",
            GenName::R => "r",
            GenName::D => "D",
            GenName::Cbar => "Cbar",
        };
        write!(f, "{s}")
    }
}

impl FromStr for GenName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "F" => Ok(GenName::F),
            "G" => Ok(GenName::G),
            "H" => Ok(GenName::H),
            "r" | "R" => Ok(GenName::R),
            "D" => Ok(GenName::D),
            "Cbar" | "cbar" | "C" => Ok(GenName::Cbar),
            _ => Err(Error::Parse(format!("unknown generator name {s:?}"))),
        }
    }
}

/// The named generator on the window [0, prec).
pub fn gen(name: GenName, prec: usize) -> BitSeries {
    assert!(prec > 0);
    match name {
        GenName::F => squares_series(1, prec, |_| true),
        GenName::G => squares_series(5, prec, |_| true),
        GenName::H => squares_series(25, prec, |_| true),
        GenName::D => squares_series(1, prec, |n| n % 5 != 0),
        GenName::R => {
            let mut s = BitSeries::zero(prec);
            for scale in [1usize, 2, 5, 10] {
                s = s.add(&all_squares_series(scale, prec));
            }
            s
        }
        GenName::Cbar => cbar(prec),
    }
}

/// sum over odd n with keep(n) of x^(scale * n^2).
fn squares_series(scale: usize, prec: usize, keep: impl Fn(usize) -> bool) -> BitSeries {
    let mut exps = Vec::new();
    let mut n = 1usize;
    while scale * n * n < prec {
        if keep(n) {
            exps.push(scale * n * n);
        }
        n += 2;
    }
    BitSeries::from_exponents(exps, prec).expect("exponents bounded by construction")
}

/// sum over all n >= 1 of x^(scale * n^2).
fn all_squares_series(scale: usize, prec: usize) -> BitSeries {
    let mut exps = Vec::new();
    let mut n = 1usize;
    while scale * n * n < prec {
        exps.push(scale * n * n);
        n += 1;
    }
    BitSeries::from_exponents(exps, prec).expect("exponents bounded by construction")
}

/// x * prod (1+x^(4n))(1+x^(20n)): the weight-2 eta product reduced mod 2
/// via (1+t)^4 = 1+t^4.
fn cbar(prec: usize) -> BitSeries {
    let mut acc = match BitSeries::monomial(1, prec) {
        Ok(s) => s,
        Err(_) => return BitSeries::zero(prec), // prec = 1: the window misses x
    };
    for step in [4usize, 20] {
        let mut m = step;
        while m < prec {
            acc = acc.mul_one_plus_power(m);
            m += step;
        }
    }
    acc
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn validate_d_index(k: u64) -> Result<()> {
    if k == 0 || gcd(k, 10) != 1 {
        return Err(Error::BadIndex {
            k,
            why: "D-family indices satisfy k >= 1, gcd(k, 10) = 1",
        });
    }
    Ok(())
}

/// Smallest cached window; requests are rounded up to powers of two so that
/// precision growth rebuilds a chain O(log) times, not once per request.
const MIN_BUCKET: usize = 1024;

static DK_CACHE: LazyLock<Mutex<HashMap<u64, BitSeries>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// D_k on the window [0, prec).  Memoized; thread-safe; idempotent (higher
/// precision recomputation extends, never changes, earlier coefficients).
pub fn gen_dk(k: u64, prec: usize) -> Result<BitSeries> {
    validate_d_index(k)?;
    assert!(prec > 0);
    let mut cache = DK_CACHE.lock().unwrap();
    if let Some(s) = cache.get(&k) {
        if s.prec() >= prec {
            return Ok(s.truncated(prec));
        }
    }
    let bucket = prec.max(MIN_BUCKET).next_power_of_two();
    let r0 = k % 10;

    // Highest entry of the +10 chain below k already cached at this window.
    let mut chain_k = r0;
    let mut cur: Option<BitSeries> = None;
    let mut j = k;
    while j > 10 {
        j -= 10;
        if let Some(s) = cache.get(&j) {
            if s.prec() >= bucket {
                chain_k = j;
                cur = Some(s.truncated(bucket));
                break;
            }
        }
    }
    let mut cur = match cur {
        Some(s) => s,
        None => {
            let base = base_dk(r0, bucket);
            insert_if_wider(&mut cache, r0, &base);
            base
        }
    };
    if chain_k < k {
        let g_sq = all_odd_squares(10, bucket);
        while chain_k < k {
            chain_k += 10;
            cur = cur.mul(&g_sq).truncated(bucket);
            insert_if_wider(&mut cache, chain_k, &cur);
        }
    }
    Ok(cur.truncated(prec))
}

fn insert_if_wider(cache: &mut HashMap<u64, BitSeries>, k: u64, s: &BitSeries) {
    match cache.get(&k) {
        Some(old) if old.prec() >= s.prec() => {}
        _ => {
            cache.insert(k, s.clone());
        }
    }
}

/// G^2 = sum x^(10 n^2) over odd n — the sparse chain multiplier.
fn all_odd_squares(scale: usize, prec: usize) -> BitSeries {
    squares_series(scale, prec, |_| true)
}

/// D_1, D_3, D_7, D_9 on the window [0, prec).
fn base_dk(r0: u64, prec: usize) -> BitSeries {
    let d = gen(GenName::D, prec);
    match r0 {
        1 => d,
        3 => {
            // D^8 / G needs the numerator past the divisor valuation.
            let inner = (prec + 5).div_ceil(8).max(1);
            let d8 = gen(GenName::D, inner).pow(8).truncated(prec + 5);
            let g = gen(GenName::G, prec + 5);
            d8.divide_exact(&g)
                .expect("val(D^8) = 8 >= 5 = val(G)")
                .truncated(prec)
        }
        7 => d.square().mul(&gen(GenName::G, prec)).truncated(prec),
        9 => d
            .square()
            .square()
            .mul(&gen(GenName::G, prec))
            .truncated(prec),
        _ => unreachable!("validated index"),
    }
}

/// J_k (k odd) on the window [0, prec): J_1 = F, J_3 = F^8/G, J_5 = G,
/// J_7 = F^2 G, J_9 = F^4 G, J_{k+10} = G^2 J_k.  Not cached: the family is
/// only consulted at small k.
pub fn gen_jk(k: u64, prec: usize) -> Result<BitSeries> {
    if k == 0 || k % 2 == 0 {
        return Err(Error::BadIndex {
            k,
            why: "J-family indices are odd and positive",
        });
    }
    assert!(prec > 0);
    let r0 = k % 10;
    let m = ((k - r0) / 10) as u32;
    let f = gen(GenName::F, prec);
    let base = match r0 {
        1 => f,
        3 => {
            let inner = (prec + 5).div_ceil(8).max(1);
            let f8 = gen(GenName::F, inner).pow(8).truncated(prec + 5);
            let g = gen(GenName::G, prec + 5);
            f8.divide_exact(&g)
                .expect("val(F^8) = 8 >= 5 = val(G)")
                .truncated(prec)
        }
        5 => gen(GenName::G, prec),
        7 => f.square().mul(&gen(GenName::G, prec)).truncated(prec),
        9 => f
            .square()
            .square()
            .mul(&gen(GenName::G, prec))
            .truncated(prec),
        _ => unreachable!("k odd"),
    };
    if m == 0 {
        return Ok(base);
    }
    let shift = all_odd_squares(10, prec).pow(m);
    Ok(base.mul(&shift).truncated(prec))
}

/// Which family a combination's indices refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    D,
    J,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::D => write!(f, "D"),
            Family::J => write!(f, "J"),
        }
    }
}

/// A finite GF(2) sum of basis series, kept as the set of surviving indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Combination {
    family: Family,
    indices: BTreeSet<u64>,
}

impl Combination {
    pub fn empty(family: Family) -> Self {
        Combination {
            family,
            indices: BTreeSet::new(),
        }
    }

    pub fn d<I: IntoIterator<Item = u64>>(indices: I) -> Self {
        let mut c = Combination::empty(Family::D);
        for k in indices {
            c.toggle(k);
        }
        c
    }

    pub fn j<I: IntoIterator<Item = u64>>(indices: I) -> Self {
        let mut c = Combination::empty(Family::J);
        for k in indices {
            c.toggle(k);
        }
        c
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.indices.iter().copied()
    }

    pub fn index_set(&self) -> &BTreeSet<u64> {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, k: u64) -> bool {
        self.indices.contains(&k)
    }

    /// GF(2) addition of a single basis element.
    pub fn toggle(&mut self, k: u64) {
        if !self.indices.remove(&k) {
            self.indices.insert(k);
        }
    }

    pub fn min_index(&self) -> Option<u64> {
        self.indices.first().copied()
    }

    pub fn max_index(&self) -> Option<u64> {
        self.indices.last().copied()
    }

    /// The series this combination denotes, on the window [0, prec).
    pub fn to_series(&self, prec: usize) -> Result<BitSeries> {
        let mut acc = BitSeries::zero(prec);
        for &k in &self.indices {
            let basis = match self.family {
                Family::D => gen_dk(k, prec)?,
                Family::J => gen_jk(k, prec)?,
            };
            acc = acc.add(&basis);
        }
        Ok(acc)
    }
}

impl std::ops::BitXorAssign<&Combination> for Combination {
    fn bitxor_assign(&mut self, rhs: &Combination) {
        assert_eq!(self.family, rhs.family, "cannot mix basis families");
        for &k in &rhs.indices {
            self.toggle(k);
        }
    }
}

impl std::ops::BitXor for &Combination {
    type Output = Combination;

    fn bitxor(self, rhs: &Combination) -> Combination {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl fmt::Display for Combination {
    /// Text form `D[1,21,43]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.family)?;
        for (i, k) in self.indices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for Combination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (family, rest) = if let Some(r) = compact.strip_prefix("D[") {
            (Family::D, r)
        } else if let Some(r) = compact.strip_prefix("J[") {
            (Family::J, r)
        } else {
            return Err(Error::Parse(format!("expected D[...] or J[...], got {s:?}")));
        };
        let inner = rest
            .strip_suffix(']')
            .ok_or_else(|| Error::Parse("missing closing ']'".into()))?;
        let mut indices = BTreeSet::new();
        if !inner.is_empty() {
            for tok in inner.split(',') {
                let k: u64 = tok
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad index {tok:?}: {e}")))?;
                indices.insert(k);
            }
        }
        Ok(Combination { family, indices })
    }
}

/// Write f as a sum of D_k by greedy leading-term elimination.
///
/// D_k = x^k + ... is the only basis element with valuation k, so at each
/// step the leading exponent of the remainder names the next index.  Errors:
/// a leading exponent with gcd(e, 10) != 1 means f is outside W; an index in
/// the upper half of the window means the window is too short to certify
/// that the reduction terminates rather than being cut off, and the caller
/// should retry wider.
pub fn decompose_w(f: &BitSeries) -> Result<Combination> {
    let prec = f.prec();
    let mut rem = f.clone();
    let mut found = Combination::empty(Family::D);
    while let Some(e) = rem.val() {
        if gcd(e as u64, 10) != 1 {
            return Err(Error::NotInW { exponent: e });
        }
        if 2 * e >= prec {
            return Err(Error::InsufficientPrecision { index: e, prec });
        }
        found.toggle(e as u64);
        rem = rem.add(&gen_dk(e as u64, prec)?);
    }
    Ok(found)
}

/// One identity verified coefficientwise on a shared window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    /// Length of the window on which both sides were compared.
    pub window: usize,
    /// First differing exponent, None when the identity held throughout.
    pub first_bad: Option<usize>,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.first_bad.is_none()
    }

    fn of(name: &'static str, lhs: &BitSeries, rhs: &BitSeries) -> Self {
        IdentityCheck {
            name,
            window: lhs.prec().min(rhs.prec()),
            first_bad: lhs.first_difference(rhs),
        }
    }

    fn vanishes(name: &'static str, lhs: &BitSeries) -> Self {
        IdentityCheck {
            name,
            window: lhs.prec(),
            first_bad: lhs.val(),
        }
    }
}

/// The full polynomial-identity suite among the generators, each side
/// expanded independently and compared coefficient by coefficient out to
/// (at least) the requested window.
pub fn verify_identities(prec: usize) -> Result<Vec<IdentityCheck>> {
    assert!(prec >= 64, "identity suite needs a nontrivial window");
    // Divisions by G and odd-power chains shave a few coefficients off the
    // working window; pad so every comparison still covers [0, prec).
    let prec = prec + 64;
    let f = gen(GenName::F, prec);
    let g = gen(GenName::G, prec);
    let r = gen(GenName::R, prec);
    let d = gen(GenName::D, prec);
    let cb = gen(GenName::Cbar, prec);
    let one = BitSeries::one(prec);
    let r1 = r.add(&one);

    let mut out = Vec::new();

    // (F+G)^6 = F G
    out.push(IdentityCheck::of(
        "fg-sixth-power",
        &f.add(&g).pow(6),
        &f.mul(&g),
    ));
    // F = r (r+1)^5, G = r^5 (r+1)
    out.push(IdentityCheck::of("f-from-r", &f, &r.mul(&r1.pow(5))));
    out.push(IdentityCheck::of("g-from-r", &g, &r.pow(5).mul(&r1)));
    // Cbar = r^2 + r
    out.push(IdentityCheck::of("cbar-from-r", &cb, &r.square().add(&r)));
    // D^15 + G^4 D^3 + G^3 = 0
    let lhs = d
        .pow(15)
        .add(&g.pow(4).mul(&d.pow(3)))
        .add(&g.pow(3));
    out.push(IdentityCheck::vanishes("d-degree15", &lhs));
    // (D^5/G)^4 + D^5/G = D^8
    let d5g = d.pow(5).divide_exact(&g)?;
    out.push(IdentityCheck::of(
        "d5-over-g",
        &d5g.pow(4).add(&d5g),
        &d.pow(8),
    ));
    // Modular equations: A^4 + B^4 + A B = 0 at (F(x^3), F) and (G(x^3), G)
    for (name, b) in [("level3-f", &f), ("level3-g", &g)] {
        let a = b.substitute_power(3).truncated(prec);
        let lhs = a.pow(4).add(&b.pow(4)).add(&a.mul(b));
        out.push(IdentityCheck::vanishes(name, &lhs));
    }
    // (A+B)^12 + A^6 B^2 + A^2 B^6 + A^9 B + A B^9 + A^3 B^3 + A B = 0
    // at (F(x^11), F)
    {
        let a = f.substitute_power(11).truncated(prec);
        let b = &f;
        let lhs = a
            .add(b)
            .pow(12)
            .add(&a.pow(6).mul(&b.square()))
            .add(&a.square().mul(&b.pow(6)))
            .add(&a.pow(9).mul(b))
            .add(&a.mul(&b.pow(9)))
            .add(&a.pow(3).mul(&b.pow(3)))
            .add(&a.mul(b));
        out.push(IdentityCheck::vanishes("level11-f", &lhs));
    }
    // Character projections of F (F+G)^4 and F G^2 (F+G)^4.
    {
        let base = f.mul(&f.add(&g).pow(4));
        let d10g = d.pow(10).divide_exact(&g)?;
        out.push(IdentityCheck::of(
            "proj-a-f4g",
            &hecke::project(&base, Projection::Pa),
            &d10g.add(&g),
        ));
        out.push(IdentityCheck::of(
            "proj-b-f4g",
            &hecke::project(&base, Projection::Pb),
            &d.pow(5).add(&g),
        ));
        let weighted = base.mul(&g.square()).truncated(prec);
        out.push(IdentityCheck::of(
            "proj-a-f4g-weighted",
            &hecke::project(&weighted, Projection::Pa),
            &d.pow(5).mul(&g.square()).add(&g.pow(3)),
        ));
        out.push(IdentityCheck::of(
            "proj-b-f4g-weighted",
            &hecke::project(&weighted, Projection::Pb),
            &d.pow(10).mul(&g).add(&g.pow(3)),
        ));
    }
    Ok(out)
}
