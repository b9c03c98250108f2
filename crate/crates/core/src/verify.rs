//! A registry of named consistency checks over the whole engine.
//!
//! Every structural fact the other modules rely on — the polynomial
//! identities among the generators, the frozen T_3 and T_11 columns, the
//! dihedral description of ker T_3, the adapted-basis relations, the
//! congruence grading and descent of Hecke columns, the twist identities,
//! and the monotonicity of the pair code — appears here as a `CheckDef`
//! with a stable kebab-case name.  Each check recomputes its statement
//! from scratch at a configurable scope and either passes or reports the
//! first counterexample it found.
//!
//! The registry is the single inventory: callers iterate [`registry`] (or
//! one [`CheckGroup`]) rather than hand-listing checks, and a meta-test
//! scans the crate sources for `pub fn check_*` / `*_check` functions and
//! fails if any of them is not wired into some entry's `covers` list.  A
//! new invariant therefore cannot be added silently.
//!
//! Randomized checks (the twist identities) draw their sample series from
//! a fixed-seed splitmix64 stream, so every run over the same
//! [`CheckConfig`] examines identical inputs and produces identical
//! output.

use serde::Serialize;

use crate::code::{self, PairCode};
use crate::error::{Error, Result};
use crate::forms::{self, Combination, GenName};
use crate::hecke::{self, HeckePrime};
use crate::quadideals::{self, ThetaTable};
use crate::series::BitSeries;
use crate::structure::{self, Operator, SpaceKind};
use crate::xypoly::XyPoly;

/// Which family of statements a check belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckGroup {
    /// Polynomial identities among the generating series.
    Identities,
    /// Frozen Hecke columns and the index recursion that reproduces them.
    Tables,
    /// The dihedral kernel of T_3 and its quadratic-lattice description.
    Di,
    /// The adapted basis, pullback basis and Hecke-algebra structure.
    Structure,
    /// Gradings, descent, twists and coding-order properties.
    Properties,
}

impl CheckGroup {
    pub fn label(self) -> &'static str {
        match self {
            CheckGroup::Identities => "identities",
            CheckGroup::Tables => "tables",
            CheckGroup::Di => "di",
            CheckGroup::Structure => "structure",
            CheckGroup::Properties => "properties",
        }
    }
}

/// Shared scope knobs for a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckConfig {
    /// Window length for series-level comparisons.
    pub prec: usize,
    /// Which W_a(q) slice the dihedral checks work in; a power of two.
    pub q: u32,
    /// Depth of the adapted basis (pairs with a + b < depth).
    pub depth: u32,
}

impl CheckConfig {
    /// Scope bounds below which several statements degenerate.
    pub fn validate(&self) -> Result<()> {
        if self.prec < 64 {
            return Err(Error::Parse(format!(
                "window {} is too short; need at least 64",
                self.prec
            )));
        }
        if self.q == 0 || !self.q.is_power_of_two() {
            return Err(Error::Parse(format!("q = {} is not a power of two", self.q)));
        }
        if self.depth == 0 {
            return Err(Error::Parse("depth must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            prec: 4096,
            q: 2,
            depth: 8,
        }
    }
}

/// One named invariant and the code that re-derives it.
pub struct CheckDef {
    pub name: &'static str,
    pub group: CheckGroup,
    /// One-line statement of what is being verified.
    pub about: &'static str,
    /// Names of the `pub fn` invariant-checkers this entry exercises,
    /// audited by the registry meta-test.
    pub covers: &'static [&'static str],
    run: fn(&CheckConfig) -> Result<()>,
}

impl CheckDef {
    pub fn run(&self, cfg: &CheckConfig) -> CheckOutcome {
        let detail = match (self.run)(cfg) {
            Ok(()) => None,
            Err(e) => Some(e.to_string()),
        };
        CheckOutcome {
            name: self.name,
            group: self.group,
            passed: detail.is_none(),
            detail,
        }
    }
}

/// The result of running one check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub group: CheckGroup,
    pub passed: bool,
    /// First counterexample, present exactly when the check failed.
    pub detail: Option<String>,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.passed {
            write!(f, "ok   {}", self.name)
        } else {
            write!(
                f,
                "FAIL {}: {}",
                self.name,
                self.detail.as_deref().unwrap_or("unexplained")
            )
        }
    }
}

/// Every registered check, in reporting order.
pub fn registry() -> &'static [CheckDef] {
    &REGISTRY
}

/// Look a check up by its stable name.
pub fn find(name: &str) -> Option<&'static CheckDef> {
    REGISTRY.iter().find(|d| d.name == name)
}

/// Run one group, or everything when `group` is `None`.
pub fn run_selected(group: Option<CheckGroup>, cfg: &CheckConfig) -> Vec<CheckOutcome> {
    REGISTRY
        .iter()
        .filter(|d| group.is_none_or(|g| d.group == g))
        .map(|d| d.run(cfg))
        .collect()
}

static REGISTRY: [CheckDef; 20] = [
    CheckDef {
        name: "generator-identities",
        group: CheckGroup::Identities,
        about: "polynomial identities among F, G, r, D and the modular equations",
        covers: &["verify_identities"],
        run: run_identities,
    },
    CheckDef {
        name: "t3-seed-columns",
        group: CheckGroup::Tables,
        about: "T_3 on D_k matches the sixteen frozen seed columns",
        covers: &[],
        run: run_t3_seeds,
    },
    CheckDef {
        name: "t11-golden-columns",
        group: CheckGroup::Tables,
        about: "T_11 on D_k matches the frozen columns for k < 120",
        covers: &[],
        run: run_t11_golden,
    },
    CheckDef {
        name: "t3-recursion-oracle",
        group: CheckGroup::Tables,
        about: "the index recursion reproduces T_3 columns computed from series",
        covers: &["tk_oracle"],
        run: run_t3_recursion,
    },
    CheckDef {
        name: "class-group-structure",
        group: CheckGroup::Di,
        about: "ideal classes mod squares form one cycle of length 4q",
        covers: &["class_power_table"],
        run: run_class_group,
    },
    CheckDef {
        name: "dihedral-kernel-basis",
        group: CheckGroup::Di,
        about: "theta series of class powers span ker T_3 on W_a(q)",
        covers: &["di_basis"],
        run: run_dihedral_basis,
    },
    CheckDef {
        name: "t7-tridiagonal-ladder",
        group: CheckGroup::Di,
        about: "T_7 walks the class cycle one step each way",
        covers: &["apply_tp_int", "cheb_u"],
        run: run_t7_ladder,
    },
    CheckDef {
        name: "ideal-enumeration",
        group: CheckGroup::Di,
        about: "ideal labels agree with Hermite normal forms and are choice-free",
        covers: &["enumeration_matches_hnf", "label_choice_is_immaterial"],
        run: run_ideal_enumeration,
    },
    CheckDef {
        name: "theta-parity",
        group: CheckGroup::Di,
        about: "lattice point counts have the predicted parity",
        covers: &["lattice_parity_check"],
        run: run_theta_parity,
    },
    CheckDef {
        name: "adapted-basis-relations",
        group: CheckGroup::Structure,
        about: "the adapted basis shifts by one under X and Y and acts faithfully",
        covers: &["check_faithfulness"],
        run: run_adapted_basis,
    },
    CheckDef {
        name: "x-kernel-dihedral",
        group: CheckGroup::Structure,
        about: "ker X on W_a(q) is the dihedral span, joint kernel is the line through D",
        covers: &[
            "check_x_kernel_is_dihedral",
            "check_xy_kernel_trivial",
            "check_di_filtration",
        ],
        run: run_x_kernel,
    },
    CheckDef {
        name: "filtration-maps",
        group: CheckGroup::Structure,
        about: "X maps S_{m+1} onto S_m, Y into it, and T_11^2 two steps down",
        covers: &["check_x_onto_sm", "check_y_into_sm", "check_t11sq_onto_sm"],
        run: run_filtration,
    },
    CheckDef {
        name: "t11-pullback",
        group: CheckGroup::Structure,
        about: "T_11 drops leading indices by a fixed residue step and pulls back",
        covers: &["check_t11_leading_bijection"],
        run: run_pullback,
    },
    CheckDef {
        name: "epsilon-injective",
        group: CheckGroup::Structure,
        about: "no odd-part element is killed by both the series part and T_11",
        covers: &["check_epsilon_injective"],
        run: run_epsilon,
    },
    CheckDef {
        name: "hecke-expression",
        group: CheckGroup::Structure,
        about: "every T_p is r + t*eps with t = 0 on split p and t maximal-ideal-free",
        covers: &[],
        run: run_expression,
    },
    CheckDef {
        name: "lambda-square",
        group: CheckGroup::Structure,
        about: "T_11 squared agrees with multiplication by lambda squared",
        covers: &[],
        run: run_lambda_square,
    },
    CheckDef {
        name: "congruence-grading",
        group: CheckGroup::Properties,
        about: "T_p columns stay in the residue classes pk, 9pk mod 40",
        covers: &["check_congruence_grading"],
        run: run_grading,
    },
    CheckDef {
        name: "hecke-descent",
        group: CheckGroup::Properties,
        about: "T_p columns only involve strictly smaller indices",
        covers: &["check_descent"],
        run: run_descent,
    },
    CheckDef {
        name: "twist-identities",
        group: CheckGroup::Properties,
        about: "T_3 and T_11 obey their two-term twist recurrences on random series",
        covers: &["check_t3_twist", "check_t11_twist"],
        run: run_twists,
    },
    CheckDef {
        name: "code-order",
        group: CheckGroup::Properties,
        about: "the pair code is monotone for the precedence order and round-trips",
        covers: &["check_code_monotonic", "check_pair_roundtrip"],
        run: run_code_order,
    },
];

// ---------------------------------------------------------------------------
// Frozen data
// ---------------------------------------------------------------------------

/// T_3 on D_k for the sixteen seed indices, frozen independently of the
/// recursion that extends them.
const T3_SEED_COLUMNS: [(u64, &[u64]); 16] = [
    (1, &[]),
    (3, &[1]),
    (7, &[]),
    (9, &[3]),
    (21, &[7]),
    (23, &[21]),
    (27, &[9]),
    (29, &[23]),
    (41, &[]),
    (43, &[41]),
    (47, &[21]),
    (49, &[43, 27]),
    (61, &[47, 23]),
    (63, &[61, 29, 21]),
    (67, &[49, 41]),
    (69, &[63, 47, 23]),
];

/// T_11 on D_k for every index k < 120 on which it can act nontrivially:
/// the six columns with k = 9 mod 20 and the twenty-four columns on the
/// odd part, grouped here by residue class mod 20.
const T11_GOLDEN_COLUMNS: [(u64, &[u64]); 30] = [
    // k = 9 mod 20
    (9, &[]),
    (29, &[]),
    (49, &[19, 11]),
    (69, &[39, 31]),
    (89, &[11]),
    (109, &[39]),
    // k = 11 mod 20
    (11, &[1]),
    (31, &[21]),
    (51, &[41, 9]),
    (71, &[61, 29]),
    (91, &[81, 41, 9]),
    (111, &[101, 61, 21]),
    // k = 19 mod 20
    (19, &[9]),
    (39, &[29]),
    (59, &[49, 9]),
    (79, &[69, 29]),
    (99, &[89, 49, 9]),
    (119, &[109, 69, 29, 21]),
    // k = 13 mod 20
    (13, &[7]),
    (33, &[27, 3]),
    (53, &[47]),
    (73, &[67, 43, 27]),
    (93, &[87, 47]),
    (113, &[107, 83, 67, 43, 27]),
    // k = 17 mod 20
    (17, &[3]),
    (37, &[23, 7]),
    (57, &[43]),
    (77, &[63, 47, 23, 7]),
    (97, &[83, 43]),
    (117, &[103, 87, 63, 47, 23]),
];

/// The twist expansion of T_11 against the 24th power of G:
/// T_11(u G^24) = sum over (i, j) of G^{2i} T_11(u G^{2j}).
const T11_TWIST_PAIRS: [(u32, u32); 9] = [
    (12, 0),
    (8, 4),
    (4, 8),
    (6, 2),
    (2, 6),
    (9, 1),
    (1, 9),
    (3, 3),
    (1, 1),
];

/// Primes coprime to 10 used by the grading, descent and expression sweeps.
const SWEEP_PRIMES: [u64; 8] = [3, 7, 11, 13, 17, 19, 23, 29];

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

fn run_identities(cfg: &CheckConfig) -> Result<()> {
    for check in forms::verify_identities(cfg.prec)? {
        if let Some(n) = check.first_bad {
            return Err(Error::inconsistent(format!(
                "identity {} fails first at x^{n}",
                check.name
            )));
        }
    }
    Ok(())
}

fn expect_column(p: u64, k: u64, expected: &[u64]) -> Result<()> {
    let got = hecke::tp_on_dk(p, k)?;
    let want = Combination::d(expected.iter().copied());
    if got != want {
        return Err(Error::inconsistent(format!(
            "T_{p}(D_{k}) = {got}, expected {want}"
        )));
    }
    Ok(())
}

fn run_t3_seeds(_cfg: &CheckConfig) -> Result<()> {
    for (k, expected) in T3_SEED_COLUMNS {
        expect_column(3, k, expected)?;
    }
    Ok(())
}

fn run_t11_golden(_cfg: &CheckConfig) -> Result<()> {
    for (k, expected) in T11_GOLDEN_COLUMNS {
        expect_column(11, k, expected)?;
    }
    Ok(())
}

fn run_t3_recursion(_cfg: &CheckConfig) -> Result<()> {
    for k in (1..1200).filter(|k| matches!(k % 20, 1 | 3 | 7 | 9)) {
        let fast = structure::tk_oracle(k)?;
        let slow = hecke::tp_on_dk(3, k)?;
        if fast != slow {
            return Err(Error::inconsistent(format!(
                "recursion gives T_3(D_{k}) = {fast}, series give {slow}"
            )));
        }
    }
    Ok(())
}

fn run_class_group(cfg: &CheckConfig) -> Result<()> {
    // The table constructor itself validates closure, bijectivity and the
    // position of the ambiguous class; run it on 1 and on the configured q.
    quadideals::class_power_table(1)?;
    quadideals::class_power_table(u64::from(cfg.q))?;
    Ok(())
}

fn dihedral_prec(q: u64) -> usize {
    2 * (40 * q * q) as usize + 64
}

fn run_dihedral_basis(cfg: &CheckConfig) -> Result<()> {
    let q = u64::from(cfg.q);
    let bound = 40 * q * q;
    let prec = dihedral_prec(q);
    let basis = quadideals::di_basis(q, prec)?;
    if basis.len() != 2 * q as usize {
        return Err(Error::inconsistent(format!(
            "kernel family has {} members, expected {}",
            basis.len(),
            2 * q
        )));
    }
    if basis[0] != Combination::d([1]) {
        return Err(Error::inconsistent(format!(
            "alpha_0 decomposes as {}, expected D[1]",
            basis[0]
        )));
    }
    for (i, v) in basis.iter().enumerate() {
        let image = hecke::tp_on_combination(3, v)?;
        if !image.is_empty() {
            return Err(Error::inconsistent(format!(
                "T_3(alpha_{i}) = {image}, expected 0"
            )));
        }
    }
    let table = ThetaTable::new(q, prec)?;
    // The ambiguous class sits opposite the identity: theta(C^{2q}) is even
    // everywhere, and its half carries the top element D_{40q^2+1}.
    if !table.alpha(2 * q).is_zero() {
        return Err(Error::inconsistent(
            "theta of the ambiguous class is not even everywhere".to_string(),
        ));
    }
    for i in 0..=2 * q {
        if !table.alpha(i).eq_window(&table.alpha(4 * q - i)) {
            return Err(Error::inconsistent(format!(
                "alpha_{i} differs from alpha_{}",
                4 * q - i
            )));
        }
    }
    let top = forms::decompose_w(&table.amb_halved()?)?;
    if top != Combination::d([bound + 1]) {
        return Err(Error::inconsistent(format!(
            "half the ambiguous theta decomposes as {top}, expected D[{}]",
            bound + 1
        )));
    }
    Ok(())
}

fn run_t7_ladder(cfg: &CheckConfig) -> Result<()> {
    let q = u64::from(cfg.q);
    let prec = dihedral_prec(q);
    let basis = quadideals::di_basis(q, prec)?;
    let top = Combination::d([40 * q * q + 1]);

    // Integral tridiagonality: T_7 sends theta(C^i) to the sum of the two
    // cyclic neighbours, uniformly over all 4q classes.
    let table = ThetaTable::new(q, prec)?;
    let m = 4 * q;
    for i in 0..m {
        let out = quadideals::apply_tp_int(7, table.theta_counts(i))?;
        let left = table.theta_counts((i + m - 1) % m);
        let right = table.theta_counts((i + 1) % m);
        for (n, &v) in out.iter().enumerate() {
            if v != left[n] + right[n] {
                return Err(Error::inconsistent(format!(
                    "integral T_7 on theta(C^{i}) differs from its neighbours at x^{n}"
                )));
            }
        }
    }

    // Mod 2, on the kernel family: interior elements split both ways, the
    // last one only downward (alpha_{2q} = 0), and the top element above
    // the family lands on alpha_{2q-1}.
    let n = basis.len();
    for i in 1..n {
        let image = hecke::tp_on_combination(7, &basis[i])?;
        let mut want = basis[i - 1].clone();
        if i + 1 < n {
            want ^= &basis[i + 1];
        }
        if image != want {
            return Err(Error::inconsistent(format!(
                "T_7(alpha_{i}) = {image}, expected {want}"
            )));
        }
    }
    let from_top = hecke::tp_on_combination(7, &top)?;
    if from_top != basis[n - 1] {
        return Err(Error::inconsistent(format!(
            "T_7 on the top element gives {from_top}, expected alpha_{}",
            n - 1
        )));
    }

    // The whole ladder in closed form: alpha_{2q-i} = U_i(Y) applied to the
    // top element, down to U_{2q}(Y) landing on alpha_0 = D.
    for i in 1..=n as u64 {
        let rung = quadideals::cheb_u(i).apply(&top)?;
        let want = &basis[n - i as usize];
        if rung != *want {
            return Err(Error::inconsistent(format!(
                "U_{i}(Y) on the top element gives {rung}, expected {want}"
            )));
        }
    }
    Ok(())
}

fn run_ideal_enumeration(cfg: &CheckConfig) -> Result<()> {
    quadideals::enumeration_matches_hnf(400)?;
    quadideals::label_choice_is_immaterial(u64::from(cfg.q), 200)?;
    Ok(())
}

fn run_theta_parity(_cfg: &CheckConfig) -> Result<()> {
    quadideals::lattice_parity_check(1200)
}

fn run_adapted_basis(cfg: &CheckConfig) -> Result<()> {
    let ab = structure::adapted_basis(cfg.depth)?;
    structure::check_faithfulness(&ab)
}

fn run_x_kernel(cfg: &CheckConfig) -> Result<()> {
    structure::check_x_kernel_is_dihedral(cfg.q)?;
    structure::check_xy_kernel_trivial(cfg.q)?;
    structure::check_di_filtration(cfg.q)
}

fn run_filtration(cfg: &CheckConfig) -> Result<()> {
    for m in 1..=cfg.depth {
        structure::check_x_onto_sm(m)?;
        structure::check_y_into_sm(m)?;
    }
    for m in 1..=cfg.depth.saturating_sub(2).max(1) {
        structure::check_t11sq_onto_sm(m)?;
    }
    Ok(())
}

fn run_pullback(cfg: &CheckConfig) -> Result<()> {
    structure::check_t11_leading_bijection(600)?;
    // The pullback basis actually pulls back: T_11 carries n_{a,b} to
    // m_{a,b}, and X, Y shift the n's exactly as they shift the m's.
    let ab = structure::adapted_basis(cfg.depth)?;
    let nb = structure::nb_basis(&ab)?;
    for (&(a, b), n) in &nb {
        let back = hecke::tp_on_combination(11, n)?;
        let m = ab.elem(a, b).expect("pair inside depth");
        if back != *m {
            return Err(Error::inconsistent(format!(
                "T_11 on the pullback at ({a},{b}) gives {back}, expected {m}"
            )));
        }
        let shifted = hecke::tp_on_combination(3, n)?;
        let want = if a > 0 {
            nb.get(&(a - 1, b)).cloned().expect("shift stays in depth")
        } else {
            Combination::empty(n.family())
        };
        if shifted != want {
            return Err(Error::inconsistent(format!(
                "X on the pullback at ({a},{b}) gives {shifted}, expected {want}"
            )));
        }
        let shifted = hecke::tp_on_combination(7, n)?;
        let want = if b > 0 {
            nb.get(&(a, b - 1)).cloned().expect("shift stays in depth")
        } else {
            Combination::empty(n.family())
        };
        if shifted != want {
            return Err(Error::inconsistent(format!(
                "Y on the pullback at ({a},{b}) gives {shifted}, expected {want}"
            )));
        }
    }
    Ok(())
}

fn run_epsilon(cfg: &CheckConfig) -> Result<()> {
    let lambda = structure::lambda_series(cfg.depth.max(2))?;
    let bound = 40 * u64::from(cfg.q) * u64::from(cfg.q);
    structure::check_epsilon_injective(bound, &lambda)
}

fn run_expression(cfg: &CheckConfig) -> Result<()> {
    let depth = cfg.depth.max(2);
    let e3 = structure::express_hecke(3, depth)?;
    if !e3.r().eq_truncated(&XyPoly::x(depth)) || !e3.t().is_zero() {
        return Err(Error::inconsistent(format!("T_3 expressed as {e3}, expected X")));
    }
    let e7 = structure::express_hecke(7, depth)?;
    if !e7.r().eq_truncated(&XyPoly::y(depth)) || !e7.t().is_zero() {
        return Err(Error::inconsistent(format!("T_7 expressed as {e7}, expected Y")));
    }
    let e11 = structure::express_hecke(11, depth)?;
    let lambda = structure::lambda_series(depth)?;
    if !e11.t().eq_truncated(&XyPoly::one(depth)) || !e11.r().eq_truncated(&lambda) {
        return Err(Error::inconsistent(format!(
            "T_11 expressed as {e11}, expected t = 1 and r = lambda"
        )));
    }
    let small = depth.min(5);
    for p in SWEEP_PRIMES.into_iter().filter(|&p| p > 11) {
        let e = structure::express_hecke(p, small)?;
        // Every T_p lies in the maximal ideal (X, Y, eps): the series part
        // has no constant term.  The odd part may be a unit: its constant
        // term is the x^p coefficient of D_11, i.e. the parity of the
        // number of ways to write p as 10a^2 + b^2, which the next check
        // recounts straight from the lattice.
        if e.r().constant_term() {
            return Err(Error::inconsistent(format!(
                "T_{p} expressed as {e}; its series part is a unit"
            )));
        }
        let prime = HeckePrime::new(p)?;
        if prime.chi() == 1 {
            if !e.t().is_zero() {
                return Err(Error::inconsistent(format!(
                    "T_{p} expressed as {e}; even-character primes have no odd part"
                )));
            }
        } else if e.t().constant_term() != odd_part_constant(p) {
            return Err(Error::inconsistent(format!(
                "T_{p} expressed as {e}; the odd part's constant term should be \
                 the representation parity {}",
                odd_part_constant(p)
            )));
        }
    }
    Ok(())
}

/// Parity of the number of pairs (a, b), a odd > 0, b > 0, with
/// 10a^2 + b^2 = p.  Since val(D_k) = k forces the constant term of the
/// odd part of T_p to be the x^p coefficient of D_11 = G^2 D, this parity
/// is that constant term; it is 0 unless p = 11, 19 mod 40.
fn odd_part_constant(p: u64) -> bool {
    let mut count = 0u32;
    let mut a = 1;
    while 10 * a * a < p {
        let rem = p - 10 * a * a;
        let b = rem.isqrt();
        if b * b == rem {
            count += 1;
        }
        a += 2;
    }
    count % 2 == 1
}

fn run_lambda_square(cfg: &CheckConfig) -> Result<()> {
    let depth = cfg.depth.max(2);
    let lambda = structure::lambda_series(depth)?;
    let square = lambda.square();
    // lambda is known below degree ceil(depth/2), so its square is known
    // below twice that and annihilation cuts everything of degree >= m.
    let m = square.trunc().min(8).max(2);
    let mat = structure::op_matrix(Operator::T11Sq, SpaceKind::Sm(m))?;
    for (j, &k) in mat.labels().iter().enumerate() {
        let by_poly = square.apply(&Combination::d([k]))?;
        if by_poly != *mat.column(j) {
            return Err(Error::inconsistent(format!(
                "T_11^2 and lambda^2 disagree on D_{k}: {} vs {}",
                mat.column(j),
                by_poly
            )));
        }
    }
    Ok(())
}

fn run_grading(_cfg: &CheckConfig) -> Result<()> {
    for p in SWEEP_PRIMES {
        structure::check_congruence_grading(p, 300)?;
    }
    Ok(())
}

fn run_descent(_cfg: &CheckConfig) -> Result<()> {
    for p in SWEEP_PRIMES {
        structure::check_descent(p, 300)?;
    }
    Ok(())
}

fn run_twists(cfg: &CheckConfig) -> Result<()> {
    let prec = cfg.prec.clamp(512, 4096);
    check_t3_twist(24, prec, 0x5eed_0001)?;
    check_t11_twist(24, prec, 0x5eed_0002)
}

fn run_code_order(_cfg: &CheckConfig) -> Result<()> {
    check_code_monotonic(32)?;
    check_pair_roundtrip(64, 4000)
}

// ---------------------------------------------------------------------------
// Reusable invariant checkers
// ---------------------------------------------------------------------------

/// Fixed-increment splitmix64, used so randomized checks are replayable.
struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

/// A series with independent fair-coin coefficients on [0, prec).
fn random_series(rng: &mut SplitMix, prec: usize) -> BitSeries {
    let mut exps = Vec::new();
    let mut word = 0u64;
    for n in 0..prec {
        if n % 64 == 0 {
            word = rng.next();
        }
        if (word >> (n % 64)) & 1 == 1 {
            exps.push(n);
        }
    }
    BitSeries::from_exponents(exps, prec).expect("exponents below prec by construction")
}

/// T_3(G^16 u) = G^16 T_3(u) + G^4 T_3(G^4 u) on `samples` random series.
pub fn check_t3_twist(samples: usize, prec: usize, seed: u64) -> Result<()> {
    let p3 = HeckePrime::new(3)?;
    let mut rng = SplitMix(seed);
    // G^16 has valuation 80; pad the generator window so products keep a
    // comparison window of at least prec/3 - 80.
    let g = forms::gen(GenName::G, prec + 160);
    let g4 = g.pow(4);
    let g16 = g.pow(16);
    for s in 0..samples {
        let u = random_series(&mut rng, prec);
        let lhs = hecke::apply_tp(&g16.mul(&u), &p3);
        let rhs = g16
            .mul(&hecke::apply_tp(&u, &p3))
            .add(&g4.mul(&hecke::apply_tp(&g4.mul(&u), &p3)));
        debug_assert!(lhs.prec().min(rhs.prec()) >= 64);
        if let Some(n) = lhs.first_difference(&rhs) {
            return Err(Error::inconsistent(format!(
                "T_3 twist identity fails on sample {s} at x^{n}"
            )));
        }
    }
    Ok(())
}

/// T_11(u G^24) expands over nine twisted pairs on `samples` random series.
pub fn check_t11_twist(samples: usize, prec: usize, seed: u64) -> Result<()> {
    let p11 = HeckePrime::new(11)?;
    let mut rng = SplitMix(seed);
    let g = forms::gen(GenName::G, prec + 240);
    let g24 = g.pow(24);
    for s in 0..samples {
        let u = random_series(&mut rng, prec);
        let lhs = hecke::apply_tp(&g24.mul(&u), &p11);
        let mut rhs = BitSeries::zero(lhs.prec());
        for (i, j) in T11_TWIST_PAIRS {
            let inner = hecke::apply_tp(&g.pow(2 * j).mul(&u), &p11);
            rhs = rhs.add(&g.pow(2 * i).mul(&inner));
        }
        debug_assert!(lhs.prec().min(rhs.prec()) >= 64);
        if let Some(n) = lhs.first_difference(&rhs) {
            return Err(Error::inconsistent(format!(
                "T_11 twist identity fails on sample {s} at x^{n}"
            )));
        }
    }
    Ok(())
}

/// Coding is monotone: a pair strictly preceding (0, b) gets a smaller index.
pub fn check_code_monotonic(bound: u32) -> Result<()> {
    for b in 0..bound {
        let later = PairCode::new(0, b);
        let kb = code::pair_to_k(later);
        for c in 0..bound {
            for d in 0..bound {
                let earlier = PairCode::new(c, d);
                if code::precedes(earlier, later) && code::pair_to_k(earlier) >= kb {
                    return Err(Error::inconsistent(format!(
                        "({c},{d}) precedes (0,{b}) but codes to {} >= {kb}",
                        code::pair_to_k(earlier)
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The pair code and its inverse are mutually inverse on both sides.
pub fn check_pair_roundtrip(bound: u32, kmax: u64) -> Result<()> {
    for a in 0..bound {
        for b in 0..bound {
            let pc = PairCode::new(a, b);
            let back = code::k_to_pair(code::pair_to_k(pc))?;
            if back != pc {
                return Err(Error::inconsistent(format!(
                    "({a},{b}) codes to {} which decodes to {back}",
                    code::pair_to_k(pc)
                )));
            }
        }
    }
    for k in (1..kmax).filter(|k| matches!(k % 20, 1 | 3 | 7 | 9)) {
        if code::pair_to_k(code::k_to_pair(k)?) != k {
            return Err(Error::inconsistent(format!(
                "index {k} does not survive decoding and re-coding"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    const SOURCES: [&str; 8] = [
        include_str!("series.rs"),
        include_str!("forms.rs"),
        include_str!("hecke.rs"),
        include_str!("code.rs"),
        include_str!("quadideals.rs"),
        include_str!("structure.rs"),
        include_str!("xypoly.rs"),
        include_str!("verify.rs"),
    ];

    fn declared_checkers() -> BTreeSet<String> {
        let mut found = BTreeSet::new();
        for src in SOURCES {
            for line in src.lines() {
                let Some(rest) = line.trim_start().strip_prefix("pub fn ") else {
                    continue;
                };
                let name: String = rest
                    .chars()
                    .take_while(|c| c.is_alphanumeric() || *c == '_')
                    .collect();
                if name.starts_with("check_")
                    || name.ends_with("_check")
                    || name == "verify_identities"
                {
                    found.insert(name);
                }
            }
        }
        found
    }

    #[test]
    fn every_invariant_function_is_registered() {
        let covered: BTreeSet<&str> = registry()
            .iter()
            .flat_map(|d| d.covers.iter().copied())
            .collect();
        for name in declared_checkers() {
            assert!(
                covered.contains(name.as_str()),
                "invariant checker `{name}` is not wired into the verify registry"
            );
        }
        // And no entry claims a function that does not exist.
        let all_src = SOURCES.concat();
        for def in registry() {
            for c in def.covers {
                assert!(
                    all_src.contains(&format!("fn {c}")),
                    "registry entry `{}` covers nonexistent `{c}`",
                    def.name
                );
            }
        }
    }

    #[test]
    fn registry_names_are_unique_and_groups_populated() {
        let names: BTreeSet<&str> = registry().iter().map(|d| d.name).collect();
        assert_eq!(names.len(), registry().len());
        for group in [
            CheckGroup::Identities,
            CheckGroup::Tables,
            CheckGroup::Di,
            CheckGroup::Structure,
            CheckGroup::Properties,
        ] {
            assert!(
                registry().iter().any(|d| d.group == group),
                "group {group:?} has no checks"
            );
        }
        assert!(find("generator-identities").is_some());
        assert!(find("no-such-check").is_none());
    }

    #[test]
    fn config_validation_bounds() {
        assert!(CheckConfig::default().validate().is_ok());
        let bad = CheckConfig { prec: 32, ..CheckConfig::default() };
        assert!(bad.validate().is_err());
        let bad = CheckConfig { q: 3, ..CheckConfig::default() };
        assert!(bad.validate().is_err());
        let bad = CheckConfig { depth: 0, ..CheckConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn outcome_lines_are_stable() {
        let cfg = CheckConfig { prec: 256, q: 1, depth: 3 };
        let out = find("t3-seed-columns").unwrap().run(&cfg);
        assert!(out.passed);
        assert_eq!(out.to_string(), "ok   t3-seed-columns");
        assert_eq!(
            serde_json::to_string(&out).unwrap(),
            r#"{"name":"t3-seed-columns","group":"tables","passed":true,"detail":null}"#
        );
    }

    #[test]
    fn spot_check_cheap_runners() {
        let cfg = CheckConfig { prec: 512, q: 1, depth: 4 };
        for name in [
            "generator-identities",
            "class-group-structure",
            "dihedral-kernel-basis",
            "t7-tridiagonal-ladder",
            "adapted-basis-relations",
            "hecke-expression",
            "lambda-square",
            "code-order",
        ] {
            let out = find(name).unwrap().run(&cfg);
            assert!(out.passed, "{name}: {:?}", out.detail);
        }
    }

    #[test]
    fn twist_identities_hold_on_random_series() {
        check_t3_twist(4, 600, 7).unwrap();
        check_t11_twist(4, 900, 11).unwrap();
    }

    #[test]
    fn code_order_holds_on_small_pairs() {
        check_code_monotonic(8).unwrap();
        check_pair_roundtrip(16, 500).unwrap();
    }
}
