//! Command-line front end for the exact mod-2 engine.
//!
//! Everything here is a thin, deterministic shell over the library: named
//! series and arithmetic on explicit windows (`series`), Hecke operators on
//! series and on the D_k basis (`hecke`, `decompose`), the (a, b) <-> k
//! coding (`code`), the ideal-class side in Z[sqrt(-10)] (`ideals`), the
//! Hecke-algebra structure layer (`structure`), and the named exactness
//! checks (`verify`).  Identical invocations produce byte-identical output;
//! JSON objects are emitted with sorted keys for golden-file diffing.
//!
//! Exit codes: 0 all requested computations/checks passed; 1 a mathematical
//! check failed or a computation could not be certified exact; 2 usage
//! error (bad flags or malformed operands).

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hecke5::code::{self, PairCode};
use hecke5::forms::{self, GenName};
use hecke5::hecke::{self, HeckePrime, Projection};
use hecke5::quadideals;
use hecke5::structure::{self, Operator, SpaceKind};
use hecke5::verify::{CheckConfig, CheckGroup};
use hecke5::BitSeries;

#[derive(Parser)]
#[command(
    name = "hecke5",
    version,
    about = "Exact GF(2) series, Hecke operators, and the shallow Hecke algebra at level 5",
    max_term_width = 100
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,

    #[command(subcommand)]
    command: Command,
}

/// Scope knobs shared across subcommands.  All computations are
/// deterministic; there is no seed anywhere.
#[derive(Args)]
struct RunConfig {
    /// Series window [0, prec) for generated operands (at least 64).
    #[arg(long, global = true, default_value_t = 4096)]
    prec: usize,

    /// Power of two selecting the slice W_a(q) (indices below 40q^2).
    #[arg(long, global = true, default_value_t = 2)]
    q: u32,

    /// Truncation depth M for adapted bases and Hecke-algebra expressions.
    #[arg(long = "depth", short = 'M', global = true, default_value_t = 8)]
    depth: u32,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

impl RunConfig {
    fn check_config(&self) -> CheckConfig {
        CheckConfig {
            prec: self.prec,
            q: self.q,
            depth: self.depth,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Named generating series and exact window arithmetic.
    #[command(subcommand)]
    Series(SeriesCmd),

    /// Hecke operators T_p on series and on the basis family D_k.
    #[command(subcommand)]
    Hecke(HeckeCmd),

    /// Write a series as an exact sum of basis elements D_k.
    Decompose {
        /// Series operand: a generator name (F, G, H, r, D, Cbar), a basis
        /// element D<k> or J<k>, or a literal `prec=N; exps=e1,e2,...`.
        expr: String,
    },

    /// The bijection (a, b) <-> k indexing the W_a basis.
    #[command(subcommand)]
    Code(CodeCmd),

    /// Ideals of Z[sqrt(-10)]: enumeration, theta series, the DI(q) basis.
    #[command(subcommand)]
    Ideals(IdealsCmd),

    /// The Hecke-algebra structure layer on W_a.
    #[command(subcommand)]
    Structure(StructureCmd),

    /// Run named exactness checks, in registry order.
    Verify {
        /// Which group of checks to run; `all` runs the entire registry.
        #[arg(value_enum)]
        suite: Suite,
    },
}

#[derive(Subcommand)]
enum SeriesCmd {
    /// Print one series operand on the window [0, prec).
    Gen {
        /// F, G, H, r, D, Cbar, D<k>, J<k>, or a literal `prec=N; exps=...`.
        expr: String,
    },

    /// One ring operation on series operands.
    Op {
        #[arg(value_enum)]
        op: SeriesOp,

        lhs: String,

        /// Second operand, required by add, mul, and divide.
        rhs: Option<String>,

        /// Substitution exponent for `substitute` (x -> x^k).
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesOp {
    /// lhs + rhs on the shared window.
    Add,
    /// lhs * rhs with the pessimistic product window.
    Mul,
    /// lhs^2, exact out to the doubled window.
    Square,
    /// lhs(x^k), exact out to k times the window.
    Substitute,
    /// Exact quotient lhs / rhs in GF(2)[[x]].
    Divide,
    /// Keep exponents with chi = +1.
    ProjectA,
    /// Keep exponents with chi = -1.
    ProjectB,
    /// Drop exponents divisible by 5.
    ProjectR,
}

#[derive(Subcommand)]
enum HeckeCmd {
    /// Apply T_p to a series; the output window is ceil(prec / p).
    Apply {
        /// A prime other than 2 and 5.
        #[arg(short, long)]
        p: u64,

        /// Series operand (same grammar as `series gen`).
        expr: String,
    },

    /// T_p(D_k) as an exact combination of basis elements.
    OnBasis {
        /// A prime other than 2 and 5.
        #[arg(short, long)]
        p: u64,

        /// Basis index, coprime to 10.
        #[arg(short, long)]
        k: u64,
    },
}

#[derive(Subcommand)]
enum CodeCmd {
    /// The basis index k coded by the pair (a, b).
    Pair2k { a: u32, b: u32 },

    /// The pair (a, b) coding the basis index k.
    K2pair { k: u64 },
}

#[derive(Subcommand)]
enum IdealsCmd {
    /// Every ideal of the given norm, principal and nonprincipal.
    Norm { n: u64 },

    /// The mod-2 theta series attached to the class C^i, C the class of
    /// the prime over 7.
    Theta { i: u64 },

    /// The basis alpha_0 .. alpha_{2q-1} of DI(q), decomposed in the D_k
    /// basis.  The window is widened automatically when --prec is too
    /// short to certify the decompositions.
    DiBasis,
}

#[derive(Subcommand)]
enum StructureCmd {
    /// A basis of ker(T_p) on the slice W_a(q); p must have chi(p) = +1.
    Kernel {
        #[arg(short, long, default_value_t = 3)]
        p: u64,
    },

    /// The adapted basis m_{a,b}, a + b < M, in precedence order.
    Adapted,

    /// T_p written as r(X, Y) + t(X, Y) eps with X = T_3, Y = T_7, to
    /// total degree below M.
    Express {
        #[arg(short, long)]
        p: u64,
    },

    /// The series lambda(X, Y) with T_11 = lambda + eps, to total degree
    /// below M.
    Lambda,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    /// Generator and modular-equation identities.
    Identities,
    /// Golden Hecke-image tables and their recursions.
    Tables,
    /// Theta series, Gauss classes, and the dihedral spaces DI(q).
    Di,
    /// Everything in the registry.
    All,
}

/// A failed run, split by exit code: usage errors (2) versus mathematical
/// or certification failures (1).
enum Failure {
    Usage(String),
    Math(String),
}

impl From<hecke5::Error> for Failure {
    fn from(e: hecke5::Error) -> Self {
        Failure::Math(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = cli.run.check_config().validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// Print a value in the requested format.  JSON goes through
/// `serde_json::Value`, whose object maps iterate in sorted key order, so
/// the byte stream is reproducible no matter how the structs declare their
/// fields.
fn emit<T: Serialize>(format: Format, value: &T, text: String) -> Result<(), Failure> {
    match format {
        Format::Text => println!("{text}"),
        Format::Json => {
            let v = serde_json::to_value(value)
                .map_err(|e| Failure::Math(format!("serialization failed: {e}")))?;
            println!("{}", serde_json::to_string_pretty(&v).expect("Value prints"));
        }
    }
    Ok(())
}

/// Series operand grammar: a named generator, a basis element D<k>/J<k>
/// realized on [0, prec), or a `prec=N; exps=...` literal carrying its own
/// window.
fn parse_operand(s: &str, prec: usize) -> Result<BitSeries, Failure> {
    if s.contains('=') {
        return BitSeries::from_str(s).map_err(|e| usage(format!("bad series literal: {e}")));
    }
    if let Ok(name) = s.parse::<GenName>() {
        return Ok(forms::gen(name, prec));
    }
    for (prefix, make) in [
        ("D", forms::gen_dk as fn(u64, usize) -> hecke5::Result<BitSeries>),
        ("J", forms::gen_jk as fn(u64, usize) -> hecke5::Result<BitSeries>),
    ] {
        if let Some(rest) = s.strip_prefix(prefix) {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let k: u64 = rest
                    .parse()
                    .map_err(|e| usage(format!("bad index in {s:?}: {e}")))?;
                return Ok(make(k, prec)?);
            }
        }
    }
    Err(usage(format!(
        "unrecognized series operand {s:?}; expected F, G, H, r, D, Cbar, D<k>, J<k>, \
         or a literal `prec=N; exps=...`"
    )))
}

fn validated_prime(p: u64) -> Result<HeckePrime, Failure> {
    HeckePrime::new(p).map_err(|e| usage(e.to_string()))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = &cli.run;
    match &cli.command {
        Command::Series(cmd) => run_series(cfg, cmd),
        Command::Hecke(cmd) => run_hecke(cfg, cmd),
        Command::Decompose { expr } => {
            let f = parse_operand(expr, cfg.prec)?;
            let c = forms::decompose_w(&f)?;
            emit(cfg.format, &c, c.to_string())
        }
        Command::Code(cmd) => run_code(cfg, cmd),
        Command::Ideals(cmd) => run_ideals(cfg, cmd),
        Command::Structure(cmd) => run_structure(cfg, cmd),
        Command::Verify { suite } => run_verify(cfg, *suite),
    }
}

fn run_series(cfg: &RunConfig, cmd: &SeriesCmd) -> Result<(), Failure> {
    match cmd {
        SeriesCmd::Gen { expr } => {
            let f = parse_operand(expr, cfg.prec)?;
            emit(cfg.format, &f, f.to_string())
        }
        SeriesCmd::Op { op, lhs, rhs, k } => {
            let a = parse_operand(lhs, cfg.prec)?;
            let binary = matches!(op, SeriesOp::Add | SeriesOp::Mul | SeriesOp::Divide);
            if binary != rhs.is_some() {
                return Err(usage(if binary {
                    "this operation takes two operands"
                } else {
                    "this operation takes one operand"
                }));
            }
            let out = match op {
                SeriesOp::Add => a.add(&parse_operand(rhs.as_ref().unwrap(), cfg.prec)?),
                SeriesOp::Mul => a.mul(&parse_operand(rhs.as_ref().unwrap(), cfg.prec)?),
                SeriesOp::Divide => a.divide_exact(&parse_operand(rhs.as_ref().unwrap(), cfg.prec)?)?,
                SeriesOp::Square => a.square(),
                SeriesOp::Substitute => {
                    if *k < 1 {
                        return Err(usage("--k must be at least 1"));
                    }
                    a.substitute_power(*k)
                }
                SeriesOp::ProjectA => hecke::project(&a, Projection::Pa),
                SeriesOp::ProjectB => hecke::project(&a, Projection::Pb),
                SeriesOp::ProjectR => hecke::project(&a, Projection::Pr),
            };
            emit(cfg.format, &out, out.to_string())
        }
    }
}

fn run_hecke(cfg: &RunConfig, cmd: &HeckeCmd) -> Result<(), Failure> {
    match cmd {
        HeckeCmd::Apply { p, expr } => {
            let prime = validated_prime(*p)?;
            let f = parse_operand(expr, cfg.prec)?;
            let out = hecke::apply_tp(&f, &prime);
            emit(cfg.format, &out, out.to_string())
        }
        HeckeCmd::OnBasis { p, k } => {
            validated_prime(*p)?;
            if k % 2 == 0 || k % 5 == 0 {
                return Err(usage(format!("basis index {k} must be coprime to 10")));
            }
            let c = hecke::tp_on_dk(*p, *k)?;
            emit(cfg.format, &c, c.to_string())
        }
    }
}

fn run_code(cfg: &RunConfig, cmd: &CodeCmd) -> Result<(), Failure> {
    let (pair, k) = match *cmd {
        CodeCmd::Pair2k { a, b } => {
            if a >= 1 << 16 || b >= 1 << 16 {
                return Err(usage("pair entries must fit in 16 bits"));
            }
            let pair = PairCode::new(a, b);
            (pair, code::pair_to_k(pair))
        }
        CodeCmd::K2pair { k } => (code::k_to_pair(k).map_err(|e| usage(e.to_string()))?, k),
    };
    let value = serde_json::json!({ "a": pair.a, "b": pair.b, "k": k });
    let text = match cmd {
        CodeCmd::Pair2k { .. } => k.to_string(),
        CodeCmd::K2pair { .. } => pair.to_string(),
    };
    emit(cfg.format, &value, text)
}

fn run_ideals(cfg: &RunConfig, cmd: &IdealsCmd) -> Result<(), Failure> {
    let q = u64::from(cfg.q);
    match *cmd {
        IdealsCmd::Norm { n } => {
            if n == 0 {
                return Err(usage("norms are positive"));
            }
            let list = quadideals::ideals_of_norm(n);
            let text = list.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("\n");
            emit(cfg.format, &list, text)
        }
        IdealsCmd::Theta { i } => {
            let f = quadideals::theta(i, q, cfg.prec)?;
            emit(cfg.format, &f, f.to_string())
        }
        IdealsCmd::DiBasis => {
            let needed = 2 * (40 * q * q) as usize + 64;
            let basis = quadideals::di_basis(q, cfg.prec.max(needed))?;
            let text = basis
                .iter()
                .enumerate()
                .map(|(i, c)| format!("alpha_{i} = {c}"))
                .collect::<Vec<_>>()
                .join("\n");
            emit(cfg.format, &basis, text)
        }
    }
}

fn run_structure(cfg: &RunConfig, cmd: &StructureCmd) -> Result<(), Failure> {
    match *cmd {
        StructureCmd::Kernel { p } => {
            validated_prime(p)?;
            if hecke::chi(p) != 1 {
                return Err(usage(format!(
                    "T_{p} does not stabilize W_a: chi({p}) = {}, need +1",
                    hecke::chi(p)
                )));
            }
            let kernel = structure::kernel_of_op(Operator::Tp(p), SpaceKind::Waq(cfg.q))?;
            let text = kernel.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("\n");
            emit(cfg.format, &kernel, text)
        }
        StructureCmd::Adapted => {
            let ab = structure::adapted_basis(cfg.depth)?;
            let rows: Vec<serde_json::Value> = ab
                .pairs()
                .iter()
                .map(|&(a, b)| {
                    let elem = ab.elem(a, b).expect("every pair below the depth is present");
                    serde_json::json!({
                        "a": a,
                        "b": b,
                        "indices": elem.indices().collect::<Vec<u64>>(),
                    })
                })
                .collect();
            let text = ab
                .pairs()
                .iter()
                .map(|&(a, b)| format!("m[{a},{b}] = {}", ab.elem(a, b).expect("present")))
                .collect::<Vec<_>>()
                .join("\n");
            emit(cfg.format, &rows, text)
        }
        StructureCmd::Express { p } => {
            validated_prime(p)?;
            let e = structure::express_hecke(p, cfg.depth)?;
            emit(cfg.format, &e, e.to_string())
        }
        StructureCmd::Lambda => {
            let lambda = structure::lambda_series(cfg.depth)?;
            emit(cfg.format, &lambda, lambda.to_string())
        }
    }
}

fn run_verify(cfg: &RunConfig, suite: Suite) -> Result<(), Failure> {
    let group = match suite {
        Suite::Identities => Some(CheckGroup::Identities),
        Suite::Tables => Some(CheckGroup::Tables),
        Suite::Di => Some(CheckGroup::Di),
        Suite::All => None,
    };
    let outcomes = hecke5::verify::run_selected(group, &cfg.check_config());
    let text = outcomes.iter().map(|o| o.to_string()).collect::<Vec<_>>().join("\n");
    emit(cfg.format, &outcomes, text)?;
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        return Err(Failure::Math(format!(
            "{failed} of {} checks failed",
            outcomes.len()
        )));
    }
    Ok(())
}
