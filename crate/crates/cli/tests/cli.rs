//! End-to-end tests of the binary: exact stdout bytes, exit codes, and
//! rerun determinism.

use std::process::{Command, Output};

fn hecke5(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke5"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = hecke5(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

#[test]
fn hecke_on_basis_prints_the_descended_column() {
    assert_eq!(stdout_of(&["hecke", "on-basis", "-p", "3", "-k", "47"]), "D[21]\n");
    assert_eq!(
        stdout_of(&["hecke", "on-basis", "-p", "3", "-k", "69"]),
        "D[23,47,63]\n"
    );
}

#[test]
fn structure_express_prints_the_operator_expression() {
    assert_eq!(
        stdout_of(&["structure", "express", "-p", "7", "-M", "6"]),
        "r = Y; t = 0\n"
    );
    assert_eq!(
        stdout_of(&["structure", "express", "-p", "3", "-M", "6"]),
        "r = X; t = 0\n"
    );
    assert_eq!(
        stdout_of(&["structure", "express", "-p", "11", "-M", "4"]),
        "r = X + Y; t = 1\n"
    );
}

#[test]
fn series_commands_round_trip_through_text() {
    assert_eq!(
        stdout_of(&["series", "gen", "D", "--prec", "128"]),
        "prec=128; exps=1,9,49,81,121\n"
    );
    // F G = x^6 + ... : the product window is prec + val(G) = 517.
    let fg = stdout_of(&["series", "op", "mul", "F", "G", "--prec", "512"]);
    assert!(fg.starts_with("prec=513; exps=6,"));
    // Squaring is the Frobenius, so it coincides with x -> x^2 exactly.
    assert_eq!(
        stdout_of(&["series", "op", "square", "D3", "--prec", "256"]),
        stdout_of(&["series", "op", "substitute", "D3", "--k", "2", "--prec", "256"])
    );
    // A literal operand carries its own window through an operation.
    assert_eq!(
        stdout_of(&["series", "op", "add", "prec=80; exps=1,5", "prec=90; exps=5,7"]),
        "prec=80; exps=1,7\n"
    );
}

#[test]
fn decompose_inverts_generation() {
    assert_eq!(stdout_of(&["decompose", "D47", "--prec", "1024"]), "D[47]\n");
    let t7d9 = stdout_of(&["hecke", "apply", "-p", "7", "D9", "--prec", "700"]);
    assert_eq!(t7d9, "prec=100; exps=7,23,47,63\n");
    // Those four exponents are exactly the window-100 prefix of D_7, and
    // the greedy reduction certifies T_7(D_9) = D_7 on it.
    assert_eq!(stdout_of(&["decompose", t7d9.trim()]), "D[7]\n");
}

#[test]
fn code_round_trips_between_pairs_and_indices() {
    assert_eq!(stdout_of(&["code", "pair2k", "0", "3"]), "47\n");
    assert_eq!(stdout_of(&["code", "k2pair", "47"]), "(0,3)\n");
    assert_eq!(
        stdout_of(&["code", "pair2k", "2", "1", "--format", "json"]),
        "{\n  \"a\": 2,\n  \"b\": 1,\n  \"k\": 23\n}\n"
    );
}

#[test]
fn dihedral_commands_agree_on_the_kernel() {
    let di = stdout_of(&["ideals", "di-basis", "--q", "1"]);
    assert_eq!(di, "alpha_0 = D[1]\nalpha_1 = D[7]\n");
    let kernel = stdout_of(&["structure", "kernel", "--q", "1"]);
    assert_eq!(kernel, "D[1]\nD[7]\n");
}

#[test]
fn verify_suites_pass_and_report_in_registry_order() {
    let out = stdout_of(&["verify", "di", "--q", "1", "--prec", "1024"]);
    let names: Vec<&str> = out
        .lines()
        .map(|l| l.split_whitespace().nth(1).expect("ok NAME"))
        .collect();
    assert_eq!(
        names,
        [
            "class-group-structure",
            "dihedral-kernel-basis",
            "t7-tridiagonal-ladder",
            "ideal-enumeration",
            "theta-parity",
        ]
    );
    assert!(out.lines().all(|l| l.starts_with("ok   ")));
    assert!(hecke5(&["verify", "identities", "--prec", "1024"]).status.success());
}

#[test]
fn json_output_is_stable_and_sorted() {
    let args = ["hecke", "on-basis", "-p", "3", "-k", "49", "--format", "json"];
    let first = stdout_of(&args);
    assert_eq!(
        first,
        "{\n  \"family\": \"D\",\n  \"indices\": [\n    27,\n    43\n  ]\n}\n"
    );
    assert_eq!(first, stdout_of(&args), "reruns are byte-identical");
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        vec!["structure", "adapted", "-M", "5"],
        vec!["ideals", "norm", "49", "--format", "json"],
        vec!["structure", "lambda", "-M", "8", "--format", "json"],
    ] {
        assert_eq!(stdout_of(&args), stdout_of(&args), "{args:?} must be deterministic");
    }
}

#[test]
fn exit_codes_separate_usage_from_mathematics() {
    // Usage errors: exit 2.
    assert_eq!(hecke5(&["hecke", "on-basis", "-p", "4", "-k", "3"]).status.code(), Some(2));
    assert_eq!(hecke5(&["hecke", "on-basis", "-p", "3", "-k", "45"]).status.code(), Some(2));
    assert_eq!(hecke5(&["series", "gen", "Q"]).status.code(), Some(2));
    assert_eq!(hecke5(&["verify", "all", "--prec", "10"]).status.code(), Some(2));
    assert_eq!(hecke5(&["verify", "all", "--q", "3"]).status.code(), Some(2));
    assert_eq!(hecke5(&["series", "op", "add", "F"]).status.code(), Some(2));
    assert_eq!(hecke5(&["no-such-command"]).status.code(), Some(2));

    // Mathematical failures: exit 1, diagnostic on stderr.
    let div = hecke5(&["series", "op", "divide", "D3", "G", "--prec", "256"]);
    assert_eq!(div.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&div.stderr).contains("valuation"));
    let dec = hecke5(&["decompose", "prec=64; exps=2"]);
    assert_eq!(dec.status.code(), Some(1));

    // Clean runs: exit 0.
    assert_eq!(hecke5(&["code", "k2pair", "47"]).status.code(), Some(0));
}
