use std::path::PathBuf;
use std::process::{Command, Output};

use hillpick::lyapunov::Verdict;
use lyapctl::output::{CheckJson, HillJson, HillPickJson, VerifyJson};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn lyapctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lyapctl")).args(args).output().expect("binary runs")
}

fn run(args: &[&str], file: &str) -> (i32, String, String) {
    let path = fixture(file);
    let mut all: Vec<&str> = args.to_vec();
    all.push(path.to_str().unwrap());
    let out = lyapctl(&all);
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn b_equal_a_dominates() {
    let (code, stdout, _) = run(&["check"], "b_equal_a.json");
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.starts_with("verdict: dominates\n"));
    assert!(stdout.contains("methods agree: yes"));
}

#[test]
fn diagonal_pair_is_not_dominated() {
    let (code, stdout, _) = run(&["check", "--json"], "diag_not_dominated.json");
    assert_eq!(code, 1);
    let report: CheckJson = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report.report.verdict, Verdict::NotDominates);
    let exact = 1.25 - (1.0f64 / 16.0 + 16.0 / 9.0).sqrt();
    assert!((report.report.hill_pick_min_eig - exact).abs() < 1e-13);
    assert!(report.report.oracle.is_violation());
    let (_, text, _) = run(&["check"], "diag_not_dominated.json");
    assert!(text.contains("min eigenvalue -0.106568383008"), "{text}");
}

#[test]
fn rank_deficient_pick_dominates() {
    let (code, stdout, _) = run(&["check", "-v"], "inverse_marginal.json");
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("     1   0.5\n   0.5  0.25\n"), "{stdout}");
}

#[test]
fn singular_lyapunov_operator_is_an_input_error() {
    let (code, stdout, stderr) = run(&["check"], "not_regular.json");
    assert_eq!(code, 64);
    assert!(stdout.is_empty());
    assert!(stderr.contains("not") || stderr.contains("singular"), "{stderr}");
    assert!(stderr.contains("1 and -1"), "{stderr}");
}

#[test]
fn malformed_file_reports_position() {
    let (code, _, stderr) = run(&["check"], "malformed.json");
    assert_eq!(code, 64);
    assert!(stderr.contains("line 4, column"), "{stderr}");
}

#[test]
fn missing_file_is_an_input_error() {
    let (code, _, stderr) = run(&["check"], "does_not_exist.json");
    assert_eq!(code, 64);
    assert!(stderr.contains("cannot read"), "{stderr}");
}

#[test]
fn nonmember_reports_witness_entry() {
    let (code, _, stderr) = run(&["check"], "nonmember.json");
    assert_eq!(code, 64);
    assert!(stderr.contains("entry (0, 1) of P^-1 B P is 0.5, expected 0"), "{stderr}");
}

#[test]
fn matrix_b_reports_coefficients_when_verbose() {
    let (code, stdout, _) = run(&["check", "-v"], "matrix_b.json");
    assert_eq!(code, 1, "{stdout}");
    assert!(stdout.contains("B coefficients (from matrix): 2, 3"), "{stdout}");
    assert!(stdout.contains("oracle (seed 7)"), "{stdout}");
}

#[test]
fn seed_flag_overrides_file() {
    let (_, stdout, _) = run(&["check", "--seed", "11"], "matrix_b.json");
    assert!(stdout.contains("oracle (seed 11)"), "{stdout}");
}

#[test]
fn real_field_with_pair() {
    let (code, stdout, _) = run(&["check"], "real_pair.json");
    assert_eq!(code, 0, "{stdout}");
}

#[test]
fn stein_order() {
    let (code, stdout, _) = run(&["check", "--order", "stein"], "stein.json");
    assert_eq!(code, 1, "{stdout}");
    assert!(stdout.contains("order: stein"));
    let (code, _, _) = run(&["check", "--order", "stein"], "b_equal_a_stein.json");
    assert_eq!(code, 0);
}

#[test]
fn marginal_exit_code() {
    let (code, stdout, _) = run(&["check", "--tol-psd", "1e-2"], "near_boundary.json");
    assert_eq!(code, 2, "{stdout}");
    assert!(stdout.starts_with("verdict: marginal"));
}

#[test]
fn json_round_trips_bit_exactly() {
    let (_, stdout, _) = run(&["check", "--json"], "b_equal_a.json");
    let parsed: CheckJson = serde_json::from_str(&stdout).unwrap();
    assert_eq!(parsed.eigenvalues[1].lambda, [2.0, 1.0]);
    assert_eq!(parsed.report.verdict, Verdict::Dominates);
    let again = serde_json::to_string(&parsed).unwrap() + "\n";
    assert_eq!(again, stdout);
    let reparsed: CheckJson = serde_json::from_str(&again).unwrap();
    assert_eq!(reparsed, parsed);
}

#[test]
fn output_is_deterministic() {
    for args in [&["check", "--json"][..], &["check", "-v"][..], &["verify"][..]] {
        let first = run(args, "diag_not_dominated.json");
        let second = run(args, "diag_not_dominated.json");
        assert_eq!(first, second);
    }
}

#[test]
fn hill_pick_of_diagonal_data_is_the_pick_matrix() {
    let (code, stdout, _) = run(&["hill-pick", "--json"], "diag_not_dominated.json");
    assert_eq!(code, 0);
    let hp: HillPickJson = serde_json::from_str(&stdout).unwrap();
    let m = &hp.hill_pick.matrix;
    let pick = [[1.0, 4.0 / 3.0], [4.0 / 3.0, 1.5]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((m.get(i, j).re - pick[i][j]).abs() < 1e-15 && m.get(i, j).im == 0.0);
        }
    }
    assert_eq!(hp.hill_pick.upsilon, vec![(0, 0), (1, 1)]);
}

#[test]
fn hill_pick_all_ones_for_b_equal_a() {
    let (_, stdout, _) = run(&["hill-pick"], "diag_a_only.json");
    assert!(stdout.contains("  1  1\n  1  1\n"), "{stdout}");
}

#[test]
fn hill_pick_of_single_block() {
    let (_, stdout, _) = run(&["hill-pick"], "single_block.json");
    assert!(stdout.contains("-0.125+0.5i"), "{stdout}");
    assert!(stdout.contains("selected blocks: (0,0) (1,0) (2,0)"), "{stdout}");
}

#[test]
fn hill_rank_reports() {
    let (code, stdout, _) = run(&["hill", "--json"], "diag_not_dominated.json");
    assert_eq!(code, 0);
    let rep: HillJson = serde_json::from_str(&stdout).unwrap();
    assert_eq!((rep.choi_rank, rep.factors_count, rep.coefficient_rank), (2, 2, 2));
    assert!(rep.minimal);

    let (_, stdout, _) = run(&["hill", "--map", "raw", "--json"], "identity_map.json");
    let rep: HillJson = serde_json::from_str(&stdout).unwrap();
    assert_eq!(rep.factors_count, 1);

    let (code, stdout, _) = run(&["hill", "--map", "raw", "--selection", "0,0;0,1;1,1", "--json"], "identity_map.json");
    assert_eq!(code, 0, "{stdout}");
    let rep: HillJson = serde_json::from_str(&stdout).unwrap();
    assert_eq!((rep.factors_count, rep.coefficient_rank, rep.minimal), (3, 1, false));

    let (code, _, stderr) = run(&["hill", "--selection", "0,0;0,0"], "diag_not_dominated.json");
    assert_eq!(code, 64);
    assert!(stderr.contains("twice"), "{stderr}");

    let (code, _, _) = run(&["hill", "--map", "stein"], "stein.json");
    assert_eq!(code, 0);
}

#[test]
fn verify_only_runs_the_oracle() {
    let (code, stdout, _) = run(&["verify", "--json", "--trials", "50"], "diag_not_dominated.json");
    assert_eq!(code, 1);
    let v: VerifyJson = serde_json::from_str(&stdout).unwrap();
    assert_eq!((v.trials, v.seed), (50, 0));
    let (code, stdout, _) = run(&["verify"], "b_equal_a.json");
    assert_eq!(code, 0);
    assert_eq!(stdout, "oracle (seed 0): no violation in 1000 samples\n");
}

#[test]
fn usage_errors_do_not_collide_with_marginal() {
    let out = lyapctl(&["check"]);
    assert_eq!(out.status.code(), Some(64));
    let out = lyapctl(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
