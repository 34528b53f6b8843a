use std::fmt::Write as _;
use std::path::Path;

use hillpick::hill::{cp_via_hill, minimal_hill_from_blocks, nonminimal_hill};
use hillpick::linalg::rank_tol;
use hillpick::lyapunov::{
    check_domination, domination_oracle, hill_pick as compute_hill_pick, lyapunov_order_map, stein_domination,
    stein_oracle, stein_order_map, OracleOutcome, Verdict,
};
use hillpick::{PsdVerdict, Tolerances};

use crate::error::CliError;
use crate::input::{parse_selection, read_file, Loaded, ProblemFile};
use crate::output::{
    coeffs_out, eigen_out, fmt_c, fmt_matrix, fmt_num, CheckJson, FactorOut, HillJson, HillPickJson, HillPickOut,
    OrderName, VerifyJson,
};
use crate::{Common, MapKind, Order, Outcome};

fn tolerances(file: &ProblemFile, common: &Common) -> Tolerances {
    let mut tol = file.tolerances;
    if let Some(v) = common.tol_psd {
        tol.psd_rel = v;
    }
    if let Some(v) = common.tol_rank {
        tol.rank_rel = v;
    }
    if let Some(v) = common.tol_eq {
        tol.eq_rel = v;
    }
    tol
}

fn load(path: &Path, common: &Common) -> Result<(ProblemFile, Loaded, u64), CliError> {
    let file = read_file(path)?;
    let loaded = file.problem(tolerances(&file, common))?;
    let seed = common.seed.or(file.seed).unwrap_or(0);
    Ok((file, loaded, seed))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report serializes");
    s.push('\n');
    s
}

fn exit_for(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::Dominates => 0,
        Verdict::NotDominates => 1,
        Verdict::Marginal => 2,
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Dominates => "dominates",
        Verdict::NotDominates => "not_dominates",
        Verdict::Marginal => "marginal",
    }
}

fn psd_name(v: PsdVerdict) -> &'static str {
    match v {
        PsdVerdict::Yes => "yes",
        PsdVerdict::No => "no",
        PsdVerdict::Marginal => "marginal",
    }
}

fn order_name(o: Order) -> OrderName {
    match o {
        Order::Lyapunov => OrderName::Lyapunov,
        Order::Stein => OrderName::Stein,
    }
}

fn describe_eigenvalues(loaded: &Loaded, digits: usize) -> String {
    loaded
        .problem
        .spec()
        .eigens()
        .iter()
        .map(|e| {
            let sizes: Vec<String> = e.sizes.iter().map(|s| s.to_string()).collect();
            format!("{} [{}]", fmt_c(e.lambda, digits), sizes.join(", "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn describe_coeffs(loaded: &Loaded, digits: usize) -> String {
    loaded
        .problem
        .coeffs()
        .coeffs
        .iter()
        .map(|l| l.iter().map(|&z| fmt_c(z, digits)).collect::<Vec<_>>().join(", "))
        .collect::<Vec<_>>()
        .join("; ")
}

fn describe_oracle(o: &OracleOutcome, digits: usize) -> String {
    match o {
        OracleOutcome::NoViolation { trials } => format!("no violation in {trials} samples"),
        OracleOutcome::Violation { trial, min_eig, .. } => {
            format!("violation at sample {trial}, min eigenvalue {}", fmt_num(*min_eig, digits))
        }
    }
}

pub fn check(path: &Path, trials: usize, order: Order, common: &Common) -> Result<Outcome, CliError> {
    let (file, loaded, seed) = load(path, common)?;
    let prob = &loaded.problem;
    let (report, hp) = match order {
        Order::Lyapunov => (check_domination(prob, trials, seed)?, Some(compute_hill_pick(prob)?)),
        Order::Stein => (stein_domination(prob, trials, seed)?, None),
    };
    let d = common.precision;
    let mut stderr = String::new();
    if !report.methods_agree {
        stderr.push_str("lyapctl: warning: the Hill-Pick, Choi and oracle results disagree\n");
    }
    let code = exit_for(report.verdict);
    if common.json {
        let out = CheckJson {
            order: order_name(order),
            field: file.field,
            eigenvalues: eigen_out(prob.spec()),
            b_coeffs: coeffs_out(prob.coeffs()),
            tolerances: *prob.tol(),
            seed,
            oracle_trials: trials,
            report,
            hill_pick: hp.as_ref().map(HillPickOut::from),
        };
        return Ok(Outcome {
            stdout: to_json(&out),
            stderr,
            code,
        });
    }
    let mut s = String::new();
    let hill_label = match order {
        Order::Lyapunov => "hill-pick",
        Order::Stein => "hill",
    };
    let _ = writeln!(s, "verdict: {}", verdict_name(report.verdict));
    let _ = writeln!(s, "order: {}", if order == Order::Lyapunov { "lyapunov" } else { "stein" });
    let _ = writeln!(s, "eigenvalues: {}", describe_eigenvalues(&loaded, d));
    let _ = writeln!(
        s,
        "{hill_label}: psd {}, min eigenvalue {}",
        psd_name(report.hill_pick_verdict),
        fmt_num(report.hill_pick_min_eig, d)
    );
    let _ = writeln!(
        s,
        "choi: psd {}, min eigenvalue {}",
        psd_name(report.choi_verdict),
        fmt_num(report.choi_min_eig, d)
    );
    let _ = writeln!(s, "psd band: {}", fmt_num(report.psd_band, d));
    let _ = writeln!(s, "oracle (seed {seed}): {}", describe_oracle(&report.oracle, d));
    let _ = writeln!(s, "methods agree: {}", if report.methods_agree { "yes" } else { "no" });
    if common.verbose {
        if loaded.extracted.is_some() {
            let _ = writeln!(s, "B coefficients (from matrix): {}", describe_coeffs(&loaded, d));
        }
        if let Some(hp) = &hp {
            let _ = writeln!(s, "hill-pick matrix:");
            s.push_str(&fmt_matrix(&hp.h, d));
        }
    }
    Ok(Outcome { stdout: s, stderr, code })
}

pub fn hill_pick(path: &Path, common: &Common) -> Result<Outcome, CliError> {
    let (file, loaded, _) = load(path, common)?;
    let prob = &loaded.problem;
    let hp = compute_hill_pick(prob)?;
    if common.json {
        let out = HillPickJson {
            field: file.field,
            eigenvalues: eigen_out(prob.spec()),
            b_coeffs: coeffs_out(prob.coeffs()),
            hill_pick: HillPickOut::from(&hp),
        };
        return Ok(Outcome {
            stdout: to_json(&out),
            ..Outcome::default()
        });
    }
    let d = common.precision;
    let mut s = String::new();
    if common.verbose && loaded.extracted.is_some() {
        let _ = writeln!(s, "B coefficients (from matrix): {}", describe_coeffs(&loaded, d));
    }
    let _ = writeln!(s, "hill-pick matrix ({0}x{0}):", hp.h.rows());
    s.push_str(&fmt_matrix(&hp.h, d));
    let blocks: Vec<String> = hp.upsilon.iter().map(|(i, j)| format!("({i},{j})")).collect();
    let _ = writeln!(s, "selected blocks: {}", blocks.join(" "));
    if common.verbose {
        let _ = writeln!(s, "positions in the Jordan-basis matricization:");
        for row in hp.positions() {
            let cells: Vec<String> = row.iter().map(|(r, c)| format!("({r},{c})")).collect();
            let _ = writeln!(s, "  {}", cells.join(" "));
        }
    }
    Ok(Outcome {
        stdout: s,
        ..Outcome::default()
    })
}

pub fn hill(path: &Path, kind: MapKind, selection: Option<&str>, common: &Common) -> Result<Outcome, CliError> {
    let file = read_file(path)?;
    let tol = tolerances(&file, common);
    tol.validate()?;
    let map = match kind {
        MapKind::Raw => file.raw_map()?,
        MapKind::Lyapunov => lyapunov_order_map(&file.problem(tol)?.problem)?,
        MapKind::Stein => stein_order_map(&file.problem(tol)?.problem)?,
    };
    let rep = match selection {
        Some(text) => nonminimal_hill(&map, &parse_selection(text)?, &tol)?,
        None => minimal_hill_from_blocks(&map, &tol)?,
    };
    let cp = cp_via_hill(&rep, &tol)?;
    let choi_rank = rank_tol(&map.choi(), &tol);
    let coefficient_rank = rank_tol(rep.coefficients(), &tol);
    let map_name = match kind {
        MapKind::Lyapunov => "lyapunov",
        MapKind::Stein => "stein",
        MapKind::Raw => "raw",
    };
    if common.json {
        let out = HillJson {
            map: map_name.into(),
            n: rep.n(),
            q: rep.q(),
            choi_rank,
            factors_count: rep.len(),
            coefficient_rank,
            minimal: rep.is_minimal(),
            selection: rep.selection().to_vec(),
            completely_positive: cp.verdict,
            coefficient_min_eig: cp.min_eig,
            coefficients: rep.coefficients().clone(),
            factors: rep.factors().iter().map(|m| FactorOut { matrix: m.clone() }).collect(),
        };
        return Ok(Outcome {
            stdout: to_json(&out),
            ..Outcome::default()
        });
    }
    let d = common.precision;
    let mut s = String::new();
    let _ = writeln!(s, "map: {map_name} ({}x{} to {}x{})", rep.q(), rep.q(), rep.n(), rep.n());
    let _ = writeln!(s, "choi rank: {choi_rank}");
    let _ = writeln!(s, "factors: {} ({})", rep.len(), if rep.is_minimal() { "minimal" } else { "non-minimal" });
    let _ = writeln!(s, "coefficient rank: {coefficient_rank}");
    let blocks: Vec<String> = rep.selection().iter().map(|(i, j)| format!("({i},{j})")).collect();
    let _ = writeln!(s, "selected blocks: {}", blocks.join(" "));
    let _ = writeln!(
        s,
        "completely positive: {} (min coefficient eigenvalue {})",
        psd_name(cp.verdict),
        fmt_num(cp.min_eig, d)
    );
    let _ = writeln!(s, "coefficients:");
    s.push_str(&fmt_matrix(rep.coefficients(), d));
    if common.verbose {
        for (k, a) in rep.factors().iter().enumerate() {
            let _ = writeln!(s, "A_{k}:");
            s.push_str(&fmt_matrix(a, d));
        }
    }
    Ok(Outcome {
        stdout: s,
        ..Outcome::default()
    })
}

pub fn verify(path: &Path, trials: usize, order: Order, common: &Common) -> Result<Outcome, CliError> {
    let (_, loaded, seed) = load(path, common)?;
    let prob = &loaded.problem;
    let oracle = match order {
        Order::Lyapunov => domination_oracle(prob, trials, seed)?,
        Order::Stein => stein_oracle(prob, trials, seed)?,
    };
    let code = i32::from(oracle.is_violation());
    if common.json {
        let out = VerifyJson {
            order: order_name(order),
            seed,
            trials,
            oracle,
        };
        return Ok(Outcome {
            stdout: to_json(&out),
            code,
            ..Outcome::default()
        });
    }
    let d = common.precision;
    let mut s = String::new();
    let _ = writeln!(s, "oracle (seed {seed}): {}", describe_oracle(&oracle, d));
    if let (true, OracleOutcome::Violation { h, .. }) = (common.verbose, &oracle) {
        let _ = writeln!(s, "violating H:");
        s.push_str(&fmt_matrix(h, d));
    }
    Ok(Outcome {
        stdout: s,
        code,
        ..Outcome::default()
    })
}
