//! Text formatting and the JSON report types.

use hillpick::jordan::{BicommElement, JordanSpec};
use hillpick::lyapunov::{mat_serde, DominationReport, HillPickMatrix, OracleOutcome};
use hillpick::{Mat, Tolerances, C64};
use serde::{Deserialize, Serialize};

use crate::input::FieldName;

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` with `digits` significant digits, fixed or scientific like `%g`.
pub fn fmt_num(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mant))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

pub fn fmt_c(z: C64, digits: usize) -> String {
    if z.im == 0.0 {
        fmt_num(z.re, digits)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", fmt_num(z.re, digits), fmt_num(z.im.abs(), digits))
    }
}

/// Right-aligned columns, two spaces of indent.
pub fn fmt_matrix(m: &Mat, digits: usize) -> String {
    let cells: Vec<Vec<String>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| fmt_c(m.get(i, j), digits)).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
    let mut out = String::new();
    for row in &cells {
        out.push_str("  ");
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenOut {
    pub lambda: [f64; 2],
    pub sizes: Vec<usize>,
}

pub fn eigen_out(spec: &JordanSpec) -> Vec<EigenOut> {
    spec.eigens()
        .iter()
        .map(|e| EigenOut {
            lambda: [e.lambda.re, e.lambda.im],
            sizes: e.sizes.clone(),
        })
        .collect()
}

pub fn coeffs_out(b: &BicommElement) -> Vec<Vec<[f64; 2]>> {
    b.coeffs.iter().map(|l| l.iter().map(|z| [z.re, z.im]).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HillPickOut {
    #[serde(with = "mat_serde")]
    pub matrix: Mat,
    pub block_sizes: Vec<usize>,
    /// Selected blocks of the Jordan-basis matricization.
    pub upsilon: Vec<(usize, usize)>,
    /// Scalar position in the Jordan-basis matricization of each entry.
    pub positions: Vec<Vec<(usize, usize)>>,
}

impl From<&HillPickMatrix> for HillPickOut {
    fn from(hp: &HillPickMatrix) -> Self {
        HillPickOut {
            matrix: hp.h.clone(),
            block_sizes: hp.block_sizes.clone(),
            upsilon: hp.upsilon.clone(),
            positions: hp.positions(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderName {
    Lyapunov,
    Stein,
}

/// Output of `lyapctl check --json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckJson {
    pub order: OrderName,
    pub field: FieldName,
    pub eigenvalues: Vec<EigenOut>,
    pub b_coeffs: Vec<Vec<[f64; 2]>>,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub oracle_trials: usize,
    #[serde(flatten)]
    pub report: DominationReport,
    pub hill_pick: Option<HillPickOut>,
}

/// Output of `lyapctl hill-pick --json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HillPickJson {
    pub field: FieldName,
    pub eigenvalues: Vec<EigenOut>,
    pub b_coeffs: Vec<Vec<[f64; 2]>>,
    #[serde(flatten)]
    pub hill_pick: HillPickOut,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorOut {
    #[serde(with = "mat_serde")]
    pub matrix: Mat,
}

/// Output of `lyapctl hill --json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HillJson {
    pub map: String,
    pub n: usize,
    pub q: usize,
    pub choi_rank: usize,
    pub factors_count: usize,
    pub coefficient_rank: usize,
    pub minimal: bool,
    pub selection: Vec<(usize, usize)>,
    pub completely_positive: hillpick::PsdVerdict,
    pub coefficient_min_eig: f64,
    #[serde(with = "mat_serde")]
    pub coefficients: Mat,
    pub factors: Vec<FactorOut>,
}

/// Output of `lyapctl verify --json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyJson {
    pub order: OrderName,
    pub seed: u64,
    pub trials: usize,
    pub oracle: OracleOutcome,
}
