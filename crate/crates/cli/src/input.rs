//! Problem files: one JSON document per file.

use std::path::Path;

use hillpick::jordan::{check_bicomm_membership, extract_bicomm_coeffs, BicommElement, EigenBlock, JordanSpec, Membership};
use hillpick::lyapunov::Problem;
use hillpick::maps::StarLinearMap;
use hillpick::{Field, Mat, Tolerances, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A scalar written either as a real number or as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(self) -> C64 {
        match self {
            Scalar::Real(x) => C64::new(x, 0.0),
            Scalar::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldName {
    Real,
    Complex,
}

impl From<FieldName> for Field {
    fn from(f: FieldName) -> Self {
        match f {
            FieldName::Real => Field::Real,
            FieldName::Complex => Field::Complex,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenEntry {
    pub lambda: Scalar,
    pub sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum BInput {
    Coeffs(Vec<Vec<Scalar>>),
    Matrix(Vec<Vec<Scalar>>),
}

/// Matricization of an arbitrary map, used with `--map raw`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMap {
    pub n: usize,
    pub q: usize,
    #[serde(rename = "L")]
    pub l: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default = "default_field")]
    pub field: FieldName,
    #[serde(default)]
    pub eigenvalues: Option<Vec<EigenEntry>>,
    #[serde(rename = "P", default)]
    pub p: Option<Vec<Vec<Scalar>>>,
    #[serde(rename = "B", default)]
    pub b: Option<BInput>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub map: Option<RawMap>,
}

fn default_field() -> FieldName {
    FieldName::Complex
}

/// A loaded problem together with what was learned while loading it.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub problem: Problem,
    /// Coefficients read off `B` when it was given as a matrix.
    pub extracted: Option<BicommElement>,
}

pub fn read_file(path: &Path) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ProblemFile, CliError> {
    serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let message = full.rsplit_once(" at line ").map_or(full.as_str(), |(m, _)| m).to_string();
        CliError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    })
}

fn dense(rows: &[Vec<Scalar>], field: Field, at: &str) -> Result<Mat, CliError> {
    let cols = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(CliError::input(format!("{at}[{i}]: expected {cols} entries, found {}", rows[i].len())));
    }
    let data: Vec<C64> = rows.iter().flatten().map(|s| s.value()).collect();
    if let Some(k) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(CliError::input(format!("{at}[{}][{}]: entry is not finite", k / cols, k % cols)));
    }
    if field == Field::Real {
        if let Some(k) = data.iter().position(|z| z.im != 0.0) {
            return Err(CliError::input(format!(
                "{at}[{}][{}]: complex entry in a real problem",
                k / cols,
                k % cols
            )));
        }
    }
    Ok(Mat::from_complex(rows.len(), cols, data).coerce(field))
}

impl ProblemFile {
    pub fn field(&self) -> Field {
        self.field.into()
    }

    fn spec(&self, tol: &Tolerances) -> Result<JordanSpec, CliError> {
        let entries = self
            .eigenvalues
            .as_ref()
            .ok_or_else(|| CliError::input("missing field `eigenvalues`"))?;
        let eigens = entries
            .iter()
            .map(|e| EigenBlock {
                lambda: e.lambda.value(),
                sizes: e.sizes.clone(),
            })
            .collect();
        let p = self.p.as_ref().map(|rows| dense(rows, self.field(), "P")).transpose()?;
        JordanSpec::new(self.field(), eigens, p, tol).map_err(|e| CliError::input(format!("eigenvalues: {e}")))
    }

    /// Builds and validates the problem. `B` given as a matrix is checked for
    /// membership in the bicommutant and converted to coefficients.
    pub fn problem(&self, tol: Tolerances) -> Result<Loaded, CliError> {
        tol.validate().map_err(|e| CliError::input(format!("tolerances: {e}")))?;
        let spec = self.spec(&tol)?;
        let b = self.b.as_ref().ok_or_else(|| CliError::input("missing field `B`"))?;
        let (coeffs, extracted) = match b {
            BInput::Coeffs(lists) => {
                let coeffs = BicommElement::new(lists.iter().map(|l| l.iter().map(|s| s.value()).collect()).collect());
                (coeffs, None)
            }
            BInput::Matrix(rows) => {
                let m = dense(rows, self.field(), "B.matrix")?;
                match check_bicomm_membership(&spec, &m, &tol).map_err(|e| CliError::input(format!("B.matrix: {e}")))? {
                    Membership::Member => {}
                    Membership::Nonmember {
                        row,
                        col,
                        found,
                        expected,
                    } => {
                        return Err(CliError::input(format!(
                            "B.matrix is not in the bicommutant of A: entry ({row}, {col}) of P^-1 B P is {}, expected {}",
                            crate::output::fmt_c(found, 12),
                            crate::output::fmt_c(expected, 12)
                        )))
                    }
                }
                let coeffs = extract_bicomm_coeffs(&spec, &m, &tol).map_err(|e| CliError::input(format!("B.matrix: {e}")))?;
                (coeffs.clone(), Some(coeffs))
            }
        };
        let problem = Problem::new(spec, coeffs, tol).map_err(|e| CliError::input(format!("B: {e}")))?;
        Ok(Loaded { problem, extracted })
    }

    pub fn raw_map(&self) -> Result<StarLinearMap, CliError> {
        let raw = self
            .map
            .as_ref()
            .ok_or_else(|| CliError::input("missing field `map` (required by --map raw)"))?;
        let l = dense(&raw.l, self.field(), "map.L")?;
        StarLinearMap::new(l, raw.n, raw.q).map_err(|e| CliError::input(format!("map: {e}")))
    }
}

/// Parses `"i,j;k,l;..."` into zero-based block indices.
pub fn parse_selection(text: &str) -> Result<Vec<(usize, usize)>, CliError> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(k, pair)| {
            let bad = || CliError::input(format!("--selection item {k} `{pair}`: expected `i,j`"));
            let (i, j) = pair.split_once(',').ok_or_else(bad)?;
            Ok((i.trim().parse().map_err(|_| bad())?, j.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}
