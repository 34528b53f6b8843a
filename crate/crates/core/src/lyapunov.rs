//! Lyapunov and Stein order maps and the domination decision.
//!
//! For `A` with Lyapunov operator `L_A(X) = XA + A*X` invertible, `B`
//! dominates `A` when `L_B L_A^{-1}` is a positive map. For `B` in `{A}''`
//! that map is positive exactly when it is completely positive, which is
//! decided either by its Choi matrix or by the much smaller Hill-Pick matrix.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hill::{cp_via_hill, minimal_hill_from_blocks};
use crate::jordan::{
    build_a, build_bicomm_element, build_bicomm_tilde, build_ja, fmt_c, lyapunov_regularity, shift,
    BicommElement, JordanSpec,
};
use crate::linalg::{binomial, is_psd, kron, unvec, vec, Field, Mat, PsdReport, PsdVerdict, Tolerances, C64, ONE};
use crate::maps::StarLinearMap;

/// Jordan data for `A`, Toeplitz data for `B`, and the tolerances to use.
#[derive(Clone, Debug)]
pub struct Problem {
    spec: JordanSpec,
    b: BicommElement,
    tol: Tolerances,
}

impl Problem {
    pub fn new(spec: JordanSpec, b: BicommElement, tol: Tolerances) -> Result<Self> {
        tol.validate()?;
        b.validate(&spec)?;
        Ok(Problem { spec, b, tol })
    }

    pub fn spec(&self) -> &JordanSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &BicommElement {
        &self.b
    }

    pub fn tol(&self) -> &Tolerances {
        &self.tol
    }

    pub fn field(&self) -> Field {
        self.spec.field()
    }

    pub fn a(&self) -> Mat {
        build_a(&self.spec)
    }

    pub fn b(&self) -> Mat {
        build_bicomm_element(&self.spec, &self.b).expect("validated at construction")
    }

    /// The same problem with a different change of basis.
    pub fn with_basis(&self, p: Option<Mat>) -> Result<Self> {
        Problem::new(self.spec.with_basis(p, &self.tol)?, self.b.clone(), self.tol)
    }

    /// The same problem with `P = I`.
    pub fn in_jordan_basis(&self) -> Self {
        self.with_basis(None).expect("Jordan data already validated")
    }
}

/// `A^T ⊗ I + I ⊗ A*`, the matricization of `X -> XA + A*X`.
pub fn lyapunov_matricization(a: &Mat) -> StarLinearMap {
    let n = a.rows();
    let id = Mat::identity(n);
    let l = &kron(&a.transpose(), &id) + &kron(&id, &a.adjoint());
    StarLinearMap::new(l, n, n).expect("square input")
}

/// `L_B L_A^{-1}`.
pub fn lyapunov_order_map(prob: &Problem) -> Result<StarLinearMap> {
    lyapunov_regularity(&prob.spec, &prob.tol)?;
    order_map(
        &lyapunov_matricization(&prob.a()),
        &lyapunov_matricization(&prob.b()),
    )
}

fn order_map(la: &StarLinearMap, lb: &StarLinearMap) -> Result<StarLinearMap> {
    // X L_A = L_B  <=>  L_A^T X^T = L_B^T
    let xt = la
        .matricization()
        .transpose()
        .solve(&lb.matricization().transpose())?;
    let field = la.field().join(lb.field());
    StarLinearMap::new(xt.transpose().coerce(field), la.n(), la.n())
}

/// Closed-form coefficient `f^{a,c}_{j,i}`: entry `c` of the Toeplitz list of
/// Jordan block group `a` inside the `i`-th Toeplitz component of group `j`.
pub fn hill_pick_coeff(prob: &Problem, j: usize, i: usize, a: usize, c: usize) -> C64 {
    let lam = |g: usize| prob.spec.eigens()[g].lambda;
    let t = &prob.b.coeffs;
    let denom = lam(j) + lam(a).conj();
    let sign = |e: usize| if e.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut acc = C64::new(0.0, 0.0);
    for d in 0..=c {
        let e = d + i;
        let w = binomial(e as u64, d as u64) as f64 * sign(e);
        acc += t[a][c - d].conj() * w / denom.powi(e as i32 + 1);
    }
    for l in 0..=i {
        let e = c + i - l;
        let w = binomial(e as u64, c as u64) as f64 * sign(e);
        acc += t[j][l] * w / denom.powi(e as i32 + 1);
    }
    acc
}

fn ensure_complex(prob: &Problem, what: &'static str) -> Result<()> {
    if prob.field() != Field::Complex {
        return Err(Error::RequiresComplex(what));
    }
    Ok(())
}

/// `L_B L_A^{-1}` assembled from the closed-form coefficients and then moved
/// to the standard basis with `P^T ⊗ P*`.
pub fn structured_lab(prob: &Problem) -> Result<StarLinearMap> {
    ensure_complex(prob, "structured_lab")?;
    lyapunov_regularity(&prob.spec, &prob.tol)?;
    let spec = &prob.spec;
    let n = spec.n();
    let blocks = spec.blocks();
    // F_{j,i} for every group j and i < largest block of j.
    let f_blocks: Vec<Vec<Mat>> = (0..spec.eigens().len())
        .map(|j| {
            (0..spec.eigens()[j].sizes[0])
                .map(|i| {
                    let parts: Vec<Mat> = blocks
                        .iter()
                        .map(|&(a, _, _, s)| {
                            let st = shift(s).transpose();
                            let mut acc = Mat::zeros(s, s, Field::Complex);
                            let mut pow = Mat::identity(s);
                            for c in 0..s {
                                acc = &acc + &pow.scale(hill_pick_coeff(prob, j, i, a, c));
                                pow = &pow * &st;
                            }
                            acc
                        })
                        .collect();
                    Mat::block_diag(&parts)
                })
                .collect()
        })
        .collect();
    let r_blocks: Vec<Mat> = blocks
        .iter()
        .map(|&(j, _, _, s)| {
            let st = shift(s).transpose();
            let mut acc = Mat::zeros(s * n, s * n, Field::Complex);
            let mut pow = Mat::identity(s);
            for f in f_blocks[j].iter().take(s) {
                acc = &acc + &kron(&pow, f);
                pow = &pow * &st;
            }
            acc
        })
        .collect();
    let lj = Mat::block_diag(&r_blocks).coerce(Field::Complex);
    let l = match (spec.p(), spec.p_inv()) {
        (Some(p), Some(pi)) => {
            let m = kron(&p.transpose(), &p.adjoint());
            let m_inv = kron(&pi.transpose(), &pi.adjoint());
            &(&m_inv * &lj) * &m
        }
        _ => lj,
    };
    StarLinearMap::new(l, n, n)
}

/// Block indices (0-based) selecting the Hill-Pick entries: for each
/// eigenvalue group starting at `N`, the blocks `(N + a, N)` for `a` below
/// the size of its largest Jordan block (twice that for a real pair).
pub fn upsilon(spec: &JordanSpec) -> Vec<(usize, usize)> {
    let offsets = spec.group_offsets();
    let mut out = Vec::new();
    for (g, e) in spec.eigens().iter().enumerate() {
        let len = spec.width(g) * e.sizes[0];
        for a in 0..len {
            out.push((offsets[g] + a, offsets[g]));
        }
    }
    out
}

/// Scalar position in the `n^2 x n^2` matricization of the Hill entry
/// indexed by selections `k` and `l`.
pub fn upsilon_position(sel: &[(usize, usize)], n: usize, k: usize, l: usize) -> (usize, usize) {
    let (ik, jk) = sel[k];
    let (il, jl) = sel[l];
    (ik * n + il, jk * n + jl)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HillPickMatrix {
    pub h: Mat,
    /// Side of each diagonal block, one per eigenvalue group.
    pub block_sizes: Vec<usize>,
    /// Selected block indices of the Jordan-basis matricization.
    pub upsilon: Vec<(usize, usize)>,
    pub n: usize,
}

impl HillPickMatrix {
    /// Grid of scalar positions, row `k` holding the positions of `H[k, *]`
    /// transposed back to the extraction order.
    pub fn positions(&self) -> Vec<Vec<(usize, usize)>> {
        let w = self.upsilon.len();
        (0..w)
            .map(|k| (0..w).map(|l| upsilon_position(&self.upsilon, self.n, l, k)).collect())
            .collect()
    }
}

/// Closed-form Hill-Pick matrix: block `(i, j)`, entry `(a, b)` is `f^{i,a}_{j,b}`.
pub fn hill_pick_matrix(prob: &Problem) -> Result<HillPickMatrix> {
    ensure_complex(prob, "hill_pick_matrix")?;
    lyapunov_regularity(&prob.spec, &prob.tol)?;
    let spec = &prob.spec;
    let index: Vec<(usize, usize)> = spec
        .eigens()
        .iter()
        .enumerate()
        .flat_map(|(g, e)| (0..e.sizes[0]).map(move |a| (g, a)))
        .collect();
    let w = index.len();
    let h = Mat::from_fn(w, w, Field::Complex, |r, s| {
        let (i, a) = index[r];
        let (j, b) = index[s];
        hill_pick_coeff(prob, j, b, i, a)
    });
    Ok(HillPickMatrix {
        h,
        block_sizes: spec.eigens().iter().map(|e| e.sizes[0]).collect(),
        upsilon: upsilon(spec),
        n: spec.n(),
    })
}

/// `L_B L_A^{-1}` in the Jordan basis.
pub fn jordan_order_map(prob: &Problem) -> Result<StarLinearMap> {
    lyapunov_regularity(&prob.spec, &prob.tol)?;
    let ja = build_ja(&prob.spec);
    let bt = build_bicomm_tilde(&prob.spec, &prob.b)?;
    order_map(&lyapunov_matricization(&ja), &lyapunov_matricization(&bt))
}

/// Hill-Pick matrix read off the Jordan-basis map at the selected blocks,
/// transposed to match [`hill_pick_matrix`]. Works over either field.
pub fn hill_pick_by_extraction(prob: &Problem) -> Result<HillPickMatrix> {
    let map = jordan_order_map(prob)?;
    let spec = &prob.spec;
    let sel = upsilon(spec);
    let w = sel.len();
    let l = map.matricization();
    let n = spec.n();
    let h = Mat::from_fn(w, w, map.field(), |r, s| {
        let (row, col) = upsilon_position(&sel, n, s, r);
        l[(row, col)]
    });
    Ok(HillPickMatrix {
        h,
        block_sizes: (0..spec.eigens().len())
            .map(|g| spec.width(g) * spec.eigens()[g].sizes[0])
            .collect(),
        upsilon: sel,
        n,
    })
}

/// Hill-Pick matrix of a real problem; conjugate pairs contribute blocks of
/// twice their largest Jordan size.
pub fn hill_pick_matrix_real(prob: &Problem) -> Result<HillPickMatrix> {
    if prob.field() != Field::Real {
        return Err(Error::InvalidArgument("hill_pick_matrix_real requires a real problem".into()));
    }
    hill_pick_by_extraction(prob)
}

/// Hill-Pick matrix for either field.
pub fn hill_pick(prob: &Problem) -> Result<HillPickMatrix> {
    match prob.field() {
        Field::Complex => hill_pick_matrix(prob),
        Field::Real => hill_pick_matrix_real(prob),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Dominates,
    NotDominates,
    Marginal,
}

impl From<PsdVerdict> for Verdict {
    fn from(v: PsdVerdict) -> Self {
        match v {
            PsdVerdict::Yes => Verdict::Dominates,
            PsdVerdict::No => Verdict::NotDominates,
            PsdVerdict::Marginal => Verdict::Marginal,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OracleOutcome {
    NoViolation {
        trials: usize,
    },
    /// Sample `trial` (0-based) gave a Hermitian `H` in the cone of `A`
    /// whose image under `B` has smallest eigenvalue `min_eig`.
    Violation {
        trial: usize,
        min_eig: f64,
        #[serde(with = "mat_serde")]
        h: Mat,
    },
}

impl OracleOutcome {
    pub fn is_violation(&self) -> bool {
        matches!(self, OracleOutcome::Violation { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub verdict: Verdict,
    pub hill_pick_verdict: PsdVerdict,
    pub hill_pick_min_eig: f64,
    pub choi_verdict: PsdVerdict,
    pub choi_min_eig: f64,
    pub psd_band: f64,
    pub oracle: OracleOutcome,
    pub methods_agree: bool,
}

fn agree(hill: PsdVerdict, choi: PsdVerdict, oracle: &OracleOutcome) -> bool {
    let deterministic = hill == choi || hill == PsdVerdict::Marginal || choi == PsdVerdict::Marginal;
    let sampled = !(oracle.is_violation() && (hill == PsdVerdict::Yes || choi == PsdVerdict::Yes));
    deterministic && sampled
}

/// Decides domination with the Hill-Pick matrix, cross-checked against the
/// Choi matrix of `L_B L_A^{-1}` and a sampling oracle.
pub fn check_domination(prob: &Problem, oracle_trials: usize, seed: u64) -> Result<DominationReport> {
    let hp = hill_pick(prob)?;
    let hill = is_psd(&hp.h, &prob.tol)?;
    let choi = lyapunov_order_map(prob)?.is_completely_positive(&prob.tol)?;
    let oracle = domination_oracle(prob, oracle_trials, seed)?;
    Ok(DominationReport {
        verdict: hill.verdict.into(),
        hill_pick_verdict: hill.verdict,
        hill_pick_min_eig: hill.min_eig,
        choi_verdict: choi.verdict,
        choi_min_eig: choi.min_eig,
        psd_band: hill.band,
        methods_agree: agree(hill.verdict, choi.verdict, &oracle),
        oracle,
    })
}

fn gaussian_gram(n: usize, field: Field, rng: &mut ChaCha8Rng) -> Mat {
    let g = Mat::random(n, n, field, rng);
    &g * &g.adjoint()
}

fn sample_with(inverse: &Mat, n: usize, field: Field, count: usize, seed: u64) -> Vec<Mat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let w = gaussian_gram(n, field, &mut rng);
            let h = unvec(&(inverse * &vec(&w)), n, n).expect("shape");
            h.hermitian_part()
        })
        .collect()
}

/// Hermitian `H` with `HA + A*H = W`, for Gaussian Gram matrices `W = G G*`.
pub fn sample_lyapunov_solutions(a: &Mat, count: usize, seed: u64) -> Result<Vec<Mat>> {
    let inv = lyapunov_matricization(a).matricization().inverse()?;
    Ok(sample_with(&inv, a.rows(), a.field(), count, seed))
}

fn run_oracle(
    samples: Vec<Mat>,
    image: impl Fn(&Mat) -> Mat,
    tol: &Tolerances,
) -> Result<OracleOutcome> {
    let trials = samples.len();
    for (trial, h) in samples.into_iter().enumerate() {
        let r = is_psd(&image(&h).hermitian_part(), tol)?;
        if r.verdict == PsdVerdict::No {
            return Ok(OracleOutcome::Violation {
                trial,
                min_eig: r.min_eig,
                h,
            });
        }
    }
    Ok(OracleOutcome::NoViolation { trials })
}

/// Samples the Lyapunov cone of `A` and tests `HB + B*H >= 0` on each sample.
pub fn domination_oracle(prob: &Problem, trials: usize, seed: u64) -> Result<OracleOutcome> {
    lyapunov_regularity(&prob.spec, &prob.tol)?;
    let b = prob.b();
    let samples = sample_lyapunov_solutions(&prob.a(), trials, seed)?;
    run_oracle(samples, |h| &(h * &b) + &(&b.adjoint() * h), &prob.tol)
}

/// `I - conj(A) ⊗ A`, the matricization of `X -> X - A X A*`.
pub fn stein_matricization(a: &Mat) -> StarLinearMap {
    let n = a.rows();
    let l = &Mat::identity(n * n) - &kron(&a.conj(), a);
    StarLinearMap::new(l, n, n).expect("square input")
}

/// The Stein operator of A is invertible iff no two eigenvalues satisfy
/// `a conj(b) = 1`.
pub fn stein_regularity(spec: &JordanSpec, tol: &Tolerances) -> Result<()> {
    let sp = spec.spectrum();
    for &a in &sp {
        for &b in &sp {
            if (a * b.conj() - ONE).norm() <= tol.eq_rel * (1.0 + a.norm() * b.norm()) {
                return Err(Error::NotSteinRegular(fmt_c(a), fmt_c(b)));
            }
        }
    }
    Ok(())
}

/// `S_B S_A^{-1}` for the Stein operators `S_Y(X) = X - Y X Y*`.
pub fn stein_order_map(prob: &Problem) -> Result<StarLinearMap> {
    stein_regularity(&prob.spec, &prob.tol)?;
    order_map(&stein_matricization(&prob.a()), &stein_matricization(&prob.b()))
}

/// Hermitian `H` with `H - A H A* = W` for Gaussian Gram matrices `W`.
pub fn sample_stein_solutions(a: &Mat, count: usize, seed: u64) -> Result<Vec<Mat>> {
    let inv = stein_matricization(a).matricization().inverse()?;
    Ok(sample_with(&inv, a.rows(), a.field(), count, seed))
}

/// Samples the Stein cone of `A` and tests `H - B H B* >= 0` on each sample.
pub fn stein_oracle(prob: &Problem, trials: usize, seed: u64) -> Result<OracleOutcome> {
    stein_regularity(&prob.spec, &prob.tol)?;
    let b = prob.b();
    let samples = sample_stein_solutions(&prob.a(), trials, seed)?;
    run_oracle(samples, |h| h - &(&(&b * h) * &b.adjoint()), &prob.tol)
}

/// Stein domination: the verdict comes from the Choi matrix of
/// `S_B S_A^{-1}`; the Hill column reports a minimal Hill representation of
/// the same map.
pub fn stein_domination(prob: &Problem, oracle_trials: usize, seed: u64) -> Result<DominationReport> {
    let map = stein_order_map(prob)?;
    let choi = map.is_completely_positive(&prob.tol)?;
    let hill: PsdReport = cp_via_hill(&minimal_hill_from_blocks(&map, &prob.tol)?, &prob.tol)?;
    let oracle = stein_oracle(prob, oracle_trials, seed)?;
    Ok(DominationReport {
        verdict: choi.verdict.into(),
        hill_pick_verdict: hill.verdict,
        hill_pick_min_eig: hill.min_eig,
        choi_verdict: choi.verdict,
        choi_min_eig: choi.min_eig,
        psd_band: choi.band,
        methods_agree: agree(hill.verdict, choi.verdict, &oracle),
        oracle,
    })
}

/// Matrices as nested rows of `[re, im]` pairs.
pub mod mat_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::linalg::{Mat, C64};

    pub fn to_rows(m: &Mat) -> Vec<Vec<[f64; 2]>> {
        (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<Mat, String> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err("rows have different lengths".into());
        }
        let data = rows
            .iter()
            .flatten()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        Ok(Mat::from_complex(r, c, data))
    }

    pub fn serialize<S: Serializer>(m: &Mat, s: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(serde::de::Error::custom)
    }
}
