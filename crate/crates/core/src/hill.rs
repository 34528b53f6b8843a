//! Hill representations `L = sum_{k,l} H_kl conj(A_k) ⊗ A_l`, equivalently
//! `map(V) = sum_{k,l} H_kl A_l V A_k*`, and the witness tests under which a
//! positive map is automatically completely positive.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jordan::JordanSpec;
use crate::linalg::{is_psd, kron, rank_tol, unvec, vec, Field, Mat, PsdReport, PsdVerdict, Tolerances};
use crate::maps::StarLinearMap;

#[derive(Clone, Debug, PartialEq)]
pub struct HillRep {
    n: usize,
    q: usize,
    a: Vec<Mat>,
    h: Mat,
    /// Block indices the representation was read from, if any.
    selection: Vec<(usize, usize)>,
    minimal: bool,
}

impl HillRep {
    /// Builds a representation from `n x q` matrices and an `r x r` coefficient matrix.
    pub fn new(a: Vec<Mat>, h: Mat, minimal: bool) -> Result<Self> {
        let r = a.len();
        if r == 0 {
            return Err(Error::InvalidArgument("empty Hill representation".into()));
        }
        let (n, q) = a[0].shape();
        if a.iter().any(|m| m.shape() != (n, q)) {
            return Err(Error::Shape {
                op: "HillRep::new",
                expected: format!("all factors {n}x{q}"),
                found: "mixed shapes".into(),
            });
        }
        if h.shape() != (r, r) {
            return Err(Error::Shape {
                op: "HillRep::new",
                expected: format!("{r}x{r} coefficient matrix"),
                found: format!("{}x{}", h.rows(), h.cols()),
            });
        }
        Ok(HillRep {
            n,
            q,
            a,
            h,
            selection: Vec::new(),
            minimal,
        })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn factors(&self) -> &[Mat] {
        &self.a
    }

    pub fn coefficients(&self) -> &Mat {
        &self.h
    }

    pub fn selection(&self) -> &[(usize, usize)] {
        &self.selection
    }

    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    /// `r x nq` matrix whose rows are `vec(A_k)*`.
    pub fn ahat(&self) -> Mat {
        Mat::vstack(&self.a.iter().map(|m| vec(m).adjoint()).collect::<Vec<_>>())
    }

    /// The represented map as a matricization.
    pub fn reconstruct(&self) -> StarLinearMap {
        let field = self.a.iter().fold(self.h.field(), |f, m| f.join(m.field()));
        let mut l = Mat::zeros(self.n * self.n, self.q * self.q, field);
        let conj: Vec<Mat> = self.a.iter().map(|m| m.conj()).collect();
        for (k, ck) in conj.iter().enumerate() {
            for (j, al) in self.a.iter().enumerate() {
                let h = self.h[(k, j)];
                if h.norm() == 0.0 {
                    continue;
                }
                l = &l + &kron(ck, al).scale(h);
            }
        }
        StarLinearMap::new(l.coerce(field), self.n, self.q).expect("shape is consistent")
    }

    /// Direct evaluation `sum_{k,l} H_kl A_l V A_k*`.
    pub fn apply(&self, v: &Mat) -> Result<Mat> {
        if v.shape() != (self.q, self.q) {
            return Err(Error::Shape {
                op: "HillRep::apply",
                expected: format!("{}x{}", self.q, self.q),
                found: format!("{}x{}", v.rows(), v.cols()),
            });
        }
        let mut out = Mat::zeros(self.n, self.n, v.field());
        for (k, ak) in self.a.iter().enumerate() {
            let right = v * &ak.adjoint();
            for (l, al) in self.a.iter().enumerate() {
                out = &out + &(al * &right).scale(self.h[(k, l)]);
            }
        }
        Ok(out)
    }
}

fn block_vecs(map: &StarLinearMap) -> Vec<((usize, usize), Mat)> {
    let (n, q) = (map.n(), map.q());
    let mut out = Vec::with_capacity(n * q);
    for i in 0..n {
        for j in 0..q {
            out.push(((i, j), vec(&map.block(i, j))));
        }
    }
    out
}

/// Greedy row-major choice of blocks: a block is kept iff it raises the
/// number of singular values of the stacked vecs above `rank_rel * sigma_max`,
/// with `sigma_max` taken over all blocks (the stacked matrix is a column
/// permutation of the Choi matrix, so the final count matches its rank).
fn greedy_independent(blocks: &[((usize, usize), Mat)], tol: &Tolerances) -> Vec<(usize, usize)> {
    let all = Mat::hstack(&blocks.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>());
    let smax = all.spectral_norm();
    if smax == 0.0 {
        return Vec::new();
    }
    let cut = tol.rank_rel * smax;
    let mut kept: Vec<Mat> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, v) in blocks {
        kept.push(v.clone());
        let rank = Mat::hstack(&kept).singular_values().iter().filter(|&&x| x > cut).count();
        if rank == kept.len() {
            chosen.push(*idx);
        } else {
            kept.pop();
        }
    }
    chosen
}

/// Reads a Hill representation off the chosen blocks: `H_kl` is entry
/// `(i_l, j_l)` of block `(i_k, j_k)` and `A_k` collects the conjugated
/// expansion coefficients of every block along the chosen ones.
fn hill_from_selection(
    map: &StarLinearMap,
    selection: &[(usize, usize)],
    minimal: bool,
    tol: &Tolerances,
) -> Result<HillRep> {
    let (n, q) = (map.n(), map.q());
    let r = selection.len();
    if r == 0 {
        return Err(Error::InvalidSelection("no blocks selected".into()));
    }
    for (k, &(i, j)) in selection.iter().enumerate() {
        if i >= n || j >= q {
            return Err(Error::InvalidSelection(format!(
                "block ({i}, {j}) is outside the {n}x{q} block grid"
            )));
        }
        if selection[..k].contains(&(i, j)) {
            return Err(Error::InvalidSelection(format!("block ({i}, {j}) is selected twice")));
        }
    }
    let blocks = block_vecs(map);
    let scale = Mat::hstack(&blocks.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>()).spectral_norm();
    let basis = Mat::hstack(
        &selection
            .iter()
            .map(|&(i, j)| vec(&map.block(i, j)))
            .collect::<Vec<_>>(),
    );
    let field = map.field();
    let mut alphas = Mat::zeros(r, n * q, field);
    for ((i, j), v) in &blocks {
        let col = i * q + j;
        if let Some(k) = selection.iter().position(|s| s == &(*i, *j)) {
            alphas.set(k, col, crate::linalg::ONE);
            continue;
        }
        let alpha = basis.lstsq(v, tol.rank_rel)?;
        let residual = (&(&basis * &alpha) - v).frobenius_norm();
        // Discarding directions below the rank cut leaves a residual of at
        // most about cut * (1 + |alpha|).
        let allowed = tol.eq_rel.max(tol.rank_rel) * (1.0 + scale) * (1.0 + alpha.frobenius_norm());
        if residual > allowed {
            return Err(Error::SpanViolation {
                row: *i,
                col: *j,
                residual,
            });
        }
        alphas.set_block(0, col, &alpha);
    }
    let alphas = alphas.coerce(field);
    let a: Vec<Mat> = (0..r)
        .map(|k| Mat::from_fn(n, q, field, |i, j| alphas[(k, i * q + j)].conj()))
        .collect();
    let h = Mat::from_fn(r, r, field, |k, l| {
        let (ik, jk) = selection[k];
        let (il, jl) = selection[l];
        map.entry(ik, jk, il, jl)
    });
    Ok(HillRep {
        n,
        q,
        a,
        h,
        selection: selection.to_vec(),
        minimal,
    })
}

/// Minimal Hill representation from a greedy choice of independent blocks.
/// Its length equals the rank of the Choi matrix.
pub fn minimal_hill_from_blocks(map: &StarLinearMap, tol: &Tolerances) -> Result<HillRep> {
    if !map.is_star_linear(tol) {
        return Err(Error::NotStarLinear);
    }
    let blocks = block_vecs(map);
    let chosen = greedy_independent(&blocks, tol);
    let m = rank_tol(&map.choi(), tol);
    if chosen.len() != m {
        return Err(Error::RankMismatch {
            blocks: chosen.len(),
            choi: m,
        });
    }
    if m == 0 {
        return Err(Error::InvalidArgument("the zero map has no Hill representation".into()));
    }
    hill_from_selection(map, &chosen, true, tol)
}

/// Hill representation read off a caller-chosen set of blocks that spans all
/// blocks. Repeated indices are rejected.
pub fn nonminimal_hill(
    map: &StarLinearMap,
    selection: &[(usize, usize)],
    tol: &Tolerances,
) -> Result<HillRep> {
    if !map.is_star_linear(tol) {
        return Err(Error::NotStarLinear);
    }
    let m = rank_tol(&map.choi(), tol);
    hill_from_selection(map, selection, selection.len() == m, tol)
}

/// Hill coefficient matrix for given factors, from the Choi matrix:
/// `H^T = (Â Â*)^{-1} Â C Â* (Â Â*)^{-1}`.
pub fn hill_from_choi(map: &StarLinearMap, factors: &[Mat], tol: &Tolerances) -> Result<HillRep> {
    if !map.is_star_linear(tol) {
        return Err(Error::NotStarLinear);
    }
    let r = factors.len();
    if r == 0 {
        return Err(Error::InvalidArgument("no factors given".into()));
    }
    if factors.iter().any(|f| f.shape() != (map.n(), map.q())) {
        return Err(Error::Shape {
            op: "hill_from_choi",
            expected: format!("factors of size {}x{}", map.n(), map.q()),
            found: "other sizes".into(),
        });
    }
    let ahat = Mat::vstack(&factors.iter().map(|m| vec(m).adjoint()).collect::<Vec<_>>());
    let rank = rank_tol(&ahat, tol);
    if rank < r {
        return Err(Error::DependentRows { rank, rows: r });
    }
    let choi = map.choi();
    // With full row rank, (Â Â*)^{-1} Â = (Â*)^+; two least-squares solves
    // avoid squaring the condition number of Â.
    let adj = ahat.adjoint();
    let left = adj.lstsq(&choi, tol.rank_rel)?;
    let ht = adj.lstsq(&left.adjoint(), tol.rank_rel)?.adjoint();
    let back = &(&ahat.adjoint() * &ht) * &ahat;
    let residual = (&back - &choi).frobenius_norm();
    if residual > tol.eq_rel * (1.0 + choi.frobenius_norm()) {
        return Err(Error::KernelMismatch(residual));
    }
    let h = ht.transpose();
    let m = rank_tol(&choi, tol);
    Ok(HillRep {
        n: map.n(),
        q: map.q(),
        a: factors.to_vec(),
        h,
        selection: Vec::new(),
        minimal: r == m,
    })
}

/// Complete positivity read from the Hill coefficients. A minimal
/// representation must have an invertible coefficient matrix, so a PSD but
/// rank-deficient one is reported as marginal.
pub fn cp_via_hill(rep: &HillRep, tol: &Tolerances) -> Result<PsdReport> {
    let mut report = is_psd(&rep.h, tol)?;
    if rep.minimal && report.verdict == PsdVerdict::Yes && rank_tol(&rep.h, tol) < rep.len() {
        report.verdict = PsdVerdict::Marginal;
    }
    Ok(report)
}

/// `Â (z ⊗ I_n)`: rows `z^T A_k*`.
pub fn c1_matrix(rep: &HillRep, z: &Mat) -> Mat {
    &rep.ahat() * &kron(z, &Mat::identity(rep.n))
}

/// `Â (I_q ⊗ x)`: rows `x^T conj(A_k)`.
pub fn c2_matrix(rep: &HillRep, x: &Mat) -> Mat {
    &rep.ahat() * &kron(&Mat::identity(rep.q), x)
}

/// Orientation of the Toeplitz algebra spanned by the factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Triangular {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug)]
pub enum WitnessStrategy<'a> {
    /// Unit vectors per Jordan block, for factors inside a triangular Toeplitz
    /// algebra built on `spec` (P = I).
    Structured {
        spec: &'a JordanSpec,
        shape: Triangular,
    },
    Randomized {
        trials: usize,
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `A_k conj(z)` independent, `z` of length `q`.
    C1,
    /// `A_k* x` independent, `x` of length `n`.
    C2,
}

fn structured_vector(spec: &JordanSpec, first: bool) -> Mat {
    let mut v = Mat::zeros(spec.n(), 1, Field::Real);
    for (g, _, off, size) in spec.blocks() {
        let idx = if first { off } else { off + (size - 1) * spec.width(g) };
        v.set(idx, 0, crate::linalg::ONE);
    }
    v
}

fn find_witness(
    rep: &HillRep,
    cond: Condition,
    strategy: WitnessStrategy<'_>,
    tol: &Tolerances,
) -> Result<Option<Mat>> {
    let r = rep.len();
    let dim = match cond {
        Condition::C1 => rep.q,
        Condition::C2 => rep.n,
    };
    let test = |v: &Mat| {
        let m = match cond {
            Condition::C1 => c1_matrix(rep, v),
            Condition::C2 => c2_matrix(rep, v),
        };
        rank_tol(&m, tol) == r
    };
    match strategy {
        WitnessStrategy::Structured { spec, shape } => {
            if spec.n() != dim {
                return Err(Error::Shape {
                    op: "structured witness",
                    expected: format!("Jordan data of size {dim}"),
                    found: format!("size {}", spec.n()),
                });
            }
            let first = matches!(
                (cond, shape),
                (Condition::C1, Triangular::Lower) | (Condition::C2, Triangular::Upper)
            );
            let v = structured_vector(spec, first);
            Ok(test(&v).then_some(v))
        }
        WitnessStrategy::Randomized { trials, seed } => {
            let field = rep.a.iter().fold(Field::Real, |f, m| f.join(m.field()));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let v = Mat::random(dim, 1, field, &mut rng);
                if test(&v) {
                    return Ok(Some(v));
                }
            }
            Ok(None)
        }
    }
}

/// Looks for `z` with `rank Â(z ⊗ I_n) = r`.
pub fn find_c1_witness(rep: &HillRep, strategy: WitnessStrategy<'_>, tol: &Tolerances) -> Result<Option<Mat>> {
    find_witness(rep, Condition::C1, strategy, tol)
}

/// Looks for `x` with `rank Â(I_q ⊗ x) = r`.
pub fn find_c2_witness(rep: &HillRep, strategy: WitnessStrategy<'_>, tol: &Tolerances) -> Result<Option<Mat>> {
    find_witness(rep, Condition::C2, strategy, tol)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// Positivity of the map implies complete positivity.
    Certified { condition: Condition, vector: Mat },
    Uncertified,
}

/// Tries randomized witnesses for both conditions on a minimal representation.
pub fn positivity_equals_cp_certificate(
    map: &StarLinearMap,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Certificate> {
    let rep = minimal_hill_from_blocks(map, tol)?;
    let strategy = WitnessStrategy::Randomized { trials, seed };
    if let Some(z) = find_c1_witness(&rep, strategy, tol)? {
        return Ok(Certificate::Certified {
            condition: Condition::C1,
            vector: z,
        });
    }
    if let Some(x) = find_c2_witness(&rep, strategy, tol)? {
        return Ok(Certificate::Certified {
            condition: Condition::C2,
            vector: x,
        });
    }
    Ok(Certificate::Uncertified)
}

/// Factor `A_k` as an `n x q` matrix from a row of `Â`.
pub fn factor_from_row(row: &Mat, n: usize, q: usize) -> Result<Mat> {
    unvec(&row.adjoint(), n, q)
}
