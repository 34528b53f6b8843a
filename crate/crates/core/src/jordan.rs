//! Jordan data, the matrix it describes, and the bicommutant of that matrix.
//!
//! Over the reals an eigenvalue with positive imaginary part stands for the
//! conjugate pair and its Jordan blocks use the 2x2 blocks
//! `[[a, b], [-b, a]]` for `a + ib` in place of scalars.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, rank_tol, Field, Mat, Tolerances, C64, ONE, ZERO};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenBlock {
    pub lambda: C64,
    /// Jordan block sizes, nonincreasing.
    pub sizes: Vec<usize>,
}

/// Largest supported Jordan block; keeps the binomials in the closed forms exact.
pub const MAX_BLOCK: usize = 30;

#[derive(Clone, Debug)]
pub struct JordanSpec {
    field: Field,
    eigens: Vec<EigenBlock>,
    p: Option<Mat>,
    p_inv: Option<Mat>,
    n: usize,
}

impl JordanSpec {
    pub fn new(
        field: Field,
        eigens: Vec<EigenBlock>,
        p: Option<Mat>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if eigens.is_empty() {
            return Err(Error::InvalidSpec("no eigenvalues given".into()));
        }
        for (g, e) in eigens.iter().enumerate() {
            if !(e.lambda.re.is_finite() && e.lambda.im.is_finite()) {
                return Err(Error::InvalidSpec(format!("eigenvalue {g} is not finite")));
            }
            if e.sizes.is_empty() {
                return Err(Error::InvalidSpec(format!("eigenvalue {g} has no Jordan blocks")));
            }
            if e.sizes.contains(&0) {
                return Err(Error::InvalidSpec(format!("eigenvalue {g} has a block of size 0")));
            }
            if e.sizes.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidSpec(format!(
                    "block sizes of eigenvalue {g} must be nonincreasing"
                )));
            }
            if e.sizes[0] > MAX_BLOCK {
                return Err(Error::InvalidSpec(format!(
                    "eigenvalue {g}: block size {} exceeds the limit {MAX_BLOCK}",
                    e.sizes[0]
                )));
            }
            if field == Field::Real && e.lambda.im < 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "eigenvalue {g}: over the reals list the member of a conjugate pair with positive imaginary part"
                )));
            }
        }
        for a in 0..eigens.len() {
            for b in a + 1..eigens.len() {
                let (x, y) = (eigens[a].lambda, eigens[b].lambda);
                if (x - y).norm() <= tol.eq_rel * (1.0 + x.norm() + y.norm()) {
                    return Err(Error::InvalidSpec(format!(
                        "eigenvalues {a} and {b} coincide"
                    )));
                }
            }
        }
        let width = |e: &EigenBlock| {
            if field == Field::Real && e.lambda.im != 0.0 {
                2
            } else {
                1
            }
        };
        let n = eigens
            .iter()
            .map(|e| width(e) * e.sizes.iter().sum::<usize>())
            .sum();
        let p_inv = match &p {
            None => None,
            Some(p) => {
                if p.shape() != (n, n) {
                    return Err(Error::InvalidSpec(format!(
                        "P must be {n}x{n}, found {}x{}",
                        p.rows(),
                        p.cols()
                    )));
                }
                if field == Field::Real && p.field() != Field::Real {
                    return Err(Error::InvalidSpec("P must be real over the reals".into()));
                }
                if !p.is_finite() || rank_tol(p, tol) < n {
                    return Err(Error::InvalidSpec("P is singular".into()));
                }
                Some(p.inverse().map_err(|_| Error::InvalidSpec("P is singular".into()))?)
            }
        };
        let p = p.map(|p| p.coerce(field));
        let p_inv = p_inv.map(|m| m.coerce(field));
        Ok(JordanSpec {
            field,
            eigens,
            p,
            p_inv,
            n,
        })
    }

    /// Complex Jordan data without a change of basis.
    pub fn complex(eigens: Vec<(C64, Vec<usize>)>) -> Result<Self> {
        Self::new(
            Field::Complex,
            eigens
                .into_iter()
                .map(|(lambda, sizes)| EigenBlock { lambda, sizes })
                .collect(),
            None,
            &Tolerances::default(),
        )
    }

    /// Returns the same Jordan data with a different change of basis.
    pub fn with_basis(&self, p: Option<Mat>, tol: &Tolerances) -> Result<Self> {
        Self::new(self.field, self.eigens.clone(), p, tol)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn eigens(&self) -> &[EigenBlock] {
        &self.eigens
    }

    pub fn p(&self) -> Option<&Mat> {
        self.p.as_ref()
    }

    pub fn p_inv(&self) -> Option<&Mat> {
        self.p_inv.as_ref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True when group `g` is a conjugate pair realized with 2x2 blocks.
    pub fn is_pair(&self, g: usize) -> bool {
        self.field == Field::Real && self.eigens[g].lambda.im != 0.0
    }

    /// Scalar width of one Jordan step in group `g` (1, or 2 for a real pair).
    pub fn width(&self, g: usize) -> usize {
        if self.is_pair(g) {
            2
        } else {
            1
        }
    }

    /// Dimension spanned by group `g`.
    pub fn group_dim(&self, g: usize) -> usize {
        self.width(g) * self.eigens[g].sizes.iter().sum::<usize>()
    }

    /// Starting index of each group.
    pub fn group_offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.eigens.len());
        let mut acc = 0;
        for g in 0..self.eigens.len() {
            out.push(acc);
            acc += self.group_dim(g);
        }
        out
    }

    /// `(group, block index, offset, size)` for every Jordan block in order.
    pub fn blocks(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut out = Vec::new();
        let mut off = 0;
        for (g, e) in self.eigens.iter().enumerate() {
            for (q, &s) in e.sizes.iter().enumerate() {
                out.push((g, q, off, s));
                off += s * self.width(g);
            }
        }
        out
    }

    /// All eigenvalues of the described matrix, conjugates included, without multiplicity.
    pub fn spectrum(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for (g, e) in self.eigens.iter().enumerate() {
            out.push(e.lambda);
            if self.is_pair(g) {
                out.push(e.lambda.conj());
            }
        }
        out
    }

    /// Maps a matrix from Jordan coordinates: `P M P^{-1}`.
    pub fn to_standard(&self, m: &Mat) -> Mat {
        match (&self.p, &self.p_inv) {
            (Some(p), Some(pi)) => &(p * m) * pi,
            _ => m.clone(),
        }
    }

    /// Maps a matrix into Jordan coordinates: `P^{-1} M P`.
    pub fn to_jordan(&self, m: &Mat) -> Mat {
        match (&self.p, &self.p_inv) {
            (Some(p), Some(pi)) => &(pi * m) * p,
            _ => m.clone(),
        }
    }
}

/// Upper shift of size `n`: ones on the first superdiagonal.
pub fn shift(n: usize) -> Mat {
    Mat::from_fn(n, n, Field::Real, |i, j| if j == i + 1 { ONE } else { ZERO })
}

/// `[[a, b], [-b, a]]` for `z = a + ib`.
pub fn pair_block(z: C64) -> Mat {
    Mat::from_real(2, 2, &[z.re, z.im, -z.im, z.re])
}

/// Upper-triangular Toeplitz matrix `sum_i t_i S^i` of size `size`, or its
/// 2x2-block analogue when `pair` is set.
pub fn toeplitz_upper(size: usize, coeffs: &[C64], pair: bool) -> Mat {
    let w = if pair { 2 } else { 1 };
    let mut out = Mat::zeros(size * w, size * w, Field::Real);
    for p in 0..size {
        for v in 0..size - p {
            let t = coeffs.get(v).copied().unwrap_or(ZERO);
            if pair {
                out.set_block(2 * p, 2 * (p + v), &pair_block(t));
            } else {
                out.set(p, p + v, t);
            }
        }
    }
    out
}

/// The Jordan matrix `J_A`.
pub fn build_ja(spec: &JordanSpec) -> Mat {
    let parts: Vec<Mat> = spec
        .blocks()
        .into_iter()
        .map(|(g, _, _, s)| {
            toeplitz_upper(s, &[spec.eigens[g].lambda, ONE], spec.is_pair(g))
        })
        .collect();
    Mat::block_diag(&parts).coerce(spec.field)
}

/// `A = P J_A P^{-1}`.
pub fn build_a(spec: &JordanSpec) -> Mat {
    spec.to_standard(&build_ja(spec)).coerce(spec.field)
}

/// The Lyapunov operator of A is invertible iff no two eigenvalues (conjugates
/// included) satisfy `a + conj(b) = 0`, tested with relative slack `eq_rel`.
pub fn lyapunov_regularity(spec: &JordanSpec, tol: &Tolerances) -> Result<()> {
    let sp = spec.spectrum();
    for &a in &sp {
        for &b in &sp {
            if (a + b.conj()).norm() <= tol.eq_rel * (a.norm() + b.norm()) {
                return Err(Error::NotLyapunovRegular(fmt_c(a), fmt_c(b)));
            }
        }
    }
    Ok(())
}

pub fn is_lyapunov_regular(spec: &JordanSpec, tol: &Tolerances) -> bool {
    lyapunov_regularity(spec, tol).is_ok()
}

pub(crate) fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

/// Element of `{A}''` given by one Toeplitz coefficient list per eigenvalue.
/// Every Jordan block of an eigenvalue reuses the leading coefficients of the
/// list for its largest block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BicommElement {
    pub coeffs: Vec<Vec<C64>>,
}

impl BicommElement {
    pub fn new(coeffs: Vec<Vec<C64>>) -> Self {
        BicommElement { coeffs }
    }

    /// Coefficients reproducing `A` itself.
    pub fn of_a(spec: &JordanSpec) -> Self {
        BicommElement {
            coeffs: spec
                .eigens()
                .iter()
                .map(|e| {
                    let mut t = vec![ZERO; e.sizes[0]];
                    t[0] = e.lambda;
                    if t.len() > 1 {
                        t[1] = ONE;
                    }
                    t
                })
                .collect(),
        }
    }

    pub fn identity(spec: &JordanSpec) -> Self {
        BicommElement {
            coeffs: spec
                .eigens()
                .iter()
                .map(|e| {
                    let mut t = vec![ZERO; e.sizes[0]];
                    t[0] = ONE;
                    t
                })
                .collect(),
        }
    }

    pub fn validate(&self, spec: &JordanSpec) -> Result<()> {
        if self.coeffs.len() != spec.eigens().len() {
            return Err(Error::InvalidSpec(format!(
                "B has {} coefficient lists for {} eigenvalues",
                self.coeffs.len(),
                spec.eigens().len()
            )));
        }
        for (g, (t, e)) in self.coeffs.iter().zip(spec.eigens()).enumerate() {
            if t.len() != e.sizes[0] {
                return Err(Error::InvalidSpec(format!(
                    "B coefficients for eigenvalue {g}: expected {}, found {}",
                    e.sizes[0],
                    t.len()
                )));
            }
            if t.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::InvalidSpec(format!(
                    "B coefficients for eigenvalue {g} are not finite"
                )));
            }
            if spec.field() == Field::Real && !spec.is_pair(g) && t.iter().any(|z| z.im != 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "B coefficients for real eigenvalue {g} must be real"
                )));
            }
        }
        Ok(())
    }
}

/// `B` in Jordan coordinates (block diagonal, one Toeplitz block per Jordan block).
pub fn build_bicomm_tilde(spec: &JordanSpec, b: &BicommElement) -> Result<Mat> {
    b.validate(spec)?;
    Ok(tilde_unchecked(spec, &b.coeffs))
}

fn tilde_unchecked(spec: &JordanSpec, coeffs: &[Vec<C64>]) -> Mat {
    let parts: Vec<Mat> = spec
        .blocks()
        .into_iter()
        .map(|(g, _, _, s)| {
            let t: Vec<C64> = if spec.field() == Field::Real && !spec.is_pair(g) {
                coeffs[g].iter().map(|z| C64::new(z.re, 0.0)).collect()
            } else {
                coeffs[g].clone()
            };
            toeplitz_upper(s, &t, spec.is_pair(g))
        })
        .collect();
    Mat::block_diag(&parts).coerce(spec.field())
}

/// `B = P B~ P^{-1}`.
pub fn build_bicomm_element(spec: &JordanSpec, b: &BicommElement) -> Result<Mat> {
    Ok(spec.to_standard(&build_bicomm_tilde(spec, b)?).coerce(spec.field()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    Member,
    /// First offending entry of `P^{-1} B P`, row-major.
    Nonmember {
        row: usize,
        col: usize,
        found: C64,
        expected: C64,
    },
}

fn read_coeffs(spec: &JordanSpec, bt: &Mat) -> Vec<Vec<C64>> {
    let offsets = spec.group_offsets();
    spec.eigens()
        .iter()
        .enumerate()
        .map(|(g, e)| {
            let off = offsets[g];
            (0..e.sizes[0])
                .map(|v| {
                    if spec.is_pair(g) {
                        C64::new(bt[(off, off + 2 * v)].re, bt[(off, off + 2 * v + 1)].re)
                    } else {
                        bt[(off, off + v)]
                    }
                })
                .collect()
        })
        .collect()
}

/// Decides whether `B` lies in `{A}''` by reading Toeplitz coefficients off
/// the first row of the largest block per eigenvalue and comparing the
/// rebuilt matrix entry by entry with tolerance `eq_rel * (1 + ||P^{-1} B P||_F)`.
pub fn check_bicomm_membership(spec: &JordanSpec, b: &Mat, tol: &Tolerances) -> Result<Membership> {
    let n = spec.n();
    if b.shape() != (n, n) {
        return Err(Error::Shape {
            op: "check_bicomm_membership",
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    let bt = spec.to_jordan(b);
    let expect = tilde_unchecked(spec, &read_coeffs(spec, &bt));
    let slack = tol.eq_rel * (1.0 + bt.frobenius_norm());
    for i in 0..n {
        for j in 0..n {
            let (f, e) = (bt[(i, j)], expect[(i, j)]);
            if (f - e).norm() > slack {
                return Ok(Membership::Nonmember {
                    row: i,
                    col: j,
                    found: f,
                    expected: e,
                });
            }
        }
    }
    Ok(Membership::Member)
}

/// Toeplitz coefficients of a member of `{A}''`.
pub fn extract_bicomm_coeffs(spec: &JordanSpec, b: &Mat, tol: &Tolerances) -> Result<BicommElement> {
    match check_bicomm_membership(spec, b, tol)? {
        Membership::Member => {
            let bt = spec.to_jordan(b);
            let mut coeffs = read_coeffs(spec, &bt);
            if spec.field() == Field::Real {
                for (g, t) in coeffs.iter_mut().enumerate() {
                    if !spec.is_pair(g) {
                        for z in t.iter_mut() {
                            z.im = 0.0;
                        }
                    }
                }
            }
            Ok(BicommElement { coeffs })
        }
        Membership::Nonmember {
            row,
            col,
            found,
            expected,
        } => Err(Error::NotInBicommutant {
            row,
            col,
            found: fmt_c(found),
            expected: fmt_c(expected),
        }),
    }
}

/// `J_n(C) = I_n ⊗ C + S_n ⊗ I_2`, the real Jordan block of a conjugate pair.
pub fn real_pair_jordan(n: usize, lambda: C64) -> Mat {
    &kron(&Mat::identity(n), &pair_block(lambda)) + &kron(&shift(n), &Mat::identity(2))
}
