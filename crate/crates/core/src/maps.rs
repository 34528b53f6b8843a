//! Linear maps `F^{q x q} -> F^{n x n}` stored as their matricization `L`,
//! the `n^2 x q^2` matrix with `L vec(V) = vec(map(V))`.
//!
//! Block `(i, j)` of `L` is `n x q`; the scalar `L[i*n + k, j*q + l]` equals
//! entry `(k, i)` of the image of the matrix unit `E_{lj}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{is_psd, kron, unvec, vec, Field, Mat, PsdReport, Tolerances};

#[derive(Clone, Debug, PartialEq)]
pub struct StarLinearMap {
    n: usize,
    q: usize,
    l: Mat,
}

impl StarLinearMap {
    /// Wraps a matricization. Only the shape is checked; use
    /// [`StarLinearMap::is_star_linear`] for the `*`-property.
    pub fn new(l: Mat, n: usize, q: usize) -> Result<Self> {
        if l.shape() != (n * n, q * q) {
            return Err(Error::Shape {
                op: "StarLinearMap::new",
                expected: format!("{}x{}", n * n, q * q),
                found: format!("{}x{}", l.rows(), l.cols()),
            });
        }
        Ok(StarLinearMap { n, q, l })
    }

    pub fn identity(n: usize) -> Self {
        StarLinearMap {
            n,
            q: n,
            l: Mat::identity(n * n),
        }
    }

    /// `V -> X V X*` for `X` of size `n x q`.
    pub fn congruence(x: &Mat) -> Self {
        StarLinearMap {
            n: x.rows(),
            q: x.cols(),
            l: kron(&x.conj(), x),
        }
    }

    /// `V -> V^T` on `n x n` matrices.
    pub fn transpose_map(n: usize) -> Self {
        let mut l = Mat::zeros(n * n, n * n, Field::Real);
        for i in 0..n {
            for j in 0..n {
                // vec(E_ij) sits at j*n + i; its transpose E_ji at i*n + j.
                l.set(i * n + j, j * n + i, crate::linalg::ONE);
            }
        }
        StarLinearMap { n, q: n, l }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn field(&self) -> Field {
        self.l.field()
    }

    pub fn matricization(&self) -> &Mat {
        &self.l
    }

    pub fn into_matricization(self) -> Mat {
        self.l
    }

    /// Block `L_{ij}` (`n x q`).
    pub fn block(&self, i: usize, j: usize) -> Mat {
        self.l.block(i * self.n, j * self.q, self.n, self.q)
    }

    /// Scalar `l^{ij}_{kl}`: entry `(k, l)` of block `L_{ij}`.
    pub fn entry(&self, i: usize, j: usize, k: usize, l: usize) -> crate::linalg::C64 {
        self.l[(i * self.n + k, j * self.q + l)]
    }

    pub fn apply(&self, v: &Mat) -> Result<Mat> {
        if v.shape() != (self.q, self.q) {
            return Err(Error::Shape {
                op: "apply",
                expected: format!("{}x{}", self.q, self.q),
                found: format!("{}x{}", v.rows(), v.cols()),
            });
        }
        unvec(&(&self.l * &vec(v)), self.n, self.n)
    }

    /// Choi matrix: the `nq x nq` matrix whose block `(a, b)` is the image of `E_ab`.
    pub fn choi(&self) -> Mat {
        let (n, q) = (self.n, self.q);
        let mut c = Mat::zeros(n * q, n * q, self.l.field());
        for i in 0..n {
            for k in 0..n {
                for j in 0..q {
                    for l in 0..q {
                        c.set(l * n + k, j * n + i, self.l[(i * n + k, j * q + l)]);
                    }
                }
            }
        }
        c
    }

    /// Inverse of [`StarLinearMap::choi`].
    pub fn from_choi(choi: &Mat, n: usize, q: usize) -> Result<Self> {
        if choi.shape() != (n * q, n * q) {
            return Err(Error::Shape {
                op: "from_choi",
                expected: format!("{}x{}", n * q, n * q),
                found: format!("{}x{}", choi.rows(), choi.cols()),
            });
        }
        let mut l = Mat::zeros(n * n, q * q, choi.field());
        for i in 0..n {
            for k in 0..n {
                for j in 0..q {
                    for m in 0..q {
                        l.set(i * n + k, j * q + m, choi[(m * n + k, j * n + i)]);
                    }
                }
            }
        }
        Ok(StarLinearMap { n, q, l })
    }

    fn slack(&self, tol: &Tolerances) -> f64 {
        tol.eq_rel * (1.0 + self.l.frobenius_norm())
    }

    /// `*`-linearity via Hermiticity of the Choi matrix.
    pub fn choi_is_hermitian(&self, tol: &Tolerances) -> bool {
        let c = self.choi();
        (&c - &c.adjoint()).frobenius_norm() <= self.slack(tol)
    }

    /// `*`-linearity via the entry symmetry `l^{ij}_{kl} = conj(l^{kl}_{ij})`.
    /// Needs a square map.
    pub fn entries_are_symmetric(&self, tol: &Tolerances) -> bool {
        if self.n != self.q {
            return self.choi_is_hermitian(tol);
        }
        let n = self.n;
        let mut dev = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        dev += (self.entry(i, j, k, l) - self.entry(k, l, i, j).conj()).norm_sqr();
                    }
                }
            }
        }
        dev.sqrt() <= self.slack(tol)
    }

    pub fn is_star_linear(&self, tol: &Tolerances) -> bool {
        self.choi_is_hermitian(tol)
    }

    /// PSD test of the Choi matrix.
    pub fn is_completely_positive(&self, tol: &Tolerances) -> Result<PsdReport> {
        if !self.is_star_linear(tol) {
            return Err(Error::NotStarLinear);
        }
        is_psd(&self.choi(), tol)
    }

    /// Samples `(z ⊗ x)* C (z ⊗ x)` for Gaussian `z`, `x`; a value below
    /// `-psd_rel (1 + ||C||_2)` refutes positivity.
    pub fn positivity_sample_test(
        &self,
        trials: usize,
        seed: u64,
        tol: &Tolerances,
    ) -> Result<PositivitySample> {
        if !self.is_star_linear(tol) {
            return Err(Error::NotStarLinear);
        }
        let c = self.choi();
        let thresh = -tol.psd_rel * (1.0 + c.spectral_norm());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = self.field();
        for _ in 0..trials {
            let z = Mat::random(self.q, 1, field, &mut rng);
            let x = Mat::random(self.n, 1, field, &mut rng);
            let w = kron(&z, &x);
            let value = (&(&w.adjoint() * &c) * &w)[(0, 0)].re;
            if value < thresh {
                return Ok(PositivitySample::Refuted { z, x, value });
            }
        }
        Ok(PositivitySample::Undecided)
    }

    /// `g ∘ f`: apply `f` first, then `g`.
    pub fn compose(f: &StarLinearMap, g: &StarLinearMap) -> Result<Self> {
        if f.n != g.q {
            return Err(Error::Shape {
                op: "compose",
                expected: format!("second map acting on {}x{} matrices", f.n, f.n),
                found: format!("{}x{}", g.q, g.q),
            });
        }
        Ok(StarLinearMap {
            n: g.n,
            q: f.q,
            l: &g.l * &f.l,
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(StarLinearMap {
            n: self.q,
            q: self.n,
            l: self.l.inverse()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PositivitySample {
    /// `x* map(w w*) x = value < 0` with `w = conj(z)`.
    Refuted { z: Mat, x: Mat, value: f64 },
    Undecided,
}
