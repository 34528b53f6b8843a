#![allow(dead_code)]

use hillpick::jordan::{build_bicomm_tilde, build_ja, extract_bicomm_coeffs, BicommElement, EigenBlock, JordanSpec};
use hillpick::linalg::{rank_tol, Field, Mat, Tolerances, C64, ONE};
use hillpick::lyapunov::Problem;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// How `B` is drawn relative to `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BKind {
    Random,
    Same,
    Inverse,
    /// `alpha A + beta A^{-1}` with nonnegative weights.
    Mix,
    /// `alpha A + beta A^{-1} + sum_k gamma_k A (A^2 + d_k^2)^{-1}` with
    /// positive weights; usually strictly inside the dominating cone.
    Reactance,
}

impl BKind {
    pub fn pick(rng: &mut ChaCha8Rng) -> Self {
        match rng.random_range(0..12) {
            0..=3 => BKind::Random,
            4 | 5 => BKind::Same,
            6 => BKind::Inverse,
            7 => BKind::Mix,
            _ => BKind::Reactance,
        }
    }
}

/// Random invertible matrix with condition number at most `max_cond`.
pub fn random_basis(n: usize, field: Field, max_cond: f64, rng: &mut ChaCha8Rng) -> Mat {
    loop {
        let p = Mat::random(n, n, field, rng);
        let s = p.singular_values();
        if s[n - 1] > 0.0 && s[0] / s[n - 1] <= max_cond {
            return p;
        }
    }
}

fn random_sizes(rng: &mut ChaCha8Rng, max_block: usize) -> Vec<usize> {
    let count = rng.random_range(1..=2);
    let mut s: Vec<usize> = (0..count).map(|_| rng.random_range(1..=max_block)).collect();
    s.sort_unstable_by(|a, b| b.cmp(a));
    s
}

/// Coefficients of `f(J)` for `f` applied in Jordan coordinates.
fn coeffs_of(spec: &JordanSpec, m: &Mat) -> BicommElement {
    let plain = spec.with_basis(None, &Tolerances::default()).unwrap();
    extract_bicomm_coeffs(&plain, m, &Tolerances::default()).unwrap()
}

pub fn make_b(spec: &JordanSpec, kind: BKind, rng: &mut ChaCha8Rng) -> BicommElement {
    let ja = build_ja(spec);
    match kind {
        BKind::Random => BicommElement::new(
            spec.eigens()
                .iter()
                .enumerate()
                .map(|(g, e)| {
                    let f = if spec.field() == Field::Real && !spec.is_pair(g) {
                        Field::Real
                    } else {
                        Field::Complex
                    };
                    (0..e.sizes[0]).map(|_| f.gaussian(rng)).collect()
                })
                .collect(),
        ),
        BKind::Same => BicommElement::of_a(spec),
        BKind::Inverse => coeffs_of(spec, &ja.inverse().unwrap()),
        BKind::Mix => {
            let alpha: f64 = rng.random_range(0.1..2.0);
            let beta: f64 = rng.random_range(0.1..2.0);
            let m = &ja.scale_re(alpha) + &ja.inverse().unwrap().scale_re(beta);
            coeffs_of(spec, &m)
        }
        BKind::Reactance => {
            let n = spec.n();
            let mut m = &ja.scale_re(rng.random_range(0.1..2.0))
                + &ja.inverse().unwrap().scale_re(rng.random_range(0.1..2.0));
            let sq = &ja * &ja;
            for _ in 0..3 {
                let d: f64 = rng.random_range(0.2..3.0);
                let shifted = &sq + &Mat::identity(n).scale_re(d * d);
                let term = &ja * &shifted.inverse().unwrap();
                m = &m + &term.scale_re(rng.random_range(0.1..2.0));
            }
            coeffs_of(spec, &m)
        }
    }
}

fn separated(spec_eigs: &[C64], z: C64, min_gap: f64) -> bool {
    spec_eigs.iter().all(|&w| (w - z).norm() > min_gap && (w + z.conj()).norm() > min_gap)
        && (z + z.conj()).norm() > min_gap
}

/// Random complex Jordan data: up to 3 eigenvalues, at most `max_n` in total.
pub fn random_complex_spec(rng: &mut ChaCha8Rng, max_n: usize, with_p: bool) -> JordanSpec {
    loop {
        let k = rng.random_range(1..=3);
        let mut eigens: Vec<EigenBlock> = Vec::new();
        let mut lams: Vec<C64> = Vec::new();
        while eigens.len() < k {
            let sign = if rng.random_bool(0.7) { 1.0 } else { -1.0 };
            let z = c(sign * rng.random_range(0.3..2.0), rng.random_range(-2.0..2.0));
            if !separated(&lams, z, 0.25) {
                continue;
            }
            lams.push(z);
            eigens.push(EigenBlock { lambda: z, sizes: random_sizes(rng, 3) });
        }
        let n: usize = eigens.iter().map(|e| e.sizes.iter().sum::<usize>()).sum();
        if n > max_n {
            continue;
        }
        let p = with_p.then(|| random_basis(n, Field::Complex, 50.0, rng));
        return JordanSpec::new(Field::Complex, eigens, p, &Tolerances::default()).unwrap();
    }
}

/// Random real Jordan data mixing real eigenvalues and conjugate pairs.
pub fn random_real_spec(rng: &mut ChaCha8Rng, max_n: usize, with_p: bool) -> JordanSpec {
    loop {
        let k = rng.random_range(1..=3);
        let mut eigens: Vec<EigenBlock> = Vec::new();
        let mut lams: Vec<C64> = Vec::new();
        let mut has_pair = false;
        while eigens.len() < k {
            let sign = if rng.random_bool(0.7) { 1.0 } else { -1.0 };
            let re = sign * rng.random_range(0.3..2.0);
            let pair = rng.random_bool(0.5);
            let z = if pair { c(re, rng.random_range(0.3..2.0)) } else { c(re, 0.0) };
            if !separated(&lams, z, 0.25) || !separated(&lams, z.conj(), 0.25) {
                continue;
            }
            has_pair |= pair;
            lams.push(z);
            lams.push(z.conj());
            eigens.push(EigenBlock { lambda: z, sizes: random_sizes(rng, 2) });
        }
        let n: usize = eigens
            .iter()
            .map(|e| if e.lambda.im != 0.0 { 2 } else { 1 } * e.sizes.iter().sum::<usize>())
            .sum();
        if n > max_n || !has_pair && rng.random_bool(0.6) {
            continue;
        }
        let p = with_p.then(|| random_basis(n, Field::Real, 50.0, rng));
        return JordanSpec::new(Field::Real, eigens, p, &Tolerances::default()).unwrap();
    }
}

pub fn random_problem(rng: &mut ChaCha8Rng, field: Field, max_n: usize, with_p: bool) -> (Problem, BKind) {
    let spec = match field {
        Field::Complex => random_complex_spec(rng, max_n, with_p),
        Field::Real => random_real_spec(rng, max_n, with_p),
    };
    let kind = BKind::pick(rng);
    let b = make_b(&spec, kind, rng);
    (Problem::new(spec, b, Tolerances::default()).unwrap(), kind)
}

/// Random Schur-stable Jordan data for Stein problems.
pub fn random_stein_spec(rng: &mut ChaCha8Rng, max_n: usize) -> JordanSpec {
    loop {
        let k = rng.random_range(1..=3);
        let mut eigens: Vec<EigenBlock> = Vec::new();
        let mut lams: Vec<C64> = Vec::new();
        while eigens.len() < k {
            let r: f64 = rng.random_range(0.05..0.85);
            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let z = c(r * th.cos(), r * th.sin());
            if lams.iter().any(|&w| (w - z).norm() < 0.2) {
                continue;
            }
            lams.push(z);
            eigens.push(EigenBlock { lambda: z, sizes: random_sizes(rng, 2) });
        }
        let n: usize = eigens.iter().map(|e| e.sizes.iter().sum::<usize>()).sum();
        if n > max_n {
            continue;
        }
        let p = random_basis(n, Field::Complex, 50.0, rng);
        return JordanSpec::new(Field::Complex, eigens, Some(p), &Tolerances::default()).unwrap();
    }
}

/// Stein problem with `B` one of: random, `A`, `A^2`, `cA` (`|c| <= 1`), or `0`.
pub fn random_stein_problem(rng: &mut ChaCha8Rng, max_n: usize) -> Problem {
    let spec = random_stein_spec(rng, max_n);
    let ja = build_ja(&spec);
    let b = match rng.random_range(0..5) {
        0 => make_b(&spec, BKind::Random, rng),
        1 => BicommElement::of_a(&spec),
        2 => coeffs_of(&spec, &(&ja * &ja)),
        3 => {
            let z = c(rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7));
            coeffs_of(&spec, &ja.scale(z))
        }
        _ => coeffs_of(&spec, &Mat::zeros(spec.n(), spec.n(), Field::Complex)),
    };
    Problem::new(spec, b, Tolerances::default()).unwrap()
}

/// `B~` for a problem, handy for checks in Jordan coordinates.
pub fn b_tilde(prob: &Problem) -> Mat {
    build_bicomm_tilde(prob.spec(), prob.coeffs()).unwrap()
}

pub fn is_invertible(m: &Mat) -> bool {
    rank_tol(m, &Tolerances::default()) == m.rows()
}

pub fn one() -> C64 {
    ONE
}
