mod common;

use common::{c, random_complex_spec, random_problem, random_real_spec};
use hillpick::hill::{minimal_hill_from_blocks, HillRep};
use hillpick::jordan::{
    build_a, build_bicomm_element, check_bicomm_membership, extract_bicomm_coeffs, is_lyapunov_regular, BicommElement,
    EigenBlock, JordanSpec, Membership,
};
use hillpick::linalg::{canonical_shuffle, is_psd, kron, rank_tol, unvec, vec, Field, Mat, PsdVerdict, Tolerances};
use hillpick::lyapunov::{hill_pick, hill_pick_coeff, lyapunov_matricization, sample_lyapunov_solutions};
use hillpick::maps::{PositivitySample, StarLinearMap};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: &Mat, b: &Mat) -> f64 {
    (a - b).frobenius_norm() / (1.0 + b.frobenius_norm())
}

fn field_of(real: bool) -> Field {
    if real {
        Field::Real
    } else {
        Field::Complex
    }
}

/// `sum H_kl conj(A_k) ⊗ A_l` with Hermitian `H`; `psd` makes it CP.
fn random_star_map(rng: &mut ChaCha8Rng, n: usize, q: usize, r: usize, field: Field, psd: bool) -> StarLinearMap {
    let a: Vec<Mat> = (0..r).map(|_| Mat::random(n, q, field, rng)).collect();
    let g = Mat::random(r, r, field, rng);
    let h = if psd { &g * &g.adjoint() } else { g.hermitian_part() };
    HillRep::new(a, h, false).unwrap().reconstruct()
}

/// Random polynomial of degree at most `n` evaluated at `a`.
fn random_poly(a: &Mat, field: Field, rng: &mut ChaCha8Rng) -> Mat {
    let n = a.rows();
    let mut acc = Mat::zeros(n, n, field);
    let mut pow = Mat::identity(n);
    for _ in 0..=n {
        acc = &acc + &pow.scale(field.gaussian(rng));
        pow = &pow * a;
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_mixed_product(seed: u64, m in 1usize..4, n in 1usize..4, p in 1usize..4, r in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Mat::random(m, n, Field::Complex, &mut rng);
        let b = Mat::random(p, r, Field::Complex, &mut rng);
        let cc = Mat::random(n, 2, Field::Complex, &mut rng);
        let d = Mat::random(r, 3, Field::Complex, &mut rng);
        let lhs = &kron(&a, &b) * &kron(&cc, &d);
        let rhs = kron(&(&a * &cc), &(&b * &d));
        prop_assert!(rel(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn vec_of_product(seed: u64, m in 1usize..5, n in 1usize..5, k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Mat::random(m, n, Field::Complex, &mut rng);
        let x = Mat::random(n, k, Field::Complex, &mut rng);
        let b = Mat::random(3, k, Field::Complex, &mut rng);
        let lhs = vec(&(&(&a * &x) * &b.transpose()));
        let rhs = &kron(&b, &a) * &vec(&x);
        prop_assert!(rel(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn unvec_inverts_vec(seed: u64, m in 1usize..6, n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Mat::random(m, n, Field::Complex, &mut rng);
        prop_assert_eq!(unvec(&vec(&x), m, n).unwrap(), x);
    }

    #[test]
    fn shuffle_is_a_permutation(m in 1usize..6, n in 1usize..6, seed: u64) {
        let s = canonical_shuffle(m, n);
        for i in 0..m * n {
            let row_ones = (0..m * n).filter(|&j| s.get(i, j) == c(1.0, 0.0)).count();
            let col_ones = (0..m * n).filter(|&j| s.get(j, i) == c(1.0, 0.0)).count();
            let zeros = (0..m * n).filter(|&j| s.get(i, j) == c(0.0, 0.0)).count();
            prop_assert_eq!((row_ones, col_ones, zeros), (1, 1, m * n - 1));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = Mat::random(m, 1, Field::Complex, &mut rng);
        let v = Mat::random(n, 1, Field::Complex, &mut rng);
        prop_assert_eq!(&s * &kron(&u, &v), kron(&v, &u));
    }

    #[test]
    fn psd_agrees_with_quadratic_form(seed: u64, n in 1usize..6, shift in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Mat::random(n, n, Field::Complex, &mut rng);
        let m = &(&g * &g.adjoint()) - &Mat::identity(n).scale_re(shift);
        let report = is_psd(&m, &Tolerances::default()).unwrap();
        let mut worst = f64::INFINITY;
        for _ in 0..1000 {
            let x = Mat::random(n, 1, Field::Complex, &mut rng);
            let x = x.scale_re(1.0 / x.frobenius_norm());
            worst = worst.min((&(&x.adjoint() * &m) * &x).get(0, 0).re);
        }
        if report.verdict == PsdVerdict::Yes {
            prop_assert!(worst >= -report.band);
        }
        prop_assert!(worst >= report.min_eig - 1e-12 * (1.0 + m.spectral_norm()));
    }

    #[test]
    fn choi_round_trip_is_exact(seed: u64, n in 1usize..4, q in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = Mat::random(n * n, q * q, Field::Complex, &mut rng);
        let map = StarLinearMap::new(l, n, q).unwrap();
        let back = StarLinearMap::from_choi(&map.choi(), n, q).unwrap();
        prop_assert_eq!(back.matricization(), map.matricization());
    }

    #[test]
    fn star_linearity_tests_agree(seed: u64, n in 1usize..4, q in 1usize..4, perturb: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tol = Tolerances::default();
        let map = random_star_map(&mut rng, n, q, 3, Field::Complex, false);
        let map = if perturb {
            let noise = Mat::random(n * n, q * q, Field::Complex, &mut rng).scale_re(1e-3);
            StarLinearMap::new(map.matricization() + &noise, n, q).unwrap()
        } else {
            map
        };
        prop_assert_eq!(map.choi_is_hermitian(&tol), map.entries_are_symmetric(&tol));
        prop_assert_eq!(map.is_star_linear(&tol), !perturb);
    }

    #[test]
    fn planted_zero_block(seed: u64, n in 2usize..4, q in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..q);
        let a: Vec<Mat> = (0..3)
            .map(|_| {
                let mut m = Mat::random(n, q, Field::Complex, &mut rng);
                m.set(i, j, c(0.0, 0.0));
                m
            })
            .collect();
        let g = Mat::random(3, 3, Field::Complex, &mut rng);
        let map = HillRep::new(a, g.hermitian_part(), false).unwrap().reconstruct();
        prop_assert!(map.block(i, j).max_abs() == 0.0);
        for k in 0..n {
            for l in 0..q {
                prop_assert!(map.entry(i, j, k, l).norm() == 0.0);
            }
        }
    }

    #[test]
    fn hill_reconstruction(seed: u64, n in 1usize..4, q in 1usize..4, r in 1usize..5, real: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tol = Tolerances::default();
        let map = random_star_map(&mut rng, n, q, r, field_of(real), false);
        let rep = minimal_hill_from_blocks(&map, &tol).unwrap();
        prop_assert_eq!(rep.len(), rank_tol(&map.choi(), &tol));
        prop_assert!(rel(rep.reconstruct().matricization(), map.matricization()) <= 1e-9);
        let v = Mat::random(q, q, field_of(real), &mut rng);
        prop_assert!(rel(&rep.apply(&v).unwrap(), &map.apply(&v).unwrap()) <= 1e-9);
    }

    #[test]
    fn compose_with_inverse(seed: u64, n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Mat::random(n, n, Field::Complex, &mut rng);
        let f = StarLinearMap::congruence(&x);
        let id = StarLinearMap::compose(&f, &f.inverse().unwrap()).unwrap();
        prop_assert!(rel(id.matricization(), StarLinearMap::identity(n).matricization()) <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cp_maps_are_never_refuted(seed: u64, n in 1usize..4, q in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = random_star_map(&mut rng, n, q, 3, Field::Complex, true);
        let outcome = map.positivity_sample_test(2000, seed, &Tolerances::default()).unwrap();
        prop_assert_eq!(outcome, PositivitySample::Undecided);
    }

    #[test]
    fn bicommutant_elements_commute_with_a(seed: u64, real: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tol = Tolerances::default();
        let spec = if real { random_real_spec(&mut rng, 8, true) } else { random_complex_spec(&mut rng, 8, true) };
        let b = common::make_b(&spec, common::BKind::Random, &mut rng);
        let a = build_a(&spec);
        let bm = build_bicomm_element(&spec, &b).unwrap();
        let comm = &(&a * &bm) - &(&bm * &a);
        prop_assert!(comm.frobenius_norm() <= 1e-10 * a.frobenius_norm() * bm.frobenius_norm());
        prop_assert_eq!(check_bicomm_membership(&spec, &bm, &tol).unwrap(), Membership::Member);
        let back = extract_bicomm_coeffs(&spec, &bm, &tol).unwrap();
        for (x, y) in back.coeffs.iter().flatten().zip(b.coeffs.iter().flatten()) {
            prop_assert!((x - y).norm() <= 1e-9 * (1.0 + bm.frobenius_norm()));
        }
        let pa = random_poly(&a, spec.field(), &mut rng);
        prop_assert_eq!(check_bicomm_membership(&spec, &pa, &tol).unwrap(), Membership::Member);
    }

    #[test]
    fn regularity_matches_invertibility(seed: u64, offset in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tol = Tolerances::default();
        let re = rng.random_range(0.3..2.0);
        let im = rng.random_range(-2.0..2.0);
        // offset 0 plants a pair with lambda_1 + conj(lambda_2) = 0
        let second = match offset {
            0 => c(-re, im),
            _ => c(re * offset as f64 * 0.7, -im),
        };
        let spec = JordanSpec::new(
            Field::Complex,
            vec![
                EigenBlock { lambda: c(re, im), sizes: vec![rng.random_range(1..3)] },
                EigenBlock { lambda: second, sizes: vec![1] },
            ],
            None,
            &tol,
        );
        let Ok(spec) = spec else { return Ok(()); };
        let n = spec.n();
        let la = lyapunov_matricization(&build_a(&spec));
        let invertible = rank_tol(la.matricization(), &tol) == n * n;
        prop_assert_eq!(is_lyapunov_regular(&spec, &tol), invertible);
    }

    #[test]
    fn hill_pick_is_hermitian(seed: u64, real: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (prob, _) = random_problem(&mut rng, field_of(real), 8, true);
        let hp = hill_pick(&prob).unwrap();
        prop_assert!((&hp.h - &hp.h.adjoint()).frobenius_norm() <= 1e-10 * (1.0 + hp.h.frobenius_norm()));
    }

    #[test]
    fn closed_form_is_reflexive(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (prob, _) = random_problem(&mut rng, Field::Complex, 8, false);
        let eigens = prob.spec().eigens();
        for j in 0..eigens.len() {
            for a in 0..eigens.len() {
                for i in 0..eigens[j].sizes[0] {
                    for cc in 0..eigens[a].sizes[0] {
                        let f = hill_pick_coeff(&prob, j, i, a, cc);
                        let g = hill_pick_coeff(&prob, a, cc, j, i).conj();
                        prop_assert!((f - g).norm() <= 1e-12 * (1.0 + f.norm()));
                    }
                }
            }
        }
    }

    #[test]
    fn lyapunov_solutions_form_a_cone(seed: u64, alpha in 0.0f64..3.0, beta in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (prob, _) = random_problem(&mut rng, Field::Complex, 6, true);
        let a = prob.a();
        let hs = sample_lyapunov_solutions(&a, 2, seed).unwrap();
        let h = &hs[0].scale_re(alpha) + &hs[1].scale_re(beta);
        let form = &(&h * &a) + &(&a.adjoint() * &h);
        let verdict = is_psd(&form.hermitian_part(), prob.tol()).unwrap().verdict;
        prop_assert_ne!(verdict, PsdVerdict::No);
    }

    #[test]
    fn b_equal_a_gives_ones_on_distinct_diagonals(seed: u64, n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut eigens: Vec<EigenBlock> = Vec::new();
        while eigens.len() < n {
            let z = c(rng.random_range(0.2..3.0), rng.random_range(-3.0..3.0));
            if eigens.iter().all(|e| (e.lambda - z).norm() > 0.1) {
                eigens.push(EigenBlock { lambda: z, sizes: vec![1] });
            }
        }
        let spec = JordanSpec::new(Field::Complex, eigens, None, &Tolerances::default()).unwrap();
        let b = BicommElement::of_a(&spec);
        let prob = hillpick::lyapunov::Problem::new(spec, b, Tolerances::default()).unwrap();
        let hp = hill_pick(&prob).unwrap();
        let ones = Mat::from_fn(n, n, Field::Complex, |_, _| c(1.0, 0.0));
        prop_assert!((&hp.h - &ones).max_abs() <= 1e-12);
    }
}
