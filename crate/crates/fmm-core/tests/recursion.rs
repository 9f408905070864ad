use fmm_core::coeff::{Coefficient, Rational};
use fmm_core::growth::{kappa_mm, BoundNorm, BoundParams};
use fmm_core::hm::{alternative_basis, catalog};
use fmm_core::matrix::{MatrixF, MatrixQ};
use fmm_core::recursion::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALGS: &[&str] = &["strassen", "winograd", "powers", "powrot", "asopt", "approx0695", "approx0661"];
const EPS: f64 = f64::EPSILON / 2.0;

fn int_matrix(n: usize, rng: &mut ChaCha8Rng, lim: i32) -> MatrixF {
    MatrixF { rows: n, cols: n, data: (0..n * n).map(|_| rng.random_range(-lim..=lim) as f64).collect() }
}

fn gauss_like(n: usize, rng: &mut ChaCha8Rng) -> MatrixF {
    MatrixF { rows: n, cols: n, data: (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect() }
}

fn max_diff(a: &MatrixF, b: &MatrixF) -> f64 {
    a.data.iter().zip(&b.data).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn small_integer_products_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = int_matrix(2, &mut rng, 9);
    let b = int_matrix(2, &mut rng, 9);
    let c = rec_multiply(&a, &b, &RecursionConfig::new("strassen")).unwrap();
    assert_eq!(c, conventional_multiply(&a, &b).unwrap());
    for n in [4, 8, 16] {
        let a = int_matrix(n, &mut rng, 3);
        let b = int_matrix(n, &mut rng, 3);
        let exact = conventional_multiply(&a, &b).unwrap();
        let scale = exact.max_abs().max(1.0);
        for alg in ALGS {
            let c = rec_multiply(&a, &b, &RecursionConfig::new(alg)).unwrap();
            if matches!(*alg, "strassen" | "winograd" | "powers") {
                assert_eq!(c, exact, "{alg} n={n}");
            } else {
                assert!(max_diff(&c, &exact) <= 1e-12 * scale, "{alg} n={n}: {}", max_diff(&c, &exact));
            }
        }
    }
}

#[test]
fn zero_and_identity_inputs() {
    let z = MatrixF { rows: 8, cols: 8, data: vec![0.0; 64] };
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = gauss_like(8, &mut rng);
    for alg in ALGS {
        assert_eq!(rec_multiply(&z, &a, &RecursionConfig::new(alg)).unwrap().max_abs(), 0.0);
    }
    let mut id = z.clone();
    for i in 0..8 {
        id.set(i, i, 1.0);
    }
    assert_eq!(conventional_multiply(&id, &a).unwrap(), a);
    assert_eq!(reference_multiply(&a, &id).unwrap(), a);
}

#[test]
fn errors_on_bad_shapes() {
    let a = MatrixF { rows: 2, cols: 3, data: vec![0.0; 6] };
    let b = MatrixF { rows: 3, cols: 3, data: vec![0.0; 9] };
    assert!(rec_multiply(&a, &a, &RecursionConfig::new("strassen")).is_err());
    assert!(rec_multiply(&b, &a, &RecursionConfig::new("strassen")).is_err());
    let e = MatrixF { rows: 0, cols: 0, data: vec![] };
    assert!(rec_multiply(&e, &e, &RecursionConfig::new("strassen")).is_err());
    assert!(rec_multiply(&b, &b, &RecursionConfig::new("no-such")).is_err());
    assert!(rec_multiply(&b, &b, &RecursionConfig::new("schwartzopt")).is_err());
    assert!(rec_multiply(&b, &b, &RecursionConfig::new("strassen").with_cutoff(0)).is_err());
    assert!(conventional_multiply(&b, &a).is_err());
    assert!(lcob(&b, 1).is_err());
    assert!(sparse_multiply(&b, &b, &RecursionConfig::new("winograd")).is_err());
}

#[test]
fn padding_is_transparent() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = gauss_like(48, &mut rng);
    let b = gauss_like(48, &mut rng);
    let grow = |m: &MatrixF| {
        let mut g = MatrixF { rows: 64, cols: 64, data: vec![0.0; 64 * 64] };
        for i in 0..48 {
            for j in 0..48 {
                g.set(i, j, *m.get(i, j));
            }
        }
        g
    };
    for alg in ["asopt", "winograd"] {
        let small = rec_multiply(&a, &b, &RecursionConfig::new(alg)).unwrap();
        let big = rec_multiply(&grow(&a), &grow(&b), &RecursionConfig::new(alg)).unwrap();
        for i in 0..48 {
            for j in 0..48 {
                assert_eq!(small.get(i, j).to_bits(), big.get(i, j).to_bits());
            }
        }
    }
    assert_eq!(padded_size(48, 1), (64, 6));
    assert_eq!(padded_size(48, 3), (48, 4));
    assert_eq!(padded_size(5, 8), (8, 0));
}

#[test]
fn cutoff_changes_the_leaves() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = gauss_like(32, &mut rng);
    let b = gauss_like(32, &mut rng);
    let c32 = rec_multiply(&a, &b, &RecursionConfig::new("strassen").with_cutoff(32)).unwrap();
    assert_eq!(c32, conventional_multiply(&a, &b).unwrap());
    let r = reference_multiply(&a, &b).unwrap();
    for cutoff in [1, 2, 4, 8] {
        let c = rec_multiply(&a, &b, &RecursionConfig::new("strassen").with_cutoff(cutoff)).unwrap();
        assert!(max_diff(&c, &r) < 1e-12);
    }
}

fn to_q(x: f64) -> Coefficient {
    Coefficient::rational(Rational::from_float(x).unwrap())
}

#[test]
fn reference_matches_exact_dyadic_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let dy = |rng: &mut ChaCha8Rng| (rng.random_range(-(1i64 << 52)..(1i64 << 52)) as f64) / (1u64 << 52) as f64;
    let a = MatrixF { rows: 8, cols: 8, data: (0..64).map(|_| dy(&mut rng)).collect() };
    let b = MatrixF { rows: 8, cols: 8, data: (0..64).map(|_| dy(&mut rng)).collect() };
    let exact = a.map(|x| to_q(*x)).matmul(&b.map(|x| to_q(*x))).unwrap();
    let (hi, lo) = reference_multiply_dd(&a, &b).unwrap();
    let mut worst = 0.0f64;
    for i in 0..64 {
        let d = &(&to_q(hi.data[i]) + &to_q(lo.data[i])) - &exact.data[i];
        worst = worst.max(d.to_f64().abs());
    }
    assert!(worst < 1e-25, "{worst}");
    let conv = conventional_multiply(&a, &b).unwrap();
    assert!(max_diff(&conv, &hi) > 0.0);
}

#[test]
fn asopt_error_within_bound_at_64() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a = gauss_like(64, &mut rng);
    let b = gauss_like(64, &mut rng);
    let c = rec_multiply(&a, &b, &RecursionConfig::new("asopt")).unwrap();
    let err = max_diff(&c, &reference_multiply(&a, &b).unwrap());
    let params = BoundParams { k0: 1, ell: 6, ..Default::default() };
    let kappa = kappa_mm(&catalog("asopt").unwrap(), &params, BoundNorm::Inf).unwrap().value;
    let norm = |m: &MatrixF| (0..m.rows).map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    assert!(err <= kappa * norm(&a) * norm(&b) * EPS, "{err}");
    assert!(err > 0.0);
}

#[test]
fn basis_changes_at_level_zero_are_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = gauss_like(4, &mut rng);
    for f in [lcob, rcob, cobp] {
        assert_eq!(f(&a, 0).unwrap(), a);
    }
}

fn apply_q(m: &MatrixQ, v: &[f64]) -> Vec<f64> {
    let mf = m.to_f64();
    (0..4).map(|i| (0..4).map(|j| mf.get(i, j) * v[j]).sum()).collect()
}

#[test]
fn basis_changes_match_the_exact_matrices() {
    let cob = alternative_basis();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = gauss_like(2, &mut rng);
    let l = lcob(&a, 1).unwrap();
    let r = rcob(&a, 1).unwrap();
    let p = cobp(&a, 1).unwrap();
    for (got, m) in [(&l, &cob.left), (&r, &cob.right), (&p, &cob.product.transpose())] {
        let want = apply_q(m, &a.data);
        for (x, y) in got.data.iter().zip(&want) {
            assert!((x - y).abs() < 1e-15, "{x} {y}");
        }
    }
    let back = apply_q(&cob.left.inverse().unwrap(), &l.data);
    for (x, y) in back.iter().zip(&a.data) {
        assert!((x - y).abs() < 1e-14);
    }
}

#[test]
fn one_level_pipeline_multiplies() {
    let core = sparse_core_program().unwrap();
    assert_eq!(core.products(), 7);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let a = gauss_like(2, &mut rng);
        let b = gauss_like(2, &mut rng);
        let c = sparse_multiply(&a, &b, &RecursionConfig::new("asopt")).unwrap();
        let exact = reference_multiply(&a, &b).unwrap();
        assert!(max_diff(&c, &exact) <= 8.0 * EPS * a.max_abs() * b.max_abs() * 8.0);
    }
}

#[test]
fn sparse_multiply_on_integers() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in [1, 2, 4, 8, 16, 32] {
        let a = int_matrix(n, &mut rng, 4);
        let b = int_matrix(n, &mut rng, 4);
        let exact = conventional_multiply(&a, &b).unwrap();
        let c = sparse_multiply(&a, &b, &RecursionConfig::new("asopt")).unwrap();
        assert!(max_diff(&c, &exact) <= 1e-12 * exact.max_abs().max(1.0), "n={n}");
    }
    let a = int_matrix(4, &mut rng, 4);
    let b = int_matrix(4, &mut rng, 4);
    let c = rec_multiply(&a, &b, &RecursionConfig::new("asopt").alternative().with_cutoff(4)).unwrap();
    assert_eq!(c, conventional_multiply(&a, &b).unwrap());
}

#[test]
fn sparse_and_direct_asopt_errors_are_comparable() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [16, 64] {
        let a = gauss_like(n, &mut rng);
        let b = gauss_like(n, &mut rng);
        let r = reference_multiply(&a, &b).unwrap();
        let direct = max_diff(&rec_multiply(&a, &b, &RecursionConfig::new("asopt")).unwrap(), &r);
        let sparse = max_diff(&sparse_multiply(&a, &b, &RecursionConfig::new("asopt")).unwrap(), &r);
        assert!(sparse <= 10.0 * direct && direct <= 10.0 * sparse, "n={n}: {direct} {sparse}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn error_stays_below_the_bound(seed in any::<u64>(), idx in 0usize..7) {
        let alg = ALGS[idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = gauss_like(16, &mut rng);
        let b = gauss_like(16, &mut rng);
        let c = rec_multiply(&a, &b, &RecursionConfig::new(alg)).unwrap();
        let err = max_diff(&c, &reference_multiply(&a, &b).unwrap());
        let params = BoundParams { k0: 1, ell: 4, ..Default::default() };
        let kappa = kappa_mm(&catalog(alg).unwrap(), &params, BoundNorm::Inf).unwrap().value;
        prop_assert!(err <= kappa * a.max_abs() * b.max_abs() * EPS);
    }

    #[test]
    fn recursion_is_linear_in_the_left_operand(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = int_matrix(8, &mut rng, 5);
        let b = int_matrix(8, &mut rng, 5);
        let mut a2 = a.clone();
        a2.data.iter_mut().for_each(|x| *x *= 2.0);
        let cfg = RecursionConfig::new("winograd");
        let c = rec_multiply(&a, &b, &cfg).unwrap();
        let c2 = rec_multiply(&a2, &b, &cfg).unwrap();
        prop_assert!(c.data.iter().zip(&c2.data).all(|(x, y)| 2.0 * x == *y));
    }
}
