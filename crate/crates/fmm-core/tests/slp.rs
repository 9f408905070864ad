use fmm_core::coeff::Coefficient;
use fmm_core::hm::{catalog, conventional};
use fmm_core::matrix::MatrixQ;
use fmm_core::slp::{
    catalog_slp, compile_bilinear, cse_optimize, from_matrix_naive, kernel_decompose, parse_slp, sparse_cores, sparsify_cob, transpose_slp,
    Strategy as Compile,
};
use proptest::prelude::*;

fn expect_counts(name: &str, adds: usize, scales: usize) {
    let prog = catalog_slp(name).unwrap();
    let c = prog.count();
    assert_eq!((c.adds, c.scales, c.muls), (adds, scales, 7), "{name}:\n{prog}");
    assert!(prog.equals_hm(&catalog(name).unwrap()).unwrap(), "{name}");
}

#[test]
fn catalog_programs_match_their_formulas_and_counts() {
    expect_counts("asopt", 24, 12);
    expect_counts("powers", 27, 6);
    assert_eq!(catalog_slp("powers").unwrap().count().halvings, 6);
    expect_counts("powrot", 24, 19);
    expect_counts("schwartzopt", 12, 0);
    expect_counts("winograd", 15, 0);
    expect_counts("strassen", 18, 0);
}

#[test]
fn naive_counts_are_nnz_minus_rows() {
    let s = catalog("strassen").unwrap();
    assert_eq!(from_matrix_naive(&s.l).count().adds, 5);
    assert_eq!(from_matrix_naive(&s.pt.transpose()).count().adds, 8);
    assert_eq!(from_matrix_naive(&MatrixQ::identity(4)).count().adds, 0);
    assert_eq!(from_matrix_naive(&MatrixQ::identity(4)).linear_matrix().unwrap(), MatrixQ::identity(4));
}

#[test]
fn cse_hoists_shared_pairs() {
    let m = MatrixQ::from_ints(2, 2, &[1, 1, 1, 1]);
    let p = cse_optimize(&m);
    assert_eq!(p.count().adds, 1);
    assert_eq!(p.linear_matrix().unwrap(), m);
    let m = MatrixQ::from_ints(2, 3, &[1, 1, 0, 1, 1, 1]);
    let p = cse_optimize(&m);
    assert_eq!(p.count().adds, 2);
    assert_eq!(p.linear_matrix().unwrap(), m);
}

#[test]
fn kernel_reuses_dependent_rows() {
    let m = MatrixQ::from_ints(3, 2, &[1, 0, 0, 1, 1, 1]);
    let p = kernel_decompose(&m);
    assert_eq!(p.count().adds, 1);
    assert_eq!(p.linear_matrix().unwrap(), m);
}

#[test]
fn transpose_of_identity_is_free() {
    let p = transpose_slp(&from_matrix_naive(&MatrixQ::identity(3))).unwrap();
    assert_eq!(p.count().adds, 0);
    assert_eq!(p.linear_matrix().unwrap(), MatrixQ::identity(3));
}

#[test]
fn bilinear_compilation() {
    let s = compile_bilinear(&catalog("strassen").unwrap(), Compile::Naive).unwrap();
    assert_eq!(s.count().adds, 18);
    let rep = catalog("asopt").unwrap();
    let naive = compile_bilinear(&rep, Compile::Naive).unwrap();
    let cse = compile_bilinear(&rep, Compile::Cse).unwrap();
    let kt = compile_bilinear(&rep, Compile::KernelTranspose).unwrap();
    let adds = kt.count().adds;
    assert!((24..=30).contains(&adds), "{adds}");
    assert!(adds <= cse.count().adds && cse.count().adds <= naive.count().adds);
    for p in [&naive, &cse, &kt] {
        assert!(p.equals_hm(&rep).unwrap());
    }
    for name in ["winograd", "powers", "powrot", "strassen"] {
        let rep = catalog(name).unwrap();
        let kt = compile_bilinear(&rep, Compile::KernelTranspose).unwrap();
        assert!(kt.equals_hm(&rep).unwrap(), "{name}");
        assert!(kt.count().adds <= compile_bilinear(&rep, Compile::Naive).unwrap().count().adds);
    }
    assert_eq!(compile_bilinear(&catalog("winograd").unwrap(), Compile::KernelTranspose).unwrap().count().adds, 15);
}

#[test]
fn strategies_parse() {
    assert_eq!("naive".parse::<Compile>().unwrap(), Compile::Naive);
    assert_eq!("kernel+transpose".parse::<Compile>().unwrap(), Compile::KernelTranspose);
    assert!("fastest".parse::<Compile>().is_err());
}

#[test]
fn sparse_cores_recompose_exactly() {
    for name in ["winograd", "asopt", "powers"] {
        let rep = catalog(name).unwrap();
        let out = sparsify_cob(&rep).unwrap();
        let back = out.cob.compose(&out.sparse).unwrap();
        assert_eq!((back.l, back.r, back.pt), (rep.l.clone(), rep.r.clone(), rep.pt.clone()), "{name}");
        let core = &out.sparse;
        assert!(core.l.data.iter().chain(&core.r.data).chain(&core.pt.data).all(|c| c.is_zero() || c.is_unit()), "{name}");
        assert_eq!(core.naive_op_counts().add_sub, 12, "{name}");
    }
    let conv = conventional(2, 2, 2);
    let out = sparsify_cob(&conv).unwrap();
    assert_eq!(out.sparse.l, conv.l);
    assert_eq!(out.cob.nnz(), 12);
}

#[test]
fn sparse_core_candidates_include_every_listed_growth() {
    let w = sparse_cores(&catalog("winograd").unwrap()).unwrap();
    assert!(w.iter().all(|c| c.adds == 12));
    assert!(w.iter().any(|c| (c.gamma - 12.4852).abs() < 1e-3));
    assert!((w[0].gamma - (7.0 + 3.0 * 2f64.sqrt())).abs() < 1e-9);
}

#[test]
fn parse_errors_carry_lines() {
    let bad = "s1 = a11 + a12\np1 = s1 * q9\n";
    let err = parse_slp(bad, &["a11", "a12", "b11"], Some(2), &["c11"]).unwrap_err();
    assert!(format!("{err}").contains('2'), "{err}");
    assert!(parse_slp("x = a11 +\n", &["a11"], None, &["x"]).is_err());
    assert!(parse_slp("x = a11\nx = a11\n", &["a11"], None, &["x"]).is_err());
    assert!(parse_slp("y = a11 * a11\n", &["a11", "b11"], Some(1), &["y"]).is_err());
}

#[test]
fn program_text_is_readable() {
    let p = parse_slp("y = [1/2](a + b) - c\n", &["a", "b", "c"], None, &["y"]).unwrap();
    let m = p.linear_matrix().unwrap();
    assert_eq!(m.data, vec![Coefficient::frac(1, 2), Coefficient::frac(1, 2), -Coefficient::one()]);
    let shown = p.to_string();
    assert!(shown.contains("y :="), "{shown}");
}

fn rational_matrix(rows: usize, cols: usize) -> impl Strategy<Value = MatrixQ> {
    proptest::collection::vec((-3i64..=3, 1i64..=3, 0u8..3), rows * cols).prop_map(move |v| {
        let data = v.into_iter().map(|(n, d, z)| if z == 0 { Coefficient::zero() } else { Coefficient::frac(n, d) }).collect();
        MatrixQ::from_vec(rows, cols, data).unwrap()
    })
}

fn dot(x: &[Coefficient], y: &[Coefficient]) -> Coefficient {
    x.iter().zip(y).fold(Coefficient::zero(), |acc, (a, b)| &acc + &(a * b))
}

fn rational_vec(n: usize) -> impl Strategy<Value = Vec<Coefficient>> {
    proptest::collection::vec((-5i64..=5, 1i64..=4), n).prop_map(|v| v.into_iter().map(|(a, b)| Coefficient::frac(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn optimizers_are_exact_and_never_worse(m in rational_matrix(7, 4)) {
        let naive = from_matrix_naive(&m);
        prop_assert_eq!(naive.linear_matrix().unwrap(), m.clone());
        for p in [cse_optimize(&m), kernel_decompose(&m)] {
            prop_assert_eq!(p.linear_matrix().unwrap(), m.clone());
            prop_assert!(p.count().adds <= naive.count().adds);
        }
    }

    #[test]
    fn transposition_preserves_inner_products(m in rational_matrix(5, 4), x in rational_vec(4), y in rational_vec(5)) {
        let p = cse_optimize(&m);
        let t = transpose_slp(&p).unwrap();
        let px = p.eval(&x).unwrap();
        let ty = t.eval(&y).unwrap();
        prop_assert_eq!(dot(&y, &px), dot(&x, &ty));
        prop_assert_eq!(t.linear_matrix().unwrap(), m.transpose());
        let zero_rows = (0..m.rows).filter(|&i| m.row_nnz(i) == 0).count();
        let zero_cols = (0..m.cols).filter(|&j| m.col_nnz(j) == 0).count();
        prop_assert_eq!(t.count().adds + m.cols - zero_cols, p.count().adds + m.rows - zero_rows);
        prop_assert_eq!(transpose_slp(&t).unwrap().linear_matrix().unwrap(), m);
    }

    #[test]
    fn compiled_asopt_agrees_on_random_pairs(a in rational_vec(4), b in rational_vec(4)) {
        let rep = catalog("asopt").unwrap();
        let prog = compile_bilinear(&rep, Compile::KernelTranspose).unwrap();
        let mut x = a.clone();
        x.extend(b.iter().cloned());
        let got = prog.eval(&x).unwrap();
        let am = MatrixQ::from_vec(2, 2, a).unwrap();
        let bm = MatrixQ::from_vec(2, 2, b).unwrap();
        prop_assert_eq!(got, am.matmul(&bm).unwrap().data);
    }
}
