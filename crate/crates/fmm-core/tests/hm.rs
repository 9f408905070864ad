use fmm_core::coeff::{parse_coeff, Coefficient};
use fmm_core::hm::{alternative_basis, catalog, parse_hm, to_hm_string, HMRep};
use fmm_core::matrix::MatrixQ;
use proptest::prelude::*;

const VALID: &[&str] = &["strassen", "winograd", "powers", "powrot", "asopt", "approx0695", "approx0661", "conventional"];

fn conventional_2x2(a: &MatrixQ, b: &MatrixQ) -> MatrixQ {
    let mut c = MatrixQ::zeros(2, 2);
    for i in 0..2 {
        for l in 0..2 {
            let v = a.get(i, 0) * b.get(0, l) + a.get(i, 1) * b.get(1, l);
            c.set(i, l, v);
        }
    }
    c
}

#[test]
fn catalog_entries_are_matrix_products() {
    for name in VALID {
        let rep = catalog(name).unwrap();
        let report = rep.validate_brent().unwrap();
        assert!(report.valid, "{name}: {:?}", report.first_failure);
        assert!(rep.validate_by_basis().unwrap(), "{name}");
    }
}

#[test]
fn sparse_cores_are_not_products_but_compose_to_asopt() {
    let core = catalog("schwartz_sparse").unwrap();
    assert!(!core.validate_brent().unwrap().valid);
    let composed = alternative_basis().compose(&core).unwrap();
    assert!(composed.validate_brent().unwrap().valid);
    let asopt = catalog("asopt").unwrap();
    assert_eq!(composed.l, asopt.l);
    assert_eq!(composed.r, asopt.r);
    assert_eq!(composed.pt, asopt.pt);
}

#[test]
fn perturbation_is_detected() {
    let mut rep = catalog("strassen").unwrap();
    rep.l.set(0, 0, Coefficient::int(2));
    let report = rep.validate_brent().unwrap();
    assert!(!report.valid);
    assert!(report.first_failure.is_some());
    assert!(!rep.validate_by_basis().unwrap());
}

#[test]
fn eval_examples() {
    let id = MatrixQ::identity(2);
    assert_eq!(catalog("strassen").unwrap().eval(&id, &id).unwrap(), id);
    let a = MatrixQ::from_ints(2, 2, &[1, 2, 3, 4]);
    let b = MatrixQ::from_ints(2, 2, &[5, 6, 7, 8]);
    assert_eq!(catalog("powers").unwrap().eval(&a, &b).unwrap(), MatrixQ::from_ints(2, 2, &[19, 22, 43, 50]));
}

#[test]
fn naive_counts() {
    let s = catalog("strassen").unwrap().naive_op_counts();
    assert_eq!((s.add_sub, s.mul_div), (18, 0));
    let c = catalog("conventional").unwrap().naive_op_counts();
    assert_eq!((c.add_sub, c.mul_div), (4, 0));
    let z = catalog("schwartz_sparse").unwrap().naive_op_counts();
    assert_eq!((z.add_sub, z.mul_div), (12, 0));
    assert_eq!(catalog("winograd").unwrap().naive_op_counts().mul_div, 0);
}

#[test]
fn hm_roundtrip_and_errors() {
    for name in VALID {
        let rep = catalog(name).unwrap();
        assert_eq!(parse_hm(&to_hm_string(&rep)).unwrap(), rep);
    }
    let text = to_hm_string(&catalog("strassen").unwrap());
    let lines: Vec<&str> = text.lines().collect();
    // drop the last L row
    let broken: Vec<&str> = lines.iter().enumerate().filter(|(i, _)| *i != 9).map(|(_, l)| *l).collect();
    let err = parse_hm(&broken.join("\n")).unwrap_err();
    assert!(matches!(err, fmm_core::Error::Parse { line: 10, .. }), "{err}");
    assert!(parse_hm("HM r=1 m=2 k=2\n").is_err());
    assert!(catalog("nope").is_err());
}

fn small_rational() -> impl Strategy<Value = Coefficient> {
    (-9i64..10, 1i64..5).prop_map(|(n, d)| Coefficient::frac(n, d))
}

fn mat2() -> impl Strategy<Value = MatrixQ> {
    proptest::collection::vec(small_rational(), 4).prop_map(|v| MatrixQ::from_vec(2, 2, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn valid_reps_multiply_exactly(a in mat2(), b in mat2()) {
        let want = conventional_2x2(&a, &b);
        for name in VALID {
            let rep: HMRep = catalog(name).unwrap();
            prop_assert_eq!(rep.eval(&a, &b).unwrap(), want.clone());
        }
    }

    #[test]
    fn brent_agrees_with_basis_oracle(row in 0usize..7, col in 0usize..4, which in 0usize..3, delta in 1i64..4) {
        for name in ["strassen", "asopt", "winograd"] {
            let mut rep = catalog(name).unwrap();
            let m = match which { 0 => &mut rep.l, 1 => &mut rep.r, _ => &mut rep.pt };
            let v = m.get(row, col) + &parse_coeff(&delta.to_string()).unwrap();
            m.set(row, col, v);
            prop_assert_eq!(rep.validate_brent().unwrap().valid, rep.validate_by_basis().unwrap());
            prop_assert!(!rep.validate_brent().unwrap().valid);
        }
    }
}
