mod common {
    pub mod props;
}

use common::props::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring(a in arb_mpoly(4, 2), b in arb_mpoly(4, 2), c in arb_mpoly(3, 2)) {
        ring_axioms(&a, &b, &c)?;
    }

    #[test]
    fn gcd(a in arb_mpoly(3, 2), b in arb_mpoly(3, 2), g in arb_mpoly(3, 1)) {
        gcd_props(&a, &b, &g)?;
    }

    #[test]
    fn resultant(a in arb_upoly(3), b in arb_upoly(3), p in arb_qpoly(3), q in arb_qpoly(2), r in arb_qpoly(2)) {
        resultant_props(&a, &b, &p, &q, &r)?;
    }

    #[test]
    fn discriminant(a in arb_qpoly(3), r in -4i64..=4) {
        discriminant_props(&a, r)?;
    }

    #[test]
    fn jelem(p in arb_mpoly(2, 1), q in arb_mpoly(2, 1)) {
        jelem_inverse(&p, &q)?;
    }

    #[test]
    fn snf(a in arb_matrix()) {
        snf_props(&a)?;
    }
}

#[test]
fn snf_known_forms() {
    use exactalg::{smith_normal_form, IntMatrix};
    // Cartan matrix of E7: unimodular up to a factor 2
    let e7 = IntMatrix::from_rows(&[
        vec![2, -1, 0, 0, 0, 0, 0],
        vec![-1, 2, -1, 0, 0, 0, 0],
        vec![0, -1, 2, -1, 0, 0, -1],
        vec![0, 0, -1, 2, -1, 0, 0],
        vec![0, 0, 0, -1, 2, -1, 0],
        vec![0, 0, 0, 0, -1, 2, 0],
        vec![0, 0, -1, 0, 0, 0, 2],
    ]);
    let d: Vec<i64> = smith_normal_form(&e7).diagonal().iter().map(|x| x.try_into().unwrap()).collect();
    assert_eq!(d, vec![1, 1, 1, 1, 1, 1, 2]);
}

#[test]
fn runner_reports_every_property() {
    let results = run_all(50);
    assert_eq!(results.len(), 6);
    for r in &results {
        assert!(r.outcome.is_ok(), "{}: {:?}", r.name, r.outcome);
        assert_eq!(r.cases, 50);
        assert!(r.elapsed.as_secs() < 60);
    }
}
