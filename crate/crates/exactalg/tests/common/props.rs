// Property checks over randomized inputs, shared by the exactalg property
// tests and the acceptance run in the core crate.

use exactalg::{smith_normal_form, var, IntMatrix, JElem, MPoly, Monomial, UPoly, Q};
use num::{BigInt, Integer, One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use std::time::{Duration, Instant};

const VARS: [&str; 3] = ["x", "y", "J4"];

pub fn arb_mpoly(max_terms: usize, max_exp: u16) -> impl Strategy<Value = MPoly> {
    prop::collection::vec((-5i64..=5, prop::collection::vec(0..=max_exp, VARS.len())), 0..=max_terms).prop_map(
        |ts| {
            MPoly::from_terms(ts.into_iter().map(|(c, es)| {
                let mut m = Monomial::one();
                for (k, e) in es.into_iter().enumerate() {
                    m = m.mul(&Monomial::var(var(VARS[k]), e));
                }
                (m, Q::from_integer(c.into()))
            }))
        },
    )
}

pub fn arb_upoly(max_deg: usize) -> impl Strategy<Value = UPoly<MPoly>> {
    prop::collection::vec(arb_mpoly(2, 1), 1..=max_deg + 1).prop_map(UPoly::new)
}

pub fn arb_qpoly(max_deg: usize) -> impl Strategy<Value = UPoly<Q>> {
    prop::collection::vec(-6i64..=6, 1..=max_deg + 1)
        .prop_map(|v| UPoly::new(v.into_iter().map(|x| Q::from_integer(x.into())).collect()))
}

/// Integer matrices up to 16x16; small entries, with a bias towards
/// sparse rows so that nontrivial elementary divisors show up.
pub fn arb_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=16, 1usize..=16)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -6i64..=6], r * c).prop_map(move |v| (r, c, v)))
        .prop_map(|(r, c, v)| IntMatrix::from_rows(&v.chunks(c).take(r).map(|x| x.to_vec()).collect::<Vec<_>>()))
}

pub fn ring_axioms(a: &MPoly, b: &MPoly, c: &MPoly) -> Result<(), TestCaseError> {
    prop_assert_eq!(a + b, b + a);
    prop_assert_eq!(a * b, b * a);
    prop_assert_eq!(&(a * b) * c, a * &(b * c));
    prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
    prop_assert!((a - a).is_zero());
    let ab = a * b;
    if !b.is_zero() {
        prop_assert_eq!(ab.div_exact(b).unwrap(), a.clone());
    }
    let p = exactalg::parse_mpoly(&ab.to_string()).unwrap();
    prop_assert_eq!(p, ab);
    Ok(())
}

pub fn gcd_props(a: &MPoly, b: &MPoly, g: &MPoly) -> Result<(), TestCaseError> {
    prop_assume!(!g.is_zero());
    let (x, y) = (a * g, b * g);
    let d = x.gcd(&y);
    if !x.is_zero() {
        prop_assert!(x.div_exact(&d).is_ok());
    }
    if !y.is_zero() {
        prop_assert!(y.div_exact(&d).is_ok());
    }
    if !(x.is_zero() && y.is_zero()) {
        prop_assert!(d.div_exact(g).is_ok(), "gcd {} misses factor {}", d, g);
    }
    Ok(())
}

pub fn resultant_props(a: &UPoly<MPoly>, b: &UPoly<MPoly>, p: &UPoly<Q>, q: &UPoly<Q>, r: &UPoly<Q>) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.resultant(b), a.resultant_sylvester(b));
    prop_assert_eq!(p.resultant(&q.mul(r)), p.resultant(q) * p.resultant(r));
    Ok(())
}

pub fn discriminant_props(a: &UPoly<Q>, r: i64) -> Result<(), TestCaseError> {
    prop_assume!(a.deg() >= 1);
    let lin = UPoly::new(vec![Q::from_integer((-r).into()), Q::one()]);
    let p = a.mul(&lin).mul(&lin);
    prop_assert!(p.discriminant().unwrap().is_zero());
    prop_assert!(p.squarefree_decomposition().iter().any(|(_, m)| *m >= 2));
    Ok(())
}

pub fn jelem_inverse(p: &MPoly, q: &MPoly) -> Result<(), TestCaseError> {
    let e = JElem::from_mpoly(&(p + &(q * &MPoly::named("aa"))));
    prop_assume!(!e.is_zero());
    let inv = e.inv().unwrap();
    prop_assert!(exactalg::Ring::is_one(&e.mul(&inv)));
    Ok(())
}

pub fn snf_props(a: &IntMatrix) -> Result<(), TestCaseError> {
    let r = smith_normal_form(a);
    prop_assert_eq!(r.u.mul(a).mul(&r.v), r.s.clone());
    prop_assert!(r.u.det().abs().is_one());
    prop_assert!(r.v.det().abs().is_one());
    for k in 0..r.s.rows() {
        for j in 0..r.s.cols() {
            if k != j {
                prop_assert!(r.s[(k, j)].is_zero());
            }
        }
    }
    let d = r.diagonal();
    for w in d.windows(2) {
        prop_assert!(!w[0].is_negative());
        if w[0].is_zero() {
            prop_assert!(w[1].is_zero());
        } else {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
    }
    if a.rows() == a.cols() {
        let prod: BigInt = d.iter().product();
        prop_assert_eq!(prod, a.det().abs());
    }
    Ok(())
}

pub struct PropResult {
    pub name: &'static str,
    pub cases: u32,
    pub outcome: Result<(), String>,
    pub elapsed: Duration,
}

fn run<S: Strategy>(name: &'static str, cases: u32, s: S, f: impl Fn(S::Value) -> Result<(), TestCaseError>) -> PropResult {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    let start = Instant::now();
    let outcome = runner.run(&s, f).map_err(|e| e.to_string());
    PropResult { name, cases, outcome, elapsed: start.elapsed() }
}

/// Runs every property with the given number of cases.
pub fn run_all(cases: u32) -> Vec<PropResult> {
    vec![
        run("ring", cases, (arb_mpoly(4, 2), arb_mpoly(4, 2), arb_mpoly(3, 2)), |(a, b, c)| ring_axioms(&a, &b, &c)),
        run("gcd", cases, (arb_mpoly(3, 2), arb_mpoly(3, 2), arb_mpoly(3, 1)), |(a, b, g)| gcd_props(&a, &b, &g)),
        run(
            "resultant",
            cases,
            (arb_upoly(3), arb_upoly(3), arb_qpoly(3), arb_qpoly(2), arb_qpoly(2)),
            |(a, b, p, q, r)| resultant_props(&a, &b, &p, &q, &r),
        ),
        run("discriminant", cases, (arb_qpoly(3), -4i64..=4), |(a, r)| discriminant_props(&a, r)),
        run("jelem", cases, (arb_mpoly(2, 1), arb_mpoly(2, 1)), |(p, q)| jelem_inverse(&p, &q)),
        run("snf", cases, arb_matrix(), |a| snf_props(&a)),
    ]
}
