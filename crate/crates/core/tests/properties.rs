mod common;

use common::*;
use num_rational::Rational64;
use pomega_core::indefinite::{cone_sum_series, Bound, Cone, ConeSumSpec};
use pomega_core::{Cyc8, JacobiSeries, Monomial, QSeries};
use proptest::prelude::*;
use std::collections::BTreeMap;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_is_a_group(a in qseries(-4, 30), b in qseries(0, 30)) {
        let back = a.add(&b).unwrap().sub(&b).unwrap();
        prop_assert!(eq(&back, &a.truncate(back.order())).is_ok());
        prop_assert!(a.add(&a.neg()).unwrap().is_zero());
    }

    #[test]
    fn multiplication_commutes(a in qseries(-2, 30), b in qseries(1, 30)) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }

    #[test]
    fn multiplication_associates(a in qseries(-2, 20), b in qseries(0, 20), c in qseries(3, 20)) {
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        eq(&l, &r).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn multiplication_distributes(a in qseries(-2, 20), b in qseries(0, 20), c in qseries(0, 20)) {
        let l = a.mul(&b.add(&c).unwrap()).unwrap();
        let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        eq(&l, &r).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn one_is_neutral(a in qseries(-3, 30)) {
        let one = QSeries::one(D, 40);
        eq(&a.mul(&one).unwrap(), &a).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn inverse_times_series_is_one(s in invertible_qseries(-2, 24)) {
        let inv = s.invert().unwrap();
        let p = s.mul(&inv).unwrap();
        prop_assert!(p.order() >= s.order() - s.floor() - 2, "order {} floor {}", p.order(), s.floor());
        eq(&p, &QSeries::one(D, p.order())).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn inverse_of_inverse(s in invertible_qseries(0, 20)) {
        let back = s.invert().unwrap().invert().unwrap();
        eq(&back, &s).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn invert_needs_a_leading_term(order in 1i64..40) {
        prop_assert!(QSeries::zero(D, order).invert().is_err());
    }

    #[test]
    fn substitution_is_multiplicative(a in jacobi(24), b in jacobi(24), k in 0i64..8, qe in -1i64..=1) {
        let val = Monomial::q(Cyc8::zeta8(k), Rational64::new(qe, D));
        let ab = a.mul(&b).unwrap();
        let l = ab.substitute(&val).unwrap();
        let r = a.substitute(&val).unwrap().mul(&b.substitute(&val).unwrap()).unwrap();
        eq(&l, &r).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn jacobi_product_matches_q_product(a in qseries(0, 20), b in qseries(0, 20)) {
        let ja = JacobiSeries::from_qseries(&a, 1);
        let jb = JacobiSeries::from_qseries(&b, 1);
        let prod = ja.mul(&jb).unwrap().substitute(&Monomial::one()).unwrap();
        eq(&prod, &a.mul(&b).unwrap()).map_err(TestCaseError::fail)?;
    }
}

/// All three half-lines point the same way, so nonnegative couplings stay
/// nonnegative in the cone's own frame.
fn cone_bounds() -> impl Strategy<Value = [Bound; 3]> {
    prop_oneof![
        prop::array::uniform3((-1i64..=2).prop_map(Bound::AtLeast)),
        prop::array::uniform3((-2i64..=1).prop_map(Bound::AtMost)),
    ]
}

/// Positive definite with nonnegative couplings; a small box holds all
/// points below the order.
fn positive_form() -> impl Strategy<Value = [[i64; 3]; 3]> {
    (prop::array::uniform3(0i64..=1), prop::array::uniform3(0i64..=1)).prop_map(|(off, extra)| {
        let mut a = [[0i64; 3]; 3];
        a[0][1] = off[0];
        a[1][0] = off[0];
        a[0][2] = off[1];
        a[2][0] = off[1];
        a[1][2] = off[2];
        a[2][1] = off[2];
        for i in 0..3 {
            let row: i64 = (0..3).filter(|&j| j != i).map(|j| a[i][j].abs()).sum();
            a[i][i] = row + 1 + extra[i];
        }
        a
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cone_walk_matches_brute_force(
        quad in positive_form(),
        lin in prop::array::uniform3(-1i64..=1),
        cones in prop::collection::vec((cone_bounds(), prop_oneof![Just(1i64), Just(-1)]), 1..3),
        order in 1i64..5,
    ) {
        let d = 2;
        let q = quad.map(|r| r.map(Rational64::from_integer));
        let b = lin.map(|x| Rational64::new(x, 2));
        let cones: Vec<Cone> = cones.into_iter().map(|(bs, s)| Cone::new(bs, s)).collect();
        let spec = ConeSumSpec::new(q, b, cones.clone()).unwrap();
        let walked = cone_sum_series(&spec, d, 1, order * d).unwrap();

        let mut brute: BTreeMap<i64, i64> = BTreeMap::new();
        let r = 8;
        for x in -r..=r {
            for y in -r..=r {
                for z in -r..=r {
                    let p = [x, y, z];
                    let e = spec.exponent(p);
                    if e >= Rational64::from_integer(order) {
                        continue;
                    }
                    for c in &cones {
                        let inside = (0..3).all(|i| match c.bounds[i] {
                            Bound::AtLeast(l) => p[i] >= l,
                            Bound::AtMost(u) => p[i] <= u,
                        });
                        if inside {
                            *brute.entry((e * d).to_integer()).or_default() += c.sign;
                        }
                    }
                }
            }
        }
        let brute = JacobiSeries::from_terms(d, 1, brute.into_iter().map(|(e, c)| (e, 0, Cyc8::from_int(c))), order * d);
        prop_assert_eq!(walked.agree_to(&brute).unwrap(), Ok(order * d));
    }
}
