use gklo_core::symbolic::{q, qr, random_eval, rf_equal, LinearForm, RationalFunction, SymbolicError, Variable, Q};
use proptest::prelude::*;

fn x(slot: u32) -> Variable {
    Variable::X { vertex: 1, slot }
}

fn lf(v: Variable) -> LinearForm {
    LinearForm::var(v)
}

fn rf(f: &LinearForm) -> RationalFunction {
    RationalFunction::linear(f)
}

fn one_over(f: &LinearForm) -> RationalFunction {
    RationalFunction::reciprocal(f)
}

// a pool of forms over u, two torus slots and hbar; none is identically zero
const VARS: [Variable; 4] = [Variable::U, Variable::X { vertex: 1, slot: 1 }, Variable::X { vertex: 1, slot: 2 }, Variable::Hbar];

fn form() -> impl Strategy<Value = LinearForm> {
    (prop::array::uniform4(-2i64..=2), -2i64..=2).prop_filter_map("zero form", |(cs, c0)| {
        let f = LinearForm::from_terms(VARS.iter().zip(cs).map(|(v, c)| (*v, q(c))), qr(c0, 2));
        (!f.is_constant()).then_some(f)
    })
}

/// `c * prod f_k^{e_k}` with `e_k` in -1..=2.
fn rational() -> impl Strategy<Value = RationalFunction> {
    (prop::collection::vec((form(), -1i32..=2), 0..4), -3i64..=3).prop_map(|(fs, c)| {
        let mut acc = RationalFunction::integer(c);
        for (f, e) in fs {
            acc = acc.mul(&RationalFunction::linear_power(&f, e).expect("nonconstant form"));
        }
        acc
    })
}

#[test]
fn sum_over_common_denominator() {
    let (z, a, b) = (lf(Variable::U), lf(x(1)), lf(x(2)));
    let lhs = one_over(&(&z - &a)).add(&one_over(&(&z - &b)));
    let num = rf(&(z.scale(&q(2)) - a.clone() - b.clone()));
    let rhs = num.mul(&one_over(&(&z - &a))).mul(&one_over(&(&z - &b)));
    assert!(rf_equal(&lhs, &rhs));
    assert!(rf_equal(&lhs.add(&RationalFunction::zero()), &lhs));
    let cancel = one_over(&(&z - &a)).add(&one_over(&(&z - &a)).neg());
    assert!(cancel.is_zero());
}

#[test]
fn equality_by_cross_multiplication() {
    let (z, a) = (lf(Variable::U), lf(x(1)));
    let square = rf(&(&z - &a)).mul(&rf(&(&z + &a)));
    assert!(rf_equal(&square.mul(&one_over(&(&z - &a))), &rf(&(&z + &a))));
    assert!(rf_equal(&one_over(&(&z - &a)).mul(&rf(&(&z - &a))), &RationalFunction::one()));
    let h = LinearForm::hbar();
    let f = rf(&(&a + &h)).mul(&one_over(&(&a - &h)));
    let g = rf(&(&a - &h)).mul(&one_over(&(&a + &h)));
    assert!(!rf_equal(&f, &g));
}

#[test]
fn substitution_examples() {
    let (u, a) = (lf(Variable::U), lf(x(1)));
    let f = one_over(&(&u + &a));
    let g = f.substitute_var(Variable::U, &-u.clone()).unwrap();
    assert!(rf_equal(&g, &one_over(&(&a - &u))));

    let shifted = rf(&a).substitute_var(x(1), &(&a + &LinearForm::hbar())).unwrap();
    assert!(rf_equal(&shifted, &rf(&(&a + &LinearForm::hbar()))));

    let pole = one_over(&(&u - &a));
    assert!(matches!(pole.substitute_var(Variable::U, &a), Err(SymbolicError::SubstitutionDegenerate(_))));
}

#[test]
fn evaluation_examples() {
    let z = lf(Variable::U);
    let zero = RationalFunction::zero();
    assert_eq!(zero.eval(&|_| q(5)), Some(q(0)));
    let f = rf(&z.add_constant(&q(-1))).mul(&one_over(&z.add_constant(&q(1))));
    assert_eq!(f.eval(&|_| q(3)), Some(qr(1, 2)));
}

#[test]
fn proportional_factors_merge() {
    let a = lf(x(1)) - lf(x(2));
    let f = one_over(&a).mul(&one_over(&a.scale(&q(-3))));
    assert_eq!(f.factors().len(), 1);
    assert_eq!(f.factors()[0].1, -2);
}

fn point(seed: u64) -> impl Fn(Variable) -> Q {
    move |v| gklo_core::symbolic::eval::sample_value(v, seed, 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in rational(), b in rational(), c in rational()) {
        prop_assert!(rf_equal(&a.add(&b), &b.add(&a)));
        prop_assert!(rf_equal(&a.mul(&b), &b.mul(&a)));
        prop_assert!(rf_equal(&a.add(&b).add(&c), &a.add(&b.add(&c))));
        prop_assert!(rf_equal(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
        prop_assert!(rf_equal(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c))));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn equality_is_an_equivalence(a in rational(), b in rational()) {
        prop_assert!(rf_equal(&a, &a));
        prop_assert_eq!(rf_equal(&a, &b), rf_equal(&b, &a));
        // b + a - a is b in a different factored shape
        let b2 = b.add(&a).sub(&a);
        prop_assert!(rf_equal(&b, &b2));
        prop_assert!(rf_equal(&a, &b) == rf_equal(&a, &b2));
    }

    #[test]
    fn equal_functions_evaluate_equal(a in rational(), b in rational(), seed in any::<u64>()) {
        let f = a.mul(&b).add(&a);
        let g = a.mul(&b.add(&RationalFunction::one()));
        prop_assert!(rf_equal(&f, &g));
        if let (Some(fv), Some(gv)) = (random_eval(&f, seed), random_eval(&g, seed)) {
            prop_assert_eq!(fv, gv);
        }
    }

    #[test]
    fn substitution_is_a_ring_map(a in rational(), b in rational(), img in form()) {
        let s = |f: &RationalFunction| f.substitute_var(Variable::U, &img);
        // a generic image only fails on a denominator it kills; skip those
        if let (Ok(sa), Ok(sb), Ok(ssum), Ok(sprod)) = (s(&a), s(&b), s(&a.add(&b)), s(&a.mul(&b))) {
            prop_assert!(rf_equal(&ssum, &sa.add(&sb)));
            prop_assert!(rf_equal(&sprod, &sa.mul(&sb)));
        }
    }

    #[test]
    fn denominators_are_products_of_linear_forms(a in rational(), b in rational()) {
        for f in [a.add(&b), a.mul(&b), a.sub(&b)] {
            for (form, e) in f.factors() {
                prop_assert!(*e != 0);
                prop_assert!(form.is_normalized());
                prop_assert!(!form.is_constant());
            }
            let mut forms: Vec<_> = f.factors().iter().map(|(g, _)| g.clone()).collect();
            forms.dedup();
            prop_assert_eq!(forms.len(), f.factors().len());
        }
    }

    #[test]
    fn evaluation_is_a_ring_map(a in rational(), b in rational(), seed in any::<u64>()) {
        let p = point(seed);
        if let (Some(va), Some(vb)) = (a.eval(&p), b.eval(&p)) {
            prop_assert_eq!(a.add(&b).eval(&p), Some(&va + &vb));
            prop_assert_eq!(a.mul(&b).eval(&p), Some(&va * &vb));
        }
    }
}
