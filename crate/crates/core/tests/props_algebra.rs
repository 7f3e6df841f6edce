mod common;

use common::*;
use jetham_core::algebra::{grade_of, parse_expr, print_canonical, Grade, GradingTable, Parity, Var};
use jetham_core::{Poly, Rational};
use proptest::prelude::*;

const SMALL: Shape = Shape { vars: UVPQ, max_order: 2, max_degree: 3, max_terms: 3 };

fn sign(odd: bool) -> Rational {
    if odd {
        q(-1, 1)
    } else {
        q(1, 1)
    }
}

fn grading() -> GradingTable {
    GradingTable::new(-3).with("u", 2).with("v", 1).with("p", 0).with("q", 1)
}

fn odd_var() -> impl Strategy<Value = Var> {
    (prop::bool::ANY, 0u32..=2).prop_map(|(first, k)| Var::odd(if first { "p" } else { "q" }, k))
}

fn any_var() -> impl Strategy<Value = Var> {
    (0..UVPQ.len(), 0u32..=2).prop_map(|(i, k)| Var::jet(UVPQ[i].0, k, UVPQ[i].1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn ring_axioms(a in poly(SMALL), b in poly(SMALL), c in poly(SMALL)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn supercommutativity(
        pa in prop::bool::ANY,
        pb in prop::bool::ANY,
        a in poly(SMALL),
        b in poly(SMALL),
    ) {
        let pa = if pa { Parity::Odd } else { Parity::Even };
        let pb = if pb { Parity::Odd } else { Parity::Even };
        let a = a.filter_terms(|m| m.parity() == pa);
        let b = b.filter_terms(|m| m.parity() == pb);
        let swapped = (&b * &a).scale(&sign(pa.is_odd() && pb.is_odd()));
        prop_assert_eq!(&a * &b, swapped);
    }

    #[test]
    fn left_leibniz_rule(pa in prop::bool::ANY, a in poly(SMALL), b in poly(SMALL), z in any_var()) {
        let pa = if pa { Parity::Odd } else { Parity::Even };
        let a = a.filter_terms(|m| m.parity() == pa);
        let lhs = (&a * &b).pderiv(&z);
        let rhs = &(&a.pderiv(&z) * &b) + &(&a * &b.pderiv(&z)).scale(&sign(z.is_odd() && pa.is_odd()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn repeated_odd_factor_vanishes(o in odd_var(), a in poly(SMALL), b in poly(SMALL)) {
        let o = Poly::var(o);
        prop_assert!((&(&a * &o) * &(&b * &o)).is_zero());
        prop_assert!((&o * &o).is_zero());
    }

    #[test]
    fn print_parse_round_trip(a in poly(SMALL), graded in prop::bool::ANY) {
        let g = grading();
        let text = print_canonical(&a, graded.then_some(&g));
        let back: Poly = parse_expr(&text, &ctx(UVPQ)).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(print_canonical(&back, graded.then_some(&g)), text);
    }

    #[test]
    fn rebuilding_from_terms_is_canonical(a in poly(SMALL)) {
        let rebuilt: Poly = a.terms().map(|(m, c)| Poly::term(c.clone(), m.clone())).sum();
        prop_assert_eq!(&rebuilt, &a);
        let reversed: Poly = a.terms().collect::<Vec<_>>().into_iter().rev().map(|(m, c)| Poly::term(c.clone(), m.clone())).sum();
        prop_assert_eq!(reversed, a);
    }

    #[test]
    fn grade_is_additive(a in monomial(SMALL), b in monomial(SMALL)) {
        let g = grading();
        let (pa, pb): (Poly, Poly) = (Poly::product(a), Poly::product(b));
        let prod = &pa * &pb;
        match (grade_of(&pa, &g).unwrap(), grade_of(&pb, &g).unwrap(), grade_of(&prod, &g).unwrap()) {
            (Grade::Homogeneous(x), Grade::Homogeneous(y), Grade::Homogeneous(z)) => prop_assert_eq!(x + y, z),
            (_, _, Grade::Zero) => {}
            other => prop_assert!(false, "unexpected grades {:?}", other),
        }
    }
}
