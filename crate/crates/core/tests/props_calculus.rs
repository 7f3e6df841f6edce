mod common;

use common::*;
use jetham_core::algebra::Var;
use jetham_core::calculus::{euler, ev_apply, is_exact, linearize, DiffOp, FreeJet, JetSpace};
use jetham_core::{systems, MatrixOperator, Poly, Rational};
use proptest::prelude::*;

const EVEN_UV: Shape = Shape { vars: UV, max_order: 3, max_degree: 3, max_terms: 4 };
const SUPER: Shape = Shape { vars: UVPQ, max_order: 3, max_degree: 3, max_terms: 4 };
const COEFF: Shape = Shape { vars: UV, max_order: 2, max_degree: 2, max_terms: 2 };

fn families() -> Vec<Var> {
    vec![Var::even("u", 0), Var::even("v", 0), Var::odd("p", 0), Var::odd("q", 0)]
}

fn diffop() -> impl Strategy<Value = DiffOp<Rational>> {
    prop::collection::vec(poly(COEFF), 1..=3).prop_map(|cs| {
        let mut op = DiffOp::zero();
        for (k, c) in cs.iter().enumerate() {
            op.add_local(k as u32, c);
        }
        op
    })
}

fn matrix() -> impl Strategy<Value = MatrixOperator> {
    prop::collection::vec(diffop(), 4)
        .prop_map(|es| MatrixOperator::from_rows(vec![es[..2].to_vec(), es[2..].to_vec()]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn euler_kills_total_derivatives(h in poly(SUPER)) {
        let jet = FreeJet::new();
        let dh = jet.total_dx(&h);
        for e in euler(&dh, &families(), &jet) {
            prop_assert!(e.is_zero());
        }
    }

    #[test]
    fn evolutionary_fields_commute_with_dx(
        phi in prop::collection::vec(poly(EVEN_UV), 2),
        f in poly(SUPER),
    ) {
        let jet = FreeJet::new();
        let fam = vec![Var::even("u", 0), Var::even("v", 0)];
        let a = ev_apply(&phi, &jet.total_dx(&f), &fam, &jet).unwrap();
        let b = jet.total_dx(&ev_apply(&phi, &f, &fam, &jet).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn exactness_witnesses_are_sound(h in poly(SUPER), g in poly(SUPER)) {
        let jet = FreeJet::new();
        let dg = jet.total_dx(&g);
        let exact = is_exact(&dg, &jet);
        prop_assert!(exact.is_exact());
        prop_assert_eq!(&jet.total_dx(exact.witness().unwrap()), &dg);
        if let Some(w) = is_exact(&h, &jet).witness() {
            prop_assert_eq!(&jet.total_dx(w), &h);
        }
    }

    #[test]
    fn total_derivatives_commute_on_systems(f in poly(EVEN_UV), which in 0usize..2) {
        let sys = if which == 0 { systems::boussinesq::<Rational>() } else { systems::kdv_mkdv() };
        prop_assert_eq!(sys.total_dx(&sys.total_dt(&f)), sys.total_dt(&sys.total_dx(&f)));
    }

    #[test]
    fn adjoint_is_an_involution(a in diffop(), m in matrix()) {
        let jet = FreeJet::new();
        prop_assert_eq!(a.adjoint(&jet).unwrap().adjoint(&jet).unwrap(), a);
        prop_assert_eq!(m.adjoint(&jet).unwrap().adjoint(&jet).unwrap(), m);
    }

    #[test]
    fn adjoint_reverses_composition(a in diffop(), b in diffop(), m in matrix(), n in matrix()) {
        let jet = FreeJet::new();
        let lhs = a.compose(&b, &jet).unwrap().adjoint(&jet).unwrap();
        let rhs = b.adjoint(&jet).unwrap().compose(&a.adjoint(&jet).unwrap(), &jet).unwrap();
        prop_assert_eq!(lhs, rhs);
        let lhs = m.compose(&n, &jet).unwrap().adjoint(&jet).unwrap();
        let rhs = n.adjoint(&jet).unwrap().compose(&m.adjoint(&jet).unwrap(), &jet).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn adjoint_moves_across_the_pairing(a in diffop(), psi in poly(COEFF), phi in poly(COEFF)) {
        let jet = FreeJet::new();
        let lhs = &psi * &a.apply_local(&phi, &jet).unwrap();
        let rhs = &a.adjoint(&jet).unwrap().apply_local(&psi, &jet).unwrap() * &phi;
        prop_assert!(is_exact(&(&lhs - &rhs), &jet).is_exact());
    }

    #[test]
    fn linearization_is_the_directional_derivative(
        f in prop::collection::vec(poly(EVEN_UV), 2),
        phi in prop::collection::vec(poly(COEFF), 2),
    ) {
        let jet = FreeJet::new();
        let fam = vec![Var::even("u", 0), Var::even("v", 0)];
        let l = linearize(&f, &fam, &jet);
        let by_operator = l.apply_local(&phi, &jet).unwrap();
        for (i, fi) in f.iter().enumerate() {
            prop_assert_eq!(&by_operator[i], &ev_apply(&phi, fi, &fam, &jet).unwrap());
        }
    }
}

#[test]
fn kdv_translation_is_a_symmetry_both_ways() {
    let sys = systems::kdv::<Rational>();
    let fam = sys.dependent_vars();
    let lf = linearize(sys.rhs(), &fam, &sys);
    for (phi, symmetric) in [("u[1]", true), ("u[3] + u*u[1]", true), ("u", false), ("u*u[1]", false)] {
        let phi: Poly = sys.parse_poly(phi).unwrap();
        let via_operator = &sys.total_dt(&phi) - &lf.apply_local(std::slice::from_ref(&phi), &sys).unwrap()[0];
        let via_field = &sys.total_dt(&phi) - &ev_apply(std::slice::from_ref(&phi), &sys.rhs()[0], &fam, &sys).unwrap();
        assert_eq!(via_operator, via_field);
        assert_eq!(via_operator.is_zero(), symmetric);
    }
}
