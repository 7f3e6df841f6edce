mod common;

use common::*;
use jetham_core::algebra::{grade_of, Grade, Parity, Var};
use jetham_core::calculus::JetSpace;
use jetham_core::covering::{build_lstar, Covering};
use jetham_core::{systems, Poly, Rational};
use proptest::prelude::*;
use std::sync::OnceLock;

const SUPER: Shape = Shape { vars: UVPQ, max_order: 3, max_degree: 3, max_terms: 3 };
const KDV: Shape = Shape { vars: UP, max_order: 3, max_degree: 3, max_terms: 3 };

const BOUSSINESQ_FLUXES: [(&str, &str); 3] = [
    (
        "p[0]*u[1] + q[0]*v[1]",
        "sigma*v[1]*p[2] - sigma*v[2]*p[1] + (sigma*v[3] + u*v[1] + u[1]*v)*p[0] + (u[1] + v*v[1])*q[0]",
    ),
    (
        "(sigma*v[3] + u*v[1] + u[1]*v)*p[0] + (u[1] + v*v[1])*q[0]",
        "sigma*(u[1] + v*v[1])*p[2] - sigma*(u[2] + v*v[2] + v[1]^2)*p[1] + (sigma*u[3] + 2*sigma*v*v[3] + 3*sigma*v[1]*v[2] + u*u[1] + 2*u*v*v[1] + u[1]*v^2)*p[0] + (sigma*v[3] + u*v[1] + 2*u[1]*v + v^2*v[1])*q[0]",
    ),
    (
        "(4*sigma*u[3] + 6*sigma*v*v[3] + 12*sigma*v[1]*v[2] + 6*u*u[1] + 6*u*v*v[1] + 3*u[1]*v^2)*p[0] + (4*sigma*v[3] + 6*u*v[1] + 6*u[1]*v + 3*v^2*v[1])*q[0]",
        "sigma*(4*sigma*v[3] + 6*u*v[1] + 6*u[1]*v + 3*v^2*v[1])*p[2] - sigma*(4*sigma*v[4] + 6*u*v[2] + 12*u[1]*v[1] + 6*u[2]*v + 3*v^2*v[2] + 6*v*v[1]^2)*p[1] + (4*sigma^2*v[5] + 10*sigma*u*v[3] + 18*sigma*u[1]*v[2] + 18*sigma*u[2]*v[1] + 10*sigma*u[3]*v + 9*sigma*v^2*v[3] + 30*sigma*v*v[1]*v[2] + 6*sigma*v[1]^3 + 6*u^2*v[1] + 12*u*u[1]*v + 9*u*v^2*v[1] + 3*u[1]*v^3)*p[0] + (4*sigma*u[3] + 10*sigma*v*v[3] + 12*sigma*v[1]*v[2] + 6*u*u[1] + 12*u*v*v[1] + 9*u[1]*v^2 + 3*v^3*v[1])*q[0]",
    ),
];

fn kdv_with_r() -> &'static Covering<Rational> {
    static COV: OnceLock<Covering<Rational>> = OnceLock::new();
    COV.get_or_init(|| {
        let cov = build_lstar(&systems::kdv()).unwrap();
        let x = cov.parse_poly("u[1]*p[0]").unwrap();
        let t = cov.parse_poly("u[1]*p[2] - u[2]*p[1] + (u*u[1] + u[3])*p[0]").unwrap();
        cov.add_nonlocal("r", Parity::Odd, None, x, t).unwrap()
    })
}

fn boussinesq_with_r() -> &'static Covering<Rational> {
    static COV: OnceLock<Covering<Rational>> = OnceLock::new();
    COV.get_or_init(|| {
        let mut cov = build_lstar(&systems::boussinesq()).unwrap();
        for (i, (x, t)) in BOUSSINESQ_FLUXES.iter().enumerate() {
            let x = cov.parse_poly(x).unwrap();
            let t = cov.parse_poly(t).unwrap();
            cov = cov.add_nonlocal(&format!("r{}", i + 1), Parity::Odd, None, x, t).unwrap();
        }
        cov
    })
}

/// A random polynomial times an optional nonlocal factor.
fn with_nonlocal(shape: Shape, names: &'static [&'static str]) -> impl Strategy<Value = Poly> {
    (poly(shape), poly(shape), prop::option::of(0..names.len())).prop_map(move |(a, b, r)| match r {
        Some(i) => &a + &(&b * &Poly::var(Var::nonlocal(names[i], Parity::Odd))),
        None => a,
    })
}

#[test]
fn fluxes_are_compatible() {
    assert!(kdv_with_r().check_flux("r").unwrap().is_zero());
    for r in ["r1", "r2", "r3"] {
        assert!(boussinesq_with_r().check_flux(r).unwrap().is_zero(), "{r}");
    }
}

#[test]
fn antifields_are_dual_and_graded() {
    for sys in [systems::kdv::<Rational>(), systems::boussinesq(), systems::kdv_mkdv()] {
        let cov = build_lstar(&sys).unwrap();
        assert_eq!(cov.fibers().len(), sys.len());
        for (f, d) in cov.fibers().iter().zip(sys.dependents()) {
            assert_eq!(f.parity, d.parity.flip());
        }
        let g = cov.grading().unwrap();
        for (rule, f) in cov.t_rules().unwrap().iter().zip(cov.fibers()) {
            let expected = f.grade.unwrap() - g.t_weight;
            assert_eq!(grade_of(rule, g).unwrap(), Grade::Homogeneous(expected));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn extended_derivatives_commute_kdv(f in with_nonlocal(KDV, &["r"])) {
        let cov = kdv_with_r();
        prop_assert_eq!(cov.total_dx(&cov.total_dt(&f)), cov.total_dt(&cov.total_dx(&f)));
    }

    #[test]
    fn extended_derivatives_commute_boussinesq(f in with_nonlocal(SUPER, &["r1", "r2", "r3"])) {
        let cov = boussinesq_with_r();
        prop_assert_eq!(cov.total_dx(&cov.total_dt(&f)), cov.total_dt(&cov.total_dx(&f)));
    }

    #[test]
    fn lstar_derivatives_commute_kdv_mkdv(f in poly(SUPER)) {
        let cov = build_lstar(&systems::kdv_mkdv::<Rational>()).unwrap();
        prop_assert_eq!(cov.total_dx(&cov.total_dt(&f)), cov.total_dt(&cov.total_dx(&f)));
    }
}
