use jetham_core::algebra::{parse_expr, Var, VarContext};
use jetham_core::calculus::{
    equiv_mod_exact, euler, ev_apply, is_exact, linearize, pairing, sys_linearization, Exactness, FreeJet, JetSpace,
    Obstruction,
};
use jetham_core::{systems, Poly, Rational};

fn ctx() -> VarContext {
    let mut c = VarContext::new();
    c.add_even("u");
    c.add_even("v");
    c.add_odd("p");
    c.add_odd("q");
    c
}

fn poly(s: &str) -> Poly {
    parse_expr(s, &ctx()).unwrap()
}

#[test]
fn total_x_derivatives() {
    let j = FreeJet::new();
    assert_eq!(JetSpace::<Rational>::total_dx(&j, &poly("u")), poly("u[1]"));
    assert_eq!(j.total_dx(&poly("p[0]*p[1]")), poly("p[0]*p[2]"));
    assert_eq!(j.total_dx(&poly("-8*p[0]*p[1]*p[2]")), poly("-8*p[0]*p[1]*p[3]"));
}

#[test]
fn total_t_derivative_of_kdv() {
    let kdv = systems::kdv::<Rational>();
    assert_eq!(kdv.total_dt(&poly("u")), poly("u[3] + u*u[1]"));
    assert_eq!(kdv.total_dt(&poly("u[1]")), poly("u[4] + u[1]^2 + u*u[2]"));
    assert_eq!(kdv.total_dt(&poly("7")), poly("0"));
}

#[test]
fn evolutionary_fields() {
    let kdv = systems::kdv::<Rational>();
    let u = [Var::even("u", 0)];
    assert_eq!(ev_apply(&[poly("u[1]")], &poly("u[2]"), &u, &kdv).unwrap(), poly("u[3]"));
    assert_eq!(ev_apply(&[poly("u[3] + u*u[1]")], &poly("u"), &u, &kdv).unwrap(), poly("u[3] + u*u[1]"));
    assert!(ev_apply(&[], &poly("u"), &u, &kdv).is_err());
}

#[test]
fn kdv_linearization_and_adjoint() {
    let kdv = systems::kdv::<Rational>();
    let l = sys_linearization(&kdv);
    assert_eq!(l.to_string(), "Dt - Dx^3 - u*Dx - u[1]");
    assert_eq!(l.adjoint(&kdv).unwrap().to_string(), "-Dt + Dx^3 + u*Dx");
    let zero = linearize(&[poly("3")], &kdv.dependent_vars(), &kdv);
    assert!(zero.is_zero());
}

#[test]
fn kdv_mkdv_linearization() {
    let s = systems::kdv_mkdv::<Rational>();
    let g = jetham_core::calculus::JetSpace::grading(&s);
    let l = sys_linearization(&s);
    assert_eq!(l.entry(0, 0).display(g), "Dt + Dx^3 - (6*u + 3*v^2)*Dx - 6*u[1] - 6*v*v[1]");
    assert_eq!(l.entry(0, 1).display(g), "3*v*Dx^3 + 3*v[1]*Dx^2 - (6*u*v - 3*v[2])*Dx - 6*u*v[1] - 6*u[1]*v + 3*v[3]");
    assert_eq!(l.entry(1, 0).display(g), "-3*v*Dx - 3*v[1]");
    // the constant term is 6 v v_1 + 3 u_1; the printed display drops the
    // derivative on u
    assert_eq!(l.entry(1, 1).display(g), "Dt + Dx^3 - (3*u + 3*v^2)*Dx - 3*u[1] - 6*v*v[1]");
    let a = l.adjoint(&s).unwrap();
    assert_eq!(a.entry(0, 0).display(g), "-Dt - Dx^3 + (6*u + 3*v^2)*Dx");
    assert_eq!(a.entry(0, 1).display(g), "3*v*Dx");
    assert_eq!(a.entry(1, 0).display(g), "-3*v*Dx^3 - 6*v[1]*Dx^2 + (6*u*v - 6*v[2])*Dx");
    assert_eq!(a.entry(1, 1).display(g), "-Dt - Dx^3 + (3*u + 3*v^2)*Dx");
}

#[test]
fn variational_derivatives() {
    let j = FreeJet::new();
    let uv = [Var::even("u", 0), Var::even("v", 0)];
    let e = euler(&poly("1/2*(u^2 + u*v^2 - v*v[2])"), &uv, &j);
    assert_eq!(e, vec![poly("u + 1/2*v^2"), poly("u*v - v[2]")]);
    assert_eq!(euler(&poly("u*u[1]"), &uv[..1], &j), vec![poly("0")]);
    let p = [Var::odd("p", 0)];
    let w0 = poly("p[1]*p[0]");
    let dp = euler(&w0, &p, &j);
    assert_eq!(dp, vec![poly("-2*p[1]")]);
    assert_eq!(&dp[0] * &poly("p[0]"), w0.scale(&Rational::from_integer((-2).into())));
}

#[test]
fn exactness() {
    let j = FreeJet::new();
    assert_eq!(is_exact(&poly("4/3*p[0]*p[1]*p[3]"), &j), Exactness::Exact(poly("4/3*p[0]*p[1]*p[2]")));
    assert_eq!(is_exact(&poly("-8*p[0]*p[1]*p[3]"), &j), Exactness::Exact(poly("-8*p[0]*p[1]*p[2]")));
    assert_eq!(
        is_exact(&poly("u"), &j),
        Exactness::Obstructed(Obstruction::Variational(vec![(Var::even("u", 0), poly("1"))]))
    );
    assert!(matches!(is_exact(&poly("3"), &j), Exactness::Obstructed(Obstruction::ConstantTerm(_))));
    let h = j.total_dx(&poly("u*u[2] + v*q[0]*p[1] - 2*u*p[0]*q[2]"));
    let w = is_exact(&h, &j);
    assert!(w.is_exact(), "{w:?}");
    assert_eq!(j.total_dx(w.witness().unwrap()), h);
}

#[test]
fn equivalence_modulo_exact() {
    let j = FreeJet::new();
    assert!(equiv_mod_exact(&poly("u*u[1]"), &poly("0"), &j));
    assert!(equiv_mod_exact(&poly("4/3*p[0]*p[1]*p[3]"), &poly("0"), &j));
    assert!(!equiv_mod_exact(&poly("u^2"), &poly("0"), &j));
    assert!(equiv_mod_exact(&poly("u*u[2]"), &poly("-u[1]^2"), &j));
}

#[test]
fn pairing_of_vectors() {
    let j = FreeJet::new();
    let d = pairing(&[poly("1")], &[poly("u[1]")]).unwrap();
    assert_eq!(d, poly("u[1]"));
    assert!(is_exact(&d, &j).is_exact());
    assert!(pairing(&[poly("1")], &[]).is_err());
}
