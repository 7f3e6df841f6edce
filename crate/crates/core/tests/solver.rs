use jetham_core::algebra::{Monomial, Parity, Poly};
use jetham_core::covering::{build_lstar, Covering};
use jetham_core::error::SolverError;
use jetham_core::solver::*;
use jetham_core::{systems, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn polys(cov: &Covering<Rational>, texts: &[&str]) -> Vec<Poly<Rational>> {
    texts.iter().map(|t| cov.parse_poly(t).unwrap()).collect()
}

/// `a = c b` for some nonzero rational `c`.
fn proportional(a: &[Poly<Rational>], b: &[Poly<Rational>]) -> bool {
    let lead = b.iter().flat_map(|p| p.terms()).next();
    let Some((m, cb)) = lead else { return a.iter().all(|p| p.is_zero()) };
    let i = b.iter().position(|p| !p.is_zero()).unwrap();
    let c = a[i].coeff(m) / cb.clone();
    c != q(0, 1) && a.iter().zip(b).all(|(x, y)| *x == y.scale(&c))
}

fn kdv_with_r() -> Covering<Rational> {
    let cov = build_lstar(&systems::kdv()).unwrap();
    let x = cov.parse_poly("u[1]*p[0]").unwrap();
    let t = cov.parse_poly("u[1]*p[2] - u[2]*p[1] + (u*u[1] + u[3])*p[0]").unwrap();
    cov.add_nonlocal("r", Parity::Odd, None, x, t).unwrap()
}

#[test]
fn kdv_templates() {
    let cov = build_lstar(&systems::kdv::<Rational>()).unwrap();
    let a = enumerate_ansatz(&cov, Shape::Shadow, &[3], Bounds::default()).unwrap();
    let cols: Vec<Monomial> = a.columns.iter().map(|(_, m)| m.clone()).collect();
    let expect: Vec<Monomial> = ["p[3]", "u*p[1]", "u[1]*p[0]"]
        .iter()
        .map(|t| cov.parse_poly(t).unwrap().terms().next().unwrap().0.clone())
        .collect();
    assert_eq!(cols, expect);
    assert_eq!(a.unknowns().len(), 3);
    let d = collect(&cov, &a).unwrap();
    assert_eq!(nullspace(&d), vec![vec![q(3, 1), q(2, 1), q(1, 1)]]);

    let a = enumerate_ansatz(&cov, Shape::Shadow, &[0], Bounds::default()).unwrap();
    assert_eq!(a.len(), 1);
    assert!(nullspace(&collect(&cov, &a).unwrap()).is_empty());

    assert!(matches!(enumerate_ansatz(&cov, Shape::Shadow, &[-1], Bounds::default()), Err(SolverError::EmptyTemplate)));
    assert!(matches!(
        enumerate_ansatz(&cov, Shape::Shadow, &[1, 2], Bounds::default()),
        Err(SolverError::GradeCount { .. })
    ));
}

#[test]
fn template_carries_unknowns() {
    let cov = build_lstar(&systems::kdv::<Rational>()).unwrap();
    let a = enumerate_ansatz(&cov, Shape::Shadow, &[3], Bounds::default()).unwrap();
    let t = a.template::<Rational>();
    assert_eq!(t.len(), 1);
    assert_eq!(t[0].len(), 3);
    for c in a.unknowns() {
        assert!(!cov.base().parameters().iter().any(|(p, _)| *p == c));
    }
    assert_eq!(a.instantiate(&[q(3, 1), q(2, 1), q(1, 1)]), polys(&cov, &["3*p[3] + 2*u*p[1] + u[1]*p[0]"]));
}

#[test]
fn boussinesq_template_has_parameter() {
    let cov = build_lstar(&systems::boussinesq::<Rational>()).unwrap();
    let a = enumerate_ansatz(&cov, Shape::Shadow, &[3, 2], Bounds::default()).unwrap();
    let sp3 = cov.parse_poly("sigma*p[3]").unwrap();
    assert!(a.columns.iter().any(|(j, m)| *j == 0 && *m == *sp3.terms().next().unwrap().0));
}

#[test]
fn kdv_shadows() {
    let cov = build_lstar(&systems::kdv::<Rational>()).unwrap();
    let found = solve_shadows(&cov, 1..=3, Bounds::with_max_jet(5)).unwrap();
    let got: Vec<_> = found.iter().map(|s| s.components.clone()).collect();
    assert_eq!(got, [polys(&cov, &["p[1]"]), polys(&cov, &["p[3] + 2/3*u*p[1] + 1/3*u[1]*p[0]"])]);
    assert_eq!(found.iter().map(|s| s.grade).collect::<Vec<_>>(), [1, 3]);
    // stable when the jet bound grows
    let wider = solve_shadows(&cov, 1..=3, Bounds::with_max_jet(7)).unwrap();
    assert_eq!(found, wider);
    assert_eq!(found, solve_shadows(&cov, 1..=3, Bounds::with_max_jet(5)).unwrap());
}

#[test]
fn kdv_nonlocal_shadow() {
    let cov = kdv_with_r();
    let found = solve_shadows(&cov, 5..=5, Bounds::default()).unwrap();
    assert_eq!(found.len(), 1);
    let f2 = "p[5] + 4/3*u*p[3] + 2*u[1]*p[2] + (4/9*u^2 + 4/3*u[2])*p[1] + (4/9*u*u[1] + 1/3*u[3])*p[0] - 1/9*u[1]*r";
    assert_eq!(found[0].components, polys(&cov, &[f2]));
}

#[test]
fn kdv_mkdv_shadow() {
    let cov = build_lstar(&systems::kdv_mkdv::<Rational>()).unwrap();
    let found = solve_shadows(&cov, 3..=3, Bounds::default()).unwrap();
    assert_eq!(found.len(), 1);
    let expect = polys(&cov, &["-p[3] + 4*u*p[1] + 2*u[1]*p[0] + 2*v*q[1]", "2*v*p[1] + 2*v[1]*p[0] + q[1]"]);
    assert!(proportional(&found[0].components, &expect));
}

#[test]
fn boussinesq_shadows() {
    let cov = build_lstar(&systems::boussinesq::<Rational>()).unwrap();
    let found = solve_shadows(&cov, 0..=4, Bounds::default()).unwrap();
    let expect = [
        polys(&cov, &["q[1]", "p[1]"]),
        polys(&cov, &["2*sigma*p[3] + 2*u*p[1] + u[1]*p[0] + v*q[1]", "v*p[1] + v[1]*p[0] + 2*q[1]"]),
        polys(
            &cov,
            &[
                "4*sigma*v*p[3] + 6*sigma*v[1]*p[2] + 2*(3*sigma*v[2] + 2*u*v)*p[1] + 2*(sigma*v[3] + u*v[1] + u[1]*v)*p[0] + 4*sigma*q[3] + (4*u + v^2)*q[1] + 2*u[1]*q[0]",
                "4*sigma*p[3] + (4*u + v^2)*p[1] + 2*(u[1] + v*v[1])*p[0] + 4*v*q[1] + 2*v[1]*q[0]",
            ],
        ),
    ];
    assert_eq!(found.len(), 3);
    for (f, e) in found.iter().zip(&expect) {
        assert!(proportional(&f.components, e), "{:?}", f.components);
    }
}

#[test]
fn solutions_satisfy_their_equations() {
    let cov = kdv_with_r();
    for s in solve_shadows(&cov, 0..=5, Bounds::default()).unwrap() {
        assert!(residual(&cov, Shape::Shadow, &s.components).unwrap().iter().all(|r| r.is_zero()));
    }
    let cov = build_lstar(&systems::kdv_mkdv::<Rational>()).unwrap();
    for s in solve_symmetries(cov.base(), 0..=5, Bounds::default()).unwrap() {
        assert!(residual(&cov, Shape::Symmetry, &s.components).unwrap().iter().all(|r| r.is_zero()));
    }
    for s in solve_cosymmetries(cov.base(), 0..=6, Bounds::default()).unwrap() {
        assert!(residual(&cov, Shape::Cosymmetry, &s.components).unwrap().iter().all(|r| r.is_zero()));
    }
}

#[test]
fn kdv_symmetries() {
    let sys = systems::kdv::<Rational>();
    let g3 = solve_symmetries(&sys, 3..=3, Bounds::default()).unwrap();
    assert_eq!(g3.len(), 1);
    assert_eq!(g3[0].components, [sys.parse_poly("u[1]").unwrap()]);
    let g5 = solve_symmetries(&sys, 5..=5, Bounds::default()).unwrap();
    assert!(g5.iter().any(|s| s.components == [sys.parse_poly("u[3] + u*u[1]").unwrap()]));
}

#[test]
fn kdv_mkdv_translation() {
    let sys = systems::kdv_mkdv::<Rational>();
    let found = solve_symmetries(&sys, 3..=3, Bounds::default()).unwrap();
    assert_eq!(found.len(), 1);
    assert_eq!(found[0].components, [sys.parse_poly("u[1]").unwrap(), sys.parse_poly("v[1]").unwrap()]);
}

#[test]
fn kdv_mkdv_cosymmetries() {
    let sys = systems::kdv_mkdv::<Rational>();
    let found = solve_cosymmetries(&sys, 0..=4, Bounds::default()).unwrap();
    let got: Vec<_> = found.iter().map(|s| s.components.clone()).collect();
    let p = |a: &str, b: &str| vec![sys.parse_poly(a).unwrap(), sys.parse_poly(b).unwrap()];
    assert_eq!(got, [p("0", "1"), p("1", "0"), p("u + 1/2*v^2", "u*v - v[2]")]);
    assert!(found.iter().all(|s| s.self_adjoint == Some(true)));
}

#[test]
fn kdv_cosymmetry_checks() {
    let sys = systems::kdv::<Rational>();
    let one = solve_cosymmetries(&sys, 2..=2, Bounds::default()).unwrap();
    assert_eq!(one[0].components, [Poly::one()]);
    assert_eq!(one[0].self_adjoint, Some(true));
    let cov = build_lstar(&sys).unwrap();
    let u1 = [sys.parse_poly("u[1]").unwrap()];
    assert!(!residual(&cov, Shape::Cosymmetry, &u1).unwrap()[0].is_zero());
    assert!(!is_self_adjoint(&u1, &sys).unwrap());
    // u[1] would need density grade 5, where nothing survives
    assert!(solve_cosymmetries(&sys, 5..=5, Bounds::default()).unwrap().is_empty());
}
