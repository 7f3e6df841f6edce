//! The reproduction suite: the published KdV, Boussinesq and KdV-mKdV
//! results recomputed from the system files, plus randomized property
//! checks and a determinism check over the whole transcript.

use std::fmt::Display;
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use jetham_core::algebra::{print_canonical, Monomial, Var};
use jetham_core::calculus::{euler, ev_apply, is_exact, FreeJet, JetSpace};
use jetham_core::covering::Covering;
use jetham_core::error::{SchoutenError, SolverError};
use jetham_core::linalg::LinearSystem;
use jetham_core::opforms::{hamiltonian_representation, matrix_to_shadow, parse_matrix, shadow_to_matrix, verify_eq5};
use jetham_core::schouten::{
    check_compatible, check_hamiltonian, check_skew, schouten_bracket, shadow_to_bivector, Shadow,
};
use jetham_core::solver::{
    residual, solve_cosymmetries, solve_shadows, solve_symmetries, Bounds, Shape as Kind, Solution,
};
use jetham_core::{EvolutionSystem, Poly, Rational};

use crate::file::{Fixture, SystemFile};
use crate::random::{Gen, Shape, UV, UVPQ};
use crate::report::Report;

const KDV_F0: &str = "p[1]";
const KDV_F1: &str = "p[3] + 2/3*u*p[1] + 1/3*u[1]*p[0]";
const KDV_W1_DENSITY: &str = "4/3*p[0]*p[1]*p[3]";
const KDV_W1_WITNESS: &str = "4/3*p[0]*p[1]*p[2]";
const KDV_F2: &str = "p[5] + 4/3*u*p[3] + 2*u[1]*p[2] + (4/9*u^2 + 4/3*u[2])*p[1] \
                      + (4/9*u*u[1] + 1/3*u[3])*p[0] - 1/9*u[1]*r";
const KDV_A2_TAIL: &str = "- 1/9*u[1]*Dxinv(u[1]*_)";

const BOUSS_PT: &str = "v*p[1] + v[1]*p[0] + q[1]";
const BOUSS_QT: &str = "sigma*p[3] - u[1]*p[0] + v*q[1]";
const BOUSS_LOCAL: [[&str; 2]; 3] = [
    ["q[1]", "p[1]"],
    ["2*sigma*p[3] + 2*u*p[1] + u[1]*p[0] + v*q[1]", "v*p[1] + v[1]*p[0] + 2*q[1]"],
    [
        "4*sigma*v*p[3] + 6*sigma*v[1]*p[2] + 2*(3*sigma*v[2] + 2*u*v)*p[1] + 2*(sigma*v[3] + u*v[1] + u[1]*v)*p[0] \
         + 4*sigma*q[3] + (4*u + v^2)*q[1] + 2*u[1]*q[0]",
        "4*sigma*p[3] + (4*u + v^2)*p[1] + 2*(u[1] + v*v[1])*p[0] + 4*v*q[1] + 2*v[1]*q[0]",
    ],
];

const HAM3: &str = "[-Dx^3 + 4*u*Dx + 2*u[1], 2*v*Dx; 2*v*Dx + 2*v[1], Dx]";
const HAM3_DENSITY: &str = "-8*p[0]*p[1]*p[3]";
const HAM3_WITNESS: &str = "-8*p[0]*p[1]*p[2]";
const HAMILTONIAN: &str = "1/2*(u^2 + u*v^2 - v*v[2])";
const CONSERVED: [(&str, &str, [&str; 2]); 4] = [
    ("eta1", "v", ["0", "1"]),
    ("eta2", "u", ["1", "0"]),
    ("eta4", "1/2*(u^2 + u*v^2 - v*v[2])", ["u + 1/2*v^2", "u*v - v[2]"]),
    (
        "eta6",
        "12*u^3 + 24*u^2*v^2 - 6*u*u[2] + 6*u*v^4 - 30*u*v*v[2] - 3*u[2]*v^2 - 8*v^3*v[2] + 6*v*v[4]",
        [
            "6*(6*u^2 + 8*u*v^2 - 2*u[2] + v^4 - 6*v*v[2] - v[1]^2)",
            "12*(4*u^2*v + 2*u*v^3 - 5*u*v[2] - 5*u[1]*v[1] - 3*u[2]*v - 4*v^2*v[2] - 4*v*v[1]^2 + v[4])",
        ],
    ),
];

const FABRICATED: [(&str, &str); 3] = [
    ("kdv", "Dx^3 + u*Dx"),
    ("kdvmkdv", "[-Dx^3 + 4*u*Dx + 2*u[1], 2*v*Dx; 2*v*Dx + 2*v[1], 2*Dx]"),
    ("boussinesq", "[2*sigma*Dx^3 + 2*u*Dx + u[1], v*Dx + 2*v[1]; v*Dx, 2*Dx]"),
];

/// Randomized cases per property.
pub const CASES: usize = 1000;
/// Cases for the Jacobi identity.
pub const JACOBI_CASES: usize = 50;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Criterion {
    pub number: u32,
    pub title: &'static str,
    pub passed: bool,
    pub lines: Vec<String>,
}

/// The three system files of the suite.
pub struct Suite {
    pub kdv: SystemFile,
    pub boussinesq: SystemFile,
    pub kdvmkdv: SystemFile,
}

impl Suite {
    pub fn load(dir: &Path) -> Result<Suite, String> {
        let load = |f: &str| SystemFile::load(&dir.join(f)).map_err(|d| d.to_string());
        Ok(Suite { kdv: load("kdv.ham")?, boussinesq: load("boussinesq.ham")?, kdvmkdv: load("kdvmkdv.ham")? })
    }

    fn by_name(&self, name: &str) -> &SystemFile {
        match name {
            "kdv" => &self.kdv,
            "boussinesq" => &self.boussinesq,
            _ => &self.kdvmkdv,
        }
    }
}

trait OrFail<T> {
    fn or_fail(self) -> Result<T, String>;
}

impl<T, E: Display> OrFail<T> for Result<T, E> {
    fn or_fail(self) -> Result<T, String> {
        self.map_err(|e| e.to_string())
    }
}

struct Checker {
    lines: Vec<String>,
    passed: bool,
}

impl Checker {
    fn check(&mut self, what: impl Display, ok: bool) {
        self.passed &= ok;
        self.lines.push(format!("  {} {what}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, what: impl Display) {
        self.lines.push(format!("       {what}"));
    }
}

fn criterion(number: u32, title: &'static str, body: impl FnOnce(&mut Checker) -> Result<(), String>) -> Criterion {
    let mut c = Checker { lines: Vec::new(), passed: true };
    if let Err(e) = body(&mut c) {
        c.check(format!("error: {e}"), false);
    }
    Criterion { number, title, passed: c.passed, lines: c.lines }
}

fn polys(cov: &Covering<Rational>, texts: &[&str]) -> Result<Vec<Poly>, String> {
    texts.iter().map(|t| cov.parse_poly(t).or_fail()).collect()
}

fn show(cov: &Covering<Rational>, v: &[Poly]) -> String {
    crate::report::vector(v, cov.grading())
}

/// `c` with `a = c b`, when there is one.
fn factor(a: &[Poly], b: &[Poly]) -> Option<Rational> {
    let (j, lead) =
        b.iter().enumerate().find_map(|(j, p)| p.terms().next().map(|(m, c)| (j, (m.clone(), c.clone()))))?;
    let c = a[j].coeff(&lead.0) / lead.1;
    (c != Rational::from_integer(0.into()) && a.iter().zip(b).all(|(x, y)| *x == y.scale(&c))).then_some(c)
}

fn all_zero(v: &[Poly]) -> bool {
    v.iter().all(|p| p.is_zero())
}

fn c1(s: &Suite) -> Criterion {
    criterion(1, "KdV shadow search", |c| {
        let cov = &s.kdv.local;
        let found = solve_shadows(cov, 1..=3, Bounds::with_max_jet(5)).or_fail()?;
        for (i, f) in found.iter().enumerate() {
            c.note(format!("F{i} = {}", show(cov, &f.components)));
        }
        let got: Vec<Vec<Poly>> = found.into_iter().map(|f| f.components).collect();
        let expect = vec![polys(cov, &[KDV_F0])?, polys(cov, &[KDV_F1])?];
        c.check("grades 1..3, max jet 5: exactly {p[1], p[3] + 2/3*u*p[1] + 1/3*u[1]*p[0]}", got == expect);
        Ok(())
    })
}

fn c2(s: &Suite) -> Criterion {
    criterion(2, "KdV Hamiltonianity", |c| {
        let cov = &s.kdv.local;
        let w = shadow_to_bivector(&Shadow::new(polys(cov, &[KDV_F1])?), cov).or_fail()?;
        let check = check_hamiltonian(&w, cov).or_fail()?;
        let g = cov.grading();
        c.note(format!("density {}", print_canonical(&check.density, g)));
        c.check("density is 4/3*p[0]*p[1]*p[3]", check.density == cov.parse_poly(KDV_W1_DENSITY).or_fail()?);
        let witness = check.witness.clone().unwrap_or_else(Poly::zero);
        c.note(format!("witness {}", print_canonical(&witness, g)));
        c.check(
            "witness is 4/3*p[0]*p[1]*p[2]",
            check.witness.is_some() && witness == cov.parse_poly(KDV_W1_WITNESS).or_fail()?,
        );
        c.check("D_x(witness) equals the density", cov.total_dx(&witness) == check.density);
        Ok(())
    })
}

fn c3(s: &Suite) -> Criterion {
    criterion(3, "KdV nonlocal structure", |c| {
        let cov = &s.kdv.covering;
        let flux = cov.check_flux("r").or_fail()?;
        c.check("check_flux r", flux.is_zero());
        let found = solve_shadows(cov, 5..=5, Bounds::default()).or_fail()?;
        for f in &found {
            c.note(format!("F = {}", show(cov, &f.components)));
        }
        let expect = polys(cov, &[KDV_F2])?;
        c.check("grade 5 returns exactly F2 with tail -1/9*u[1]*r", found.len() == 1 && found[0].components == expect);
        let a = shadow_to_matrix(&Shadow::new(expect), cov).or_fail()?;
        let text = a.display(cov.grading());
        c.note(format!("A2 = {text}"));
        c.check(format!("A2 ends with `{KDV_A2_TAIL}`"), text.ends_with(KDV_A2_TAIL));
        Ok(())
    })
}

fn c4(s: &Suite) -> Criterion {
    criterion(4, "Boussinesq structures", |c| {
        let local = &s.boussinesq.local;
        let g = local.grading();
        let rules = local.t_rules().unwrap_or(&[]);
        for (f, r) in local.fibers().iter().zip(rules) {
            c.note(format!("{}_t = {}", f.name, print_canonical(r, g)));
        }
        let printed = polys(local, &[BOUSS_PT, BOUSS_QT])?;
        c.check(format!("p_t = {BOUSS_PT}"), rules.first() == Some(&printed[0]));
        c.check(format!("q_t = {BOUSS_QT}"), rules.get(1) == Some(&printed[1]));

        let found = solve_shadows(local, 0..=4, Bounds::default()).or_fail()?;
        let expect: Vec<Vec<Poly>> = BOUSS_LOCAL.iter().map(|f| polys(local, f)).collect::<Result<_, _>>()?;
        let mut matched = found.len() == expect.len();
        for (i, (f, e)) in found.iter().zip(&expect).enumerate() {
            let k = factor(&f.components, e);
            match &k {
                Some(k) => c.note(format!("F{} = {k} times (F{}, G{})", i, i + 1, i + 1)),
                None => c.note(format!("F{i} = {}", show(local, &f.components))),
            }
            matched &= k.is_some();
        }
        c.check("local search returns the three printed shadows up to scale", matched);

        let bivectors = expect
            .iter()
            .map(|f| shadow_to_bivector(&Shadow::new(f.clone()), local))
            .collect::<Result<Vec<_>, _>>()
            .or_fail()?;
        for i in 0..3 {
            for j in i..3 {
                let ok = check_compatible(&bivectors[i], &bivectors[j], local).or_fail()?.passed();
                c.check(format!("[[A{}, A{}]] = 0", i + 1, j + 1), ok);
            }
        }

        let cov = &s.boussinesq.covering;
        for name in cov.nonlocals().iter().map(|r| r.name.to_string()) {
            c.check(format!("check_flux {name}"), cov.check_flux(&name).or_fail()?.is_zero());
        }
        for k in 4..=6 {
            let Some(Fixture::Shadow(sh)) = s.boussinesq.fixture(&format!("A{k}")) else {
                return Err(format!("boussinesq.ham has no shadow fixture A{k}"));
            };
            let res = residual(cov, Kind::Shadow, &sh.components).or_fail()?;
            c.check(format!("(F{k}, G{k}) satisfies the lifted equation identically"), all_zero(&res));
            if let Some(Fixture::Operator(op)) = s.boussinesq.fixture(&format!("A{k}_op")) {
                let same = shadow_to_matrix(sh, cov).or_fail()? == *op;
                c.check(format!("printed operator A{k} is the operator of (F{k}, G{k})"), same);
            }
        }
        Ok(())
    })
}

fn c5(s: &Suite) -> Criterion {
    criterion(5, "KdV-mKdV structure and Hamiltonian", |c| {
        let cov = &s.kdvmkdv.local;
        let g = cov.grading();
        let a = parse_matrix(HAM3, cov.context()).or_fail()?;
        let ham3 = matrix_to_shadow(&a, cov).or_fail()?;
        let found = solve_shadows(cov, 3..=3, Bounds::default()).or_fail()?;
        let k = match found.as_slice() {
            [one] => factor(&one.components, &ham3.components),
            _ => None,
        };
        if let Some(k) = &k {
            c.note(format!("solution = {k} times the printed shadow"));
        }
        c.check(format!("grade (3, 2) search returns exactly the shadow of {HAM3}"), k.is_some());

        let w = shadow_to_bivector(&ham3, cov).or_fail()?;
        c.check("check_skew", check_skew(&w, cov).or_fail()?.passed());
        let check = check_hamiltonian(&w, cov).or_fail()?;
        c.note(format!("density {}", print_canonical(&check.density, g)));
        c.check("intermediate density is -8*p[0]*p[1]*p[3]", check.density == cov.parse_poly(HAM3_DENSITY).or_fail()?);
        let witness = check.witness.clone().unwrap_or_else(Poly::zero);
        c.check(
            "check_hamiltonian passes with witness -8*p[0]*p[1]*p[2]",
            check.passed() && witness == cov.parse_poly(HAM3_WITNESS).or_fail()?,
        );

        let sys = &s.kdvmkdv.system;
        let x = cov.parse_poly(HAMILTONIAN).or_fail()?;
        let res = hamiltonian_representation(&a, &x, sys, cov).or_fail()?;
        c.check(format!("f = A(E(X)) for X = {HAMILTONIAN}"), all_zero(&res));

        for (name, eta, pair) in CONSERVED {
            let e = euler(&cov.parse_poly(eta).or_fail()?, &sys.dependent_vars(), cov);
            c.note(format!("E({name}) = {}", show(cov, &e)));
            c.check(format!("E({name}) is the printed generating function"), e == polys(cov, &pair)?);
        }
        Ok(())
    })
}

/// Kernel of `coeffs -> sum_i coeffs[i] * v[i]` for vectors `v[i]`.
fn linear_relations(v: &[Vec<Poly>]) -> Vec<Vec<Rational>> {
    let mut keys: Vec<(usize, Monomial)> = v
        .iter()
        .flat_map(|w| w.iter().enumerate().flat_map(|(j, p)| p.terms().map(move |(m, _)| (j, m.clone()))))
        .collect();
    keys.sort();
    keys.dedup();
    let mut sys = LinearSystem::new(v.len());
    for (j, m) in &keys {
        let row = v
            .iter()
            .enumerate()
            .map(|(i, w)| (i, w.get(*j).map_or_else(|| Rational::from_integer(0.into()), |p| p.coeff(m))))
            .filter(|(_, c)| *c != Rational::from_integer(0.into()));
        sys.push_row(row.collect());
    }
    sys.nullspace()
}

fn combination(found: &[&Solution<Rational>], c: &[Rational]) -> Vec<Poly> {
    let n = found[0].components.len();
    let mut out = vec![Poly::zero(); n];
    for (s, k) in found.iter().zip(c) {
        for (o, f) in out.iter_mut().zip(&s.components) {
            *o += &f.scale(k);
        }
    }
    out
}

fn c6(s: &Suite) -> Criterion {
    criterion(6, "KdV-mKdV uniqueness", |c| {
        let cov = &s.kdvmkdv.local;
        let a = parse_matrix(HAM3, cov.context()).or_fail()?;
        let ham3 = matrix_to_shadow(&a, cov).or_fail()?;
        let mut hamiltonian: Vec<Vec<Poly>> = Vec::new();
        let mut settled = true;
        for grade in -3..=3 {
            let found = match solve_shadows(cov, grade..=grade, Bounds::default()) {
                Ok(f) => f,
                Err(SolverError::EmptyTemplate) => {
                    c.note(format!("grade {grade}: no admissible monomials"));
                    continue;
                }
                Err(e) => return Err(e.to_string()),
            };
            let found: Vec<&Solution<Rational>> = found.iter().collect();
            if found.is_empty() {
                c.note(format!("grade {grade}: no shadows"));
                continue;
            }
            // skew-adjointness is linear in the shadow
            let residuals = found
                .iter()
                .map(|f| {
                    let check = check_skew(&shadow_to_bivector(&f.shadow(), cov)?, cov)?;
                    Ok(std::iter::once(check.residual).chain(check.shadow_residual).collect::<Vec<_>>())
                })
                .collect::<Result<Vec<_>, SchoutenError>>()
                .or_fail()?;
            let skew = linear_relations(&residuals);
            let noun = if found.len() == 1 { "shadow" } else { "shadows" };
            c.note(format!("grade {grade}: {} {noun}, skew-adjoint subspace of dimension {}", found.len(), skew.len()));
            match skew.as_slice() {
                [] => {}
                [k] => {
                    let f = combination(&found, k);
                    let w = shadow_to_bivector(&Shadow::new(f.clone()), cov).or_fail()?;
                    let ok = check_hamiltonian(&w, cov).or_fail()?.passed();
                    c.note(format!("grade {grade}: {} is {}Hamiltonian", show(cov, &f), if ok { "" } else { "not " }));
                    if ok {
                        hamiltonian.push(f);
                    }
                }
                _ => settled = false,
            }
        }
        c.check("every skew-adjoint subspace has dimension at most one", settled);
        let unique = matches!(hamiltonian.as_slice(), [f] if factor(f, &ham3.components).is_some());
        c.check("the Hamiltonian shadows are the multiples of the printed one", unique);
        Ok(())
    })
}

/// `D_t(phi) - l_f(phi)`, with `l_f(phi)` the derivative of `f` along
/// `phi`.
fn evolution_residual<J: JetSpace<Rational>>(phi: &[Poly], sys: &EvolutionSystem, jet: &J) -> Vec<Poly> {
    let fam = sys.dependent_vars();
    phi.iter()
        .zip(sys.rhs())
        .map(|(p, f)| &jet.total_dt(p) - &ev_apply(phi, f, &fam, jet).expect("matching components"))
        .collect()
}

struct Problem<'a> {
    cov: &'a Covering<Rational>,
    found: [Vec<Solution<Rational>>; 3],
}

fn c7(s: &Suite) -> Criterion {
    criterion(7, "property suites", |c| {
        let jet = FreeJet::new();
        let sup = Shape { vars: UVPQ, max_order: 3, max_degree: 3, max_terms: 4 };
        let even = Shape { vars: UV, max_order: 3, max_degree: 3, max_terms: 4 };
        let coeff = Shape { vars: UV, max_order: 2, max_degree: 2, max_terms: 2 };
        let pair = Shape { vars: UVPQ, max_order: 3, max_degree: 3, max_terms: 3 };
        let small = Shape { vars: UVPQ, max_order: 2, max_degree: 2, max_terms: 2 };
        let families = [Var::even("u", 0), Var::even("v", 0), Var::odd("p", 0), Var::odd("q", 0)];
        let uv = [Var::even("u", 0), Var::even("v", 0)];

        let mut r = Gen::new(1);
        let ok = (0..CASES).all(|_| euler(&jet.total_dx(&r.poly(sup)), &families, &jet).iter().all(|e| e.is_zero()));
        c.check(format!("E(D_x h) = 0 ({CASES} cases)"), ok);

        let mut r = Gen::new(2);
        let ok = (0..CASES).all(|_| {
            let a = r.diffop(coeff);
            let m = r.matrix(coeff);
            a.adjoint(&jet).and_then(|b| b.adjoint(&jet)).ok() == Some(a)
                && m.adjoint(&jet).and_then(|b| b.adjoint(&jet)).ok() == Some(m)
        });
        c.check(format!("A** = A ({CASES} cases)"), ok);

        let mut r = Gen::new(3);
        let ok = (0..CASES).all(|_| {
            let (m, n) = (r.matrix(coeff), r.matrix(coeff));
            let lhs = m.compose(&n, &jet).and_then(|x| x.adjoint(&jet));
            let rhs = n.adjoint(&jet).and_then(|nb| m.adjoint(&jet).and_then(|mb| nb.compose(&mb, &jet)));
            lhs.is_ok() && lhs == rhs
        });
        c.check(format!("(A B)* = B* A* ({CASES} cases)"), ok);

        let mut r = Gen::new(4);
        let ok = (0..CASES).all(|_| {
            let phi = [r.poly(even), r.poly(even)];
            let f = r.poly(sup);
            ev_apply(&phi, &jet.total_dx(&f), &uv, &jet).ok()
                == ev_apply(&phi, &f, &uv, &jet).ok().map(|x| jet.total_dx(&x))
        });
        c.check(format!("[E_phi, D_x] = 0 ({CASES} cases)"), ok);

        let km = &s.kdvmkdv.local;
        let br = |f: &Poly, h: &Poly| schouten_bracket(f, h, km).expect("homogeneous arguments");
        let trivial = |f: &Poly| is_exact(f, &jet).is_exact();
        let even_arg = |f: &Poly| !f.parity().is_some_and(|p| p.is_odd());
        let sign = |odd: bool| Rational::from_integer(if odd { (-1).into() } else { 1.into() });
        let mut r = Gen::new(5);
        let ok = (0..CASES).all(|_| {
            let f = r.graded(pair);
            let h = r.with_antifields(pair);
            trivial(&(&br(&h, &f) + &br(&f, &h).scale(&sign(even_arg(&f) && even_arg(&h)))))
        });
        c.check(format!("graded antisymmetry mod D_x ({CASES} cases)"), ok);

        let mut r = Gen::new(6);
        let ok = (0..JACOBI_CASES).all(|_| {
            let (f, g, h) = (r.with_antifields(small), r.with_antifields(small), r.with_antifields(small));
            let lhs = br(&f, &br(&g, &h));
            let rhs = &br(&br(&f, &g), &h) + &br(&g, &br(&f, &h)).scale(&sign(even_arg(&f) && even_arg(&g)));
            trivial(&(&lhs - &rhs))
        });
        c.check(format!("graded Jacobi mod D_x ({JACOBI_CASES} cases)"), ok);

        let problems = [&s.kdv.covering, &s.boussinesq.local, &s.kdvmkdv.local]
            .into_iter()
            .map(|cov| {
                let sys = cov.base();
                Ok(Problem {
                    cov,
                    found: [
                        solve_shadows(cov, 0..=5, Bounds::default())?,
                        solve_symmetries(sys, 0..=5, Bounds::default())?,
                        solve_cosymmetries(sys, 0..=6, Bounds::default())?,
                    ],
                })
            })
            .collect::<Result<Vec<_>, SolverError>>()
            .or_fail()?;
        let test = Shape { vars: UV, max_order: 2, max_degree: 2, max_terms: 3 };
        let mut r = Gen::new(7);
        let mut checked = 0;
        let ok = (0..CASES).all(|_| {
            let pr = &problems[r.below(3)];
            let kind = r.below(3);
            let found = &pr.found[kind];
            if found.is_empty() {
                return true;
            }
            let grade = found[r.below(found.len())].grade;
            let same: Vec<&Solution<Rational>> = found.iter().filter(|s| s.grade == grade).collect();
            let k: Vec<Rational> = same.iter().map(|_| Rational::from_integer(r.int(-5, 5).into())).collect();
            let phi = combination(&same, &k);
            let sys = pr.cov.base();
            checked += 1;
            match kind {
                0 => all_zero(&evolution_residual(&phi, sys, pr.cov)),
                1 => all_zero(&evolution_residual(&phi, sys, sys)),
                _ => {
                    // psi is a cosymmetry iff D_t(psi).eta + psi.l_f(eta) is exact for every eta
                    let eta: Vec<Poly> = (0..sys.len()).map(|_| r.poly(test)).collect();
                    let fam = sys.dependent_vars();
                    let mut density = Poly::zero();
                    for (j, psi) in phi.iter().enumerate() {
                        density += &(&sys.total_dt(psi) * &eta[j]);
                        density += &(psi * &ev_apply(&eta, &sys.rhs()[j], &fam, sys).expect("matching components"));
                    }
                    is_exact(&density, sys).is_exact()
                }
            }
        });
        c.check(format!("solver solutions back-substitute to zero ({checked} cases)"), ok);

        let linear = Shape { vars: UVPQ, max_order: 3, max_degree: 3, max_terms: 4 };
        let kdv_coeff =
            Shape { vars: &[("u", jetham_core::algebra::Parity::Even)], max_order: 2, max_degree: 2, max_terms: 2 };
        let kr = &s.kdv.covering;
        let mut r = Gen::new(8);
        let ok = (0..CASES).all(|_| {
            let sh = Shadow::new(vec![r.with_odd_degree(linear, 1), r.with_odd_degree(linear, 1)]);
            let m = r.matrix(coeff);
            let pk = Poly::var(Var::odd("p", r.below(4) as u32));
            let tailed = Shadow::new(vec![
                &(&(&r.poly(kdv_coeff) * &pk) + &(&r.poly(kdv_coeff) * &Poly::var(Var::odd("p", 0))))
                    + &(&r.poly(kdv_coeff) * &Poly::var(Var::nonlocal("r", jetham_core::algebra::Parity::Odd))),
            ]);
            let round = |sh: &Shadow<Rational>, cov: &Covering<Rational>| {
                shadow_to_matrix(sh, cov).and_then(|a| matrix_to_shadow(&a, cov)).ok().as_ref() == Some(sh)
            };
            round(&sh, km)
                && matrix_to_shadow(&m, km).and_then(|x| shadow_to_matrix(&x, km)).ok() == Some(m)
                && round(&tailed, kr)
        });
        c.check(format!("shadow <-> operator round trip ({CASES} cases)"), ok);

        for (file, sf) in [("kdv", &s.kdv), ("boussinesq", &s.boussinesq), ("kdvmkdv", &s.kdvmkdv)] {
            for (name, f) in &sf.fixtures {
                let op = match f {
                    Fixture::Operator(m) => m.clone(),
                    Fixture::Shadow(sh) => shadow_to_matrix(sh, &sf.covering).or_fail()?,
                    _ => continue,
                };
                let ok = verify_eq5(&op, &sf.covering).or_fail()?.passed();
                c.check(format!("operator equation holds for {file}:{name}"), ok);
            }
        }
        for (file, text) in FABRICATED {
            let sf = s.by_name(file);
            let a = parse_matrix(text, sf.covering.context()).or_fail()?;
            let ok = !verify_eq5(&a, &sf.covering).or_fail()?.passed();
            c.check(format!("operator equation fails for {file}: {text}"), ok);
        }
        Ok(())
    })
}

/// Criteria 1 to 7.
pub fn run_criteria(s: &Suite) -> Vec<Criterion> {
    vec![c1(s), c2(s), c3(s), c4(s), c5(s), c6(s), c7(s)]
}

pub fn transcript(criteria: &[Criterion]) -> String {
    let mut out = String::new();
    for c in criteria {
        out.push_str(&format!("criterion {}: {}\n", c.number, c.title));
        for l in &c.lines {
            out.push_str(l);
            out.push('\n');
        }
    }
    out
}

fn sha256(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// All eight criteria. Criteria 1 to 7 run once on a single thread and
/// once on the global pool; criterion 8 compares the two transcripts.
pub fn run_all(s: &Suite) -> Result<(Vec<Criterion>, [String; 2]), String> {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    let first = transcript(&single.install(|| run_criteria(s)));
    let mut criteria = run_criteria(s);
    let second = transcript(&criteria);
    let hashes = [sha256(&first), sha256(&second)];
    let mut c8 = Checker { lines: Vec::new(), passed: true };
    c8.note(format!("single thread: sha256 {}", hashes[0]));
    c8.note(format!("thread pool:   sha256 {}", hashes[1]));
    c8.check("transcripts of two consecutive runs are identical", first == second);
    criteria.push(Criterion { number: 8, title: "determinism", passed: c8.passed, lines: c8.lines });
    Ok((criteria, hashes))
}

pub fn table(criteria: &[Criterion]) -> Vec<String> {
    criteria
        .iter()
        .map(|c| format!("criterion {}  {}  {}", c.number, if c.passed { "PASS" } else { "FAIL" }, c.title))
        .collect()
}

pub fn reproduce(dir: &Path) -> Result<Report, String> {
    let suite = Suite::load(dir)?;
    let (criteria, hashes) = run_all(&suite)?;
    let mut r = Report::new("reproduction suite", "reproduce");
    r.input("systems", dir.display().to_string());
    for l in transcript(&criteria).lines() {
        r.line(l);
    }
    r.line("");
    for l in table(&criteria) {
        r.line(l);
    }
    r.passed = criteria.iter().all(|c| c.passed);
    r.results = Value::Array(
        criteria
            .iter()
            .map(|c| json!({ "criterion": c.number, "title": c.title, "passed": c.passed, "lines": c.lines }))
            .collect(),
    );
    r.certificates = json!({ "sha256": hashes });
    Ok(r)
}
