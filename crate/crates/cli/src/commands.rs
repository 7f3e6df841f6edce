//! Subcommands.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use jetham_core::algebra::{parse_expr, print_canonical, Parity};
use jetham_core::calculus::{euler, sys_linearization, Exactness, JetSpace, Obstruction};
use jetham_core::covering::Covering;
use jetham_core::error::SolverError;
use jetham_core::opforms::{
    apply, conservation_flux, hamiltonian_representation, matrix_to_shadow, parse_matrix, selfadjointness,
    shadow_to_matrix, verify_eq5, Eq5Check,
};
use jetham_core::schouten::{
    check_compatible, check_hamiltonian, check_shadow_shape, check_skew, shadow_to_bivector, Bivector, BracketCheck,
    Shadow,
};
use jetham_core::solver::{residual, solve_cosymmetries, solve_shadows, solve_symmetries, Bounds, Shape, Solution};
use jetham_core::{MatrixOperator, Poly, Rational};

use crate::file::{Fixture, SystemFile};
use crate::report::{self, verdict, Report};

#[derive(Parser, Debug)]
#[command(
    name = "jetham",
    version,
    about = "Hamiltonian operators of evolution equations through the cotangent covering"
)]
pub struct Cli {
    /// Print a JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// System file.
    #[arg(long)]
    pub system: PathBuf,
    /// Grades to search, `a..b` inclusive or a single grade.
    #[arg(long, value_parser = parse_grades, allow_hyphen_values = true)]
    pub grades: (i64, i64),
    /// Highest jet order in the ansatz; defaults to the grade plus two.
    #[arg(long)]
    pub max_jet: Option<u32>,
    /// Highest total degree in the parameters.
    #[arg(long, default_value_t = 2)]
    pub max_param_degree: u32,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Linearization, its adjoint and the antifield dynamics.
    Lstar {
        #[arg(long)]
        system: PathBuf,
    },
    /// Shadows linear in the antifields, one basis per grade.
    SolveShadows {
        #[command(flatten)]
        search: SearchArgs,
        /// Leave out the nonlocal variables of the file.
        #[arg(long)]
        local: bool,
    },
    /// Generating functions of symmetries.
    SolveSymmetries {
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Cosymmetries, graded by the density they would come from.
    SolveCosymmetries {
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Variational derivative of a density.
    Euler {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        density: String,
    },
    /// Skew-adjointness of the operator of a shadow.
    CheckSkew {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        shadow: String,
    },
    /// Vanishing of the Schouten bracket of a bivector with itself.
    CheckHamiltonian {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        shadow: String,
    },
    /// Vanishing of the Schouten bracket of two bivectors.
    CheckCompatible {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        shadow: String,
        #[arg(long, allow_hyphen_values = true)]
        with: String,
    },
    /// The operator equation A_t = l_f A + A l_f^*.
    VerifyEq5 {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        operator: String,
    },
    /// Applies an operator to a vector.
    Apply {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        operator: String,
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
    },
    /// Checks f = A(E(X)) for a Hamiltonian X.
    HamRepr {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        operator: String,
        #[arg(long, allow_hyphen_values = true)]
        density: String,
    },
    /// Finds T with D_t(X) = D_x(T).
    ConsFlux {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        density: String,
    },
    /// Flux compatibility of nonlocal variables, or of a trial variable.
    CheckFlux {
        #[arg(long)]
        system: PathBuf,
        /// A declared nonlocal variable, or the name of the trial variable.
        #[arg(long)]
        name: Option<String>,
        #[arg(long, requires_all = ["name", "t_flux"], allow_hyphen_values = true)]
        x_flux: Option<String>,
        #[arg(long, requires_all = ["name", "x_flux"], allow_hyphen_values = true)]
        t_flux: Option<String>,
        #[arg(long, default_value = "odd")]
        parity: String,
    },
    /// Runs the reproduction suite and prints a pass/fail table.
    Reproduce {
        /// Directory holding kdv.ham, boussinesq.ham and kdvmkdv.ham.
        #[arg(long, default_value = "systems")]
        systems: PathBuf,
    },
}

fn parse_grades(s: &str) -> Result<(i64, i64), String> {
    let bad = || format!("`{s}` is not a grade or a range a..b");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(format!("empty range `{s}`"));
    }
    Ok((a, b))
}

/// A usage or input error; exit status 2.
pub type Usage = String;

fn load(path: &Path) -> Result<SystemFile, Usage> {
    SystemFile::load(path).map_err(|d| d.to_string())
}

fn fixture<'a>(sf: &'a SystemFile, arg: &str) -> Result<Option<&'a Fixture>, Usage> {
    match arg.trim().strip_prefix("@fixture:") {
        None => Ok(None),
        Some(name) => sf.fixture(name).map(Some).ok_or_else(|| format!("{}: no fixture named `{name}`", sf.path)),
    }
}

fn wrong_kind(arg: &str, f: &Fixture, want: &str) -> Usage {
    format!("{arg} is a {}, expected {want}", f.kind())
}

/// Splits `(a, b, ...)` at top-level commas; anything else is one
/// component.
fn split_tuple(text: &str) -> Vec<String> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
        let mut depth = 0i32;
        let mut parts = vec![String::new()];
        let mut balanced = true;
        for c in inner.chars() {
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' => {
                    depth -= 1;
                    if depth < 0 {
                        balanced = false;
                    }
                }
                ',' if depth == 0 => {
                    parts.push(String::new());
                    continue;
                }
                _ => {}
            }
            parts.last_mut().expect("nonempty").push(c);
        }
        if balanced && depth == 0 && parts.len() > 1 {
            return parts.into_iter().map(|p| p.trim().to_string()).collect();
        }
    }
    vec![t.to_string()]
}

fn parse_vector(sf: &SystemFile, text: &str) -> Result<Vec<Poly>, Usage> {
    let polys = split_tuple(text)
        .iter()
        .map(|p| parse_expr(p, sf.covering.context()).map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<Vec<Poly>, _>>()?;
    let n = sf.system.len();
    if polys.len() != n {
        return Err(format!("expected {n} components, got {}", polys.len()));
    }
    Ok(polys)
}

fn resolve_density(sf: &SystemFile, arg: &str) -> Result<Poly, Usage> {
    match fixture(sf, arg)? {
        Some(Fixture::Density(d)) => Ok(d.clone()),
        Some(f) => Err(wrong_kind(arg, f, "a density")),
        None => parse_expr(arg, sf.covering.context()).map_err(|e| format!("`{arg}`: {e}")),
    }
}

fn resolve_vector(sf: &SystemFile, arg: &str) -> Result<Vec<Poly>, Usage> {
    match fixture(sf, arg)? {
        Some(Fixture::Vector(v)) => Ok(v.clone()),
        Some(f) => Err(wrong_kind(arg, f, "a vector")),
        None => parse_vector(sf, arg),
    }
}

fn resolve_operator(sf: &SystemFile, arg: &str) -> Result<MatrixOperator, Usage> {
    let n = sf.system.len();
    let m = match fixture(sf, arg)? {
        Some(Fixture::Operator(m)) => m.clone(),
        Some(Fixture::Shadow(s)) => shadow_to_matrix(s, &sf.covering).map_err(|e| e.to_string())?,
        Some(f) => return Err(wrong_kind(arg, f, "an operator or a shadow")),
        None => parse_matrix(arg, sf.covering.context()).map_err(|e| e.to_string())?,
    };
    if m.rows() != n || m.cols() != n {
        return Err(format!("expected a {n}x{n} operator, got {}x{}", m.rows(), m.cols()));
    }
    Ok(m)
}

fn resolve_shadow(sf: &SystemFile, arg: &str) -> Result<Shadow<Rational>, Usage> {
    let s = match fixture(sf, arg)? {
        Some(Fixture::Shadow(s)) => s.clone(),
        Some(Fixture::Operator(m)) => matrix_to_shadow(m, &sf.covering).map_err(|e| e.to_string())?,
        Some(f) => return Err(wrong_kind(arg, f, "a shadow or an operator")),
        None if arg.trim_start().starts_with('[') => {
            matrix_to_shadow(&resolve_operator(sf, arg)?, &sf.covering).map_err(|e| e.to_string())?
        }
        None => Shadow::new(parse_vector(sf, arg)?),
    };
    check_shadow_shape(&s, &sf.covering).map_err(|e| e.to_string())?;
    Ok(s)
}

fn bivector(sf: &SystemFile, arg: &str) -> Result<Bivector<Rational>, Usage> {
    shadow_to_bivector(&resolve_shadow(sf, arg)?, &sf.covering).map_err(|e| e.to_string())
}

fn start(sf: &SystemFile, command: &str, path: &Path) -> Report {
    let mut r = Report::new(sf.system.name(), command);
    r.input("system", path.display().to_string());
    r
}

pub fn execute(command: &Command) -> Result<Report, Usage> {
    match command {
        Command::Lstar { system } => lstar(system),
        Command::SolveShadows { search, local } => solve(search, Shape::Shadow, *local),
        Command::SolveSymmetries { search } => solve(search, Shape::Symmetry, true),
        Command::SolveCosymmetries { search } => solve(search, Shape::Cosymmetry, true),
        Command::Euler { system, density } => euler_cmd(system, density),
        Command::CheckSkew { system, shadow } => skew_cmd(system, shadow),
        Command::CheckHamiltonian { system, shadow } => bracket_cmd(system, shadow, None),
        Command::CheckCompatible { system, shadow, with } => bracket_cmd(system, shadow, Some(with)),
        Command::VerifyEq5 { system, operator } => eq5_cmd(system, operator),
        Command::Apply { system, operator, vector } => apply_cmd(system, operator, vector),
        Command::HamRepr { system, operator, density } => ham_repr_cmd(system, operator, density),
        Command::ConsFlux { system, density } => cons_flux_cmd(system, density),
        Command::CheckFlux { system, name, x_flux, t_flux, parity } => {
            check_flux_cmd(system, name.as_deref(), x_flux.as_deref().zip(t_flux.as_deref()), parity)
        }
        Command::Reproduce { systems } => crate::criteria::reproduce(systems),
    }
}

fn lstar(path: &Path) -> Result<Report, Usage> {
    let sf = load(path)?;
    let cov = &sf.local;
    let g = cov.grading();
    let l = sys_linearization(&sf.system);
    let la = l.adjoint(&sf.system).map_err(|e| e.to_string())?;
    let mut r = start(&sf, "lstar", path);
    r.line(format!("l_E = {}", l.display(g)));
    r.line(format!("l*_E = {}", la.display(g)));
    let mut rules = Map::new();
    for (f, rule) in cov.fibers().iter().zip(cov.t_rules().unwrap_or(&[])) {
        let text = print_canonical(rule, g);
        r.line(format!("{}_t = {text}", f.name));
        rules.insert(f.name.to_string(), text.into());
    }
    r.results = json!({
        "linearization": l.display(g),
        "adjoint": la.display(g),
        "antifields": cov.fibers().iter().map(|f| json!({
            "name": f.name.to_string(),
            "parity": f.parity.to_string(),
            "grade": f.grade,
        })).collect::<Vec<_>>(),
        "t_rules": rules,
    });
    r.certificates = json!({});
    Ok(r)
}

fn solve(search: &SearchArgs, shape: Shape, local: bool) -> Result<Report, Usage> {
    let sf = load(&search.system)?;
    let cov = if local { &sf.local } else { &sf.covering };
    let g = cov.grading();
    let bounds = Bounds { max_jet: search.max_jet, max_param_degree: search.max_param_degree };
    let (command, label) = match shape {
        Shape::Shadow => ("solve-shadows", "F"),
        Shape::Symmetry => ("solve-symmetries", "phi"),
        Shape::Cosymmetry => ("solve-cosymmetries", "psi"),
    };
    let mut r = start(&sf, command, &search.system);
    r.input("grades", format!("{}..{}", search.grades.0, search.grades.1));
    r.input("max_jet", search.max_jet);
    r.input("max_param_degree", search.max_param_degree);
    if shape == Shape::Shadow {
        r.input("local", local);
    }
    let mut found: Vec<Solution<Rational>> = Vec::new();
    for grade in search.grades.0..=search.grades.1 {
        let got = match shape {
            Shape::Shadow => solve_shadows(cov, grade..=grade, bounds),
            Shape::Symmetry => solve_symmetries(&sf.system, grade..=grade, bounds),
            Shape::Cosymmetry => solve_cosymmetries(&sf.system, grade..=grade, bounds),
        };
        match got {
            Ok(s) => found.extend(s),
            Err(SolverError::EmptyTemplate) => {}
            Err(e) => return Err(e.to_string()),
        }
    }
    let mut results = Vec::new();
    let mut certificates = Vec::new();
    for (i, s) in found.iter().enumerate() {
        let name = format!("{label}{i}");
        r.line(format!("{name} (grade {}) = {}", s.grade, report::vector(&s.components, g)));
        let mut entry = Map::new();
        entry.insert("label".into(), name.clone().into());
        entry.insert("grade".into(), s.grade.into());
        entry.insert("components".into(), report::strings(&s.components, g));
        if shape == Shape::Shadow {
            let a = shadow_to_matrix(&s.shadow(), cov).map_err(|e| e.to_string())?;
            r.line(format!("  A{i} = {}", a.display(g)));
            entry.insert("operator".into(), a.display(g).into());
        }
        if let Some(sa) = s.self_adjoint {
            r.line(format!("  self-adjoint: {}", if sa { "yes" } else { "no" }));
            entry.insert("self_adjoint".into(), sa.into());
        }
        let res = residual(cov, shape, &s.components).map_err(|e| e.to_string())?;
        r.line(format!("  residual: {}", report::vector(&res, g)));
        certificates.push(json!({ "label": name, "residual": report::strings(&res, g) }));
        results.push(Value::Object(entry));
    }
    if found.is_empty() {
        r.line("no solutions");
    }
    r.results = Value::Array(results);
    r.certificates = Value::Array(certificates);
    Ok(r)
}

fn euler_cmd(path: &Path, density: &str) -> Result<Report, Usage> {
    let sf = load(path)?;
    let g = sf.covering.grading();
    let x = resolve_density(&sf, density)?;
    let e = euler(&x, &sf.system.dependent_vars(), &sf.covering);
    let mut r = start(&sf, "euler", path);
    r.input("density", density);
    r.line(report::vector(&e, g));
    r.results = json!({ "euler": report::strings(&e, g) });
    let sa = selfadjointness(&e, &sf.system).ok();
    r.certificates = json!({ "self_adjoint": sa });
    Ok(r)
}

fn skew_cmd(path: &Path, shadow: &str) -> Result<Report, Usage> {
    let sf = load(path)?;
    let g = sf.covering.grading();
    let w = bivector(&sf, shadow)?;
    let check = check_skew(&w, &sf.covering).map_err(|e| e.to_string())?;
    let mut r = start(&sf, "check-skew", path);
    r.input("shadow", shadow);
    r.passed = check.passed();
    let residual = print_canonical(&check.residual, g);
    r.line(format!("W = {}", print_canonical(&w.density, g)));
    r.line(format!("residual: {residual}"));
    if !check.shadow_residual.is_empty() {
        r.line(format!("shadow residual: {}", report::vector(&check.shadow_residual, g)));
    }
    r.line(format!("check-skew: {}", verdict(r.passed)));
    r.results = json!({ "passed": r.passed, "bivector": print_canonical(&w.density, g) });
    r.certificates = json!({ "residual": residual, "shadow_residual": report::strings(&check.shadow_residual, g) });
    Ok(r)
}

fn bracket_lines(r: &mut Report, check: &BracketCheck<Rational>, cov: &Covering<Rational>) {
    let g = cov.grading();
    r.line(format!("density: {}", print_canonical(&check.density, g)));
    let mut obstruction = Map::new();
    for (v, e) in &check.obstruction {
        let text = print_canonical(e, g);
        r.line(format!("obstruction: E_{} = {text}", v.name));
        obstruction.insert(v.name.to_string(), text.into());
    }
    let witness = check.witness.as_ref().map(|w| print_canonical(w, g));
    if let Some(w) = &witness {
        r.line(format!("witness: {w}"));
    }
    r.passed = check.passed();
    r.results = json!({ "passed": r.passed, "density": print_canonical(&check.density, g) });
    r.certificates = json!({ "witness": witness, "obstruction": obstruction });
}

fn bracket_cmd(path: &Path, shadow: &str, with: Option<&String>) -> Result<Report, Usage> {
    let sf = load(path)?;
    let a = bivector(&sf, shadow)?;
    let (command, check) = match with {
        None => ("check-hamiltonian", check_hamiltonian(&a, &sf.covering)),
        Some(other) => ("check-compatible", check_compatible(&a, &bivector(&sf, other)?, &sf.covering)),
    };
    let check = check.map_err(|e| e.to_string())?;
    let mut r = start(&sf, command, path);
    r.input("shadow", shadow);
    if let Some(other) = with {
        r.input("with", other.as_str());
    }
    bracket_lines(&mut r, &check, &sf.covering);
    r.line(format!("{command}: {}", verdict(r.passed)));
    Ok(r)
}

fn eq5_cmd(path: &Path, operator: &str) -> Result<Report, Usage> {
    let sf = load(path)?;
    let g = sf.covering.grading();
    let a = resolve_operator(&sf, operator)?;
    let check = verify_eq5(&a, &sf.covering).map_err(|e| e.to_string())?;
    let mut r = start(&sf, "verify-eq5", path);
    r.input("operator", operator);
    r.passed = check.passed();
    let (form, residual) = match &check {
        Eq5Check::Operator(m) => ("operator", Value::String(m.display(g))),
        Eq5Check::Shadow(v) => ("shadow", report::strings(v, g)),
    };
    match &check {
        Eq5Check::Operator(m) => r.line(format!("residual: {}", m.display(g))),
        Eq5Check::Shadow(v) => r.line(format!("shadow residual: {}", report::vector(v, g))),
    }
    r.line(format!("verify-eq5: {}", verdict(r.passed)));
    r.results = json!({ "passed": r.passed, "form": form });
    r.certificates = json!({ "residual": residual });
    Ok(r)
}

fn apply_cmd(path: &Path, operator: &str, vector: &str) -> Result<Report, Usage> {
    let sf = load(path)?;
    let g = sf.covering.grading();
    let a = resolve_operator(&sf, operator)?;
    let psi = resolve_vector(&sf, vector)?;
    let mut r = start(&sf, "apply", path);
    r.input("operator", operator);
    r.input("vector", vector);
    match apply(&a, &psi, &sf.covering) {
        Ok(img) => {
            r.line(report::vector(&img, g));
            r.results = json!({ "image": report::strings(&img, g) });
            r.certificates = json!({});
        }
        Err(jetham_core::error::OperatorError::NonlocalObstruction { density }) => {
            r.passed = false;
            r.line(format!("obstruction: {density} is not a total derivative"));
            r.results = json!({ "image": Value::Null });
            r.certificates = json!({ "obstruction": density });
        }
        Err(e) => return Err(e.to_string()),
    }
    Ok(r)
}

fn ham_repr_cmd(path: &Path, operator: &str, density: &str) -> Result<Report, Usage> {
    let sf = load(path)?;
    let g = sf.covering.grading();
    let a = resolve_operator(&sf, operator)?;
    let x = resolve_density(&sf, density)?;
    let e = euler(&x, &sf.system.dependent_vars(), &sf.covering);
    let res = hamiltonian_representation(&a, &x, &sf.system, &sf.covering).map_err(|e| e.to_string())?;
    let mut r = start(&sf, "ham-repr", path);
    r.input("operator", operator);
    r.input("density", density);
    r.passed = res.iter().all(|p| p.is_zero());
    r.line(format!("E(X) = {}", report::vector(&e, g)));
    r.line(format!("A(E(X)) - f = {}", report::vector(&res, g)));
    r.line(format!("ham-repr: {}", verdict(r.passed)));
    r.results = json!({ "passed": r.passed, "euler": report::strings(&e, g) });
    r.certificates = json!({ "residual": report::strings(&res, g) });
    Ok(r)
}

fn cons_flux_cmd(path: &Path, density: &str) -> Result<Report, Usage> {
    let sf = load(path)?;
    let g = sf.covering.grading();
    let x = resolve_density(&sf, density)?;
    let mut r = start(&sf, "cons-flux", path);
    r.input("density", density);
    match conservation_flux(&x, &sf.system) {
        Exactness::Exact(t) => {
            let t = print_canonical(&t, g);
            r.line(format!("T = {t}"));
            r.results = json!({ "passed": true, "flux": t });
            r.certificates = json!({ "flux": t });
        }
        Exactness::Obstructed(o) => {
            r.passed = false;
            let mut obstruction = Map::new();
            match o {
                Obstruction::ConstantTerm(c) => {
                    r.line(format!("obstruction: constant term {c}"));
                    obstruction.insert("constant".into(), c.to_string().into());
                }
                Obstruction::Variational(list) => {
                    for (v, e) in list {
                        let text = print_canonical(&e, g);
                        r.line(format!("obstruction: E_{}(D_t X) = {text}", v.name));
                        obstruction.insert(v.name.to_string(), text.into());
                    }
                }
            }
            r.results = json!({ "passed": false, "flux": Value::Null });
            r.certificates = json!({ "obstruction": obstruction });
        }
        Exactness::HeuristicFailed(h) => {
            return Err(format!("no flux found for nonlocal density {}", print_canonical(&h, g)));
        }
    }
    r.line(format!("cons-flux: {}", verdict(r.passed)));
    Ok(r)
}

fn check_flux_cmd(path: &Path, name: Option<&str>, trial: Option<(&str, &str)>, parity: &str) -> Result<Report, Usage> {
    let sf = load(path)?;
    let mut r = start(&sf, "check-flux", path);
    let mut cov = sf.covering.clone();
    let names: Vec<String> = match (name, trial) {
        (Some(n), Some((x, t))) => {
            let parity = match parity {
                "even" => Parity::Even,
                "odd" => Parity::Odd,
                other => return Err(format!("parity must be even or odd, not `{other}`")),
            };
            let px = parse_expr(x, cov.context()).map_err(|e| format!("`{x}`: {e}"))?;
            let pt = parse_expr(t, cov.context()).map_err(|e| format!("`{t}`: {e}"))?;
            cov = cov.add_nonlocal(n, parity, None, px, pt).map_err(|e| e.to_string())?;
            r.input("name", n);
            r.input("parity", parity.to_string());
            r.input("x_flux", x);
            r.input("t_flux", t);
            vec![n.to_string()]
        }
        (Some(n), None) => {
            r.input("name", n);
            vec![n.to_string()]
        }
        _ => cov.nonlocals().iter().map(|v| v.name.to_string()).collect(),
    };
    let g = cov.grading();
    let mut results = Vec::new();
    let mut certificates = Map::new();
    for n in &names {
        let res = cov.check_flux(n).map_err(|e| e.to_string())?;
        let ok = res.is_zero();
        r.passed &= ok;
        let text = print_canonical(&res, g);
        r.line(format!("{n}: {} (D_t(x_flux) - D_x(t_flux) = {text})", verdict(ok)));
        results.push(json!({ "name": n, "passed": ok }));
        certificates.insert(n.clone(), text.into());
    }
    if names.is_empty() {
        r.line("no nonlocal variables");
    }
    r.results = Value::Array(results);
    r.certificates = Value::Object(certificates);
    Ok(r)
}
