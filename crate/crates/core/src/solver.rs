//! Graded ansatz search for shadows, symmetries and cosymmetries.
//!
//! Each search enumerates every monomial of the requested grade and shape,
//! attaches an unknown coefficient to it, expands the defining equation
//! column by column and returns the nullspace of the resulting system.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::algebra::print::print_order;
use crate::algebra::{GradingTable, Monomial, Poly, Symbol, Var};
use crate::calculus::{linearize, EvolutionSystem, JetSpace, MatrixOperator};
use crate::covering::Covering;
use crate::error::SolverError;
use crate::linalg::LinearSystem;
use crate::scalar::Coeff;
use crate::schouten::Shadow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// Linear in the antifields and odd nonlocals of a covering.
    Shadow,
    /// Free of fiber variables, graded like the dependents.
    Symmetry,
    /// Free of fiber variables, graded dually to the dependents.
    Cosymmetry,
}

/// Search bounds. `max_jet` defaults to the grade plus two.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_jet: Option<u32>,
    pub max_param_degree: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_jet: None, max_param_degree: 2 }
    }
}

impl Bounds {
    pub fn with_max_jet(max_jet: u32) -> Self {
        Bounds { max_jet: Some(max_jet), ..Bounds::default() }
    }

    fn jet_for(&self, grade: i64) -> u32 {
        self.max_jet.unwrap_or_else(|| (grade + 2).max(0) as u32)
    }
}

/// A template with one unknown coefficient per column. Column `k` is the
/// monomial `columns[k].1` in component `columns[k].0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ansatz {
    pub shape: Shape,
    pub grades: Vec<i64>,
    pub columns: Vec<(usize, Monomial)>,
}

impl Ansatz {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Names of the unknowns, `_c0`, `_c1`, ...; the leading underscore
    /// keeps them out of the expression grammar.
    pub fn unknowns(&self) -> Vec<Symbol> {
        (0..self.len()).map(|k| Symbol::new(&format!("_c{k}"))).collect()
    }

    /// The template with the unknowns as parameter variables.
    pub fn template<C: Coeff>(&self) -> Vec<Poly<C>> {
        let mut out = vec![Poly::zero(); self.grades.len()];
        for ((j, m), c) in self.columns.iter().zip(self.unknowns()) {
            let cm = Monomial::var(Var::parameter(c.as_str()));
            out[*j] += &Poly::term(C::one(), m.clone()).mul_term(&C::one(), &cm);
        }
        out
    }

    /// Components of the vector with the given unknown values.
    pub fn instantiate<C: Coeff>(&self, values: &[C]) -> Vec<Poly<C>> {
        let mut out = vec![Poly::zero(); self.grades.len()];
        for ((j, m), c) in self.columns.iter().zip(values) {
            out[*j].add_term(m.clone(), c.clone());
        }
        out
    }
}

/// The determining system of an ansatz. `rows[i]` collects the coefficient
/// of `row_keys[i]`, a monomial in one component of the defining equation.
#[derive(Clone, Debug)]
pub struct Determining<C> {
    pub system: LinearSystem<C>,
    pub row_keys: Vec<(usize, Monomial)>,
}

/// A solution vector of one grade.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution<C> {
    pub grade: i64,
    pub components: Vec<Poly<C>>,
    /// Set for cosymmetries: whether the linearization is self-adjoint.
    pub self_adjoint: Option<bool>,
}

impl<C: Coeff> Solution<C> {
    pub fn shadow(&self) -> Shadow<C> {
        Shadow::new(self.components.clone())
    }
}

/// Grades of the components for the grade `g` of a search. For shadows and
/// symmetries `g` is the grade of the first component; for cosymmetries it
/// is the grade of the conserved density, so component `j` has grade
/// `g - |u^j|`.
pub fn component_grades<C: Coeff>(sys: &EvolutionSystem<C>, shape: Shape, g: i64) -> Result<Vec<i64>, SolverError> {
    let base: Vec<i64> =
        sys.dependents().iter().map(|d| d.grade.ok_or(SolverError::Ungraded)).collect::<Result<_, _>>()?;
    Ok(match shape {
        Shape::Shadow | Shape::Symmetry => base.iter().map(|b| g + b - base[0]).collect(),
        Shape::Cosymmetry => base.iter().map(|b| g - b).collect(),
    })
}

#[derive(Clone, Copy, Debug)]
struct Atom {
    var: Var,
    grade: i64,
    odd: bool,
    param: bool,
}

fn atoms<C: Coeff>(
    sys: &EvolutionSystem<C>,
    cov: Option<&Covering<C>>,
    table: &GradingTable,
    max_jet: u32,
) -> Result<(Vec<Atom>, Vec<Atom>), SolverError> {
    let grade = |v: &Var| table.var_grade(v).ok_or(SolverError::Ungraded);
    let mut plain = Vec::new();
    for d in sys.dependents() {
        for k in 0..=max_jet {
            let var = d.var(k);
            let g = grade(&var)?;
            if !d.parity.is_odd() && g <= 0 {
                return Err(SolverError::NonPositiveGrade(var.to_string()));
            }
            plain.push(Atom { var, grade: g, odd: d.parity.is_odd(), param: false });
        }
    }
    for (name, _) in sys.parameters() {
        let var = Var::parameter(name.as_str());
        plain.push(Atom { var, grade: grade(&var)?, odd: false, param: true });
    }
    let mut antifields = Vec::new();
    if let Some(cov) = cov {
        for f in cov.fibers() {
            for k in 0..=max_jet {
                let var = f.var(k);
                antifields.push(Atom { var, grade: grade(&var)?, odd: true, param: false });
            }
        }
        for r in cov.nonlocals().iter().filter(|r| r.parity.is_odd()) {
            let var = r.var();
            antifields.push(Atom { var, grade: grade(&var)?, odd: true, param: false });
        }
    }
    // atoms that cannot be pruned by the remaining grade go first
    plain.sort_by_key(|a| (a.grade > 0 && !a.odd && !a.param, a.var));
    Ok((plain, antifields))
}

fn monomials_of_grade(atoms: &[Atom], target: i64, max_param_degree: u32) -> Vec<Vec<(Var, u32)>> {
    fn go(atoms: &[Atom], remaining: i64, params_left: u32, acc: &mut Vec<(Var, u32)>, out: &mut Vec<Vec<(Var, u32)>>) {
        let Some((a, rest)) = atoms.split_first() else {
            if remaining == 0 {
                out.push(acc.clone());
            }
            return;
        };
        let prunable = a.grade > 0 && !a.odd && !a.param;
        if prunable && remaining < 0 {
            return;
        }
        let max_e = if a.odd {
            1
        } else if a.param {
            params_left
        } else if a.grade > 0 {
            (remaining / a.grade).max(0) as u32
        } else {
            0
        };
        for e in 0..=max_e {
            if e > 0 {
                acc.push((a.var, e));
            }
            let left = if a.param { params_left - e } else { params_left };
            go(rest, remaining - a.grade * e as i64, left, acc, out);
            if e > 0 {
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(atoms, target, max_param_degree, &mut Vec::new(), &mut out);
    out
}

fn build_monomial(parts: &[(Var, u32)], extra: Option<Var>) -> Monomial {
    let factors = parts.iter().flat_map(|(v, e)| std::iter::repeat_n(*v, *e as usize)).chain(extra);
    Monomial::from_factors(factors).expect("distinct odd factors").1
}

fn enumerate<C: Coeff>(
    sys: &EvolutionSystem<C>,
    cov: Option<&Covering<C>>,
    table: &GradingTable,
    shape: Shape,
    grades: &[i64],
    bounds: Bounds,
) -> Result<Ansatz, SolverError> {
    if grades.len() != sys.len() {
        return Err(SolverError::GradeCount { expected: sys.len(), found: grades.len() });
    }
    let top = grades.iter().copied().max().unwrap_or(0);
    let (plain, antifields) = atoms(sys, cov, table, bounds.jet_for(top))?;
    let order = print_order(Some(table));
    let mut columns = Vec::new();
    for (j, (&g, d)) in grades.iter().zip(sys.dependents()).enumerate() {
        let mut ms: Vec<Monomial> = Vec::new();
        if shape == Shape::Shadow {
            for a in &antifields {
                for parts in monomials_of_grade(&plain, g - a.grade, bounds.max_param_degree) {
                    ms.push(build_monomial(&parts, Some(a.var)));
                }
            }
        } else {
            for parts in monomials_of_grade(&plain, g, bounds.max_param_degree) {
                ms.push(build_monomial(&parts, None));
            }
        }
        let parity = if shape == Shape::Shadow { d.parity.flip() } else { d.parity };
        ms.retain(|m| m.parity() == parity);
        ms.sort_by(|a, b| order(a, b));
        ms.dedup();
        columns.extend(ms.into_iter().map(|m| (j, m)));
    }
    Ok(Ansatz { shape, grades: grades.to_vec(), columns })
}

/// Enumerates the template of the given shape and component grades. The
/// shadow shape draws its odd factor from the fibers and the odd nonlocal
/// variables of `cov`; the other shapes use only the base system.
pub fn enumerate_ansatz<C: Coeff>(
    cov: &Covering<C>,
    shape: Shape,
    grades: &[i64],
    bounds: Bounds,
) -> Result<Ansatz, SolverError> {
    let table = cov.grading().ok_or(SolverError::Ungraded)?;
    let fibers = (shape == Shape::Shadow).then_some(cov);
    let ansatz = enumerate(cov.base(), fibers, table, shape, grades, bounds)?;
    if ansatz.is_empty() {
        return Err(SolverError::EmptyTemplate);
    }
    Ok(ansatz)
}

fn system_ansatz<C: Coeff>(
    sys: &EvolutionSystem<C>,
    shape: Shape,
    grades: &[i64],
    bounds: Bounds,
) -> Result<Ansatz, SolverError> {
    let table = sys.grading().ok_or(SolverError::Ungraded)?;
    enumerate(sys, None, table, shape, grades, bounds)
}

/// Image of column `(j, m)` under the defining operator, one polynomial per
/// equation component.
fn column_image<C: Coeff, J: JetSpace<C>>(
    lin: &MatrixOperator<C>,
    dt_sign: &C,
    j: usize,
    m: &Monomial,
    jet: &J,
) -> Result<Vec<Poly<C>>, SolverError> {
    let f = Poly::term(C::one(), m.clone());
    let mut out = Vec::with_capacity(lin.rows());
    for a in 0..lin.rows() {
        let mut img = -lin.entry(a, j).apply_local(&f, jet)?;
        if a == j {
            img += &jet.total_dt(&f).scale(dt_sign);
        }
        out.push(img);
    }
    Ok(out)
}

fn assemble<C: Coeff>(ncols: usize, images: Vec<Vec<Poly<C>>>) -> Determining<C> {
    let mut rows: BTreeMap<(usize, Monomial), BTreeMap<usize, C>> = BTreeMap::new();
    for (col, image) in images.into_iter().enumerate() {
        for (a, p) in image.into_iter().enumerate() {
            for (m, c) in p.into_terms() {
                rows.entry((a, m)).or_default().insert(col, c);
            }
        }
    }
    let mut system = LinearSystem::new(ncols);
    let mut row_keys = Vec::with_capacity(rows.len());
    for (key, row) in rows {
        row_keys.push(key);
        system.push_row(row);
    }
    Determining { system, row_keys }
}

fn collect_with<C: Coeff, J: JetSpace<C>>(
    ansatz: &Ansatz,
    lin: &MatrixOperator<C>,
    dt_sign: C,
    jet: &J,
) -> Result<Determining<C>, SolverError> {
    let images = ansatz
        .columns
        .par_iter()
        .map(|(j, m)| column_image(lin, &dt_sign, *j, m, jet))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble(ansatz.len(), images))
}

/// Linear operator `L` of the defining equation `s D_t(phi) - L(phi) = 0`,
/// and the sign `s`.
fn defining<C: Coeff>(sys: &EvolutionSystem<C>, shape: Shape) -> Result<(MatrixOperator<C>, C), SolverError> {
    let lf = linearize(sys.rhs(), &sys.dependent_vars(), sys);
    Ok(match shape {
        Shape::Shadow | Shape::Symmetry => (lf, C::one()),
        // -D_t - l_f^*
        Shape::Cosymmetry => (lf.adjoint(sys)?, -C::one()),
    })
}

/// Expands the defining equation of the ansatz shape: the lifted
/// linearization on `cov` for shadows, the linearization or its adjoint
/// on the base system otherwise.
pub fn collect<C: Coeff>(cov: &Covering<C>, ansatz: &Ansatz) -> Result<Determining<C>, SolverError> {
    let (lin, s) = defining(cov.base(), ansatz.shape)?;
    match ansatz.shape {
        Shape::Shadow => {
            if !cov.is_evolutionary() {
                return Err(SolverError::NotEvolutionary);
            }
            collect_with(ansatz, &lin, s, cov)
        }
        _ => collect_with(ansatz, &lin, s, cov.base()),
    }
}

pub fn nullspace<C: Coeff>(d: &Determining<C>) -> Vec<Vec<C>> {
    d.system.nullspace()
}

/// Column index of `param * column` if it lies in the template.
fn shifted(ansatz: &Ansatz, index: &BTreeMap<(usize, Monomial), usize>, col: usize, param: Var) -> Option<usize> {
    let (j, m) = &ansatz.columns[col];
    let (_, pm) = m.mul(&Monomial::var(param))?;
    index.get(&(*j, pm)).copied()
}

/// Canonical basis of the solution space modulo parameter multiples of
/// solutions: every remaining vector has a leading one and zeros in the
/// leading columns of the others.
fn reduce<C: Coeff>(ansatz: &Ansatz, params: &[Var], basis: Vec<Vec<C>>) -> Vec<Vec<C>> {
    let n = ansatz.len();
    let index: BTreeMap<(usize, Monomial), usize> =
        ansatz.columns.iter().cloned().enumerate().map(|(k, c)| (c, k)).collect();
    let mut multiples = LinearSystem::new(n);
    for v in &basis {
        for &p in params {
            let mut row = BTreeMap::new();
            let mut inside = true;
            for (col, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                match shifted(ansatz, &index, col, p) {
                    Some(t) => {
                        row.insert(t, c.clone());
                    }
                    None => {
                        inside = false;
                        break;
                    }
                }
            }
            if inside {
                multiples.push_row(row);
            }
        }
    }
    let m = multiples.rref();
    let mut quotient = LinearSystem::new(n);
    for v in basis {
        let mut v: BTreeMap<usize, C> = v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        for (row, &p) in m.rows.iter().zip(&m.pivots) {
            if let Some(f) = v.get(&p).cloned() {
                for (k, a) in row {
                    let x = v.get(k).cloned().unwrap_or_else(C::zero) - f.clone() * a.clone();
                    if x.is_zero() {
                        v.remove(k);
                    } else {
                        v.insert(*k, x);
                    }
                }
            }
        }
        quotient.push_row(v);
    }
    quotient
        .rref()
        .rows
        .into_iter()
        .map(|r| {
            let mut dense = vec![C::zero(); n];
            for (k, c) in r {
                dense[k] = c;
            }
            dense
        })
        .collect()
}

fn solve_grade<C: Coeff, J: JetSpace<C>>(
    sys: &EvolutionSystem<C>,
    ansatz: &Ansatz,
    lin: &MatrixOperator<C>,
    s: &C,
    jet: &J,
    g: i64,
) -> Result<Vec<Solution<C>>, SolverError> {
    if ansatz.is_empty() {
        return Ok(Vec::new());
    }
    let d = collect_with(ansatz, lin, s.clone(), jet)?;
    let params: Vec<Var> = sys.parameters().iter().map(|(p, _)| Var::parameter(p.as_str())).collect();
    let basis = reduce(ansatz, &params, nullspace(&d));
    Ok(basis.iter().map(|v| Solution { grade: g, components: ansatz.instantiate(v), self_adjoint: None }).collect())
}

fn run<C: Coeff, J: JetSpace<C>>(
    sys: &EvolutionSystem<C>,
    jet: &J,
    shape: Shape,
    grades: impl IntoIterator<Item = i64>,
    make: impl Fn(&[i64]) -> Result<Ansatz, SolverError> + Sync,
) -> Result<Vec<Solution<C>>, SolverError> {
    let (lin, s) = defining(sys, shape)?;
    let grades: Vec<i64> = grades.into_iter().collect();
    let slices = grades
        .par_iter()
        .map(|&g| {
            let ansatz = make(&component_grades(sys, shape, g)?)?;
            solve_grade(sys, &ansatz, &lin, &s, jet, g)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(slices.into_iter().flatten().collect())
}

/// Shadows on `cov` for every grade in `grades` (grade of the first
/// component), in increasing grade.
pub fn solve_shadows<C: Coeff>(
    cov: &Covering<C>,
    grades: impl IntoIterator<Item = i64>,
    bounds: Bounds,
) -> Result<Vec<Solution<C>>, SolverError> {
    let table = cov.grading().ok_or(SolverError::Ungraded)?;
    if !cov.is_evolutionary() {
        return Err(SolverError::NotEvolutionary);
    }
    run(cov.base(), cov, Shape::Shadow, grades, |gs| enumerate(cov.base(), Some(cov), table, Shape::Shadow, gs, bounds))
}

/// Generating functions of symmetries, graded by the first component.
pub fn solve_symmetries<C: Coeff>(
    sys: &EvolutionSystem<C>,
    grades: impl IntoIterator<Item = i64>,
    bounds: Bounds,
) -> Result<Vec<Solution<C>>, SolverError> {
    run(sys, sys, Shape::Symmetry, grades, |gs| system_ansatz(sys, Shape::Symmetry, gs, bounds))
}

/// Cosymmetries graded by the grade of the density they would come from,
/// each tagged with whether its linearization is self-adjoint.
pub fn solve_cosymmetries<C: Coeff>(
    sys: &EvolutionSystem<C>,
    grades: impl IntoIterator<Item = i64>,
    bounds: Bounds,
) -> Result<Vec<Solution<C>>, SolverError> {
    let mut out = run(sys, sys, Shape::Cosymmetry, grades, |gs| system_ansatz(sys, Shape::Cosymmetry, gs, bounds))?;
    for s in &mut out {
        s.self_adjoint = Some(is_self_adjoint(&s.components, sys)?);
    }
    Ok(out)
}

/// Whether `l_psi` equals its adjoint.
pub fn is_self_adjoint<C: Coeff>(psi: &[Poly<C>], sys: &EvolutionSystem<C>) -> Result<bool, SolverError> {
    let lin = linearize(psi, &sys.dependent_vars(), sys);
    Ok(lin.adjoint(sys)?.sub(&lin)?.is_zero())
}

/// Substitutes a vector into the defining equation of `shape`; zero for a
/// genuine solution.
pub fn residual<C: Coeff>(cov: &Covering<C>, shape: Shape, phi: &[Poly<C>]) -> Result<Vec<Poly<C>>, SolverError> {
    let (lin, s) = defining(cov.base(), shape)?;
    let (img, dt): (_, Vec<Poly<C>>) = match shape {
        Shape::Shadow => (lin.apply_local(phi, cov)?, phi.iter().map(|f| cov.total_dt(f)).collect()),
        _ => (lin.apply_local(phi, cov.base())?, phi.iter().map(|f| cov.base().total_dt(f)).collect()),
    };
    Ok(img.iter().zip(&dt).map(|(l, d)| &d.scale(&s) - l).collect())
}
