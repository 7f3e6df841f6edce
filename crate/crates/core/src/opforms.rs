//! Matrix operators from shadows and back, their application with
//! `D_x^{-1}` tails, and the operator-level Hamiltonian tests.

use crate::algebra::{parse_expr, Monomial, Parity, Poly, Var, VarContext, VarKind};
use crate::calculus::{euler, is_exact, linearize, DiffOp, EvolutionSystem, Exactness, JetSpace, MatrixOperator};
use crate::covering::{Covering, Nonlocal};
use crate::error::OperatorError;
use crate::linalg::LinearSystem;
use crate::scalar::Coeff;
use crate::schouten::{check_shadow_shape, Shadow};
use crate::solver::{residual, Shape};

fn left_multiply<C: Coeff>(op: &DiffOp<C>, c: &Poly<C>) -> DiffOp<C> {
    let mut out = DiffOp::zero();
    for (k, a) in op.local_terms() {
        out.add_local(k, &(c * a));
    }
    for t in op.tails() {
        out.add_tail(c * &t.left, t.right.clone());
    }
    out
}

/// `D_x^{-1} o a D_x^k` as a local part plus a single tail, by repeated
/// integration by parts.
fn integrate_by_parts<C: Coeff, J: JetSpace<C> + ?Sized>(a: &Poly<C>, k: u32, jet: &J) -> DiffOp<C> {
    let mut out = DiffOp::zero();
    let mut cur = a.clone();
    let mut sign = C::one();
    for kk in (0..k).rev() {
        out.add_local(kk, &cur.scale(&sign));
        cur = jet.total_dx(&cur);
        sign = -sign;
    }
    out.add_tail(Poly::one(), cur.scale(&sign));
    out
}

/// The operator row of an odd nonlocal variable whose x-flux is linear in
/// the antifields: `phi -> D_x^{-1}(sum a^j_k D_x^k phi^j)`.
fn nonlocal_row<C: Coeff>(r: &Nonlocal<C>, cov: &Covering<C>) -> Result<Vec<DiffOp<C>>, OperatorError> {
    let mut row = vec![DiffOp::zero(); cov.base().len()];
    for v in r.x_flux.variables() {
        let Some(j) = (v.kind == VarKind::Jet).then(|| cov.fiber_index(v.name)).flatten() else {
            continue;
        };
        let a = r.x_flux.pderiv(&v);
        if a.parity() != Some(Parity::Even) {
            return Err(OperatorError::NonlinearAntifield(j));
        }
        row[j] = row[j].add(&integrate_by_parts(&a, v.order, cov));
    }
    Ok(row)
}

fn check_len<T>(v: &[T], n: usize) -> Result<(), OperatorError> {
    if v.len() != n {
        return Err(OperatorError::ComponentMismatch { expected: n, found: v.len() });
    }
    Ok(())
}

/// Reads off the operator of a shadow: `c p^j_k` in component `i` gives
/// `c D_x^k` in entry `(i, j)`, and `c r` gives `c` times the operator
/// row of `r`.
pub fn shadow_to_matrix<C: Coeff>(s: &Shadow<C>, cov: &Covering<C>) -> Result<MatrixOperator<C>, OperatorError> {
    let n = cov.base().len();
    check_len(&s.components, n)?;
    check_shadow_shape(s, cov).map_err(|_| {
        let bad = s.components.iter().position(|f| f.parity() != Some(Parity::Odd)).unwrap_or(0);
        OperatorError::NonlinearAntifield(bad)
    })?;
    let mut out = MatrixOperator::zero(n, n);
    for (i, f) in s.components.iter().enumerate() {
        for v in f.variables() {
            let is_fiber = v.kind == VarKind::Jet && cov.fiber_index(v.name).is_some();
            let is_odd_nonlocal = v.kind == VarKind::Nonlocal && v.is_odd();
            if !is_fiber && !is_odd_nonlocal {
                continue;
            }
            let c = f.pderiv(&v);
            if c.parity() != Some(Parity::Even) {
                return Err(OperatorError::OddCoefficient(i));
            }
            if is_fiber {
                let j = cov.fiber_index(v.name).expect("fiber");
                let mut e = out.entry(i, j).clone();
                e.add_local(v.order, &c);
                *out.entry_mut(i, j) = e;
            } else {
                let r = cov.nonlocal(v.name.as_str()).expect("declared nonlocal");
                for (j, op) in nonlocal_row(r, cov)?.iter().enumerate() {
                    let e = out.entry(i, j).add(&left_multiply(op, &c));
                    *out.entry_mut(i, j) = e;
                }
            }
        }
    }
    Ok(out)
}

/// Inverse of [`shadow_to_matrix`]. Tails are matched against linear
/// combinations of the operator rows of the declared odd nonlocals.
pub fn matrix_to_shadow<C: Coeff>(a: &MatrixOperator<C>, cov: &Covering<C>) -> Result<Shadow<C>, OperatorError> {
    let n = cov.base().len();
    if a.rows() != n || a.cols() != n {
        return Err(OperatorError::ComponentMismatch { expected: n, found: a.rows().max(a.cols()) });
    }
    let candidates: Vec<(Var, Vec<DiffOp<C>>)> = cov
        .nonlocals()
        .iter()
        .filter(|r| r.parity.is_odd())
        .map(|r| Ok((r.var(), nonlocal_row(r, cov)?)))
        .collect::<Result<_, OperatorError>>()?;
    let fibers = cov.fibers();
    let mut components = Vec::with_capacity(n);
    for i in 0..n {
        let mut row: Vec<DiffOp<C>> = (0..n).map(|j| a.entry(i, j).clone()).collect();
        let mut f = Poly::zero();
        while let Some(left) = row.iter().flat_map(|e| e.tails()).map(|t| t.left.clone()).next() {
            let lambdas = match_tails(&row, &left, &candidates).ok_or(OperatorError::UnmatchedTail { row: i })?;
            for ((r, ops), lambda) in candidates.iter().zip(lambdas) {
                if lambda.is_zero() {
                    continue;
                }
                let c = left.scale(&lambda);
                f += &(&c * &Poly::var(*r));
                for (j, op) in ops.iter().enumerate() {
                    row[j] = row[j].sub(&left_multiply(op, &c));
                }
            }
        }
        for (j, e) in row.iter().enumerate() {
            if !e.dt.is_zero() {
                return Err(OperatorError::Parse { text: e.display(None), reason: "D_t in an operator".into() });
            }
            for (k, c) in e.local_terms() {
                f += &(c * &Poly::var(fibers[j].var(k)));
            }
        }
        components.push(f);
    }
    Ok(Shadow::new(components))
}

/// Coefficients `lambda_r` with `sum_j right_j = sum_r lambda_r b^r_j` for
/// the tails with left factor `left`.
fn match_tails<C: Coeff>(row: &[DiffOp<C>], left: &Poly<C>, candidates: &[(Var, Vec<DiffOp<C>>)]) -> Option<Vec<C>> {
    let right_of = |op: &DiffOp<C>, l: &Poly<C>| {
        op.tails().iter().filter(|t| t.left == *l).map(|t| t.right.clone()).sum::<Poly<C>>()
    };
    let one = Poly::one();
    let mut keys: Vec<(usize, Monomial)> = Vec::new();
    let mut key = |j: usize, m: &Monomial| match keys.iter().position(|k| k.0 == j && k.1 == *m) {
        Some(p) => p,
        None => {
            keys.push((j, m.clone()));
            keys.len() - 1
        }
    };
    let mut entries: Vec<(usize, usize, C)> = Vec::new();
    let mut rhs_entries: Vec<(usize, C)> = Vec::new();
    for (j, op) in row.iter().enumerate() {
        for (m, c) in right_of(op, left).terms() {
            rhs_entries.push((key(j, m), c.clone()));
        }
        for (col, (_, ops)) in candidates.iter().enumerate() {
            for (m, c) in right_of(&ops[j], &one).terms() {
                entries.push((key(j, m), col, c.clone()));
            }
        }
    }
    let mut ls = LinearSystem::new(candidates.len());
    let mut rows = vec![std::collections::BTreeMap::new(); keys.len()];
    for (r, col, c) in entries {
        rows[r].insert(col, c);
    }
    let mut rhs = vec![C::zero(); keys.len()];
    for (r, c) in rhs_entries {
        rhs[r] = rhs[r].clone() + c;
    }
    // keep row and right-hand side aligned even for empty rows
    let mut kept_rhs = Vec::new();
    for (r, b) in rows.into_iter().zip(rhs) {
        if r.is_empty() {
            if !b.is_zero() {
                return None;
            }
            continue;
        }
        ls.rows.push(r);
        kept_rhs.push(b);
    }
    let lambdas = ls.solve(&kept_rhs)?;
    lambdas.iter().any(|l| !l.is_zero()).then_some(lambdas)
}

/// `A(psi)`. Tails sharing a left factor are applied together: the density
/// `sum_j right_j psi^j` must be a total derivative, and its antiderivative
/// is multiplied by the left factor.
pub fn apply<C: Coeff, J: JetSpace<C> + ?Sized>(
    a: &MatrixOperator<C>,
    psi: &[Poly<C>],
    jet: &J,
) -> Result<Vec<Poly<C>>, OperatorError> {
    check_len(psi, a.cols())?;
    let mut out = a.local_part().apply_local(psi, jet)?;
    for (i, slot) in out.iter_mut().enumerate() {
        let mut lefts: Vec<Poly<C>> = Vec::new();
        for j in 0..a.cols() {
            for t in a.entry(i, j).tails() {
                if !lefts.contains(&t.left) {
                    lefts.push(t.left.clone());
                }
            }
        }
        for left in lefts {
            let mut density = Poly::zero();
            for (j, p) in psi.iter().enumerate() {
                for t in a.entry(i, j).tails().iter().filter(|t| t.left == left) {
                    density += &(&t.right * p);
                }
            }
            match is_exact(&density, jet) {
                Exactness::Exact(w) => *slot += &(&left * &w),
                _ => return Err(OperatorError::NonlocalObstruction { density: density.to_string() }),
            }
        }
    }
    Ok(out)
}

/// Outcome of [`verify_eq5`].
#[derive(Clone, Debug)]
pub enum Eq5Check<C> {
    /// `A_t - l_f o A - A o l_f^*` for a local operator.
    Operator(MatrixOperator<C>),
    /// The lifted shadow equation evaluated on the shadow of a tailed
    /// operator.
    Shadow(Vec<Poly<C>>),
}

impl<C: Coeff> Eq5Check<C> {
    pub fn passed(&self) -> bool {
        match self {
            Eq5Check::Operator(m) => m.is_zero(),
            Eq5Check::Shadow(r) => r.iter().all(|p| p.is_zero()),
        }
    }
}

fn time_derivative<C: Coeff>(a: &MatrixOperator<C>, sys: &EvolutionSystem<C>) -> MatrixOperator<C> {
    let mut out = MatrixOperator::zero(a.rows(), a.cols());
    for (i, j, e) in a.entries() {
        let mut d = DiffOp::zero();
        for (k, c) in e.local_terms() {
            d.add_local(k, &sys.total_dt(c));
        }
        *out.entry_mut(i, j) = d;
    }
    out
}

/// `l_E o A + A o l_E^* = 0` with `D_t` eliminated on the equation, which
/// reads `A_t = l_f o A + A o l_f^*`. Operators with tails are checked
/// through their shadow on `cov` instead.
pub fn verify_eq5<C: Coeff>(a: &MatrixOperator<C>, cov: &Covering<C>) -> Result<Eq5Check<C>, OperatorError> {
    let sys = cov.base();
    let n = sys.len();
    if a.rows() != n || a.cols() != n {
        return Err(OperatorError::ComponentMismatch { expected: n, found: a.rows().max(a.cols()) });
    }
    if !a.is_local() {
        let s = matrix_to_shadow(a, cov)?;
        return Ok(Eq5Check::Shadow(residual(cov, Shape::Shadow, &s.components)?));
    }
    let lf = linearize(sys.rhs(), &sys.dependent_vars(), sys);
    let lfa = lf.adjoint(sys)?;
    let res = time_derivative(a, sys).sub(&lf.compose(a, sys)?)?.sub(&a.compose(&lfa, sys)?)?;
    Ok(Eq5Check::Operator(res))
}

/// `A(E(X)) - f`; zero iff `X` is a Hamiltonian of the system for `A`.
pub fn hamiltonian_representation<C: Coeff, J: JetSpace<C> + ?Sized>(
    a: &MatrixOperator<C>,
    x: &Poly<C>,
    sys: &EvolutionSystem<C>,
    jet: &J,
) -> Result<Vec<Poly<C>>, OperatorError> {
    let grad = euler(x, &sys.dependent_vars(), jet);
    let image = apply(a, &grad, jet)?;
    Ok(image.iter().zip(sys.rhs()).map(|(l, f)| l - f).collect())
}

/// The flux `T` with `D_t(X) = D_x(T)`, or the obstruction.
pub fn conservation_flux<C: Coeff>(x: &Poly<C>, sys: &EvolutionSystem<C>) -> Exactness<C> {
    is_exact(&sys.total_dt(x), sys)
}

/// Whether `l_psi` is self-adjoint, the criterion for `psi` to be a
/// variational derivative.
pub fn selfadjointness<C: Coeff>(psi: &[Poly<C>], sys: &EvolutionSystem<C>) -> Result<bool, OperatorError> {
    Ok(crate::solver::is_self_adjoint(psi, sys)?)
}

fn parse_error(text: &str, reason: impl Into<String>) -> OperatorError {
    OperatorError::Parse { text: text.to_string(), reason: reason.into() }
}

/// Replaces every `Dxinv(b*_)` with a marker name; returns the rewritten
/// text and the right factors `b`.
fn extract_tails<C: Coeff>(text: &str, ctx: &VarContext) -> Result<(String, Vec<Poly<C>>), OperatorError> {
    let mut out = String::new();
    let mut rights = Vec::new();
    let mut rest = text;
    while let Some(at) = rest.find("Dxinv(") {
        out.push_str(&rest[..at]);
        let body = &rest[at + "Dxinv(".len()..];
        let mut depth = 1;
        let end = body
            .char_indices()
            .find(|&(_, c)| {
                match c {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    _ => {}
                }
                depth == 0
            })
            .map(|(i, _)| i)
            .ok_or_else(|| parse_error(text, "unbalanced Dxinv("))?;
        let inner = replace_placeholder(&body[..end]);
        if inner == body[..end] {
            return Err(parse_error(text, "Dxinv argument lacks the `_` placeholder"));
        }
        rights.push(parse_expr::<C>(&inner, ctx)?);
        out.push_str(&format!(" __tail{} ", rights.len() - 1));
        rest = &body[end + 1..];
    }
    out.push_str(rest);
    Ok((out, rights))
}

fn replace_placeholder(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let ident = |c: char| c.is_alphanumeric() || c == '_';
    let mut out = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let alone = c == '_' && (i == 0 || !ident(chars[i - 1])) && chars.get(i + 1).is_none_or(|&n| !ident(n));
        if alone {
            out.push('1');
        } else {
            out.push(c);
        }
    }
    out
}

/// Parses a scalar operator in the printed form: `a*Dx^k` terms with the
/// coefficient to the left, `c*Dt`, and tails `a*Dxinv(b*_)`.
pub fn parse_operator<C: Coeff>(text: &str, ctx: &VarContext) -> Result<DiffOp<C>, OperatorError> {
    for reserved in ["Dx", "Dt"] {
        if ctx.contains(reserved) {
            return Err(parse_error(text, format!("`{reserved}` is declared as a variable")));
        }
    }
    let (rewritten, rights) = extract_tails::<C>(text, ctx)?;
    let mut ext = ctx.clone();
    ext.add_parameter("Dx");
    ext.add_parameter("Dt");
    let markers: Vec<Var> = (0..rights.len())
        .map(|i| {
            let name = format!("__tail{i}");
            ext.add_parameter(&name);
            Var::parameter(&name)
        })
        .collect();
    let dx = Var::parameter("Dx");
    let dt = Var::parameter("Dt");
    let poly: Poly<C> = parse_expr(&rewritten, &ext)?;
    let mut op = DiffOp::<C>::zero();
    for (m, c) in poly.terms() {
        let k = m.exponent(&dx);
        let t = m.exponent(&dt);
        let tails: Vec<usize> = (0..markers.len()).filter(|&i| m.exponent(&markers[i]) > 0).collect();
        let factors = m.factors().filter(|v| *v != dx && *v != dt && !markers.contains(v));
        let (flip, rest) = Monomial::from_factors(factors).expect("subset of a monomial");
        let c = if flip { -c.clone() } else { c.clone() };
        let coeff = Poly::term(c.clone(), rest.clone());
        if t > 0 {
            if t > 1 || k > 0 || !tails.is_empty() || !rest.is_one() {
                return Err(parse_error(text, "Dt must appear alone with a constant coefficient"));
            }
            op.dt = op.dt.clone() + c;
        } else if let [i] = tails[..] {
            if k > 0 || m.exponent(&markers[i]) > 1 {
                return Err(parse_error(text, "a tail cannot be followed by Dx"));
            }
            op.add_tail(coeff, rights[i].clone());
        } else if tails.is_empty() {
            op.add_local(k, &coeff);
        } else {
            return Err(parse_error(text, "product of two tails"));
        }
    }
    Ok(op)
}

fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Parses `[a, b; c, d]`, or a bare entry for a 1x1 operator.
pub fn parse_matrix<C: Coeff>(text: &str, ctx: &VarContext) -> Result<MatrixOperator<C>, OperatorError> {
    let t = text.trim();
    let Some(body) = t.strip_prefix('[').and_then(|b| b.strip_suffix(']')) else {
        return Ok(MatrixOperator::scalar(parse_operator(t, ctx)?));
    };
    let rows = split_top(body, ';')
        .into_iter()
        .map(|r| split_top(r, ',').into_iter().map(|e| parse_operator(e, ctx)).collect())
        .collect::<Result<Vec<Vec<DiffOp<C>>>, _>>()?;
    Ok(MatrixOperator::from_rows(rows)?)
}
