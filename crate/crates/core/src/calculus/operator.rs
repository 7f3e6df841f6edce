use std::collections::BTreeMap;
use std::fmt;

use super::JetSpace;
use crate::algebra::print::sorted_terms;
use crate::algebra::{print_canonical, print_factor, GradingTable, Monomial, Parity, Poly};
use crate::error::CalculusError;
use crate::scalar::{binomial, Coeff};

/// `left * Dx^{-1} o right`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tail<C> {
    pub left: Poly<C>,
    pub right: Poly<C>,
}

/// A scalar total-derivative operator `dt*D_t + sum_k a_k D_x^k` plus
/// nonlocal tails. Coefficients stand to the left of the derivatives.
///
/// The `D_t` part is a formal marker used to display linearizations of
/// evolution systems; composition refuses it.
///
/// Equality compares tails as elements of the tensor product, so
/// `a*Dxinv(b*_) + a*Dxinv(c*_)` equals `a*Dxinv((b + c)*_)` whichever
/// factor the terms share.
#[derive(Clone, Debug)]
pub struct DiffOp<C> {
    pub dt: C,
    local: BTreeMap<u32, Poly<C>>,
    tails: Vec<Tail<C>>,
}

impl<C: Coeff> PartialEq for DiffOp<C> {
    fn eq(&self, other: &Self) -> bool {
        self.dt == other.dt && self.local == other.local && self.tail_tensor() == other.tail_tensor()
    }
}

impl<C: Coeff> Default for DiffOp<C> {
    fn default() -> Self {
        DiffOp::zero()
    }
}

impl<C: Coeff> DiffOp<C> {
    pub fn zero() -> Self {
        DiffOp { dt: C::zero(), local: BTreeMap::new(), tails: Vec::new() }
    }

    /// Multiplication by `a`.
    pub fn mult(a: Poly<C>) -> Self {
        DiffOp::term(a, 0)
    }

    pub fn identity() -> Self {
        DiffOp::mult(Poly::one())
    }

    /// `a * Dx^k`.
    pub fn term(a: Poly<C>, k: u32) -> Self {
        let mut op = DiffOp::zero();
        op.add_local(k, &a);
        op
    }

    pub fn dx(k: u32) -> Self {
        DiffOp::term(Poly::one(), k)
    }

    pub fn time(c: C) -> Self {
        DiffOp { dt: c, ..DiffOp::zero() }
    }

    pub fn add_local(&mut self, k: u32, a: &Poly<C>) {
        let slot = self.local.entry(k).or_default();
        *slot += a;
        if slot.is_zero() {
            self.local.remove(&k);
        }
    }

    pub fn add_tail(&mut self, left: Poly<C>, right: Poly<C>) {
        self.tails.push(Tail { left, right });
        self.normalize_tails();
    }

    /// Coefficient of `Dx^k`.
    pub fn coeff(&self, k: u32) -> Poly<C> {
        self.local.get(&k).cloned().unwrap_or_default()
    }

    /// `(k, a_k)` in ascending `k`.
    pub fn local_terms(&self) -> impl Iterator<Item = (u32, &Poly<C>)> {
        self.local.iter().map(|(k, a)| (*k, a))
    }

    pub fn tails(&self) -> &[Tail<C>] {
        &self.tails
    }

    pub fn local_part(&self) -> DiffOp<C> {
        DiffOp { dt: self.dt.clone(), local: self.local.clone(), tails: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.dt.is_zero() && self.local.is_empty() && self.is_local()
    }

    pub fn is_local(&self) -> bool {
        self.tails.is_empty() || self.tail_tensor().is_empty()
    }

    /// Highest power of `Dx` in the local part.
    pub fn order(&self) -> Option<u32> {
        self.local.keys().next_back().copied()
    }

    /// Parity of all coefficients, `None` if they disagree.
    pub fn coefficient_parity(&self) -> Option<Parity> {
        let mut all =
            self.local.values().chain(self.tails.iter().flat_map(|t| [&t.left, &t.right])).map(|a| a.parity());
        let first = all.next().unwrap_or(Some(Parity::Even))?;
        all.all(|p| p == Some(first)).then_some(first)
    }

    fn tail_tensor(&self) -> BTreeMap<(Monomial, Monomial), C> {
        let mut out: BTreeMap<(Monomial, Monomial), C> = BTreeMap::new();
        for t in &self.tails {
            for (ml, cl) in t.left.terms() {
                for (mr, cr) in t.right.terms() {
                    let e = out.entry((ml.clone(), mr.clone())).or_insert_with(C::zero);
                    *e = e.clone() + cl.clone() * cr.clone();
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Tails with primitive left factors, merged by left factor and sorted
    /// by their printed form.
    fn normalize_tails(&mut self) {
        let mut merged: Vec<Tail<C>> = Vec::new();
        for t in std::mem::take(&mut self.tails) {
            if t.left.is_zero() || t.right.is_zero() {
                continue;
            }
            let (left, right) = primitive_split(&t.left, &t.right);
            match merged.iter_mut().find(|m| m.left == left) {
                Some(m) => m.right += &right,
                None => merged.push(Tail { left, right }),
            }
        }
        merged.retain(|t| !t.right.is_zero());
        merged.sort_by_cached_key(|t| (print_canonical(&t.left, None), print_canonical(&t.right, None)));
        self.tails = merged;
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = DiffOp::zero();
        out.dt = self.dt.clone() * c.clone();
        for (k, a) in &self.local {
            out.add_local(*k, &a.scale(c));
        }
        out.tails = self.tails.iter().map(|t| Tail { left: t.left.scale(c), right: t.right.clone() }).collect();
        out.normalize_tails();
        out
    }

    pub fn add(&self, other: &DiffOp<C>) -> Self {
        let mut out = self.clone();
        out.dt = out.dt + other.dt.clone();
        for (k, a) in &other.local {
            out.add_local(*k, a);
        }
        out.tails.extend(other.tails.iter().cloned());
        out.normalize_tails();
        out
    }

    pub fn sub(&self, other: &DiffOp<C>) -> Self {
        self.add(&other.scale(&-C::one()))
    }

    /// Applies the local part (including the `D_t` marker) to `f`.
    pub fn apply_local<J: JetSpace<C> + ?Sized>(&self, f: &Poly<C>, jet: &J) -> Result<Poly<C>, CalculusError> {
        if !self.is_local() {
            return Err(CalculusError::NonlocalTail);
        }
        let mut out = Poly::zero();
        if !self.dt.is_zero() {
            out += &jet.total_dt(f).scale(&self.dt);
        }
        let mut g = f.clone();
        let mut at = 0;
        for (k, a) in &self.local {
            while at < *k {
                g = jet.total_dx(&g);
                at += 1;
            }
            out += &(a * &g);
        }
        Ok(out)
    }

    /// `self o other` for local operators without `D_t`.
    pub fn compose<J: JetSpace<C> + ?Sized>(&self, other: &DiffOp<C>, jet: &J) -> Result<Self, CalculusError> {
        if !self.is_local() || !other.is_local() {
            return Err(CalculusError::NonlocalTail);
        }
        if !self.dt.is_zero() || !other.dt.is_zero() {
            return Err(CalculusError::TimeDerivative);
        }
        let mut out = DiffOp::zero();
        for (n, b) in &other.local {
            // D^i(b) for i up to the order of self
            let mut derivs = vec![b.clone()];
            for (m, a) in &self.local {
                while derivs.len() <= *m as usize {
                    let next = jet.total_dx(derivs.last().unwrap());
                    derivs.push(next);
                }
                // a D^m o b = sum_i C(m,i) a D^{m-i}(b) D^{i}
                for i in 0..=*m {
                    let c: C = binomial(*m, i);
                    out.add_local(i + n, &(a * &derivs[(m - i) as usize]).scale(&c));
                }
            }
        }
        Ok(out)
    }

    /// Formal adjoint of a scalar operator with even coefficients:
    /// `(sum a_k D^k)* = sum (-D)^k o a_k`, and `D_t* = -D_t`.
    pub fn adjoint<J: JetSpace<C> + ?Sized>(&self, jet: &J) -> Result<Self, CalculusError> {
        if !self.is_local() {
            return Err(CalculusError::NonlocalTail);
        }
        let mut out = DiffOp::time(-self.dt.clone());
        for (k, a) in &self.local {
            let mut derivs = vec![a.clone()];
            for _ in 0..*k {
                let next = jet.total_dx(derivs.last().unwrap());
                derivs.push(next);
            }
            let s: C = crate::scalar::sign(k % 2 == 1);
            for i in 0..=*k {
                let c: C = binomial(*k, i);
                out.add_local(i, &derivs[(k - i) as usize].scale(&(c * s.clone())));
            }
        }
        Ok(out)
    }

    pub fn display(&self, grading: Option<&GradingTable>) -> String {
        let mut pieces: Vec<String> = Vec::new();
        if !self.dt.is_zero() {
            pieces.push(with_coeff_scalar(&self.dt, "Dt"));
        }
        for (k, a) in self.local.iter().rev() {
            let dx = match k {
                0 => None,
                1 => Some("Dx".to_string()),
                k => Some(format!("Dx^{k}")),
            };
            pieces.push(match dx {
                None => print_canonical(a, grading),
                Some(dx) => with_coeff(a, &dx, grading),
            });
        }
        for t in &self.tails {
            // scalars are shown on the left factor
            let (right, left) = primitive_split(&t.right, &t.left);
            let inner =
                if right == Poly::one() { "_".to_string() } else { format!("{}*_", print_factor(&right, grading)) };
            pieces.push(with_coeff(&left, &format!("Dxinv({inner})"), grading));
        }
        join_signed(&pieces)
    }
}

fn with_coeff_scalar<C: Coeff>(c: &C, what: &str) -> String {
    if c.is_one() {
        what.to_string()
    } else if (-c.clone()).is_one() {
        format!("-{what}")
    } else {
        format!("{c}*{what}")
    }
}

fn with_coeff<C: Coeff>(a: &Poly<C>, what: &str, grading: Option<&GradingTable>) -> String {
    if a.len() > 1 {
        // pull the sign of the leading term out of the parentheses
        let text = print_canonical(a, grading);
        return match text.strip_prefix('-') {
            Some(_) => format!("-({})*{what}", print_canonical(&a.scale(&-C::one()), grading)),
            None => format!("({text})*{what}"),
        };
    }
    match print_canonical(a, grading).as_str() {
        "1" => what.to_string(),
        "-1" => format!("-{what}"),
        s => format!("{s}*{what}"),
    }
}

fn join_signed(pieces: &[String]) -> String {
    if pieces.is_empty() {
        return "0".to_string();
    }
    let mut out = pieces[0].clone();
    for p in &pieces[1..] {
        match p.strip_prefix('-') {
            Some(rest) => {
                out.push_str(" - ");
                out.push_str(rest);
            }
            None => {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
    }
    out
}

/// Rescales `left` to integer-primitive form (leading term in print order
/// positive) and moves the factor into `right`.
fn primitive_split<C: Coeff>(left: &Poly<C>, right: &Poly<C>) -> (Poly<C>, Poly<C>) {
    let terms = sorted_terms(left, None);
    let mut coeffs: Vec<C> = terms.iter().map(|(_, c)| (*c).clone()).collect();
    let lead = coeffs[0].clone();
    C::make_primitive(&mut coeffs);
    let factor = coeffs[0].clone() / lead;
    (left.scale(&factor), right.scale(&(C::one() / factor)))
}

impl<C: Coeff> fmt::Display for DiffOp<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display(None))
    }
}

/// A matrix of [`DiffOp`] entries, stored row-major.
#[derive(Clone, Debug)]
pub struct MatrixOperator<C> {
    rows: usize,
    cols: usize,
    entries: Vec<DiffOp<C>>,
}

impl<C: Coeff> PartialEq for MatrixOperator<C> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }
}

impl<C: Coeff> MatrixOperator<C> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        MatrixOperator { rows, cols, entries: vec![DiffOp::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatrixOperator::zero(n, n);
        for i in 0..n {
            *m.entry_mut(i, i) = DiffOp::identity();
        }
        m
    }

    pub fn scalar(op: DiffOp<C>) -> Self {
        MatrixOperator { rows: 1, cols: 1, entries: vec![op] }
    }

    pub fn from_rows(rows: Vec<Vec<DiffOp<C>>>) -> Result<Self, CalculusError> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(CalculusError::Shape("ragged rows".into()));
        }
        Ok(MatrixOperator { rows: n, cols: m, entries: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &DiffOp<C> {
        &self.entries[i * self.cols + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut DiffOp<C> {
        &mut self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &DiffOp<C>)> {
        self.entries.iter().enumerate().map(|(n, e)| (n / self.cols, n % self.cols, e))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_local(&self) -> bool {
        self.entries.iter().all(|e| e.is_local())
    }

    pub fn local_part(&self) -> Self {
        MatrixOperator {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.local_part()).collect(),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), CalculusError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(CalculusError::Shape(format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, CalculusError> {
        self.check_same_shape(other)?;
        Ok(MatrixOperator {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CalculusError> {
        self.add(&other.scale(&-C::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        MatrixOperator { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|e| e.scale(c)).collect() }
    }

    /// Applies a local operator to a column vector.
    pub fn apply_local<J: JetSpace<C> + ?Sized>(
        &self,
        psi: &[Poly<C>],
        jet: &J,
    ) -> Result<Vec<Poly<C>>, CalculusError> {
        if psi.len() != self.cols {
            return Err(CalculusError::ComponentMismatch { expected: self.cols, found: psi.len() });
        }
        (0..self.rows)
            .map(|i| {
                let mut acc = Poly::zero();
                for (j, p) in psi.iter().enumerate() {
                    acc += &self.entry(i, j).apply_local(p, jet)?;
                }
                Ok(acc)
            })
            .collect()
    }

    pub fn compose<J: JetSpace<C> + ?Sized>(&self, other: &Self, jet: &J) -> Result<Self, CalculusError> {
        if self.cols != other.rows {
            return Err(CalculusError::Shape(format!("{}x{} o {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = MatrixOperator::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..other.cols {
                let mut acc = DiffOp::zero();
                for j in 0..self.cols {
                    acc = acc.add(&self.entry(i, j).compose(other.entry(j, k), jet)?);
                }
                *out.entry_mut(i, k) = acc;
            }
        }
        Ok(out)
    }

    /// Formal adjoint: entrywise adjoint and transposition. Coefficients
    /// must be even, so that the supertransposition carries no signs.
    pub fn adjoint<J: JetSpace<C> + ?Sized>(&self, jet: &J) -> Result<Self, CalculusError> {
        let mut out = MatrixOperator::zero(self.cols, self.rows);
        for (i, j, e) in self.entries() {
            if e.coefficient_parity() != Some(Parity::Even) {
                return Err(CalculusError::OddCoefficient(i, j));
            }
            *out.entry_mut(j, i) = e.adjoint(jet)?;
        }
        Ok(out)
    }

    pub fn display(&self, grading: Option<&GradingTable>) -> String {
        if self.rows == 1 && self.cols == 1 {
            return self.entries[0].display(grading);
        }
        let rows: Vec<String> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.entry(i, j).display(grading)).collect::<Vec<_>>().join(", "))
            .collect();
        format!("[{}]", rows.join("; "))
    }
}

impl<C: Coeff> fmt::Display for MatrixOperator<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display(None))
    }
}
