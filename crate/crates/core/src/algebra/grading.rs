use std::collections::BTreeMap;

use super::monomial::Monomial;
use super::poly::Poly;
use super::var::{Symbol, Var, VarKind};
use crate::error::AlgebraError;
use crate::scalar::Coeff;

/// Scaling weights. A jet variable `name[k]` has grade `base(name) + k`;
/// parameters and nonlocal variables have their base grade. The weight of
/// `x` is fixed at `-1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradingTable {
    base: BTreeMap<Symbol, i64>,
    pub t_weight: i64,
}

/// Result of [`grade_of`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grade {
    /// The zero element, homogeneous of every grade.
    Zero,
    Homogeneous(i64),
    Inhomogeneous,
}

impl GradingTable {
    pub const X_WEIGHT: i64 = -1;

    pub fn new(t_weight: i64) -> Self {
        GradingTable { base: BTreeMap::new(), t_weight }
    }

    pub fn with(mut self, name: &str, grade: i64) -> Self {
        self.set(name, grade);
        self
    }

    pub fn set(&mut self, name: &str, grade: i64) {
        self.base.insert(Symbol::new(name), grade);
    }

    pub fn base(&self, name: &str) -> Option<i64> {
        self.base.get(&Symbol::new(name)).copied()
    }

    pub fn var_grade(&self, v: &Var) -> Option<i64> {
        let b = *self.base.get(&v.name)?;
        Some(match v.kind {
            VarKind::Jet => b + v.order as i64,
            VarKind::Nonlocal | VarKind::Parameter => b,
        })
    }

    pub fn monomial_grade(&self, m: &Monomial) -> Result<i64, AlgebraError> {
        let mut g = 0;
        for (v, e) in m.even_part() {
            g += self.var_grade(v).ok_or(AlgebraError::Ungraded(*v))? * *e as i64;
        }
        for v in m.odd_part() {
            g += self.var_grade(v).ok_or(AlgebraError::Ungraded(*v))?;
        }
        Ok(g)
    }
}

pub fn grade_of<C: Coeff>(f: &Poly<C>, table: &GradingTable) -> Result<Grade, AlgebraError> {
    let mut found = None;
    for (m, _) in f.terms() {
        let g = table.monomial_grade(m)?;
        match found {
            None => found = Some(g),
            Some(h) if h != g => return Ok(Grade::Inhomogeneous),
            _ => {}
        }
    }
    Ok(match found {
        None => Grade::Zero,
        Some(g) => Grade::Homogeneous(g),
    })
}
