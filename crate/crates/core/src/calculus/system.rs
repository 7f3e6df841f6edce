use std::collections::HashMap;
use std::sync::RwLock;

use super::JetSpace;
use crate::algebra::{grade_of, parse_expr, Grade, GradingTable, Parity, Poly, Symbol, Var, VarContext, VarKind};
use crate::error::SystemError;
use crate::scalar::Coeff;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dependent {
    pub name: Symbol,
    pub parity: Parity,
    pub grade: Option<i64>,
}

impl Dependent {
    pub fn new(name: &str, parity: Parity, grade: Option<i64>) -> Self {
        Dependent { name: Symbol::new(name), parity, grade }
    }

    pub fn var(&self, order: u32) -> Var {
        Var::jet(self.name.as_str(), order, self.parity)
    }
}

/// An evolution system `u^j_t = f^j(x-jets of u)` with optional scaling
/// weights.
#[derive(Debug)]
pub struct EvolutionSystem<C> {
    name: String,
    dependents: Vec<Dependent>,
    rhs: Vec<Poly<C>>,
    parameters: Vec<(Symbol, Option<i64>)>,
    t_weight: Option<i64>,
    ctx: VarContext,
    grading: Option<GradingTable>,
    dt_cache: RwLock<HashMap<Var, Poly<C>>>,
}

impl<C: Coeff> Clone for EvolutionSystem<C> {
    fn clone(&self) -> Self {
        EvolutionSystem {
            name: self.name.clone(),
            dependents: self.dependents.clone(),
            rhs: self.rhs.clone(),
            parameters: self.parameters.clone(),
            t_weight: self.t_weight,
            ctx: self.ctx.clone(),
            grading: self.grading.clone(),
            dt_cache: RwLock::new(self.dt_cache.read().expect("cache poisoned").clone()),
        }
    }
}

fn context_of(dependents: &[Dependent], parameters: &[(Symbol, Option<i64>)]) -> VarContext {
    let mut ctx = VarContext::new();
    for d in dependents {
        ctx.add(d.name.as_str(), VarKind::Jet, d.parity);
    }
    for (p, _) in parameters {
        ctx.add_parameter(p.as_str());
    }
    ctx
}

impl<C: Coeff> EvolutionSystem<C> {
    /// Validates and builds a system. A grading exists when `t_weight` is
    /// given and every dependent has a grade; ungraded parameters then get
    /// grade 0.
    pub fn new(
        name: &str,
        dependents: Vec<Dependent>,
        parameters: Vec<(Symbol, Option<i64>)>,
        t_weight: Option<i64>,
        rhs: Vec<Poly<C>>,
    ) -> Result<Self, SystemError> {
        if rhs.len() != dependents.len() {
            return Err(SystemError::Count { expected: dependents.len(), found: rhs.len() });
        }
        for (i, d) in dependents.iter().enumerate() {
            let clash =
                dependents[..i].iter().any(|e| e.name == d.name) || parameters.iter().any(|(p, _)| *p == d.name);
            if clash {
                return Err(SystemError::Duplicate(d.name.to_string()));
            }
        }
        let ctx = context_of(&dependents, &parameters);
        let grading = match t_weight {
            Some(tw) if dependents.iter().all(|d| d.grade.is_some()) => {
                let mut g = GradingTable::new(tw);
                for d in &dependents {
                    g.set(d.name.as_str(), d.grade.unwrap());
                }
                for (p, gp) in &parameters {
                    g.set(p.as_str(), gp.unwrap_or(0));
                }
                Some(g)
            }
            _ => None,
        };
        for (d, f) in dependents.iter().zip(&rhs) {
            for v in f.variables() {
                let known = ctx.lookup(v.name.as_str()).is_some_and(|(k, p)| k == v.kind && p == v.parity);
                if !known {
                    return Err(SystemError::Undeclared { dependent: d.name.to_string(), var: v.to_string() });
                }
            }
            match f.parity() {
                Some(p) if p == d.parity || f.is_zero() => {}
                found => {
                    return Err(SystemError::Parity {
                        dependent: d.name.to_string(),
                        expected: d.parity.to_string(),
                        found: found.map_or("mixed".to_string(), |p| p.to_string()),
                    })
                }
            }
            if let Some(g) = &grading {
                let expected = d.grade.unwrap() - g.t_weight;
                match grade_of(f, g).expect("all variables graded") {
                    Grade::Zero => {}
                    Grade::Inhomogeneous => return Err(SystemError::Inhomogeneous { dependent: d.name.to_string() }),
                    Grade::Homogeneous(found) if found != expected => {
                        return Err(SystemError::Grade { dependent: d.name.to_string(), expected, found })
                    }
                    Grade::Homogeneous(_) => {}
                }
            }
        }
        Ok(EvolutionSystem {
            name: name.to_string(),
            dependents,
            rhs,
            parameters,
            t_weight,
            ctx,
            grading,
            dt_cache: RwLock::new(HashMap::new()),
        })
    }

    /// Builds a system from textual right-hand sides:
    /// `(name, parity, grade, rhs)` per dependent and `(name, grade)` per
    /// parameter.
    pub fn parse(
        name: &str,
        dependents: &[(&str, Parity, Option<i64>, &str)],
        parameters: &[(&str, Option<i64>)],
        t_weight: Option<i64>,
    ) -> Result<Self, SystemError> {
        let deps: Vec<Dependent> = dependents.iter().map(|(n, p, g, _)| Dependent::new(n, *p, *g)).collect();
        let params: Vec<(Symbol, Option<i64>)> = parameters.iter().map(|(n, g)| (Symbol::new(n), *g)).collect();
        let ctx = context_of(&deps, &params);
        let rhs = dependents
            .iter()
            .map(|(n, _, _, text)| {
                parse_expr(text, &ctx).map_err(|source| SystemError::Parse { dependent: n.to_string(), source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        EvolutionSystem::new(name, deps, params, t_weight, rhs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dependents(&self) -> &[Dependent] {
        &self.dependents
    }

    pub fn rhs(&self) -> &[Poly<C>] {
        &self.rhs
    }

    pub fn parameters(&self) -> &[(Symbol, Option<i64>)] {
        &self.parameters
    }

    pub fn t_weight(&self) -> Option<i64> {
        self.t_weight
    }

    /// Order-0 coordinates of the dependent variables.
    pub fn dependent_vars(&self) -> Vec<Var> {
        self.dependents.iter().map(|d| d.var(0)).collect()
    }

    pub fn dependent_index(&self, name: Symbol) -> Option<usize> {
        self.dependents.iter().position(|d| d.name == name)
    }

    pub fn len(&self) -> usize {
        self.dependents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dependents.is_empty()
    }

    pub fn parse_poly(&self, text: &str) -> Result<Poly<C>, crate::error::AlgebraError> {
        parse_expr(text, &self.ctx)
    }
}

impl<C: Coeff> JetSpace<C> for EvolutionSystem<C> {
    fn context(&self) -> &VarContext {
        &self.ctx
    }

    fn grading(&self) -> Option<&GradingTable> {
        self.grading.as_ref()
    }

    fn nonlocal_fluxes(&self, _: Symbol) -> Option<(&Poly<C>, &Poly<C>)> {
        None
    }

    fn dt_jet(&self, v: &Var) -> Option<Poly<C>> {
        let j = self.dependent_index(v.name)?;
        if let Some(p) = self.dt_cache.read().expect("cache poisoned").get(v) {
            return Some(p.clone());
        }
        // walk down to the highest cached order, then differentiate upwards
        let mut k = v.order;
        let mut img = loop {
            let w = v.with_order(k);
            if let Some(p) = self.dt_cache.read().expect("cache poisoned").get(&w) {
                break p.clone();
            }
            if k == 0 {
                break self.rhs[j].clone();
            }
            k -= 1;
        };
        let mut cache = self.dt_cache.write().expect("cache poisoned");
        cache.insert(v.with_order(k), img.clone());
        while k < v.order {
            img = self.total_dx(&img);
            k += 1;
            cache.insert(v.with_order(k), img.clone());
        }
        Some(img)
    }
}
