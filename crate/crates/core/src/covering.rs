//! Coverings: fiber variables with extended total derivatives.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::algebra::{grade_of, Grade, GradingTable, Parity, Poly, Symbol, Var, VarContext, VarKind};
use crate::calculus::{sys_linearization, EvolutionSystem, JetSpace, MatrixOperator};
use crate::error::CoveringError;
use crate::scalar::Coeff;

/// A jet fiber variable `w` with coordinates `w[k]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fiber {
    pub name: Symbol,
    pub parity: Parity,
    pub grade: Option<i64>,
}

impl Fiber {
    pub fn var(&self, order: u32) -> Var {
        Var::jet(self.name.as_str(), order, self.parity)
    }
}

/// A nonlocal variable defined by `r_x = x_flux`, `r_t = t_flux`.
#[derive(Clone, Debug, PartialEq)]
pub struct Nonlocal<C> {
    pub name: Symbol,
    pub parity: Parity,
    pub grade: Option<i64>,
    pub x_flux: Poly<C>,
    pub t_flux: Poly<C>,
}

impl<C: Coeff> Nonlocal<C> {
    pub fn var(&self) -> Var {
        Var::nonlocal(self.name.as_str(), self.parity)
    }
}

#[derive(Debug)]
pub struct Covering<C> {
    base: EvolutionSystem<C>,
    fibers: Vec<Fiber>,
    t_rules: Option<Vec<Poly<C>>>,
    relations: Vec<Poly<C>>,
    nonlocals: Vec<Nonlocal<C>>,
    ctx: VarContext,
    grading: Option<GradingTable>,
    dt_cache: RwLock<HashMap<Var, Poly<C>>>,
}

impl<C: Coeff> Clone for Covering<C> {
    fn clone(&self) -> Self {
        Covering {
            base: self.base.clone(),
            fibers: self.fibers.clone(),
            t_rules: self.t_rules.clone(),
            relations: self.relations.clone(),
            nonlocals: self.nonlocals.clone(),
            ctx: self.ctx.clone(),
            grading: self.grading.clone(),
            dt_cache: RwLock::new(self.dt_cache.read().expect("cache poisoned").clone()),
        }
    }
}

/// Antifield names: `p`, `q`, then `p2`, `p3`, ...
pub fn default_antifield_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|j| match j {
            0 => "p".to_string(),
            1 => "q".to_string(),
            j => format!("p{j}"),
        })
        .collect()
}

/// The ℓ*-covering with antifields named `p`, `q`, ...
pub fn build_lstar<C: Coeff>(sys: &EvolutionSystem<C>) -> Result<Covering<C>, CoveringError> {
    build_lstar_named(sys, &default_antifield_names(sys.len()))
}

/// The ℓ*-covering: one antifield of opposite parity per dependent
/// variable, with dynamics read off from `l_E^*(p) = 0`, that is
/// `p_t = -l_f^*(p)`.
pub fn build_lstar_named<C: Coeff>(sys: &EvolutionSystem<C>, names: &[String]) -> Result<Covering<C>, CoveringError> {
    let delta = sys_linearization(sys).adjoint(sys)?;
    let parities: Vec<Parity> = sys.dependents().iter().map(|d| d.parity.flip()).collect();
    build_delta_covering_with(&delta, sys, names, &parities)
}

/// The Δ-covering given by `sum_j Δ_ij(w^j) = 0`, with odd fibers.
pub fn build_delta_covering<C: Coeff>(
    delta: &MatrixOperator<C>,
    sys: &EvolutionSystem<C>,
    names: &[String],
) -> Result<Covering<C>, CoveringError> {
    build_delta_covering_with(delta, sys, names, &vec![Parity::Odd; delta.cols()])
}

/// Like [`build_delta_covering`] with explicit fiber parities.
///
/// When every row of `Δ` has its `D_t` term on the diagonal the relations
/// are solved for `w_t` and the covering is evolutionary. Otherwise the
/// relations are recorded for downstream use and `D_t` of fiber variables
/// is left undefined.
pub fn build_delta_covering_with<C: Coeff>(
    delta: &MatrixOperator<C>,
    sys: &EvolutionSystem<C>,
    names: &[String],
    parities: &[Parity],
) -> Result<Covering<C>, CoveringError> {
    let m = delta.cols();
    if names.len() != m || parities.len() != m {
        return Err(crate::error::CalculusError::ComponentMismatch { expected: m, found: names.len() }.into());
    }
    let mut ctx = sys.context().clone();
    for (n, p) in names.iter().zip(parities) {
        if ctx.contains(n) || names.iter().filter(|o| *o == n).count() > 1 {
            return Err(CoveringError::NameCollision(n.clone()));
        }
        ctx.add(n, VarKind::Jet, *p);
    }
    let fiber_vars: Vec<Poly<C>> = names.iter().zip(parities).map(|(n, p)| Poly::var(Var::jet(n, 0, *p))).collect();
    let local = delta.local_part();
    let mut images = Vec::with_capacity(delta.rows());
    for i in 0..delta.rows() {
        let mut acc = Poly::zero();
        for (j, w) in fiber_vars.iter().enumerate() {
            let e = local.entry(i, j);
            let mut no_dt = e.clone();
            no_dt.dt = C::zero();
            acc += &no_dt.apply_local(w, sys)?;
        }
        images.push(acc);
    }
    let evolutionary = delta.rows() == m && (0..m).all(|i| (0..m).all(|j| (i == j) != delta.entry(i, j).dt.is_zero()));
    let any_dt = delta.entries().any(|(_, _, e)| !e.dt.is_zero());
    let (t_rules, relations) = if evolutionary {
        let rules = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| img.scale(&(-C::one() / delta.entry(i, i).dt.clone())))
            .collect();
        (Some(rules), Vec::new())
    } else if any_dt {
        return Err(CoveringError::IrregularTimeDerivative);
    } else {
        (None, images)
    };
    let mut cov = Covering {
        base: sys.clone(),
        fibers: names
            .iter()
            .zip(parities)
            .map(|(n, p)| Fiber { name: Symbol::new(n), parity: *p, grade: None })
            .collect(),
        t_rules,
        relations,
        nonlocals: Vec::new(),
        ctx,
        grading: None,
        dt_cache: RwLock::new(HashMap::new()),
    };
    cov.assign_fiber_grades()?;
    Ok(cov)
}

impl<C: Coeff> Covering<C> {
    /// Fiber grades from homogeneity of the t-rules, with the first fiber
    /// at grade 0.
    fn assign_fiber_grades(&mut self) -> Result<(), CoveringError> {
        let (Some(base), Some(rules)) = (self.base.grading(), &self.t_rules) else {
            return Ok(());
        };
        let tw = base.t_weight;
        let n = self.fibers.len();
        let mut grades: Vec<Option<i64>> = vec![None; n];
        if n > 0 {
            grades[0] = Some(0);
        }
        // grade(a) + |w^j| + k = |w^i| - t_weight for each term a*w^j[k] of rule i
        let mut edges = Vec::new();
        for (i, rule) in rules.iter().enumerate() {
            for (mono, _) in rule.terms() {
                let mut rest = 0;
                let mut target = None;
                for v in mono.factors() {
                    match self.fibers.iter().position(|f| f.name == v.name) {
                        Some(j) if target.is_none() => target = Some((j, v.order as i64)),
                        Some(_) => return Err(CoveringError::Grading("rule is not linear in the fibers".into())),
                        None => rest += base.var_grade(&v).ok_or_else(|| CoveringError::Grading(v.to_string()))?,
                    }
                }
                if let Some((j, k)) = target {
                    // |w^j| - |w^i| = -t_weight - rest - k
                    edges.push((i, j, -tw - rest - k));
                }
            }
        }
        loop {
            let mut changed = false;
            for &(i, j, d) in &edges {
                match (grades[i], grades[j]) {
                    (Some(gi), None) => {
                        grades[j] = Some(gi + d);
                        changed = true;
                    }
                    (None, Some(gj)) => {
                        grades[i] = Some(gj - d);
                        changed = true;
                    }
                    (Some(gi), Some(gj)) if gj - gi != d => {
                        return Err(CoveringError::Grading(format!(
                            "{} and {} cannot both be homogeneous",
                            self.fibers[i].name, self.fibers[j].name
                        )))
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        let mut table = base.clone();
        for (f, g) in self.fibers.iter_mut().zip(grades) {
            let g = g.unwrap_or(0);
            f.grade = Some(g);
            table.set(f.name.as_str(), g);
        }
        self.grading = Some(table);
        Ok(())
    }

    pub fn base(&self) -> &EvolutionSystem<C> {
        &self.base
    }

    pub fn fibers(&self) -> &[Fiber] {
        &self.fibers
    }

    /// Order-0 coordinates of the fiber variables.
    pub fn fiber_vars(&self) -> Vec<Var> {
        self.fibers.iter().map(|f| f.var(0)).collect()
    }

    pub fn fiber_index(&self, name: Symbol) -> Option<usize> {
        self.fibers.iter().position(|f| f.name == name)
    }

    pub fn t_rules(&self) -> Option<&[Poly<C>]> {
        self.t_rules.as_deref()
    }

    /// Defining relations of a non-evolutionary Δ-covering.
    pub fn relations(&self) -> &[Poly<C>] {
        &self.relations
    }

    pub fn is_evolutionary(&self) -> bool {
        self.t_rules.is_some()
    }

    pub fn nonlocals(&self) -> &[Nonlocal<C>] {
        &self.nonlocals
    }

    pub fn nonlocal(&self, name: &str) -> Option<&Nonlocal<C>> {
        self.nonlocals.iter().find(|r| r.name.as_str() == name)
    }

    /// Adds a nonlocal variable. The grade defaults to the one making the
    /// x-flux homogeneous. Compatibility of the fluxes is not checked here;
    /// see [`Covering::check_flux`].
    pub fn add_nonlocal(
        &self,
        name: &str,
        parity: Parity,
        grade: Option<i64>,
        x_flux: Poly<C>,
        t_flux: Poly<C>,
    ) -> Result<Covering<C>, CoveringError> {
        if self.ctx.contains(name) {
            return Err(CoveringError::NameCollision(name.to_string()));
        }
        for flux in [&x_flux, &t_flux] {
            for v in flux.variables() {
                let known = self.ctx.lookup(v.name.as_str()).is_some_and(|(k, p)| k == v.kind && p == v.parity);
                if !known {
                    return Err(CoveringError::UndeclaredVariable { name: name.to_string(), var: v.to_string() });
                }
            }
            if !flux.is_zero() && flux.parity() != Some(parity) {
                return Err(CoveringError::FluxParity { name: name.to_string() });
            }
        }
        let mut grading = self.grading.clone();
        let mut grade = grade;
        if let Some(table) = &mut grading {
            let homogeneous = |f: &Poly<C>| match grade_of(f, table) {
                Ok(Grade::Homogeneous(g)) => Some(Some(g)),
                Ok(Grade::Zero) => Some(None),
                _ => None,
            };
            let xg = homogeneous(&x_flux);
            let tg = homogeneous(&t_flux);
            let g = match (grade, xg) {
                (Some(g), _) => g,
                (None, Some(Some(x))) => x + GradingTable::X_WEIGHT,
                (None, _) => {
                    return Err(CoveringError::FluxGrade { name: name.to_string(), expected: 0 });
                }
            };
            let expect_x = g - GradingTable::X_WEIGHT;
            let expect_t = g - table.t_weight;
            if !matches!(xg, Some(None)) && xg != Some(Some(expect_x)) {
                return Err(CoveringError::FluxGrade { name: name.to_string(), expected: expect_x });
            }
            if !matches!(tg, Some(None)) && tg != Some(Some(expect_t)) {
                return Err(CoveringError::FluxGrade { name: name.to_string(), expected: expect_t });
            }
            table.set(name, g);
            grade = Some(g);
        }
        let mut out = self.clone();
        out.ctx.add(name, VarKind::Nonlocal, parity);
        out.grading = grading;
        out.nonlocals.push(Nonlocal { name: Symbol::new(name), parity, grade, x_flux, t_flux });
        Ok(out)
    }

    /// `D_t(x_flux) - D_x(t_flux)`; zero iff the fluxes are compatible.
    pub fn check_flux(&self, name: &str) -> Result<Poly<C>, CoveringError> {
        let r = self.nonlocal(name).ok_or_else(|| CoveringError::NotNonlocal(name.to_string()))?;
        Ok(&self.total_dt(&r.x_flux) - &self.total_dx(&r.t_flux))
    }

    /// Parses an expression over the variables of the covering.
    pub fn parse_poly(&self, text: &str) -> Result<Poly<C>, crate::error::AlgebraError> {
        crate::algebra::parse_expr(text, &self.ctx)
    }
}

impl<C: Coeff> JetSpace<C> for Covering<C> {
    fn context(&self) -> &VarContext {
        &self.ctx
    }

    fn grading(&self) -> Option<&GradingTable> {
        self.grading.as_ref()
    }

    fn nonlocal_fluxes(&self, name: Symbol) -> Option<(&Poly<C>, &Poly<C>)> {
        self.nonlocals.iter().find(|r| r.name == name).map(|r| (&r.x_flux, &r.t_flux))
    }

    fn dt_jet(&self, v: &Var) -> Option<Poly<C>> {
        let Some(i) = self.fiber_index(v.name) else {
            return self.base.dt_jet(v);
        };
        let rule = &self.t_rules.as_ref()?[i];
        if let Some(p) = self.dt_cache.read().expect("cache poisoned").get(v) {
            return Some(p.clone());
        }
        let mut k = v.order;
        let mut img = loop {
            if let Some(p) = self.dt_cache.read().expect("cache poisoned").get(&v.with_order(k)) {
                break p.clone();
            }
            if k == 0 {
                break rule.clone();
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
