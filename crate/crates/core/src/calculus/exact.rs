use std::collections::{BTreeMap, BTreeSet};

use super::variational::{euler, jet_families};
use super::JetSpace;
use crate::algebra::{Monomial, Poly, Var, VarKind};
use crate::linalg::LinearSystem;
use crate::scalar::Coeff;

/// Why a density is not a total derivative.
#[derive(Clone, Debug, PartialEq)]
pub enum Obstruction<C> {
    /// A nonzero constant term.
    ConstantTerm(C),
    /// The nonzero variational derivatives, by family.
    Variational(Vec<(Var, Poly<C>)>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Exactness<C> {
    /// `D_x` of the contained element equals the input.
    Exact(Poly<C>),
    Obstructed(Obstruction<C>),
    /// Nonlocal input for which no antiderivative was found. Nothing is
    /// certified.
    HeuristicFailed(Poly<C>),
}

impl<C> Exactness<C> {
    pub fn is_exact(&self) -> bool {
        matches!(self, Exactness::Exact(_))
    }

    pub fn witness(&self) -> Option<&Poly<C>> {
        match self {
            Exactness::Exact(h) => Some(h),
            _ => None,
        }
    }
}

/// Decides whether `h` is a total `x`-derivative and returns an
/// antiderivative when it is.
///
/// For local `h` the answer is certified: `h` is exact iff all variational
/// derivatives and the constant term vanish, and the antiderivative is then
/// found by solving a linear system over the monomials that `D_x` can map
/// onto the terms of `h`. With nonlocal variables the same linear system is
/// extended by candidates carrying nonlocal factors; failure is then only
/// heuristic.
pub fn is_exact<C: Coeff, J: JetSpace<C> + ?Sized>(h: &Poly<C>, jet: &J) -> Exactness<C> {
    if h.is_zero() {
        return Exactness::Exact(Poly::zero());
    }
    let nonlocal = h.contains_kind(VarKind::Nonlocal);
    if !nonlocal {
        let families = jet_families([h]);
        let obstruction: Vec<(Var, Poly<C>)> =
            families.iter().zip(euler(h, &families, jet)).filter(|(_, e)| !e.is_zero()).map(|(v, e)| (*v, e)).collect();
        if !obstruction.is_empty() {
            return Exactness::Obstructed(Obstruction::Variational(obstruction));
        }
        let c = h.constant_term();
        if !c.is_zero() {
            return Exactness::Obstructed(Obstruction::ConstantTerm(c));
        }
    }
    match antiderivative(h, jet) {
        Some(w) => Exactness::Exact(w),
        None => Exactness::HeuristicFailed(h.clone()),
    }
}

pub fn equiv_mod_exact<C: Coeff, J: JetSpace<C> + ?Sized>(a: &Poly<C>, b: &Poly<C>, jet: &J) -> bool {
    is_exact(&(a - b), jet).is_exact()
}

/// Nonlocal factors, parameter factors and per-family jet counts of a
/// monomial, together with the sum of jet orders.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Signature {
    nonlocal: Monomial,
    params: Monomial,
    families: Vec<(Var, u32)>,
    order_sum: u32,
}

fn signature(m: &Monomial) -> Signature {
    let mut nl = Vec::new();
    let mut params = Vec::new();
    let mut families: BTreeMap<Var, u32> = BTreeMap::new();
    let mut order_sum = 0;
    for v in m.factors() {
        match v.kind {
            VarKind::Nonlocal => nl.push(v),
            VarKind::Parameter => params.push(v),
            VarKind::Jet => {
                *families.entry(v.with_order(0)).or_default() += 1;
                order_sum += v.order;
            }
        }
    }
    let mono = |vs: Vec<Var>| Monomial::from_factors(vs).map(|(_, m)| m).unwrap_or_default();
    Signature { nonlocal: mono(nl), params: mono(params), families: families.into_iter().collect(), order_sum }
}

/// Sequences of `count` orders `>= min`, nondecreasing (strictly increasing
/// if `strict`), summing to `total`.
fn order_sequences(count: u32, total: u32, min: u32, strict: bool) -> Vec<Vec<u32>> {
    if count == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut first = min;
    while first * count <= total {
        let next_min = if strict { first + 1 } else { first };
        for mut rest in order_sequences(count - 1, total - first, next_min, strict) {
            rest.insert(0, first);
            out.push(rest);
        }
        first += 1;
    }
    out
}

/// All monomials with the given family counts whose jet orders add up to
/// `total`.
pub(crate) fn monomials_with_order_sum(families: &[(Var, u32)], total: u32) -> Vec<Monomial> {
    fn go(families: &[(Var, u32)], total: u32, acc: &mut Vec<Var>, out: &mut Vec<Monomial>) {
        let Some(((z, count), rest)) = families.split_first() else {
            if total == 0 {
                if let Some((_, m)) = Monomial::from_factors(acc.iter().copied()) {
                    out.push(m);
                }
            }
            return;
        };
        let budget = if rest.is_empty() { total..=total } else { 0..=total };
        for t in budget {
            for seq in order_sequences(*count, t, 0, z.is_odd()) {
                let n = acc.len();
                acc.extend(seq.iter().map(|&k| z.with_order(k)));
                go(rest, total - t, acc, out);
                acc.truncate(n);
            }
        }
    }
    let mut out = Vec::new();
    go(families, total, &mut Vec::new(), &mut out);
    out
}

fn antiderivative<C: Coeff, J: JetSpace<C> + ?Sized>(h: &Poly<C>, jet: &J) -> Option<Poly<C>> {
    // candidates are generated per signature; their images may expose new
    // signatures (through nonlocal fluxes), which are processed in turn
    let mut done: BTreeSet<Signature> = BTreeSet::new();
    let mut pending: Vec<Monomial> = h.terms().map(|(m, _)| m.clone()).collect();
    let mut candidates: Vec<(Poly<C>, Poly<C>)> = Vec::new();
    while let Some(m) = pending.pop() {
        let sig = signature(&m);
        if sig.families.is_empty() || sig.order_sum == 0 || !done.insert(sig.clone()) {
            continue;
        }
        let prefix = Poly::term(C::one(), sig.nonlocal.clone()).mul_term(&C::one(), &sig.params);
        for l in monomials_with_order_sum(&sig.families, sig.order_sum - 1) {
            let cand = prefix.mul_term(&C::one(), &l);
            if cand.is_zero() {
                continue;
            }
            let image = jet.total_dx(&cand);
            pending.extend(image.terms().map(|(n, _)| n.clone()));
            candidates.push((cand, image));
        }
    }
    let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
    for (m, _) in h.terms() {
        let n = rows.len();
        rows.entry(m.clone()).or_insert(n);
    }
    for (_, img) in &candidates {
        for (m, _) in img.terms() {
            let n = rows.len();
            rows.entry(m.clone()).or_insert(n);
        }
    }
    let mut dense: Vec<BTreeMap<usize, C>> = vec![BTreeMap::new(); rows.len()];
    for (j, (_, img)) in candidates.iter().enumerate() {
        for (m, c) in img.terms() {
            dense[rows[m]].insert(j, c.clone());
        }
    }
    let mut ls = LinearSystem::new(candidates.len());
    let mut rhs = Vec::new();
    for (m, r) in &rows {
        ls.rows.push(std::mem::take(&mut dense[*r]));
        rhs.push(h.coeff(m));
    }
    let x = ls.solve(&rhs)?;
    let w: Poly<C> = candidates.iter().zip(&x).map(|((cand, _), c)| cand.scale(c)).sum();
    debug_assert_eq!(&jet.total_dx(&w), h);
    Some(w)
}
