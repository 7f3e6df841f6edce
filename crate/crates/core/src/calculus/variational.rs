use std::collections::BTreeMap;

use super::{DiffOp, EvolutionSystem, JetSpace, MatrixOperator};
use crate::algebra::{Poly, Symbol, Var, VarKind};
use crate::error::CalculusError;
use crate::scalar::Coeff;

/// The evolutionary derivation `sum_{j,k} D_x^k(phi^j) d/du^j_k` applied
/// to `f`. `families` lists the order-0 coordinates `u^j`.
pub fn ev_apply<C: Coeff, J: JetSpace<C> + ?Sized>(
    phi: &[Poly<C>],
    f: &Poly<C>,
    families: &[Var],
    jet: &J,
) -> Result<Poly<C>, CalculusError> {
    if phi.len() != families.len() {
        return Err(CalculusError::ComponentMismatch { expected: families.len(), found: phi.len() });
    }
    let mut images: BTreeMap<(usize, u32), Poly<C>> = BTreeMap::new();
    Ok(f.derive_with(|v| {
        let j = families.iter().position(|z| z.name == v.name && v.kind == VarKind::Jet)?;
        let mut k = v.order;
        while k > 0 && !images.contains_key(&(j, k)) {
            k -= 1;
        }
        let mut img = images.get(&(j, k)).cloned().unwrap_or_else(|| phi[j].clone());
        while k < v.order {
            img = jet.total_dx(&img);
            k += 1;
            images.insert((j, k), img.clone());
        }
        Some(img)
    }))
}

/// `(i, j)` entry `sum_k dF^i/du^j_k Dx^k`.
pub fn linearize<C: Coeff, J: JetSpace<C> + ?Sized>(f: &[Poly<C>], families: &[Var], _jet: &J) -> MatrixOperator<C> {
    let mut out = MatrixOperator::zero(f.len(), families.len());
    for (i, fi) in f.iter().enumerate() {
        for v in fi.variables() {
            if v.kind != VarKind::Jet {
                continue;
            }
            if let Some(j) = families.iter().position(|z| z.name == v.name) {
                let d = fi.pderiv(&v);
                let mut e = out.entry(i, j).clone();
                e.add_local(v.order, &d);
                *out.entry_mut(i, j) = e;
            }
        }
    }
    out
}

/// `l_E = D_t - l_f` with `D_t` kept as a formal marker.
pub fn sys_linearization<C: Coeff>(sys: &EvolutionSystem<C>) -> MatrixOperator<C> {
    let lf = linearize(sys.rhs(), &sys.dependent_vars(), sys);
    let n = sys.len();
    let mut out = lf.scale(&-C::one());
    for i in 0..n {
        let e = out.entry(i, i).add(&DiffOp::time(C::one()));
        *out.entry_mut(i, i) = e;
    }
    out
}

/// Variational derivatives `sum_k (-D_x)^k dL/dz_k`, one per family, using
/// left partial derivatives for odd families.
pub fn euler<C: Coeff, J: JetSpace<C> + ?Sized>(l: &Poly<C>, families: &[Var], jet: &J) -> Vec<Poly<C>> {
    families
        .iter()
        .map(|z| {
            let Some(top) = l.max_order_of(z.name.as_str()) else {
                return Poly::zero();
            };
            let mut acc = Poly::zero();
            for k in (0..=top).rev() {
                acc = &l.pderiv(&z.with_order(k)) - &jet.total_dx(&acc);
            }
            acc
        })
        .collect()
}

/// `sum_j psi_j phi_j`, factors kept in this order.
pub fn pairing<C: Coeff>(psi: &[Poly<C>], phi: &[Poly<C>]) -> Result<Poly<C>, CalculusError> {
    if psi.len() != phi.len() {
        return Err(CalculusError::ComponentMismatch { expected: psi.len(), found: phi.len() });
    }
    Ok(psi.iter().zip(phi).map(|(a, b)| a * b).sum())
}

/// Order-0 representatives of every jet family occurring in `polys`, in
/// variable order.
pub fn jet_families<'a, C: Coeff + 'a>(polys: impl IntoIterator<Item = &'a Poly<C>>) -> Vec<Var> {
    let mut seen: BTreeMap<Symbol, Var> = BTreeMap::new();
    for p in polys {
        for v in p.variables() {
            if v.kind == VarKind::Jet {
                seen.entry(v.name).or_insert(v.with_order(0));
            }
        }
    }
    seen.into_values().collect()
}
