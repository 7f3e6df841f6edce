//! The variational Schouten bracket on densities over the ℓ*-covering and
//! the certification tests built on it.
//!
//! Dependent variables `u^j` and their antifields `p^j` are taken from a
//! [`Covering`]: the base dependents and the fibers, paired by position.

use crate::algebra::{Parity, Poly, Var, VarKind};
use crate::calculus::{euler, is_exact, jet_families, FreeJet};
use crate::covering::Covering;
use crate::error::SchoutenError;
use crate::scalar::Coeff;

/// A vector linear in the antifields (and odd nonlocal variables), one
/// component per dependent variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Shadow<C> {
    pub components: Vec<Poly<C>>,
}

impl<C: Coeff> Shadow<C> {
    pub fn new(components: Vec<Poly<C>>) -> Self {
        Shadow { components }
    }
}

/// The density `W = sum_j F^j p^j` of odd degree two.
#[derive(Clone, Debug, PartialEq)]
pub struct Bivector<C> {
    pub density: Poly<C>,
    pub shadow: Option<Shadow<C>>,
}

impl<C: Coeff> Bivector<C> {
    pub fn from_density(density: Poly<C>) -> Self {
        Bivector { density, shadow: None }
    }
}

/// Outcome of a bracket test: the density that must be trivial, and either
/// an antiderivative for it or the nonzero variational derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketCheck<C> {
    pub density: Poly<C>,
    pub obstruction: Vec<(Var, Poly<C>)>,
    pub witness: Option<Poly<C>>,
}

impl<C> BracketCheck<C> {
    pub fn passed(&self) -> bool {
        self.obstruction.is_empty()
    }
}

/// Outcome of the skew-adjointness test.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewCheck<C> {
    /// `sum_j (dW/dp^j) p^j + 2W`.
    pub residual: Poly<C>,
    /// `dW/dp^j + 2F^j` per component, when W carries its shadow F.
    pub shadow_residual: Vec<Poly<C>>,
}

impl<C: Coeff> SkewCheck<C> {
    pub fn passed(&self) -> bool {
        self.residual.is_zero() && self.shadow_residual.iter().all(Poly::is_zero)
    }
}

fn antifield_count<C: Coeff>(m: &crate::algebra::Monomial, cov: &Covering<C>) -> usize {
    m.vars()
        .filter(|v| match v.kind {
            VarKind::Jet => cov.fiber_index(v.name).is_some(),
            VarKind::Nonlocal => v.is_odd(),
            VarKind::Parameter => false,
        })
        .map(|v| m.exponent(&v) as usize)
        .sum()
}

/// Checks that every component has exactly one antifield factor per term.
pub fn check_shadow_shape<C: Coeff>(s: &Shadow<C>, cov: &Covering<C>) -> Result<(), SchoutenError> {
    let n = cov.base().len();
    if s.components.len() != n {
        return Err(SchoutenError::ComponentMismatch { expected: n, found: s.components.len() });
    }
    for (j, f) in s.components.iter().enumerate() {
        if f.terms().any(|(m, _)| antifield_count(m, cov) != 1) {
            return Err(SchoutenError::NonlinearShadow(j));
        }
    }
    Ok(())
}

/// `W = sum_j F^j p^j[0]`.
pub fn shadow_to_bivector<C: Coeff>(s: &Shadow<C>, cov: &Covering<C>) -> Result<Bivector<C>, SchoutenError> {
    check_shadow_shape(s, cov)?;
    let density = s.components.iter().zip(cov.fiber_vars()).map(|(f, p)| f * &Poly::var(p)).sum();
    Ok(Bivector { density, shadow: Some(s.clone()) })
}

fn variational<C: Coeff>(w: &Poly<C>, cov: &Covering<C>) -> (Vec<Poly<C>>, Vec<Poly<C>>) {
    let jet = FreeJet::new();
    (euler(w, &cov.base().dependent_vars(), &jet), euler(w, &cov.fiber_vars(), &jet))
}

fn parity_of<C: Coeff>(f: &Poly<C>) -> Result<Parity, SchoutenError> {
    f.parity().ok_or(SchoutenError::MixedParity)
}

fn reject_nonlocal<C: Coeff>(f: &Poly<C>) -> Result<(), SchoutenError> {
    if f.contains_kind(VarKind::Nonlocal) {
        return Err(SchoutenError::NonlocalNotSupported);
    }
    Ok(())
}

/// `sum_j [dH/du^j dF/dp^j - (-1)^{(|F|+1)(|H|+1)} dF/du^j dH/dp^j]`, a
/// density representative of the bracket.
pub fn schouten_bracket<C: Coeff>(f: &Poly<C>, h: &Poly<C>, cov: &Covering<C>) -> Result<Poly<C>, SchoutenError> {
    let pf = parity_of(f)?;
    let ph = parity_of(h)?;
    let (fu, fp) = variational(f, cov);
    let (hu, hp) = variational(h, cov);
    let minus = !(pf.flip().is_odd() && ph.flip().is_odd());
    let mut out = Poly::zero();
    for j in 0..fu.len() {
        out += &(&hu[j] * &fp[j]);
        let second = &fu[j] * &hp[j];
        if minus {
            out -= &second;
        } else {
            out += &second;
        }
    }
    Ok(out)
}

/// Exact form of `sum_j (dW/dp^j) p^j = -2W`, not reduced modulo total
/// derivatives, since modulo those every bivector satisfies it. When `W`
/// carries its shadow `F`, also `dW/dp^j = -2F^j`, which holds iff the
/// operator with `A(p) = F` is skew-adjoint.
pub fn check_skew<C: Coeff>(w: &Bivector<C>, cov: &Covering<C>) -> Result<SkewCheck<C>, SchoutenError> {
    reject_nonlocal(&w.density)?;
    let (_, wp) = variational(&w.density, cov);
    let mut residual = w.density.scale(&C::from_int(2));
    for (d, p) in wp.iter().zip(cov.fiber_vars()) {
        residual += &(d * &Poly::var(p));
    }
    // W alone only sees the skew part of A; F pins A itself
    let shadow_residual = match &w.shadow {
        Some(s) => {
            let two = C::from_int(2);
            wp.iter().zip(&s.components).map(|(d, f)| d + &f.scale(&two)).collect()
        }
        None => Vec::new(),
    };
    Ok(SkewCheck { residual, shadow_residual })
}

fn certify<C: Coeff>(density: Poly<C>) -> BracketCheck<C> {
    let jet = FreeJet::new();
    let families = jet_families([&density]);
    let obstruction: Vec<(Var, Poly<C>)> = families
        .iter()
        .zip(euler(&density, &families, &jet))
        .filter(|(_, e)| !e.is_zero())
        .map(|(v, e)| (*v, e))
        .collect();
    let witness = if obstruction.is_empty() { is_exact(&density, &jet).witness().cloned() } else { None };
    BracketCheck { density, obstruction, witness }
}

/// `sum_j (dW/du^j)(dW/dp^j)` must have vanishing variational derivatives
/// with respect to every variable.
pub fn check_hamiltonian<C: Coeff>(w: &Bivector<C>, cov: &Covering<C>) -> Result<BracketCheck<C>, SchoutenError> {
    reject_nonlocal(&w.density)?;
    let (wu, wp) = variational(&w.density, cov);
    let density = wu.iter().zip(&wp).map(|(a, b)| a * b).sum();
    Ok(certify(density))
}

/// The symmetric counterpart of [`check_hamiltonian`] for two bivectors.
pub fn check_compatible<C: Coeff>(
    a: &Bivector<C>,
    b: &Bivector<C>,
    cov: &Covering<C>,
) -> Result<BracketCheck<C>, SchoutenError> {
    reject_nonlocal(&a.density)?;
    reject_nonlocal(&b.density)?;
    let (au, ap) = variational(&a.density, cov);
    let (bu, bp) = variational(&b.density, cov);
    let density = (0..au.len()).map(|j| &(&au[j] * &bp[j]) + &(&bu[j] * &ap[j])).sum();
    Ok(certify(density))
}

/// `[[W_A, W_f]]` with `W_f = sum_j f^j p^j[0]`; trivial iff the flow of
/// `f` preserves `A`.
pub fn bracket_with_vector<C: Coeff>(
    w: &Bivector<C>,
    f: &[Poly<C>],
    cov: &Covering<C>,
) -> Result<BracketCheck<C>, SchoutenError> {
    reject_nonlocal(&w.density)?;
    let n = cov.base().len();
    if f.len() != n {
        return Err(SchoutenError::ComponentMismatch { expected: n, found: f.len() });
    }
    let wf: Poly<C> = f.iter().zip(cov.fiber_vars()).map(|(fj, p)| fj * &Poly::var(p)).sum();
    let density = schouten_bracket(&w.density, &wf, cov)?;
    Ok(certify(density))
}
