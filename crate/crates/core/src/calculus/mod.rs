//! Total derivatives, linearizations, adjoints and the Euler operator.

mod exact;
mod operator;
mod system;
mod variational;

pub use exact::{equiv_mod_exact, is_exact, Exactness, Obstruction};
pub use operator::{DiffOp, MatrixOperator, Tail};
pub use system::{Dependent, EvolutionSystem};
pub use variational::{euler, ev_apply, jet_families, linearize, pairing, sys_linearization};

use crate::algebra::{GradingTable, Poly, Symbol, Var, VarContext, VarKind};
use crate::scalar::Coeff;

/// A space of jet coordinates equipped with total derivatives.
///
/// Jet coordinates always chain under `D_x`; parameters are constants;
/// nonlocal variables are differentiated through their declared fluxes.
pub trait JetSpace<C: Coeff>: Sync {
    fn context(&self) -> &VarContext;

    fn grading(&self) -> Option<&GradingTable>;

    /// `(x-flux, t-flux)` of a nonlocal variable.
    fn nonlocal_fluxes(&self, name: Symbol) -> Option<(&Poly<C>, &Poly<C>)>;

    /// `D_t` of a jet coordinate, `None` when it is zero or undefined.
    fn dt_jet(&self, v: &Var) -> Option<Poly<C>>;

    fn dx_var(&self, v: &Var) -> Option<Poly<C>> {
        match v.kind {
            VarKind::Jet => Some(Poly::var(v.with_order(v.order + 1))),
            VarKind::Parameter => None,
            VarKind::Nonlocal => self.nonlocal_fluxes(v.name).map(|(x, _)| x.clone()),
        }
    }

    fn dt_var(&self, v: &Var) -> Option<Poly<C>> {
        match v.kind {
            VarKind::Jet => self.dt_jet(v),
            VarKind::Parameter => None,
            VarKind::Nonlocal => self.nonlocal_fluxes(v.name).map(|(_, t)| t.clone()),
        }
    }

    fn total_dx(&self, f: &Poly<C>) -> Poly<C> {
        f.derive_with(|v| self.dx_var(v))
    }

    fn total_dx_n(&self, f: &Poly<C>, n: u32) -> Poly<C> {
        let mut g = f.clone();
        for _ in 0..n {
            g = self.total_dx(&g);
        }
        g
    }

    fn total_dt(&self, f: &Poly<C>) -> Poly<C> {
        f.derive_with(|v| self.dt_var(v))
    }
}

/// The bare jet space: `D_x` only, no evolution and no nonlocals. Enough
/// for variational derivatives and exactness of local densities.
#[derive(Clone, Debug, Default)]
pub struct FreeJet {
    ctx: VarContext,
}

impl FreeJet {
    pub fn new() -> Self {
        FreeJet::default()
    }
}

impl<C: Coeff> JetSpace<C> for FreeJet {
    fn context(&self) -> &VarContext {
        &self.ctx
    }

    fn grading(&self) -> Option<&GradingTable> {
        None
    }

    fn nonlocal_fluxes(&self, _: Symbol) -> Option<(&Poly<C>, &Poly<C>)> {
        None
    }

    fn dt_jet(&self, _: &Var) -> Option<Poly<C>> {
        None
    }
}
