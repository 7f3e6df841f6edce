//! The example systems used throughout the tests and the command line tool.

use crate::algebra::Parity::Even;
use crate::calculus::EvolutionSystem;
use crate::scalar::Coeff;

/// `u_t = u_3 + u u_1`, graded by `|u_k| = k + 2`, `|t| = -3`.
pub fn kdv<C: Coeff>() -> EvolutionSystem<C> {
    EvolutionSystem::parse("KdV", &[("u", Even, Some(2), "u[3] + u*u[1]")], &[], Some(-3)).expect("valid system")
}

/// The Boussinesq system with parameter `sigma`, graded by `|u| = 2`,
/// `|v| = 1`, `|sigma| = 0`, `|t| = -2`.
pub fn boussinesq<C: Coeff>() -> EvolutionSystem<C> {
    EvolutionSystem::parse(
        "Boussinesq",
        &[("u", Even, Some(2), "u[1]*v + u*v[1] + sigma*v[3]"), ("v", Even, Some(1), "u[1] + v*v[1]")],
        &[("sigma", Some(0))],
        Some(-2),
    )
    .expect("valid system")
}

/// The coupled KdV-mKdV system, graded by `|u_k| = k + 2`, `|v_k| = k + 1`,
/// `|t| = -3`.
pub fn kdv_mkdv<C: Coeff>() -> EvolutionSystem<C> {
    EvolutionSystem::parse(
        "KdV-mKdV",
        &[
            ("u", Even, Some(2), "-u[3] + 6*u*u[1] - 3*v*v[3] - 3*v[1]*v[2] + 3*u[1]*v^2 + 6*u*v*v[1]"),
            ("v", Even, Some(1), "-v[3] + 3*v^2*v[1] + 3*u*v[1] + 3*u[1]*v"),
        ],
        &[],
        Some(-3),
    )
    .expect("valid system")
}
