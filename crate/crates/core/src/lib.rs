//! Symbolic kernel for Hamiltonian structures of evolution equations in one
//! space dimension.

pub mod algebra;
pub mod calculus;
pub mod covering;
pub mod error;
pub mod linalg;
pub mod opforms;
pub mod scalar;
pub mod schouten;
pub mod solver;
pub mod systems;

pub use scalar::Coeff;

/// Arbitrary precision rationals, the default coefficient field.
pub type Rational = num_rational::BigRational;

pub type Poly = algebra::Poly<Rational>;
pub type EvolutionSystem = calculus::EvolutionSystem<Rational>;
pub type MatrixOperator = calculus::MatrixOperator<Rational>;
