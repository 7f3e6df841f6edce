use thiserror::Error;

use crate::algebra::Var;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at offset {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("variable `{0}` has no grade")]
    Ungraded(Var),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("expected {expected} components, got {found}")]
    ComponentMismatch { expected: usize, found: usize },
    #[error("operator has nonlocal tails")]
    NonlocalTail,
    #[error("operator entry ({0}, {1}) has odd or mixed-parity coefficients")]
    OddCoefficient(usize, usize),
    #[error("composition with a D_t term is not supported")]
    TimeDerivative,
    #[error("matrix shapes do not match: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoveringError {
    #[error("variable name `{0}` is already in use")]
    NameCollision(String),
    #[error("`{0}` is not a nonlocal variable of this covering")]
    NotNonlocal(String),
    #[error("flux for `{name}` uses undeclared variable `{var}`")]
    UndeclaredVariable { name: String, var: String },
    #[error("flux for `{name}` has parity inconsistent with the variable")]
    FluxParity { name: String },
    #[error("flux for `{name}` is not homogeneous of grade {expected}")]
    FluxGrade { name: String, expected: i64 },
    #[error("no consistent grades for the fiber variables: {0}")]
    Grading(String),
    #[error("D_t occurs off the diagonal of the operator")]
    IrregularTimeDerivative,
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchoutenError {
    #[error("bracket argument has mixed parity")]
    MixedParity,
    #[error("shadow component {0} is not linear in the antifields")]
    NonlinearShadow(usize),
    #[error("nonlocal variables are not supported by this check")]
    NonlocalNotSupported,
    #[error("expected {expected} components, got {found}")]
    ComponentMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("no monomials of the requested grades")]
    EmptyTemplate,
    #[error("the system is not graded")]
    Ungraded,
    #[error("variable `{0}` has non-positive grade; the ansatz would be infinite")]
    NonPositiveGrade(String),
    #[error("expected {expected} grades, got {found}")]
    GradeCount { expected: usize, found: usize },
    #[error("the covering has no evolution rules for its fibers")]
    NotEvolutionary,
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error("component {0} is not linear in the fiber variables")]
    NonlinearAntifield(usize),
    #[error("tail in row {row} does not match any declared nonlocal variable")]
    UnmatchedTail { row: usize },
    #[error("D_x^-1 cannot be applied: `{density}` is not a total derivative")]
    NonlocalObstruction { density: String },
    #[error("component {0} has odd coefficients")]
    OddCoefficient(usize),
    #[error("expected {expected} components, got {found}")]
    ComponentMismatch { expected: usize, found: usize },
    #[error("operator text `{text}`: {reason}")]
    Parse { text: String, reason: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("right-hand side of `{dependent}`: {source}")]
    Parse { dependent: String, source: AlgebraError },
    #[error("dependent variable `{0}` declared twice")]
    Duplicate(String),
    #[error("right-hand side of `{dependent}` uses undeclared variable `{var}`")]
    Undeclared { dependent: String, var: String },
    #[error("right-hand side of `{dependent}` has parity {found}, expected {expected}")]
    Parity { dependent: String, expected: String, found: String },
    #[error("right-hand side of `{dependent}` is not homogeneous")]
    Inhomogeneous { dependent: String },
    #[error("right-hand side of `{dependent}` has grade {found}, expected {expected}")]
    Grade { dependent: String, expected: i64, found: i64 },
    #[error("expected {expected} right-hand sides, got {found}")]
    Count { expected: usize, found: usize },
}
