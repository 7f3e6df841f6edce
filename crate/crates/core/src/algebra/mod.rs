//! Exact graded differential superpolynomials.

mod grading;
mod monomial;
pub mod parse;
mod poly;
pub mod print;
mod var;

pub use grading::{grade_of, Grade, GradingTable};
pub use monomial::Monomial;
pub use parse::{parse_expr, VarContext};
pub use poly::Poly;
pub use print::{print_canonical, print_factor};
pub use var::{Parity, Symbol, Var, VarKind};
