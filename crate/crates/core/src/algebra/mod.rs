//! Exact scalars, polynomials, differential operators and linear algebra.

pub mod diffop;
pub mod json;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod vars;

pub use diffop::DiffOp;
pub use json::PolyJson;
pub use linalg::{exact_nullspace, SparseEchelon};
pub use poly::{poly_arith, Monomial, Poly, PolyOp};
pub use rational::{fmt_rational, int, parse_rational, rat, Rational};
pub use vars::{Block, Coord, Var, VarTable};
