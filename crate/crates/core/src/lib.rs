//! Exact finite-window computations with lower semicontinuous submeasures on
//! ω and ω×ω.
//!
//! The central type is [`Expr`], an immutable expression tree that denotes a
//! submeasure. Expressions are built by validating constructors or read from
//! the s-expression language in [`dsl`], and evaluated exactly by
//! [`eval::eval`] into [`QValue`]s.

pub mod dsl;
pub mod error;
pub mod eval;
pub mod expr;
pub mod fuzz;
pub mod json;
pub mod pairing;
pub mod qvalue;
pub mod sets;
pub mod support;

pub use dsl::{parse_expr, parse_set};
pub use error::{EvalError, ExprError, ParseError, SetError, ValueError};
pub use eval::{eval, norm_profile, value, NormProfile};
pub use expr::{Expr, Node};
pub use qvalue::{QValue, Rational};
pub use sets::{GridSet, NatSet, Point, PointSet, Region, Sort, Window};
