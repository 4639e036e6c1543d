//! Initial conditions as expression trees and their truncated Taylor jets.

pub mod bounds;
pub mod expr;
pub mod jet;
pub mod parse;

pub use expr::{Expr, FieldExpr};
pub use jet::{coeff_count, Jet, MAX_ORDER};
pub use parse::parse_field;
