//! Exact arithmetic in a model of the tame closure of K.

mod context;
mod cyclotomic;
mod parse;
mod puiseux;
mod valuation;

pub use context::{BaseFieldContext, Ctx};
pub use cyclotomic::{totient, CyclotomicField, CyclotomicNumber, MAX_CYCLOTOMIC_ORDER};
pub use parse::{parse_puiseux, parse_puiseux_at};
pub use puiseux::PuiseuxElement;
pub use valuation::{render_q, Val};
