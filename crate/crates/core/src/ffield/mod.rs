//! Exact arithmetic in prime fields, extension fields and polynomial rings
//! over them.

mod dlog;
pub mod factor;
mod field;
mod poly;
mod tower;

pub use dlog::{discrete_log, element_order, DLOG_FIELD_LIMIT};
pub(crate) use dlog::dlog_raw;
pub use factor::{factor_poly, find_irreducible, is_irreducible};
pub use field::{Field, FieldElement, FieldOp, MAX_FIELD_SIZE};
pub use poly::DensePoly;
pub use tower::{frobenius_q, FieldCtx};
