pub mod comp_subst;
pub mod conv;
pub mod error;
pub mod frontend;
pub mod harness;
pub mod lf_subst;
pub mod reduce;
pub mod syntax;
pub mod typing;

pub use comp_subst::{CompSubst, Payload};
pub use error::{Judgment, KernelError, Result, TypeError, TypeErrorKind};
pub use frontend::{parse_term, Diagnostic, Session, Status};
pub use reduce::{Definition, Kernel, DEFAULT_FUEL};
pub use syntax::*;
pub use typing::Sort;
