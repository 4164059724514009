//! Reference interpreter and dataset toolkit for two lambda calculi: a pure
//! untyped one (LC1) and a simply typed one with booleans, unit and lists
//! (LC2).

pub mod church;
pub mod dataset;
pub mod generate;
pub mod metrics;
pub mod par;
pub mod reduce;
pub mod splits;
pub mod syntax;
pub mod term;
pub mod tokens;
pub mod types;

pub use church::church_encode;
pub use dataset::{ExampleRecord, Task};
pub use generate::GenConfig;
pub use reduce::{reduce, Renaming, Strategy};
pub use syntax::{parse, print};
pub use term::{alpha_eq, rename_vr, substitute, Lang, Term, Var};
pub use types::{check, Ty, TypeEnv};
