//! Capability analysis tables (CATs) as a machine-readable format.
//!
//! A CAT links a robot's core behaviors to the inputs each one needs and the
//! outputs it promises. This crate parses the textual `.cat` format, compiles
//! each sub-row into an implication, checks tables for gaps and
//! inconsistencies, walks a table hierarchy to isolate the broken condition
//! behind an observed failure, and replays robot logs against a table.
//!
//! ```
//! use cat_core::{parser, logic, model::{Valuation, Value}};
//!
//! let doc = parser::parse("cat \"lamp\"\nlevel 0\ninput power : bool\nrow on : Idle\n  power : == true\n")
//!     .document
//!     .unwrap();
//! let v = Valuation::new("Idle").with("power", Value::Bool(true));
//! let outcome = logic::evaluate(&doc, &v).unwrap();
//! assert_eq!(outcome.expected_outputs, vec!["on".to_string()]);
//! ```

pub mod analysis;
pub mod corpus;
pub mod diagnose;
mod error;
pub mod logic;
pub mod model;
pub mod monitor;
pub mod parser;

pub use error::CatError;
