//! Dependency-aware method comment generation and evaluation.
//!
//! The crate is organised as a pipeline of independent stages that
//! communicate through plain records:
//!
//! * [`corpus`] and [`config`] discover source files and load the run configuration.
//! * [`extract`] parses source files with tree-sitter and emits [`extract::MethodRecord`]s
//!   and [`extract::InvocationRecord`]s.
//! * [`graph`] resolves invocations to project-local helpers, classifies methods as
//!   dependent or independent and builds helper chains.
//! * [`history`] mines per-method change history with `git log -L`.
//! * [`prompt`] and [`provider`] render helper-augmented prompts and talk to completion,
//!   embedding and alignment back ends.
//! * [`metrics`] scores generated comments and aggregates them into overall metric scores.
//! * [`stats`] holds the rank tests, Fleiss' kappa and the Cochran sample size calculator.
//! * [`store`] persists everything as line-delimited JSON and applies dataset filters.
//! * [`report`] turns score cards into per-strategy comparison tables.

pub mod config;
pub mod corpus;
pub mod error;
pub mod extract;
pub mod graph;
pub mod history;
pub mod metrics;
pub mod prompt;
pub mod provider;
pub mod report;
pub mod stats;
pub mod store;

mod digest;

pub use error::{Error, Result};
