#![allow(dead_code)]

pub mod depgraph;
pub mod history;
pub mod oracles;

use std::path::PathBuf;

/// Root of the core crate, whichever crate's tests include this module.
pub fn core_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core")
}
