//! Scenario harness, configuration files and command line on top of
//! [`swipt_core`].
//!
//! - [`config`]: TOML system/solver configuration.
//! - [`harness`]: seeded Monte Carlo scenarios and their result tables.
//! - [`cli`]: the `swipt` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod harness;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] swipt_core::Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl AppError {
    /// 2 for bad input, 1 for solver or runtime failures.
    pub fn exit_code(&self) -> i32 {
        use swipt_core::Error as E;
        match self {
            AppError::Config(_) => 2,
            AppError::Core(E::Config(_) | E::Domain(_) | E::Shape(_)) => 2,
            AppError::Core(E::Infeasible(_) | E::NotConverged(_)) => 1,
            AppError::Io(_) | AppError::Csv(_) => 1,
        }
    }
}
