//! Contingency tables over aligned relations and the tests run on them.

mod connective;
mod inference;
mod table;

use thiserror::Error;

pub use connective::{
    connective_seed, connective_tests, kappa_from_pairs, normalize_connective, ConnectiveOptions, ConnectiveTest, KappaSpace,
};
pub use inference::{
    chi_square, cohen_kappa, expected_min, fisher_exact, fisher_monte_carlo, independence_test, FisherOptions, Method,
    MonteCarlo, TestResult, DEFAULT_SEED, EXPECTED_THRESHOLD,
};
pub use table::{build_table, record_sense, ContingencyTable, Split};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("degenerate table")]
    Degenerate,
    #[error("rows of unequal length")]
    Shape,
    #[error("agreement table is not square")]
    NotSquare,
    #[error("kappa undefined: chance agreement is 1")]
    KappaUndefined,
}

#[cfg(test)]
mod tests;
