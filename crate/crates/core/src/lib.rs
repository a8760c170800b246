//! Mixed-level detecting arrays.
//!
//! A `(d,t)`-detecting array is a test suite in which any set of at most
//! `d` faulty t-way interactions can be read off the pass/fail outcomes,
//! and more than `d` faults are at least noticed. This crate provides
//!
//! * the array model and row-set primitive ([`array`]),
//! * verifiers and the size lower bound ([`verify`]),
//! * a simulated-annealing generator for `(1,2)` arrays ([`search`]),
//! * algebraic builders and compositions ([`construct`]),
//! * fault localization from outcomes ([`locate`]),
//! * a text format, reference catalog and CSV export ([`tooling`]).

pub mod array;
pub mod construct;
pub mod error;
pub mod locate;
pub mod search;
pub mod tooling;
pub mod verify;

pub use array::{
    extensions, interactions, rho, rho_union, Interaction, MixedArray, RowSet, TypeVector,
};
pub use error::{Error, Result};
pub use locate::{
    locate_faults, locate_faults_verified, simulate_outcome, LocateResult, Outcome, OutcomeVector,
};
pub use search::{sa_objective, sa_search, SearchConfig, SearchOutcome, SearchReport};
pub use tooling::{ArrayDocument, NameMap};
pub use verify::{
    check_search_constraints, coverage_index, is_d_extendible, is_detecting, is_detecting_brute,
    is_super_simple, lower_bound, min_rho_check, ConstraintVerdict, Limits, VerifyReport, Witness,
};
