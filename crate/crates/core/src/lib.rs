//! Exact tools for van der Waerden numbers `W(r, k)`: radix expansions and
//! power-interval localization, integer bounds on the leading exponent,
//! exhaustive search with two-sided certificates, DIMACS export for
//! external SAT solvers, and a registry of known values.

mod decimal;

pub mod bounds;
pub mod certificate;
pub mod cnf;
pub mod error;
pub mod radix;
pub mod registry;
pub mod report;
pub mod search;

pub use certificate::{Exhaustion, UnsatAttestation, VdwCertificate};
pub use error::{Error, Result};
pub use radix::{expand, floor_log, localize, PowerInterval, RadixExpansion};
pub use search::{search_exact, search_exact_parallel, verify, ApWitness, Budget, Coloring, SearchOutcome};
