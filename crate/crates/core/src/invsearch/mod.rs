//! Constructive search for tensor invariants by linear algebra on an ansatz.

mod ansatz;
mod scan;
mod solve;

pub use ansatz::{build_ansatz, AnsatzMode, AnsatzSpace, DEFAULT_ZERO_WEIGHT_CAP};
pub use scan::{
    diagonal_linear_field, full_scan, linear_field, DegreeResult, NonlinearResult, ScanKind,
    ScanOptions, ScanReport, ScanTarget, DEFAULT_FIXED_POINT_K_MAX,
};
pub use solve::{
    ansatz_degree, proportional, solve_invariants, Exactness, InvariantBasis, QuotientStatus,
    MAX_SYSTEM_ENTRIES,
};
