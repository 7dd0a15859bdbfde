//! Spectral norms of circulant matrices and the positivity conditions that
//! decide when the norm equals the modulus of the row sum.
//!
//! * [`circulant`]: symbols on the roots of unity, spectral norm, Gram
//!   circulant `C_x^* C_x` and its (normalized) powers.
//! * [`dense`]: dense reference matrices and a power-iteration norm oracle.
//! * [`classify`]: membership in `C_n` / `C_n'`, sign and Gram positivity,
//!   minimal positive powers, the complex phase cone, equivalence checks.
//! * [`experiments`]: Monte Carlo estimates of how much of the unit sphere
//!   satisfies each condition.
//! * [`table`]: CSV / JSON / Markdown rendering of those estimates.
//! * [`scalar`]: the scalar literal grammar used by the command line.

pub mod circulant;
pub mod classify;
pub mod cli;
pub mod dense;
pub mod error;
pub mod experiments;
pub mod scalar;
pub mod table;

pub use circulant::{
    gram_power, gram_row, normalized_power, roots_of_unity, spectral_norm, symbol_values, DftPlan,
    FirstRow, GramPower, NormalizedPowers, RootsOfUnity, SymbolValues,
};
pub use classify::{
    classify, complex_equivalence, equivalence_check, membership, minimal_positive_power,
    phase_cone, sign_condition, Adjacency, CheckOutcome, ClassificationReport, EquivalenceCheck,
    PhaseCone, SignCondition, Tolerances, Verdict, DEFAULT_M_MAX,
};
pub use dense::dense_norm_oracle;
pub use error::{Error, Result};
pub use experiments::{build_table, estimate_row, sample_sphere, TableRow, TableSpec};
