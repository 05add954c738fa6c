//! Ground truth at desk scale.
//!
//! Two tools live here. [`brute_force_solve`] enumerates every plan the
//! plan grammar can express for a tiny instance and returns the global
//! minimum under the same evaluator the solvers use, so heuristic
//! results can be measured against a real optimum. [`export_milp`]
//! writes the full arc-based mixed-integer model for an instance in LP
//! format, with a variable dictionary and a constraint census, so an
//! external solver can cross-validate the toolkit's cost model.

mod milp;
mod oracle;
#[cfg(test)]
mod slow;

pub use milp::{export_milp, BigMPolicy, ExportOptions, MilpArtifact};
pub use oracle::{brute_force_solo, brute_force_solve, OracleLimits};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExactError {
    /// The instance is beyond what exhaustive enumeration can finish in
    /// reasonable time; the estimate counts plan evaluations.
    #[error("instance exceeds oracle limits (roughly {estimate} plan evaluations)")]
    LimitsExceeded { estimate: u64 },
    /// Every enumerated plan failed feasibility, for example when a
    /// party is larger than any vehicle.
    #[error("no feasible plan exists within the enumerated space")]
    NoFeasiblePlan,
    #[error(transparent)]
    Schedule(#[from] crate::schedule::ScheduleError),
}
