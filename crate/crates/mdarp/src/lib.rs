//! Solver toolkit for the modular dial-a-ride problem (MDARP): dial-a-ride
//! with vehicle platooning, pooled platoon capacity and en-route passenger
//! transfers between platooned vehicles.
//!
//! The crate is organized bottom-up:
//!
//! * [`network`]: road networks, TNTP / JSON loaders, all-pairs shortest
//!   paths, layered expansion for the arc-based MILP export.
//! * [`instance`]: problem instances (vehicles, requests, cost parameters)
//!   and the seeded scenario generator.
//! * [`schedule`]: plans (routes, platoon segments, transfers), timeline
//!   construction, feasibility checking and cost evaluation.
//! * [`heuristic`]: the solo insertion baseline and the modular platoon
//!   search (pair formation, merge, residual insertion).
//! * [`exact`]: a brute-force oracle for tiny instances and the MILP
//!   (LP-file) exporter.
//! * [`bench`]: experiment matrices, CSV results, summaries, OLS
//!   regression and plan rendering.

pub mod heuristic;
pub mod instance;
pub mod network;
pub mod schedule;
pub mod util;

use std::sync::Arc;

pub use instance::Instance;
pub use network::{Network, ShortestPathTables};
pub use schedule::{CostBreakdown, Plan, Timeline};

/// An instance paired with the all-pairs shortest-path tables of its
/// network. Every schedule and solver operation works against this so
/// the tables are computed once per instance. The tables are shared:
/// solvers evaluate many derived instances (subsets of vehicles and
/// requests on the same network) without recomputing shortest paths.
pub struct Ctx<'a> {
    pub inst: &'a Instance,
    pub tables: Arc<ShortestPathTables>,
}

impl<'a> Ctx<'a> {
    pub fn new(inst: &'a Instance) -> Result<Self, network::NetworkError> {
        let tables = Arc::new(network::all_pairs_shortest(&inst.network)?);
        Ok(Ctx { inst, tables })
    }

    /// Pairs an instance with previously computed tables. The tables
    /// must belong to `inst.network`; nothing re-checks that here.
    pub fn with_tables(inst: &'a Instance, tables: Arc<ShortestPathTables>) -> Self {
        Ctx { inst, tables }
    }
}
