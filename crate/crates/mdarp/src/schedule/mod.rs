//! Solution plans and everything computed from them: synchronized
//! timelines, feasibility reports and the weighted objective.
//!
//! A [`Plan`] is pure structure: per-vehicle stop sequences, platoon
//! segments and transfer records. Travel between consecutive stops
//! always follows the stored shortest path, so a plan never spells out
//! full node walks. [`build_timeline`] turns structure into times,
//! [`check_feasibility`] reports violations without judging them, and
//! [`evaluate_cost`] refuses infeasible input.

mod cost;
mod expand;
mod feasibility;
mod io;
pub mod sample;
mod timeline;

pub use cost::{cost_difference, evaluate_cost, evaluate_plan, strip_platoons};
pub use feasibility::{check_feasibility, FeasibilityReport, Violation};
pub use io::{load_plan, load_solution, save_plan, save_solution, SolutionFile};
pub use timeline::build_timeline;

pub(crate) use expand::{expand, Expanded};

use crate::network::NodeId;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Comparison slack for times that were themselves computed in floating
/// point (continuity, synchronization, window checks).
pub(crate) const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("plan must list one route per vehicle, in vehicle id order")]
    RouteOrder,
    #[error("vehicle {0}: route has no stops")]
    EmptyRoute(u32),
    #[error("vehicle {vehicle}: route starts at {got}, expected start node {expected}")]
    WrongStart { vehicle: u32, expected: NodeId, got: NodeId },
    #[error("vehicle {vehicle}: route ends at {got}, expected pinned end node {expected}")]
    WrongEnd { vehicle: u32, expected: NodeId, got: NodeId },
    #[error("vehicle {vehicle}: stop {stop} references unknown node {node}")]
    UnknownStopNode { vehicle: u32, stop: usize, node: NodeId },
    #[error("vehicle {vehicle}: stop {stop} repeats the previous stop's node {node}")]
    RepeatedStop { vehicle: u32, stop: usize, node: NodeId },
    #[error("action references unknown request {0}")]
    UnknownRequest(u32),
    #[error("action references unknown platoon segment {0}")]
    UnknownSegment(u32),
    #[error("request {0} has {1} pickups, expected exactly one")]
    PickupCount(u32, usize),
    #[error("request {0} has {1} dropoffs, expected exactly one")]
    DropoffCount(u32, usize),
    #[error("request {0}: dropoff precedes pickup on vehicle {1}")]
    DropoffBeforePickup(u32, u32),
    #[error("platoon segments must be listed with id equal to their index; got {0}")]
    SegmentIdOrder(u32),
    #[error("platoon {0}: fewer than two members")]
    TooFewMembers(u32),
    #[error("platoon {0}: member list must be strictly increasing vehicle ids")]
    MembersNotSorted(u32),
    #[error("platoon {0}: member {1} is not a known vehicle")]
    UnknownMember(u32, u32),
    #[error("platoon {segment}: vehicle {vehicle} must carry exactly one join and one split, join before split")]
    JoinSplitShape { segment: u32, vehicle: u32 },
    #[error("platoon {segment}: join/split actions on vehicle {vehicle} do not match the member list")]
    MemberListMismatch { segment: u32, vehicle: u32 },
    #[error("platoon {0}: path must contain at least two nodes")]
    PathTooShort(u32),
    #[error("platoon {segment}: path references unknown node {node}")]
    UnknownPathNode { segment: u32, node: NodeId },
    #[error("platoon {segment}: vehicle {vehicle} does not traverse the declared path between join and split")]
    PathMismatch { segment: u32, vehicle: u32 },
    #[error("platoon {segment}: members stop at different points along the shared path")]
    StopsMisaligned { segment: u32 },
    #[error("vehicle {vehicle}: platoons {a} and {b} overlap on an arc")]
    OverlappingPlatoons { vehicle: u32, a: u32, b: u32 },
    #[error("transfer of request {0}: vehicle hands over to itself")]
    TransferToSelf(u32),
    #[error("transfer of request {request}: ({from}, {to}) is not a network arc")]
    TransferNotAnArc { request: u32, from: NodeId, to: NodeId },
    #[error("request {0}: transfer records do not form a pickup-to-dropoff carrier chain")]
    TransferChainBroken(u32),
    #[error("request {request}: carrier {vehicle} never traverses the handover arc after taking the request aboard")]
    TransferUnresolvable { request: u32, vehicle: u32 },
    #[error("request {0}: dropoff occurs before the final handover completes")]
    DropoffBeforeHandover(u32),
    #[error("platoons wait for each other in a cycle (segments {0:?})")]
    CyclicPlatoonWait(Vec<u32>),
    #[error("timeline does not match the plan shape (vehicle {0})")]
    TimelineShape(u32),
    #[error("plan is infeasible ({count} violation(s), first: {first}); see check_feasibility")]
    Infeasible { count: usize, first: String },
    #[error("cost difference needs a positive solo total, got {0}")]
    BadSoloTotal(f64),
    #[error("cannot strip platoons from a plan with transfers")]
    StripWithTransfers,
    #[error("failed to read {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Parse {
        path: std::path::PathBuf,
        msg: String,
    },
    #[error(transparent)]
    Network(#[from] crate::network::NetworkError),
}

/// What happens at a stop. A stop may carry several actions; dropoffs
/// take effect before pickups unless the pickup is listed first at the
/// same stop for the same request's zero-length ride.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Pickup(u32),
    Dropoff(u32),
    /// Start of the platoon segment with this id.
    Join(u32),
    /// End of the platoon segment with this id.
    Split(u32),
    /// Visited without service; used to mirror a platoon partner's stops.
    Pass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stop {
    pub node: NodeId,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub actions: Vec<Action>,
}

impl Stop {
    pub fn new(node: NodeId, actions: Vec<Action>) -> Self {
        Stop { node, actions }
    }

    pub fn pass(node: NodeId) -> Self {
        Stop { node, actions: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub vehicle: u32,
    pub stops: Vec<Stop>,
}

/// A maximal stretch over which a fixed vehicle group travels docked.
/// The path runs from the join node to the split node; members traverse
/// it in lockstep and stop at the same points along it. Staggered
/// platoons (members joining or leaving midway) are expressed as
/// consecutive segments sharing a boundary node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatoonSegment {
    pub id: u32,
    /// Strictly increasing vehicle ids, at least two.
    pub members: Vec<u32>,
    /// Node chain from join to split; consecutive entries are arcs.
    pub path: Vec<NodeId>,
}

/// A passenger handover between two platooned vehicles, attributed to
/// the first arc the receiving vehicle carries the request on. The
/// handover itself happens at the arc's tail node and takes no time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferRecord {
    pub request: u32,
    pub from: u32,
    pub to: u32,
    /// Directed arc (tail, head) as traversed.
    pub arc: (NodeId, NodeId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Plan {
    pub routes: Vec<Route>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub platoons: Vec<PlatoonSegment>,
    /// Per request, records are listed in carrying order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transfers: Vec<TransferRecord>,
}

impl Plan {
    /// A plan where every vehicle sits at its start and nothing is served.
    pub fn idle(inst: &crate::instance::Instance) -> Plan {
        Plan {
            routes: inst
                .vehicles
                .iter()
                .map(|v| Route {
                    vehicle: v.id,
                    stops: vec![Stop::pass(v.start)],
                })
                .collect(),
            platoons: Vec::new(),
            transfers: Vec::new(),
        }
    }

    pub fn route(&self, vehicle: u32) -> &Route {
        &self.routes[vehicle as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopTime {
    pub node: NodeId,
    pub arrival: f64,
    /// Time spent at the stop before departing: service waits for
    /// not-yet-ready passengers plus platoon synchronization waits.
    pub dwell: f64,
}

impl StopTime {
    pub fn departure(&self) -> f64 {
        self.arrival + self.dwell
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timeline {
    /// Per vehicle, aligned with the plan's stop list.
    pub stops: Vec<Vec<StopTime>>,
    /// Per request: boarding time at the pickup stop.
    pub pickup: Vec<f64>,
    /// Per request: arrival time at the dropoff stop.
    pub dropoff: Vec<f64>,
}

/// Objective components. `total` is exactly
/// `alpha * vehicle_travel_cost + beta * passenger_service_time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Distance-weighted vehicle travel with platoon savings applied.
    pub vehicle_travel_cost: f64,
    /// Passenger-weighted minutes from request ready time to dropoff.
    pub passenger_service_time: f64,
    pub total: f64,
}

#[cfg(test)]
pub(crate) mod fixtures;
