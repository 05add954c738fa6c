//! Problem instances: a network, a fleet, a request list and the cost
//! parameters. Instances embed their network so a saved file is
//! self-contained and reproducible.

mod generate;
mod io;

pub use generate::{generate, GenConfig, GenRanges, Spatial, Temporal};
pub use io::{load_instance, save_instance};

use crate::network::{Network, NodeId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
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
    #[error("vehicle {0} has id out of order (ids must be 0..K in order)")]
    VehicleIdOrder(u32),
    #[error("request {0} has id out of order (ids must be 0..R in order)")]
    RequestIdOrder(u32),
    #[error("vehicle {vehicle}: unknown start node {node}")]
    UnknownVehicleNode { vehicle: u32, node: NodeId },
    #[error("request {request}: unknown {which} node {node}")]
    UnknownRequestNode {
        request: u32,
        which: &'static str,
        node: NodeId,
    },
    #[error("vehicle {vehicle}: {field} must be positive")]
    NonPositiveVehicleField { vehicle: u32, field: &'static str },
    #[error("request {request}: {field} must be positive")]
    NonPositiveRequestField { request: u32, field: &'static str },
    #[error("vehicle {vehicle}: ready time must be finite and non-negative")]
    BadVehicleReady { vehicle: u32 },
    #[error("request {request}: ready time must be finite and non-negative")]
    BadRequestReady { request: u32 },
    #[error("request {request}: {which} window is not well-ordered")]
    BadWindow { request: u32, which: &'static str },
    #[error("parameters: {field} must be finite and non-negative")]
    BadParameter { field: &'static str },
    #[error("parameters: platoon saving rate(s) must keep arc costs positive (got {total:.4} at full platoon size)")]
    SavingTooLarge { total: f64 },
    #[error("parameters: max platoon size must be at least 1")]
    BadPlatoonSize,
    #[error("network error: {0}")]
    Network(#[from] crate::network::NetworkError),
    #[error("cluster mode needs at least 1 cluster")]
    BadClusterCount,
    #[error("network is too small to draw distinct request endpoints")]
    TooFewNodes,
    #[error("unknown {0} mode: {1}")]
    UnknownMode(&'static str, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vehicle {
    pub id: u32,
    pub start: NodeId,
    /// Required final stop. `None` means the vehicle may finish anywhere
    /// (equivalently, a dummy terminal reachable from every node at zero
    /// cost).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<NodeId>,
    pub capacity: u32,
    /// Earliest departure time (minutes).
    pub ready: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: u32,
    pub pickup: NodeId,
    pub dropoff: NodeId,
    /// Party size (passengers traveling together; never split).
    pub party: u32,
    /// In-system time: the request cannot be picked up earlier, and
    /// service time is measured from it.
    pub ready: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pickup_window: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dropoff_window: Option<(f64, f64)>,
}

/// Per-arc platoon saving model applied to a follower that shares the
/// arc with `p` partner vehicles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Saving {
    /// Cost factor `1 - eta * p`.
    Single { eta: f64 },
    /// Cost factor `1 - eta1 - eta2 * (p - 1)` once platooned.
    TwoRate { eta1: f64, eta2: f64 },
}

impl Saving {
    /// Per-arc cost multiplier for a vehicle with `partners` platoon
    /// partners on that arc.
    pub fn factor(&self, partners: u32) -> f64 {
        if partners == 0 {
            return 1.0;
        }
        match *self {
            Saving::Single { eta } => 1.0 - eta * partners as f64,
            Saving::TwoRate { eta1, eta2 } => 1.0 - eta1 - eta2 * (partners - 1) as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// Weight on vehicle travel cost.
    pub alpha: f64,
    /// Weight on passenger service time.
    pub beta: f64,
    pub saving: Saving,
    /// Maximum vehicles docked together (platform limit `u`).
    pub max_platoon: u32,
}

/// Provenance labels carried through to benchmark results.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spatial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temporal: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Instance {
    pub network: Network,
    pub vehicles: Vec<Vehicle>,
    pub requests: Vec<Request>,
    pub params: Parameters,
    #[serde(default)]
    pub meta: Meta,
}

impl Instance {
    /// Structural validation; loaders and the generator guarantee this
    /// holds for every instance they hand out.
    pub fn validate(&self) -> Result<(), InstanceError> {
        for (i, v) in self.vehicles.iter().enumerate() {
            if v.id as usize != i {
                return Err(InstanceError::VehicleIdOrder(v.id));
            }
            if self.network.node_index(v.start).is_none() {
                return Err(InstanceError::UnknownVehicleNode {
                    vehicle: v.id,
                    node: v.start,
                });
            }
            if let Some(end) = v.end {
                if self.network.node_index(end).is_none() {
                    return Err(InstanceError::UnknownVehicleNode {
                        vehicle: v.id,
                        node: end,
                    });
                }
            }
            if v.capacity == 0 {
                return Err(InstanceError::NonPositiveVehicleField {
                    vehicle: v.id,
                    field: "capacity",
                });
            }
            if !v.ready.is_finite() || v.ready < 0.0 {
                return Err(InstanceError::BadVehicleReady { vehicle: v.id });
            }
        }
        for (i, r) in self.requests.iter().enumerate() {
            if r.id as usize != i {
                return Err(InstanceError::RequestIdOrder(r.id));
            }
            for (which, node) in [("pickup", r.pickup), ("dropoff", r.dropoff)] {
                if self.network.node_index(node).is_none() {
                    return Err(InstanceError::UnknownRequestNode {
                        request: r.id,
                        which,
                        node,
                    });
                }
            }
            if r.party == 0 {
                return Err(InstanceError::NonPositiveRequestField {
                    request: r.id,
                    field: "party",
                });
            }
            if !r.ready.is_finite() || r.ready < 0.0 {
                return Err(InstanceError::BadRequestReady { request: r.id });
            }
            for (which, win) in [("pickup", r.pickup_window), ("dropoff", r.dropoff_window)] {
                if let Some((a, b)) = win {
                    if !(a.is_finite() && b.is_finite() && a <= b) {
                        return Err(InstanceError::BadWindow {
                            request: r.id,
                            which,
                        });
                    }
                }
            }
        }
        for (field, value) in [("alpha", self.params.alpha), ("beta", self.params.beta)] {
            if !value.is_finite() || value < 0.0 {
                return Err(InstanceError::BadParameter { field });
            }
        }
        if self.params.max_platoon == 0 {
            return Err(InstanceError::BadPlatoonSize);
        }
        let worst = match self.params.saving {
            Saving::Single { eta } => {
                if !(eta.is_finite() && eta >= 0.0) {
                    return Err(InstanceError::BadParameter { field: "eta" });
                }
                eta * self.params.max_platoon.saturating_sub(1) as f64
            }
            Saving::TwoRate { eta1, eta2 } => {
                if !(eta1.is_finite() && eta1 >= 0.0) {
                    return Err(InstanceError::BadParameter { field: "eta1" });
                }
                if !(eta2.is_finite() && eta2 >= 0.0) {
                    return Err(InstanceError::BadParameter { field: "eta2" });
                }
                if self.params.max_platoon >= 2 {
                    eta1 + eta2 * (self.params.max_platoon - 2) as f64
                } else {
                    0.0
                }
            }
        };
        if worst >= 1.0 {
            return Err(InstanceError::SavingTooLarge { total: worst });
        }
        Ok(())
    }

    pub fn vehicle_count(&self) -> usize {
        self.vehicles.len()
    }

    pub fn request_count(&self) -> usize {
        self.requests.len()
    }
}
