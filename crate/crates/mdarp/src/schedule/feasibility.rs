//! Feasibility checking. Violations are reported, never thrown: the
//! checker exists both to guard the evaluator and to let tests plant
//! defects and confirm they are caught.

use super::{expand, Expanded, Plan, ScheduleError, Timeline, TIME_EPS};
use crate::network::NodeId;
use crate::Ctx;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize, thiserror::Error)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    #[error("platoon {segment} has {size} members, limit {max}")]
    PlatoonTooLong { segment: u32, size: u32, max: u32 },
    #[error("vehicle {vehicle} carries {onboard} over arc {arc:?}, capacity {capacity}")]
    SoloCapacityExceeded {
        vehicle: u32,
        arc: (NodeId, NodeId),
        onboard: u32,
        capacity: u32,
    },
    #[error("platoon {segment} carries {onboard} over arc {arc:?}, pooled capacity {capacity}")]
    PooledCapacityExceeded {
        segment: u32,
        arc: (NodeId, NodeId),
        onboard: u32,
        capacity: u32,
    },
    #[error("transfer of request {request} from {from} to {to} on arc {arc:?} is not covered by a shared platoon")]
    TransferNotPlatooned {
        request: u32,
        from: u32,
        to: u32,
        arc: (NodeId, NodeId),
    },
    #[error("request {request} picked up at {time} before its ready time {ready}")]
    PickupBeforeReady { request: u32, time: f64, ready: f64 },
    #[error("request {request} pickup at {time} misses window {window:?}")]
    PickupWindowMissed {
        request: u32,
        time: f64,
        window: (f64, f64),
    },
    #[error("request {request} dropoff at {time} misses window {window:?}")]
    DropoffWindowMissed {
        request: u32,
        time: f64,
        window: (f64, f64),
    },
    #[error("vehicle {vehicle} departs at {departure} before its ready time {ready}")]
    VehicleReadyViolated {
        vehicle: u32,
        departure: f64,
        ready: f64,
    },
    #[error("vehicle {vehicle}: arrival at stop {stop} breaks travel-time continuity")]
    ContinuityBroken { vehicle: u32, stop: usize },
    #[error("vehicle {vehicle}: negative dwell at stop {stop}")]
    NegativeDwell { vehicle: u32, stop: usize },
    #[error("platoon {segment}: members desynchronized at path stop {offset}")]
    SyncBroken { segment: u32, offset: usize },
    #[error("request {request}: pickup time lies outside the vehicle's presence at the stop")]
    PickupTimeInconsistent { request: u32 },
    #[error("request {request}: dropoff time does not equal the vehicle's arrival at the stop")]
    DropoffTimeInconsistent { request: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a plan and a timeline (built or supplied) against every
/// feasibility condition. Structural defects in the plan itself are
/// errors; everything else lands in the report.
pub fn check_feasibility(
    ctx: &Ctx,
    plan: &Plan,
    timeline: &Timeline,
) -> Result<FeasibilityReport, ScheduleError> {
    let expanded = expand(ctx, plan)?;
    require_shape(plan, timeline)?;
    Ok(check_with(ctx, plan, &expanded, timeline))
}

/// The timeline must mirror the plan's stop lists exactly.
pub(crate) fn require_shape(plan: &Plan, timeline: &Timeline) -> Result<(), ScheduleError> {
    if timeline.stops.len() != plan.routes.len() {
        return Err(ScheduleError::TimelineShape(0));
    }
    for (k, route) in plan.routes.iter().enumerate() {
        let times = &timeline.stops[k];
        if times.len() != route.stops.len()
            || times
                .iter()
                .zip(&route.stops)
                .any(|(t, s)| t.node != s.node)
        {
            return Err(ScheduleError::TimelineShape(route.vehicle));
        }
    }
    Ok(())
}

pub(crate) fn check_with(
    ctx: &Ctx,
    plan: &Plan,
    expanded: &Expanded,
    timeline: &Timeline,
) -> FeasibilityReport {
    let inst = ctx.inst;
    let mut out = Vec::new();

    // (a) platoon length limit.
    for seg in &plan.platoons {
        let size = seg.members.len() as u32;
        if size > inst.params.max_platoon {
            out.push(Violation::PlatoonTooLong {
                segment: seg.id,
                size,
                max: inst.params.max_platoon,
            });
        }
    }

    // (b) capacity, pooled across platooned arcs. Custody legs give the
    // onboard count per vehicle per expansion arc.
    let mut onboard: Vec<Vec<u32>> = expanded
        .routes
        .iter()
        .map(|r| vec![0; r.arc_count()])
        .collect();
    for (r, chain) in expanded.chains.iter().enumerate() {
        let q = inst.requests[r].party;
        for leg in &chain.legs {
            for load in &mut onboard[leg.vehicle][leg.from_arc..leg.to_arc] {
                *load += q;
            }
        }
    }
    for (k, route) in expanded.routes.iter().enumerate() {
        let cap = inst.vehicles[k].capacity;
        #[allow(clippy::needless_range_loop)]
        for arc in 0..route.arc_count() {
            if expanded.cover[k][arc].is_none() && onboard[k][arc] > cap {
                out.push(Violation::SoloCapacityExceeded {
                    vehicle: k as u32,
                    arc: (
                        inst.network.node_id(route.nodes[arc]),
                        inst.network.node_id(route.nodes[arc + 1]),
                    ),
                    onboard: onboard[k][arc],
                    capacity: cap,
                });
            }
        }
    }
    for (si, seg) in plan.platoons.iter().enumerate() {
        let cap: u32 = seg
            .members
            .iter()
            .map(|&m| inst.vehicles[m as usize].capacity)
            .sum();
        for offset in 0..seg.path.len() - 1 {
            let load: u32 = seg
                .members
                .iter()
                .zip(&expanded.spans[si])
                .map(|(&m, &(a, _))| onboard[m as usize][a + offset])
                .sum();
            if load > cap {
                out.push(Violation::PooledCapacityExceeded {
                    segment: seg.id,
                    arc: (seg.path[offset], seg.path[offset + 1]),
                    onboard: load,
                    capacity: cap,
                });
            }
        }
    }

    // (c) transfer legality.
    for chain in &expanded.chains {
        for rt in &chain.transfers {
            if !rt.platooned {
                let t = &plan.transfers[rt.index];
                out.push(Violation::TransferNotPlatooned {
                    request: t.request,
                    from: t.from,
                    to: t.to,
                    arc: t.arc,
                });
            }
        }
    }

    // (d)(e) request timing against the timeline.
    for (r, req) in inst.requests.iter().enumerate() {
        let t_pick = timeline.pickup[r];
        let t_drop = timeline.dropoff[r];
        if t_pick < req.ready - TIME_EPS {
            out.push(Violation::PickupBeforeReady {
                request: r as u32,
                time: t_pick,
                ready: req.ready,
            });
        }
        if let Some(window) = req.pickup_window {
            if t_pick < window.0 - TIME_EPS || t_pick > window.1 + TIME_EPS {
                out.push(Violation::PickupWindowMissed {
                    request: r as u32,
                    time: t_pick,
                    window,
                });
            }
        }
        if let Some(window) = req.dropoff_window {
            if t_drop < window.0 - TIME_EPS || t_drop > window.1 + TIME_EPS {
                out.push(Violation::DropoffWindowMissed {
                    request: r as u32,
                    time: t_drop,
                    window,
                });
            }
        }
        let pick = expanded.pickup_site[r];
        let at = &timeline.stops[pick.vehicle][pick.stop];
        if t_pick < at.arrival - TIME_EPS || t_pick > at.departure() + TIME_EPS {
            out.push(Violation::PickupTimeInconsistent { request: r as u32 });
        }
        let drop = expanded.dropoff_site[r];
        let at = &timeline.stops[drop.vehicle][drop.stop];
        if (t_drop - at.arrival).abs() > TIME_EPS {
            out.push(Violation::DropoffTimeInconsistent { request: r as u32 });
        }
    }

    // Vehicle timing: ready release, nonnegative dwell, continuity.
    for (k, route) in expanded.routes.iter().enumerate() {
        let times = &timeline.stops[k];
        let vehicle = &inst.vehicles[k];
        if times[0].departure() < vehicle.ready - TIME_EPS {
            out.push(Violation::VehicleReadyViolated {
                vehicle: k as u32,
                departure: times[0].departure(),
                ready: vehicle.ready,
            });
        }
        for (s, time) in times.iter().enumerate() {
            if time.dwell < -TIME_EPS {
                out.push(Violation::NegativeDwell { vehicle: k as u32, stop: s });
            }
        }
        for s in 1..times.len() {
            let mut tau = 0.0;
            for p in route.stop_pos[s - 1]..route.stop_pos[s] {
                tau += ctx
                    .tables
                    .arc_time(route.nodes[p], route.nodes[p + 1])
                    .unwrap();
            }
            if (times[s].arrival - (times[s - 1].departure() + tau)).abs() > TIME_EPS {
                out.push(Violation::ContinuityBroken { vehicle: k as u32, stop: s });
            }
        }
    }

    // Platoon synchronization: aligned stops share arrivals and, except
    // at the split, departures.
    for (si, seg) in plan.platoons.iter().enumerate() {
        let members: Vec<usize> = seg.members.iter().map(|&m| m as usize).collect();
        let aligned: Vec<Vec<usize>> = members
            .iter()
            .zip(&expanded.spans[si])
            .map(|(&m, &(a, b))| {
                expanded.routes[m]
                    .stop_pos
                    .iter()
                    .enumerate()
                    .filter(|&(_, &p)| p >= a && p <= b)
                    .map(|(stop, _)| stop)
                    .collect()
            })
            .collect();
        let count = aligned[0].len();
        #[allow(clippy::needless_range_loop)]
        for idx in 0..count {
            let base = &timeline.stops[members[0]][aligned[0][idx]];
            for (slot, &m) in members.iter().enumerate().skip(1) {
                let mine = &timeline.stops[m][aligned[slot][idx]];
                let arrivals_differ = idx > 0 && (mine.arrival - base.arrival).abs() > TIME_EPS;
                let departures_differ =
                    idx < count - 1 && (mine.departure() - base.departure()).abs() > TIME_EPS;
                if arrivals_differ || departures_differ {
                    out.push(Violation::SyncBroken { segment: seg.id, offset: idx });
                    break;
                }
            }
        }
    }

    FeasibilityReport { violations: out }
}
