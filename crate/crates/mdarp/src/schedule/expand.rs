//! Structural validation of plans, and their expansion from stop
//! sequences into full node walks. Everything downstream (timelines,
//! feasibility, cost) works on the expansion, so this is the single
//! place that decides what a well-formed plan is.

use super::{Action, Plan, ScheduleError};
use crate::Ctx;
use std::collections::HashMap;

pub(crate) struct ExpRoute {
    /// Node indices along the full walk; consecutive entries are arcs.
    pub nodes: Vec<usize>,
    /// Stop index -> position in `nodes`.
    pub stop_pos: Vec<usize>,
}

impl ExpRoute {
    pub fn arc_count(&self) -> usize {
        self.nodes.len() - 1
    }
}

#[derive(Clone, Copy)]
pub(crate) struct SegCover {
    pub seg: usize,
    /// Arc offset from the segment's first node.
    pub offset: usize,
}

#[derive(Clone, Copy)]
pub(crate) struct Site {
    pub vehicle: usize,
    pub stop: usize,
    /// Node position in the vehicle's expansion.
    pub pos: usize,
}

/// One vehicle's custody of a request: aboard on expansion arcs
/// `[from_arc, to_arc)` of that vehicle.
#[derive(Clone, Copy)]
pub(crate) struct CarrierLeg {
    pub vehicle: usize,
    pub from_arc: usize,
    pub to_arc: usize,
}

#[derive(Clone, Copy)]
pub(crate) struct ResolvedTransfer {
    /// Index into `plan.transfers`.
    pub index: usize,
    /// Whether the handover arc lies in a platoon segment containing
    /// both vehicles at the same offset. Not platooned is a reported
    /// feasibility violation, not a structural error.
    pub platooned: bool,
}

pub(crate) struct Chain {
    pub legs: Vec<CarrierLeg>,
    pub transfers: Vec<ResolvedTransfer>,
}

pub(crate) struct Expanded {
    pub routes: Vec<ExpRoute>,
    pub pickup_site: Vec<Site>,
    pub dropoff_site: Vec<Site>,
    /// Per segment, per member (member-list order): node-position span
    /// `(start, end)` in that member's expansion, `start < end`.
    pub spans: Vec<Vec<(usize, usize)>>,
    /// Per vehicle, per expansion arc: the covering segment, if any.
    pub cover: Vec<Vec<Option<SegCover>>>,
    /// Per request: custody legs in carrying order.
    pub chains: Vec<Chain>,
}

impl Expanded {
    /// Platoon partners of `vehicle` on its expansion arc `arc`.
    pub fn partners(&self, plan: &Plan, vehicle: usize, arc: usize) -> u32 {
        match self.cover[vehicle][arc] {
            Some(c) => plan.platoons[c.seg].members.len() as u32 - 1,
            None => 0,
        }
    }
}

pub(crate) fn expand(ctx: &Ctx, plan: &Plan) -> Result<Expanded, ScheduleError> {
    let inst = ctx.inst;
    let net = &inst.network;
    let k_count = inst.vehicles.len();
    let r_count = inst.requests.len();

    if plan.routes.len() != k_count
        || plan.routes.iter().enumerate().any(|(k, r)| r.vehicle as usize != k)
    {
        return Err(ScheduleError::RouteOrder);
    }

    // Expand each route along stored shortest paths.
    let mut routes = Vec::with_capacity(k_count);
    for (k, route) in plan.routes.iter().enumerate() {
        let vehicle = &inst.vehicles[k];
        let first = route
            .stops
            .first()
            .ok_or(ScheduleError::EmptyRoute(vehicle.id))?;
        if first.node != vehicle.start {
            return Err(ScheduleError::WrongStart {
                vehicle: vehicle.id,
                expected: vehicle.start,
                got: first.node,
            });
        }
        if let Some(end) = vehicle.end {
            let last = route.stops.last().unwrap().node;
            if last != end {
                return Err(ScheduleError::WrongEnd {
                    vehicle: vehicle.id,
                    expected: end,
                    got: last,
                });
            }
        }
        let mut nodes = Vec::with_capacity(route.stops.len());
        let mut stop_pos = Vec::with_capacity(route.stops.len());
        for (s, stop) in route.stops.iter().enumerate() {
            let idx = net
                .node_index(stop.node)
                .ok_or(ScheduleError::UnknownStopNode {
                    vehicle: vehicle.id,
                    stop: s,
                    node: stop.node,
                })?;
            if s == 0 {
                nodes.push(idx);
            } else {
                let prev = *nodes.last().unwrap();
                if prev == idx {
                    return Err(ScheduleError::RepeatedStop {
                        vehicle: vehicle.id,
                        stop: s,
                        node: stop.node,
                    });
                }
                let leg = ctx.tables.path_indices(prev, idx);
                nodes.extend_from_slice(&leg[1..]);
            }
            stop_pos.push(nodes.len() - 1);
        }
        routes.push(ExpRoute { nodes, stop_pos });
    }

    // Scan actions: service sites and join/split locations.
    let s_count = plan.platoons.len();
    let mut pickups: Vec<Vec<Site>> = vec![Vec::new(); r_count];
    let mut dropoffs: Vec<Vec<Site>> = vec![Vec::new(); r_count];
    // Per segment: (vehicle -> (join stops, split stops)).
    type Marks = HashMap<usize, (Vec<usize>, Vec<usize>)>;
    let mut marks: Vec<Marks> = vec![HashMap::new(); s_count];
    for (k, route) in plan.routes.iter().enumerate() {
        for (s, stop) in route.stops.iter().enumerate() {
            for action in &stop.actions {
                let site = Site {
                    vehicle: k,
                    stop: s,
                    pos: routes[k].stop_pos[s],
                };
                match *action {
                    Action::Pickup(r) => {
                        if r as usize >= r_count {
                            return Err(ScheduleError::UnknownRequest(r));
                        }
                        pickups[r as usize].push(site);
                    }
                    Action::Dropoff(r) => {
                        if r as usize >= r_count {
                            return Err(ScheduleError::UnknownRequest(r));
                        }
                        dropoffs[r as usize].push(site);
                    }
                    Action::Join(p) => {
                        if p as usize >= s_count {
                            return Err(ScheduleError::UnknownSegment(p));
                        }
                        marks[p as usize].entry(k).or_default().0.push(s);
                    }
                    Action::Split(p) => {
                        if p as usize >= s_count {
                            return Err(ScheduleError::UnknownSegment(p));
                        }
                        marks[p as usize].entry(k).or_default().1.push(s);
                    }
                    Action::Pass => {}
                }
            }
        }
    }

    let mut pickup_site = Vec::with_capacity(r_count);
    let mut dropoff_site = Vec::with_capacity(r_count);
    for r in 0..r_count {
        if pickups[r].len() != 1 {
            return Err(ScheduleError::PickupCount(r as u32, pickups[r].len()));
        }
        if dropoffs[r].len() != 1 {
            return Err(ScheduleError::DropoffCount(r as u32, dropoffs[r].len()));
        }
        pickup_site.push(pickups[r][0]);
        dropoff_site.push(dropoffs[r][0]);
    }

    // Segments: shape, declared path, stop alignment, arc cover.
    let mut spans: Vec<Vec<(usize, usize)>> = Vec::with_capacity(s_count);
    let mut cover: Vec<Vec<Option<SegCover>>> = routes
        .iter()
        .map(|r| vec![None; r.arc_count()])
        .collect();
    for (si, seg) in plan.platoons.iter().enumerate() {
        if seg.id as usize != si {
            return Err(ScheduleError::SegmentIdOrder(seg.id));
        }
        if seg.members.len() < 2 {
            return Err(ScheduleError::TooFewMembers(seg.id));
        }
        if !seg.members.windows(2).all(|w| w[0] < w[1]) {
            return Err(ScheduleError::MembersNotSorted(seg.id));
        }
        if let Some(&m) = seg.members.iter().find(|&&m| m as usize >= k_count) {
            return Err(ScheduleError::UnknownMember(seg.id, m));
        }
        if seg.path.len() < 2 {
            return Err(ScheduleError::PathTooShort(seg.id));
        }
        let path_idx: Vec<usize> = seg
            .path
            .iter()
            .map(|&node| {
                net.node_index(node)
                    .ok_or(ScheduleError::UnknownPathNode { segment: seg.id, node })
            })
            .collect::<Result<_, _>>()?;

        // Every vehicle marking this segment must be a member, and every
        // member must mark it exactly once in join-before-split shape.
        for &k in marks[si].keys() {
            if !seg.members.contains(&(k as u32)) {
                return Err(ScheduleError::MemberListMismatch {
                    segment: seg.id,
                    vehicle: k as u32,
                });
            }
        }
        let mut seg_spans = Vec::with_capacity(seg.members.len());
        let mut offsets: Option<Vec<usize>> = None;
        for &m in &seg.members {
            let (joins, splits) = marks[si]
                .get(&(m as usize))
                .ok_or(ScheduleError::MemberListMismatch {
                    segment: seg.id,
                    vehicle: m,
                })?;
            if joins.len() != 1 || splits.len() != 1 || joins[0] >= splits[0] {
                return Err(ScheduleError::JoinSplitShape {
                    segment: seg.id,
                    vehicle: m,
                });
            }
            let route = &routes[m as usize];
            let (a, b) = (route.stop_pos[joins[0]], route.stop_pos[splits[0]]);
            if route.nodes[a..=b] != path_idx[..] {
                return Err(ScheduleError::PathMismatch {
                    segment: seg.id,
                    vehicle: m,
                });
            }
            // Members halt together, so they must stop together.
            let my_offsets: Vec<usize> = route
                .stop_pos
                .iter()
                .filter(|&&p| p >= a && p <= b)
                .map(|&p| p - a)
                .collect();
            match &offsets {
                None => offsets = Some(my_offsets),
                Some(first) => {
                    if *first != my_offsets {
                        return Err(ScheduleError::StopsMisaligned { segment: seg.id });
                    }
                }
            }
            #[allow(clippy::needless_range_loop)]
            for arc in a..b {
                if let Some(prev) = cover[m as usize][arc] {
                    return Err(ScheduleError::OverlappingPlatoons {
                        vehicle: m,
                        a: prev.seg as u32,
                        b: seg.id,
                    });
                }
                cover[m as usize][arc] = Some(SegCover { seg: si, offset: arc - a });
            }
            seg_spans.push((a, b));
        }
        spans.push(seg_spans);
    }

    // Resolve each request's custody chain through its transfers.
    let mut per_request: Vec<Vec<usize>> = vec![Vec::new(); r_count];
    for (ti, t) in plan.transfers.iter().enumerate() {
        if t.request as usize >= r_count {
            return Err(ScheduleError::UnknownRequest(t.request));
        }
        per_request[t.request as usize].push(ti);
    }
    let member_slot = |seg: &super::PlatoonSegment, v: u32| {
        seg.members.iter().position(|&m| m == v)
    };
    let mut chains = Vec::with_capacity(r_count);
    for r in 0..r_count {
        let pick = pickup_site[r];
        let drop = dropoff_site[r];
        let mut legs = Vec::new();
        let mut resolved = Vec::new();
        // Position each vehicle must have reached before its next
        // involvement with this request.
        let mut progress: HashMap<usize, usize> = HashMap::new();
        progress.insert(pick.vehicle, pick.pos);
        let mut carrier = pick.vehicle;
        for &ti in &per_request[r] {
            let t = &plan.transfers[ti];
            if t.from == t.to {
                return Err(ScheduleError::TransferToSelf(t.request));
            }
            if t.from as usize != carrier
                || t.from as usize >= k_count
                || t.to as usize >= k_count
            {
                return Err(ScheduleError::TransferChainBroken(t.request));
            }
            let (tail, head) = t.arc;
            let (ti_idx, hj_idx) = match (net.node_index(tail), net.node_index(head)) {
                (Some(a), Some(b)) if ctx.tables.arc_dist(a, b).is_some() => (a, b),
                _ => {
                    return Err(ScheduleError::TransferNotAnArc {
                        request: t.request,
                        from: tail,
                        to: head,
                    })
                }
            };
            let to = t.to as usize;
            let from_route = &routes[carrier];
            let start = progress[&carrier];
            let to_start = *progress.get(&to).unwrap_or(&0);
            // Prefer a handover arc both vehicles traverse inside one
            // platoon segment; fall back to independent first matches so
            // an illegally placed transfer still gets reported downstream
            // rather than rejected here.
            let mut binding = None;
            #[allow(clippy::needless_range_loop)]
            for p in start..from_route.arc_count() {
                if from_route.nodes[p] != ti_idx || from_route.nodes[p + 1] != hj_idx {
                    continue;
                }
                if let Some(c) = cover[carrier][p] {
                    let seg = &plan.platoons[c.seg];
                    if let Some(slot) = member_slot(seg, t.to) {
                        let to_arc = spans[c.seg][slot].0 + c.offset;
                        if to_arc >= to_start {
                            binding = Some((p, to_arc, true));
                            break;
                        }
                    }
                }
            }
            if binding.is_none() {
                let p = (start..from_route.arc_count()).find(|&p| {
                    from_route.nodes[p] == ti_idx && from_route.nodes[p + 1] == hj_idx
                });
                let p = p.ok_or(ScheduleError::TransferUnresolvable {
                    request: t.request,
                    vehicle: t.from,
                })?;
                let to_route = &routes[to];
                let q = (to_start..to_route.arc_count()).find(|&q| {
                    to_route.nodes[q] == ti_idx && to_route.nodes[q + 1] == hj_idx
                });
                let q = q.ok_or(ScheduleError::TransferUnresolvable {
                    request: t.request,
                    vehicle: t.to,
                })?;
                binding = Some((p, q, false));
            }
            let (from_arc, to_arc, platooned) = binding.unwrap();
            legs.push(CarrierLeg {
                vehicle: carrier,
                from_arc: start,
                to_arc: from_arc,
            });
            resolved.push(ResolvedTransfer { index: ti, platooned });
            progress.insert(carrier, from_arc);
            progress.insert(to, to_arc);
            carrier = to;
        }
        if carrier != drop.vehicle {
            return Err(ScheduleError::TransferChainBroken(r as u32));
        }
        let boarded = progress[&carrier];
        if drop.pos < boarded {
            return Err(if per_request[r].is_empty() {
                ScheduleError::DropoffBeforePickup(r as u32, drop.vehicle as u32)
            } else {
                ScheduleError::DropoffBeforeHandover(r as u32)
            });
        }
        if per_request[r].is_empty() && drop.pos == pick.pos {
            // Zero-length ride: the boarding must still precede the
            // alighting within the stop's action list.
            let actions = &plan.routes[carrier].stops[pick.stop].actions;
            let pi = actions.iter().position(|a| *a == Action::Pickup(r as u32));
            let di = actions.iter().position(|a| *a == Action::Dropoff(r as u32));
            if pick.stop != drop.stop || pi > di {
                return Err(ScheduleError::DropoffBeforePickup(r as u32, carrier as u32));
            }
        }
        legs.push(CarrierLeg {
            vehicle: carrier,
            from_arc: boarded,
            to_arc: drop.pos,
        });
        chains.push(Chain { legs, transfers: resolved });
    }

    Ok(Expanded {
        routes,
        pickup_site,
        dropoff_site,
        spans,
        cover,
        chains,
    })
}
