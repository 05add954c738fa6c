//! Plumbing shared by the search phases: carving sub-instances out of
//! the full problem, turning edited stop lists into complete plans with
//! derived platoon segments, anchoring transfer records, and installing
//! a sub-instance result back into the full plan.
//!
//! The searches edit routes as plain stop lists with Join/Split actions
//! carrying scratch segment ids. [`finalize`] is the single place that
//! turns such a sketch into a `Plan`: it derives every segment's path
//! from its members' stop chains and rejects sketches whose members
//! disagree, so by the time a candidate reaches the evaluator its
//! structure is already coherent.

use std::collections::HashMap;
use std::sync::Arc;

use crate::instance::{Instance, Meta};
use crate::network::{Network, NodeId, ShortestPathTables};
use crate::schedule::{
    evaluate_plan, Action, Plan, PlatoonSegment, Route, Stop, TransferRecord,
};
use crate::Ctx;

/// Merges consecutive stops at the same node, appending actions in
/// order. Route edits go through this so inserted nodes that land on an
/// existing stop fold into it instead of producing a repeated stop.
pub(crate) fn normalize(stops: Vec<Stop>) -> Vec<Stop> {
    let mut out: Vec<Stop> = Vec::with_capacity(stops.len());
    for stop in stops {
        match out.last_mut() {
            Some(prev) if prev.node == stop.node => prev.actions.extend(stop.actions),
            _ => out.push(stop),
        }
    }
    out
}

/// Stop indices of one member's corridor boundaries.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SegBound {
    pub member: usize,
    pub join: usize,
    pub split: usize,
}

/// A finalized candidate: the plan plus, per segment, where each
/// member's corridor starts and ends.
pub(crate) struct Built {
    pub plan: Plan,
    pub bounds: Vec<Vec<SegBound>>,
}

/// Assembles routes with scratch Join/Split ids into a plan. Returns
/// `None` when the sketch is incoherent: unpaired or repeated markers,
/// a split not after its join, or members whose chains between the
/// markers trace different paths.
pub(crate) fn finalize(
    net: &Network,
    tables: &ShortestPathTables,
    routes: Vec<Vec<Stop>>,
) -> Option<Built> {
    let routes: Vec<Vec<Stop>> = routes.into_iter().map(normalize).collect();

    #[derive(Default)]
    struct Sketch {
        joins: Vec<(usize, usize)>,
        splits: Vec<(usize, usize)>,
    }
    let mut sketches: HashMap<u32, Sketch> = HashMap::new();
    for (k, stops) in routes.iter().enumerate() {
        for (s, stop) in stops.iter().enumerate() {
            for action in &stop.actions {
                match *action {
                    Action::Join(t) => sketches.entry(t).or_default().joins.push((k, s)),
                    Action::Split(t) => sketches.entry(t).or_default().splits.push((k, s)),
                    _ => {}
                }
            }
        }
    }

    let mut segs: Vec<(u32, Vec<SegBound>)> = Vec::with_capacity(sketches.len());
    for (&scratch, sketch) in &sketches {
        let mut joins: HashMap<usize, usize> = HashMap::new();
        let mut splits: HashMap<usize, usize> = HashMap::new();
        for &(k, s) in &sketch.joins {
            if joins.insert(k, s).is_some() {
                return None;
            }
        }
        for &(k, s) in &sketch.splits {
            if splits.insert(k, s).is_some() {
                return None;
            }
        }
        let mut members: Vec<usize> = joins.keys().copied().collect();
        members.sort_unstable();
        if members.len() < 2 || splits.len() != members.len() {
            return None;
        }
        let mut bounds = Vec::with_capacity(members.len());
        for &k in &members {
            let join = joins[&k];
            let split = *splits.get(&k)?;
            if split <= join {
                return None;
            }
            bounds.push(SegBound { member: k, join, split });
        }
        segs.push((scratch, bounds));
    }
    // Dense ids in a canonical order: by lowest member, then by that
    // member's position along its route.
    segs.sort_by_key(|(_, b)| (b[0].member, b[0].join));

    let mut platoons = Vec::with_capacity(segs.len());
    let mut seg_of_scratch: HashMap<u32, usize> = HashMap::with_capacity(segs.len());
    let mut bounds_out = Vec::with_capacity(segs.len());
    for (id, (scratch, bounds)) in segs.iter().enumerate() {
        let mut path: Option<Vec<NodeId>> = None;
        for b in bounds {
            let chain = chain_path(net, tables, &routes[b.member][b.join..=b.split])?;
            match &path {
                None => path = Some(chain),
                Some(p) => {
                    if *p != chain {
                        return None;
                    }
                }
            }
        }
        platoons.push(PlatoonSegment {
            id: id as u32,
            members: bounds.iter().map(|b| b.member as u32).collect(),
            path: path?,
        });
        seg_of_scratch.insert(*scratch, id);
        bounds_out.push(bounds.clone());
    }

    // Rewrite scratch ids on the stops to the dense ids.
    let routes: Vec<Route> = routes
        .into_iter()
        .enumerate()
        .map(|(k, mut stops)| {
            for stop in &mut stops {
                for action in &mut stop.actions {
                    match action {
                        Action::Join(t) | Action::Split(t) => *t = seg_of_scratch[t] as u32,
                        _ => {}
                    }
                }
            }
            Route { vehicle: k as u32, stops }
        })
        .collect();

    Some(Built {
        plan: Plan { routes, platoons, transfers: Vec::new() },
        bounds: bounds_out,
    })
}

/// Node path traced by a chain of stops, legs expanded via the stored
/// shortest paths. `None` if a stop names an unknown node.
pub(crate) fn chain_path(
    net: &Network,
    tables: &ShortestPathTables,
    stops: &[Stop],
) -> Option<Vec<NodeId>> {
    let mut path: Vec<NodeId> = vec![stops.first()?.node];
    let mut at = net.node_index(stops[0].node)?;
    for stop in &stops[1..] {
        let to = net.node_index(stop.node)?;
        let leg = tables.path_node_ids(at, to);
        path.extend_from_slice(&leg[1..]);
        at = to;
    }
    Some(path)
}

/// Stop index of an action satisfying `pred`, scanning forward.
pub(crate) fn find_stop(stops: &[Stop], pred: impl Fn(&Action) -> bool) -> Option<usize> {
    stops.iter().position(|s| s.actions.iter().any(&pred))
}

/// Chooses the handover record for a passenger moving between two
/// members of a finalized candidate: the earliest shared segment where
/// the donor already holds the passenger and the receiver has not yet
/// delivered it, attributed to that segment's first arc.
pub(crate) fn anchor_transfer(
    built: &Built,
    request: u32,
    from: usize,
    to: usize,
) -> Option<TransferRecord> {
    let pickup = find_stop(&built.plan.routes[from].stops, |a| *a == Action::Pickup(request))?;
    let dropoff = find_stop(&built.plan.routes[to].stops, |a| *a == Action::Dropoff(request))?;
    let mut shared: Vec<(usize, usize, usize)> = Vec::new();
    for (si, bounds) in built.bounds.iter().enumerate() {
        let donor = bounds.iter().find(|b| b.member == from);
        let receiver = bounds.iter().find(|b| b.member == to);
        if let (Some(d), Some(r)) = (donor, receiver) {
            shared.push((d.join, si, r.join));
        }
    }
    shared.sort_unstable();
    for (donor_join, si, receiver_join) in shared {
        if donor_join >= pickup && receiver_join <= dropoff {
            let path = &built.plan.platoons[si].path;
            return Some(TransferRecord {
                request,
                from: from as u32,
                to: to as u32,
                arc: (path[0], path[1]),
            });
        }
    }
    None
}

/// The touched slice of the full problem: a subset of vehicles with the
/// requests they serve, renumbered densely on the shared network.
pub(crate) struct SubWorld {
    pub inst: Instance,
    /// Dense vehicle -> original vehicle index, ascending.
    pub vehicles: Vec<usize>,
    /// Dense request -> original request index, ascending.
    pub requests: Vec<usize>,
}

impl SubWorld {
    pub fn ctx(&self, tables: &Arc<ShortestPathTables>) -> Ctx<'_> {
        Ctx::with_tables(&self.inst, Arc::clone(tables))
    }

    pub fn dense_request(&self, orig: u32) -> u32 {
        self.requests.binary_search(&(orig as usize)).unwrap() as u32
    }

    pub fn dense_vehicle(&self, orig: u32) -> u32 {
        self.vehicles.binary_search(&(orig as usize)).unwrap() as u32
    }
}

/// Carves the sub-instance for `vehicles` out of the full problem and
/// translates their routes and transfers from `plan` into dense ids.
/// The vehicle set must be closed under transfers.
pub(crate) fn extract(
    full: &Instance,
    plan: &Plan,
    vehicles: &[usize],
) -> (SubWorld, Vec<Vec<Stop>>, Vec<TransferRecord>) {
    let mut vehicles: Vec<usize> = vehicles.to_vec();
    vehicles.sort_unstable();
    let mut requests: Vec<usize> = Vec::new();
    for &k in &vehicles {
        for stop in &plan.route(k as u32).stops {
            for action in &stop.actions {
                if let Action::Pickup(r) = action {
                    requests.push(*r as usize);
                }
            }
        }
    }
    requests.sort_unstable();

    let inst = Instance {
        network: full.network.clone(),
        vehicles: vehicles
            .iter()
            .enumerate()
            .map(|(k, &orig)| {
                let mut v = full.vehicles[orig];
                v.id = k as u32;
                v
            })
            .collect(),
        requests: requests
            .iter()
            .enumerate()
            .map(|(r, &orig)| {
                let mut req = full.requests[orig].clone();
                req.id = r as u32;
                req
            })
            .collect(),
        params: full.params,
        meta: Meta::default(),
    };
    let sub = SubWorld { inst, vehicles, requests };

    let routes: Vec<Vec<Stop>> = sub
        .vehicles
        .iter()
        .map(|&orig| {
            let mut stops = plan.route(orig as u32).stops.clone();
            for stop in &mut stops {
                for action in &mut stop.actions {
                    match action {
                        Action::Pickup(r) | Action::Dropoff(r) => *r = sub.dense_request(*r),
                        _ => {}
                    }
                }
            }
            stops
        })
        .collect();
    let transfers: Vec<TransferRecord> = plan
        .transfers
        .iter()
        .filter(|t| sub.vehicles.binary_search(&(t.from as usize)).is_ok())
        .map(|t| TransferRecord {
            request: sub.dense_request(t.request),
            from: sub.dense_vehicle(t.from),
            to: sub.dense_vehicle(t.to),
            arc: t.arc,
        })
        .collect();
    (sub, routes, transfers)
}

/// Prices a candidate plan for a sub-world. `None` means structurally
/// invalid or infeasible; both just disqualify the candidate.
pub(crate) fn eval_total(
    sub: &SubWorld,
    tables: &Arc<ShortestPathTables>,
    plan: &Plan,
) -> Option<f64> {
    let ctx = sub.ctx(tables);
    evaluate_plan(&ctx, plan).ok().map(|(_, c)| c.total)
}

/// Replaces the sub-world's slice of the full plan with `sub_plan`:
/// routes are written back, the vehicles' old segments and transfers
/// are dropped, the new ones are translated in, and segment ids are
/// renumbered into canonical dense order across the whole plan.
pub(crate) fn install(full: &mut Plan, sub: &SubWorld, sub_plan: &Plan) {
    let in_set = |v: u32| sub.vehicles.binary_search(&(v as usize)).is_ok();
    let scratch_base = full.platoons.iter().map(|s| s.id + 1).max().unwrap_or(0);

    for (k, route) in sub_plan.routes.iter().enumerate() {
        let orig = sub.vehicles[k];
        let mut stops = route.stops.clone();
        for stop in &mut stops {
            for action in &mut stop.actions {
                match action {
                    Action::Pickup(r) | Action::Dropoff(r) => {
                        *r = sub.requests[*r as usize] as u32
                    }
                    Action::Join(t) | Action::Split(t) => *t += scratch_base,
                    _ => {}
                }
            }
        }
        let slot = full
            .routes
            .iter()
            .position(|r| r.vehicle == orig as u32)
            .expect("full plan covers every vehicle");
        full.routes[slot].stops = stops;
    }

    full.platoons.retain(|s| !s.members.iter().all(|&m| in_set(m)));
    for seg in &sub_plan.platoons {
        full.platoons.push(PlatoonSegment {
            id: seg.id + scratch_base,
            members: seg.members.iter().map(|&m| sub.vehicles[m as usize] as u32).collect(),
            path: seg.path.clone(),
        });
    }
    full.transfers.retain(|t| !(in_set(t.from) && in_set(t.to)));
    for t in &sub_plan.transfers {
        full.transfers.push(TransferRecord {
            request: sub.requests[t.request as usize] as u32,
            from: sub.vehicles[t.from as usize] as u32,
            to: sub.vehicles[t.to as usize] as u32,
            arc: t.arc,
        });
    }
    renumber_segments(full);
}

/// Reassigns dense segment ids in canonical order (lowest member, then
/// join position along its route) and rewrites the stop actions.
pub(crate) fn renumber_segments(plan: &mut Plan) {
    let mut keyed: Vec<(usize, usize, usize)> = Vec::with_capacity(plan.platoons.len());
    for (si, seg) in plan.platoons.iter().enumerate() {
        let lead = seg.members[0];
        let join = find_stop(&plan.route(lead).stops, |a| *a == Action::Join(seg.id))
            .expect("segment lead carries its join marker");
        keyed.push((lead as usize, join, si));
    }
    keyed.sort_unstable();
    let mut new_id = vec![0u32; plan.platoons.len()];
    for (new, &(_, _, old)) in keyed.iter().enumerate() {
        new_id[old] = new as u32;
    }
    let old_of_new: HashMap<u32, u32> = plan
        .platoons
        .iter()
        .enumerate()
        .map(|(old, seg)| (seg.id, new_id[old]))
        .collect();
    for route in &mut plan.routes {
        for stop in &mut route.stops {
            for action in &mut stop.actions {
                match action {
                    Action::Join(t) | Action::Split(t) => *t = old_of_new[t],
                    _ => {}
                }
            }
        }
    }
    for (old, seg) in plan.platoons.iter_mut().enumerate() {
        seg.id = new_id[old];
    }
    plan.platoons.sort_by_key(|s| s.id);
}
