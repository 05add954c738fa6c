//! Seeded sampling of valid plans, the raw material for the property
//! test suites. A sampled plan serves every request, respects vehicle
//! capacities, and may send vehicle groups down shared platoon
//! corridors and hand requests across inside them. As long as the
//! instance has no service windows and every party fits its assigned
//! vehicle alone, the result passes both structural validation and the
//! feasibility check.

use super::{Action, Plan, PlatoonSegment, Route, Stop, TransferRecord};
use crate::network::Network;
use crate::util;
use crate::Ctx;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct SampleConfig {
    /// Chance that a shuffled run of vehicles forms a platoon group.
    pub platoon_prob: f64,
    /// Chance that a platoon group hands one request across.
    pub transfer_prob: f64,
    /// Chance of a service-free waypoint around each route phase.
    pub detour_prob: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            platoon_prob: 0.6,
            transfer_prob: 0.5,
            detour_prob: 0.25,
        }
    }
}

impl SampleConfig {
    /// Plans without platoons or transfers: independent vehicle tours.
    pub fn solo() -> Self {
        SampleConfig {
            platoon_prob: 0.0,
            transfer_prob: 0.0,
            detour_prob: 0.25,
        }
    }
}

pub fn sample_plan(ctx: &Ctx, seed: u64) -> Plan {
    sample_with(ctx, &SampleConfig::default(), seed)
}

/// Appends stops, merging consecutive stops at the same node so the
/// route never repeats a node back to back.
struct StopBuilder<'a> {
    net: &'a Network,
    stops: Vec<Stop>,
}

impl<'a> StopBuilder<'a> {
    fn push(&mut self, idx: usize, actions: Vec<Action>) {
        let node = self.net.node_id(idx);
        if let Some(last) = self.stops.last_mut() {
            if last.node == node {
                last.actions.extend(actions);
                return;
            }
        }
        self.stops.push(Stop { node, actions });
    }
}

/// A pickup-and-dropoff order for `reqs` on one vehicle that keeps the
/// onboard load within `capacity` throughout. Parties larger than the
/// capacity are boarded anyway; the caller inherits the violation.
fn service_order(
    rng: &mut ChaCha8Rng,
    ctx: &Ctx,
    reqs: &[usize],
    capacity: u32,
) -> Vec<(usize, Action)> {
    let party = |r: usize| ctx.inst.requests[r].party;
    let mut pending = reqs.to_vec();
    pending.shuffle(rng);
    let mut active: Vec<usize> = Vec::new();
    let mut onboard = 0u32;
    let mut next = 0;
    let mut out = Vec::with_capacity(2 * reqs.len());
    while next < pending.len() || !active.is_empty() {
        let fits = next < pending.len()
            && (onboard + party(pending[next]) <= capacity || active.is_empty());
        let choice = rng.gen_range(0..usize::from(fits) + active.len());
        if fits && choice == 0 {
            let r = pending[next];
            next += 1;
            onboard += party(r);
            active.push(r);
            let at = ctx.inst.network.node_index(ctx.inst.requests[r].pickup).unwrap();
            out.push((at, Action::Pickup(r as u32)));
        } else {
            let i = choice - usize::from(fits);
            let r = active.swap_remove(i);
            onboard -= party(r);
            let at = ctx.inst.network.node_index(ctx.inst.requests[r].dropoff).unwrap();
            out.push((at, Action::Dropoff(r as u32)));
        }
    }
    out
}

fn maybe_detour(b: &mut StopBuilder, rng: &mut ChaCha8Rng, prob: f64, n: usize) {
    if prob > 0.0 && rng.gen_bool(prob) {
        b.push(rng.gen_range(0..n), Vec::new());
    }
}

struct Corridor {
    seg: u32,
    members: Vec<usize>,
    /// Node indices from join to split, the canonical join-to-split path.
    path: Vec<usize>,
    /// A handover inside the corridor: (request, donor, receiver).
    handover: Option<(usize, usize, usize)>,
}

pub fn sample_with(ctx: &Ctx, cfg: &SampleConfig, seed: u64) -> Plan {
    let inst = ctx.inst;
    let net = &inst.network;
    let n = net.len();
    let k_count = inst.vehicles.len();
    let r_count = inst.requests.len();
    let mut rng = util::rng_from(seed, "sample-plan", &[]);

    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); k_count];
    for r in 0..r_count {
        assigned[rng.gen_range(0..k_count)].push(r);
    }

    // Carve the shuffled vehicle list into platoon groups.
    let mut order: Vec<usize> = (0..k_count).collect();
    order.shuffle(&mut rng);
    let mut corridors: Vec<Corridor> = Vec::new();
    let mut group_of: Vec<Option<usize>> = vec![None; k_count];
    let gmax = inst.params.max_platoon.min(3) as usize;
    let mut i = 0;
    while i < order.len() {
        let left = order.len() - i;
        if left < 2 || gmax < 2 || !rng.gen_bool(cfg.platoon_prob) {
            i += 1;
            continue;
        }
        let size = rng.gen_range(2..=gmax.min(left));
        let mut members = order[i..i + size].to_vec();
        i += size;
        members.sort_unstable();
        let join = rng.gen_range(0..n);
        let split = loop {
            let s = rng.gen_range(0..n);
            if s != join {
                break s;
            }
        };
        let ci = corridors.len();
        for &m in &members {
            group_of[m] = Some(ci);
        }
        let mut handover = None;
        if rng.gen_bool(cfg.transfer_prob) {
            let donor = members[rng.gen_range(0..members.len())];
            let receiver = loop {
                let v = members[rng.gen_range(0..members.len())];
                if v != donor {
                    break v;
                }
            };
            if !assigned[donor].is_empty() {
                let slot = rng.gen_range(0..assigned[donor].len());
                let r = assigned[donor].swap_remove(slot);
                handover = Some((r, donor, receiver));
            }
        }
        corridors.push(Corridor {
            seg: ci as u32,
            members,
            path: ctx.tables.path_indices(join, split),
            handover,
        });
    }

    let mut routes = Vec::with_capacity(k_count);
    for k in 0..k_count {
        let vehicle = &inst.vehicles[k];
        let capacity = vehicle.capacity;
        let mut b = StopBuilder {
            net,
            stops: Vec::new(),
        };
        b.push(net.node_index(vehicle.start).unwrap(), Vec::new());
        match group_of[k] {
            None => {
                maybe_detour(&mut b, &mut rng, cfg.detour_prob, n);
                for (at, action) in service_order(&mut rng, ctx, &assigned[k], capacity) {
                    b.push(at, vec![action]);
                }
                maybe_detour(&mut b, &mut rng, cfg.detour_prob, n);
            }
            Some(ci) => {
                let corridor = &corridors[ci];
                let handover = corridor.handover.filter(|&(_, d, r)| d == k || r == k);
                let reserve = handover.map_or(0, |(r, _, _)| inst.requests[r].party);

                // Requests riding the corridor aboard this vehicle must
                // share its capacity with a handed-over party.
                let mut before = Vec::new();
                let mut through = Vec::new();
                let mut after = Vec::new();
                let mut budget = capacity.saturating_sub(reserve);
                let mut own = assigned[k].clone();
                own.shuffle(&mut rng);
                for r in own {
                    let party = inst.requests[r].party;
                    if party <= budget && rng.gen_bool(0.5) {
                        budget -= party;
                        through.push(r);
                    } else if rng.gen_bool(0.5) {
                        before.push(r);
                    } else {
                        after.push(r);
                    }
                }

                maybe_detour(&mut b, &mut rng, cfg.detour_prob, n);
                for (at, action) in service_order(&mut rng, ctx, &before, capacity) {
                    b.push(at, vec![action]);
                }
                for &r in &through {
                    let at = net.node_index(inst.requests[r].pickup).unwrap();
                    b.push(at, vec![Action::Pickup(r as u32)]);
                }
                if let Some((r, donor, _)) = handover {
                    if donor == k {
                        let at = net.node_index(inst.requests[r].pickup).unwrap();
                        b.push(at, vec![Action::Pickup(r as u32)]);
                    }
                }
                b.push(corridor.path[0], vec![Action::Join(corridor.seg)]);
                b.push(
                    *corridor.path.last().unwrap(),
                    vec![Action::Split(corridor.seg)],
                );
                if let Some((r, _, receiver)) = handover {
                    if receiver == k {
                        let at = net.node_index(inst.requests[r].dropoff).unwrap();
                        b.push(at, vec![Action::Dropoff(r as u32)]);
                    }
                }
                through.shuffle(&mut rng);
                for &r in &through {
                    let at = net.node_index(inst.requests[r].dropoff).unwrap();
                    b.push(at, vec![Action::Dropoff(r as u32)]);
                }
                for (at, action) in service_order(&mut rng, ctx, &after, capacity) {
                    b.push(at, vec![action]);
                }
                maybe_detour(&mut b, &mut rng, cfg.detour_prob, n);
            }
        }
        if let Some(end) = vehicle.end {
            b.push(net.node_index(end).unwrap(), Vec::new());
        }
        routes.push(Route {
            vehicle: vehicle.id,
            stops: b.stops,
        });
    }

    let platoons = corridors
        .iter()
        .map(|c| PlatoonSegment {
            id: c.seg,
            members: c.members.iter().map(|&m| m as u32).collect(),
            path: c.path.iter().map(|&p| net.node_id(p)).collect(),
        })
        .collect();
    let transfers = corridors
        .iter()
        .filter_map(|c| {
            let (r, donor, receiver) = c.handover?;
            Some(TransferRecord {
                request: r as u32,
                from: donor as u32,
                to: receiver as u32,
                arc: (net.node_id(c.path[0]), net.node_id(c.path[1])),
            })
        })
        .collect();

    Plan {
        routes,
        platoons,
        transfers,
    }
}
