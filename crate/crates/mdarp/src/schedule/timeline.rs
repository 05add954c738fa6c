//! Earliest-feasible timeline construction.
//!
//! Vehicles depart as early as allowed, waiting only for not-yet-ready
//! pickups and for platoon partners. Each platoon segment acts as a
//! barrier: members run freely to the join stop, the last arrival fixes
//! the common departure, and from there the group moves in lockstep
//! (shared arrivals and shared dwells) until the split, after which
//! members are independent again. Join, split and transfer operations
//! themselves take no time.

use super::{expand, Expanded, Plan, ScheduleError, StopTime, Timeline};
use crate::Ctx;

pub fn build_timeline(ctx: &Ctx, plan: &Plan) -> Result<Timeline, ScheduleError> {
    let expanded = expand(ctx, plan)?;
    build_with(ctx, plan, &expanded)
}

enum Phase {
    /// Independent travel over stops `from..=to`. The arrival at `from`
    /// is already known when the phase runs; the arrival at `to` is
    /// produced. Dwells are set for `from..to`, and for `to` as well
    /// when this is the route's final phase.
    Free { from: usize, to: usize, dwell_last: bool },
    Seg(usize),
}

pub(crate) fn build_with(
    ctx: &Ctx,
    plan: &Plan,
    expanded: &Expanded,
) -> Result<Timeline, ScheduleError> {
    let inst = ctx.inst;
    let k_count = inst.vehicles.len();
    let s_count = plan.platoons.len();

    // Latest ready time among pickups at each stop; the vehicle cannot
    // leave the stop before it.
    let mut need: Vec<Vec<f64>> = plan
        .routes
        .iter()
        .map(|r| vec![f64::NEG_INFINITY; r.stops.len()])
        .collect();
    for (r, site) in expanded.pickup_site.iter().enumerate() {
        let slot = &mut need[site.vehicle][site.stop];
        *slot = slot.max(inst.requests[r].ready);
    }

    // Phase lists per vehicle, from the segment spans in stop space.
    let mut phases: Vec<Vec<Phase>> = Vec::with_capacity(k_count);
    for k in 0..k_count {
        let route = &expanded.routes[k];
        let last = route.stop_pos.len() - 1;
        let mut segs: Vec<(usize, usize, usize)> = Vec::new();
        for (si, seg) in plan.platoons.iter().enumerate() {
            if let Some(slot) = seg.members.iter().position(|&m| m as usize == k) {
                let (a, b) = expanded.spans[si][slot];
                let join = route.stop_pos.iter().position(|&p| p == a).unwrap();
                let split = route.stop_pos.iter().position(|&p| p == b).unwrap();
                segs.push((join, split, si));
            }
        }
        segs.sort_unstable();
        let mut list = Vec::new();
        let mut prev_end = 0usize;
        for (join, split, si) in segs {
            if list.is_empty() || prev_end < join {
                list.push(Phase::Free { from: prev_end, to: join, dwell_last: false });
            }
            list.push(Phase::Seg(si));
            prev_end = split;
        }
        list.push(Phase::Free { from: prev_end, to: last, dwell_last: true });
        phases.push(list);
    }

    let mut arrival: Vec<Vec<f64>> = plan
        .routes
        .iter()
        .map(|r| vec![f64::NAN; r.stops.len()])
        .collect();
    let mut dwell: Vec<Vec<f64>> = plan
        .routes
        .iter()
        .map(|r| vec![0.0; r.stops.len()])
        .collect();

    // Time over the expansion arcs [a, b) of vehicle k's walk.
    let leg_time = |k: usize, a: usize, b: usize| -> f64 {
        let nodes = &expanded.routes[k].nodes;
        let mut t = 0.0;
        for p in a..b {
            t += ctx.tables.arc_time(nodes[p], nodes[p + 1]).unwrap();
        }
        t
    };
    let need_dwell = |k: usize, stop: usize, at: f64| -> f64 { (need[k][stop] - at).max(0.0) };

    let mut phase_idx = vec![0usize; k_count];
    let mut waiting: Vec<Option<usize>> = vec![None; k_count];
    let mut earliest = vec![0.0f64; k_count];
    let mut waiting_count = vec![0usize; s_count];
    let mut resolved = vec![false; s_count];

    loop {
        let mut progress = false;
        for k in 0..k_count {
            while waiting[k].is_none() && phase_idx[k] < phases[k].len() {
                match phases[k][phase_idx[k]] {
                    Phase::Free { from, to, dwell_last } => {
                        if phase_idx[k] == 0 {
                            arrival[k][0] = inst.vehicles[k].ready;
                        }
                        let mut dep = arrival[k][from];
                        if from < to || dwell_last {
                            dwell[k][from] = need_dwell(k, from, dep);
                            dep += dwell[k][from];
                        }
                        for s in from + 1..=to {
                            let pos = &expanded.routes[k].stop_pos;
                            let t = dep + leg_time(k, pos[s - 1], pos[s]);
                            arrival[k][s] = t;
                            if s < to || dwell_last {
                                dwell[k][s] = need_dwell(k, s, t);
                                dep = t + dwell[k][s];
                            }
                        }
                        phase_idx[k] += 1;
                        progress = true;
                    }
                    Phase::Seg(si) => {
                        // Arrival at the join stop is known; park until
                        // every member is here.
                        let join = join_stop(plan, expanded, si, k);
                        earliest[k] = arrival[k][join]
                            + need_dwell(k, join, arrival[k][join]);
                        waiting[k] = Some(si);
                        waiting_count[si] += 1;
                        progress = true;
                    }
                }
            }
        }

        for si in 0..s_count {
            if resolved[si] || waiting_count[si] != plan.platoons[si].members.len() {
                continue;
            }
            let seg = &plan.platoons[si];
            let members: Vec<usize> = seg.members.iter().map(|&m| m as usize).collect();
            // Stop indices of each member along the shared path; offsets
            // are identical across members by validation.
            let aligned: Vec<Vec<usize>> = members
                .iter()
                .zip(&expanded.spans[si])
                .map(|(&m, &(a, b))| {
                    expanded.routes[m]
                        .stop_pos
                        .iter()
                        .enumerate()
                        .filter(|&(_, &p)| p >= a && p <= b)
                        .map(|(s, _)| s)
                        .collect()
                })
                .collect();
            let m0 = members[0];
            let a0 = expanded.spans[si][0].0;

            let dep = members
                .iter()
                .map(|&m| earliest[m])
                .fold(f64::NEG_INFINITY, f64::max);
            for (slot, &m) in members.iter().enumerate() {
                let join = aligned[slot][0];
                dwell[m][join] = dep - arrival[m][join];
            }
            let mut t = dep;
            let mut cur = a0;
            for idx in 1..aligned[0].len() {
                let pos0 = expanded.routes[m0].stop_pos[aligned[0][idx]];
                t += leg_time(m0, cur, pos0);
                cur = pos0;
                for (slot, &m) in members.iter().enumerate() {
                    arrival[m][aligned[slot][idx]] = t;
                }
                if idx < aligned[0].len() - 1 {
                    let shared = members
                        .iter()
                        .enumerate()
                        .map(|(slot, &m)| need_dwell(m, aligned[slot][idx], t))
                        .fold(0.0f64, f64::max);
                    for (slot, &m) in members.iter().enumerate() {
                        dwell[m][aligned[slot][idx]] = shared;
                    }
                    t += shared;
                }
            }
            for &m in &members {
                waiting[m] = None;
                phase_idx[m] += 1;
            }
            resolved[si] = true;
            waiting_count[si] = 0;
            progress = true;
        }

        if phase_idx
            .iter()
            .enumerate()
            .all(|(k, &i)| i == phases[k].len())
        {
            break;
        }
        if !progress {
            let stuck: Vec<u32> = (0..s_count)
                .filter(|&si| !resolved[si])
                .map(|si| si as u32)
                .collect();
            return Err(ScheduleError::CyclicPlatoonWait(stuck));
        }
    }

    let stops = plan
        .routes
        .iter()
        .enumerate()
        .map(|(k, route)| {
            route
                .stops
                .iter()
                .enumerate()
                .map(|(s, stop)| StopTime {
                    node: stop.node,
                    arrival: arrival[k][s],
                    dwell: dwell[k][s],
                })
                .collect()
        })
        .collect();
    let pickup = expanded
        .pickup_site
        .iter()
        .enumerate()
        .map(|(r, site)| arrival[site.vehicle][site.stop].max(inst.requests[r].ready))
        .collect();
    let dropoff = expanded
        .dropoff_site
        .iter()
        .map(|site| arrival[site.vehicle][site.stop])
        .collect();
    Ok(Timeline { stops, pickup, dropoff })
}

fn join_stop(plan: &Plan, expanded: &Expanded, si: usize, vehicle: usize) -> usize {
    let slot = plan.platoons[si]
        .members
        .iter()
        .position(|&m| m as usize == vehicle)
        .unwrap();
    let (a, _) = expanded.spans[si][slot];
    expanded.routes[vehicle]
        .stop_pos
        .iter()
        .position(|&p| p == a)
        .unwrap()
}
