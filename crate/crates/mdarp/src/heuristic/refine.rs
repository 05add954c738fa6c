//! Refinement passes applied to a candidate platoon: stretching the
//! shared corridor outward while it keeps paying, and rebuilding the
//! deliveries of passengers who ride the corridor so that whichever
//! member exits closest to a destination carries it out, with the
//! handover recorded as an en-route transfer.
//!
//! Both passes work on a [`Working`] sketch (routes with scratch
//! segment markers plus transfer intents) and reprice every candidate
//! through the exact evaluator; only strictly improving edits are kept.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::network::ShortestPathTables;
use crate::schedule::{Action, Plan, Stop};

use super::assemble::{self, find_stop, SubWorld};
use super::joinsplit::search_join_split;
use super::{SearchConfig, GAIN_EPS};

/// Editable candidate state: routes in dense sub-world ids with scratch
/// Join/Split markers, plus transfer intents (request, donor vehicle,
/// receiving vehicle). Records are anchored to concrete arcs only when
/// the sketch is priced.
#[derive(Clone)]
pub(crate) struct Working {
    pub routes: Vec<Vec<Stop>>,
    pub intents: Vec<(u32, usize, usize)>,
}

/// A priced sketch: the working state, its finalized plan, and the
/// plan's exact total cost.
pub(crate) struct Refined {
    pub working: Working,
    pub plan: Plan,
    pub total: f64,
}

/// Finalizes and prices a sketch. `None` when the sketch is incoherent,
/// a transfer intent has no qualifying shared segment, or the plan is
/// infeasible.
pub(crate) fn price(
    sub: &SubWorld,
    tables: &Arc<ShortestPathTables>,
    working: &Working,
) -> Option<(Plan, f64)> {
    let built = assemble::finalize(&sub.inst.network, tables, working.routes.clone())?;
    let mut plan = built.plan.clone();
    for &(r, from, to) in &working.intents {
        plan.transfers.push(assemble::anchor_transfer(&built, r, from, to)?);
    }
    let total = assemble::eval_total(sub, tables, &plan)?;
    Some((plan, total))
}

pub(crate) fn refined(
    sub: &SubWorld,
    tables: &Arc<ShortestPathTables>,
    working: Working,
) -> Option<Refined> {
    let (plan, total) = price(sub, tables, &working)?;
    Some(Refined { working, plan, total })
}

/// Vehicles whose routes carry a Join marker for `scratch`, ascending.
fn members_of(routes: &[Vec<Stop>], scratch: u32) -> Vec<usize> {
    (0..routes.len())
        .filter(|&k| find_stop(&routes[k], |a| *a == Action::Join(scratch)).is_some())
        .collect()
}

fn take_action(stop: &mut Stop, which: &Action) -> Option<Action> {
    let at = stop.actions.iter().position(|a| a == which)?;
    Some(stop.actions.remove(at))
}

/// Grows the corridor of the segment marked `scratch` one stop at a
/// time: a new join before the current one, or a new split after the
/// current one, drawn from the members' neighboring stops and the
/// two-point candidate list between them. The old boundary stop stays
/// as an interior stop every member already shares. Stops at the first
/// round with no strictly improving move.
pub(crate) fn extend(
    sub: &SubWorld,
    tables: &Arc<ShortestPathTables>,
    cfg: &SearchConfig,
    scratch: u32,
    state: &mut Refined,
) {
    if !cfg.extension {
        return;
    }
    let net = &sub.inst.network;
    for _ in 0..cfg.max_extension_rounds {
        let members = members_of(&state.working.routes, scratch);
        if members.len() < 2 {
            return;
        }
        let mut best: Option<(f64, Working, Plan)> = None;
        for outward in [false, true] {
            // Boundary stop index per member; the side is skipped when
            // any member has no stop beyond it to anchor on.
            let idx: Option<Vec<usize>> = members
                .iter()
                .map(|&k| {
                    let stops = &state.working.routes[k];
                    if outward {
                        find_stop(stops, |a| *a == Action::Split(scratch))
                            .filter(|&s| s + 1 < stops.len())
                    } else {
                        find_stop(stops, |a| *a == Action::Join(scratch)).filter(|&j| j > 0)
                    }
                })
                .collect();
            let Some(idx) = idx else { continue };
            let step = |i: usize| if outward { i + 1 } else { i - 1 };
            let anchor_lo = state.working.routes[members[0]][step(idx[0])].node;
            let last = members.len() - 1;
            let anchor_hi = state.working.routes[members[last]][step(idx[last])].node;
            let boundary = state.working.routes[members[0]][idx[0]].node;

            let mut nodes = vec![anchor_lo, anchor_hi];
            if let (Some(a), Some(b)) = (net.node_index(anchor_lo), net.node_index(anchor_hi)) {
                if a != b {
                    let list = search_join_split(tables, a, b, cfg.n_max, cfg.phi);
                    nodes.extend(list.nodes().map(|i| net.nodes()[i].id));
                }
            }
            let mut seen = Vec::new();
            for node in nodes {
                if node == boundary || seen.contains(&node) {
                    continue;
                }
                seen.push(node);
                let mut cand = state.working.clone();
                for (pos, &k) in members.iter().enumerate() {
                    let stops = &mut cand.routes[k];
                    let marker = if outward {
                        take_action(&mut stops[idx[pos]], &Action::Split(scratch))
                    } else {
                        take_action(&mut stops[idx[pos]], &Action::Join(scratch))
                    };
                    let Some(marker) = marker else { return };
                    let at = if outward { idx[pos] + 1 } else { idx[pos] };
                    stops.insert(at, Stop::new(node, vec![marker]));
                }
                if let Some((plan, total)) = price(sub, tables, &cand) {
                    if total < state.total - GAIN_EPS
                        && best.as_ref().is_none_or(|(b, ..)| total < *b)
                    {
                        best = Some((total, cand, plan));
                    }
                }
            }
        }
        match best {
            Some((total, working, plan)) => {
                state.working = working;
                state.plan = plan;
                state.total = total;
            }
            None => return,
        }
    }
}

/// Reassigns the deliveries of passengers who ride the whole corridor
/// of segment `scratch`: each may leave with any member at the split,
/// the handover en route recorded as a transfer. All member assignments
/// are tried when the space is small, a seeded random draw otherwise;
/// moved deliveries are re-inserted one at a time at their cheapest
/// post-split position. Keeps the best strictly improving assignment.
pub(crate) fn search_transfers(
    sub: &SubWorld,
    tables: &Arc<ShortestPathTables>,
    cfg: &SearchConfig,
    scratch: u32,
    state: &mut Refined,
    rng: &mut ChaCha8Rng,
) {
    if !cfg.transfers {
        return;
    }
    let members = members_of(&state.working.routes, scratch);
    if members.len() < 2 {
        return;
    }
    // Passengers aboard for the full corridor: picked up at or before
    // the join, delivered at or after the split, not already handed
    // over elsewhere.
    let mut riders: Vec<(u32, usize)> = Vec::new();
    for &k in &members {
        let stops = &state.working.routes[k];
        let join = find_stop(stops, |a| *a == Action::Join(scratch)).unwrap();
        let split = find_stop(stops, |a| *a == Action::Split(scratch)).unwrap();
        for r in 0..sub.inst.requests.len() as u32 {
            if state.working.intents.iter().any(|&(ir, ..)| ir == r) {
                continue;
            }
            let pickup = find_stop(stops, |a| *a == Action::Pickup(r));
            let dropoff = find_stop(stops, |a| *a == Action::Dropoff(r));
            if let (Some(p), Some(d)) = (pickup, dropoff) {
                if p <= join && d >= split {
                    riders.push((r, k));
                }
            }
        }
    }
    riders.sort_unstable();
    if riders.is_empty() {
        return;
    }

    let space = (members.len() as u64).saturating_pow(riders.len() as u32);
    let assignments: Vec<Vec<usize>> = if space <= cfg.transfer_exhaustive_limit as u64 {
        let mut all = Vec::with_capacity(space as usize);
        let mut digits = vec![0usize; riders.len()];
        loop {
            all.push(digits.iter().map(|&d| members[d]).collect());
            let mut i = 0;
            while i < digits.len() {
                digits[i] += 1;
                if digits[i] < members.len() {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
        all
    } else {
        (0..cfg.n_recon)
            .map(|_| {
                riders
                    .iter()
                    .map(|_| members[rng.gen_range(0..members.len())])
                    .collect()
            })
            .collect()
    };

    let mut best: Option<(f64, Working, Plan)> = None;
    for assignment in &assignments {
        if assignment
            .iter()
            .zip(&riders)
            .all(|(&to, &(_, carrier))| to == carrier)
        {
            continue;
        }
        let Some((total, working, plan)) =
            apply_assignment(sub, tables, scratch, state, &riders, assignment)
        else {
            continue;
        };
        if total < state.total - GAIN_EPS && best.as_ref().is_none_or(|(b, ..)| total < *b) {
            best = Some((total, working, plan));
        }
    }
    if let Some((total, working, plan)) = best {
        state.working = working;
        state.plan = plan;
        state.total = total;
    }
}

/// Moves each reassigned delivery to its receiver, cheapest feasible
/// post-split position first, committing one passenger at a time so
/// every intermediate sketch is a complete plan. `None` when any move
/// has no feasible position.
fn apply_assignment(
    sub: &SubWorld,
    tables: &Arc<ShortestPathTables>,
    scratch: u32,
    state: &Refined,
    riders: &[(u32, usize)],
    assignment: &[usize],
) -> Option<(f64, Working, Plan)> {
    let mut cur = state.working.clone();
    let mut priced: Option<(Plan, f64)> = None;
    for (&(r, carrier), &to) in riders.iter().zip(assignment) {
        if to == carrier {
            continue;
        }
        let d_idx = find_stop(&cur.routes[carrier], |a| *a == Action::Dropoff(r))?;
        take_action(&mut cur.routes[carrier][d_idx], &Action::Dropoff(r))?;
        let terminal = sub.inst.vehicles[carrier].end.is_some()
            && d_idx + 1 == cur.routes[carrier].len();
        if cur.routes[carrier][d_idx].actions.is_empty() && d_idx != 0 && !terminal {
            cur.routes[carrier].remove(d_idx);
        }

        let node = sub.inst.requests[r as usize].dropoff;
        let split = find_stop(&cur.routes[to], |a| *a == Action::Split(scratch))?;
        let tail = usize::from(
            sub.inst.vehicles[to].end.is_some() && cur.routes[to].len() > split + 1,
        );
        let mut best_pos: Option<(f64, Working, Plan)> = None;
        for p in split + 1..=cur.routes[to].len() - tail {
            let mut cand = cur.clone();
            cand.routes[to].insert(p, Stop::new(node, vec![Action::Dropoff(r)]));
            cand.intents.push((r, carrier, to));
            if let Some((plan, total)) = price(sub, tables, &cand) {
                if best_pos.as_ref().is_none_or(|(b, ..)| total < *b) {
                    best_pos = Some((total, cand, plan));
                }
            }
        }
        let (total, cand, plan) = best_pos?;
        cur = cand;
        priced = Some((plan, total));
    }
    priced.map(|(plan, total)| (total, cur, plan))
}
