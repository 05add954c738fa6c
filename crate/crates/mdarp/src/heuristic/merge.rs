//! Multi-vehicle platooning. Starting from the two-vehicle platoons,
//! two kinds of moves are applied while any of them pays: fusing two
//! platoons whose paths share a stretch into a larger group over the
//! longest common contiguous sub-path, and inserting a vehicle that has
//! no platoon into an existing one along such a stretch of its own
//! route. Either move splits the touched corridor into staggered
//! before / shared / after segments so memberships stay exact, then
//! re-runs corridor extension and the handover search on the shared
//! part. The single best improving move is applied per round.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::network::{Network, NodeId, ShortestPathTables};
use crate::schedule::{Action, Plan, PlatoonSegment, Stop};
use crate::util::rng_from;
use crate::Ctx;

use super::assemble::{self, chain_path, find_stop, SubWorld};
use super::lcps::find_lcps;
use super::refine::{self, Working};
use super::{HeuristicError, SearchConfig, GAIN_EPS};

pub fn merge_platoons(ctx: &Ctx, plan: &Plan, cfg: &SearchConfig) -> Result<Plan, HeuristicError> {
    let mut plan = plan.clone();
    // Every applied move strictly improves, so this terminates; the cap
    // only guards against degenerate arithmetic.
    for round in 1..=1000u64 {
        match best_move(ctx, &plan, cfg, round) {
            Some((sub, sub_plan)) => assemble::install(&mut plan, &sub, &sub_plan),
            None => break,
        }
    }
    Ok(plan)
}

/// Evaluates every legal fuse and insertion against the incumbent and
/// returns the most improving one, if any improves.
fn best_move(
    ctx: &Ctx,
    plan: &Plan,
    cfg: &SearchConfig,
    round: u64,
) -> Option<(SubWorld, Plan)> {
    let k_count = ctx.inst.vehicles.len();
    let u = ctx.inst.params.max_platoon as usize;
    let comp = components(plan, k_count);
    let mut in_seg = vec![false; k_count];
    for seg in &plan.platoons {
        for &m in &seg.members {
            in_seg[m as usize] = true;
        }
    }
    let group_of = |root: usize| -> Vec<usize> {
        (0..k_count).filter(|&v| comp[v] == root).collect()
    };

    let mut best: Option<(f64, SubWorld, Plan)> = None;
    let mut consider = |cand: Option<(f64, SubWorld, Plan)>| {
        if let Some((delta, sub, sp)) = cand {
            if best.as_ref().is_none_or(|(b, ..)| delta < *b) {
                best = Some((delta, sub, sp));
            }
        }
    };

    for (ai, sa) in plan.platoons.iter().enumerate() {
        for sb in &plan.platoons[ai + 1..] {
            let (ra, rb) = (comp[sa.members[0] as usize], comp[sb.members[0] as usize]);
            if ra == rb || sa.members.len() + sb.members.len() > u {
                continue;
            }
            let Some(c) = find_lcps(&sa.path, &sb.path) else { continue };
            let mut vehicles = group_of(ra);
            vehicles.extend(group_of(rb));
            consider(try_move(
                ctx,
                plan,
                cfg,
                vehicles,
                &[round, 0, sa.id as u64, sb.id as u64],
                |sub, tables, routes, scratch0| {
                    let win_a = (c.start_a, c.len);
                    let win_b = (c.start_b, c.len);
                    let mut interior = side_interiors(sub, tables, routes, sa, win_a)?;
                    interior.extend(side_interiors(sub, tables, routes, sb, win_b)?);
                    interior.sort_unstable();
                    interior.dedup();
                    let core = scratch0 + 1;
                    split_side(sub, tables, routes, sa, win_a, &interior, (scratch0, core, scratch0 + 2))?;
                    split_side(sub, tables, routes, sb, win_b, &interior, (scratch0 + 3, core, scratch0 + 4))?;
                    Some(core)
                },
            ));
        }
    }

    for k in (0..k_count).filter(|&k| !in_seg[k]) {
        let path_k = chain_path(
            &ctx.inst.network,
            &ctx.tables,
            &plan.route(k as u32).stops,
        )?;
        for seg in &plan.platoons {
            if seg.members.len() + 1 > u {
                continue;
            }
            let Some(c) = find_lcps(&path_k, &seg.path) else { continue };
            let mut vehicles = group_of(comp[seg.members[0] as usize]);
            vehicles.push(k);
            let path_k = path_k.clone();
            consider(try_move(
                ctx,
                plan,
                cfg,
                vehicles,
                &[round, 1, k as u64, seg.id as u64],
                move |sub, tables, routes, scratch0| {
                    let win_s = (c.start_b, c.len);
                    let win_k = (c.start_a, c.len);
                    let dk = sub.dense_vehicle(k as u32) as usize;
                    let mut interior = side_interiors(sub, tables, routes, seg, win_s)?;
                    interior.extend(vehicle_interiors(sub, tables, routes, dk, win_k)?);
                    interior.sort_unstable();
                    interior.dedup();
                    let core = scratch0 + 1;
                    split_side(sub, tables, routes, seg, win_s, &interior, (scratch0, core, scratch0 + 2))?;
                    weave_vehicle(sub, tables, routes, dk, &path_k, win_k, &interior, core)?;
                    Some(core)
                },
            ));
        }
    }

    best.map(|(_, sub, sp)| (sub, sp))
}

/// Extracts the touched vehicles, applies `build` to their routes,
/// refines the shared corridor, and prices the result against the
/// incumbent restriction. `None` unless strictly improving.
fn try_move(
    ctx: &Ctx,
    plan: &Plan,
    cfg: &SearchConfig,
    vehicles: Vec<usize>,
    rng_coords: &[u64],
    build: impl FnOnce(&SubWorld, &Arc<ShortestPathTables>, &mut Vec<Vec<Stop>>, u32) -> Option<u32>,
) -> Option<(f64, SubWorld, Plan)> {
    let (sub, routes, transfers) = assemble::extract(ctx.inst, plan, &vehicles);
    let tables = &ctx.tables;
    let intents: Vec<(u32, usize, usize)> = transfers
        .iter()
        .map(|t| (t.request, t.from as usize, t.to as usize))
        .collect();
    let base = refine::price(&sub, tables, &Working {
        routes: routes.clone(),
        intents: intents.clone(),
    })?
    .1;

    let scratch0 = plan.platoons.iter().map(|s| s.id + 1).max().unwrap_or(0);
    let mut cand = routes;
    let core = build(&sub, tables, &mut cand, scratch0)?;
    let mut state = refine::refined(&sub, tables, Working { routes: cand, intents })?;
    refine::extend(&sub, tables, cfg, core, &mut state);
    let mut rng = rng_from(cfg.seed, "merge-refine", rng_coords);
    refine::search_transfers(&sub, tables, cfg, core, &mut state, &mut rng);

    let delta = state.total - base;
    (delta < -GAIN_EPS).then_some((delta, sub, state.plan))
}

/// Union-find root per vehicle, vehicles linked by shared segments.
fn components(plan: &Plan, k_count: usize) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..k_count).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for seg in &plan.platoons {
        let a = find(&mut parent, seg.members[0] as usize);
        for &m in &seg.members[1..] {
            let b = find(&mut parent, m as usize);
            parent[b] = a;
        }
    }
    (0..k_count).map(|v| find(&mut parent, v)).collect()
}

/// Offsets of one route's stops along a chain of canonical legs,
/// paired with the stop index. `None` if a node is unknown.
fn stop_offsets(
    net: &Network,
    tables: &ShortestPathTables,
    stops: &[Stop],
    from: usize,
    to: usize,
) -> Option<Vec<(usize, usize)>> {
    let mut out = Vec::with_capacity(to - from + 1);
    let mut off = 0usize;
    let mut prev = net.node_index(stops[from].node)?;
    out.push((0, from));
    for (i, stop) in stops.iter().enumerate().take(to + 1).skip(from + 1) {
        let cur = net.node_index(stop.node)?;
        off += tables.path_indices(prev, cur).len() - 1;
        out.push((off, i));
        prev = cur;
    }
    Some(out)
}

/// Interior stop offsets of `seg`'s members inside the fuse window,
/// relative to the window start. All members mirror the same offsets,
/// so the lead member's are representative.
fn side_interiors(
    sub: &SubWorld,
    tables: &Arc<ShortestPathTables>,
    routes: &[Vec<Stop>],
    seg: &PlatoonSegment,
    (w, len): (usize, usize),
) -> Option<Vec<usize>> {
    let net = &sub.inst.network;
    let dm = sub.dense_vehicle(seg.members[0]) as usize;
    let stops = &routes[dm];
    let j = find_stop(stops, |a| *a == Action::Join(seg.id))?;
    let s = find_stop(stops, |a| *a == Action::Split(seg.id))?;
    let offs = stop_offsets(net, tables, stops, j, s)?;
    if offs.last()?.0 != seg.path.len() - 1 {
        return None;
    }
    Some(
        offs.iter()
            .filter(|&&(o, _)| o > w && o < w + len - 1)
            .map(|&(o, _)| o - w)
            .collect(),
    )
}

/// The residual vehicle's interior stop offsets inside its window,
/// relative to the window start.
fn vehicle_interiors(
    sub: &SubWorld,
    tables: &Arc<ShortestPathTables>,
    routes: &[Vec<Stop>],
    dk: usize,
    (w, len): (usize, usize),
) -> Option<Vec<usize>> {
    let net = &sub.inst.network;
    let stops = &routes[dk];
    let offs = stop_offsets(net, tables, stops, 0, stops.len() - 1)?;
    Some(
        offs.iter()
            .filter(|&&(o, _)| o > w && o < w + len - 1)
            .map(|&(o, _)| o - w)
            .collect(),
    )
}

fn strip_markers(actions: &[Action], seg: u32) -> Vec<Action> {
    actions
        .iter()
        .filter(|a| !matches!(a, Action::Join(t) | Action::Split(t) if *t == seg))
        .cloned()
        .collect()
}

/// Rebuilds one platoon's corridor as before / shared / after segments
/// around the window, every member mirrored onto the unified interior
/// offsets. `scratch` names the (leading, shared core, trailing)
/// pieces; leading and trailing are emitted only when the window stops
/// short of the corridor's own boundary.
fn split_side(
    sub: &SubWorld,
    tables: &Arc<ShortestPathTables>,
    routes: &mut [Vec<Stop>],
    seg: &PlatoonSegment,
    (w, len): (usize, usize),
    interior: &[usize],
    scratch: (u32, u32, u32),
) -> Option<()> {
    let net = &sub.inst.network;
    let last = seg.path.len() - 1;
    let (w_end, prefix, suffix) = (w + len - 1, w > 0, w + len - 1 < last);
    for &member in &seg.members {
        let dm = sub.dense_vehicle(member) as usize;
        let stops = &mut routes[dm];
        let j = find_stop(stops, |a| *a == Action::Join(seg.id))?;
        let s = find_stop(stops, |a| *a == Action::Split(seg.id))?;
        let offs = stop_offsets(net, tables, stops, j, s)?;
        if offs.last()?.0 != last {
            return None;
        }
        let mut at: BTreeMap<usize, Vec<Action>> = offs
            .iter()
            .map(|&(o, i)| (o, strip_markers(&stops[i].actions, seg.id)))
            .collect();
        at.entry(w).or_default();
        at.entry(w_end).or_default();
        for &u in interior {
            at.entry(w + u).or_default();
        }
        if prefix {
            at.get_mut(&0)?.push(Action::Join(scratch.0));
            let b = at.get_mut(&w)?;
            b.push(Action::Split(scratch.0));
            b.push(Action::Join(scratch.1));
        } else {
            at.get_mut(&0)?.push(Action::Join(scratch.1));
        }
        if suffix {
            let b = at.get_mut(&w_end)?;
            b.push(Action::Split(scratch.1));
            b.push(Action::Join(scratch.2));
            at.get_mut(&last)?.push(Action::Split(scratch.2));
        } else {
            at.get_mut(&w_end)?.push(Action::Split(scratch.1));
        }
        let rebuilt: Vec<Stop> = at
            .into_iter()
            .map(|(o, actions)| Stop::new(seg.path[o], actions))
            .collect();
        stops.splice(j..=s, rebuilt);
    }
    Some(())
}

/// Threads the residual vehicle into the shared corridor: join and
/// split markers at its window boundaries and mirror stops at the
/// unified interior offsets, all on nodes its route already traverses.
#[allow(clippy::too_many_arguments)]
fn weave_vehicle(
    sub: &SubWorld,
    tables: &Arc<ShortestPathTables>,
    routes: &mut [Vec<Stop>],
    dk: usize,
    path_k: &[NodeId],
    (w, len): (usize, usize),
    interior: &[usize],
    core_scratch: u32,
) -> Option<()> {
    let net = &sub.inst.network;
    let stops = &mut routes[dk];
    let offs = stop_offsets(net, tables, stops, 0, stops.len() - 1)?;
    if offs.last()?.0 != path_k.len() - 1 {
        return None;
    }
    let w_end = w + len - 1;
    let mut at: BTreeMap<usize, Vec<Action>> = offs
        .iter()
        .filter(|&&(o, _)| o >= w && o <= w_end)
        .map(|&(o, i)| (o, stops[i].actions.clone()))
        .collect();
    at.entry(w).or_default().push(Action::Join(core_scratch));
    for &u in interior {
        at.entry(w + u).or_default();
    }
    at.entry(w_end).or_default().push(Action::Split(core_scratch));

    let lo = offs.partition_point(|&(o, _)| o < w);
    let hi = offs.partition_point(|&(o, _)| o <= w_end);
    let rebuilt: Vec<Stop> = at
        .into_iter()
        .map(|(o, actions)| Stop::new(path_k[o], actions))
        .collect();
    stops.splice(lo..hi, rebuilt);
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristic::{form_two_vehicle_platoons, solve_solo};
    use crate::instance::{Instance, Meta, Parameters, Request, Saving, Vehicle};
    use crate::network::{Arc as NetArc, Network as Net, Node};
    use crate::schedule::evaluate_plan;

    /// `n` vehicles parked at node 0 of a ten-node line, each forced to
    /// carry its own full-line request by a capacity-filling party.
    fn convoy(n: u32, max_platoon: u32) -> Instance {
        let network = Net::new(
            (0..10).map(|id| Node { id, x: 0.0, y: 0.0 }).collect(),
            (0..9)
                .map(|i| NetArc { a: i, b: i + 1, distance: 1.0, time: 1.0 })
                .collect(),
        )
        .unwrap();
        Instance {
            network,
            vehicles: (0..n)
                .map(|id| Vehicle { id, start: 0, end: None, capacity: 4, ready: 0.0 })
                .collect(),
            requests: (0..n)
                .map(|id| Request {
                    id,
                    pickup: 0,
                    dropoff: 9,
                    party: 4,
                    ready: 0.0,
                    pickup_window: None,
                    dropoff_window: None,
                })
                .collect(),
            params: Parameters {
                alpha: 1.0,
                beta: 1.0,
                saving: Saving::Single { eta: 0.1 },
                max_platoon,
            },
            meta: Meta::default(),
        }
    }

    /// The pair phase docks two of three identical tours; the merge then
    /// weaves the leftover vehicle into the platoon. Going from one
    /// partner to two saves each member another eta per mile, so the
    /// move is worth 2 * eta * 2 * 9 on top of the pair plan.
    #[test]
    fn a_residual_weaves_in_and_the_saving_matches_the_rate() {
        let inst = convoy(3, 3);
        let ctx = Ctx::new(&inst).unwrap();
        let solo = solve_solo(&ctx).unwrap();
        let formed = form_two_vehicle_platoons(&ctx, &solo, &SearchConfig::default()).unwrap();
        assert_eq!(formed.pairs.len(), 1);
        assert_eq!(formed.residual, vec![2]);

        let merged = merge_platoons(&ctx, &formed.plan, &SearchConfig::default()).unwrap();
        assert_eq!(merged.platoons.len(), 1);
        assert_eq!(merged.platoons[0].members, vec![0, 1, 2]);
        assert_eq!(merged.platoons[0].path, (0..10).collect::<Vec<_>>());

        let (_, costs) = evaluate_plan(&ctx, &merged).unwrap();
        assert!((formed.cost - costs.total - 2.0 * 0.1 * 2.0 * 9.0).abs() < 1e-9);
        // 3 * 9 miles at the two-partner factor 0.8, plus 3 * 4 * 9
        // passenger-minutes that no docking changes.
        assert!((costs.total - (21.6 + 108.0)).abs() < 1e-9);
    }

    #[test]
    fn the_platoon_cap_keeps_the_third_vehicle_out() {
        let inst = convoy(3, 2);
        let ctx = Ctx::new(&inst).unwrap();
        let solo = solve_solo(&ctx).unwrap();
        let formed = form_two_vehicle_platoons(&ctx, &solo, &SearchConfig::default()).unwrap();
        assert_eq!(formed.residual, vec![2]);

        let merged = merge_platoons(&ctx, &formed.plan, &SearchConfig::default()).unwrap();
        assert_eq!(merged, formed.plan);
        assert_eq!(merged.platoons.len(), 1);
        assert_eq!(merged.platoons[0].members, vec![0, 1]);
    }

    /// Four identical tours first pair up into two separate platoons;
    /// the merge fuses those into one four-member convoy when the
    /// platform cap allows it.
    #[test]
    fn two_pairs_fuse_when_the_cap_allows() {
        let inst = convoy(4, 4);
        let ctx = Ctx::new(&inst).unwrap();
        let solo = solve_solo(&ctx).unwrap();
        let formed = form_two_vehicle_platoons(&ctx, &solo, &SearchConfig::default()).unwrap();
        assert_eq!(formed.pairs.len(), 2);
        assert!(formed.residual.is_empty());
        assert_eq!(formed.plan.platoons.len(), 2);

        let merged = merge_platoons(&ctx, &formed.plan, &SearchConfig::default()).unwrap();
        assert_eq!(merged.platoons.len(), 1);
        assert_eq!(merged.platoons[0].members, vec![0, 1, 2, 3]);
        assert_eq!(merged.platoons[0].path, (0..10).collect::<Vec<_>>());

        let (_, costs) = evaluate_plan(&ctx, &merged).unwrap();
        // 4 * 9 miles at the three-partner factor 0.7 plus unchanged
        // passenger time 4 * 4 * 9.
        assert!((costs.total - (25.2 + 144.0)).abs() < 1e-9);
    }
}
