//! Two-vehicle platoon formation. Every vehicle pair is searched
//! independently: the pair's routes are deconstructed and resampled,
//! corridor endpoints are proposed around each leg pair, and the best
//! diverted corridor is refined and priced. The improving proposals are
//! then ranked and applied greedily so that no vehicle joins more than
//! one platoon in this phase.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::network::{NodeId, ShortestPathTables};
use crate::schedule::{evaluate_plan, Action, Plan, Stop};
use crate::util::rng_from;
use crate::Ctx;

use super::assemble::{self, SubWorld};
use super::joinsplit::search_join_split;
use super::refine::{self, Refined, Working};
use super::{HeuristicError, SearchConfig, GAIN_EPS};

pub struct PairFormation {
    pub plan: Plan,
    /// Total cost of `plan` under the exact evaluator.
    pub cost: f64,
    /// Accepted pairs, in application order.
    pub pairs: Vec<PairSummary>,
    /// Vehicles left un-platooned by this phase.
    pub residual: Vec<u32>,
}

pub struct PairSummary {
    pub vehicles: (u32, u32),
    /// Cost reduction against the two vehicles' solo routes.
    pub saving: f64,
}

struct Proposal {
    k: usize,
    m: usize,
    base: f64,
    total: f64,
    sub_plan: Plan,
}

/// Corridor candidates per sample that graduate to refinement. The
/// cheapest plain corridor is often not the one a handover rescues, so
/// a few runners-up get the full treatment too.
const SHORTLIST: usize = 4;

pub fn form_two_vehicle_platoons(
    ctx: &Ctx,
    solo: &Plan,
    cfg: &SearchConfig,
) -> Result<PairFormation, HeuristicError> {
    let k_count = ctx.inst.vehicles.len();
    let all_pairs: Vec<(usize, usize)> = (0..k_count)
        .flat_map(|k| (k + 1..k_count).map(move |m| (k, m)))
        .collect();
    let mut proposals: Vec<Proposal> = all_pairs
        .par_iter()
        .map(|&(k, m)| pair_search(ctx, solo, k, m, cfg))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    // Most saving first; vehicle ids break exact ties.
    proposals.sort_by(|a, b| {
        (a.total - a.base)
            .total_cmp(&(b.total - b.base))
            .then(a.k.cmp(&b.k))
            .then(a.m.cmp(&b.m))
    });

    let mut used = vec![false; k_count];
    let mut plan = solo.clone();
    let mut pairs = Vec::new();
    for p in proposals {
        if used[p.k] || used[p.m] {
            continue;
        }
        used[p.k] = true;
        used[p.m] = true;
        let (sub, _, _) = assemble::extract(ctx.inst, solo, &[p.k, p.m]);
        assemble::install(&mut plan, &sub, &p.sub_plan);
        pairs.push(PairSummary {
            vehicles: (p.k as u32, p.m as u32),
            saving: p.base - p.total,
        });
    }
    let (_, costs) = evaluate_plan(ctx, &plan)?;
    Ok(PairFormation {
        plan,
        cost: costs.total,
        pairs,
        residual: (0..k_count).filter(|&k| !used[k]).map(|k| k as u32).collect(),
    })
}

/// Searches one vehicle pair for a profitable shared corridor. Returns
/// a proposal only when the refined candidate strictly beats the pair's
/// solo cost.
fn pair_search(ctx: &Ctx, solo: &Plan, k: usize, m: usize, cfg: &SearchConfig) -> Option<Proposal> {
    let (sub, base_routes, _) = assemble::extract(ctx.inst, solo, &[k, m]);
    let tables = &ctx.tables;
    let net = &sub.inst.network;
    let params = sub.inst.params;
    let base = refine::price(&sub, tables, &Working {
        routes: base_routes.clone(),
        intents: Vec::new(),
    })?
    .1;
    // Best possible per-distance-unit vehicle saving for a two-member
    // platoon; the admission bound below is exact for candidates
    // without handovers.
    let max_rate = 2.0 * (1.0 - params.saving.factor(1)) * params.alpha;

    let mut rng = rng_from(cfg.seed, "pair-search", &[k as u64, m as u64]);
    let mut js_cache: HashMap<(usize, usize), Vec<NodeId>> = HashMap::new();
    let mut candidates = |x: NodeId, y: NodeId| -> Vec<NodeId> {
        let (ix, iy) = (net.node_index(x).unwrap(), net.node_index(y).unwrap());
        let mut out = vec![x];
        if ix == iy {
            return out;
        }
        out.push(y);
        let key = (ix.min(iy), ix.max(iy));
        let extra = js_cache.entry(key).or_insert_with(|| {
            search_join_split(tables, key.0, key.1, cfg.n_max, cfg.phi)
                .nodes()
                .map(|i| net.nodes()[i].id)
                .collect()
        });
        for &id in extra.iter() {
            if !out.contains(&id) {
                out.push(id);
            }
        }
        out
    };
    let dist = |x: NodeId, y: NodeId| {
        tables.dist(net.node_index(x).unwrap(), net.node_index(y).unwrap())
    };

    let mut best: Option<Refined> = None;
    for sample in 0..=cfg.n_recon.max(1) {
        let routes = if sample == 0 {
            base_routes.clone()
        } else {
            reconstruct(&sub, &mut rng)
        };
        let sample_base = refine::price(&sub, tables, &Working {
            routes: routes.clone(),
            intents: Vec::new(),
        })
        .map(|(_, t)| t);
        if sample_base.is_none() && sample > 0 {
            // A resample that is infeasible even before any corridor
            // (capacity, typically) is dead scaffolding.
            continue;
        }

        let mut shortlist: Vec<(f64, Working)> = Vec::with_capacity(SHORTLIST + 1);
        for pa in 0..routes[0].len().saturating_sub(1) {
            let (ja, na) = (routes[0][pa].node, routes[0][pa + 1].node);
            for pb in 0..routes[1].len().saturating_sub(1) {
                let (jb, nb) = (routes[1][pb].node, routes[1][pb + 1].node);
                let join_list = candidates(ja, jb);
                let split_list = candidates(na, nb);
                for &j in &join_list {
                    for &s in &split_list {
                        if j == s {
                            continue;
                        }
                        // Bound the corridor's no-transfer price from below:
                        // passenger time never drops when a detour is spliced
                        // into a fixed stop order, and the platoon discount is
                        // capped by the full-rate saving over the shared leg.
                        // The bound and the shortlist rank on the same plain
                        // price, so pruning against the worst retained entry
                        // is exact for shortlist membership.
                        if let (Some(sb), true) = (sample_base, shortlist.len() == SHORTLIST) {
                            let detour_a = dist(ja, j) + dist(j, s) + dist(s, na) - dist(ja, na);
                            let detour_b = dist(jb, j) + dist(j, s) + dist(s, nb) - dist(jb, nb);
                            let lb = sb + params.alpha * (detour_a + detour_b)
                                - max_rate * dist(j, s);
                            if lb >= shortlist[SHORTLIST - 1].0 - GAIN_EPS {
                                continue;
                            }
                        }
                        let mut cand = routes.clone();
                        cand[0].insert(pa + 1, Stop::new(j, vec![Action::Join(0)]));
                        cand[0].insert(pa + 2, Stop::new(s, vec![Action::Split(0)]));
                        cand[1].insert(pb + 1, Stop::new(j, vec![Action::Join(0)]));
                        cand[1].insert(pb + 2, Stop::new(s, vec![Action::Split(0)]));
                        let working = Working { routes: cand, intents: Vec::new() };
                        if let Some((_, total)) = refine::price(&sub, tables, &working) {
                            let at = shortlist.partition_point(|(t, _)| *t <= total);
                            if at < SHORTLIST {
                                shortlist.insert(at, (total, working));
                                shortlist.truncate(SHORTLIST);
                            }
                        }
                    }
                }
            }
        }

        for (slot, (_, working)) in shortlist.into_iter().enumerate() {
            let Some(mut state) = refine::refined(&sub, tables, working) else { continue };
            refine::extend(&sub, tables, cfg, 0, &mut state);
            // Every shortlisted corridor gets its own handover search. One
            // whose plain price is mediocre can still win once a delivery
            // moves across it, so ranking before the search would hide it.
            let mut rng_t = rng_from(
                cfg.seed,
                "pair-transfers",
                &[k as u64, m as u64, sample as u64, slot as u64],
            );
            refine::search_transfers(&sub, tables, cfg, 0, &mut state, &mut rng_t);
            if best.as_ref().is_none_or(|b| state.total < b.total) {
                best = Some(state);
            }
        }
    }

    let state = best?;
    if state.total < base - GAIN_EPS && state.total < unplatooned(&sub, tables, &state) - GAIN_EPS
    {
        Some(Proposal { k, m, base, total: state.total, sub_plan: state.plan })
    } else {
        None
    }
}

/// Price of the winning routes with the platoon stripped out. A proposal
/// must also beat this shadow, so an accepted pair owes its gain to the
/// coupling itself and not to the resample happening to find better solo
/// routes. A shadow that cannot be priced (pooled capacity, or a dropoff
/// stranded on the receiving vehicle) means the platoon is load-bearing.
fn unplatooned(sub: &SubWorld, tables: &Arc<ShortestPathTables>, state: &Refined) -> f64 {
    let mut bare = state.working.clone();
    bare.intents.clear();
    for route in &mut bare.routes {
        for stop in route.iter_mut() {
            stop.actions
                .retain(|a| !matches!(a, Action::Join(_) | Action::Split(_)));
        }
    }
    match refine::price(sub, tables, &bare) {
        Some((_, total)) => total,
        None => f64::INFINITY,
    }
}

/// Random re-split of the pair's pooled requests onto the two vehicles,
/// each route a random pickup-before-dropoff order. Capacity and ready
/// times are ignored here on purpose: the sample is scaffolding for the
/// corridor scan, and infeasible outcomes die at pricing.
fn reconstruct(sub: &SubWorld, rng: &mut ChaCha8Rng) -> Vec<Vec<Stop>> {
    let r_count = sub.inst.requests.len();
    let target: Vec<usize> = (0..r_count).map(|_| rng.gen_range(0..2usize)).collect();
    (0..2)
        .map(|v| {
            let mut seq: Vec<u32> = (0..r_count as u32)
                .filter(|&r| target[r as usize] == v)
                .flat_map(|r| [r, r])
                .collect();
            seq.shuffle(rng);
            let mut seen = vec![false; r_count];
            let mut stops = vec![Stop::pass(sub.inst.vehicles[v].start)];
            for r in seq {
                let req = &sub.inst.requests[r as usize];
                if seen[r as usize] {
                    stops.push(Stop::new(req.dropoff, vec![Action::Dropoff(r)]));
                } else {
                    seen[r as usize] = true;
                    stops.push(Stop::new(req.pickup, vec![Action::Pickup(r)]));
                }
            }
            if let Some(end) = sub.inst.vehicles[v].end {
                if stops.last().map(|s| s.node) != Some(end) {
                    stops.push(Stop::pass(end));
                }
            }
            assemble::normalize(stops)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristic::solve_solo;
    use crate::instance::{Instance, Meta, Parameters, Request, Saving, Vehicle};
    use crate::network::{Arc as NetArc, Network, Node};
    use crate::schedule::{fixtures, PlatoonSegment, Route, TransferRecord};

    fn line_network(n: u32) -> Network {
        Network::new(
            (0..n).map(|id| Node { id, x: 0.0, y: 0.0 }).collect(),
            (0..n - 1)
                .map(|i| NetArc { a: i, b: i + 1, distance: 1.0, time: 1.0 })
                .collect(),
        )
        .unwrap()
    }

    /// The hand-checked corridor scenario, entered from its known solo
    /// tours: the search must find the docked leg 9-15-21 and hand
    /// request 1 across, reproducing the worked totals exactly.
    #[test]
    fn the_worked_corridor_is_recovered_from_the_solo_tours() {
        let inst = fixtures::instance();
        let ctx = Ctx::new(&inst).unwrap();
        let solo = fixtures::solo_plan();
        let formed =
            form_two_vehicle_platoons(&ctx, &solo, &SearchConfig::default()).unwrap();

        assert_eq!(formed.pairs.len(), 1);
        assert_eq!(formed.pairs[0].vehicles, (0, 1));
        assert!((formed.pairs[0].saving - 6.2).abs() < 1e-9);
        assert!((formed.cost - 133.8).abs() < 1e-9);
        assert!(formed.residual.is_empty());

        assert_eq!(
            formed.plan.platoons,
            vec![PlatoonSegment { id: 0, members: vec![0, 1], path: vec![9, 15, 21] }]
        );
        assert_eq!(
            formed.plan.transfers,
            vec![TransferRecord { request: 1, from: 1, to: 0, arc: (9, 15) }]
        );
        assert_eq!(
            formed.plan.routes[0],
            Route {
                vehicle: 0,
                stops: vec![
                    Stop::pass(1),
                    Stop::new(8, vec![Action::Pickup(0)]),
                    Stop::new(9, vec![Action::Join(0)]),
                    Stop::new(21, vec![Action::Split(0)]),
                    Stop::new(20, vec![Action::Dropoff(0)]),
                    Stop::new(19, vec![Action::Dropoff(1)]),
                ],
            }
        );
        assert_eq!(
            formed.plan.routes[1],
            Route {
                vehicle: 1,
                stops: vec![
                    Stop::pass(6),
                    Stop::new(5, vec![Action::Pickup(2)]),
                    Stop::new(4, vec![Action::Pickup(1)]),
                    Stop::new(9, vec![Action::Join(0)]),
                    Stop::new(21, vec![Action::Split(0)]),
                    Stop::new(24, vec![Action::Dropoff(2)]),
                ],
            }
        );
    }

    /// Two vehicles driving the same ten-node line end to end dock for
    /// the whole run. The saving is the textbook identity 2 * eta * d:
    /// each of the two members pays 10% less over nine miles.
    #[test]
    fn identical_tours_dock_for_the_full_run() {
        let inst = Instance {
            network: line_network(10),
            vehicles: vec![
                Vehicle { id: 0, start: 0, end: None, capacity: 4, ready: 0.0 },
                Vehicle { id: 1, start: 0, end: None, capacity: 4, ready: 0.0 },
            ],
            requests: vec![
                Request {
                    id: 0,
                    pickup: 0,
                    dropoff: 9,
                    party: 4,
                    ready: 0.0,
                    pickup_window: None,
                    dropoff_window: None,
                },
                Request {
                    id: 1,
                    pickup: 0,
                    dropoff: 9,
                    party: 4,
                    ready: 0.0,
                    pickup_window: None,
                    dropoff_window: None,
                },
            ],
            params: Parameters {
                alpha: 1.0,
                beta: 1.0,
                saving: Saving::Single { eta: 0.1 },
                max_platoon: 4,
            },
            meta: Meta::default(),
        };
        let ctx = Ctx::new(&inst).unwrap();
        let solo = solve_solo(&ctx).unwrap();
        let (_, solo_costs) = evaluate_plan(&ctx, &solo).unwrap();
        assert_eq!(solo_costs.total, 90.0);

        let formed =
            form_two_vehicle_platoons(&ctx, &solo, &SearchConfig::default()).unwrap();
        assert_eq!(formed.pairs.len(), 1);
        assert!((formed.pairs[0].saving - 2.0 * 0.1 * 9.0).abs() < 1e-9);
        assert!((formed.cost - 88.2).abs() < 1e-9);
        assert_eq!(formed.plan.platoons.len(), 1);
        assert_eq!(formed.plan.platoons[0].members, vec![0, 1]);
        assert_eq!(formed.plan.platoons[0].path, (0..10).collect::<Vec<_>>());
        assert!(formed.plan.transfers.is_empty());
        assert!(formed.residual.is_empty());
    }

    /// Opposite tours share no direction of travel, so every corridor
    /// forces a backtrack and the phase leaves the solo plan alone.
    #[test]
    fn opposed_tours_produce_no_pairs() {
        let inst = Instance {
            network: line_network(10),
            vehicles: vec![
                Vehicle { id: 0, start: 0, end: None, capacity: 4, ready: 0.0 },
                Vehicle { id: 1, start: 9, end: None, capacity: 4, ready: 0.0 },
            ],
            requests: vec![
                Request {
                    id: 0,
                    pickup: 0,
                    dropoff: 9,
                    party: 1,
                    ready: 0.0,
                    pickup_window: None,
                    dropoff_window: None,
                },
                Request {
                    id: 1,
                    pickup: 9,
                    dropoff: 0,
                    party: 1,
                    ready: 0.0,
                    pickup_window: None,
                    dropoff_window: None,
                },
            ],
            params: Parameters {
                alpha: 1.0,
                beta: 1.0,
                saving: Saving::Single { eta: 0.1 },
                max_platoon: 4,
            },
            meta: Meta::default(),
        };
        let ctx = Ctx::new(&inst).unwrap();
        let solo = solve_solo(&ctx).unwrap();
        let formed =
            form_two_vehicle_platoons(&ctx, &solo, &SearchConfig::default()).unwrap();
        assert!(formed.pairs.is_empty());
        assert_eq!(formed.residual, vec![0, 1]);
        assert_eq!(formed.plan, solo);
        let (_, solo_costs) = evaluate_plan(&ctx, &solo).unwrap();
        assert_eq!(formed.cost, solo_costs.total);
    }
}
