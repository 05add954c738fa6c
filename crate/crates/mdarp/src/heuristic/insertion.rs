//! Solo baseline: sequential cheapest insertion. Requests are taken in
//! ready-time order and each is placed at the position pair (pickup,
//! dropoff) on the vehicle that increases total cost the least. No
//! platooning and no transfers; the result is the starting point the
//! platoon searches improve on, and the reference a modular solution is
//! compared against.

use std::sync::Arc;

use crate::instance::{Instance, Meta};
use crate::schedule::{evaluate_plan, Action, Plan, Route, Stop};
use crate::Ctx;

use super::HeuristicError;

pub fn solve_solo(ctx: &Ctx) -> Result<Plan, HeuristicError> {
    let inst = ctx.inst;
    let k_count = inst.vehicles.len();

    // Working routes in original request ids. A required end stop stays
    // terminal; insertions go before it.
    let mut stops: Vec<Vec<Stop>> = inst
        .vehicles
        .iter()
        .map(|v| {
            let mut s = vec![Stop::pass(v.start)];
            if let Some(end) = v.end {
                if end != v.start {
                    s.push(Stop::pass(end));
                }
            }
            s
        })
        .collect();
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); k_count];
    let mut cur_cost: Vec<f64> = vec![0.0; k_count];

    let mut order: Vec<usize> = (0..inst.requests.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&inst.requests[a], &inst.requests[b]);
        ra.ready.total_cmp(&rb.ready).then(ra.id.cmp(&rb.id))
    });

    for r in order {
        let req = &inst.requests[r];
        let mut best: Option<(f64, usize, Vec<Stop>, f64)> = None;
        for k in 0..k_count {
            let tail = usize::from(inst.vehicles[k].end.is_some() && stops[k].len() > 1);
            let cap = stops[k].len() - tail;
            let mut reqs = assigned[k].clone();
            reqs.push(r);
            reqs.sort_unstable();
            let world = OneVehicle::new(ctx, k, &reqs);
            for i in 1..=cap {
                for j in i + 1..=cap + 1 {
                    let mut cand = stops[k].clone();
                    cand.insert(i, Stop::new(req.pickup, vec![Action::Pickup(req.id)]));
                    cand.insert(j, Stop::new(req.dropoff, vec![Action::Dropoff(req.id)]));
                    let Some(total) = world.eval(ctx, &cand) else {
                        continue;
                    };
                    let delta = total - cur_cost[k];
                    if best.as_ref().is_none_or(|(b, ..)| delta < *b) {
                        best = Some((delta, k, cand, total));
                    }
                }
            }
        }
        let Some((_, k, cand, total)) = best else {
            return Err(HeuristicError::NoFeasibleInsertion(req.id));
        };
        stops[k] = super::assemble::normalize(cand);
        assigned[k].push(r);
        assigned[k].sort_unstable();
        cur_cost[k] = total;
    }

    Ok(Plan {
        routes: stops
            .into_iter()
            .enumerate()
            .map(|(k, stops)| Route { vehicle: k as u32, stops })
            .collect(),
        platoons: Vec::new(),
        transfers: Vec::new(),
    })
}

/// One vehicle and its requests copied onto a standalone instance so a
/// route can be priced in isolation.
struct OneVehicle {
    sub: Instance,
    /// Original request ids, positions give the dense ids.
    ids: Vec<u32>,
}

impl OneVehicle {
    fn new(ctx: &Ctx, k: usize, reqs: &[usize]) -> Self {
        let mut vehicle = ctx.inst.vehicles[k];
        vehicle.id = 0;
        let ids = reqs.iter().map(|&o| ctx.inst.requests[o].id).collect();
        let sub = Instance {
            network: ctx.inst.network.clone(),
            vehicles: vec![vehicle],
            requests: reqs
                .iter()
                .enumerate()
                .map(|(d, &orig)| {
                    let mut req = ctx.inst.requests[orig].clone();
                    req.id = d as u32;
                    req
                })
                .collect(),
            params: ctx.inst.params,
            meta: Meta::default(),
        };
        OneVehicle { sub, ids }
    }

    /// Prices a route given in original request ids. `None` when it is
    /// infeasible for this vehicle.
    fn eval(&self, ctx: &Ctx, stops: &[Stop]) -> Option<f64> {
        let mut stops = stops.to_vec();
        for stop in &mut stops {
            for action in &mut stop.actions {
                if let Action::Pickup(r) | Action::Dropoff(r) = action {
                    *r = self.ids.iter().position(|id| id == r)? as u32;
                }
            }
        }
        let sub_ctx = Ctx::with_tables(&self.sub, Arc::clone(&ctx.tables));
        let plan = Plan {
            routes: vec![Route { vehicle: 0, stops: super::assemble::normalize(stops) }],
            platoons: Vec::new(),
            transfers: Vec::new(),
        };
        evaluate_plan(&sub_ctx, &plan).ok().map(|(_, c)| c.total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{GenConfig, Parameters, Request, Saving, Spatial, Temporal, Vehicle};
    use crate::network::{all_pairs_shortest, synth, Arc as NetArc, Network, Node};

    fn path_network(n: u32) -> Network {
        Network::new(
            (0..n).map(|id| Node { id, x: 0.0, y: 0.0 }).collect(),
            (0..n - 1)
                .map(|i| NetArc { a: i, b: i + 1, distance: 1.0, time: 1.0 })
                .collect(),
        )
        .unwrap()
    }

    fn params() -> Parameters {
        Parameters {
            alpha: 1.0,
            beta: 1.0,
            saving: Saving::Single { eta: 0.1 },
            max_platoon: 4,
        }
    }

    fn vehicle(id: u32, start: u32) -> Vehicle {
        Vehicle { id, start, end: None, capacity: 4, ready: 0.0 }
    }

    fn request(id: u32, pickup: u32, dropoff: u32, party: u32) -> Request {
        Request {
            id,
            pickup,
            dropoff,
            party,
            ready: 0.0,
            pickup_window: None,
            dropoff_window: None,
        }
    }

    #[test]
    fn a_single_request_rides_the_only_vehicle() {
        // Vehicle at 0, request from 1 to 2 on the path 0-1-2: the tour
        // is 0-1-2, two miles driven and a dropoff at time 2.
        let inst = Instance {
            network: path_network(3),
            vehicles: vec![vehicle(0, 0)],
            requests: vec![request(0, 1, 2, 1)],
            params: params(),
            meta: Meta::default(),
        };
        let ctx = Ctx::new(&inst).unwrap();
        let plan = solve_solo(&ctx).unwrap();
        assert_eq!(
            plan.routes[0].stops,
            vec![
                Stop::pass(0),
                Stop::new(1, vec![Action::Pickup(0)]),
                Stop::new(2, vec![Action::Dropoff(0)]),
            ]
        );
        let (_, costs) = evaluate_plan(&ctx, &plan).unwrap();
        assert_eq!(costs.vehicle_travel_cost, 2.0);
        assert_eq!(costs.passenger_service_time, 2.0);
        assert_eq!(costs.total, 4.0);
    }

    #[test]
    fn ties_go_to_the_lower_vehicle_id() {
        let inst = Instance {
            network: path_network(3),
            vehicles: vec![vehicle(0, 0), vehicle(1, 0)],
            requests: vec![request(0, 1, 2, 1)],
            params: params(),
            meta: Meta::default(),
        };
        let ctx = Ctx::new(&inst).unwrap();
        let plan = solve_solo(&ctx).unwrap();
        assert_eq!(plan.routes[0].stops.len(), 3);
        assert_eq!(plan.routes[1].stops, vec![Stop::pass(0)]);
    }

    #[test]
    fn a_required_end_stays_terminal() {
        // The vehicle must finish at node 3; the dropoff at 2 lands
        // before it and the tour still ends where required.
        let inst = Instance {
            network: path_network(4),
            vehicles: vec![Vehicle { id: 0, start: 0, end: Some(3), capacity: 4, ready: 0.0 }],
            requests: vec![request(0, 1, 2, 1)],
            params: params(),
            meta: Meta::default(),
        };
        let ctx = Ctx::new(&inst).unwrap();
        let plan = solve_solo(&ctx).unwrap();
        let stops = &plan.routes[0].stops;
        assert_eq!(stops.last().unwrap().node, 3);
        assert_eq!(
            stops[1..=2],
            [
                Stop::new(1, vec![Action::Pickup(0)]),
                Stop::new(2, vec![Action::Dropoff(0)]),
            ]
        );
    }

    #[test]
    fn an_oversized_party_is_reported() {
        let inst = Instance {
            network: path_network(3),
            vehicles: vec![vehicle(0, 0)],
            requests: vec![request(0, 1, 2, 4), request(1, 1, 2, 5)],
            params: params(),
            meta: Meta::default(),
        };
        let ctx = Ctx::new(&inst).unwrap();
        match solve_solo(&ctx) {
            Err(HeuristicError::NoFeasibleInsertion(id)) => assert_eq!(id, 1),
            other => panic!("expected a no-insertion error, got {other:?}"),
        }
    }

    #[test]
    fn random_instances_come_back_served_feasible_and_repeatable() {
        for seed in 0..20u64 {
            let net = synth::small_connected(14, 6, seed);
            let tables = all_pairs_shortest(&net).unwrap();
            let cfg = GenConfig::new(3, 6, Spatial::Uniform, Temporal::U01);
            let inst = crate::instance::generate(&net, &tables, &cfg, seed).unwrap();
            let ctx = Ctx::new(&inst).unwrap();
            let plan = solve_solo(&ctx).unwrap();

            // Pricing re-checks feasibility and fails on any violation.
            evaluate_plan(&ctx, &plan).unwrap();

            let mut picked = vec![0u32; inst.requests.len()];
            let mut dropped = vec![0u32; inst.requests.len()];
            for route in &plan.routes {
                for stop in &route.stops {
                    for action in &stop.actions {
                        match action {
                            Action::Pickup(r) => picked[*r as usize] += 1,
                            Action::Dropoff(r) => dropped[*r as usize] += 1,
                            other => panic!("solo plan holds {other:?}"),
                        }
                    }
                }
            }
            assert!(picked.iter().all(|&c| c == 1));
            assert!(dropped.iter().all(|&c| c == 1));
            assert!(plan.platoons.is_empty() && plan.transfers.is_empty());

            assert_eq!(plan, solve_solo(&ctx).unwrap());
        }
    }
}
