//! Exhaustive search over the plan grammar for tiny instances.
//!
//! Every candidate is a fully formed plan: a request-to-vehicle
//! assignment, a precedence-valid stop order per vehicle, optionally one
//! two-vehicle corridor (join node, split node, swallowed interior
//! stops mirrored on the partner), and optionally handovers of riders
//! that cross the whole corridor. Each candidate goes through the same
//! evaluator the solvers use; infeasible combinations are simply
//! skipped, so the evaluator stays the single feasibility authority.
//! The minimum over everything that survives is the optimum within the
//! grammar, with exact-cost ties broken by the lexicographically
//! smallest plan encoding so the result is independent of enumeration
//! order.

use rayon::prelude::*;

use super::ExactError;
use crate::network::NodeId;
use crate::schedule::{
    evaluate_plan, Action, CostBreakdown, Plan, PlatoonSegment, Route, Stop, TransferRecord,
};
use crate::Ctx;

/// Enumeration guards. The defaults keep a call comfortably under a
/// minute; anything larger is refused up front with a size estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_vehicles: usize,
    pub max_requests: usize,
    /// Longest allowed route counted in start plus service stops;
    /// corridor markers ride on top and are not counted.
    pub max_route_stops: usize,
    /// Cap on join/split candidate nodes. `None` considers every node
    /// (subject to the shortest-path restriction on larger networks).
    pub max_join_split: Option<usize>,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_vehicles: 2,
            max_requests: 3,
            max_route_stops: 8,
            max_join_split: None,
        }
    }
}

/// Refuse calls estimated to need more plan evaluations than this.
const EVALUATION_CAP: u64 = 20_000_000;

/// Globally optimal plan within the plan grammar, platooning and
/// handovers included.
pub fn brute_force_solve(
    ctx: &Ctx,
    limits: &OracleLimits,
) -> Result<(Plan, CostBreakdown), ExactError> {
    search(ctx, limits, true)
}

/// Optimal plan with platooning disabled: the exhaustive baseline the
/// insertion heuristic is measured against.
pub fn brute_force_solo(
    ctx: &Ctx,
    limits: &OracleLimits,
) -> Result<(Plan, CostBreakdown), ExactError> {
    search(ctx, limits, false)
}

struct Candidate {
    total: f64,
    enc: Vec<i64>,
    plan: Plan,
    costs: CostBreakdown,
}

fn search(
    ctx: &Ctx,
    limits: &OracleLimits,
    with_platoons: bool,
) -> Result<(Plan, CostBreakdown), ExactError> {
    let nk = ctx.inst.vehicle_count();
    let nr = ctx.inst.request_count();
    let longest = 1
        + 2 * nr
        + usize::from(ctx.inst.vehicles.iter().any(|v| v.end.is_some()));
    if nk > limits.max_vehicles || nr > limits.max_requests || longest > limits.max_route_stops {
        return Err(ExactError::LimitsExceeded { estimate: coarse_estimate(nk, nr) });
    }
    let sweep = Sweep {
        ctx,
        with_platoons,
        cands: candidate_nodes(ctx, limits),
    };
    let estimate = sweep.estimate();
    if estimate > EVALUATION_CAP {
        return Err(ExactError::LimitsExceeded { estimate });
    }

    let codes = (nk as u64).pow(nr as u32).max(1);
    let per_code: Vec<Option<Candidate>> = (0..codes)
        .into_par_iter()
        .map(|code| sweep.run_code(code))
        .collect();
    let mut best: Option<Candidate> = None;
    for cand in per_code.into_iter().flatten() {
        take_better(&mut best, cand);
    }
    match best {
        Some(c) => Ok((c.plan, c.costs)),
        None => Err(ExactError::NoFeasiblePlan),
    }
}

fn take_better(best: &mut Option<Candidate>, cand: Candidate) {
    let replace = match best.as_ref() {
        None => true,
        Some(b) => cand.total < b.total || (cand.total == b.total && cand.enc < b.enc),
    };
    if replace {
        *best = Some(cand);
    }
}

/// Worst-case size used only in refusal messages when the instance is
/// over the count limits; saturates rather than overflowing.
fn coarse_estimate(nk: usize, nr: usize) -> u64 {
    let orders = orderings_of(nr.min(16));
    let assignments = (nk as u128).saturating_pow(nr.min(64) as u32);
    assignments.saturating_mul(orders).min(u64::MAX as u128) as u64
}

/// Number of precedence-valid stop orders for `n` requests on one
/// vehicle: (2n)! / 2^n.
fn orderings_of(n: usize) -> u128 {
    let mut f: u128 = 1;
    for i in 1..=(2 * n) {
        f = f.saturating_mul(i as u128);
    }
    f / (1u128 << n)
}

fn binom(n: usize, k: usize) -> u128 {
    let mut out: u128 = 1;
    for i in 0..k.min(n - k) {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

/// Join/split candidates as node indices. Small networks allow every
/// node; larger ones restrict to nodes on canonical shortest paths
/// between stop nodes plus their immediate neighbors, and an explicit
/// cap keeps the nearest candidates to any stop.
fn candidate_nodes(ctx: &Ctx, limits: &OracleLimits) -> Vec<usize> {
    let net = &ctx.inst.network;
    let n = net.len();
    let mut stop_nodes: Vec<usize> = Vec::new();
    for v in &ctx.inst.vehicles {
        stop_nodes.push(net.node_index(v.start).unwrap());
        if let Some(e) = v.end {
            stop_nodes.push(net.node_index(e).unwrap());
        }
    }
    for r in &ctx.inst.requests {
        stop_nodes.push(net.node_index(r.pickup).unwrap());
        stop_nodes.push(net.node_index(r.dropoff).unwrap());
    }
    stop_nodes.sort_unstable();
    stop_nodes.dedup();

    let mut list: Vec<usize> = if n <= 10 {
        (0..n).collect()
    } else {
        let mut keep = vec![false; n];
        for &a in &stop_nodes {
            for &b in &stop_nodes {
                for idx in ctx.tables.path_indices(a, b) {
                    keep[idx] = true;
                    for &(nb, _, _) in net.neighbors(idx) {
                        keep[nb] = true;
                    }
                }
            }
        }
        (0..n).filter(|&i| keep[i]).collect()
    };
    if let Some(cap) = limits.max_join_split {
        if list.len() > cap {
            let near = |i: usize| {
                stop_nodes
                    .iter()
                    .map(|&s| ctx.tables.dist(i, s))
                    .fold(f64::INFINITY, f64::min)
            };
            list.sort_by(|&a, &b| near(a).partial_cmp(&near(b)).unwrap().then(a.cmp(&b)));
            list.truncate(cap);
            list.sort_unstable();
        }
    }
    list
}

struct Sweep<'c, 'i> {
    ctx: &'c Ctx<'i>,
    with_platoons: bool,
    cands: Vec<usize>,
}

impl Sweep<'_, '_> {
    /// Upper bound on plan evaluations: exact assignment and ordering
    /// counts, corridor placements bounded per assignment, and a small
    /// constant allowance for handover variants per corridor.
    fn estimate(&self) -> u64 {
        let nk = self.ctx.inst.vehicle_count();
        let nr = self.ctx.inst.request_count();
        let codes = (nk as u64).pow(nr as u32).max(1);
        let c2 = (self.cands.len() as u128).pow(2);
        let mut total: u128 = 0;
        for code in 0..codes {
            let counts = assignment_counts(code, nk, nr);
            let orders: u128 = counts.iter().map(|&c| orderings_of(c)).product();
            let mut configs: u128 = 1;
            if self.with_platoons && nk == 2 {
                let la = 1 + 2 * counts[0];
                let lb = 1 + 2 * counts[1];
                let mut placements: u128 = 0;
                for pa in 0..la {
                    for wa in 0..=(la - 1 - pa) {
                        for pb in 0..lb {
                            for wb in 0..=(lb - 1 - pb) {
                                placements += binom(wa + wb, wa);
                            }
                        }
                    }
                }
                configs += placements.saturating_mul(c2).saturating_mul(3);
            }
            total = total.saturating_add(orders.saturating_mul(configs));
        }
        total.min(u64::MAX as u128) as u64
    }

    fn run_code(&self, code: u64) -> Option<Candidate> {
        let nk = self.ctx.inst.vehicle_count();
        let nr = self.ctx.inst.request_count();
        let mut assigned: Vec<Vec<u32>> = vec![Vec::new(); nk];
        let mut rem = code;
        for r in 0..nr {
            assigned[(rem % nk as u64) as usize].push(r as u32);
            rem /= nk as u64;
        }
        let per_vehicle: Vec<Vec<Vec<(u32, bool)>>> =
            assigned.iter().map(|rs| stop_orders(rs)).collect();

        let mut best: Option<Candidate> = None;
        let mut pick = vec![0usize; nk];
        loop {
            let routes: Vec<Vec<Stop>> = (0..nk)
                .map(|k| self.build_route(k, &per_vehicle[k][pick[k]]))
                .collect();
            self.consider(self.finish(&routes, Vec::new(), Vec::new()), &mut best);
            if self.with_platoons && nk == 2 {
                self.corridors(&routes, &mut best);
            }
            // Advance the mixed-radix order selector.
            let mut k = 0;
            loop {
                if k == nk {
                    return best;
                }
                pick[k] += 1;
                if pick[k] < per_vehicle[k].len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
        }
    }

    fn build_route(&self, k: usize, order: &[(u32, bool)]) -> Vec<Stop> {
        let inst = self.ctx.inst;
        let mut stops = vec![Stop::pass(inst.vehicles[k].start)];
        for &(r, pickup) in order {
            let req = &inst.requests[r as usize];
            let (node, action) = if pickup {
                (req.pickup, Action::Pickup(r))
            } else {
                (req.dropoff, Action::Dropoff(r))
            };
            if stops.last().unwrap().node == node {
                stops.last_mut().unwrap().actions.push(action);
            } else {
                stops.push(Stop::new(node, vec![action]));
            }
        }
        stops
    }

    /// Appends required terminals and wraps the stop lists into a plan.
    fn finish(
        &self,
        working: &[Vec<Stop>],
        platoons: Vec<PlatoonSegment>,
        transfers: Vec<TransferRecord>,
    ) -> Plan {
        let routes = working
            .iter()
            .enumerate()
            .map(|(k, stops)| {
                let mut stops = stops.clone();
                if let Some(e) = self.ctx.inst.vehicles[k].end {
                    if stops.last().map(|s| s.node) != Some(e) {
                        stops.push(Stop::pass(e));
                    }
                }
                Route { vehicle: k as u32, stops }
            })
            .collect();
        Plan { routes, platoons, transfers }
    }

    fn consider(&self, plan: Plan, best: &mut Option<Candidate>) {
        let Ok((_, costs)) = evaluate_plan(self.ctx, &plan) else { return };
        take_better(
            best,
            Candidate { total: costs.total, enc: encoding(&plan), plan, costs },
        );
    }

    /// Every single-corridor variant of a fixed two-route skeleton: the
    /// join goes after stop `pa` of route 0 and `pb` of route 1, the
    /// corridor swallows the next `wa` and `wb` stops of each, and the
    /// swallowed stops are interleaved into one shared chain that each
    /// partner mirrors with service-free stops.
    fn corridors(&self, routes: &[Vec<Stop>], best: &mut Option<Candidate>) {
        let net = &self.ctx.inst.network;
        let (a, b) = (&routes[0], &routes[1]);
        for pa in 0..a.len() {
            for wa in 0..=(a.len() - 1 - pa) {
                for pb in 0..b.len() {
                    for wb in 0..=(b.len() - 1 - pb) {
                        let swa = &a[pa + 1..pa + 1 + wa];
                        let swb = &b[pb + 1..pb + 1 + wb];
                        for merged in interleavings(swa, swb) {
                            for &ji in &self.cands {
                                for &si in &self.cands {
                                    if ji == si {
                                        continue;
                                    }
                                    let jid = net.node_id(ji);
                                    let sid = net.node_id(si);
                                    let mut ra: Vec<Stop> = a[..=pa].to_vec();
                                    let mut rb: Vec<Stop> = b[..=pb].to_vec();
                                    ra.push(Stop::new(jid, vec![Action::Join(0)]));
                                    rb.push(Stop::new(jid, vec![Action::Join(0)]));
                                    for &(from_a, stop) in &merged {
                                        ra.push(if from_a {
                                            stop.clone()
                                        } else {
                                            Stop::pass(stop.node)
                                        });
                                        rb.push(if from_a {
                                            Stop::pass(stop.node)
                                        } else {
                                            stop.clone()
                                        });
                                    }
                                    ra.push(Stop::new(sid, vec![Action::Split(0)]));
                                    rb.push(Stop::new(sid, vec![Action::Split(0)]));
                                    ra.extend_from_slice(&a[pa + 1 + wa..]);
                                    rb.extend_from_slice(&b[pb + 1 + wb..]);
                                    let chain = self.chain_of(ji, &merged, si);
                                    let seg = PlatoonSegment {
                                        id: 0,
                                        members: vec![0, 1],
                                        path: chain.clone(),
                                    };
                                    let pair = vec![ra, rb];
                                    self.consider(
                                        self.finish(&pair, vec![seg.clone()], Vec::new()),
                                        best,
                                    );
                                    self.handovers(&pair, &seg, best);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    fn chain_of(&self, ji: usize, merged: &[(bool, &Stop)], si: usize) -> Vec<NodeId> {
        let net = &self.ctx.inst.network;
        let mut idxs = Vec::with_capacity(merged.len() + 2);
        idxs.push(ji);
        for &(_, stop) in merged {
            idxs.push(net.node_index(stop.node).unwrap());
        }
        idxs.push(si);
        let mut chain: Vec<NodeId> = Vec::new();
        for w in idxs.windows(2) {
            let part = self.ctx.tables.path_node_ids(w[0], w[1]);
            let skip = usize::from(!chain.is_empty());
            chain.extend(part.into_iter().skip(skip));
        }
        chain
    }

    /// Handover variants of one corridor plan: any nonempty set of
    /// full-corridor riders changes custody, and each moved dropoff is
    /// tried at every position after the receiver's split.
    fn handovers(&self, pair: &[Vec<Stop>], seg: &PlatoonSegment, best: &mut Option<Candidate>) {
        let riders0 = full_corridor_riders(&pair[0]);
        let riders1 = full_corridor_riders(&pair[1]);
        if riders0.is_empty() && riders1.is_empty() {
            return;
        }
        for mask0 in 0u32..(1 << riders0.len()) {
            for mask1 in 0u32..(1 << riders1.len()) {
                if mask0 == 0 && mask1 == 0 {
                    continue;
                }
                let mut movers: Vec<(u32, usize)> = Vec::new();
                for (i, &r) in riders0.iter().enumerate() {
                    if mask0 & (1 << i) != 0 {
                        movers.push((r, 0));
                    }
                }
                for (i, &r) in riders1.iter().enumerate() {
                    if mask1 & (1 << i) != 0 {
                        movers.push((r, 1));
                    }
                }
                self.place(&movers, 0, pair.to_vec(), Vec::new(), seg, best);
            }
        }
    }

    fn place(
        &self,
        movers: &[(u32, usize)],
        i: usize,
        routes: Vec<Vec<Stop>>,
        records: Vec<TransferRecord>,
        seg: &PlatoonSegment,
        best: &mut Option<Candidate>,
    ) {
        if i == movers.len() {
            let mut records = records;
            records.sort_by_key(|t| t.request);
            self.consider(self.finish(&routes, vec![seg.clone()], records), best);
            return;
        }
        let (r, donor) = movers[i];
        let receiver = 1 - donor;
        let mut base = routes;
        let Some(di) = find_action(&base[donor], &Action::Dropoff(r)) else { return };
        let stop = &mut base[donor][di];
        stop.actions.retain(|a| *a != Action::Dropoff(r));
        if stop.actions.is_empty() && di != 0 {
            base[donor].remove(di);
        }
        let Some(rsi) = find_action(&base[receiver], &Action::Split(seg.id)) else { return };
        let dropnode = self.ctx.inst.requests[r as usize].dropoff;
        for p in (rsi + 1)..=base[receiver].len() {
            let mut next = base.clone();
            next[receiver].insert(p, Stop::new(dropnode, vec![Action::Dropoff(r)]));
            let mut recs = records.clone();
            recs.push(TransferRecord {
                request: r,
                from: donor as u32,
                to: receiver as u32,
                arc: (seg.path[0], seg.path[1]),
            });
            self.place(movers, i + 1, next, recs, seg, best);
        }
    }
}

fn assignment_counts(code: u64, nk: usize, nr: usize) -> Vec<usize> {
    let mut counts = vec![0usize; nk];
    let mut rem = code;
    for _ in 0..nr {
        counts[(rem % nk as u64) as usize] += 1;
        rem /= nk as u64;
    }
    counts
}

/// All precedence-valid pickup/dropoff orders for one vehicle's
/// requests, as (request, is_pickup) sequences.
fn stop_orders(requests: &[u32]) -> Vec<Vec<(u32, bool)>> {
    fn rec(
        requests: &[u32],
        picked: &mut Vec<bool>,
        dropped: &mut Vec<bool>,
        seq: &mut Vec<(u32, bool)>,
        out: &mut Vec<Vec<(u32, bool)>>,
    ) {
        if seq.len() == 2 * requests.len() {
            out.push(seq.clone());
            return;
        }
        for i in 0..requests.len() {
            if !picked[i] {
                picked[i] = true;
                seq.push((requests[i], true));
                rec(requests, picked, dropped, seq, out);
                seq.pop();
                picked[i] = false;
            } else if !dropped[i] {
                dropped[i] = true;
                seq.push((requests[i], false));
                rec(requests, picked, dropped, seq, out);
                seq.pop();
                dropped[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(
        requests,
        &mut vec![false; requests.len()],
        &mut vec![false; requests.len()],
        &mut Vec::with_capacity(2 * requests.len()),
        &mut out,
    );
    out
}

/// Order-preserving merges of two stop slices; each entry keeps which
/// side the stop came from.
fn interleavings<'s>(a: &'s [Stop], b: &'s [Stop]) -> Vec<Vec<(bool, &'s Stop)>> {
    fn rec<'s>(
        a: &'s [Stop],
        b: &'s [Stop],
        cur: &mut Vec<(bool, &'s Stop)>,
        out: &mut Vec<Vec<(bool, &'s Stop)>>,
    ) {
        if a.is_empty() && b.is_empty() {
            out.push(cur.clone());
            return;
        }
        if let Some((first, rest)) = a.split_first() {
            cur.push((true, first));
            rec(rest, b, cur, out);
            cur.pop();
        }
        if let Some((first, rest)) = b.split_first() {
            cur.push((false, first));
            rec(a, rest, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(a, b, &mut Vec::with_capacity(a.len() + b.len()), &mut out);
    out
}

fn find_action(stops: &[Stop], needle: &Action) -> Option<usize> {
    stops.iter().position(|s| s.actions.contains(needle))
}

/// Requests picked up strictly before the join stop and dropped off
/// strictly after the split stop: exactly those are onboard for the
/// whole corridor and eligible for a handover.
fn full_corridor_riders(stops: &[Stop]) -> Vec<u32> {
    let Some(join) = stops.iter().position(|s| {
        s.actions.iter().any(|a| matches!(a, Action::Join(_)))
    }) else {
        return Vec::new();
    };
    let Some(split) = stops.iter().position(|s| {
        s.actions.iter().any(|a| matches!(a, Action::Split(_)))
    }) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (i, stop) in stops.iter().enumerate() {
        for action in &stop.actions {
            if let Action::Pickup(r) = action {
                if i < join {
                    let dropped_late = stops.iter().enumerate().any(|(j, s)| {
                        j > split && s.actions.contains(&Action::Dropoff(*r))
                    });
                    if dropped_late {
                        out.push(*r);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Flat deterministic encoding used for exact-tie ordering.
fn encoding(plan: &Plan) -> Vec<i64> {
    let mut e = Vec::new();
    for route in &plan.routes {
        e.push(-1);
        for stop in &route.stops {
            e.push(stop.node as i64);
            for action in &stop.actions {
                e.push(match *action {
                    Action::Pickup(r) => 100_000 + r as i64,
                    Action::Dropoff(r) => 200_000 + r as i64,
                    Action::Join(s) => 300_000 + s as i64,
                    Action::Split(s) => 400_000 + s as i64,
                    Action::Pass => 500_000,
                });
            }
        }
    }
    for seg in &plan.platoons {
        e.push(-2);
        e.extend(seg.members.iter().map(|&m| m as i64));
        e.push(-2);
        e.extend(seg.path.iter().map(|&n| n as i64));
    }
    for t in &plan.transfers {
        e.push(-3);
        e.extend([t.request as i64, t.from as i64, t.to as i64, t.arc.0 as i64, t.arc.1 as i64]);
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactError;
    use crate::heuristic::{solve_modular, solve_solo, SearchConfig};
    use crate::instance::{
        generate, GenConfig, Instance, Meta, Parameters, Request, Saving, Spatial, Temporal,
        Vehicle,
    };
    use crate::network::{all_pairs_shortest, synth, Arc as NetArc, Network, Node};
    use crate::schedule::evaluate_plan;

    fn line_network(n: u32) -> Network {
        let nodes = (0..n).map(|i| Node { id: i, x: i as f64, y: 0.0 }).collect();
        let arcs = (0..n - 1)
            .map(|i| NetArc { a: i, b: i + 1, distance: 1.0, time: 1.0 })
            .collect();
        Network::new(nodes, arcs).unwrap()
    }

    fn params(eta: f64, beta: f64) -> Parameters {
        Parameters {
            alpha: 1.0,
            beta,
            saving: Saving::Single { eta },
            max_platoon: 4,
        }
    }

    #[test]
    fn one_vehicle_one_request_takes_the_direct_path() {
        let inst = Instance {
            network: line_network(4),
            vehicles: vec![Vehicle { id: 0, start: 0, end: None, capacity: 4, ready: 0.0 }],
            requests: vec![Request {
                id: 0,
                pickup: 1,
                dropoff: 3,
                party: 2,
                ready: 0.0,
                pickup_window: None,
                dropoff_window: None,
            }],
            params: params(0.1, 1.0),
            meta: Meta::default(),
        };
        let ctx = Ctx::new(&inst).unwrap();
        let (plan, costs) = brute_force_solve(&ctx, &OracleLimits::default()).unwrap();
        // Drive 0-1, board, drive 1-2-3, alight: distance 3, service 3.
        assert!((costs.total - 9.0).abs() < 1e-9, "total {}", costs.total);
        let nodes: Vec<_> = plan.routes[0].stops.iter().map(|s| s.node).collect();
        assert_eq!(nodes, vec![0, 1, 3]);
        assert!(plan.platoons.is_empty() && plan.transfers.is_empty());
    }

    #[test]
    fn a_shared_corridor_is_platooned_end_to_end() {
        let inst = Instance {
            network: line_network(10),
            vehicles: (0..2)
                .map(|id| Vehicle { id, start: 0, end: None, capacity: 4, ready: 0.0 })
                .collect(),
            requests: (0..2)
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
            params: params(0.1, 0.0),
            meta: Meta::default(),
        };
        let ctx = Ctx::new(&inst).unwrap();
        let (plan, costs) = brute_force_solve(&ctx, &OracleLimits::default()).unwrap();
        // Parties fill each vehicle, so both drive the full line; docking
        // end to end discounts both tours: 18 - 2 * 0.1 * 9.
        assert!((costs.total - 16.2).abs() < 1e-9, "total {}", costs.total);
        assert_eq!(plan.platoons.len(), 1);
        assert_eq!(plan.platoons[0].members, vec![0, 1]);
        assert_eq!(plan.platoons[0].path, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn the_oracle_never_loses_to_the_heuristic() {
        let cfg = SearchConfig { n_recon: 6, ..SearchConfig::default() };
        for seed in 0..30u64 {
            let net = synth::small_connected(7, 3, seed);
            let tables = all_pairs_shortest(&net).unwrap();
            let gen_cfg = GenConfig::new(2, 2, Spatial::Uniform, Temporal::U01);
            let inst = generate(&net, &tables, &gen_cfg, seed).unwrap();
            let ctx = Ctx::new(&inst).unwrap();
            let (_, opt) = brute_force_solve(&ctx, &OracleLimits::default()).unwrap();
            let sol = solve_modular(&ctx, &cfg).unwrap();
            assert!(
                opt.total <= sol.costs.total + 1e-9,
                "seed {seed}: oracle {} above heuristic {}",
                opt.total,
                sol.costs.total
            );
        }
    }

    #[test]
    fn greedy_insertion_stays_above_the_solo_floor() {
        for seed in 0..20u64 {
            let net = synth::small_connected(7, 3, seed);
            let tables = all_pairs_shortest(&net).unwrap();
            let gen_cfg = GenConfig::new(2, 2, Spatial::Uniform, Temporal::U01);
            let inst = generate(&net, &tables, &gen_cfg, seed).unwrap();
            let ctx = Ctx::new(&inst).unwrap();
            let (_, floor) = brute_force_solo(&ctx, &OracleLimits::default()).unwrap();
            let solo = solve_solo(&ctx).unwrap();
            let (_, costs) = evaluate_plan(&ctx, &solo).unwrap();
            assert!(
                floor.total <= costs.total + 1e-9,
                "seed {seed}: floor {} above greedy {}",
                floor.total,
                costs.total
            );
        }
    }

    #[test]
    fn too_many_vehicles_are_refused_with_an_estimate() {
        let net = synth::small_connected(8, 2, 3);
        let tables = all_pairs_shortest(&net).unwrap();
        let gen_cfg = GenConfig::new(3, 3, Spatial::Uniform, Temporal::U01);
        let inst = generate(&net, &tables, &gen_cfg, 3).unwrap();
        let ctx = Ctx::new(&inst).unwrap();
        match brute_force_solve(&ctx, &OracleLimits::default()) {
            Err(ExactError::LimitsExceeded { estimate }) => assert!(estimate > 0),
            other => panic!("expected a refusal, got {other:?}"),
        }
    }
}
