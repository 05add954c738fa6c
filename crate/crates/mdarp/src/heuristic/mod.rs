//! Modular-mode solver: a solo insertion baseline improved by a large
//! neighborhood search over vehicle pairs, then multi-vehicle platoon
//! merging and residual insertion.
//!
//! The pipeline is [`solve_solo`] -> [`form_two_vehicle_platoons`] ->
//! [`merge_platoons`], wrapped by [`solve_modular`]. Every candidate
//! move is priced by the schedule module on a small sub-instance (the
//! touched vehicles and their requests on the shared network), and a
//! move is accepted only when that authoritative evaluation is feasible
//! and strictly cheaper, so the incumbent cost never increases.

mod assemble;
mod insertion;
mod joinsplit;
mod lcps;
mod merge;
mod pairs;
mod refine;

pub use insertion::solve_solo;
pub use joinsplit::{search_join_split, CandidateNodeList};
pub use lcps::{find_lcps, Lcps};
pub use merge::merge_platoons;
pub use pairs::{form_two_vehicle_platoons, PairFormation, PairSummary};

use crate::schedule::{evaluate_plan, ScheduleError, SolutionFile};
use crate::Ctx;
use thiserror::Error;

/// Margin under which a candidate does not count as an improvement.
pub(crate) const GAIN_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum HeuristicError {
    /// Solo insertion found no vehicle that can serve the request.
    #[error("request {0} has no capacity-feasible insertion")]
    NoFeasibleInsertion(u32),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Knobs for the platoon search. Defaults follow the published setup
/// where one exists; the rest bound the work per neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Join/split candidates returned per neighborhood query.
    pub n_max: usize,
    /// Weight of the |D1 - D2| imbalance term in the candidate score.
    pub phi: f64,
    /// Random route reconstructions per vehicle pair; the original
    /// routes are always tried as sample zero. Treated as at least 1.
    pub n_recon: usize,
    /// Grow accepted corridors outward while the cost improves.
    pub extension: bool,
    /// Cap on extension rounds per corridor.
    pub max_extension_rounds: usize,
    /// Search passenger handovers between platooned vehicles.
    pub transfers: bool,
    /// Reassignments enumerated exhaustively; larger spaces fall back
    /// to `n_recon` random samples.
    pub transfer_exhaustive_limit: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            n_max: 4,
            phi: 1.0,
            n_recon: 20,
            extension: true,
            max_extension_rounds: 10,
            transfers: true,
            transfer_exhaustive_limit: 64,
            seed: 0,
        }
    }
}

/// Runs the full pipeline and returns the final plan with its timeline
/// and costs. Deterministic for a fixed instance and config.
pub fn solve_modular(ctx: &Ctx, cfg: &SearchConfig) -> Result<SolutionFile, HeuristicError> {
    let solo = solve_solo(ctx)?;
    let formed = form_two_vehicle_platoons(ctx, &solo, cfg)?;
    let plan = merge_platoons(ctx, &formed.plan, cfg)?;
    let (timeline, costs) = evaluate_plan(ctx, &plan)?;
    Ok(SolutionFile { plan, timeline, costs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{
        generate, GenConfig, Instance, Meta, Parameters, Request, Saving, Spatial, Temporal,
        Vehicle,
    };
    use crate::network::{all_pairs_shortest, synth, Arc as NetArc, Network, Node};
    use crate::schedule::{evaluate_plan, TransferRecord};
    use crate::Ctx;

    /// Four rows by six columns of unit arcs, nodes numbered 1..24 row
    /// by row. Columns give short vertical corridors like 9-15-21.
    fn grid_network() -> Network {
        let id = |r: u32, c: u32| r * 6 + c + 1;
        let mut arcs = Vec::new();
        for r in 0..4 {
            for c in 0..6 {
                if c + 1 < 6 {
                    arcs.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < 4 {
                    arcs.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        Network::new(
            (1..=24).map(|id| Node { id, x: 0.0, y: 0.0 }).collect(),
            arcs.into_iter()
                .map(|(a, b)| NetArc { a, b, distance: 1.0, time: 1.0 })
                .collect(),
        )
        .unwrap()
    }

    /// Two vehicles whose riders all head for the bottom of the grid.
    /// Solo tours meet nowhere; the good modular answer docks both down
    /// the column 9-15-21 and hands request 1 from vehicle 1 to vehicle
    /// 0, which passes its dropoff anyway.
    fn shared_corridor_instance() -> Instance {
        let request = |id, pickup, dropoff| Request {
            id,
            pickup,
            dropoff,
            party: 2,
            ready: 0.0,
            pickup_window: None,
            dropoff_window: None,
        };
        Instance {
            network: grid_network(),
            vehicles: vec![
                Vehicle { id: 0, start: 1, end: None, capacity: 4, ready: 0.0 },
                Vehicle { id: 1, start: 5, end: None, capacity: 4, ready: 0.0 },
            ],
            requests: vec![request(0, 8, 20), request(1, 4, 19), request(2, 5, 24)],
            params: Parameters {
                alpha: 1.0,
                beta: 1.0,
                saving: Saving::Single { eta: 0.2 },
                max_platoon: 4,
            },
            meta: Meta::default(),
        }
    }

    #[test]
    fn the_shared_corridor_pattern_ends_with_a_handover() {
        let inst = shared_corridor_instance();
        let ctx = Ctx::new(&inst).unwrap();

        let solo = solve_solo(&ctx).unwrap();
        let (_, solo_costs) = evaluate_plan(&ctx, &solo).unwrap();
        assert_eq!(solo_costs.total, 57.0);

        let sol = solve_modular(&ctx, &SearchConfig::default()).unwrap();
        assert!(sol.costs.total < solo_costs.total);
        assert!((sol.costs.total - 56.2).abs() < 1e-9);
        assert_eq!(sol.plan.platoons.len(), 1);
        assert_eq!(sol.plan.platoons[0].members, vec![0, 1]);
        assert_eq!(sol.plan.platoons[0].path, vec![9, 15, 21]);
        assert_eq!(
            sol.plan.transfers,
            vec![TransferRecord { request: 1, from: 1, to: 0, arc: (9, 15) }]
        );
    }

    #[test]
    fn modular_never_loses_to_solo() {
        let cfg = SearchConfig { n_recon: 8, ..SearchConfig::default() };
        for seed in 0..10u64 {
            let net = synth::small_connected(12, 5, seed);
            let tables = all_pairs_shortest(&net).unwrap();
            let gen_cfg = GenConfig::new(3, 5, Spatial::Uniform, Temporal::U01);
            let inst = generate(&net, &tables, &gen_cfg, seed).unwrap();
            let ctx = Ctx::new(&inst).unwrap();

            let solo = solve_solo(&ctx).unwrap();
            let (_, solo_costs) = evaluate_plan(&ctx, &solo).unwrap();
            let sol = solve_modular(&ctx, &cfg).unwrap();
            assert!(
                sol.costs.total <= solo_costs.total + 1e-9,
                "seed {seed}: modular {} vs solo {}",
                sol.costs.total,
                solo_costs.total
            );
        }
    }

    #[test]
    fn zero_saving_and_free_time_change_nothing() {
        let cfg = SearchConfig { transfers: false, n_recon: 8, ..SearchConfig::default() };
        for seed in 0..5u64 {
            let net = synth::small_connected(12, 5, seed);
            let tables = all_pairs_shortest(&net).unwrap();
            let gen_cfg = GenConfig::new(3, 5, Spatial::Uniform, Temporal::U01);
            let mut inst = generate(&net, &tables, &gen_cfg, seed).unwrap();
            inst.params.saving = Saving::Single { eta: 0.0 };
            inst.params.beta = 0.0;
            let ctx = Ctx::new(&inst).unwrap();

            let solo = solve_solo(&ctx).unwrap();
            let (_, solo_costs) = evaluate_plan(&ctx, &solo).unwrap();
            let sol = solve_modular(&ctx, &cfg).unwrap();
            assert_eq!(sol.plan, solo, "seed {seed}");
            assert_eq!(sol.costs.total, solo_costs.total);
        }
    }

    #[test]
    fn a_fixed_seed_reproduces_the_solution() {
        let net = synth::small_connected(13, 6, 7);
        let tables = all_pairs_shortest(&net).unwrap();
        let gen_cfg = GenConfig::new(3, 6, Spatial::Clustered(2), Temporal::U01);
        let inst = generate(&net, &tables, &gen_cfg, 7).unwrap();
        let ctx = Ctx::new(&inst).unwrap();

        let cfg = SearchConfig { seed: 42, ..SearchConfig::default() };
        let first = solve_modular(&ctx, &cfg).unwrap();
        let second = solve_modular(&ctx, &cfg).unwrap();
        assert_eq!(first, second);

        let other = solve_modular(&ctx, &SearchConfig { seed: 43, ..cfg }).unwrap();
        let (_, re) = evaluate_plan(&ctx, &other.plan).unwrap();
        assert_eq!(re.total, other.costs.total);
    }
}
