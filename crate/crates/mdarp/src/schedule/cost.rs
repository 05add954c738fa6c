//! Objective evaluation. The vehicle term walks every expansion arc and
//! applies the platoon saving for that arc's partner count; the
//! passenger term charges each request's party for the minutes between
//! its ready time and its dropoff.

use super::feasibility::check_with;
use super::{expand, CostBreakdown, Expanded, Plan, ScheduleError, Timeline};
use crate::Ctx;

/// Evaluates a plan against a timeline, refusing infeasible input.
pub fn evaluate_cost(
    ctx: &Ctx,
    plan: &Plan,
    timeline: &Timeline,
) -> Result<CostBreakdown, ScheduleError> {
    let expanded = expand(ctx, plan)?;
    super::feasibility::require_shape(plan, timeline)?;
    let report = check_with(ctx, plan, &expanded, timeline);
    if let Some(first) = report.violations.first() {
        return Err(ScheduleError::Infeasible {
            count: report.violations.len(),
            first: first.to_string(),
        });
    }
    Ok(evaluate_with(ctx, plan, &expanded, timeline))
}

/// Full pipeline: validate, build the earliest-feasible timeline, check
/// feasibility and price the plan.
pub fn evaluate_plan(ctx: &Ctx, plan: &Plan) -> Result<(Timeline, CostBreakdown), ScheduleError> {
    let expanded = expand(ctx, plan)?;
    let timeline = super::timeline::build_with(ctx, plan, &expanded)?;
    let report = check_with(ctx, plan, &expanded, &timeline);
    if let Some(first) = report.violations.first() {
        return Err(ScheduleError::Infeasible {
            count: report.violations.len(),
            first: first.to_string(),
        });
    }
    let costs = evaluate_with(ctx, plan, &expanded, &timeline);
    Ok((timeline, costs))
}

pub(crate) fn evaluate_with(
    ctx: &Ctx,
    plan: &Plan,
    expanded: &Expanded,
    timeline: &Timeline,
) -> CostBreakdown {
    let inst = ctx.inst;
    let saving = inst.params.saving;
    let mut vehicle = 0.0;
    for (k, route) in expanded.routes.iter().enumerate() {
        for p in 0..route.arc_count() {
            let d = ctx
                .tables
                .arc_dist(route.nodes[p], route.nodes[p + 1])
                .unwrap();
            vehicle += d * saving.factor(expanded.partners(plan, k, p));
        }
    }
    let mut passenger = 0.0;
    for (r, req) in inst.requests.iter().enumerate() {
        passenger += req.party as f64 * (timeline.dropoff[r] - req.ready);
    }
    let total = inst.params.alpha * vehicle + inst.params.beta * passenger;
    CostBreakdown {
        vehicle_travel_cost: vehicle,
        passenger_service_time: passenger,
        total,
    }
}

/// Percentage cost difference of a modular total against a solo
/// baseline; negative means the modular plan is cheaper.
pub fn cost_difference(solo_total: f64, modular_total: f64) -> Result<f64, ScheduleError> {
    if !solo_total.is_finite() || solo_total <= 0.0 {
        return Err(ScheduleError::BadSoloTotal(solo_total));
    }
    Ok((modular_total - solo_total) / solo_total * 100.0)
}

/// The same stop sequences with all platooning removed: segments are
/// dropped and join/split markers erased, so every vehicle traverses its
/// walk alone at full cost. Transfers cannot survive without platoons.
pub fn strip_platoons(plan: &Plan) -> Result<Plan, ScheduleError> {
    if !plan.transfers.is_empty() {
        return Err(ScheduleError::StripWithTransfers);
    }
    let mut out = plan.clone();
    out.platoons.clear();
    for route in &mut out.routes {
        for stop in &mut route.stops {
            stop.actions.retain(|a| {
                !matches!(a, super::Action::Join(_) | super::Action::Split(_))
            });
        }
    }
    Ok(out)
}
