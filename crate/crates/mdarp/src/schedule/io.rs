use super::{CostBreakdown, Plan, ScheduleError, Timeline};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// On-disk solution: the plan plus everything derived from it. Field
/// order is fixed so files diff cleanly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub plan: Plan,
    pub timeline: Timeline,
    pub costs: CostBreakdown,
}

fn read<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ScheduleError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScheduleError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| ScheduleError::Parse {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

fn write<T: Serialize>(value: &T, path: &Path) -> Result<(), ScheduleError> {
    let text = serde_json::to_string_pretty(value).expect("serialization cannot fail");
    std::fs::write(path, text).map_err(|source| ScheduleError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a bare plan. Structure is validated lazily, by whichever
/// operation consumes the plan together with its instance.
pub fn load_plan(path: &Path) -> Result<Plan, ScheduleError> {
    read(path)
}

pub fn save_plan(plan: &Plan, path: &Path) -> Result<(), ScheduleError> {
    write(plan, path)
}

pub fn load_solution(path: &Path) -> Result<SolutionFile, ScheduleError> {
    read(path)
}

pub fn save_solution(solution: &SolutionFile, path: &Path) -> Result<(), ScheduleError> {
    write(solution, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{build_timeline, evaluate_cost, fixtures, ScheduleError};
    use crate::Ctx;

    #[test]
    fn plans_round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plan.json");
        let plan = fixtures::modular_plan();
        save_plan(&plan, &path).unwrap();
        let back = load_plan(&path).unwrap();
        assert_eq!(plan, back);
    }

    #[test]
    fn solutions_round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("solution.json");
        let inst = fixtures::instance();
        let ctx = Ctx::new(&inst).unwrap();
        let plan = fixtures::modular_plan();
        let timeline = build_timeline(&ctx, &plan).unwrap();
        let costs = evaluate_cost(&ctx, &plan, &timeline).unwrap();
        let solution = SolutionFile { plan, timeline, costs };
        save_solution(&solution, &path).unwrap();
        let back = load_solution(&path).unwrap();
        assert_eq!(solution.plan, back.plan);
        assert_eq!(solution.timeline, back.timeline);
        assert_eq!(solution.costs.total, back.costs.total);
    }

    #[test]
    fn field_order_is_stable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plan.json");
        save_plan(&fixtures::modular_plan(), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let at = |key: &str| text.find(key).unwrap();
        assert!(at("\"routes\"") < at("\"platoons\""));
        assert!(at("\"platoons\"") < at("\"transfers\""));
        for tag in ["\"pickup\"", "\"dropoff\"", "\"join\"", "\"split\""] {
            assert!(text.contains(tag), "actions serialize in snake case: {tag}");
        }
    }

    #[test]
    fn missing_and_malformed_files_are_reported_with_their_path() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.json");
        match load_plan(&missing).unwrap_err() {
            ScheduleError::Io { path, .. } => assert!(path.ends_with("nope.json")),
            other => panic!("unexpected error: {other}"),
        }
        let garbled = dir.path().join("bad.json");
        std::fs::write(&garbled, "{\"routes\": [").unwrap();
        match load_plan(&garbled).unwrap_err() {
            ScheduleError::Parse { path, .. } => assert!(path.ends_with("bad.json")),
            other => panic!("unexpected error: {other}"),
        }
    }
}
