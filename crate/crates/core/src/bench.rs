//! Benchmark harness: every planner on every scenario, one table of
//! `t`, `l`, `d_e`, `θ_e` per scenario.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::geometry::Point2;
use crate::io::Scenario;
use crate::metrics::{timed_plan_with_result, MetricsReport, PlannerKind};
use crate::planner::{PlanCase, SemanticMap};

/// Column kept for table shape; this planner is not implemented.
pub const PLACEHOLDER_COLUMN: &str = "HybridA*-in-SS";

pub const METRIC_ROWS: [&str; 4] = ["t", "l", "d_e", "theta_e"];

pub fn default_planners() -> Vec<PlannerKind> {
    vec![
        PlannerKind::FREE_DIJKSTRA,
        PlannerKind::dijkstra_in_ss(),
        PlannerKind::Ours,
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioTable {
    pub name: String,
    pub start: [f64; 2],
    pub goal: [f64; 2],
    /// Case chosen by our planner, when it succeeded.
    pub case: Option<PlanCase>,
    /// metric → planner → value; `null` for failures and the placeholder.
    pub rows: BTreeMap<String, BTreeMap<String, Option<f64>>>,
    pub errors: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub cycles: usize,
    pub columns: Vec<String>,
    pub scenarios: Vec<ScenarioTable>,
}

fn metric(m: &MetricsReport, row: &str) -> f64 {
    match row {
        "t" => m.t,
        "l" => m.l,
        "d_e" => m.d_e,
        _ => m.theta_e,
    }
}

pub fn run_bench(
    map: &SemanticMap,
    scenarios: &[Scenario],
    planners: &[PlannerKind],
    cycles: usize,
) -> BenchReport {
    let mut columns: Vec<String> = planners.iter().map(|p| p.label().to_string()).collect();
    columns.push(PLACEHOLDER_COLUMN.to_string());
    let mut tables = Vec::with_capacity(scenarios.len());
    for sc in scenarios {
        let p_s = Point2::new(sc.start[0], sc.start[1]);
        let p_g = Point2::new(sc.goal[0], sc.goal[1]);
        let mut rows: BTreeMap<String, BTreeMap<String, Option<f64>>> = METRIC_ROWS
            .iter()
            .map(|r| (r.to_string(), BTreeMap::new()))
            .collect();
        let mut errors = BTreeMap::new();
        let mut case = None;
        for &kind in planners {
            let label = kind.label().to_string();
            let outcome = timed_plan_with_result(kind, p_s, p_g, map, cycles.max(1));
            match outcome {
                Ok((m, result)) => {
                    if kind == PlannerKind::Ours {
                        case = Some(result.case);
                    }
                    for r in METRIC_ROWS {
                        rows.get_mut(r).unwrap().insert(label.clone(), Some(metric(&m, r)));
                    }
                }
                Err(e) => {
                    for r in METRIC_ROWS {
                        rows.get_mut(r).unwrap().insert(label.clone(), None);
                    }
                    errors.insert(label, e.to_string());
                }
            }
        }
        for r in METRIC_ROWS {
            rows.get_mut(r)
                .unwrap()
                .insert(PLACEHOLDER_COLUMN.to_string(), None);
        }
        tables.push(ScenarioTable {
            name: sc.name.clone(),
            start: sc.start,
            goal: sc.goal,
            case,
            rows,
            errors,
        });
    }
    BenchReport {
        cycles,
        columns,
        scenarios: tables,
    }
}
