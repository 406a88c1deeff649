//! Grid comparison planners: free-space Dijkstra and Dijkstra with a
//! road-network distance penalty.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::geometry::Point2;
use crate::planner::{
    polyline_length, resample_path, Leg, LegKind, PlanCase, PlanError, PlanResult, SemanticMap,
};
use crate::potential::{grid_search, GridPath, LETHAL};

/// Penalty per metre of distance to the nearest lane, per step.
pub const DEFAULT_K_D: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BaselineKind {
    /// Step cost is the step length.
    FreeDijkstra,
    /// Step cost is `step_length + k_d · d(cell centre, nearest lane)`.
    DijkstraInSS { k_d: f64 },
}

impl BaselineKind {
    pub fn in_ss() -> Self {
        BaselineKind::DijkstraInSS { k_d: DEFAULT_K_D }
    }
}

/// Raw grid search on the static layer.
pub fn baseline_grid_path(
    kind: BaselineKind,
    p_s: Point2,
    p_g: Point2,
    map: &SemanticMap,
) -> Result<GridPath, PlanError> {
    let layer = map.static_layer();
    let passable = |i: usize| layer.values[i] != LETHAL;
    let out = match kind {
        BaselineKind::FreeDijkstra => grid_search(&layer.geometry, p_s, p_g, passable, |_, len| len),
        BaselineKind::DijkstraInSS { k_d } => {
            let dist = map.lane_distance();
            grid_search(&layer.geometry, p_s, p_g, passable, |i, len| {
                len + k_d * dist[i]
            })
        }
    };
    Ok(out?)
}

pub fn plan_baseline(
    kind: BaselineKind,
    p_s: Point2,
    p_g: Point2,
    map: &SemanticMap,
) -> Result<PlanResult, PlanError> {
    let started = Instant::now();
    if let BaselineKind::DijkstraInSS { k_d } = kind {
        if !(k_d >= 0.0 && k_d.is_finite()) {
            return Err(PlanError::NoRoute(format!("invalid k_d {k_d}")));
        }
    }
    let grid = baseline_grid_path(kind, p_s, p_g, map)?;
    let length = polyline_length(&grid.path);
    let path = resample_path(&grid.path, map.resample_spacing());
    Ok(PlanResult {
        path,
        length,
        planning_time: started.elapsed().as_secs_f64(),
        case: PlanCase::GridBaseline,
        legs: vec![Leg {
            kind: LegKind::Grid,
            points: grid.path,
            length,
        }],
    })
}
