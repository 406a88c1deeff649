//! Path quality and timing indexes.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{plan_baseline, BaselineKind};
use crate::geometry::{angle_diff, project_point_onto_segment, Point2, Pose2};
use crate::planner::{plan, PlanError, PlanResult, SemanticMap};
use crate::roadnet::{Lane, RoadNetwork};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("road network is empty")]
    EmptyNetwork,
    #[error("path is empty")]
    EmptyPath,
    #[error("cycles must be at least 1")]
    ZeroCycles,
    #[error(transparent)]
    Plan(#[from] PlanError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Mean planning time over the cycles (s).
    pub t: f64,
    pub l: f64,
    pub d_e: f64,
    pub theta_e: f64,
    /// `l + Σ|d_i| + Σ|Δθ_i|`.
    pub j_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PlannerKind {
    Ours,
    Baseline(BaselineKind),
}

impl PlannerKind {
    pub const FREE_DIJKSTRA: PlannerKind = PlannerKind::Baseline(BaselineKind::FreeDijkstra);

    pub fn dijkstra_in_ss() -> Self {
        PlannerKind::Baseline(BaselineKind::in_ss())
    }

    pub fn label(&self) -> &'static str {
        match self {
            PlannerKind::Ours => "Ours",
            PlannerKind::Baseline(BaselineKind::FreeDijkstra) => "Dijkstra",
            PlannerKind::Baseline(BaselineKind::DijkstraInSS { .. }) => "Dijkstra-in-SS",
        }
    }
}

pub fn run_planner(
    kind: PlannerKind,
    p_s: Point2,
    p_g: Point2,
    map: &SemanticMap,
) -> Result<PlanResult, PlanError> {
    match kind {
        PlannerKind::Ours => plan(p_s, p_g, map),
        PlannerKind::Baseline(b) => plan_baseline(b, p_s, p_g, map),
    }
}

pub fn path_length(path: &[Point2]) -> f64 {
    path.windows(2).map(|w| w[0].distance(w[1])).sum()
}

fn closest(p: Point2, net: &RoadNetwork) -> Result<&Lane, MetricsError> {
    net.closest_lane(p).ok_or(MetricsError::EmptyNetwork)
}

/// Unsigned perpendicular distance from `p` to the line through its closest
/// lane.
pub fn point_deviation(p: Point2, net: &RoadNetwork) -> Result<f64, MetricsError> {
    let lane = closest(p, net)?;
    let proj = project_point_onto_segment(p, lane.a(), lane.b())
        .expect("lanes are validated non-degenerate");
    Ok(proj.signed_distance.abs())
}

pub fn heading_deviation(pose: &Pose2, net: &RoadNetwork) -> Result<f64, MetricsError> {
    let lane = closest(pose.position, net)?;
    Ok(angle_diff(pose.heading, lane.heading()).abs())
}

/// Mean distance deviation `d_e`.
pub fn distance_deviation(path: &[Point2], net: &RoadNetwork) -> Result<f64, MetricsError> {
    if path.is_empty() {
        return Err(MetricsError::EmptyPath);
    }
    let mut sum = 0.0;
    for &p in path {
        sum += point_deviation(p, net)?;
    }
    Ok(sum / path.len() as f64)
}

/// Mean heading deviation `θ_e`.
pub fn direction_deviation(path: &[Pose2], net: &RoadNetwork) -> Result<f64, MetricsError> {
    if path.is_empty() {
        return Err(MetricsError::EmptyPath);
    }
    let mut sum = 0.0;
    for p in path {
        sum += heading_deviation(p, net)?;
    }
    Ok(sum / path.len() as f64)
}

/// Quality indexes of a finished plan. `t` is the plan's own timing.
pub fn evaluate(result: &PlanResult, net: &RoadNetwork) -> Result<MetricsReport, MetricsError> {
    let positions = result.positions();
    let l = path_length(&positions);
    let n = result.path.len() as f64;
    let d_e = distance_deviation(&positions, net)?;
    let theta_e = direction_deviation(&result.path, net)?;
    Ok(MetricsReport {
        t: result.planning_time,
        l,
        d_e,
        theta_e,
        j_cost: l + d_e * n + theta_e * n,
    })
}

/// Plans `cycles` times in sequence and reports the mean wall-clock time with
/// the quality indexes of the (deterministic) result.
pub fn timed_plan(
    kind: PlannerKind,
    p_s: Point2,
    p_g: Point2,
    map: &SemanticMap,
    cycles: usize,
) -> Result<MetricsReport, MetricsError> {
    let (report, _) = timed_plan_with_result(kind, p_s, p_g, map, cycles)?;
    Ok(report)
}

pub fn timed_plan_with_result(
    kind: PlannerKind,
    p_s: Point2,
    p_g: Point2,
    map: &SemanticMap,
    cycles: usize,
) -> Result<(MetricsReport, PlanResult), MetricsError> {
    if cycles == 0 {
        return Err(MetricsError::ZeroCycles);
    }
    let mut total = 0.0;
    let mut last = None;
    for _ in 0..cycles {
        let t0 = Instant::now();
        let r = run_planner(kind, p_s, p_g, map)?;
        total += t0.elapsed().as_secs_f64();
        last = Some(r);
    }
    let result = last.expect("at least one cycle");
    let mut report = evaluate(&result, map.network())?;
    report.t = total / cycles as f64;
    Ok((report, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadnet::{Lane, LaneId, LinkParams};
    use std::f64::consts::PI;

    fn net() -> RoadNetwork {
        let lanes = vec![
            Lane::new(LaneId(1), Point2::new(0.0, 0.0), Point2::new(10.0, 0.0)).unwrap(),
        ];
        RoadNetwork::from_lanes(lanes, LinkParams::default()).unwrap()
    }

    #[test]
    fn lengths() {
        assert_eq!(path_length(&[Point2::new(0.0, 0.0), Point2::new(10.0, 0.0)]), 10.0);
        assert_eq!(path_length(&[Point2::new(1.0, 1.0)]), 0.0);
        assert_eq!(path_length(&[Point2::new(0.0, 0.0), Point2::new(3.0, 4.0)]), 5.0);
    }

    #[test]
    fn distance_examples() {
        let n = net();
        let on = [Point2::new(1.0, 0.0), Point2::new(5.0, 0.0)];
        assert_eq!(distance_deviation(&on, &n).unwrap(), 0.0);
        let off = [Point2::new(1.0, 3.0), Point2::new(9.0, 3.0)];
        assert!((distance_deviation(&off, &n).unwrap() - 3.0).abs() < 1e-12);
        let mixed = [Point2::new(1.0, 1.0), Point2::new(9.0, -3.0)];
        assert!((distance_deviation(&mixed, &n).unwrap() - 2.0).abs() < 1e-12);
        // Beyond the lane end the perpendicular line distance is used.
        let beyond = [Point2::new(12.0, 1.0)];
        assert!((distance_deviation(&beyond, &n).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn direction_examples() {
        let n = net();
        let pose = |h| Pose2::new(Point2::new(2.0, 0.0), h);
        assert_eq!(direction_deviation(&[pose(0.0)], &n).unwrap(), 0.0);
        assert!((direction_deviation(&[pose(PI)], &n).unwrap() - PI).abs() < 1e-12);
        let d = direction_deviation(&[pose(0.1), pose(-0.3)], &n).unwrap();
        assert!((d - 0.2).abs() < 1e-12);
    }

    #[test]
    fn empty_inputs() {
        let empty = RoadNetwork::from_lanes(Vec::new(), LinkParams::default());
        if let Ok(e) = empty {
            assert_eq!(
                distance_deviation(&[Point2::new(0.0, 0.0)], &e),
                Err(MetricsError::EmptyNetwork)
            );
        }
        assert_eq!(distance_deviation(&[], &net()), Err(MetricsError::EmptyPath));
    }
}
