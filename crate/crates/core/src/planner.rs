//! Region classification, case dispatch and path assembly.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    distance_to_polygon, point_in_polygon, segments_intersect, Point2, Pose2,
};
use crate::mapping::{self, CandidateSet, MatchCandidate, Splice};
use crate::netsearch::{
    join_polylines, search_candidate_pairs, BudgetScheme, PairScore, PairSearchResult, SearchError,
};
use crate::potential::{
    combine_layers, grid_dijkstra, lane_segments, polygon_mask, segment_distance_field,
    semantic_layer_from_fields, static_layer_from_mask, GridPath, GridSearchError, OccupancyGrid,
    PotentialGrid, PotentialParams,
};
use crate::roadnet::{NodeId, RoadNetwork};

pub const DEFAULT_RESAMPLE_SPACING: f64 = 0.25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("{kind}[{index}] ({name}): {reason}")]
    InvalidRegion {
        kind: RegionKind,
        index: usize,
        name: String,
        reason: String,
    },
    #[error("lane {lane}: {which} point ({x}, {y}) lies outside every passable polygon")]
    LaneOutsidePassable {
        lane: String,
        which: &'static str,
        x: f64,
        y: f64,
    },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("start point lies outside every region")]
    OffMapStart,
    #[error("goal point lies outside every region")]
    OffMapGoal,
    #[error("start point lies in an impassable cell")]
    StartBlocked,
    #[error("goal point lies in an impassable cell")]
    GoalBlocked,
    #[error("intersection {0} touches no lane node")]
    EmptySet(String),
    #[error("no route: {0}")]
    NoRoute(String),
}

impl From<SearchError> for PlanError {
    fn from(e: SearchError) -> Self {
        PlanError::NoRoute(e.to_string())
    }
}

impl From<GridSearchError> for PlanError {
    fn from(e: GridSearchError) -> Self {
        match e {
            GridSearchError::StartBlocked => PlanError::StartBlocked,
            GridSearchError::GoalBlocked => PlanError::GoalBlocked,
            GridSearchError::NoRoute => PlanError::NoRoute("grid search exhausted".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionKind {
    Passage,
    Intersection,
    Parking,
}

impl std::fmt::Display for RegionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RegionKind::Passage => "passages",
            RegionKind::Intersection => "intersections",
            RegionKind::Parking => "parking",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    pub polygon: Vec<Point2>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointClass {
    Passage,
    /// Index into the map's intersections.
    Intersection(usize),
    Parking,
    OffMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanCase {
    Passage2Passage,
    Intersection2Intersection,
    Mixed,
    SameIntersection,
    /// Produced by the grid baselines.
    GridBaseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LegKind {
    Connector,
    Network,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Leg {
    pub kind: LegKind,
    pub points: Vec<Point2>,
    pub length: f64,
}

impl Leg {
    fn new(kind: LegKind, points: Vec<Point2>) -> Self {
        let length = polyline_length(&points);
        Self {
            kind,
            points,
            length,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanResult {
    pub path: Vec<Pose2>,
    /// Length of the assembled polyline (m).
    pub length: f64,
    /// Wall-clock planning time (s).
    pub planning_time: f64,
    pub case: PlanCase,
    /// Sub-paths in travel order; their concatenation is the path before
    /// resampling.
    pub legs: Vec<Leg>,
}

impl PlanResult {
    pub fn positions(&self) -> Vec<Point2> {
        self.path.iter().map(|p| p.position).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanOptions {
    /// Map start and goal onto reverse lanes too. Off gives the strictly
    /// rule-compliant path.
    pub use_reverse_lanes: bool,
    pub budget: BudgetScheme,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            use_reverse_lanes: true,
            budget: BudgetScheme::BranchAndBound,
        }
    }
}

pub fn polyline_length(points: &[Point2]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Map with regions, road network and the precomputed potential layers.
#[derive(Debug, Clone)]
pub struct SemanticMap {
    passages: Vec<Region>,
    intersections: Vec<Region>,
    parking_areas: Vec<Region>,
    occupancy: OccupancyGrid,
    network: RoadNetwork,
    potential_params: PotentialParams,
    resample_spacing: f64,
    static_layer: PotentialGrid,
    combined: PotentialGrid,
    lane_distance: Vec<f64>,
}

fn is_simple(poly: &[Point2]) -> bool {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn validate_regions(kind: RegionKind, regions: &[Region]) -> Result<(), MapError> {
    for (index, r) in regions.iter().enumerate() {
        let fail = |reason: &str| MapError::InvalidRegion {
            kind,
            index,
            name: r.name.clone(),
            reason: reason.into(),
        };
        if r.polygon.len() < 3 {
            return Err(fail("polygon needs at least 3 vertices"));
        }
        if r.polygon.iter().any(|p| !p.is_finite()) {
            return Err(fail("non-finite vertex"));
        }
        if !is_simple(&r.polygon) {
            return Err(fail("polygon is not simple"));
        }
    }
    Ok(())
}

impl SemanticMap {
    pub fn new(
        passages: Vec<Region>,
        intersections: Vec<Region>,
        parking_areas: Vec<Region>,
        occupancy: OccupancyGrid,
        network: RoadNetwork,
        potential_params: PotentialParams,
        resample_spacing: f64,
    ) -> Result<Self, MapError> {
        validate_regions(RegionKind::Passage, &passages)?;
        validate_regions(RegionKind::Intersection, &intersections)?;
        validate_regions(RegionKind::Parking, &parking_areas)?;
        potential_params
            .validate()
            .map_err(|e| MapError::InvalidParam {
                name: "potential_params",
                reason: e.to_string(),
            })?;
        if !(resample_spacing.is_finite() && resample_spacing > 0.0) {
            return Err(MapError::InvalidParam {
                name: "resample_spacing",
                reason: format!("must be positive, got {resample_spacing}"),
            });
        }
        let polygons: Vec<Vec<Point2>> = passages
            .iter()
            .chain(&intersections)
            .chain(&parking_areas)
            .map(|r| r.polygon.clone())
            .collect();
        for lane in network.lanes() {
            for (which, p) in [("start", lane.a()), ("end", lane.b())] {
                let inside = polygons
                    .iter()
                    .any(|poly| point_in_polygon(p, poly).unwrap_or(false));
                if !inside {
                    return Err(MapError::LaneOutsidePassable {
                        lane: lane.id.to_string(),
                        which,
                        x: p.x,
                        y: p.y,
                    });
                }
            }
        }

        let geometry = occupancy.geometry;
        let mask = polygon_mask(&geometry, &polygons);
        let static_layer =
            static_layer_from_mask(&occupancy, Some(&mask), potential_params.inflation_radius);
        let lane_distance = segment_distance_field(&geometry, &lane_segments(&network));
        let semantic =
            semantic_layer_from_fields(&geometry, &mask, &lane_distance, &potential_params);
        let combined = combine_layers(&static_layer, &semantic)
            .expect("layers share the occupancy geometry");
        Ok(Self {
            passages,
            intersections,
            parking_areas,
            occupancy,
            network,
            potential_params,
            resample_spacing,
            static_layer,
            combined,
            lane_distance,
        })
    }

    pub fn passages(&self) -> &[Region] {
        &self.passages
    }

    pub fn intersections(&self) -> &[Region] {
        &self.intersections
    }

    pub fn parking_areas(&self) -> &[Region] {
        &self.parking_areas
    }

    pub fn occupancy(&self) -> &OccupancyGrid {
        &self.occupancy
    }

    pub fn network(&self) -> &RoadNetwork {
        &self.network
    }

    pub fn potential_params(&self) -> &PotentialParams {
        &self.potential_params
    }

    pub fn resample_spacing(&self) -> f64 {
        self.resample_spacing
    }

    /// Inflated obstacles plus everything outside the passable area.
    pub fn static_layer(&self) -> &PotentialGrid {
        &self.static_layer
    }

    /// Static layer combined with the Gaussian lane layer.
    pub fn combined_layer(&self) -> &PotentialGrid {
        &self.combined
    }

    /// Per-cell distance from the cell centre to the nearest lane.
    pub fn lane_distance(&self) -> &[f64] {
        &self.lane_distance
    }

    /// Node-membership tolerance for intersections.
    pub fn epsilon(&self) -> f64 {
        self.occupancy.geometry.resolution
    }
}

pub fn classify_point(p: Point2, map: &SemanticMap) -> PointClass {
    let inside = |r: &Region| point_in_polygon(p, &r.polygon).unwrap_or(false);
    if let Some(i) = map.intersections.iter().position(inside) {
        return PointClass::Intersection(i);
    }
    if map.parking_areas.iter().any(inside) {
        return PointClass::Parking;
    }
    if map.passages.iter().any(inside) {
        return PointClass::Passage;
    }
    PointClass::OffMap
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundarySide {
    /// Lane start nodes: ways out of the intersection.
    Exit,
    /// Lane end nodes: ways in.
    Entry,
}

/// Network nodes within `eps` of the polygon (inside counts).
pub fn find_intersected_points(
    region: &Region,
    net: &RoadNetwork,
    side: BoundarySide,
    eps: f64,
) -> Result<Vec<NodeId>, PlanError> {
    let mut nodes = Vec::new();
    for lane in net.lanes() {
        let (n, p) = match side {
            BoundarySide::Exit => (net.start_node(lane.id), lane.a()),
            BoundarySide::Entry => (net.end_node(lane.id), lane.b()),
        };
        let near = point_in_polygon(p, &region.polygon).unwrap_or(false)
            || distance_to_polygon(p, &region.polygon).is_ok_and(|d| d <= eps);
        if near {
            nodes.extend(n);
        }
    }
    if nodes.is_empty() {
        return Err(PlanError::EmptySet(region.name.clone()));
    }
    Ok(nodes)
}

fn node_candidates(query: Point2, nodes: &[NodeId], net: &RoadNetwork) -> Vec<MatchCandidate> {
    nodes
        .iter()
        .map(|&n| {
            let (lane, is_start) = net.node_lane(n);
            let splice = if is_start {
                Splice::AtStartNode
            } else {
                Splice::AtEndNode
            };
            MatchCandidate::on_lane(query, lane, splice)
        })
        .collect()
}

fn grid_leg(map: &SemanticMap, from: Point2, to: Point2) -> Result<GridPath, PlanError> {
    Ok(grid_dijkstra(
        &map.combined,
        from,
        to,
        &map.potential_params,
    )?)
}

/// Uniform arc-length densification that keeps every original vertex.
/// Headings follow the forward difference; the last pose copies its
/// predecessor.
pub fn resample_path(path: &[Point2], spacing: f64) -> Vec<Pose2> {
    let mut pts: Vec<Point2> = Vec::with_capacity(path.len());
    for (i, &p) in path.iter().enumerate() {
        if i == 0 {
            pts.push(p);
            continue;
        }
        let a = path[i - 1];
        let len = a.distance(p);
        if len == 0.0 {
            continue;
        }
        let pieces = (len / spacing).ceil().max(1.0) as usize;
        for k in 1..pieces {
            pts.push(a.lerp(p, k as f64 / pieces as f64));
        }
        pts.push(p);
    }
    let n = pts.len();
    let mut poses = Vec::with_capacity(n);
    for i in 0..n {
        let heading = if n == 1 {
            0.0
        } else if i + 1 < n {
            (pts[i + 1] - pts[i]).heading()
        } else {
            (pts[n - 1] - pts[n - 2]).heading()
        };
        poses.push(Pose2 {
            position: pts[i],
            heading,
        });
    }
    poses
}

fn assemble(legs: Vec<Leg>, case: PlanCase, spacing: f64, started: Instant) -> PlanResult {
    let joined = join_polylines(legs.iter().map(|l| l.points.as_slice()));
    let length = polyline_length(&joined);
    let path = resample_path(&joined, spacing);
    PlanResult {
        path,
        length,
        planning_time: started.elapsed().as_secs_f64(),
        case,
        legs,
    }
}

fn network_leg(search: &PairSearchResult) -> Leg {
    Leg::new(LegKind::Network, search.network_path.clone())
}

fn connector(a: Point2, b: Point2) -> Leg {
    Leg::new(LegKind::Connector, if a == b { vec![a] } else { vec![a, b] })
}

fn map_side(
    p: Point2,
    map: &SemanticMap,
    start: bool,
    opts: &PlanOptions,
) -> Result<CandidateSet, PlanError> {
    let net = &map.network;
    let set = if start {
        mapping::map_start_point_with(p, net, opts.use_reverse_lanes)
    } else {
        mapping::map_goal_point_with(p, net, opts.use_reverse_lanes)
    };
    set.map_err(|e| PlanError::NoRoute(e.to_string()))
}

/// Both points in passages or parking areas.
pub fn plan_case1(
    p_s: Point2,
    p_g: Point2,
    map: &SemanticMap,
    opts: &PlanOptions,
) -> Result<PlanResult, PlanError> {
    let started = Instant::now();
    let starts = map_side(p_s, map, true, opts)?;
    let goals = map_side(p_g, map, false, opts)?;
    let search = search_candidate_pairs(
        &map.network,
        starts.as_slice(),
        goals.as_slice(),
        opts.budget,
        PairScore::WithConnectors,
    )?;
    let legs = vec![
        connector(p_s, search.start.point),
        network_leg(&search),
        connector(search.goal.point, p_g),
    ];
    Ok(assemble(
        legs,
        PlanCase::Passage2Passage,
        map.resample_spacing,
        started,
    ))
}

/// Points in two distinct intersections: best network path between their
/// boundary nodes, closed by grid searches on the combined potential map.
pub fn plan_case2(
    p_s: Point2,
    p_g: Point2,
    map: &SemanticMap,
    opts: &PlanOptions,
) -> Result<PlanResult, PlanError> {
    let started = Instant::now();
    let (PointClass::Intersection(si), PointClass::Intersection(gi)) =
        (classify_point(p_s, map), classify_point(p_g, map))
    else {
        return Err(PlanError::NoRoute(
            "both points must lie in intersections".into(),
        ));
    };
    let net = &map.network;
    let eps = map.epsilon();
    let exits = find_intersected_points(&map.intersections[si], net, BoundarySide::Exit, eps)?;
    let entries = find_intersected_points(&map.intersections[gi], net, BoundarySide::Entry, eps)?;
    let search = search_candidate_pairs(
        net,
        &node_candidates(p_s, &exits, net),
        &node_candidates(p_g, &entries, net),
        opts.budget,
        PairScore::NetworkOnly,
    )?;
    let head = grid_leg(map, p_s, search.start.point)?;
    let tail = grid_leg(map, search.goal.point, p_g)?;
    let legs = vec![
        Leg::new(LegKind::Grid, head.path),
        network_leg(&search),
        Leg::new(LegKind::Grid, tail.path),
    ];
    Ok(assemble(
        legs,
        PlanCase::Intersection2Intersection,
        map.resample_spacing,
        started,
    ))
}

fn plan_same_intersection(
    p_s: Point2,
    p_g: Point2,
    map: &SemanticMap,
) -> Result<PlanResult, PlanError> {
    let started = Instant::now();
    let grid = grid_leg(map, p_s, p_g)?;
    Ok(assemble(
        vec![Leg::new(LegKind::Grid, grid.path)],
        PlanCase::SameIntersection,
        map.resample_spacing,
        started,
    ))
}

/// One point in an intersection, the other in a passage or parking area.
fn plan_mixed(
    p_s: Point2,
    p_g: Point2,
    start_in: Option<usize>,
    goal_in: Option<usize>,
    map: &SemanticMap,
    opts: &PlanOptions,
) -> Result<PlanResult, PlanError> {
    let started = Instant::now();
    let net = &map.network;
    let eps = map.epsilon();
    let starts = match start_in {
        Some(i) => node_candidates(
            p_s,
            &find_intersected_points(&map.intersections[i], net, BoundarySide::Exit, eps)?,
            net,
        ),
        None => map_side(p_s, map, true, opts)?.into_vec(),
    };
    let goals = match goal_in {
        Some(i) => node_candidates(
            p_g,
            &find_intersected_points(&map.intersections[i], net, BoundarySide::Entry, eps)?,
            net,
        ),
        None => map_side(p_g, map, false, opts)?.into_vec(),
    };
    let search = search_candidate_pairs(
        net,
        &starts,
        &goals,
        opts.budget,
        PairScore::WithConnectors,
    )?;
    let head = match start_in {
        Some(_) => Leg::new(LegKind::Grid, grid_leg(map, p_s, search.start.point)?.path),
        None => connector(p_s, search.start.point),
    };
    let tail = match goal_in {
        Some(_) => Leg::new(LegKind::Grid, grid_leg(map, search.goal.point, p_g)?.path),
        None => connector(search.goal.point, p_g),
    };
    Ok(assemble(
        vec![head, network_leg(&search), tail],
        PlanCase::Mixed,
        map.resample_spacing,
        started,
    ))
}

pub fn plan(p_s: Point2, p_g: Point2, map: &SemanticMap) -> Result<PlanResult, PlanError> {
    plan_with(p_s, p_g, map, &PlanOptions::default())
}

pub fn plan_with(
    p_s: Point2,
    p_g: Point2,
    map: &SemanticMap,
    opts: &PlanOptions,
) -> Result<PlanResult, PlanError> {
    let started = Instant::now();
    let cs = classify_point(p_s, map);
    let cg = classify_point(p_g, map);
    if cs == PointClass::OffMap {
        return Err(PlanError::OffMapStart);
    }
    if cg == PointClass::OffMap {
        return Err(PlanError::OffMapGoal);
    }
    let as_intersection = |c: PointClass| match c {
        PointClass::Intersection(i) => Some(i),
        _ => None,
    };
    let (si, gi) = (as_intersection(cs), as_intersection(cg));
    let case = match (si, gi) {
        (None, None) => PlanCase::Passage2Passage,
        (Some(a), Some(b)) if a == b => PlanCase::SameIntersection,
        (Some(_), Some(_)) => PlanCase::Intersection2Intersection,
        _ => PlanCase::Mixed,
    };
    if p_s == p_g {
        return Ok(assemble(
            vec![Leg::new(LegKind::Connector, vec![p_s])],
            case,
            map.resample_spacing,
            started,
        ));
    }
    match case {
        PlanCase::Passage2Passage => plan_case1(p_s, p_g, map, opts),
        PlanCase::SameIntersection => plan_same_intersection(p_s, p_g, map),
        PlanCase::Intersection2Intersection => plan_case2(p_s, p_g, map, opts),
        _ => plan_mixed(p_s, p_g, si, gi, map, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point_segment_distance;

    #[test]
    fn resample_straight() {
        let poses = resample_path(&[Point2::new(0.0, 0.0), Point2::new(10.0, 0.0)], 1.0);
        assert_eq!(poses.len(), 11);
        assert!(poses.iter().all(|p| p.heading == 0.0));
        assert_eq!(poses[10].position, Point2::new(10.0, 0.0));
        for (i, p) in poses.iter().enumerate() {
            assert!((p.position.x - i as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn resample_single_point() {
        let poses = resample_path(&[Point2::new(3.0, 4.0)], 0.25);
        assert_eq!(poses.len(), 1);
        assert_eq!(poses[0].heading, 0.0);
    }

    #[test]
    fn resample_right_angle() {
        let path = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
        ];
        let poses = resample_path(&path, 0.3);
        // ceil(1/0.3) = 4 pieces per leg.
        assert_eq!(poses.len(), 9);
        assert_eq!(poses[4].position, Point2::new(1.0, 0.0));
        assert_eq!(poses[3].heading, 0.0);
        assert!((poses[4].heading - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((poses[8].heading - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        for w in poses.windows(2) {
            assert!(w[0].position.distance(w[1].position) <= 0.3 + 1e-12);
        }
        for p in &poses {
            let d = point_segment_distance(p.position, path[0], path[1])
                .min(point_segment_distance(p.position, path[1], path[2]));
            assert!(d < 1e-9);
        }
    }

    #[test]
    fn simple_polygon_check() {
        let square = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        assert!(is_simple(&square));
        let bowtie = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        assert!(!is_simple(&bowtie));
    }
}
