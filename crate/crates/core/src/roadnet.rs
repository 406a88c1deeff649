//! Unidirectional road network: lanes, their from/to/reverse relations, and the
//! directed node graph built from them.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    angle_diff, point_segment_distance, project_point_onto_segment, segments_intersect, Point2,
    Pose2, SegmentRegion,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LaneId(pub u32);

impl fmt::Display for LaneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.0)
    }
}

pub type NodeId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoadNetError {
    #[error("lane {0}: start and end coincide")]
    DegenerateLane(LaneId),
    #[error("lane {0}: non-finite coordinates")]
    NonFinite(LaneId),
    #[error("duplicate lane id {0}")]
    DuplicateId(LaneId),
    #[error("invalid link parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("road network has no lanes")]
    Empty,
}

/// A straight one-way lane with exactly two nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Lane {
    pub id: LaneId,
    pub start: Pose2,
    pub end: Pose2,
    pub from_ids: BTreeSet<LaneId>,
    pub to_ids: BTreeSet<LaneId>,
    pub reverse_ids: BTreeSet<LaneId>,
}

impl Lane {
    pub fn new(id: LaneId, start: Point2, end: Point2) -> Result<Self, RoadNetError> {
        if !start.is_finite() || !end.is_finite() {
            return Err(RoadNetError::NonFinite(id));
        }
        if start == end {
            return Err(RoadNetError::DegenerateLane(id));
        }
        let heading = (end - start).heading();
        Ok(Self {
            id,
            start: Pose2::new(start, heading),
            end: Pose2::new(end, heading),
            from_ids: BTreeSet::new(),
            to_ids: BTreeSet::new(),
            reverse_ids: BTreeSet::new(),
        })
    }

    pub fn heading(&self) -> f64 {
        self.start.heading
    }

    pub fn length(&self) -> f64 {
        self.start.position.distance(self.end.position)
    }

    pub fn a(&self) -> Point2 {
        self.start.position
    }

    pub fn b(&self) -> Point2 {
        self.end.position
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        point_segment_distance(p, self.a(), self.b())
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        self.a().lerp(self.b(), t)
    }
}

/// Thresholds for lane linking and reverse-lane discovery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkParams {
    /// Max heading change between a lane end and a successor start (rad).
    pub alpha_min: f64,
    /// Max gap between a lane end and a successor start (m).
    pub d_min: f64,
    /// Min heading opposition for a reverse lane (rad).
    pub theta_threshold: f64,
    /// Max lateral offset for a reverse lane (m).
    pub d_threshold: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            alpha_min: 0.52,
            d_min: 0.5,
            theta_threshold: 3.0 * PI / 4.0,
            d_threshold: 6.0,
        }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<(), RoadNetError> {
        let positive = [
            ("alpha_min", self.alpha_min),
            ("d_min", self.d_min),
            ("d_threshold", self.d_threshold),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(RoadNetError::InvalidParam {
                    name,
                    reason: format!("must be positive, got {v}"),
                });
            }
        }
        if !(self.theta_threshold > PI / 2.0 && self.theta_threshold < PI) {
            return Err(RoadNetError::InvalidParam {
                name: "theta_threshold",
                reason: format!("must lie in (π/2, π), got {}", self.theta_threshold),
            });
        }
        Ok(())
    }
}

fn check_unique(lanes: &[Lane]) -> Result<(), RoadNetError> {
    let mut seen = BTreeSet::new();
    for lane in lanes {
        if !seen.insert(lane.id) {
            return Err(RoadNetError::DuplicateId(lane.id));
        }
    }
    Ok(())
}

/// Fills `from_ids`/`to_ids`: `j` succeeds `i` when the start of `j` lies
/// within `d_min` of the end of `i` and their headings differ by less than
/// `alpha_min`.
pub fn link_lanes(lanes: &mut [Lane], params: &LinkParams) -> Result<(), RoadNetError> {
    check_unique(lanes)?;
    for lane in lanes.iter_mut() {
        lane.from_ids.clear();
        lane.to_ids.clear();
    }
    let n = lanes.len();
    let mut links = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (li, lj) = (&lanes[i], &lanes[j]);
            let dtheta = angle_diff(lj.start.heading, li.end.heading).abs();
            let gap = lj.start.position.distance(li.end.position);
            if dtheta < params.alpha_min && gap < params.d_min {
                links.push((i, j));
            }
        }
    }
    for (i, j) in links {
        let (id_i, id_j) = (lanes[i].id, lanes[j].id);
        lanes[i].to_ids.insert(id_j);
        lanes[j].from_ids.insert(id_i);
    }
    Ok(())
}

const TIE_EPS: f64 = 1e-9;

/// Length of `b` projected onto the axis of `a`, clipped to `a`.
fn axial_overlap(a: &Lane, b: &Lane) -> f64 {
    let dir = a.b() - a.a();
    let len = dir.norm();
    let t0 = (b.a() - a.a()).dot(dir) / len;
    let t1 = (b.b() - a.a()).dot(dir) / len;
    (t0.max(t1).min(len) - t0.min(t1).max(0.0)).max(0.0)
}

/// Reverse-lane discovery. For each node of each lane, the nearest opposing
/// lane (not a neighbour in the from/to sense, not touching) onto which the
/// node projects is recorded, and the relation is made symmetric. Equal
/// distances go to the lane overlapping `i` the most along its axis, then to
/// the earlier lane.
///
/// Expects `link_lanes` to have run.
pub fn find_reverse_lanes(lanes: &mut [Lane], params: &LinkParams) {
    for lane in lanes.iter_mut() {
        lane.reverse_ids.clear();
    }
    let mut pairs = Vec::new();
    for (i, li) in lanes.iter().enumerate() {
        for node in [li.start, li.end] {
            let mut best: Option<(f64, f64, usize)> = None;
            for (j, lj) in lanes.iter().enumerate() {
                if lj.id == li.id
                    || li.from_ids.contains(&lj.id)
                    || li.to_ids.contains(&lj.id)
                    || segments_intersect(li.a(), li.b(), lj.a(), lj.b())
                {
                    continue;
                }
                if angle_diff(node.heading, lj.heading()).abs() <= params.theta_threshold {
                    continue;
                }
                let Ok(proj) = project_point_onto_segment(node.position, lj.a(), lj.b()) else {
                    continue;
                };
                if proj.region != SegmentRegion::Within {
                    continue;
                }
                let d = proj.signed_distance.abs();
                if d >= params.d_threshold {
                    continue;
                }
                let overlap = axial_overlap(li, lj);
                let better = match best {
                    None => true,
                    Some((bd, bo, _)) => {
                        d < bd - TIE_EPS || ((d - bd).abs() <= TIE_EPS && overlap > bo + TIE_EPS)
                    }
                };
                if better {
                    best = Some((d, overlap, j));
                }
            }
            if let Some((_, _, j)) = best {
                pairs.push((i, j));
            }
        }
    }
    for (i, j) in pairs {
        let (id_i, id_j) = (lanes[i].id, lanes[j].id);
        lanes[i].reverse_ids.insert(id_j);
        lanes[j].reverse_ids.insert(id_i);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub to: NodeId,
    pub weight: f64,
    /// Set for the intra-lane edge `start → end` of that lane.
    pub lane: Option<LaneId>,
}

/// Directed road graph. Lane at index `k` owns nodes `2k` (start) and
/// `2k + 1` (end).
#[derive(Debug, Clone)]
pub struct RoadNetwork {
    lanes: Vec<Lane>,
    nodes: Vec<Pose2>,
    adjacency: Vec<Vec<Edge>>,
    index: HashMap<LaneId, usize>,
    params: LinkParams,
}

impl RoadNetwork {
    /// Links lanes, discovers reverse lanes and builds the graph.
    pub fn from_lanes(mut lanes: Vec<Lane>, params: LinkParams) -> Result<Self, RoadNetError> {
        params.validate()?;
        link_lanes(&mut lanes, &params)?;
        find_reverse_lanes(&mut lanes, &params);
        Ok(build_network(lanes, params))
    }

    pub fn lanes(&self) -> &[Lane] {
        &self.lanes
    }

    pub fn params(&self) -> &LinkParams {
        &self.params
    }

    pub fn lane(&self, id: LaneId) -> Option<&Lane> {
        self.index.get(&id).map(|&k| &self.lanes[k])
    }

    pub fn lane_index(&self, id: LaneId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.lanes.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn node(&self, n: NodeId) -> Pose2 {
        self.nodes[n]
    }

    pub fn nodes(&self) -> &[Pose2] {
        &self.nodes
    }

    pub fn out_edges(&self, n: NodeId) -> &[Edge] {
        &self.adjacency[n]
    }

    pub fn start_node(&self, id: LaneId) -> Option<NodeId> {
        self.lane_index(id).map(|k| 2 * k)
    }

    pub fn end_node(&self, id: LaneId) -> Option<NodeId> {
        self.lane_index(id).map(|k| 2 * k + 1)
    }

    /// Lane owning node `n`, and whether `n` is its start node.
    pub fn node_lane(&self, n: NodeId) -> (&Lane, bool) {
        (&self.lanes[n / 2], n % 2 == 0)
    }

    /// Nearest lane by point-to-segment distance; ties go to the lowest id.
    pub fn closest_lane(&self, p: Point2) -> Option<&Lane> {
        let mut best: Option<(f64, &Lane)> = None;
        for lane in &self.lanes {
            let d = lane.distance_to(p);
            let better = match best {
                None => true,
                Some((bd, bl)) => d < bd || (d == bd && lane.id < bl.id),
            };
            if better {
                best = Some((d, lane));
            }
        }
        best.map(|(_, l)| l)
    }
}

/// Builds the directed graph: one intra-lane edge per lane plus an edge from
/// each lane end to the start of every successor. Weights are Euclidean.
pub fn build_network(lanes: Vec<Lane>, params: LinkParams) -> RoadNetwork {
    let index: HashMap<LaneId, usize> = lanes.iter().enumerate().map(|(k, l)| (l.id, k)).collect();
    let mut nodes = Vec::with_capacity(lanes.len() * 2);
    let mut adjacency = vec![Vec::new(); lanes.len() * 2];
    for (k, lane) in lanes.iter().enumerate() {
        nodes.push(lane.start);
        nodes.push(lane.end);
        adjacency[2 * k].push(Edge {
            to: 2 * k + 1,
            weight: lane.length(),
            lane: Some(lane.id),
        });
        for succ in &lane.to_ids {
            if let Some(&j) = index.get(succ) {
                adjacency[2 * k + 1].push(Edge {
                    to: 2 * j,
                    weight: lane.b().distance(lanes[j].a()),
                    lane: None,
                });
            }
        }
    }
    RoadNetwork {
        lanes,
        nodes,
        adjacency,
        index,
        params,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lane(id: u32, a: (f64, f64), b: (f64, f64)) -> Lane {
        Lane::new(LaneId(id), Point2::new(a.0, a.1), Point2::new(b.0, b.1)).unwrap()
    }

    fn params() -> LinkParams {
        LinkParams::default()
    }

    #[test]
    fn link_examples() {
        let mut lanes = vec![lane(1, (0., 0.), (10., 0.)), lane(2, (10.2, 0.), (20., 0.))];
        link_lanes(&mut lanes, &params()).unwrap();
        assert!(lanes[0].to_ids.contains(&LaneId(2)));
        assert!(lanes[1].from_ids.contains(&LaneId(1)));

        let mut lanes = vec![lane(1, (0., 0.), (10., 0.)), lane(2, (10.2, 0.), (10.2, 10.))];
        link_lanes(&mut lanes, &params()).unwrap();
        assert!(lanes[0].to_ids.is_empty());

        let mut lanes = vec![lane(1, (0., 0.), (10., 0.)), lane(2, (11., 0.), (20., 0.))];
        link_lanes(&mut lanes, &params()).unwrap();
        assert!(lanes[0].to_ids.is_empty());
        assert!(lanes[1].from_ids.is_empty());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut lanes = vec![lane(1, (0., 0.), (10., 0.)), lane(1, (0., 5.), (10., 5.))];
        assert_eq!(
            link_lanes(&mut lanes, &params()),
            Err(RoadNetError::DuplicateId(LaneId(1)))
        );
    }

    #[test]
    fn degenerate_lane_rejected() {
        assert_eq!(
            Lane::new(LaneId(3), Point2::new(1., 1.), Point2::new(1., 1.)),
            Err(RoadNetError::DegenerateLane(LaneId(3)))
        );
    }

    #[test]
    fn reverse_example_trace() {
        let mut lanes = vec![lane(1, (0., 0.), (10., 0.)), lane(2, (11., 3.), (-1., 3.))];
        let p = LinkParams {
            theta_threshold: 3.0 * PI / 4.0,
            d_threshold: 6.0,
            ..params()
        };
        link_lanes(&mut lanes, &p).unwrap();
        find_reverse_lanes(&mut lanes, &p);
        assert_eq!(lanes[0].reverse_ids, BTreeSet::from([LaneId(2)]));
        assert_eq!(lanes[1].reverse_ids, BTreeSet::from([LaneId(1)]));
    }

    #[test]
    fn reverse_isolated_and_successor() {
        let mut lanes = vec![lane(1, (0., 0.), (10., 0.))];
        find_reverse_lanes(&mut lanes, &params());
        assert!(lanes[0].reverse_ids.is_empty());

        let mut lanes = vec![lane(1, (0., 0.), (10., 0.)), lane(2, (10.2, 0.), (20., 0.))];
        link_lanes(&mut lanes, &params()).unwrap();
        find_reverse_lanes(&mut lanes, &params());
        assert!(lanes.iter().all(|l| l.reverse_ids.is_empty()));
    }

    #[test]
    fn reverse_tie_prefers_overlap() {
        // Two chained two-lane roads. The end node of lane 3 sits 3 m from
        // both eastbound lanes (touching each at an endpoint); the road's
        // own opposite lane wins.
        let mut lanes = vec![
            lane(1, (42., 0.), (48., 0.)),
            lane(2, (48., 0.), (62., 0.)),
            lane(3, (62., 3.), (48., 3.)),
            lane(4, (48., 3.), (42., 3.)),
        ];
        link_lanes(&mut lanes, &params()).unwrap();
        find_reverse_lanes(&mut lanes, &params());
        assert_eq!(lanes[0].reverse_ids, BTreeSet::from([LaneId(4)]));
        assert_eq!(lanes[2].reverse_ids, BTreeSet::from([LaneId(2)]));
    }

    #[test]
    fn reverse_beyond_threshold_ignored() {
        let mut lanes = vec![lane(1, (0., 0.), (10., 0.)), lane(2, (10., 7.), (0., 7.))];
        link_lanes(&mut lanes, &params()).unwrap();
        find_reverse_lanes(&mut lanes, &params());
        assert!(lanes[0].reverse_ids.is_empty());
    }

    #[test]
    fn build_examples() {
        let net = RoadNetwork::from_lanes(vec![lane(1, (0., 0.), (10., 0.))], params()).unwrap();
        assert_eq!((net.node_count(), net.edge_count()), (2, 1));

        let net = RoadNetwork::from_lanes(
            vec![lane(1, (0., 0.), (10., 0.)), lane(2, (10.2, 0.), (20., 0.))],
            params(),
        )
        .unwrap();
        assert_eq!((net.node_count(), net.edge_count()), (4, 3));
        let link = net.out_edges(1)[0];
        assert_eq!(link.to, 2);
        assert!((link.weight - 0.2).abs() < 1e-12);

        let net = RoadNetwork::from_lanes(
            vec![lane(1, (0., 0.), (10., 0.)), lane(2, (10., 3.), (0., 3.))],
            params(),
        )
        .unwrap();
        assert_eq!((net.node_count(), net.edge_count()), (4, 2));
    }

    #[test]
    fn params_validation() {
        assert!(params().validate().is_ok());
        let bad = LinkParams {
            theta_threshold: 1.0,
            ..params()
        };
        assert!(bad.validate().is_err());
        let bad = LinkParams {
            d_min: 0.0,
            ..params()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn closest_lane_tie_lowest_id() {
        let net = RoadNetwork::from_lanes(
            vec![lane(7, (0., 0.), (10., 0.)), lane(3, (0., 3.), (10., 3.))],
            params(),
        )
        .unwrap();
        assert_eq!(net.closest_lane(Point2::new(5., 1.5)).unwrap().id, LaneId(3));
        assert_eq!(net.closest_lane(Point2::new(5., 0.5)).unwrap().id, LaneId(7));
    }
}
