//! Mapping free-space start and goal points onto the road network.
//!
//! A query point is matched against its closest lane and that lane's reverse
//! lanes. Depending on where the point falls relative to each lane (before
//! the start node, alongside, past the end node) the match is the start
//! node, the orthogonal foot, or a node of a neighbouring lane, chosen so that
//! the robot never has to turn sharply right after leaving the start or right
//! before reaching the goal.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{project_point_onto_segment, Point2, SegmentRegion};
use crate::roadnet::{Lane, LaneId, RoadNetwork};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MappingError {
    #[error("road network has no lanes")]
    EmptyNetwork,
}

/// Where a candidate sits on its lane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Splice {
    AtStartNode,
    AtEndNode,
    /// Strictly between the nodes, at this fraction of the lane.
    Interior(f64),
}

impl Splice {
    fn key(self) -> (u8, u64) {
        match self {
            Splice::AtStartNode => (0, 0),
            Splice::AtEndNode => (1, 0),
            Splice::Interior(t) => (2, t.to_bits()),
        }
    }

    /// Fraction along the lane.
    pub fn param(self) -> f64 {
        match self {
            Splice::AtStartNode => 0.0,
            Splice::AtEndNode => 1.0,
            Splice::Interior(t) => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchCandidate {
    pub point: Point2,
    pub lane_id: LaneId,
    pub splice: Splice,
    /// Straight-line distance from the query point to `point`.
    pub connector_length: f64,
}

impl MatchCandidate {
    pub fn on_lane(query: Point2, lane: &Lane, splice: Splice) -> Self {
        let splice = match splice {
            Splice::Interior(t) if t <= 0.0 => Splice::AtStartNode,
            Splice::Interior(t) if t >= 1.0 => Splice::AtEndNode,
            s => s,
        };
        let point = match splice {
            Splice::AtStartNode => lane.a(),
            Splice::AtEndNode => lane.b(),
            Splice::Interior(t) => lane.point_at(t),
        };
        Self {
            point,
            lane_id: lane.id,
            splice,
            connector_length: query.distance(point),
        }
    }
}

/// Deduplicated match candidates in discovery order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CandidateSet {
    candidates: Vec<MatchCandidate>,
}

impl CandidateSet {
    pub fn push(&mut self, c: MatchCandidate) {
        let key = (c.lane_id, c.splice.key());
        if !self
            .candidates
            .iter()
            .any(|o| (o.lane_id, o.splice.key()) == key)
        {
            self.candidates.push(c);
        }
    }

    pub fn as_slice(&self) -> &[MatchCandidate] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MatchCandidate> {
        self.candidates.iter()
    }

    /// Drops candidates whose connector from `query` fails `is_clear`.
    pub fn retain_clear(&mut self, query: Point2, mut is_clear: impl FnMut(Point2, Point2) -> bool) {
        self.candidates.retain(|c| is_clear(query, c.point));
    }

    pub fn into_vec(self) -> Vec<MatchCandidate> {
        self.candidates
    }
}

/// Closest lane to `p` plus, when `include_reverse`, all of its reverse lanes.
pub fn candidate_lanes_with(
    p: Point2,
    net: &RoadNetwork,
    include_reverse: bool,
) -> Result<Vec<LaneId>, MappingError> {
    let closest = net.closest_lane(p).ok_or(MappingError::EmptyNetwork)?;
    let mut ids = vec![closest.id];
    if include_reverse {
        ids.extend(closest.reverse_ids.iter().copied());
    }
    Ok(ids)
}

pub fn candidate_lanes(p: Point2, net: &RoadNetwork) -> Result<Vec<LaneId>, MappingError> {
    candidate_lanes_with(p, net, true)
}

fn lanes_of<'a>(net: &'a RoadNetwork, ids: &[LaneId]) -> Vec<&'a Lane> {
    ids.iter().filter_map(|id| net.lane(*id)).collect()
}

pub fn map_start_point(p: Point2, net: &RoadNetwork) -> Result<CandidateSet, MappingError> {
    map_start_point_with(p, net, true)
}

pub fn map_goal_point(p: Point2, net: &RoadNetwork) -> Result<CandidateSet, MappingError> {
    map_goal_point_with(p, net, true)
}

/// Start mapping: before a lane maps to its start node, alongside maps to the
/// orthogonal foot, and past its end maps to the start of each successor.
pub fn map_start_point_with(
    p: Point2,
    net: &RoadNetwork,
    include_reverse: bool,
) -> Result<CandidateSet, MappingError> {
    let ids = candidate_lanes_with(p, net, include_reverse)?;
    let mut set = CandidateSet::default();
    for lane in lanes_of(net, &ids) {
        start_candidates_on(p, lane, net, &mut set);
    }
    Ok(set)
}

/// Goal mapping, mirrored: past a lane maps to its end node, alongside to the
/// foot, and before its start to the end of each predecessor.
pub fn map_goal_point_with(
    p: Point2,
    net: &RoadNetwork,
    include_reverse: bool,
) -> Result<CandidateSet, MappingError> {
    let ids = candidate_lanes_with(p, net, include_reverse)?;
    let mut set = CandidateSet::default();
    for lane in lanes_of(net, &ids) {
        goal_candidates_on(p, lane, net, &mut set);
    }
    Ok(set)
}

/// Start candidates contributed by a single lane of the candidate set.
pub fn start_candidates_on(p: Point2, lane: &Lane, net: &RoadNetwork, set: &mut CandidateSet) {
    let proj = project_point_onto_segment(p, lane.a(), lane.b())
        .expect("lanes are validated non-degenerate");
    match proj.region {
        SegmentRegion::Before => set.push(MatchCandidate::on_lane(p, lane, Splice::AtStartNode)),
        SegmentRegion::Within => {
            set.push(MatchCandidate::on_lane(p, lane, Splice::Interior(proj.param_t)))
        }
        SegmentRegion::After => {
            let succs = lanes_of(net, &lane.to_ids.iter().copied().collect::<Vec<_>>());
            if succs.is_empty() {
                set.push(MatchCandidate::on_lane(p, lane, Splice::AtEndNode));
            }
            for succ in succs {
                set.push(MatchCandidate::on_lane(p, succ, Splice::AtStartNode));
            }
        }
    }
}

/// Goal candidates contributed by a single lane of the candidate set.
pub fn goal_candidates_on(p: Point2, lane: &Lane, net: &RoadNetwork, set: &mut CandidateSet) {
    let proj = project_point_onto_segment(p, lane.a(), lane.b())
        .expect("lanes are validated non-degenerate");
    match proj.region {
        SegmentRegion::After => set.push(MatchCandidate::on_lane(p, lane, Splice::AtEndNode)),
        SegmentRegion::Within => {
            set.push(MatchCandidate::on_lane(p, lane, Splice::Interior(proj.param_t)))
        }
        SegmentRegion::Before => {
            let preds = lanes_of(net, &lane.from_ids.iter().copied().collect::<Vec<_>>());
            if preds.is_empty() {
                set.push(MatchCandidate::on_lane(p, lane, Splice::AtStartNode));
            }
            for pred in preds {
                set.push(MatchCandidate::on_lane(p, pred, Splice::AtEndNode));
            }
        }
    }
}
