//! Dijkstra over the road network, virtual-node splicing of lane-interior
//! match points, and the branch-and-bound loop over start/goal candidate
//! pairs.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::geometry::Point2;
use crate::mapping::{self, CandidateSet, MappingError, MatchCandidate, Splice};
use crate::roadnet::{LaneId, NodeId, RoadNetwork};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("candidate on lane {lane} does not lie on that lane")]
    CandidateOffLane { lane: LaneId },
    #[error("unknown lane {0}")]
    UnknownLane(LaneId),
    #[error("no route between any start/goal candidate pair")]
    NoRoute,
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

/// Directed graph with Euclidean node positions.
pub trait WeightedDigraph {
    fn node_count(&self) -> usize;
    fn position(&self, n: NodeId) -> Point2;
    fn out_edges(&self, n: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_;
}

impl WeightedDigraph for RoadNetwork {
    fn node_count(&self) -> usize {
        RoadNetwork::node_count(self)
    }

    fn position(&self, n: NodeId) -> Point2 {
        self.node(n).position
    }

    fn out_edges(&self, n: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        RoadNetwork::out_edges(self, n).iter().map(|e| (e.to, e.weight))
    }
}

/// Node-expansion cap for one search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    pub max_cost: usize,
}

impl SearchBudget {
    pub fn new(max_cost: usize) -> Self {
        Self {
            max_cost: max_cost.max(1),
        }
    }

    pub fn unlimited() -> Self {
        Self {
            max_cost: usize::MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub success: bool,
    pub nodes: Vec<NodeId>,
    pub path: Vec<Point2>,
    pub path_length: f64,
    /// Nodes settled.
    pub search_cost: usize,
}

#[derive(Clone, Copy, PartialEq)]
struct QueueEntry {
    cost: f64,
    node: NodeId,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Plain Dijkstra from `src` to `dst`. Gives up once settling another node
/// would exceed `budget.max_cost`. Queue ties resolve by lower node id.
pub fn dijkstra_network<G: WeightedDigraph>(
    graph: &G,
    src: NodeId,
    dst: NodeId,
    budget: SearchBudget,
) -> SearchOutcome {
    let n = graph.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut settled = vec![false; n];
    let mut settled_count = 0usize;
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(QueueEntry { cost: 0.0, node: src });

    while let Some(QueueEntry { cost, node }) = heap.pop() {
        if settled[node] {
            continue;
        }
        if settled_count >= budget.max_cost {
            break;
        }
        settled[node] = true;
        settled_count += 1;
        if node == dst {
            let mut nodes = vec![dst];
            let mut cur = dst;
            while cur != src {
                cur = parent[cur];
                nodes.push(cur);
            }
            nodes.reverse();
            let path = nodes.iter().map(|&v| graph.position(v)).collect();
            return SearchOutcome {
                success: true,
                nodes,
                path,
                path_length: cost,
                search_cost: settled_count,
            };
        }
        for (next, w) in graph.out_edges(node) {
            let candidate = cost + w;
            if !settled[next] && candidate < dist[next] {
                dist[next] = candidate;
                parent[next] = node;
                heap.push(QueueEntry {
                    cost: candidate,
                    node: next,
                });
            }
        }
    }
    SearchOutcome {
        success: false,
        nodes: Vec::new(),
        path: Vec::new(),
        path_length: 0.0,
        search_cost: settled_count,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Start,
    Goal,
}

const ON_LANE_TOL: f64 = 1e-6;

/// A road network with extra virtual nodes inserted into lane interiors.
/// The underlying network is borrowed, never mutated.
#[derive(Debug, Clone)]
pub struct SplicedNetwork<'a> {
    base: &'a RoadNetwork,
    virtual_pos: Vec<Point2>,
    virtual_adj: Vec<Vec<(NodeId, f64)>>,
    overrides: HashMap<NodeId, Vec<(NodeId, f64)>>,
    // Per lane: virtual nodes ordered by (t, side).
    on_lane: HashMap<LaneId, Vec<(f64, Side, NodeId)>>,
}

impl<'a> SplicedNetwork<'a> {
    pub fn new(base: &'a RoadNetwork) -> Self {
        Self {
            base,
            virtual_pos: Vec::new(),
            virtual_adj: Vec::new(),
            overrides: HashMap::new(),
            on_lane: HashMap::new(),
        }
    }

    pub fn base(&self) -> &RoadNetwork {
        self.base
    }

    pub fn virtual_count(&self) -> usize {
        self.virtual_pos.len()
    }

    /// Returns the node a candidate occupies, inserting a virtual node for
    /// lane-interior candidates.
    pub fn splice(&mut self, c: &MatchCandidate, side: Side) -> Result<NodeId, SearchError> {
        let lane = self
            .base
            .lane(c.lane_id)
            .ok_or(SearchError::UnknownLane(c.lane_id))?;
        let off_lane = SearchError::CandidateOffLane { lane: c.lane_id };
        if lane.distance_to(c.point) > ON_LANE_TOL {
            return Err(off_lane);
        }
        match c.splice {
            Splice::AtStartNode => {
                if c.point.distance(lane.a()) > ON_LANE_TOL {
                    return Err(off_lane);
                }
                Ok(self.base.start_node(c.lane_id).expect("lane exists"))
            }
            Splice::AtEndNode => {
                if c.point.distance(lane.b()) > ON_LANE_TOL {
                    return Err(off_lane);
                }
                Ok(self.base.end_node(c.lane_id).expect("lane exists"))
            }
            Splice::Interior(t) => {
                if !(t > 0.0 && t < 1.0) || c.point.distance(lane.point_at(t)) > ON_LANE_TOL {
                    return Err(off_lane);
                }
                let id = self.base.node_count() + self.virtual_pos.len();
                self.virtual_pos.push(lane.point_at(t));
                self.virtual_adj.push(Vec::new());
                let list = self.on_lane.entry(c.lane_id).or_default();
                let rank = |s: Side| matches!(s, Side::Goal) as u8;
                let at = list
                    .iter()
                    .position(|&(ot, os, _)| (ot, rank(os)) > (t, rank(side)))
                    .unwrap_or(list.len());
                list.insert(at, (t, side, id));
                self.rechain(c.lane_id);
                Ok(id)
            }
        }
    }

    fn rechain(&mut self, lane_id: LaneId) {
        let lane = self.base.lane(lane_id).expect("lane exists");
        let len = lane.length();
        let start = self.base.start_node(lane_id).expect("lane exists");
        let end = self.base.end_node(lane_id).expect("lane exists");
        let chain = &self.on_lane[&lane_id];

        let mut start_edges: Vec<(NodeId, f64)> = self
            .base
            .out_edges(start)
            .iter()
            .filter(|e| e.lane != Some(lane_id))
            .map(|e| (e.to, e.weight))
            .collect();
        let (t0, _, first) = chain[0];
        start_edges.push((first, t0 * len));
        self.overrides.insert(start, start_edges);

        let base_n = self.base.node_count();
        for k in 0..chain.len() {
            let (t, _, v) = chain[k];
            let next = match chain.get(k + 1) {
                Some(&(tn, _, vn)) => (vn, (tn - t) * len),
                None => (end, (1.0 - t) * len),
            };
            self.virtual_adj[v - base_n] = vec![next];
        }
    }
}

impl WeightedDigraph for SplicedNetwork<'_> {
    fn node_count(&self) -> usize {
        self.base.node_count() + self.virtual_pos.len()
    }

    fn position(&self, n: NodeId) -> Point2 {
        let base_n = self.base.node_count();
        if n < base_n {
            self.base.node(n).position
        } else {
            self.virtual_pos[n - base_n]
        }
    }

    fn out_edges(&self, n: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let base_n = self.base.node_count();
        let edges: Box<dyn Iterator<Item = (NodeId, f64)> + '_> = if n >= base_n {
            Box::new(self.virtual_adj[n - base_n].iter().copied())
        } else if let Some(list) = self.overrides.get(&n) {
            Box::new(list.iter().copied())
        } else {
            Box::new(self.base.out_edges(n).iter().map(|e| (e.to, e.weight)))
        };
        edges
    }
}

/// Splices a single candidate into a fresh view of `net`.
pub fn splice_candidate<'a>(
    net: &'a RoadNetwork,
    c: &MatchCandidate,
    side: Side,
) -> Result<(SplicedNetwork<'a>, NodeId), SearchError> {
    let mut view = SplicedNetwork::new(net);
    let node = view.splice(c, side)?;
    Ok((view, node))
}

/// How the per-pair node budget evolves across the pair loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum BudgetScheme {
    /// Start at twice the node count; after every improving pair, cap the
    /// following searches at twice that pair's search cost.
    #[default]
    BranchAndBound,
    /// Every search runs to completion.
    Unlimited,
}

/// Whether pair ranking includes the connector lengths of the candidates or
/// only the network path length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairScore {
    WithConnectors,
    NetworkOnly,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SearchStats {
    pub pairs: usize,
    pub successful: usize,
    pub total_settled: usize,
    pub final_max_cost: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSearchResult {
    pub start: MatchCandidate,
    pub goal: MatchCandidate,
    pub network_path: Vec<Point2>,
    pub network_length: f64,
    /// Score used to rank pairs.
    pub score: f64,
    pub stats: SearchStats,
}

fn sorted_by_connector(cands: &[MatchCandidate]) -> Vec<MatchCandidate> {
    let mut v = cands.to_vec();
    v.sort_by(|a, b| a.connector_length.total_cmp(&b.connector_length));
    v
}

/// Runs one network search per (start, goal) candidate pair and keeps the
/// best-scoring success. Pairs are visited start-major, each side ordered by
/// connector length; equal scores keep the earlier pair.
pub fn search_candidate_pairs(
    net: &RoadNetwork,
    starts: &[MatchCandidate],
    goals: &[MatchCandidate],
    scheme: BudgetScheme,
    scoring: PairScore,
) -> Result<PairSearchResult, SearchError> {
    let starts = sorted_by_connector(starts);
    let goals = sorted_by_connector(goals);
    let mut max_cost = match scheme {
        BudgetScheme::BranchAndBound => 2 * net.node_count(),
        BudgetScheme::Unlimited => usize::MAX,
    };
    let mut min_length = f64::INFINITY;
    let mut best: Option<PairSearchResult> = None;
    let mut stats = SearchStats::default();

    for s in &starts {
        for g in &goals {
            let mut view = SplicedNetwork::new(net);
            let src = view.splice(s, Side::Start)?;
            let dst = view.splice(g, Side::Goal)?;
            let outcome = dijkstra_network(&view, src, dst, SearchBudget::new(max_cost));
            stats.pairs += 1;
            stats.total_settled += outcome.search_cost;
            if !outcome.success {
                continue;
            }
            stats.successful += 1;
            let score = match scoring {
                PairScore::WithConnectors => {
                    outcome.path_length + s.connector_length + g.connector_length
                }
                PairScore::NetworkOnly => outcome.path_length,
            };
            if score < min_length {
                if scheme == BudgetScheme::BranchAndBound {
                    max_cost = 2 * outcome.search_cost;
                }
                min_length = score;
                best = Some(PairSearchResult {
                    start: *s,
                    goal: *g,
                    network_path: outcome.path,
                    network_length: outcome.path_length,
                    score,
                    stats: SearchStats::default(),
                });
            }
        }
    }
    stats.final_max_cost = max_cost;
    let mut best = best.ok_or(SearchError::NoRoute)?;
    best.stats = stats;
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Case1Options {
    /// Map onto reverse lanes too (the start/goal shortcut).
    pub use_reverse_lanes: bool,
    pub budget: BudgetScheme,
}

impl Default for Case1Options {
    fn default() -> Self {
        Self {
            use_reverse_lanes: true,
            budget: BudgetScheme::BranchAndBound,
        }
    }
}

/// Result of planning between two free-space points over the network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkPlan {
    /// `p_s`, the network path, `p_g`; consecutive duplicates removed.
    pub path: Vec<Point2>,
    /// Network length plus both connector lengths.
    pub length: f64,
    pub search: PairSearchResult,
}

/// Joins polylines, dropping points that repeat their predecessor exactly.
pub fn join_polylines<'a>(parts: impl IntoIterator<Item = &'a [Point2]>) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::new();
    for part in parts {
        for &p in part {
            if out.last() != Some(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Passage/parking planning from explicit candidate sets.
pub fn plan_case1_with_candidates(
    p_s: Point2,
    p_g: Point2,
    starts: &CandidateSet,
    goals: &CandidateSet,
    net: &RoadNetwork,
    budget: BudgetScheme,
) -> Result<NetworkPlan, SearchError> {
    let search = search_candidate_pairs(
        net,
        starts.as_slice(),
        goals.as_slice(),
        budget,
        PairScore::WithConnectors,
    )?;
    let path = join_polylines([&[p_s][..], &search.network_path, &[p_g][..]]);
    Ok(NetworkPlan {
        path,
        length: search.score,
        search,
    })
}

/// Passage/parking planning: map both points (optionally onto reverse lanes
/// too), search every candidate pair, keep the shortest total.
pub fn plan_case1(
    p_s: Point2,
    p_g: Point2,
    net: &RoadNetwork,
    opts: &Case1Options,
) -> Result<NetworkPlan, SearchError> {
    let starts = mapping::map_start_point_with(p_s, net, opts.use_reverse_lanes)?;
    let goals = mapping::map_goal_point_with(p_g, net, opts.use_reverse_lanes)?;
    plan_case1_with_candidates(p_s, p_g, &starts, &goals, net, opts.budget)
}
