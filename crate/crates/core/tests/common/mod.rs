#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use roadplan::geometry::Point2;
use roadplan::planner::{Region, SemanticMap};
use roadplan::potential::{GridGeometry, Occupancy, OccupancyGrid, PotentialGrid, PotentialParams, LETHAL};
use roadplan::roadnet::{Lane, LaneId, LinkParams, RoadNetwork};

pub fn maps_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../maps")
}

pub fn pt(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

pub fn lane(id: u32, a: (f64, f64), b: (f64, f64)) -> Lane {
    Lane::new(LaneId(id), pt(a.0, a.1), pt(b.0, b.1)).unwrap()
}

pub fn rect(name: &str, x0: f64, y0: f64, x1: f64, y1: f64) -> Region {
    Region {
        name: name.into(),
        polygon: vec![pt(x0, y0), pt(x1, y0), pt(x1, y1), pt(x0, y1)],
    }
}

/// All-free grid covering `[x0, x1] × [y0, y1]`.
pub fn free_grid(x0: f64, y0: f64, x1: f64, y1: f64, res: f64) -> OccupancyGrid {
    let g = GridGeometry::new(
        res,
        pt(x0, y0),
        ((x1 - x0) / res).round() as usize,
        ((y1 - y0) / res).round() as usize,
    )
    .unwrap();
    OccupancyGrid::filled(g, Occupancy::Free)
}

pub fn semantic_map(
    lanes: Vec<Lane>,
    link: LinkParams,
    passages: Vec<Region>,
    intersections: Vec<Region>,
    grid: OccupancyGrid,
) -> SemanticMap {
    let net = RoadNetwork::from_lanes(lanes, link).unwrap();
    SemanticMap::new(
        passages,
        intersections,
        Vec::new(),
        grid,
        net,
        PotentialParams {
            inflation_radius: 0.0,
            ..PotentialParams::default()
        },
        0.25,
    )
    .unwrap()
}

/// Independent 8-connected Bellman-Ford over a potential grid with the
/// planner's cost law and no-corner-cutting rule. Returns the cost between
/// the two cells, infinite when unreachable.
pub fn bellman_ford_grid(
    m: &PotentialGrid,
    start: (usize, usize),
    goal: (usize, usize),
    step_cost: impl Fn(usize, f64) -> f64,
) -> f64 {
    let g = m.geometry;
    let (w, h) = (g.width as i64, g.height as i64);
    let free = |x: i64, y: i64| {
        x >= 0 && y >= 0 && x < w && y < h && m.values[(y * w + x) as usize] != LETHAL
    };
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !free(x, y) {
                continue;
            }
            for dx in -1i64..=1 {
                for dy in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if !free(nx, ny) {
                        continue;
                    }
                    if dx != 0 && dy != 0 && (!free(nx, y) || !free(x, ny)) {
                        continue;
                    }
                    let len = ((dx * dx + dy * dy) as f64).sqrt() * g.resolution;
                    let to = (ny * w + nx) as usize;
                    edges.push(((y * w + x) as usize, to, step_cost(to, len)));
                }
            }
        }
    }
    let mut dist = vec![f64::INFINITY; g.len()];
    let s = g.index(start.0, start.1);
    if !free(start.0 as i64, start.1 as i64) {
        return f64::INFINITY;
    }
    dist[s] = 0.0;
    loop {
        let mut changed = false;
        for &(a, b, c) in &edges {
            if dist[a] + c < dist[b] {
                dist[b] = dist[a] + c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    dist[g.index(goal.0, goal.1)]
}

/// Random potential grid: values drawn from `[0, p0]` with a share of
/// lethal cells.
pub fn random_potential_grid(rng: &mut ChaCha8Rng, max_side: usize, p0: f64) -> PotentialGrid {
    let w = rng.gen_range(2..=max_side);
    let h = rng.gen_range(2..=max_side);
    let res = [0.05, 0.1, 1.0][rng.gen_range(0..3)];
    let g = GridGeometry::new(res, pt(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)), w, h).unwrap();
    let lethal_share = rng.gen_range(0.0..0.35);
    let values = (0..g.len())
        .map(|_| {
            if rng.gen_bool(lethal_share) {
                LETHAL
            } else if rng.gen_bool(0.3) {
                0.0
            } else {
                rng.gen_range(0.0..=p0)
            }
        })
        .collect();
    PotentialGrid { geometry: g, values }
}

/// Small random road network: straight lanes scattered in a box, some laid
/// out as two-way roads so that reverse lanes occur.
pub fn random_network(rng: &mut ChaCha8Rng) -> RoadNetwork {
    let mut lanes = Vec::new();
    let mut id = 1;
    let roads = rng.gen_range(2..=6);
    let mut ends: Vec<Point2> = Vec::new();
    for _ in 0..roads {
        let a = if !ends.is_empty() && rng.gen_bool(0.6) {
            ends[rng.gen_range(0..ends.len())]
        } else {
            pt(rng.gen_range(0.0..30.0), rng.gen_range(0.0..30.0))
        };
        let heading: f64 = rng.gen_range(-3.14..3.14);
        let len = rng.gen_range(3.0..12.0);
        let b = a + Point2::new(heading.cos(), heading.sin()) * len;
        if a.distance(b) < 1e-6 {
            continue;
        }
        lanes.push(Lane::new(LaneId(id), a, b).unwrap());
        id += 1;
        ends.push(b);
        if rng.gen_bool(0.7) {
            let off = rng.gen_range(1.0..4.0);
            let n = Point2::new(-heading.sin(), heading.cos()) * off;
            let (ra, rb) = (b + n, a + n);
            lanes.push(Lane::new(LaneId(id), ra, rb).unwrap());
            id += 1;
            ends.push(rb);
        }
    }
    let link = LinkParams {
        alpha_min: rng.gen_range(0.5..3.1),
        d_min: rng.gen_range(0.5..4.0),
        ..LinkParams::default()
    };
    RoadNetwork::from_lanes(lanes, link).unwrap()
}

/// Minimum simple-path cost by exhaustive DFS.
pub fn brute_force_shortest(adj: &[Vec<(usize, f64)>], src: usize, dst: usize) -> f64 {
    fn dfs(
        adj: &[Vec<(usize, f64)>],
        u: usize,
        dst: usize,
        cost: f64,
        seen: &mut Vec<bool>,
        best: &mut f64,
    ) {
        if u == dst {
            *best = best.min(cost);
            return;
        }
        for &(v, w) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                dfs(adj, v, dst, cost + w, seen, best);
                seen[v] = false;
            }
        }
    }
    let mut seen = vec![false; adj.len()];
    seen[src] = true;
    let mut best = f64::INFINITY;
    dfs(adj, src, dst, 0.0, &mut seen, &mut best);
    best
}
