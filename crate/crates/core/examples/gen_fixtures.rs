//! Regenerates the bundled maps in `maps/`:
//!
//! ```text
//! cargo run --example gen_fixtures -- maps
//! ```
//!
//! Grid layouts are passages of width 6 m with one lane per direction at
//! ±1.5 m (right-hand traffic), square intersections with straight and
//! chamfered turn lanes, and 5 m parking strips with pillars.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use roadplan::geometry::Point2;
use roadplan::io::{
    map_from_file, write_pgm, GridRef, LaneSpec, MapFile, PotentialSpec, RegionSpec, Scenario,
    ScenarioFile, SCHEMA_VERSION,
};
use roadplan::planner::PlanCase;
use roadplan::potential::{polygon_mask, GridGeometry, Occupancy, OccupancyGrid};
use roadplan::roadnet::{LaneId, LinkParams};

const HALF_WIDTH: f64 = 3.0;
const LANE_OFFSET: f64 = 1.5;
const PARKING_DEPTH: f64 = 5.0;
const PILLAR: f64 = 0.6;
const PILLAR_SPACING: f64 = 8.0;
const RIGHT_CHAMFER: f64 = 0.75;
const LEFT_CHAMFER: f64 = 2.0;

type P = (f64, f64);

fn right(h: P) -> P {
    (h.1, -h.0)
}

fn add(a: P, b: P, k: f64) -> P {
    (a.0 + k * b.0, a.1 + k * b.1)
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<[f64; 2]> {
    vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]]
}

#[derive(Default)]
struct Builder {
    lanes: Vec<LaneSpec>,
    /// Intended successors by lane id.
    next: BTreeMap<u32, BTreeSet<u32>>,
    starts_at: Vec<(P, u32)>,
    ends_at: Vec<(P, u32)>,
}

impl Builder {
    fn lane(&mut self, a: P, b: P) -> u32 {
        let id = self.lanes.len() as u32 + 1;
        self.lanes.push(LaneSpec {
            id,
            start: [a.0, a.1],
            end: [b.0, b.1],
        });
        self.starts_at.push((a, id));
        self.ends_at.push((b, id));
        id
    }

    fn chain(&mut self, pts: &[P]) -> (u32, u32) {
        let mut prev: Option<u32> = None;
        let mut first = 0;
        for w in pts.windows(2) {
            let id = self.lane(w[0], w[1]);
            match prev {
                Some(p) => {
                    self.next.entry(p).or_default().insert(id);
                }
                None => first = id,
            }
            prev = Some(id);
        }
        (first, prev.unwrap())
    }

    /// Links every lane ending at a point to every lane starting there,
    /// except within chains (already linked).
    fn link_junctions(&mut self, junctions: &[P]) {
        let near = |a: P, b: P| (a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9;
        for &j in junctions {
            let ins: Vec<u32> = self.ends_at.iter().filter(|(p, _)| near(*p, j)).map(|e| e.1).collect();
            let outs: Vec<u32> = self.starts_at.iter().filter(|(p, _)| near(*p, j)).map(|e| e.1).collect();
            for &i in &ins {
                for &o in &outs {
                    self.next.entry(i).or_default().insert(o);
                }
            }
        }
    }
}

struct Layout {
    name: &'static str,
    cols: Vec<f64>,
    rows: Vec<f64>,
    width: f64,
    height: f64,
    resolution: f64,
    parking: bool,
}

struct Built {
    file: MapFile,
    grid: OccupancyGrid,
    expected_next: BTreeMap<u32, BTreeSet<u32>>,
}

fn build_layout(l: &Layout) -> Built {
    let mut b = Builder::default();
    let mut passages = Vec::new();
    let mut intersections = Vec::new();
    let mut parking = Vec::new();
    let mut junctions = Vec::new();
    let (nc, nr) = (l.cols.len(), l.rows.len());

    for (j, &y) in l.rows.iter().enumerate() {
        for i in 0..nc - 1 {
            let (x0, x1) = (l.cols[i] + HALF_WIDTH, l.cols[i + 1] - HALF_WIDTH);
            passages.push(RegionSpec {
                name: format!("H{j}_{i}"),
                polygon: rect(x0, y - HALF_WIDTH, x1, y + HALF_WIDTH),
            });
            b.lane((x0, y - LANE_OFFSET), (x1, y - LANE_OFFSET));
            b.lane((x1, y + LANE_OFFSET), (x0, y + LANE_OFFSET));
            if l.parking {
                for (lo, hi) in [
                    (y + HALF_WIDTH, y + HALF_WIDTH + PARKING_DEPTH),
                    (y - HALF_WIDTH - PARKING_DEPTH, y - HALF_WIDTH),
                ] {
                    if lo >= 0.5 && hi <= l.height - 0.5 {
                        parking.push(RegionSpec {
                            name: format!("PH{j}_{i}_{}", if lo > y { "n" } else { "s" }),
                            polygon: rect(x0, lo, x1, hi),
                        });
                    }
                }
            }
        }
    }
    for (i, &x) in l.cols.iter().enumerate() {
        for j in 0..nr - 1 {
            let (y0, y1) = (l.rows[j] + HALF_WIDTH, l.rows[j + 1] - HALF_WIDTH);
            passages.push(RegionSpec {
                name: format!("V{i}_{j}"),
                polygon: rect(x - HALF_WIDTH, y0, x + HALF_WIDTH, y1),
            });
            b.lane((x + LANE_OFFSET, y0), (x + LANE_OFFSET, y1));
            b.lane((x - LANE_OFFSET, y1), (x - LANE_OFFSET, y0));
            if l.parking {
                for (lo, hi) in [
                    (x + HALF_WIDTH, x + HALF_WIDTH + PARKING_DEPTH),
                    (x - HALF_WIDTH - PARKING_DEPTH, x - HALF_WIDTH),
                ] {
                    if lo >= 0.5 && hi <= l.width - 0.5 {
                        parking.push(RegionSpec {
                            name: format!("PV{i}_{j}_{}", if lo > x { "e" } else { "w" }),
                            polygon: rect(lo, y0, hi, y1),
                        });
                    }
                }
            }
        }
    }

    for (j, &cy) in l.rows.iter().enumerate() {
        for (i, &cx) in l.cols.iter().enumerate() {
            let c = (cx, cy);
            intersections.push(RegionSpec {
                name: format!("S{}", j * nc + i + 1),
                polygon: rect(cx - HALF_WIDTH, cy - HALF_WIDTH, cx + HALF_WIDTH, cy + HALF_WIDTH),
            });
            let mut arms: Vec<P> = Vec::new();
            if i + 1 < nc {
                arms.push((1.0, 0.0));
            }
            if j + 1 < nr {
                arms.push((0.0, 1.0));
            }
            if i > 0 {
                arms.push((-1.0, 0.0));
            }
            if j > 0 {
                arms.push((0.0, -1.0));
            }
            for &a in &arms {
                let h = (-a.0, -a.1);
                let p = add(add(c, a, HALF_WIDTH), right(h), LANE_OFFSET);
                junctions.push(p);
                for &d in &arms {
                    if d == a {
                        continue;
                    }
                    let q = add(add(c, d, HALF_WIDTH), right(d), LANE_OFFSET);
                    if d == h {
                        b.lane(p, q);
                        continue;
                    }
                    let k = if h.0 == 0.0 { (p.0, q.1) } else { (q.0, p.1) };
                    let r = if d == right(h) { RIGHT_CHAMFER } else { LEFT_CHAMFER };
                    b.chain(&[p, add(k, h, -r), add(k, d, r), q]);
                }
                junctions.push(add(add(c, a, HALF_WIDTH), right(a), LANE_OFFSET));
            }
        }
    }
    b.link_junctions(&junctions);

    let geometry = GridGeometry::new(
        l.resolution,
        Point2::new(0.0, 0.0),
        (l.width / l.resolution).round() as usize,
        (l.height / l.resolution).round() as usize,
    )
    .unwrap();
    let polys: Vec<Vec<Point2>> = passages
        .iter()
        .chain(&intersections)
        .chain(&parking)
        .map(|r| r.polygon.iter().map(|p| Point2::new(p[0], p[1])).collect())
        .collect();
    let mask = polygon_mask(&geometry, &polys);
    let cells = mask
        .iter()
        .map(|&free| if free { Occupancy::Free } else { Occupancy::Occupied })
        .collect();
    let mut grid = OccupancyGrid::new(geometry, cells).unwrap();
    for r in &parking {
        let (x0, y0, x1, y1) = (r.polygon[0][0], r.polygon[0][1], r.polygon[2][0], r.polygon[2][1]);
        let horizontal = r.name.starts_with("PH");
        let far_high = r.name.ends_with('n') || r.name.ends_with('e');
        let (along0, along1) = if horizontal { (x0, x1) } else { (y0, y1) };
        let mut s = along0 + PILLAR_SPACING / 2.0;
        while s + PILLAR / 2.0 <= along1 {
            let (px0, py0) = if horizontal {
                (s - PILLAR / 2.0, if far_high { y1 - PILLAR } else { y0 })
            } else {
                (if far_high { x1 - PILLAR } else { x0 }, s - PILLAR / 2.0)
            };
            block(&mut grid, px0, py0, px0 + PILLAR, py0 + PILLAR);
            s += PILLAR_SPACING;
        }
    }

    let file = MapFile {
        schema_version: SCHEMA_VERSION,
        robot_radius: 0.3,
        link_params: LinkParams {
            alpha_min: 0.8,
            ..LinkParams::default()
        },
        potential_params: PotentialSpec::default(),
        resample_spacing: None,
        lanes: b.lanes,
        passages,
        intersections,
        parking,
        grid_ref: GridRef {
            path: format!("{}.pgm", l.name),
            origin: [0.0, 0.0],
            resolution: l.resolution,
        },
    };
    Built {
        file,
        grid,
        expected_next: b.next,
    }
}

fn block(grid: &mut OccupancyGrid, x0: f64, y0: f64, x1: f64, y1: f64) {
    let g = grid.geometry;
    let (Some((ix0, iy0)), Some((ix1, iy1))) = (
        g.world_to_cell(Point2::new(x0, y0)),
        g.world_to_cell(Point2::new(x1, y1)),
    ) else {
        return;
    };
    for iy in iy0..=iy1 {
        for ix in ix0..=ix1 {
            let c = g.cell_center(ix, iy);
            if c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1 {
                grid.set(ix, iy, Occupancy::Occupied);
            }
        }
    }
}

fn loop_map() -> Built {
    let mut b = Builder::default();
    b.lane((0.0, 0.0), (10.0, 0.0));
    b.lane((10.0, 3.0), (0.0, 3.0));
    b.lane((10.0, 0.0), (10.0, 3.0));
    b.lane((0.0, 3.0), (0.0, 0.0));
    b.link_junctions(&[(0.0, 0.0), (10.0, 0.0), (10.0, 3.0), (0.0, 3.0)]);
    let resolution = 0.05;
    let origin = Point2::new(-3.0, -3.0);
    let geometry = GridGeometry::new(resolution, origin, 360, 220).unwrap();
    let passage = rect(-2.0, -2.0, 12.0, 5.0);
    let poly: Vec<Point2> = passage.iter().map(|p| Point2::new(p[0], p[1])).collect();
    let mask = polygon_mask(&geometry, &[poly]);
    let cells = mask
        .iter()
        .map(|&f| if f { Occupancy::Free } else { Occupancy::Occupied })
        .collect();
    let file = MapFile {
        schema_version: SCHEMA_VERSION,
        robot_radius: 0.3,
        link_params: LinkParams {
            alpha_min: 1.6,
            ..LinkParams::default()
        },
        potential_params: PotentialSpec::default(),
        resample_spacing: None,
        lanes: b.lanes,
        passages: vec![RegionSpec {
            name: "loop".into(),
            polygon: passage,
        }],
        intersections: Vec::new(),
        parking: Vec::new(),
        grid_ref: GridRef {
            path: "loop.pgm".into(),
            origin: [origin.x, origin.y],
            resolution,
        },
    };
    Built {
        file,
        grid: OccupancyGrid::new(geometry, cells).unwrap(),
        expected_next: b.next,
    }
}

fn scenario(name: &str, s: P, g: P, case: PlanCase) -> Scenario {
    Scenario {
        name: name.into(),
        start: [s.0, s.1],
        goal: [g.0, g.1],
        expected_case: Some(case),
    }
}

fn write(dir: &Path, name: &str, built: &Built, scenarios: &[Scenario]) {
    let map_path = dir.join(format!("{name}.json"));
    let json = serde_json::to_string_pretty(&built.file).unwrap();
    fs::write(&map_path, json + "\n").unwrap();
    let mut w = BufWriter::new(File::create(dir.join(&built.file.grid_ref.path)).unwrap());
    write_pgm(&built.grid, &mut w).unwrap();
    drop(w);
    if !scenarios.is_empty() {
        let sc = ScenarioFile {
            scenarios: scenarios.to_vec(),
        };
        fs::write(
            dir.join(format!("{name}_scenarios.json")),
            serde_json::to_string_pretty(&sc).unwrap() + "\n",
        )
        .unwrap();
    }

    let map = map_from_file(&built.file, &map_path).unwrap();
    let mut mismatches = 0;
    for lane in map.network().lanes() {
        let got: BTreeSet<u32> = lane.to_ids.iter().map(|l: &LaneId| l.0).collect();
        let want = built.expected_next.get(&lane.id.0).cloned().unwrap_or_default();
        if got != want {
            mismatches += 1;
            eprintln!("{name}: {} links to {got:?}, intended {want:?}", lane.id);
        }
    }
    assert_eq!(mismatches, 0, "{name}: unintended lane links");
    println!(
        "{name}: {} lanes, {} nodes, grid {}x{}",
        map.network().lanes().len(),
        map.network().node_count(),
        built.grid.geometry.width,
        built.grid.geometry.height
    );
}

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "maps".into());
    let dir = Path::new(&dir);
    fs::create_dir_all(dir).unwrap();

    write(dir, "loop", &loop_map(), &[]);

    let twocross = build_layout(&Layout {
        name: "twocross",
        cols: vec![5.0, 25.0, 45.0, 65.0],
        rows: vec![5.0, 25.0, 45.0],
        width: 70.0,
        height: 50.0,
        resolution: 0.1,
        parking: true,
    });
    use PlanCase::*;
    write(
        dir,
        "twocross",
        &twocross,
        &[
            scenario("p2p_diagonal", (15.0, 5.6), (55.0, 44.3), Passage2Passage),
            scenario("p2p_vertical", (25.8, 15.0), (60.0, 25.5), Passage2Passage),
            scenario("i2i_crosses", (25.5, 25.5), (45.5, 24.5), Intersection2Intersection),
            scenario("i2i_corners", (5.5, 5.5), (65.0, 45.0), Intersection2Intersection),
            scenario("mixed_into_cross", (15.0, 24.6), (45.3, 25.7), Mixed),
        ],
    );

    let garage = build_layout(&Layout {
        name: "garage75x128",
        cols: vec![4.0, 37.5, 71.0],
        rows: vec![4.0, 45.0, 86.0, 124.0],
        width: 75.0,
        height: 128.0,
        resolution: 0.05,
        parking: true,
    });
    write(
        dir,
        "garage75x128",
        &garage,
        &[
            scenario("exp1_long", (20.0, 4.6), (60.0, 123.2), Passage2Passage),
            scenario("p2p_columns", (37.9, 20.0), (70.2, 100.0), Passage2Passage),
            scenario("parking_to_passage", (10.0, 25.0), (55.0, 85.2), Passage2Passage),
            scenario("i2i_center_to_corner", (38.5, 44.0), (70.0, 123.0), Intersection2Intersection),
            scenario("mixed_passage_to_cross", (20.0, 3.5), (38.0, 86.5), Mixed),
        ],
    );
}
