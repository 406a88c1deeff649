//! Occupancy grids, the two-layer potential map and grid Dijkstra.
//!
//! Cell `(ix, iy)` covers `[origin.x + ix·res, origin.x + (ix+1)·res)` by
//! `[origin.y + iy·res, …)`; row `iy = 0` is the bottom of the map (lowest y).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    bounding_box, point_in_polygon, point_segment_distance, segment_rect_distance, Point2,
};
use crate::roadnet::RoadNetwork;

/// Impassable cell value; absorbing under `max`.
pub const LETHAL: f64 = f64::INFINITY;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("grid geometry mismatch")]
    GeometryMismatch,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid potential parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GridSearchError {
    #[error("start lies in an impassable cell or off the grid")]
    StartBlocked,
    #[error("goal lies in an impassable cell or off the grid")]
    GoalBlocked,
    #[error("no grid route between start and goal")]
    NoRoute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub resolution: f64,
    /// World position of the outer corner of cell (0, 0).
    pub origin: Point2,
    pub width: usize,
    pub height: usize,
}

impl GridGeometry {
    pub fn new(
        resolution: f64,
        origin: Point2,
        width: usize,
        height: usize,
    ) -> Result<Self, PotentialError> {
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(PotentialError::InvalidGrid(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(PotentialError::InvalidGrid(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if !origin.is_finite() {
            return Err(PotentialError::InvalidGrid("non-finite origin".into()));
        }
        Ok(Self {
            resolution,
            origin,
            width,
            height,
        })
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.width + ix
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.width, idx / self.width)
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point2 {
        Point2::new(
            self.origin.x + (ix as f64 + 0.5) * self.resolution,
            self.origin.y + (iy as f64 + 0.5) * self.resolution,
        )
    }

    pub fn center_of(&self, idx: usize) -> Point2 {
        let (ix, iy) = self.coords(idx);
        self.cell_center(ix, iy)
    }

    pub fn world_to_cell(&self, p: Point2) -> Option<(usize, usize)> {
        let fx = ((p.x - self.origin.x) / self.resolution).floor();
        let fy = ((p.y - self.origin.y) / self.resolution).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    pub fn world_to_index(&self, p: Point2) -> Option<usize> {
        self.world_to_cell(p).map(|(ix, iy)| self.index(ix, iy))
    }

    /// Extent of the map in world coordinates as `(min, max)`.
    pub fn bounds(&self) -> (Point2, Point2) {
        (
            self.origin,
            Point2::new(
                self.origin.x + self.width as f64 * self.resolution,
                self.origin.y + self.height as f64 * self.resolution,
            ),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Occupancy {
    Free,
    Occupied,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub geometry: GridGeometry,
    pub cells: Vec<Occupancy>,
}

impl OccupancyGrid {
    pub fn new(geometry: GridGeometry, cells: Vec<Occupancy>) -> Result<Self, PotentialError> {
        if cells.len() != geometry.len() {
            return Err(PotentialError::InvalidGrid(format!(
                "expected {} cells, got {}",
                geometry.len(),
                cells.len()
            )));
        }
        Ok(Self { geometry, cells })
    }

    pub fn filled(geometry: GridGeometry, value: Occupancy) -> Self {
        Self {
            cells: vec![value; geometry.len()],
            geometry,
        }
    }

    pub fn get(&self, ix: usize, iy: usize) -> Occupancy {
        self.cells[self.geometry.index(ix, iy)]
    }

    pub fn set(&mut self, ix: usize, iy: usize, v: Occupancy) {
        let i = self.geometry.index(ix, iy);
        self.cells[i] = v;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    pub geometry: GridGeometry,
    pub values: Vec<f64>,
}

impl PotentialGrid {
    pub fn filled(geometry: GridGeometry, value: f64) -> Self {
        Self {
            values: vec![value; geometry.len()],
            geometry,
        }
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[self.geometry.index(ix, iy)]
    }

    pub fn is_lethal(&self, idx: usize) -> bool {
        self.values[idx] == LETHAL
    }

    /// Value at a world point; `None` off the grid.
    pub fn at(&self, p: Point2) -> Option<f64> {
        self.geometry.world_to_index(p).map(|i| self.values[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PotentialParams {
    /// Maximal potential.
    pub p0: f64,
    /// Gaussian width around the lanes (m).
    pub sigma: f64,
    pub inflation_radius: f64,
    /// Scales potential into traversal cost: `len · (1 + w·p/p0)`.
    pub traversal_weight: f64,
}

impl Default for PotentialParams {
    fn default() -> Self {
        Self {
            p0: 100.0,
            sigma: 0.5,
            inflation_radius: 0.3,
            traversal_weight: 5.0,
        }
    }
}

impl PotentialParams {
    pub fn validate(&self) -> Result<(), PotentialError> {
        let checks = [
            ("p0", self.p0 > 0.0 && self.p0.is_finite()),
            ("sigma", self.sigma > 0.0 && self.sigma.is_finite()),
            (
                "inflation_radius",
                self.inflation_radius >= 0.0 && self.inflation_radius.is_finite(),
            ),
            (
                "traversal_weight",
                self.traversal_weight >= 0.0 && self.traversal_weight.is_finite(),
            ),
        ];
        for (name, ok) in checks {
            if !ok {
                return Err(PotentialError::InvalidParam {
                    name,
                    reason: "out of range".into(),
                });
            }
        }
        Ok(())
    }
}

/// Gaussian road potential: `p0 · (1 − exp(−d² / 2σ²))`.
pub fn gaussian_potential(d: f64, p0: f64, sigma: f64) -> f64 {
    p0 * (1.0 - (-d * d / (2.0 * sigma * sigma)).exp())
}

/// Stand-in for "no feature" so the parabola arithmetic stays finite.
const FAR: f64 = 1e20;

/// One-dimensional squared distance transform (lower envelope of parabolas).
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let fq = f[q] + (q * q) as f64;
        loop {
            let p = v[k];
            let s = (fq - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                v[0] = q;
                z[1] = f64::INFINITY;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
            }
            break;
        }
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Squared Euclidean distance (in cells) from every cell to the nearest
/// feature cell. Infinite when there is no feature.
pub fn squared_distance_transform(
    width: usize,
    height: usize,
    is_feature: impl Fn(usize) -> bool,
) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..width * height)
        .map(|i| if is_feature(i) { 0.0 } else { FAR })
        .collect();
    let m = width.max(height);
    let mut f = vec![0.0; m];
    let mut out = vec![0.0; m];
    let mut v = vec![0usize; m];
    let mut z = vec![0.0; m + 1];
    for ix in 0..width {
        for iy in 0..height {
            f[iy] = grid[iy * width + ix];
        }
        edt_1d(&f[..height], &mut out[..height], &mut v, &mut z);
        for iy in 0..height {
            grid[iy * width + ix] = out[iy];
        }
    }
    for iy in 0..height {
        let row = &mut grid[iy * width..(iy + 1) * width];
        f[..width].copy_from_slice(row);
        edt_1d(&f[..width], &mut out[..width], &mut v, &mut z);
        row.copy_from_slice(&out[..width]);
    }
    for v in &mut grid {
        if *v >= FAR * 0.5 {
            *v = f64::INFINITY;
        }
    }
    grid
}

/// Cells whose centre lies inside (or on) any of the polygons.
pub fn polygon_mask(geometry: &GridGeometry, polygons: &[Vec<Point2>]) -> Vec<bool> {
    let mut mask = vec![false; geometry.len()];
    for poly in polygons {
        if poly.len() < 3 {
            continue;
        }
        let (lo, hi) = bounding_box(poly);
        let (Some((x0, y0)), Some((x1, y1))) = (
            geometry.world_to_cell(clamp_to(geometry, lo)),
            geometry.world_to_cell(clamp_to(geometry, hi)),
        ) else {
            continue;
        };
        for iy in y0..=y1 {
            for ix in x0..=x1 {
                let idx = geometry.index(ix, iy);
                if !mask[idx]
                    && point_in_polygon(geometry.cell_center(ix, iy), poly).unwrap_or(false)
                {
                    mask[idx] = true;
                }
            }
        }
    }
    mask
}

fn clamp_to(geometry: &GridGeometry, p: Point2) -> Point2 {
    let (lo, hi) = geometry.bounds();
    let eps = geometry.resolution * 1e-6;
    Point2::new(
        p.x.clamp(lo.x, hi.x - eps),
        p.y.clamp(lo.y, hi.y - eps),
    )
}

/// Inflated obstacle layer. Cells within `inflation_radius` of an occupied or
/// unknown cell are lethal, as is every cell outside the passable polygons
/// when `passable` is given. All other cells are 0.
pub fn build_static_layer(
    grid: &OccupancyGrid,
    passable: Option<&[Vec<Point2>]>,
    inflation_radius: f64,
) -> PotentialGrid {
    let geometry = grid.geometry;
    let mask = passable.map(|polys| polygon_mask(&geometry, polys));
    static_layer_from_mask(grid, mask.as_deref(), inflation_radius)
}

pub fn static_layer_from_mask(
    grid: &OccupancyGrid,
    passable: Option<&[bool]>,
    inflation_radius: f64,
) -> PotentialGrid {
    let geometry = grid.geometry;
    let dist2 = squared_distance_transform(geometry.width, geometry.height, |i| {
        grid.cells[i] != Occupancy::Free
    });
    let r_cells = inflation_radius / geometry.resolution;
    // Small slack so radii that are whole multiples of the resolution
    // include the boundary ring despite rounding.
    let limit = r_cells * r_cells + 1e-9;
    let values = dist2
        .iter()
        .enumerate()
        .map(|(i, &d2)| {
            let outside = passable.is_some_and(|m| !m[i]);
            if outside || d2 <= limit {
                LETHAL
            } else {
                0.0
            }
        })
        .collect();
    PotentialGrid { geometry, values }
}

/// Exact distance from every cell centre to the nearest segment.
///
/// Cells are processed in square blocks; for each block only segments that
/// can possibly be nearest to some cell in it are examined.
pub fn segment_distance_field(geometry: &GridGeometry, segments: &[(Point2, Point2)]) -> Vec<f64> {
    let mut out = vec![f64::INFINITY; geometry.len()];
    if segments.is_empty() {
        return out;
    }
    const BLOCK: usize = 16;
    let half = geometry.resolution * 0.5;
    let mut candidates: Vec<usize> = Vec::with_capacity(segments.len());
    let mut by0 = 0;
    while by0 < geometry.height {
        let by1 = (by0 + BLOCK).min(geometry.height);
        let mut bx0 = 0;
        while bx0 < geometry.width {
            let bx1 = (bx0 + BLOCK).min(geometry.width);
            let lo = geometry.cell_center(bx0, by0);
            let hi = geometry.cell_center(bx1 - 1, by1 - 1);
            let centre = lo.lerp(hi, 0.5);
            let half_diag = lo.distance(hi) * 0.5 + half * 1e-9;
            let mut min_upper = f64::INFINITY;
            for &(a, b) in segments {
                min_upper = min_upper.min(point_segment_distance(centre, a, b) + half_diag);
            }
            candidates.clear();
            for (k, &(a, b)) in segments.iter().enumerate() {
                if segment_rect_distance(a, b, lo, hi) <= min_upper {
                    candidates.push(k);
                }
            }
            for iy in by0..by1 {
                for ix in bx0..bx1 {
                    let c = geometry.cell_center(ix, iy);
                    let mut best = f64::INFINITY;
                    for &k in &candidates {
                        let (a, b) = segments[k];
                        best = best.min(point_segment_distance(c, a, b));
                    }
                    out[geometry.index(ix, iy)] = best;
                }
            }
            bx0 = bx1;
        }
        by0 = by1;
    }
    out
}

pub fn lane_segments(net: &RoadNetwork) -> Vec<(Point2, Point2)> {
    net.lanes().iter().map(|l| (l.a(), l.b())).collect()
}

/// Road-network layer from precomputed passable mask and lane distances.
/// Outside the passable area: 0. On its border (a 4-neighbour outside or off
/// the grid): `p0`. Elsewhere the Gaussian potential of the lane distance.
pub fn semantic_layer_from_fields(
    geometry: &GridGeometry,
    passable: &[bool],
    lane_distance: &[f64],
    params: &PotentialParams,
) -> PotentialGrid {
    let (w, h) = (geometry.width, geometry.height);
    let mut values = vec![0.0; geometry.len()];
    for iy in 0..h {
        for ix in 0..w {
            let i = geometry.index(ix, iy);
            if !passable[i] {
                continue;
            }
            let border = ix == 0
                || iy == 0
                || ix + 1 == w
                || iy + 1 == h
                || !passable[i - 1]
                || !passable[i + 1]
                || !passable[i - w]
                || !passable[i + w];
            values[i] = if border {
                params.p0
            } else {
                gaussian_potential(lane_distance[i], params.p0, params.sigma)
            };
        }
    }
    PotentialGrid {
        geometry: *geometry,
        values,
    }
}

/// Gaussian road-network layer over the passable polygons.
pub fn build_semantic_layer(
    geometry: &GridGeometry,
    passable: &[Vec<Point2>],
    net: &RoadNetwork,
    params: &PotentialParams,
) -> PotentialGrid {
    let mask = polygon_mask(geometry, passable);
    let dist = segment_distance_field(geometry, &lane_segments(net));
    semantic_layer_from_fields(geometry, &mask, &dist, params)
}

/// Per-cell maximum; `LETHAL` absorbs.
pub fn combine_layers(a: &PotentialGrid, b: &PotentialGrid) -> Result<PotentialGrid, PotentialError> {
    if a.geometry != b.geometry {
        return Err(PotentialError::GeometryMismatch);
    }
    Ok(PotentialGrid {
        geometry: a.geometry,
        values: a
            .values
            .iter()
            .zip(&b.values)
            .map(|(&x, &y)| x.max(y))
            .collect(),
    })
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    idx: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// The eight moves `(dx, dy, length in cells)`.
pub const MOVES: [(isize, isize, f64); 8] = [
    (1, 0, 1.0),
    (-1, 0, 1.0),
    (0, 1, 1.0),
    (0, -1, 1.0),
    (1, 1, SQRT2),
    (1, -1, SQRT2),
    (-1, 1, SQRT2),
    (-1, -1, SQRT2),
];

/// Neighbours of `idx` under 8-connectivity: `(neighbour, step length in
/// metres)`. Diagonal moves need both adjacent orthogonal cells passable.
pub fn grid_neighbors(
    geometry: &GridGeometry,
    idx: usize,
    passable: &impl Fn(usize) -> bool,
    mut visit: impl FnMut(usize, f64),
) {
    let (ix, iy) = geometry.coords(idx);
    let (w, h) = (geometry.width as isize, geometry.height as isize);
    for &(dx, dy, len) in &MOVES {
        let nx = ix as isize + dx;
        let ny = iy as isize + dy;
        if nx < 0 || ny < 0 || nx >= w || ny >= h {
            continue;
        }
        let n = geometry.index(nx as usize, ny as usize);
        if !passable(n) {
            continue;
        }
        if dx != 0 && dy != 0 {
            let a = geometry.index(nx as usize, iy);
            let b = geometry.index(ix, ny as usize);
            if !passable(a) || !passable(b) {
                continue;
            }
        }
        visit(n, len * geometry.resolution);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPath {
    pub cells: Vec<usize>,
    /// Exact start, interior cell centres, exact goal.
    pub path: Vec<Point2>,
    /// Accumulated step cost between the start and goal cells.
    pub cost: f64,
    /// Euclidean length of `path`.
    pub length: f64,
    pub expanded: usize,
}

/// 8-connected Dijkstra between two world points. `step_cost(dest, len)` is
/// the cost of entering `dest` over a move of `len` metres.
pub fn grid_search(
    geometry: &GridGeometry,
    start: Point2,
    goal: Point2,
    passable: impl Fn(usize) -> bool,
    step_cost: impl Fn(usize, f64) -> f64,
) -> Result<GridPath, GridSearchError> {
    let s = geometry
        .world_to_index(start)
        .filter(|&i| passable(i))
        .ok_or(GridSearchError::StartBlocked)?;
    let g = geometry
        .world_to_index(goal)
        .filter(|&i| passable(i))
        .ok_or(GridSearchError::GoalBlocked)?;
    let n = geometry.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![u32::MAX; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut expanded = 0;
    dist[s] = 0.0;
    heap.push(Entry { cost: 0.0, idx: s });
    while let Some(Entry { cost, idx }) = heap.pop() {
        if closed[idx] {
            continue;
        }
        closed[idx] = true;
        expanded += 1;
        if idx == g {
            let mut cells = vec![g];
            let mut cur = g;
            while cur != s {
                cur = parent[cur] as usize;
                cells.push(cur);
            }
            cells.reverse();
            let mut path = Vec::with_capacity(cells.len() + 1);
            path.push(start);
            if cells.len() > 2 {
                path.extend(cells[1..cells.len() - 1].iter().map(|&c| geometry.center_of(c)));
            }
            if goal != start {
                path.push(goal);
            }
            let length = path.windows(2).map(|w| w[0].distance(w[1])).sum();
            return Ok(GridPath {
                cells,
                path,
                cost,
                length,
                expanded,
            });
        }
        grid_neighbors(geometry, idx, &passable, |next, len| {
            if closed[next] {
                return;
            }
            let c = cost + step_cost(next, len);
            if c < dist[next] {
                dist[next] = c;
                parent[next] = idx as u32;
                heap.push(Entry { cost: c, idx: next });
            }
        });
    }
    Err(GridSearchError::NoRoute)
}

/// Grid Dijkstra over a potential map. Entering a cell of potential `p` over
/// a move of length `len` costs `len · (1 + w·p/p0)`; lethal cells are
/// impassable.
pub fn grid_dijkstra(
    m: &PotentialGrid,
    start: Point2,
    goal: Point2,
    params: &PotentialParams,
) -> Result<GridPath, GridSearchError> {
    let scale = params.traversal_weight / params.p0;
    grid_search(
        &m.geometry,
        start,
        goal,
        |i| m.values[i] != LETHAL,
        |i, len| len * (1.0 + scale * m.values[i]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(w: usize, h: usize) -> GridGeometry {
        GridGeometry::new(1.0, Point2::new(0.0, 0.0), w, h).unwrap()
    }

    #[test]
    fn gaussian_values() {
        assert_eq!(gaussian_potential(0.0, 100.0, 0.5), 0.0);
        let v = gaussian_potential(0.5, 1.0, 0.5);
        assert!((v - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        assert!((v - 0.39347).abs() < 1e-5);
        assert!(gaussian_potential(5.0, 100.0, 0.5) > 99.9);
    }

    #[test]
    fn edt_matches_brute_force() {
        let (w, h) = (23, 17);
        let feats: Vec<usize> = vec![3, 40, 41, 200, 333, 390];
        let dt = squared_distance_transform(w, h, |i| feats.contains(&i));
        for i in 0..w * h {
            let (x, y) = ((i % w) as f64, (i / w) as f64);
            let brute = feats
                .iter()
                .map(|&f| {
                    let (fx, fy) = ((f % w) as f64, (f / w) as f64);
                    (x - fx).powi(2) + (y - fy).powi(2)
                })
                .fold(f64::INFINITY, f64::min);
            assert_eq!(dt[i], brute, "cell {i}");
        }
        let none = squared_distance_transform(4, 3, |_| false);
        assert!(none.iter().all(|v| v.is_infinite()));
    }

    #[test]
    fn static_layer_disk() {
        let g = GridGeometry::new(0.05, Point2::new(0.0, 0.0), 11, 11).unwrap();
        let mut occ = OccupancyGrid::filled(g, Occupancy::Free);
        occ.set(5, 5, Occupancy::Occupied);
        let layer = build_static_layer(&occ, None, 0.10);
        for iy in 0..11 {
            for ix in 0..11 {
                let d2 = (ix as i32 - 5).pow(2) + (iy as i32 - 5).pow(2);
                assert_eq!(layer.get(ix, iy) == LETHAL, d2 <= 4, "({ix},{iy})");
            }
        }
    }

    #[test]
    fn static_layer_polygon_and_unknown() {
        let g = geom(10, 10);
        let mut occ = OccupancyGrid::filled(g, Occupancy::Free);
        let poly = vec![vec![
            Point2::new(0.0, 0.0),
            Point2::new(10.0, 0.0),
            Point2::new(10.0, 10.0),
            Point2::new(0.0, 10.0),
        ]];
        let layer = build_static_layer(&occ, Some(&poly), 0.0);
        assert!(layer.values.iter().all(|&v| v == 0.0));

        let half = vec![vec![
            Point2::new(0.0, 0.0),
            Point2::new(5.0, 0.0),
            Point2::new(5.0, 10.0),
            Point2::new(0.0, 10.0),
        ]];
        let layer = build_static_layer(&occ, Some(&half), 0.0);
        assert_eq!(layer.get(2, 2), 0.0);
        assert_eq!(layer.get(7, 2), LETHAL);

        occ.set(1, 1, Occupancy::Unknown);
        let layer = build_static_layer(&occ, None, 0.0);
        assert_eq!(layer.get(1, 1), LETHAL);
        assert_eq!(layer.get(2, 1), 0.0);
    }

    #[test]
    fn distance_field_matches_brute_force() {
        let g = GridGeometry::new(0.1, Point2::new(-1.0, -2.0), 57, 41).unwrap();
        let segs = vec![
            (Point2::new(0.0, 0.0), Point2::new(3.0, 0.5)),
            (Point2::new(4.0, 1.5), Point2::new(0.5, 1.7)),
            (Point2::new(2.0, -1.9), Point2::new(2.1, 1.0)),
        ];
        let field = segment_distance_field(&g, &segs);
        for i in 0..g.len() {
            let c = g.center_of(i);
            let brute = segs
                .iter()
                .map(|&(a, b)| point_segment_distance(c, a, b))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(field[i], brute);
        }
    }

    #[test]
    fn semantic_layer_rules() {
        let g = geom(7, 5);
        let mut mask = vec![true; g.len()];
        mask[g.index(6, 2)] = false;
        let dist: Vec<f64> = (0..g.len()).map(|i| g.coords(i).1 as f64 * 0.25).collect();
        let params = PotentialParams {
            p0: 10.0,
            sigma: 0.5,
            ..Default::default()
        };
        let layer = semantic_layer_from_fields(&g, &mask, &dist, &params);
        assert_eq!(layer.get(6, 2), 0.0);
        assert_eq!(layer.get(5, 2), 10.0);
        assert_eq!(layer.get(0, 3), 10.0);
        let expect = gaussian_potential(0.5, 10.0, 0.5);
        assert!((layer.get(2, 2) - expect).abs() < 1e-12);
    }

    #[test]
    fn combine_rules() {
        let g = geom(3, 1);
        let a = PotentialGrid {
            geometry: g,
            values: vec![LETHAL, 30.0, 0.0],
        };
        let b = PotentialGrid {
            geometry: g,
            values: vec![30.0, 60.0, 0.0],
        };
        let c = combine_layers(&a, &b).unwrap();
        assert_eq!(c.values, vec![LETHAL, 60.0, 0.0]);
        let other = PotentialGrid::filled(geom(2, 2), 0.0);
        assert_eq!(combine_layers(&a, &other), Err(PotentialError::GeometryMismatch));
    }

    #[test]
    fn straight_open_grid() {
        let g = GridGeometry::new(0.05, Point2::new(0.0, 0.0), 10, 10).unwrap();
        let m = PotentialGrid::filled(g, 0.0);
        let out = grid_dijkstra(
            &m,
            g.cell_center(0, 0),
            g.cell_center(9, 0),
            &PotentialParams::default(),
        )
        .unwrap();
        assert!((out.cost - 9.0 * 0.05).abs() < 1e-12);
        assert_eq!(out.cells.len(), 10);
        assert!(out.path.iter().all(|p| (p.y - 0.025).abs() < 1e-12));
    }

    #[test]
    fn blocked_endpoints() {
        let g = geom(5, 5);
        let mut m = PotentialGrid::filled(g, 0.0);
        m.values[g.index(4, 4)] = LETHAL;
        let p = PotentialParams::default();
        assert_eq!(
            grid_dijkstra(&m, Point2::new(0.5, 0.5), Point2::new(4.5, 4.5), &p),
            Err(GridSearchError::GoalBlocked)
        );
        assert_eq!(
            grid_dijkstra(&m, Point2::new(4.5, 4.5), Point2::new(0.5, 0.5), &p),
            Err(GridSearchError::StartBlocked)
        );
        assert_eq!(
            grid_dijkstra(&m, Point2::new(-3.0, 0.5), Point2::new(0.5, 0.5), &p),
            Err(GridSearchError::StartBlocked)
        );
        for iy in 0..5 {
            m.values[g.index(2, iy)] = LETHAL;
        }
        assert_eq!(
            grid_dijkstra(&m, Point2::new(0.5, 0.5), Point2::new(3.5, 0.5), &p),
            Err(GridSearchError::NoRoute)
        );
    }

    #[test]
    fn no_corner_cutting() {
        let g = geom(2, 2);
        let mut m = PotentialGrid::filled(g, 0.0);
        m.values[g.index(1, 0)] = LETHAL;
        m.values[g.index(0, 1)] = LETHAL;
        assert_eq!(
            grid_dijkstra(&m, Point2::new(0.5, 0.5), Point2::new(1.5, 1.5), &PotentialParams::default()),
            Err(GridSearchError::NoRoute)
        );
    }
}
