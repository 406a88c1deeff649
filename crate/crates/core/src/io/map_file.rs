use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{load_occupancy, IoError};
use crate::geometry::Point2;
use crate::planner::{MapError, PlanCase, Region, SemanticMap, DEFAULT_RESAMPLE_SPACING};
use crate::potential::PotentialParams;
use crate::roadnet::{Lane, LaneId, LinkParams, RoadNetwork};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaneSpec {
    pub id: u32,
    pub start: [f64; 2],
    pub end: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub name: String,
    pub polygon: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRef {
    /// PGM file, relative to the map file.
    pub path: String,
    /// World position of the lower-left corner of the bottom-left cell.
    pub origin: [f64; 2],
    pub resolution: f64,
}

/// Potential parameters as stored; the inflation radius defaults to the
/// robot radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    #[serde(default = "default_p0")]
    pub p0: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_weight")]
    pub traversal_weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inflation_radius: Option<f64>,
}

fn default_p0() -> f64 {
    PotentialParams::default().p0
}

fn default_sigma() -> f64 {
    PotentialParams::default().sigma
}

fn default_weight() -> f64 {
    PotentialParams::default().traversal_weight
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self {
            p0: default_p0(),
            sigma: default_sigma(),
            traversal_weight: default_weight(),
            inflation_radius: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub schema_version: u32,
    pub robot_radius: f64,
    #[serde(default)]
    pub link_params: LinkParams,
    #[serde(default)]
    pub potential_params: PotentialSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resample_spacing: Option<f64>,
    pub lanes: Vec<LaneSpec>,
    #[serde(default)]
    pub passages: Vec<RegionSpec>,
    #[serde(default)]
    pub intersections: Vec<RegionSpec>,
    #[serde(default)]
    pub parking: Vec<RegionSpec>,
    pub grid_ref: GridRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub start: [f64; 2],
    pub goal: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_case: Option<PlanCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaneRelations {
    pub id: LaneId,
    pub from: Vec<LaneId>,
    pub to: Vec<LaneId>,
    pub reverse: Vec<LaneId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadReport {
    pub lanes: usize,
    pub nodes: usize,
    pub edges: usize,
    pub passages: usize,
    pub intersections: usize,
    pub parking: usize,
    pub grid: [usize; 2],
    pub relations: Vec<LaneRelations>,
}

fn pt(p: [f64; 2]) -> Point2 {
    Point2::new(p[0], p[1])
}

fn regions(specs: &[RegionSpec]) -> Vec<Region> {
    specs
        .iter()
        .map(|r| Region {
            name: r.name.clone(),
            polygon: r.polygon.iter().copied().map(pt).collect(),
        })
        .collect()
}

/// Builds a map from a parsed file; `path` locates the grid file and labels
/// diagnostics.
pub fn map_from_file(file: &MapFile, path: &Path) -> Result<SemanticMap, IoError> {
    let invalid = |field: &str, msg: String| IoError::invalid(path, field, msg);
    if file.schema_version != SCHEMA_VERSION {
        return Err(invalid(
            "schema_version",
            format!("unsupported version {}, expected {SCHEMA_VERSION}", file.schema_version),
        ));
    }
    if !(file.robot_radius >= 0.0 && file.robot_radius.is_finite()) {
        return Err(invalid("robot_radius", "must be finite and non-negative".into()));
    }
    file.link_params
        .validate()
        .map_err(|e| invalid("link_params", e.to_string()))?;
    if file.lanes.is_empty() {
        return Err(invalid("lanes", "at least one lane is required".into()));
    }
    let mut seen = HashSet::new();
    let mut lanes = Vec::with_capacity(file.lanes.len());
    for (i, l) in file.lanes.iter().enumerate() {
        if !seen.insert(l.id) {
            return Err(invalid(&format!("lanes[{i}].id"), format!("duplicate id {}", l.id)));
        }
        let lane = Lane::new(LaneId(l.id), pt(l.start), pt(l.end))
            .map_err(|e| invalid(&format!("lanes[{i}]"), e.to_string()))?;
        lanes.push(lane);
    }
    let network = RoadNetwork::from_lanes(lanes, file.link_params)
        .map_err(|e| invalid("lanes", e.to_string()))?;

    let g = &file.grid_ref;
    if !(g.resolution > 0.0 && g.resolution.is_finite()) {
        return Err(invalid("grid_ref.resolution", "must be positive".into()));
    }
    let grid_path = path.parent().unwrap_or(Path::new(".")).join(&g.path);
    let occupancy = load_occupancy(&grid_path, pt(g.origin), g.resolution)?;

    let ps = &file.potential_params;
    let params = PotentialParams {
        p0: ps.p0,
        sigma: ps.sigma,
        traversal_weight: ps.traversal_weight,
        inflation_radius: ps.inflation_radius.unwrap_or(file.robot_radius),
    };
    let spacing = file.resample_spacing.unwrap_or(DEFAULT_RESAMPLE_SPACING);
    SemanticMap::new(
        regions(&file.passages),
        regions(&file.intersections),
        regions(&file.parking),
        occupancy,
        network,
        params,
        spacing,
    )
    .map_err(|e| match &e {
        MapError::InvalidRegion { kind, index, .. } => {
            invalid(&format!("{kind}[{index}]"), e.to_string())
        }
        MapError::LaneOutsidePassable { lane, .. } => {
            let idx = file
                .lanes
                .iter()
                .position(|l| LaneId(l.id).to_string() == *lane)
                .unwrap_or(0);
            invalid(&format!("lanes[{idx}]"), e.to_string())
        }
        MapError::InvalidParam { name, .. } => invalid(name, e.to_string()),
    })
}

pub fn load_map(path: impl AsRef<Path>) -> Result<SemanticMap, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    let file: MapFile = serde_json::from_str(&text).map_err(|e| IoError::parse(path, e.to_string()))?;
    map_from_file(&file, path)
}

pub fn load_scenarios(path: impl AsRef<Path>) -> Result<Vec<Scenario>, IoError> {
    let path: PathBuf = path.as_ref().into();
    let text = fs::read_to_string(&path).map_err(|e| IoError::io(&path, e))?;
    let file: ScenarioFile =
        serde_json::from_str(&text).map_err(|e| IoError::parse(&path, e.to_string()))?;
    if file.scenarios.is_empty() {
        return Err(IoError::invalid(&path, "scenarios", "list is empty"));
    }
    Ok(file.scenarios)
}

pub fn map_report(map: &SemanticMap) -> LoadReport {
    let net = map.network();
    let g = map.occupancy().geometry;
    LoadReport {
        lanes: net.lanes().len(),
        nodes: net.node_count(),
        edges: net.edge_count(),
        passages: map.passages().len(),
        intersections: map.intersections().len(),
        parking: map.parking_areas().len(),
        grid: [g.width, g.height],
        relations: net
            .lanes()
            .iter()
            .map(|l| LaneRelations {
                id: l.id,
                from: l.from_ids.iter().copied().collect(),
                to: l.to_ids.iter().copied().collect(),
                reverse: l.reverse_ids.iter().copied().collect(),
            })
            .collect(),
    }
}
