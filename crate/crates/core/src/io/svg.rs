use std::fmt::Write as _;
use std::path::Path;

use super::IoError;
use crate::geometry::{Point2, Pose2};
use crate::planner::{Region, SemanticMap};
use crate::potential::Occupancy;

const PASSAGE: &str = "#D2691E";
const INTERSECTION: &str = "#9400D3";
const PARKING: &str = "#90EE90";

/// Renders regions, obstacles, lanes and an optional path. One pixel per
/// grid cell, y up.
pub fn render_svg(map: &SemanticMap, path: Option<&[Pose2]>) -> String {
    let g = map.occupancy().geometry;
    let (w, h) = (g.width, g.height);
    let to_px = |p: Point2| {
        (
            (p.x - g.origin.x) / g.resolution,
            h as f64 - (p.y - g.origin.y) / g.resolution,
        )
    };
    let px = |m: f64| m / g.resolution;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        s,
        r#"<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="4" markerHeight="4" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="black"/></marker></defs>"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);

    let polygon = |s: &mut String, r: &Region, color: &str| {
        let pts: Vec<String> = r
            .polygon
            .iter()
            .map(|&p| {
                let (x, y) = to_px(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.5" stroke="none"><title>{}</title></polygon>"#,
            pts.join(" "),
            r.name
        );
    };
    for r in map.passages() {
        polygon(&mut s, r, PASSAGE);
    }
    for r in map.parking_areas() {
        polygon(&mut s, r, PARKING);
    }
    for r in map.intersections() {
        polygon(&mut s, r, INTERSECTION);
    }

    let occ = map.occupancy();
    let _ = writeln!(s, r##"<g fill="#404040">"##);
    for iy in 0..h {
        let row = h - 1 - iy;
        let mut ix = 0;
        while ix < w {
            if occ.get(ix, iy) == Occupancy::Free {
                ix += 1;
                continue;
            }
            let x0 = ix;
            while ix < w && occ.get(ix, iy) != Occupancy::Free {
                ix += 1;
            }
            let _ = writeln!(s, r#"<rect x="{x0}" y="{row}" width="{}" height="1"/>"#, ix - x0);
        }
    }
    let _ = writeln!(s, "</g>");

    let lane_w = px(0.08).max(1.0);
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="{lane_w:.2}" marker-end="url(#arrow)">"#
    );
    for lane in map.network().lanes() {
        let (x1, y1) = to_px(lane.a());
        let (x2, y2) = to_px(lane.b());
        let _ = writeln!(
            s,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"><title>{}</title></line>"#,
            lane.id
        );
    }
    let _ = writeln!(s, "</g>");

    if let Some(path) = path.filter(|p| !p.is_empty()) {
        let pts: Vec<String> = path
            .iter()
            .map(|p| {
                let (x, y) = to_px(p.position);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="red" stroke-width="{:.2}"/>"#,
            pts.join(" "),
            px(0.12).max(1.0)
        );
        for (p, color) in [(path[0], "green"), (path[path.len() - 1], "blue")] {
            let (x, y) = to_px(p.position);
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="{color}"/>"#,
                px(0.3).max(2.0)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(
    map: &SemanticMap,
    path: Option<&[Pose2]>,
    file: impl AsRef<Path>,
) -> Result<(), IoError> {
    let file = file.as_ref();
    std::fs::write(file, render_svg(map, path)).map_err(|e| IoError::io(file, e))
}
