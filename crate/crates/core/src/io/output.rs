use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::geometry::{Point2, Pose2};
use crate::metrics::MetricsReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsJson {
    pub t_s: f64,
    pub l_m: f64,
    pub d_e_m: f64,
    pub theta_e_rad: f64,
    pub j_cost: f64,
}

impl From<&MetricsReport> for MetricsJson {
    fn from(m: &MetricsReport) -> Self {
        Self {
            t_s: m.t,
            l_m: m.l,
            d_e_m: m.d_e,
            theta_e_rad: m.theta_e,
            j_cost: m.j_cost,
        }
    }
}

/// `x,y,theta` with six decimals.
pub fn write_path_csv_to(path: &[Pose2], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "x,y,theta")?;
    for p in path {
        writeln!(
            w,
            "{:.6},{:.6},{:.6}",
            p.position.x, p.position.y, p.heading
        )?;
    }
    Ok(())
}

pub fn write_path_csv(path: &[Pose2], file: impl AsRef<Path>) -> Result<(), IoError> {
    let file = file.as_ref();
    let f = File::create(file).map_err(|e| IoError::io(file, e))?;
    let mut w = BufWriter::new(f);
    write_path_csv_to(path, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| IoError::io(file, e))
}

pub fn read_path_csv(file: impl AsRef<Path>) -> Result<Vec<Pose2>, IoError> {
    let file = file.as_ref();
    let f = File::open(file).map_err(|e| IoError::io(file, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| IoError::io(file, e))?;
        let line = line.trim();
        if n == 0 {
            if line != "x,y,theta" {
                return Err(IoError::parse(file, format!("bad header {line:?}")));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match vals.as_deref() {
            Ok([x, y, th]) => out.push(Pose2 {
                position: Point2::new(*x, *y),
                heading: *th,
            }),
            _ => {
                return Err(IoError::parse(
                    file,
                    format!("line {}: expected three numbers", n + 1),
                ))
            }
        }
    }
    Ok(out)
}

pub fn write_metrics_json(m: &MetricsReport, file: impl AsRef<Path>) -> Result<(), IoError> {
    let file = file.as_ref();
    let text = serde_json::to_string_pretty(&MetricsJson::from(m)).expect("plain struct");
    std::fs::write(file, text + "\n").map_err(|e| IoError::io(file, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("p.csv");
        let path = vec![
            Pose2::new(Point2::new(1.23456789, -2.0), 0.5),
            Pose2::new(Point2::new(3.0, 4.0000004), -3.0),
        ];
        write_path_csv(&path, &f).unwrap();
        let back = read_path_csv(&f).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in path.iter().zip(&back) {
            assert!(a.position.distance(b.position) < 1e-6);
            assert!((a.heading - b.heading).abs() < 1e-6);
        }
    }

    #[test]
    fn single_pose_one_row() {
        let mut buf = Vec::new();
        write_path_csv_to(&[Pose2::new(Point2::new(0.0, 0.0), 0.0)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "x,y,theta\n0.000000,0.000000,0.000000\n");
    }

    #[test]
    fn metrics_keys() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("m.json");
        let m = MetricsReport {
            t: 0.001,
            l: 3.0,
            d_e: 0.1,
            theta_e: 0.2,
            j_cost: 4.0,
        };
        write_metrics_json(&m, &f).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
        for k in ["t_s", "l_m", "d_e_m", "theta_e_rad", "j_cost"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["l_m"], 3.0);
    }
}
