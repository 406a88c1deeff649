use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use roadplan::bench::{default_planners, run_bench};
use roadplan::geometry::Point2;
use roadplan::io::{
    load_map, load_scenarios, map_report, read_path_csv, write_metrics_json, write_path_csv,
    write_svg,
};
use roadplan::metrics::{evaluate, run_planner, timed_plan_with_result, PlannerKind};
use roadplan::baselines::{BaselineKind, DEFAULT_K_D};

#[derive(Parser)]
#[command(name = "roadplan", version, about = "Road-network global path planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlannerArg {
    Ours,
    Dijkstra,
    DijkstraSs,
}

#[derive(Subcommand)]
enum Command {
    /// Load a map and print the inferred lane relations.
    ValidateMap { map: PathBuf },
    /// Plan one path.
    Plan {
        map: PathBuf,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        start: Point2,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        goal: Point2,
        #[arg(long, value_enum, default_value = "ours")]
        planner: PlannerArg,
        /// Penalty weight for dijkstra-ss.
        #[arg(long, default_value_t = DEFAULT_K_D)]
        k_d: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        metrics: Option<PathBuf>,
        /// Timing cycles for the metrics file.
        #[arg(long, default_value_t = 1)]
        cycles: usize,
    },
    /// Run every planner on every scenario.
    Bench {
        map: PathBuf,
        scenarios: PathBuf,
        #[arg(long, default_value_t = 100)]
        cycles: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw the map, optionally with a path.
    Render {
        map: PathBuf,
        #[arg(long)]
        path: Option<PathBuf>,
        #[arg(long)]
        svg: PathBuf,
    },
}

fn parse_point(s: &str) -> Result<Point2, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let x: f64 = x.trim().parse().map_err(|_| format!("bad x in {s:?}"))?;
    let y: f64 = y.trim().parse().map_err(|_| format!("bad y in {s:?}"))?;
    Ok(Point2::new(x, y))
}

enum Failure {
    Plan(anyhow::Error),
    Io(anyhow::Error),
}

fn io<T, E>(r: Result<T, E>) -> Result<T, Failure>
where
    E: Into<anyhow::Error>,
{
    r.map_err(|e| Failure::Io(e.into()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::ValidateMap { map } => {
            let m = io(load_map(&map))?;
            let report = map_report(&m);
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        }
        Command::Plan {
            map,
            start,
            goal,
            planner,
            k_d,
            out,
            svg,
            metrics,
            cycles,
        } => {
            let m = io(load_map(&map))?;
            let kind = match planner {
                PlannerArg::Ours => PlannerKind::Ours,
                PlannerArg::Dijkstra => PlannerKind::FREE_DIJKSTRA,
                PlannerArg::DijkstraSs => PlannerKind::Baseline(BaselineKind::DijkstraInSS { k_d }),
            };
            let (report, result) = if cycles > 1 {
                timed_plan_with_result(kind, start, goal, &m, cycles)
                    .map_err(|e| Failure::Plan(e.into()))?
            } else {
                let r = run_planner(kind, start, goal, &m).map_err(|e| Failure::Plan(e.into()))?;
                let rep = evaluate(&r, m.network()).map_err(|e| Failure::Plan(e.into()))?;
                (rep, r)
            };
            eprintln!(
                "{:?}: {} poses, length {:.3} m, {:.3} ms",
                result.case,
                result.path.len(),
                result.length,
                report.t * 1e3
            );
            if let Some(out) = out {
                io(write_path_csv(&result.path, &out))?;
            } else {
                let mut stdout = std::io::stdout().lock();
                io(roadplan::io::write_path_csv_to(&result.path, &mut stdout))?;
            }
            if let Some(svg) = svg {
                io(write_svg(&m, Some(&result.path), &svg))?;
            }
            if let Some(metrics) = metrics {
                io(write_metrics_json(&report, &metrics))?;
            }
        }
        Command::Bench {
            map,
            scenarios,
            cycles,
            out,
        } => {
            let m = io(load_map(&map))?;
            let sc = io(load_scenarios(&scenarios))?;
            let report = run_bench(&m, &sc, &default_planners(), cycles);
            let text = serde_json::to_string_pretty(&report).expect("serializable");
            io(std::fs::write(&out, text + "\n").with_context(|| out.display().to_string()))?;
            let failed: usize = report.scenarios.iter().map(|s| s.errors.len()).sum();
            if failed > 0 {
                return Err(Failure::Plan(anyhow!("{failed} planner run(s) failed, see {}", out.display())));
            }
        }
        Command::Render { map, path, svg } => {
            let m = io(load_map(&map))?;
            let poses = match path {
                Some(p) => Some(io(read_path_csv(&p))?),
                None => None,
            };
            io(write_svg(&m, poses.as_deref(), &svg))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Plan(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
