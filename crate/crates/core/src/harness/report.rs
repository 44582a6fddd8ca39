use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{find_entry, HarnessError, SuiteName, SuiteReport, TrialResult};
use crate::geometry::{polygon_centroid, Point, Pose};
use crate::navctl::TrialStatus;
use crate::world::{GoalTarget, ObjectKind, ScenarioSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Jsonl,
    SvgTraj,
}

impl FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "jsonl" => Ok(ReportFormat::Jsonl),
            "svg-traj" => Ok(ReportFormat::SvgTraj),
            other => Err(HarnessError::Usage(format!(
                "unknown report format `{other}` (expected table, jsonl or svg-traj)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rendered {
    Text(String),
    /// `(file name, contents)` pairs.
    Files(Vec<(String, String)>),
}

/// Per-trial line of the jsonl report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub test: usize,
    pub scenario_id: String,
    pub status: TrialStatus,
    pub success: bool,
    pub expected_success: bool,
    pub ticks: u64,
    pub queries: u64,
    pub verdicts: Vec<String>,
    pub final_pose: Pose,
    pub seed: u64,
}

fn summaries(report: &SuiteReport) -> impl Iterator<Item = TrialSummary> + '_ {
    report
        .trials
        .iter()
        .zip(&report.expected)
        .enumerate()
        .map(|(i, (t, &expected))| TrialSummary {
            test: i + 1,
            scenario_id: t.scenario_id.clone(),
            status: t.status,
            success: t.status.is_success(),
            expected_success: expected,
            ticks: t.ticks,
            queries: t.queries,
            verdicts: t.verdict_history.iter().map(|v| v.label().to_owned()).collect(),
            final_pose: *t.trajectory.last().expect("trajectory starts at the start pose"),
            seed: t.seed,
        })
}

/// Test / World / Initial Point or Goal / Task columns, then the success
/// rate.
pub fn render_table(report: &SuiteReport) -> String {
    let goal_header = match report.suite {
        SuiteName::Pattern => "Initial Point",
        SuiteName::Category => "Goal",
    };
    let rows: Vec<[String; 5]> = report
        .trials
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let entry = find_entry(&t.scenario_id);
            let world = entry.map_or("-", |e| e.world).to_owned();
            let goal = match (report.suite, entry) {
                (SuiteName::Pattern, Some(e)) => e.start_tag.unwrap_or("-").to_owned(),
                _ => t.scenario_id.split_once('_').map_or("-", |(_, g)| g).replace('_', " "),
            };
            let mark = if t.status.is_success() { "✓" } else { "✗" };
            [(i + 1).to_string(), world, goal, mark.to_owned(), t.status.to_string()]
        })
        .collect();
    let headers = ["Test", "World", goal_header, "Task", "Outcome"];
    let mut widths = headers.map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[&str]| -> String {
        let parts: Vec<String> = cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        parts.join(" | ").trim_end().to_owned() + "\n"
    };
    let mut out = line(&headers);
    out.push_str(&line(
        &widths
            .map(|w| "-".repeat(w))
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>(),
    ));
    for row in &rows {
        out.push_str(&line(&row.iter().map(String::as_str).collect::<Vec<_>>()));
    }
    let _ = writeln!(
        out,
        "Success Rate (%): {:.1} ({}/{})",
        report.success_rate,
        report.successes,
        report.trials.len()
    );
    out
}

const SCALE: f64 = 40.0;
const MARGIN: f64 = 20.0;

fn star(c: Point, r: f64) -> String {
    (0..10)
        .map(|k| {
            let radius = if k % 2 == 0 { r } else { r * 0.45 };
            let a = -std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::PI / 5.0;
            format!("{:.1},{:.1}", c.x + radius * a.cos(), c.y + radius * a.sin())
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Walls, rooms, objects and the driven path. The start is a circle, goals
/// are stars and the final pose is a triangle.
pub fn render_svg(scenario: &ScenarioSpec, trial: &TrialResult) -> String {
    let world = &scenario.world;
    let height = world.height();
    let to_px = |p: Point| Point::new(MARGIN + p.x * SCALE, MARGIN + (height - p.y) * SCALE);
    let (w_px, h_px) = (world.width() * SCALE + 2.0 * MARGIN, height * SCALE + 2.0 * MARGIN);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w_px:.0}" height="{h_px:.0}" viewBox="0 0 {w_px:.0} {h_px:.0}">"#
    );
    let _ = writeln!(svg, "<title>{}: {}</title>", trial.scenario_id, trial.status);
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    for region in world.regions() {
        let pts: Vec<String> = region
            .polygon
            .iter()
            .map(|&p| {
                let q = to_px(p);
                format!("{:.1},{:.1}", q.x, q.y)
            })
            .collect();
        let _ = writeln!(
            svg,
            r##"<polygon class="region" points="{}" fill="#f3f0e6" stroke="#d8d2c0"/>"##,
            pts.join(" ")
        );
        let c = to_px(polygon_centroid(&region.polygon));
        let _ = writeln!(
            svg,
            r##"<text class="region-label" x="{:.1}" y="{:.1}" font-size="11" fill="#9a927c" text-anchor="middle">{}</text>"##,
            c.x, c.y, region.name
        );
    }
    for wall in world.walls() {
        let (a, b) = (to_px(wall.from), to_px(wall.to));
        let _ = writeln!(
            svg,
            r##"<line class="wall" x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#333333" stroke-width="4"/>"##,
            a.x, a.y, b.x, b.y
        );
    }
    for obj in world.objects() {
        let p = to_px(obj.point());
        let _ = writeln!(
            svg,
            r##"<rect class="object" x="{:.1}" y="{:.1}" width="6" height="6" fill="#5b7fa6"/>"##,
            p.x - 3.0,
            p.y - 3.0
        );
        let _ = writeln!(
            svg,
            r##"<text class="object-label" x="{:.1}" y="{:.1}" font-size="9" fill="#5b7fa6">{}</text>"##,
            p.x + 5.0,
            p.y - 4.0,
            obj.name
        );
    }
    let path: Vec<String> = trial
        .trajectory
        .iter()
        .map(|p| {
            let q = to_px(p.point());
            format!("{:.1},{:.1}", q.x, q.y)
        })
        .collect();
    let _ = writeln!(
        svg,
        r##"<polyline class="path" points="{}" fill="none" stroke="#d9534f" stroke-width="2"/>"##,
        path.join(" ")
    );
    let goals: Vec<Point> = match scenario.goal.target {
        GoalTarget::RoomNumber(n) => world
            .objects()
            .iter()
            .filter(|o| o.kind == ObjectKind::RoomPlate { number: n })
            .map(|o| o.point())
            .collect(),
        GoalTarget::RoomCategory(c) => world
            .regions()
            .iter()
            .filter(|r| r.category == c)
            .map(|r| polygon_centroid(&r.polygon))
            .collect(),
    };
    for g in goals {
        let _ = writeln!(
            svg,
            r##"<polygon class="goal" points="{}" fill="#f0ad4e" stroke="#8a5a00"/>"##,
            star(to_px(g), 10.0)
        );
    }
    let s = to_px(scenario.start.point());
    let _ = writeln!(
        svg,
        r##"<circle class="start" cx="{:.1}" cy="{:.1}" r="7" fill="#5cb85c" stroke="#2d662d"/>"##,
        s.x, s.y
    );
    let end = trial.trajectory.last().copied().unwrap_or(scenario.start);
    let e = to_px(end.point());
    // Screen y points down, so the heading angle flips sign.
    let tri: Vec<String> = [0.0, 2.4, -2.4]
        .iter()
        .map(|da: &f64| {
            let a = -end.theta + da;
            let r = if *da == 0.0 { 9.0 } else { 6.0 };
            format!("{:.1},{:.1}", e.x + r * a.cos(), e.y + r * a.sin())
        })
        .collect();
    let _ = writeln!(
        svg,
        r##"<polygon class="end" points="{}" fill="#337ab7" stroke="#1d4a70"/>"##,
        tri.join(" ")
    );
    svg.push_str("</svg>\n");
    svg
}

/// Renders a suite report. `svg-traj` produces one file per trial and
/// needs the trials to come from bundled scenarios.
pub fn render_report(report: &SuiteReport, format: ReportFormat) -> Result<Rendered, HarnessError> {
    match format {
        ReportFormat::Table => Ok(Rendered::Text(render_table(report))),
        ReportFormat::Jsonl => {
            let mut out = String::new();
            for summary in summaries(report) {
                out.push_str(&serde_json::to_string(&summary).expect("summaries serialize"));
                out.push('\n');
            }
            Ok(Rendered::Text(out))
        }
        ReportFormat::SvgTraj => report
            .trials
            .iter()
            .map(|t| {
                let entry = find_entry(&t.scenario_id)
                    .ok_or_else(|| HarnessError::Usage(format!("no bundled scenario `{}` to draw", t.scenario_id)))?;
                Ok((format!("{}.svg", t.scenario_id), render_svg(&entry.load()?, t)))
            })
            .collect::<Result<Vec<_>, HarnessError>>()
            .map(Rendered::Files),
    }
}
